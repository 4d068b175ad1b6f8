//! Truncated formal Laurent series in `X^{-1}` over F_p and their continued
//! fraction expansions.

mod cf;
mod series;

pub use cf::{
    continued_fraction, convergents, CFExpansion, Convergent, PartialQuotient, Termination,
};
pub use series::{paperfolding, paperfolding_series, paperfolding_theta, LaurentSeries};
