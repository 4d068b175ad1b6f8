use crate::algebra::{Poly, PrimeField};
use crate::error::Result;

use super::LaurentSeries;

/// One partial quotient `A_h`, `h >= 1`.
///
/// Every emitted quotient has a certified degree. `exact` additionally
/// certifies the polynomial itself: the truncated input then determines
/// `A_h` uniquely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialQuotient {
    pub poly: Poly,
    pub degree: usize,
    pub exact: bool,
}

/// Why the expansion stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// `max_quotients` were produced.
    MaxQuotients,
    /// The known coefficients do not determine the degree of the next
    /// quotient. The series then agrees with its last convergent up to the
    /// horizon, and when that convergent is exact the next quotient has
    /// degree at least `K + 1 - 2 d_h`.
    PrecisionExhausted { next_degree_at_least: Option<usize> },
}

/// Continued fraction `[A_0; A_1, A_2, ...]` of a truncated Laurent series.
#[derive(Clone, Debug)]
pub struct CFExpansion {
    pub a0: Poly,
    pub quotients: Vec<PartialQuotient>,
    /// Cumulative degrees `d_h = deg A_1 + ... + deg A_h`.
    pub degrees: Vec<usize>,
    pub horizon: i64,
    pub termination: Termination,
}

impl CFExpansion {
    pub fn field(&self) -> PrimeField {
        self.a0.field()
    }

    /// Degrees `deg A_h` in order.
    pub fn quotient_degrees(&self) -> Vec<usize> {
        self.quotients.iter().map(|q| q.degree).collect()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.quotients.iter().map(|q| q.degree).max()
    }

    /// Certified lower bound on the degree of the first quotient that was not
    /// emitted. Large values mean the series is rational to within its
    /// horizon.
    pub fn next_degree_at_least(&self) -> Option<usize> {
        match self.termination {
            Termination::PrecisionExhausted {
                next_degree_at_least,
            } => next_degree_at_least,
            Termination::MaxQuotients => None,
        }
    }
}

/// A convergent `P_h / Q_h` with `d = deg Q_h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: Poly,
    pub q: Poly,
    pub d: usize,
}

/// Continued fraction expansion of `theta`, emitting at most `max_quotients`
/// partial quotients.
///
/// The fractional part, known to index `K`, is the exact rational
/// `N / X^K` up to an error of degree `< -K`; the Euclidean algorithm runs
/// on that rational. Writing `d_h` for the cumulative degrees, quotient
/// `A_{h+1}` is emitted with certified degree iff `d_h + d_{h+1} <= K`
/// (then `deg(theta - P_h/Q_h) = -d_h - d_{h+1}` is visible above the
/// truncation error), and is marked exact iff `2 d_{h+1} <= K`.
pub fn continued_fraction(theta: &LaurentSeries, max_quotients: usize) -> Result<CFExpansion> {
    let field = theta.field();
    let a0 = theta.integer_part()?;
    let horizon = theta.horizon();
    let k = horizon.max(0) as usize;
    let mut quotients = Vec::new();
    let mut degrees = Vec::new();

    let mut prev = Poly::monomial(field, 1, k);
    let mut cur = theta.frac().frac_numerator();
    let mut d = 0usize;
    let termination = loop {
        if quotients.len() >= max_quotients {
            break Termination::MaxQuotients;
        }
        // Reaching here with `cur = 0`, or with a next degree that is not
        // certified, both mean deg(theta - P_h/Q_h) < -K.
        let tail_bound = || {
            let last_exact = quotients.last().is_none_or(|q: &PartialQuotient| q.exact);
            last_exact.then(|| k + 1 - 2 * d)
        };
        if cur.is_zero() {
            break Termination::PrecisionExhausted {
                next_degree_at_least: tail_bound(),
            };
        }
        let (a, rem) = prev.divmod(&cur)?;
        let g = a
            .deg()
            .expect("quotient of a higher-degree polynomial is nonzero");
        let next = d + g;
        if d + next > k {
            break Termination::PrecisionExhausted {
                next_degree_at_least: tail_bound(),
            };
        }
        quotients.push(PartialQuotient {
            poly: a,
            degree: g,
            exact: 2 * next <= k,
        });
        degrees.push(next);
        d = next;
        prev = cur;
        cur = rem;
    };
    Ok(CFExpansion {
        a0,
        quotients,
        degrees,
        horizon,
        termination,
    })
}

/// Convergents `P_h/Q_h` for every exact quotient, via
/// `P_h = A_h P_{h-1} + P_{h-2}`, `Q_h = A_h Q_{h-1} + Q_{h-2}`.
pub fn convergents(cf: &CFExpansion) -> Vec<Convergent> {
    let f = cf.field();
    let mut p_prev = Poly::one(f);
    let mut q_prev = Poly::zero(f);
    let mut p_cur = cf.a0.clone();
    let mut q_cur = Poly::one(f);
    let mut out = Vec::new();
    for (quot, &d) in cf.quotients.iter().zip(&cf.degrees) {
        if !quot.exact {
            break;
        }
        let p_next = &(&quot.poly * &p_cur) + &p_prev;
        let q_next = &(&quot.poly * &q_cur) + &q_prev;
        debug_assert_eq!(q_next.deg(), Some(d));
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        out.push(Convergent {
            p: p_cur.clone(),
            q: q_cur.clone(),
            d,
        });
    }
    out
}
