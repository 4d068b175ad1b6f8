use std::fmt;

use crate::algebra::{Degree, Poly, PrimeField};
use crate::error::{Error, Result};

/// A formal Laurent series `sum_{i >= start} a_i X^{-i}` over F_p, known up to
/// a finite horizon.
///
/// Coefficients with index greater than `horizon` are unknown and every
/// operation refuses to invent them: results carry the tightest horizon that
/// the inputs justify. A series whose known coefficients all vanish is stored
/// with no coefficients and `start = horizon + 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: PrimeField,
    start: i64,
    coeffs: Vec<u32>,
    horizon: i64,
}

impl LaurentSeries {
    /// Series whose coefficient `a_{first + k}` is `coeffs[k]`; the horizon is
    /// the index of the last supplied coefficient.
    pub fn from_coeffs(field: PrimeField, first: i64, coeffs: Vec<u32>) -> Self {
        let horizon = first + coeffs.len() as i64 - 1;
        Self::build(field, first, coeffs, horizon)
    }

    /// The zero series, known to vanish up to `horizon`.
    pub fn zero(field: PrimeField, horizon: i64) -> Self {
        LaurentSeries {
            field,
            start: horizon + 1,
            coeffs: Vec::new(),
            horizon,
        }
    }

    /// Polynomial `P` viewed as a Laurent series known up to `horizon`
    /// (its coefficients below `X^{-horizon}` are known to vanish).
    pub fn from_poly(poly: &Poly, horizon: i64) -> Self {
        let field = poly.field();
        let Some(d) = poly.deg() else {
            return LaurentSeries::zero(field, horizon);
        };
        let first = -(d as i64);
        let len = (horizon - first + 1).max(0) as usize;
        let coeffs = (0..len)
            .map(|k| {
                let exp = d as i64 - k as i64;
                if exp >= 0 {
                    poly.coeff(exp as usize)
                } else {
                    0
                }
            })
            .collect();
        Self::build(field, first, coeffs, horizon)
    }

    fn build(field: PrimeField, first: i64, mut coeffs: Vec<u32>, horizon: i64) -> Self {
        for c in coeffs.iter_mut() {
            *c %= field.p();
        }
        let lead = coeffs.iter().position(|&c| c != 0);
        match lead {
            None => LaurentSeries::zero(field, horizon),
            Some(k) => {
                coeffs.drain(..k);
                LaurentSeries {
                    field,
                    start: first + k as i64,
                    coeffs,
                    horizon,
                }
            }
        }
    }

    /// Expansion of `P / Q` up to index `horizon`, by long division.
    pub fn from_rational(num: &Poly, den: &Poly, horizon: i64) -> Result<Self> {
        let field = num.field();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(LaurentSeries::zero(field, horizon));
        }
        // P/Q = ((P X^s) div Q) X^{-s} + O(X^{-s-1}); choose s = max(horizon, 0)
        // so the quotient holds every term of index <= horizon.
        let s = horizon.max(0) as usize;
        let (q, _) = num.shift(s).divmod(den)?;
        let dq = q.deg().unwrap_or(0) as i64;
        // coefficient of X^e in q gives index s - e of the series
        let first = s as i64 - dq;
        let coeffs: Vec<u32> = (first..=horizon)
            .map(|i| {
                let e = s as i64 - i;
                if e >= 0 {
                    q.coeff(e as usize)
                } else {
                    0
                }
            })
            .collect();
        if q.is_zero() {
            return Ok(LaurentSeries::zero(field, horizon));
        }
        Ok(Self::build(field, first, coeffs, horizon))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Index of the first nonzero coefficient (`horizon + 1` if none is known).
    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `deg(theta) = -start`; `NegInfinity` when the series vanishes within
    /// its horizon (its true degree is then below `-horizon`).
    pub fn degree(&self) -> Degree {
        if self.is_zero() {
            Degree::NegInfinity
        } else {
            Degree::Finite(-self.start)
        }
    }

    /// Coefficient `a_i`; indices below `start` are zero, indices past the
    /// horizon are an error.
    pub fn coeff(&self, i: i64) -> Result<u32> {
        if i > self.horizon {
            return Err(Error::HorizonExceeded {
                needed: i,
                horizon: self.horizon,
            });
        }
        if i < self.start {
            return Ok(0);
        }
        Ok(self.coeffs[(i - self.start) as usize])
    }

    /// Coefficients `a_from..=a_to`.
    pub fn coeff_range(&self, from: i64, to: i64) -> Result<Vec<u32>> {
        (from..=to).map(|i| self.coeff(i)).collect()
    }

    /// Fractional part: the terms with index `i >= 1`.
    pub fn frac(&self) -> LaurentSeries {
        if self.start >= 1 {
            return self.clone();
        }
        let skip = (1 - self.start) as usize;
        if skip >= self.coeffs.len() {
            return LaurentSeries::zero(self.field, self.horizon);
        }
        Self::build(self.field, 1, self.coeffs[skip..].to_vec(), self.horizon)
    }

    /// Polynomial part `theta - frac(theta)`.
    pub fn integer_part(&self) -> Result<Poly> {
        if self.horizon < 0 && self.start <= 0 {
            return Err(Error::HorizonExceeded {
                needed: 0,
                horizon: self.horizon,
            });
        }
        if self.start > 0 {
            return Ok(Poly::zero(self.field));
        }
        let top = (-self.start) as usize;
        let mut coeffs = vec![0u32; top + 1];
        for (e, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeff(-(e as i64))?;
        }
        Ok(Poly::new(self.field, coeffs))
    }

    /// `X^r * Q * theta`. The result is known up to index
    /// `horizon - r - deg Q`.
    pub fn mul_poly_shift(&self, q: &Poly, r: usize) -> Result<LaurentSeries> {
        assert_eq!(
            q.field(),
            self.field,
            "series and polynomial over different fields"
        );
        let Some(dq) = q.deg() else {
            return Ok(LaurentSeries::zero(self.field, self.horizon - r as i64));
        };
        let dq = dq as i64;
        let r = r as i64;
        let new_horizon = self.horizon - r - dq;
        if self.is_zero() {
            return Ok(LaurentSeries::zero(self.field, new_horizon));
        }
        // coefficient of X^{-i} in Q*theta is sum_k q_k a_{i+k}
        let first = self.start - dq;
        if new_horizon < first - r {
            return Err(Error::HorizonExceeded {
                needed: first - r,
                horizon: new_horizon,
            });
        }
        let p = self.field.p() as u64;
        let qc = q.coeffs();
        let coeffs: Vec<u32> = (first..=self.horizon - dq)
            .map(|i| {
                let mut acc = 0u64;
                for (k, &qk) in qc.iter().enumerate() {
                    let idx = i + k as i64;
                    if qk != 0 && idx >= self.start {
                        acc += qk as u64 * self.coeffs[(idx - self.start) as usize] as u64;
                    }
                }
                (acc % p) as u32
            })
            .collect();
        Ok(Self::build(self.field, first - r, coeffs, new_horizon))
    }

    /// `X^r * theta`.
    pub fn shift(&self, r: usize) -> LaurentSeries {
        let r = r as i64;
        LaurentSeries {
            field: self.field,
            start: self.start - r,
            coeffs: self.coeffs.clone(),
            horizon: self.horizon - r,
        }
    }

    /// Known up to the smaller of the two horizons.
    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        assert_eq!(self.field, other.field);
        let f = self.field;
        let horizon = self.horizon.min(other.horizon);
        let first = self.start.min(other.start);
        if first > horizon {
            return LaurentSeries::zero(f, horizon);
        }
        let coeffs = (first..=horizon)
            .map(|i| f.sub(self.coeff(i).unwrap(), other.coeff(i).unwrap()))
            .collect();
        Self::build(f, first, coeffs, horizon)
    }

    /// Same series with the horizon lowered to `horizon`.
    pub fn truncate(&self, horizon: i64) -> LaurentSeries {
        if horizon >= self.horizon {
            return self.clone();
        }
        if horizon < self.start {
            return LaurentSeries::zero(self.field, horizon);
        }
        let keep = (horizon - self.start + 1) as usize;
        Self::build(
            self.field,
            self.start,
            self.coeffs[..keep].to_vec(),
            horizon,
        )
    }

    /// The fractional part as an exact rational `N / X^K` with `K = horizon`:
    /// returns `N = sum_{i=1}^{K} a_i X^{K-i}`.
    pub fn frac_numerator(&self) -> Poly {
        let k = self.horizon.max(0);
        let mut coeffs = vec![0u32; k as usize];
        for i in self.start.max(1)..=k {
            coeffs[(k - i) as usize] = self.coeff(i).unwrap();
        }
        Poly::new(self.field, coeffs)
    }

    /// Text form `p j a_j a_{j+1} ... a_K`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}", self.field.p(), self.start.min(self.horizon + 1));
        for c in &self.coeffs {
            out.push(' ');
            out.push_str(&c.to_string());
        }
        out
    }

    /// Parses the text form written by [`to_text`](Self::to_text). The
    /// horizon is the index of the last listed coefficient.
    pub fn parse(text: &str) -> Result<LaurentSeries> {
        let mut it = text.split_whitespace();
        let p: u32 = it
            .next()
            .ok_or_else(|| Error::Parse("missing modulus".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("modulus: {e}")))?;
        let field = PrimeField::new(p)?;
        let first: i64 = it
            .next()
            .ok_or_else(|| Error::Parse("missing start index".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("start index: {e}")))?;
        let coeffs = it
            .map(|t| {
                let v: u32 = t
                    .parse()
                    .map_err(|e| Error::Parse(format!("coefficient {t:?}: {e}")))?;
                if v >= p {
                    return Err(Error::Parse(format!("coefficient {v} not below {p}")));
                }
                Ok(v)
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(LaurentSeries::from_coeffs(field, first, coeffs))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LaurentSeries[{}](start={}, horizon={}, coeffs={:?})",
            self.field, self.start, self.horizon, self.coeffs
        )
    }
}

/// Paperfolding sequence in {0, 1}: writing `n = 2^v k` with `k` odd,
/// `f_n = 0` if `k = 1 (mod 4)` and `f_n = 1` if `k = 3 (mod 4)`.
pub fn paperfolding(n: u64) -> u32 {
    assert!(n >= 1, "paperfolding sequence starts at n = 1");
    let k = n >> n.trailing_zeros();
    if k % 4 == 1 {
        0
    } else {
        1
    }
}

/// `sum_{i >= 1} f_i X^{-i}` over the given field, known to index `horizon`.
pub fn paperfolding_series(field: PrimeField, horizon: usize) -> LaurentSeries {
    let coeffs = (1..=horizon as u64).map(paperfolding).collect();
    LaurentSeries::from_coeffs(field, 1, coeffs)
}

/// The paperfolding series over F_3.
pub fn paperfolding_theta(horizon: usize) -> LaurentSeries {
    paperfolding_series(PrimeField::new(3).expect("3 is prime"), horizon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn geometric_series() {
        let f3 = f(3);
        let th = LaurentSeries::from_rational(&Poly::one(f3), &Poly::from_signed(f3, &[-1, 1]), 5)
            .unwrap();
        assert_eq!(th.start(), 1);
        assert_eq!(th.coeff_range(1, 5).unwrap(), vec![1; 5]);
        assert!(th.coeff(6).is_err());
    }

    #[test]
    fn rational_edge_cases() {
        let f3 = f(3);
        let x = LaurentSeries::from_rational(&Poly::x(f3), &Poly::one(f3), 4).unwrap();
        assert_eq!(x.start(), -1);
        assert_eq!(x.coeff(-1).unwrap(), 1);
        assert_eq!(x.coeff_range(0, 4).unwrap(), vec![0; 5]);

        let z = LaurentSeries::from_rational(&Poly::zero(f3), &Poly::x(f3), 4).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), Degree::NegInfinity);

        assert_eq!(
            LaurentSeries::from_rational(&Poly::one(f3), &Poly::zero(f3), 4),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn paperfolding_values() {
        let first: Vec<u32> = (1..=8).map(paperfolding).collect();
        assert_eq!(first, vec![0, 0, 1, 0, 0, 1, 1, 0]);
        assert_eq!(paperfolding(12), 1);
        assert_eq!(paperfolding(20), 0);
        for n in 1..=10_000 {
            assert_eq!(paperfolding(2 * n), paperfolding(n));
        }
        let th = paperfolding_theta(16);
        assert_eq!(th.start(), 3);
        assert_eq!(th.coeff(12).unwrap(), 1);
    }

    #[test]
    fn fractional_part() {
        let f3 = f(3);
        // X + 1 + X^{-1}
        let th = LaurentSeries::from_coeffs(f3, -1, vec![1, 1, 1]);
        let fr = th.frac();
        assert_eq!(fr.start(), 1);
        assert_eq!(fr.coeff(1).unwrap(), 1);
        assert_eq!(th.integer_part().unwrap(), Poly::from_signed(f3, &[1, 1]));

        let g = LaurentSeries::from_coeffs(f3, 2, vec![1, 2, 0]);
        assert_eq!(g.frac(), g);

        let x2 = LaurentSeries::from_poly(&Poly::monomial(f3, 1, 2), 3);
        assert!(x2.frac().is_zero());
        assert_eq!(x2.frac().horizon(), 3);
    }

    #[test]
    fn multiply_and_shift() {
        let f3 = f(3);
        let xm1 = Poly::from_signed(f3, &[-1, 1]);
        let th = LaurentSeries::from_rational(&Poly::one(f3), &xm1, 10).unwrap();
        assert_eq!(th.mul_poly_shift(&Poly::one(f3), 0).unwrap(), th);

        let prod = th.mul_poly_shift(&xm1, 0).unwrap();
        assert_eq!(prod.horizon(), 9);
        assert_eq!(prod.start(), 0);
        assert_eq!(prod.coeff(0).unwrap(), 1);
        assert!(prod.frac().is_zero());

        let inv_x = LaurentSeries::from_coeffs(f3, 1, vec![1, 0, 0, 0]);
        let shifted = inv_x.mul_poly_shift(&Poly::one(f3), 2).unwrap();
        assert_eq!(shifted.start(), -1);
        assert_eq!(shifted.horizon(), 2);
        assert_eq!(shifted.degree(), Degree::Finite(1));
    }

    #[test]
    fn mul_poly_shift_refuses_to_invent_coefficients() {
        let f3 = f(3);
        let th = LaurentSeries::from_coeffs(f3, 1, vec![1, 1, 0, 2]);
        let q = Poly::from_signed(f3, &[1, 0, 1]);
        let prod = th.mul_poly_shift(&q, 1).unwrap();
        assert_eq!(prod.horizon(), 4 - 1 - 2);
        assert!(matches!(prod.coeff(2), Err(Error::HorizonExceeded { .. })));
        // X (X^2 + 1)(X^-1 + X^-2 + 2X^-4) = X^2 + X + 1 + 0 X^-1 + ...
        assert_eq!(prod.coeff_range(-2, 1).unwrap(), vec![1, 1, 1, 0]);
    }

    #[test]
    fn text_round_trip() {
        let th = paperfolding_theta(20);
        let back = LaurentSeries::parse(&th.to_text()).unwrap();
        assert_eq!(back, th);
        assert!(LaurentSeries::parse("4 1 0 1").is_err());
        assert!(LaurentSeries::parse("3 1 0 5").is_err());
        assert!(LaurentSeries::parse("3").is_err());
    }
}
