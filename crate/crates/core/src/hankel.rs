//! Hankel matrices of Laurent series, their regular sizes, the deficiency of
//! a series under shifts `X^r`, and an exhaustive search for the quantity
//! `min |Q| * ||X^r Q theta||`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::algebra::{FpMatrix, Poly};
use crate::error::{Error, Result};
use crate::laurent::{continued_fraction, LaurentSeries};

/// Read-only view of the infinite Hankel matrix `H(theta)`: row `i >= 1`,
/// column `l >= 0` holds `a_{i+l}`. Entries past the horizon are an error.
#[derive(Clone, Copy, Debug)]
pub struct HankelView<'a> {
    theta: &'a LaurentSeries,
}

impl<'a> HankelView<'a> {
    pub fn new(theta: &'a LaurentSeries) -> Self {
        HankelView { theta }
    }

    pub fn entry(&self, row: usize, col: usize) -> Result<u32> {
        assert!(row >= 1, "Hankel rows are indexed from 1");
        self.theta.coeff((row + col) as i64)
    }

    /// Upper-left `rows x cols` block.
    pub fn block(&self, rows: usize, cols: usize) -> Result<FpMatrix> {
        let field = self.theta.field();
        if rows == 0 || cols == 0 {
            return Ok(FpMatrix::zeros(field, rows, cols));
        }
        let needed = (rows + cols - 1) as i64;
        if needed > self.theta.horizon() {
            return Err(Error::HorizonExceeded {
                needed,
                horizon: self.theta.horizon(),
            });
        }
        let seq = self.theta.coeff_range(1, needed)?;
        let mut m = FpMatrix::zeros(field, rows, cols);
        for i in 0..rows {
            for l in 0..cols {
                m.set(i, l, seq[i + l]);
            }
        }
        Ok(m)
    }
}

pub fn hankel_submatrix(theta: &LaurentSeries, rows: usize, cols: usize) -> Result<FpMatrix> {
    HankelView::new(theta).block(rows, cols)
}

/// All `m <= m_max` whose upper-left `m x m` Hankel block is regular.
pub fn regular_sizes(theta: &LaurentSeries, m_max: usize) -> Result<BTreeSet<usize>> {
    let view = HankelView::new(theta);
    let full = view.block(m_max, m_max)?;
    Ok((1..=m_max)
        .filter(|&m| full.top_rows(m).column_range(0, m).is_regular())
        .collect())
}

/// One quotient attaining the largest certified degree for its shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeWitness {
    pub r: usize,
    /// 1-based index of the partial quotient in the expansion of `<X^r theta>`.
    pub h: usize,
    pub degree: usize,
}

/// A shift whose expansion vanishes for more than half of its precision,
/// which is how a rational series shows up in truncated data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalCollapse {
    pub r: usize,
    pub next_degree_at_least: usize,
    pub horizon: i64,
}

/// Result of scanning the continued fractions of `<X^r theta>` for
/// `r = 0..=r_max`.
///
/// `d_hat` is a certified lower estimate of the deficiency: each scanned
/// quotient degree is exact, but nothing is claimed for shifts or quotients
/// beyond the scanned, certified range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeficiencyReport {
    pub p: u32,
    pub horizon: i64,
    pub r_max: usize,
    pub scanned_r: usize,
    pub max_quotients: usize,
    pub certified_quotients: usize,
    /// Largest certified quotient degree.
    pub max_degree: usize,
    /// Largest certified lower bound on the degree of the first unresolved
    /// quotient of a shift.
    pub max_tail_degree: usize,
    pub d_hat: usize,
    pub witnesses: Vec<DegreeWitness>,
    pub collapse: Option<RationalCollapse>,
}

impl DeficiencyReport {
    /// `max(max_degree, max_tail_degree)`, the largest degree certified to
    /// occur.
    pub fn largest_certified_degree(&self) -> usize {
        self.max_degree.max(self.max_tail_degree)
    }

    /// Quotients of degree above `bound` that were certified to occur, as
    /// witnesses.
    pub fn violations(&self, bound: usize) -> Vec<DegreeWitness> {
        self.witnesses
            .iter()
            .filter(|w| w.degree > bound)
            .copied()
            .collect()
    }

    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("p".to_string(), self.p.to_string()),
            ("horizon".to_string(), self.horizon.to_string()),
            ("r_max".to_string(), self.r_max.to_string()),
            ("scanned_r".to_string(), self.scanned_r.to_string()),
            (
                "certified_quotients".to_string(),
                self.certified_quotients.to_string(),
            ),
            (
                "max_certified_degree".to_string(),
                self.max_degree.to_string(),
            ),
            (
                "max_tail_degree_lower_bound".to_string(),
                self.max_tail_degree.to_string(),
            ),
            ("d_hat".to_string(), self.d_hat.to_string()),
            (
                "d_hat_scope".to_string(),
                format!(
                    "verified over r <= {} with horizon {}; not a claim about all r",
                    self.scanned_r.saturating_sub(1),
                    self.horizon
                ),
            ),
        ];
        let top: Vec<String> = self
            .witnesses
            .iter()
            .filter(|w| w.degree == self.max_degree)
            .take(8)
            .map(|w| format!("(r={},h={},deg={})", w.r, w.h, w.degree))
            .collect();
        kv.push(("max_degree_witnesses".to_string(), top.join(" ")));
        kv.push((
            "rational_collapse".to_string(),
            match &self.collapse {
                None => "none".to_string(),
                Some(c) => format!(
                    "r={} next_degree_at_least={} horizon={}",
                    c.r, c.next_degree_at_least, c.horizon
                ),
            },
        ));
        kv
    }
}

struct ShiftScan {
    r: usize,
    degrees: Vec<usize>,
    tail: Option<usize>,
    horizon: i64,
}

fn scan_shift(theta: &LaurentSeries, r: usize, max_quotients: usize) -> Result<ShiftScan> {
    let shifted = theta.shift(r).frac();
    let cf = continued_fraction(&shifted, max_quotients)?;
    Ok(ShiftScan {
        r,
        degrees: cf.quotient_degrees(),
        tail: cf.next_degree_at_least(),
        horizon: shifted.horizon(),
    })
}

/// Scans the certified partial quotients of `<X^r theta>` for `r <= r_max`.
///
/// The scan stops early, reporting a [`RationalCollapse`], at the first shift
/// whose fractional part agrees with a convergent for more than half of its
/// remaining precision.
pub fn deficiency_scan(
    theta: &LaurentSeries,
    r_max: usize,
    max_quotients: usize,
) -> Result<DeficiencyReport> {
    if theta.frac().is_zero() {
        return Err(Error::InvalidParameter(
            "deficiency scan needs a series with nonzero fractional part".into(),
        ));
    }
    if (r_max as i64) >= theta.horizon() {
        return Err(Error::HorizonExceeded {
            needed: r_max as i64 + 1,
            horizon: theta.horizon(),
        });
    }
    let scans: Vec<ShiftScan> = (0..=r_max)
        .into_par_iter()
        .map(|r| scan_shift(theta, r, max_quotients))
        .collect::<Result<_>>()?;

    let mut report = DeficiencyReport {
        p: theta.field().p(),
        horizon: theta.horizon(),
        r_max,
        scanned_r: 0,
        max_quotients,
        certified_quotients: 0,
        max_degree: 0,
        max_tail_degree: 0,
        d_hat: 0,
        witnesses: Vec::new(),
        collapse: None,
    };
    for scan in scans {
        if let Some(tail) = scan.tail {
            if 2 * tail as i64 > scan.horizon {
                report.collapse = Some(RationalCollapse {
                    r: scan.r,
                    next_degree_at_least: tail,
                    horizon: scan.horizon,
                });
                break;
            }
            report.max_tail_degree = report.max_tail_degree.max(tail);
        }
        report.scanned_r += 1;
        report.certified_quotients += scan.degrees.len();
        if let Some((h, &deg)) = scan
            .degrees
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        {
            report.max_degree = report.max_degree.max(deg);
            report.witnesses.push(DegreeWitness {
                r: scan.r,
                h: h + 1,
                degree: deg,
            });
        }
    }
    report.d_hat = report.largest_certified_degree().saturating_sub(1);
    Ok(report)
}

/// Base-2 exponent of `|Q| * ||X^r Q theta||`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exponent {
    /// `<X^r Q theta>` vanishes to the available precision (exact
    /// annihilation for a rational series).
    NegInfinity,
    Finite(i64),
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::NegInfinity => write!(f, "-inf"),
            Exponent::Finite(e) => write!(f, "{e}"),
        }
    }
}

/// Minimum found by [`brute_inf`], with the `(r, Q)` attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfimumSearch {
    pub exponent: Exponent,
    pub r: usize,
    pub q: Poly,
    pub candidates: u64,
}

/// Exhaustive minimum over `r <= r_max` and nonzero `Q` with
/// `deg Q <= deg_q_max` of `deg Q + deg <X^r Q theta>`.
///
/// Only monic `Q` are enumerated: for a nonzero scalar `c`,
/// `|cQ| * ||X^r cQ theta|| = |Q| * ||X^r Q theta||`.
pub fn brute_inf(theta: &LaurentSeries, r_max: usize, deg_q_max: usize) -> Result<InfimumSearch> {
    let field = theta.field();
    let p = field.p() as u64;
    let needed = (r_max + deg_q_max + 1) as i64;
    if needed > theta.horizon() {
        return Err(Error::HorizonExceeded {
            needed,
            horizon: theta.horizon(),
        });
    }
    let horizon = theta.horizon();
    let seq = theta.coeff_range(1, horizon)?;

    // work item: (degree, index of the lower coefficients in base p)
    let items: Vec<(usize, u64)> = (0..=deg_q_max)
        .flat_map(|d| (0..p.pow(d as u32)).map(move |code| (d, code)))
        .collect();
    let candidates = items.len() as u64 * (r_max as u64 + 1);

    let best = items
        .par_iter()
        .map(|&(d, code)| {
            let mut q = field.digits(code as u128, d);
            q.push(1);
            let mut best: Option<(Exponent, usize)> = None;
            for r in 0..=r_max {
                let e = frac_exponent(&seq, &q, r, horizon, field.p());
                let cand = match e {
                    None => Exponent::NegInfinity,
                    Some(i) => Exponent::Finite(d as i64 - i),
                };
                if best.is_none_or(|(b, _)| cand < b) {
                    best = Some((cand, r));
                }
            }
            let (e, r) = best.expect("r range is nonempty");
            (e, d, code, r)
        })
        .min_by(|a, b| a.0.cmp(&b.0).then((a.1, a.2, a.3).cmp(&(b.1, b.2, b.3))))
        .expect("at least the constant polynomial 1");

    let (exponent, d, code, r) = best;
    let mut q = field.digits(code as u128, d);
    q.push(1);
    Ok(InfimumSearch {
        exponent,
        r,
        q: Poly::new(field, q),
        candidates,
    })
}

/// Index `i >= 1` of the first nonzero coefficient of `<X^r Q theta>`, where
/// that coefficient is `sum_k q_k a_{i+r+k}`; `None` if all known ones vanish.
fn frac_exponent(seq: &[u32], q: &[u32], r: usize, horizon: i64, p: u32) -> Option<i64> {
    let dq = q.len() - 1;
    let last = horizon as usize - r - dq;
    let p = p as u64;
    (1..=last)
        .find(|&i| {
            let acc = q.iter().enumerate().fold(0u64, |acc, (k, &qk)| {
                acc + qk as u64 * seq[i + r + k - 1] as u64
            });
            acc % p != 0
        })
        .map(|i| i as i64)
}
