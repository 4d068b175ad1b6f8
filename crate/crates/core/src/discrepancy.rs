//! Exact star discrepancy of small point sets in dimensions 1 to 3.
//!
//! The supremum over anchored boxes `[0, b)` is approached either with each
//! `b_i` just above a point coordinate (the count exceeds the volume) or with
//! each `b_i` equal to a point coordinate or 1 (the volume exceeds the
//! count). Both families are evaluated exactly.

use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::digital::{digital_point, DigitalPoint, NetSpec};
use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;

/// Largest point count accepted per dimension by the exact routine.
pub const EXACT_BUDGET: [usize; 3] = [1 << 20, 20_000, 4_096];
/// Largest point count accepted by the naive routine.
pub const NAIVE_BUDGET: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    s: usize,
    points: Vec<Vec<BigRational>>,
}

impl PointSet {
    pub fn new(s: usize, points: Vec<Vec<BigRational>>) -> Result<Self> {
        if !(1..=3).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "dimension {s} is outside 1..=3"
            )));
        }
        let zero = BigRational::zero();
        let one = BigRational::one();
        for (n, x) in points.iter().enumerate() {
            if x.len() != s {
                return Err(Error::DimensionMismatch(format!(
                    "point {n} has {} coordinates, expected {s}",
                    x.len()
                )));
            }
            if x.iter().any(|c| *c < zero || *c >= one) {
                return Err(Error::InvalidParameter(format!(
                    "point {n} lies outside [0,1)^{s}"
                )));
            }
        }
        Ok(PointSet { s, points })
    }

    pub fn from_digital(points: &[DigitalPoint]) -> Result<Self> {
        let s = points.first().map_or(1, DigitalPoint::dim);
        PointSet::new(s, points.iter().map(DigitalPoint::values).collect())
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<BigRational>] {
        &self.points
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> PointSet {
        PointSet {
            s: self.s,
            points: self.points[..n.min(self.points.len())].to_vec(),
        }
    }

    /// Keeps only the listed coordinates.
    pub fn project(&self, coords: &[usize]) -> Result<PointSet> {
        PointSet::new(
            coords.len(),
            self.points
                .iter()
                .map(|x| coords.iter().map(|&i| x[i].clone()).collect())
                .collect(),
        )
    }
}

/// The box attaining the supremum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub bounds: Vec<BigRational>,
    /// `true`: count of points with `x <= b` exceeds the volume (the
    /// supremum is approached from above `b`); `false`: the volume of
    /// `[0, b)` exceeds the count of points in it.
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscResult {
    pub n: usize,
    pub dstar: BigRational,
    pub witness: Witness,
}

/// Signed gap at a witness box, oriented so that it is nonnegative at the
/// box returned by the exact routines.
pub fn local_discrepancy(points: &PointSet, w: &Witness) -> BigRational {
    let n = BigRational::from_integer(BigInt::from(points.len()));
    let vol: BigRational = w.bounds.iter().cloned().product();
    let count = points
        .points
        .iter()
        .filter(|x| {
            x.iter()
                .zip(&w.bounds)
                .all(|(c, b)| if w.closed { c <= b } else { c < b })
        })
        .count();
    let frac = BigRational::from_integer(BigInt::from(count)) / n;
    if w.closed {
        frac - vol
    } else {
        vol - frac
    }
}

fn empty_error() -> Error {
    Error::InvalidParameter("star discrepancy of an empty point set".into())
}

fn trivial_result(s: usize, n: usize) -> DiscResult {
    DiscResult {
        n,
        dstar: BigRational::zero(),
        witness: Witness {
            bounds: vec![BigRational::zero(); s],
            closed: false,
        },
    }
}

/// Coordinates as integers over a per-coordinate common denominator.
struct Scaled {
    n: i128,
    dens: Vec<i128>,
    /// `coords[i][k]`: numerator of coordinate `i` of point `k`.
    coords: Vec<Vec<i128>>,
    /// Sorted distinct numerators of each coordinate.
    grids: Vec<Vec<i128>>,
}

impl Scaled {
    fn new(points: &PointSet) -> Result<Self> {
        let s = points.s;
        let n = points.len();
        let mut dens = Vec::with_capacity(s);
        let mut coords = Vec::with_capacity(s);
        let mut bound = BigInt::from(n as u64);
        for i in 0..s {
            let l = points
                .points
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x[i].denom()));
            bound *= &l;
            let nums: Option<Vec<i128>> = points
                .points
                .iter()
                .map(|x| (x[i].numer() * (&l / x[i].denom())).to_i128())
                .collect();
            dens.push(l.to_i128());
            coords.push(nums);
        }
        // every compared quantity is at most n * prod(L_i) in magnitude
        if bound.bits() > 125 {
            return Err(Error::BudgetExceeded(format!(
                "common denominators need {} bits; exact fast path is limited to 125",
                bound.bits()
            )));
        }
        let dens: Vec<i128> = dens.into_iter().map(|d| d.expect("bounded")).collect();
        let coords: Vec<Vec<i128>> = coords.into_iter().map(|c| c.expect("bounded")).collect();
        let grids = coords
            .iter()
            .map(|c| {
                let mut g = c.clone();
                g.sort_unstable();
                g.dedup();
                g
            })
            .collect();
        Ok(Scaled {
            n: n as i128,
            dens,
            coords,
            grids,
        })
    }

    fn rank(&self, i: usize, k: usize) -> usize {
        self.grids[i]
            .binary_search(&self.coords[i][k])
            .expect("value in grid")
    }
}

/// Best candidate so far: scaled gap, grid indices (index `grid.len()` means
/// the bound 1) and the side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Candidate {
    value: i128,
    idx: [usize; 3],
    closed: bool,
}

impl Candidate {
    fn start() -> Self {
        Candidate {
            value: 0,
            idx: [0; 3],
            closed: false,
        }
    }

    fn better(self, other: Candidate) -> Candidate {
        if other.value > self.value {
            other
        } else {
            self
        }
    }
}

/// Sweeps `b_1` upward over a subset of the points, tracking counts per rank
/// of the second coordinate. `factor_num / factor_den` is the volume of the
/// third side (1 in two dimensions) and `idx3` its grid index.
fn sweep2(
    sc: &Scaled,
    subset: &[usize],
    factor_num: i128,
    factor_den: i128,
    idx3: usize,
    closed_side: Option<bool>,
) -> Candidate {
    let g1 = &sc.grids[0];
    let g2 = &sc.grids[1];
    let (l1, l2) = (sc.dens[0], sc.dens[1]);
    let total_scale = l1 * l2 * factor_den;
    let mut by_rank1: Vec<Vec<usize>> = vec![Vec::new(); g1.len()];
    for &k in subset {
        by_rank1[sc.rank(0, k)].push(sc.rank(1, k));
    }
    let mut cnt = vec![0i128; g2.len()];
    let mut best = Candidate::start();
    let want_open = closed_side != Some(true);
    let want_closed = closed_side != Some(false);

    let eval_open = |cnt: &[i128], b1: i128, i1: usize, best: &mut Candidate| {
        // b_2 ranges over grid values and 1; count points strictly below
        let mut below = 0i128;
        for (j, &b2) in g2.iter().enumerate() {
            let value = sc.n * b1 * b2 * factor_num - below * total_scale;
            *best = best.better(Candidate {
                value,
                idx: [i1, j, idx3],
                closed: false,
            });
            below += cnt[j];
        }
        let value = sc.n * b1 * l2 * factor_num - below * total_scale;
        *best = best.better(Candidate {
            value,
            idx: [i1, g2.len(), idx3],
            closed: false,
        });
    };

    for (i1, &b1) in g1.iter().enumerate() {
        if want_open {
            eval_open(&cnt, b1, i1, &mut best);
        }
        for &r2 in &by_rank1[i1] {
            cnt[r2] += 1;
        }
        if want_closed {
            let mut upto = 0i128;
            for (j, &b2) in g2.iter().enumerate() {
                upto += cnt[j];
                let value = upto * total_scale - sc.n * b1 * b2 * factor_num;
                best = best.better(Candidate {
                    value,
                    idx: [i1, j, idx3],
                    closed: true,
                });
            }
        }
    }
    if want_open {
        eval_open(&cnt, l1, g1.len(), &mut best);
    }
    best
}

fn exact_1d(sc: &Scaled) -> Candidate {
    let g = &sc.grids[0];
    let l = sc.dens[0];
    let mut cnt = vec![0i128; g.len()];
    for k in 0..sc.coords[0].len() {
        cnt[sc.rank(0, k)] += 1;
    }
    let mut best = Candidate::start();
    let mut below = 0i128;
    for (j, &b) in g.iter().enumerate() {
        best = best.better(Candidate {
            value: sc.n * b - below * l,
            idx: [j, 0, 0],
            closed: false,
        });
        below += cnt[j];
        best = best.better(Candidate {
            value: below * l - sc.n * b,
            idx: [j, 0, 0],
            closed: true,
        });
    }
    best.better(Candidate {
        value: sc.n * l - below * l,
        idx: [g.len(), 0, 0],
        closed: false,
    })
}

fn exact_3d(sc: &Scaled) -> Candidate {
    let g3 = &sc.grids[2];
    let l3 = sc.dens[2];
    let n = sc.coords[2].len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| sc.coords[2][k]);
    // subset for b_3 at grid index i: points with rank <= i (closed) or < i
    let first_at: Vec<usize> = (0..=g3.len())
        .map(|i| order.partition_point(|&k| sc.rank(2, k) < i))
        .collect();
    let closed = (0..g3.len())
        .into_par_iter()
        .map(|i| sweep2(sc, &order[..first_at[i + 1]], g3[i], l3, i, Some(true)));
    let open = (0..=g3.len()).into_par_iter().map(|i| {
        let b3 = if i == g3.len() { l3 } else { g3[i] };
        sweep2(sc, &order[..first_at[i]], b3, l3, i, Some(false))
    });
    let all: Vec<Candidate> = closed.chain(open).collect();
    all.into_iter().fold(Candidate::start(), Candidate::better)
}

fn to_result(points: &PointSet, sc: &Scaled, best: Candidate) -> DiscResult {
    let s = points.s;
    let scale: BigInt =
        sc.dens.iter().map(|&d| BigInt::from(d)).product::<BigInt>() * BigInt::from(sc.n);
    let bounds = (0..s)
        .map(|i| {
            let idx = best.idx[i];
            let num = if idx == sc.grids[i].len() {
                sc.dens[i]
            } else {
                sc.grids[i][idx]
            };
            BigRational::new(BigInt::from(num), BigInt::from(sc.dens[i]))
        })
        .collect();
    DiscResult {
        n: points.len(),
        dstar: BigRational::new(BigInt::from(best.value), scale),
        witness: Witness {
            bounds,
            closed: best.closed,
        },
    }
}

/// Exact `D*_N` using integer arithmetic over common denominators:
/// `O(N log N)` in one dimension, `O(N^2)` in two, `O(N^3)` in three.
pub fn star_discrepancy_exact(points: &PointSet) -> Result<DiscResult> {
    let n = points.len();
    if n == 0 {
        return Err(empty_error());
    }
    let budget = EXACT_BUDGET[points.s - 1];
    if n > budget {
        return Err(Error::BudgetExceeded(format!(
            "{n} points in dimension {} exceed the exact budget of {budget}",
            points.s
        )));
    }
    let sc = Scaled::new(points)?;
    let best = match points.s {
        1 => exact_1d(&sc),
        2 => sweep2(&sc, &(0..n).collect::<Vec<_>>(), 1, 1, 0, None),
        _ => exact_3d(&sc),
    };
    if best.value == 0 {
        return Ok(trivial_result(points.s, n));
    }
    Ok(to_result(points, &sc, best))
}

/// `D*_N` by trying every box on the critical grid, with rational volumes.
pub fn star_discrepancy_naive(points: &PointSet) -> Result<DiscResult> {
    let n = points.len();
    if n == 0 {
        return Err(empty_error());
    }
    if n > NAIVE_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{n} points exceed the naive budget of {NAIVE_BUDGET}"
        )));
    }
    let s = points.s;
    let mut grids: Vec<Vec<BigRational>> = (0..s)
        .map(|i| {
            let mut g: Vec<BigRational> = points.points.iter().map(|x| x[i].clone()).collect();
            g.sort();
            g.dedup();
            g
        })
        .collect();
    let ranks: Vec<Vec<usize>> = points
        .points
        .iter()
        .map(|x| {
            (0..s)
                .map(|i| grids[i].binary_search(&x[i]).expect("in grid"))
                .collect()
        })
        .collect();
    for g in grids.iter_mut() {
        g.push(BigRational::one());
    }
    let nn = BigRational::from_integer(BigInt::from(n));
    let mut best = BigRational::zero();
    let mut witness = Witness {
        bounds: vec![BigRational::zero(); s],
        closed: false,
    };
    let mut idx = vec![0usize; s];
    loop {
        let vol: BigRational = (0..s).map(|i| grids[i][idx[i]].clone()).product();
        let closed = ranks
            .iter()
            .filter(|r| (0..s).all(|i| r[i] <= idx[i]))
            .count();
        let open = ranks
            .iter()
            .filter(|r| (0..s).all(|i| r[i] < idx[i]))
            .count();
        let at_one = (0..s).any(|i| idx[i] + 1 == grids[i].len());
        if !at_one {
            let gap = BigRational::from_integer(BigInt::from(closed)) / &nn - &vol;
            if gap > best {
                best = gap;
                witness = Witness {
                    bounds: (0..s).map(|i| grids[i][idx[i]].clone()).collect(),
                    closed: true,
                };
            }
        }
        let gap = &vol - BigRational::from_integer(BigInt::from(open)) / &nn;
        if gap > best {
            best = gap;
            witness = Witness {
                bounds: (0..s).map(|i| grids[i][idx[i]].clone()).collect(),
                closed: false,
            };
        }
        // odometer over the grid
        let mut i = 0;
        loop {
            if i == s {
                return Ok(DiscResult {
                    n,
                    dstar: best,
                    witness,
                });
            }
            idx[i] += 1;
            if idx[i] < grids[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// `y_n = (x_n, n / p^m)` for the first `p^m` points.
pub fn extend_with_index(points: &PointSet, p: u32, m: usize) -> Result<PointSet> {
    let total = (p as u128).checked_pow(m as u32);
    if total != Some(points.len() as u128) {
        return Err(Error::DimensionMismatch(format!(
            "{} points given, {p}^{m} expected",
            points.len()
        )));
    }
    if points.s >= 3 {
        return Err(Error::InvalidParameter(
            "cannot extend beyond dimension 3".into(),
        ));
    }
    let den = BigInt::from(p).pow(m as u32);
    let extended = points
        .points
        .iter()
        .enumerate()
        .map(|(n, x)| {
            let mut y = x.clone();
            y.push(BigRational::new(BigInt::from(n), den.clone()));
            y
        })
        .collect();
    PointSet::new(points.s + 1, extended)
}

/// Both sides of `N D*_N(y) <= max_{M <= N} M D*_M(x) + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionBound {
    pub n: usize,
    pub lhs: BigRational,
    pub rhs: BigRational,
    /// The `M` attaining the maximum.
    pub argmax: usize,
}

impl ExtensionBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

pub fn extension_bound(points: &PointSet, p: u32, m: usize) -> Result<ExtensionBound> {
    let y = extend_with_index(points, p, m)?;
    let n = points.len();
    let lhs = star_discrepancy_exact(&y)?.dstar * BigRational::from_integer(BigInt::from(n));
    let scaled: Vec<BigRational> = (1..=n)
        .into_par_iter()
        .map(|mm| {
            star_discrepancy_exact(&points.prefix(mm))
                .map(|r| r.dstar * BigRational::from_integer(BigInt::from(mm)))
        })
        .collect::<Result<_>>()?;
    let (argmax, best) =
        scaled
            .iter()
            .enumerate()
            .fold((0, BigRational::zero()), |(ai, ab), (i, v)| {
                if *v > ab {
                    (i, v.clone())
                } else {
                    (ai, ab)
                }
            });
    Ok(ExtensionBound {
        n,
        lhs,
        rhs: best + BigRational::one(),
        argmax: argmax + 1,
    })
}

/// First `count` points of the van der Corput-Kronecker sequence
/// `(phi_p(n), <theta n(X)>|_{X=p})`, each coordinate cut to `depth` digits.
pub fn sequence_points(theta: &LaurentSeries, count: usize, depth: usize) -> Result<PointSet> {
    let p = theta.field().p() as u128;
    let mut m = 1;
    while p.pow(m as u32) < count as u128 {
        m += 1;
    }
    let spec = NetSpec::ih(theta, m, depth.max(m))?;
    let pts = (0..count)
        .map(|n| digital_point(&spec, n as u128))
        .collect::<Result<Vec<_>>>()?;
    PointSet::from_digital(&pts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRow {
    pub k: usize,
    pub n: usize,
    pub dstar: BigRational,
    pub n_dstar: BigRational,
}

/// Least-squares line `y = slope * x + intercept`; floating point, so only
/// indicative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_sum_squares: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len() as f64;
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_sum_squares = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Some(LinearFit {
        slope,
        intercept,
        residual_sum_squares,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthTable {
    pub p: u32,
    pub depth: usize,
    pub rows: Vec<GrowthRow>,
    /// `N D*_N` against `(log N)^2`.
    pub fit_log_squared: Option<LinearFit>,
    /// `N D*_N` against `log N`.
    pub fit_log: Option<LinearFit>,
}

impl GrowthTable {
    pub fn log_squared_fits_better(&self) -> Option<bool> {
        match (self.fit_log_squared, self.fit_log) {
            (Some(a), Some(b)) => {
                Some(a.slope >= 0.0 && a.residual_sum_squares < b.residual_sum_squares)
            }
            _ => None,
        }
    }

    /// Rows with `N D*_N` decreasing from one `k` to the next.
    pub fn decreasing_steps(&self) -> Vec<usize> {
        self.rows
            .windows(2)
            .filter(|w| w[1].n_dstar < w[0].n_dstar)
            .map(|w| w[1].k)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "k,N,Dstar_num,Dstar_den,NDstar")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.k,
                r.n,
                r.dstar.numer(),
                r.dstar.denom(),
                r.n_dstar
            )?;
        }
        Ok(())
    }

    pub fn fit_summary(&self) -> Vec<(String, String)> {
        let fmt = |f: Option<LinearFit>| match f {
            None => "n/a".to_string(),
            Some(f) => format!(
                "slope={:.6} intercept={:.6} rss={:.6}",
                f.slope, f.intercept, f.residual_sum_squares
            ),
        };
        vec![
            ("p".into(), self.p.to_string()),
            ("depth".into(), self.depth.to_string()),
            ("rows".into(), self.rows.len().to_string()),
            ("fit_log_squared_approx".into(), fmt(self.fit_log_squared)),
            ("fit_log_approx".into(), fmt(self.fit_log)),
            (
                "log_squared_fits_better".into(),
                self.log_squared_fits_better()
                    .map_or("n/a".into(), |b| b.to_string()),
            ),
            (
                "n_dstar_decreasing_at_k".into(),
                self.decreasing_steps()
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            (
                "note".into(),
                "illustrative only; asymptotic growth is not testable at finite N".into(),
            ),
        ]
    }
}

/// Exact `N D*_N` for `N = p^k`, `k_min <= k <= k_max`, with both fits.
pub fn growth_sweep(
    theta: &LaurentSeries,
    k_min: usize,
    k_max: usize,
    depth: usize,
) -> Result<GrowthTable> {
    let p = theta.field().p();
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k_min <= k_max, got {k_min}..{k_max}"
        )));
    }
    let count = (p as usize)
        .checked_pow(k_max as u32)
        .filter(|&c| c <= EXACT_BUDGET[1])
        .ok_or_else(|| {
            Error::BudgetExceeded(format!("{p}^{k_max} points exceed the exact budget"))
        })?;
    let all = sequence_points(theta, count, depth)?;
    let rows = (k_min..=k_max)
        .map(|k| {
            let n = (p as usize).pow(k as u32);
            let res = star_discrepancy_exact(&all.prefix(n))?;
            let n_dstar = &res.dstar * BigRational::from_integer(BigInt::from(n));
            Ok(GrowthRow {
                k,
                n,
                dstar: res.dstar,
                n_dstar,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let logs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows
        .iter()
        .map(|r| r.n_dstar.to_f64().unwrap_or(f64::NAN))
        .collect();
    let squares: Vec<f64> = logs.iter().map(|l| l * l).collect();
    Ok(GrowthTable {
        p,
        depth,
        fit_log_squared: least_squares(&squares, &ys),
        fit_log: least_squares(&logs, &ys),
        rows,
    })
}
