//! Exact point counts of a digital net in elementary intervals, and the box
//! `J` whose count falls short of its volume by a quadratic amount.
//!
//! Membership of `x_n` in an elementary interval fixes leading digits of each
//! coordinate, which is an affine condition on the digit vector of `n`. Counts
//! are therefore `0` or `p^nullity` and never require listing points.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{FpMatrix, SolutionSet};
use crate::digital::{pnorm, DigitExpansion, NetSpec, NormExponent};
use crate::error::{Error, Result};
use crate::hankel::hankel_submatrix;
use crate::laurent::LaurentSeries;

/// Parameters `m`, `v`, `u` of the lower-bound construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaParams {
    pub m: usize,
    pub v: usize,
    pub u: usize,
}

impl GammaParams {
    /// `D` with `v = 3(D + 1)`.
    pub fn deficiency(&self) -> usize {
        self.v / 3 - 1
    }

    /// `m + v - u`, the least order an interval of `J` can have beyond
    /// `m - D`.
    pub fn min_empty_order(&self) -> usize {
        self.m + self.v - self.u
    }

    /// Positions `m/4 + u + 1 ..= m/2` of `gamma^(3)` (1-based) that are
    /// filled from the solved digits.
    pub fn middle_range(&self) -> std::ops::RangeInclusive<usize> {
        self.m / 4 + self.u + 1..=self.m / 2
    }
}

/// Digit vectors of the three upper corners `gamma^(i)` of `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaSpec {
    pub params: Option<GammaParams>,
    pub gamma: [Vec<u32>; 3],
    pub middle_filled: bool,
}

impl GammaSpec {
    /// Arbitrary corner digits, outside the lower-bound construction.
    pub fn from_digits(gamma: [Vec<u32>; 3]) -> Self {
        GammaSpec {
            params: None,
            gamma,
            middle_filled: true,
        }
    }

    pub fn r(&self, i: usize) -> usize {
        self.gamma[i].len()
    }

    /// `lambda(J) = gamma^(1) gamma^(2) gamma^(3)`.
    pub fn lambda(&self, p: u32) -> BigRational {
        self.gamma
            .iter()
            .map(|g| DigitExpansion::new(p, g.clone()).value())
            .product()
    }
}

/// The block `(0,...,0,1)` of length `v`, repeated `count` times.
fn j_blocks(v: usize, count: usize) -> Vec<u32> {
    let mut out = vec![0; v * count];
    for b in 0..count {
        out[b * v + v - 1] = 1;
    }
    out
}

/// `gamma^(1..3)` with the middle section of `gamma^(3)` still zero.
pub fn build_gamma(m: usize, v: usize, u: usize) -> Result<GammaSpec> {
    if v == 0 || !m.is_multiple_of(8 * v) {
        return Err(Error::InvalidParameter(format!(
            "m = {m} is not a multiple of 8v = {}",
            8 * v
        )));
    }
    let blocks = m / (4 * v);
    if blocks < 2 {
        return Err(Error::InvalidParameter(format!(
            "m/(4v) = {blocks} must be at least 2"
        )));
    }
    if u > v || u >= m / 4 {
        return Err(Error::InvalidParameter(format!(
            "u = {u} must not exceed v = {v} and must stay below m/4"
        )));
    }
    let g1 = j_blocks(v, blocks);
    let mut g2 = vec![0; v - u];
    g2.extend(j_blocks(v, blocks - 1));
    let mut g3 = vec![0; m / 4 + u];
    g3.extend(vec![0; m / 4 - u]);
    g3.extend(j_blocks(v, blocks));
    debug_assert_eq!(
        (g1.len(), g2.len(), g3.len()),
        (m / 4, m / 4 - u, 3 * m / 4)
    );
    Ok(GammaSpec {
        params: Some(GammaParams { m, v, u }),
        gamma: [g1, g2, g3],
        middle_filled: false,
    })
}

/// Smallest `u` in `[D, 2D)` for which the `(m/4 - u)`-square Hankel block
/// of `<X^{m/2} theta>` is regular.
pub fn choose_u(theta: &LaurentSeries, m: usize, d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "the range D <= u < 2D is empty for D = 0".into(),
        ));
    }
    if m / 4 <= 2 * d {
        return Err(Error::InvalidParameter(format!(
            "m/4 = {} leaves no room for u < 2D = {}",
            m / 4,
            2 * d
        )));
    }
    let shifted = theta.shift(m / 2).frac();
    for u in d..2 * d {
        let size = m / 4 - u;
        if hankel_submatrix(&shifted, size, size)?.is_regular() {
            return Ok(u);
        }
    }
    Err(Error::Falsification(format!(
        "no u in [{d}, {}) makes the Hankel block of <X^{} theta> regular; \
         theta does not have deficiency {d} at this scale",
        2 * d,
        m / 2
    )))
}

/// Digit constraints `row r of C_i applied to n = value`.
#[derive(Clone, Copy, Debug)]
struct DigitConstraint {
    coord: usize,
    row: usize,
    value: u32,
}

/// Solutions of a set of digit constraints on the digits of `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSolution {
    pub count: BigUint,
    /// One digit vector satisfying the constraints, if any.
    pub witness: Option<Vec<u32>>,
}

fn solve_constraints(
    spec: &NetSpec,
    constraints: &[DigitConstraint],
) -> Result<ConstraintSolution> {
    let field = spec.field();
    let m = spec.m();
    let none = ConstraintSolution {
        count: BigUint::zero(),
        witness: None,
    };
    // rows with a single nonzero entry fix a digit outright; the others go
    // through elimination over the digits left free
    let mut fixed: Vec<Option<u32>> = vec![None; m];
    let mut general: Vec<(&[u32], u32)> = Vec::new();
    for c in constraints {
        if c.row >= spec.depth() {
            return Err(Error::InvalidParameter(format!(
                "interval resolves digit {} of coordinate {}, beyond depth {}",
                c.row + 1,
                c.coord + 1,
                spec.depth()
            )));
        }
        let row = spec.matrix(c.coord).row(c.row);
        let mut nz = row.iter().enumerate().filter(|(_, &a)| a != 0);
        match (nz.next(), nz.next()) {
            (None, _) => {
                if c.value != 0 {
                    return Ok(none);
                }
            }
            (Some((j, &a)), None) => {
                let val = field.mul(c.value, field.inv(a).expect("nonzero"));
                match fixed[j] {
                    Some(prev) if prev != val => return Ok(none),
                    _ => fixed[j] = Some(val),
                }
            }
            _ => general.push((row, c.value)),
        }
    }
    let free: Vec<usize> = (0..m).filter(|&j| fixed[j].is_none()).collect();
    let mut a = FpMatrix::zeros(field, general.len(), free.len());
    let mut b = Vec::with_capacity(general.len());
    for (i, (row, value)) in general.iter().enumerate() {
        let mut rhs = *value;
        for (j, &coef) in row.iter().enumerate() {
            if let Some(x) = fixed[j] {
                rhs = field.sub(rhs, field.mul(coef, x));
            }
        }
        for (k, &j) in free.iter().enumerate() {
            a.set(i, k, row[j]);
        }
        b.push(rhs);
    }
    match a.solve_affine(&b)? {
        SolutionSet::Inconsistent => Ok(none),
        SolutionSet::Solutions {
            particular,
            nullity,
        } => {
            let mut digits: Vec<u32> = fixed.iter().map(|x| x.unwrap_or(0)).collect();
            for (k, &j) in free.iter().enumerate() {
                digits[j] = particular[k];
            }
            Ok(ConstraintSolution {
                count: BigUint::from(spec.p()).pow(nullity as u32),
                witness: Some(digits),
            })
        }
    }
}

/// A box whose coordinate `i` is the set of numbers with the given leading
/// digits. Its order is the total number of prescribed digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementaryInterval {
    pub prefixes: Vec<Vec<u32>>,
}

impl ElementaryInterval {
    /// The interval `I(j_1, k_1, ...)`: leading digits `[gamma^(i)]_{j_i - 1}`
    /// followed by `k_i - 1`.
    pub fn from_gamma(g: &GammaSpec, j: [usize; 3], k: [u32; 3]) -> Self {
        let prefixes = (0..3)
            .map(|i| {
                let mut pre = g.gamma[i][..j[i] - 1].to_vec();
                pre.push(k[i] - 1);
                pre
            })
            .collect();
        ElementaryInterval { prefixes }
    }

    /// `j_i`, the resolution in coordinate `i`.
    pub fn j(&self, i: usize) -> usize {
        self.prefixes[i].len()
    }

    /// `k_i`, one more than the last prescribed digit.
    pub fn k(&self, i: usize) -> u32 {
        self.prefixes[i].last().map_or(0, |&d| d + 1)
    }

    pub fn order(&self) -> usize {
        self.prefixes.iter().map(Vec::len).sum()
    }

    pub fn volume(&self, p: u32) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(p).pow(self.order() as u32))
    }

    pub fn contains(&self, x: &[DigitExpansion]) -> bool {
        self.prefixes.iter().zip(x).all(|(pre, c)| {
            c.digits().len() >= pre.len() && &c.digits()[..pre.len()] == pre.as_slice()
        })
    }
}

/// All well-defined intervals `I(j_1, k_1, j_2, k_2, j_3, k_3)` whose
/// disjoint union is `J`.
pub fn enumerate_intervals(g: &GammaSpec) -> Result<Vec<ElementaryInterval>> {
    if !g.middle_filled {
        return Err(Error::InvalidParameter(
            "gamma^(3) middle section must be filled before decomposing J".into(),
        ));
    }
    let per_coord: Vec<Vec<(usize, u32)>> = g
        .gamma
        .iter()
        .map(|gi| {
            gi.iter()
                .enumerate()
                .flat_map(|(idx, &digit)| (1..=digit).map(move |k| (idx + 1, k)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for &(j1, k1) in &per_coord[0] {
        for &(j2, k2) in &per_coord[1] {
            for &(j3, k3) in &per_coord[2] {
                out.push(ElementaryInterval::from_gamma(
                    g,
                    [j1, j2, j3],
                    [k1, k2, k3],
                ));
            }
        }
    }
    Ok(out)
}

fn interval_constraints(interval: &ElementaryInterval) -> Vec<DigitConstraint> {
    interval
        .prefixes
        .iter()
        .enumerate()
        .flat_map(|(coord, pre)| {
            pre.iter()
                .enumerate()
                .map(move |(row, &value)| DigitConstraint { coord, row, value })
        })
        .collect()
}

/// Points of the net in `interval`, with one of them when nonempty.
pub fn solve_interval(spec: &NetSpec, interval: &ElementaryInterval) -> Result<ConstraintSolution> {
    if interval.prefixes.len() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "interval of dimension {} for a net of dimension {}",
            interval.prefixes.len(),
            spec.dim()
        )));
    }
    solve_constraints(spec, &interval_constraints(interval))
}

pub fn count_in_interval(spec: &NetSpec, interval: &ElementaryInterval) -> Result<BigUint> {
    Ok(solve_interval(spec, interval)?.count)
}

/// The unique `n` whose point has leading digits `gamma^(i)` in every
/// coordinate, together with `gamma` whose middle section of `gamma^(3)`
/// is filled in from it.
pub fn solve_nbar(spec: &NetSpec, g: &GammaSpec) -> Result<(Vec<u32>, GammaSpec)> {
    let params = g.params.ok_or_else(|| {
        Error::InvalidParameter("solving for n-bar needs a constructed GammaSpec".into())
    })?;
    if spec.dim() != 3 || spec.m() != params.m {
        return Err(Error::InvalidParameter(format!(
            "need a three-dimensional net with m = {}",
            params.m
        )));
    }
    let middle = params.middle_range();
    let mut constraints = Vec::with_capacity(params.m);
    for coord in 0..3 {
        for (idx, &value) in g.gamma[coord].iter().enumerate() {
            if coord == 2 && middle.contains(&(idx + 1)) {
                continue;
            }
            constraints.push(DigitConstraint {
                coord,
                row: idx,
                value,
            });
        }
    }
    let sol = solve_constraints(spec, &constraints)?;
    let Some(nbar) = sol.witness else {
        return Err(Error::Falsification(format!(
            "no n reaches the corner of J (m = {}, u = {})",
            params.m, params.u
        )));
    };
    if !sol.count.is_one() {
        return Err(Error::Falsification(format!(
            "{} values of n reach the corner of J (m = {}, u = {}); expected exactly one",
            sol.count, params.m, params.u
        )));
    }
    let x = spec.point_from_digits(&nbar)?;
    let mut filled = g.clone();
    for j in middle {
        filled.gamma[2][j - 1] = x.coords[2].digit(j);
    }
    filled.middle_filled = true;
    for i in 0..3 {
        if x.coords[i].truncate(filled.r(i)).digits() != filled.gamma[i].as_slice() {
            return Err(Error::Falsification(format!(
                "regenerated point misses gamma^({}) at m = {}",
                i + 1,
                params.m
            )));
        }
    }
    Ok((nbar, filled))
}

/// Number of `(j_1, j_2, j_3)` of order exactly `m + v - u` among
/// well-defined intervals, counted from the block structure: `j_1 = l_1 v`,
/// `j_2 = v - u + l_2 v`, `j_3 = m/2 + l_3 v` with `l_1 + l_2 + l_3 = m/(2v)`.
pub fn min_order_triples_by_blocks(m: usize, v: usize) -> usize {
    let b = m / (4 * v);
    let target = m / (2 * v);
    let mut count = 0;
    for l1 in 1..=b {
        for l2 in 1..b {
            if l1 + l2 < target && target - l1 - l2 <= b {
                count += 1;
            }
        }
    }
    count
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalRecord {
    pub interval: ElementaryInterval,
    pub count: BigUint,
    /// `count - p^m vol`.
    pub contribution: BigRational,
    /// For a nonempty interval of order at least `m + v - u`: the exponent
    /// `l` of `||x_n - x_nbar||_p` for the point found in it.
    pub offending_norm: Option<NormExponent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeficitReport {
    pub p: u32,
    pub m: usize,
    pub t: usize,
    pub params: Option<GammaParams>,
    pub nbar: Option<Vec<u32>>,
    pub lambda_j: BigRational,
    pub volume_sum: BigRational,
    pub count_in_j: BigUint,
    pub deficit: BigRational,
    pub records: Vec<IntervalRecord>,
    /// Order of each empty interval, with multiplicity.
    pub empty_orders: BTreeMap<usize, usize>,
    pub triples_at_min_order: usize,
    /// Intervals of order at most `m - t` whose count is not `p^{m-order}`.
    pub net_property_failures: usize,
    /// Nonempty intervals of order at least `m + v - u`.
    pub admissibility_failures: usize,
    /// Intervals of order above `m - D` that are not of order at least
    /// `m + v - u` with `j_3 > m/2`.
    pub shape_failures: usize,
}

impl DeficitReport {
    /// `(m/(8v))^2`, the number of minimal-order triples the counting
    /// argument guarantees.
    pub fn triples_lower_bound(&self) -> Option<usize> {
        self.params.map(|g| (g.m / (8 * g.v)).pow(2))
    }

    pub fn is_falsified(&self) -> bool {
        self.net_property_failures > 0
            || self.admissibility_failures > 0
            || self.volume_sum != self.lambda_j
    }

    /// `-sum p^{m - order}` over empty intervals.
    pub fn empty_interval_sum(&self) -> BigRational {
        let p = BigInt::from(self.p);
        -self
            .empty_orders
            .iter()
            .map(|(&order, &mult)| {
                let mult = BigRational::from_integer(BigInt::from(mult));
                mult * pow_rational(&p, self.m as i64 - order as i64)
            })
            .sum::<BigRational>()
    }

    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = vec![
            ("p".into(), self.p.to_string()),
            ("m".into(), self.m.to_string()),
            ("t".into(), self.t.to_string()),
        ];
        if let Some(g) = self.params {
            kv.push(("v".into(), g.v.to_string()));
            kv.push(("u".into(), g.u.to_string()));
            kv.push(("min_empty_order".into(), g.min_empty_order().to_string()));
        }
        if let Some(n) = &self.nbar {
            let digits: Vec<String> = n.iter().map(u32::to_string).collect();
            kv.push(("nbar_digits".into(), digits.join("")));
        }
        kv.extend([
            ("intervals".into(), self.records.len().to_string()),
            ("lambda_j".into(), self.lambda_j.to_string()),
            (
                "volume_sum_equals_lambda".into(),
                (self.volume_sum == self.lambda_j).to_string(),
            ),
            ("count_in_j".into(), self.count_in_j.to_string()),
            ("deficit".into(), self.deficit.to_string()),
            (
                "deficit_negative".into(),
                (self.deficit < BigRational::zero()).to_string(),
            ),
            (
                "empty_interval_orders".into(),
                self.empty_orders
                    .iter()
                    .map(|(o, c)| format!("{o}x{c}"))
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            (
                "triples_at_min_order".into(),
                self.triples_at_min_order.to_string(),
            ),
        ]);
        if let Some(b) = self.triples_lower_bound() {
            kv.push(("triples_lower_bound".into(), b.to_string()));
        }
        kv.extend([
            (
                "net_property_failures".into(),
                self.net_property_failures.to_string(),
            ),
            (
                "admissibility_failures".into(),
                self.admissibility_failures.to_string(),
            ),
            ("shape_failures".into(), self.shape_failures.to_string()),
        ]);
        kv
    }

    /// One row per interval: `j1,j2,j3,k1,k2,k3,order,count,contribution`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "j1,j2,j3,k1,k2,k3,order,count,contribution")?;
        for r in &self.records {
            let iv = &r.interval;
            let js: Vec<String> = (0..iv.prefixes.len())
                .map(|i| iv.j(i).to_string())
                .collect();
            let ks: Vec<String> = (0..iv.prefixes.len())
                .map(|i| iv.k(i).to_string())
                .collect();
            writeln!(
                out,
                "{},{},{},{},{}",
                js.join(","),
                ks.join(","),
                iv.order(),
                r.count,
                r.contribution
            )?;
        }
        Ok(())
    }
}

fn pow_rational(base: &BigInt, exp: i64) -> BigRational {
    if exp >= 0 {
        BigRational::from_integer(base.pow(exp as u32))
    } else {
        BigRational::new(BigInt::one(), base.pow((-exp) as u32))
    }
}

/// Counts every interval of `J` exactly and sums `count - p^m vol`.
///
/// `t` is the t-value the net is taken to have; intervals of order at most
/// `m - t` are checked against the net property. `nbar` enables the
/// admissibility cross-check for intervals that should be empty.
pub fn deficit(
    spec: &NetSpec,
    g: &GammaSpec,
    t: usize,
    nbar: Option<&[u32]>,
) -> Result<DeficitReport> {
    let p = spec.p();
    let m = spec.m();
    let pb = BigInt::from(p);
    let intervals = enumerate_intervals(g)?;
    let xbar = nbar.map(|n| spec.point_from_digits(n)).transpose()?;
    let min_empty = g.params.map(|gp| gp.min_empty_order());

    let records: Vec<IntervalRecord> = intervals
        .into_par_iter()
        .map(|interval| {
            let sol = solve_interval(spec, &interval)?;
            let order = interval.order();
            let expected = pow_rational(&pb, m as i64 - order as i64);
            let contribution =
                BigRational::from_integer(BigInt::from(sol.count.clone())) - expected;
            let offending_norm = match (&sol.witness, &xbar, min_empty) {
                (Some(w), Some(xb), Some(bound)) if order >= bound => {
                    let x = spec.point_from_digits(w)?;
                    Some(pnorm(&x.digitwise_sub(xb)))
                }
                _ => None,
            };
            Ok(IntervalRecord {
                interval,
                count: sol.count,
                contribution,
                offending_norm,
            })
        })
        .collect::<Result<_>>()?;

    let lambda_j = g.lambda(p);
    let volume_sum: BigRational = records.iter().map(|r| r.interval.volume(p)).sum();
    let count_in_j: BigUint = records.iter().map(|r| r.count.clone()).sum();
    let deficit: BigRational = records.iter().map(|r| r.contribution.clone()).sum();

    let mut empty_orders = BTreeMap::new();
    let mut net_property_failures = 0;
    let mut admissibility_failures = 0;
    let mut shape_failures = 0;
    let mut min_order_triples = BTreeSet::new();
    for r in &records {
        let order = r.interval.order();
        if r.count.is_zero() {
            *empty_orders.entry(order).or_insert(0) += 1;
        }
        if order + t <= m && !r.contribution.is_zero() {
            net_property_failures += 1;
        }
        if let Some(gp) = g.params {
            if order >= gp.min_empty_order() && !r.count.is_zero() {
                admissibility_failures += 1;
            }
            if order + gp.deficiency() > m
                && (order < gp.min_empty_order() || r.interval.j(2) <= m / 2)
            {
                shape_failures += 1;
            }
            if order == gp.min_empty_order() {
                min_order_triples.insert((r.interval.j(0), r.interval.j(1), r.interval.j(2)));
            }
        }
    }

    Ok(DeficitReport {
        p,
        m,
        t,
        params: g.params,
        nbar: nbar.map(<[u32]>::to_vec),
        lambda_j,
        volume_sum,
        count_in_j,
        deficit,
        records,
        empty_orders,
        triples_at_min_order: min_order_triples.len(),
        net_property_failures,
        admissibility_failures,
        shape_failures,
    })
}

/// `choose_u`, `build_gamma`, `solve_nbar` and `deficit` in sequence for
/// the `(I, H(theta), J)` net.
pub fn lower_bound_report(
    theta: &LaurentSeries,
    m: usize,
    d: usize,
    depth: usize,
) -> Result<DeficitReport> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "the construction needs deficiency D >= 1".into(),
        ));
    }
    let v = 3 * (d + 1);
    // validate divisibility before touching the series
    build_gamma(m, v, d)?;
    let u = choose_u(theta, m, d)?;
    let g = build_gamma(m, v, u)?;
    let spec = NetSpec::ihj(theta, m, depth)?;
    let (nbar, filled) = solve_nbar(&spec, &g)?;
    deficit(&spec, &filled, d, Some(&nbar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;
    use crate::digital::{digital_point, GeneratorMatrix};
    use crate::laurent::paperfolding_theta;

    #[test]
    fn gamma_for_small_parameters() {
        let g = build_gamma(16, 2, 1).unwrap();
        assert_eq!(g.gamma[0], vec![0, 1, 0, 1]);
        assert_eq!(g.gamma[1], vec![0, 0, 1]);
        assert_eq!(g.gamma[2], vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1]);
        assert!(!g.middle_filled);
        assert_eq!(g.params.unwrap().middle_range(), 6..=8);

        let g = build_gamma(96, 12, 5).unwrap();
        assert_eq!(g.gamma[0].iter().filter(|&&d| d != 0).count(), 2);
        assert_eq!(g.r(1), 96 / 4 - 5);
        assert!(build_gamma(100, 12, 3).is_err());
        assert!(build_gamma(48, 12, 3).is_err());
    }

    #[test]
    fn choose_u_on_paperfolding() {
        let theta = paperfolding_theta(512);
        let u = choose_u(&theta, 96, 3).unwrap();
        assert!((3..6).contains(&u));
        assert!(choose_u(&theta, 96, 0).is_err());
    }

    #[test]
    fn choose_u_reports_falsification() {
        // 1/(X-1): every Hankel block beyond 1x1 is singular
        let f3 = PrimeField::new(3).unwrap();
        let den = crate::algebra::Poly::from_signed(f3, &[-1, 1]);
        let theta =
            LaurentSeries::from_rational(&crate::algebra::Poly::one(f3), &den, 300).unwrap();
        let err = choose_u(&theta, 96, 3).unwrap_err();
        assert!(err.is_falsification());
    }

    #[test]
    fn whole_cube_holds_every_point() {
        let spec = NetSpec::ihj(&paperfolding_theta(64), 5, 10).unwrap();
        let cube = ElementaryInterval {
            prefixes: vec![vec![]; 3],
        };
        assert_eq!(
            count_in_interval(&spec, &cube).unwrap(),
            BigUint::from(243u32)
        );
    }

    #[test]
    fn nbar_with_unit_middle_generator() {
        // C_2 reads the free digits directly, so n-bar is forced
        let f3 = PrimeField::new(3).unwrap();
        let (m, v, u) = (16, 2, 1);
        let rows: Vec<Vec<u32>> = (0..m / 4 - u)
            .map(|k| (0..m).map(|j| u32::from(j == m / 2 + k)).collect())
            .collect();
        let c2 = GeneratorMatrix::Explicit(FpMatrix::from_rows(f3, &rows).unwrap());
        let spec = NetSpec::new(
            f3,
            m,
            vec![GeneratorMatrix::UnitI, c2, GeneratorMatrix::AntiDiagJ],
            m + 4,
        )
        .unwrap();
        let g = build_gamma(m, v, u).unwrap();
        let (nbar, filled) = solve_nbar(&spec, &g).unwrap();
        assert_eq!(&nbar[m / 2..m / 2 + 3], &g.gamma[1][..]);
        assert!(nbar[3 * m / 4 - u..].iter().all(|&d| d == 0));
        assert!(filled.middle_filled);
    }

    #[test]
    fn small_deficit_matches_enumeration() {
        let theta = paperfolding_theta(64);
        let spec = NetSpec::ihj(&theta, 6, 12).unwrap();
        let g = GammaSpec::from_digits([vec![1, 2], vec![0, 2, 1], vec![2, 0, 1]]);
        let report = deficit(&spec, &g, 3, None).unwrap();
        assert_eq!(report.volume_sum, report.lambda_j);
        let total = 3u128.pow(6);
        let mut brute = 0u64;
        for n in 0..total {
            let x = digital_point(&spec, n).unwrap();
            let vals = x.values();
            if (0..3).all(|i| vals[i] < DigitExpansion::new(3, g.gamma[i].clone()).value()) {
                brute += 1;
            }
        }
        assert_eq!(report.count_in_j, BigUint::from(brute));
        let expected = BigRational::from_integer(BigInt::from(brute))
            - BigRational::from_integer(BigInt::from(total)) * report.lambda_j.clone();
        assert_eq!(report.deficit, expected);
    }

    #[test]
    fn zero_gamma_gives_nothing() {
        let spec = NetSpec::ihj(&paperfolding_theta(64), 4, 8).unwrap();
        let g = GammaSpec::from_digits([vec![0, 0], vec![0], vec![0, 0, 0]]);
        assert!(enumerate_intervals(&g).unwrap().is_empty());
        let r = deficit(&spec, &g, 0, None).unwrap();
        assert!(r.lambda_j.is_zero() && r.deficit.is_zero());
    }

    #[test]
    fn block_triples() {
        assert_eq!(min_order_triples_by_blocks(96, 12), 2);
        assert_eq!(min_order_triples_by_blocks(192, 12), 9);
        assert_eq!(min_order_triples_by_blocks(288, 12), 20);
    }
}
