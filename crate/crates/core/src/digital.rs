//! Digital nets and sequences over F_p: generator matrices, point
//! generation, t-values, the `p`-norm and admissibility.

use std::fmt;
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{FpMatrix, Poly, PrimeField};
use crate::error::{Error, Result};
use crate::hankel::HankelView;
use crate::laurent::LaurentSeries;

/// Largest net size for a scan over all nonzero points.
pub const ZERO_SHORTCUT_BUDGET: u64 = 3u64.pow(13);
/// Largest net size for a scan over all pairs of points.
pub const PAIRWISE_BUDGET: u64 = 3u64.pow(8);

/// Digit depth used when none is given: `m + D + 8`.
pub fn default_depth(m: usize, deficiency: usize) -> usize {
    m + deficiency + 8
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorMatrix {
    /// First columns of the unit matrix: row `i` has its 1 in column `i - 1`.
    UnitI,
    /// The Hankel matrix of a Laurent series.
    HankelOf(LaurentSeries),
    /// Anti-diagonal ones in the top `m x m` block, zero rows below.
    AntiDiagJ,
    /// Given entries; rows past the end read as zero.
    Explicit(FpMatrix),
}

impl GeneratorMatrix {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorMatrix::UnitI => "I",
            GeneratorMatrix::HankelOf(_) => "H",
            GeneratorMatrix::AntiDiagJ => "J",
            GeneratorMatrix::Explicit(_) => "explicit",
        }
    }

    /// The upper-left `rows x cols` block.
    pub fn materialize(&self, field: PrimeField, rows: usize, cols: usize) -> Result<FpMatrix> {
        let mut out = FpMatrix::zeros(field, rows, cols);
        match self {
            GeneratorMatrix::UnitI => {
                for i in 0..rows.min(cols) {
                    out.set(i, i, 1);
                }
            }
            GeneratorMatrix::AntiDiagJ => {
                for i in 0..rows.min(cols) {
                    out.set(i, cols - 1 - i, 1);
                }
            }
            GeneratorMatrix::HankelOf(theta) => {
                if theta.field() != field {
                    return Err(Error::InvalidParameter(format!(
                        "Hankel series lives over {}, net over {field}",
                        theta.field()
                    )));
                }
                out = HankelView::new(theta).block(rows, cols)?;
            }
            GeneratorMatrix::Explicit(m) => {
                if m.field() != field {
                    return Err(Error::InvalidParameter(format!(
                        "explicit matrix lives over {}, net over {field}",
                        m.field()
                    )));
                }
                if m.cols() < cols {
                    return Err(Error::DimensionMismatch(format!(
                        "explicit matrix has {} columns, {cols} needed",
                        m.cols()
                    )));
                }
                for i in 0..rows.min(m.rows()) {
                    for j in 0..cols {
                        out.set(i, j, m.get(i, j));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Base-`p` digits `x_1, x_2, ...` of a number in `[0, 1)`, to a fixed depth.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DigitExpansion {
    p: u32,
    digits: Vec<u32>,
}

impl DigitExpansion {
    pub fn new(p: u32, digits: Vec<u32>) -> Self {
        debug_assert!(digits.iter().all(|&d| d < p));
        DigitExpansion { p, digits }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Digit `x_j`, 1-based.
    pub fn digit(&self, j: usize) -> u32 {
        self.digits[j - 1]
    }

    /// Exact value `sum x_j p^{-j}`.
    pub fn value(&self) -> BigRational {
        let (num, den) = self.numerator_over_power();
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Numerator and denominator of the value with denominator `p^depth`.
    pub fn numerator_over_power(&self) -> (BigUint, BigUint) {
        let p = BigUint::from(self.p);
        let mut num = BigUint::zero();
        for &d in &self.digits {
            num = num * &p + d;
        }
        (num, p.pow(self.digits.len() as u32))
    }

    /// `[x]_r`, the first `r` digits.
    pub fn truncate(&self, r: usize) -> DigitExpansion {
        DigitExpansion::new(self.p, self.digits[..r.min(self.digits.len())].to_vec())
    }

    /// 1-based index of the first nonzero digit, `None` if all vanish.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.digits.iter().position(|&d| d != 0).map(|i| i + 1)
    }

    /// Digit-wise difference mod `p`.
    pub fn digitwise_sub(&self, other: &DigitExpansion) -> DigitExpansion {
        assert_eq!(self.p, other.p);
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| if a >= b { a - b } else { a + self.p - b })
            .collect();
        DigitExpansion::new(self.p, digits)
    }
}

impl fmt::Debug for DigitExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0.")?;
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        write!(f, "_{}", self.p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitalPoint {
    pub coords: Vec<DigitExpansion>,
}

impl DigitalPoint {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn values(&self) -> Vec<BigRational> {
        self.coords.iter().map(DigitExpansion::value).collect()
    }

    pub fn digitwise_sub(&self, other: &DigitalPoint) -> DigitalPoint {
        DigitalPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.digitwise_sub(b))
                .collect(),
        }
    }
}

/// A digital net with generator matrices cut to `depth x m`.
#[derive(Clone, Debug)]
pub struct NetSpec {
    field: PrimeField,
    m: usize,
    depth: usize,
    kinds: Vec<GeneratorMatrix>,
    matrices: Vec<FpMatrix>,
}

impl NetSpec {
    pub fn new(
        field: PrimeField,
        m: usize,
        kinds: Vec<GeneratorMatrix>,
        depth: usize,
    ) -> Result<Self> {
        if kinds.is_empty() || kinds.len() > 3 {
            return Err(Error::InvalidParameter(format!(
                "nets have 1 to 3 generator matrices, got {}",
                kinds.len()
            )));
        }
        if depth < m {
            return Err(Error::InvalidParameter(format!(
                "digit depth {depth} is below m = {m}"
            )));
        }
        let matrices = kinds
            .iter()
            .map(|k| k.materialize(field, depth, m))
            .collect::<Result<_>>()?;
        Ok(NetSpec {
            field,
            m,
            depth,
            kinds,
            matrices,
        })
    }

    /// The three-dimensional net built from `I`, `H(theta)` and `J`.
    pub fn ihj(theta: &LaurentSeries, m: usize, depth: usize) -> Result<Self> {
        NetSpec::new(
            theta.field(),
            m,
            vec![
                GeneratorMatrix::UnitI,
                GeneratorMatrix::HankelOf(theta.frac()),
                GeneratorMatrix::AntiDiagJ,
            ],
            depth,
        )
    }

    /// The two-dimensional net built from `I` and `H(theta)`; its points are
    /// the first `p^m` terms of the van der Corput-Kronecker sequence.
    pub fn ih(theta: &LaurentSeries, m: usize, depth: usize) -> Result<Self> {
        NetSpec::new(
            theta.field(),
            m,
            vec![
                GeneratorMatrix::UnitI,
                GeneratorMatrix::HankelOf(theta.frac()),
            ],
            depth,
        )
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.kinds.len()
    }

    pub fn kinds(&self) -> &[GeneratorMatrix] {
        &self.kinds
    }

    /// `C_i` cut to `depth x m`.
    pub fn matrix(&self, i: usize) -> &FpMatrix {
        &self.matrices[i]
    }

    /// `p^m` when it fits in a `u128`.
    pub fn num_points(&self) -> Option<u128> {
        (self.p() as u128).checked_pow(self.m as u32)
    }

    /// The point for a digit vector `(n_0, ..., n_{m-1})`.
    pub fn point_from_digits(&self, n_digits: &[u32]) -> Result<DigitalPoint> {
        if n_digits.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "digit vector of length {}, expected {}",
                n_digits.len(),
                self.m
            )));
        }
        let p = self.p();
        let coords = self
            .matrices
            .iter()
            .map(|c| DigitExpansion::new(p, c.mul_vec(n_digits)))
            .collect();
        Ok(DigitalPoint { coords })
    }
}

/// `phi_b(n)`, the base-`b` radical inverse.
pub fn radical_inverse(b: u32, mut n: u128) -> BigRational {
    assert!(b >= 2, "radical inverse needs base at least 2");
    let base = BigInt::from(b);
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    while n > 0 {
        den *= &base;
        num = num * &base + BigInt::from((n % b as u128) as u32);
        n /= b as u128;
    }
    BigRational::new(num, den)
}

/// `x_n` for `0 <= n < p^m`.
pub fn digital_point(spec: &NetSpec, n: u128) -> Result<DigitalPoint> {
    if let Some(total) = spec.num_points() {
        if n >= total {
            return Err(Error::InvalidParameter(format!(
                "index {n} is outside the net of {total} points"
            )));
        }
    }
    spec.point_from_digits(&spec.field.digits(n, spec.m))
}

/// `<theta n(X)>` evaluated at `X = p`, as its first `depth` digits.
pub fn kronecker_coord(theta: &LaurentSeries, n: u128, depth: usize) -> Result<DigitExpansion> {
    let field = theta.field();
    let p = field.p();
    let poly = Poly::from_digits_of(field, n);
    let prod = theta.frac().mul_poly_shift(&poly, 0)?;
    if prod.horizon() < depth as i64 {
        return Err(Error::HorizonExceeded {
            needed: depth as i64 + poly.deg().unwrap_or(0) as i64,
            horizon: theta.horizon(),
        });
    }
    Ok(DigitExpansion::new(p, prod.coeff_range(1, depth as i64)?))
}

/// Minimal `t` for a `(t, m, s)`-net, with a composition that fails at
/// `t - 1` when `t > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TValue {
    pub t: usize,
    pub witness: Option<Vec<usize>>,
}

/// Stacks the first `d_i` rows of each matrix.
fn stacked_rows(
    field: PrimeField,
    cols: usize,
    matrices: &[&FpMatrix],
    comp: &[usize],
) -> FpMatrix {
    let blocks: Vec<FpMatrix> = matrices
        .iter()
        .zip(comp)
        .map(|(c, &d)| c.top_rows(d).column_range(0, cols))
        .collect();
    let refs: Vec<&FpMatrix> = blocks.iter().collect();
    FpMatrix::vstack(field, cols, &refs).expect("blocks share the column count")
}

/// All compositions of `total` into `parts` nonnegative summands, in
/// lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for d in 0..=total {
            prefix.push(d);
            rec(total - d, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// First composition of `total` whose stacked rows are dependent.
fn first_rank_failure(
    field: PrimeField,
    cols: usize,
    matrices: &[&FpMatrix],
    total: usize,
) -> Option<Vec<usize>> {
    compositions(total, matrices.len())
        .into_par_iter()
        .find_first(|comp| {
            let stacked = stacked_rows(field, cols, matrices, comp);
            stacked.rank() < total
        })
}

/// Whether every composition `d_1 + ... + d_s = total` gives stacked rows of
/// full rank. Rank only drops when rows are added, so this also covers all
/// smaller sums.
pub fn full_rank_at(
    field: PrimeField,
    cols: usize,
    matrices: &[&FpMatrix],
    total: usize,
) -> std::result::Result<(), Vec<usize>> {
    match first_rank_failure(field, cols, matrices, total) {
        None => Ok(()),
        Some(w) => Err(w),
    }
}

pub fn net_t_value(spec: &NetSpec) -> TValue {
    let mats: Vec<&FpMatrix> = spec.matrices.iter().collect();
    let mut witness = None;
    for t in 0..=spec.m {
        match full_rank_at(spec.field, spec.m, &mats, spec.m - t) {
            Ok(()) => return TValue { t, witness },
            Err(w) => witness = Some(w),
        }
    }
    unreachable!("the empty composition always has full rank")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceCheck {
    pub m: usize,
    pub ok: bool,
    pub witness: Option<Vec<usize>>,
}

/// For each `m`, whether the left `m` columns of `C_1, C_2` satisfy the
/// rank condition with `d_1 + d_2 <= m - t`.
pub fn sequence_t_check(
    field: PrimeField,
    c1: &GeneratorMatrix,
    c2: &GeneratorMatrix,
    m_range: &[usize],
    t: usize,
) -> Result<Vec<SequenceCheck>> {
    let m_max = m_range.iter().copied().max().unwrap_or(0);
    let a = c1.materialize(field, m_max, m_max)?;
    let b = c2.materialize(field, m_max, m_max)?;
    Ok(m_range
        .iter()
        .map(|&m| {
            if m <= t {
                return SequenceCheck {
                    m,
                    ok: true,
                    witness: None,
                };
            }
            let am = a.top_rows(m).column_range(0, m);
            let bm = b.top_rows(m).column_range(0, m);
            let witness = full_rank_at(field, m, &[&am, &bm], m - t).err();
            SequenceCheck {
                m,
                ok: witness.is_none(),
                witness,
            }
        })
        .collect())
}

/// The exponent `l` with `||x||_p = p^{-l}`; `Infinite` stands for norm 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NormExponent {
    Finite(usize),
    Infinite,
}

impl fmt::Display for NormExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormExponent::Finite(l) => write!(f, "{l}"),
            NormExponent::Infinite => write!(f, "inf"),
        }
    }
}

/// Sum over coordinates of the index of the first nonzero digit.
pub fn pnorm(x: &DigitalPoint) -> NormExponent {
    let mut l = 0;
    for c in &x.coords {
        match c.first_nonzero() {
            Some(j) => l += j,
            None => return NormExponent::Infinite,
        }
    }
    NormExponent::Finite(l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdmissibilityMode {
    /// All pairs `k < n`.
    Exhaustive,
    /// All `n > 0`; enough for digital nets, where `x_k - x_n` is a point.
    ZeroShortcut,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    pub d: usize,
    /// Smallest exponent `l` seen, i.e. the largest `p`-norm.
    pub max_exponent_seen: NormExponent,
    /// `(k, n)` for the first violating pair; `k = 0` in zero-shortcut mode.
    pub witness: Option<(u64, u64)>,
}

/// Checks `||x_k - x_n||_p > p^{-m-d}` for all distinct points, which
/// amounts to `l < m + d`.
pub fn admissibility_check(
    spec: &NetSpec,
    d: usize,
    mode: AdmissibilityMode,
) -> Result<Admissibility> {
    let m = spec.m;
    if spec.dim() != 3 {
        return Err(Error::InvalidParameter(
            "admissibility is defined for three-dimensional nets".into(),
        ));
    }
    if spec.depth < m + d {
        return Err(Error::InvalidParameter(format!(
            "digit depth {} cannot decide admissibility at m + d = {}",
            spec.depth,
            m + d
        )));
    }
    let total = spec.num_points().filter(|&n| n <= u64::MAX as u128);
    let budget = match mode {
        AdmissibilityMode::Exhaustive => PAIRWISE_BUDGET,
        AdmissibilityMode::ZeroShortcut => ZERO_SHORTCUT_BUDGET,
    };
    let total = match total {
        Some(n) if n as u64 <= budget => n as u64,
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "{}^{m} points exceed the {mode:?} budget of {budget}",
                spec.p()
            )))
        }
    };
    let threshold = m + d;
    let violates = |l: NormExponent| match l {
        NormExponent::Finite(l) => l >= threshold,
        NormExponent::Infinite => true,
    };
    let point = |n: u64| digital_point(spec, n as u128).expect("index in range");

    let mut best = NormExponent::Infinite;
    let mut witness = None;
    match mode {
        AdmissibilityMode::ZeroShortcut => {
            let norms: Vec<NormExponent> = (1..total)
                .into_par_iter()
                .map(|n| pnorm(&point(n)))
                .collect();
            for (i, &l) in norms.iter().enumerate() {
                best = best.min(l);
                if witness.is_none() && violates(l) {
                    witness = Some((0, i as u64 + 1));
                }
            }
        }
        AdmissibilityMode::Exhaustive => {
            let points: Vec<DigitalPoint> = (0..total).into_par_iter().map(point).collect();
            let rows: Vec<(NormExponent, Option<(u64, u64)>)> = (1..total)
                .into_par_iter()
                .map(|n| {
                    let mut row_best = NormExponent::Infinite;
                    let mut row_witness = None;
                    for k in 0..n {
                        let l = pnorm(&points[k as usize].digitwise_sub(&points[n as usize]));
                        row_best = row_best.min(l);
                        if row_witness.is_none() && violates(l) {
                            row_witness = Some((k, n));
                        }
                    }
                    (row_best, row_witness)
                })
                .collect();
            for (l, w) in rows {
                best = best.min(l);
                if witness.is_none() {
                    witness = w;
                }
            }
        }
    }
    Ok(Admissibility {
        admissible: witness.is_none(),
        d,
        max_exponent_seen: best,
        witness,
    })
}

/// Writes points as CSV: `n, x1, ..., xs`, exact reduced fractions, plus
/// the raw digit strings when `with_digits` is set.
pub fn write_points_csv<W: Write>(
    out: &mut W,
    points: &[(u128, DigitalPoint)],
    dim: usize,
    with_digits: bool,
) -> std::io::Result<()> {
    let mut header = vec!["n".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    if with_digits {
        header.extend((1..=dim).map(|i| format!("digits{i}")));
    }
    writeln!(out, "{}", header.join(","))?;
    for (n, x) in points {
        let mut row = vec![n.to_string()];
        row.extend(x.values().iter().map(|v| v.to_string()));
        if with_digits {
            row.extend(x.coords.iter().map(|c| {
                c.digits()
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            }));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
