use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufWriter, Write};

use clap::{Args, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use vdck_core::boxcount::lower_bound_report;
use vdck_core::digital::{
    admissibility_check, default_depth, digital_point, kronecker_coord, radical_inverse,
    sequence_t_check, write_points_csv, AdmissibilityMode, GeneratorMatrix, NetSpec,
};
use vdck_core::discrepancy::growth_sweep;
use vdck_core::hankel::{brute_inf, deficiency_scan, regular_sizes};
use vdck_core::laurent::{continued_fraction, convergents};
use vdck_core::Error;

use crate::config::{opt, Common};
use crate::report::{extension, Report};

#[derive(Debug)]
pub enum CmdError {
    Core(Error),
    Io(io::Error),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Core(e)
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> Self {
        CmdError::Io(e)
    }
}

/// A finished run. `falsified` marks a result that contradicts a structural
/// property the construction should have.
pub struct Outcome {
    pub report: Report,
    pub falsified: bool,
}

impl Outcome {
    fn new(mut report: Report, falsified: bool) -> Self {
        report.push("status", if falsified { "FAIL" } else { "PASS" });
        Outcome { report, falsified }
    }
}

type CmdResult = Result<Outcome, CmdError>;

fn header(command: &str, common: &Common) -> Report {
    let mut r = Report::new(command);
    r.extend(common.entries());
    r
}

fn ensure_out(common: &Common) -> io::Result<()> {
    fs::create_dir_all(&common.out)
}

/// Smallest `m >= 1` with `p^m >= n`.
fn digits_for(p: u32, n: u128) -> usize {
    let mut m = 1;
    let mut cap = p as u128;
    while cap < n {
        cap = cap.saturating_mul(p as u128);
        m += 1;
    }
    m
}

fn pow_checked(p: u32, m: usize) -> Result<u128, Error> {
    (p as u128)
        .checked_pow(m as u32)
        .ok_or_else(|| Error::InvalidParameter(format!("{p}^{m} does not fit in 128 bits")))
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub common: Common,

    /// Number of points, indices 0..N.
    #[arg(long = "N", default_value_t = 81)]
    pub n: u128,

    /// 2 for the (I, H) sequence, 3 for the (I, H, J) net.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    /// Index digits; defaults to the fewest covering N.
    #[arg(long)]
    pub m: Option<usize>,

    /// Also write the raw digit strings.
    #[arg(long)]
    pub digits: bool,
}

pub fn gen(args: &GenArgs) -> CmdResult {
    let common = &args.common;
    let theta = common.load_theta()?;
    let p = common.p;
    let m = args.m.unwrap_or_else(|| digits_for(p, args.n));
    if pow_checked(p, m)? < args.n {
        return Err(Error::InvalidParameter(format!("N = {} exceeds {p}^{m}", args.n)).into());
    }
    let depth = common.depth.unwrap_or(m + 16);
    let spec = match args.dim {
        2 => NetSpec::ih(&theta, m, depth)?,
        3 => NetSpec::ihj(&theta, m, depth)?,
        d => {
            return Err(
                Error::InvalidParameter(format!("dimension must be 2 or 3, got {d}")).into(),
            )
        }
    };

    ensure_out(common)?;
    let path = common.out.join("points.csv");
    let mut out = BufWriter::new(fs::File::create(&path)?);
    // chunks keep memory flat; only the first chunk keeps its header line
    const CHUNK: u128 = 4096;
    let mut start = 0u128;
    loop {
        let end = (start + CHUNK).min(args.n);
        let points = (start..end)
            .into_par_iter()
            .map(|n| digital_point(&spec, n).map(|x| (n, x)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &points, args.dim, args.digits)?;
        let skip = if start == 0 {
            0
        } else {
            buf.iter().position(|&b| b == b'\n').map_or(0, |i| i + 1)
        };
        out.write_all(&buf[skip..])?;
        start = end;
        if start >= args.n {
            break;
        }
    }
    out.flush()?;

    let mut r = header("gen", common);
    r.push("N", args.n);
    r.push("dim", args.dim);
    r.push("m", m);
    r.push("resolved_depth", depth);
    r.push(
        "generators",
        spec.kinds()
            .iter()
            .map(|k| k.name())
            .collect::<Vec<_>>()
            .join(","),
    );
    r.push("points_csv", path.display());
    Ok(Outcome::new(r, false))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ZeroShortcut,
    Exhaustive,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Certified partial quotient degrees of <X^r theta> for r <= r_max.
    Deficiency {
        #[command(flatten)]
        common: Common,
        /// Fail if a certified quotient degree exceeds this bound.
        #[arg(long)]
        max_degree: Option<usize>,
        /// Also run the exhaustive search over monic Q of this degree bound.
        #[arg(long)]
        degq_max: Option<usize>,
    },
    /// Rank condition for the (I, H) sequence with the given t.
    Tvalue {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 27)]
        m_max: usize,
        /// Defaults to the deficiency.
        #[arg(long)]
        t: Option<usize>,
    },
    /// Admissibility of the (I, H, J) net.
    Admissible {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        m: usize,
        /// Defaults to deficiency + 3.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::ZeroShortcut)]
        mode: Mode,
    },
    /// Regular Hankel sizes against convergent denominator degrees.
    Hankel {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        m_max: usize,
    },
    /// Generator-matrix points against the radical inverse and <theta n(X)>.
    Correspondence {
        #[command(flatten)]
        common: Common,
        /// All n < p^m are checked.
        #[arg(long, default_value_t = 6)]
        m: usize,
        /// Extra random indices, drawn with --seed.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Random indices lie below p^sample_digits.
        #[arg(long, default_value_t = 20)]
        sample_digits: usize,
    },
}

pub fn verify(cmd: &VerifyCmd) -> CmdResult {
    match cmd {
        VerifyCmd::Deficiency {
            common,
            max_degree,
            degq_max,
        } => verify_deficiency(common, *max_degree, *degq_max),
        VerifyCmd::Tvalue { common, m_max, t } => verify_tvalue(common, *m_max, *t),
        VerifyCmd::Admissible { common, m, d, mode } => verify_admissible(common, *m, *d, *mode),
        VerifyCmd::Hankel { common, m_max } => verify_hankel(common, *m_max),
        VerifyCmd::Correspondence {
            common,
            m,
            samples,
            sample_digits,
        } => verify_correspondence(common, *m, *samples, *sample_digits),
    }
}

fn verify_deficiency(
    common: &Common,
    max_degree: Option<usize>,
    degq_max: Option<usize>,
) -> CmdResult {
    let theta = common.load_theta()?;
    let scan = deficiency_scan(&theta, common.r_max, usize::MAX)?;
    let mut r = header("verify deficiency", common);
    r.push("max_degree", opt(max_degree));
    r.push("degq_max", opt(degq_max));
    r.extend(scan.to_key_values());
    let mut falsified = false;
    if let Some(bound) = max_degree {
        let bad = scan.violations(bound);
        r.push("violations", bad.len());
        if let Some(w) = bad.first() {
            r.push(
                "violation_witness",
                format!("(r={},h={},deg={})", w.r, w.h, w.degree),
            );
        }
        falsified = !bad.is_empty() || scan.max_tail_degree > bound;
    }
    if let Some(dq) = degq_max {
        let search = brute_inf(&theta.frac(), common.r_max, dq)?;
        r.push("brute_exponent", search.exponent);
        r.push("brute_witness", format!("r={} Q={}", search.r, search.q));
        r.push("brute_candidates", search.candidates);
    }
    Ok(Outcome::new(r, falsified))
}

fn verify_tvalue(common: &Common, m_max: usize, t: Option<usize>) -> CmdResult {
    let theta = common.load_theta()?;
    let t = match t {
        Some(t) => t,
        None => common.resolve_deficiency(&theta)?,
    };
    let ms: Vec<usize> = (1..=m_max).collect();
    let h = GeneratorMatrix::HankelOf(theta.frac());
    let checks = sequence_t_check(theta.field(), &GeneratorMatrix::UnitI, &h, &ms, t)?;
    let mut r = header("verify tvalue", common);
    r.push("m_max", m_max);
    r.push("t", t);
    let mut falsified = false;
    for c in &checks {
        let cell = match &c.witness {
            None => "ok".to_string(),
            Some(w) => {
                falsified = true;
                format!("rank deficient at d = {w:?}")
            }
        };
        r.push(format!("m_{}", c.m), cell);
    }
    Ok(Outcome::new(r, falsified))
}

fn verify_admissible(common: &Common, m: usize, d: Option<usize>, mode: Mode) -> CmdResult {
    let theta = common.load_theta()?;
    let d = match d {
        Some(d) => d,
        None => common.resolve_deficiency(&theta)? + 3,
    };
    let depth = common.depth.unwrap_or(m + d + 5);
    let spec = NetSpec::ihj(&theta, m, depth)?;
    let mode_core = match mode {
        Mode::ZeroShortcut => AdmissibilityMode::ZeroShortcut,
        Mode::Exhaustive => AdmissibilityMode::Exhaustive,
    };
    let a = admissibility_check(&spec, d, mode_core)?;
    let mut r = header("verify admissible", common);
    r.push("m", m);
    r.push("d", d);
    r.push("resolved_depth", depth);
    r.push("mode", format!("{mode:?}"));
    r.push("admissible", a.admissible);
    r.push("smallest_norm_exponent", a.max_exponent_seen);
    r.push("threshold", m + d);
    r.push(
        "witness",
        a.witness
            .map_or("none".to_string(), |(k, n)| format!("k={k} n={n}")),
    );
    Ok(Outcome::new(r, !a.admissible))
}

fn verify_hankel(common: &Common, m_max: usize) -> CmdResult {
    let theta = common.load_theta()?;
    let sizes = regular_sizes(&theta, m_max)?;
    let cf = continued_fraction(&theta, usize::MAX)?;
    let degrees: BTreeSet<usize> = convergents(&cf)
        .iter()
        .map(|c| c.d)
        .filter(|&d| (1..=m_max).contains(&d))
        .collect();
    let join = |s: &BTreeSet<usize>| s.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let mut r = header("verify hankel", common);
    r.push("m_max", m_max);
    r.push("regular_sizes", join(&sizes));
    r.push("convergent_degrees", join(&degrees));
    r.push("equal", sizes == degrees);
    Ok(Outcome::new(r, sizes != degrees))
}

fn verify_correspondence(
    common: &Common,
    m: usize,
    samples: usize,
    sample_digits: usize,
) -> CmdResult {
    let theta = common.load_theta()?;
    let p = common.p;
    let big_m = m.max(if samples > 0 { sample_digits } else { 0 });
    let depth = common.depth.unwrap_or(big_m + 16);
    let spec = NetSpec::ih(&theta, big_m, depth)?;
    let mut ns: Vec<u128> = (0..pow_checked(p, m)?).collect();
    let bound = pow_checked(p, sample_digits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    ns.extend((0..samples).map(|_| rng.gen_range(0..bound)));
    let mismatch = ns
        .par_iter()
        .map(|&n| -> Result<Option<u128>, Error> {
            let x = digital_point(&spec, n)?;
            let ok = x.coords[0].value() == radical_inverse(p, n)
                && x.coords[1] == kronecker_coord(&theta, n, depth)?;
            Ok((!ok).then_some(n))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .next();
    let mut r = header("verify correspondence", common);
    r.push("m", m);
    r.push("samples", samples);
    r.push("sample_digits", sample_digits);
    r.push("resolved_depth", depth);
    r.push("checked", ns.len());
    r.push(
        "first_mismatch",
        mismatch.map_or("none".to_string(), |n| n.to_string()),
    );
    Ok(Outcome::new(r, mismatch.is_some()))
}

#[derive(Args, Debug)]
pub struct LowerBoundArgs {
    #[command(flatten)]
    pub common: Common,

    /// Net size exponent; must be a multiple of 24 (D + 1).
    #[arg(long, default_value_t = 96)]
    pub m: usize,
}

pub fn lowerbound(args: &LowerBoundArgs) -> CmdResult {
    let common = &args.common;
    let m = args.m;
    let theta = common.load_theta()?;
    let d = common.resolve_deficiency(&theta)?;
    let v = 3 * (d + 1);
    if m == 0 || !m.is_multiple_of(8 * v) {
        return Err(Error::InvalidParameter(format!(
            "m = {m} must be a positive multiple of 8v = {} (D = {d})",
            8 * v
        ))
        .into());
    }
    let depth = common.depth.unwrap_or_else(|| default_depth(m, d));
    let report = lower_bound_report(&theta, m, d, depth)?;

    ensure_out(common)?;
    let csv_path = common.out.join(format!("intervals_m{m}.csv"));
    let mut csv = BufWriter::new(fs::File::create(&csv_path)?);
    report.write_csv(&mut csv)?;
    csv.flush()?;

    let mut r = header("lowerbound", common);
    r.push("resolved_deficiency", d);
    r.push("resolved_depth", depth);
    r.extend(report.to_key_values());
    r.push("intervals_csv", csv_path.display());
    let outcome = Outcome::new(r, report.is_falsified());
    let report_path = common
        .out
        .join(format!("lowerbound_m{m}.{}", extension(common.format)));
    outcome.report.write_to(&report_path, common.format)?;
    Ok(outcome)
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub common: Common,

    #[arg(long, default_value_t = 1)]
    pub k_min: usize,

    #[arg(long, default_value_t = 7)]
    pub k_max: usize,
}

pub fn growth(args: &GrowthArgs) -> CmdResult {
    let common = &args.common;
    let theta = common.load_theta()?;
    let depth = match common.depth {
        Some(depth) => depth,
        None => default_depth(args.k_max, common.resolve_deficiency(&theta)?),
    };
    let table = growth_sweep(&theta, args.k_min, args.k_max, depth)?;

    ensure_out(common)?;
    let csv_path = common.out.join("growth.csv");
    let mut csv = BufWriter::new(fs::File::create(&csv_path)?);
    table.write_csv(&mut csv)?;
    csv.flush()?;

    let mut fit = header("growth", common);
    fit.push("k_min", args.k_min);
    fit.push("k_max", args.k_max);
    fit.push("resolved_depth", depth);
    fit.extend(table.fit_summary());
    let fit_path = common
        .out
        .join(format!("growth_fit.{}", extension(common.format)));
    fit.write_to(&fit_path, common.format)?;

    let mut r = fit;
    for row in &table.rows {
        r.push(format!("NDstar_k{}", row.k), &row.n_dstar);
    }
    r.push("growth_csv", csv_path.display());
    r.push("fit_summary", fit_path.display());
    Ok(Outcome::new(r, false))
}
