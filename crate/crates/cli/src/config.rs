use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use vdck_core::algebra::{parse_poly, PrimeField};
use vdck_core::hankel::deficiency_scan;
use vdck_core::laurent::{paperfolding_series, LaurentSeries};
use vdck_core::{Error, Result};

/// Where the series theta comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaSource {
    Paperfolding,
    /// Numerator and denominator as polynomial text.
    Rational(String, String),
    File(PathBuf),
}

impl FromStr for ThetaSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "paperfolding" {
            return Ok(ThetaSource::Paperfolding);
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(ThetaSource::File(PathBuf::from(path)));
        }
        if let Some(body) = s.strip_prefix("rational:") {
            let parts: Vec<&str> = body.split(',').map(str::trim).collect();
            let (num, den) = match parts.as_slice() {
                [num, "/", den] => (*num, *den),
                [single] => single
                    .split_once('/')
                    .ok_or_else(|| format!("expected rational:P,/,Q or rational:P/Q, got {s:?}"))?,
                _ => {
                    return Err(format!(
                        "expected rational:P,/,Q or rational:P/Q, got {s:?}"
                    ))
                }
            };
            return Ok(ThetaSource::Rational(
                num.trim().to_string(),
                den.trim().to_string(),
            ));
        }
        Err(format!(
            "unknown theta source {s:?}; use paperfolding, rational:P,/,Q or file:PATH"
        ))
    }
}

impl fmt::Display for ThetaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaSource::Paperfolding => write!(f, "paperfolding"),
            ThetaSource::Rational(n, d) => write!(f, "rational:{n},/,{d}"),
            ThetaSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Flags shared by every command.
#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Prime modulus.
    #[arg(long, default_value_t = 3)]
    pub p: u32,

    /// paperfolding | rational:P,/,Q | file:PATH
    #[arg(long, default_value = "paperfolding")]
    pub theta: ThetaSource,

    /// Number of known coefficients of theta [default: 4096 for
    /// paperfolding, 256 for rational]. File series keep their own horizon
    /// unless this is smaller.
    #[arg(long)]
    pub horizon: Option<i64>,

    /// Digit depth R of generated coordinates.
    #[arg(long)]
    pub depth: Option<usize>,

    /// Deficiency D of theta; estimated by a certified scan when omitted.
    #[arg(long)]
    pub deficiency: Option<usize>,

    /// Largest shift r for the deficiency scan.
    #[arg(long, default_value_t = 64)]
    pub r_max: usize,

    /// Output directory for CSV and report files; created if missing.
    #[arg(long, default_value = "vdck-out")]
    pub out: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Seed for any sampled indices.
    #[arg(long, default_value_t = 20240101)]
    pub seed: u64,

    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Common {
    pub fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.p)
    }

    pub fn horizon(&self) -> i64 {
        self.horizon.unwrap_or(match self.theta {
            ThetaSource::Paperfolding => 4096,
            _ => 256,
        })
    }

    pub fn load_theta(&self) -> Result<LaurentSeries> {
        let field = self.field()?;
        let horizon = self.horizon();
        if horizon < 1 {
            return Err(Error::InvalidParameter(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        match &self.theta {
            ThetaSource::Paperfolding => Ok(paperfolding_series(field, horizon as usize)),
            ThetaSource::Rational(num, den) => {
                let num = parse_poly(field, num)?;
                let den = parse_poly(field, den)?;
                if den.is_zero() {
                    return Err(Error::InvalidParameter("denominator is zero mod p".into()));
                }
                LaurentSeries::from_rational(&num, &den, horizon)
            }
            ThetaSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::InvalidParameter(format!("cannot read {}: {e}", path.display()))
                })?;
                let series = LaurentSeries::parse(&text)?;
                if series.field().p() != self.p {
                    return Err(Error::InvalidParameter(format!(
                        "series file is over F_{}, but --p is {}",
                        series.field().p(),
                        self.p
                    )));
                }
                Ok(match self.horizon {
                    Some(h) if h < series.horizon() => series.truncate(h),
                    _ => series,
                })
            }
        }
    }

    /// `--deficiency`, or the certified scan estimate.
    pub fn resolve_deficiency(&self, theta: &LaurentSeries) -> Result<usize> {
        if let Some(d) = self.deficiency {
            return Ok(d);
        }
        let scan = deficiency_scan(theta, self.r_max, usize::MAX)?;
        if let Some(c) = scan.collapse {
            return Err(Error::InvalidParameter(format!(
                "theta looks rational (collapse at shift r = {}); pass --deficiency explicitly",
                c.r
            )));
        }
        Ok(scan.d_hat)
    }

    /// Config entries embedded at the top of every report.
    pub fn entries(&self) -> Vec<(String, String)> {
        vec![
            ("p".into(), self.p.to_string()),
            ("theta".into(), self.theta.to_string()),
            ("horizon".into(), self.horizon().to_string()),
            ("depth".into(), opt(self.depth)),
            ("deficiency".into(), opt(self.deficiency)),
            ("r_max".into(), self.r_max.to_string()),
            ("out".into(), self.out.display().to_string()),
            ("seed".into(), self.seed.to_string()),
            ("threads".into(), opt(self.threads)),
        ]
    }
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "auto".to_string(), |v| v.to_string())
}
