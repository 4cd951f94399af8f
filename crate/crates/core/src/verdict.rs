//! Three-valued verification outcomes and the sampling configuration.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Acceptance threshold on `max |relation|` for zero-set points.
pub const ZERO_SET_ACCEPT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Status {
    Proven,
    NumericallySupported,
    Refuted,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Proven => "Proven",
            Status::NumericallySupported => "NumericallySupported",
            Status::Refuted => "Refuted",
        })
    }
}

/// Qualifiers attached to numerically supported verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Flag {
    /// The zero-set search found no point; nothing was tested.
    NoSamplePoints,
    /// Accepted by geometric sampling only; no algebraic certificate.
    GeometricOnly,
    /// Some sample points were discarded (overflow).
    SamplesDiscarded,
    /// A matching family had no gluing among the enumerated candidates.
    IncompletePool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Established by normalization or certificate algebra.
    Proven,
    NumericallySupported { samples: usize, max_residual: f64, flag: Option<Flag> },
    /// `witness` holds the coordinates of a separating point or carrier value.
    Refuted { witness: Vec<f64>, residual: f64 },
}

impl Verdict {
    pub fn supported(samples: usize, max_residual: f64) -> Self {
        Verdict::NumericallySupported { samples, max_residual, flag: None }
    }

    pub fn flagged(samples: usize, max_residual: f64, flag: Flag) -> Self {
        Verdict::NumericallySupported { samples, max_residual, flag: Some(flag) }
    }

    pub fn refuted(witness: Vec<f64>, residual: f64) -> Self {
        Verdict::Refuted { witness, residual }
    }

    pub fn status(&self) -> Status {
        match self {
            Verdict::Proven => Status::Proven,
            Verdict::NumericallySupported { .. } => Status::NumericallySupported,
            Verdict::Refuted { .. } => Status::Refuted,
        }
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, Verdict::Proven)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    /// Not refuted.
    pub fn holds(&self) -> bool {
        !self.is_refuted()
    }

    pub fn flag(&self) -> Option<Flag> {
        match self {
            Verdict::NumericallySupported { flag, .. } => *flag,
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&[f64]> {
        match self {
            Verdict::Refuted { witness, .. } => Some(witness),
            _ => None,
        }
    }

    /// Conjunction: the first refutation wins, numerical evidence
    /// accumulates, and `Proven` is neutral.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (r @ Verdict::Refuted { .. }, _) | (_, r @ Verdict::Refuted { .. }) => r,
            (Verdict::Proven, v) | (v, Verdict::Proven) => v,
            (
                Verdict::NumericallySupported { samples: s1, max_residual: r1, flag: f1 },
                Verdict::NumericallySupported { samples: s2, max_residual: r2, flag: f2 },
            ) => Verdict::NumericallySupported {
                samples: s1 + s2,
                max_residual: r1.max(r2),
                flag: f1.or(f2),
            },
        }
    }

    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts.into_iter().fold(Verdict::Proven, Verdict::and)
    }

    pub fn report(&self) -> VerdictReport {
        match self {
            Verdict::Proven => VerdictReport {
                status: Status::Proven,
                samples: 0,
                max_residual: 0.0,
                witness: None,
                flag: None,
            },
            Verdict::NumericallySupported { samples, max_residual, flag } => VerdictReport {
                status: Status::NumericallySupported,
                samples: *samples,
                max_residual: *max_residual,
                witness: None,
                flag: *flag,
            },
            Verdict::Refuted { witness, residual } => VerdictReport {
                status: Status::Refuted,
                samples: 0,
                max_residual: *residual,
                witness: Some(witness.clone()),
                flag: None,
            },
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Proven => write!(f, "Proven"),
            Verdict::NumericallySupported { samples, max_residual, flag } => {
                write!(f, "NumericallySupported(samples={samples}, max_residual={max_residual:e}")?;
                if let Some(flag) = flag {
                    write!(f, ", flag={flag:?}")?;
                }
                write!(f, ")")
            }
            Verdict::Refuted { witness, residual } => {
                write!(f, "Refuted(witness={witness:?}, residual={residual:e})")
            }
        }
    }
}

/// Serialized form `{status, samples, max_residual, witness?}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub status: Status,
    pub samples: usize,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<Flag>,
}

/// Sampling and search parameters. Every verdict-producing operation is
/// deterministic given a `Config`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub seed: u64,
    /// Relative tolerance for equality-style checks.
    pub tol: f64,
    /// Sample points per numerical check.
    pub samples: usize,
    /// Degree bound for certificate template search.
    pub nmax: u32,
    /// Bound on enumeration sizes and root-finding restarts.
    pub budget: usize,
}

impl Config {
    pub const DEFAULT_TOL: f64 = 1e-9;
    pub const DEFAULT_SAMPLES: usize = 64;
    pub const DEFAULT_NMAX: u32 = 4;
    pub const DEFAULT_BUDGET: usize = 10_000;

    pub fn with_seed(seed: u64) -> Self {
        Config {
            seed,
            tol: Self::DEFAULT_TOL,
            samples: Self::DEFAULT_SAMPLES,
            nmax: Self::DEFAULT_NMAX,
            budget: Self::DEFAULT_BUDGET,
        }
    }

    /// Independent deterministic stream for a named sub-task.
    pub fn rng(&self, tag: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(tag.as_bytes()))
    }

    /// `|a - b|` scaled by `max(1, |a|, |b|)`.
    pub fn relative_gap(a: f64, b: f64) -> f64 {
        (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        Self::relative_gap(a, b) <= self.tol
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ *b as u64).wrapping_mul(0x100_0000_01b3))
}
