//! Convex Casimir generators `j` and the maps derived from them.

use std::fmt;
use std::str::FromStr;

use crate::error::{HmfError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CasimirFamily {
    /// `j(t) = t ln t`, `j(0) = 0`.
    Entropy,
    /// `j(t) = t^p` with `p > 1`.
    Power(f64),
}

/// A Casimir generator together with the structural hypotheses it satisfies.
///
/// * `h1`: `j` is C^2 on `(0, inf)`, `j(0) = j'(0) = 0`, `j'' > 0`.
/// * `h2`: `j(t) / t -> inf`.
/// * `h3`: `p <= t j'(t) / j(t) <= q` for some `p, q > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CasimirSpec {
    family: CasimirFamily,
}

impl CasimirSpec {
    pub fn entropy() -> Self {
        Self { family: CasimirFamily::Entropy }
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(HmfError::InvalidArgument(format!("power exponent must exceed 1, got {p}")));
        }
        Ok(Self { family: CasimirFamily::Power(p) })
    }

    pub fn family(&self) -> CasimirFamily {
        self.family
    }

    pub fn is_entropy(&self) -> bool {
        matches!(self.family, CasimirFamily::Entropy)
    }

    pub fn h1(&self) -> bool {
        matches!(self.family, CasimirFamily::Power(_))
    }

    pub fn h2(&self) -> bool {
        true
    }

    pub fn h3(&self) -> bool {
        matches!(self.family, CasimirFamily::Power(_))
    }

    /// The `(p, q)` pair of the growth hypothesis, when it holds.
    pub fn exponents(&self) -> Option<(f64, f64)> {
        match self.family {
            CasimirFamily::Power(p) => Some((p, p)),
            CasimirFamily::Entropy => None,
        }
    }

    pub fn j(&self, t: f64) -> f64 {
        match self.family {
            CasimirFamily::Entropy => {
                if t > 0.0 {
                    t * t.ln()
                } else {
                    0.0
                }
            }
            CasimirFamily::Power(p) => {
                if t > 0.0 {
                    t.powf(p)
                } else {
                    0.0
                }
            }
        }
    }

    /// `j'(t)`. Not defined at 0 for the entropy family.
    pub fn j_prime(&self, t: f64) -> f64 {
        match self.family {
            CasimirFamily::Entropy => t.ln() + 1.0,
            CasimirFamily::Power(p) => {
                if t > 0.0 {
                    p * t.powf(p - 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn j_second(&self, t: f64) -> f64 {
        match self.family {
            CasimirFamily::Entropy => 1.0 / t,
            CasimirFamily::Power(p) => p * (p - 1.0) * t.powf(p - 2.0),
        }
    }

    /// `(j')^{-1}(s)`. For the power family `s` must be nonnegative.
    pub fn inverse_derivative(&self, s: f64) -> f64 {
        match self.family {
            CasimirFamily::Entropy => (s - 1.0).exp(),
            CasimirFamily::Power(p) => {
                if s >= 0.0 {
                    (s / p).powf(1.0 / (p - 1.0))
                } else {
                    f64::NAN
                }
            }
        }
    }
}

impl fmt::Display for CasimirSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            CasimirFamily::Entropy => write!(f, "entropy"),
            CasimirFamily::Power(p) => write!(f, "power:{p}"),
        }
    }
}

impl FromStr for CasimirSpec {
    type Err = HmfError;

    /// Accepts `entropy` or `power:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "entropy" {
            return Ok(Self::entropy());
        }
        if let Some(rest) = s.strip_prefix("power:") {
            let p: f64 = rest
                .trim()
                .parse()
                .map_err(|_| HmfError::InvalidArgument(format!("bad power exponent {rest:?}")))?;
            return Self::power(p);
        }
        Err(HmfError::InvalidArgument(format!(
            "unknown casimir {s:?}, expected \"entropy\" or \"power:<p>\""
        )))
    }
}

/// `(j')^{-1}(max(s, 0))`, zero for `s <= 0`. Requires `h1`.
pub fn positive_part_inverse_derivative(spec: &CasimirSpec, s: f64) -> Result<f64> {
    if !spec.h1() {
        return Err(HmfError::Unsupported(format!(
            "{spec}: positive-part inverse needs j'(0) = 0; use the exponential form"
        )));
    }
    Ok(if s > 0.0 { spec.inverse_derivative(s) } else { 0.0 })
}

/// Extremes of `t j'(t) / j(t)` over the samples.
pub fn check_h3_ratio(spec: &CasimirSpec, samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(HmfError::InvalidArgument("no samples".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &t in samples {
        if !(t > 0.0) {
            return Err(HmfError::InvalidArgument(format!("sample {t} is not positive")));
        }
        let r = match spec.family {
            // exact for monomials; avoids cancellation in t * p t^(p-1) / t^p
            CasimirFamily::Power(p) => p,
            CasimirFamily::Entropy => t * spec.j_prime(t) / spec.j(t),
        };
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}
