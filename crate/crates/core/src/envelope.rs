//! Scalar time modulation `r(t)` of a fixed-axis signal `H(t) = r(t)·h`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, QUAD_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvelopeShape {
    /// `r(t) = value`
    Constant { value: f64 },
    /// `r(t) = sin(k·t)`
    #[serde(alias = "sin")]
    Sinusoid { k: f64 },
    /// Piecewise-linear interpolation of `(times, values)`.
    Samples { times: Vec<f64>, values: Vec<f64> },
}

/// An envelope together with the horizon `[0, t_max]` on which it is defined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnvelope", into = "RawEnvelope")]
pub struct EnvelopeSpec {
    shape: EnvelopeShape,
    horizon: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvelope {
    shape: EnvelopeShape,
    horizon: f64,
}

impl TryFrom<RawEnvelope> for EnvelopeSpec {
    type Error = Error;
    fn try_from(raw: RawEnvelope) -> Result<Self> {
        Self::new(raw.shape, raw.horizon)
    }
}

impl From<EnvelopeSpec> for RawEnvelope {
    fn from(e: EnvelopeSpec) -> Self {
        Self {
            shape: e.shape,
            horizon: e.horizon,
        }
    }
}

impl EnvelopeSpec {
    pub fn new(shape: EnvelopeShape, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        match &shape {
            EnvelopeShape::Constant { value } if !value.is_finite() => {
                return Err(Error::InvalidArgument("constant envelope must be finite".into()));
            }
            EnvelopeShape::Sinusoid { k } if !(k.is_finite() && *k >= 0.0) => {
                return Err(Error::InvalidArgument(format!("sinusoid frequency must be ≥ 0, got {k}")));
            }
            EnvelopeShape::Samples { times, values } => {
                if times.len() != values.len() || times.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "samples need matching times/values with at least two points".into(),
                    ));
                }
                if times.iter().chain(values).any(|x| !x.is_finite()) {
                    return Err(Error::InvalidArgument("samples must be finite".into()));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidArgument("sample times must be strictly increasing".into()));
                }
                if times[0] > 0.0 || times[times.len() - 1] < horizon {
                    return Err(Error::InvalidArgument(format!(
                        "samples cover [{}, {}] but the horizon is [0, {horizon}]",
                        times[0],
                        times[times.len() - 1]
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { shape, horizon })
    }

    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        Self::new(EnvelopeShape::Constant { value }, horizon)
    }

    pub fn sinusoid(k: f64, horizon: f64) -> Result<Self> {
        Self::new(EnvelopeShape::Sinusoid { k }, horizon)
    }

    pub fn samples(times: Vec<f64>, values: Vec<f64>, horizon: f64) -> Result<Self> {
        Self::new(EnvelopeShape::Samples { times, values }, horizon)
    }

    pub fn shape(&self) -> &EnvelopeShape {
        &self.shape
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.shape.clone(), horizon)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.shape {
            EnvelopeShape::Constant { value } => *value,
            EnvelopeShape::Sinusoid { k } => (k * t).sin(),
            EnvelopeShape::Samples { times, values } => {
                let idx = times.partition_point(|&x| x <= t);
                if idx == 0 {
                    return values[0];
                }
                if idx == times.len() {
                    return values[values.len() - 1];
                }
                let (t0, t1) = (times[idx - 1], times[idx]);
                let (v0, v1) = (values[idx - 1], values[idx]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match &self.shape {
            EnvelopeShape::Constant { value } => *value == 0.0,
            EnvelopeShape::Sinusoid { k } => *k == 0.0,
            EnvelopeShape::Samples { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// Sorted cut points of `[0, horizon]` such that `r` is smooth and of
    /// constant sign on every piece.
    pub fn segments(&self) -> Vec<f64> {
        let h = self.horizon;
        let mut cuts = vec![0.0];
        match &self.shape {
            EnvelopeShape::Constant { .. } => {}
            EnvelopeShape::Sinusoid { k } => {
                if *k > 0.0 {
                    let half = std::f64::consts::PI / k;
                    let mut j = 1.0;
                    while j * half < h {
                        cuts.push(j * half);
                        j += 1.0;
                    }
                }
            }
            EnvelopeShape::Samples { times, values } => {
                for i in 0..times.len() - 1 {
                    let (t0, t1, v0, v1) = (times[i], times[i + 1], values[i], values[i + 1]);
                    if t0 > 0.0 && t0 < h {
                        cuts.push(t0);
                    }
                    if v0 * v1 < 0.0 {
                        let z = t0 + (t1 - t0) * v0 / (v0 - v1);
                        if z > 0.0 && z < h {
                            cuts.push(z);
                        }
                    }
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
            }
        }
        cuts.push(h);
        cuts
    }

    /// `∫ₐᵇ g(r(s)) ds`, split at the envelope's kinks and sign changes.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let integrand = |t: f64| g(self.eval(t));
        let cuts = self.segments();
        let mut total = 0.0;
        let mut lo = a;
        for &c in cuts.iter().filter(|&&c| c > a && c < b) {
            total += adaptive_simpson(&integrand, lo, c, QUAD_TOL);
            lo = c;
        }
        total + adaptive_simpson(&integrand, lo, b, QUAD_TOL)
    }
}
