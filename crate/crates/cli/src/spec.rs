//! Scenario specification files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qsense_core::distinguishability::SampleBudget;
use qsense_core::envelope::{EnvelopeShape, EnvelopeSpec};
use qsense_core::scenarios::{ProbeKind, TargetParam};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioType {
    Static,
    FixedAxis,
    Ac,
    Rotating,
    CustomEnvelope,
}

/// One scenario. Unknown fields are rejected.
///
/// `omega_c` and `omega_true` are values of the estimated parameter, so for
/// a rotating field with `target = "k"` they are rotation rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(rename = "type")]
    pub kind_of: ScenarioType,
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeShape>,
    #[serde(default = "one_u64")]
    pub n: u64,
    #[serde(default = "one_u32")]
    pub m: u32,
    #[serde(default = "single")]
    pub kind: ProbeKind,
    /// Weight on the upper eigenvector of the probe.
    #[serde(default = "half")]
    pub c0_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetParam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_true: Option<f64>,
}

fn one_u64() -> u64 {
    1
}
fn one_u32() -> u32 {
    1
}
fn single() -> ProbeKind {
    ProbeKind::Single
}
fn half() -> f64 {
    0.5
}

impl ScenarioSpec {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: &str| Err(CliError::Usage(format!("field `{field}`: {why}")));
        let finite = [
            ("omega", Some(self.omega)),
            ("k", self.k),
            ("epsilon", self.epsilon),
            ("c0_sq", Some(self.c0_sq)),
            ("t_max", self.t_max),
            ("omega_c", self.omega_c),
            ("omega_true", self.omega_true),
        ];
        for (name, v) in finite {
            if let Some(v) = v {
                if !v.is_finite() {
                    return bad(name, "must be finite");
                }
            }
        }
        if self.omega <= 0.0 {
            return bad("omega", "must be positive");
        }
        if self.n == 0 {
            return bad("n", "must be at least 1");
        }
        if self.m == 0 {
            return bad("m", "must be at least 1");
        }
        if self.kind == ProbeKind::Single && self.m != 1 {
            return bad("m", "a single probe needs m = 1; set `kind` to product or ghz");
        }
        if !(0.0..=1.0).contains(&self.c0_sq) {
            return bad("c0_sq", "must lie in [0, 1]");
        }
        if let Some(t) = self.t_max {
            if t <= 0.0 {
                return bad("t_max", "must be positive");
            }
        }
        match self.kind_of {
            ScenarioType::Ac if self.k.is_none() => bad("k", "required for type `ac`"),
            ScenarioType::Rotating if self.epsilon.is_none() => bad("epsilon", "required for type `rotating`"),
            ScenarioType::FixedAxis | ScenarioType::CustomEnvelope if self.envelope.is_none() => {
                bad("envelope", "required for envelope scenarios")
            }
            ScenarioType::FixedAxis | ScenarioType::CustomEnvelope if self.t_max.is_none() => {
                bad("t_max", "required for envelope scenarios")
            }
            ScenarioType::CustomEnvelope if !matches!(self.envelope, Some(EnvelopeShape::Samples { .. })) => {
                bad("envelope", "custom_envelope expects kind `samples`")
            }
            _ => Ok(()),
        }?;
        if matches!(self.kind_of, ScenarioType::FixedAxis | ScenarioType::CustomEnvelope) {
            self.envelope_spec()?;
        }
        Ok(())
    }

    pub fn budget(&self) -> SampleBudget {
        SampleBudget::new(self.n).expect("validated")
    }

    pub fn target(&self) -> TargetParam {
        self.target.unwrap_or(TargetParam::Omega)
    }

    pub fn envelope_spec(&self) -> Result<EnvelopeSpec, CliError> {
        let shape = self
            .envelope
            .clone()
            .ok_or_else(|| CliError::Usage("field `envelope`: required".into()))?;
        let horizon = self
            .t_max
            .ok_or_else(|| CliError::Usage("field `t_max`: required".into()))?;
        EnvelopeSpec::new(shape, horizon).map_err(|e| CliError::Usage(format!("field `envelope`: {e}")))
    }
}
