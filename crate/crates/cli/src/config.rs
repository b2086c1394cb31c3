//! Run configuration: a JSON document with an explicit schema version, plus
//! command-line overrides.

use std::f64::consts::PI;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lnls_core::dynamics::{Integrator, NlsParams};
use lnls_core::harness::{dyadic_h_list, ProfileSpec};
use lnls_core::spectral::InequalityKind;
use serde::{Deserialize, Serialize};

use crate::config_error;

pub const SCHEMA_VERSION: u32 = 1;

/// Floats that may be infinite, written as a number or as `"inf"`.
mod ext_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() && *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "∞") => Ok(f64::INFINITY),
            Raw::Text(t) => Err(de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}

/// One inequality to sweep; exponents follow from `1/q = 1/2 - s/d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InequalitySpec {
    Sobolev { s: f64, epsilon: f64 },
    GagliardoNirenberg { theta: f64 },
    Bernstein { s: f64 },
}

impl InequalitySpec {
    pub fn kind(&self, d: usize) -> InequalityKind {
        match *self {
            InequalitySpec::Sobolev { s, epsilon } => InequalityKind::sobolev(d, s, epsilon),
            InequalitySpec::GagliardoNirenberg { theta } => InequalityKind::gagliardo_nirenberg(d, theta),
            InequalitySpec::Bernstein { s } => InequalityKind::bernstein(d, s),
        }
    }

    pub fn label(&self) -> String {
        match self {
            InequalitySpec::Sobolev { s, epsilon } => format!("sobolev(s={s}, ε={epsilon})"),
            InequalitySpec::GagliardoNirenberg { theta } => format!("gagliardo_nirenberg(θ={theta})"),
            InequalitySpec::Bernstein { s } => format!("bernstein(s={s})"),
        }
    }
}

/// Every setting any command reads. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub d: usize,
    pub p: f64,
    /// `+1` defocusing, `-1` focusing.
    pub lambda: f64,
    /// Convergence studies only: drop the nonlinearity.
    pub linear: bool,
    pub profile: ProfileSpec,
    /// Lattice half-size for `simulate` and `conserve`.
    #[serde(rename = "M")]
    pub half_size: usize,
    pub dt: f64,
    pub t_final: f64,
    pub integrator: Integrator,
    pub record_stride: usize,
    pub h_list: Vec<f64>,
    pub times: Vec<f64>,
    pub reference_resolution: usize,
    pub reference_dt: f64,
    pub oversample: usize,
    #[serde(with = "ext_float")]
    pub q: f64,
    #[serde(with = "ext_float")]
    pub r: f64,
    pub epsilon: f64,
    pub t_nodes: usize,
    /// Small-time constant of the dispersive window `t ≤ c·h/N`.
    pub c: f64,
    pub t_samples: usize,
    pub inequalities: Vec<InequalitySpec>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            d: 2,
            p: 3.0,
            lambda: 1.0,
            linear: false,
            profile: ProfileSpec::gaussian(),
            half_size: 32,
            dt: 1e-3,
            t_final: 1.0,
            integrator: Integrator::Strang,
            record_stride: 100,
            h_list: dyadic_h_list(5),
            times: vec![0.0, 0.25, 0.5, 1.0],
            reference_resolution: 256,
            reference_dt: 1e-3,
            oversample: 4,
            q: 3.0,
            r: f64::INFINITY,
            epsilon: 0.1,
            t_nodes: lnls_core::estimates::STRICHARTZ_T_NODES,
            c: 0.1,
            t_samples: 64,
            inequalities: vec![
                InequalitySpec::Bernstein { s: 0.5 },
                InequalitySpec::Sobolev { s: 0.5, epsilon: 0.1 },
                InequalitySpec::GagliardoNirenberg { theta: 0.5 },
            ],
            seed: 7,
        }
    }
}

impl RunConfig {
    /// Reads a config file; a missing file and malformed JSON both name the path.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!(
                "{}: unsupported schema_version {} (this build reads version {SCHEMA_VERSION})",
                path.display(),
                cfg.schema_version
            );
        }
        Ok(cfg)
    }

    /// The equation parameters; `p > 1` and `λ = ±1` are checked here.
    pub fn params(&self) -> Result<NlsParams> {
        let params = NlsParams::new(self.p, self.lambda)?;
        Ok(if self.linear { NlsParams::without_nonlinearity(self.p) } else { params })
    }

    pub fn require_spacings(&self) -> Result<()> {
        if self.h_list.len() < 3 {
            return Err(config_error(format!("≥ 3 spacings required, got {}", self.h_list.len())));
        }
        Ok(())
    }
}

/// Parses `pi/8,pi/16,0.1` style lists; `pi/M` entries are exact.
pub fn parse_h_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            let lower = item.to_ascii_lowercase();
            if let Some(den) = lower.strip_prefix("pi/").or_else(|| lower.strip_prefix("π/")) {
                let m: f64 = den.parse().with_context(|| format!("bad spacing {item:?}"))?;
                Ok(PI / m)
            } else {
                item.parse::<f64>().with_context(|| format!("bad spacing {item:?} (use pi/M or a number)"))
            }
        })
        .collect()
}

pub fn parse_float_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|item| item.trim().parse::<f64>().with_context(|| format!("bad number {item:?}")))
        .collect()
}
