//! Experiment definition: model parameters and variant selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which anti-preferential weight the growth process uses.
///
/// Both variants share the preferential rule; they differ in the constant the
/// anti-preferential weight is measured against: the theoretical maximum
/// degree `2mt` for [`Variant::PaApa`], the current maximum degree `M_t` for
/// [`Variant::PaApa2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Anti-preferential weight `2mt + 1 - d(v_i, t)`.
    #[serde(rename = "pa-apa")]
    PaApa,
    /// Anti-preferential weight `M_t + 1 - d(v_i, t)`.
    #[serde(rename = "pa-apa-2")]
    PaApa2,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::PaApa => "pa-apa",
            Variant::PaApa2 => "pa-apa-2",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pa-apa" | "paapa" => Ok(Variant::PaApa),
            "pa-apa-2" | "paapa2" | "pa-apa2" => Ok(Variant::PaApa2),
            other => Err(Error::invalid(
                "variant",
                format!("expected `pa-apa` or `pa-apa-2`, got `{other}`"),
            )),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full definition of one growth experiment.
///
/// * `m` — edges attached per new vertex (`m >= 1`);
/// * `p` — probability of choosing the anti-preferential regime in a step;
/// * `variant` — which anti-preferential weight applies;
/// * `horizon` — final time `T` (vertex count of the finished graph);
/// * `seed` — base seed; replica `r` runs on [`crate::seed::derive_seed`]`(seed, r)`;
/// * `replicas` — number of independent repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: u32,
    pub p: f64,
    pub variant: Variant,
    pub horizon: u64,
    pub seed: u64,
    pub replicas: u32,
}

impl ModelParams {
    /// Single-replica parameter set; adjust fields or call builders afterwards.
    pub fn new(m: u32, p: f64, variant: Variant, horizon: u64, seed: u64) -> Self {
        ModelParams {
            m,
            p,
            variant,
            horizon,
            seed,
            replicas: 1,
        }
    }

    pub fn with_replicas(mut self, replicas: u32) -> Self {
        self.replicas = replicas;
        self
    }

    /// Checks `m >= 1`, `p` in `[0, 1]`, `horizon >= 1` and `replicas >= 1`.
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("m", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.p) || self.p.is_nan() {
            return Err(Error::invalid("p", format!("must lie in [0, 1], got {}", self.p)));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon", "must be >= 1"));
        }
        if self.replicas == 0 {
            return Err(Error::invalid("replicas", "must be >= 1"));
        }
        Ok(())
    }
}
