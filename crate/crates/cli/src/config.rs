//! JSON run configuration. Every physical constraint is re-checked through the
//! core constructors so errors name the offending field.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sqzq_core::nonsepstates::NonSepParams;
use sqzq_core::onemode::SqueezeParameter;
use sqzq_core::pdm::{Axis, ClassicalForm, Dynamics, Grid, PdmModel};
use sqzq_core::sepstates::TwoModeParams;
use sqzq_core::verify::VerifyConfig;
use sqzq_core::C64;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn field<T>(name: &str, r: sqzq_core::Result<T>) -> Result<T, ConfigError> {
    r.map_err(|e| ConfigError(format!("field `{name}`: {e}")))
}

pub fn load<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T, ConfigError> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    // serde_json reports line and column of the offending token
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub m0: f64,
    pub lambda: [f64; 2],
    #[serde(default)]
    pub vbar: [f64; 2],
}

impl ModelConfig {
    pub fn build(&self) -> Result<PdmModel, ConfigError> {
        field("model", PdmModel::new(self.m0, self.lambda, self.vbar))
    }
}

/// Two-mode state: τⱼ as [re, im], λⱼ, ħ and mixing angle φ.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    #[serde(default)]
    pub tau: [[f64; 2]; 2],
    pub lambda: [f64; 2],
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default)]
    pub phi: f64,
}

fn one() -> f64 {
    1.0
}

impl StateConfig {
    fn taus(&self) -> [C64; 2] {
        [C64::new(self.tau[0][0], self.tau[0][1]), C64::new(self.tau[1][0], self.tau[1][1])]
    }

    pub fn separable(&self) -> Result<TwoModeParams, ConfigError> {
        field("state", TwoModeParams::from_taus(self.taus(), self.lambda, self.hbar))
    }

    pub fn nonseparable(&self) -> Result<NonSepParams, ConfigError> {
        field("state.phi", NonSepParams::new(self.separable()?, self.phi))
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneModeConfig {
    #[serde(default)]
    pub tau: [f64; 2],
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

impl OneModeConfig {
    pub fn build(&self) -> Result<SqueezeParameter, ConfigError> {
        field("state", SqueezeParameter::from_tau(C64::new(self.tau[0], self.tau[1]), self.lambda, self.hbar))
    }
}

impl Default for OneModeConfig {
    fn default() -> Self {
        OneModeConfig { tau: [0.0, 0.0], lambda: 1.0, hbar: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Chi,
    Mass1,
    Mass2,
    Q2chi1,
    Q2chi2,
    Veff,
    /// Separable portrait of a box field.
    SepHq,
    /// Non-separable portrait of a box field.
    NonsepHq,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Chi => "chi",
            Quantity::Mass1 => "mass1",
            Quantity::Mass2 => "mass2",
            Quantity::Q2chi1 => "q2chi1",
            Quantity::Q2chi2 => "q2chi2",
            Quantity::Veff => "veff",
            Quantity::SepHq => "sep_hq",
            Quantity::NonsepHq => "nonsep_hq",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxField {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitConfig {
    pub preset: Option<String>,
    pub quantity: Option<Quantity>,
    pub model: Option<ModelConfig>,
    pub state: Option<StateConfig>,
    pub grid: Option<Grid>,
    /// Box field for `sep_hq`/`nonsep_hq`; defaults to the model box or [−1, 1]².
    pub field: Option<BoxField>,
    /// Momentum labels at which the portrait is evaluated.
    #[serde(default)]
    pub p: [f64; 2],
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub preset: Option<String>,
    pub dynamics: Option<Dynamics>,
    pub model: Option<ModelConfig>,
    pub state: Option<StateConfig>,
    pub q0: Option<[f64; 2]>,
    pub v0: Option<[f64; 2]>,
    pub t_end: Option<f64>,
    pub output_dt: Option<f64>,
    #[serde(default)]
    pub form: ClassicalForm,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionName {
    One,
    Q,
    P,
    Qp,
    QSq,
    PSq,
    Q1,
    Q2,
    P1,
    P2,
    Q1q2,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum FamilyConfig {
    OneMode(OneModeConfig),
    TwoMode(StateConfig),
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig::OneMode(OneModeConfig::default())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantiseConfig {
    #[serde(default)]
    pub family: FamilyConfig,
    pub function: FunctionName,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
}

fn default_nmax() -> usize {
    7
}

impl Default for QuantiseConfig {
    fn default() -> Self {
        QuantiseConfig { family: FamilyConfig::default(), function: FunctionName::One, nmax: default_nmax() }
    }
}

pub type VerifyFile = VerifyConfig;

pub fn default_grid(model: &PdmModel, n: usize) -> Grid {
    let axis = |j: usize| Axis { lo: -1.5 / model.lambda[j], hi: 1.5 / model.lambda[j], n };
    Grid { q1: axis(0), q2: axis(1) }
}

pub fn check_grid(g: &Grid) -> Result<(), ConfigError> {
    for (name, a) in [("grid.q1", &g.q1), ("grid.q2", &g.q2)] {
        if a.n < 1 || !(a.lo.is_finite() && a.hi.is_finite()) || (a.n > 1 && a.hi <= a.lo) {
            return Err(ConfigError(format!("field `{name}`: need finite lo < hi and n >= 1")));
        }
    }
    Ok(())
}
