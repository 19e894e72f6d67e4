//! Position-dependent-mass oscillator confined to a rectangle, classically and
//! through its separable squeezed-state portraits (γⱼ = 0).
//!
//! H = Σⱼ pⱼ²(1 − Λⱼ²qⱼ²)/(2m₀) + V̄ⱼqⱼ² on the box |qⱼ| < 1/Λⱼ.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode::{solve_ode_until, OdeProblem, OdeSolution, Termination};
use crate::numerics::special::{erfc_real, gaussian_density};
use crate::sepstates::TwoModeParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdmModel {
    pub m0: f64,
    /// Λⱼ, inverse half-widths of the box.
    pub lambda: [f64; 2],
    /// V̄ⱼ.
    pub vbar: [f64; 2],
}

impl PdmModel {
    pub fn new(m0: f64, lambda: [f64; 2], vbar: [f64; 2]) -> Result<Self> {
        if !(m0 > 0.0 && m0.is_finite()) {
            return Err(Error::InvalidParameter(format!("m0 must be positive, got {m0}")));
        }
        if lambda.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter("Lambda must be positive".into()));
        }
        if vbar.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("Vbar must be non-negative".into()));
        }
        Ok(PdmModel { m0, lambda, vbar })
    }

    /// Box (aⱼ, bⱼ) = (−1/Λⱼ, 1/Λⱼ).
    pub fn walls(&self, j: usize) -> (f64, f64) {
        (-1.0 / self.lambda[j], 1.0 / self.lambda[j])
    }

    pub fn inside(&self, q: [f64; 2]) -> bool {
        (0..2).all(|j| (self.lambda[j] * q[j]).abs() < 1.0)
    }

    pub fn mass(&self, j: usize, q: f64) -> f64 {
        self.m0 / (1.0 - (self.lambda[j] * q).powi(2))
    }

    pub fn energy(&self, q: [f64; 2], p: [f64; 2]) -> f64 {
        (0..2).map(|j| p[j] * p[j] / (2.0 * self.mass(j, q[j])) + self.vbar[j] * q[j] * q[j]).sum()
    }
}

/// Phase-space sample of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub q: [f64; 2],
    pub p: [f64; 2],
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Bounded,
    Escaped,
    SingularStop,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub classification: Classification,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has samples")
    }

    /// max |E(t) − E(0)| / |E(0)|.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.first().energy;
        let scale = e0.abs().max(f64::MIN_POSITIVE);
        self.samples.iter().map(|s| (s.energy - e0).abs() / scale).fold(0.0, f64::max)
    }
}

/// qⱼ(t) for V̄ = 0.
pub fn classical_exact(model: &PdmModel, j: usize, q0: f64, v0: f64, t: f64) -> Result<f64> {
    let l = model.lambda[j];
    if (l * q0).abs() >= 1.0 {
        return Err(Error::OutsideBox);
    }
    Ok((l * v0 * t / (1.0 - (l * q0).powi(2)).sqrt() + (l * q0).asin()).sin() / l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalForm {
    /// Λⱼqⱼ = sin θⱼ: the mass becomes the constant m₀/Λⱼ² and θ̈ⱼ = −V̄ⱼ sin 2θⱼ/m₀,
    /// so the wall is reached without any singularity.
    #[default]
    Angle,
    /// Hamilton's equations in (q, p); stops when 1 − Λⱼ²qⱼ² < 1e-10.
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub rel: f64,
    pub abs: f64,
    /// Uniform output spacing; `None` keeps the accepted steps.
    pub output_dt: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { rel: 1e-11, abs: 1e-13, output_dt: None }
    }
}

impl SolverOptions {
    pub fn with_output_dt(mut self, dt: f64) -> Self {
        self.output_dt = Some(dt);
        self
    }

    fn states(&self, sol: &OdeSolution) -> Vec<(f64, Vec<f64>)> {
        match self.output_dt {
            Some(dt) if dt > 0.0 => {
                let (t0, t1) = (sol.t[0], *sol.last().0);
                let n = ((t1 - t0) / dt).floor() as usize;
                let mut out: Vec<(f64, Vec<f64>)> = (0..=n).map(|i| t0 + i as f64 * dt).map(|t| (t, sol.interpolate(t))).collect();
                if t1 - out.last().map(|s| s.0).unwrap_or(t0) > 1e-12 * dt {
                    out.push((t1, sol.y.last().expect("non-empty").clone()));
                }
                out
            }
            _ => sol.t.iter().copied().zip(sol.y.iter().cloned()).collect(),
        }
    }
}

const SINGULAR: f64 = 1e-10;

/// Classical run from positions q₀ and velocities v₀.
pub fn classical_integrate(
    model: &PdmModel,
    q0: [f64; 2],
    v0: [f64; 2],
    t_span: (f64, f64),
    form: ClassicalForm,
    tol: SolverOptions,
) -> Result<Trajectory> {
    if !model.inside(q0) {
        return Err(Error::OutsideBox);
    }
    let (m0, lam, vb) = (model.m0, model.lambda, model.vbar);
    match form {
        ClassicalForm::Angle => {
            let y0: Vec<f64> = (0..2)
                .map(|j| (lam[j] * q0[j]).asin())
                .chain((0..2).map(|j| lam[j] * v0[j] / (1.0 - (lam[j] * q0[j]).powi(2)).sqrt()))
                .collect();
            let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[2];
                dy[1] = y[3];
                dy[2] = -vb[0] * (2.0 * y[0]).sin() / m0;
                dy[3] = -vb[1] * (2.0 * y[1]).sin() / m0;
            };
            let sol = solve_ode_until(&OdeProblem::new(rhs, t_span, y0).tolerances(tol.rel, tol.abs), |_, _| false)?;
            let samples = tol
                .states(&sol)
                .into_iter()
                .map(|(t, y)| {
                    let q = [y[0].sin() / lam[0], y[1].sin() / lam[1]];
                    let p = [m0 * y[2] / (lam[0] * y[0].cos()), m0 * y[3] / (lam[1] * y[1].cos())];
                    let energy = (0..2)
                        .map(|j| m0 * y[2 + j] * y[2 + j] / (2.0 * lam[j] * lam[j]) + vb[j] * q[j] * q[j])
                        .sum();
                    Sample { t, q, p, energy }
                })
                .collect();
            Ok(Trajectory { samples, classification: Classification::Bounded })
        }
        ClassicalForm::Canonical => {
            let p0 = [model.mass(0, q0[0]) * v0[0], model.mass(1, q0[1]) * v0[1]];
            let y0 = vec![q0[0], q0[1], p0[0], p0[1]];
            let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
                for j in 0..2 {
                    let (q, p) = (y[j], y[2 + j]);
                    dy[j] = p * (1.0 - lam[j] * lam[j] * q * q) / m0;
                    dy[2 + j] = p * p * lam[j] * lam[j] * q / m0 - 2.0 * vb[j] * q;
                }
            };
            let stop = |_t: f64, y: &[f64]| (0..2).any(|j| 1.0 - (lam[j] * y[j]).powi(2) < SINGULAR);
            let sol = match solve_ode_until(&OdeProblem::new(rhs, t_span, y0).tolerances(tol.rel, tol.abs), stop) {
                Ok(s) => s,
                Err(Error::StepSizeUnderflow { t }) | Err(Error::NonFiniteState { t }) => {
                    return Err(Error::StepSizeUnderflow { t });
                }
                Err(e) => return Err(e),
            };
            let classification =
                if sol.termination == Termination::Stopped { Classification::SingularStop } else { Classification::Bounded };
            let samples = tol
                .states(&sol)
                .into_iter()
                .map(|(t, y)| {
                    let (q, p) = ([y[0], y[1]], [y[2], y[3]]);
                    Sample { t, q, p, energy: model.energy(q, p) }
                })
                .collect();
            Ok(Trajectory { samples, classification })
        }
    }
}

/// Position velocity q̇ along a classical sample.
pub fn classical_velocity(model: &PdmModel, s: &Sample) -> [f64; 2] {
    [s.p[0] / model.mass(0, s.q[0]), s.p[1] / model.mass(1, s.q[1])]
}

/// PDM model smoothed by a separable squeezed-state family with real τⱼ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalModel {
    pub model: PdmModel,
    pub params: TwoModeParams,
}

/// Per-mode erfc portraits and their q-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ModePortraits {
    chi: f64,
    q2chi: f64,
    dchi: f64,
    dq2chi: f64,
}

impl SemiclassicalModel {
    pub fn new(model: PdmModel, params: TwoModeParams) -> Result<Self> {
        for j in 0..2 {
            if params.tau(j).im != 0.0 {
                return Err(Error::InvalidParameter("semiclassical PDM dynamics need real squeezing (gamma = 0)".into()));
            }
        }
        Ok(SemiclassicalModel { model, params })
    }

    /// Kernel standard deviation sⱼ = λⱼΔ_{pⱼ}.
    pub fn sd(&self, j: usize) -> f64 {
        self.params.portrait_sd(j)
    }

    fn mode(&self, j: usize, q: f64) -> ModePortraits {
        let s = self.sd(j);
        let (a, b) = self.model.walls(j);
        let za = (q - a) / (std::f64::consts::SQRT_2 * s);
        let zb = (q - b) / (std::f64::consts::SQRT_2 * s);
        let (ea, eb) = ((-za * za).exp(), (-zb * zb).exp());
        let c = s / (2.0 * PI).sqrt();
        let chi = 0.5 * (erfc_real(zb) - erfc_real(za));
        let qchi = q * chi + c * (ea - eb);
        let q2chi = (q * q + s * s) * chi + c * ((a + q) * ea - (b + q) * eb);
        let (ga, gb) = (gaussian_density(q - a, s), gaussian_density(q - b, s));
        ModePortraits { chi, q2chi, dchi: ga - gb, dq2chi: a * a * ga - b * b * gb + 2.0 * qchi }
    }

    pub fn chi(&self, q: [f64; 2]) -> f64 {
        self.mode(0, q[0]).chi * self.mode(1, q[1]).chi
    }

    /// Ǎ_{qⱼ²χ}.
    pub fn q2chi(&self, j: usize, q: [f64; 2]) -> f64 {
        self.mode(j, q[j]).q2chi * self.mode(1 - j, q[1 - j]).chi
    }

    /// Ǎ_{Mⱼ} = (Ǎ_χ − Λⱼ²Ǎ_{qⱼ²χ})/m₀.
    pub fn mass(&self, j: usize, q: [f64; 2]) -> f64 {
        self.landscape(q).mass[j]
    }

    pub fn effective_potential(&self, q: [f64; 2]) -> f64 {
        self.landscape(q).veff
    }

    /// Values and analytic gradients of Ǎ_{M₁}, Ǎ_{M₂} and V_eff.
    pub fn landscape(&self, q: [f64; 2]) -> Landscape {
        let m = [self.mode(0, q[0]), self.mode(1, q[1])];
        let (m0, lam, vb) = (self.model.m0, self.model.lambda, self.model.vbar);
        let mut out = Landscape::default();
        for j in 0..2 {
            let o = 1 - j;
            let l2 = lam[j] * lam[j];
            out.mass[j] = (m[j].chi - l2 * m[j].q2chi) * m[o].chi / m0;
            out.dmass[j][j] = (m[j].dchi - l2 * m[j].dq2chi) * m[o].chi / m0;
            out.dmass[j][o] = (m[j].chi - l2 * m[j].q2chi) * m[o].dchi / m0;
        }
        let h = self.params.hbar();
        for j in 0..2 {
            let o = 1 - j;
            let w = h * h / (2.0 * self.params.widths(j).delta_p_sq * self.params.lambda(j).powi(2));
            out.veff += w * out.mass[j] + vb[j] * m[j].q2chi * m[o].chi;
            for k in 0..2 {
                out.dveff[k] += w * out.dmass[j][k];
            }
            out.dveff[j] += vb[j] * m[j].dq2chi * m[o].chi;
            out.dveff[o] += vb[j] * m[j].q2chi * m[o].dchi;
        }
        out
    }

    /// Ȟ = Σ pⱼ²Ǎ_{Mⱼ}/2 + V_eff.
    pub fn energy(&self, q: [f64; 2], p: [f64; 2]) -> f64 {
        let l = self.landscape(q);
        0.5 * (p[0] * p[0] * l.mass[0] + p[1] * p[1] * l.mass[1]) + l.veff
    }

    /// p₀ⱼ = v₀ⱼ/Ǎ_{Mⱼ}(q₀).
    pub fn initial_momentum(&self, q0: [f64; 2], v0: [f64; 2]) -> Result<[f64; 2]> {
        let l = self.landscape(q0);
        if !(l.mass[0] > 0.0 && l.mass[1] > 0.0) {
            return Err(Error::OutsideBox);
        }
        Ok([v0[0] / l.mass[0], v0[1] / l.mass[1]])
    }

    /// Escaped: outside the classical box with V_eff below 1% of the energy.
    pub fn classify(&self, q: [f64; 2], energy: f64) -> Classification {
        let outside = (0..2).any(|j| (self.model.lambda[j] * q[j]).abs() > 1.0);
        if outside && self.effective_potential(q) < 0.01 * energy {
            Classification::Escaped
        } else {
            Classification::Bounded
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Landscape {
    pub mass: [f64; 2],
    /// dmass[j][k] = ∂Ǎ_{Mⱼ}/∂q_k.
    pub dmass: [[f64; 2]; 2],
    pub veff: f64,
    pub dveff: [f64; 2],
}

/// Hamilton's equations of Ȟ from positions q₀ and velocities v₀.
pub fn semiclassical_integrate(
    semi: &SemiclassicalModel,
    q0: [f64; 2],
    v0: [f64; 2],
    t_span: (f64, f64),
    tol: SolverOptions,
) -> Result<Trajectory> {
    let p0 = semi.initial_momentum(q0, v0)?;
    let y0 = vec![q0[0], q0[1], p0[0], p0[1]];
    let s = *semi;
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let l = s.landscape([y[0], y[1]]);
        let p = [y[2], y[3]];
        dy[0] = p[0] * l.mass[0];
        dy[1] = p[1] * l.mass[1];
        for k in 0..2 {
            dy[2 + k] = -(0.5 * p[0] * p[0] * l.dmass[0][k] + 0.5 * p[1] * p[1] * l.dmass[1][k] + l.dveff[k]);
        }
    };
    let sol = solve_ode_until(&OdeProblem::new(rhs, t_span, y0).tolerances(tol.rel, tol.abs), |_, _| false)?;
    let samples: Vec<Sample> = tol
        .states(&sol)
        .into_iter()
        .map(|(t, y)| {
            let (q, p) = ([y[0], y[1]], [y[2], y[3]]);
            Sample { t, q, p, energy: semi.energy(q, p) }
        })
        .collect();
    let last = samples.last().expect("solver returns the initial point");
    let classification = semi.classify(last.q, samples[0].energy);
    Ok(Trajectory { samples, classification })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        if self.n <= 1 {
            return vec![self.lo];
        }
        (0..self.n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub q1: Axis,
    pub q2: Axis,
}

impl Grid {
    /// Row-major over q1, then q2.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let (a, b) = (self.q1.points(), self.q2.points());
        a.iter().flat_map(|&x| b.iter().map(move |&y| [x, y])).collect()
    }

    /// Evaluates `f` on every grid point in parallel, in grid order.
    pub fn evaluate<F: Fn([f64; 2]) -> f64 + Sync>(&self, f: F) -> Vec<([f64; 2], f64)> {
        self.points().into_par_iter().map(|q| (q, f(q))).collect()
    }
}

/// Grid mask V_eff(q) ≥ Ȟ(q₀, p₀).
pub fn forbidden_region(semi: &SemiclassicalModel, q0: [f64; 2], v0: [f64; 2], grid: &Grid) -> Result<Vec<([f64; 2], bool)>> {
    let p0 = semi.initial_momentum(q0, v0)?;
    let e = semi.energy(q0, p0);
    Ok(grid.evaluate(|q| semi.effective_potential(q)).into_iter().map(|(q, v)| (q, v >= e)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    Classical,
    Semiclassical,
}

/// Bundled reference setups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: &'static str,
    pub dynamics: Dynamics,
    pub model: PdmModel,
    pub params: Option<TwoModeParams>,
    pub q0: [f64; 2],
    pub v0: [f64; 2],
    pub t_end: f64,
    /// Orbit period for closed classical presets.
    pub period: Option<f64>,
}

pub const PRESET_NAMES: [&str; 9] = ["fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig4c", "fig6a", "fig6b", "fig6c"];

/// Shared fig6 setup: m₀ = 5, Λ = (1.5, 1), V̄ = 50, λ = 0.5, τ = 0.9, ħ = 1.
pub fn fig6_params() -> Result<(PdmModel, TwoModeParams)> {
    let model = PdmModel::new(5.0, [1.5, 1.0], [50.0, 50.0])?;
    let params = TwoModeParams::from_taus([crate::C64::new(0.9, 0.0); 2], [0.5, 0.5], 1.0)?;
    Ok((model, params))
}

pub fn preset(name: &str) -> Option<Preset> {
    let classical = |lam1: f64, m0: f64, vbar: f64, t_end: f64, period: Option<f64>| Preset {
        name: PRESET_NAMES.iter().copied().find(|n| *n == name).unwrap_or("custom"),
        dynamics: Dynamics::Classical,
        model: PdmModel { m0, lambda: [lam1, 1.0], vbar: [vbar; 2] },
        params: None,
        q0: [0.0, 0.0],
        v0: [1.0, 2.0],
        t_end,
        period,
    };
    let semi = |v0: [f64; 2]| {
        let (model, params) = fig6_params().expect("preset parameters are valid");
        Preset {
            name: PRESET_NAMES.iter().copied().find(|n| *n == name).unwrap_or("custom"),
            dynamics: Dynamics::Semiclassical,
            model,
            params: Some(params),
            q0: [0.0, 0.0],
            v0,
            t_end: 15.0,
            period: None,
        }
    };
    Some(match name {
        "fig3a" => classical(1.0, 1.0, 0.0, 65.0, Some(2.0 * PI)),
        "fig3b" => classical(1.5, 1.0, 0.0, 65.0, Some(4.0 * PI)),
        "fig3c" => classical(2.0, 1.0, 0.0, 65.0, Some(PI)),
        "fig4a" => classical(2.0, 5.0, 1.0, 35.0, None),
        "fig4b" => classical(2.0, 5.0, 2.0, 35.0, None),
        "fig4c" => classical(2.0, 5.0, 15.0, 35.0, None),
        "fig6a" => semi([0.75, 0.75]),
        "fig6b" => semi([1.0, 1.5]),
        "fig6c" => semi([1.75, 1.25]),
        _ => return None,
    })
}

impl Preset {
    pub fn run(&self, tol: SolverOptions) -> Result<Trajectory> {
        match self.dynamics {
            Dynamics::Classical => {
                classical_integrate(&self.model, self.q0, self.v0, (0.0, self.t_end), ClassicalForm::Angle, tol)
            }
            Dynamics::Semiclassical => {
                let params = self.params.ok_or_else(|| Error::InvalidParameter("semiclassical preset needs state parameters".into()))?;
                semiclassical_integrate(&SemiclassicalModel::new(self.model, params)?, self.q0, self.v0, (0.0, self.t_end), tol)
            }
        }
    }

    /// Distance in (q, q̇) between the initial state and the state one period later.
    pub fn recurrence(&self, tol: SolverOptions) -> Result<Option<f64>> {
        let Some(period) = self.period else { return Ok(None) };
        let tr = classical_integrate(&self.model, self.q0, self.v0, (0.0, period), ClassicalForm::Angle, tol)?;
        let (a, b) = (tr.first(), tr.last());
        let (va, vb) = (classical_velocity(&self.model, a), classical_velocity(&self.model, b));
        let d = (0..2).map(|j| (a.q[j] - b.q[j]).abs().max((va[j] - vb[j]).abs())).fold(0.0, f64::max);
        Ok(Some(d))
    }
}
