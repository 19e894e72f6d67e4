//! Separable two-mode squeezed states |q⃗,p⃗;ξ⃗⟩ = |q₁,p₁;ξ₁⟩ ⊗ |q₂,p₂;ξ₂⟩.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Field1, Field2};
use crate::numerics::quadrature::{box_breaks, integrate_2d_vec, integrate_vec, AdaptiveOptions};
use crate::onemode::{self, OneModePhasePoint, OneModeWidths, SqueezeParameter};

/// Tail cut for Gaussian boxes: exp(−z²/2) = 1e-17.
const GAUSS_CUT: f64 = 8.85;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeParams {
    pub modes: [SqueezeParameter; 2],
}

impl TwoModeParams {
    pub fn new(m1: SqueezeParameter, m2: SqueezeParameter) -> Result<Self> {
        if m1.hbar() != m2.hbar() {
            return Err(Error::InvalidParameter("both modes must share hbar".into()));
        }
        Ok(TwoModeParams { modes: [m1, m2] })
    }

    pub fn from_taus(tau: [C64; 2], lambda: [f64; 2], hbar: f64) -> Result<Self> {
        Self::new(SqueezeParameter::from_tau(tau[0], lambda[0], hbar)?, SqueezeParameter::from_tau(tau[1], lambda[1], hbar)?)
    }

    pub fn hbar(&self) -> f64 {
        self.modes[0].hbar()
    }

    pub fn lambda(&self, j: usize) -> f64 {
        self.modes[j].lambda()
    }

    pub fn tau(&self, j: usize) -> C64 {
        self.modes[j].tau()
    }

    pub fn widths(&self, j: usize) -> OneModeWidths {
        self.modes[j].widths()
    }

    /// Standard deviation λⱼΔ_{pⱼ} of the position portrait kernel.
    pub fn portrait_sd(&self, j: usize) -> f64 {
        self.lambda(j) * self.widths(j).delta_p_sq.sqrt()
    }

    /// κⱼ = 2ħγⱼ/(Δ_{pⱼ}²λⱼ²): slope of the conditional momentum mean.
    pub fn kappa(&self, j: usize) -> f64 {
        let w = self.widths(j);
        2.0 * self.hbar() * w.gamma / (w.delta_p_sq * self.lambda(j).powi(2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl PhasePoint {
    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> Self {
        PhasePoint { q1, q2, p1, p2 }
    }

    pub fn q(&self) -> [f64; 2] {
        [self.q1, self.q2]
    }

    pub fn p(&self) -> [f64; 2] {
        [self.p1, self.p2]
    }

    pub fn mode(&self, j: usize) -> OneModePhasePoint {
        OneModePhasePoint::new(self.q()[j], self.p()[j])
    }
}

pub fn sep_wavefunction(point: PhasePoint, params: &TwoModeParams, x: [f64; 2]) -> C64 {
    onemode::wavefunction(point.mode(0), &params.modes[0], x[0]) * onemode::wavefunction(point.mode(1), &params.modes[1], x[1])
}

pub fn sep_overlap_sq(a: PhasePoint, b: PhasePoint, params: &TwoModeParams) -> f64 {
    onemode::overlap_sq(a.mode(0), b.mode(0), &params.modes[0]) * onemode::overlap_sq(a.mode(1), b.mode(1), &params.modes[1])
}

/// Gaussian moments of h around q: m0 = Ǎ_h, m1ⱼ = Ǎ_{(qⱼ'−qⱼ)h}, m2ⱼ = Ǎ_{(qⱼ'−qⱼ)²h}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitMoments {
    pub m0: f64,
    pub m1: [f64; 2],
    pub m2: [f64; 2],
}

pub(crate) fn box_half(sd: f64, degree: u32) -> f64 {
    sd * (GAUSS_CUT + 2.0 * (degree as f64 + 2.0).sqrt())
}

/// h averaged against the Gaussian with independent standard deviations `sd`,
/// returning the moments above.
pub(crate) fn gaussian_moments(h: &dyn Field2, centre: [f64; 2], sd: [f64; 2], tol: f64) -> Result<PortraitMoments> {
    let deg = h.growth().degree();
    let bx = box_breaks(centre[0], box_half(sd[0], deg), &h.breakpoints(0));
    let by = box_breaks(centre[1], box_half(sd[1], deg), &h.breakpoints(1));
    let norm = 1.0 / (2.0 * std::f64::consts::PI * sd[0] * sd[1]);
    let r = integrate_2d_vec(
        5,
        |x, y, o: &mut [f64]| {
            let (d1, d2) = (x - centre[0], y - centre[1]);
            let w = norm * (-0.5 * (d1 * d1 / (sd[0] * sd[0]) + d2 * d2 / (sd[1] * sd[1]))).exp();
            let v = if w == 0.0 { 0.0 } else { w * h.value([x, y]) };
            o[0] = v;
            o[1] = v * d1;
            o[2] = v * d2;
            o[3] = v * d1 * d1;
            o[4] = v * d2 * d2;
        },
        &bx,
        &by,
        AdaptiveOptions::with_tol(tol, tol),
    )?;
    let v = r.value;
    Ok(PortraitMoments { m0: v[0], m1: [v[1], v[2]], m2: [v[3], v[4]] })
}

pub fn portrait_moments(h: &dyn Field2, point: PhasePoint, params: &TwoModeParams, tol: f64) -> Result<PortraitMoments> {
    gaussian_moments(h, point.q(), [params.portrait_sd(0), params.portrait_sd(1)], tol)
}

/// Ǎ_h(q⃗): Gaussian regularisation of h with variances λⱼ²Δ_{pⱼ}².
pub fn portrait_hq(h: &dyn Field2, point: PhasePoint, params: &TwoModeParams) -> Result<f64> {
    Ok(portrait_moments(h, point, params, 1e-11)?.m0)
}

/// Ǎ_{pⱼh} = pⱼǍ_h + κⱼ(qⱼǍ_h − Ǎ_{qⱼh}).
pub fn portrait_p_h(j: usize, h: &dyn Field2, point: PhasePoint, params: &TwoModeParams) -> Result<f64> {
    let m = portrait_moments(h, point, params, 1e-11)?;
    Ok(p_h_from_moments(j, &m, point, params))
}

/// Ǎ_{pⱼ²h}: mass term, γ² group and γ group.
pub fn portrait_p2_h(j: usize, h: &dyn Field2, point: PhasePoint, params: &TwoModeParams) -> Result<f64> {
    let m = portrait_moments(h, point, params, 1e-11)?;
    Ok(p2_h_from_moments(j, &m, point, params))
}

// qⱼǍ_h − Ǎ_{qⱼh} = −m1ⱼ and qⱼ²Ǎ_h − 2qⱼǍ_{qⱼh} + Ǎ_{qⱼ²h} = m2ⱼ.
pub fn p_h_from_moments(j: usize, m: &PortraitMoments, point: PhasePoint, params: &TwoModeParams) -> f64 {
    point.p()[j] * m.m0 - params.kappa(j) * m.m1[j]
}

pub fn p2_h_from_moments(j: usize, m: &PortraitMoments, point: PhasePoint, params: &TwoModeParams) -> f64 {
    let w = params.widths(j);
    let l2 = params.lambda(j).powi(2);
    let h = params.hbar();
    let p = point.p()[j];
    let k = params.kappa(j);
    (p * p + h * h / (w.delta_p_sq * l2)) * m.m0 + k * k * m.m2[j] - 2.0 * k * p * m.m1[j]
}

/// Brute-force portrait of f = h(q⃗)p₁^{k₁}p₂^{k₂}: 2D adaptive quadrature in q⃗ with the
/// momentum integrals done by nested adaptive quadrature against the full overlap.
pub fn sep_portrait_oracle(h: &dyn Field2, k: [u32; 2], point: PhasePoint, params: &TwoModeParams, tol: f64) -> Result<f64> {
    let hb = params.hbar();
    let deg = h.growth().degree() + k[0] + k[1];
    let mut bq = Vec::new();
    let mut p_half = [0.0; 2];
    for j in 0..2 {
        let sd = params.portrait_sd(j);
        let half = box_half(sd, deg);
        bq.push(box_breaks(point.q()[j], half, &h.breakpoints(j)));
        // conditional drift reaches |κ|·half at the box edge
        let p_sd = hb / sd;
        p_half[j] = box_half(p_sd, k[j]) + params.kappa(j).abs() * half;
    }
    let inner_opts = AdaptiveOptions::with_tol(tol * 1e-2, tol * 1e-2);
    let failure = std::cell::RefCell::new(None);
    let r = integrate_2d_vec(
        1,
        |x, y, o: &mut [f64]| {
            let qp = [x, y];
            let mut acc = h.value(qp);
            if acc == 0.0 {
                o[0] = 0.0;
                return;
            }
            for j in 0..2 {
                let pj = point.p()[j];
                let a = OneModePhasePoint::new(qp[j], 0.0);
                let centre = point.mode(j);
                let kj = k[j] as i32;
                let res = integrate_vec(
                    1,
                    |pp, oo: &mut [f64]| {
                        let ov = onemode::overlap_sq(OneModePhasePoint { p: pp, ..a }, centre, &params.modes[j]);
                        oo[0] = pp.powi(kj) * ov / (2.0 * std::f64::consts::PI * hb);
                    },
                    &[pj - p_half[j], pj, pj + p_half[j]],
                    inner_opts,
                );
                match res {
                    Ok(v) => acc *= v.value[0],
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        acc = 0.0;
                    }
                }
            }
            o[0] = acc;
        },
        &bq[0],
        &bq[1],
        AdaptiveOptions::with_tol(tol, tol),
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r.value[0])
}

/// δ(x⃗ − x⃗')·factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalKernel {
    pub x: [f64; 2],
    pub factor: f64,
}

/// One-mode smoothing factor of a position-only kernel: h averaged over a
/// Gaussian of variance λ²/(2Re σ_q²) centred at x.
pub fn kernel_smoothing(h: &dyn Field1, param: &SqueezeParameter, x: f64, tol: f64) -> Result<f64> {
    let sd = param.lambda() / (2.0 * param.widths().sigma_q_sq.re).sqrt();
    let breaks = box_breaks(x, box_half(sd, h.growth().degree()), &h.breakpoints());
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sd);
    let r = integrate_vec(
        1,
        |q, o: &mut [f64]| {
            let w = norm * (-0.5 * ((q - x) / sd).powi(2)).exp();
            o[0] = if w == 0.0 { 0.0 } else { w * h.value(q) };
        },
        &breaks,
        AdaptiveOptions::with_tol(tol, tol),
    )?;
    Ok(r.value[0])
}

/// Kernel of h₁(q₁)h₂(q₂): δ(x⃗−x⃗') times the product of one-mode smoothings at x⃗.
pub fn sep_kernel_hq(h1: &dyn Field1, h2: &dyn Field1, params: &TwoModeParams, x: [f64; 2]) -> Result<DiagonalKernel> {
    let f1 = kernel_smoothing(h1, &params.modes[0], x[0], 1e-12)?;
    let f2 = kernel_smoothing(h2, &params.modes[1], x[1], 1e-12)?;
    Ok(DiagonalKernel { x, factor: f1 * f2 })
}
