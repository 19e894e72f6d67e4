//! Non-separable two-mode squeezed states G|0,0⟩ with
//! G = D(α₁)D(α₂)U_BS(φ)S(ξ₁)S(ξ₂) and U_BS(φ) = exp(φ(a₁†a₂ − a₁a₂†)).
//!
//! Internally lengths are scaled per mode: u = x/λ, k = λp/ħ. In those units the
//! fiducial wavefunction is exp(−uᵀBu) with B = [[Δ₁, ℓ/2], [ℓ/2, Δ₂]].

use std::cell::RefCell;
use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Field2;
use crate::numerics::gaussian::integrate_gaussian_quadratic;
use crate::numerics::operator::{expm, TruncatedOperator};
use crate::numerics::quadrature::{box_breaks, integrate_2d_vec, AdaptiveOptions, QuadratureRule};
use crate::onemode::fock_coefficients_tau;
use crate::sepstates::{box_half, PhasePoint, TwoModeParams};

fn rc(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Sign convention of the linear coefficient ℓ₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearConvention {
    /// ℓ₁ = 2Δ₁q₁/λ₁ + ℓq₂/λ₂ + iλ₁p₁/ħ, so that ⟨x̂ⱼ⟩ = qⱼ and ⟨p̂ⱼ⟩ = pⱼ.
    #[default]
    Physical,
    /// ℓ₁ = −2Δ₁q₁/λ₁ − ℓq₂/λ₂ − iλ₁p₁/ħ. Same family of states, labelled through
    /// a linear phase-space map with unit |Jacobian|.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonSepParams {
    pub modes: TwoModeParams,
    pub phi: f64,
    #[serde(default)]
    pub convention: LinearConvention,
}

impl NonSepParams {
    pub fn new(modes: TwoModeParams, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::InvalidParameter("mixing angle must be finite".into()));
        }
        Ok(NonSepParams { modes, phi, convention: LinearConvention::Physical })
    }

    pub fn from_taus(tau: [C64; 2], lambda: [f64; 2], hbar: f64, phi: f64) -> Result<Self> {
        Self::new(TwoModeParams::from_taus(tau, lambda, hbar)?, phi)
    }

    pub fn with_convention(mut self, convention: LinearConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn hbar(&self) -> f64 {
        self.modes.hbar()
    }

    pub fn lambda(&self, j: usize) -> f64 {
        self.modes.lambda(j)
    }

    pub fn tau(&self, j: usize) -> C64 {
        self.modes.tau(j)
    }

    /// (Δ₁, Δ₂, ℓ).
    pub fn bilinear(&self) -> (C64, C64, C64) {
        bilinear_coefficients(self.tau(0), self.tau(1), self.phi)
    }

    fn b_matrix(&self) -> Matrix2<C64> {
        let (d1, d2, l) = self.bilinear();
        Matrix2::new(d1, 0.5 * l, 0.5 * l, d2)
    }

    fn sign(&self) -> f64 {
        match self.convention {
            LinearConvention::Physical => 1.0,
            LinearConvention::AsPrinted => -1.0,
        }
    }

    fn scale(&self, point: PhasePoint) -> (Vector2<f64>, Vector2<f64>) {
        let (l1, l2, h) = (self.lambda(0), self.lambda(1), self.hbar());
        (Vector2::new(point.q1 / l1, point.q2 / l2), Vector2::new(l1 * point.p1 / h, l2 * point.p2 / h))
    }

    fn unscale(&self, q: Vector2<f64>, k: Vector2<f64>) -> PhasePoint {
        let (l1, l2, h) = (self.lambda(0), self.lambda(1), self.hbar());
        PhasePoint::new(l1 * q[0], l2 * q[1], h * k[0] / l1, h * k[1] / l2)
    }

    /// Linear coefficients (ℓ₁, ℓ₂) in scaled units.
    fn linear(&self, point: PhasePoint) -> Vector2<C64> {
        let (q, k) = self.scale(point);
        let v = self.b_matrix() * q.map(rc) * rc(2.0) + k.map(|x| C64::new(0.0, x));
        Vector2::new(self.sign() * v[0], v[1])
    }

    /// A = 2 Re B.
    fn a_real(&self) -> Matrix2<f64> {
        self.b_matrix().map(|z| 2.0 * z.re)
    }

    /// Position part K of the label map: ⟨u⟩ = K q̃ (scaled units).
    fn k_matrix(&self) -> Matrix2<f64> {
        let a = self.a_real();
        let s = Matrix2::new(self.sign(), 0.0, 0.0, 1.0);
        a.try_inverse().expect("Re B is positive definite") * s * a
    }

    /// Expectation values (⟨x̂₁⟩, ⟨x̂₂⟩, ⟨p̂₁⟩, ⟨p̂₂⟩) of the state labelled by `point`.
    pub fn physical_label(&self, point: PhasePoint) -> PhasePoint {
        let l = self.linear(point);
        let a = self.a_real();
        let im_b = self.b_matrix().map(|z| z.im);
        let u = a.try_inverse().expect("Re B is positive definite") * l.map(|z| z.re);
        let k = l.map(|z| z.im) - im_b * u * 2.0;
        self.unscale(u, k)
    }

    /// Inverse of [`NonSepParams::physical_label`].
    pub fn label_from_physical(&self, phys: PhasePoint) -> PhasePoint {
        let (u, kp) = self.scale(phys);
        let s = Matrix2::new(self.sign(), 0.0, 0.0, 1.0);
        let im_b = self.b_matrix().map(|z| z.im);
        let q = self.k_matrix().try_inverse().expect("K is invertible") * u;
        let k = s * (kp + im_b * u * 2.0) - im_b * q * 2.0;
        self.unscale(q, k)
    }

    /// Scaled fiducial covariances (V_xx, V_pp, C_xp) with C_xp[a][b] = cov(u_a, k_b).
    fn scaled_covariance(&self) -> (Matrix2<f64>, Matrix2<f64>, Matrix2<f64>) {
        let b = self.b_matrix();
        let re = b.map(|z| z.re);
        let im = b.map(|z| z.im);
        let vxx = re.try_inverse().expect("Re B is positive definite") * 0.25;
        let vpp = re + im * vxx * im * 4.0;
        let cxp = vxx * im * -2.0;
        (vxx, vpp, cxp)
    }

    /// Symmetrised covariance of (x̂₁, x̂₂, p̂₁, p̂₂) in the fiducial state.
    pub fn fiducial_covariance(&self) -> Matrix4<f64> {
        let (vxx, vpp, cxp) = self.scaled_covariance();
        let lam = [self.lambda(0), self.lambda(1)];
        let h = self.hbar();
        let mut m = Matrix4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                m[(a, b)] = lam[a] * lam[b] * vxx[(a, b)];
                m[(a + 2, b + 2)] = h * h / (lam[a] * lam[b]) * vpp[(a, b)];
                m[(a, b + 2)] = lam[a] * h / lam[b] * cxp[(a, b)];
                m[(b + 2, a)] = m[(a, b + 2)];
            }
        }
        m
    }
}

/// Δ₁, Δ₂, ℓ as functions of the squeezing and mixing parameters.
pub fn bilinear_coefficients(tau1: C64, tau2: C64, phi: f64) -> (C64, C64, C64) {
    let one = rc(1.0);
    let den = (one - tau1) * (one - tau2);
    let (s2, c2) = (2.0 * phi).sin_cos();
    let d1 = (one - tau1 * tau2 - c2 * (tau2 - tau1)) / (2.0 * den);
    let d2 = (one - tau1 * tau2 + c2 * (tau2 - tau1)) / (2.0 * den);
    let ell = s2 * (tau2 - tau1) / den;
    (d1, d2, ell)
}

/// All coefficient groups of the non-separable family at one phase-space point.
/// θ, Ξ, L and 𝔠 are the published overlap/portrait coefficients, kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonSepCoefficients {
    pub delta1: C64,
    pub delta2: C64,
    pub ell: C64,
    pub ell1: C64,
    pub ell2: C64,
    /// 16 ReΔ₁ ReΔ₂ − 4 Reℓ².
    pub delta: f64,
    /// The factored product form, which disagrees with `delta`.
    pub delta_factored: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta12: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub xi12: f64,
    pub l11: f64,
    pub l12: f64,
    pub l21: f64,
    pub l22: f64,
    pub c1: f64,
    pub c2: f64,
    pub c12: f64,
}

impl NonSepCoefficients {
    /// M̃ acting on R = (dq₁/λ₁, λ₁dp₁/ħ, dq₂/λ₂, λ₂dp₂/ħ).
    pub fn printed_overlap_matrix(&self) -> Matrix4<f64> {
        Matrix4::new(
            self.theta1,
            0.5 * self.l11,
            0.5 * self.theta12,
            0.5 * self.l12,
            0.5 * self.l11,
            self.xi1,
            0.5 * self.l21,
            0.5 * self.xi12,
            0.5 * self.theta12,
            0.5 * self.l21,
            self.theta2,
            0.5 * self.l22,
            0.5 * self.l12,
            0.5 * self.xi12,
            0.5 * self.l22,
            self.xi2,
        )
    }
}

pub fn nonsep_coefficients(params: &NonSepParams, point: PhasePoint) -> Result<NonSepCoefficients> {
    let (d1, d2, l) = params.bilinear();
    let lin = params.linear(point);
    let (r1, r2, rl) = (d1.re, d2.re, l.re);
    let (i1, i2, il) = (d1.im, d2.im, l.im);
    let delta = 16.0 * r1 * r2 - 4.0 * rl * rl;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::DegenerateSqueezing(params.tau(0).norm().max(params.tau(1).norm())));
    }
    let factored = {
        let (t1, t2) = (params.tau(0), params.tau(1));
        let num = (1.0 - t1.norm_sqr())
            * (1.0 - t2.norm_sqr())
            * (1.0 + t1.norm_sqr() - 2.0 * t1.re)
            * (1.0 + t2.norm_sqr() - 2.0 * t2.re);
        num / ((rc(1.0) - t1).norm_sqr() * (rc(1.0) - t2).norm_sqr())
    };
    let theta1 = 4.0 * r1 * l.norm_sqr() + 16.0 * r2 * d1.norm_sqr() + 8.0 * rl * (d1 * l.conj()).re;
    let theta2 = 16.0 * r1 * d2.norm_sqr() + 4.0 * r2 * l.norm_sqr() + 8.0 * rl * (d2 * l.conj()).re;
    let theta12 = 16.0 * r1 * (l * d2).re + 4.0 * r2 * l.norm_sqr() - 8.0 * rl * (d2 * l.conj()).re;
    let (xi1, xi2, xi12) = (4.0 * r2, 4.0 * r1, 4.0 * rl);
    let l11 = -16.0 * i1 * r2 - 4.0 * il * rl;
    let l12 = -8.0 * il * r1 - 8.0 * i1 * rl;
    let l21 = 8.0 * il * r2 + 8.0 * i2 * rl;
    let l22 = -16.0 * i2 * r1 - 4.0 * il * rl;
    let c1 = theta1 - (xi1 * l12 * l12 + xi2 * l11 * l11 + xi12 * l11 * l12) / (4.0 * delta);
    let c2 = theta2 - (xi1 * l22 * l22 + xi2 * l21 * l21 + xi12 * l21 * l22) / (4.0 * delta);
    let c12 = theta12 + (2.0 * xi1 * l12 * l22 + 2.0 * xi2 * l11 * l21 + xi12 * (l11 * l22 + l12 * l21)) / (4.0 * delta);
    Ok(NonSepCoefficients {
        delta1: d1,
        delta2: d2,
        ell: l,
        ell1: lin[0],
        ell2: lin[1],
        delta,
        delta_factored: factored,
        theta1,
        theta2,
        theta12,
        xi1,
        xi2,
        xi12,
        l11,
        l12,
        l21,
        l22,
        c1,
        c2,
        c12,
    })
}

/// αⱼ = qⱼ/(√2λⱼ) + iλⱼpⱼ/(√2ħ).
pub fn plain_alpha(point: PhasePoint, params: &NonSepParams) -> [C64; 2] {
    let (q, k) = params.scale(point);
    [C64::new(q[0], k[0]) / SQRT_2, C64::new(q[1], k[1]) / SQRT_2]
}

/// (ℓ₁, ℓ₂) written through the complex displacements α₁, α₂.
pub fn linear_from_alpha(params: &NonSepParams, alpha: [C64; 2]) -> [C64; 2] {
    let (t1, t2) = (params.tau(0), params.tau(1));
    let one = rc(1.0);
    let den = (one - t1) * (one - t2);
    let (s2, c2) = (2.0 * params.phi).sin_cos();
    let (a1, a2) = (alpha[0], alpha[1]);
    let l1 = ((-((t1 - t2) * c2 - t1 * t2 + one) * a1.re + (t1 - t2) * s2 * a2.re) / den - C64::new(0.0, a1.im)) * SQRT_2;
    let l2 = ((-(t1 - t2) * s2 * a1.re - ((t1 - t2) * c2 + t1 * t2 - one) * a2.re) / den + C64::new(0.0, a2.im)) * SQRT_2;
    [-params.sign() * l1, l2]
}

/// ψ(x) = exp(−xᵀAx + bᵀx + c) on ℝ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub a: Matrix2<C64>,
    pub b: Vector2<C64>,
    pub c: C64,
}

impl GaussianState {
    pub fn eval(&self, x: [f64; 2]) -> C64 {
        let v = Vector2::new(rc(x[0]), rc(x[1]));
        (-(v.transpose() * self.a * v)[(0, 0)] + (self.b.transpose() * v)[(0, 0)] + self.c).exp()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &GaussianState) -> Result<C64> {
        integrate_gaussian_quadratic(&(self.a.conjugate() + other.a), &(self.b.conjugate() + other.b), self.c.conj() + other.c)
    }

    /// Quadratic form of |ψ|².
    fn density(&self) -> GaussianState {
        GaussianState { a: self.a.map(|z| rc(2.0 * z.re)), b: self.b.map(|z| rc(2.0 * z.re)), c: rc(2.0 * self.c.re) }
    }
}

/// ln 𝒩 from the closed-form normalisation.
pub fn log_normalisation(coeffs: &NonSepCoefficients, params: &NonSepParams) -> f64 {
    let (l1, l2) = (params.lambda(0), params.lambda(1));
    let d = coeffs.delta;
    let (r1, r2) = (coeffs.ell1.re, coeffs.ell2.re);
    0.25 * (d / (4.0 * PI * PI * l1 * l1 * l2 * l2)).ln()
        + 4.0 / d * (coeffs.ell.re * r1 * r2 - r2 * r2 * coeffs.delta1.re - r1 * r1 * coeffs.delta2.re)
}

pub fn nonsep_state(params: &NonSepParams, point: PhasePoint) -> Result<GaussianState> {
    let co = nonsep_coefficients(params, point)?;
    let (l1, l2) = (params.lambda(0), params.lambda(1));
    let a = Matrix2::new(co.delta1 / (l1 * l1), 0.5 * co.ell / (l1 * l2), 0.5 * co.ell / (l1 * l2), co.delta2 / (l2 * l2));
    let b = Vector2::new(co.ell1 / l1, co.ell2 / l2);
    Ok(GaussianState { a, b, c: rc(log_normalisation(&co, params)) })
}

/// ψ(q⃗,p⃗;ξ⃗,φ;x⃗) with the closed-form normalisation. At φ = 0 it agrees with the
/// separable wavefunction up to an x-independent phase.
pub fn nonsep_wavefunction(params: &NonSepParams, point: PhasePoint, x: [f64; 2]) -> Result<C64> {
    Ok(nonsep_state(params, point)?.eval(x))
}

fn position_boxes(params: &NonSepParams, centre: [f64; 2], cov: &Matrix2<f64>, degree: u32, breaks: [Vec<f64>; 2]) -> [Vec<f64>; 2] {
    let _ = params;
    let [b0, b1] = breaks;
    [
        box_breaks(centre[0], box_half(cov[(0, 0)].sqrt(), degree), &b0),
        box_breaks(centre[1], box_half(cov[(1, 1)].sqrt(), degree), &b1),
    ]
}

/// ∫|ψ|² d²x by adaptive quadrature.
pub fn norm_quadrature(params: &NonSepParams, point: PhasePoint, tol: f64) -> Result<f64> {
    let st = nonsep_state(params, point)?;
    let mean = params.physical_label(point);
    let cov = params.fiducial_covariance().fixed_view::<2, 2>(0, 0).into_owned();
    let [bx, by] = position_boxes(params, mean.q(), &cov, 0, [Vec::new(), Vec::new()]);
    let r = integrate_2d_vec(1, |x, y, o: &mut [f64]| o[0] = st.eval([x, y]).norm_sqr(), &bx, &by, AdaptiveOptions::with_tol(tol, tol))?;
    Ok(r.value[0])
}

const FD8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Relative residuals of (G aⱼ G†)ψ = 0, j = 1, 2, at x, with ∂ψ by eighth-order
/// central differences on the wavefunction.
pub fn eigen_residual(params: &NonSepParams, point: PhasePoint, x: [f64; 2]) -> Result<[f64; 2]> {
    let st = nonsep_state(params, point)?;
    let lam = [params.lambda(0), params.lambda(1)];
    let u = [x[0] / lam[0], x[1] / lam[1]];
    let psi_u = |v: [f64; 2]| st.eval([v[0] * lam[0], v[1] * lam[1]]);
    let h = 1e-2;
    let mut grad = [C64::new(0.0, 0.0); 2];
    for (j, g) in grad.iter_mut().enumerate() {
        for (k, w) in FD8.iter().enumerate() {
            let s = (k + 1) as f64 * h;
            let mut up = u;
            let mut dn = u;
            up[j] += s;
            dn[j] -= s;
            *g += (psi_u(up) - psi_u(dn)) * *w;
        }
        *g /= h;
    }
    let psi = psi_u(u);
    let alpha = plain_alpha(params.physical_label(point), params);
    // shifted ladder actions (aⱼ − αⱼ)ψ and (aⱼ† − αⱼ*)ψ
    let lower: Vec<C64> = (0..2).map(|j| (u[j] * psi + grad[j]) / SQRT_2 - alpha[j] * psi).collect();
    let upper: Vec<C64> = (0..2).map(|j| (u[j] * psi - grad[j]) / SQRT_2 - alpha[j].conj() * psi).collect();
    let scale: Vec<f64> = (0..2)
        .map(|j| ((u[j] * psi).norm() + grad[j].norm()) / SQRT_2 + alpha[j].norm() * psi.norm())
        .collect();
    let (s, c) = params.phi.sin_cos();
    let ch = |j: usize| 1.0 / (1.0 - params.tau(j).norm_sqr()).sqrt();
    let (t1, t2) = (params.tau(0), params.tau(1));
    let r1 = ch(0) * (c * lower[0] - s * lower[1] + t1 * (c * upper[0] - s * upper[1]));
    let r2 = ch(1) * (c * lower[1] + s * lower[0] + t2 * (c * upper[1] + s * upper[0]));
    let n1 = ch(0) * (1.0 + t1.norm()) * (c.abs() * scale[0] + s.abs() * scale[1]);
    let n2 = ch(1) * (1.0 + t2.norm()) * (c.abs() * scale[1] + s.abs() * scale[0]);
    Ok([r1.norm() / n1, r2.norm() / n2])
}

/// U_BS(φ) on a per-mode truncation `dim`, stored blockwise by total photon number.
struct BeamSplitter {
    dim: usize,
    blocks: Vec<(usize, usize, DMatrix<C64>)>,
}

impl BeamSplitter {
    fn new(phi: f64, dim: usize) -> Self {
        let mut blocks = Vec::new();
        for n in 0..(2 * dim - 1) {
            let lo = n.saturating_sub(dim - 1);
            let hi = n.min(dim - 1);
            let size = hi - lo + 1;
            let mut g = DMatrix::<C64>::zeros(size, size);
            for t in 0..size - 1 {
                let (i, k) = (lo + t, n - lo - t);
                let v = phi * (((i + 1) * k) as f64).sqrt();
                g[(t + 1, t)] = rc(v);
                g[(t, t + 1)] = rc(-v);
            }
            blocks.push((n, lo, expm(&g)));
        }
        BeamSplitter { dim, blocks }
    }

    /// Acts on a two-mode vector stored as c[(n₁, n₂)].
    fn apply(&self, c: &mut DMatrix<C64>, adjoint: bool) {
        for (n, lo, u) in &self.blocks {
            let size = u.nrows();
            let v = nalgebra::DVector::from_fn(size, |t, _| c[(lo + t, n - lo - t)]);
            let w = if adjoint { u.adjoint() * v } else { u * v };
            for t in 0..size {
                c[(lo + t, n - lo - t)] = w[t];
            }
        }
        debug_assert_eq!(c.nrows(), self.dim);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovReport {
    pub dim: usize,
    pub block: usize,
    /// max |aⱼG − G Rⱼ| on the interior block, Rⱼ the right-hand side of G†aⱼG.
    pub intertwining: [f64; 2],
    /// max |G†aⱼG − Rⱼ| on the interior block.
    pub conjugated: [f64; 2],
}

impl BogoliubovReport {
    pub fn residual(&self) -> f64 {
        self.intertwining[0].max(self.intertwining[1])
    }
}

fn padded_one_mode(xi: C64, alpha: C64, dim: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let big = 2 * dim;
    let a = TruncatedOperator::annihilation(big).into_matrix();
    let ad = a.adjoint();
    let s = expm(&(&ad * &ad * (-0.5 * xi) + &a * &a * (0.5 * xi.conj())));
    let d = expm(&(&ad * alpha - &a * alpha.conj()));
    (s.view((0, 0), (dim, dim)).into_owned(), d.view((0, 0), (dim, dim)).into_owned())
}

/// Truncated-matrix check of G†aⱼG = αⱼ + Bogoliubov-mixed ladder operators.
pub fn bogoliubov_check(params: &NonSepParams, alpha: [C64; 2], dim: usize) -> Result<BogoliubovReport> {
    if dim < 8 {
        return Err(Error::TruncationTooSmall { dim, needed: 8 });
    }
    let block = dim / 4;
    let xi = [params.modes.modes[0].xi(), params.modes.modes[1].xi()];
    let (s1, d1) = padded_one_mode(xi[0], alpha[0], dim);
    let (s2, d2) = padded_one_mode(xi[1], alpha[1], dim);
    let bs = BeamSplitter::new(params.phi, dim);
    let a = TruncatedOperator::annihilation(dim).into_matrix();
    let at = a.transpose();
    let g_col = |i: usize, j: usize| {
        let mut c = s1.column(i) * s2.column(j).transpose();
        bs.apply(&mut c, false);
        &d1 * c * d2.transpose()
    };
    let g_adj = |c: &DMatrix<C64>| {
        let mut m = d1.adjoint() * c * d2.map(|z| z.conj());
        bs.apply(&mut m, true);
        s1.adjoint() * m * s2.map(|z| z.conj())
    };
    let cols: Vec<Vec<DMatrix<C64>>> = (0..=block).map(|i| (0..=block).map(|j| g_col(i, j)).collect()).collect();
    let (sp, cp) = params.phi.sin_cos();
    let ch = [xi[0].norm().cosh(), xi[1].norm().cosh()];
    let esh = |j: usize| if xi[j].norm() == 0.0 { rc(0.0) } else { xi[j] / xi[j].norm() * xi[j].norm().sinh() };
    let esh = [esh(0), esh(1)];
    // Rⱼ = αⱼ + Σₖ w[j][k] (ch_k a_k − esh_k a_k†)
    let w = [[cp, sp], [-sp, cp]];
    let mut inter = [0.0f64; 2];
    let mut conj = [0.0f64; 2];
    for i in 0..block {
        for j in 0..block {
            let g = &cols[i][j];
            for mode in 0..2 {
                let lhs = if mode == 0 { &a * g } else { g * &at };
                // G Rⱼ e_{ij}
                let mut rhs = g * alpha[mode];
                let mut r_basis = DMatrix::<C64>::zeros(dim, dim);
                r_basis[(i, j)] = alpha[mode];
                for k in 0..2 {
                    let wk = w[mode][k];
                    let (idx, nidx) = if k == 0 { (i, j) } else { (j, i) };
                    let pick = |m: usize| if k == 0 { (m, nidx) } else { (nidx, m) };
                    if idx > 0 {
                        let (pi, pj) = pick(idx - 1);
                        let f = wk * ch[k] * (idx as f64).sqrt();
                        rhs += &cols[pi][pj] * rc(f);
                        r_basis[(pi, pj)] += rc(f);
                    }
                    let (pi, pj) = pick(idx + 1);
                    let f = -wk * esh[k] * ((idx + 1) as f64).sqrt();
                    rhs += &cols[pi][pj] * f;
                    r_basis[(pi, pj)] += f;
                }
                let back = g_adj(&lhs);
                for m1 in 0..block {
                    for m2 in 0..block {
                        inter[mode] = inter[mode].max((lhs[(m1, m2)] - rhs[(m1, m2)]).norm());
                        conj[mode] = conj[mode].max((back[(m1, m2)] - r_basis[(m1, m2)]).norm());
                    }
                }
            }
        }
    }
    Ok(BogoliubovReport { dim, block, intertwining: inter, conjugated: conj })
}

/// Oracle: |⟨ψ_a|ψ_b⟩|² by exact Gaussian integration of the wavefunctions.
pub fn nonsep_overlap_sq(a: PhasePoint, b: PhasePoint, params: &NonSepParams) -> Result<f64> {
    let sa = nonsep_state(params, a)?;
    let sb = nonsep_state(params, b)?;
    Ok(sa.inner(&sb)?.norm_sqr())
}

/// Closed form exp(−Var) built from the fiducial covariances.
pub fn nonsep_overlap_sq_closed(a: PhasePoint, b: PhasePoint, params: &NonSepParams) -> f64 {
    let (qa, ka) = params.scale(params.physical_label(a));
    let (qb, kb) = params.scale(params.physical_label(b));
    let (dq, dk) = (qa - qb, ka - kb);
    let (vxx, vpp, cxp) = params.scaled_covariance();
    let var = (dk.transpose() * vxx * dk)[(0, 0)] + (dq.transpose() * vpp * dq)[(0, 0)] - 2.0 * (dk.transpose() * cxp * dq)[(0, 0)];
    (-var).exp()
}

/// exp(RᵀM̃R/Δ) with the published coefficients.
pub fn nonsep_overlap_sq_printed(a: PhasePoint, b: PhasePoint, params: &NonSepParams) -> Result<f64> {
    let co = nonsep_coefficients(params, a)?;
    let (l1, l2, h) = (params.lambda(0), params.lambda(1), params.hbar());
    let r = Vector4::new((a.q1 - b.q1) / l1, l1 * (a.p1 - b.p1) / h, (a.q2 - b.q2) / l2, l2 * (a.p2 - b.p2) / h);
    Ok(((r.transpose() * co.printed_overlap_matrix() * r)[(0, 0)] / co.delta).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub oracle: f64,
    pub closed_form: f64,
    pub printed: f64,
}

impl OverlapReport {
    pub fn closed_deviation(&self) -> f64 {
        (self.closed_form - self.oracle).abs()
    }

    pub fn printed_deviation(&self) -> f64 {
        (self.printed - self.oracle).abs()
    }
}

pub fn overlap_report(a: PhasePoint, b: PhasePoint, params: &NonSepParams) -> Result<OverlapReport> {
    Ok(OverlapReport {
        oracle: nonsep_overlap_sq(a, b, params)?,
        closed_form: nonsep_overlap_sq_closed(a, b, params),
        printed: nonsep_overlap_sq_printed(a, b, params)?,
    })
}

/// Position kernel of the portrait: w(d) = norm·exp(−dᵀ m d), d = q − q'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortraitKernel {
    pub m: Matrix2<f64>,
    pub norm: f64,
}

impl PortraitKernel {
    fn covariance(&self) -> Option<Matrix2<f64>> {
        if self.m[(0, 0)] > 0.0 && self.m.determinant() > 0.0 {
            (self.m * 2.0).try_inverse()
        } else {
            None
        }
    }

    pub fn eval(&self, d: [f64; 2]) -> f64 {
        let q = self.m[(0, 0)] * d[0] * d[0] + (self.m[(0, 1)] + self.m[(1, 0)]) * d[0] * d[1] + self.m[(1, 1)] * d[1] * d[1];
        self.norm * (-q).exp()
    }
}

/// Kernel of the position portrait (correlated Gaussian with covariance (2 Re B)⁻¹
/// in scaled units, pulled back through the label map).
pub fn portrait_kernel(params: &NonSepParams) -> PortraitKernel {
    let k = params.k_matrix();
    let mu = k.transpose() * params.a_real() * k * 0.5;
    let lam = [params.lambda(0), params.lambda(1)];
    let m = Matrix2::from_fn(|a, b| mu[(a, b)] / (lam[a] * lam[b]));
    PortraitKernel { m, norm: m.determinant().sqrt() / PI }
}

/// Kernel built from the published 𝔠 coefficients and prefactor.
pub fn printed_portrait_kernel(params: &NonSepParams) -> Result<PortraitKernel> {
    let co = nonsep_coefficients(params, PhasePoint::default())?;
    let (l1, l2) = (params.lambda(0), params.lambda(1));
    let d = co.delta;
    let m = Matrix2::new(co.c1 / (l1 * l1 * d), -0.5 * co.c12 / (l1 * l2), -0.5 * co.c12 / (l1 * l2), co.c2 / (l2 * l2 * d));
    Ok(PortraitKernel { m, norm: 1.0 / (8.0 * PI * d.sqrt()) })
}

fn kernel_average(h: &dyn Field2, centre: [f64; 2], kernel: &PortraitKernel, tol: f64) -> Result<f64> {
    let cov = kernel.covariance().ok_or(Error::NonConvergent)?;
    let deg = h.growth().degree();
    let bx = box_breaks(centre[0], box_half(cov[(0, 0)].sqrt(), deg), &h.breakpoints(0));
    let by = box_breaks(centre[1], box_half(cov[(1, 1)].sqrt(), deg), &h.breakpoints(1));
    let r = integrate_2d_vec(
        1,
        |x, y, o: &mut [f64]| {
            let w = kernel.eval([centre[0] - x, centre[1] - y]);
            o[0] = if w == 0.0 { 0.0 } else { w * h.value([x, y]) };
        },
        &bx,
        &by,
        AdaptiveOptions::with_tol(tol, tol),
    )?;
    Ok(r.value[0])
}

/// Ǎ_h(q⃗) for the non-separable family.
pub fn nonsep_portrait_hq(h: &dyn Field2, point: PhasePoint, params: &NonSepParams) -> Result<f64> {
    kernel_average(h, point.q(), &portrait_kernel(params), 1e-11)
}

/// Same portrait with the published 𝔠 kernel; `NonConvergent` if that kernel does not decay.
pub fn nonsep_portrait_hq_printed(h: &dyn Field2, point: PhasePoint, params: &NonSepParams) -> Result<f64> {
    kernel_average(h, point.q(), &printed_portrait_kernel(params)?, 1e-11)
}

/// Oracle portrait. The momentum integral of |⟨q',p'|q,p⟩|² is done exactly by
/// Parseval (p' only enters ψ through e^{±ip'x/ħ}), leaving
/// ∫d²q' h(q') ∫d²x |ψ_{q',0}(x)|²|ψ_{q,p}(x)|², with the x-integral done by exact
/// Gaussian integration of the wavefunctions and the q'-integral adaptively.
pub fn nonsep_portrait_oracle(h: &dyn Field2, point: PhasePoint, params: &NonSepParams, tol: f64) -> Result<f64> {
    let target = nonsep_state(params, point)?.density();
    let cov = portrait_kernel(params).covariance().ok_or(Error::NonConvergent)?;
    let deg = h.growth().degree();
    let bx = box_breaks(point.q1, 1.25 * box_half(cov[(0, 0)].sqrt(), deg), &h.breakpoints(0));
    let by = box_breaks(point.q2, 1.25 * box_half(cov[(1, 1)].sqrt(), deg), &h.breakpoints(1));
    let failure = RefCell::new(None);
    let r = integrate_2d_vec(
        1,
        |x, y, o: &mut [f64]| {
            o[0] = 0.0;
            let hv = h.value([x, y]);
            if hv == 0.0 {
                return;
            }
            let res = nonsep_state(params, PhasePoint::new(x, y, 0.0, 0.0)).and_then(|s| {
                let d = s.density();
                integrate_gaussian_quadratic(&(d.a + target.a), &(d.b + target.b), d.c + target.c)
            });
            match res {
                Ok(v) => o[0] = hv * v.re,
                Err(e) => *failure.borrow_mut() = Some(e),
            }
        },
        &bx,
        &by,
        AdaptiveOptions::with_tol(tol, tol),
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r.value[0])
}

/// Smallest fiducial truncation whose total-photon tail is below 1e-20.
fn fiducial_dimension(params: &NonSepParams, nmax: usize) -> Result<usize> {
    const CAP: usize = 320;
    let probs: Vec<Vec<f64>> =
        (0..2).map(|j| fock_coefficients_tau(rc(0.0), params.tau(j), CAP - 1).iter().map(|z| z.norm_sqr()).collect()).collect();
    if probs.iter().any(|p| p[CAP - 2] + p[CAP - 1] > 1e-40) {
        return Err(Error::TruncationTooSmall { dim: CAP, needed: CAP + 1 });
    }
    let mut total = vec![0.0; 2 * CAP];
    for (i, p1) in probs[0].iter().enumerate() {
        for (j, p2) in probs[1].iter().enumerate() {
            total[i + j] += p1 * p2;
        }
    }
    let mut tail = 0.0;
    let mut k = 2 * CAP;
    while k > 0 && tail + total[k - 1] < 1e-20 {
        tail += total[k - 1];
        k -= 1;
    }
    Ok(k.max(nmax + 2))
}

/// Fock-basis representation of the family for quantising position/momentum
/// functions by 4D Gauss–Hermite quadrature.
///
/// ⟨n₁n₂|G|00⟩ = Σ ⟨n₁|D(α₁)|k₁⟩⟨n₂|D(α₂)|k₂⟩ F_{k₁k₂} with F = U_BS S₁S₂|00⟩. The
/// product of two such amplitudes is a polynomial times the Husimi Gaussian of F,
/// whose covariance is Σ_F + ½ in scaled units, so a tensor rule adapted to it is exact.
pub struct TwoModeFockFamily {
    params: NonSepParams,
    nmax: usize,
    fiducial: DMatrix<C64>,
    chol: Matrix4<f64>,
}

fn displacement_rows(alpha: C64, nb: usize, kdim: usize) -> DMatrix<C64> {
    let mut d = DMatrix::<C64>::zeros(nb, kdim);
    let mut v = (-0.5 * alpha.norm_sqr()).exp();
    for n in 0..nb {
        d[(n, 0)] = alpha.powu(n as u32) * v;
        v /= ((n + 1) as f64).sqrt();
    }
    for k in 0..kdim - 1 {
        let sk = ((k + 1) as f64).sqrt();
        for n in (0..nb).rev() {
            let up = if n > 0 { d[(n - 1, k)] * (n as f64).sqrt() } else { rc(0.0) };
            d[(n, k + 1)] = (up - alpha.conj() * d[(n, k)]) / sk;
        }
    }
    d
}

impl TwoModeFockFamily {
    pub fn new(params: NonSepParams, nmax: usize) -> Result<Self> {
        let kdim = fiducial_dimension(&params, nmax)?;
        let v: Vec<Vec<C64>> = (0..2).map(|j| fock_coefficients_tau(rc(0.0), params.tau(j), kdim - 1)).collect();
        let mut f = DMatrix::from_fn(kdim, kdim, |i, j| v[0][i] * v[1][j]);
        BeamSplitter::new(params.phi, kdim).apply(&mut f, false);
        let (vxx, vpp, cxp) = params.scaled_covariance();
        let mut sq = Matrix4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                sq[(a, b)] = vxx[(a, b)] + if a == b { 0.5 } else { 0.0 };
                sq[(a + 2, b + 2)] = vpp[(a, b)] + if a == b { 0.5 } else { 0.0 };
                sq[(a, b + 2)] = cxp[(a, b)];
                sq[(b + 2, a)] = cxp[(a, b)];
            }
        }
        let chol = sq.cholesky().ok_or(Error::NonConvergent)?.l();
        Ok(TwoModeFockFamily { params, nmax, fiducial: f, chol })
    }

    pub fn params(&self) -> &NonSepParams {
        &self.params
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn fiducial_dimension(&self) -> usize {
        self.fiducial.nrows()
    }

    /// ⟨n₁n₂|D(α₁)D(α₂)F⟩ for nⱼ ≤ nmax, flattened as n₁(nmax+1) + n₂.
    pub fn amplitudes(&self, alpha: [C64; 2]) -> Vec<C64> {
        let nb = self.nmax + 1;
        let k = self.fiducial.nrows();
        let r1 = displacement_rows(alpha[0], nb, k);
        let r2 = displacement_rows(alpha[1], nb, k);
        let c = r1 * (&self.fiducial * r2.transpose());
        (0..nb * nb).map(|i| c[(i / nb, i % nb)]).collect()
    }

    /// Â_f = ∫ d²q d²p/(2πħ)² f |q⃗,p⃗⟩⟨q⃗,p⃗| on the (nmax+1)² block. Exact for
    /// polynomial f of total degree ≤ `degree`; f receives the family's labels.
    pub fn quantise(&self, f: &(dyn Fn(PhasePoint) -> f64 + Sync), degree: u32) -> TruncatedOperator {
        let nb = self.nmax + 1;
        let dim = nb * nb;
        let n = (4 * self.nmax + degree as usize) / 2 + 2;
        let rule = QuadratureRule::gauss_hermite(n);
        let det_l = self.chol.determinant();
        let idx: Vec<usize> = (0..n.pow(4)).collect();
        let partials: Vec<DMatrix<C64>> = idx
            .par_chunks(512)
            .map(|chunk| {
                let mut acc = DMatrix::<C64>::zeros(dim, dim);
                for &id in chunk {
                    let ix = [id % n, (id / n) % n, (id / n / n) % n, id / n / n / n];
                    let x = Vector4::from_fn(|a, _| rule.nodes[ix[a]]);
                    let w: f64 = ix.iter().map(|&i| rule.weights[i]).product::<f64>() * x.norm_squared().exp() * det_l / (PI * PI);
                    let z = self.chol * x * SQRT_2;
                    let phys = self.params.unscale(Vector2::new(z[0], z[1]), Vector2::new(z[2], z[3]));
                    let fv = f(self.params.label_from_physical(phys)) * w;
                    if fv == 0.0 {
                        continue;
                    }
                    let alpha = [C64::new(z[0], z[2]) / SQRT_2, C64::new(z[1], z[3]) / SQRT_2];
                    let c = self.amplitudes(alpha);
                    for i in 0..dim {
                        let ci = c[i] * fv;
                        for j in 0..dim {
                            acc[(i, j)] += ci * c[j].conj();
                        }
                    }
                }
                acc
            })
            .collect();
        let mut total = DMatrix::<C64>::zeros(dim, dim);
        for p in partials {
            total += p;
        }
        TruncatedOperator::from_matrix(total)
    }

    pub fn identity_report(&self) -> IdentityMeasureReport {
        let m = self.quantise(&|_| 1.0, 0);
        let id = TruncatedOperator::identity(m.dim());
        let h2 = (2.0 * PI * self.params.hbar()).powi(2);
        IdentityMeasureReport {
            deviation_2pi_hbar_sq: m.block_deviation(&id, m.dim()),
            deviation_2pi_hbar_4: m.scale(rc(1.0 / h2)).block_deviation(&id, m.dim()),
        }
    }

    pub fn linear_row(&self, function: RowFunction, tol: f64) -> QuantisedRow {
        let f: Box<dyn Fn(PhasePoint) -> f64 + Sync> = match function {
            RowFunction::One => Box::new(|_| 1.0),
            RowFunction::Q1 => Box::new(|p: PhasePoint| p.q1),
            RowFunction::Q2 => Box::new(|p: PhasePoint| p.q2),
            RowFunction::Q1Q2 => Box::new(|p: PhasePoint| p.q1 * p.q2),
        };
        let degree = match function {
            RowFunction::One => 0,
            RowFunction::Q1 | RowFunction::Q2 => 1,
            RowFunction::Q1Q2 => 2,
        };
        let oracle = self.quantise(f.as_ref(), degree);
        let printed = row_printed(&self.params, function, self.nmax);
        let derived = row_derived(&self.params, function, self.nmax);
        let dim = oracle.dim();
        let printed_deviation = oracle.block_deviation(&printed, dim);
        let derived_deviation = oracle.block_deviation(&derived, dim);
        QuantisedRow { function, oracle, printed, derived, printed_deviation, derived_deviation, erratum: printed_deviation > tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityMeasureReport {
    /// max |Â₁ − I| with measure d²q d²p/(2πħ)².
    pub deviation_2pi_hbar_sq: f64,
    /// Same with d²q d²p/(2πħ)⁴.
    pub deviation_2pi_hbar_4: f64,
}

pub fn verify_two_mode_identity(params: &NonSepParams, nmax: usize) -> Result<IdentityMeasureReport> {
    Ok(TwoModeFockFamily::new(*params, nmax)?.identity_report())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFunction {
    One,
    Q1,
    Q2,
    Q1Q2,
}

#[derive(Debug, Clone)]
pub struct QuantisedRow {
    pub function: RowFunction,
    pub oracle: TruncatedOperator,
    pub printed: TruncatedOperator,
    pub derived: TruncatedOperator,
    pub printed_deviation: f64,
    pub derived_deviation: f64,
    /// Oracle and published row differ by more than the tolerance.
    pub erratum: bool,
}

/// Position operators x̂₁, x̂₂ on (nmax+2)² levels and a crop back to (nmax+1)².
fn padded_positions(params: &NonSepParams, nmax: usize) -> (TruncatedOperator, TruncatedOperator, impl Fn(TruncatedOperator) -> TruncatedOperator) {
    let big = nmax + 2;
    let id = TruncatedOperator::identity(big);
    let x1 = TruncatedOperator::position(big, params.lambda(0)).kron(&id);
    let x2 = id.kron(&TruncatedOperator::position(big, params.lambda(1)));
    let nb = nmax + 1;
    let crop = move |op: TruncatedOperator| {
        let m = op.entries();
        TruncatedOperator::from_matrix(DMatrix::from_fn(nb * nb, nb * nb, |i, j| m[((i / nb) * big + i % nb, (j / nb) * big + j % nb)]))
    };
    (x1, x2, crop)
}

/// Published linear combination.
pub fn row_printed(params: &NonSepParams, function: RowFunction, nmax: usize) -> TruncatedOperator {
    let (d1, d2, l) = params.bilinear();
    let (r1, r2, rl) = (d1.re, d2.re, l.re);
    let delta = 16.0 * r1 * r2 - 4.0 * rl * rl;
    let (la1, la2) = (params.lambda(0), params.lambda(1));
    let (x1, x2, crop) = padded_positions(params, nmax);
    let id = TruncatedOperator::identity(x1.dim());
    let g = 1.0 + 8.0 * rl * rl / delta;
    let op = match function {
        RowFunction::One => id,
        RowFunction::Q1 => x1.scale(rc(g)) + x2.scale(rc(16.0 * la1 / la2 * rl * r2 / delta)),
        RowFunction::Q2 => x2.scale(rc(g)) + x1.scale(rc(16.0 * la2 / la1 * rl * r1 / delta)),
        RowFunction::Q1Q2 => {
            let c12 = 1.0 + 512.0 * r1 * r2 * rl * rl / delta.powi(3);
            let c11 = 16.0 * r1 * rl / delta * g * la2 / la1;
            let c22 = 16.0 * r2 * rl / delta * g * la1 / la2;
            let c0 = 8.0 * la1 * la2 * rl / (delta * delta) * (3.0 + 16.0 * rl * rl / delta);
            (&x1 * &x2).scale(rc(c12)) + (&x1 * &x1).scale(rc(c11)) + (&x2 * &x2).scale(rc(c22)) + id.scale(rc(c0))
        }
    };
    crop(op)
}

/// Closed form from the label map: with q⃗ = M x⃗ on the mean positions and Σ the
/// fiducial position covariance, Â_{qₐ} = Σ_b M_{ab} x̂_b and
/// Â_{q₁q₂} = Σ M_{1a}M_{2b}(x̂ₐx̂_b + Σ_{ab}).
pub fn row_derived(params: &NonSepParams, function: RowFunction, nmax: usize) -> TruncatedOperator {
    let lam = [params.lambda(0), params.lambda(1)];
    let ku_inv = params.k_matrix().try_inverse().expect("K is invertible");
    let m = Matrix2::from_fn(|a, b| lam[a] * ku_inv[(a, b)] / lam[b]);
    let sigma = params.fiducial_covariance();
    let (x1, x2, crop) = padded_positions(params, nmax);
    let xs = [x1, x2];
    let id = TruncatedOperator::identity(xs[0].dim());
    let lin = |row: usize| xs[0].scale(rc(m[(row, 0)])) + xs[1].scale(rc(m[(row, 1)]));
    let op = match function {
        RowFunction::One => id,
        RowFunction::Q1 => lin(0),
        RowFunction::Q2 => lin(1),
        RowFunction::Q1Q2 => {
            let mut acc = TruncatedOperator::zeros(id.dim());
            for a in 0..2 {
                for b in 0..2 {
                    let c = m[(0, a)] * m[(1, b)];
                    acc = acc + (&xs[a] * &xs[b] + id.scale(rc(sigma[(a, b)]))).scale(rc(c));
                }
            }
            acc
        }
    };
    crop(op)
}

/// Coefficients (c₁, c₂) of a linear combination c₁x̂₁ + c₂x̂₂ read off the
/// ⟨1,0|·|0,0⟩ and ⟨0,1|·|0,0⟩ entries.
pub fn linear_coefficients(op: &TruncatedOperator, params: &NonSepParams, nmax: usize) -> [f64; 2] {
    let nb = nmax + 1;
    [op.get(nb, 0).re * SQRT_2 / params.lambda(0), op.get(1, 0).re * SQRT_2 / params.lambda(1)]
}

pub fn row_operators(params: &NonSepParams, function: RowFunction, nmax: usize, fock_dim: usize, tol: f64) -> Result<QuantisedRow> {
    if 2 * (nmax + 1) > fock_dim {
        return Err(Error::TruncationTooSmall { dim: fock_dim, needed: 2 * (nmax + 1) });
    }
    Ok(TwoModeFockFamily::new(*params, nmax)?.linear_row(function, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Constant, FnField2, Growth, Rectangle};
    use crate::sepstates;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn params(t1: C64, t2: C64, phi: f64) -> NonSepParams {
        NonSepParams::from_taus([t1, t2], [0.8, 1.3], 0.9, phi).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let p = params(c(0.5, 0.0), c(0.5, 0.0), 0.9);
        assert!(p.bilinear().2.norm() < 1e-15);
        let p = params(c(0.3, 0.0), c(-0.2, 0.1), 0.0);
        let (d1, _, l) = p.bilinear();
        assert!((d1 - c(1.3 / 1.4, 0.0)).norm() < 1e-15);
        assert!(l.norm() < 1e-15);
        let co = nonsep_coefficients(&params(c(0.0, 0.0), c(0.0, 0.0), 0.4), PhasePoint::default()).unwrap();
        assert!((co.delta1 - c(0.5, 0.0)).norm() < 1e-15 && (co.delta2 - c(0.5, 0.0)).norm() < 1e-15);
        assert!((co.delta - 4.0).abs() < 1e-14);
        assert!((co.delta_factored - 1.0).abs() < 1e-14);
    }

    #[test]
    fn equal_squeezing_kills_cross_terms() {
        let p = params(c(0.3, 0.2), c(0.3, 0.2), 1.1);
        let co = nonsep_coefficients(&p, PhasePoint::new(0.3, -0.2, 0.5, 0.1)).unwrap();
        for v in [co.ell.norm(), co.theta12, co.xi12, co.l12, co.l21] {
            assert!(v.abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn real_squeezing_gives_real_bilinear() {
        let (d1, d2, l) = bilinear_coefficients(c(0.4, 0.0), c(-0.6, 0.0), 0.7);
        assert!(d1.im.abs() < 1e-16 && d2.im.abs() < 1e-16 && l.im.abs() < 1e-16);
    }

    #[test]
    fn eigen_equations_hold() {
        for conv in [LinearConvention::Physical, LinearConvention::AsPrinted] {
            let p = params(c(0.4, 0.0), c(0.0, 0.7), PI / 6.0).with_convention(conv);
            let pt = PhasePoint::new(0.3, -0.5, 0.8, -0.2);
            for x in [[0.1, -0.3], [0.5, 0.2], [-0.4, -0.9]] {
                let r = eigen_residual(&p, pt, x).unwrap();
                assert!(r[0] < 1e-8 && r[1] < 1e-8, "{conv:?} {r:?}");
            }
        }
    }

    #[test]
    fn normalisation_matches_quadrature() {
        let p = params(c(0.4, 0.0), c(0.0, 0.7), PI / 6.0);
        let n = norm_quadrature(&p, PhasePoint::new(0.6, -0.4, 1.2, 0.3), 1e-12).unwrap();
        assert!((n - 1.0).abs() < 1e-9, "{n}");
    }

    #[test]
    fn bogoliubov_limits() {
        let z = rc(0.0);
        let p = NonSepParams::new(
            TwoModeParams::new(
                crate::onemode::SqueezeParameter::new(c(0.5, 0.3), 1.0, 1.0).unwrap(),
                crate::onemode::SqueezeParameter::new(z, 1.0, 1.0).unwrap(),
            )
            .unwrap(),
            0.0,
        )
        .unwrap();
        let r = bogoliubov_check(&p, [c(0.3, -0.2), z], 24).unwrap();
        assert!(r.residual() < 1e-9, "{r:?}");
        let swap = NonSepParams::from_taus([z, z], [1.0, 1.0], 1.0, PI / 2.0).unwrap();
        let r = bogoliubov_check(&swap, [c(0.4, 0.1), c(-0.2, 0.3)], 24).unwrap();
        assert!(r.residual() < 1e-9 && r.conjugated[0] < 1e-9, "{r:?}");
    }

    #[test]
    fn fock_amplitude_matches_wavefunction() {
        // ⟨0,0|q,p⟩ from the Fock construction against the Gaussian integral with the
        // coherent vacuum.
        let p = params(c(0.2, 0.1), c(-0.3, 0.2), 0.6);
        let fam = TwoModeFockFamily::new(p, 2).unwrap();
        let pt = PhasePoint::new(0.4, -0.3, 0.5, 0.7);
        let c00 = fam.amplitudes(plain_alpha(pt, &p))[0];
        let (l1, l2) = (p.lambda(0), p.lambda(1));
        let vac = GaussianState {
            a: Matrix2::new(rc(0.5 / (l1 * l1)), rc(0.0), rc(0.0), rc(0.5 / (l2 * l2))),
            b: Vector2::zeros(),
            c: rc(-0.5 * (PI * l1 * l2).ln()),
        };
        let ov = vac.inner(&nonsep_state(&p, pt).unwrap()).unwrap();
        assert!((c00.norm() - ov.norm()).abs() < 1e-12, "{} {}", c00.norm(), ov.norm());
    }

    #[test]
    fn separable_limit() {
        let sep = TwoModeParams::from_taus([c(0.3, 0.0), c(-0.5, 0.0)], [0.8, 1.3], 0.9).unwrap();
        let p = NonSepParams::new(sep, 0.0).unwrap();
        let a = PhasePoint::new(0.2, -0.4, 0.7, 0.1);
        let b = PhasePoint::new(-0.3, 0.1, 0.2, 0.6);
        let ratio0 = nonsep_wavefunction(&p, a, [0.0, 0.0]).unwrap() / sepstates::sep_wavefunction(a, &sep, [0.0, 0.0]);
        assert!((ratio0.norm() - 1.0).abs() < 1e-12);
        for x in [[0.3, -0.2], [-0.7, 0.5]] {
            let ratio = nonsep_wavefunction(&p, a, x).unwrap() / sepstates::sep_wavefunction(a, &sep, x);
            assert!((ratio - ratio0).norm() < 1e-12);
        }
        let o = nonsep_overlap_sq(a, b, &p).unwrap();
        assert!((o - sepstates::sep_overlap_sq(a, b, &sep)).abs() < 1e-12);
        let quad = FnField2::new(|q: [f64; 2]| (q[0] - 0.2).powi(2) * (1.0 + q[1]), Growth::Polynomial(3));
        let hn = nonsep_portrait_hq(&quad, a, &p).unwrap();
        let hs = sepstates::portrait_hq(&quad, a, &sep).unwrap();
        assert!((hn - hs).abs() < 1e-10, "{hn} {hs}");
    }

    #[test]
    fn portrait_constant_affine_and_oracle() {
        let p = params(c(0.2, 0.0), c(0.6, 0.0), PI / 4.0);
        let pt = PhasePoint::new(0.3, -0.2, 0.1, 0.4);
        assert!((nonsep_portrait_hq(&Constant(1.0), pt, &p).unwrap() - 1.0).abs() < 1e-10);
        let aff = FnField2::new(|q: [f64; 2]| 1.0 + 2.0 * q[0] - q[1], Growth::Polynomial(1));
        assert!((nonsep_portrait_hq(&aff, pt, &p).unwrap() - (1.0 + 0.6 + 0.2)).abs() < 1e-10);
        let sq = Rectangle::centred([0.5, 0.5]);
        let closed = nonsep_portrait_hq(&sq, pt, &p).unwrap();
        let oracle = nonsep_portrait_oracle(&sq, pt, &p, 1e-10).unwrap();
        assert!((closed - oracle).abs() < 1e-8, "{closed} {oracle}");
    }

    #[test]
    fn isotropic_field_gives_anisotropic_portrait() {
        let p = params(c(0.1, 0.0), c(0.7, 0.0), PI / 4.0);
        let lam = NonSepParams { modes: TwoModeParams::from_taus([c(0.1, 0.0), c(0.7, 0.0)], [1.0, 1.0], 1.0).unwrap(), ..p };
        let f = FnField2::new(|q: [f64; 2]| (-(q[0] * q[0] + q[1] * q[1])).exp(), Growth::Bounded);
        let h = 0.05;
        let v = |q1: f64, q2: f64| nonsep_portrait_hq(&f, PhasePoint::new(q1, q2, 0.0, 0.0), &lam).unwrap();
        let c0 = v(0.0, 0.0);
        let d_diag = v(h, h) + v(-h, -h) - 2.0 * c0;
        let d_anti = v(h, -h) + v(-h, h) - 2.0 * c0;
        assert!((d_diag - d_anti).abs() > 1e-6, "{d_diag} {d_anti}");
    }

    #[test]
    fn two_mode_identity_measure() {
        let p = params(c(0.2, 0.0), c(0.0, 0.4), 0.7);
        let r = verify_two_mode_identity(&p, 3).unwrap();
        assert!(r.deviation_2pi_hbar_sq < 1e-9, "{r:?}");
        assert!(r.deviation_2pi_hbar_4 > 1e-2);
    }

    #[test]
    fn linear_rows() {
        let p = params(c(0.2, 0.0), c(0.6, 0.0), PI / 4.0);
        for conv in [LinearConvention::Physical, LinearConvention::AsPrinted] {
            let fam = TwoModeFockFamily::new(p.with_convention(conv), 3).unwrap();
            for f in [RowFunction::One, RowFunction::Q1, RowFunction::Q2, RowFunction::Q1Q2] {
                let row = fam.linear_row(f, 1e-4);
                assert!(row.derived_deviation < 1e-9, "{conv:?} {f:?} {}", row.derived_deviation);
            }
            let q2 = fam.linear_row(RowFunction::Q2, 1e-4);
            assert_eq!(q2.erratum, conv == LinearConvention::Physical);
            assert!(!fam.linear_row(RowFunction::One, 1e-4).erratum);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn alpha_form_consistency(r1 in 0.0f64..0.8, a1 in 0.0f64..6.3, r2 in 0.0f64..0.8, a2 in 0.0f64..6.3, phi in 0.0f64..6.3,
                                  q1 in -2.0f64..2.0, q2 in -2.0f64..2.0, p1 in -2.0f64..2.0, p2 in -2.0f64..2.0, printed in any::<bool>()) {
            let conv = if printed { LinearConvention::AsPrinted } else { LinearConvention::Physical };
            let p = params(C64::from_polar(r1, a1), C64::from_polar(r2, a2), phi).with_convention(conv);
            let pt = PhasePoint::new(q1, q2, p1, p2);
            let co = nonsep_coefficients(&p, pt).unwrap();
            let l = linear_from_alpha(&p, plain_alpha(pt, &p));
            prop_assert!((l[0] - co.ell1).norm() < 1e-12 * (1.0 + co.ell1.norm()));
            prop_assert!((l[1] - co.ell2).norm() < 1e-12 * (1.0 + co.ell2.norm()));
            let back = p.label_from_physical(p.physical_label(pt));
            prop_assert!((back.q1 - q1).abs() + (back.q2 - q2).abs() + (back.p1 - p1).abs() + (back.p2 - p2).abs() < 1e-11);
        }

        #[test]
        fn overlap_closed_form_matches_oracle(r1 in 0.0f64..0.8, a1 in 0.0f64..6.3, r2 in 0.0f64..0.8, a2 in 0.0f64..6.3, phi in 0.0f64..6.3,
                                              d in prop::array::uniform4(-0.8f64..0.8), printed in any::<bool>()) {
            let conv = if printed { LinearConvention::AsPrinted } else { LinearConvention::Physical };
            let p = params(C64::from_polar(r1, a1), C64::from_polar(r2, a2), phi).with_convention(conv);
            let a = PhasePoint::new(0.1, -0.2, 0.3, 0.05);
            let b = PhasePoint::new(0.1 + d[0], -0.2 + d[1], 0.3 + d[2], 0.05 + d[3]);
            let o = nonsep_overlap_sq(a, b, &p).unwrap();
            prop_assert!(o > 0.0 && o <= 1.0 + 1e-12);
            prop_assert!((o - nonsep_overlap_sq_closed(a, b, &p)).abs() < 1e-12);
            prop_assert!((nonsep_overlap_sq(a, a, &p).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
