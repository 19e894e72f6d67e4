//! One-mode squeezed coherent states |α;ξ⟩ = S(ξ)D(α)|0⟩.
//!
//! Conventions: S(ξ) = exp(−½ξa†² + ½ξ*a²), τ = (ξ/|ξ|)tanh|ξ|,
//! x̂ = λ(a+a†)/√2 and p̂ = (ħ/λ)(a−a†)/(i√2). The phase-space label (q, p) of a
//! state is the pair of expectation values ⟨x̂⟩, ⟨p̂⟩.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::hermite::hermite_phys;
use crate::numerics::operator::{expm, TruncatedOperator};
use crate::numerics::quadrature::{
    gaussian_box_half_width, integrate_2d_vec, integrate_vec, AdaptiveOptions, QuadratureRule, RuleKind,
};

/// Largest admissible |τ|.
pub const TAU_MAX: f64 = 1.0 - 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParameter {
    xi: C64,
    tau: C64,
    lambda: f64,
    hbar: f64,
}

impl SqueezeParameter {
    pub fn new(xi: C64, lambda: f64, hbar: f64) -> Result<Self> {
        Self::build(xi, tau_from_xi(xi), lambda, hbar)
    }

    /// Builds the parameter from τ directly; ξ = artanh|τ|·τ/|τ|.
    pub fn from_tau(tau: C64, lambda: f64, hbar: f64) -> Result<Self> {
        let r = tau.norm();
        if !(r <= TAU_MAX) {
            return Err(Error::DegenerateSqueezing(r));
        }
        let xi = if r == 0.0 { C64::new(0.0, 0.0) } else { tau * (r.atanh() / r) };
        Self::build(xi, tau, lambda, hbar)
    }

    pub fn coherent(lambda: f64, hbar: f64) -> Result<Self> {
        Self::from_tau(C64::new(0.0, 0.0), lambda, hbar)
    }

    fn build(xi: C64, tau: C64, lambda: f64, hbar: f64) -> Result<Self> {
        if !(tau.norm() <= TAU_MAX) {
            return Err(Error::DegenerateSqueezing(tau.norm()));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        Ok(SqueezeParameter { xi, tau, lambda, hbar })
    }

    pub fn xi(&self) -> C64 {
        self.xi
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn widths(&self) -> OneModeWidths {
        OneModeWidths::from_tau(self.tau)
    }

    /// Same squeezing with other length/action scales.
    pub fn with_scales(&self, lambda: f64, hbar: f64) -> Result<Self> {
        Self::build(self.xi, self.tau, lambda, hbar)
    }
}

/// Gaussian widths of the one-mode family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneModeWidths {
    pub sigma_q_sq: C64,
    pub delta_q_sq: f64,
    pub delta_p_sq: f64,
    pub gamma: f64,
}

impl OneModeWidths {
    pub fn from_tau(tau: C64) -> Self {
        let one = C64::new(1.0, 0.0);
        let sigma_q_sq = (one + tau) / (one - tau);
        let d = 1.0 - tau.norm_sqr();
        OneModeWidths {
            sigma_q_sq,
            delta_q_sq: sigma_q_sq.norm_sqr() / sigma_q_sq.re,
            delta_p_sq: (one - tau).norm_sqr() / d,
            gamma: tau.im / d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneModePhasePoint {
    pub q: f64,
    pub p: f64,
}

impl OneModePhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        OneModePhasePoint { q, p }
    }
}

pub fn tau_from_xi(xi: C64) -> C64 {
    let r = xi.norm();
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    xi * (r.tanh() / r)
}

/// Unimodular matrix taking (q/(λ√2), λp/(ħ√2)) to (Re α, Im α).
pub fn symplectic_matrix(tau: C64) -> Matrix2<f64> {
    let s = (1.0 - tau.norm_sqr()).sqrt();
    Matrix2::new(1.0 + tau.re, tau.im, tau.im, 1.0 - tau.re) / s
}

pub fn alpha_from_qp(point: OneModePhasePoint, param: &SqueezeParameter) -> C64 {
    let u = point.q / (param.lambda * std::f64::consts::SQRT_2);
    let v = param.lambda * point.p / (param.hbar * std::f64::consts::SQRT_2);
    let m = symplectic_matrix(param.tau);
    C64::new(m[(0, 0)] * u + m[(0, 1)] * v, m[(1, 0)] * u + m[(1, 1)] * v)
}

pub fn qp_from_alpha(alpha: C64, param: &SqueezeParameter) -> OneModePhasePoint {
    // inverse of the unimodular matrix is its adjugate
    let t = param.tau;
    let s = (1.0 - t.norm_sqr()).sqrt();
    let u = ((1.0 - t.re) * alpha.re - t.im * alpha.im) / s;
    let v = (-t.im * alpha.re + (1.0 + t.re) * alpha.im) / s;
    OneModePhasePoint {
        q: u * param.lambda * std::f64::consts::SQRT_2,
        p: v * param.hbar * std::f64::consts::SQRT_2 / param.lambda,
    }
}

/// Fiducial profile s(y) = ⟨y|0;ξ⟩ at unit displacement.
pub fn fiducial(param: &SqueezeParameter, y: f64) -> C64 {
    let t = param.tau;
    let one = C64::new(1.0, 0.0);
    let norm = (1.0 - t.norm_sqr()).powf(0.25) / (std::f64::consts::PI.powf(0.25) * param.lambda.sqrt());
    let sigma_q_sq = (one + t) / (one - t);
    norm / (one - t).sqrt() * (-sigma_q_sq * (y * y / (2.0 * param.lambda * param.lambda))).exp()
}

/// ψ(q,p;ξ;x) = e^{ip(x−q/2)/ħ} s(x−q).
///
/// This equals ⟨x|S(ξ)D(α)|0⟩ up to a point-dependent constant phase, which
/// drops out of every projector |q,p;ξ⟩⟨q,p;ξ|.
pub fn wavefunction(point: OneModePhasePoint, param: &SqueezeParameter, x: f64) -> C64 {
    let phase = C64::from_polar(1.0, point.p * (x - 0.5 * point.q) / param.hbar);
    phase * fiducial(param, x - point.q)
}

/// ⟨n|S(ξ)D(α)|0⟩ for n ≤ nmax.
///
/// Uses g_n = G_n/√(2ⁿn!) with G_{n+1} = 2cG_n − 2nτG_{n−1}, c = α√((1−|τ|²)/2),
/// which is the Hermite form H_n(·)(τ/2)^{n/2} without the branch of τ^{n/2}.
pub fn fock_coefficients(alpha: C64, param: &SqueezeParameter, nmax: usize) -> Vec<C64> {
    fock_coefficients_tau(alpha, param.tau, nmax)
}

pub(crate) fn fock_coefficients_tau(alpha: C64, tau: C64, nmax: usize) -> Vec<C64> {
    let d = 1.0 - tau.norm_sqr();
    let c = alpha * (0.5 * d).sqrt();
    let pre = d.powf(0.25) * (-0.5 * alpha.norm_sqr() + 0.5 * alpha * alpha * tau.conj()).exp();
    let mut g = Vec::with_capacity(nmax + 1);
    g.push(C64::new(1.0, 0.0));
    if nmax >= 1 {
        g.push(c * std::f64::consts::SQRT_2);
    }
    for n in 1..nmax {
        let nf = n as f64;
        let next = (c * std::f64::consts::SQRT_2 * g[n] - tau * nf.sqrt() * g[n - 1]) / (nf + 1.0).sqrt();
        g.push(next);
    }
    g.into_iter().map(|v| v * pre).collect()
}

/// Matrix-exponential reference for [`fock_coefficients`]: S(ξ)D(α)|0⟩ built in a
/// Fock space of `2·dim` levels and truncated to `dim`.
pub fn fock_coefficients_oracle(alpha: C64, param: &SqueezeParameter, dim: usize) -> Vec<C64> {
    let big = 2 * dim.max(2);
    let a = TruncatedOperator::annihilation(big);
    let ad = a.dagger();
    let d_gen = ad.scale(alpha) - a.scale(alpha.conj());
    let a2 = a.entries() * a.entries();
    let ad2 = ad.entries() * ad.entries();
    let s_gen: DMatrix<C64> = ad2 * (-0.5 * param.xi) + a2 * (0.5 * param.xi.conj());
    let d = expm(d_gen.entries());
    let s = expm(&s_gen);
    let state = s * d.column(0);
    state.iter().take(dim).copied().collect()
}

/// |⟨q',p';ξ|q,p;ξ⟩|² in closed form.
pub fn overlap_sq(a: OneModePhasePoint, b: OneModePhasePoint, param: &SqueezeParameter) -> f64 {
    let w = param.widths();
    let (l, h) = (param.lambda, param.hbar);
    let dq = a.q - b.q;
    let dp = a.p - b.p;
    (-w.delta_q_sq / (2.0 * l * l) * dq * dq - l * l / (2.0 * h * h) * w.delta_p_sq * dp * dp - 2.0 * w.gamma / h * dq * dp)
        .exp()
}

/// |∫ψ_a*ψ_b dx|² by adaptive quadrature.
pub fn overlap_sq_oracle(a: OneModePhasePoint, b: OneModePhasePoint, param: &SqueezeParameter, tol: f64) -> Result<f64> {
    let breaks = position_breaks(param, &[a.q, b.q]);
    let r = integrate_vec(
        2,
        |x, out: &mut [f64]| {
            let z = wavefunction(a, param, x).conj() * wavefunction(b, param, x);
            out[0] = z.re;
            out[1] = z.im;
        },
        &breaks,
        AdaptiveOptions::with_tol(tol, tol),
    )?;
    Ok(r.value[0] * r.value[0] + r.value[1] * r.value[1])
}

/// Breakpoints covering the support of |ψ|² for wavepackets centred at `centres`,
/// with tails below 1e-17 of the peak.
pub(crate) fn position_breaks(param: &SqueezeParameter, centres: &[f64]) -> Vec<f64> {
    let var = param.lambda * param.lambda / (2.0 * param.widths().sigma_q_sq.re);
    let half = gaussian_box_half_width(var.sqrt(), 1e-17);
    let lo = centres.iter().copied().fold(f64::INFINITY, f64::min) - half;
    let hi = centres.iter().copied().fold(f64::NEG_INFINITY, f64::max) + half;
    let mut b = vec![lo];
    b.extend(centres.iter().copied().filter(|&c| c > lo && c < hi));
    b.push(hi);
    b.sort_by(|x, y| x.total_cmp(y));
    b.dedup();
    b
}

/// Quadratic form W of the weight |c_n(α)|²/|G_n|² = (1−|τ|²)^{1/2} exp(−vᵀWv), v = (Re α, Im α).
pub(crate) fn alpha_weight_matrix(tau: C64) -> Matrix2<f64> {
    Matrix2::new(1.0 - tau.re, -tau.im, -tau.im, 1.0 + tau.re)
}

/// Tensor Gauss–Hermite nodes for ∫ exp(−vᵀWv) g(v) d²v: returns (v, weight) pairs.
pub(crate) fn adapted_gauss_hermite_2d(w: &Matrix2<f64>, n: usize) -> Vec<([f64; 2], f64)> {
    let rule = QuadratureRule::gauss_hermite(n);
    let chol = w.cholesky().expect("weight matrix is positive definite");
    // W = L Lᵀ, u = Lᵀv
    let lt = chol.l().transpose();
    let inv = lt.try_inverse().expect("triangular factor is invertible");
    let jac = 1.0 / lt.determinant();
    let mut out = Vec::with_capacity(n * n);
    for (i, &u1) in rule.nodes.iter().enumerate() {
        for (j, &u2) in rule.nodes.iter().enumerate() {
            let v1 = inv[(0, 0)] * u1 + inv[(0, 1)] * u2;
            let v2 = inv[(1, 0)] * u1 + inv[(1, 1)] * u2;
            out.push(([v1, v2], rule.weights[i] * rule.weights[j] * jac));
        }
    }
    out
}

/// Half-width of an α-plane box capturing exp(−vᵀWv)|v|^{2k} to 1e-16.
pub(crate) fn alpha_box_half_width(tau: C64, degree: usize) -> f64 {
    let lmin = 1.0 - tau.norm();
    let peak = (degree as f64 / (2.0 * lmin)).sqrt();
    peak + (40.0 / lmin).sqrt()
}

/// M_{nm} = ∫ d²α/π c_n(α) c_m*(α) on the (nmax+1)×(nmax+1) block.
pub fn identity_resolution_matrix(param: &SqueezeParameter, nmax: usize, quad: &QuadratureRule) -> Result<DMatrix<C64>> {
    let k = nmax + 1;
    let tau = param.tau;
    match quad.kind {
        RuleKind::GaussHermite => {
            let n = quad.len().max(nmax + 2);
            // c_n c_m* = weight × polynomial of degree n+m, so an n-point rule is exact
            let mut m = DMatrix::<C64>::zeros(k, k);
            for (v, w) in adapted_gauss_hermite_2d(&alpha_weight_matrix(tau), n) {
                let alpha = C64::new(v[0], v[1]);
                let c = fock_coefficients_tau(alpha, tau, nmax);
                let env = (-alpha.norm_sqr() + (alpha * alpha * tau.conj()).re).exp();
                for i in 0..k {
                    for j in 0..k {
                        m[(i, j)] += c[i] * c[j].conj() * (w / env / std::f64::consts::PI);
                    }
                }
            }
            Ok(m)
        }
        RuleKind::AdaptiveCartesian => {
            let half = alpha_box_half_width(tau, 2 * nmax);
            let tol = quad.tolerance;
            let r = integrate_2d_vec(
                2 * k * k,
                |x, y, out: &mut [f64]| {
                    let c = fock_coefficients_tau(C64::new(x, y), tau, nmax);
                    for i in 0..k {
                        for j in 0..k {
                            let z = c[i] * c[j].conj() / std::f64::consts::PI;
                            out[2 * (i * k + j)] = z.re;
                            out[2 * (i * k + j) + 1] = z.im;
                        }
                    }
                },
                &[-half, 0.0, half],
                &[-half, 0.0, half],
                AdaptiveOptions::with_tol(tol, tol),
            )?;
            Ok(DMatrix::from_fn(k, k, |i, j| C64::new(r.value[2 * (i * k + j)], r.value[2 * (i * k + j) + 1])))
        }
    }
}

pub fn verify_identity_resolution(param: &SqueezeParameter, nmax: usize, quad: &QuadratureRule) -> Result<f64> {
    let m = identity_resolution_matrix(param, nmax, quad)?;
    let k = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - want).norm());
        }
    }
    Ok(worst)
}

/// Constants a = 2|τ|/(1+|τ|), b = 2|τ|/(1−|τ|) of the holomorphic Hermite weight.
pub fn holomorphic_constants(tau: C64) -> (f64, f64) {
    let r = tau.norm();
    (2.0 * r / (1.0 + r), 2.0 * r / (1.0 - r))
}

/// π/√(ab)·2ⁿn!((a+b)/(ab))ⁿ δ_nm.
pub fn holomorphic_rhs(n: usize, m: usize, a: f64, b: f64) -> f64 {
    if n != m {
        return 0.0;
    }
    let mut v = std::f64::consts::PI / (a * b).sqrt();
    let r = 2.0 * (a + b) / (a * b);
    for k in 1..=n {
        v *= r * k as f64;
    }
    v
}

/// ∫ H_n(x+iy)H_m(x−iy)e^{−ax²−by²} dx dy.
pub fn holomorphic_lhs(n: usize, m: usize, a: f64, b: f64, quad: &QuadratureRule) -> Result<C64> {
    match quad.kind {
        RuleKind::GaussHermite => {
            let rule = if quad.len() * 2 > n + m { quad.clone() } else { QuadratureRule::gauss_hermite((n + m) / 2 + 1) };
            let (sa, sb) = (a.sqrt(), b.sqrt());
            let mut acc = C64::new(0.0, 0.0);
            for (i, &u) in rule.nodes.iter().enumerate() {
                for (j, &v) in rule.nodes.iter().enumerate() {
                    let (x, y) = (u / sa, v / sb);
                    acc += hermite_phys(n, C64::new(x, y)) * hermite_phys(m, C64::new(x, -y)) * (rule.weights[i] * rule.weights[j]);
                }
            }
            Ok(acc / (sa * sb))
        }
        RuleKind::AdaptiveCartesian => {
            let deg = (n + m) as f64;
            let hx = (deg / (2.0 * a)).sqrt() + (40.0 / a).sqrt();
            let hy = (deg / (2.0 * b)).sqrt() + (40.0 / b).sqrt();
            let tol = quad.tolerance;
            let r = integrate_2d_vec(
                2,
                |x, y, out: &mut [f64]| {
                    let z = hermite_phys(n, C64::new(x, y)) * hermite_phys(m, C64::new(x, -y)) * (-a * x * x - b * y * y).exp();
                    out[0] = z.re;
                    out[1] = z.im;
                },
                &[-hx, 0.0, hx],
                &[-hy, 0.0, hy],
                AdaptiveOptions::with_tol(tol, tol),
            )?;
            Ok(C64::new(r.value[0], r.value[1]))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolomorphicReport {
    pub a: f64,
    pub b: f64,
    /// |1/a − 1/b − 1|
    pub constraint_residual: f64,
    /// max over n, m ≤ nmax of |LHS − RHS| / √(RHS_nn RHS_mm)
    pub max_relative_deviation: f64,
}

pub fn verify_holomorphic_orthogonality(param: &SqueezeParameter, nmax: usize, quad: &QuadratureRule) -> Result<HolomorphicReport> {
    let (a, b) = holomorphic_constants(param.tau);
    if !(a > 0.0) {
        return Err(Error::InvalidParameter("holomorphic weight needs tau != 0".into()));
    }
    let mut worst: f64 = 0.0;
    for n in 0..=nmax {
        for m in 0..=nmax {
            let lhs = holomorphic_lhs(n, m, a, b, quad)?;
            let rhs = holomorphic_rhs(n, m, a, b);
            let scale = (holomorphic_rhs(n, n, a, b) * holomorphic_rhs(m, m, a, b)).sqrt();
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    Ok(HolomorphicReport { a, b, constraint_residual: (1.0 / a - 1.0 / b - 1.0).abs(), max_relative_deviation: worst })
}
