//! Quantisation f ↦ Â_f = ∫ f |q,p⟩⟨q,p| dμ in a truncated Fock basis, for the
//! one-mode family and the two-mode (separable or beam-splitter mixed) family.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Growth;
use crate::nonsepstates::{NonSepParams, TwoModeFockFamily};
use crate::numerics::operator::TruncatedOperator;
use crate::numerics::quadrature::{box_breaks, integrate_2d_vec, integrate_vec, AdaptiveOptions};
use crate::onemode::{
    adapted_gauss_hermite_2d, alpha_box_half_width, alpha_weight_matrix, fock_coefficients_tau, qp_from_alpha,
    OneModePhasePoint, SqueezeParameter,
};
use crate::sepstates::{box_half, PhasePoint};

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arity {
    OneMode,
    TwoMode,
}

/// Classical observable on phase space. One-mode evaluators see `[q, p]`,
/// two-mode evaluators `[q1, q2, p1, p2]`.
#[derive(Clone)]
pub struct ClassicalFunction {
    arity: Arity,
    growth: Growth,
    eval: Evaluator,
    /// f = Σ_k g_k(q) p^k, when known (one-mode only).
    momentum: Option<Vec<Coefficient>>,
    /// f is a polynomial of degree ≤ growth.
    polynomial: bool,
    breaks: [Vec<f64>; 2],
}

impl std::fmt::Debug for ClassicalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClassicalFunction")
            .field("arity", &self.arity)
            .field("growth", &self.growth)
            .field("momentum_degree", &self.momentum.as_ref().map(|m| m.len().saturating_sub(1)))
            .field("polynomial", &self.polynomial)
            .finish()
    }
}

impl ClassicalFunction {
    pub fn one_mode(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, growth: Growth) -> Self {
        ClassicalFunction {
            arity: Arity::OneMode,
            growth,
            eval: Arc::new(move |x: &[f64]| f(x[0], x[1])),
            momentum: None,
            polynomial: false,
            breaks: [Vec::new(), Vec::new()],
        }
    }

    /// Polynomial in (q, p) of total degree ≤ `degree`; quantised exactly.
    pub fn one_mode_polynomial(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, degree: u32) -> Self {
        ClassicalFunction { polynomial: true, ..Self::one_mode(f, Growth::Polynomial(degree)) }
    }

    /// f(q, p) = Σ_k g_k(q) p^k with k ≤ 2 supported by the kernel.
    pub fn momentum_polynomial(coeffs: Vec<Coefficient>, growth: Growth, polynomial: bool) -> Self {
        let cs = coeffs.clone();
        let eval: Evaluator = Arc::new(move |x: &[f64]| {
            let mut pk = 1.0;
            let mut acc = 0.0;
            for g in &cs {
                acc += g(x[0]) * pk;
                pk *= x[1];
            }
            acc
        });
        ClassicalFunction {
            arity: Arity::OneMode,
            growth,
            eval,
            momentum: Some(coeffs),
            polynomial,
            breaks: [Vec::new(), Vec::new()],
        }
    }

    pub fn position(h: impl Fn(f64) -> f64 + Send + Sync + 'static, growth: Growth) -> Self {
        Self::momentum_polynomial(vec![Arc::new(h)], growth, false)
    }

    pub fn constant(c: f64) -> Self {
        Self::momentum_polynomial(vec![Arc::new(move |_| c)], Growth::Bounded, true)
    }

    pub fn q() -> Self {
        Self::momentum_polynomial(vec![Arc::new(|q| q)], Growth::Polynomial(1), true)
    }

    pub fn p() -> Self {
        Self::momentum_polynomial(vec![Arc::new(|_| 0.0), Arc::new(|_| 1.0)], Growth::Polynomial(1), true)
    }

    pub fn qp() -> Self {
        Self::momentum_polynomial(vec![Arc::new(|_| 0.0), Arc::new(|q| q)], Growth::Polynomial(2), true)
    }

    pub fn two_mode(f: impl Fn(PhasePoint) -> f64 + Send + Sync + 'static, growth: Growth) -> Self {
        ClassicalFunction {
            arity: Arity::TwoMode,
            growth,
            eval: Arc::new(move |x: &[f64]| f(PhasePoint::new(x[0], x[1], x[2], x[3]))),
            momentum: None,
            polynomial: false,
            breaks: [Vec::new(), Vec::new()],
        }
    }

    pub fn two_mode_polynomial(f: impl Fn(PhasePoint) -> f64 + Send + Sync + 'static, degree: u32) -> Self {
        ClassicalFunction { polynomial: true, ..Self::two_mode(f, Growth::Polynomial(degree)) }
    }

    /// Discontinuities in q and p (one-mode adaptive quadrature only).
    pub fn with_breaks(mut self, q: Vec<f64>, p: Vec<f64>) -> Self {
        self.breaks = [q, p];
        self
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Spot-check of the declared growth on spheres of radius 10 and 100.
    pub fn check_growth(&self) -> Result<()> {
        let dims = match self.arity {
            Arity::OneMode => 2,
            Arity::TwoMode => 4,
        };
        let sphere_max = |r: f64| -> Result<f64> {
            let mut worst: f64 = 0.0;
            for k in 0..32 {
                let t = 2.0 * PI * k as f64 / 32.0;
                let mut x = vec![0.0; dims];
                x[k % dims] = r * t.cos();
                x[(k + 1) % dims] = r * t.sin();
                let v = self.value(&x);
                if !v.is_finite() {
                    return Err(Error::GrowthViolation);
                }
                worst = worst.max(v.abs());
            }
            Ok(worst)
        };
        let (m10, m100) = (sphere_max(10.0)?, sphere_max(100.0)?);
        let allowed = 2.0 * 10f64.powi(self.growth.degree() as i32) * m10 + 1e-12;
        if m100 > allowed {
            return Err(Error::GrowthViolation);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StateFamily {
    OneMode(SqueezeParameter),
    TwoMode(NonSepParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    OneMode,
    TwoModeSeparable,
    TwoModeMixed,
}

#[derive(Debug, Clone)]
pub struct QuantisedOperator {
    /// Fock levels per mode.
    pub basis: usize,
    pub matrix: TruncatedOperator,
    pub family: FamilyTag,
    /// Estimated absolute quadrature error of the entries.
    pub quadrature_error: f64,
}

impl QuantisedOperator {
    pub fn anti_hermitian_part(&self) -> f64 {
        self.matrix.anti_hermitian_part()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.matrix.entries();
        let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

const ADAPTIVE_TOL: f64 = 1e-10;

/// ⟨n|Â_f|m⟩ for n, m ≤ nmax (per mode).
pub fn quantise(f: &ClassicalFunction, family: &StateFamily, nmax: usize) -> Result<QuantisedOperator> {
    f.check_growth()?;
    match (family, f.arity) {
        (StateFamily::OneMode(param), Arity::OneMode) => quantise_one_mode(f, param, nmax),
        (StateFamily::TwoMode(params), Arity::TwoMode) => quantise_two_mode(f, params, nmax),
        _ => Err(Error::InvalidParameter("function arity does not match the state family".into())),
    }
}

fn one_mode_gh(f: &ClassicalFunction, param: &SqueezeParameter, nmax: usize, n: usize) -> DMatrix<C64> {
    let k = nmax + 1;
    let tau = param.tau();
    let mut m = DMatrix::<C64>::zeros(k, k);
    for (v, w) in adapted_gauss_hermite_2d(&alpha_weight_matrix(tau), n) {
        let alpha = C64::new(v[0], v[1]);
        let pt = qp_from_alpha(alpha, param);
        let fv = f.value(&[pt.q, pt.p]);
        if fv == 0.0 {
            continue;
        }
        let c = fock_coefficients_tau(alpha, tau, nmax);
        let env = (-alpha.norm_sqr() + (alpha * alpha * tau.conj()).re).exp();
        let s = fv * w / env / PI;
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] += c[i] * c[j].conj() * s;
            }
        }
    }
    m
}

fn quantise_one_mode(f: &ClassicalFunction, param: &SqueezeParameter, nmax: usize) -> Result<QuantisedOperator> {
    let deg = f.growth.degree() as usize;
    let (matrix, err) = if f.polynomial {
        // c_n c_m* f is the weight times a polynomial of degree ≤ 2 nmax + deg
        let n = nmax + deg / 2 + 2;
        let a = one_mode_gh(f, param, nmax, n);
        let b = one_mode_gh(f, param, nmax, n + 1);
        let err = (&a - &b).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        (b, err)
    } else {
        one_mode_adaptive(f, param, nmax)?
    };
    Ok(QuantisedOperator {
        basis: nmax + 1,
        matrix: TruncatedOperator::from_matrix(matrix),
        family: FamilyTag::OneMode,
        quadrature_error: err,
    })
}

fn one_mode_adaptive(f: &ClassicalFunction, param: &SqueezeParameter, nmax: usize) -> Result<(DMatrix<C64>, f64)> {
    let k = nmax + 1;
    let tau = param.tau();
    let (lam, hbar) = (param.lambda(), param.hbar());
    let stretch = ((1.0 + tau.norm()) / (1.0 - tau.norm())).sqrt();
    let half = alpha_box_half_width(tau, 2 * nmax + f.growth.degree() as usize) * stretch * SQRT_2;
    let qb = box_breaks(0.0, half * lam, &f.breaks[0]);
    let pb = box_breaks(0.0, half * hbar / lam, &f.breaks[1]);
    let r = integrate_2d_vec(
        2 * k * k,
        |q, p, out: &mut [f64]| {
            let fv = f.value(&[q, p]);
            if fv == 0.0 {
                out.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
            let alpha = crate::onemode::alpha_from_qp(OneModePhasePoint::new(q, p), param);
            let c = fock_coefficients_tau(alpha, tau, nmax);
            let s = fv / (2.0 * PI * hbar);
            for i in 0..k {
                for j in 0..k {
                    let z = c[i] * c[j].conj() * s;
                    out[2 * (i * k + j)] = z.re;
                    out[2 * (i * k + j) + 1] = z.im;
                }
            }
        },
        &qb,
        &pb,
        AdaptiveOptions::with_tol(ADAPTIVE_TOL, ADAPTIVE_TOL),
    )?;
    let m = DMatrix::from_fn(k, k, |i, j| C64::new(r.value[2 * (i * k + j)], r.value[2 * (i * k + j) + 1]));
    Ok((m, r.error))
}

fn quantise_two_mode(f: &ClassicalFunction, params: &NonSepParams, nmax: usize) -> Result<QuantisedOperator> {
    let family = TwoModeFockFamily::new(*params, nmax)?;
    let eval = |p: PhasePoint| f.value(&[p.q1, p.q2, p.p1, p.p2]);
    let deg = f.growth.degree();
    let a = family.quantise(&eval, deg);
    let (matrix, err) = if f.polynomial {
        (a, 0.0)
    } else {
        let b = family.quantise(&eval, deg + 8);
        let err = b.block_deviation(&a, a.dim());
        if err > 1e-6 {
            return Err(Error::QuadratureNotConverged { estimate: err, tolerance: 1e-6 });
        }
        (b, err)
    };
    let tag = if params.phi == 0.0 { FamilyTag::TwoModeSeparable } else { FamilyTag::TwoModeMixed };
    Ok(QuantisedOperator { basis: nmax + 1, matrix, family: tag, quadrature_error: err })
}

/// Action of Â_f in the position representation: (Â_f φ)(x) = Σ_j c_j φ⁽ʲ⁾(x).
/// The kernel K_f(x, x') is Σ_j c_j δ⁽ʲ⁾-type; `order == 0` means a pure
/// multiplication δ(x − x')·c₀(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelAction {
    pub x: f64,
    pub coefficients: [C64; 3],
    pub order: usize,
}

impl KernelAction {
    pub fn is_diagonal(&self) -> bool {
        self.order == 0
    }

    /// Smoothing factor of the δ(x − x') part.
    pub fn smoothing(&self) -> C64 {
        self.coefficients[0]
    }

    pub fn apply(&self, phi: [C64; 3]) -> C64 {
        (0..3).map(|j| self.coefficients[j] * phi[j]).sum()
    }
}

/// K_f at x for f = Σ_{k≤2} g_k(q)pᵏ. The p-integrals are done exactly, leaving
/// Gaussian smoothings of g_k and their first two x'-derivatives.
pub fn kernel_eval(f: &ClassicalFunction, param: &SqueezeParameter, x: f64) -> Result<KernelAction> {
    let coeffs = f.momentum.as_ref().ok_or(Error::UnsupportedMomentumDependence)?;
    if coeffs.len() > 3 {
        return Err(Error::UnsupportedMomentumDependence);
    }
    let lam = param.lambda();
    let sig = param.widths().sigma_q_sq;
    let sb = sig.conj();
    let var = lam * lam / (2.0 * sig.re);
    let sd = var.sqrt();
    let nk = coeffs.len();
    let breaks = box_breaks(x, box_half(sd, f.growth.degree()), &f.breaks[0]);
    let r = integrate_vec(
        6 * nk,
        |q, out: &mut [f64]| {
            let y = x - q;
            let w = (-0.5 * y * y / var).exp() / (sd * (2.0 * PI).sqrt());
            let polys = [C64::new(1.0, 0.0), -sb * y / (lam * lam), sb * sb * y * y / lam.powi(4) - sb / (lam * lam)];
            for (k, g) in coeffs.iter().enumerate() {
                let gv = if w == 0.0 { 0.0 } else { g(q) * w };
                for (m, p) in polys.iter().enumerate() {
                    let z = *p * gv;
                    out[6 * k + 2 * m] = z.re;
                    out[6 * k + 2 * m + 1] = z.im;
                }
            }
        },
        &breaks,
        AdaptiveOptions::with_tol(1e-13, 1e-12),
    )?;
    let fm = |k: usize, m: usize| C64::new(r.value[6 * k + 2 * m], r.value[6 * k + 2 * m + 1]);
    let binom = [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 2.0, 1.0]];
    let mih = C64::new(0.0, -param.hbar());
    let mut c = [C64::new(0.0, 0.0); 3];
    for k in 0..nk {
        for j in 0..=k {
            c[j] += mih.powu(k as u32) * binom[k][j] * fm(k, k - j);
        }
    }
    let order = (0..3).rev().find(|&j| c[j].norm() > 1e-14).unwrap_or(0);
    Ok(KernelAction { x, coefficients: c, order })
}

/// ‖[Â_q, Â_p] − iħI‖_max on the (nmax+1)² block.
pub fn dirac_correspondence_check(param: &SqueezeParameter, nmax: usize) -> Result<f64> {
    let fam = StateFamily::OneMode(*param);
    let q = quantise(&ClassicalFunction::q(), &fam, nmax + 1)?.matrix;
    let p = quantise(&ClassicalFunction::p(), &fam, nmax + 1)?.matrix;
    let target = TruncatedOperator::identity(nmax + 2).scale(C64::new(0.0, param.hbar()));
    Ok(q.commutator(&p).block_deviation(&target, nmax + 1))
}

/// c in Â_qp = (x̂p̂ + p̂x̂)/2 + c: −ħ Im σ_q²/(2 Re σ_q²).
pub fn symmetrisation_constant(param: &SqueezeParameter) -> f64 {
    let s = param.widths().sigma_q_sq;
    -param.hbar() * s.im / (2.0 * s.re)
}
