use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// ∫_{R²} exp(-xᵀAx + bᵀx + c) d²x for complex symmetric A with positive
/// definite real part.
///
/// Eigenvalues of such an A have positive real part, so √det(A) on the
/// principal branch is the analytic continuation from real A.
pub fn integrate_gaussian_quadratic(a: &Matrix2<C64>, b: &Vector2<C64>, c: C64) -> Result<C64> {
    let off = 0.5 * (a[(0, 1)] + a[(1, 0)]);
    let (a11, a22) = (a[(0, 0)], a[(1, 1)]);
    let re_det = a11.re * a22.re - off.re * off.re;
    if !(a11.re > 0.0 && re_det > 0.0) {
        return Err(Error::NonConvergent);
    }
    let det = a11 * a22 - off * off;
    let inv = Matrix2::new(a22, -off, -off, a11) / det;
    let quad = (b.transpose() * inv * b)[(0, 0)];
    Ok(std::f64::consts::PI / det.sqrt() * (0.25 * quad + c).exp())
}

/// Same integral returned as log-value, for exponents that would overflow.
pub fn log_integrate_gaussian_quadratic(a: &Matrix2<C64>, b: &Vector2<C64>, c: C64) -> Result<C64> {
    let off = 0.5 * (a[(0, 1)] + a[(1, 0)]);
    let (a11, a22) = (a[(0, 0)], a[(1, 1)]);
    let re_det = a11.re * a22.re - off.re * off.re;
    if !(a11.re > 0.0 && re_det > 0.0) {
        return Err(Error::NonConvergent);
    }
    let det = a11 * a22 - off * off;
    let inv = Matrix2::new(a22, -off, -off, a11) / det;
    let quad = (b.transpose() * inv * b)[(0, 0)];
    Ok(C64::new(std::f64::consts::PI.ln(), 0.0) - 0.5 * det.ln() + 0.25 * quad + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate_2d_vec, AdaptiveOptions};
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn unit_cases() {
        let zero = Vector2::new(c(0.0, 0.0), c(0.0, 0.0));
        let id = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let v = integrate_gaussian_quadratic(&id, &zero, c(0.0, 0.0)).unwrap();
        assert!((v - PI).norm() < 1e-14);
        let v = integrate_gaussian_quadratic(&(id * c(2.0, 0.0)), &zero, c(0.0, 0.0)).unwrap();
        assert!((v - PI / 2.0).norm() < 1e-14);
        let b = Vector2::new(c(2.0, 0.0), c(0.0, 0.0));
        let v = integrate_gaussian_quadratic(&id, &b, c(0.0, 0.0)).unwrap();
        assert!((v - PI * E).norm() < 1e-13);
    }

    #[test]
    fn rejects_indefinite_real_part() {
        let a = Matrix2::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0));
        let b = Vector2::new(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(integrate_gaussian_quadratic(&a, &b, c(0.0, 0.0)), Err(Error::NonConvergent));
    }

    #[test]
    fn complex_instance_against_quadrature() {
        let a = Matrix2::new(c(1.3, 0.8), c(0.2, -0.5), c(0.2, -0.5), c(0.9, -1.1));
        let b = Vector2::new(c(0.4, 0.3), c(-0.7, 0.2));
        let cc = c(0.1, 0.25);
        let want = integrate_gaussian_quadratic(&a, &b, cc).unwrap();
        let got = integrate_2d_vec(
            2,
            |x, y, out: &mut [f64]| {
                let v = Vector2::new(c(x, 0.0), c(y, 0.0));
                let e = -(v.transpose() * a * v)[(0, 0)] + (b.transpose() * v)[(0, 0)] + cc;
                let z = e.exp();
                out[0] = z.re;
                out[1] = z.im;
            },
            &[-9.0, 9.0],
            &[-9.0, 9.0],
            AdaptiveOptions::with_tol(1e-13, 1e-11),
        )
        .unwrap();
        let got = c(got.value[0], got.value[1]);
        assert!((got - want).norm() / want.norm() < 1e-8, "{got} vs {want}");
    }
}
