use num_complex::Complex64 as C64;

/// Physicists' Hermite polynomial H_n(z) by the three-term recurrence.
pub fn hermite_phys(n: usize, z: C64) -> C64 {
    let mut h_prev = C64::new(1.0, 0.0);
    if n == 0 {
        return h_prev;
    }
    let mut h = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * h - 2.0 * (k as f64) * h_prev;
        h_prev = h;
        h = next;
    }
    h
}

/// H_0(z) ..= H_nmax(z).
pub fn hermite_phys_all(nmax: usize, z: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(C64::new(1.0, 0.0));
    if nmax == 0 {
        return out;
    }
    out.push(2.0 * z);
    for k in 1..nmax {
        let next = 2.0 * z * out[k] - 2.0 * (k as f64) * out[k - 1];
        out.push(next);
    }
    out
}

/// Normalised harmonic-oscillator eigenfunctions φ_0(x) ..= φ_nmax(x) with unit
/// length scale, via the stable orthonormal recurrence.
pub fn hermite_functions(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp());
    if nmax == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * out[0]);
    for n in 1..nmax {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(hermite_phys(0, C64::new(3.7, -1.2)), C64::new(1.0, 0.0));
        assert_eq!(hermite_phys(1, C64::new(2.0, 0.0)), C64::new(4.0, 0.0));
        // H3 = 8z^3 - 12z
        assert_eq!(hermite_phys(3, C64::new(1.0, 0.0)), C64::new(-4.0, 0.0));
    }

    #[test]
    fn matches_explicit_polynomials_at_complex_points() {
        let z = C64::new(0.3, -0.7);
        let h4 = 16.0 * z.powi(4) - 48.0 * z * z + 12.0;
        let h5 = 32.0 * z.powi(5) - 160.0 * z.powi(3) + 120.0 * z;
        assert!((hermite_phys(4, z) - h4).norm() < 1e-12);
        assert!((hermite_phys(5, z) - h5).norm() < 1e-12);
        let all = hermite_phys_all(5, z);
        assert!((all[4] - h4).norm() < 1e-12);
        assert!((all[5] - h5).norm() < 1e-12);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        // trapezoid on a fine grid is spectrally accurate for these
        let n = 8;
        let h = 0.01;
        let mut gram = vec![vec![0.0; n + 1]; n + 1];
        let mut x = -12.0;
        while x <= 12.0 {
            let phi = hermite_functions(n, x);
            for i in 0..=n {
                for j in 0..=n {
                    gram[i][j] += h * phi[i] * phi[j];
                }
            }
            x += h;
        }
        for i in 0..=n {
            for j in 0..=n {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - target).abs() < 1e-10, "{i} {j} {}", gram[i][j]);
            }
        }
    }
}
