/// Complementary error function on the real line.
pub fn erfc_real(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal density with standard deviation `s`, evaluated at `y`.
pub fn gaussian_density(y: f64, s: f64) -> f64 {
    (-0.5 * (y / s).powi(2)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values at 40 digits
    const TABLE: &[(f64, f64)] = &[
        (-3.0, 1.9999779095030014146),
        (-1.5, 1.9661051464753107271),
        (-0.5, 1.5204998778130465377),
        (0.1, 0.8875370839817151016),
        (0.5, 0.47950012218695346232),
        (1.0, 0.15729920705028513066),
        (2.0, 0.0046777349810472658379),
        (3.5, 7.4309837234141274552e-7),
        (5.0, 1.5374597944280348502e-12),
        (7.5, 2.7766493860305691007e-26),
        (10.0, 2.088487583762544757e-45),
    ];

    #[test]
    fn reference_values() {
        for &(x, want) in TABLE {
            let got = erfc_real(x);
            assert!(((got - want) / want).abs() <= 1e-14, "erfc({x}) = {got:e}, want {want:e}");
        }
    }

    #[test]
    fn limits_and_reflection() {
        assert_eq!(erfc_real(0.0), 1.0);
        assert!(erfc_real(40.0).abs() < 1e-300);
        for i in 0..200 {
            let x = -10.0 + 0.1 * i as f64;
            assert!((erfc_real(-x) - (2.0 - erfc_real(x))).abs() < 1e-15);
        }
    }
}
