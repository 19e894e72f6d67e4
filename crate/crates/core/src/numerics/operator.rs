use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Dense operator on the Fock space truncated to `dim` levels (per mode, or
/// the product space for two-mode operators built with [`TruncatedOperator::kron`]).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    entries: DMatrix<C64>,
}

impl TruncatedOperator {
    pub fn from_matrix(entries: DMatrix<C64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operator must be square");
        TruncatedOperator { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(DMatrix::identity(dim, dim))
    }

    /// a|n⟩ = √n |n-1⟩, i.e. entry (n, n+1) = √(n+1).
    pub fn annihilation(dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for n in 0..dim.saturating_sub(1) {
            m[(n, n + 1)] = C64::new(((n + 1) as f64).sqrt(), 0.0);
        }
        Self::from_matrix(m)
    }

    pub fn creation(dim: usize) -> Self {
        Self::annihilation(dim).dagger()
    }

    pub fn number(dim: usize) -> Self {
        Self::from_matrix(DMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) }))
    }

    /// x̂ = λ(a + a†)/√2.
    pub fn position(dim: usize, lambda: f64) -> Self {
        let a = Self::annihilation(dim);
        (a.clone() + a.dagger()).scale(C64::new(lambda / std::f64::consts::SQRT_2, 0.0))
    }

    /// p̂ = (ħ/λ)(a - a†)/(i√2).
    pub fn momentum(dim: usize, lambda: f64, hbar: f64) -> Self {
        let a = Self::annihilation(dim);
        (a.clone() - a.dagger()).scale(C64::new(0.0, -hbar / (lambda * std::f64::consts::SQRT_2)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.entries[(n, m)]
    }

    pub fn dagger(&self) -> Self {
        Self::from_matrix(self.entries.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_matrix(&self.entries * s)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self::from_matrix(&self.entries * &other.entries - &other.entries * &self.entries)
    }

    /// Tensor product; mode 1 is the slow index.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_matrix(self.entries.kronecker(&other.entries))
    }

    /// Upper-left k×k block.
    pub fn block(&self, k: usize) -> Self {
        let k = k.min(self.dim());
        Self::from_matrix(self.entries.view((0, 0), (k, k)).into_owned())
    }

    pub fn max_norm(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// max |A - B| over the upper-left k×k block.
    pub fn block_deviation(&self, other: &Self, k: usize) -> f64 {
        let k = k.min(self.dim()).min(other.dim());
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                worst = worst.max((self.entries[(i, j)] - other.entries[(i, j)]).norm());
            }
        }
        worst
    }

    /// max |A - A†| / 2.
    pub fn anti_hermitian_part(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(0.5 * (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl Add for TruncatedOperator {
    type Output = TruncatedOperator;
    fn add(self, rhs: Self) -> Self {
        TruncatedOperator::from_matrix(self.entries + rhs.entries)
    }
}

impl Sub for TruncatedOperator {
    type Output = TruncatedOperator;
    fn sub(self, rhs: Self) -> Self {
        TruncatedOperator::from_matrix(self.entries - rhs.entries)
    }
}

impl Mul for &TruncatedOperator {
    type Output = TruncatedOperator;
    fn mul(self, rhs: Self) -> TruncatedOperator {
        TruncatedOperator::from_matrix(&self.entries * &rhs.entries)
    }
}

impl Mul for TruncatedOperator {
    type Output = TruncatedOperator;
    fn mul(self, rhs: Self) -> TruncatedOperator {
        &self * &rhs
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Scaling-and-squaring Padé(13) exponential of a dense complex matrix.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let norm = one_norm(m);
    if norm == 0.0 {
        return DMatrix::identity(n, n);
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = m * C64::new(2f64.powi(-s), 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9)) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8)) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular for scaled input");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

pub fn matrix_exp(m: &TruncatedOperator) -> TruncatedOperator {
    TruncatedOperator::from_matrix(expm(m.entries()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_structure() {
        let a = TruncatedOperator::annihilation(6);
        assert_eq!(a.get(2, 3), C64::new(3f64.sqrt(), 0.0));
        assert_eq!(a.get(3, 2), C64::new(0.0, 0.0));
        let comm = a.commutator(&a.dagger());
        assert!(comm.block_deviation(&TruncatedOperator::identity(6), 5) < 1e-14);
        let n = &a.dagger() * &a;
        assert!(n.block_deviation(&TruncatedOperator::number(6), 6) < 1e-14);
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        let id = matrix_exp(&TruncatedOperator::zeros(5));
        assert!(id.block_deviation(&TruncatedOperator::identity(5), 5) == 0.0);
        let theta = 0.7;
        let gen = TruncatedOperator::number(8).scale(C64::new(0.0, theta));
        let e = matrix_exp(&gen);
        for n in 0..8 {
            assert!((e.get(n, n) - C64::from_polar(1.0, n as f64 * theta)).norm() < 1e-13);
        }
    }

    #[test]
    fn displacement_column_is_glauber() {
        let dim = 30;
        let alpha = C64::new(0.3, 0.0);
        let a = TruncatedOperator::annihilation(dim);
        let gen = a.dagger().scale(alpha) - a.scale(alpha.conj());
        let d = matrix_exp(&gen);
        let mut coeff = (-0.5 * alpha.norm_sqr()).exp();
        for n in 0..=10 {
            let want = alpha.powu(n as u32) * coeff;
            assert!((d.get(n, 0) - want).norm() < 1e-8, "n={n}");
            coeff /= ((n + 1) as f64).sqrt();
        }
    }

    #[test]
    fn large_norm_is_scaled() {
        // exp of a rotation generator with large angle
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::new(-40.0, 0.0);
        m[(1, 0)] = C64::new(40.0, 0.0);
        let e = expm(&m);
        assert!((e[(0, 0)].re - 40f64.cos()).abs() < 1e-11);
        assert!((e[(1, 0)].re - 40f64.sin()).abs() < 1e-11);
    }
}
