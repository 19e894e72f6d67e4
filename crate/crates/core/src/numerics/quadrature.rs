use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    GaussHermite,
    AdaptiveCartesian,
}

/// A one-dimensional rule. Gauss–Hermite rules integrate against e^{-x²};
/// adaptive rules carry the Kronrod-15 template on [-1, 1] and a tolerance.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
    pub tolerance: f64,
}

impl QuadratureRule {
    /// Golub–Welsch construction of the n-point Gauss–Hermite rule.
    pub fn gauss_hermite(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = (k as f64 / 2.0).sqrt();
            jacobi[(k, k - 1)] = off;
            jacobi[(k - 1, k)] = off;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // symmetrise to kill eigensolver noise
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            pairs[i] = (-x, w);
            pairs[j] = (x, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
        QuadratureRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
            kind: RuleKind::GaussHermite,
            tolerance: 0.0,
        }
    }

    pub fn adaptive_cartesian(tolerance: f64) -> Self {
        let mut nodes = Vec::with_capacity(15);
        let mut weights = Vec::with_capacity(15);
        for i in 0..7 {
            nodes.push(-XGK[i]);
            weights.push(WGK[i]);
        }
        for i in (0..8).rev() {
            nodes.push(XGK[i]);
            weights.push(WGK[i]);
        }
        QuadratureRule { nodes, weights, kind: RuleKind::AdaptiveCartesian, tolerance }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i f(x_i); for Gauss–Hermite this approximates ∫ e^{-x²} f(x) dx.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

// Kronrod 15 / Gauss 7 abscissae and weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

impl AdaptiveOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        AdaptiveOptions { abs_tol, rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// Half-width of a box that captures a centred Gaussian of standard deviation
/// `sigma` down to `rel` of its peak.
pub fn gaussian_box_half_width(sigma: f64, rel: f64) -> f64 {
    sigma * (-2.0 * rel.ln()).sqrt()
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    dim: usize,
    a: f64,
    b: f64,
    buf: &mut [f64],
) -> (Vec<f64>, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // buf holds 15 * dim samples; index 7 is the centre
    for (i, x) in XGK.iter().enumerate().take(7) {
        f(centre - half * x, &mut buf[i * dim..(i + 1) * dim]);
        f(centre + half * x, &mut buf[(14 - i) * dim..(15 - i) * dim]);
    }
    f(centre, &mut buf[7 * dim..8 * dim]);

    let mut value = vec![0.0; dim];
    let mut error: f64 = 0.0;
    for c in 0..dim {
        let at = |i: usize| buf[i * dim + c];
        let mut k = WGK[7] * at(7);
        let mut g = WG[3] * at(7);
        for i in 0..7 {
            let pair = at(i) + at(14 - i);
            k += WGK[i] * pair;
            if i % 2 == 1 {
                g += WG[i / 2] * pair;
            }
        }
        let mean = k / 2.0;
        let mut asc = WGK[7] * (at(7) - mean).abs();
        for i in 0..7 {
            asc += WGK[i] * ((at(i) - mean).abs() + (at(14 - i) - mean).abs());
        }
        let k_abs = k * half;
        let diff = ((k - g) * half).abs();
        let asc = asc * half.abs();
        let e = if asc != 0.0 && diff != 0.0 {
            asc * (200.0 * diff / asc).powf(1.5).min(1.0)
        } else {
            diff
        };
        // roundoff floor
        let floor = 50.0 * f64::EPSILON * k_abs.abs();
        value[c] = k_abs;
        error = error.max(e.max(floor));
    }
    (value, error)
}

/// Globally adaptive Gauss–Kronrod integration of a vector-valued integrand over
/// consecutive segments `breaks[0] < breaks[1] < ...`.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    dim: usize,
    mut f: F,
    breaks: &[f64],
    opts: AdaptiveOptions,
) -> Result<Integral<Vec<f64>>> {
    assert!(breaks.len() >= 2, "need at least one segment");
    let mut buf = vec![0.0; 15 * dim];
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error) = kronrod(&mut f, dim, w[0], w[1], &mut buf);
        evaluations += 15;
        heap.push(Segment { a: w[0], b: w[1], value, error });
    }
    let summary = |heap: &BinaryHeap<Segment>| {
        let mut total = vec![0.0; dim];
        let mut err = 0.0;
        for s in heap.iter() {
            for c in 0..dim {
                total[c] += s.value[c];
            }
            err += s.error;
        }
        (total, err)
    };
    let mut settled: Vec<Segment> = Vec::new();
    loop {
        let (mut total, mut err) = summary(&heap);
        for s in &settled {
            for c in 0..dim {
                total[c] += s.value[c];
            }
            err += s.error;
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = opts.abs_tol.max(opts.rel_tol * scale);
        if err <= tol || heap.is_empty() {
            return Ok(Integral { value: total, error: err, evaluations });
        }
        if heap.len() + settled.len() >= opts.max_intervals {
            return Err(Error::QuadratureNotConverged { estimate: err, tolerance: tol });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(worst.b.abs()).max(1.0) {
            settled.push(worst);
            continue;
        }
        let (v1, e1) = kronrod(&mut f, dim, worst.a, mid, &mut buf);
        let (v2, e2) = kronrod(&mut f, dim, mid, worst.b, &mut buf);
        evaluations += 30;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
}

pub fn integrate_segments(f: impl Fn(f64) -> f64, breaks: &[f64], opts: AdaptiveOptions) -> Result<Integral<f64>> {
    let out = integrate_vec(1, |x, o: &mut [f64]| o[0] = f(x), breaks, opts)?;
    Ok(Integral { value: out.value[0], error: out.error, evaluations: out.evaluations })
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: AdaptiveOptions) -> Result<Integral<f64>> {
    integrate_segments(f, &[a, b], opts)
}

/// Iterated adaptive integration over a product of segmented intervals.
pub fn integrate_2d_vec<F: Fn(f64, f64, &mut [f64])>(
    dim: usize,
    f: F,
    xbreaks: &[f64],
    ybreaks: &[f64],
    opts: AdaptiveOptions,
) -> Result<Integral<Vec<f64>>> {
    let inner_opts = AdaptiveOptions {
        abs_tol: opts.abs_tol * 0.1 / span(xbreaks).max(1.0),
        rel_tol: opts.rel_tol * 0.1,
        max_intervals: opts.max_intervals,
    };
    let mut failure: Option<Error> = None;
    let mut evaluations = 0;
    let outer = integrate_vec(
        dim,
        |x, out: &mut [f64]| {
            if failure.is_some() {
                out.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
            match integrate_vec(dim, |y, o: &mut [f64]| f(x, y, o), ybreaks, inner_opts) {
                Ok(r) => {
                    evaluations += r.evaluations;
                    out.copy_from_slice(&r.value);
                }
                Err(e) => {
                    failure = Some(e);
                    out.iter_mut().for_each(|v| *v = 0.0);
                }
            }
        },
        xbreaks,
        opts,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Integral { value: outer.value, error: outer.error, evaluations })
}

pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    xbreaks: &[f64],
    ybreaks: &[f64],
    opts: AdaptiveOptions,
) -> Result<Integral<f64>> {
    let out = integrate_2d_vec(1, |x, y, o: &mut [f64]| o[0] = f(x, y), xbreaks, ybreaks, opts)?;
    Ok(Integral { value: out.value[0], error: out.error, evaluations: out.evaluations })
}

fn span(breaks: &[f64]) -> f64 {
    breaks.last().copied().unwrap_or(0.0) - breaks.first().copied().unwrap_or(0.0)
}

/// Sorted breakpoints of `[-half, half]` shifted by `centre`, with any interior
/// discontinuities inserted.
pub fn box_breaks(centre: f64, half: f64, interior: &[f64]) -> Vec<f64> {
    let lo = centre - half;
    let hi = centre + half;
    let mut out = vec![lo];
    let mut inner: Vec<f64> = interior.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(|a, b| a.total_cmp(b));
    inner.dedup();
    out.extend(inner);
    out.push(hi);
    out
}
