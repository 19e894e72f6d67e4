//! Dormand–Prince 5(4) integrator with step-size control.
//!
//! Every accepted step is stored with its derivative so that cubic Hermite
//! interpolation can be used between them. The step size is additionally
//! capped so that the cubic interpolant stays within the requested tolerance:
//! the gap between the Hermite cubic and the method's quartic dense output at
//! mid-step is exactly `rcont5 / 16`, which is used as the indicator.

use crate::error::{Error, Result};

pub struct OdeProblem<F> {
    pub rhs: F,
    pub t_span: (f64, f64),
    pub y0: Vec<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeProblem<F> {
    pub fn new(rhs: F, t_span: (f64, f64), y0: Vec<f64>) -> Self {
        OdeProblem { rhs, t_span, y0, rel_tol: 1e-9, abs_tol: 1e-11 }
    }

    pub fn tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn dimension(&self) -> usize {
        self.y0.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    Stopped,
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub dy: Vec<Vec<f64>>,
    pub termination: Termination,
    pub rejected_steps: usize,
}

impl OdeSolution {
    pub fn last(&self) -> (&f64, &Vec<f64>) {
        (self.t.last().expect("non-empty"), self.y.last().expect("non-empty"))
    }

    /// Cubic Hermite interpolation between accepted steps; clamps outside the range.
    pub fn interpolate(&self, t: f64) -> Vec<f64> {
        let n = self.t.len();
        if t <= self.t[0] {
            return self.y[0].clone();
        }
        if t >= self.t[n - 1] {
            return self.y[n - 1].clone();
        }
        let i = match self.t.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return self.y[i].clone(),
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        (0..self.y[i].len())
            .map(|k| h00 * self.y[i][k] + h10 * h * self.dy[i][k] + h01 * self.y[i + 1][k] + h11 * h * self.dy[i + 1][k])
            .collect()
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

pub fn solve_ode<F: Fn(f64, &[f64], &mut [f64])>(problem: &OdeProblem<F>) -> Result<OdeSolution> {
    solve_ode_until(problem, |_, _| false)
}

/// Integrates until `t1` or until `stop(t, y)` holds after an accepted step.
pub fn solve_ode_until<F, S>(problem: &OdeProblem<F>, stop: S) -> Result<OdeSolution>
where
    F: Fn(f64, &[f64], &mut [f64]),
    S: Fn(f64, &[f64]) -> bool,
{
    let (t0, t1) = problem.t_span;
    if !(t1 > t0) {
        return Err(Error::InvalidParameter("t_span must satisfy t1 > t0".into()));
    }
    if !(problem.rel_tol > 0.0 && problem.abs_tol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    let n = problem.dimension();
    let f = &problem.rhs;
    let (rtol, atol) = (problem.rel_tol, problem.abs_tol);

    let mut t = t0;
    let mut y = problem.y0.clone();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t });
    }
    let mut k1 = vec![0.0; n];
    f(t, &y, &mut k1);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t });
    }

    let mut h = initial_step(f, t, &y, &k1, rtol, atol, t1 - t0);
    let mut sol = OdeSolution {
        t: vec![t],
        y: vec![y.clone()],
        dy: vec![k1.clone()],
        termination: Termination::Completed,
        rejected_steps: 0,
    };

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err_prev: f64 = 1e-4;
    let mut h_cap = f64::INFINITY;

    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &tmp, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h, &y_new, &mut k7);

        let finite = y_new.iter().chain(k7.iter()).all(|v| v.is_finite());
        let mut err = 0.0;
        if finite {
            for i in 0..n {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            err = (err / n as f64).sqrt();
        } else {
            err = f64::INFINITY;
        }

        if err <= 1.0 {
            // interpolation indicator
            let mut interp = 0.0;
            for i in 0..n {
                let r5 = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
                interp = f64::max(interp, (r5 / 16.0).abs() / sc);
            }
            t += h;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            sol.t.push(t);
            sol.y.push(y.clone());
            sol.dy.push(k1.clone());

            if stop(t, &y) {
                sol.termination = Termination::Stopped;
                return Ok(sol);
            }

            // PI controller
            let err_c = err.max(1e-10);
            let mut fac = 0.9 * err_c.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            fac = fac.clamp(0.2, 5.0);
            err_prev = err_c;
            if interp > 1.0 {
                h_cap = h * 0.9 * interp.powf(-0.25);
            } else if interp < 0.5 {
                h_cap = f64::INFINITY;
            }
            h = (h * fac).min(h_cap);
        } else {
            sol.rejected_steps += 1;
            if !finite {
                h *= 0.2;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::NonFiniteState { t });
                }
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                h *= fac;
            }
        }
    }
    Ok(sol)
}

fn initial_step<F: Fn(f64, &[f64], &mut [f64])>(
    f: &F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    rtol: f64,
    atol: f64,
    span: f64,
) -> f64 {
    let n = y.len();
    let sc: Vec<f64> = y.iter().map(|v| atol + rtol * v.abs()).collect();
    let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d1 = (f0.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(v, d)| v + h0 * d).collect();
    let mut f1 = vec![0.0; n];
    f(t + h0, &y1, &mut f1);
    let d2 = (f1.iter().zip(f0).zip(&sc).map(|((a, b), s)| ((a - b) / s).powi(2)).sum::<f64>() / n as f64).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(span)
}
