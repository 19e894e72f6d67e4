//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. Exits nonzero if a criterion fails that is
//! not on `KNOWN_RED`; known-red criteria still print FAIL.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use sqzq_core::fields::{FnField2, Growth, Rectangle};
use sqzq_core::nonsepstates::{self, NonSepParams};
use sqzq_core::onemode::{self, OneModePhasePoint, SqueezeParameter};
use sqzq_core::pdm::{self, Classification, ClassicalForm, PdmModel, SemiclassicalModel, SolverOptions};
use sqzq_core::quantmap::{self, ClassicalFunction, StateFamily};
use sqzq_core::sepstates::{self, PhasePoint, TwoModeParams};
use sqzq_core::verify::{self, rel_dev, Draws, Suite, VerifyConfig, VerifyReport};
use sqzq_core::{Result, C64};

/// Criteria whose printed closed forms cannot be matched; see the decisions ledger.
const KNOWN_RED: &[usize] = &[5];

type Criterion = (usize, &'static str, fn() -> Result<Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn suite(suites: &[Suite], draws: usize) -> Result<VerifyReport> {
    verify::run(&VerifyConfig { draws, suites: suites.to_vec(), ..Default::default() })
}

fn failing(r: &VerifyReport) -> Vec<String> {
    r.checks.iter().filter(|c| !c.passed).map(|c| format!("{}={:.2e}", c.name, c.max_deviation)).collect()
}

fn worst(r: &VerifyReport) -> f64 {
    r.checks.iter().filter(|c| c.passed).map(|c| c.max_deviation).fold(0.0, f64::max)
}

fn exact_solution() -> Result<Outcome> {
    let t0 = Instant::now();
    let m = PdmModel::new(1.0, [1.0, 1.0], [0.0, 0.0])?;
    let tr = pdm::classical_integrate(
        &m,
        [0.0, 0.0],
        [1.0, 0.0],
        (0.0, 65.0),
        ClassicalForm::Angle,
        SolverOptions::default().with_output_dt(0.01),
    )?;
    let dt = t0.elapsed().as_secs_f64();
    let err = tr.samples.iter().map(|s| (s.q[0] - s.t.sin()).abs()).fold(0.0, f64::max);
    outcome(err < 1e-6 && dt < 1.0, format!("max |q - sin t| = {err:.2e}, {dt:.3} s"))
}

fn closed_orbits() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["fig3a", "fig3b", "fig3c"] {
        let p = pdm::preset(name).expect("bundled preset");
        let r = p.recurrence(SolverOptions::default())?.expect("fig3 presets have a period");
        ok &= r < 1e-3;
        parts.push(format!("{name} {r:.1e} at t={:.4}", p.period.unwrap_or(f64::NAN)));
    }
    outcome(ok, parts.join(", "))
}

fn identity_resolution() -> Result<Outcome> {
    let r = suite(&[Suite::Identity], 25)?;
    let names = ["one_mode_identity_tau_0", "one_mode_identity_tau_0.5", "one_mode_identity_tau_0.7i", "holomorphic_hermite_orthogonality"];
    let ok = names.iter().all(|n| r.check(n).is_some_and(|c| c.passed));
    outcome(ok, format!("worst {:.2e}; failing {:?}", worst(&r), failing(&r)))
}

fn canonical_quantisation() -> Result<Outcome> {
    let r = suite(&[Suite::Canonical], 25)?;
    let real = [0.0, 0.5, -0.6]
        .iter()
        .map(|&t| quantmap::symmetrisation_constant(&SqueezeParameter::from_tau(C64::new(t, 0.0), 0.9, 1.2).unwrap()).abs())
        .fold(0.0, f64::max);
    let ok = r.all_passed() && real == 0.0;
    outcome(ok, format!("worst {:.2e}; qp constant for real tau {real}; failing {:?}", worst(&r), failing(&r)))
}

fn oracle_equivalence() -> Result<Outcome> {
    let r = suite(&[Suite::Overlap, Suite::Portraits, Suite::Nonsep, Suite::Pdm], 25)?;
    let corrections: Vec<String> =
        r.checks.iter().filter_map(|c| c.correction.as_ref().map(|k| format!("{}: {k}", c.name))).collect();
    let draws_ok = r.checks.iter().filter(|c| c.name != "separable_limit_grid").all(|c| c.draws >= 25);
    outcome(
        r.all_passed() && draws_ok,
        format!("{} checks, {} corrections reported; failing {:?}", r.checks.len(), corrections.len(), failing(&r)),
    )
}

fn bogoliubov() -> Result<Outcome> {
    let t0 = Instant::now();
    let r = suite(&[Suite::Bogoliubov], 25)?;
    let dt = t0.elapsed().as_secs_f64();
    let c = r.check("bogoliubov_intertwining_residual").expect("bogoliubov check");
    outcome(c.passed && dt < 10.0, format!("residual {:.2e} over {} draws at N=40, {dt:.2} s", c.max_deviation, c.draws))
}

fn linear_rows() -> Result<Outcome> {
    let r = suite(&[Suite::LinearRows], 25)?;
    let mut ok = r.check("linear_row_one_physical_printed").is_some_and(|c| c.passed);
    for f in ["q1", "q2"] {
        for conv in ["physical", "printed_labels"] {
            let matched = r.check(&format!("linear_row_{f}_{conv}_printed")).is_some_and(|c| c.passed);
            let erratum = r.errata.iter().any(|e| e.item == format!("linear_row_{f}_{conv}"));
            ok &= matched || erratum;
            ok &= r.check(&format!("linear_row_{f}_{conv}_derived")).is_some_and(|c| c.passed);
        }
    }
    let errata: Vec<&str> = r.errata.iter().map(|e| e.item.as_str()).collect();
    outcome(ok, format!("derived rows within {:.1e}; errata {errata:?}", worst(&r)))
}

fn semiclassical_phenomenology() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, want) in [("fig6a", Classification::Bounded), ("fig6b", Classification::Bounded), ("fig6c", Classification::Escaped)] {
        let t0 = Instant::now();
        let tr = pdm::preset(name).expect("bundled preset").run(SolverOptions::default())?;
        let dt = t0.elapsed().as_secs_f64();
        let drift = tr.energy_drift();
        ok &= tr.classification == want && drift < 1e-6 && dt < 30.0;
        parts.push(format!("{name} {:?} drift {drift:.1e} {dt:.2} s", tr.classification));
    }
    outcome(ok, parts.join(", "))
}

fn gradients() -> Result<Outcome> {
    let mut d = Draws::new(7);
    let mut dev: f64 = 0.0;
    for _ in 0..100 {
        let lam = [d.uniform(0.8, 2.0), d.uniform(0.8, 2.0)];
        let model = PdmModel::new(d.uniform(1.0, 5.0), lam, [d.uniform(0.0, 50.0), d.uniform(0.0, 50.0)])?;
        let params = TwoModeParams::from_taus([d.real_tau(0.9), d.real_tau(0.9)], [d.uniform(0.2, 0.8), d.uniform(0.2, 0.8)], d.uniform(0.5, 1.5))?;
        let s = SemiclassicalModel::new(model, params)?;
        let q = [d.uniform(-1.2, 1.2) / lam[0], d.uniform(-1.2, 1.2) / lam[1]];
        let l = s.landscape(q);
        for k in 0..2 {
            let h = 1e-5;
            let mut qp = q;
            let mut qm = q;
            qp[k] += h;
            qm[k] -= h;
            let (a, b) = (s.landscape(qp), s.landscape(qm));
            // floor: a gradient that is tiny against the function's own scale is compared absolutely
            let fd = (a.veff - b.veff) / (2.0 * h);
            dev = dev.max(rel_dev(l.dveff[k], fd, 1e-3 * l.veff.abs().max(1e-3)));
            for j in 0..2 {
                let fd = (a.mass[j] - b.mass[j]) / (2.0 * h);
                dev = dev.max(rel_dev(l.dmass[j][k], fd, 1e-3 * l.mass[j].abs().max(1e-3)));
            }
        }
    }
    outcome(dev < 1e-6, format!("worst relative deviation {dev:.2e} over 100 points"))
}

fn coherent_alpha(q: f64, p: f64, lam: f64, hbar: f64) -> C64 {
    C64::new(q / (SQRT_2 * lam), lam * p / (SQRT_2 * hbar))
}

fn limits() -> Result<Outcome> {
    // phi = 0, real tau: non-separable collapses to separable
    let mut sep: f64 = 0.0;
    let a = PhasePoint::new(0.3, -0.2, 0.4, -0.5);
    let b = PhasePoint::new(-0.1, 0.5, 0.2, 0.1);
    let h = FnField2::new(|q: [f64; 2]| (-(q[0] - 0.2).powi(2) - 0.5 * (q[1] + 0.1).powi(2)).exp(), Growth::Bounded);
    for t1 in [-0.6, -0.2, 0.0, 0.3, 0.7] {
        for t2 in [-0.5, 0.1, 0.6] {
            for (lam, hbar) in [([1.0, 1.0], 1.0), ([0.7, 1.3], 0.8)] {
                let modes = TwoModeParams::from_taus([C64::new(t1, 0.0), C64::new(t2, 0.0)], lam, hbar)?;
                let p = NonSepParams::new(modes, 0.0)?;
                sep = sep.max((nonsepstates::nonsep_overlap_sq(a, b, &p)? - sepstates::sep_overlap_sq(a, b, &modes)).abs());
                sep = sep.max((nonsepstates::nonsep_overlap_sq_closed(a, b, &p) - sepstates::sep_overlap_sq(a, b, &modes)).abs());
                let r0 = nonsepstates::nonsep_wavefunction(&p, a, [0.0, 0.0])? / sepstates::sep_wavefunction(a, &modes, [0.0, 0.0]);
                for x in [[0.3, -0.4], [-0.7, 0.2], [1.1, 0.9]] {
                    let r = nonsepstates::nonsep_wavefunction(&p, a, x)? / sepstates::sep_wavefunction(a, &modes, x);
                    sep = sep.max((r - r0).norm()).max((r.norm() - 1.0).abs());
                }
                sep = sep.max((nonsepstates::nonsep_portrait_hq(&h, a, &p)? - sepstates::portrait_hq(&h, a, &modes)?).abs());
                sep = sep.max(p.bilinear().2.norm());
            }
        }
    }

    // tau = 0: coherent values
    let (mut exact, mut numeric): (f64, f64) = (0.0, 0.0);
    for (lam, hbar) in [(1.0, 1.0), (0.7, 1.4)] {
        let p = SqueezeParameter::coherent(lam, hbar)?;
        let (u, v) = (OneModePhasePoint::new(0.4, -0.3), OneModePhasePoint::new(-0.2, 0.6));
        let want = (-(coherent_alpha(u.q, u.p, lam, hbar) - coherent_alpha(v.q, v.p, lam, hbar)).norm_sqr()).exp();
        exact = exact.max((onemode::overlap_sq(u, v, &p) - want).abs());
        let al = coherent_alpha(u.q, u.p, lam, hbar);
        let fock = onemode::fock_coefficients(al, &p, 10);
        let mut fact = 1.0;
        for (n, c) in fock.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let w = (-al.norm_sqr() / 2.0).exp() * al.powu(n as u32) / fact.sqrt();
            exact = exact.max((c.norm() - w.norm()).abs());
        }
        exact = exact.max(quantmap::symmetrisation_constant(&p).abs());

        for phi in [0.0, 0.4, 1.3] {
            let ns = NonSepParams::from_taus([C64::new(0.0, 0.0); 2], [lam, 1.2], hbar, phi)?;
            let modes = ns.modes;
            let al = [coherent_alpha(a.q1, a.p1, lam, hbar), coherent_alpha(a.q2, a.p2, 1.2, hbar)];
            let bl = [coherent_alpha(b.q1, b.p1, lam, hbar), coherent_alpha(b.q2, b.p2, 1.2, hbar)];
            let want = (-(al[0] - bl[0]).norm_sqr() - (al[1] - bl[1]).norm_sqr()).exp();
            exact = exact.max((nonsepstates::nonsep_overlap_sq_closed(a, b, &ns) - want).abs());
            numeric = numeric.max((nonsepstates::nonsep_overlap_sq(a, b, &ns)? - want).abs());
            let rect = Rectangle { lo: [-0.5, -0.8], hi: [0.6, 0.4] };
            numeric = numeric.max((nonsepstates::nonsep_portrait_hq(&rect, a, &ns)? - sepstates::portrait_hq(&rect, a, &modes)?).abs());
        }
        let modes = TwoModeParams::from_taus([C64::new(0.0, 0.0); 2], [lam, 1.2], hbar)?;
        // lower-symbol kernel |<q|q'>|^2 has position width lambda for coherent states
        exact = exact.max((modes.portrait_sd(0) - lam).abs());
        let dq = quantmap::quantise(&ClassicalFunction::q(), &StateFamily::OneMode(p), 6)?
            .matrix
            .block_deviation(&sqzq_core::numerics::TruncatedOperator::position(7, lam), 7);
        numeric = numeric.max(dq);
    }
    let ok = sep < 1e-10 && exact < 1e-12 && numeric < 1e-8;
    outcome(ok, format!("separable limit {sep:.1e}; coherent analytic {exact:.1e}, numeric {numeric:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "exact classical solution q = sin t", exact_solution),
        (2, "closed classical orbits", closed_orbits),
        (3, "one-mode resolution of identity", identity_resolution),
        (4, "canonical quantisation", canonical_quantisation),
        (5, "closed forms against quadrature oracles", oracle_equivalence),
        (6, "Bogoliubov transformation", bogoliubov),
        (7, "two-mode linear quantisation rows", linear_rows),
        (8, "semiclassical bounded and escaping runs", semiclassical_phenomenology),
        (9, "analytic gradients against central differences", gradients),
        (10, "separable and coherent limits", limits),
    ];
    let mut unexpected = 0;
    for (id, title, f) in criteria {
        let out = f().unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") });
        let known = KNOWN_RED.contains(&id);
        let tag = match (out.passed, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag} criterion {id:>2}: {title}: {}", out.detail);
        if !out.passed && !known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
