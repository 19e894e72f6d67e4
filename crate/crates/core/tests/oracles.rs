use proptest::prelude::*;
use sqzq_core::fields::{Constant, FnField2, Growth, Rectangle};
use sqzq_core::nonsepstates::{self, NonSepParams};
use sqzq_core::onemode::{self, OneModePhasePoint, SqueezeParameter};
use sqzq_core::pdm::{self, ClassicalForm, PdmModel, SemiclassicalModel, SolverOptions};
use sqzq_core::sepstates::{self, PhasePoint, TwoModeParams};
use sqzq_core::C64;

fn tau() -> impl Strategy<Value = C64> {
    (0.0..0.8f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| C64::from_polar(r, a))
}

fn point() -> impl Strategy<Value = PhasePoint> {
    prop::array::uniform4(-1.0..1.0f64).prop_map(|v| PhasePoint::new(v[0], v[1], v[2], v[3]))
}

fn nonsep() -> impl Strategy<Value = NonSepParams> {
    (tau(), tau(), 0.6..1.5f64, 0.6..1.5f64, 0.7..1.3f64, 0.0..3.1f64).prop_map(|(t1, t2, l1, l2, h, phi)| {
        NonSepParams::from_taus([t1, t2], [l1, l2], h, phi).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_mode_overlap_is_symmetric_and_bounded(t in tau(), q in -1.0..1.0f64, p in -1.0..1.0f64, dq in -1.0..1.0f64, dp in -1.0..1.0f64) {
        let s = SqueezeParameter::from_tau(t, 0.9, 1.1).unwrap();
        let a = OneModePhasePoint::new(q, p);
        let b = OneModePhasePoint::new(q + dq, p + dp);
        let ab = onemode::overlap_sq(a, b, &s);
        prop_assert!((ab - onemode::overlap_sq(b, a, &s)).abs() < 1e-14);
        prop_assert!(ab <= 1.0 + 1e-14 && ab > 0.0);
        prop_assert!((onemode::overlap_sq(a, a, &s) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nonsep_overlap_is_symmetric_and_one_on_diagonal(p in nonsep(), a in point(), b in point()) {
        let ab = nonsepstates::nonsep_overlap_sq_closed(a, b, &p);
        prop_assert!((ab - nonsepstates::nonsep_overlap_sq_closed(b, a, &p)).abs() < 1e-13);
        prop_assert!((nonsepstates::nonsep_overlap_sq_closed(a, a, &p) - 1.0).abs() < 1e-13);
        prop_assert!(ab <= 1.0 + 1e-13);
    }

    #[test]
    fn portraits_preserve_constants(p in nonsep(), a in point(), c in -3.0..3.0f64) {
        let h = Constant(c);
        prop_assert!((nonsepstates::nonsep_portrait_hq(&h, a, &p).unwrap() - c).abs() < 1e-10);
        prop_assert!((sepstates::portrait_hq(&h, a, &p.modes).unwrap() - c).abs() < 1e-10);
    }

    #[test]
    fn box_portrait_lies_in_unit_interval(p in nonsep(), a in point()) {
        let r = Rectangle::centred([0.5, 0.8]);
        let v = nonsepstates::nonsep_portrait_hq(&r, a, &p).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
    }

    #[test]
    fn free_classical_motion_matches_exact(q0 in -0.9..0.9f64, v0 in -2.0..2.0f64, l in 0.5..2.0f64) {
        let m = PdmModel::new(1.3, [l, 1.0], [0.0, 0.0]).unwrap();
        let q0 = q0 / l;
        let tr = pdm::classical_integrate(&m, [q0, 0.0], [v0, 0.5], (0.0, 8.0), ClassicalForm::Angle, SolverOptions::default().with_output_dt(0.25)).unwrap();
        for s in &tr.samples {
            prop_assert!((s.q[0] - pdm::classical_exact(&m, 0, q0, v0, s.t).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn classical_energy_is_conserved(vb in 0.0..20.0f64, v0 in -1.5..1.5f64) {
        let m = PdmModel::new(2.0, [1.5, 1.0], [vb, 1.0]).unwrap();
        let tr = pdm::classical_integrate(&m, [0.1, -0.2], [v0, 0.3], (0.0, 20.0), ClassicalForm::Angle, SolverOptions::default()).unwrap();
        prop_assert!(tr.energy_drift() < 1e-8);
    }
}

#[test]
fn nonsep_overlap_against_gaussian_integral_on_fixed_draws() {
    let p = NonSepParams::from_taus([C64::new(0.3, -0.4), C64::new(-0.5, 0.2)], [0.8, 1.3], 0.9, 1.1).unwrap();
    for (a, b) in [
        (PhasePoint::new(0.1, 0.2, -0.3, 0.4), PhasePoint::new(-0.5, 0.1, 0.2, 0.0)),
        (PhasePoint::new(0.0, 0.0, 0.0, 0.0), PhasePoint::new(1.0, -1.0, 0.5, 0.5)),
    ] {
        let oracle = nonsepstates::nonsep_overlap_sq(a, b, &p).unwrap();
        assert!((nonsepstates::nonsep_overlap_sq_closed(a, b, &p) - oracle).abs() < 1e-13);
    }
}

#[test]
fn separable_momentum_portrait_against_four_dimensional_oracle() {
    let params = TwoModeParams::from_taus([C64::new(0.4, 0.2), C64::new(-0.3, 0.0)], [0.9, 1.1], 1.2).unwrap();
    let h = FnField2::new(|q: [f64; 2]| (-(q[0] * q[0]) - 0.3 * q[1] * q[1]).exp(), Growth::Bounded);
    let pt = PhasePoint::new(0.2, -0.1, 0.5, -0.4);
    let closed = sepstates::portrait_p_h(0, &h, pt, &params).unwrap();
    let oracle = sepstates::sep_portrait_oracle(&h, [1, 0], pt, &params, 1e-9).unwrap();
    assert!((closed - oracle).abs() < 1e-8 * oracle.abs().max(1.0));
}

#[test]
fn semiclassical_energy_conserved_for_fig6_model() {
    let (m, p) = pdm::fig6_params().unwrap();
    let s = SemiclassicalModel::new(m, p).unwrap();
    let tr = pdm::semiclassical_integrate(&s, [0.1, 0.2], [0.5, 0.5], (0.0, 10.0), SolverOptions::default()).unwrap();
    assert!(tr.energy_drift() < 1e-8);
}
