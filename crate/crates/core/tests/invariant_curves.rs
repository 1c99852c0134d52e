//! Invariant-curve probes and the caustics they carry.

use refraction_billiard::caustics::{circular_caustic_radii, perturbed_caustic, tangency_check, CausticKind};
use refraction_billiard::orbit::{invariant_curve_probe, iterate, rotation_number, ProbeOptions};
use refraction_billiard::return_map::total_shift;
use refraction_billiard::{BoundaryState, MapMethod, PerturbationProfile, PhysParams};

fn fig() -> PhysParams {
    PhysParams::new(2.5, 2.0, 2.0, 1.0).unwrap()
}

#[test]
fn circle_probe_is_flat_and_caustics_are_circles() {
    let p = fig();
    let b = PerturbationProfile::circle();
    let target = total_shift(1.0, &p);
    let opts = ProbeOptions { iterations: 400, tuning_iterations: 200, branch_hint: Some(1.0), ..Default::default() };
    let r = invariant_curve_probe(target, &b, &p, &opts).unwrap();
    assert!((r.initial.action - 1.0).abs() < 1e-9);
    assert!(r.max_residual < 1e-10);
    let (re, ri) = circular_caustic_radii(1.0, &p).unwrap();
    let ce = perturbed_caustic(&r.curve, CausticKind::Outer, &b, &p).unwrap();
    let ci = perturbed_caustic(&r.curve, CausticKind::Inner, &b, &p).unwrap();
    assert!((ce.circular_radius.unwrap() - re).abs() < 1e-12);
    assert!((ci.circular_radius.unwrap() - ri).abs() < 1e-12);
}

#[test]
fn perturbed_caustics_are_envelopes_touched_by_the_orbit() {
    let p = fig();
    let b = PerturbationProfile::cosine(1e-3, 2).unwrap();
    let target = total_shift(1.0, &p);
    let opts = ProbeOptions { branch_hint: Some(1.0), ..Default::default() };
    let r = invariant_curve_probe(target, &b, &p, &opts).unwrap();
    assert!(r.max_residual < 5e-3, "curve residual {}", r.max_residual);
    assert!((r.measured.value - target).abs() < 1e-4);

    let ce = perturbed_caustic(&r.curve, CausticKind::Outer, &b, &p).unwrap();
    let ci = perturbed_caustic(&r.curve, CausticKind::Inner, &b, &p).unwrap();
    for c in [&ce, &ci] {
        assert!(c.circular_radius.is_none());
        assert!(c.max_envelope_residual < 1e-7, "envelope residual {}", c.max_envelope_residual);
        let (a, z) = (c.samples.first().unwrap(), c.samples.last().unwrap());
        assert!((a.x - z.x).hypot(a.y - z.y) < 1e-8, "caustic does not close");
    }
    // O(eps) deformation of the circular caustics
    let (re, ri) = circular_caustic_radii(1.0, &p).unwrap();
    let dev = |c: &refraction_billiard::caustics::CausticCurve, r0: f64| {
        c.samples.iter().map(|s| (s.x.hypot(s.y) - r0).abs()).fold(0.0, f64::max)
    };
    assert!(dev(&ce, re) < 2e-2 && dev(&ce, re) > 0.0);
    assert!(dev(&ci, ri) < 2e-2 && dev(&ci, ri) > 0.0);

    let trace = iterate(r.initial, 200, &b, &p, MapMethod::Numeric, true);
    let rep = tangency_check(&trace, &ce, &ci, &p);
    assert!(rep.max() < 5e-3, "tangency {rep:?}");
    assert_eq!(rep.skipped, 0);
}

#[test]
fn reversed_action_negates_rotation() {
    let p = fig();
    let b = PerturbationProfile::circle();
    let s = BoundaryState::new(0.4, 0.6);
    let fwd = rotation_number(&iterate(s, 300, &b, &p, MapMethod::ClosedForm, false)).unwrap();
    let bwd = rotation_number(&iterate(BoundaryState::new(0.4, -0.6), 300, &b, &p, MapMethod::ClosedForm, false)).unwrap();
    assert!((fwd.value + bwd.value).abs() < 1e-12);
    assert!((fwd.value - total_shift(0.6, &p)).abs() < 1e-12);
}
