//! End-to-end flows through the public API: building instances, decomposing
//! them, transporting between level scales, and running the verifiers.

use bbl_core::rational::{rat, to_f64, Rational};
use bbl_core::{functions, geometry, lifting, supconv, LiftingDomain, MeanSpec, SparseFunction, Verdict};
use num::One;

#[test]
fn extremal_family_flows_through_every_layer() {
    let gamma = rat(1, 4);
    let p = 1.0 / 3.0;
    let triple = geometry::extremal_instance(&gamma, 8, p, 1).unwrap();
    let spec = MeanSpec::symmetric(p).unwrap();

    // the constructed h dominates the minimal admissible one
    let h_star = supconv::min_admissible_h(&triple.f, &triple.g, &spec).unwrap();
    for (z, v) in h_star.iter() {
        assert!(triple.h.value(z).unwrap() >= v);
    }
    assert!(to_f64(&h_star.mass()) <= to_f64(&triple.h.mass()) + 1e-12);

    // equal masses let the transport map run between the two level scales
    assert_eq!(triple.f.mass(), Rational::one());
    assert_eq!(triple.g.mass(), Rational::one());
    let df = triple.f.layer_cake().unwrap();
    let dg = triple.g.layer_cake().unwrap();
    let map = functions::transport_map(&dg, &df).unwrap();
    let (ref s_g, ref s_f) = map.breakpoints().last().unwrap();
    assert_eq!(s_g, dg.max_value());
    assert_eq!(s_f, df.max_value());
    for (t, s) in map.breakpoints() {
        assert_eq!(dg.cumulative(t), df.cumulative(s));
    }

    // the same f is too concentrated for the gated verifier
    let report = supconv::verify_main_theorem(&triple.f, &triple.g, &spec, 0.1, 3, 5).unwrap();
    assert_eq!(report.verdict, Verdict::HypothesisNotMet);
}

#[test]
fn indicator_instance_agrees_across_modules() {
    let a = geometry::PointSet::interval(0, 49);
    let b = geometry::PointSet::interval(10, 39);
    let f = SparseFunction::indicator(&a).unwrap();
    let g = SparseFunction::indicator(&b).unwrap();
    let spec = MeanSpec::symmetric(0.25).unwrap();

    // Σh* for indicators is exactly the sumset size
    let h = supconv::min_admissible_h(&f, &g, &spec).unwrap();
    let s = geometry::sumset(&a, &b).unwrap();
    assert_eq!(h.mass(), rat(s.len() as i64, 1));

    // and the lifting engine computes the identical function
    let domain = LiftingDomain::lattice_add(1, 0.25, 0.5).unwrap();
    let via_lift = lifting::lift_min_admissible_h(&domain, &f, &g).unwrap();
    assert_eq!(via_lift, h);

    // one-dimensional deficit of two intervals: (79+1) - 50 - 30 = 0... the
    // sumset of [0,49] and [10,39] is [10,88], 79 points, deficit -1
    assert_eq!(s.len(), 79);
    assert!((geometry::bm_deficit(&a, &b).unwrap() + 1.0).abs() < 1e-12);
}
