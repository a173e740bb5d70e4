//! Cross-module integration: the full instance pipeline, the signed
//! ledger, semistable preparation, scaling, and output determinism.

use num_traits::Zero;
use std::collections::BTreeMap;
use tropdeg::cone::Cone;
use tropdeg::degeneration::{build_degeneration, prepare_model, DegenerationFan};
use tropdeg::exactlat::{vec_i64, Int, IntVec};
use tropdeg::fan::{psi_scale, stellar_subdivide};
use tropdeg::grassmann::GrassmannInstance;
use tropdeg::jsonio;
use tropdeg::normalfan::{placement, PointConfiguration};
use tropdeg::strata::{
    ledger_refinement_check, sigma_y_member, span_dimension, volume_ledger, TorusEvaluator,
};

fn gr_instance(d: usize) -> (GrassmannInstance, DegenerationFan) {
    let inst = GrassmannInstance::build(4, d, 1).expect("valid parameters");
    let df = build_degeneration(&inst.base_fan, &inst.config, 1).expect("strongly convex");
    (inst, df)
}

#[test]
fn grassmann_ledger_has_seven_signed_entries() {
    let (inst, df) = gr_instance(2);
    let ev = inst.unit_evaluator(3);
    let ledger = volume_ledger(&df, &ev, inst.n_rank(), 3).expect("membership decidable");
    assert_eq!(ledger.entries.len(), 7);
    let plus = ledger.entries.iter().filter(|e| e.sign == 1).count();
    let minus = ledger.entries.iter().filter(|e| e.sign == -1).count();
    assert_eq!((plus, minus), (4, 3), "four rays and three two-cones");
    assert_eq!(ledger.signed_count(), 1);
    for e in &ledger.entries {
        assert!(e.stratum.exact);
        assert!(e.stratum.product_split.is_some());
        assert!(e.stratum.span_dim >= 2);
        assert!(!e.stratum.probabilistic);
        let expected_sign = if e.stratum.cone.dim() % 2 == 1 { 1 } else { -1 };
        assert_eq!(e.sign, expected_sign);
    }
}

#[test]
fn grassmann_ledger_survives_stellar_refinement() {
    let (inst, df) = gr_instance(2);
    let ev = inst.unit_evaluator(5);
    // Subdivide at the middle of σ₁: the two-dimensional entry splits into
    // two two-cones and a shared ray, and the check must still balance.
    let sigma1 = &inst.expected_bounded_cones()[5].1;
    let fine_fan = stellar_subdivide(df.fan(), &sigma1.relative_interior_point())
        .expect("interior point is in the support");
    let fine = DegenerationFan::from_fan(fine_fan, df.config().clone()).expect("classifies");
    assert!(ledger_refinement_check(&df, &fine, &ev, inst.n_rank(), 5).expect("refines"));
    // Reflexivity.
    assert!(ledger_refinement_check(&df, &df, &ev, inst.n_rank(), 5).expect("refines"));
}

#[test]
fn grassmann_prepare_model_satisfies_all_hypotheses() {
    let inst = GrassmannInstance::build(4, 2, 1).expect("valid parameters");
    let (l0, prepared) = prepare_model(&inst.base_fan, &inst.config, 20_000).expect("in budget");
    assert_eq!(
        l0, 1,
        "the d = 2 instance is already specifically reduced after resolution"
    );
    assert!(prepared.is_generically_unimodular());
    assert!(prepared.is_specifically_reduced());
    assert!(prepared.is_compactly_arranged());
    // Preparation refines the original positive fan.
    assert!(tropdeg::fan::is_refinement(
        prepared.fan(),
        gr_instance(2).1.fan()
    ));
}

#[test]
fn grassmann_scaled_fan_matches_expected_cones_with_factor_l() {
    let (inst, df) = gr_instance(2);
    let scaled = psi_scale(df.fan(), 2).expect("positive factor");
    let scaled_df = DegenerationFan::from_fan(scaled, inst.config.weighted(2)).expect("classifies");
    let expected = GrassmannInstance::build(4, 2, 2)
        .expect("valid parameters")
        .expected_bounded_cones();
    let bdd = scaled_df.bdd_cones();
    assert_eq!(bdd.len(), 7);
    for (_, cone) in &expected {
        assert!(
            bdd.contains(&cone),
            "scaled bounded cones carry the factor l"
        );
    }
}

#[test]
fn bounded_cone_faces_stay_bounded() {
    let (_, df) = gr_instance(2);
    let bdd = df.bdd_cones();
    for cone in &bdd {
        let flags = df.flags_of(cone).expect("member");
        assert!(flags.spe, "bdd ⊂ spe");
        for face in cone.faces() {
            if face.dim() == 0 {
                continue;
            }
            let f = df.flags_of(&face).expect("faces are members");
            assert!(f.bdd, "nonzero faces of bounded cones are bounded");
        }
    }
}

#[test]
fn sigma_y_excludes_rank_one_spans() {
    // A single reduced exponent gives span dimension 1: not a Σ_Y member,
    // and the ledger over such a fan is empty.
    let points: BTreeMap<String, IntVec> =
        [("a".to_string(), vec![]), ("b".to_string(), vec![])].into();
    let kappa: BTreeMap<String, Int> = [
        ("a".to_string(), Int::zero()),
        ("b".to_string(), Int::from(1)),
    ]
    .into();
    let config = PointConfiguration::with_kappa(0, points, kappa).expect("labels agree");
    let delta = tropdeg::fan::Fan::face_closure(0, &[]).expect("trivial");
    let df = build_degeneration(&delta, &config, 1).expect("strongly convex");
    let ev = TorusEvaluator::new(1, 9);
    assert_eq!(df.bdd_cones().len(), 1);
    let m = sigma_y_member(df.bdd_cones()[0], df.config(), &ev, 0, 9).expect("evaluates");
    assert!(!m.member);
    assert_eq!(m.descriptor.span_dim, 1);
    let ledger = volume_ledger(&df, &ev, 0, 9).expect("evaluates");
    assert!(ledger.entries.is_empty());
}

#[test]
fn sigma_y_accepts_two_distinct_exponents() {
    // Torus hypersurface cut out by two monomials: the zero cone of its
    // normal fan has full support and d = 2.
    let points: BTreeMap<String, IntVec> = [
        ("a".to_string(), vec_i64(&[0, 0])),
        ("b".to_string(), vec_i64(&[1, 2])),
    ]
    .into();
    let config = PointConfiguration::new(2, points).expect("nonempty");
    let ev = TorusEvaluator::new(2, 4);
    let zero = Cone::zero(2);
    let m = sigma_y_member(&zero, &config, &ev, 0, 4).expect("evaluates");
    assert!(m.member);
    assert_eq!(m.descriptor.span_dim, 2);
    assert!(m.descriptor.exact);
}

#[test]
fn placement_is_translation_invariant_on_reduced_exponents() {
    let points: BTreeMap<String, IntVec> = [
        ("a".to_string(), vec_i64(&[0, 0])),
        ("b".to_string(), vec_i64(&[2, 0])),
        ("c".to_string(), vec_i64(&[0, 3])),
    ]
    .into();
    let u = PointConfiguration::new(2, points).expect("nonempty");
    let sigma = Cone::from_generators(2, &[vec_i64(&[1, 0]), vec_i64(&[1, 1])]).expect("rank");
    let p = placement(&sigma, &u).expect("single normal cone");
    let translated = u.translate(&vec_i64(&[-7, 5])).expect("rank");
    let q = placement(&sigma, &translated).expect("single normal cone");
    // Different ω choices shift by σ^⊥ ∩ M only; the support and the
    // reduced map are canonical.
    assert_eq!(p.support, q.support);
    assert_eq!(p.reduced, q.reduced);
}

#[test]
fn span_dimension_is_monotone_under_adding_exponents() {
    let ev = TorusEvaluator::new(3, 77);
    let exps: Vec<IntVec> = vec![
        vec_i64(&[1, 0, 0]),
        vec_i64(&[0, 1, 0]),
        vec_i64(&[1, 1, 0]),
        vec_i64(&[2, -1, 3]),
        vec_i64(&[0, 0, 0]),
    ];
    let mut last = 0;
    for k in 1..=exps.len() {
        let sd = span_dimension(&exps[..k], &ev, 0).expect("samples drawn");
        assert!(sd.dim >= last);
        last = sd.dim;
    }
}

#[test]
fn canonical_output_is_deterministic() {
    let (inst, df) = gr_instance(2);
    let ev = inst.unit_evaluator(0);
    let ledger = volume_ledger(&df, &ev, inst.n_rank(), 0).expect("membership decidable");
    let once = jsonio::canonical_json(&jsonio::ledger_to_value(&ledger));
    let ledger_again = volume_ledger(&df, &ev, inst.n_rank(), 0).expect("membership decidable");
    assert_eq!(
        once,
        jsonio::canonical_json(&jsonio::ledger_to_value(&ledger_again))
    );

    // Fans do not depend on the seed at all.
    let fan_bytes = jsonio::canonical_json(&jsonio::fan_to_value(df.fan(), true));
    let df2 = build_degeneration(&inst.base_fan, &inst.config, 1).expect("strongly convex");
    assert_eq!(
        fan_bytes,
        jsonio::canonical_json(&jsonio::fan_to_value(df2.fan(), true))
    );
}

#[test]
fn thread_cap_does_not_change_results() {
    let (inst, df) = gr_instance(2);
    let ev = inst.unit_evaluator(2);
    tropdeg::par::set_thread_cap(1);
    let sequential = volume_ledger(&df, &ev, inst.n_rank(), 2).expect("membership decidable");
    tropdeg::par::set_thread_cap(4);
    let parallel = volume_ledger(&df, &ev, inst.n_rank(), 2).expect("membership decidable");
    tropdeg::par::set_thread_cap(1);
    assert_eq!(sequential, parallel);
}

#[test]
fn stretch_n5_candidate_mode_passes() {
    let r = tropdeg::grassmann::verify_classification(5, 2, 1, false, 0).expect("pipeline runs");
    assert!(
        r.pass(),
        "{:?}",
        r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
}

/// Full enumeration at n = 5 takes about half an hour; it passes (the
/// seven expected cones, exactly), so it stays available but ignored.
#[test]
#[ignore = "n = 5 exhaustive enumeration runs ~33 minutes"]
fn stretch_n5_exhaustive_passes() {
    let r = tropdeg::grassmann::verify_classification(5, 2, 1, true, 0).expect("pipeline runs");
    assert!(
        r.pass(),
        "{:?}",
        r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
}
