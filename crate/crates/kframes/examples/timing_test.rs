use kframes::props::reproduction::*;

fn main() {
    let fixtures: Vec<(&str, Box<dyn Fn() -> FixtureReport>)> = vec![
        ("01", Box::new(|| subreduction_catalog_fixture())),
        ("02", Box::new(|| strong_definability_failure_fixture(6))),
        ("03", Box::new(|| weak_definability_holds_fixture(6))),
        ("04", Box::new(|| rigid_frame_mono_fixture(6))),
        ("05", Box::new(|| factorization_cross_validation_fixture())),
        ("06", Box::new(|| transitive_mono_refutation_fixture(5))),
        ("07", Box::new(|| pullback_surjectivity_fixture(0))),
        ("08", Box::new(|| duality_round_trip_fixture())),
        ("09", Box::new(|| identity_suite_fixture(0))),
        ("10", Box::new(|| local_finiteness_counterexample_fixture())),
        ("11", Box::new(|| calculus_soundness_fixture())),
        ("12", Box::new(|| normal_form_suite_fixture(0))),
        ("13", Box::new(|| amalgamation_fixture(0))),
        ("14", Box::new(|| functional_limits_fixture(0))),
    ];
    for (name, f) in fixtures {
        let t0 = std::time::Instant::now();
        let r = f();
        println!("{name}: {:?} [{:?}] {}", r.outcome, t0.elapsed(), r.detail);
    }
}
