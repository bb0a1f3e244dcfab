//! The turnkey fixture suite: every published concrete computation is
//! rerun and compared against its stated outcome. Fixtures distinguish
//! deviations (the computation disagrees) from inconclusive runs (the
//! bound was too small to decide).

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::algebra::{
    self, check_complete_additivity, check_infinite_distributivity,
    check_local_finiteness_identity, dual_hom, eval, local_finiteness_witness, powerset_algebra,
    LfFamily, LfProbe, Valuation,
};
use crate::calculus::{
    check_proof, countermodel_search, deduction_transform, derive_equivalence, discharge_theory,
    formula::{self, Formula},
    normal::normal_form_guarded,
    proof::{table_schemata, CalculusParams, FormulaFamily, ProofTree, Rule, Sequent},
    CheckOutcome, EquivalenceParams, EquivalenceVariant, RefutationOutcome,
};
use crate::cat::{cokernel_pair, equalizer, pullback_along_regmono};
use crate::fixtures::*;
use crate::frame::{
    class_catalog, generated_subframe, is_isomorphic, Frame, FrameClass, LazyFrame, PointId,
    TableLogic,
};
use crate::morphism::{
    classify, enumerate_pmorphisms, enumerate_subreductions, BoundedStatus, PMorphism,
    DEFAULT_ENUMERATION_GUARD,
};
use crate::props::{amalgamate, beth_probe, superamalgamate, AmalgamOutcome, BethOutcome,
    BethStrength, Cospan, functional_limits_check, FunctionalLimitsOutcome, weak_pullback_check,
};

/// Per-fixture result. A deviation means the computed value contradicts
/// the recorded one; inconclusive means the bound did not settle it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixtureOutcome {
    Match,
    Deviation(String),
    Inconclusive(String),
}

impl FixtureOutcome {
    pub fn is_match(&self) -> bool {
        matches!(self, FixtureOutcome::Match)
    }
}

#[derive(Clone, Debug)]
pub struct FixtureReport {
    pub name: &'static str,
    pub outcome: FixtureOutcome,
    pub detail: String,
    pub witness_files: Vec<(String, String)>,
}

impl FixtureReport {
    fn ok(name: &'static str, detail: impl Into<String>) -> FixtureReport {
        FixtureReport {
            name,
            outcome: FixtureOutcome::Match,
            detail: detail.into(),
            witness_files: Vec::new(),
        }
    }
    fn deviation(name: &'static str, detail: impl Into<String>) -> FixtureReport {
        FixtureReport {
            name,
            outcome: FixtureOutcome::Deviation(String::new()),
            detail: detail.into(),
            witness_files: Vec::new(),
        }
    }
    fn inconclusive(name: &'static str, detail: impl Into<String>) -> FixtureReport {
        FixtureReport {
            name,
            outcome: FixtureOutcome::Inconclusive(String::new()),
            detail: detail.into(),
            witness_files: Vec::new(),
        }
    }
    fn with_file(mut self, name: impl Into<String>, contents: impl Into<String>) -> FixtureReport {
        self.witness_files.push((name.into(), contents.into()));
        self
    }
}

/// Runs the whole suite. The bound scales the classification fixtures
/// (default 6); the seed drives the randomized ones.
pub fn reproduce(bound: usize, seed: u64) -> Vec<FixtureReport> {
    vec![
        subreduction_catalog_fixture(),
        strong_definability_failure_fixture(bound),
        weak_definability_holds_fixture(bound),
        rigid_frame_mono_fixture(bound),
        factorization_cross_validation_fixture(),
        transitive_mono_refutation_fixture(5.min(bound)),
        pullback_surjectivity_fixture(seed),
        duality_round_trip_fixture(),
        identity_suite_fixture(seed),
        local_finiteness_counterexample_fixture(),
        calculus_soundness_fixture(),
        normal_form_suite_fixture(seed),
        amalgamation_fixture(seed),
        functional_limits_fixture(seed),
    ]
}

/// Fixture 1: the subreduction catalog of the fan cycle has exactly four
/// members: the frame itself, the 2-cycle, the collapsed fan, and the
/// reflexive point.
pub fn subreduction_catalog_fixture() -> FixtureReport {
    const NAME: &str = "01-subreduction-catalog";
    let v = fan_cycle_frame();
    let subs = match enumerate_subreductions(&v) {
        Ok(s) => s,
        Err(e) => return FixtureReport::deviation(NAME, format!("enumeration failed: {e}")),
    };
    if subs.len() != 4 {
        return FixtureReport::deviation(
            NAME,
            format!("expected 4 subreductions, found {}", subs.len()),
        );
    }
    let expected = [
        ("whole frame", v.clone()),
        ("two-cycle", two_cycle_frame()),
        ("collapsed fan", collapsed_fan_frame()),
        ("reflexive point", point_frame()),
    ];
    for (label, frame) in &expected {
        if !subs.iter().any(|s| is_isomorphic(s, frame).is_some()) {
            return FixtureReport::deviation(NAME, format!("missing the {label}"));
        }
    }
    let mut report = FixtureReport::ok(NAME, "4 subreductions, as listed");
    for (i, s) in subs.iter().enumerate() {
        report = report.with_file(format!("subreduction-{i}.frm"), s.to_string());
    }
    report
}

fn collapse_map(v: &Frame) -> PMorphism {
    PMorphism::validate(
        v.clone(),
        point_frame(),
        v.points().iter().map(|&p| (p, 0)).collect(),
    )
    .expect("the terminal collapse of a serial frame")
}

/// Fixture 2: the collapse of the fan cycle is epi but not regular epi;
/// the joint quotient stabilizes at the collapsed fan.
pub fn strong_definability_failure_fixture(bound: usize) -> FixtureReport {
    const NAME: &str = "02-strong-definability-failure";
    let v = fan_cycle_frame();
    let class = FrameClass::SubreductionsOf(v.clone());
    let bang = collapse_map(&v);
    let c = match classify(&bang, &class, bound) {
        Ok(c) => c,
        Err(e) => return FixtureReport::deviation(NAME, format!("classification failed: {e}")),
    };
    if !c.surjective {
        return FixtureReport::deviation(NAME, "collapse map must be surjective");
    }
    match &c.regular_epi {
        BoundedStatus::Refuted(r) if !r.heuristic => {
            if is_isomorphic(r.quotient.target(), &collapsed_fan_frame()).is_some() {
                FixtureReport::ok(NAME, "regular epi refuted; quotient is the collapsed fan")
                    .with_file("quotient.frm", r.quotient.target().to_string())
                    .with_file("quotient.map", r.quotient.to_string())
            } else {
                FixtureReport::deviation(
                    NAME,
                    format!("stabilized quotient is not the collapsed fan: {}", r.quotient.target()),
                )
            }
        }
        BoundedStatus::Refuted(_) => FixtureReport::inconclusive(
            NAME,
            format!("only a heuristic refutation at bound {bound}"),
        ),
        BoundedStatus::Certified { .. } => {
            FixtureReport::deviation(NAME, "collapse map certified regular epi")
        }
        BoundedStatus::Inconclusive => {
            FixtureReport::inconclusive(NAME, format!("undecided at bound {bound}"))
        }
    }
}

/// Fixture 3: over the fan-cycle catalog every mono is injective; the weak
/// probe finds no counterexample.
pub fn weak_definability_holds_fixture(bound: usize) -> FixtureReport {
    const NAME: &str = "03-weak-definability-holds";
    let v = fan_cycle_frame();
    let class = FrameClass::SubreductionsOf(v.clone());
    let catalog = match enumerate_subreductions(&v) {
        Ok(c) => c,
        Err(e) => return FixtureReport::deviation(NAME, format!("catalog failed: {e}")),
    };
    match beth_probe(&class, &catalog, bound, BethStrength::Weak) {
        Ok(BethOutcome::HoldsUpToBound) => {
            FixtureReport::ok(NAME, "no non-injective monos over the catalog")
        }
        Ok(BethOutcome::Fails(w)) => FixtureReport::deviation(
            NAME,
            format!("unexpected non-injective mono {}", w.morphism),
        ),
        Ok(BethOutcome::Inconclusive(reason)) => FixtureReport::inconclusive(NAME, reason),
        Err(e) => FixtureReport::deviation(NAME, format!("probe failed: {e}")),
    }
}

/// Fixture 4: the looped pair admits only the identity endomap, and its
/// collapse is a certified non-injective mono.
pub fn rigid_frame_mono_fixture(bound: usize) -> FixtureReport {
    const NAME: &str = "04-rigid-frame-mono";
    let b = looped_pair_frame();
    let endos = match enumerate_pmorphisms(&b, &b, DEFAULT_ENUMERATION_GUARD) {
        Ok(e) => e,
        Err(e) => return FixtureReport::deviation(NAME, format!("enumeration failed: {e}")),
    };
    if endos.len() != 1 || endos[0].map() != PMorphism::identity(&b).map() {
        return FixtureReport::deviation(
            NAME,
            format!("expected only the identity endomap, found {}", endos.len()),
        );
    }
    let class = FrameClass::SubreductionsOf(b.clone());
    let bang = collapse_map(&b);
    let c = match classify(&bang, &class, bound) {
        Ok(c) => c,
        Err(e) => return FixtureReport::deviation(NAME, format!("classification failed: {e}")),
    };
    if c.injective {
        return FixtureReport::deviation(NAME, "collapse map cannot be injective");
    }
    match &c.mono {
        BoundedStatus::Certified { exhaustive: true } => FixtureReport::ok(
            NAME,
            "identity-only endomaps; collapse is a certified non-injective mono",
        )
        .with_file("source.frm", b.to_string())
        .with_file("witness.map", bang.to_string()),
        BoundedStatus::Certified { exhaustive: false } => FixtureReport::inconclusive(
            NAME,
            format!("mono only certified up to bound {bound}"),
        ),
        BoundedStatus::Refuted(r) => FixtureReport::deviation(
            NAME,
            format!("unexpected separating pair from {}", r.test_frame),
        ),
        BoundedStatus::Inconclusive => {
            FixtureReport::inconclusive(NAME, format!("undecided at bound {bound}"))
        }
    }
}

struct CatalogPassData {
    factorization: Result<(usize, usize), String>,
    duality: Result<usize, String>,
}

fn catalog_pass() -> &'static CatalogPassData {
    static PASS: OnceLock<CatalogPassData> = OnceLock::new();
    PASS.get_or_init(|| {
        let mut checked_morphisms = 0usize;
        let mut checked_frames = 0usize;
        let mut duality_checked = 0usize;
        let mut factorization_err = None;
        let mut duality_err = None;
        for logic in [TableLogic::K, TableLogic::K4, TableLogic::S4, TableLogic::Gl] {
            // the first catalog contains the rest; later ones are cheap
            let catalog = match class_catalog(&FrameClass::Table(logic), 4) {
                Ok(c) => c,
                Err(e) => {
                    factorization_err = Some(format!("catalog failed: {e}"));
                    break;
                }
            };
            checked_frames += catalog.len();
            if logic != TableLogic::K {
                // every frame and morphism here was already covered by the
                // full catalog; the membership filter is the only delta
                continue;
            }
            for w in &catalog {
                for v in &catalog {
                    let morphisms =
                        match enumerate_pmorphisms(w, v, DEFAULT_ENUMERATION_GUARD) {
                            Ok(m) => m,
                            Err(e) => {
                                factorization_err =
                                    Some(format!("enumeration failed on a pair: {e}"));
                                continue;
                            }
                        };
                    for f in &morphisms {
                        checked_morphisms += 1;
                        let ck = cokernel_pair(f);
                        let legs_equal = ck.iota0.map() == ck.iota1.map();
                        if legs_equal != f.is_surjective() {
                            factorization_err = Some(format!(
                                "cokernel legs disagree with surjectivity for {f} between {w} and {v}"
                            ));
                        }
                        let (e_frame, _) = match equalizer(&ck.iota0, &ck.iota1) {
                            Ok(x) => x,
                            Err(e) => {
                                factorization_err = Some(format!("equalizer failed: {e}"));
                                continue;
                            }
                        };
                        let equalizer_is_domain =
                            is_isomorphic(&e_frame, f.source()).is_some();
                        if equalizer_is_domain != f.is_injective() {
                            factorization_err = Some(format!(
                                "equalizer of the cokernel pair disagrees with injectivity for {f}"
                            ));
                        }
                        // pointwise: the injections agree exactly on the image
                        let image = f.image_points();
                        for &p in f.target().points() {
                            let agree = ck.iota0.apply(p) == ck.iota1.apply(p);
                            if agree != image.contains(&p) {
                                factorization_err = Some(format!(
                                    "cokernel injections disagree off the image at {p}"
                                ));
                            }
                        }
                        // duality: inverse image commutes with the diamond
                        if let Ok(d) = dual_hom(f) {
                            let src = d.source_algebra().clone();
                            let tgt = d.target_algebra().clone();
                            for x in 0..(1u64 << v.size()) {
                                if d.apply(src.diamond(x)) != tgt.diamond(d.apply(x)) {
                                    duality_err = Some(format!(
                                        "inverse image does not commute with the diamond for {f}"
                                    ));
                                }
                                duality_checked += 1;
                            }
                        }
                    }
                }
            }
        }
        CatalogPassData {
            factorization: match factorization_err {
                Some(e) => Err(e),
                None => Ok((checked_morphisms, checked_frames)),
            },
            duality: match duality_err {
                Some(e) => Err(e),
                None => Ok(duality_checked),
            },
        }
    })
}

/// Fixture 5: on every p-morphism between small class frames, surjective
/// coincides with equal cokernel injections and injective with the
/// equalizer of the cokernel pair recovering the domain.
pub fn factorization_cross_validation_fixture() -> FixtureReport {
    const NAME: &str = "05-factorization-cross-validation";
    match &catalog_pass().factorization {
        Ok((morphisms, frames)) => FixtureReport::ok(
            NAME,
            format!("{morphisms} morphisms over {frames} catalog frames, zero violations"),
        ),
        Err(e) => FixtureReport::deviation(NAME, e.clone()),
    }
}

/// Fixture 6: over transitive frames every non-injective map admits a
/// separating parallel pair from a small frame.
pub fn transitive_mono_refutation_fixture(bound: usize) -> FixtureReport {
    const NAME: &str = "06-transitive-mono-refutation";
    let class = FrameClass::Table(TableLogic::K4);
    let catalog = match class_catalog(&class, 4) {
        Ok(c) => c,
        Err(e) => return FixtureReport::deviation(NAME, format!("catalog failed: {e}")),
    };
    let mut refuted = 0usize;
    for w in &catalog {
        for v in &catalog {
            let morphisms = match enumerate_pmorphisms(w, v, DEFAULT_ENUMERATION_GUARD) {
                Ok(m) => m,
                Err(e) => return FixtureReport::deviation(NAME, format!("enumeration failed: {e}")),
            };
            for f in morphisms {
                if f.is_injective() {
                    continue;
                }
                match classify(&f, &class, bound) {
                    Ok(c) => match c.mono {
                        BoundedStatus::Refuted(_) => refuted += 1,
                        BoundedStatus::Certified { .. } => {
                            return FixtureReport::deviation(
                                NAME,
                                format!("non-injective map certified mono: {f} between {w} and {v}"),
                            )
                        }
                        BoundedStatus::Inconclusive => {
                            return FixtureReport::inconclusive(
                                NAME,
                                format!("mono search undecided at bound {bound} for {f}"),
                            )
                        }
                    },
                    Err(e) => {
                        return FixtureReport::deviation(NAME, format!("classification failed: {e}"))
                    }
                }
            }
        }
    }
    FixtureReport::ok(
        NAME,
        format!("{refuted} non-injective maps, all refuted at bound {bound}"),
    )
}

fn random_frame(rng: &mut StdRng, logic: TableLogic, max_points: usize) -> Frame {
    loop {
        let n = rng.gen_range(1..=max_points);
        let mut edges = BTreeSet::new();
        for a in 0..n as PointId {
            for b in 0..n as PointId {
                if rng.gen_bool(0.4) {
                    edges.insert((a, b));
                }
            }
        }
        if matches!(logic, TableLogic::K4 | TableLogic::S4) {
            // transitive closure
            loop {
                let mut new = Vec::new();
                for &(a, b) in &edges {
                    for &(b2, c) in &edges {
                        if b == b2 && !edges.contains(&(a, c)) {
                            new.push((a, c));
                        }
                    }
                }
                if new.is_empty() {
                    break;
                }
                edges.extend(new);
            }
        }
        if matches!(logic, TableLogic::S4) {
            for a in 0..n as PointId {
                edges.insert((a, a));
            }
        }
        let frame = Frame::new(0..n as PointId, edges).unwrap();
        if crate::frame::check_class(&frame, &FrameClass::Table(logic)).is_ok() {
            return frame;
        }
    }
}

/// A random valid quotient of a frame: not every point-merging partition
/// yields an open map, so the sample is drawn from the enumerated
/// surjective quotient morphisms.
fn random_quotient(rng: &mut StdRng, frame: &Frame) -> PMorphism {
    let quotients = crate::morphism::enumerate_quotient_maps(frame)
        .expect("quotient enumeration on a small frame");
    let i = rng.gen_range(0..quotients.len());
    quotients[i].clone()
}

/// Fixture 7: pulling a surjection back along a generated-subframe
/// inclusion stays surjective.
pub fn pullback_surjectivity_fixture(seed: u64) -> FixtureReport {
    const NAME: &str = "07-pullback-surjectivity";
    let mut rng = StdRng::seed_from_u64(seed.wrapping_add(7));
    let mut checked = 0usize;
    while checked < 500 {
        let logic = if rng.gen_bool(0.5) {
            TableLogic::K
        } else {
            TableLogic::K4
        };
        let w = random_frame(&mut rng, logic, 4);
        let f = random_quotient(&mut rng, &w);
        let v = f.target().clone();
        // random closed seed set in the target
        let mut seeds = BTreeSet::new();
        for &p in v.points() {
            if rng.gen_bool(0.5) {
                seeds.insert(p);
            }
        }
        let sub = match generated_subframe(&v, &seeds) {
            Ok(s) => s,
            Err(e) => return FixtureReport::deviation(NAME, format!("subframe failed: {e}")),
        };
        let m = match PMorphism::inclusion(&sub, &v) {
            Ok(m) => m,
            Err(e) => return FixtureReport::deviation(NAME, format!("inclusion failed: {e}")),
        };
        match pullback_along_regmono(&f, &m) {
            Ok((_, _, projected)) => {
                if !projected.is_surjective() {
                    return FixtureReport::deviation(
                        NAME,
                        format!("pulled-back map lost surjectivity for {f} along {m}"),
                    );
                }
            }
            Err(e) => return FixtureReport::deviation(NAME, format!("pullback failed: {e}")),
        }
        checked += 1;
    }
    FixtureReport::ok(NAME, "500 sampled pullbacks preserve surjectivity")
}

/// Fixture 8: the atom frame of the powerset algebra returns the frame,
/// and inverse images commute with the diamond, exhaustively on small
/// frames.
pub fn duality_round_trip_fixture() -> FixtureReport {
    const NAME: &str = "08-duality-round-trip";
    // round trip on every catalog frame
    let catalog = match class_catalog(&FrameClass::Table(TableLogic::K), 4) {
        Ok(c) => c,
        Err(e) => return FixtureReport::deviation(NAME, format!("catalog failed: {e}")),
    };
    for frame in &catalog {
        let alg = match powerset_algebra(frame) {
            Ok(a) => a,
            Err(e) => return FixtureReport::deviation(NAME, format!("algebra failed: {e}")),
        };
        let back = algebra::atom_frame(&alg);
        if back != *frame {
            return FixtureReport::deviation(NAME, format!("round trip changed {frame}"));
        }
    }
    match &catalog_pass().duality {
        Ok(checked) => FixtureReport::ok(
            NAME,
            format!(
                "{} frames round-trip; {checked} diamond-preservation instances",
                catalog.len()
            ),
        ),
        Err(e) => FixtureReport::deviation(NAME, e.clone()),
    }
}

/// Fixture 9: the distributivity, additivity and local-finiteness
/// identities hold on a thousand randomized powerset instances.
pub fn identity_suite_fixture(seed: u64) -> FixtureReport {
    const NAME: &str = "09-identity-suite";
    let mut rng = StdRng::seed_from_u64(seed.wrapping_add(9));
    let frames = [
        point_frame(),
        two_cycle_frame(),
        fan_cycle_frame(),
        looped_pair_frame(),
        reflexive_chain_frame(),
        three_cycle_frame(),
    ];
    for i in 0..1000 {
        let frame = &frames[rng.gen_range(0..frames.len())];
        let alg = powerset_algebra(frame).unwrap();
        let n = frame.size();
        let rand_elem = |rng: &mut StdRng| rng.gen_range(0..(1u64 << n));
        match i % 3 {
            0 => {
                let family: Vec<BTreeSet<u64>> = (0..rng.gen_range(1..=3))
                    .map(|_| (0..rng.gen_range(0..=3)).map(|_| rand_elem(&mut rng)).collect())
                    .collect();
                match check_infinite_distributivity(&alg, &family, 10_000) {
                    Ok(true) => {}
                    Ok(false) => {
                        return FixtureReport::deviation(
                            NAME,
                            format!("distributivity failed on {frame} with {family:?}"),
                        )
                    }
                    Err(e) => return FixtureReport::deviation(NAME, format!("guard hit: {e}")),
                }
            }
            1 => {
                let set: BTreeSet<u64> =
                    (0..rng.gen_range(0..=4)).map(|_| rand_elem(&mut rng)).collect();
                if !check_complete_additivity(&alg, &set) {
                    return FixtureReport::deviation(
                        NAME,
                        format!("additivity failed on {frame} with {set:?}"),
                    );
                }
            }
            _ => {
                let family = LfFamily {
                    prefix: (0..rng.gen_range(0..=2))
                        .map(|_| (0..rng.gen_range(0..=2)).map(|_| rand_elem(&mut rng)).collect())
                        .collect(),
                    tail: (0..rng.gen_range(0..=2)).map(|_| rand_elem(&mut rng)).collect(),
                };
                match check_local_finiteness_identity(&alg, &family) {
                    Ok(true) => {}
                    Ok(false) => {
                        return FixtureReport::deviation(
                            NAME,
                            format!("local-finiteness identity failed on {frame}"),
                        )
                    }
                    Err(e) => return FixtureReport::deviation(NAME, format!("guard hit: {e}")),
                }
            }
        }
    }
    FixtureReport::ok(NAME, "1000 randomized identity instances hold")
}

/// Fixture 10: the successor chain violates local finiteness with the
/// canonical singleton levels.
pub fn local_finiteness_counterexample_fixture() -> FixtureReport {
    const NAME: &str = "10-local-finiteness-counterexample";
    let omega = LazyFrame::omega_successor(10);
    match local_finiteness_witness(&omega, 0, 10) {
        Ok(LfProbe::Violation(v)) => {
            for (n, level) in v.levels.iter().enumerate() {
                if *level != BTreeSet::from([n as PointId]) {
                    return FixtureReport::deviation(
                        NAME,
                        format!("level {n} is {level:?}, expected the singleton"),
                    );
                }
            }
            if v.min_cover <= v.depth {
                return FixtureReport::deviation(
                    NAME,
                    format!("cover of size {} does not exceed the depth", v.min_cover),
                );
            }
            FixtureReport::ok(NAME, "singleton levels, no small finite cover")
        }
        Ok(other) => FixtureReport::deviation(NAME, format!("expected a violation, got {other:?}")),
        Err(e) => FixtureReport::deviation(NAME, format!("probe failed: {e}")),
    }
}

fn soundness_catalog() -> Vec<Frame> {
    let mut catalog = class_catalog(&FrameClass::Table(TableLogic::K), 2).unwrap();
    catalog.push(fan_cycle_frame());
    catalog.push(looped_pair_frame());
    catalog
}

fn variant_grid() -> Vec<(EquivalenceVariant, EquivalenceParams)> {
    let p = || formula::var("p");
    let q = || formula::var("q");
    let r = || formula::var("r");
    let sets: Vec<BTreeSet<Formula>> = vec![
        BTreeSet::new(),
        BTreeSet::from([p()]),
        BTreeSet::from([p(), q()]),
        BTreeSet::from([p(), q(), r()]),
    ];
    let members: Vec<BTreeSet<Formula>> = vec![
        BTreeSet::new(),
        BTreeSet::from([p()]),
        BTreeSet::from([q()]),
        BTreeSet::from([p(), q()]),
    ];
    let mut families: Vec<BTreeSet<BTreeSet<Formula>>> = vec![BTreeSet::new()];
    for m in &members {
        families.push(BTreeSet::from([m.clone()]));
        for m2 in &members {
            if m < m2 {
                families.push(BTreeSet::from([m.clone(), m2.clone()]));
            }
        }
    }
    let mut grid = Vec::new();
    for s in &sets {
        grid.push((EquivalenceVariant::NegatedMeet, EquivalenceParams::Set(s.clone())));
        grid.push((EquivalenceVariant::BoxedMeet, EquivalenceParams::Set(s.clone())));
        grid.push((EquivalenceVariant::BoxedJoin, EquivalenceParams::Set(s.clone())));
    }
    for f in &families {
        grid.push((EquivalenceVariant::NestedMeets, EquivalenceParams::Family(f.clone())));
        grid.push((
            EquivalenceVariant::MeetJoinDistribution,
            EquivalenceParams::Family(f.clone()),
        ));
    }
    for prefix_member in &members {
        for tail in &members {
            grid.push((
                EquivalenceVariant::FamilyDistribution,
                EquivalenceParams::IndexedFamily(FormulaFamily {
                    prefix: vec![prefix_member.clone()],
                    tail: tail.clone(),
                }),
            ));
        }
    }
    grid
}

/// Fixture 11: every generated equivalence proof checks, and no accepted
/// proof has a catalog countermodel; the deduction transform round-trips.
pub fn calculus_soundness_fixture() -> FixtureReport {
    const NAME: &str = "11-calculus-soundness";
    let params = CalculusParams::new(
        ["p".to_string(), "q".to_string(), "r".to_string()],
        table_schemata(TableLogic::K),
        [],
    );
    let catalog = soundness_catalog();
    let mut accepted = 0usize;
    for (variant, eq_params) in variant_grid() {
        let eq = match derive_equivalence(variant, &eq_params) {
            Ok(eq) => eq,
            Err(e) => {
                return FixtureReport::deviation(
                    NAME,
                    format!("derivation {} failed: {e}", variant.tag()),
                )
            }
        };
        for (dir, proof) in [("forward", &eq.forward), ("backward", &eq.backward)] {
            match check_proof(proof, &params) {
                CheckOutcome::Accepted { .. } => accepted += 1,
                CheckOutcome::Rejected(rej) => {
                    return FixtureReport::deviation(
                        NAME,
                        format!("{} {dir} rejected: {rej}", variant.tag()),
                    )
                }
            }
            match countermodel_search(&proof.conclusion, &params, &catalog, 0, 4_000_000) {
                Ok(RefutationOutcome::ValidOnCatalog) => {}
                Ok(RefutationOutcome::Countermodel(cm)) => {
                    return FixtureReport::deviation(
                        NAME,
                        format!(
                            "accepted {} {dir} refuted on frame {} at point {}",
                            variant.tag(),
                            cm.frame,
                            cm.witness_point
                        ),
                    )
                }
                Err(e) => return FixtureReport::deviation(NAME, format!("search failed: {e}")),
            }
        }
    }
    // deduction round trips over a theory
    let tau = formula::var("p");
    let theory_params = CalculusParams::new(
        ["p".to_string()],
        table_schemata(TableLogic::K),
        [tau.clone()],
    );
    let cite = ProofTree::node(
        Rule::TL {
            set: BTreeSet::from([tau.clone()]),
        },
        Sequent::new([], [tau.clone()]),
        vec![ProofTree::leaf(
            Rule::Ax,
            Sequent::new([tau.clone()], [tau.clone()]),
        )],
    );
    let nec = ProofTree::node(
        Rule::Nec {
            set: BTreeSet::new(),
        },
        Sequent::new([], [formula::bx(tau.clone())]),
        vec![cite.clone()],
    );
    for proof in [cite, nec] {
        if !check_proof(&proof, &theory_params).is_accepted() {
            return FixtureReport::deviation(NAME, "theory proof rejected");
        }
        let discharged = match deduction_transform(&proof, &theory_params) {
            Ok(d) => d,
            Err(e) => return FixtureReport::deviation(NAME, format!("transform failed: {e}")),
        };
        if !check_proof(&discharged.proof, &theory_params.without_theory()).is_accepted() {
            return FixtureReport::deviation(NAME, "discharged proof rejected without theory");
        }
        let recovered =
            match discharge_theory(&discharged, &proof.conclusion, &theory_params) {
                Ok(r) => r,
                Err(e) => return FixtureReport::deviation(NAME, format!("discharge failed: {e}")),
            };
        if !check_proof(&recovered, &theory_params).is_accepted() {
            return FixtureReport::deviation(NAME, "recovered proof rejected");
        }
        if recovered.conclusion != proof.conclusion {
            return FixtureReport::deviation(NAME, "round trip changed the end-sequent");
        }
        accepted += 3;
    }
    FixtureReport::ok(NAME, format!("{accepted} proofs accepted, zero countermodels"))
}

fn random_formula(rng: &mut StdRng, depth: usize) -> Formula {
    if depth == 0 {
        return match rng.gen_range(0..4) {
            0 => formula::var("p"),
            1 => formula::var("q"),
            2 => formula::top(),
            _ => formula::bot(),
        };
    }
    match rng.gen_range(0..7) {
        0 => formula::var("p"),
        1 => formula::var("q"),
        2 => formula::neg(random_formula(rng, depth - 1)),
        3 => formula::bx(random_formula(rng, depth - 1)),
        4 => formula::and([
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ]),
        5 => formula::or([
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ]),
        _ => formula::imp(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
    }
}

/// Fixture 12: two hundred random formulas evaluate equally to their
/// reassembled normal forms on every catalog frame and valuation.
pub fn normal_form_suite_fixture(seed: u64) -> FixtureReport {
    const NAME: &str = "12-normal-form-suite";
    let mut rng = StdRng::seed_from_u64(seed.wrapping_add(12));
    let catalog = soundness_catalog();
    for i in 0..200 {
        let f = random_formula(&mut rng, 4);
        let nf = match normal_form_guarded(&f, 2_000_000) {
            Ok(nf) => nf,
            Err(e) => {
                return FixtureReport::deviation(
                    NAME,
                    format!("normal form of sample {i} failed: {e}"),
                )
            }
        };
        let re = nf.reassemble();
        for frame in &catalog {
            let alg = powerset_algebra(frame).unwrap();
            let n = frame.size();
            for p_mask in 0..(1u64 << n) {
                for q_mask in 0..(1u64 << n) {
                    let val = Valuation::default().bind("p", p_mask).bind("q", q_mask);
                    let lhs = eval(&alg, &val, &f);
                    let rhs = eval(&alg, &val, &re);
                    if lhs != rhs {
                        return FixtureReport::deviation(
                            NAME,
                            format!("sample {i} disagrees with its normal form on {frame}"),
                        );
                    }
                }
            }
        }
    }
    FixtureReport::ok(NAME, "200 random formulas match their normal forms")
}

/// Fixture 13: cospans of surjections over small transitive and
/// unconstrained frames amalgamate through the matching-pairs candidate,
/// which also superamalgamates.
pub fn amalgamation_fixture(seed: u64) -> FixtureReport {
    const NAME: &str = "13-amalgamation";
    let mut rng = StdRng::seed_from_u64(seed.wrapping_add(13));
    for i in 0..100 {
        let logic = if i % 2 == 0 { TableLogic::K } else { TableLogic::K4 };
        let class = FrameClass::Table(logic);
        let w0 = random_frame(&mut rng, logic, 4);
        let f0 = random_quotient(&mut rng, &w0);
        let v = f0.target().clone();
        // a second cover: either another quotient source or the identity
        let f1 = if rng.gen_bool(0.5) {
            PMorphism::identity(&v)
        } else {
            // pick a surjection from a random frame onto v, falling back
            // to the identity when none is found quickly
            let w1 = random_frame(&mut rng, logic, 4);
            enumerate_pmorphisms(&w1, &v, DEFAULT_ENUMERATION_GUARD)
                .ok()
                .and_then(|ms| ms.into_iter().find(|m| m.is_surjective()))
                .unwrap_or_else(|| PMorphism::identity(&v))
        };
        let cospan = match Cospan::new(f0, f1, class.clone()) {
            Ok(c) => c,
            Err(e) => return FixtureReport::deviation(NAME, format!("cospan {i} invalid: {e}")),
        };
        match amalgamate(&cospan, 4) {
            Ok(AmalgamOutcome::Holds(am)) => {
                if !am.via_matching_pairs {
                    return FixtureReport::deviation(
                        NAME,
                        format!("sample {i} needed a search instead of the matching-pairs candidate"),
                    );
                }
                if weak_pullback_check(&am.g0, &am.g1, &cospan.f0, &cospan.f1)
                    .map(|r| r.is_err())
                    .unwrap_or(true)
                {
                    return FixtureReport::deviation(
                        NAME,
                        format!("sample {i} candidate misses a matching pair"),
                    );
                }
            }
            Ok(other) => {
                return FixtureReport::deviation(NAME, format!("sample {i}: {other:?}"))
            }
            Err(e) => return FixtureReport::deviation(NAME, format!("sample {i} failed: {e}")),
        }
        match superamalgamate(&cospan, 4) {
            Ok(AmalgamOutcome::Holds(_)) => {}
            Ok(other) => {
                return FixtureReport::deviation(
                    NAME,
                    format!("sample {i} superamalgamation: {other:?}"),
                )
            }
            Err(e) => return FixtureReport::deviation(NAME, format!("sample {i} failed: {e}")),
        }
    }
    FixtureReport::ok(NAME, "100 cospans amalgamate via matching pairs")
}

fn random_functional_frame(rng: &mut StdRng, max_points: usize) -> Frame {
    let n = rng.gen_range(1..=max_points);
    let succ: Vec<PointId> = (0..n).map(|_| rng.gen_range(0..n) as PointId).collect();
    Frame::new(
        0..n as PointId,
        succ.iter().enumerate().map(|(i, &j)| (i as PointId, j)),
    )
    .unwrap()
}

/// Fixture 14: products and equalizers of sampled functional frames verify
/// as limits.
pub fn functional_limits_fixture(seed: u64) -> FixtureReport {
    const NAME: &str = "14-functional-limits";
    let mut rng = StdRng::seed_from_u64(seed.wrapping_add(14));
    let samples: Vec<(Frame, Frame)> = (0..20)
        .map(|_| {
            (
                random_functional_frame(&mut rng, 3),
                random_functional_frame(&mut rng, 3),
            )
        })
        .collect();
    match functional_limits_check(&samples, 5) {
        Ok(FunctionalLimitsOutcome::Verified {
            products,
            equalizers,
        }) => FixtureReport::ok(
            NAME,
            format!("{products} products and {equalizers} equalizers verified"),
        ),
        Ok(FunctionalLimitsOutcome::Refuted(msg)) => FixtureReport::deviation(NAME, msg),
        Err(e) => FixtureReport::deviation(NAME, format!("check failed: {e}")),
    }
}

/// Aggregate exit code: deviations dominate, then inconclusive runs.
pub fn suite_exit_code(reports: &[FixtureReport]) -> i32 {
    if reports
        .iter()
        .any(|r| matches!(r.outcome, FixtureOutcome::Deviation(_)))
    {
        1
    } else if reports
        .iter()
        .any(|r| matches!(r.outcome, FixtureOutcome::Inconclusive(_)))
    {
        2
    } else {
        0
    }
}
