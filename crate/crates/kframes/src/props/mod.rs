//! Bounded decision procedures for the meta-properties: amalgamation and
//! superamalgamation, weak-pullback checks, weak and strong definability
//! probes, separation-of-variables checks, and limits of functional
//! frames. Every verdict carries a machine-checkable witness or an
//! explicit bound.
//!
//! Provability is replaced throughout by catalog-bounded semantic
//! consequence over finite class frames: refutations are sound outright,
//! affirmative verdicts hold up to the stated bound.

pub mod reproduction;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{eval_on_frame, AlgebraError, Valuation};
use crate::calculus::formula::{self, Formula};
use crate::cat::{set_pullback, CatError, SetPullback};
use crate::frame::{class_catalog, CompiledClass, Frame, FrameClass, FrameError, PointId};
use crate::morphism::{
    classify, enumerate_pmorphisms, BoundedStatus, Classification, MorphismError, PMorphism,
    DEFAULT_ENUMERATION_GUARD,
};
use crate::report::{PropertyReport, Verdict};

#[derive(Debug, Error)]
pub enum PropsError {
    #[error("cospan is invalid: {0}")]
    InvalidCospan(String),
    #[error("square does not commute at {0}")]
    SquareMismatch(PointId),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Cat(#[from] CatError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("search space too large: {0}")]
    SizeGuard(String),
}

/// Two surjections onto a shared codomain, all three frames in the class.
#[derive(Clone, Debug)]
pub struct Cospan {
    pub f0: PMorphism,
    pub f1: PMorphism,
    pub class: FrameClass,
}

impl Cospan {
    pub fn new(f0: PMorphism, f1: PMorphism, class: FrameClass) -> Result<Cospan, PropsError> {
        if f0.target() != f1.target() {
            return Err(PropsError::InvalidCospan("codomains differ".into()));
        }
        if !f0.is_surjective() || !f1.is_surjective() {
            return Err(PropsError::InvalidCospan(
                "legs must be surjective".into(),
            ));
        }
        let compiled = CompiledClass::new(&class);
        for frame in [f0.source(), f1.source(), f0.target()] {
            if let Err(v) = compiled.check(frame) {
                return Err(PropsError::InvalidCospan(format!(
                    "frame outside the class: {v}"
                )));
            }
        }
        Ok(Cospan { f0, f1, class })
    }
}

/// A completing square: an apex with surjections onto both legs.
#[derive(Clone, Debug)]
pub struct Amalgam {
    pub apex: Frame,
    pub g0: PMorphism,
    pub g1: PMorphism,
    pub via_matching_pairs: bool,
}

#[derive(Clone, Debug)]
pub enum AmalgamOutcome {
    Holds(Amalgam),
    /// Every class frame up to the bound was tried.
    ExhaustedAtBound,
    /// The class could not be enumerated up to the bound.
    SearchCapped(String),
}

/// Completes a cospan of surjections. The matching-pairs candidate is
/// tried first: when it lies in the class it completes the square and also
/// covers every matching pair. Otherwise class frames up to the bound are
/// searched for a pair of commuting surjections.
pub fn amalgamate(cospan: &Cospan, bound: usize) -> Result<AmalgamOutcome, PropsError> {
    amalgamate_checked(cospan, bound, false)
}

/// As [`amalgamate`], with the completing square additionally required to
/// cover every matching pair of the cospan.
pub fn superamalgamate(cospan: &Cospan, bound: usize) -> Result<AmalgamOutcome, PropsError> {
    amalgamate_checked(cospan, bound, true)
}

fn amalgamate_checked(
    cospan: &Cospan,
    bound: usize,
    require_covering: bool,
) -> Result<AmalgamOutcome, PropsError> {
    let sp: SetPullback = set_pullback(&cospan.f0, &cospan.f1, &cospan.class)?;
    if sp.in_class.is_ok() {
        // projections are surjective because the opposite legs are, and the
        // candidate covers every matching pair by construction
        return Ok(AmalgamOutcome::Holds(Amalgam {
            apex: sp.frame,
            g0: sp.proj0,
            g1: sp.proj1,
            via_matching_pairs: true,
        }));
    }
    let catalog = match class_catalog(&cospan.class, bound) {
        Ok(c) => c,
        Err(FrameError::SizeGuard(msg)) => return Ok(AmalgamOutcome::SearchCapped(msg)),
        Err(e) => return Err(e.into()),
    };
    for u in &catalog {
        let to_w0 = enumerate_pmorphisms(u, cospan.f0.source(), DEFAULT_ENUMERATION_GUARD)?;
        let to_w1 = enumerate_pmorphisms(u, cospan.f1.source(), DEFAULT_ENUMERATION_GUARD)?;
        for g0 in to_w0.iter().filter(|g| g.is_surjective()) {
            for g1 in to_w1.iter().filter(|g| g.is_surjective()) {
                let commutes = u
                    .points()
                    .iter()
                    .all(|&p| cospan.f0.apply(g0.apply(p)) == cospan.f1.apply(g1.apply(p)));
                if !commutes {
                    continue;
                }
                if require_covering
                    && covering_failure(&cospan.f0, &cospan.f1, g0, g1).is_some()
                {
                    continue;
                }
                return Ok(AmalgamOutcome::Holds(Amalgam {
                    apex: u.clone(),
                    g0: g0.clone(),
                    g1: g1.clone(),
                    via_matching_pairs: false,
                }));
            }
        }
    }
    Ok(AmalgamOutcome::ExhaustedAtBound)
}

/// First matching pair of the cospan not covered by the square, if any.
fn covering_failure(
    f0: &PMorphism,
    f1: &PMorphism,
    g0: &PMorphism,
    g1: &PMorphism,
) -> Option<(PointId, PointId)> {
    for &w0 in f0.source().points() {
        for &w1 in f1.source().points() {
            if f0.apply(w0) != f1.apply(w1) {
                continue;
            }
            let covered = g0
                .source()
                .points()
                .iter()
                .any(|&u| g0.apply(u) == w0 && g1.apply(u) == w1);
            if !covered {
                return Some((w0, w1));
            }
        }
    }
    None
}

/// Checks the weak-pullback condition of a commuting square: every
/// matching pair of the cospan must be covered by an apex point.
pub fn weak_pullback_check(
    g0: &PMorphism,
    g1: &PMorphism,
    f0: &PMorphism,
    f1: &PMorphism,
) -> Result<Result<(), (PointId, PointId)>, PropsError> {
    if g0.source() != g1.source() || f0.target() != f1.target() {
        return Err(PropsError::InvalidCospan(
            "square shape mismatch".into(),
        ));
    }
    for &u in g0.source().points() {
        if f0.apply(g0.apply(u)) != f1.apply(g1.apply(u)) {
            return Err(PropsError::SquareMismatch(u));
        }
    }
    Ok(match covering_failure(f0, f1, g0, g1) {
        None => Ok(()),
        Some(pair) => Err(pair),
    })
}

pub fn amalgam_report(
    property: &str,
    outcome: &AmalgamOutcome,
    bound: usize,
) -> PropertyReport {
    match outcome {
        AmalgamOutcome::Holds(am) => {
            let witness = format!(
                "apex of {} points{}",
                am.apex.size(),
                if am.via_matching_pairs {
                    " (matching-pairs candidate)"
                } else {
                    ""
                }
            );
            PropertyReport::new(property, Verdict::Holds { witness }, bound)
                .with_witness_file("apex.frm", am.apex.to_string())
                .with_witness_file("g0.map", am.g0.to_string())
                .with_witness_file("g1.map", am.g1.to_string())
        }
        AmalgamOutcome::ExhaustedAtBound => PropertyReport::new(
            property,
            Verdict::Fails {
                witness: format!("no completing square among class frames of at most {bound} points"),
            },
            bound,
        ),
        AmalgamOutcome::SearchCapped(msg) => PropertyReport::new(
            property,
            Verdict::Inconclusive {
                reason: msg.clone(),
            },
            bound,
        ),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BethStrength {
    Weak,
    Strong,
}

/// Outcome of a definability probe over a catalog.
#[derive(Clone, Debug)]
pub enum BethOutcome {
    /// No witness against the property was found; searches were complete
    /// at the bound.
    HoldsUpToBound,
    /// Weak probe: a non-injective map certified mono by an exhaustive
    /// search. Strong probe: a surjection whose joint quotient provably
    /// stabilizes strictly coarser.
    Fails(BethWitness),
    Inconclusive(String),
}

#[derive(Clone, Debug)]
pub struct BethWitness {
    pub morphism: PMorphism,
    pub classification: Classification,
}

/// Searches all p-morphisms between catalog frames for a counterexample to
/// the definability property: weak looks for a non-injective mono, strong
/// for a non-regular epi. Certifications that are not exhaustive leave the
/// verdict inconclusive rather than claiming a failure.
pub fn beth_probe(
    class: &FrameClass,
    catalog: &[Frame],
    bound: usize,
    strength: BethStrength,
) -> Result<BethOutcome, PropsError> {
    let mut pending: Option<String> = None;
    for source in catalog {
        for target in catalog {
            let morphisms = enumerate_pmorphisms(source, target, DEFAULT_ENUMERATION_GUARD)?;
            for f in morphisms {
                match strength {
                    BethStrength::Weak => {
                        if f.is_injective() {
                            continue;
                        }
                        let c = classify(&f, class, bound)?;
                        match &c.mono {
                            BoundedStatus::Refuted(_) => {}
                            BoundedStatus::Certified { exhaustive: true } => {
                                return Ok(BethOutcome::Fails(BethWitness {
                                    morphism: f,
                                    classification: c,
                                }));
                            }
                            BoundedStatus::Certified { exhaustive: false } => {
                                pending.get_or_insert_with(|| {
                                    format!(
                                        "non-injective map certified only up to bound {bound}: {f}"
                                    )
                                });
                            }
                            BoundedStatus::Inconclusive => {
                                pending.get_or_insert_with(|| {
                                    format!("mono search inconclusive at bound {bound}: {f}")
                                });
                            }
                        }
                    }
                    BethStrength::Strong => {
                        if !f.is_surjective() {
                            continue;
                        }
                        let c = classify(&f, class, bound)?;
                        match &c.regular_epi {
                            BoundedStatus::Certified { .. } => {}
                            BoundedStatus::Refuted(r) if !r.heuristic => {
                                return Ok(BethOutcome::Fails(BethWitness {
                                    morphism: f,
                                    classification: c,
                                }));
                            }
                            BoundedStatus::Refuted(_) => {
                                pending.get_or_insert_with(|| {
                                    format!("only a heuristic refutation at bound {bound}: {f}")
                                });
                            }
                            BoundedStatus::Inconclusive => {
                                pending.get_or_insert_with(|| {
                                    format!(
                                        "regular-epi search inconclusive at bound {bound}: {f}"
                                    )
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(match pending {
        Some(reason) => BethOutcome::Inconclusive(reason),
        None => BethOutcome::HoldsUpToBound,
    })
}

pub fn beth_report(outcome: &BethOutcome, strength: BethStrength, bound: usize) -> PropertyReport {
    let name = match strength {
        BethStrength::Weak => "weak-definability",
        BethStrength::Strong => "strong-definability",
    };
    match outcome {
        BethOutcome::HoldsUpToBound => PropertyReport::new(
            name,
            Verdict::Holds {
                witness: "no counterexample among catalog morphisms".into(),
            },
            bound,
        ),
        BethOutcome::Fails(w) => {
            let witness = match strength {
                BethStrength::Weak => format!(
                    "non-injective mono {} : {} points onto {} points",
                    w.morphism,
                    w.morphism.source().size(),
                    w.morphism.target().size()
                ),
                BethStrength::Strong => format!(
                    "epi {} with strictly coarser stabilized quotient",
                    w.morphism
                ),
            };
            let mut report = PropertyReport::new(name, Verdict::Fails { witness }, bound)
                .with_witness_file("source.frm", w.morphism.source().to_string())
                .with_witness_file("target.frm", w.morphism.target().to_string())
                .with_witness_file("witness.map", w.morphism.to_string());
            if let BoundedStatus::Refuted(r) = &w.classification.regular_epi {
                report = report
                    .with_witness_file("quotient.frm", r.quotient.target().to_string())
                    .with_witness_file("quotient.map", r.quotient.to_string());
            }
            report
        }
        BethOutcome::Inconclusive(reason) => PropertyReport::new(
            name,
            Verdict::Inconclusive {
                reason: reason.clone(),
            },
            bound,
        ),
    }
}

/// Result of a separation-of-variables check.
#[derive(Clone, Debug)]
pub enum SeparationOutcome {
    /// The defining family, one formula per base variable.
    Holds(Vec<(String, Formula)>),
    /// A coequivalence condition failed: its index and a witness.
    ConditionFails {
        condition: usize,
        frame: Frame,
        valuation: Valuation,
    },
    /// Conditions hold but no defining family exists at the depth.
    CandidatesExhausted,
}

fn rename(f: &Formula, base: &BTreeSet<String>, tag: &str) -> Formula {
    crate::calculus::proof::rename_variables(f, base, tag)
}

/// Global consequence over the catalog: every valuation making the
/// antecedent everywhere true makes the consequent everywhere true.
/// Returns the first violating frame and valuation.
fn catalog_consequence(
    antecedent: &Formula,
    consequent: &Formula,
    catalog: &[Frame],
    guard: usize,
) -> Result<Option<(Frame, Valuation)>, PropsError> {
    let mut vars: BTreeSet<String> = antecedent.variables();
    vars.extend(consequent.variables());
    let var_list: Vec<String> = vars.into_iter().collect();
    for frame in catalog {
        let n = frame.size();
        let space = 2f64.powi(n as i32).powi(var_list.len() as i32);
        if space > guard as f64 {
            return Err(PropsError::SizeGuard(format!(
                "(2^{n})^{} valuations",
                var_list.len()
            )));
        }
        let alg = crate::algebra::powerset_algebra(frame)?;
        let mut masks = vec![0u64; var_list.len()];
        loop {
            let valuation = Valuation::new(
                var_list
                    .iter()
                    .cloned()
                    .zip(masks.iter().copied())
                    .collect(),
            );
            let ante = crate::algebra::eval(&alg, &valuation, antecedent)?;
            if ante == alg.top() {
                let cons = crate::algebra::eval(&alg, &valuation, consequent)?;
                if cons != alg.top() {
                    return Ok(Some((frame.clone(), valuation)));
                }
            }
            let mut k = masks.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                masks[k] += 1;
                if masks[k] < (1u64 << n) {
                    break;
                }
                masks[k] = 0;
                if k == 0 {
                    break;
                }
            }
            if masks.iter().all(|&m| m == 0) || var_list.is_empty() {
                break;
            }
        }
    }
    Ok(None)
}

/// Two formulas agree on the catalog when they evaluate equally under
/// every valuation of their joint variables.
fn catalog_equivalent(
    a: &Formula,
    b: &Formula,
    catalog: &[Frame],
    guard: usize,
) -> Result<bool, PropsError> {
    let mut vars: BTreeSet<String> = a.variables();
    vars.extend(b.variables());
    let var_list: Vec<String> = vars.into_iter().collect();
    for frame in catalog {
        let n = frame.size();
        let space = 2f64.powi(n as i32).powi(var_list.len() as i32);
        if space > guard as f64 {
            return Err(PropsError::SizeGuard(format!(
                "(2^{n})^{} valuations",
                var_list.len()
            )));
        }
        let alg = crate::algebra::powerset_algebra(frame)?;
        let mut masks = vec![0u64; var_list.len()];
        loop {
            let valuation = Valuation::new(
                var_list
                    .iter()
                    .cloned()
                    .zip(masks.iter().copied())
                    .collect(),
            );
            if crate::algebra::eval(&alg, &valuation, a)?
                != crate::algebra::eval(&alg, &valuation, b)?
            {
                return Ok(false);
            }
            let mut k = masks.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                masks[k] += 1;
                if masks[k] < (1u64 << n) {
                    break;
                }
                masks[k] = 0;
                if k == 0 {
                    break;
                }
            }
            if masks.iter().all(|&m| m == 0) || var_list.is_empty() {
                break;
            }
        }
    }
    Ok(true)
}

/// The shape of a cokernel-pair presentation: both copies of the base
/// theory plus a biconditional per defining formula.
pub fn separation_shape(
    tau: &Formula,
    base: &BTreeSet<String>,
    family: &[(String, Formula)],
) -> Formula {
    let tau0 = rename(tau, base, "0");
    let tau1 = rename(tau, base, "1");
    let links: Vec<Formula> = family
        .iter()
        .map(|(_, f)| formula::iff(rename(f, base, "0"), rename(f, base, "1")))
        .collect();
    formula::and([tau0, tau1, formula::and(links)])
}

/// Checks whether a relation formula over two variable copies is an
/// effective coequivalence: first the reflexivity, symmetry, transitivity
/// and typing conditions as catalog consequences, then a search for a
/// defining family of bounded depth making the relation a biconditional
/// conjunction over shared formulas.
pub fn separates_variables_check(
    rho: &Formula,
    tau: &Formula,
    base: &BTreeSet<String>,
    catalog: &[Frame],
    candidate_depth: usize,
    guard: usize,
) -> Result<SeparationOutcome, PropsError> {
    let tau0 = rename(tau, base, "0");
    let tau1 = rename(tau, base, "1");
    // condition 0: the relation lands in both theory copies
    let cond0 = formula::and([tau0.clone(), tau1.clone()]);
    if let Some((frame, valuation)) = catalog_consequence(rho, &cond0, catalog, guard)? {
        return Ok(SeparationOutcome::ConditionFails {
            condition: 0,
            frame,
            valuation,
        });
    }
    // condition 1: reflexivity over the theory
    let diag: std::collections::BTreeMap<String, Formula> = base
        .iter()
        .flat_map(|x| {
            [
                (format!("{x}0"), Formula::Var(x.clone())),
                (format!("{x}1"), Formula::Var(x.clone())),
            ]
        })
        .collect();
    let rho_diag = rho.substitute(&diag);
    if let Some((frame, valuation)) = catalog_consequence(tau, &rho_diag, catalog, guard)? {
        return Ok(SeparationOutcome::ConditionFails {
            condition: 1,
            frame,
            valuation,
        });
    }
    // condition 2: symmetry
    let swap: std::collections::BTreeMap<String, Formula> = base
        .iter()
        .flat_map(|x| {
            [
                (format!("{x}0"), Formula::Var(format!("{x}1"))),
                (format!("{x}1"), Formula::Var(format!("{x}0"))),
            ]
        })
        .collect();
    let rho_swapped = rho.substitute(&swap);
    if let Some((frame, valuation)) = catalog_consequence(rho, &rho_swapped, catalog, guard)? {
        return Ok(SeparationOutcome::ConditionFails {
            condition: 2,
            frame,
            valuation,
        });
    }
    // condition 3: transitivity through a third copy
    let shift12: std::collections::BTreeMap<String, Formula> = base
        .iter()
        .flat_map(|x| {
            [
                (format!("{x}0"), Formula::Var(format!("{x}1"))),
                (format!("{x}1"), Formula::Var(format!("{x}2"))),
            ]
        })
        .collect();
    let shift02: std::collections::BTreeMap<String, Formula> = base
        .iter()
        .map(|x| (format!("{x}1"), Formula::Var(format!("{x}2"))))
        .collect();
    let chain = formula::and([rho.clone(), rho.substitute(&shift12)]);
    let rho02 = rho.substitute(&shift02);
    if let Some((frame, valuation)) = catalog_consequence(&chain, &rho02, catalog, guard)? {
        return Ok(SeparationOutcome::ConditionFails {
            condition: 3,
            frame,
            valuation,
        });
    }
    // search defining families over the candidate pool
    let pool = candidate_pool(base, candidate_depth);
    let vars: Vec<String> = base.iter().cloned().collect();
    let mut idx = vec![0usize; vars.len()];
    if pool.is_empty() {
        return Ok(SeparationOutcome::CandidatesExhausted);
    }
    let tuple_count = (pool.len() as f64).powi(vars.len() as i32);
    if tuple_count > 200_000.0 {
        return Err(PropsError::SizeGuard(format!(
            "{} candidate families",
            tuple_count
        )));
    }
    loop {
        let family: Vec<(String, Formula)> = vars
            .iter()
            .cloned()
            .zip(idx.iter().map(|&i| pool[i].clone()))
            .collect();
        let shape = separation_shape(tau, base, &family);
        if catalog_equivalent(rho, &shape, catalog, guard)? {
            return Ok(SeparationOutcome::Holds(family));
        }
        let mut k = 0;
        loop {
            if k == vars.len() {
                return Ok(SeparationOutcome::CandidatesExhausted);
            }
            idx[k] += 1;
            if idx[k] < pool.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if vars.is_empty() {
            return Ok(SeparationOutcome::CandidatesExhausted);
        }
    }
}

/// Formulas over the base variables up to the given operator depth,
/// deduplicated, in canonical order.
fn candidate_pool(base: &BTreeSet<String>, depth: usize) -> Vec<Formula> {
    let mut pool: BTreeSet<Formula> = base.iter().map(|x| Formula::Var(x.clone())).collect();
    pool.insert(formula::top());
    pool.insert(formula::bot());
    for _ in 0..depth {
        let snapshot: Vec<Formula> = pool.iter().cloned().collect();
        for f in &snapshot {
            pool.insert(formula::neg(f.clone()));
            pool.insert(formula::bx(f.clone()));
            for g in &snapshot {
                pool.insert(formula::and([f.clone(), g.clone()]));
                pool.insert(formula::or([f.clone(), g.clone()]));
            }
        }
        if pool.len() > 4000 {
            break;
        }
    }
    pool.into_iter().collect()
}

/// Result of verifying products and equalizers of functional frames.
#[derive(Clone, Debug)]
pub enum FunctionalLimitsOutcome {
    Verified { products: usize, equalizers: usize },
    Refuted(String),
}

/// For each sample pair: the componentwise product must be a functional
/// frame verified as the product up to the bound, and every agreement
/// subframe of a parallel pair must be verified as their equalizer.
pub fn functional_limits_check(
    samples: &[(Frame, Frame)],
    bound: usize,
) -> Result<FunctionalLimitsOutcome, PropsError> {
    use crate::cat::{equalizer, verify_universal_bounded, UniversalCheck};
    let class = FrameClass::Functional;
    let compiled = CompiledClass::new(&class);
    let mut products = 0;
    let mut equalizers = 0;
    for (a, b) in samples {
        for frame in [a, b] {
            if compiled.check(frame).is_err() {
                return Err(PropsError::InvalidCospan(format!(
                    "sample frame is not functional: {frame}"
                )));
            }
        }
        let product = componentwise_product(a, b);
        if compiled.check(&product.0).is_err() {
            return Ok(FunctionalLimitsOutcome::Refuted(format!(
                "product of {a} and {b} is not functional"
            )));
        }
        let verdict = verify_universal_bounded(
            &UniversalCheck::Product {
                proj0: product.1.clone(),
                proj1: product.2.clone(),
            },
            &class,
            bound,
        )?;
        if !verdict.is_verified() {
            return Ok(FunctionalLimitsOutcome::Refuted(format!(
                "product universality refuted for {a} and {b}"
            )));
        }
        products += 1;
        let parallel = enumerate_pmorphisms(a, b, DEFAULT_ENUMERATION_GUARD)?;
        for g in &parallel {
            for h in &parallel {
                let (e, incl) = equalizer(g, h)?;
                if compiled.check(&e).is_err() {
                    return Ok(FunctionalLimitsOutcome::Refuted(format!(
                        "equalizer of maps {a} -> {b} is not functional"
                    )));
                }
                let verdict = verify_universal_bounded(
                    &UniversalCheck::Equalizer {
                        g: g.clone(),
                        h: h.clone(),
                        incl,
                    },
                    &class,
                    bound,
                )?;
                if !verdict.is_verified() {
                    return Ok(FunctionalLimitsOutcome::Refuted(format!(
                        "equalizer universality refuted between {a} and {b}"
                    )));
                }
                equalizers += 1;
            }
        }
    }
    Ok(FunctionalLimitsOutcome::Verified {
        products,
        equalizers,
    })
}

/// Componentwise product with its projections. For functional (more
/// generally serial) frames this is the matching-pairs frame over the
/// reflexive point.
pub fn componentwise_product(a: &Frame, b: &Frame) -> (Frame, PMorphism, PMorphism) {
    let pairs: Vec<(PointId, PointId)> = a
        .points()
        .iter()
        .flat_map(|&x| b.points().iter().map(move |&y| (x, y)))
        .collect();
    let index: std::collections::BTreeMap<(PointId, PointId), PointId> = pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as PointId))
        .collect();
    let mut edges = BTreeSet::new();
    for &(x, y) in &pairs {
        for &(x2, y2) in &pairs {
            if a.has_edge(x, x2) && b.has_edge(y, y2) {
                edges.insert((index[&(x, y)], index[&(x2, y2)]));
            }
        }
    }
    let mut frame = Frame::new(index.values().copied().collect::<Vec<_>>(), edges).unwrap();
    for (&(x, y), &i) in &index {
        frame.set_label(i, format!("({x},{y})"));
    }
    let proj0 = PMorphism::validate(
        frame.clone(),
        a.clone(),
        index.iter().map(|(&(x, _), &i)| (i, x)).collect(),
    )
    .expect("first product projection of serial frames");
    let proj1 = PMorphism::validate(
        frame.clone(),
        b.clone(),
        index.iter().map(|(&(_, y), &i)| (i, y)).collect(),
    )
    .expect("second product projection of serial frames");
    (frame, proj0, proj1)
}

/// Checks that evaluating the defining family back through the
/// biconditional shape recovers the relation; used to revalidate holds
/// verdicts.
pub fn reverify_separation(
    rho: &Formula,
    tau: &Formula,
    base: &BTreeSet<String>,
    family: &[(String, Formula)],
    catalog: &[Frame],
    guard: usize,
) -> Result<bool, PropsError> {
    let shape = separation_shape(tau, base, family);
    catalog_equivalent(rho, &shape, catalog, guard)
}

/// Convenience used by probes: evaluate a closed formula on a frame under
/// the empty valuation.
pub fn closed_value(frame: &Frame, f: &Formula) -> Result<u64, PropsError> {
    Ok(eval_on_frame(frame, &Valuation::default(), f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::formula::{and, bx, iff, imp, or, top, var};
    use crate::fixtures::*;
    use crate::frame::{is_isomorphic, TableLogic};

    fn constant_to_point(frame: &Frame) -> PMorphism {
        PMorphism::validate(
            frame.clone(),
            point_frame(),
            frame.points().iter().map(|&p| (p, 0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn amalgamation_of_reflexive_chains() {
        let c = reflexive_chain_frame();
        let f = constant_to_point(&c);
        let cospan = Cospan::new(f.clone(), f, FrameClass::Table(TableLogic::S4)).unwrap();
        match amalgamate(&cospan, 6).unwrap() {
            AmalgamOutcome::Holds(am) => {
                assert!(am.via_matching_pairs);
                assert_eq!(am.apex.size(), 4);
                assert!(am.g0.is_surjective() && am.g1.is_surjective());
            }
            other => panic!("expected holds, got {other:?}"),
        }
        match superamalgamate(&cospan, 6).unwrap() {
            AmalgamOutcome::Holds(am) => assert!(am.via_matching_pairs),
            other => panic!("expected holds, got {other:?}"),
        }
    }

    #[test]
    fn identity_leg_amalgamates_trivially() {
        let v = fan_cycle_frame();
        let id = PMorphism::identity(&v);
        let other = PMorphism::validate(
            v.clone(),
            v.clone(),
            [(0, 0), (1, 2), (2, 1)].into_iter().collect(),
        )
        .unwrap();
        let cospan = Cospan::new(id, other, FrameClass::All).unwrap();
        match amalgamate(&cospan, 4).unwrap() {
            AmalgamOutcome::Holds(_) => {}
            other => panic!("expected holds, got {other:?}"),
        }
    }

    #[test]
    fn weak_pullback_check_examples() {
        let c = reflexive_chain_frame();
        let f = constant_to_point(&c);
        let cospan = Cospan::new(f.clone(), f.clone(), FrameClass::Table(TableLogic::S4)).unwrap();
        let am = match amalgamate(&cospan, 6).unwrap() {
            AmalgamOutcome::Holds(am) => am,
            other => panic!("{other:?}"),
        };
        assert_eq!(
            weak_pullback_check(&am.g0, &am.g1, &cospan.f0, &cospan.f1).unwrap(),
            Ok(())
        );
        // an empty apex misses every matching pair
        let empty = Frame::empty();
        let from_empty = PMorphism::validate(
            empty,
            c.clone(),
            std::collections::BTreeMap::new(),
        )
        .unwrap();
        let outcome =
            weak_pullback_check(&from_empty, &from_empty, &cospan.f0, &cospan.f1).unwrap();
        assert_eq!(outcome, Err((0, 0)));
    }

    #[test]
    fn beth_probes_on_the_paper_catalogs() {
        // weak definability holds over the fan-cycle catalog
        let v = fan_cycle_frame();
        let class = FrameClass::SubreductionsOf(v.clone());
        let catalog = crate::morphism::enumerate_subreductions(&v).unwrap();
        match beth_probe(&class, &catalog, 6, BethStrength::Weak).unwrap() {
            BethOutcome::HoldsUpToBound => {}
            other => panic!("expected holds, got {other:?}"),
        }
        // strong definability fails: the collapse quotient is strictly finer
        match beth_probe(&class, &catalog, 6, BethStrength::Strong).unwrap() {
            BethOutcome::Fails(w) => {
                assert!(w.morphism.is_surjective());
                assert!(!w.morphism.is_injective());
                if let BoundedStatus::Refuted(r) = &w.classification.regular_epi {
                    assert!(is_isomorphic(r.quotient.target(), &collapsed_fan_frame()).is_some());
                } else {
                    panic!("expected a quotient witness");
                }
            }
            other => panic!("expected failure, got {other:?}"),
        }
        // weak definability fails over the looped-pair catalog
        let b = looped_pair_frame();
        let class = FrameClass::SubreductionsOf(b.clone());
        let catalog = crate::morphism::enumerate_subreductions(&b).unwrap();
        match beth_probe(&class, &catalog, 6, BethStrength::Weak).unwrap() {
            BethOutcome::Fails(w) => {
                assert!(!w.morphism.is_injective());
                assert_eq!(w.morphism.source().size(), 2);
                assert_eq!(w.morphism.target().size(), 1);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn separation_of_variables_diagonal() {
        // the diagonal relation separates with the identity family
        let base: BTreeSet<String> = BTreeSet::from(["x".to_string()]);
        let tau = top();
        let rho = and([iff(var("x0"), var("x1"))]);
        let catalog = [point_frame(), reflexive_chain_frame()];
        match separates_variables_check(&rho, &tau, &base, &catalog, 0, 1_000_000).unwrap() {
            SeparationOutcome::Holds(family) => {
                assert!(reverify_separation(&rho, &tau, &base, &family, &catalog, 1_000_000)
                    .unwrap());
            }
            other => panic!("expected holds, got {other:?}"),
        }
    }

    #[test]
    fn separation_trivial_on_the_point() {
        // over the single reflexive point everything collapses
        let base: BTreeSet<String> = BTreeSet::from(["x".to_string()]);
        let tau = top();
        let rho = top();
        let catalog = [point_frame()];
        match separates_variables_check(&rho, &tau, &base, &catalog, 0, 1_000_000).unwrap() {
            SeparationOutcome::Holds(_) => {}
            other => panic!("expected holds, got {other:?}"),
        }
    }

    #[test]
    fn separation_detects_asymmetry() {
        let base: BTreeSet<String> = BTreeSet::from(["x".to_string()]);
        let tau = top();
        // an implication one way only is not symmetric
        let rho = and([or([bx(var("x0")), top()]), imp(var("x0"), var("x1"))]);
        let catalog = [point_frame()];
        match separates_variables_check(&rho, &tau, &base, &catalog, 1, 1_000_000).unwrap() {
            SeparationOutcome::ConditionFails {
                condition, frame, valuation,
            } => {
                assert_eq!(condition, 2);
                assert_eq!(frame.size(), 1);
                assert_eq!(valuation.get("x0"), Some(0));
                assert_eq!(valuation.get("x1"), Some(1));
            }
            other => panic!("expected symmetry failure, got {other:?}"),
        }
    }

    #[test]
    fn functional_products_and_equalizers() {
        let c3 = three_cycle_frame();
        let outcome = functional_limits_check(&[(c3.clone(), c3.clone())], 4).unwrap();
        match outcome {
            FunctionalLimitsOutcome::Verified { products, .. } => assert_eq!(products, 1),
            other => panic!("expected verified, got {other:?}"),
        }
        // the product of two 3-cycles is three 3-cycles
        let (p, _, _) = componentwise_product(&c3, &c3);
        assert_eq!(p.size(), 9);
        let cones: BTreeSet<usize> = p
            .points()
            .iter()
            .map(|&w| p.cone(w).unwrap().len())
            .collect();
        assert_eq!(cones, BTreeSet::from([3]));
        // product with the empty frame is empty
        let (e, _, _) = componentwise_product(&c3, &Frame::empty());
        assert!(e.is_empty());
    }
}
