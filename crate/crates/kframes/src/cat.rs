//! Categorical constructions on finite frames: coequalizers, cokernel
//! pairs, equalizers, the epi/regular-mono factorization, pullbacks along
//! regular monos, set-level pullback candidates, joint coequalizers, and
//! bounded universal-property verification.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::frame::{
    class_catalog_compiled, CompiledClass, Frame, FrameClass, FrameError, PointId,
};
use crate::morphism::{
    achievable_kernel_pairs, enumerate_pmorphisms, image, MorphismError, PMorphism,
    DEFAULT_ENUMERATION_GUARD,
};

#[derive(Debug, Error)]
pub enum CatError {
    #[error("maps are not parallel: {0}")]
    NotParallel(String),
    #[error("map is not injective at {0} and {1}")]
    NotInjective(PointId, PointId),
    #[error("quotient map failed openness, which valid inputs cannot produce: {0}")]
    QuotientNotOpen(MorphismError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Union-find with least representative, used for quotient construction.
struct UnionFind {
    parent: BTreeMap<PointId, PointId>,
}

impl UnionFind {
    fn new(points: &[PointId]) -> UnionFind {
        UnionFind {
            parent: points.iter().map(|&p| (p, p)).collect(),
        }
    }
    fn find(&mut self, x: PointId) -> PointId {
        let p = self.parent[&x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.parent.insert(x, r);
        r
    }
    fn union(&mut self, a: PointId, b: PointId) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        // least id wins as representative
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(hi, lo);
    }
}

/// Quotient of a frame by the equivalence closure of a pair set. Class
/// representatives are least point ids; the block relation holds iff some
/// representatives are related. Returns the quotient frame and the quotient
/// p-morphism.
///
/// The pairs must come from parallel p-morphism pairs (as in coequalizers
/// and the kernel-pair searches); those make the quotient map open by the
/// zig-zag transport along generating pairs. Arbitrary pair sets need not,
/// and panic here.
pub fn quotient_by_pairs(
    frame: &Frame,
    pairs: &BTreeSet<(PointId, PointId)>,
) -> (Frame, PMorphism) {
    let mut uf = UnionFind::new(frame.points());
    for &(a, b) in pairs {
        uf.union(a, b);
    }
    let map: BTreeMap<PointId, PointId> = frame
        .points()
        .iter()
        .map(|&p| (p, uf.find(p)))
        .collect();
    let reps: BTreeSet<PointId> = map.values().copied().collect();
    let mut edges = BTreeSet::new();
    for &(a, b) in frame.edges() {
        edges.insert((map[&a], map[&b]));
    }
    let mut q = Frame::new(reps.iter().copied().collect::<Vec<_>>(), edges).unwrap();
    for &r in &reps {
        let members: Vec<String> = map
            .iter()
            .filter(|(_, &rep)| rep == r)
            .map(|(p, _)| p.to_string())
            .collect();
        if members.len() > 1 {
            q.set_label(r, format!("{{{}}}", members.join(" ")));
        }
    }
    let qm = PMorphism::validate(frame.clone(), q.clone(), map)
        .expect("quotient maps along identified pairs of p-morphisms stay open");
    (q, qm)
}

/// Coequalizer of a parallel pair. The quotient identifies g(u) with h(u)
/// for every source point; openness of the quotient map is re-verified and
/// a violation is reported loudly rather than silently accepted.
pub fn coequalizer(
    g: &PMorphism,
    h: &PMorphism,
    class: &FrameClass,
) -> Result<(Frame, PMorphism), CatError> {
    if g.source() != h.source() || g.target() != h.target() {
        return Err(CatError::NotParallel(
            "coequalizer needs a parallel pair".into(),
        ));
    }
    let pairs: BTreeSet<(PointId, PointId)> = g
        .source()
        .points()
        .iter()
        .map(|&u| (g.apply(u), h.apply(u)))
        .collect();
    let w = g.target();
    let mut uf = UnionFind::new(w.points());
    for &(a, b) in &pairs {
        uf.union(a, b);
    }
    let map: BTreeMap<PointId, PointId> = w.points().iter().map(|&p| (p, uf.find(p))).collect();
    let reps: BTreeSet<PointId> = map.values().copied().collect();
    let mut edges = BTreeSet::new();
    for &(a, b) in w.edges() {
        edges.insert((map[&a], map[&b]));
    }
    let q_frame = Frame::new(reps.iter().copied().collect::<Vec<_>>(), edges).unwrap();
    let q = PMorphism::validate(w.clone(), q_frame.clone(), map).map_err(CatError::QuotientNotOpen)?;
    debug_assert!(
        CompiledClass::new(class).contains(&q_frame),
        "classes closed under surjective images must contain the quotient"
    );
    Ok((q_frame, q))
}

/// Cokernel pair of f: W -> V.
///
/// Points are the pairs (v, i) with i in {0, 1} where i = 0 forces v
/// outside the image of f; (v,i) relates to (v',i') iff v relates to v' and
/// either i = i' or i < i' with v' in the image. The two injections agree
/// exactly on the image of f.
#[derive(Clone, Debug)]
pub struct CokernelPair {
    pub frame: Frame,
    pub iota0: PMorphism,
    pub iota1: PMorphism,
}

pub fn cokernel_pair(f: &PMorphism) -> CokernelPair {
    let v = f.target();
    let im = f.image_points();
    let mut pairs: Vec<(PointId, u8)> = Vec::new();
    for &p in v.points() {
        if !im.contains(&p) {
            pairs.push((p, 0));
        }
        pairs.push((p, 1));
    }
    let index: BTreeMap<(PointId, u8), PointId> = pairs
        .iter()
        .enumerate()
        .map(|(i, &pr)| (pr, i as PointId))
        .collect();
    let mut edges = BTreeSet::new();
    for &(p, i) in &pairs {
        for &(p2, i2) in &pairs {
            if v.has_edge(p, p2) && (i == i2 || (i < i2 && im.contains(&p2))) {
                edges.insert((index[&(p, i)], index[&(p2, i2)]));
            }
        }
    }
    let mut frame = Frame::new(index.values().copied().collect::<Vec<_>>(), edges).unwrap();
    for (&(p, i), &id) in &index {
        frame.set_label(id, format!("({p},{i})"));
    }
    let map0: BTreeMap<PointId, PointId> = v
        .points()
        .iter()
        .map(|&p| {
            let tag = if im.contains(&p) { 1 } else { 0 };
            (p, index[&(p, tag)])
        })
        .collect();
    let map1: BTreeMap<PointId, PointId> =
        v.points().iter().map(|&p| (p, index[&(p, 1)])).collect();
    debug_assert!(PMorphism::validate(v.clone(), frame.clone(), map0.clone()).is_ok());
    debug_assert!(PMorphism::validate(v.clone(), frame.clone(), map1.clone()).is_ok());
    let iota0 = PMorphism::from_parts(v.clone(), frame.clone(), map0);
    let iota1 = PMorphism::from_parts(v.clone(), frame.clone(), map1);
    CokernelPair {
        frame,
        iota0,
        iota1,
    }
}

/// Equalizer of a parallel pair: the largest generated subframe on which the
/// whole cone of every point agrees, with its inclusion.
pub fn equalizer(g: &PMorphism, h: &PMorphism) -> Result<(Frame, PMorphism), CatError> {
    if g.source() != h.source() || g.target() != h.target() {
        return Err(CatError::NotParallel(
            "equalizer needs a parallel pair".into(),
        ));
    }
    let w = g.source();
    let agree: BTreeSet<PointId> = w
        .points()
        .iter()
        .copied()
        .filter(|&p| g.apply(p) == h.apply(p))
        .collect();
    // keep points whose cone stays inside the agreement set
    let keep: BTreeSet<PointId> = w
        .points()
        .iter()
        .copied()
        .filter(|&p| w.cone(p).unwrap().iter().all(|q| agree.contains(q)))
        .collect();
    let e = w.induced(&keep);
    let incl = PMorphism::inclusion(&e, w)?;
    Ok((e, incl))
}

/// Epi/regular-mono factorization, identical to the image factorization.
pub fn coregular_factorization(f: &PMorphism) -> (PMorphism, PMorphism) {
    let (_, e, m) = image(f);
    (e, m)
}

/// Pullback of f along an injective p-morphism m: the preimage subframe,
/// with its inclusion and the induced comparison to the subobject.
pub fn pullback_along_regmono(
    f: &PMorphism,
    m: &PMorphism,
) -> Result<(Frame, PMorphism, PMorphism), CatError> {
    if !m.is_injective() {
        let mut seen: BTreeMap<PointId, PointId> = BTreeMap::new();
        for (&a, &b) in m.map() {
            if let Some(&a0) = seen.get(&b) {
                return Err(CatError::NotInjective(a0, a));
            }
            seen.insert(b, a);
        }
    }
    if f.target() != m.target() {
        return Err(CatError::NotParallel(
            "pullback needs a common codomain".into(),
        ));
    }
    let back: BTreeMap<PointId, PointId> = m.map().iter().map(|(&u, &v)| (v, u)).collect();
    let keep: BTreeSet<PointId> = f
        .source()
        .points()
        .iter()
        .copied()
        .filter(|&w| back.contains_key(&f.apply(w)))
        .collect();
    let pb = f.source().induced(&keep);
    let incl = PMorphism::inclusion(&pb, f.source())?;
    let proj = PMorphism::validate(
        pb.clone(),
        m.source().clone(),
        keep.iter().map(|&w| (w, back[&f.apply(w)])).collect(),
    )?;
    Ok((pb, incl, proj))
}

/// The set-level pullback candidate of a cospan: matching pairs with the
/// componentwise relation. The projections are always p-morphisms and are
/// surjective when the opposite legs are, but the candidate need not be a
/// pullback in the class; membership is reported separately.
pub struct SetPullback {
    pub frame: Frame,
    pub proj0: PMorphism,
    pub proj1: PMorphism,
    pub in_class: Result<(), crate::frame::ClassViolation>,
}

pub fn set_pullback(
    f0: &PMorphism,
    f1: &PMorphism,
    class: &FrameClass,
) -> Result<SetPullback, CatError> {
    if f0.target() != f1.target() {
        return Err(CatError::NotParallel(
            "set pullback needs a cospan".into(),
        ));
    }
    let pairs: Vec<(PointId, PointId)> = f0
        .source()
        .points()
        .iter()
        .flat_map(|&a| {
            f1.source()
                .points()
                .iter()
                .filter(move |&&b| f0.apply(a) == f1.apply(b))
                .map(move |&b| (a, b))
        })
        .collect();
    let index: BTreeMap<(PointId, PointId), PointId> = pairs
        .iter()
        .enumerate()
        .map(|(i, &pr)| (pr, i as PointId))
        .collect();
    let mut edges = BTreeSet::new();
    for &(a, b) in &pairs {
        for &(a2, b2) in &pairs {
            if f0.source().has_edge(a, a2) && f1.source().has_edge(b, b2) {
                edges.insert((index[&(a, b)], index[&(a2, b2)]));
            }
        }
    }
    let mut frame = Frame::new(index.values().copied().collect::<Vec<_>>(), edges).unwrap();
    for (&(a, b), &id) in &index {
        frame.set_label(id, format!("({a},{b})"));
    }
    let proj0 = PMorphism::validate(
        frame.clone(),
        f0.source().clone(),
        index.iter().map(|(&(a, _), &i)| (i, a)).collect(),
    )
    .expect("first projection of a set pullback");
    let proj1 = PMorphism::validate(
        frame.clone(),
        f1.source().clone(),
        index.iter().map(|(&(_, b), &i)| (i, b)).collect(),
    )
    .expect("second projection of a set pullback");
    let in_class = CompiledClass::new(class).check(&frame);
    Ok(SetPullback {
        frame,
        proj0,
        proj1,
        in_class,
    })
}

/// Joint coequalizer of every parallel pair into the source of `f` that `f`
/// coequalizes, ranging over class frames of at most `bound` points.
/// Monotone in the bound.
pub fn wide_coequalizer(
    f: &PMorphism,
    class: &FrameClass,
    bound: usize,
) -> Result<(Frame, PMorphism), CatError> {
    wide_coequalizer_compiled(f, &CompiledClass::new(class), bound)
}

pub fn wide_coequalizer_compiled(
    f: &PMorphism,
    class: &CompiledClass,
    bound: usize,
) -> Result<(Frame, PMorphism), CatError> {
    let (pairs, _) = achievable_kernel_pairs(f, class, bound)?;
    Ok(quotient_by_pairs(f.source(), &pairs))
}

/// Outcome of a bounded universal-property check.
#[derive(Clone, Debug)]
pub enum UniversalVerdict {
    VerifiedUpTo(usize),
    Refuted(UniversalRefutation),
}

impl UniversalVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, UniversalVerdict::VerifiedUpTo(_))
    }
}

/// A test cone or cocone that fails to factor, or factors non-uniquely.
#[derive(Clone, Debug)]
pub struct UniversalRefutation {
    pub test_frame: Frame,
    pub legs: Vec<PMorphism>,
    pub reason: RefutationReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefutationReason {
    NoFactorization,
    NonUniqueFactorization,
}

/// The diagram plus candidate shapes subject to bounded verification.
pub enum UniversalCheck {
    /// Candidate (Q, q) for the coequalizer of (g, h).
    Coequalizer {
        g: PMorphism,
        h: PMorphism,
        q: PMorphism,
    },
    /// Candidate (U, i0, i1) for the pushout of f with itself.
    CokernelPair {
        f: PMorphism,
        iota0: PMorphism,
        iota1: PMorphism,
    },
    /// Candidate (P, p0, p1) for the pullback of the cospan (f0, f1).
    Pullback {
        f0: PMorphism,
        f1: PMorphism,
        proj0: PMorphism,
        proj1: PMorphism,
    },
    /// Candidate (E, m) for the equalizer of (g, h).
    Equalizer {
        g: PMorphism,
        h: PMorphism,
        incl: PMorphism,
    },
    /// Candidate (P, p0, p1) for the product of the projections' targets.
    Product { proj0: PMorphism, proj1: PMorphism },
}

/// Checks existence and uniqueness of factorizations against every class
/// frame with at most `bound` points. Deterministic: test frames and their
/// maps are enumerated in canonical order and the first failure is
/// reported.
pub fn verify_universal_bounded(
    check: &UniversalCheck,
    class: &FrameClass,
    bound: usize,
) -> Result<UniversalVerdict, CatError> {
    let compiled = CompiledClass::new(class);
    let catalog = class_catalog_compiled(&compiled, bound)?;
    for t in &catalog {
        if let Some(refutation) = verify_against(check, t)? {
            return Ok(UniversalVerdict::Refuted(refutation));
        }
    }
    Ok(UniversalVerdict::VerifiedUpTo(bound))
}

fn count_factorizations(
    from: &Frame,
    to: &Frame,
    constraint: impl Fn(&PMorphism) -> bool,
) -> Result<usize, MorphismError> {
    Ok(enumerate_pmorphisms(from, to, DEFAULT_ENUMERATION_GUARD)?
        .into_iter()
        .filter(constraint)
        .count())
}

fn verify_against(
    check: &UniversalCheck,
    t: &Frame,
) -> Result<Option<UniversalRefutation>, CatError> {
    match check {
        UniversalCheck::Coequalizer { g, h, q } => {
            for cocone in enumerate_pmorphisms(g.target(), t, DEFAULT_ENUMERATION_GUARD)? {
                let coequalizes = g
                    .source()
                    .points()
                    .iter()
                    .all(|&u| cocone.apply(g.apply(u)) == cocone.apply(h.apply(u)));
                if !coequalizes {
                    continue;
                }
                let count = count_factorizations(q.target(), t, |u| {
                    q.source()
                        .points()
                        .iter()
                        .all(|&w| u.apply(q.apply(w)) == cocone.apply(w))
                })?;
                if count != 1 {
                    return Ok(Some(UniversalRefutation {
                        test_frame: t.clone(),
                        legs: vec![cocone],
                        reason: if count == 0 {
                            RefutationReason::NoFactorization
                        } else {
                            RefutationReason::NonUniqueFactorization
                        },
                    }));
                }
            }
            Ok(None)
        }
        UniversalCheck::CokernelPair { f, iota0, iota1 } => {
            let cocones = enumerate_pmorphisms(f.target(), t, DEFAULT_ENUMERATION_GUARD)?;
            for t0 in &cocones {
                for t1 in &cocones {
                    let commutes = f
                        .source()
                        .points()
                        .iter()
                        .all(|&w| t0.apply(f.apply(w)) == t1.apply(f.apply(w)));
                    if !commutes {
                        continue;
                    }
                    let count = count_factorizations(iota0.target(), t, |u| {
                        iota0
                            .source()
                            .points()
                            .iter()
                            .all(|&v| u.apply(iota0.apply(v)) == t0.apply(v))
                            && iota1
                                .source()
                                .points()
                                .iter()
                                .all(|&v| u.apply(iota1.apply(v)) == t1.apply(v))
                    })?;
                    if count != 1 {
                        return Ok(Some(UniversalRefutation {
                            test_frame: t.clone(),
                            legs: vec![t0.clone(), t1.clone()],
                            reason: if count == 0 {
                                RefutationReason::NoFactorization
                            } else {
                                RefutationReason::NonUniqueFactorization
                            },
                        }));
                    }
                }
            }
            Ok(None)
        }
        UniversalCheck::Pullback {
            f0,
            f1,
            proj0,
            proj1,
        } => {
            let legs0 = enumerate_pmorphisms(t, f0.source(), DEFAULT_ENUMERATION_GUARD)?;
            let legs1 = enumerate_pmorphisms(t, f1.source(), DEFAULT_ENUMERATION_GUARD)?;
            for t0 in &legs0 {
                for t1 in &legs1 {
                    let commutes = t
                        .points()
                        .iter()
                        .all(|&x| f0.apply(t0.apply(x)) == f1.apply(t1.apply(x)));
                    if !commutes {
                        continue;
                    }
                    let count = count_factorizations(t, proj0.source(), |u| {
                        t.points().iter().all(|&x| {
                            proj0.apply(u.apply(x)) == t0.apply(x)
                                && proj1.apply(u.apply(x)) == t1.apply(x)
                        })
                    })?;
                    if count != 1 {
                        return Ok(Some(UniversalRefutation {
                            test_frame: t.clone(),
                            legs: vec![t0.clone(), t1.clone()],
                            reason: if count == 0 {
                                RefutationReason::NoFactorization
                            } else {
                                RefutationReason::NonUniqueFactorization
                            },
                        }));
                    }
                }
            }
            Ok(None)
        }
        UniversalCheck::Equalizer { g, h, incl } => {
            for leg in enumerate_pmorphisms(t, g.source(), DEFAULT_ENUMERATION_GUARD)? {
                let equalizes = t
                    .points()
                    .iter()
                    .all(|&x| g.apply(leg.apply(x)) == h.apply(leg.apply(x)));
                if !equalizes {
                    continue;
                }
                let count = count_factorizations(t, incl.source(), |u| {
                    t.points()
                        .iter()
                        .all(|&x| incl.apply(u.apply(x)) == leg.apply(x))
                })?;
                if count != 1 {
                    return Ok(Some(UniversalRefutation {
                        test_frame: t.clone(),
                        legs: vec![leg],
                        reason: if count == 0 {
                            RefutationReason::NoFactorization
                        } else {
                            RefutationReason::NonUniqueFactorization
                        },
                    }));
                }
            }
            Ok(None)
        }
        UniversalCheck::Product { proj0, proj1 } => {
            let legs0 = enumerate_pmorphisms(t, proj0.target(), DEFAULT_ENUMERATION_GUARD)?;
            let legs1 = enumerate_pmorphisms(t, proj1.target(), DEFAULT_ENUMERATION_GUARD)?;
            for t0 in &legs0 {
                for t1 in &legs1 {
                    let count = count_factorizations(t, proj0.source(), |u| {
                        t.points().iter().all(|&x| {
                            proj0.apply(u.apply(x)) == t0.apply(x)
                                && proj1.apply(u.apply(x)) == t1.apply(x)
                        })
                    })?;
                    if count != 1 {
                        return Ok(Some(UniversalRefutation {
                            test_frame: t.clone(),
                            legs: vec![t0.clone(), t1.clone()],
                            reason: if count == 0 {
                                RefutationReason::NoFactorization
                            } else {
                                RefutationReason::NonUniqueFactorization
                            },
                        }));
                    }
                }
            }
            Ok(None)
        }
    }
}

/// Convenience: the unique induced comparison from a quotient onto a target
/// through which the quotiented morphism factors.
pub fn induced_comparison(q: &PMorphism, f: &PMorphism) -> Result<PMorphism, CatError> {
    if q.source() != f.source() {
        return Err(CatError::NotParallel(
            "comparison needs a common source".into(),
        ));
    }
    let mut map = BTreeMap::new();
    for &w in q.source().points() {
        let prev = map.insert(q.apply(w), f.apply(w));
        if let Some(old) = prev {
            if old != f.apply(w) {
                return Err(CatError::NotParallel(
                    "morphism does not respect the quotient".into(),
                ));
            }
        }
    }
    Ok(PMorphism::validate(
        q.target().clone(),
        f.target().clone(),
        map,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::morphism::compose;
    use crate::frame::{is_isomorphic, TableLogic};

    fn pm(source: &Frame, target: &Frame, pairs: &[(PointId, PointId)]) -> PMorphism {
        PMorphism::validate(
            source.clone(),
            target.clone(),
            pairs.iter().copied().collect(),
        )
        .unwrap()
    }

    #[test]
    fn coequalizer_of_identity_pair() {
        let v = fan_cycle_frame();
        let id = PMorphism::identity(&v);
        let (q, qm) = coequalizer(&id, &id, &FrameClass::All).unwrap();
        assert_eq!(q, v);
        assert_eq!(qm.map(), id.map());
    }

    #[test]
    fn coequalizer_collapses_the_cycle() {
        let v = fan_cycle_frame();
        let v1 = two_cycle_frame();
        let incl = PMorphism::inclusion(&v1, &v).unwrap();
        let swap = pm(&v1, &v1, &[(1, 2), (2, 1)]);
        let twisted = compose(&incl, &swap).unwrap();
        let (q, qm) = coequalizer(&incl, &twisted, &FrameClass::All).unwrap();
        assert!(is_isomorphic(&q, &collapsed_fan_frame()).is_some());
        assert!(qm.is_surjective());
        assert_eq!(qm.apply(1), qm.apply(2));
        assert_ne!(qm.apply(0), qm.apply(1));
    }

    #[test]
    fn coequalizer_respects_generating_pairs() {
        let v = fan_cycle_frame();
        let v1 = two_cycle_frame();
        let g = PMorphism::inclusion(&v1, &v).unwrap();
        let h = compose(&g, &pm(&v1, &v1, &[(1, 2), (2, 1)])).unwrap();
        let (_, q) = coequalizer(&g, &h, &FrameClass::All).unwrap();
        for &u in v1.points() {
            assert_eq!(q.apply(g.apply(u)), q.apply(h.apply(u)));
        }
        let verdict = verify_universal_bounded(
            &UniversalCheck::Coequalizer {
                g,
                h,
                q,
            },
            &FrameClass::Table(TableLogic::K),
            3,
        )
        .unwrap();
        assert!(verdict.is_verified());
    }

    #[test]
    fn cokernel_pair_of_inclusion() {
        let v = fan_cycle_frame();
        let v1 = two_cycle_frame();
        let incl = PMorphism::inclusion(&v1, &v).unwrap();
        let ck = cokernel_pair(&incl);
        assert_eq!(ck.frame.size(), 4);
        // labels encode the construction: (0,0),(0,1),(1,1),(2,1)
        let labels: BTreeSet<&str> = ck
            .frame
            .points()
            .iter()
            .filter_map(|&p| ck.frame.label(p))
            .collect();
        assert_eq!(
            labels,
            BTreeSet::from(["(0,0)", "(0,1)", "(1,1)", "(2,1)"])
        );
        assert_eq!(ck.frame.edges().len(), 6);
        // the injections agree exactly on the image {1,2}
        for &p in v.points() {
            let agree = ck.iota0.apply(p) == ck.iota1.apply(p);
            assert_eq!(agree, incl.image_points().contains(&p));
        }
    }

    #[test]
    fn cokernel_pair_surjective_and_empty_cases() {
        let v = fan_cycle_frame();
        let bang = pm(&v, &point_frame(), &[(0, 0), (1, 0), (2, 0)]);
        let ck = cokernel_pair(&bang);
        assert!(is_isomorphic(&ck.frame, &point_frame()).is_some());
        assert_eq!(ck.iota0.map(), ck.iota1.map());

        let empty = Frame::empty();
        let from_empty = PMorphism::validate(empty, v.clone(), BTreeMap::new()).unwrap();
        let ck = cokernel_pair(&from_empty);
        let (double, _) = crate::frame::disjoint_union(&[v.clone(), v.clone()]);
        assert!(is_isomorphic(&ck.frame, &double).is_some());
    }

    #[test]
    fn equalizer_recovers_image() {
        let v = fan_cycle_frame();
        let v1 = two_cycle_frame();
        let incl = PMorphism::inclusion(&v1, &v).unwrap();
        let ck = cokernel_pair(&incl);
        let (e, _) = equalizer(&ck.iota0, &ck.iota1).unwrap();
        assert!(is_isomorphic(&e, &v1).is_some());
    }

    #[test]
    fn equalizer_edge_cases() {
        let v = fan_cycle_frame();
        let id = PMorphism::identity(&v);
        let (e, _) = equalizer(&id, &id).unwrap();
        assert_eq!(e, v);
        // agreement set {0} is not closed, so the equalizer is empty
        let swap = pm(&v, &v, &[(0, 0), (1, 2), (2, 1)]);
        let (e, _) = equalizer(&id, &swap).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn factorization_examples() {
        let v = fan_cycle_frame();
        let v1 = two_cycle_frame();
        let incl = PMorphism::inclusion(&v1, &v).unwrap();
        let (e, m) = coregular_factorization(&incl);
        assert!(e.is_injective() && e.is_surjective());
        assert!(m.is_injective());
        let bang = pm(&v, &point_frame(), &[(0, 0), (1, 0), (2, 0)]);
        let (e, m) = coregular_factorization(&bang);
        assert!(e.is_surjective());
        assert!(m.is_surjective() && m.is_injective());
        let through = compose(&bang, &incl).unwrap();
        let (e, m) = coregular_factorization(&through);
        assert!(e.is_surjective());
        assert_eq!(m.source().size(), 1);
    }

    #[test]
    fn pullback_along_regmono_examples() {
        let v = fan_cycle_frame();
        let one = point_frame();
        let bang = pm(&v, &one, &[(0, 0), (1, 0), (2, 0)]);
        let (pb, _, _) = pullback_along_regmono(&bang, &PMorphism::identity(&one)).unwrap();
        assert_eq!(pb, v);

        let swap = pm(&v, &v, &[(0, 0), (1, 2), (2, 1)]);
        let v1 = two_cycle_frame();
        let m = PMorphism::inclusion(&v1, &v).unwrap();
        let (pb, _, proj) = pullback_along_regmono(&swap, &m).unwrap();
        assert!(is_isomorphic(&pb, &v1).is_some());
        assert!(proj.is_surjective());

        let empty = Frame::empty();
        let m_empty = PMorphism::validate(empty, v.clone(), BTreeMap::new()).unwrap();
        let (pb, _, _) = pullback_along_regmono(&swap, &m_empty).unwrap();
        assert!(pb.is_empty());
    }

    #[test]
    fn pullback_preserves_surjectivity() {
        let v = fan_cycle_frame();
        let one = point_frame();
        let bang = pm(&v, &one, &[(0, 0), (1, 0), (2, 0)]);
        let (_, _, proj) = pullback_along_regmono(&bang, &PMorphism::identity(&one)).unwrap();
        assert!(proj.is_surjective());
    }

    #[test]
    fn set_pullback_product_of_chains() {
        let c = reflexive_chain_frame();
        let one = point_frame();
        let f0 = pm(&c, &one, &[(0, 0), (1, 0)]);
        let f1 = f0.clone();
        let sp = set_pullback(&f0, &f1, &FrameClass::Table(TableLogic::S4)).unwrap();
        assert_eq!(sp.frame.size(), 4);
        assert!(sp.in_class.is_ok());
        assert!(sp.proj0.is_surjective() && sp.proj1.is_surjective());
    }

    #[test]
    fn set_pullback_diagonal_and_empty() {
        let v = fan_cycle_frame();
        let one = point_frame();
        let f = pm(&v, &one, &[(0, 0), (1, 0), (2, 0)]);
        let sp = set_pullback(&f, &f, &FrameClass::All).unwrap();
        // the diagonal pairs form a subframe isomorphic to the source
        let diagonal: BTreeSet<PointId> = sp
            .frame
            .points()
            .iter()
            .copied()
            .filter(|&p| sp.proj0.apply(p) == sp.proj1.apply(p))
            .collect();
        let diag_frame = sp.frame.induced(&diagonal);
        assert!(is_isomorphic(&diag_frame, &v).is_some());

        let empty = Frame::empty();
        let from_empty = PMorphism::validate(empty, one.clone(), BTreeMap::new()).unwrap();
        let sp = set_pullback(&from_empty, &f, &FrameClass::All).unwrap();
        assert!(sp.frame.is_empty());
    }

    #[test]
    fn wide_coequalizer_on_fan_cycle() {
        let v = fan_cycle_frame();
        let class = FrameClass::SubreductionsOf(v.clone());
        let bang = pm(&v, &point_frame(), &[(0, 0), (1, 0), (2, 0)]);
        let (q, _) = wide_coequalizer(&bang, &class, 6).unwrap();
        assert!(is_isomorphic(&q, &collapsed_fan_frame()).is_some());
    }

    #[test]
    fn wide_coequalizer_injective_is_identity() {
        let v = fan_cycle_frame();
        let v1 = two_cycle_frame();
        let incl = PMorphism::inclusion(&v1, &v).unwrap();
        let (q, _) = wide_coequalizer(&incl, &FrameClass::All, 6).unwrap();
        assert_eq!(q, v1);
    }

    #[test]
    fn wide_coequalizer_of_collapsed_fan_collapses_further() {
        // The fan-cycle frame itself admits two maps onto the collapsed fan
        // that agree after the terminal map, so the joint coequalizer of
        // collapsed-fan -> point is the point, not the collapsed fan.
        let v2 = collapsed_fan_frame();
        let class = FrameClass::SubreductionsOf(fan_cycle_frame());
        let bang = pm(&v2, &point_frame(), &[(0, 0), (1, 0)]);
        let (q, _) = wide_coequalizer(&bang, &class, 6).unwrap();
        assert!(is_isomorphic(&q, &point_frame()).is_some());
    }

    #[test]
    fn set_pullback_can_fail_universality() {
        // forks over a chain: the candidate admits a cone that cannot factor
        let fork = Frame::new([0, 1, 2], [(0, 1), (0, 2)]).unwrap();
        let chain = Frame::new([0, 1], [(0, 1)]).unwrap();
        let f = pm(&fork, &chain, &[(0, 0), (1, 1), (2, 1)]);
        let sp = set_pullback(&f, &f, &FrameClass::Table(TableLogic::K)).unwrap();
        let verdict = verify_universal_bounded(
            &UniversalCheck::Pullback {
                f0: f.clone(),
                f1: f.clone(),
                proj0: sp.proj0.clone(),
                proj1: sp.proj1.clone(),
            },
            &FrameClass::Table(TableLogic::K),
            3,
        )
        .unwrap();
        match verdict {
            UniversalVerdict::Refuted(r) => {
                assert_eq!(r.reason, RefutationReason::NoFactorization);
                assert_eq!(r.test_frame.size(), 3);
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn cokernel_pair_is_bounded_pushout() {
        let v = fan_cycle_frame();
        let v1 = two_cycle_frame();
        let incl = PMorphism::inclusion(&v1, &v).unwrap();
        let ck = cokernel_pair(&incl);
        let verdict = verify_universal_bounded(
            &UniversalCheck::CokernelPair {
                f: incl,
                iota0: ck.iota0.clone(),
                iota1: ck.iota1.clone(),
            },
            &FrameClass::Table(TableLogic::K),
            3,
        )
        .unwrap();
        assert!(verdict.is_verified());
    }
}
