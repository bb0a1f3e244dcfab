//! p-morphisms: validation, enumeration, images, subreductions, and bounded
//! epi/mono classification.
//!
//! A p-morphism is a point map that is stable (edges map to edges) and open
//! (accessible targets lift to accessible preimages). In the locally finite
//! setting epis are exactly the surjections and regular monos exactly the
//! injections; plain monos and regular epis are only semi-decidable, so the
//! classifier reports three-valued statuses with the search bound attached.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::frame::{
    rooted_class_catalog, CompiledClass, Frame, FrameClass, FrameError, PointId,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphismError {
    #[error("map is not total: point {0} unassigned")]
    NotTotal(PointId),
    #[error("map sends {0} to {1}, which is not a target point")]
    UnknownTarget(PointId, PointId),
    #[error("stability fails: {w}>{w2} in the source but {fw}>{fw2} missing in the target")]
    Stability {
        w: PointId,
        w2: PointId,
        fw: PointId,
        fw2: PointId,
    },
    #[error("openness fails: f({w})>{v2} in the target has no lift from {w}")]
    Openness { w: PointId, v2: PointId },
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("search space too large: {0}")]
    SizeGuard(String),
}

/// A validated p-morphism between two frames. Owns copies of both frames.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMorphism {
    source: Frame,
    target: Frame,
    map: BTreeMap<PointId, PointId>,
}

impl fmt::Display for PMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "map:")?;
        for (a, b) in &self.map {
            write!(f, " {a}>{b}")?;
        }
        Ok(())
    }
}

impl PMorphism {
    /// Checks totality, stability and openness of a raw point map.
    pub fn validate(
        source: Frame,
        target: Frame,
        map: BTreeMap<PointId, PointId>,
    ) -> Result<PMorphism, MorphismError> {
        for &w in source.points() {
            let v = *map.get(&w).ok_or(MorphismError::NotTotal(w))?;
            if !target.has_point(v) {
                return Err(MorphismError::UnknownTarget(w, v));
            }
        }
        for &(w, w2) in source.edges() {
            let (fw, fw2) = (map[&w], map[&w2]);
            if !target.has_edge(fw, fw2) {
                return Err(MorphismError::Stability { w, w2, fw, fw2 });
            }
        }
        for &w in source.points() {
            let fw = map[&w];
            for v2 in target.successors(fw) {
                let lifted = source.successors(w).any(|w2| map[&w2] == v2);
                if !lifted {
                    return Err(MorphismError::Openness { w, v2 });
                }
            }
        }
        Ok(PMorphism {
            source,
            target,
            map,
        })
    }

    pub fn identity(frame: &Frame) -> PMorphism {
        PMorphism {
            source: frame.clone(),
            target: frame.clone(),
            map: frame.points().iter().map(|&p| (p, p)).collect(),
        }
    }

    /// Assembles a morphism whose validity is guaranteed by construction.
    /// Callers must hold a proof obligation; prefer [`PMorphism::validate`].
    pub(crate) fn from_parts(
        source: Frame,
        target: Frame,
        map: BTreeMap<PointId, PointId>,
    ) -> PMorphism {
        PMorphism {
            source,
            target,
            map,
        }
    }

    /// Inclusion of a generated subframe (ids preserved).
    pub fn inclusion(sub: &Frame, whole: &Frame) -> Result<PMorphism, MorphismError> {
        PMorphism::validate(
            sub.clone(),
            whole.clone(),
            sub.points().iter().map(|&p| (p, p)).collect(),
        )
    }

    pub fn source(&self) -> &Frame {
        &self.source
    }

    pub fn target(&self) -> &Frame {
        &self.target
    }

    pub fn map(&self) -> &BTreeMap<PointId, PointId> {
        &self.map
    }

    pub fn apply(&self, p: PointId) -> PointId {
        self.map[&p]
    }

    pub fn is_injective(&self) -> bool {
        let image: BTreeSet<PointId> = self.map.values().copied().collect();
        image.len() == self.source.size()
    }

    pub fn is_surjective(&self) -> bool {
        let image: BTreeSet<PointId> = self.map.values().copied().collect();
        image.len() == self.target.size()
    }

    pub fn image_points(&self) -> BTreeSet<PointId> {
        self.map.values().copied().collect()
    }
}

/// Composition g ∘ f. Fails unless the codomain of `f` is the domain of `g`.
pub fn compose(g: &PMorphism, f: &PMorphism) -> Result<PMorphism, MorphismError> {
    if f.target != g.source {
        return Err(MorphismError::FrameMismatch(
            "codomain of the inner map differs from the domain of the outer map".into(),
        ));
    }
    let map = f.map.iter().map(|(&w, &v)| (w, g.map[&v])).collect();
    // composition of p-morphisms is a p-morphism; revalidate as a guard
    PMorphism::validate(f.source.clone(), g.target.clone(), map)
}

/// Image factorization: the image frame with the surjection onto it and the
/// inclusion back into the target. The image carries the restricted
/// relation and is a generated subframe of the target.
pub fn image(f: &PMorphism) -> (Frame, PMorphism, PMorphism) {
    let im_points = f.image_points();
    let im = f.target.induced(&im_points);
    let e = PMorphism::validate(f.source.clone(), im.clone(), f.map.clone())
        .expect("corestriction of a p-morphism onto its image");
    let m = PMorphism::inclusion(&im, &f.target).expect("image is a generated subframe");
    (im, e, m)
}

/// All p-morphisms from `source` to `target`, canonically ordered by their
/// point maps. Backtracks over source points in sorted order with stability
/// pruning over dense adjacency masks, then filters by openness at the
/// leaves. Frames beyond 64 points are rejected.
pub fn enumerate_pmorphisms(
    source: &Frame,
    target: &Frame,
    guard: usize,
) -> Result<Vec<PMorphism>, MorphismError> {
    let n = source.size();
    let m = target.size();
    if n > 0 && m == 0 {
        return Ok(Vec::new());
    }
    let space = (m as f64).powi(n as i32);
    if space > guard as f64 {
        return Err(MorphismError::SizeGuard(format!(
            "{m}^{n} candidate maps exceed the guard of {guard}"
        )));
    }
    if n > 64 || m > 64 {
        return Err(MorphismError::SizeGuard(
            "enumeration beyond 64 points".into(),
        ));
    }
    let sp: Vec<PointId> = source.points().to_vec();
    let tp: Vec<PointId> = target.points().to_vec();
    let index = |pts: &[PointId], p: PointId| pts.binary_search(&p).unwrap();
    let mut s_succ = vec![0u64; n];
    let mut s_pred = vec![0u64; n];
    for &(a, b) in source.edges() {
        let (i, j) = (index(&sp, a), index(&sp, b));
        s_succ[i] |= 1 << j;
        s_pred[j] |= 1 << i;
    }
    let mut t_succ = vec![0u64; m];
    let mut t_pred = vec![0u64; m];
    for &(a, b) in target.edges() {
        let (i, j) = (index(&tp, a), index(&tp, b));
        t_succ[i] |= 1 << j;
        t_pred[j] |= 1 << i;
    }
    let tables = DenseTables {
        s_succ,
        s_pred,
        t_succ,
        t_pred,
    };
    let mut out = Vec::new();
    let mut assign: Vec<usize> = Vec::with_capacity(n);
    dense_backtrack(source, target, &sp, &tp, &tables, &mut assign, &mut out);
    Ok(out)
}

struct DenseTables {
    s_succ: Vec<u64>,
    s_pred: Vec<u64>,
    t_succ: Vec<u64>,
    t_pred: Vec<u64>,
}

fn dense_backtrack(
    source: &Frame,
    target: &Frame,
    sp: &[PointId],
    tp: &[PointId],
    t: &DenseTables,
    assign: &mut Vec<usize>,
    out: &mut Vec<PMorphism>,
) {
    let n = sp.len();
    if assign.len() == n {
        // stability holds by pruning; check openness per source point
        for i in 0..n {
            let mut targets = t.t_succ[assign[i]];
            while targets != 0 {
                let v2 = targets.trailing_zeros() as usize;
                targets &= targets - 1;
                let mut covered = false;
                let mut succs = t.s_succ[i];
                while succs != 0 {
                    let k = succs.trailing_zeros() as usize;
                    succs &= succs - 1;
                    if assign[k] == v2 {
                        covered = true;
                        break;
                    }
                }
                if !covered {
                    return;
                }
            }
        }
        let map: BTreeMap<PointId, PointId> = sp
            .iter()
            .enumerate()
            .map(|(i, &w)| (w, tp[assign[i]]))
            .collect();
        out.push(PMorphism {
            source: source.clone(),
            target: target.clone(),
            map,
        });
        return;
    }
    let i = assign.len();
    'next: for v in 0..tp.len() {
        // stability against already-assigned points, both directions
        let out_edges = t.s_succ[i] & ((1u64 << i) - 1 | 1 << i);
        let in_edges = t.s_pred[i] & ((1u64 << i) - 1 | 1 << i);
        let mut bits = out_edges;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let img = if k == i { v } else { assign[k] };
            if t.t_succ[v] & (1 << img) == 0 {
                continue 'next;
            }
        }
        let mut bits = in_edges & !(1 << i);
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if t.t_pred[v] & (1 << assign[k]) == 0 {
                continue 'next;
            }
        }
        assign.push(v);
        dense_backtrack(source, target, sp, tp, t, assign, out);
        assign.pop();
    }
}

pub const DEFAULT_ENUMERATION_GUARD: usize = 5_000_000;

/// All p-morphic images of all generated subframes of `v`, up to
/// isomorphism, nonempty ones only, sorted by size then canonical code.
///
/// The empty subreduction is omitted: the catalog serves cone membership
/// tests and cones are never empty.
pub fn enumerate_subreductions(v: &Frame) -> Result<Vec<Frame>, MorphismError> {
    let mut subframes: Vec<Frame> = Vec::new();
    let mut seen_sub = BTreeSet::new();
    // generated subframes arise from seed sets; closures of singletons
    // generate the lattice under union
    let pts: Vec<PointId> = v.points().to_vec();
    let k = pts.len();
    if k > 16 {
        return Err(MorphismError::SizeGuard(format!(
            "subreduction base frame has {k} points"
        )));
    }
    for mask in 1u32..(1 << k) {
        let seeds: BTreeSet<PointId> = pts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let sub = crate::frame::generated_subframe(v, &seeds)?;
        let key: Vec<PointId> = sub.points().to_vec();
        if seen_sub.insert(key) {
            subframes.push(sub);
        }
    }
    let mut out: Vec<Frame> = Vec::new();
    let mut seen = BTreeSet::new();
    for sub in &subframes {
        for q in enumerate_quotients(sub)? {
            if seen.insert(q.canonical_code()) {
                out.push(q);
            }
        }
    }
    out.sort_by_key(|f| f.canonical_code());
    Ok(out)
}

fn enumerate_quotients(w: &Frame) -> Result<Vec<Frame>, MorphismError> {
    Ok(enumerate_quotient_maps(w)?
        .into_iter()
        .map(|q| q.target().clone())
        .collect())
}

/// All surjective quotient p-morphisms of `w`, one per distinct image up
/// to isomorphism. Enumerates set partitions and keeps those whose
/// quotient map satisfies openness; not every partition does.
pub fn enumerate_quotient_maps(w: &Frame) -> Result<Vec<PMorphism>, MorphismError> {
    let n = w.size();
    if n == 0 {
        return Ok(vec![PMorphism::identity(w)]);
    }
    if n > 10 {
        return Err(MorphismError::SizeGuard(format!(
            "quotient enumeration on {n} points"
        )));
    }
    let pts: Vec<PointId> = w.points().to_vec();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    // enumerate set partitions via restricted growth strings
    let mut rgs = vec![0usize; n];
    loop {
        let classes = rgs.iter().copied().max().unwrap() + 1;
        let part: BTreeMap<PointId, PointId> = pts
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, rgs[i] as PointId))
            .collect();
        let mut edges = BTreeSet::new();
        for &(a, b) in w.edges() {
            edges.insert((part[&a], part[&b]));
        }
        let q = Frame::new(0..classes as PointId, edges).unwrap();
        if let Ok(qm) = PMorphism::validate(w.clone(), q.clone(), part) {
            if seen.insert(q.canonical_code()) {
                out.push(qm);
            }
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i == 1 {
                return Ok(out);
            }
            i -= 1;
            let prefix_max = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
        }
    }
}

/// Three-valued outcome of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedStatus<W> {
    /// No witness exists at the bound. `exhaustive` marks searches that were
    /// complete for every size, not just up to the bound.
    Certified { exhaustive: bool },
    Refuted(W),
    /// The search could not cover the bound.
    Inconclusive,
}

impl<W> BoundedStatus<W> {
    pub fn is_certified(&self) -> bool {
        matches!(self, BoundedStatus::Certified { .. })
    }
    pub fn is_refuted(&self) -> bool {
        matches!(self, BoundedStatus::Refuted(_))
    }
}

/// A parallel pair separating two points, refuting mono-ness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoRefutation {
    pub test_frame: Frame,
    pub left: PMorphism,
    pub right: PMorphism,
}

/// A strictly coarser stabilized quotient, refuting regular-epi-ness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegEpiRefutation {
    pub quotient: PMorphism,
    /// True when the refutation rests on quotient stabilization across two
    /// successive bounds rather than a provably complete pair search.
    pub heuristic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub injective: bool,
    pub surjective: bool,
    pub mono: BoundedStatus<MonoRefutation>,
    pub regular_epi: BoundedStatus<RegEpiRefutation>,
    pub bound: usize,
}

/// Bounded epi/mono classification of a p-morphism within a frame class.
///
/// Epi coincides with surjective and regular mono with injective, so those
/// flags are exact. Mono and regular-epi statuses are decided by searching
/// parallel pairs from class frames of at most `bound` points; any pair can
/// be restricted to the cone of a separating point, so only rooted test
/// frames are searched.
pub fn classify(
    f: &PMorphism,
    class: &FrameClass,
    bound: usize,
) -> Result<Classification, MorphismError> {
    let compiled = CompiledClass::new(class);
    if compiled.check(f.source()).is_err() || compiled.check(f.target()).is_err() {
        return Err(MorphismError::FrameMismatch(
            "source or target is outside the class".into(),
        ));
    }
    let injective = f.is_injective();
    let surjective = f.is_surjective();
    let mono = mono_status(f, &compiled, bound)?;
    let regular_epi = regular_epi_status(f, &compiled, bound, surjective)?;
    Ok(Classification {
        injective,
        surjective,
        mono,
        regular_epi,
        bound,
    })
}

/// Pairs (a, b) of source points with f(a) = f(b).
fn kernel_pairs(f: &PMorphism) -> BTreeSet<(PointId, PointId)> {
    let pts = f.source().points();
    let mut out = BTreeSet::new();
    for &a in pts {
        for &b in pts {
            if f.apply(a) == f.apply(b) {
                out.insert((a, b));
            }
        }
    }
    out
}

/// Largest bisimulation between the source and itself contained in the
/// kernel of `f`: pairs are repeatedly discarded until every edge out of
/// either component can be matched by an edge out of the other, staying in
/// the set. Any parallel pair g, h with f∘g = f∘h has its pointwise image
/// inside this relation; conversely the relation, read as a frame with the
/// componentwise relation, projects to the source by two p-morphisms.
pub fn kernel_bisimulation(f: &PMorphism) -> BTreeSet<(PointId, PointId)> {
    let w = f.source();
    let mut pairs = kernel_pairs(f);
    loop {
        let mut drop = Vec::new();
        for &(a, b) in &pairs {
            let left_ok = w.successors(a).all(|a2| {
                w.successors(b).any(|b2| pairs.contains(&(a2, b2)))
            });
            let right_ok = w.successors(b).all(|b2| {
                w.successors(a).any(|a2| pairs.contains(&(a2, b2)))
            });
            if !left_ok || !right_ok {
                drop.push((a, b));
            }
        }
        if drop.is_empty() {
            return pairs;
        }
        for p in drop {
            pairs.remove(&p);
        }
    }
}

/// Builds the frame on a pair set with the componentwise relation, together
/// with its two projections to the source of `f`. The zig-zag closure of the
/// pair set makes both projections open.
fn pair_set_frame(
    f: &PMorphism,
    pairs: &BTreeSet<(PointId, PointId)>,
) -> (Frame, PMorphism, PMorphism) {
    let w = f.source();
    let index: BTreeMap<(PointId, PointId), PointId> = pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as PointId))
        .collect();
    let mut edges = BTreeSet::new();
    for &(a, b) in pairs {
        for &(a2, b2) in pairs {
            if w.has_edge(a, a2) && w.has_edge(b, b2) {
                edges.insert((index[&(a, b)], index[&(a2, b2)]));
            }
        }
    }
    let mut frame = Frame::new(index.values().copied().collect::<Vec<_>>(), edges).unwrap();
    for (&(a, b), &i) in &index {
        frame.set_label(i, format!("({a},{b})"));
    }
    let left = PMorphism::validate(
        frame.clone(),
        w.clone(),
        index.iter().map(|(&(a, _), &i)| (i, a)).collect(),
    )
    .expect("first projection of a bisimulation frame");
    let right = PMorphism::validate(
        frame.clone(),
        w.clone(),
        index.iter().map(|(&(_, b), &i)| (i, b)).collect(),
    )
    .expect("second projection of a bisimulation frame");
    (frame, left, right)
}

/// Smallest sub-bisimulation of `pairs` containing `start`, if one of size
/// at most `max_size` exists. Iterative deepening over the target size;
/// deterministic by sorted candidate order.
fn min_bisimulation_containing(
    w: &Frame,
    pairs: &BTreeSet<(PointId, PointId)>,
    start: (PointId, PointId),
    max_size: usize,
) -> Option<BTreeSet<(PointId, PointId)>> {
    fn close(
        w: &Frame,
        all: &BTreeSet<(PointId, PointId)>,
        chosen: &mut BTreeSet<(PointId, PointId)>,
        queue: &mut VecDeque<(PointId, PointId)>,
        limit: usize,
    ) -> bool {
        while let Some((a, b)) = queue.pop_front() {
            // obligations from the left component
            for a2 in w.successors(a) {
                let sat = w.successors(b).any(|b2| chosen.contains(&(a2, b2)));
                if !sat {
                    let candidates: Vec<(PointId, PointId)> = w
                        .successors(b)
                        .filter(|&b2| all.contains(&(a2, b2)))
                        .map(|b2| (a2, b2))
                        .collect();
                    if chosen.len() >= limit || candidates.is_empty() {
                        return false;
                    }
                    for cand in candidates {
                        let mut c2 = chosen.clone();
                        let mut q2 = queue.clone();
                        c2.insert(cand);
                        q2.push_back(cand);
                        q2.push_back((a, b));
                        if close(w, all, &mut c2, &mut q2, limit) {
                            *chosen = c2;
                            return true;
                        }
                    }
                    return false;
                }
            }
            for b2 in w.successors(b) {
                let sat = w.successors(a).any(|a2| chosen.contains(&(a2, b2)));
                if !sat {
                    let candidates: Vec<(PointId, PointId)> = w
                        .successors(a)
                        .filter(|&a2| all.contains(&(a2, b2)))
                        .map(|a2| (a2, b2))
                        .collect();
                    if chosen.len() >= limit || candidates.is_empty() {
                        return false;
                    }
                    for cand in candidates {
                        let mut c2 = chosen.clone();
                        let mut q2 = queue.clone();
                        c2.insert(cand);
                        q2.push_back(cand);
                        q2.push_back((a, b));
                        if close(w, all, &mut c2, &mut q2, limit) {
                            *chosen = c2;
                            return true;
                        }
                    }
                    return false;
                }
            }
        }
        true
    }
    for limit in 1..=max_size {
        let mut chosen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        if close(w, pairs, &mut chosen, &mut queue, limit) {
            return Some(chosen);
        }
    }
    None
}

fn mono_status(
    f: &PMorphism,
    class: &CompiledClass,
    bound: usize,
) -> Result<BoundedStatus<MonoRefutation>, MorphismError> {
    let bisim = kernel_bisimulation(f);
    let off_diag: Vec<(PointId, PointId)> = bisim.iter().copied().filter(|&(a, b)| a != b).collect();
    if off_diag.is_empty() {
        // no parallel pair from any frame whatsoever can separate f
        return Ok(BoundedStatus::Certified { exhaustive: true });
    }
    if class.closed_under_kernel_bisimulations() {
        // witnesses are exactly the sub-bisimulations, all of which lie in
        // the class; search them exactly
        for &p in &off_diag {
            if let Some(sub) =
                min_bisimulation_containing(f.source(), &bisim, p, bound.min(bisim.len()))
            {
                let (frame, left, right) = pair_set_frame(f, &sub);
                debug_assert!(class.contains(&frame), "class must admit the bisimulation frame");
                return Ok(BoundedStatus::Refuted(MonoRefutation {
                    test_frame: frame,
                    left,
                    right,
                }));
            }
        }
        return Ok(BoundedStatus::Certified {
            exhaustive: bound >= bisim.len(),
        });
    }
    // generic route: rooted class frames up to the bound
    let (catalog, exhaustive) = rooted_class_catalog(class, bound)?;
    for u in &catalog {
        let candidates = enumerate_pmorphisms(u, f.source(), DEFAULT_ENUMERATION_GUARD)?;
        for (i, g) in candidates.iter().enumerate() {
            for h in &candidates[i + 1..] {
                let agree_after_f = g
                    .source()
                    .points()
                    .iter()
                    .all(|&p| f.apply(g.apply(p)) == f.apply(h.apply(p)));
                if agree_after_f && g.map() != h.map() {
                    return Ok(BoundedStatus::Refuted(MonoRefutation {
                        test_frame: u.clone(),
                        left: g.clone(),
                        right: h.clone(),
                    }));
                }
            }
        }
    }
    Ok(BoundedStatus::Certified { exhaustive })
}

/// The pairs of source points identified by some parallel pair from a class
/// frame of at most `bound` points, together with an exhaustiveness flag
/// (true when larger test frames provably add no pairs).
pub fn achievable_kernel_pairs(
    f: &PMorphism,
    class: &CompiledClass,
    bound: usize,
) -> Result<(BTreeSet<(PointId, PointId)>, bool), MorphismError> {
    let bisim = kernel_bisimulation(f);
    if class.closed_under_kernel_bisimulations() {
        let mut achieved = BTreeSet::new();
        let mut all_within = true;
        for &p in &bisim {
            if p.0 == p.1 {
                achieved.insert(p);
                continue;
            }
            match min_bisimulation_containing(f.source(), &bisim, p, bound.min(bisim.len())) {
                Some(_) => {
                    achieved.insert(p);
                }
                None => all_within = false,
            }
        }
        return Ok((achieved, all_within));
    }
    let (catalog, exhaustive) = rooted_class_catalog(class, bound)?;
    let mut achieved: BTreeSet<(PointId, PointId)> =
        f.source().points().iter().map(|&p| (p, p)).collect();
    for u in &catalog {
        let candidates = enumerate_pmorphisms(u, f.source(), DEFAULT_ENUMERATION_GUARD)?;
        for g in &candidates {
            for h in &candidates {
                let compatible = g
                    .source()
                    .points()
                    .iter()
                    .all(|&p| f.apply(g.apply(p)) == f.apply(h.apply(p)));
                if compatible {
                    for &p in g.source().points() {
                        achieved.insert((g.apply(p), h.apply(p)));
                    }
                }
            }
        }
    }
    Ok((achieved, exhaustive))
}

fn regular_epi_status(
    f: &PMorphism,
    class: &CompiledClass,
    bound: usize,
    surjective: bool,
) -> Result<BoundedStatus<RegEpiRefutation>, MorphismError> {
    if !surjective {
        // regular epis are epis, and epis are the surjections
        let (pairs, _) = achievable_kernel_pairs(f, class, bound)?;
        let (_, q) = crate::cat::quotient_by_pairs(f.source(), &pairs);
        return Ok(BoundedStatus::Refuted(RegEpiRefutation {
            quotient: q,
            heuristic: false,
        }));
    }
    let (pairs, exhaustive) = achievable_kernel_pairs(f, class, bound)?;
    let (q_frame, q) = crate::cat::quotient_by_pairs(f.source(), &pairs);
    if q_frame.size() == f.target().size() {
        // the induced comparison onto the target is bijective, hence iso:
        // f is the joint coequalizer of the pairs it coequalizes
        return Ok(BoundedStatus::Certified { exhaustive });
    }
    if exhaustive {
        return Ok(BoundedStatus::Refuted(RegEpiRefutation {
            quotient: q,
            heuristic: false,
        }));
    }
    // stabilization probe: identical identifications one bound higher
    let (pairs_next, _) = achievable_kernel_pairs(f, class, bound + 1)?;
    if pairs_next == pairs {
        return Ok(BoundedStatus::Refuted(RegEpiRefutation {
            quotient: q,
            heuristic: true,
        }));
    }
    Ok(BoundedStatus::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::frame::is_isomorphic;

    fn pm(source: &Frame, target: &Frame, pairs: &[(PointId, PointId)]) -> PMorphism {
        PMorphism::validate(
            source.clone(),
            target.clone(),
            pairs.iter().copied().collect(),
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        let v = fan_cycle_frame();
        assert!(PMorphism::validate(
            v.clone(),
            v.clone(),
            [(0, 0), (1, 1), (2, 2)].into_iter().collect()
        )
        .is_ok());
        // swapping the 2-cycle while fixing the root is open
        assert!(PMorphism::validate(
            v.clone(),
            v.clone(),
            [(0, 0), (1, 2), (2, 1)].into_iter().collect()
        )
        .is_ok());
        // collapsing the looped pair onto an irreflexive point breaks stability
        let b = looped_pair_frame();
        let dead = Frame::new([0], []).unwrap();
        let err = PMorphism::validate(
            b.clone(),
            dead,
            [(0, 0), (1, 0)].into_iter().collect(),
        )
        .unwrap_err();
        assert!(matches!(err, MorphismError::Stability { .. }));
        // and onto a point whose successor cannot be lifted breaks openness
        let chain = Frame::new([0, 1], [(0, 1), (1, 1)]).unwrap();
        let err = PMorphism::validate(
            Frame::new([5], []).unwrap(),
            chain,
            [(5, 0)].into_iter().collect(),
        )
        .unwrap_err();
        assert!(matches!(err, MorphismError::Openness { w: 5, v2: 1 }));
    }

    #[test]
    fn enumerate_matches_brute_force_small() {
        let frames = [
            Frame::empty(),
            point_frame(),
            two_cycle_frame(),
            looped_pair_frame(),
            fan_cycle_frame(),
        ];
        for w in &frames {
            for v in &frames {
                let fast = enumerate_pmorphisms(w, v, 1_000_000).unwrap();
                // brute force over all |V|^|W| maps
                let mut brute = Vec::new();
                let sp = w.points().to_vec();
                let tp = v.points().to_vec();
                let total = (tp.len() as u64).pow(sp.len() as u32);
                if sp.is_empty() {
                    brute.push(PMorphism::validate(w.clone(), v.clone(), BTreeMap::new()).unwrap());
                } else if !tp.is_empty() {
                    for code in 0..total {
                        let mut c = code;
                        let mut map = BTreeMap::new();
                        for &p in &sp {
                            map.insert(p, tp[(c % tp.len() as u64) as usize]);
                            c /= tp.len() as u64;
                        }
                        if let Ok(m) = PMorphism::validate(w.clone(), v.clone(), map) {
                            brute.push(m);
                        }
                    }
                }
                assert_eq!(
                    fast.len(),
                    brute.len(),
                    "count mismatch {w:?} -> {v:?}"
                );
                let fast_maps: BTreeSet<_> = fast.iter().map(|m| m.map().clone()).collect();
                let brute_maps: BTreeSet<_> = brute.iter().map(|m| m.map().clone()).collect();
                assert_eq!(fast_maps, brute_maps);
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let v = fan_cycle_frame();
        let endos = enumerate_pmorphisms(&v, &v, 1_000_000).unwrap();
        assert_eq!(endos.len(), 2, "identity and the 2-cycle swap");

        let one = point_frame();
        assert_eq!(enumerate_pmorphisms(&v, &one, 1_000_000).unwrap().len(), 1);

        let b = looped_pair_frame();
        let endos = enumerate_pmorphisms(&b, &b, 1_000_000).unwrap();
        assert_eq!(endos.len(), 1);
        assert_eq!(endos[0].map(), PMorphism::identity(&b).map());
    }

    #[test]
    fn image_examples() {
        let v = fan_cycle_frame();
        let v1 = two_cycle_frame();
        let incl = PMorphism::inclusion(&v1, &v).unwrap();
        let (im, e, m) = image(&incl);
        assert_eq!(im, v1);
        assert!(e.is_surjective());
        assert!(m.is_injective());
        assert_eq!(compose(&m, &e).unwrap().map(), incl.map());

        let bang = pm(&v, &point_frame(), &[(0, 0), (1, 0), (2, 0)]);
        let (im, _, _) = image(&bang);
        assert_eq!(im, point_frame());

        let swap = pm(&v, &v, &[(0, 0), (1, 2), (2, 1)]);
        let (im, _, _) = image(&swap);
        assert_eq!(im, v);
    }

    #[test]
    fn image_is_generated_subframe() {
        let v = fan_cycle_frame();
        for target in [v.clone(), collapsed_fan_frame(), point_frame()] {
            for f in enumerate_pmorphisms(&v, &target, 1_000_000).unwrap() {
                let (im, _, _) = image(&f);
                // closed under successors inside the target
                for &p in im.points() {
                    for s in f.target().successors(p) {
                        assert!(im.has_point(s));
                    }
                }
            }
        }
    }

    #[test]
    fn subreduction_catalogs() {
        let v = fan_cycle_frame();
        let subs = enumerate_subreductions(&v).unwrap();
        assert_eq!(subs.len(), 4);
        let expected = [
            v.clone(),
            two_cycle_frame(),
            collapsed_fan_frame(),
            point_frame(),
        ];
        for e in &expected {
            assert!(
                subs.iter().any(|s| is_isomorphic(s, e).is_some()),
                "missing {e:?}"
            );
        }

        let b = looped_pair_frame();
        let subs = enumerate_subreductions(&b).unwrap();
        assert_eq!(subs.len(), 2);
        assert!(subs.iter().any(|s| is_isomorphic(s, &b).is_some()));
        assert!(subs.iter().any(|s| is_isomorphic(s, &point_frame()).is_some()));

        let subs = enumerate_subreductions(&point_frame()).unwrap();
        assert_eq!(subs.len(), 1);
    }

    #[test]
    fn compose_examples() {
        let v = fan_cycle_frame();
        let swap = pm(&v, &v, &[(0, 0), (1, 2), (2, 1)]);
        let twice = compose(&swap, &swap).unwrap();
        assert_eq!(twice.map(), PMorphism::identity(&v).map());

        let v1 = two_cycle_frame();
        let incl = PMorphism::inclusion(&v1, &v).unwrap();
        let inner_swap = pm(&v1, &v1, &[(1, 2), (2, 1)]);
        let composed = compose(&incl, &inner_swap).unwrap();
        assert_eq!(
            composed.map(),
            &[(1, 2), (2, 1)].into_iter().collect::<BTreeMap<_, _>>()
        );

        let id = PMorphism::identity(&v);
        assert_eq!(compose(&id, &swap).unwrap().map(), swap.map());
        assert!(compose(&inner_swap, &swap).is_err());
    }

    #[test]
    fn classification_identity() {
        let v = fan_cycle_frame();
        let id = PMorphism::identity(&v);
        let c = classify(&id, &FrameClass::All, 3).unwrap();
        assert!(c.injective && c.surjective);
        assert!(matches!(c.mono, BoundedStatus::Certified { exhaustive: true }));
        assert!(c.regular_epi.is_certified());
    }

    #[test]
    fn strong_definability_failure_on_fan_cycle() {
        let v = fan_cycle_frame();
        let class = FrameClass::SubreductionsOf(v.clone());
        let bang = pm(&v, &point_frame(), &[(0, 0), (1, 0), (2, 0)]);
        let c = classify(&bang, &class, 6).unwrap();
        assert!(c.surjective);
        match &c.regular_epi {
            BoundedStatus::Refuted(r) => {
                assert!(!r.heuristic, "catalog search is exhaustive");
                assert!(
                    is_isomorphic(r.quotient.target(), &collapsed_fan_frame()).is_some(),
                    "stabilized quotient must collapse only the 2-cycle"
                );
            }
            other => panic!("expected refuted regular epi, got {other:?}"),
        }
        // and mono is refuted too (e.g. the 2-cycle maps in two ways)
        assert!(c.mono.is_refuted());
    }

    #[test]
    fn mono_without_injectivity_on_looped_pair() {
        let b = looped_pair_frame();
        let class = FrameClass::SubreductionsOf(b.clone());
        let bang = pm(&b, &point_frame(), &[(0, 0), (1, 0)]);
        let c = classify(&bang, &class, 6).unwrap();
        assert!(!c.injective);
        match c.mono {
            BoundedStatus::Certified { exhaustive } => assert!(exhaustive),
            other => panic!("expected certified mono, got {other:?}"),
        }
    }

    #[test]
    fn k4_monos_are_injective_small() {
        // transitivity makes the cone swap available, so every non-injective
        // map gets a separating pair from a small frame
        let w = Frame::new([0, 1], [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let one = point_frame();
        let f = pm(&w, &one, &[(0, 0), (1, 0)]);
        let c = classify(&f, &FrameClass::Table(TableLogic::K4), 5).unwrap();
        assert!(c.mono.is_refuted());
        use crate::frame::TableLogic;
        let _ = TableLogic::K4;
    }

    #[test]
    fn kernel_bisimulation_bounds_pairs() {
        let v = fan_cycle_frame();
        let bang = pm(&v, &point_frame(), &[(0, 0), (1, 0), (2, 0)]);
        let bisim = kernel_bisimulation(&bang);
        // every pair survives here: the frame is highly symmetric
        assert!(bisim.contains(&(1, 2)));
        // bisimulation of an injective map is the diagonal
        let id = PMorphism::identity(&v);
        let d = kernel_bisimulation(&id);
        assert!(d.iter().all(|&(a, b)| a == b));
    }
}
