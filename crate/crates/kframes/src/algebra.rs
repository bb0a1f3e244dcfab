//! Finite powerset modal algebras, the frame/algebra duality in both
//! directions, formula evaluation, and checkers for the infinitary
//! identities that single out powersets of locally finite frames.
//!
//! Elements are point subsets of an atom frame, packed into bit masks, so
//! every Boolean operation is a word operation and the modal operator is a
//! per-point successor scan.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::calculus::formula::Formula;
use crate::frame::{ConeResult, Frame, FrameError, LazyFrame, PointId};
use crate::morphism::PMorphism;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("frame has {0} points, at most 64 are supported")]
    TooManyAtoms(usize),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("instance too large: {0}")]
    SizeGuard(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// An element of a powerset algebra: a set of points as a bit mask over the
/// sorted point list of the atom frame.
pub type Elem = u64;

/// The powerset modal algebra of a finite frame. Join-irreducible elements
/// are the singletons; the diamond of a set collects the points with a
/// successor inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowersetAlgebra {
    atom_frame: Frame,
    /// successor masks, indexed like the sorted point list
    succ: Vec<Elem>,
}

impl PowersetAlgebra {
    pub fn new(frame: &Frame) -> Result<PowersetAlgebra, AlgebraError> {
        let n = frame.size();
        if n > 64 {
            return Err(AlgebraError::TooManyAtoms(n));
        }
        let index: BTreeMap<PointId, usize> = frame
            .points()
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        let mut succ = vec![0u64; n];
        for &(a, b) in frame.edges() {
            succ[index[&a]] |= 1 << index[&b];
        }
        Ok(PowersetAlgebra {
            atom_frame: frame.clone(),
            succ,
        })
    }

    pub fn size(&self) -> usize {
        self.atom_frame.size()
    }

    pub fn top(&self) -> Elem {
        if self.size() == 64 {
            u64::MAX
        } else {
            (1u64 << self.size()) - 1
        }
    }

    pub fn bot(&self) -> Elem {
        0
    }

    pub fn complement(&self, x: Elem) -> Elem {
        !x & self.top()
    }

    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        x & !y == 0
    }

    /// Points with at least one successor in `x`.
    pub fn diamond(&self, x: Elem) -> Elem {
        let mut out = 0;
        for (i, &s) in self.succ.iter().enumerate() {
            if s & x != 0 {
                out |= 1 << i;
            }
        }
        out
    }

    /// Points all of whose successors lie in `x`.
    pub fn necessity(&self, x: Elem) -> Elem {
        self.complement(self.diamond(self.complement(x)))
    }

    /// Greatest fixpoint of `y -> x ∧ box y`: the meet of all iterated
    /// boxes of `x`. Terminates because the carrier is finite.
    pub fn box_star(&self, x: Elem) -> Elem {
        let mut cur = self.top();
        loop {
            let next = x & self.necessity(cur);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    pub fn singleton(&self, p: PointId) -> Option<Elem> {
        self.atom_frame
            .points()
            .iter()
            .position(|&q| q == p)
            .map(|i| 1 << i)
    }

    pub fn mask_from_points(&self, points: &BTreeSet<PointId>) -> Elem {
        let mut out = 0;
        for (i, p) in self.atom_frame.points().iter().enumerate() {
            if points.contains(p) {
                out |= 1 << i;
            }
        }
        out
    }

    pub fn points_from_mask(&self, x: Elem) -> BTreeSet<PointId> {
        self.atom_frame
            .points()
            .iter()
            .enumerate()
            .filter(|(i, _)| x >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect()
    }

    pub fn atom_frame_ref(&self) -> &Frame {
        &self.atom_frame
    }
}

/// Builds the powerset algebra of a frame.
pub fn powerset_algebra(frame: &Frame) -> Result<PowersetAlgebra, AlgebraError> {
    PowersetAlgebra::new(frame)
}

/// Recovers the frame of atoms: one point per singleton, related when the
/// singleton sits below the diamond of the other. Round-trips with
/// [`powerset_algebra`] up to identity on the point ids.
pub fn atom_frame(algebra: &PowersetAlgebra) -> Frame {
    let pts: Vec<PointId> = algebra.atom_frame_ref().points().to_vec();
    let mut edges = Vec::new();
    for (i, &a) in pts.iter().enumerate() {
        for (j, &b) in pts.iter().enumerate() {
            let sa = 1u64 << i;
            let sb = 1u64 << j;
            if algebra.leq(sa, algebra.diamond(sb)) {
                edges.push((a, b));
            }
        }
    }
    Frame::new(pts, edges).unwrap()
}

/// The inverse-image algebra map dual to a p-morphism. Contravariant: the
/// dual of a composite is the reversed composite of the duals.
pub struct DualHom {
    source: PowersetAlgebra,
    target: PowersetAlgebra,
    /// preimage mask per target point, in sorted point order
    preimages: Vec<Elem>,
}

impl DualHom {
    pub fn new(f: &PMorphism) -> Result<DualHom, AlgebraError> {
        let source = PowersetAlgebra::new(f.target())?;
        let target = PowersetAlgebra::new(f.source())?;
        let mut preimages = vec![0u64; f.target().size()];
        for (si, &w) in f.source().points().iter().enumerate() {
            let ti = f
                .target()
                .points()
                .binary_search(&f.apply(w))
                .expect("validated morphisms map into the target");
            preimages[ti] |= 1 << si;
        }
        Ok(DualHom {
            source,
            target,
            preimages,
        })
    }

    /// Applies the inverse image to an element of the powerset of the
    /// morphism's target.
    pub fn apply(&self, x: Elem) -> Elem {
        let mut out = 0;
        let mut bits = x;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out |= self.preimages[i];
        }
        out
    }

    pub fn source_algebra(&self) -> &PowersetAlgebra {
        &self.source
    }

    pub fn target_algebra(&self) -> &PowersetAlgebra {
        &self.target
    }
}

pub fn dual_hom(f: &PMorphism) -> Result<DualHom, AlgebraError> {
    DualHom::new(f)
}

/// A finite assignment of variables to elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    assignment: BTreeMap<String, Elem>,
}

impl Valuation {
    pub fn new(assignment: BTreeMap<String, Elem>) -> Valuation {
        Valuation { assignment }
    }

    pub fn bind(mut self, var: impl Into<String>, value: Elem) -> Valuation {
        self.assignment.insert(var.into(), value);
        self
    }

    pub fn get(&self, var: &str) -> Option<Elem> {
        self.assignment.get(var).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<String, Elem> {
        &self.assignment
    }
}

/// Kripke evaluation of a formula in the powerset algebra of a frame.
/// Finite meets and joins fold over the member sets; the star modality is
/// the greatest fixpoint.
pub fn eval(
    algebra: &PowersetAlgebra,
    valuation: &Valuation,
    formula: &Formula,
) -> Result<Elem, AlgebraError> {
    match formula {
        Formula::Var(x) => valuation
            .get(x)
            .ok_or_else(|| AlgebraError::UnboundVariable(x.clone())),
        Formula::Neg(f) => Ok(algebra.complement(eval(algebra, valuation, f)?)),
        Formula::Box(f) => Ok(algebra.necessity(eval(algebra, valuation, f)?)),
        Formula::BoxStar(f) => Ok(algebra.box_star(eval(algebra, valuation, f)?)),
        Formula::And(fs) => {
            let mut out = algebra.top();
            for f in fs {
                out &= eval(algebra, valuation, f)?;
            }
            Ok(out)
        }
        Formula::Or(fs) => {
            let mut out = algebra.bot();
            for f in fs {
                out |= eval(algebra, valuation, f)?;
            }
            Ok(out)
        }
    }
}

pub fn eval_on_frame(
    frame: &Frame,
    valuation: &Valuation,
    formula: &Formula,
) -> Result<Elem, AlgebraError> {
    eval(&PowersetAlgebra::new(frame)?, valuation, formula)
}

/// Both sides of the infinitary distributive law for a finite family of
/// element sets: the meet of joins against the join over choice functions
/// of meets. True in every powerset algebra.
pub fn check_infinite_distributivity(
    algebra: &PowersetAlgebra,
    family: &[BTreeSet<Elem>],
    guard: usize,
) -> Result<bool, AlgebraError> {
    let choices: usize = family.iter().map(|s| s.len().max(0)).product();
    if choices > guard {
        return Err(AlgebraError::SizeGuard(format!(
            "{choices} choice functions exceed the guard of {guard}"
        )));
    }
    let mut lhs = algebra.top();
    for set in family {
        let join = set.iter().fold(algebra.bot(), |a, &x| a | x);
        lhs &= join;
    }
    let mut rhs = algebra.bot();
    let sets: Vec<Vec<Elem>> = family.iter().map(|s| s.iter().copied().collect()).collect();
    if sets.iter().all(|s| !s.is_empty()) {
        let mut idx = vec![0usize; sets.len()];
        loop {
            let mut meet = algebra.top();
            for (k, s) in sets.iter().enumerate() {
                meet &= s[idx[k]];
            }
            rhs |= meet;
            let mut k = 0;
            loop {
                if k == sets.len() {
                    return Ok(lhs == rhs);
                }
                idx[k] += 1;
                if idx[k] < sets[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == sets.len() {
                break;
            }
        }
    }
    Ok(lhs == rhs)
}

/// Complete additivity on an instance: the diamond of a join against the
/// join of diamonds.
pub fn check_complete_additivity(algebra: &PowersetAlgebra, set: &BTreeSet<Elem>) -> bool {
    let join = set.iter().fold(algebra.bot(), |a, &x| a | x);
    let lhs = algebra.diamond(join);
    let rhs = set
        .iter()
        .fold(algebra.bot(), |a, &x| a | algebra.diamond(x));
    lhs == rhs
}

/// An eventually constant family of element sets: explicit prefix, then the
/// tail set repeated forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LfFamily {
    pub prefix: Vec<BTreeSet<Elem>>,
    pub tail: BTreeSet<Elem>,
}

impl LfFamily {
    pub fn union(&self) -> BTreeSet<Elem> {
        let mut out: BTreeSet<Elem> = self.tail.clone();
        for s in &self.prefix {
            out.extend(s.iter().copied());
        }
        out
    }

    pub fn member(&self, n: usize) -> &BTreeSet<Elem> {
        self.prefix.get(n).unwrap_or(&self.tail)
    }
}

/// Meet over all n of the n-th box of the join of the n-th member. The
/// prefix contributes directly; the constant tail from index N on is the
/// N-th box of the star of the tail join.
fn lf_left_side(algebra: &PowersetAlgebra, family: &LfFamily) -> Elem {
    let mut out = algebra.top();
    for (n, set) in family.prefix.iter().enumerate() {
        let join = set.iter().fold(algebra.bot(), |a, &x| a | x);
        let mut boxed = join;
        for _ in 0..n {
            boxed = algebra.necessity(boxed);
        }
        out &= boxed;
    }
    let tail_join = family.tail.iter().fold(algebra.bot(), |a, &x| a | x);
    let mut tail_part = algebra.box_star(tail_join);
    for _ in 0..family.prefix.len() {
        tail_part = algebra.necessity(tail_part);
    }
    out & tail_part
}

/// The local-finiteness identity on an instance: the meet of iterated boxes
/// of joins equals the join, over finite subsets of the union, of the
/// restricted meets. True on every finite frame.
pub fn check_local_finiteness_identity(
    algebra: &PowersetAlgebra,
    family: &LfFamily,
) -> Result<bool, AlgebraError> {
    let union: Vec<Elem> = family.union().into_iter().collect();
    if union.len() > 20 {
        return Err(AlgebraError::SizeGuard(format!(
            "union of the family has {} elements",
            union.len()
        )));
    }
    let lhs = lf_left_side(algebra, family);
    let mut rhs = algebra.bot();
    for mask in 0u32..(1 << union.len()) {
        let subset: BTreeSet<Elem> = union
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &x)| x)
            .collect();
        let restricted = LfFamily {
            prefix: family
                .prefix
                .iter()
                .map(|s| s.intersection(&subset).copied().collect())
                .collect(),
            tail: family.tail.intersection(&subset).copied().collect(),
        };
        rhs |= lf_left_side(algebra, &restricted);
    }
    Ok(lhs == rhs)
}

/// Outcome of probing a lazy frame for local finiteness at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LfProbe {
    FiniteCone(BTreeSet<PointId>),
    Violation(LfViolation),
}

/// The canonical witness family against local finiteness: level n collects
/// the points reachable in exactly n steps. The root lies under every
/// boxed level join, while no small finite subset of the union can cover
/// all explored levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LfViolation {
    pub root: PointId,
    pub levels: Vec<BTreeSet<PointId>>,
    /// Exact minimum size of a set meeting every explored level.
    pub min_cover: usize,
    /// Depth up to which the evidence was checked.
    pub depth: usize,
}

/// Explores the cone of `w`; on bound exhaustion returns the level family
/// together with the minimum-cover evidence down to `depth`.
pub fn local_finiteness_witness(
    frame: &LazyFrame,
    w: PointId,
    depth: usize,
) -> Result<LfProbe, AlgebraError> {
    if depth == 0 {
        return Err(AlgebraError::SizeGuard("depth must be at least 1".into()));
    }
    match frame.cone(w)? {
        ConeResult::Finite(cone) => Ok(LfProbe::FiniteCone(cone)),
        ConeResult::BoundExceeded { .. } => {
            let mut levels: Vec<BTreeSet<PointId>> = vec![BTreeSet::from([w])];
            for n in 1..=depth {
                let prev = &levels[n - 1];
                let mut next = BTreeSet::new();
                for &p in prev {
                    next.extend(frame.successors_of(p));
                }
                levels.push(next);
            }
            let min_cover = minimum_hitting_set_size(&levels);
            Ok(LfProbe::Violation(LfViolation {
                root: w,
                levels,
                min_cover,
                depth,
            }))
        }
    }
}

/// Exact minimum hitting set over a small family of nonempty sets, by
/// branch and bound on the first unhit set. Pairwise disjoint subfamilies
/// give the lower bound.
fn minimum_hitting_set_size(sets: &[BTreeSet<PointId>]) -> usize {
    fn lower_bound(remaining: &[&BTreeSet<PointId>]) -> usize {
        let mut used: BTreeSet<PointId> = BTreeSet::new();
        let mut count = 0;
        for s in remaining {
            if s.iter().all(|p| !used.contains(p)) {
                used.extend(s.iter().copied());
                count += 1;
            }
        }
        count
    }
    fn search(sets: &[&BTreeSet<PointId>], chosen: usize, best: &mut usize) {
        let unhit: Vec<&BTreeSet<PointId>> = sets.to_vec();
        if unhit.is_empty() {
            *best = (*best).min(chosen);
            return;
        }
        if chosen + lower_bound(&unhit) >= *best {
            return;
        }
        let first = unhit[0];
        for &p in first {
            let rest: Vec<&BTreeSet<PointId>> = unhit[1..]
                .iter()
                .copied()
                .filter(|s| !s.contains(&p))
                .collect();
            search(&rest, chosen + 1, best);
        }
    }
    let nonempty: Vec<&BTreeSet<PointId>> = sets.iter().filter(|s| !s.is_empty()).collect();
    let mut best = nonempty.len() + 1;
    search(&nonempty, 0, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::formula::*;
    use crate::fixtures::*;
    use crate::frame::is_isomorphic;

    #[test]
    fn diamond_examples() {
        let one = PowersetAlgebra::new(&point_frame()).unwrap();
        assert_eq!(one.diamond(1), 1);

        let v = PowersetAlgebra::new(&fan_cycle_frame()).unwrap();
        let x = v.singleton(1).unwrap();
        // predecessors of 1 are 0 and 2
        assert_eq!(v.points_from_mask(v.diamond(x)), BTreeSet::from([0, 2]));
        assert_eq!(v.diamond(v.bot()), v.bot());
    }

    #[test]
    fn atom_frame_round_trip() {
        for f in [
            looped_pair_frame(),
            point_frame(),
            Frame::new([0, 1], [(0, 1)]).unwrap(),
            fan_cycle_frame(),
        ] {
            let alg = PowersetAlgebra::new(&f).unwrap();
            let back = atom_frame(&alg);
            assert_eq!(back, f);
            assert!(is_isomorphic(&back, &f).is_some());
        }
    }

    #[test]
    fn dual_hom_examples() {
        let v = fan_cycle_frame();
        let id = PMorphism::identity(&v);
        let d = dual_hom(&id).unwrap();
        for x in 0..8u64 {
            assert_eq!(d.apply(x), x);
        }

        let one = point_frame();
        let bang = PMorphism::validate(
            v.clone(),
            one,
            [(0, 0), (1, 0), (2, 0)].into_iter().collect(),
        )
        .unwrap();
        let d = dual_hom(&bang).unwrap();
        assert_eq!(d.apply(1), 0b111);

        let swap = PMorphism::validate(
            v.clone(),
            v.clone(),
            [(0, 0), (1, 2), (2, 1)].into_iter().collect(),
        )
        .unwrap();
        let d = dual_hom(&swap).unwrap();
        let alg = PowersetAlgebra::new(&v).unwrap();
        assert_eq!(d.apply(alg.singleton(1).unwrap()), alg.singleton(2).unwrap());
    }

    #[test]
    fn dual_hom_preserves_operations() {
        let v = fan_cycle_frame();
        let swap = PMorphism::validate(
            v.clone(),
            v.clone(),
            [(0, 0), (1, 2), (2, 1)].into_iter().collect(),
        )
        .unwrap();
        let d = dual_hom(&swap).unwrap();
        let src = d.source_algebra().clone();
        let tgt = d.target_algebra().clone();
        for x in 0..8u64 {
            for y in 0..8u64 {
                assert_eq!(d.apply(x & y), d.apply(x) & d.apply(y));
                assert_eq!(d.apply(x | y), d.apply(x) | d.apply(y));
            }
            assert_eq!(d.apply(src.complement(x)), tgt.complement(d.apply(x)));
            assert_eq!(d.apply(src.diamond(x)), tgt.diamond(d.apply(x)));
        }
    }

    #[test]
    fn eval_examples() {
        let v = fan_cycle_frame();
        let alg = PowersetAlgebra::new(&v).unwrap();
        let val = Valuation::default().bind("x", alg.singleton(1).unwrap());
        let got = eval(&alg, &val, &dia(var("x"))).unwrap();
        assert_eq!(alg.points_from_mask(got), BTreeSet::from([0, 2]));

        assert_eq!(eval(&alg, &val, &top()).unwrap(), alg.top());

        let b = looped_pair_frame();
        let alg = PowersetAlgebra::new(&b).unwrap();
        let val = Valuation::default().bind("x", alg.singleton(0).unwrap());
        // the cycle forces leaving {0}, so the star collapses to bottom
        assert_eq!(eval(&alg, &val, &boxstar(var("x"))).unwrap(), alg.bot());

        assert_eq!(
            eval(&alg, &Valuation::default(), &var("y")),
            Err(AlgebraError::UnboundVariable("y".into()))
        );
    }

    #[test]
    fn eval_respects_negation_and_diamond() {
        let v = fan_cycle_frame();
        let alg = PowersetAlgebra::new(&v).unwrap();
        for x in 0..8u64 {
            let val = Valuation::default().bind("x", x);
            let form_neg = eval(&alg, &val, &neg(var("x"))).unwrap();
            assert_eq!(form_neg, alg.complement(x));
            let form_dia = eval(&alg, &val, &dia(var("x"))).unwrap();
            assert_eq!(form_dia, alg.diamond(x));
        }
    }

    #[test]
    fn distributivity_and_additivity() {
        let v = fan_cycle_frame();
        let alg = PowersetAlgebra::new(&v).unwrap();
        let a = alg.singleton(1).unwrap();
        let b = alg.singleton(2).unwrap();
        assert!(check_infinite_distributivity(
            &alg,
            &[BTreeSet::from([a]), BTreeSet::from([b])],
            1000
        )
        .unwrap());
        // all singletons
        let singles: BTreeSet<Elem> = (0..3).map(|i| 1u64 << i).collect();
        assert!(check_complete_additivity(&alg, &singles));
        assert_eq!(alg.diamond(alg.top()), alg.top());
        // family with an empty member: both sides bottom out
        assert!(check_infinite_distributivity(
            &alg,
            &[BTreeSet::new(), BTreeSet::from([a])],
            1000
        )
        .unwrap());
    }

    #[test]
    fn local_finiteness_identity_on_finite_frames() {
        let v = fan_cycle_frame();
        let alg = PowersetAlgebra::new(&v).unwrap();
        let fam = LfFamily {
            prefix: vec![BTreeSet::from([alg.singleton(1).unwrap()])],
            tail: BTreeSet::from([alg.singleton(1).unwrap(), alg.singleton(2).unwrap()]),
        };
        assert!(check_local_finiteness_identity(&alg, &fam).unwrap());
        let trivial = LfFamily {
            prefix: vec![],
            tail: BTreeSet::from([alg.top()]),
        };
        assert!(check_local_finiteness_identity(&alg, &trivial).unwrap());
    }

    #[test]
    fn lf_witness_on_omega_chain() {
        let omega = LazyFrame::omega_successor(10);
        match local_finiteness_witness(&omega, 0, 10).unwrap() {
            LfProbe::Violation(v) => {
                assert_eq!(v.levels.len(), 11);
                for (n, level) in v.levels.iter().enumerate() {
                    assert_eq!(level, &BTreeSet::from([n as PointId]));
                }
                assert_eq!(v.min_cover, 11, "levels are disjoint singletons");
                assert!(v.min_cover > v.depth);
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn lf_witness_on_binary_tree() {
        let tree = LazyFrame::binary_tree(100);
        match local_finiteness_witness(&tree, 1, 8).unwrap() {
            LfProbe::Violation(v) => {
                for (n, level) in v.levels.iter().enumerate() {
                    assert_eq!(level.len(), 1 << n);
                }
                assert_eq!(v.min_cover, 9);
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn lf_witness_on_finite_frame() {
        let v = fan_cycle_frame();
        let lazy = LazyFrame::from_frame(&v, 100);
        assert_eq!(
            local_finiteness_witness(&lazy, 0, 5).unwrap(),
            LfProbe::FiniteCone(BTreeSet::from([0, 1, 2]))
        );
        assert!(local_finiteness_witness(&lazy, 0, 0).is_err());
    }
}
