//! Finite and lazy Kripke frames, cones, generated subframes, and frame classes.
//!
//! A frame is a finite set of points with a binary accessibility relation.
//! Points are small integers; iteration order over points and edges is always
//! sorted, so every operation on frames is deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub type PointId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("duplicate point id {0}")]
    DuplicatePoint(PointId),
    #[error("edge {0}>{1} mentions undeclared point {2}")]
    DanglingEdge(PointId, PointId, PointId),
    #[error("unknown point {0}")]
    UnknownPoint(PointId),
    #[error("search space too large: {0}")]
    SizeGuard(String),
}

/// A finite Kripke frame: a set of points and a binary relation on them.
///
/// Optional labels are carried for reporting only; they do not take part in
/// equality or hashing.
#[derive(Clone, Debug, Default)]
pub struct Frame {
    points: Vec<PointId>,
    edges: BTreeSet<(PointId, PointId)>,
    labels: BTreeMap<PointId, String>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.edges == other.edges
    }
}
impl Eq for Frame {}

impl std::hash::Hash for Frame {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.points.hash(state);
        for e in &self.edges {
            e.hash(state);
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "points:")?;
        for p in &self.points {
            write!(f, " {p}")?;
        }
        write!(f, "\nedges:")?;
        for (a, b) in &self.edges {
            write!(f, " {a}>{b}")?;
        }
        writeln!(f)
    }
}

impl Frame {
    /// Validates and canonically orders a frame.
    pub fn new(
        points: impl IntoIterator<Item = PointId>,
        edges: impl IntoIterator<Item = (PointId, PointId)>,
    ) -> Result<Frame, FrameError> {
        let mut seen = BTreeSet::new();
        let mut pts = Vec::new();
        for p in points {
            if !seen.insert(p) {
                return Err(FrameError::DuplicatePoint(p));
            }
            pts.push(p);
        }
        pts.sort_unstable();
        let mut es = BTreeSet::new();
        for (a, b) in edges {
            if !seen.contains(&a) {
                return Err(FrameError::DanglingEdge(a, b, a));
            }
            if !seen.contains(&b) {
                return Err(FrameError::DanglingEdge(a, b, b));
            }
            es.insert((a, b));
        }
        Ok(Frame {
            points: pts,
            edges: es,
            labels: BTreeMap::new(),
        })
    }

    pub fn empty() -> Frame {
        Frame::default()
    }

    /// The one-point reflexive frame.
    pub fn reflexive_point() -> Frame {
        Frame::new([0], [(0, 0)]).unwrap()
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn edges(&self) -> &BTreeSet<(PointId, PointId)> {
        &self.edges
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_point(&self, p: PointId) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn has_edge(&self, a: PointId, b: PointId) -> bool {
        self.edges.contains(&(a, b))
    }

    pub fn successors(&self, p: PointId) -> impl Iterator<Item = PointId> + '_ {
        self.edges
            .range((p, PointId::MIN)..=(p, PointId::MAX))
            .map(|&(_, b)| b)
    }

    pub fn predecessors(&self, p: PointId) -> impl Iterator<Item = PointId> + '_ {
        self.edges.iter().filter(move |&&(_, b)| b == p).map(|&(a, _)| a)
    }

    pub fn set_label(&mut self, p: PointId, label: impl Into<String>) {
        if self.has_point(p) {
            self.labels.insert(p, label.into());
        }
    }

    pub fn label(&self, p: PointId) -> Option<&str> {
        self.labels.get(&p).map(|s| s.as_str())
    }

    pub fn labels(&self) -> &BTreeMap<PointId, String> {
        &self.labels
    }

    /// The cone `w*`: every point reachable from `w` by a (possibly empty)
    /// chain of edges. Always contains `w`.
    pub fn cone(&self, w: PointId) -> Result<BTreeSet<PointId>, FrameError> {
        if !self.has_point(w) {
            return Err(FrameError::UnknownPoint(w));
        }
        let mut seen: BTreeSet<PointId> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(w);
        queue.push_back(w);
        while let Some(x) = queue.pop_front() {
            for y in self.successors(x) {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        Ok(seen)
    }

    /// Frame induced on a point subset, keeping the original ids.
    /// The subset is not required to be closed; callers that need a
    /// generated subframe should go through [`generated_subframe`].
    pub fn induced(&self, subset: &BTreeSet<PointId>) -> Frame {
        let points: Vec<PointId> = self.points.iter().copied().filter(|p| subset.contains(p)).collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|(a, b)| subset.contains(a) && subset.contains(b))
            .collect();
        let labels = self
            .labels
            .iter()
            .filter(|(p, _)| subset.contains(p))
            .map(|(p, l)| (*p, l.clone()))
            .collect();
        Frame {
            points,
            edges,
            labels,
        }
    }

    /// Renumbers points to 0..n preserving order; returns the frame and the
    /// old-to-new map.
    pub fn compacted(&self) -> (Frame, BTreeMap<PointId, PointId>) {
        let map: BTreeMap<PointId, PointId> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as PointId))
            .collect();
        let points = (0..self.points.len() as PointId).collect();
        let edges = self.edges.iter().map(|&(a, b)| (map[&a], map[&b])).collect();
        let labels = self
            .labels
            .iter()
            .map(|(p, l)| (map[p], l.clone()))
            .collect();
        (
            Frame {
                points,
                edges,
                labels,
            },
            map,
        )
    }

    /// Least canonical encoding of the frame under all point renamings.
    /// Two frames are isomorphic iff their codes agree. Only frames of at
    /// most 12 points are supported (catalog scale).
    pub fn canonical_code(&self) -> Vec<u64> {
        let (c, _) = self.compacted();
        let n = c.points.len();
        assert!(n <= 12, "canonical form only for small frames");
        if n == 0 {
            return vec![0];
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<u64>> = None;
        permute(&mut perm, 0, &mut |perm| {
            let mut words = vec![0u64; (n * n + 63) / 64];
            for &(a, b) in &c.edges {
                let bit = perm[a as usize] * n + perm[b as usize];
                words[bit / 64] |= 1 << (bit % 64);
            }
            match &best {
                Some(b) if *b <= words => {}
                _ => best = Some(words),
            }
        });
        let mut code = vec![n as u64];
        code.extend(best.unwrap());
        code
    }
}

fn permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}

/// Searches for a relation-preserving-and-reflecting bijection.
pub fn is_isomorphic(f: &Frame, g: &Frame) -> Option<BTreeMap<PointId, PointId>> {
    if f.size() != g.size() || f.edges.len() != g.edges.len() {
        return None;
    }
    let n = f.size();
    if n == 0 {
        return Some(BTreeMap::new());
    }
    // Degree sequences must match under the bijection; used as pruning.
    let deg = |fr: &Frame, p: PointId| -> (usize, usize, bool) {
        (
            fr.successors(p).count(),
            fr.predecessors(p).count(),
            fr.has_edge(p, p),
        )
    };
    let fp = f.points.clone();
    let gp = g.points.clone();
    let mut assign: Vec<Option<PointId>> = vec![None; n];
    let mut used = vec![false; n];
    fn extend(
        i: usize,
        fp: &[PointId],
        gp: &[PointId],
        f: &Frame,
        g: &Frame,
        deg: &dyn Fn(&Frame, PointId) -> (usize, usize, bool),
        assign: &mut Vec<Option<PointId>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == fp.len() {
            return true;
        }
        let a = fp[i];
        for (j, &b) in gp.iter().enumerate() {
            if used[j] || deg(f, a) != deg(g, b) {
                continue;
            }
            let ok = fp[..i].iter().enumerate().all(|(k, &a2)| {
                let b2 = assign[k].unwrap();
                f.has_edge(a, a2) == g.has_edge(b, b2) && f.has_edge(a2, a) == g.has_edge(b2, b)
            });
            if !ok {
                continue;
            }
            assign[i] = Some(b);
            used[j] = true;
            if extend(i + 1, fp, gp, f, g, deg, assign, used) {
                return true;
            }
            assign[i] = None;
            used[j] = false;
        }
        false
    }
    if extend(0, &fp, &gp, f, g, &deg, &mut assign, &mut used) {
        Some(
            fp.iter()
                .zip(assign)
                .map(|(&a, b)| (a, b.unwrap()))
                .collect(),
        )
    } else {
        None
    }
}

/// Generated subframe on the union of the cones of `seeds`, with the
/// point-wise inclusion map (ids are preserved, so the inclusion is the
/// identity on points).
pub fn generated_subframe(frame: &Frame, seeds: &BTreeSet<PointId>) -> Result<Frame, FrameError> {
    let mut closure = BTreeSet::new();
    for &s in seeds {
        closure.extend(frame.cone(s)?);
    }
    Ok(frame.induced(&closure))
}

/// Coproduct of frames. Points are renumbered consecutively; the returned
/// injections give, per component, the old-to-new point map.
pub fn disjoint_union(frames: &[Frame]) -> (Frame, Vec<BTreeMap<PointId, PointId>>) {
    let mut points = Vec::new();
    let mut edges = BTreeSet::new();
    let mut labels = BTreeMap::new();
    let mut injections = Vec::new();
    let mut next: PointId = 0;
    for (ci, f) in frames.iter().enumerate() {
        let mut inj = BTreeMap::new();
        for &p in f.points() {
            inj.insert(p, next);
            labels.insert(next, format!("{ci}.{p}"));
            points.push(next);
            next += 1;
        }
        for &(a, b) in f.edges() {
            edges.insert((inj[&a], inj[&b]));
        }
        injections.push(inj);
    }
    (
        Frame {
            points,
            edges,
            labels,
        },
        injections,
    )
}

/// A frame given by a successor function, explored on demand.
///
/// Used to probe infinite carriers: exploration of any cone either
/// terminates within `bound` points or reports the explored frontier.
#[derive(Clone)]
pub struct LazyFrame {
    roots: BTreeSet<PointId>,
    successors: Arc<dyn Fn(PointId) -> Vec<PointId> + Send + Sync>,
    bound: usize,
}

/// Default cap on explored-cone size.
pub const DEFAULT_LAZY_BOUND: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeResult {
    /// The cone closed: the full reachable set.
    Finite(BTreeSet<PointId>),
    /// Exploration hit the bound; carries the explored frontier.
    BoundExceeded { explored: BTreeSet<PointId> },
}

impl LazyFrame {
    pub fn new(
        roots: impl IntoIterator<Item = PointId>,
        successors: impl Fn(PointId) -> Vec<PointId> + Send + Sync + 'static,
        bound: usize,
    ) -> LazyFrame {
        LazyFrame {
            roots: roots.into_iter().collect(),
            successors: Arc::new(successors),
            bound,
        }
    }

    /// The chain 0 -> 1 -> 2 -> ...
    pub fn omega_successor(bound: usize) -> LazyFrame {
        LazyFrame::new([0], |n| vec![n + 1], bound)
    }

    /// Infinite binary tree rooted at 1 (children 2n, 2n+1).
    pub fn binary_tree(bound: usize) -> LazyFrame {
        LazyFrame::new([1], |n| vec![2 * n, 2 * n + 1], bound)
    }

    /// A finite frame viewed lazily.
    pub fn from_frame(frame: &Frame, bound: usize) -> LazyFrame {
        let f = frame.clone();
        let roots: Vec<PointId> = frame.points().to_vec();
        LazyFrame::new(roots, move |p| f.successors(p).collect(), bound)
    }

    pub fn roots(&self) -> &BTreeSet<PointId> {
        &self.roots
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn successors_of(&self, p: PointId) -> Vec<PointId> {
        (self.successors)(p)
    }

    /// Breadth-first cone exploration from a root.
    pub fn cone(&self, w: PointId) -> Result<ConeResult, FrameError> {
        if !self.roots.contains(&w) {
            return Err(FrameError::UnknownPoint(w));
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(w);
        queue.push_back(w);
        while let Some(x) = queue.pop_front() {
            for y in (self.successors)(x) {
                if seen.insert(y) {
                    if seen.len() > self.bound {
                        return Ok(ConeResult::BoundExceeded { explored: seen });
                    }
                    queue.push_back(y);
                }
            }
        }
        Ok(ConeResult::Finite(seen))
    }
}

impl fmt::Debug for LazyFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyFrame")
            .field("roots", &self.roots)
            .field("bound", &self.bound)
            .finish()
    }
}

/// Logics of the standard table, identified by their finite-frame conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableLogic {
    K,
    K4,
    S4,
    S4Lin,
    Grz,
    GrzLin,
    Gl,
    GlLin,
    D,
}

impl TableLogic {
    pub const ALL: [TableLogic; 9] = [
        TableLogic::K,
        TableLogic::K4,
        TableLogic::S4,
        TableLogic::S4Lin,
        TableLogic::Grz,
        TableLogic::GrzLin,
        TableLogic::Gl,
        TableLogic::GlLin,
        TableLogic::D,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TableLogic::K => "K",
            TableLogic::K4 => "K4",
            TableLogic::S4 => "S4",
            TableLogic::S4Lin => "S4.Lin",
            TableLogic::Grz => "Grz",
            TableLogic::GrzLin => "Grz.Lin",
            TableLogic::Gl => "GL",
            TableLogic::GlLin => "GL.Lin",
            TableLogic::D => "D",
        }
    }

    pub fn parse(s: &str) -> Option<TableLogic> {
        TableLogic::ALL.iter().copied().find(|l| l.name() == s)
    }
}

/// One universal Horn clause over the binary relation and equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HornClause {
    pub vars: Vec<String>,
    pub body: Vec<HornAtom>,
    /// `None` means the clause forbids its body outright.
    pub head: Option<HornAtom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum HornAtom {
    /// vars[i] < vars[j]
    Edge(usize, usize),
    /// vars[i] = vars[j]
    Eq(usize, usize),
}

impl HornClause {
    fn atom_holds(&self, atom: HornAtom, frame: &Frame, asg: &[PointId]) -> bool {
        match atom {
            HornAtom::Edge(i, j) => frame.has_edge(asg[i], asg[j]),
            HornAtom::Eq(i, j) => asg[i] == asg[j],
        }
    }

    /// Returns a violating assignment, if any.
    pub fn violation(&self, frame: &Frame) -> Option<Vec<PointId>> {
        let n = self.vars.len();
        let pts = frame.points();
        if pts.is_empty() {
            return None;
        }
        let mut asg = vec![pts[0]; n];
        let mut idx = vec![0usize; n];
        loop {
            let body_ok = self.body.iter().all(|&a| self.atom_holds(a, frame, &asg));
            if body_ok {
                let head_ok = match self.head {
                    Some(h) => self.atom_holds(h, frame, &asg),
                    None => false,
                };
                if !head_ok {
                    return Some(asg.clone());
                }
            }
            // next assignment
            let mut k = 0;
            loop {
                if k == n {
                    return None;
                }
                idx[k] += 1;
                if idx[k] < pts.len() {
                    asg[k] = pts[idx[k]];
                    break;
                }
                idx[k] = 0;
                asg[k] = pts[0];
                k += 1;
            }
        }
    }
}

/// A decidable membership predicate for finite frames.
#[derive(Clone, Debug, PartialEq)]
pub enum FrameClass {
    All,
    Table(TableLogic),
    /// The relation is a total function on points.
    Functional,
    /// Every cone is a p-morphic image of a generated subframe of the
    /// given frame.
    SubreductionsOf(Frame),
    Horn(Vec<HornClause>),
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameClass::All => write!(f, "all"),
            FrameClass::Table(l) => write!(f, "{}", l.name()),
            FrameClass::Functional => write!(f, "functional"),
            FrameClass::SubreductionsOf(v) => write!(f, "sub-of({} points)", v.size()),
            FrameClass::Horn(cs) => write!(f, "horn({} clauses)", cs.len()),
        }
    }
}

/// Why a frame fails a class condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassViolation {
    NotTransitive {
        first: (PointId, PointId),
        second: (PointId, PointId),
        missing: (PointId, PointId),
    },
    NotReflexive(PointId),
    NotIrreflexive(PointId),
    NotAntisymmetric(PointId, PointId),
    NotLocallyLinear {
        source: PointId,
        left: PointId,
        right: PointId,
    },
    NotSerial(PointId),
    NotFunctional {
        point: PointId,
        successor_count: usize,
    },
    ConeNotSubreduction(PointId),
    HornViolation {
        clause: usize,
        assignment: Vec<PointId>,
    },
}

impl fmt::Display for ClassViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassViolation::NotTransitive { first, second, missing } => write!(
                f,
                "transitivity fails: {}>{} and {}>{} but not {}>{}",
                first.0, first.1, second.0, second.1, missing.0, missing.1
            ),
            ClassViolation::NotReflexive(w) => write!(f, "missing loop at {w}"),
            ClassViolation::NotIrreflexive(w) => write!(f, "loop at {w}"),
            ClassViolation::NotAntisymmetric(a, b) => write!(f, "2-cycle {a}>{b}>{a}"),
            ClassViolation::NotLocallyLinear { source, left, right } => write!(
                f,
                "successors {left} and {right} of {source} are incomparable"
            ),
            ClassViolation::NotSerial(w) => write!(f, "{w} has no successor"),
            ClassViolation::NotFunctional { point, successor_count } => {
                write!(f, "{point} has {successor_count} successors, expected 1")
            }
            ClassViolation::ConeNotSubreduction(w) => {
                write!(f, "cone of {w} is not a subreduction of the base frame")
            }
            ClassViolation::HornViolation { clause, assignment } => {
                write!(f, "clause {clause} fails under assignment {assignment:?}")
            }
        }
    }
}

fn check_transitive(frame: &Frame) -> Option<ClassViolation> {
    for &(a, b) in frame.edges() {
        for c in frame.successors(b) {
            if !frame.has_edge(a, c) {
                return Some(ClassViolation::NotTransitive {
                    first: (a, b),
                    second: (b, c),
                    missing: (a, c),
                });
            }
        }
    }
    None
}

fn check_reflexive(frame: &Frame) -> Option<ClassViolation> {
    frame
        .points()
        .iter()
        .find(|&&w| !frame.has_edge(w, w))
        .map(|&w| ClassViolation::NotReflexive(w))
}

fn check_irreflexive(frame: &Frame) -> Option<ClassViolation> {
    frame
        .points()
        .iter()
        .find(|&&w| frame.has_edge(w, w))
        .map(|&w| ClassViolation::NotIrreflexive(w))
}

fn check_antisymmetric(frame: &Frame) -> Option<ClassViolation> {
    for &(a, b) in frame.edges() {
        if a != b && frame.has_edge(b, a) {
            return Some(ClassViolation::NotAntisymmetric(a, b));
        }
    }
    None
}

fn check_locally_linear(frame: &Frame) -> Option<ClassViolation> {
    for &w in frame.points() {
        let succ: Vec<PointId> = frame.successors(w).collect();
        for &v1 in &succ {
            for &v2 in &succ {
                if v1 != v2 && !frame.has_edge(v1, v2) && !frame.has_edge(v2, v1) {
                    return Some(ClassViolation::NotLocallyLinear {
                        source: w,
                        left: v1,
                        right: v2,
                    });
                }
            }
        }
    }
    None
}

fn check_serial(frame: &Frame) -> Option<ClassViolation> {
    frame
        .points()
        .iter()
        .find(|&&w| frame.successors(w).next().is_none())
        .map(|&w| ClassViolation::NotSerial(w))
}

fn check_table(frame: &Frame, logic: TableLogic) -> Option<ClassViolation> {
    match logic {
        TableLogic::K => None,
        TableLogic::K4 => check_transitive(frame),
        TableLogic::S4 => check_reflexive(frame).or_else(|| check_transitive(frame)),
        TableLogic::S4Lin => check_reflexive(frame)
            .or_else(|| check_transitive(frame))
            .or_else(|| check_locally_linear(frame)),
        TableLogic::Grz => check_reflexive(frame)
            .or_else(|| check_transitive(frame))
            .or_else(|| check_antisymmetric(frame)),
        TableLogic::GrzLin => check_reflexive(frame)
            .or_else(|| check_transitive(frame))
            .or_else(|| check_antisymmetric(frame))
            .or_else(|| check_locally_linear(frame)),
        TableLogic::Gl => check_irreflexive(frame).or_else(|| check_transitive(frame)),
        TableLogic::GlLin => check_irreflexive(frame)
            .or_else(|| check_transitive(frame))
            .or_else(|| check_locally_linear(frame)),
        TableLogic::D => check_serial(frame),
    }
}

/// Membership check with a violating witness on failure.
///
/// `SubreductionsOf` recomputes the subreduction catalog of its base frame
/// on every call; hot paths should build a [`CompiledClass`] once instead.
pub fn check_class(frame: &Frame, class: &FrameClass) -> Result<(), ClassViolation> {
    CompiledClass::new(class).check(frame)
}

/// A frame class with any derived data (subreduction catalogs) precomputed.
pub struct CompiledClass {
    class: FrameClass,
    subreduction_codes: Option<BTreeSet<Vec<u64>>>,
}

impl CompiledClass {
    pub fn new(class: &FrameClass) -> CompiledClass {
        let subreduction_codes = match class {
            FrameClass::SubreductionsOf(v) => Some(
                crate::morphism::enumerate_subreductions(v)
                    .expect("subreduction catalog of the base frame")
                    .iter()
                    .map(|f| f.canonical_code())
                    .collect(),
            ),
            _ => None,
        };
        CompiledClass {
            class: class.clone(),
            subreduction_codes,
        }
    }

    pub fn class(&self) -> &FrameClass {
        &self.class
    }

    pub fn check(&self, frame: &Frame) -> Result<(), ClassViolation> {
        match &self.class {
            FrameClass::All => Ok(()),
            FrameClass::Table(l) => match check_table(frame, *l) {
                None => Ok(()),
                Some(v) => Err(v),
            },
            FrameClass::Functional => {
                for &w in frame.points() {
                    let count = frame.successors(w).count();
                    if count != 1 {
                        return Err(ClassViolation::NotFunctional {
                            point: w,
                            successor_count: count,
                        });
                    }
                }
                Ok(())
            }
            FrameClass::SubreductionsOf(_) => {
                let codes = self.subreduction_codes.as_ref().unwrap();
                for &w in frame.points() {
                    let cone = frame.cone(w).unwrap();
                    let cone_frame = frame.induced(&cone);
                    if !codes.contains(&cone_frame.canonical_code()) {
                        return Err(ClassViolation::ConeNotSubreduction(w));
                    }
                }
                Ok(())
            }
            FrameClass::Horn(clauses) => {
                for (i, c) in clauses.iter().enumerate() {
                    if let Some(asg) = c.violation(frame) {
                        return Err(ClassViolation::HornViolation {
                            clause: i,
                            assignment: asg,
                        });
                    }
                }
                Ok(())
            }
        }
    }

    pub fn contains(&self, frame: &Frame) -> bool {
        self.check(frame).is_ok()
    }

    /// True when the class is closed under taking substructures of products
    /// with the componentwise relation, provided those substructures satisfy
    /// the zig-zag conditions of a bisimulation. The kernel-bisimulation
    /// routes in the morphism module are exact for such classes.
    pub fn closed_under_kernel_bisimulations(&self) -> bool {
        match &self.class {
            FrameClass::All | FrameClass::Functional | FrameClass::Horn(_) => true,
            FrameClass::Table(l) => matches!(
                l,
                TableLogic::K
                    | TableLogic::K4
                    | TableLogic::S4
                    | TableLogic::Grz
                    | TableLogic::Gl
                    | TableLogic::D
            ),
            FrameClass::SubreductionsOf(_) => false,
        }
    }
}

/// All class frames with at most `max_size` points, up to isomorphism,
/// sorted by size then canonical code. Includes the empty frame.
///
/// General classes are enumerated by filtering all labeled relations, which
/// is feasible up to 5 points; functional frames are enumerated directly
/// from successor functions.
pub fn class_catalog(class: &FrameClass, max_size: usize) -> Result<Vec<Frame>, FrameError> {
    let compiled = CompiledClass::new(class);
    class_catalog_compiled(&compiled, max_size)
}

pub fn class_catalog_compiled(
    compiled: &CompiledClass,
    max_size: usize,
) -> Result<Vec<Frame>, FrameError> {
    if matches!(compiled.class(), FrameClass::Functional) {
        return functional_catalog(max_size);
    }
    if max_size > 5 {
        return Err(FrameError::SizeGuard(format!(
            "catalog enumeration beyond 5 points (asked {max_size})"
        )));
    }
    let mut out: Vec<Frame> = Vec::new();
    let mut seen = BTreeSet::new();
    for n in 0..=max_size {
        let bits = n * n;
        for rel in 0u64..(1u64 << bits) {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if rel >> (i * n + j) & 1 == 1 {
                        edges.push((i as PointId, j as PointId));
                    }
                }
            }
            let frame = Frame::new(0..n as PointId, edges).unwrap();
            if !compiled.contains(&frame) {
                continue;
            }
            if seen.insert(frame.canonical_code()) {
                out.push(frame);
            }
        }
    }
    out.sort_by_key(|f| f.canonical_code());
    Ok(out)
}

fn functional_catalog(max_size: usize) -> Result<Vec<Frame>, FrameError> {
    if max_size > 7 {
        return Err(FrameError::SizeGuard(format!(
            "functional catalog beyond 7 points (asked {max_size})"
        )));
    }
    let mut out = vec![Frame::empty()];
    let mut seen = BTreeSet::new();
    for n in 1..=max_size {
        let mut succ = vec![0usize; n];
        loop {
            let edges: Vec<(PointId, PointId)> = succ
                .iter()
                .enumerate()
                .map(|(i, &j)| (i as PointId, j as PointId))
                .collect();
            let frame = Frame::new(0..n as PointId, edges).unwrap();
            if seen.insert(frame.canonical_code()) {
                out.push(frame);
            }
            let mut k = 0;
            loop {
                if k == n {
                    break;
                }
                succ[k] += 1;
                if succ[k] < n {
                    break;
                }
                succ[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    out.sort_by_key(|f| f.canonical_code());
    Ok(out)
}

/// Rooted members of a class up to `max_size`, up to isomorphism.
///
/// For subreduction classes the rooted members are exactly the rooted
/// subreductions of the base frame: a rooted frame equals the cone of its
/// root, and cones of class frames are subreductions; conversely cones of
/// subreductions are subreductions again, so every rooted subreduction is in
/// the class. This keeps the search exact at any bound without enumerating
/// large frames. Returns the catalog and whether it is exhaustive for the
/// class at every size (not just up to `max_size`).
pub fn rooted_class_catalog(
    compiled: &CompiledClass,
    max_size: usize,
) -> Result<(Vec<Frame>, bool), FrameError> {
    if let FrameClass::SubreductionsOf(v) = compiled.class() {
        let all = crate::morphism::enumerate_subreductions(v)
            .map_err(|e| FrameError::SizeGuard(e.to_string()))?;
        let rooted: Vec<Frame> = all.into_iter().filter(|f| is_rooted(f)).collect();
        let exhaustive = rooted.iter().all(|f| f.size() <= max_size);
        let trimmed = rooted.into_iter().filter(|f| f.size() <= max_size).collect();
        return Ok((trimmed, exhaustive));
    }
    let catalog = class_catalog_compiled(compiled, max_size)?;
    let rooted = catalog.into_iter().filter(|f| is_rooted(f)).collect();
    // Larger rooted class frames may always exist for table classes.
    Ok((rooted, false))
}

pub fn is_rooted(frame: &Frame) -> bool {
    if frame.is_empty() {
        return false;
    }
    frame
        .points()
        .iter()
        .any(|&w| frame.cone(w).unwrap().len() == frame.size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fan_cycle_frame, looped_pair_frame, two_cycle_frame};

    #[test]
    fn frame_construction_validates() {
        assert_eq!(
            Frame::new([0, 1], [(0, 2)]),
            Err(FrameError::DanglingEdge(0, 2, 2))
        );
        assert_eq!(Frame::new([0, 0], []), Err(FrameError::DuplicatePoint(0)));
        let empty = Frame::new([], []).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn cone_examples() {
        let v = fan_cycle_frame();
        assert_eq!(
            v.cone(0).unwrap(),
            BTreeSet::from([0, 1, 2]),
            "cone of the root is the whole frame"
        );
        assert_eq!(v.cone(1).unwrap(), BTreeSet::from([1, 2]));
        assert_eq!(v.cone(9), Err(FrameError::UnknownPoint(9)));
    }

    #[test]
    fn cone_is_closed() {
        let v = fan_cycle_frame();
        for &w in v.points() {
            let cone = v.cone(w).unwrap();
            assert!(cone.contains(&w));
            for &x in &cone {
                for y in v.successors(x) {
                    assert!(cone.contains(&y));
                }
            }
        }
    }

    #[test]
    fn generated_subframe_examples() {
        let v = fan_cycle_frame();
        let sub = generated_subframe(&v, &BTreeSet::from([1])).unwrap();
        assert_eq!(sub, two_cycle_frame());

        // 1 reaches back to 0, so the closure is the whole frame.
        let b = looped_pair_frame();
        let sub = generated_subframe(&b, &BTreeSet::from([1])).unwrap();
        assert_eq!(sub, b);

        let all: BTreeSet<PointId> = v.points().iter().copied().collect();
        assert_eq!(generated_subframe(&v, &all).unwrap(), v);
    }

    #[test]
    fn generated_subframe_is_union_of_cones() {
        let v = fan_cycle_frame();
        for seeds in [
            BTreeSet::from([0]),
            BTreeSet::from([1, 2]),
            BTreeSet::from([2]),
            BTreeSet::new(),
        ] {
            let sub = generated_subframe(&v, &seeds).unwrap();
            let mut expect = BTreeSet::new();
            for &s in &seeds {
                expect.extend(v.cone(s).unwrap());
            }
            let got: BTreeSet<PointId> = sub.points().iter().copied().collect();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn table_class_examples() {
        let chain = Frame::new([0, 1], [(0, 1)]).unwrap();
        assert!(check_class(&chain, &FrameClass::Table(TableLogic::Gl)).is_ok());

        let v = fan_cycle_frame();
        assert_eq!(
            check_class(&v, &FrameClass::Table(TableLogic::K4)),
            Err(ClassViolation::NotTransitive {
                first: (1, 2),
                second: (2, 1),
                missing: (1, 1),
            })
        );
    }

    #[test]
    fn empty_frame_in_every_class() {
        let e = Frame::empty();
        for l in TableLogic::ALL {
            assert!(check_class(&e, &FrameClass::Table(l)).is_ok());
        }
        assert!(check_class(&e, &FrameClass::Functional).is_ok());
        assert!(check_class(&e, &FrameClass::SubreductionsOf(fan_cycle_frame())).is_ok());
    }

    #[test]
    fn subreduction_class_membership() {
        let b = looped_pair_frame();
        assert!(check_class(&b, &FrameClass::SubreductionsOf(b.clone())).is_ok());
        let v = fan_cycle_frame();
        assert!(check_class(&v, &FrameClass::SubreductionsOf(v.clone())).is_ok());
        // An irreflexive single point is not a subreduction of the fan cycle.
        let dead = Frame::new([0], []).unwrap();
        assert_eq!(
            check_class(&dead, &FrameClass::SubreductionsOf(v)),
            Err(ClassViolation::ConeNotSubreduction(0))
        );
    }

    #[test]
    fn functional_class() {
        let cycle = Frame::new([0, 1, 2], [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(check_class(&cycle, &FrameClass::Functional).is_ok());
        let fork = Frame::new([0, 1, 2], [(0, 1), (0, 2), (1, 1), (2, 2)]).unwrap();
        assert_eq!(
            check_class(&fork, &FrameClass::Functional),
            Err(ClassViolation::NotFunctional {
                point: 0,
                successor_count: 2
            })
        );
    }

    #[test]
    fn horn_clause_transitivity() {
        let trans = HornClause {
            vars: vec!["x".into(), "y".into(), "z".into()],
            body: vec![HornAtom::Edge(0, 1), HornAtom::Edge(1, 2)],
            head: Some(HornAtom::Edge(0, 2)),
        };
        let class = FrameClass::Horn(vec![trans]);
        let chain3 = Frame::new([0, 1, 2], [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(check_class(&chain3, &class).is_ok());
        let v = fan_cycle_frame();
        assert!(check_class(&v, &class).is_err());
    }

    #[test]
    fn disjoint_union_examples() {
        let v1 = two_cycle_frame();
        let (u, injections) = disjoint_union(&[v1.clone(), v1.clone()]);
        assert_eq!(u.size(), 4);
        assert_eq!(u.edges().len(), 4);
        assert_eq!(injections.len(), 2);
        // injections are total, valid point maps into the union
        for inj in &injections {
            assert_eq!(inj.len(), v1.size());
            let as_morphism = crate::morphism::PMorphism::validate(
                v1.clone(),
                u.clone(),
                inj.clone(),
            );
            assert!(as_morphism.is_ok());
        }
        let (empty, _) = disjoint_union(&[]);
        assert!(empty.is_empty());
        let (same, _) = disjoint_union(&[fan_cycle_frame(), Frame::empty()]);
        assert!(is_isomorphic(&same, &fan_cycle_frame()).is_some());
    }

    #[test]
    fn isomorphism_examples() {
        let v1 = two_cycle_frame();
        let renamed = Frame::new([7, 9], [(7, 9), (9, 7)]).unwrap();
        let bij = is_isomorphic(&v1, &renamed).unwrap();
        assert_eq!(bij.len(), 2);
        // loop vs no loop: same edge count, no bijection
        let v2 = Frame::new([0, 1], [(0, 1), (1, 1)]).unwrap();
        assert!(is_isomorphic(&v1, &v2).is_none());
        assert_eq!(
            is_isomorphic(&Frame::empty(), &Frame::empty()),
            Some(BTreeMap::new())
        );
    }

    #[test]
    fn lazy_cone_bound() {
        let omega = LazyFrame::omega_successor(10);
        match omega.cone(0).unwrap() {
            ConeResult::BoundExceeded { explored } => {
                assert_eq!(explored, (0..=10).collect());
            }
            other => panic!("expected bound exceeded, got {other:?}"),
        }
        let v = fan_cycle_frame();
        let lazy = LazyFrame::from_frame(&v, 100);
        assert_eq!(
            lazy.cone(0).unwrap(),
            ConeResult::Finite(BTreeSet::from([0, 1, 2]))
        );
    }

    #[test]
    fn catalog_counts_small() {
        // labeled relations on 2 points: 16, giving 10 up to isomorphism
        let k2 = class_catalog(&FrameClass::Table(TableLogic::K), 2).unwrap();
        assert_eq!(k2.len(), 1 + 2 + 10);
        let func = class_catalog(&FrameClass::Functional, 2).unwrap();
        // empty, loop, 2-cycle, loop+edge-in, two loops
        assert_eq!(func.len(), 5);
    }

    #[test]
    fn canonical_code_distinguishes() {
        let a = Frame::new([0, 1], [(0, 1)]).unwrap();
        let b = Frame::new([5, 6], [(6, 5)]).unwrap();
        assert_eq!(a.canonical_code(), b.canonical_code());
        let c = Frame::new([0, 1], [(0, 1), (1, 0)]).unwrap();
        assert_ne!(a.canonical_code(), c.canonical_code());
    }
}
