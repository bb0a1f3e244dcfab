//! Sequents, rule-labelled proof trees, and the rule-by-rule checker.
//!
//! Rules may touch many formulas at once and may demand one premise per
//! choice function or per finite subset of a family union, so every node
//! stores its rule parameters explicitly and is checked locally against the
//! exact expected premise list.
//!
//! Families indexed by all natural numbers are represented eventually
//! constant: a finite prefix and a tail set repeated forever. Such a family
//! is notated inside sequents by its members up to the stabilization depth,
//! one instance of the tail included.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::formula::{boxn, matches_schema, or, Formula};

/// A pair of canonical formula sets. Comma-joined sets mean union.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sequent {
    pub ante: BTreeSet<Formula>,
    pub succ: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new(
        ante: impl IntoIterator<Item = Formula>,
        succ: impl IntoIterator<Item = Formula>,
    ) -> Sequent {
        Sequent {
            ante: ante.into_iter().collect(),
            succ: succ.into_iter().collect(),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in self.ante.iter().chain(self.succ.iter()) {
            out.extend(f.variables());
        }
        out
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.ante.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, " => ")?;
        for (i, g) in self.succ.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// An eventually constant family of formula sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FormulaFamily {
    pub prefix: Vec<BTreeSet<Formula>>,
    pub tail: BTreeSet<Formula>,
}

impl FormulaFamily {
    pub fn union(&self) -> BTreeSet<Formula> {
        let mut out = self.tail.clone();
        for s in &self.prefix {
            out.extend(s.iter().cloned());
        }
        out
    }

    pub fn member(&self, n: usize) -> &BTreeSet<Formula> {
        self.prefix.get(n).unwrap_or(&self.tail)
    }

    /// The finite notation of the indexed antecedent: the n-th box of the
    /// join of the n-th member, for n up to the stabilization depth.
    pub fn notated_block(&self) -> BTreeSet<Formula> {
        (0..=self.prefix.len())
            .map(|n| boxn(n, or(self.member(n).iter().cloned())))
            .collect()
    }

    /// Member-wise intersection with a finite formula set.
    pub fn restrict(&self, subset: &BTreeSet<Formula>) -> FormulaFamily {
        FormulaFamily {
            prefix: self
                .prefix
                .iter()
                .map(|s| s.intersection(subset).cloned().collect())
                .collect(),
            tail: self.tail.intersection(subset).cloned().collect(),
        }
    }
}

/// Rule tags with their parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Ax,
    Weaken,
    Cut {
        set: BTreeSet<Formula>,
        left: Sequent,
        right: Sequent,
    },
    NegL {
        set: BTreeSet<Formula>,
    },
    NegR {
        set: BTreeSet<Formula>,
    },
    AndL {
        family: BTreeSet<BTreeSet<Formula>>,
    },
    AndR {
        family: BTreeSet<BTreeSet<Formula>>,
    },
    OrL {
        family: BTreeSet<BTreeSet<Formula>>,
    },
    OrR {
        family: BTreeSet<BTreeSet<Formula>>,
    },
    Nec {
        set: BTreeSet<Formula>,
    },
    Lf {
        family: FormulaFamily,
    },
    /// Discharges theory axioms and logical-axiom instances.
    TL {
        set: BTreeSet<Formula>,
    },
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::Ax => "Ax",
            Rule::Weaken => "W",
            Rule::Cut { .. } => "Cut",
            Rule::NegL { .. } => "NegL",
            Rule::NegR { .. } => "NegR",
            Rule::AndL { .. } => "AndL",
            Rule::AndR { .. } => "AndR",
            Rule::OrL { .. } => "OrL",
            Rule::OrR { .. } => "OrR",
            Rule::Nec { .. } => "Nec",
            Rule::Lf { .. } => "Lf",
            Rule::TL { .. } => "TL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub conclusion: Sequent,
    pub rule: Rule,
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    pub fn leaf(rule: Rule, conclusion: Sequent) -> ProofTree {
        ProofTree {
            conclusion,
            rule,
            premises: Vec::new(),
        }
    }

    pub fn node(rule: Rule, conclusion: Sequent, premises: Vec<ProofTree>) -> ProofTree {
        ProofTree {
            conclusion,
            rule,
            premises,
        }
    }

    pub fn rank(&self) -> usize {
        1 + self.premises.iter().map(|p| p.rank()).max().unwrap_or(0)
    }
}

/// The calculus parameters: declared variables, logical axiom schemata,
/// and theory axioms. Schema metavariables must be disjoint from the
/// declared variables.
#[derive(Clone, Debug, Default)]
pub struct CalculusParams {
    pub variables: BTreeSet<String>,
    pub logic: Vec<Formula>,
    pub theory: BTreeSet<Formula>,
}

impl CalculusParams {
    pub fn new(
        variables: impl IntoIterator<Item = String>,
        logic: Vec<Formula>,
        theory: impl IntoIterator<Item = Formula>,
    ) -> CalculusParams {
        CalculusParams {
            variables: variables.into_iter().collect(),
            logic,
            theory: theory.into_iter().collect(),
        }
    }

    pub fn without_theory(&self) -> CalculusParams {
        CalculusParams {
            variables: self.variables.clone(),
            logic: self.logic.clone(),
            theory: BTreeSet::new(),
        }
    }

    /// Is the formula a theory axiom or a substitution instance of a
    /// logical axiom schema?
    pub fn is_axiom(&self, f: &Formula) -> bool {
        self.theory.contains(f) || self.logic.iter().any(|s| matches_schema(f, s).is_some())
    }
}

/// Logical axiom schemata of the table logics. Metavariables are named x1,
/// x2 and must not clash with declared variables.
pub fn table_schemata(logic: crate::frame::TableLogic) -> Vec<Formula> {
    use super::formula::{and, bx, dia, imp, or as or_, top, var};
    use crate::frame::TableLogic as T;
    let x1 = || var("x1");
    let x2 = || var("x2");
    let four = imp(bx(x1()), bx(bx(x1())));
    let t = imp(bx(x1()), x1());
    let s4 = vec![four.clone(), t.clone()];
    let lin = or_([
        bx(imp(bx(x1()), x2())),
        bx(imp(bx(x2()), x1())),
    ]);
    let grz = imp(bx(imp(bx(imp(x1(), bx(x1()))), x1())), x1());
    let gl = imp(bx(imp(bx(x1()), x1())), bx(x1()));
    let bxp = |f: Formula| and([f.clone(), bx(f)]);
    let gl_lin = or_([
        bxp(imp(bxp(x1()), x2())),
        bxp(imp(bxp(x2()), x1())),
    ]);
    match logic {
        T::K => vec![],
        T::K4 => vec![four],
        T::S4 => s4,
        T::S4Lin => {
            let mut v = s4;
            v.push(lin);
            v
        }
        T::Grz => {
            let mut v = s4;
            v.push(grz);
            v
        }
        T::GrzLin => {
            let mut v = s4;
            v.push(lin);
            v.push(grz);
            v
        }
        T::Gl => vec![four, gl],
        T::GlLin => vec![four, gl, gl_lin],
        T::D => vec![dia(top())],
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Accepted { rank: usize },
    Rejected(Rejection),
}

impl CheckOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, CheckOutcome::Accepted { .. })
    }
}

/// Where and why a node failed: the path of premise indices from the root,
/// the rule tag, and the reason.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub path: Vec<usize>,
    pub rule: String,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rejected at path {:?} ({} rule): {}",
            self.path, self.rule, self.reason
        )
    }
}

/// All choice functions over a family of sets, canonically ordered. A
/// family containing the empty set admits none.
pub fn choice_functions(family: &BTreeSet<BTreeSet<Formula>>) -> Vec<Vec<Formula>> {
    let sets: Vec<Vec<Formula>> = family.iter().map(|s| s.iter().cloned().collect()).collect();
    if sets.iter().any(|s| s.is_empty()) {
        return Vec::new();
    }
    let mut out = vec![Vec::new()];
    for s in &sets {
        let mut next = Vec::new();
        for partial in &out {
            for f in s {
                let mut p = partial.clone();
                p.push(f.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// All subsets of a formula set, ordered by size then lexicographically.
pub fn subsets_canonical(set: &BTreeSet<Formula>) -> Vec<BTreeSet<Formula>> {
    let items: Vec<Formula> = set.iter().cloned().collect();
    let mut out: Vec<BTreeSet<Formula>> = Vec::new();
    for mask in 0u64..(1 << items.len()) {
        out.push(
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, f)| f.clone())
                .collect(),
        );
    }
    out.sort_by_key(|s| (s.len(), s.iter().cloned().collect::<Vec<_>>()));
    out
}

fn diff(a: &BTreeSet<Formula>, b: &BTreeSet<Formula>) -> BTreeSet<Formula> {
    a.difference(b).cloned().collect()
}

fn union(a: &BTreeSet<Formula>, b: &BTreeSet<Formula>) -> BTreeSet<Formula> {
    a.union(b).cloned().collect()
}

/// Does some shared context complete a single-premise rule whose active
/// parts on premise and conclusion sides are given? With comma-as-union a
/// context may overlap the active sets, so the test is the subset square:
/// active parts included, and each side's leftover included in the other.
fn context_match(
    active_prem: &BTreeSet<Formula>,
    prem: &BTreeSet<Formula>,
    active_conc: &BTreeSet<Formula>,
    conc: &BTreeSet<Formula>,
) -> bool {
    active_prem.is_subset(prem)
        && active_conc.is_subset(conc)
        && diff(prem, active_prem).is_subset(conc)
        && diff(conc, active_conc).is_subset(prem)
}

/// Shared context across several premises on one side: the least candidate
/// is the union of the leftovers, which completes every instance iff any
/// context does.
fn shared_context(
    conc: &BTreeSet<Formula>,
    active_conc: &BTreeSet<Formula>,
    premise_sides: &[(&BTreeSet<Formula>, BTreeSet<Formula>)],
) -> Option<BTreeSet<Formula>> {
    let mut low = diff(conc, active_conc);
    for (side, active) in premise_sides {
        low = union(&low, &diff(side, active));
    }
    if union(&low, active_conc) != *conc {
        return None;
    }
    for (side, active) in premise_sides {
        if &union(&low, active) != *side {
            return None;
        }
    }
    Some(low)
}

pub fn check_proof(proof: &ProofTree, params: &CalculusParams) -> CheckOutcome {
    let mut path = Vec::new();
    match check_node(proof, params, &mut path) {
        Ok(rank) => CheckOutcome::Accepted { rank },
        Err(rej) => CheckOutcome::Rejected(rej),
    }
}

fn fail(path: &[usize], rule: &Rule, reason: impl Into<String>) -> Rejection {
    Rejection {
        path: path.to_vec(),
        rule: rule.tag().to_string(),
        reason: reason.into(),
    }
}

fn check_node(
    node: &ProofTree,
    params: &CalculusParams,
    path: &mut Vec<usize>,
) -> Result<usize, Rejection> {
    let conc = &node.conclusion;
    let n_premises = node.premises.len();
    let expect_premises = |want: usize| -> Result<(), Rejection> {
        if n_premises == want {
            Ok(())
        } else {
            Err(fail(
                path,
                &node.rule,
                format!("expected {want} premises, found {n_premises}"),
            ))
        }
    };
    match &node.rule {
        Rule::Ax => {
            expect_premises(0)?;
            if conc.ante.len() == 1 && conc.ante == conc.succ {
                Ok(1)
            } else {
                Err(fail(
                    path,
                    &node.rule,
                    "axiom must be of the shape f => f",
                ))
            }
        }
        Rule::Weaken => {
            expect_premises(1)?;
            let prem = &node.premises[0].conclusion;
            if !prem.ante.is_subset(&conc.ante) || !prem.succ.is_subset(&conc.succ) {
                return Err(fail(
                    path,
                    &node.rule,
                    "premise must be contained in the conclusion",
                ));
            }
            check_premises(node, params, path)
        }
        Rule::Cut { set, left, right } => {
            if set.is_empty() {
                return Err(fail(path, &node.rule, "cut set must be nonempty"));
            }
            expect_premises(set.len() + 1)?;
            if union(&left.ante, &right.ante) != conc.ante
                || union(&left.succ, &right.succ) != conc.succ
            {
                return Err(fail(
                    path,
                    &node.rule,
                    "declared contexts do not assemble the conclusion",
                ));
            }
            for (i, f) in set.iter().enumerate() {
                let want = Sequent {
                    ante: left.ante.clone(),
                    succ: union(&left.succ, &BTreeSet::from([f.clone()])),
                };
                if node.premises[i].conclusion != want {
                    return Err(fail(
                        path,
                        &node.rule,
                        format!("premise {i} must be `{want}` for cut formula {f}"),
                    ));
                }
            }
            let want = Sequent {
                ante: union(set, &right.ante),
                succ: right.succ.clone(),
            };
            if node.premises[set.len()].conclusion != want {
                return Err(fail(
                    path,
                    &node.rule,
                    format!("final premise must be `{want}`"),
                ));
            }
            check_premises(node, params, path)
        }
        Rule::NegL { set } => {
            expect_premises(1)?;
            let prem = &node.premises[0].conclusion;
            let neg_set: BTreeSet<Formula> =
                set.iter().cloned().map(|f| super::formula::neg(f)).collect();
            if union(&neg_set, &prem.ante) != conc.ante {
                return Err(fail(
                    path,
                    &node.rule,
                    "conclusion antecedent must be the negated set joined with the premise antecedent",
                ));
            }
            if union(&conc.succ, set) != prem.succ {
                return Err(fail(
                    path,
                    &node.rule,
                    "premise succedent must be the conclusion succedent joined with the set",
                ));
            }
            check_premises(node, params, path)
        }
        Rule::NegR { set } => {
            expect_premises(1)?;
            let prem = &node.premises[0].conclusion;
            let neg_set: BTreeSet<Formula> =
                set.iter().cloned().map(|f| super::formula::neg(f)).collect();
            if union(&neg_set, &prem.succ) != conc.succ {
                return Err(fail(
                    path,
                    &node.rule,
                    "conclusion succedent must be the negated set joined with the premise succedent",
                ));
            }
            if union(&conc.ante, set) != prem.ante {
                return Err(fail(
                    path,
                    &node.rule,
                    "premise antecedent must be the conclusion antecedent joined with the set",
                ));
            }
            check_premises(node, params, path)
        }
        Rule::AndL { family } => {
            expect_premises(1)?;
            let prem = &node.premises[0].conclusion;
            if prem.succ != conc.succ {
                return Err(fail(path, &node.rule, "succedents must agree"));
            }
            let meets: BTreeSet<Formula> = family
                .iter()
                .map(|s| Formula::And(s.clone()))
                .collect();
            let flat: BTreeSet<Formula> = family.iter().flatten().cloned().collect();
            if !context_match(&flat, &prem.ante, &meets, &conc.ante) {
                return Err(fail(
                    path,
                    &node.rule,
                    "no context completes the meet introduction on the left",
                ));
            }
            check_premises(node, params, path)
        }
        Rule::OrR { family } => {
            expect_premises(1)?;
            let prem = &node.premises[0].conclusion;
            if prem.ante != conc.ante {
                return Err(fail(path, &node.rule, "antecedents must agree"));
            }
            let joins: BTreeSet<Formula> =
                family.iter().map(|s| Formula::Or(s.clone())).collect();
            let flat: BTreeSet<Formula> = family.iter().flatten().cloned().collect();
            if !context_match(&flat, &prem.succ, &joins, &conc.succ) {
                return Err(fail(
                    path,
                    &node.rule,
                    "no context completes the join introduction on the right",
                ));
            }
            check_premises(node, params, path)
        }
        Rule::AndR { family } => {
            let choices = choice_functions(family);
            expect_premises(choices.len())?;
            let meets: BTreeSet<Formula> =
                family.iter().map(|s| Formula::And(s.clone())).collect();
            let images: Vec<BTreeSet<Formula>> = choices
                .iter()
                .map(|c| c.iter().cloned().collect())
                .collect();
            for prem in &node.premises {
                if prem.conclusion.ante != conc.ante {
                    return Err(fail(path, &node.rule, "premise antecedents must agree"));
                }
            }
            let sides: Vec<(&BTreeSet<Formula>, BTreeSet<Formula>)> = node
                .premises
                .iter()
                .zip(&images)
                .map(|(p, img)| (&p.conclusion.succ, img.clone()))
                .collect();
            let delta = shared_context(&conc.succ, &meets, &sides);
            if delta.is_none() {
                // pinpoint a missing choice function when counts differ
                for (i, img) in images.iter().enumerate() {
                    if node.premises.get(i).is_none() {
                        return Err(fail(
                            path,
                            &node.rule,
                            format!(
                                "missing premise for choice function {{{}}}",
                                img.iter()
                                    .map(|f| f.to_string())
                                    .collect::<Vec<_>>()
                                    .join(", ")
                            ),
                        ));
                    }
                }
                return Err(fail(
                    path,
                    &node.rule,
                    "no shared context completes the choice-function premises",
                ));
            }
            check_premises(node, params, path)
        }
        Rule::OrL { family } => {
            let choices = choice_functions(family);
            expect_premises(choices.len())?;
            let joins: BTreeSet<Formula> =
                family.iter().map(|s| Formula::Or(s.clone())).collect();
            let images: Vec<BTreeSet<Formula>> = choices
                .iter()
                .map(|c| c.iter().cloned().collect())
                .collect();
            for prem in &node.premises {
                if prem.conclusion.succ != conc.succ {
                    return Err(fail(path, &node.rule, "premise succedents must agree"));
                }
            }
            let sides: Vec<(&BTreeSet<Formula>, BTreeSet<Formula>)> = node
                .premises
                .iter()
                .zip(&images)
                .map(|(p, img)| (&p.conclusion.ante, img.clone()))
                .collect();
            if shared_context(&conc.ante, &joins, &sides).is_none() {
                for (i, img) in images.iter().enumerate() {
                    if node.premises.get(i).is_none() {
                        return Err(fail(
                            path,
                            &node.rule,
                            format!(
                                "missing premise for choice function {{{}}}",
                                img.iter()
                                    .map(|f| f.to_string())
                                    .collect::<Vec<_>>()
                                    .join(", ")
                            ),
                        ));
                    }
                }
                return Err(fail(
                    path,
                    &node.rule,
                    "no shared context completes the choice-function premises",
                ));
            }
            check_premises(node, params, path)
        }
        Rule::Nec { set } => {
            expect_premises(1)?;
            let prem = &node.premises[0].conclusion;
            if prem.ante != *set {
                return Err(fail(
                    path,
                    &node.rule,
                    "premise antecedent must equal the declared set",
                ));
            }
            if prem.succ.len() != 1 {
                return Err(fail(
                    path,
                    &node.rule,
                    "premise must conclude a single formula",
                ));
            }
            let phi = prem.succ.iter().next().unwrap().clone();
            let boxed_set: BTreeSet<Formula> =
                set.iter().cloned().map(super::formula::bx).collect();
            let want = Sequent {
                ante: boxed_set,
                succ: BTreeSet::from([super::formula::bx(phi)]),
            };
            if *conc != want {
                return Err(fail(
                    path,
                    &node.rule,
                    format!("conclusion must be `{want}`"),
                ));
            }
            check_premises(node, params, path)
        }
        Rule::Lf { family } => {
            let union_set = family.union();
            if union_set.len() > 12 {
                return Err(fail(
                    path,
                    &node.rule,
                    format!("family union of {} formulas is too large", union_set.len()),
                ));
            }
            let subsets = subsets_canonical(&union_set);
            expect_premises(subsets.len())?;
            let block = family.notated_block();
            let blocks: Vec<BTreeSet<Formula>> = subsets
                .iter()
                .map(|s| family.restrict(s).notated_block())
                .collect();
            for prem in &node.premises {
                if prem.conclusion.succ != conc.succ {
                    return Err(fail(path, &node.rule, "premise succedents must agree"));
                }
            }
            let sides: Vec<(&BTreeSet<Formula>, BTreeSet<Formula>)> = node
                .premises
                .iter()
                .zip(&blocks)
                .map(|(p, b)| (&p.conclusion.ante, b.clone()))
                .collect();
            if shared_context(&conc.ante, &block, &sides).is_none() {
                return Err(fail(
                    path,
                    &node.rule,
                    "no shared context completes the family premises",
                ));
            }
            check_premises(node, params, path)
        }
        Rule::TL { set } => {
            expect_premises(1)?;
            for f in set {
                if !params.is_axiom(f) {
                    return Err(fail(
                        path,
                        &node.rule,
                        format!("cited formula {f} is neither a theory axiom nor a logical-axiom instance"),
                    ));
                }
            }
            let prem = &node.premises[0].conclusion;
            if prem.succ != conc.succ {
                return Err(fail(path, &node.rule, "succedents must agree"));
            }
            if union(set, &conc.ante) != prem.ante {
                return Err(fail(
                    path,
                    &node.rule,
                    "premise antecedent must be the cited set joined with the conclusion antecedent",
                ));
            }
            check_premises(node, params, path)
        }
    }
}

fn check_premises(
    node: &ProofTree,
    params: &CalculusParams,
    path: &mut Vec<usize>,
) -> Result<usize, Rejection> {
    let mut max = 0;
    for (i, p) in node.premises.iter().enumerate() {
        path.push(i);
        let r = check_node(p, params, path)?;
        path.pop();
        max = max.max(r);
    }
    Ok(max + 1)
}

/// Substitution helper for copies of variable sets: renames every variable
/// `x` in the given base set to `x` suffixed by the tag.
pub fn rename_variables(f: &Formula, base: &BTreeSet<String>, tag: &str) -> Formula {
    let subst: BTreeMap<String, Formula> = base
        .iter()
        .map(|x| (x.clone(), Formula::Var(format!("{x}{tag}"))))
        .collect();
    f.substitute(&subst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::formula::*;
    use crate::frame::TableLogic;

    fn k_params() -> CalculusParams {
        CalculusParams::new(
            ["p".to_string(), "q".to_string()],
            table_schemata(TableLogic::K),
            [],
        )
    }

    #[test]
    fn axiom_accepted_with_rank_one() {
        let pf = ProofTree::leaf(Rule::Ax, Sequent::new([var("p")], [var("p")]));
        assert_eq!(check_proof(&pf, &k_params()), CheckOutcome::Accepted { rank: 1 });
        let bad = ProofTree::leaf(Rule::Ax, Sequent::new([var("p")], [var("q")]));
        assert!(!check_proof(&bad, &k_params()).is_accepted());
    }

    #[test]
    fn necessitation_of_meet() {
        // p,q => p and p,q => q via weakening, then meet-right, then nec
        let gamma = [var("p"), var("q")];
        let ax_p = ProofTree::leaf(Rule::Ax, Sequent::new([var("p")], [var("p")]));
        let w_p = ProofTree::node(
            Rule::Weaken,
            Sequent::new(gamma.clone(), [var("p")]),
            vec![ax_p],
        );
        let ax_q = ProofTree::leaf(Rule::Ax, Sequent::new([var("q")], [var("q")]));
        let w_q = ProofTree::node(
            Rule::Weaken,
            Sequent::new(gamma.clone(), [var("q")]),
            vec![ax_q],
        );
        let fam: BTreeSet<BTreeSet<Formula>> =
            BTreeSet::from([BTreeSet::from([var("p"), var("q")])]);
        let meet = and([var("p"), var("q")]);
        let and_r = ProofTree::node(
            Rule::AndR { family: fam },
            Sequent::new(gamma.clone(), [meet.clone()]),
            vec![w_p, w_q],
        );
        let nec = ProofTree::node(
            Rule::Nec {
                set: BTreeSet::from([var("p"), var("q")]),
            },
            Sequent::new([bx(var("p")), bx(var("q"))], [bx(meet)]),
            vec![and_r],
        );
        match check_proof(&nec, &k_params()) {
            CheckOutcome::Accepted { rank } => assert_eq!(rank, 4),
            other => panic!("expected acceptance, got {other:?}"),
        }
    }

    #[test]
    fn missing_choice_function_rejected() {
        let fam: BTreeSet<BTreeSet<Formula>> =
            BTreeSet::from([BTreeSet::from([var("p"), var("q")])]);
        let ax_p = ProofTree::leaf(Rule::Ax, Sequent::new([var("p")], [var("p")]));
        let w_p = ProofTree::node(
            Rule::Weaken,
            Sequent::new([var("p"), var("q")], [var("p")]),
            vec![ax_p],
        );
        let node = ProofTree::node(
            Rule::AndR { family: fam },
            Sequent::new([var("p"), var("q")], [and([var("p"), var("q")])]),
            vec![w_p],
        );
        match check_proof(&node, &k_params()) {
            CheckOutcome::Rejected(rej) => {
                assert_eq!(rej.rule, "AndR");
                assert!(rej.reason.contains("expected 2 premises"));
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn rejection_paths_point_at_the_failing_node() {
        let bad_ax = ProofTree::leaf(Rule::Ax, Sequent::new([var("p")], [var("q")]));
        let weak = ProofTree::node(
            Rule::Weaken,
            Sequent::new([var("p"), var("q")], [var("q")]),
            vec![bad_ax],
        );
        match check_proof(&weak, &k_params()) {
            CheckOutcome::Rejected(rej) => {
                assert_eq!(rej.path, vec![0]);
                assert_eq!(rej.rule, "Ax");
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn tl_rule_cites_axioms_only() {
        let theory_axiom = bx(var("p"));
        let params = CalculusParams::new(
            ["p".to_string()],
            table_schemata(TableLogic::K4),
            [theory_axiom.clone()],
        );
        let ax = ProofTree::leaf(
            Rule::Ax,
            Sequent::new([theory_axiom.clone()], [theory_axiom.clone()]),
        );
        let tl = ProofTree::node(
            Rule::TL {
                set: BTreeSet::from([theory_axiom.clone()]),
            },
            Sequent::new([], [theory_axiom.clone()]),
            vec![ax],
        );
        assert!(check_proof(&tl, &params).is_accepted());

        // a K4 instance is citable, arbitrary formulas are not
        let inst = imp(bx(var("p")), bx(bx(var("p"))));
        let ax2 = ProofTree::leaf(Rule::Ax, Sequent::new([inst.clone()], [inst.clone()]));
        let tl2 = ProofTree::node(
            Rule::TL {
                set: BTreeSet::from([inst.clone()]),
            },
            Sequent::new([], [inst]),
            vec![ax2],
        );
        assert!(check_proof(&tl2, &params).is_accepted());

        let stray = var("p");
        let ax3 = ProofTree::leaf(Rule::Ax, Sequent::new([stray.clone()], [stray.clone()]));
        let tl3 = ProofTree::node(
            Rule::TL {
                set: BTreeSet::from([stray.clone()]),
            },
            Sequent::new([], [stray]),
            vec![ax3],
        );
        assert!(!check_proof(&tl3, &params).is_accepted());
    }

    #[test]
    fn empty_meet_needs_no_premises() {
        // => top by the choice-function rule over the family {{}}
        let fam: BTreeSet<BTreeSet<Formula>> = BTreeSet::from([BTreeSet::new()]);
        let node = ProofTree::node(
            Rule::AndR { family: fam },
            Sequent::new([], [top()]),
            vec![],
        );
        assert!(check_proof(&node, &k_params()).is_accepted());
    }

    #[test]
    fn rank_is_one_plus_max_premise_rank() {
        let ax = ProofTree::leaf(Rule::Ax, Sequent::new([var("p")], [var("p")]));
        let w1 = ProofTree::node(
            Rule::Weaken,
            Sequent::new([var("p"), var("q")], [var("p")]),
            vec![ax.clone()],
        );
        let w2 = ProofTree::node(
            Rule::Weaken,
            Sequent::new([var("p"), var("q"), top()], [var("p")]),
            vec![w1],
        );
        assert_eq!(
            check_proof(&w2, &k_params()),
            CheckOutcome::Accepted { rank: 3 }
        );
        assert_eq!(w2.rank(), 3);
        assert_eq!(ax.rank(), 1);
    }
}
