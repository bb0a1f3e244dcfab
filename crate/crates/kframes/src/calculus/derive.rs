//! Proof generators: the standard equivalences between set connectives,
//! checked derivations for both directions, and the theory-discharging
//! transform with its inverse.

use std::collections::BTreeSet;

use thiserror::Error;

use super::formula::{self, bx, neg, or, top, Formula, FormulaError};
use super::proof::{
    choice_functions, subsets_canonical, CalculusParams, FormulaFamily, ProofTree, Rule, Sequent,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeriveError {
    #[error("expansion too large: {0}")]
    SizeGuard(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("proof does not use the expected rule shape: {0}")]
    Shape(String),
}

/// The derivable equivalences between set connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceVariant {
    /// Meet of meets flattens to the meet of the union.
    NestedMeets,
    /// Negated meet is the join of negations.
    NegatedMeet,
    /// Boxed meet is the meet of boxes.
    BoxedMeet,
    /// Meet of joins distributes to the join over choice functions.
    MeetJoinDistribution,
    /// A boxed-join family distributes over its finite subfamilies.
    FamilyDistribution,
    /// A boxed join is the join of boxed finite subjoins.
    BoxedJoin,
}

impl EquivalenceVariant {
    pub fn parse(s: &str) -> Option<EquivalenceVariant> {
        match s {
            "o" => Some(EquivalenceVariant::NestedMeets),
            "i" => Some(EquivalenceVariant::NegatedMeet),
            "ii" => Some(EquivalenceVariant::BoxedMeet),
            "iii" => Some(EquivalenceVariant::MeetJoinDistribution),
            "iv" => Some(EquivalenceVariant::FamilyDistribution),
            "v" => Some(EquivalenceVariant::BoxedJoin),
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            EquivalenceVariant::NestedMeets => "o",
            EquivalenceVariant::NegatedMeet => "i",
            EquivalenceVariant::BoxedMeet => "ii",
            EquivalenceVariant::MeetJoinDistribution => "iii",
            EquivalenceVariant::FamilyDistribution => "iv",
            EquivalenceVariant::BoxedJoin => "v",
        }
    }
}

/// Parameters for [`derive_equivalence`]: a set, a family of sets, or an
/// eventually constant formula family, depending on the variant.
#[derive(Clone, Debug)]
pub enum EquivalenceParams {
    Set(BTreeSet<Formula>),
    Family(BTreeSet<BTreeSet<Formula>>),
    IndexedFamily(FormulaFamily),
}

/// A derived equivalence: checked proofs of both directional sequents.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub lhs: Formula,
    pub rhs: Formula,
    pub forward: ProofTree,
    pub backward: ProofTree,
}

const CHOICE_GUARD: usize = 4096;

fn guard_choices(family: &BTreeSet<BTreeSet<Formula>>) -> Result<(), DeriveError> {
    let count: usize = family.iter().map(|s| s.len()).product();
    if count > CHOICE_GUARD {
        return Err(DeriveError::SizeGuard(format!(
            "{count} choice functions exceed {CHOICE_GUARD}"
        )));
    }
    Ok(())
}

fn guard_subsets(set: &BTreeSet<Formula>) -> Result<(), DeriveError> {
    if set.len() > 12 {
        return Err(DeriveError::SizeGuard(format!(
            "2^{} finite subsets exceed the guard",
            set.len()
        )));
    }
    Ok(())
}

fn ax(f: &Formula) -> ProofTree {
    ProofTree::leaf(Rule::Ax, Sequent::new([f.clone()], [f.clone()]))
}

/// Weakening to a superset sequent; skipped when nothing is added.
fn weaken_to(tree: ProofTree, target: Sequent) -> ProofTree {
    if tree.conclusion == target {
        tree
    } else {
        ProofTree::node(Rule::Weaken, target, vec![tree])
    }
}

/// `set => f` for `f` a member of `set`, by axiom and weakening.
fn member_sequent(set: &BTreeSet<Formula>, f: &Formula) -> ProofTree {
    weaken_to(ax(f), Sequent::new(set.iter().cloned(), [f.clone()]))
}

/// `set => and(set)` by the choice-function rule on the right.
fn meet_from_members(set: &BTreeSet<Formula>) -> ProofTree {
    let premises = set.iter().map(|f| member_sequent(set, f)).collect();
    ProofTree::node(
        Rule::AndR {
            family: BTreeSet::from([set.clone()]),
        },
        Sequent::new(set.iter().cloned(), [Formula::And(set.clone())]),
        premises,
    )
}

/// `sub => or(sup)` for `sub` a subset of `sup`: joins expand on the right
/// and collapse on the left.
fn join_of_subset(sub: &BTreeSet<Formula>, sup: &BTreeSet<Formula>) -> ProofTree {
    let premises = sub
        .iter()
        .map(|f| {
            let expand = ProofTree::node(
                Rule::OrR {
                    family: BTreeSet::from([sup.clone()]),
                },
                Sequent::new([f.clone()], [Formula::Or(sup.clone())]),
                vec![weaken_to(
                    ax(f),
                    Sequent::new([f.clone()], sup.iter().cloned()),
                )],
            );
            expand
        })
        .collect();
    ProofTree::node(
        Rule::OrL {
            family: BTreeSet::from([sub.clone()]),
        },
        Sequent::new(
            [Formula::Or(sub.clone())],
            [Formula::Or(sup.clone())],
        ),
        premises,
    )
}

/// `boxn(n, or(sub)) => boxn(n, or(sup))` by iterated necessitation.
fn boxed_join_of_subset(n: usize, sub: &BTreeSet<Formula>, sup: &BTreeSet<Formula>) -> ProofTree {
    let mut tree = join_of_subset(sub, sup);
    for k in 0..n {
        let premise_formula = formula::boxn(k, Formula::Or(sub.clone()));
        let target_formula = formula::boxn(k, Formula::Or(sup.clone()));
        tree = ProofTree::node(
            Rule::Nec {
                set: BTreeSet::from([premise_formula.clone()]),
            },
            Sequent::new([bx(premise_formula)], [bx(target_formula)]),
            vec![tree],
        );
    }
    tree
}

pub fn derive_equivalence(
    variant: EquivalenceVariant,
    params: &EquivalenceParams,
) -> Result<Equivalence, DeriveError> {
    match (variant, params) {
        (EquivalenceVariant::NestedMeets, EquivalenceParams::Family(family)) => {
            Ok(nested_meets(family))
        }
        (EquivalenceVariant::NegatedMeet, EquivalenceParams::Set(set)) => Ok(negated_meet(set)),
        (EquivalenceVariant::BoxedMeet, EquivalenceParams::Set(set)) => Ok(boxed_meet(set)),
        (EquivalenceVariant::MeetJoinDistribution, EquivalenceParams::Family(family)) => {
            guard_choices(family)?;
            Ok(meet_join_distribution(family))
        }
        (EquivalenceVariant::FamilyDistribution, EquivalenceParams::IndexedFamily(family)) => {
            guard_subsets(&family.union())?;
            Ok(family_distribution(family))
        }
        (EquivalenceVariant::BoxedJoin, EquivalenceParams::Set(set)) => {
            guard_subsets(set)?;
            Ok(boxed_join(set))
        }
        _ => Err(DeriveError::Shape(
            "variant and parameter kinds do not match".into(),
        )),
    }
}

fn nested_meets(family: &BTreeSet<BTreeSet<Formula>>) -> Equivalence {
    let meets: BTreeSet<Formula> = family.iter().map(|s| Formula::And(s.clone())).collect();
    let union: BTreeSet<Formula> = family.iter().flatten().cloned().collect();
    let lhs = Formula::And(meets.clone());
    let rhs = Formula::And(union.clone());

    // forward: unfold both meet layers, then rebuild the flat meet
    let forward_premises = union
        .iter()
        .map(|f| {
            let from_union = member_sequent(&union, f);
            let to_meets = ProofTree::node(
                Rule::AndL {
                    family: family.clone(),
                },
                Sequent::new(meets.iter().cloned(), [f.clone()]),
                vec![from_union],
            );
            ProofTree::node(
                Rule::AndL {
                    family: BTreeSet::from([meets.clone()]),
                },
                Sequent::new([lhs.clone()], [f.clone()]),
                vec![to_meets],
            )
        })
        .collect();
    let forward = ProofTree::node(
        Rule::AndR {
            family: BTreeSet::from([union.clone()]),
        },
        Sequent::new([lhs.clone()], [rhs.clone()]),
        forward_premises,
    );

    // backward: prove each inner meet from the flat one
    let backward_premises = meets
        .iter()
        .map(|m| {
            let inner: &BTreeSet<Formula> = match m {
                Formula::And(s) => s,
                _ => unreachable!("meets contain only conjunctions"),
            };
            let member_premises = inner
                .iter()
                .map(|f| {
                    let from_union = member_sequent(&union, f);
                    ProofTree::node(
                        Rule::AndL {
                            family: BTreeSet::from([union.clone()]),
                        },
                        Sequent::new([rhs.clone()], [f.clone()]),
                        vec![from_union],
                    )
                })
                .collect();
            ProofTree::node(
                Rule::AndR {
                    family: BTreeSet::from([inner.clone()]),
                },
                Sequent::new([rhs.clone()], [m.clone()]),
                member_premises,
            )
        })
        .collect();
    let backward = ProofTree::node(
        Rule::AndR {
            family: BTreeSet::from([meets.clone()]),
        },
        Sequent::new([rhs.clone()], [lhs.clone()]),
        backward_premises,
    );
    Equivalence {
        lhs,
        rhs,
        forward,
        backward,
    }
}

fn negated_meet(set: &BTreeSet<Formula>) -> Equivalence {
    let meet = Formula::And(set.clone());
    let neg_set: BTreeSet<Formula> = set.iter().cloned().map(neg).collect();
    let lhs = neg(meet.clone());
    let rhs = Formula::Or(neg_set.clone());

    // forward: set => meet, flip both sides, then join up
    let to_meet = meet_from_members(set);
    let flipped_right = ProofTree::node(
        Rule::NegR { set: set.clone() },
        Sequent::new([], neg_set.iter().cloned().chain([meet.clone()])),
        vec![to_meet],
    );
    let flipped_left = ProofTree::node(
        Rule::NegL {
            set: BTreeSet::from([meet.clone()]),
        },
        Sequent::new([lhs.clone()], neg_set.iter().cloned()),
        vec![flipped_right],
    );
    let forward = ProofTree::node(
        Rule::OrR {
            family: BTreeSet::from([neg_set.clone()]),
        },
        Sequent::new([lhs.clone()], [rhs.clone()]),
        vec![flipped_left],
    );

    // backward: each negated member refutes the meet
    let backward_premises = set
        .iter()
        .map(|f| {
            let project = ProofTree::node(
                Rule::AndL {
                    family: BTreeSet::from([set.clone()]),
                },
                Sequent::new([meet.clone()], [f.clone()]),
                vec![member_sequent(set, f)],
            );
            let flip_r = ProofTree::node(
                Rule::NegR {
                    set: BTreeSet::from([meet.clone()]),
                },
                Sequent::new([], [f.clone(), lhs.clone()]),
                vec![project],
            );
            ProofTree::node(
                Rule::NegL {
                    set: BTreeSet::from([f.clone()]),
                },
                Sequent::new([neg(f.clone())], [lhs.clone()]),
                vec![flip_r],
            )
        })
        .collect();
    let backward = ProofTree::node(
        Rule::OrL {
            family: BTreeSet::from([neg_set.clone()]),
        },
        Sequent::new([rhs.clone()], [lhs.clone()]),
        backward_premises,
    );
    Equivalence {
        lhs,
        rhs,
        forward,
        backward,
    }
}

fn boxed_meet(set: &BTreeSet<Formula>) -> Equivalence {
    let meet = Formula::And(set.clone());
    let boxed_set: BTreeSet<Formula> = set.iter().cloned().map(bx).collect();
    let lhs = bx(meet.clone());
    let rhs = Formula::And(boxed_set.clone());

    let forward_premises = set
        .iter()
        .map(|f| {
            let project = ProofTree::node(
                Rule::AndL {
                    family: BTreeSet::from([set.clone()]),
                },
                Sequent::new([meet.clone()], [f.clone()]),
                vec![member_sequent(set, f)],
            );
            ProofTree::node(
                Rule::Nec {
                    set: BTreeSet::from([meet.clone()]),
                },
                Sequent::new([lhs.clone()], [bx(f.clone())]),
                vec![project],
            )
        })
        .collect();
    let forward = ProofTree::node(
        Rule::AndR {
            family: BTreeSet::from([boxed_set.clone()]),
        },
        Sequent::new([lhs.clone()], [rhs.clone()]),
        forward_premises,
    );

    let to_meet = meet_from_members(set);
    let nec = ProofTree::node(
        Rule::Nec { set: set.clone() },
        Sequent::new(boxed_set.iter().cloned(), [lhs.clone()]),
        vec![to_meet],
    );
    let backward = ProofTree::node(
        Rule::AndL {
            family: BTreeSet::from([boxed_set.clone()]),
        },
        Sequent::new([rhs.clone()], [lhs.clone()]),
        vec![nec],
    );
    Equivalence {
        lhs,
        rhs,
        forward,
        backward,
    }
}

fn meet_join_distribution(family: &BTreeSet<BTreeSet<Formula>>) -> Equivalence {
    let joins: BTreeSet<Formula> = family.iter().map(|s| Formula::Or(s.clone())).collect();
    let choices = choice_functions(family);
    let images: Vec<BTreeSet<Formula>> = choices
        .iter()
        .map(|c| c.iter().cloned().collect())
        .collect();
    let meets: BTreeSet<Formula> = images
        .iter()
        .map(|img| Formula::And(img.clone()))
        .collect();
    let lhs = Formula::And(joins.clone());
    let rhs = Formula::Or(meets.clone());

    // forward: split into one branch per choice function, each of which
    // assembles its own meet and weakens into the full disjunction
    let branch_premises: Vec<ProofTree> = images
        .iter()
        .map(|img| {
            let own = meet_from_members(img);
            weaken_to(own, Sequent::new(img.iter().cloned(), meets.iter().cloned()))
        })
        .collect();
    let split = ProofTree::node(
        Rule::OrL {
            family: family.clone(),
        },
        Sequent::new(joins.iter().cloned(), meets.iter().cloned()),
        branch_premises,
    );
    let collect = ProofTree::node(
        Rule::OrR {
            family: BTreeSet::from([meets.clone()]),
        },
        Sequent::new(joins.iter().cloned(), [rhs.clone()]),
        vec![split],
    );
    let forward = ProofTree::node(
        Rule::AndL {
            family: BTreeSet::from([joins.clone()]),
        },
        Sequent::new([lhs.clone()], [rhs.clone()]),
        vec![collect],
    );

    // backward: every choice meet proves every join, since it picked a
    // member of each
    let backward_premises = meets
        .iter()
        .map(|m| {
            let img: &BTreeSet<Formula> = match m {
                Formula::And(s) => s,
                _ => unreachable!(),
            };
            let join_premises = family
                .iter()
                .map(|r| {
                    // the element img picked from r: any member of both
                    let picked = img
                        .iter()
                        .find(|f| r.contains(f))
                        .expect("every choice image meets every member set")
                        .clone();
                    let into_join = ProofTree::node(
                        Rule::OrR {
                            family: BTreeSet::from([r.clone()]),
                        },
                        Sequent::new([picked.clone()], [Formula::Or(r.clone())]),
                        vec![weaken_to(
                            ax(&picked),
                            Sequent::new([picked.clone()], r.iter().cloned()),
                        )],
                    );
                    ProofTree::node(
                        Rule::AndL {
                            family: BTreeSet::from([img.clone()]),
                        },
                        Sequent::new([m.clone()], [Formula::Or(r.clone())]),
                        vec![weaken_to(
                            into_join,
                            Sequent::new(img.iter().cloned(), [Formula::Or(r.clone())]),
                        )],
                    )
                })
                .collect();
            ProofTree::node(
                Rule::AndR {
                    family: BTreeSet::from([joins.clone()]),
                },
                Sequent::new([m.clone()], [lhs.clone()]),
                join_premises,
            )
        })
        .collect();
    let backward = ProofTree::node(
        Rule::OrL {
            family: BTreeSet::from([meets.clone()]),
        },
        Sequent::new([rhs.clone()], [lhs.clone()]),
        backward_premises,
    );
    Equivalence {
        lhs,
        rhs,
        forward,
        backward,
    }
}

fn family_distribution(family: &FormulaFamily) -> Equivalence {
    let block = family.notated_block();
    let union = family.union();
    let subsets = subsets_canonical(&union);
    let blocks: Vec<BTreeSet<Formula>> = subsets
        .iter()
        .map(|s| family.restrict(s).notated_block())
        .collect();
    let rhs_set: BTreeSet<Formula> = blocks
        .iter()
        .map(|b| Formula::And(b.clone()))
        .collect();
    let lhs = Formula::And(block.clone());
    let rhs = Formula::Or(rhs_set.clone());

    // forward: the family rule splits into one branch per finite subset
    let branch_premises: Vec<ProofTree> = blocks
        .iter()
        .map(|b| {
            weaken_to(
                meet_from_members(b),
                Sequent::new(b.iter().cloned(), rhs_set.iter().cloned()),
            )
        })
        .collect();
    let lf = ProofTree::node(
        Rule::Lf {
            family: family.clone(),
        },
        Sequent::new(block.iter().cloned(), rhs_set.iter().cloned()),
        branch_premises,
    );
    let collect = ProofTree::node(
        Rule::OrR {
            family: BTreeSet::from([rhs_set.clone()]),
        },
        Sequent::new(block.iter().cloned(), [rhs.clone()]),
        vec![lf],
    );
    let forward = ProofTree::node(
        Rule::AndL {
            family: BTreeSet::from([block.clone()]),
        },
        Sequent::new([lhs.clone()], [rhs.clone()]),
        vec![collect],
    );

    // backward: each restricted block entails the full block memberwise
    let n = family.prefix.len();
    let backward_premises: Vec<ProofTree> = rhs_set
        .iter()
        .map(|m| {
            let restricted: &BTreeSet<Formula> = match m {
                Formula::And(s) => s,
                _ => unreachable!(),
            };
            // find the subset that generated this meet
            let idx = blocks
                .iter()
                .position(|b| b == restricted)
                .expect("meet comes from a subset block");
            let subset = &subsets[idx];
            let target_premises: Vec<ProofTree> = (0..=n)
                .map(|k| {
                    let full_member = family.member(k).clone();
                    let restricted_member: BTreeSet<Formula> = full_member
                        .intersection(subset)
                        .cloned()
                        .collect();
                    let grow = boxed_join_of_subset(k, &restricted_member, &full_member);
                    let widened = weaken_to(
                        grow,
                        Sequent::new(
                            restricted.iter().cloned(),
                            [formula::boxn(k, or(full_member.iter().cloned()))],
                        ),
                    );
                    ProofTree::node(
                        Rule::AndL {
                            family: BTreeSet::from([restricted.clone()]),
                        },
                        Sequent::new(
                            [m.clone()],
                            [formula::boxn(k, or(full_member.iter().cloned()))],
                        ),
                        vec![widened],
                    )
                })
                .collect();
            // one premise per distinct block member, in set order
            let mut by_member: std::collections::BTreeMap<Formula, ProofTree> =
                std::collections::BTreeMap::new();
            for p in target_premises {
                let f = p.conclusion.succ.iter().next().unwrap().clone();
                by_member.entry(f).or_insert(p);
            }
            let per_member: Vec<ProofTree> = block
                .iter()
                .map(|f| by_member[f].clone())
                .collect();
            ProofTree::node(
                Rule::AndR {
                    family: BTreeSet::from([block.clone()]),
                },
                Sequent::new([m.clone()], [lhs.clone()]),
                per_member,
            )
        })
        .collect();
    let backward = ProofTree::node(
        Rule::OrL {
            family: BTreeSet::from([rhs_set.clone()]),
        },
        Sequent::new([rhs.clone()], [lhs.clone()]),
        backward_premises,
    );
    Equivalence {
        lhs,
        rhs,
        forward,
        backward,
    }
}

fn boxed_join(set: &BTreeSet<Formula>) -> Equivalence {
    let lhs = bx(Formula::Or(set.clone()));
    let subsets = subsets_canonical(set);
    let rhs_set: BTreeSet<Formula> = subsets
        .iter()
        .map(|i| bx(Formula::Or(i.clone())))
        .collect();
    let rhs = Formula::Or(rhs_set.clone());

    // forward: cut through the indexed family with the set at level one
    let family = FormulaFamily {
        prefix: vec![BTreeSet::from([top()]), set.clone()],
        tail: BTreeSet::from([top()]),
    };
    let block = family.notated_block();
    let meet_block = Formula::And(block.clone());

    // left premise: lhs proves the whole block
    let left_premises: Vec<ProofTree> = block
        .iter()
        .map(|member| {
            if *member == lhs {
                return ax(&lhs);
            }
            // member is an iterated box of the unit join
            let mut depth = 0;
            let mut core = member.clone();
            while let Formula::Box(inner) = core {
                depth += 1;
                core = *inner;
            }
            let unit = ProofTree::node(
                Rule::AndR {
                    family: BTreeSet::from([BTreeSet::new()]),
                },
                Sequent::new([], [top()]),
                vec![],
            );
            let join_unit = ProofTree::node(
                Rule::OrR {
                    family: BTreeSet::from([BTreeSet::from([top()])]),
                },
                Sequent::new([], [or([top()])]),
                vec![unit],
            );
            let mut tree = join_unit;
            for k in 0..depth {
                tree = ProofTree::node(
                    Rule::Nec {
                        set: BTreeSet::new(),
                    },
                    Sequent::new([], [formula::boxn(k + 1, or([top()]))]),
                    vec![tree],
                );
            }
            weaken_to(tree, Sequent::new([lhs.clone()], [member.clone()]))
        })
        .collect();
    let left = ProofTree::node(
        Rule::AndR {
            family: BTreeSet::from([block.clone()]),
        },
        Sequent::new([lhs.clone()], [meet_block.clone()]),
        left_premises,
    );

    // right premise: the family rule, then pick the level-one member
    let union = family.union();
    let family_subsets = subsets_canonical(&union);
    let branch_premises: Vec<ProofTree> = family_subsets
        .iter()
        .map(|j| {
            let restricted = family.restrict(j);
            let b = restricted.notated_block();
            let picked = bx(Formula::Or(restricted.member(1).clone()));
            debug_assert!(rhs_set.contains(&picked));
            weaken_to(
                ax(&picked),
                Sequent::new(b.iter().cloned(), rhs_set.iter().cloned()),
            )
        })
        .collect();
    let lf = ProofTree::node(
        Rule::Lf {
            family: family.clone(),
        },
        Sequent::new(block.iter().cloned(), rhs_set.iter().cloned()),
        branch_premises,
    );
    let collect = ProofTree::node(
        Rule::OrR {
            family: BTreeSet::from([rhs_set.clone()]),
        },
        Sequent::new(block.iter().cloned(), [rhs.clone()]),
        vec![lf],
    );
    let right = ProofTree::node(
        Rule::AndL {
            family: BTreeSet::from([block.clone()]),
        },
        Sequent::new([meet_block.clone()], [rhs.clone()]),
        vec![collect],
    );

    let forward = ProofTree::node(
        Rule::Cut {
            set: BTreeSet::from([meet_block.clone()]),
            left: Sequent::new([lhs.clone()], []),
            right: Sequent::new([], [rhs.clone()]),
        },
        Sequent::new([lhs.clone()], [rhs.clone()]),
        vec![left, right],
    );

    // backward: every finite subjoin necessitates into the full join
    let backward_premises: Vec<ProofTree> = rhs_set
        .iter()
        .map(|m| {
            let inner: BTreeSet<Formula> = match m {
                Formula::Box(b) => match b.as_ref() {
                    Formula::Or(i) => i.clone(),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            };
            let grow = join_of_subset(&inner, set);
            ProofTree::node(
                Rule::Nec {
                    set: BTreeSet::from([Formula::Or(inner.clone())]),
                },
                Sequent::new([m.clone()], [lhs.clone()]),
                vec![grow],
            )
        })
        .collect();
    let backward = ProofTree::node(
        Rule::OrL {
            family: BTreeSet::from([rhs_set.clone()]),
        },
        Sequent::new([rhs.clone()], [lhs.clone()]),
        backward_premises,
    );
    Equivalence {
        lhs,
        rhs,
        forward,
        backward,
    }
}

/// Result of discharging the theory from a proof: the rewritten proof is
/// valid without theory axioms and carries finitely many iterated boxes of
/// theory formulas in its antecedent.
#[derive(Clone, Debug)]
pub struct DischargedProof {
    pub proof: ProofTree,
    pub boxed_theory: BTreeSet<Formula>,
}

/// Rewrites a proof in (variables, logic, theory) into one in (variables,
/// logic, no theory) whose end-sequent carries a finite set of iterated
/// boxes of theory axioms on the left. Theory citations become context
/// formulas; necessitation deepens the boxes.
pub fn deduction_transform(
    proof: &ProofTree,
    params: &CalculusParams,
) -> Result<DischargedProof, DeriveError> {
    let (tree, gamma) = transform(proof, params)?;
    Ok(DischargedProof {
        proof: tree,
        boxed_theory: gamma,
    })
}

fn transform(
    node: &ProofTree,
    params: &CalculusParams,
) -> Result<(ProofTree, BTreeSet<Formula>), DeriveError> {
    match &node.rule {
        Rule::Ax => Ok((node.clone(), BTreeSet::new())),
        Rule::TL { set } => {
            let (inner, gamma_inner) = transform(&node.premises[0], params)?;
            let theory_part: BTreeSet<Formula> = set
                .iter()
                .filter(|f| params.theory.contains(*f))
                .cloned()
                .collect();
            let logic_part: BTreeSet<Formula> = set.difference(&theory_part).cloned().collect();
            let mut gamma = gamma_inner;
            gamma.extend(theory_part.iter().cloned());
            let conclusion = Sequent {
                ante: gamma
                    .iter()
                    .cloned()
                    .chain(node.conclusion.ante.iter().cloned())
                    .collect(),
                succ: node.conclusion.succ.clone(),
            };
            if logic_part.is_empty() {
                // the cited set is wholly absorbed into the context
                let target = Sequent {
                    ante: conclusion.ante.clone(),
                    succ: conclusion.succ.clone(),
                };
                Ok((weaken_to(inner, target), gamma))
            } else {
                Ok((
                    ProofTree::node(Rule::TL { set: logic_part }, conclusion, vec![inner]),
                    gamma,
                ))
            }
        }
        Rule::Nec { set } => {
            let (inner, gamma_inner) = transform(&node.premises[0], params)?;
            let new_set: BTreeSet<Formula> =
                set.iter().cloned().chain(gamma_inner.iter().cloned()).collect();
            let widened = weaken_to(
                inner,
                Sequent {
                    ante: new_set.clone(),
                    succ: node.premises[0].conclusion.succ.clone(),
                },
            );
            let gamma: BTreeSet<Formula> = gamma_inner.into_iter().map(bx).collect();
            let phi = node.conclusion.succ.iter().next().unwrap().clone();
            let conclusion = Sequent {
                ante: new_set.iter().cloned().map(bx).collect(),
                succ: BTreeSet::from([phi]),
            };
            Ok((
                ProofTree::node(Rule::Nec { set: new_set }, conclusion, vec![widened]),
                gamma,
            ))
        }
        _ => {
            // context rules: transform premises, pool their boxed-theory
            // sets, weaken every premise into the pooled context
            let mut transformed = Vec::new();
            let mut gamma: BTreeSet<Formula> = BTreeSet::new();
            for p in &node.premises {
                let (t, g) = transform(p, params)?;
                gamma.extend(g);
                transformed.push(t);
            }
            let widened: Vec<ProofTree> = transformed
                .into_iter()
                .zip(&node.premises)
                .map(|(t, original)| {
                    weaken_to(
                        t,
                        Sequent {
                            ante: gamma
                                .iter()
                                .cloned()
                                .chain(original.conclusion.ante.iter().cloned())
                                .collect(),
                            succ: original.conclusion.succ.clone(),
                        },
                    )
                })
                .collect();
            let rule = match &node.rule {
                Rule::Cut { set, left, right } => Rule::Cut {
                    set: set.clone(),
                    left: Sequent {
                        ante: gamma.iter().cloned().chain(left.ante.iter().cloned()).collect(),
                        succ: left.succ.clone(),
                    },
                    right: Sequent {
                        ante: gamma
                            .iter()
                            .cloned()
                            .chain(right.ante.iter().cloned())
                            .collect(),
                        succ: right.succ.clone(),
                    },
                },
                other => other.clone(),
            };
            let conclusion = Sequent {
                ante: gamma
                    .iter()
                    .cloned()
                    .chain(node.conclusion.ante.iter().cloned())
                    .collect(),
                succ: node.conclusion.succ.clone(),
            };
            Ok((ProofTree::node(rule, conclusion, widened), gamma))
        }
    }
}

/// Inverse of [`deduction_transform`]: proves each boxed theory formula
/// from the theory and cuts them away, recovering the original end-sequent
/// in the full calculus.
pub fn discharge_theory(
    discharged: &DischargedProof,
    original_end: &Sequent,
    params: &CalculusParams,
) -> Result<ProofTree, DeriveError> {
    let gamma = &discharged.boxed_theory;
    if gamma.is_empty() {
        return Ok(discharged.proof.clone());
    }
    let mut left_premises = Vec::new();
    for boxed in gamma {
        // peel the boxes down to the theory axiom
        let mut depth = 0;
        let mut core = boxed.clone();
        loop {
            if params.theory.contains(&core) {
                break;
            }
            match core {
                Formula::Box(inner) => {
                    depth += 1;
                    core = *inner;
                }
                other => {
                    core = other;
                    break;
                }
            }
        }
        if !params.theory.contains(&core) {
            return Err(DeriveError::Shape(format!(
                "{boxed} is not an iterated box of a theory axiom"
            )));
        }
        let cite = ProofTree::node(
            Rule::TL {
                set: BTreeSet::from([core.clone()]),
            },
            Sequent::new([], [core.clone()]),
            vec![ax(&core)],
        );
        let mut tree = cite;
        for k in 0..depth {
            tree = ProofTree::node(
                Rule::Nec {
                    set: BTreeSet::new(),
                },
                Sequent::new([], [formula::boxn(k + 1, core.clone())]),
                vec![tree],
            );
        }
        left_premises.push(tree);
    }
    left_premises.push(discharged.proof.clone());
    Ok(ProofTree::node(
        Rule::Cut {
            set: gamma.clone(),
            left: Sequent::new([], []),
            right: original_end.clone(),
        },
        original_end.clone(),
        left_premises,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::formula::var;
    use crate::calculus::proof::{check_proof, table_schemata, CheckOutcome};
    use crate::frame::TableLogic;

    fn k_params() -> CalculusParams {
        CalculusParams::new(
            ["p".to_string(), "q".to_string(), "r".to_string()],
            table_schemata(TableLogic::K),
            [],
        )
    }

    fn assert_checked(eq: &Equivalence) {
        let params = k_params();
        let fwd = check_proof(&eq.forward, &params);
        assert!(fwd.is_accepted(), "forward failed: {fwd:?}");
        let bwd = check_proof(&eq.backward, &params);
        assert!(bwd.is_accepted(), "backward failed: {bwd:?}");
        assert_eq!(
            eq.forward.conclusion,
            Sequent::new([eq.lhs.clone()], [eq.rhs.clone()])
        );
        assert_eq!(
            eq.backward.conclusion,
            Sequent::new([eq.rhs.clone()], [eq.lhs.clone()])
        );
    }

    #[test]
    fn nested_meets_checked() {
        let family: BTreeSet<BTreeSet<Formula>> = BTreeSet::from([
            BTreeSet::from([var("p"), var("q")]),
            BTreeSet::from([var("r")]),
        ]);
        let eq = derive_equivalence(
            EquivalenceVariant::NestedMeets,
            &EquivalenceParams::Family(family),
        )
        .unwrap();
        assert_checked(&eq);
    }

    #[test]
    fn negated_meet_checked() {
        for set in [
            BTreeSet::from([var("p")]),
            BTreeSet::from([var("p"), var("q")]),
            BTreeSet::new(),
        ] {
            let eq = derive_equivalence(
                EquivalenceVariant::NegatedMeet,
                &EquivalenceParams::Set(set),
            )
            .unwrap();
            assert_checked(&eq);
        }
    }

    #[test]
    fn boxed_meet_checked() {
        let set = BTreeSet::from([var("p"), var("q")]);
        let eq =
            derive_equivalence(EquivalenceVariant::BoxedMeet, &EquivalenceParams::Set(set))
                .unwrap();
        assert_checked(&eq);
        // the necessitation node concluding box p, box q => box (p and q)
        // sits inside the backward proof
        fn find_nec(tree: &ProofTree) -> bool {
            matches!(tree.rule, Rule::Nec { .. }) && tree.conclusion.ante.len() == 2
                || tree.premises.iter().any(find_nec)
        }
        assert!(find_nec(&eq.backward));
    }

    #[test]
    fn meet_join_distribution_checked() {
        let family: BTreeSet<BTreeSet<Formula>> = BTreeSet::from([
            BTreeSet::from([var("p"), var("q")]),
            BTreeSet::from([var("r")]),
        ]);
        let eq = derive_equivalence(
            EquivalenceVariant::MeetJoinDistribution,
            &EquivalenceParams::Family(family),
        )
        .unwrap();
        assert_checked(&eq);
    }

    #[test]
    fn family_distribution_checked() {
        let family = FormulaFamily {
            prefix: vec![BTreeSet::from([var("p")])],
            tail: BTreeSet::from([var("p"), var("q")]),
        };
        let eq = derive_equivalence(
            EquivalenceVariant::FamilyDistribution,
            &EquivalenceParams::IndexedFamily(family),
        )
        .unwrap();
        assert_checked(&eq);
    }

    #[test]
    fn boxed_join_checked_and_shaped() {
        let set = BTreeSet::from([var("p"), var("q")]);
        let eq =
            derive_equivalence(EquivalenceVariant::BoxedJoin, &EquivalenceParams::Set(set.clone()))
                .unwrap();
        assert_checked(&eq);
        assert_eq!(eq.lhs, bx(Formula::Or(set.clone())));
        // the right side joins the boxed joins of all four subsets
        match &eq.rhs {
            Formula::Or(members) => {
                assert_eq!(members.len(), 4);
                assert!(members.contains(&bx(Formula::Or(BTreeSet::new()))));
                assert!(members.contains(&bx(Formula::Or(set))));
            }
            other => panic!("unexpected right side {other}"),
        }
    }

    #[test]
    fn deduction_round_trip() {
        // theory axiom cited under one necessitation
        let tau = var("p");
        let params = CalculusParams::new(
            ["p".to_string()],
            table_schemata(TableLogic::K),
            [tau.clone()],
        );
        let cite = ProofTree::node(
            Rule::TL {
                set: BTreeSet::from([tau.clone()]),
            },
            Sequent::new([], [tau.clone()]),
            vec![ax(&tau)],
        );
        let nec = ProofTree::node(
            Rule::Nec {
                set: BTreeSet::new(),
            },
            Sequent::new([], [bx(tau.clone())]),
            vec![cite],
        );
        assert!(check_proof(&nec, &params).is_accepted());

        let discharged = deduction_transform(&nec, &params).unwrap();
        assert_eq!(discharged.boxed_theory, BTreeSet::from([bx(tau.clone())]));
        let theory_free = params.without_theory();
        match check_proof(&discharged.proof, &theory_free) {
            CheckOutcome::Accepted { .. } => {}
            other => panic!("discharged proof rejected: {other:?}"),
        }
        // end-sequent carries the boxed theory on the left
        assert!(discharged
            .proof
            .conclusion
            .ante
            .contains(&bx(tau.clone())));

        let recovered =
            discharge_theory(&discharged, &Sequent::new([], [bx(tau.clone())]), &params).unwrap();
        assert!(check_proof(&recovered, &params).is_accepted());
        assert_eq!(recovered.conclusion, Sequent::new([], [bx(tau)]));
    }

    #[test]
    fn deduction_on_rank_one_citation() {
        let tau = var("p");
        let params = CalculusParams::new(
            ["p".to_string()],
            table_schemata(TableLogic::K),
            [tau.clone()],
        );
        let cite = ProofTree::node(
            Rule::TL {
                set: BTreeSet::from([tau.clone()]),
            },
            Sequent::new([], [tau.clone()]),
            vec![ax(&tau)],
        );
        let discharged = deduction_transform(&cite, &params).unwrap();
        assert_eq!(discharged.boxed_theory, BTreeSet::from([tau.clone()]));
        assert!(check_proof(&discharged.proof, &params.without_theory()).is_accepted());
    }

    #[test]
    fn deduction_identity_without_theory() {
        let params = k_params();
        let set = BTreeSet::from([var("p"), var("q")]);
        let eq = derive_equivalence(
            EquivalenceVariant::BoxedMeet,
            &EquivalenceParams::Set(set),
        )
        .unwrap();
        let discharged = deduction_transform(&eq.forward, &params).unwrap();
        assert!(discharged.boxed_theory.is_empty());
        assert_eq!(discharged.proof, eq.forward);
    }
}
