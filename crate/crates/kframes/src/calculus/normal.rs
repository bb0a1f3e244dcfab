//! Normal forms: every star-free formula reduces to a meet of joins of
//! box-bounded formulas, by structural induction through the standard
//! equivalences. Negation pushes through choice functions, box through
//! finite subjoins, meets flatten, and joins reduce to negated meets.
//!
//! The choice-function expansion of a negation is computed pairwise over
//! the family with absorption after every merge, which keeps the
//! intermediate families at their minimal antichains instead of
//! materializing the full product.

use std::collections::BTreeSet;

use super::formula::{Formula, FormulaError};

/// A family of formula sets standing for the meet of the joins of its
/// members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub family: BTreeSet<BTreeSet<Formula>>,
}

impl NormalForm {
    /// The meet-of-joins formula the family denotes.
    pub fn reassemble(&self) -> Formula {
        Formula::And(
            self.family
                .iter()
                .map(|s| join_of(s.clone()))
                .collect(),
        )
    }

    pub fn cell_count(&self) -> usize {
        self.family.iter().map(|s| s.len().max(1)).sum()
    }
}

/// Output formulas stay tidy: double negations collapse and singleton
/// joins flatten to their member.
fn negate(f: Formula) -> Formula {
    match f {
        Formula::Neg(inner) => *inner,
        other => Formula::Neg(Box::new(other)),
    }
}

fn join_of(set: BTreeSet<Formula>) -> Formula {
    if set.len() == 1 {
        set.into_iter().next().unwrap()
    } else {
        Formula::Or(set)
    }
}

const DEFAULT_CELL_GUARD: usize = 1_000_000;

pub fn normal_form(f: &Formula) -> Result<NormalForm, FormulaError> {
    normal_form_guarded(f, DEFAULT_CELL_GUARD)
}

pub fn normal_form_guarded(f: &Formula, guard: usize) -> Result<NormalForm, FormulaError> {
    if f.contains_star() {
        return Err(FormulaError::UnsupportedStar);
    }
    let family = build(f, guard)?;
    Ok(NormalForm { family })
}

type Family = BTreeSet<BTreeSet<Formula>>;

fn cells(family: &Family) -> usize {
    family.iter().map(|s| s.len().max(1)).sum()
}

fn guard_cells(family: &Family, guard: usize) -> Result<(), FormulaError> {
    let n = cells(family);
    if n > guard {
        return Err(FormulaError::SizeGuard(format!(
            "normal form grew to {n} cells"
        )));
    }
    Ok(())
}

/// Drops units and decides trivial joins, then keeps only the minimal sets:
/// a join over a subset lies below the join over a superset, so supersets
/// add nothing to the meet.
fn simplify(family: Family) -> Family {
    let mut cleaned: Vec<BTreeSet<Formula>> = Vec::new();
    for mut set in family {
        set.remove(&Formula::Or(BTreeSet::new()));
        // a member paired with its negation makes the join a unit
        let has_unit = set.contains(&Formula::And(BTreeSet::new()))
            || set
                .iter()
                .any(|f| set.contains(&negate(f.clone())));
        if has_unit {
            continue;
        }
        if set.is_empty() {
            // a bottom join collapses the whole meet
            return Family::from([BTreeSet::new()]);
        }
        cleaned.push(set);
    }
    let mut out = Family::new();
    'outer: for (i, set) in cleaned.iter().enumerate() {
        for (j, other) in cleaned.iter().enumerate() {
            if i != j && (other.is_subset(set) && (other.len() < set.len() || j < i)) {
                continue 'outer;
            }
        }
        out.insert(set.clone());
    }
    out
}

/// Join of two meets-of-joins: distribute into the meet of pairwise unions.
fn or_families(left: &Family, right: &Family, guard: usize) -> Result<Family, FormulaError> {
    if left.len().saturating_mul(right.len()) > guard {
        return Err(FormulaError::SizeGuard(format!(
            "{} joined sets in a disjunction step",
            left.len() * right.len()
        )));
    }
    let mut out = Family::new();
    for a in left {
        for b in right {
            out.insert(a.union(b).cloned().collect());
        }
    }
    Ok(simplify(out))
}

fn build(f: &Formula, guard: usize) -> Result<Family, FormulaError> {
    let out = match f {
        Formula::Var(_) => Family::from([BTreeSet::from([f.clone()])]),
        Formula::Neg(inner) => negate_family(&build(inner, guard)?, guard)?,
        Formula::Box(inner) => box_family(&build(inner, guard)?, guard)?,
        Formula::And(members) => {
            let mut family = Family::new();
            for m in members {
                family.extend(build(m, guard)?);
            }
            simplify(family)
        }
        Formula::Or(members) => {
            // a join is the negated meet of the negations
            let mut negated = Family::new();
            for m in members {
                negated.extend(negate_family(&build(m, guard)?, guard)?);
            }
            negate_family(&simplify(negated), guard)?
        }
        Formula::BoxStar(_) => return Err(FormulaError::UnsupportedStar),
    };
    guard_cells(&out, guard)?;
    Ok(out)
}

/// The choice-function expansion of a negated meet of joins, one merge per
/// member set: negating a single join gives the singletons of the negated
/// members, and the sets disjoin pairwise.
fn negate_family(family: &Family, guard: usize) -> Result<Family, FormulaError> {
    // the empty meet is a unit, so its negation is the bottom join
    let mut acc = Family::from([BTreeSet::new()]);
    for set in family {
        let negated: Family = set
            .iter()
            .map(|f| BTreeSet::from([negate(f.clone())]))
            .collect();
        acc = or_families(&acc, &negated, guard)?;
        guard_cells(&acc, guard)?;
    }
    Ok(acc)
}

/// Boxes distribute over the meet and approximate each join by its finite
/// subjoins.
fn box_family(family: &Family, guard: usize) -> Result<Family, FormulaError> {
    let mut out = Family::new();
    for set in family {
        if set.len() > 20 || (1usize << set.len()) > guard {
            return Err(FormulaError::SizeGuard(format!(
                "2^{} subjoins in a box step",
                set.len()
            )));
        }
        let items: Vec<&Formula> = set.iter().collect();
        let mut boxed = BTreeSet::new();
        for mask in 0u64..(1 << items.len()) {
            let subset: BTreeSet<Formula> = items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, f)| (*f).clone())
                .collect();
            boxed.insert(Formula::Box(Box::new(join_of(subset))));
        }
        out.insert(boxed);
    }
    Ok(simplify(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{eval, powerset_algebra, Valuation};
    use crate::calculus::formula::*;
    use crate::fixtures::*;

    #[test]
    fn base_cases() {
        let nf = normal_form(&var("p")).unwrap();
        assert_eq!(nf.family, BTreeSet::from([BTreeSet::from([var("p")])]));

        let nf = normal_form(&neg(var("p"))).unwrap();
        assert_eq!(
            nf.family,
            BTreeSet::from([BTreeSet::from([neg(var("p"))])])
        );
    }

    #[test]
    fn boxed_join_expands_subjoins() {
        let nf = normal_form(&bx(or([var("p"), var("q")]))).unwrap();
        let expect: BTreeSet<Formula> = BTreeSet::from([
            bx(bot()),
            bx(var("p")),
            bx(var("q")),
            bx(or([var("p"), var("q")])),
        ]);
        assert_eq!(nf.family, BTreeSet::from([expect]));
    }

    #[test]
    fn star_is_rejected() {
        assert_eq!(
            normal_form(&boxstar(var("p"))),
            Err(FormulaError::UnsupportedStar)
        );
    }

    #[test]
    fn absorption_keeps_minimal_sets() {
        // (p or q) and p normalizes to just p
        let f = and([or([var("p"), var("q")]), var("p")]);
        let nf = normal_form(&f).unwrap();
        assert_eq!(nf.family, BTreeSet::from([BTreeSet::from([var("p")])]));
    }

    #[test]
    fn constants_collapse() {
        let nf = normal_form(&neg(top())).unwrap();
        assert_eq!(nf.family, BTreeSet::from([BTreeSet::new()]));
        let nf = normal_form(&or([var("p"), neg(var("p"))])).unwrap();
        assert!(nf.family.is_empty(), "a unit join clears the family");
    }

    #[test]
    fn reassembly_is_semantically_equal() {
        let frames = [fan_cycle_frame(), looped_pair_frame(), point_frame()];
        let formulas = [
            var("p"),
            imp(var("p"), var("q")),
            bx(or([var("p"), var("q")])),
            dia(and([var("p"), neg(var("q"))])),
            or([bx(var("p")), neg(bx(var("q")))]),
            iff(var("p"), bx(var("q"))),
            or([
                or([neg(var("p")), and([bx(var("p")), var("q")])]),
                or([bx(or([var("p"), neg(var("q"))])), and([var("p"), bx(var("q"))])]),
            ]),
        ];
        for frame in &frames {
            let alg = powerset_algebra(frame).unwrap();
            for f in &formulas {
                let nf = normal_form(f).unwrap();
                let re = nf.reassemble();
                let n = frame.size() as u32;
                for p_mask in 0..(1u64 << n) {
                    for q_mask in 0..(1u64 << n) {
                        let val = Valuation::default().bind("p", p_mask).bind("q", q_mask);
                        assert_eq!(
                            eval(&alg, &val, f).unwrap(),
                            eval(&alg, &val, &re).unwrap(),
                            "mismatch for {f} on {frame:?}"
                        );
                    }
                }
            }
        }
    }
}
