//! Bounded semantic refutation: valuation search over a frame catalog,
//! filtered by the theory and by logical-axiom instances.

use std::collections::BTreeSet;

use thiserror::Error;

use super::formula::{instantiate_schema, Formula};
use super::proof::{CalculusParams, Sequent};
use crate::algebra::{eval, powerset_algebra, AlgebraError, Elem, PowersetAlgebra, Valuation};
use crate::frame::{Frame, PointId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("valuation space too large: {0}")]
    SizeGuard(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefutationOutcome {
    ValidOnCatalog,
    Countermodel(Countermodel),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub frame_index: usize,
    pub frame: Frame,
    pub valuation: Valuation,
    /// Least point where the antecedent meet escapes the succedent join.
    pub witness_point: PointId,
}

pub const DEFAULT_VALUATION_GUARD: usize = 4_000_000;

/// Enumerates every valuation on every catalog frame in lexicographic
/// order, keeps those satisfying the theory and the relevant logical-axiom
/// instances, and reports the first valuation refuting the sequent.
///
/// Logical axioms are instantiated over a finite pool: the subformulas of
/// the sequent and the theory, the variables, and the two constants;
/// `instantiation_depth` additionally closes the pool under negation and
/// box that many times. On catalog frames belonging to the logic's own
/// class the filter is vacuous.
pub fn countermodel_search(
    sequent: &Sequent,
    params: &CalculusParams,
    catalog: &[Frame],
    instantiation_depth: usize,
    guard: usize,
) -> Result<RefutationOutcome, SemanticsError> {
    let mut vars: BTreeSet<String> = sequent.variables();
    for t in &params.theory {
        vars.extend(t.variables());
    }
    let pool = instance_pool(sequent, params, instantiation_depth);
    let axioms = instantiated_axioms(params, &pool);
    for (frame_index, frame) in catalog.iter().enumerate() {
        let algebra = powerset_algebra(frame)?;
        let n = frame.size();
        let space = 2f64.powi(n as i32).powi(vars.len() as i32);
        if space > guard as f64 {
            return Err(SemanticsError::SizeGuard(format!(
                "(2^{n})^{} valuations exceed the guard of {guard}",
                vars.len()
            )));
        }
        let var_list: Vec<String> = vars.iter().cloned().collect();
        let mut masks: Vec<Elem> = vec![0; var_list.len()];
        loop {
            let valuation = Valuation::new(
                var_list
                    .iter()
                    .cloned()
                    .zip(masks.iter().copied())
                    .collect(),
            );
            if admissible(&algebra, &valuation, params, &axioms)? {
                if let Some(witness) = refutes(&algebra, &valuation, sequent)? {
                    return Ok(RefutationOutcome::Countermodel(Countermodel {
                        frame_index,
                        frame: frame.clone(),
                        valuation,
                        witness_point: witness,
                    }));
                }
            }
            // next valuation, last variable fastest
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
            if masks.iter().all(|&m| m == 0) {
                break;
            }
            if var_list.is_empty() {
                break;
            }
        }
    }
    Ok(RefutationOutcome::ValidOnCatalog)
}

fn admissible(
    algebra: &PowersetAlgebra,
    valuation: &Valuation,
    params: &CalculusParams,
    axioms: &[Formula],
) -> Result<bool, SemanticsError> {
    for t in &params.theory {
        if eval(algebra, valuation, t)? != algebra.top() {
            return Ok(false);
        }
    }
    for a in axioms {
        // instances may mention pool variables absent from the valuation;
        // those cannot constrain this search and are skipped
        if !a
            .variables()
            .iter()
            .all(|v| valuation.get(v).is_some())
        {
            continue;
        }
        if eval(algebra, valuation, a)? != algebra.top() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn refutes(
    algebra: &PowersetAlgebra,
    valuation: &Valuation,
    sequent: &Sequent,
) -> Result<Option<PointId>, SemanticsError> {
    let mut ante = algebra.top();
    for f in &sequent.ante {
        ante &= eval(algebra, valuation, f)?;
    }
    let mut succ = algebra.bot();
    for f in &sequent.succ {
        succ |= eval(algebra, valuation, f)?;
    }
    let escape = ante & !succ;
    if escape == 0 {
        return Ok(None);
    }
    let points = algebra.points_from_mask(escape);
    Ok(points.into_iter().next())
}

fn instance_pool(
    sequent: &Sequent,
    params: &CalculusParams,
    depth: usize,
) -> Vec<Formula> {
    let mut pool: BTreeSet<Formula> = BTreeSet::new();
    for f in sequent.ante.iter().chain(sequent.succ.iter()) {
        collect_subformulas(f, &mut pool);
    }
    for f in &params.theory {
        collect_subformulas(f, &mut pool);
    }
    pool.insert(Formula::And(BTreeSet::new()));
    pool.insert(Formula::Or(BTreeSet::new()));
    for _ in 0..depth {
        let mut next = pool.clone();
        for f in &pool {
            next.insert(super::formula::neg(f.clone()));
            next.insert(super::formula::bx(f.clone()));
        }
        pool = next;
    }
    pool.into_iter().collect()
}

fn collect_subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    out.insert(f.clone());
    match f {
        Formula::Var(_) => {}
        Formula::Neg(inner) | Formula::Box(inner) | Formula::BoxStar(inner) => {
            collect_subformulas(inner, out)
        }
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                collect_subformulas(g, out);
            }
        }
    }
}

fn instantiated_axioms(params: &CalculusParams, pool: &[Formula]) -> Vec<Formula> {
    let mut out = Vec::new();
    for schema in &params.logic {
        let metavars: Vec<String> = schema.variables().into_iter().collect();
        if metavars.is_empty() {
            out.push(schema.clone());
            continue;
        }
        if pool.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; metavars.len()];
        loop {
            let subst = metavars
                .iter()
                .cloned()
                .zip(idx.iter().map(|&i| pool[i].clone()))
                .collect();
            if let Ok(inst) = instantiate_schema(schema, &subst) {
                out.push(inst);
            }
            let mut k = 0;
            loop {
                if k == metavars.len() {
                    return out;
                }
                idx[k] += 1;
                if idx[k] < pool.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == metavars.len() {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::formula::*;
    use crate::calculus::proof::table_schemata;
    use crate::fixtures::*;
    use crate::frame::TableLogic;

    fn k_params() -> CalculusParams {
        CalculusParams::new(["x".to_string()], table_schemata(TableLogic::K), [])
    }

    #[test]
    fn tautologies_are_valid() {
        let seq = Sequent::new([var("x")], [var("x")]);
        let outcome = countermodel_search(
            &seq,
            &k_params(),
            &[fan_cycle_frame(), point_frame()],
            0,
            100_000,
        )
        .unwrap();
        assert_eq!(outcome, RefutationOutcome::ValidOnCatalog);
    }

    #[test]
    fn seriality_holds_on_the_fan_cycle() {
        // every point of the fan cycle has a successor
        let seq = Sequent::new([], [dia(top())]);
        let outcome =
            countermodel_search(&seq, &k_params(), &[fan_cycle_frame()], 0, 100_000).unwrap();
        assert_eq!(outcome, RefutationOutcome::ValidOnCatalog);
    }

    #[test]
    fn reflexivity_fails_on_a_chain() {
        let chain = Frame::new([0, 1], [(0, 1)]).unwrap();
        let seq = Sequent::new([], [imp(bx(var("x")), var("x"))]);
        match countermodel_search(&seq, &k_params(), &[chain], 0, 100_000).unwrap() {
            RefutationOutcome::Countermodel(cm) => {
                assert_eq!(cm.valuation.get("x"), Some(0), "first valuation refutes");
                assert_eq!(cm.witness_point, 1, "the endpoint satisfies box x vacuously");
            }
            other => panic!("expected countermodel, got {other:?}"),
        }
    }

    #[test]
    fn theory_filter_restricts_valuations() {
        // theory forces x to hold everywhere, making x valid
        let params = CalculusParams::new(
            ["x".to_string()],
            table_schemata(TableLogic::K),
            [var("x")],
        );
        let seq = Sequent::new([], [var("x")]);
        let outcome =
            countermodel_search(&seq, &params, &[fan_cycle_frame()], 0, 100_000).unwrap();
        assert_eq!(outcome, RefutationOutcome::ValidOnCatalog);
    }

    #[test]
    fn schema_filter_uses_instances() {
        // on a transitive catalog the four axiom filter is vacuous, and the
        // four axiom itself is valid
        let params = CalculusParams::new(
            ["x".to_string()],
            table_schemata(TableLogic::K4),
            [],
        );
        let chain = Frame::new([0, 1, 2], [(0, 1), (1, 2), (0, 2)]).unwrap();
        let seq = Sequent::new([], [imp(bx(var("x")), bx(bx(var("x"))))]);
        let outcome = countermodel_search(&seq, &params, &[chain], 1, 1_000_000).unwrap();
        assert_eq!(outcome, RefutationOutcome::ValidOnCatalog);
    }
}
