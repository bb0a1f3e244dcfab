//! Set-based modal formulas.
//!
//! Conjunction and disjunction apply to canonical sets of formulas, so
//! structural equality is set equality. The star modality stands for the
//! meet of all iterated boxes of its argument; it exists for semantic
//! evaluation and is rejected by the proof rules and the normal-form
//! construction, which only handle finitely presented connectives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(String),
    Neg(Box<Formula>),
    Box(Box<Formula>),
    And(BTreeSet<Formula>),
    Or(BTreeSet<Formula>),
    /// Meet of all iterated boxes of the argument.
    BoxStar(Box<Formula>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("unbound metavariable {0}")]
    UnboundMetavariable(String),
    #[error("operation not defined on star-modality formulas")]
    UnsupportedStar,
    #[error("expansion too large: {0}")]
    SizeGuard(String),
}

pub fn var(name: impl Into<String>) -> Formula {
    Formula::Var(name.into())
}

pub fn neg(f: Formula) -> Formula {
    Formula::Neg(Box::new(f))
}

pub fn bx(f: Formula) -> Formula {
    Formula::Box(Box::new(f))
}

pub fn boxstar(f: Formula) -> Formula {
    Formula::BoxStar(Box::new(f))
}

pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
    Formula::And(fs.into_iter().collect())
}

pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
    Formula::Or(fs.into_iter().collect())
}

pub fn top() -> Formula {
    Formula::And(BTreeSet::new())
}

pub fn bot() -> Formula {
    Formula::Or(BTreeSet::new())
}

/// Diamond as its defining abbreviation: the negated box of the negation.
pub fn dia(f: Formula) -> Formula {
    neg(bx(neg(f)))
}

/// Implication as the disjunction of the negated antecedent and the
/// consequent.
pub fn imp(a: Formula, b: Formula) -> Formula {
    or([neg(a), b])
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    and([imp(a.clone(), b.clone()), imp(b, a)])
}

pub fn boxn(n: usize, f: Formula) -> Formula {
    let mut out = f;
    for _ in 0..n {
        out = bx(out);
    }
    out
}

impl Formula {
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(x) => {
                out.insert(x.clone());
            }
            Formula::Neg(f) | Formula::Box(f) | Formula::BoxStar(f) => f.collect_variables(out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_variables(out);
                }
            }
        }
    }

    pub fn contains_star(&self) -> bool {
        match self {
            Formula::Var(_) => false,
            Formula::BoxStar(_) => true,
            Formula::Neg(f) | Formula::Box(f) => f.contains_star(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.contains_star()),
        }
    }

    /// Simultaneous substitution of variables by formulas. Variables
    /// without a binding are left in place.
    pub fn substitute(&self, subst: &BTreeMap<String, Formula>) -> Formula {
        match self {
            Formula::Var(x) => subst.get(x).cloned().unwrap_or_else(|| self.clone()),
            Formula::Neg(f) => neg(f.substitute(subst)),
            Formula::Box(f) => bx(f.substitute(subst)),
            Formula::BoxStar(f) => boxstar(f.substitute(subst)),
            Formula::And(fs) => and(fs.iter().map(|f| f.substitute(subst))),
            Formula::Or(fs) => or(fs.iter().map(|f| f.substitute(subst))),
        }
    }

    /// Number of AST nodes; used by size guards.
    pub fn node_count(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::Neg(f) | Formula::Box(f) | Formula::BoxStar(f) => 1 + f.node_count(),
            Formula::And(fs) | Formula::Or(fs) => {
                1 + fs.iter().map(|f| f.node_count()).sum::<usize>()
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(x) => write!(f, "(var {x})"),
            Formula::Neg(inner) => write!(f, "(not {inner})"),
            Formula::Box(inner) => write!(f, "(box {inner})"),
            Formula::BoxStar(inner) => write!(f, "(boxstar {inner})"),
            Formula::And(fs) => {
                write!(f, "(and")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Formula::Or(fs) => {
                write!(f, "(or")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Substitutes all metavariables of a schema, requiring totality.
pub fn instantiate_schema(
    schema: &Formula,
    subst: &BTreeMap<String, Formula>,
) -> Result<Formula, FormulaError> {
    for v in schema.variables() {
        if !subst.contains_key(&v) {
            return Err(FormulaError::UnboundMetavariable(v));
        }
    }
    Ok(schema.substitute(subst))
}

/// Syntactic matching of a formula against a schema whose variables are
/// metavariables. Returns a substitution on success. Set connectives admit
/// merging instantiations, so matching backtracks over assignments of
/// schema-set members onto subject-set members.
pub fn matches_schema(subject: &Formula, schema: &Formula) -> Option<BTreeMap<String, Formula>> {
    let mut subst = BTreeMap::new();
    if match_into(subject, schema, &mut subst) {
        Some(subst)
    } else {
        None
    }
}

fn match_into(
    subject: &Formula,
    schema: &Formula,
    subst: &mut BTreeMap<String, Formula>,
) -> bool {
    match schema {
        Formula::Var(m) => match subst.get(m) {
            Some(bound) => bound == subject,
            None => {
                subst.insert(m.clone(), subject.clone());
                true
            }
        },
        Formula::Neg(s) => matches!(subject, Formula::Neg(f) if match_into(f, s, subst)),
        Formula::Box(s) => matches!(subject, Formula::Box(f) if match_into(f, s, subst)),
        Formula::BoxStar(s) => {
            matches!(subject, Formula::BoxStar(f) if match_into(f, s, subst))
        }
        Formula::And(ss) => match subject {
            Formula::And(fs) => match_sets(fs, ss, subst),
            _ => false,
        },
        Formula::Or(ss) => match subject {
            Formula::Or(fs) => match_sets(fs, ss, subst),
            _ => false,
        },
    }
}

/// Every schema member must match some subject member and the instantiated
/// schema set must cover the subject set exactly.
fn match_sets(
    subject: &BTreeSet<Formula>,
    schema: &BTreeSet<Formula>,
    subst: &mut BTreeMap<String, Formula>,
) -> bool {
    let schema_vec: Vec<&Formula> = schema.iter().collect();
    let subject_vec: Vec<&Formula> = subject.iter().collect();
    fn assign(
        i: usize,
        schema_vec: &[&Formula],
        subject_vec: &[&Formula],
        subject: &BTreeSet<Formula>,
        subst: &mut BTreeMap<String, Formula>,
    ) -> bool {
        if i == schema_vec.len() {
            // check exact coverage under the final substitution
            let covered: BTreeSet<Formula> = schema_vec
                .iter()
                .map(|s| s.substitute(subst))
                .collect();
            return covered == *subject;
        }
        for cand in subject_vec {
            let saved = subst.clone();
            if match_into(cand, schema_vec[i], subst)
                && assign(i + 1, schema_vec, subject_vec, subject, subst)
            {
                return true;
            }
            *subst = saved;
        }
        false
    }
    if schema.is_empty() {
        return subject.is_empty();
    }
    assign(0, &schema_vec, &subject_vec, subject, subst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_deduplicate() {
        let a = and([var("p"), var("p")]);
        let b = and([var("p")]);
        assert_eq!(a, b);
        assert_eq!(top(), and([]));
        assert_ne!(top(), bot());
    }

    #[test]
    fn dia_is_defined_notation() {
        assert_eq!(dia(var("x")), neg(bx(neg(var("x")))));
    }

    #[test]
    fn schema_instantiation() {
        // transitivity schema with the metavariable sent to a diamond
        let schema = imp(bx(var("p")), bx(bx(var("p"))));
        let subst: BTreeMap<String, Formula> = [("p".to_string(), dia(var("x")))].into();
        let inst = instantiate_schema(&schema, &subst).unwrap();
        assert_eq!(inst, imp(bx(dia(var("x"))), bx(bx(dia(var("x"))))));

        let idsub: BTreeMap<String, Formula> = [("p".to_string(), var("p"))].into();
        assert_eq!(instantiate_schema(&schema, &idsub).unwrap(), schema);

        assert_eq!(
            instantiate_schema(&schema, &BTreeMap::new()),
            Err(FormulaError::UnboundMetavariable("p".into()))
        );
    }

    #[test]
    fn schema_matching() {
        let schema = imp(bx(var("p")), bx(bx(var("p"))));
        let subject = imp(bx(and([var("x"), var("y")])), bx(bx(and([var("x"), var("y")]))));
        let subst = matches_schema(&subject, &schema).unwrap();
        assert_eq!(subst[&"p".to_string()], and([var("x"), var("y")]));
        // a non-instance fails
        let wrong = imp(bx(var("x")), bx(bx(var("y"))));
        assert!(matches_schema(&wrong, &schema).is_none());
    }

    #[test]
    fn schema_matching_merged_sets() {
        // a two-element schema set may collapse onto a singleton subject
        let schema = or([var("p"), var("q")]);
        let subject = or([var("x")]);
        let subst = matches_schema(&subject, &schema).unwrap();
        assert_eq!(subst[&"p".to_string()], var("x"));
        assert_eq!(subst[&"q".to_string()], var("x"));
    }
}
