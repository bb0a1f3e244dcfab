//! The sequent calculus at finite instantiation: formulas, sequents,
//! rule-labelled proof trees, a rule-by-rule checker, proof generators for
//! the standard equivalences and the theory-discharging transform, normal
//! forms, and bounded semantic refutation.

pub mod derive;
pub mod formula;
pub mod normal;
pub mod proof;
pub mod semantics;
pub mod sexpr;

pub use derive::{
    deduction_transform, derive_equivalence, discharge_theory, DischargedProof, Equivalence,
    EquivalenceParams, EquivalenceVariant,
};
pub use formula::{instantiate_schema, matches_schema, Formula, FormulaError};
pub use normal::{normal_form, NormalForm};
pub use proof::{
    check_proof, table_schemata, CalculusParams, CheckOutcome, FormulaFamily, ProofTree,
    Rejection, Rule, Sequent,
};
pub use semantics::{countermodel_search, Countermodel, RefutationOutcome};
pub use sexpr::{parse_formula, print_formula, ParseError, Sexpr};
