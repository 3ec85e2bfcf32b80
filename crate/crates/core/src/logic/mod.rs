//! Many-sorted first-order logic with equality: terms, formulas, signatures,
//! substitution, normal forms and a propositional evaluator.

mod cnf;
mod eval;
mod formula;
mod signature;
mod subst;
mod term;

pub use cnf::to_cnf;
pub use eval::{eval_clauses, eval_propositional, Valuation};
pub use formula::{Clause, Formula, Quantifier};
pub use signature::Signature;
pub use subst::{rename_apart, substitute, substitute_term, to_prenex, universal_closure};
pub use term::{Constant, FunSym, FunctionSort, Sort, Term, Var};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("sort mismatch in `{term}`: expected {expected}, found {actual}")]
    SortMismatch {
        term: String,
        expected: String,
        actual: String,
    },
    #[error("symbol `{0}` is already declared")]
    DuplicateSymbol(String),
    #[error("identifier `{0}` uses the reserved `_` prefix")]
    ReservedName(String),
    #[error("no truth value assigned to atom `{0}`")]
    UnassignedAtom(String),
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
}
