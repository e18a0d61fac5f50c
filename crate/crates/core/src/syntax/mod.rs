//! Concepts, axioms, knowledge bases and queries, with their parsers and
//! canonical forms.

mod canon;
mod concept;
mod kb;
mod nnf;
mod parse;
mod query;

pub use canon::canonicalize_cq;
pub use concept::{Concept, RoleConjunction};
pub use kb::{Axiom, KnowledgeBase};
pub use nnf::{closure, closure_of, internalise, nnf, NnfConcept};
pub use parse::{parse_axioms, parse_concept, parse_cq, parse_kb, parse_ucq};
pub use query::{ConceptAtom, ConjunctiveQuery, RoleAtom, Ucq, Var};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("the knowledge base has no assertions")]
    EmptyABox,
    #[error("a query disjunct has no atoms")]
    EmptyQuery,
}
