//! Decision procedure for (unions of) conjunctive query entailment over
//! ALC^∩ knowledge bases, built on super-spoilers: queries are rolled up into
//! concepts, forks are rewritten away, matches are abstracted by splittings,
//! and each way of blocking all splittings is tested for satisfiability.

pub mod syntax;
pub mod semantics;
pub mod unravel;
pub mod rollup;
pub mod forkrew;
pub mod splitting;
pub mod spoiler;
pub mod satcheck;
pub mod engine;
