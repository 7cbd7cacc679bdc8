//! Order-shifting translations for μHFL(Z), the least-fixpoint higher-order
//! fixpoint logic with integers.
//!
//! * [`todisj`]: order-n formulas to order-(n+1) disjunctive formulas.
//! * [`fromdisj`]: order-(n+1) disjunctive equation systems to order-n systems.
//! * [`semantics`]: reduction-search and Kleene-iteration oracles.
//! * [`eqsys`] / [`normalize`]: equation systems and the normalization pipeline.
//! * [`frontend`]: reachability-game terms and their translation to formulas.

pub mod cli;
pub mod eqsys;
pub mod error;
pub mod formula;
pub mod frontend;
pub mod fromdisj;
pub mod ident;
pub mod normalize;
pub mod parse;
pub mod print;
pub mod semantics;
pub mod sort;
pub mod surface;
pub mod todisj;
pub mod typeck;

pub use eqsys::{Definition, EquationSystem, Param};
pub use error::{Error, Result};
pub use formula::{alpha_eq, is_disjunctive, order_of_formula, Arg, Formula, IntExpr};
pub use ident::Ident;
pub use semantics::{SearchBudget, Verdict};
pub use sort::Sort;
pub use typeck::{typecheck, SimpleTypeEnv};
