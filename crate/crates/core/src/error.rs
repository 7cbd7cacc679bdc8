use crate::ident::Ident;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("type error at `{location}`: expected {expected}, found {found}")]
    TypeError {
        location: String,
        expected: String,
        found: String,
    },
    #[error("unbound variable `{0}`")]
    UnboundVariable(Ident),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("formula is not closed (free: {0})")]
    NotClosed(String),
    #[error("formula does not have sort prop")]
    NotProp,
    #[error("term does not have sort unit")]
    NotUnit,
    #[error("order too high: {0}")]
    OrderTooHigh(String),
    #[error("equation system is not recursion-free (cycle through `{0}`)")]
    NotRecursionFree(Ident),
    #[error("formula is not disjunctive: {0}")]
    NotDisjunctive(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("grammar violation at `{0}`")]
    GrammarViolation(String),
    #[error("system is not normalized: {0}")]
    NotNormalized(String),
    #[error("tuple escapes argument position: {0}")]
    HigherOrderTupleEscape(String),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("{line}:{col}: parse error: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn type_error(
        location: impl ToString,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        let mut location = location.to_string();
        if location.len() > 120 {
            let mut cut = 117;
            while !location.is_char_boundary(cut) {
                cut -= 1;
            }
            location.truncate(cut);
            location.push_str("...");
        }
        Error::TypeError {
            location,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
