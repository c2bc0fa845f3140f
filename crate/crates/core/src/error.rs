use thiserror::Error;

use crate::element::Element;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element {0} does not belong to the group")]
    NotInGroup(Element),

    #[error("index {index} out of range for a group of order {order}")]
    IndexOutOfRange { index: u64, order: u64 },

    #[error("closure exceeds bound {bound}")]
    ClosureExceedsBound { bound: usize },

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("element {0} lies outside the filtration chain")]
    ElementOutsideChain(Element),

    #[error("transversal at level {level} does not peel {element}")]
    TransversalMismatch { level: usize, element: Element },

    #[error("no fresh witness in base set {base}{} within {probes} probes", stage.map(|s| format!(" at stage {s}")).unwrap_or_default())]
    WitnessSearchExhausted {
        base: usize,
        stage: Option<usize>,
        probes: usize,
    },

    #[error("{operation}: candidate search exhausted after {probes} probes")]
    SearchExhausted { operation: &'static str, probes: usize },

    #[error("{operation}: filter accepted {candidate} but the oracle rejected it")]
    FilterOracleMismatch {
        operation: &'static str,
        candidate: Element,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid group definition: {0}")]
    InvalidGroup(String),

    #[error("cannot parse element {text:?}: {reason}")]
    ParseElement { text: String, reason: String },
}

impl Error {
    /// True for errors raised when a candidate stream runs dry.
    pub fn is_search_exhausted(&self) -> bool {
        matches!(
            self,
            Error::SearchExhausted { .. } | Error::WitnessSearchExhausted { .. }
        )
    }

    /// Stable variant name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotInGroup(_) => "NotInGroup",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ClosureExceedsBound { .. } => "ClosureExceedsBound",
            Error::NotSubgroup(_) => "NotSubgroup",
            Error::ElementOutsideChain(_) => "ElementOutsideChain",
            Error::TransversalMismatch { .. } => "TransversalMismatch",
            Error::WitnessSearchExhausted { .. } => "WitnessSearchExhausted",
            Error::SearchExhausted { .. } => "SearchExhausted",
            Error::FilterOracleMismatch { .. } => "FilterOracleMismatch",
            Error::Precondition(_) => "Precondition",
            Error::InvalidGroup(_) => "InvalidGroup",
            Error::ParseElement { .. } => "ParseElement",
        }
    }
}
