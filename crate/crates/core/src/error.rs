use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Edge probability outside `(0, 1]`.
    InvalidProbability { src: u32, dst: u32, p: f64 },
    /// Edge without a probability while weighted cascade is off.
    MissingProbability { src: u32, dst: u32 },
    NodeOutOfRange { node: u32, n: usize },
    /// Budget larger than the node count, or zero where a positive one is needed.
    InvalidBudget { k: usize, n: usize },
    InvalidParameter(&'static str),
    /// Schedule touches a round beyond the horizon, or exceeds the per-round budget.
    InfeasibleSchedule(&'static str),
    /// Enumeration would need `2^needed` states, above the allowed `2^cap`.
    EnumerationCap { needed: usize, cap: usize },
    /// Exhaustive search space larger than the allowed number of candidates.
    SearchSpaceTooLarge { candidates: u128, cap: u128 },
    EmptyStore,
    /// Every node is already active, so no root is left for weighted sampling.
    NoValidRoot,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidProbability { src, dst, p } => {
                write!(f, "edge ({src},{dst}) has probability {p} outside (0,1]")
            }
            Error::MissingProbability { src, dst } => write!(
                f,
                "edge ({src},{dst}) has no probability and weighted cascade is off"
            ),
            Error::NodeOutOfRange { node, n } => {
                write!(f, "node {node} out of range for graph with {n} nodes")
            }
            Error::InvalidBudget { k, n } => write!(f, "budget {k} is infeasible for {n} nodes"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::InfeasibleSchedule(what) => write!(f, "infeasible schedule: {what}"),
            Error::EnumerationCap { needed, cap } => write!(
                f,
                "enumeration needs 2^{needed} states, cap is 2^{cap}"
            ),
            Error::SearchSpaceTooLarge { candidates, cap } => write!(
                f,
                "search space has {candidates} candidates, cap is {cap}"
            ),
            Error::EmptyStore => f.write_str("sample store is empty"),
            Error::NoValidRoot => f.write_str("no inactive node left to root a sample"),
        }
    }
}

impl core::error::Error for Error {}
