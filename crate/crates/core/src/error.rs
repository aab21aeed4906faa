use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("series caps differ: (D={0}, N={1}) vs (D={2}, N={3})")]
    CapMismatch(u32, u32, u32, u32),
    #[error("descendent index {index} exceeds cap {cap}")]
    DescendentCap { index: u32, cap: u32 },
    #[error("exponential needs a series without (t,s)-degree 0 terms")]
    ConstantTerm,
    #[error("operator index {0} is below -1")]
    OperatorIndex(i32),
    #[error("{0}")]
    Domain(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("label {0} not present")]
    MissingLabel(String),
    #[error("edge {0} not present")]
    MissingEdge(usize),
    #[error("graph io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
