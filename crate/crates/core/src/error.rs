use serde_json::{json, Value};
use thiserror::Error;

use crate::triple::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("conductor {requested} exceeds the configured cap {cap}")]
    ConductorCap { requested: u64, cap: u64 },
    #[error("group of order {order} exceeds the enumeration cap {cap}")]
    EnumerationCap { order: u128, cap: usize },
    #[error("matrix dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: u128, cap: usize },
    #[error("division by zero in the cyclotomic field")]
    DivisionByZero,
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("element {element:?} does not conform to a group with orders {orders:?}")]
    SpecMismatch { element: Vec<u64>, orders: Vec<u32> },
    #[error("operands belong to different CCR triples")]
    TripleMismatch,
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("invalid CCR triple: {0}")]
    InvalidTriple(ValidationReport),
    #[error("morphism rejected: {0}")]
    Morphism(String),
    #[error("tensor split refused: theta({i},{j}) = {phase} is not 1")]
    SplitRefused { i: usize, j: usize, phase: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable error code used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ConductorCap { .. } => "conductor_cap",
            Error::EnumerationCap { .. } => "enumeration_cap",
            Error::DimensionCap { .. } => "dimension_cap",
            Error::DivisionByZero => "division_by_zero",
            Error::InvalidGroup(_) => "invalid_group",
            Error::SpecMismatch { .. } => "spec_mismatch",
            Error::TripleMismatch => "triple_mismatch",
            Error::NotSubgroup(_) => "not_subgroup",
            Error::InvalidTriple(_) => "invalid_triple",
            Error::Morphism(_) => "morphism",
            Error::SplitRefused { .. } => "split_refused",
            Error::Precondition(_) => "precondition",
            Error::Parse(_) => "schema",
        }
    }

    pub fn witness(&self) -> Value {
        match self {
            Error::InvalidTriple(report) => serde_json::to_value(report).unwrap_or(Value::Null),
            Error::SplitRefused { i, j, phase } => json!({"i": i, "j": j, "phase": phase}),
            Error::SpecMismatch { element, orders } => json!({"element": element, "orders": orders}),
            Error::EnumerationCap { order, cap } => json!({"order": order.to_string(), "cap": cap}),
            Error::DimensionCap { dim, cap } => json!({"dim": dim.to_string(), "cap": cap}),
            Error::ConductorCap { requested, cap } => json!({"conductor": requested, "cap": cap}),
            _ => Value::Null,
        }
    }
}
