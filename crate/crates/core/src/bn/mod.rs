//! Discrete Bayesian networks and exact inference.

mod factor;
mod inference;
mod network;
mod oracle;
mod validate;
mod variable;

pub use factor::Factor;
pub use inference::posterior;
pub use network::{BayesianNetwork, NetworkBuilder};
pub use oracle::{enumerate_joint, ENUMERATION_CAP};
pub use validate::{
    validate_network, ValidationReport, Violation, ViolationKind, NORMALIZATION_TOLERANCE,
};
pub use variable::{DiscreteVariable, Evidence, VariableRole};
