//! Adaptive questionnaires over discrete Bayesian networks.
//!
//! Skills and questions are variables of one network. Each step of a
//! session picks the unanswered question whose answer is expected to reduce
//! the entropy of the skill posterior the most, and the session stops once
//! that entropy falls below a threshold. The final grade is the posterior
//! expectation of an evaluation table over joint skill states.
//!
//! Module map:
//!
//! - [`bn`]: variables, factors, networks, exact inference by variable
//!   elimination, structural validation and a brute-force enumeration oracle.
//! - [`adaptive`]: entropy, information gain, question selection, stopping,
//!   grading and explanation reports.
//! - [`elicit`]: discrimination/difficulty parametrisation of binary
//!   questions and the naive-Bayes builder.
//! - [`model_io`]: the JSON questionnaire document, diagnostics and session
//!   persistence.
//! - [`simulate`]: synthetic takers, selection policies and batch reports.
//! - [`exec`]: sequential or rayon-backed execution of data-parallel loops.

pub mod adaptive;
pub mod bn;
pub mod elicit;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod model_io;
pub mod simulate;

pub use adaptive::{QuestionnaireModel, Session, SessionStatus};
pub use bn::{BayesianNetwork, DiscreteVariable, Evidence, Factor, VariableRole};
pub use error::{Error, Result};
pub use exec::Execution;
