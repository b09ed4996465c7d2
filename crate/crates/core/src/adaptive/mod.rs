//! Entropy-driven adaptive questioning over a questionnaire model.
//!
//! A session starts with empty evidence. While the entropy of the skill
//! posterior exceeds the model's threshold, the unanswered question with
//! the largest information gain is offered, its answer joins the evidence
//! and the question leaves the pool. The grade is the posterior expectation
//! of the evaluation table.

mod entropy;
mod model;
mod report;
mod session;

pub use entropy::{
    conditional_entropy, entropy, entropy_in_base, information_gain, information_gains,
    information_gains_in_base, posterior_entropy, skill_posterior,
};
pub use model::{
    EntropyMode, EvaluationFunction, Metadata, QuestionItem, QuestionnaireModel,
};
pub use report::{
    explain, grade, marginal_risks, CandidateGain, ExplanationReport, SkillMarginal,
};
pub use session::{
    pick_question, pick_question_with, select_max, should_stop, Session, SessionStatus,
    TranscriptEntry, GAIN_TIE_TOLERANCE,
};
