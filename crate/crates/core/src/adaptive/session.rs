use serde::{Deserialize, Serialize};

use super::{information_gain, information_gains, posterior_entropy, QuestionnaireModel};
use crate::bn::{posterior, Evidence};
use crate::error::{structural, Error, Result};
use crate::exec::Execution;

/// Gains closer than this to the maximum count as tied.
pub const GAIN_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Active,
    StoppedEntropy,
    StoppedPoolExhausted,
    StoppedMaxQuestions,
}

impl SessionStatus {
    pub fn is_active(self) -> bool {
        self == SessionStatus::Active
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SessionStatus::Active => "active",
            SessionStatus::StoppedEntropy => "stopped_entropy",
            SessionStatus::StoppedPoolExhausted => "stopped_pool_exhausted",
            SessionStatus::StoppedMaxQuestions => "stopped_max_questions",
        }
    }
}

/// One accepted answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub question: String,
    pub answer: usize,
    /// Information gain of the question at the moment it was answered.
    pub gain: f64,
    /// Posterior entropy after the answer joined the evidence.
    pub entropy: f64,
}

/// Mutable per-taker state: evidence, the unanswered pool and a transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    evidence: Evidence,
    remaining: Vec<String>,
    status: SessionStatus,
    transcript: Vec<TranscriptEntry>,
}

impl Session {
    /// New session with empty evidence. It may already be stopped when the
    /// prior entropy is at or below the threshold.
    pub fn start(model: &QuestionnaireModel) -> Result<Self> {
        let mut s = Self {
            evidence: Evidence::new(),
            remaining: model.pool().iter().map(|q| q.id.clone()).collect(),
            status: SessionStatus::Active,
            transcript: Vec::new(),
        };
        if let Some(reason) = should_stop(model, &s)? {
            s.status = reason;
        }
        Ok(s)
    }

    /// Applies an answer and re-evaluates the stopping rule.
    ///
    /// The session is unchanged on error. Answers of probability zero given
    /// the current evidence are rejected as inconsistent.
    pub fn answer(
        &mut self,
        model: &QuestionnaireModel,
        question: &str,
        answer: usize,
    ) -> Result<&TranscriptEntry> {
        if !self.status.is_active() {
            return Err(Error::State(format!(
                "session is {}, no further answers accepted",
                self.status.as_str()
            )));
        }
        let pos = self
            .remaining
            .iter()
            .position(|q| q == question)
            .ok_or_else(|| structural(format!("`{question}` is not in the remaining pool")))?;
        let card = model.network().cardinality(question).unwrap_or(0);
        if answer >= card {
            return Err(structural(format!(
                "answer {answer} out of range for `{question}` ({card} states)"
            )));
        }
        let p_answer = posterior(model.network(), &[question], &self.evidence)?.table()[answer];
        if p_answer == 0.0 {
            return Err(Error::InconsistentEvidence);
        }

        let gain = information_gain(model, question, &self.evidence)?;
        let mut evidence = self.evidence.clone();
        evidence.insert(question, answer)?;
        let entropy = posterior_entropy(model, &evidence)?;

        self.evidence = evidence;
        self.remaining.remove(pos);
        self.transcript.push(TranscriptEntry {
            question: question.to_string(),
            answer,
            gain,
            entropy,
        });
        if let Some(reason) = should_stop(model, self)? {
            self.status = reason;
        }
        Ok(self.transcript.last().unwrap())
    }

    /// Rebuilds a session by applying answers in order.
    pub fn replay<S: AsRef<str>>(
        model: &QuestionnaireModel,
        answers: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self> {
        let mut s = Self::start(model)?;
        for (q, a) in answers {
            s.answer(model, q.as_ref(), a)?;
        }
        Ok(s)
    }

    pub fn evidence(&self) -> &Evidence {
        &self.evidence
    }

    pub fn remaining_pool(&self) -> &[String] {
        &self.remaining
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn is_active(&self) -> bool {
        self.status.is_active()
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// Answered and remaining questions partition the model's pool, and the
    /// transcript matches the evidence.
    pub fn is_consistent_with(&self, model: &QuestionnaireModel) -> bool {
        let disjoint = self.remaining.iter().all(|q| !self.evidence.contains(q));
        let covers = self.evidence.len() + self.remaining.len() == model.pool().len()
            && model
                .pool()
                .iter()
                .all(|q| self.evidence.contains(&q.id) || self.remaining.contains(&q.id));
        let transcript = self.transcript.len() == self.evidence.len()
            && self
                .transcript
                .iter()
                .all(|t| self.evidence.get(&t.question) == Some(t.answer));
        disjoint && covers && transcript
    }
}

/// Stop reason if the session should stop now.
///
/// Checked in order: entropy at or below the threshold, empty pool, and the
/// question cap.
pub fn should_stop(model: &QuestionnaireModel, session: &Session) -> Result<Option<SessionStatus>> {
    if posterior_entropy(model, &session.evidence)? <= model.stop_threshold() {
        return Ok(Some(SessionStatus::StoppedEntropy));
    }
    if session.remaining.is_empty() {
        return Ok(Some(SessionStatus::StoppedPoolExhausted));
    }
    if model.max_questions().is_some_and(|m| session.evidence.len() >= m) {
        return Ok(Some(SessionStatus::StoppedMaxQuestions));
    }
    Ok(None)
}

/// The remaining question with maximal information gain, ties resolved by
/// pool declaration order.
pub fn pick_question(model: &QuestionnaireModel, session: &Session) -> Result<Option<String>> {
    pick_question_with(model, session, Execution::default())
}

pub fn pick_question_with(
    model: &QuestionnaireModel,
    session: &Session,
    exec: Execution,
) -> Result<Option<String>> {
    if !session.is_active() {
        return Err(Error::State(format!(
            "cannot pick a question: session is {}",
            session.status.as_str()
        )));
    }
    let gains = information_gains(model, &session.evidence, &session.remaining, exec)?;
    Ok(select_max(&gains).map(|i| session.remaining[i].clone()))
}

/// Index of the first value within [`GAIN_TIE_TOLERANCE`] of the maximum.
pub fn select_max(values: &[f64]) -> Option<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|&g| g >= max - GAIN_TIE_TOLERANCE)
}
