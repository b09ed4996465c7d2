use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{information_gains, posterior_entropy, skill_posterior, QuestionnaireModel, Session};
use crate::bn::Evidence;
use crate::error::{structural, Result};
use crate::exec::Execution;

/// `E_{P(S|e)}[f(S)]`.
pub fn grade(model: &QuestionnaireModel, e: &Evidence) -> Result<f64> {
    let post = skill_posterior(model, e)?;
    Ok(post
        .table()
        .iter()
        .zip(model.evaluation().table())
        .map(|(p, f)| p * f)
        .sum())
}

/// Posterior mass of each labelled subset of joint skill states.
pub fn marginal_risks(
    model: &QuestionnaireModel,
    e: &Evidence,
    decompositions: &BTreeMap<String, Vec<usize>>,
) -> Result<BTreeMap<String, f64>> {
    let post = skill_posterior(model, e)?;
    let table = post.table();
    decompositions
        .iter()
        .map(|(label, states)| {
            if states.is_empty() {
                return Err(structural(format!("risk `{label}` lists no states")));
            }
            let mass = states
                .iter()
                .map(|&s| {
                    table.get(s).copied().ok_or_else(|| {
                        structural(format!(
                            "risk `{label}` references joint state {s}, only {} exist",
                            table.len()
                        ))
                    })
                })
                .sum::<Result<f64>>()?;
            Ok((label.clone(), mass))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillMarginal {
    pub skill: String,
    pub states: Vec<String>,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateGain {
    pub question: String,
    pub gain: f64,
}

/// The numbers behind the current selection and stopping decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationReport {
    pub skill_posteriors: Vec<SkillMarginal>,
    /// Posterior entropy in bits under the model's entropy mode (the joint
    /// entropy by default).
    pub joint_entropy: f64,
    pub stop_threshold: f64,
    /// Candidates sorted by descending gain, ties in pool order. Empty once
    /// the session has stopped.
    pub per_candidate: Vec<CandidateGain>,
    /// `joint_entropy - stop_threshold`; non-positive means the entropy rule
    /// is met.
    pub stop_margin: f64,
}

pub fn explain(model: &QuestionnaireModel, session: &Session) -> Result<ExplanationReport> {
    let e = session.evidence();
    let post = skill_posterior(model, e)?;
    let net = model.network();
    let mut skill_posteriors = Vec::with_capacity(model.skills().len());
    for s in model.skills() {
        let mut marginal = post.clone();
        for other in model.skills().iter().filter(|o| *o != s) {
            marginal = marginal.marginalize(other)?;
        }
        skill_posteriors.push(SkillMarginal {
            skill: s.clone(),
            states: net.variable(s).unwrap().states().to_vec(),
            probabilities: marginal.into_table(),
        });
    }
    let joint_entropy = posterior_entropy(model, e)?;

    let candidates: &[String] = if session.is_active() { session.remaining_pool() } else { &[] };
    let gains = information_gains(model, e, candidates, Execution::default())?;
    let mut per_candidate: Vec<CandidateGain> = candidates
        .iter()
        .zip(gains)
        .map(|(q, gain)| CandidateGain { question: q.clone(), gain })
        .collect();
    // Remaining pool is in declaration order; stable sort keeps it for ties.
    per_candidate.sort_by(|a, b| b.gain.total_cmp(&a.gain));

    Ok(ExplanationReport {
        skill_posteriors,
        joint_entropy,
        stop_threshold: model.stop_threshold(),
        per_candidate,
        stop_margin: joint_entropy - model.stop_threshold(),
    })
}
