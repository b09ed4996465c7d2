use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bn::{validate_network, BayesianNetwork, VariableRole};
use crate::elicit::DgQuestionSpec;
use crate::error::{structural, Error, Result};

/// One entry of the item pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionItem {
    pub id: String,
    pub text: String,
    /// Display text per answer state, in state order.
    pub options: Vec<String>,
}

/// Grading table `f(s)`, one value per joint skill state in canonical
/// factor order over the model's skills.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvaluationFunction {
    table: Vec<f64>,
}

impl EvaluationFunction {
    pub fn new(table: Vec<f64>) -> Result<Self> {
        if let Some(i) = table.iter().position(|x| !x.is_finite()) {
            return Err(structural(format!("evaluation entry {i} is not finite")));
        }
        Ok(Self { table })
    }

    pub fn constant(len: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; len])
    }

    /// 1 on `state`, 0 elsewhere.
    pub fn indicator(len: usize, state: usize) -> Result<Self> {
        let mut t = vec![0.0; len];
        *t.get_mut(state)
            .ok_or_else(|| structural(format!("state {state} out of range for {len} joint states")))? = 1.0;
        Self::new(t)
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }
}

/// Which entropy statistic drives stopping and selection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMode {
    /// Entropy of the joint posterior over all skills.
    #[default]
    Joint,
    /// Sum of the entropies of each skill's marginal posterior.
    SumOfMarginals,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub title: String,
    pub description: String,
    /// Whether clients should show the explanation panel during a session.
    pub explain_panel: bool,
}

/// A network together with the skills to estimate, the item pool, the
/// grading table and the stopping configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionnaireModel {
    network: BayesianNetwork,
    skills: Vec<String>,
    pool: Vec<QuestionItem>,
    evaluation: EvaluationFunction,
    stop_threshold: f64,
    max_questions: Option<usize>,
    entropy_mode: EntropyMode,
    risks: BTreeMap<String, Vec<usize>>,
    dg_specs: BTreeMap<String, DgQuestionSpec>,
    metadata: Metadata,
    skill_cards: Vec<usize>,
}

impl QuestionnaireModel {
    /// Builds a model over a valid network.
    ///
    /// `skills` lists every skill variable and `pool` every question
    /// variable, each exactly once; their order is the canonical skill order
    /// and the pool declaration order. The evaluation table must cover every joint skill
    /// state and the threshold (bits) must be finite and non-negative.
    pub fn new(
        network: BayesianNetwork,
        skills: Vec<String>,
        pool: Vec<QuestionItem>,
        evaluation: EvaluationFunction,
        stop_threshold: f64,
    ) -> Result<Self> {
        let report = validate_network(&network);
        if !report.is_valid() {
            return Err(Error::InvalidNetwork(report));
        }
        if skills.is_empty() {
            return Err(structural("a questionnaire needs at least one skill"));
        }
        let mut seen = HashSet::new();
        let mut skill_cards = Vec::with_capacity(skills.len());
        for s in &skills {
            let v = network
                .variable(s)
                .ok_or_else(|| structural(format!("skill `{s}` is not a network variable")))?;
            if v.role() != VariableRole::Skill {
                return Err(structural(format!("`{s}` is listed as skill but is not one")));
            }
            if !seen.insert(s.as_str()) {
                return Err(structural(format!("skill `{s}` listed twice")));
            }
            skill_cards.push(v.cardinality());
        }
        for q in &pool {
            let v = network
                .variable(&q.id)
                .ok_or_else(|| structural(format!("question `{}` is not a network variable", q.id)))?;
            if v.role() != VariableRole::Question {
                return Err(structural(format!("`{}` is in the pool but is not a question", q.id)));
            }
            if !seen.insert(q.id.as_str()) {
                return Err(structural(format!("`{}` listed twice", q.id)));
            }
            if q.options.len() != v.cardinality() {
                return Err(structural(format!(
                    "question `{}` has {} options for {} states",
                    q.id,
                    q.options.len(),
                    v.cardinality()
                )));
            }
        }
        for v in network.variables() {
            let listed = match v.role() {
                VariableRole::Skill => skills.iter().any(|s| s == v.id()),
                VariableRole::Question => pool.iter().any(|q| q.id == v.id()),
                VariableRole::Auxiliary => true,
            };
            if !listed {
                return Err(structural(format!(
                    "`{}` is a {:?} variable but is not listed in the model",
                    v.id(),
                    v.role()
                )));
            }
        }
        let joint: usize = skill_cards.iter().product();
        if evaluation.table().len() != joint {
            return Err(structural(format!(
                "evaluation table has {} entries, skills have {joint} joint states",
                evaluation.table().len()
            )));
        }
        if !(stop_threshold.is_finite() && stop_threshold >= 0.0) {
            return Err(structural(format!(
                "stop threshold must be finite and non-negative, got {stop_threshold}"
            )));
        }
        Ok(Self {
            network,
            skills,
            pool,
            evaluation,
            stop_threshold,
            max_questions: None,
            entropy_mode: EntropyMode::Joint,
            risks: BTreeMap::new(),
            dg_specs: BTreeMap::new(),
            metadata: Metadata::default(),
            skill_cards,
        })
    }

    /// Caps the number of questions per session; `None` means unlimited.
    pub fn with_max_questions(mut self, max: Option<usize>) -> Result<Self> {
        if max == Some(0) {
            return Err(structural("max_questions must be positive"));
        }
        self.max_questions = max;
        Ok(self)
    }

    pub fn with_entropy_mode(mut self, mode: EntropyMode) -> Self {
        self.entropy_mode = mode;
        self
    }

    pub fn with_stop_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold >= 0.0) {
            return Err(structural(format!(
                "stop threshold must be finite and non-negative, got {threshold}"
            )));
        }
        self.stop_threshold = threshold;
        Ok(self)
    }

    /// Named subsets of joint skill states whose posterior mass is reported
    /// as a risk.
    pub fn with_risks(mut self, risks: BTreeMap<String, Vec<usize>>) -> Result<Self> {
        let n = self.joint_skill_states();
        for (label, states) in &risks {
            if states.is_empty() {
                return Err(structural(format!("risk `{label}` lists no states")));
            }
            if let Some(s) = states.iter().find(|&&s| s >= n) {
                return Err(structural(format!(
                    "risk `{label}` references joint state {s}, only {n} exist"
                )));
            }
        }
        self.risks = risks;
        Ok(self)
    }

    /// Records the elicitation parameters a question's CPT was compiled from.
    pub fn with_dg_specs(mut self, specs: BTreeMap<String, DgQuestionSpec>) -> Result<Self> {
        for q in specs.keys() {
            if self.question(q).is_none() {
                return Err(structural(format!("elicitation spec for unknown question `{q}`")));
            }
        }
        self.dg_specs = specs;
        Ok(self)
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn network(&self) -> &BayesianNetwork {
        &self.network
    }

    pub fn skills(&self) -> &[String] {
        &self.skills
    }

    pub fn skill_cards(&self) -> &[usize] {
        &self.skill_cards
    }

    pub fn joint_skill_states(&self) -> usize {
        self.skill_cards.iter().product()
    }

    pub fn pool(&self) -> &[QuestionItem] {
        &self.pool
    }

    pub fn question(&self, id: &str) -> Option<&QuestionItem> {
        self.pool.iter().find(|q| q.id == id)
    }

    pub fn pool_position(&self, id: &str) -> Option<usize> {
        self.pool.iter().position(|q| q.id == id)
    }

    pub fn evaluation(&self) -> &EvaluationFunction {
        &self.evaluation
    }

    pub fn stop_threshold(&self) -> f64 {
        self.stop_threshold
    }

    pub fn max_questions(&self) -> Option<usize> {
        self.max_questions
    }

    pub fn entropy_mode(&self) -> EntropyMode {
        self.entropy_mode
    }

    pub fn risks(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.risks
    }

    pub fn dg_specs(&self) -> &BTreeMap<String, DgQuestionSpec> {
        &self.dg_specs
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    /// Whether `q`'s only neighbours are skills of this model, so that
    /// `P(S, q | e) = P(S | e) P(q | pa(q))`.
    pub(crate) fn question_is_skill_leaf(&self, q: &str) -> bool {
        self.network.children(q).is_empty()
            && self.network.parents(q).iter().all(|p| self.skills.contains(p))
    }
}
