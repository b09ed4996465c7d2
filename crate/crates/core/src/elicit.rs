//! Elicitation helpers.
//!
//! A binary question attached to a Boolean skill is fully described by
//! `p = P(correct | skill)` and `p' = P(correct | no skill)`. The same pair
//! can be elicited as discriminative power `delta = p - p'` and difficulty
//! `gamma = 1 - (p + p') / 2`.
//!
//! For questions with several parents, or parents with more than two
//! states, one `(delta, gamma)` pair is given per parent configuration. A
//! configuration counts as "has the skills" when every parent is in its
//! first state; that row receives the pair's `p`, every other row receives
//! its pair's `p'`. Giving the same pair to both configurations of a single
//! Boolean parent recovers the two-number parametrisation exactly.
//!
//! Questions are binary with the "correct" answer as state 0.

use serde::{Deserialize, Serialize};

use crate::bn::{
    validate_network, BayesianNetwork, DiscreteVariable, Factor, VariableRole,
    NORMALIZATION_TOLERANCE,
};
use crate::error::{structural, Error, Result};

/// Slack allowed on the `[0, 1]` bounds of the implied probabilities.
const BOUND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgParams {
    pub delta: f64,
    pub gamma: f64,
}

impl DgParams {
    pub fn new(delta: f64, gamma: f64) -> Result<Self> {
        let dg = Self { delta, gamma };
        dg_to_probabilities(dg)?;
        Ok(dg)
    }

    /// Whether `delta / 2 <= gamma <= 1 - delta / 2` with `delta >= 0`.
    pub fn is_feasible(self) -> bool {
        dg_to_probabilities(self).is_ok()
    }
}

/// `(p, p')` with `p = (1 - gamma) + delta / 2` and `p' = (1 - gamma) - delta / 2`.
pub fn dg_to_probabilities(dg: DgParams) -> Result<(f64, f64)> {
    let DgParams { delta, gamma } = dg;
    if !(delta.is_finite() && gamma.is_finite()) {
        return Err(Error::InfeasibleParameters(format!(
            "delta = {delta}, gamma = {gamma} must be finite"
        )));
    }
    if delta < -BOUND_TOLERANCE {
        return Err(Error::InfeasibleParameters(format!(
            "delta = {delta} < 0 (question would favour takers without the skill)"
        )));
    }
    let p = (1.0 - gamma) + delta / 2.0;
    let p_prime = (1.0 - gamma) - delta / 2.0;
    if p > 1.0 + BOUND_TOLERANCE {
        return Err(Error::InfeasibleParameters(format!("implied p = {p} > 1")));
    }
    if p_prime < -BOUND_TOLERANCE {
        return Err(Error::InfeasibleParameters(format!("implied p' = {p_prime} < 0")));
    }
    if p < -BOUND_TOLERANCE {
        return Err(Error::InfeasibleParameters(format!("implied p = {p} < 0")));
    }
    if p_prime > 1.0 + BOUND_TOLERANCE {
        return Err(Error::InfeasibleParameters(format!("implied p' = {p_prime} > 1")));
    }
    Ok((p.clamp(0.0, 1.0), p_prime.clamp(0.0, 1.0)))
}

/// `delta = p - p'`, `gamma = 1 - (p + p') / 2`.
pub fn probabilities_to_dg(p: f64, p_prime: f64) -> Result<DgParams> {
    for (name, v) in [("p", p), ("p'", p_prime)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InfeasibleParameters(format!("{name} = {v} is not in [0, 1]")));
        }
    }
    if p < p_prime {
        return Err(Error::NonMonotone { p, p_prime });
    }
    Ok(DgParams { delta: p - p_prime, gamma: 1.0 - (p + p_prime) / 2.0 })
}

/// Elicitation of a binary question: one pair per parent configuration,
/// configurations in canonical factor order over `parents`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgQuestionSpec {
    pub question: String,
    pub parents: Vec<String>,
    pub params: Vec<DgParams>,
}

impl DgQuestionSpec {
    /// Same pair on every parent configuration.
    pub fn uniform(
        question: impl Into<String>,
        parents: Vec<String>,
        params: DgParams,
        variables: &[DiscreteVariable],
    ) -> Result<Self> {
        let configs = parent_cards(&parents, variables)?.iter().product();
        Ok(Self { question: question.into(), parents, params: vec![params; configs] })
    }
}

fn lookup<'a>(id: &str, variables: &'a [DiscreteVariable]) -> Result<&'a DiscreteVariable> {
    variables
        .iter()
        .find(|v| v.id() == id)
        .ok_or_else(|| structural(format!("unknown variable `{id}`")))
}

fn parent_cards(parents: &[String], variables: &[DiscreteVariable]) -> Result<Vec<usize>> {
    parents.iter().map(|p| lookup(p, variables).map(|v| v.cardinality())).collect()
}

/// CPT with scope `(parents..., question)` for a discrimination/difficulty
/// spec. `variables` must contain the question and its parents.
pub fn compile_dg_cpt(spec: &DgQuestionSpec, variables: &[DiscreteVariable]) -> Result<Factor> {
    let q = lookup(&spec.question, variables)?;
    if q.cardinality() != 2 {
        return Err(structural(format!(
            "`{}` has {} states; discrimination/difficulty needs a binary question",
            q.id(),
            q.cardinality()
        )));
    }
    let cards = parent_cards(&spec.parents, variables)?;
    let configs: usize = cards.iter().product();
    if spec.params.len() != configs {
        return Err(structural(format!(
            "`{}` needs {configs} parameter pairs (one per parent configuration), got {}",
            q.id(),
            spec.params.len()
        )));
    }
    let mut table = Vec::with_capacity(configs * 2);
    for (c, dg) in spec.params.iter().enumerate() {
        let (p, p_prime) = dg_to_probabilities(*dg).map_err(|e| match e {
            Error::InfeasibleParameters(m) => {
                Error::InfeasibleParameters(format!("`{}` configuration {c}: {m}", q.id()))
            }
            other => other,
        })?;
        // Configuration index is row-major, so it is 0 exactly when every parent is in state 0.
        let correct = if c == 0 { p } else { p_prime };
        table.extend([correct, 1.0 - correct]);
    }
    let mut scope = spec.parents.clone();
    scope.push(q.id().to_string());
    let mut all_cards = cards;
    all_cards.push(2);
    Factor::new(scope, all_cards, table)
}

/// Star-shaped network: `target` is the only parent of every question.
pub fn build_naive_bayes(
    target: DiscreteVariable,
    prior: Factor,
    question_cpts: Vec<(DiscreteVariable, Factor)>,
) -> Result<BayesianNetwork> {
    if target.role() != VariableRole::Skill {
        return Err(structural(format!("target `{}` must be a skill variable", target.id())));
    }
    if prior.scope() != [target.id()] || prior.cards() != [target.cardinality()] {
        return Err(structural(format!(
            "prior scope must be exactly (`{}`) with {} states",
            target.id(),
            target.cardinality()
        )));
    }
    if !prior.is_normalized(NORMALIZATION_TOLERANCE) {
        return Err(structural("prior does not sum to one"));
    }
    let mut b = BayesianNetwork::builder()
        .cpt(target.id(), Vec::<String>::new(), prior.table().to_vec());
    for (q, cpt) in question_cpts {
        if q.role() != VariableRole::Question {
            return Err(structural(format!("`{}` must be a question variable", q.id())));
        }
        if cpt.scope() != [target.id(), q.id()]
            || cpt.cards() != [target.cardinality(), q.cardinality()]
        {
            return Err(structural(format!(
                "CPT of `{}` must have scope (`{}`, `{}`)",
                q.id(),
                target.id(),
                q.id()
            )));
        }
        b = b.cpt(q.id(), [target.id()], cpt.table().to_vec()).variable(q);
    }
    let net = b.variable(target).build()?;
    let report = validate_network(&net);
    if !report.is_valid() {
        return Err(Error::InvalidNetwork(report));
    }
    Ok(net)
}
