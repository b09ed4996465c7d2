use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adaptive::{EvaluationFunction, QuestionItem, QuestionnaireModel};
use crate::bn::{BayesianNetwork, DiscreteVariable};
use crate::elicit::{compile_dg_cpt, DgParams, DgQuestionSpec};
use crate::error::{structural, Result};

/// Shape of randomly generated questionnaires: independent Boolean skills,
/// binary questions each attached to one random skill.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub skills: usize,
    pub questions: usize,
    /// Discrimination is drawn uniformly from this range.
    pub delta_range: (f64, f64),
    /// Prior P(has skill) is drawn uniformly from this range.
    pub prior_range: (f64, f64),
    pub stop_threshold: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            skills: 2,
            questions: 12,
            delta_range: (0.2, 0.9),
            prior_range: (0.3, 0.7),
            stop_threshold: 1.0,
        }
    }
}

/// Draws a questionnaire. Difficulty is uniform over its feasible range
/// `[delta / 2, 1 - delta / 2]`; the grade is the fraction of mastered skills.
pub fn generate_model<R: Rng + ?Sized>(config: &GeneratorConfig, rng: &mut R) -> Result<QuestionnaireModel> {
    let (dlo, dhi) = config.delta_range;
    let (plo, phi) = config.prior_range;
    if config.skills == 0 || config.questions == 0 {
        return Err(structural("generator needs at least one skill and one question"));
    }
    if !(0.0 <= dlo && dlo <= dhi && dhi <= 1.0) {
        return Err(structural(format!("delta range ({dlo}, {dhi}) is not within [0, 1]")));
    }
    if !(0.0 <= plo && plo <= phi && phi <= 1.0) {
        return Err(structural(format!("prior range ({plo}, {phi}) is not within [0, 1]")));
    }
    let skills: Vec<DiscreteVariable> = (1..=config.skills)
        .map(|i| DiscreteVariable::skill(format!("S{i}"), ["yes", "no"]))
        .collect::<Result<_>>()?;
    let mut b = BayesianNetwork::builder();
    for s in &skills {
        let p = rng.random_range(plo..=phi);
        b = b.variable(s.clone()).cpt(s.id(), Vec::<String>::new(), vec![p, 1.0 - p]);
    }
    let mut pool = Vec::with_capacity(config.questions);
    for i in 1..=config.questions {
        let q = DiscreteVariable::question(format!("Q{i}"), ["correct", "wrong"])?;
        let parent = skills[rng.random_range(0..skills.len())].id().to_string();
        let delta = rng.random_range(dlo..=dhi);
        let gamma = rng.random_range(delta / 2.0..=1.0 - delta / 2.0);
        let mut vars = skills.clone();
        vars.push(q.clone());
        let spec = DgQuestionSpec::uniform(q.id(), vec![parent.clone()], DgParams::new(delta, gamma)?, &vars)?;
        let cpt = compile_dg_cpt(&spec, &vars)?;
        pool.push(QuestionItem {
            id: q.id().to_string(),
            text: format!("Generated question {i} on {parent}"),
            options: vec!["Correct".into(), "Wrong".into()],
        });
        b = b.variable(q.clone()).cpt(q.id(), [parent], cpt.table().to_vec());
    }
    let n = config.skills;
    let f = (0..1usize << n)
        .map(|idx| (n - idx.count_ones() as usize) as f64 / n as f64)
        .collect();
    QuestionnaireModel::new(
        b.build()?,
        skills.iter().map(|s| s.id().to_string()).collect(),
        pool,
        EvaluationFunction::new(f)?,
        config.stop_threshold,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_models_respect_config() {
        let cfg = GeneratorConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m = generate_model(&cfg, &mut rng).unwrap();
            assert_eq!(m.skills().len(), 2);
            assert_eq!(m.pool().len(), 12);
            for q in m.pool() {
                let t = m.network().cpt(&q.id).unwrap().table();
                let delta = t[0] - t[2];
                assert!((0.2 - 1e-12..=0.9 + 1e-12).contains(&delta), "{delta}");
            }
        }
    }

    #[test]
    fn bad_ranges_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = GeneratorConfig { delta_range: (0.5, 0.2), ..Default::default() };
        assert!(generate_model(&cfg, &mut rng).is_err());
        let cfg = GeneratorConfig { skills: 0, ..Default::default() };
        assert!(generate_model(&cfg, &mut rng).is_err());
    }
}
