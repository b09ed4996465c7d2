use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adaptive::QuestionnaireModel;
use crate::bn::VariableRole;
use crate::error::{structural, Result};

/// Assignment of a state index to every latent (skill or auxiliary) variable.
pub type Profile = BTreeMap<String, usize>;

/// Draws the latent variables from their prior by ancestral sampling.
pub fn sample_profile<R: Rng + ?Sized>(model: &QuestionnaireModel, rng: &mut R) -> Result<Profile> {
    let net = model.network();
    let order = net
        .topological_order()
        .ok_or_else(|| structural("network has a cycle"))?;
    let mut profile = Profile::new();
    for i in order {
        let v = &net.variables()[i];
        if v.role() == VariableRole::Question {
            continue;
        }
        let state = draw_from_row(model, v.id(), &profile, rng)?;
        profile.insert(v.id().to_string(), state);
    }
    Ok(profile)
}

/// Draws an answer to `q` from `P(q | parents = profile)`.
pub fn simulate_answer<R: Rng + ?Sized>(
    model: &QuestionnaireModel,
    profile: &Profile,
    q: &str,
    rng: &mut R,
) -> Result<usize> {
    let v = model
        .network()
        .variable(q)
        .ok_or_else(|| structural(format!("unknown question `{q}`")))?;
    if v.role() != VariableRole::Question {
        return Err(structural(format!("`{q}` is not a question")));
    }
    draw_from_row(model, q, profile, rng)
}

/// Joint state index of the profile over the model's skills.
pub fn profile_index(model: &QuestionnaireModel, profile: &Profile) -> Result<usize> {
    let mut idx = 0;
    for (s, &card) in model.skills().iter().zip(model.skill_cards()) {
        let state = *profile
            .get(s)
            .ok_or_else(|| structural(format!("profile has no state for skill `{s}`")))?;
        if state >= card {
            return Err(structural(format!("state {state} out of range for skill `{s}`")));
        }
        idx = idx * card + state;
    }
    Ok(idx)
}

fn draw_from_row<R: Rng + ?Sized>(
    model: &QuestionnaireModel,
    id: &str,
    profile: &Profile,
    rng: &mut R,
) -> Result<usize> {
    let net = model.network();
    let cpt = net.cpt(id).ok_or_else(|| structural(format!("unknown variable `{id}`")))?;
    let card = *cpt.cards().last().expect("CPT scope ends with its variable");
    let mut row = 0;
    for (p, &pc) in net.parents(id).iter().zip(cpt.cards()) {
        let s = *profile
            .get(p)
            .ok_or_else(|| structural(format!("profile has no state for `{p}`, a parent of `{id}`")))?;
        if s >= pc {
            return Err(structural(format!("state {s} out of range for `{p}`")));
        }
        row = row * pc + s;
    }
    let weights = &cpt.table()[row * card..(row + 1) * card];
    let dist = WeightedIndex::new(weights)
        .map_err(|e| structural(format!("CPT row {row} of `{id}` cannot be sampled: {e}")))?;
    Ok(dist.sample(rng))
}

/// A synthetic taker: a fixed latent profile and a seed for answer noise.
///
/// The answer to each question comes from its own ChaCha8 stream (stream =
/// pool position), so it does not depend on which questions were asked
/// before. Every policy run against the same taker sees the same answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulatedTaker {
    pub profile: Profile,
    pub seed: u64,
}

impl SimulatedTaker {
    pub fn new(model: &QuestionnaireModel, profile: Profile, seed: u64) -> Result<Self> {
        profile_index(model, &profile)?;
        Ok(Self { profile, seed })
    }

    pub fn sample<R: Rng + ?Sized>(model: &QuestionnaireModel, rng: &mut R) -> Result<Self> {
        let profile = sample_profile(model, rng)?;
        Ok(Self { profile, seed: rng.random() })
    }

    pub fn answer(&self, model: &QuestionnaireModel, q: &str) -> Result<usize> {
        let pos = model
            .pool_position(q)
            .ok_or_else(|| structural(format!("`{q}` is not in the pool")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(pos as u64);
        simulate_answer(model, &self.profile, q, &mut rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn profile_frequency_matches_prior() {
        let m = fixtures::net_a_model();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 20_000;
        let has = (0..n)
            .filter(|_| sample_profile(&m, &mut rng).unwrap()["S"] == 0)
            .count();
        let freq = has as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.015, "{freq}");
    }

    #[test]
    fn answer_frequency_matches_row() {
        let m = fixtures::net_a_model();
        let profile = Profile::from([("S".to_string(), 0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20_000;
        let yes = (0..n)
            .filter(|_| simulate_answer(&m, &profile, "Q1", &mut rng).unwrap() == 0)
            .count();
        assert!((yes as f64 / n as f64 - 0.9).abs() < 0.01);
    }

    #[test]
    fn missing_parent_is_structural() {
        let m = fixtures::net_a_model();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(simulate_answer(&m, &Profile::new(), "Q1", &mut rng).is_err());
        assert!(simulate_answer(&m, &Profile::from([("S".into(), 0)]), "S", &mut rng).is_err());
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let m = fixtures::net_b_model();
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..50).map(|_| sample_profile(&m, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
        let t = SimulatedTaker::sample(&m, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(t.answer(&m, "Q2").unwrap(), t.answer(&m, "Q2").unwrap());
    }

    #[test]
    fn profile_index_is_row_major() {
        let m = fixtures::net_b_model();
        let p = Profile::from([("S1".into(), 1), ("S2".into(), 0), ("S3".into(), 1)]);
        assert_eq!(profile_index(&m, &p).unwrap(), 0b101);
    }
}
