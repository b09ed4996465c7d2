use super::{EntropyMode, QuestionnaireModel};
use crate::bn::{posterior, Evidence, Factor, NORMALIZATION_TOLERANCE};
use crate::error::{structural, Result};
use crate::exec::Execution;

/// Shannon entropy in bits of a normalised factor, with `0 log 0 = 0`.
pub fn entropy(dist: &Factor) -> Result<f64> {
    entropy_in_base(dist, 2.0)
}

pub fn entropy_in_base(dist: &Factor, base: f64) -> Result<f64> {
    if !dist.is_normalized(NORMALIZATION_TOLERANCE) {
        return Err(structural(format!(
            "entropy needs a normalized distribution, total mass is {}",
            dist.total()
        )));
    }
    Ok(shannon(dist.table(), base))
}

fn shannon(probs: &[f64], base: f64) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    (h / base.ln()).max(0.0)
}

/// Entropy statistic of a normalised table over the model's skills.
fn skill_statistic(mode: EntropyMode, cards: &[usize], probs: &[f64], base: f64) -> f64 {
    match mode {
        EntropyMode::Joint => shannon(probs, base),
        EntropyMode::SumOfMarginals => {
            let strides = Factor::strides(cards);
            cards
                .iter()
                .zip(&strides)
                .map(|(&k, &stride)| {
                    let mut marginal = vec![0.0; k];
                    for (i, p) in probs.iter().enumerate() {
                        marginal[(i / stride) % k] += p;
                    }
                    shannon(&marginal, base)
                })
                .sum()
        }
    }
}

/// Joint posterior `P(S | e)` over the model's skills, in skill order.
pub fn skill_posterior(model: &QuestionnaireModel, e: &Evidence) -> Result<Factor> {
    posterior(model.network(), model.skills(), e)
}

/// `H(S | e)` in bits.
pub fn posterior_entropy(model: &QuestionnaireModel, e: &Evidence) -> Result<f64> {
    let post = skill_posterior(model, e)?;
    Ok(skill_statistic(model.entropy_mode(), model.skill_cards(), post.table(), 2.0))
}

/// `H(S | Q, e)`: the expected posterior entropy after observing `q`.
pub fn conditional_entropy(model: &QuestionnaireModel, q: &str, e: &Evidence) -> Result<f64> {
    GainContext::new(model, e, 2.0)?.conditional(q)
}

/// `max(0, H(S | e) - H(S | Q, e))` in bits.
pub fn information_gain(model: &QuestionnaireModel, q: &str, e: &Evidence) -> Result<f64> {
    GainContext::new(model, e, 2.0)?.gain(q)
}

/// Information gain of each candidate, sharing one skill posterior.
pub fn information_gains<S: AsRef<str> + Sync>(
    model: &QuestionnaireModel,
    e: &Evidence,
    candidates: &[S],
    exec: Execution,
) -> Result<Vec<f64>> {
    information_gains_in_base(model, e, candidates, exec, 2.0)
}

/// As [`information_gains`], with entropies measured in an arbitrary base.
pub fn information_gains_in_base<S: AsRef<str> + Sync>(
    model: &QuestionnaireModel,
    e: &Evidence,
    candidates: &[S],
    exec: Execution,
    base: f64,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let ctx = GainContext::new(model, e, base)?;
    exec.map(candidates, |q| ctx.gain(q.as_ref())).into_iter().collect()
}

struct GainContext<'a> {
    model: &'a QuestionnaireModel,
    evidence: &'a Evidence,
    skill_post: Factor,
    current: f64,
    base: f64,
}

impl<'a> GainContext<'a> {
    fn new(model: &'a QuestionnaireModel, evidence: &'a Evidence, base: f64) -> Result<Self> {
        if !(base > 1.0 && base.is_finite()) {
            return Err(structural(format!("entropy base must exceed 1, got {base}")));
        }
        let skill_post = skill_posterior(model, evidence)?;
        let current =
            skill_statistic(model.entropy_mode(), model.skill_cards(), skill_post.table(), base);
        Ok(Self { model, evidence, skill_post, current, base })
    }

    /// Normalised `P(S, q | e)` with scope `(skills..., q)`.
    fn joint_with(&self, q: &str) -> Result<Factor> {
        let net = self.model.network();
        net.require(q)?;
        if self.evidence.contains(q) {
            return Err(structural(format!("question `{q}` is already answered")));
        }
        if self.model.skills().iter().any(|s| s == q) {
            return Err(structural(format!("`{q}` is a skill, not a question")));
        }
        if self.model.question_is_skill_leaf(q) {
            let cpt = net.cpt(q).expect("known variable has a CPT");
            let mut order: Vec<&str> = self.model.skills().iter().map(String::as_str).collect();
            order.push(q);
            self.skill_post.product(cpt)?.permute(&order)
        } else {
            let mut targets = self.model.skills().to_vec();
            targets.push(q.to_string());
            posterior(net, &targets, self.evidence)
        }
    }

    fn conditional(&self, q: &str) -> Result<f64> {
        let joint = self.joint_with(q)?;
        let k = *joint.cards().last().unwrap();
        let n = joint.len() / k;
        let table = joint.table();
        let mut h = 0.0;
        let mut column = vec![0.0; n];
        for a in 0..k {
            for (s, c) in column.iter_mut().enumerate() {
                *c = table[s * k + a];
            }
            let p_answer: f64 = column.iter().sum();
            if p_answer == 0.0 {
                continue;
            }
            column.iter_mut().for_each(|c| *c /= p_answer);
            h += p_answer
                * skill_statistic(self.model.entropy_mode(), self.model.skill_cards(), &column, self.base);
        }
        Ok(h)
    }

    fn gain(&self, q: &str) -> Result<f64> {
        Ok((self.current - self.conditional(q)?).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn dist(t: &[f64]) -> Factor {
        Factor::from_pairs([("X", t.len())], t.to_vec()).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_abs_diff_eq!(entropy(&dist(&[0.5, 0.5])).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(entropy(&dist(&[1.0, 0.0])).unwrap(), 0.0);
        // -(0.9 log2 0.9 + 0.1 log2 0.1)
        let expected = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
        assert_abs_diff_eq!(entropy(&dist(&[0.9, 0.1])).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.4690, epsilon = 1e-4);
        assert!(entropy(&dist(&[0.5, 0.4])).is_err());
    }

    #[test]
    fn net_a_entropies() {
        let m = fixtures::net_a_model();
        let empty = Evidence::new();
        assert_abs_diff_eq!(posterior_entropy(&m, &empty).unwrap(), 1.0, epsilon = 1e-12);
        let e = Evidence::from_pairs([("Q1", 0)]);
        assert_abs_diff_eq!(posterior_entropy(&m, &e).unwrap(), 0.4690, epsilon = 1e-4);
        assert_abs_diff_eq!(conditional_entropy(&m, "Q1", &empty).unwrap(), 0.4690, epsilon = 1e-4);
        assert_abs_diff_eq!(conditional_entropy(&m, "Q2", &empty).unwrap(), 0.8813, epsilon = 1e-4);
        assert_abs_diff_eq!(information_gain(&m, "Q1", &empty).unwrap(), 0.5310, epsilon = 1e-4);
        assert_abs_diff_eq!(information_gain(&m, "Q2", &empty).unwrap(), 0.1187, epsilon = 1e-4);
        assert!(conditional_entropy(&m, "Q1", &e).is_err());
    }

    #[test]
    fn net_b_uniform_prior_is_three_bits() {
        let m = fixtures::net_b_uniform_model();
        assert_abs_diff_eq!(posterior_entropy(&m, &Evidence::new()).unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn fast_path_matches_general_route() {
        let m = fixtures::net_b_model();
        let e = Evidence::from_pairs([("Q3", 1)]);
        let ctx = GainContext::new(&m, &e, 2.0).unwrap();
        for q in ["Q1", "Q2", "Q4"] {
            let fast = ctx.joint_with(q).unwrap();
            let mut targets = m.skills().to_vec();
            targets.push(q.into());
            let slow = posterior(m.network(), &targets, &e).unwrap();
            for (a, b) in fast.table().iter().zip(slow.table()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sum_of_marginals_mode() {
        let m = fixtures::net_b_uniform_model().with_entropy_mode(EntropyMode::SumOfMarginals);
        assert_abs_diff_eq!(posterior_entropy(&m, &Evidence::new()).unwrap(), 3.0, epsilon = 1e-12);
        let m = fixtures::net_b_model().with_entropy_mode(EntropyMode::SumOfMarginals);
        let joint = fixtures::net_b_model();
        let e = Evidence::from_pairs([("Q2", 0)]);
        // Sum of marginal entropies bounds the joint entropy from above.
        assert!(posterior_entropy(&m, &e).unwrap() >= posterior_entropy(&joint, &e).unwrap() - 1e-12);
        assert!(information_gain(&m, "Q1", &e).unwrap() >= 0.0);
    }
}
