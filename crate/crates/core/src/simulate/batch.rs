use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::generate::{generate_model, GeneratorConfig};
use super::run::{run_session, PolicySpec, SessionTrace};
use super::taker::SimulatedTaker;
use crate::adaptive::{QuestionnaireModel, SessionStatus};
use crate::error::{structural, Result};
use crate::exec::Execution;

/// Name recorded in reports for the generator behind every random draw.
pub const RNG_ALGORITHM: &str = "ChaCha8";

const STREAM_MODEL: u64 = 1;
const STREAM_TAKER: u64 = 2;
const STREAM_RANDOM_POLICY: u64 = 3;

/// `index`-th 64-bit output of the ChaCha8 stream `stream` keyed by `seed`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// Every policy's session for one taker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub run: usize,
    pub taker: SimulatedTaker,
    /// One trace per policy, in the report's policy order.
    pub sessions: Vec<SessionTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: String,
    pub mean_questions: f64,
    pub median_questions: f64,
    pub stop_reasons: BTreeMap<String, usize>,
    pub mean_abs_grade_error: f64,
    /// Fraction of runs whose final MAP joint skill state is the true profile.
    pub skill_recovery_rate: f64,
}

/// One-sided paired t-test of `questions(policy) - questions(baseline) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub baseline: String,
    pub policy: String,
    pub pairs: usize,
    pub mean_difference: f64,
    pub std_difference: f64,
    /// `None` when the differences have no spread or there is a single pair.
    pub t_statistic: Option<f64>,
    pub p_value: f64,
    /// `p_value < 0.05`.
    pub baseline_fewer_at_95: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub rng: String,
    pub seed: u64,
    pub runs: usize,
    pub policies: Vec<PolicySpec>,
    /// Set when every run drew its own model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorConfig>,
    pub summaries: Vec<PolicySummary>,
    pub comparisons: Vec<PairedComparison>,
    pub traces: Vec<RunTrace>,
}

impl BatchReport {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports contain finite numbers");
        s.push('\n');
        s
    }

    pub fn summary(&self, policy: &str) -> Option<&PolicySummary> {
        self.summaries.iter().find(|s| s.policy == policy)
    }

    pub fn comparison(&self, policy: &str) -> Option<&PairedComparison> {
        self.comparisons.iter().find(|c| c.policy == policy)
    }
}

/// `n_runs` takers sampled from `model`, each run through every policy.
pub fn run_batch(
    model: &QuestionnaireModel,
    n_runs: usize,
    policies: &[PolicySpec],
    seed: u64,
    exec: Execution,
) -> Result<BatchReport> {
    batch(n_runs, policies, seed, exec, None, |_| Ok(std::borrow::Cow::Borrowed(model)))
}

/// Like [`run_batch`], but each run draws a fresh model from `config`.
pub fn run_generated_batch(
    config: &GeneratorConfig,
    n_runs: usize,
    policies: &[PolicySpec],
    seed: u64,
    exec: Execution,
) -> Result<BatchReport> {
    batch(n_runs, policies, seed, exec, Some(config.clone()), |run| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_MODEL, run as u64));
        generate_model(config, &mut rng).map(std::borrow::Cow::Owned)
    })
}

fn batch<'m, F>(
    n_runs: usize,
    policies: &[PolicySpec],
    seed: u64,
    exec: Execution,
    generator: Option<GeneratorConfig>,
    model_for_run: F,
) -> Result<BatchReport>
where
    F: Fn(usize) -> Result<std::borrow::Cow<'m, QuestionnaireModel>> + Sync + Send,
{
    if n_runs == 0 {
        return Err(structural("a batch needs at least one run"));
    }
    if policies.is_empty() {
        return Err(structural("a batch needs at least one policy"));
    }
    let traces: Vec<RunTrace> = exec
        .map_range(n_runs, |run| -> Result<RunTrace> {
            let model = model_for_run(run)?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_TAKER, run as u64));
            let taker = SimulatedTaker::sample(&model, &mut rng)?;
            let sessions = policies
                .iter()
                .map(|&p| {
                    let p = match p {
                        PolicySpec::Random { seed: ps } => PolicySpec::Random {
                            seed: derive_seed(
                                derive_seed(seed, STREAM_RANDOM_POLICY, ps),
                                STREAM_RANDOM_POLICY,
                                run as u64,
                            ),
                        },
                        other => other,
                    };
                    run_session(&model, &taker, p)
                })
                .collect::<Result<_>>()?;
            Ok(RunTrace { run, taker, sessions })
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let names: Vec<&str> = policies.iter().map(|p| p.name()).collect();
    Ok(BatchReport {
        rng: RNG_ALGORITHM.to_string(),
        seed,
        runs: n_runs,
        policies: policies.to_vec(),
        generator,
        summaries: summarize(&names, &traces),
        comparisons: compare_to_information_gain(&names, &traces),
        traces,
    })
}

/// Per-policy aggregates, recomputed from the traces alone.
pub fn summarize(policies: &[&str], traces: &[RunTrace]) -> Vec<PolicySummary> {
    policies
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let runs: Vec<&SessionTrace> = traces.iter().map(|t| &t.sessions[k]).collect();
            let n = runs.len() as f64;
            let mut asked: Vec<usize> = runs.iter().map(|r| r.questions_asked()).collect();
            asked.sort_unstable();
            let median = match asked.len() {
                0 => 0.0,
                l if l % 2 == 1 => asked[l / 2] as f64,
                l => (asked[l / 2 - 1] + asked[l / 2]) as f64 / 2.0,
            };
            let mut stop_reasons = BTreeMap::new();
            for r in &runs {
                *stop_reasons.entry(r.status.as_str().to_string()).or_insert(0) += 1;
            }
            PolicySummary {
                policy: name.to_string(),
                mean_questions: asked.iter().sum::<usize>() as f64 / n,
                median_questions: median,
                stop_reasons,
                mean_abs_grade_error: runs.iter().map(|r| r.abs_grade_error).sum::<f64>() / n,
                skill_recovery_rate: runs.iter().filter(|r| r.map_recovered).count() as f64 / n,
            }
        })
        .collect()
}

/// Paired comparisons of every other policy against information gain, if
/// information gain was run.
pub fn compare_to_information_gain(policies: &[&str], traces: &[RunTrace]) -> Vec<PairedComparison> {
    let base_name = PolicySpec::InformationGain.name();
    let Some(base) = policies.iter().position(|p| *p == base_name) else {
        return Vec::new();
    };
    policies
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != base)
        .map(|(k, name)| {
            let diffs: Vec<f64> = traces
                .iter()
                .map(|t| t.sessions[k].questions_asked() as f64 - t.sessions[base].questions_asked() as f64)
                .collect();
            paired_one_sided(base_name, name, &diffs)
        })
        .collect()
}

fn paired_one_sided(baseline: &str, policy: &str, diffs: &[f64]) -> PairedComparison {
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = if diffs.len() > 1 {
        diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let sd = var.sqrt();
    let (t, p) = if diffs.len() > 1 && sd > 0.0 {
        let t = mean / (sd / n.sqrt());
        let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("positive degrees of freedom");
        (Some(t), 1.0 - dist.cdf(t))
    } else if mean > 0.0 {
        (None, 0.0)
    } else {
        (None, 1.0)
    };
    PairedComparison {
        baseline: baseline.to_string(),
        policy: policy.to_string(),
        pairs: diffs.len(),
        mean_difference: mean,
        std_difference: sd,
        t_statistic: t,
        p_value: p,
        baseline_fewer_at_95: p < 0.05,
    }
}

/// Count of runs per stop reason across all policies; handy for quick checks.
pub fn stop_reason_total(report: &BatchReport, status: SessionStatus) -> usize {
    report
        .summaries
        .iter()
        .map(|s| s.stop_reasons.get(status.as_str()).copied().unwrap_or(0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    const ALL: [PolicySpec; 3] =
        [PolicySpec::InformationGain, PolicySpec::Random { seed: 0 }, PolicySpec::FixedOrder];

    #[test]
    fn fixed_seed_is_byte_identical_across_execution_modes() {
        let m = fixtures::net_b_model();
        let a = run_batch(&m, 40, &ALL, 17, Execution::Sequential).unwrap().to_json();
        let b = run_batch(&m, 40, &ALL, 17, Execution::default()).unwrap().to_json();
        assert_eq!(a, b);
        let c = run_batch(&m, 40, &ALL, 18, Execution::Sequential).unwrap().to_json();
        assert_ne!(a, c);
    }

    #[test]
    fn single_run_matches_run_session() {
        let m = fixtures::net_b_model();
        let r = run_batch(&m, 1, &[PolicySpec::InformationGain, PolicySpec::FixedOrder], 3, Execution::Sequential)
            .unwrap();
        let taker = &r.traces[0].taker;
        assert_eq!(r.traces[0].sessions[0], run_session(&m, taker, PolicySpec::InformationGain).unwrap());
        assert_eq!(r.traces[0].sessions[1], run_session(&m, taker, PolicySpec::FixedOrder).unwrap());
        assert_eq!(r.comparisons[0].pairs, 1);
        assert_eq!(r.comparisons[0].t_statistic, None);
    }

    #[test]
    fn aggregates_recompute_from_traces() {
        let m = fixtures::net_b_model();
        let r = run_batch(&m, 25, &ALL, 5, Execution::default()).unwrap();
        let names: Vec<&str> = r.policies.iter().map(|p| p.name()).collect();
        assert_eq!(summarize(&names, &r.traces), r.summaries);
        assert_eq!(compare_to_information_gain(&names, &r.traces), r.comparisons);
        assert_eq!(stop_reason_total(&r, SessionStatus::StoppedEntropy)
            + stop_reason_total(&r, SessionStatus::StoppedPoolExhausted)
            + stop_reason_total(&r, SessionStatus::StoppedMaxQuestions), 75);
    }

    #[test]
    fn paired_test_known_values() {
        // d = (1, 2, 3): mean 2, sd 1, t = 2 * sqrt(3), df = 2.
        let c = paired_one_sided("a", "b", &[1.0, 2.0, 3.0]);
        assert_abs_diff_eq!(c.mean_difference, 2.0);
        assert_abs_diff_eq!(c.std_difference, 1.0);
        assert_abs_diff_eq!(c.t_statistic.unwrap(), 2.0 * 3f64.sqrt(), epsilon = 1e-12);
        // One-sided p for t = 3.4641 with 2 df: 0.5 - t / (2 sqrt(t^2 + 2)).
        let t = 2.0 * 3f64.sqrt();
        assert_abs_diff_eq!(c.p_value, 0.5 - t / (2.0 * (t * t + 2.0).sqrt()), epsilon = 1e-9);
        assert_eq!(paired_one_sided("a", "b", &[1.0, 1.0]).p_value, 0.0);
        assert_eq!(paired_one_sided("a", "b", &[0.0, 0.0]).p_value, 1.0);
    }

    #[test]
    fn paired_design_shares_takers() {
        let m = fixtures::net_b_model();
        let a = run_batch(&m, 10, &[PolicySpec::FixedOrder], 9, Execution::Sequential).unwrap();
        let b = run_batch(&m, 10, &ALL, 9, Execution::Sequential).unwrap();
        for (x, y) in a.traces.iter().zip(&b.traces) {
            assert_eq!(x.taker, y.taker);
            assert_eq!(x.sessions[0], y.sessions[2]);
        }
    }
}
