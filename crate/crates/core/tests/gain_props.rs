use proptest::prelude::*;
use quizbn_core::adaptive::{
    conditional_entropy, information_gain, information_gains, information_gains_in_base,
    posterior_entropy, select_max, EvaluationFunction, QuestionItem, QuestionnaireModel,
};
use quizbn_core::elicit::{compile_dg_cpt, DgParams, DgQuestionSpec};
use quizbn_core::fixtures::random::random_questionnaire;
use quizbn_core::{BayesianNetwork, DiscreteVariable, Evidence, Execution};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_case(seed: u64) -> (QuestionnaireModel, Evidence, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let skills = rng.random_range(1..=3);
    let questions = rng.random_range(2..=5);
    let m = random_questionnaire(&mut rng, skills, questions, 3, true);
    let mut asked: Vec<&QuestionItem> = m.pool().iter().filter(|q| q.id != "QX").collect();
    asked.shuffle(&mut rng);
    let k = rng.random_range(0..asked.len());
    let e = Evidence::from_pairs(asked[..k].iter().map(|q| (q.id.clone(), rng.random_range(0..q.options.len()))));
    let remaining = m.pool().iter().map(|q| q.id.clone()).filter(|q| !e.contains(q)).collect();
    (m, e, remaining)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn gain_is_non_negative_and_irrelevant_question_gains_nothing(seed in any::<u64>()) {
        let (m, e, remaining) = random_case(seed);
        let h = posterior_entropy(&m, &e).unwrap();
        for q in &remaining {
            let raw = h - conditional_entropy(&m, q, &e).unwrap();
            prop_assert!(raw >= -1e-9, "raw gain {raw} for {q}");
            prop_assert!(information_gain(&m, q, &e).unwrap() >= 0.0);
        }
        prop_assert!(information_gain(&m, "QX", &e).unwrap() <= 1e-9);
    }

    #[test]
    fn argmax_does_not_depend_on_log_base(seed in any::<u64>()) {
        let (m, e, remaining) = random_case(seed);
        let bits = information_gains(&m, &e, &remaining, Execution::Sequential).unwrap();
        let nats = information_gains_in_base(&m, &e, &remaining, Execution::Sequential, std::f64::consts::E).unwrap();
        for (b, n) in bits.iter().zip(&nats) {
            prop_assert!((b * std::f64::consts::LN_2 - n).abs() < 1e-12);
        }
        let mut sorted = bits.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        if sorted.len() < 2 || sorted[0] - sorted[1] > 1e-6 {
            prop_assert_eq!(select_max(&bits), select_max(&nats));
        }
    }

    #[test]
    fn parallel_and_sequential_gains_agree(seed in any::<u64>()) {
        let (m, e, remaining) = random_case(seed);
        let a = information_gains(&m, &e, &remaining, Execution::Sequential).unwrap();
        let b = information_gains(&m, &e, &remaining, Execution::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gain_grows_with_discrimination(prior in 0.05f64..0.95, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0, t in 0.0f64..1.0) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        // A difficulty feasible for both: within [hi/2, 1 - hi/2].
        let gamma = hi / 2.0 + t * (1.0 - hi);
        let gain = |delta: f64| {
            let s = DiscreteVariable::skill("S", ["yes", "no"]).unwrap();
            let q = DiscreteVariable::question("Q", ["correct", "wrong"]).unwrap();
            let vars = [s.clone(), q.clone()];
            let spec = DgQuestionSpec::uniform("Q", vec!["S".into()], DgParams::new(delta, gamma).unwrap(), &vars).unwrap();
            let cpt = compile_dg_cpt(&spec, &vars).unwrap();
            let net = BayesianNetwork::builder()
                .variable(s)
                .variable(q)
                .cpt("S", Vec::<String>::new(), vec![prior, 1.0 - prior])
                .cpt("Q", ["S"], cpt.table().to_vec())
                .build()
                .unwrap();
            let m = QuestionnaireModel::new(
                net,
                vec!["S".into()],
                vec![QuestionItem { id: "Q".into(), text: "Q".into(), options: vec!["c".into(), "w".into()] }],
                EvaluationFunction::new(vec![1.0, 0.0]).unwrap(),
                0.0,
            )
            .unwrap();
            information_gain(&m, "Q", &Evidence::new()).unwrap()
        };
        prop_assert!(gain(lo) <= gain(hi) + 1e-12);
    }
}
