//! Small reference questionnaires used throughout the tests and docs.
//!
//! - NET-A: one Boolean skill `S` with prior 0.5 and two yes/no questions,
//!   `Q1` (P(yes|s) = 0.9, P(yes|not s) = 0.1) and `Q2` (0.7 / 0.3).
//! - NET-B: three skills and four questions with edges S1→S2, S1→Q1,
//!   S1→Q2, S2→Q2, S2→Q3 and S3→Q4.
//!
//! Skills and questions list the "has skill" / "correct" state first.

use crate::adaptive::{EvaluationFunction, QuestionItem, QuestionnaireModel};
use crate::bn::{BayesianNetwork, DiscreteVariable};

const NONE: [&str; 0] = [];

fn yes_no_question(id: &str, text: &str) -> QuestionItem {
    QuestionItem { id: id.into(), text: text.into(), options: vec!["Yes".into(), "No".into()] }
}

pub fn net_a_network() -> BayesianNetwork {
    BayesianNetwork::builder()
        .variable(DiscreteVariable::skill("S", ["yes", "no"]).unwrap())
        .variable(DiscreteVariable::question("Q1", ["yes", "no"]).unwrap())
        .variable(DiscreteVariable::question("Q2", ["yes", "no"]).unwrap())
        .cpt("S", NONE, vec![0.5, 0.5])
        .cpt("Q1", ["S"], vec![0.9, 0.1, 0.1, 0.9])
        .cpt("Q2", ["S"], vec![0.7, 0.3, 0.3, 0.7])
        .build()
        .expect("NET-A is well formed")
}

/// NET-A with `H* = 0.5` bits and `f = (1, 0)`.
pub fn net_a_model() -> QuestionnaireModel {
    QuestionnaireModel::new(
        net_a_network(),
        vec!["S".into()],
        vec![
            yes_no_question("Q1", "Strongly diagnostic question"),
            yes_no_question("Q2", "Weakly diagnostic question"),
        ],
        EvaluationFunction::new(vec![1.0, 0.0]).unwrap(),
        0.5,
    )
    .expect("NET-A model is valid")
}

fn net_b_with(tables: [Vec<f64>; 7]) -> BayesianNetwork {
    let [s1, s2, s3, q1, q2, q3, q4] = tables;
    let mut b = BayesianNetwork::builder();
    for s in ["S1", "S2", "S3"] {
        b = b.variable(DiscreteVariable::skill(s, ["yes", "no"]).unwrap());
    }
    for q in ["Q1", "Q2", "Q3", "Q4"] {
        b = b.variable(DiscreteVariable::question(q, ["correct", "wrong"]).unwrap());
    }
    b.cpt("S1", NONE, s1)
        .cpt("S2", ["S1"], s2)
        .cpt("S3", NONE, s3)
        .cpt("Q1", ["S1"], q1)
        .cpt("Q2", ["S1", "S2"], q2)
        .cpt("Q3", ["S2"], q3)
        .cpt("Q4", ["S3"], q4)
        .build()
        .expect("NET-B is well formed")
}

/// NET-B with distinct, informative CPTs.
pub fn net_b_network() -> BayesianNetwork {
    net_b_with([
        vec![0.6, 0.4],
        vec![0.8, 0.2, 0.3, 0.7],
        vec![0.5, 0.5],
        vec![0.85, 0.15, 0.25, 0.75],
        vec![0.9, 0.1, 0.6, 0.4, 0.5, 0.5, 0.1, 0.9],
        vec![0.8, 0.2, 0.2, 0.8],
        vec![0.7, 0.3, 0.35, 0.65],
    ])
}

/// NET-B with every CPT row uniform.
pub fn net_b_uniform_network() -> BayesianNetwork {
    net_b_with([
        vec![0.5; 2],
        vec![0.5; 4],
        vec![0.5; 2],
        vec![0.5; 4],
        vec![0.5; 8],
        vec![0.5; 4],
        vec![0.5; 4],
    ])
}

fn net_b_model_over(net: BayesianNetwork) -> QuestionnaireModel {
    // Fraction of mastered skills; joint state index bits are (S1, S2, S3), 0 = mastered.
    let f = (0..8)
        .map(|i: u32| f64::from(3 - (i as u8).count_ones() as u8) / 3.0)
        .collect();
    QuestionnaireModel::new(
        net,
        vec!["S1".into(), "S2".into(), "S3".into()],
        ["Q1", "Q2", "Q3", "Q4"].iter().map(|q| yes_no_question(q, q)).collect(),
        EvaluationFunction::new(f).unwrap(),
        1.0,
    )
    .expect("NET-B model is valid")
}

pub fn net_b_model() -> QuestionnaireModel {
    net_b_model_over(net_b_network())
}

pub fn net_b_uniform_model() -> QuestionnaireModel {
    net_b_model_over(net_b_uniform_network())
}

/// One skill and two identically parametrised questions, `QB` declared first.
pub fn twin_question_model() -> QuestionnaireModel {
    let net = BayesianNetwork::builder()
        .variable(DiscreteVariable::skill("S", ["yes", "no"]).unwrap())
        .variable(DiscreteVariable::question("QA", ["yes", "no"]).unwrap())
        .variable(DiscreteVariable::question("QB", ["yes", "no"]).unwrap())
        .cpt("S", NONE, vec![0.5, 0.5])
        .cpt("QA", ["S"], vec![0.8, 0.2, 0.3, 0.7])
        .cpt("QB", ["S"], vec![0.8, 0.2, 0.3, 0.7])
        .build()
        .unwrap();
    QuestionnaireModel::new(
        net,
        vec!["S".into()],
        vec![yes_no_question("QB", "first"), yes_no_question("QA", "second")],
        EvaluationFunction::new(vec![1.0, 0.0]).unwrap(),
        0.1,
    )
    .unwrap()
}

/// Random networks, questionnaires and evidence for property tests.
pub mod random {
    use rand::seq::SliceRandom;
    use rand::Rng;

    use crate::adaptive::{EvaluationFunction, QuestionItem, QuestionnaireModel};
    use crate::bn::{BayesianNetwork, DiscreteVariable, Evidence, VariableRole};

    /// Shape of a random network. Variables are `X0..X{n-1}`; parents are
    /// drawn among earlier variables.
    #[derive(Debug, Clone, Copy)]
    pub struct NetworkShape {
        pub variables: usize,
        pub max_cardinality: usize,
        pub max_parents: usize,
        /// Chance that a CPT entry is forced to zero (one entry per row
        /// always stays positive).
        pub zero_probability: f64,
    }

    impl Default for NetworkShape {
        fn default() -> Self {
            Self { variables: 8, max_cardinality: 2, max_parents: 3, zero_probability: 0.0 }
        }
    }

    /// `len` positive weights, normalised; entries may be zeroed.
    pub fn random_row<R: Rng + ?Sized>(rng: &mut R, len: usize, zero_probability: f64) -> Vec<f64> {
        let keep = rng.random_range(0..len);
        let mut row: Vec<f64> = (0..len)
            .map(|i| {
                if i != keep && rng.random_bool(zero_probability) {
                    0.0
                } else {
                    rng.random_range(0.01..1.0)
                }
            })
            .collect();
        let z: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= z);
        row
    }

    pub fn random_network<R: Rng + ?Sized>(rng: &mut R, shape: NetworkShape) -> BayesianNetwork {
        let mut b = BayesianNetwork::builder();
        let mut cards = Vec::with_capacity(shape.variables);
        for i in 0..shape.variables {
            let card = rng.random_range(2..=shape.max_cardinality.max(2));
            cards.push(card);
            let states: Vec<String> = (0..card).map(|s| format!("s{s}")).collect();
            let k = rng.random_range(0..=shape.max_parents.min(i));
            let mut earlier: Vec<usize> = (0..i).collect();
            earlier.shuffle(rng);
            let mut parents: Vec<usize> = earlier.into_iter().take(k).collect();
            parents.sort_unstable();
            let rows: usize = parents.iter().map(|&p| cards[p]).product();
            let table = (0..rows).flat_map(|_| random_row(rng, card, shape.zero_probability)).collect();
            b = b
                .variable(DiscreteVariable::new(format!("X{i}"), states, VariableRole::Auxiliary).unwrap())
                .cpt(format!("X{i}"), parents.iter().map(|p| format!("X{p}")), table);
        }
        b.build().expect("random networks are well formed")
    }

    /// Observes up to `max_observed` variables outside `exclude`, with
    /// uniformly drawn states.
    pub fn random_evidence<R: Rng + ?Sized>(
        rng: &mut R,
        net: &BayesianNetwork,
        max_observed: usize,
        exclude: &[String],
    ) -> Evidence {
        let mut ids: Vec<&str> =
            net.variables().iter().map(|v| v.id()).filter(|v| !exclude.iter().any(|e| e == v)).collect();
        ids.shuffle(rng);
        let k = rng.random_range(0..=max_observed.min(ids.len()));
        Evidence::from_pairs(ids[..k].iter().map(|v| {
            let card = net.cardinality(v).unwrap();
            (v.to_string(), rng.random_range(0..card))
        }))
    }

    /// Skills `S1..` (each with up to two earlier skill parents) and
    /// questions `Q1..` (one or two skill parents), strictly positive CPTs
    /// and a random evaluation table. With `irrelevant`, one more question
    /// `QX` has identical rows for every parent configuration.
    pub fn random_questionnaire<R: Rng + ?Sized>(
        rng: &mut R,
        skills: usize,
        questions: usize,
        max_cardinality: usize,
        irrelevant: bool,
    ) -> QuestionnaireModel {
        let mut b = BayesianNetwork::builder();
        let mut skill_cards = Vec::new();
        let card = |rng: &mut R| rng.random_range(2..=max_cardinality.max(2));
        for i in 0..skills {
            let c = card(rng);
            skill_cards.push(c);
            let id = format!("S{}", i + 1);
            let k = rng.random_range(0..=2.min(i));
            let mut parents: Vec<usize> = (0..i).collect();
            parents.shuffle(rng);
            parents.truncate(k);
            parents.sort_unstable();
            let rows: usize = parents.iter().map(|&p| skill_cards[p]).product();
            let table = (0..rows).flat_map(|_| random_row(rng, c, 0.0)).collect();
            b = b
                .variable(DiscreteVariable::skill(&id, (0..c).map(|s| format!("l{s}"))).unwrap())
                .cpt(id, parents.iter().map(|p| format!("S{}", p + 1)), table);
        }
        let mut pool = Vec::new();
        let total = questions + usize::from(irrelevant);
        for j in 0..total {
            let c = card(rng);
            let is_irrelevant = irrelevant && j == questions;
            let id = if is_irrelevant { "QX".to_string() } else { format!("Q{}", j + 1) };
            let k = rng.random_range(1..=2.min(skills));
            let mut parents: Vec<usize> = (0..skills).collect();
            parents.shuffle(rng);
            parents.truncate(k);
            parents.sort_unstable();
            let rows: usize = parents.iter().map(|&p| skill_cards[p]).product();
            let table: Vec<f64> = if is_irrelevant {
                let row = random_row(rng, c, 0.0);
                (0..rows).flat_map(|_| row.clone()).collect()
            } else {
                (0..rows).flat_map(|_| random_row(rng, c, 0.0)).collect()
            };
            let states: Vec<String> = (0..c).map(|s| format!("a{s}")).collect();
            pool.push(QuestionItem { id: id.clone(), text: id.clone(), options: states.clone() });
            b = b
                .variable(DiscreteVariable::question(&id, states).unwrap())
                .cpt(id, parents.iter().map(|p| format!("S{}", p + 1)), table);
        }
        let joint: usize = skill_cards.iter().product();
        let f = (0..joint).map(|_| rng.random_range(0.0..1.0)).collect();
        QuestionnaireModel::new(
            b.build().unwrap(),
            (1..=skills).map(|i| format!("S{i}")).collect(),
            pool,
            EvaluationFunction::new(f).unwrap(),
            0.0,
        )
        .expect("random questionnaires are valid")
    }
}
