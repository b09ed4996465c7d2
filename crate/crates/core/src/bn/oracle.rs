//! Brute-force enumeration of the full joint distribution.
//!
//! Shares no code with variable elimination beyond the query checks: every
//! joint assignment is scored as the product of its CPT entries, looked up
//! by direct index arithmetic.

use super::inference::check_query;
use super::{BayesianNetwork, Evidence, Factor};
use crate::error::{Error, Result};

/// Largest joint state space `enumerate_joint` accepts.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Same contract as [`posterior`](super::posterior), by full enumeration.
pub fn enumerate_joint<S: AsRef<str>>(
    net: &BayesianNetwork,
    targets: &[S],
    evidence: &Evidence,
) -> Result<Factor> {
    let targets = check_query(net, targets, evidence)?;
    let vars = net.variables();
    let cards: Vec<usize> = vars.iter().map(|v| v.cardinality()).collect();
    let size: u128 = cards.iter().map(|&c| c as u128).product();
    if size > ENUMERATION_CAP {
        return Err(Error::Capacity { size, cap: ENUMERATION_CAP });
    }

    // For each CPT: the network index of each scope member and its stride.
    let lookups: Vec<Vec<(usize, usize)>> = (0..vars.len())
        .map(|i| {
            let cpt = net.cpt_at(i);
            let strides = Factor::strides(cpt.cards());
            cpt.scope()
                .iter()
                .zip(strides)
                .map(|(v, s)| (net.index_of(v).unwrap(), s))
                .collect()
        })
        .collect();
    let observed: Vec<Option<usize>> = vars.iter().map(|v| evidence.get(v.id())).collect();
    let target_idx: Vec<usize> = targets.iter().map(|t| net.index_of(t).unwrap()).collect();
    let target_cards: Vec<usize> = target_idx.iter().map(|&i| cards[i]).collect();
    let target_strides = Factor::strides(&target_cards);

    let mut out = vec![0.0; target_cards.iter().product()];
    let mut state = vec![0usize; vars.len()];
    for _ in 0..size {
        let consistent = observed
            .iter()
            .zip(&state)
            .all(|(o, s)| o.is_none_or(|o| o == *s));
        if consistent {
            let mut p = 1.0;
            for (i, lookup) in lookups.iter().enumerate() {
                let idx: usize = lookup.iter().map(|&(v, stride)| state[v] * stride).sum();
                p *= net.cpt_at(i).table()[idx];
            }
            let t: usize = target_idx
                .iter()
                .zip(&target_strides)
                .map(|(&v, s)| state[v] * s)
                .sum();
            out[t] += p;
        }
        for d in (0..state.len()).rev() {
            state[d] += 1;
            if state[d] < cards[d] {
                break;
            }
            state[d] = 0;
        }
    }

    let z: f64 = out.iter().sum();
    if z.is_nan() || z <= 0.0 {
        return Err(Error::InconsistentEvidence);
    }
    out.iter_mut().for_each(|x| *x /= z);
    Factor::new(targets.iter().map(|t| t.to_string()).collect(), target_cards, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{posterior, DiscreteVariable};
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    #[test]
    fn agrees_with_variable_elimination_on_fixtures() {
        let net = fixtures::net_a_network();
        for e in [Evidence::new(), Evidence::from_pairs([("Q1", 0)])] {
            let a = posterior(&net, &["S"], &e).unwrap();
            let b = enumerate_joint(&net, &["S"], &e).unwrap();
            for (x, y) in a.table().iter().zip(b.table()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
        let net = fixtures::net_b_network();
        let e = Evidence::from_pairs([("Q2", 0), ("Q4", 1)]);
        let a = posterior(&net, &["S1", "S2", "S3"], &e).unwrap();
        let b = enumerate_joint(&net, &["S1", "S2", "S3"], &e).unwrap();
        for (x, y) in a.table().iter().zip(b.table()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_variable_prior() {
        let net = BayesianNetwork::builder()
            .variable(DiscreteVariable::skill("S", ["a", "b", "c"]).unwrap())
            .cpt("S", Vec::<String>::new(), vec![0.2, 0.3, 0.5])
            .build()
            .unwrap();
        let p = enumerate_joint(&net, &["S"], &Evidence::new()).unwrap();
        assert_eq!(p.table(), &[0.2, 0.3, 0.5]);
    }

    #[test]
    fn impossible_evidence() {
        let net = BayesianNetwork::builder()
            .variable(DiscreteVariable::skill("S", ["y", "n"]).unwrap())
            .variable(DiscreteVariable::question("Q", ["y", "n"]).unwrap())
            .cpt("S", Vec::<String>::new(), vec![1.0, 0.0])
            .cpt("Q", ["S"], vec![1.0, 0.0, 0.5, 0.5])
            .build()
            .unwrap();
        let e = Evidence::from_pairs([("Q", 1)]);
        assert!(matches!(enumerate_joint(&net, &["S"], &e), Err(Error::InconsistentEvidence)));
    }

    #[test]
    fn capacity_cap() {
        let mut b = BayesianNetwork::builder();
        for i in 0..24 {
            let id = format!("V{i:02}");
            b = b
                .variable(DiscreteVariable::new(&id, ["0", "1"], crate::VariableRole::Auxiliary).unwrap())
                .cpt(id, Vec::<String>::new(), vec![0.5, 0.5]);
        }
        let net = b.build().unwrap();
        let err = enumerate_joint(&net, &["V00"], &Evidence::new()).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }
}
