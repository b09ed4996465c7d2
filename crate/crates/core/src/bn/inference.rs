//! Exact posterior inference by variable elimination.

use std::collections::BTreeSet;

use super::{BayesianNetwork, Evidence, Factor};
use crate::error::{structural, Error, Result};

/// Normalised joint posterior over `targets` given `evidence`.
///
/// The output scope follows the order of `targets`. Only the ancestral
/// closure of targets and evidence takes part; other variables sum to one
/// and are pruned. Non-target variables are eliminated in min-fill order
/// with ties broken by variable id.
pub fn posterior<S: AsRef<str>>(
    net: &BayesianNetwork,
    targets: &[S],
    evidence: &Evidence,
) -> Result<Factor> {
    let targets = check_query(net, targets, evidence)?;

    let seeds = targets
        .iter()
        .map(|t| net.index_of(t).unwrap())
        .chain(evidence.keys().map(|v| net.index_of(v).unwrap()));
    let keep = net.ancestral_closure(seeds);

    let mut factors = Vec::new();
    let mut hidden = BTreeSet::new();
    for (i, v) in net.variables().iter().enumerate() {
        if !keep[i] {
            continue;
        }
        factors.push(net.cpt_at(i).reduce(evidence)?);
        if !evidence.contains(v.id()) && !targets.contains(&v.id()) {
            hidden.insert(v.id().to_string());
        }
    }

    while let Some(var) = next_to_eliminate(&factors, &hidden) {
        hidden.remove(&var);
        let (with, without): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.position(&var).is_some());
        factors = without;
        let mut iter = with.into_iter();
        let first = iter.next().expect("hidden variable appears in some factor");
        let joined = iter.try_fold(first, |acc, f| acc.product(&f))?;
        factors.push(joined.marginalize(&var)?);
    }

    let joint = factors
        .iter()
        .try_fold(Factor::scalar(1.0), |acc, f| acc.product(f))?;
    let joint = joint.permute(&targets)?;
    let z = joint.total();
    if z.is_nan() || z <= 0.0 {
        return Err(Error::InconsistentEvidence);
    }
    joint.normalized()
}

/// Validates a posterior query and returns the targets as string slices.
pub(crate) fn check_query<'a, S: AsRef<str>>(
    net: &BayesianNetwork,
    targets: &'a [S],
    evidence: &Evidence,
) -> Result<Vec<&'a str>> {
    if targets.is_empty() {
        return Err(structural("posterior query needs at least one target"));
    }
    net.check_evidence(evidence)?;
    let mut out: Vec<&str> = Vec::with_capacity(targets.len());
    for t in targets {
        let t = t.as_ref();
        net.require(t)?;
        if evidence.contains(t) {
            return Err(structural(format!("target `{t}` is also observed")));
        }
        if out.contains(&t) {
            return Err(structural(format!("target `{t}` listed twice")));
        }
        out.push(t);
    }
    Ok(out)
}

/// Picks the hidden variable whose elimination adds the fewest fill edges.
fn next_to_eliminate(factors: &[Factor], hidden: &BTreeSet<String>) -> Option<String> {
    let mut best: Option<(usize, &String)> = None;
    // BTreeSet iteration is ordered by id, so strict `<` keeps the smallest id on ties.
    for var in hidden {
        let mut neighbours: BTreeSet<&str> = BTreeSet::new();
        for f in factors.iter().filter(|f| f.position(var).is_some()) {
            neighbours.extend(f.scope().iter().map(String::as_str).filter(|v| *v != var));
        }
        let nb: Vec<&str> = neighbours.into_iter().collect();
        let mut fill = 0;
        for (i, a) in nb.iter().enumerate() {
            for b in &nb[i + 1..] {
                let connected = factors.iter().any(|f| {
                    f.position(a).is_some() && f.position(b).is_some()
                });
                if !connected {
                    fill += 1;
                }
            }
        }
        if best.is_none_or(|(f, _)| fill < f) {
            best = Some((fill, var));
        }
    }
    best.map(|(_, v)| v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    #[test]
    fn net_a_bayes_rule() {
        let net = fixtures::net_a_network();
        let e = Evidence::from_pairs([("Q1", 0)]);
        let p = posterior(&net, &["S"], &e).unwrap();
        assert_abs_diff_eq!(p.table()[0], 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(p.table()[1], 0.1, epsilon = 1e-12);

        let prior = posterior(&net, &["S"], &Evidence::new()).unwrap();
        assert_abs_diff_eq!(prior.table()[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn query_errors() {
        let net = fixtures::net_a_network();
        let e = Evidence::from_pairs([("Q1", 0)]);
        assert!(matches!(posterior(&net, &["Q1"], &e), Err(Error::Structural(_))));
        assert!(posterior::<&str>(&net, &[], &e).is_err());
        assert!(posterior(&net, &["S", "S"], &e).is_err());
        assert!(posterior(&net, &["nope"], &e).is_err());
        let bad = Evidence::from_pairs([("Q1", 5)]);
        assert!(posterior(&net, &["S"], &bad).is_err());
    }

    #[test]
    fn zero_probability_evidence_is_an_error() {
        let net = BayesianNetwork::builder()
            .variable(crate::bn::DiscreteVariable::skill("S", ["y", "n"]).unwrap())
            .variable(crate::bn::DiscreteVariable::question("Q", ["y", "n"]).unwrap())
            .cpt("S", Vec::<String>::new(), vec![1.0, 0.0])
            .cpt("Q", ["S"], vec![1.0, 0.0, 0.5, 0.5])
            .build()
            .unwrap();
        let e = Evidence::from_pairs([("Q", 1)]);
        assert!(matches!(posterior(&net, &["S"], &e), Err(Error::InconsistentEvidence)));
    }

    #[test]
    fn target_order_is_respected() {
        let net = fixtures::net_b_network();
        let e = Evidence::from_pairs([("Q2", 0)]);
        let a = posterior(&net, &["S1", "S2"], &e).unwrap();
        let b = posterior(&net, &["S2", "S1"], &e).unwrap();
        assert_eq!(b.scope(), ["S2", "S1"]);
        let back = b.permute(&["S1", "S2"]).unwrap();
        for (x, y) in a.table().iter().zip(back.table()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }
}
