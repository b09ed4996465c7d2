use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{DiscreteVariable, Evidence, Factor, VariableRole};
use crate::error::{structural, Error, Result};

/// A discrete Bayesian network: variables, parent lists and one CPT per
/// variable with scope `(parents..., variable)`.
///
/// Construction checks only what is needed to index safely (unique ids,
/// known parents, CPT shapes). Semantic rules such as acyclicity, row
/// normalisation and the questionnaire structure are reported by
/// [`validate_network`](super::validate_network).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "NetworkParts", into = "NetworkParts")]
pub struct BayesianNetwork {
    variables: Vec<DiscreteVariable>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<String>>,
    children: Vec<Vec<String>>,
    cpts: Vec<Factor>,
}

#[derive(Serialize, Deserialize)]
struct NetworkParts {
    variables: Vec<DiscreteVariable>,
    cpts: Vec<CptSpec>,
}

#[derive(Serialize, Deserialize)]
struct CptSpec {
    variable: String,
    parents: Vec<String>,
    table: Vec<f64>,
}

impl TryFrom<NetworkParts> for BayesianNetwork {
    type Error = Error;

    fn try_from(parts: NetworkParts) -> Result<Self> {
        let mut b = NetworkBuilder::default();
        for v in parts.variables {
            b = b.variable(v);
        }
        for c in parts.cpts {
            b = b.cpt(c.variable, c.parents, c.table);
        }
        b.build()
    }
}

impl From<BayesianNetwork> for NetworkParts {
    fn from(net: BayesianNetwork) -> Self {
        let cpts = net
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| CptSpec {
                variable: v.id().to_string(),
                parents: net.parents[i].clone(),
                table: net.cpts[i].table().to_vec(),
            })
            .collect();
        NetworkParts { variables: net.variables, cpts }
    }
}

/// Structural equality: same variables, parent lists and CPTs, regardless
/// of declaration order.
impl PartialEq for BayesianNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self.variables.iter().enumerate().all(|(i, v)| {
                other.index_of(v.id()).is_some_and(|j| {
                    other.variables[j] == *v
                        && other.parents[j] == self.parents[i]
                        && other.cpts[j] == self.cpts[i]
                })
            })
    }
}

impl BayesianNetwork {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    pub fn variables(&self) -> &[DiscreteVariable] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn variable(&self, id: &str) -> Option<&DiscreteVariable> {
        self.index_of(id).map(|i| &self.variables[i])
    }

    pub(crate) fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| structural(format!("unknown variable `{id}`")))
    }

    pub fn cardinality(&self, id: &str) -> Option<usize> {
        self.variable(id).map(DiscreteVariable::cardinality)
    }

    pub fn parents(&self, id: &str) -> &[String] {
        self.index_of(id).map_or(&[], |i| &self.parents[i])
    }

    pub fn children(&self, id: &str) -> &[String] {
        self.index_of(id).map_or(&[], |i| &self.children[i])
    }

    pub fn cpt(&self, id: &str) -> Option<&Factor> {
        self.index_of(id).map(|i| &self.cpts[i])
    }

    pub(crate) fn parents_at(&self, i: usize) -> &[String] {
        &self.parents[i]
    }

    pub(crate) fn cpt_at(&self, i: usize) -> &Factor {
        &self.cpts[i]
    }

    pub fn ids_with_role(&self, role: VariableRole) -> impl Iterator<Item = &str> {
        self.variables.iter().filter(move |v| v.role() == role).map(DiscreteVariable::id)
    }

    /// Checks that every observed variable exists and its state is in range.
    pub fn check_evidence(&self, e: &Evidence) -> Result<()> {
        for (var, s) in e.iter() {
            let card = self
                .cardinality(var)
                .ok_or_else(|| structural(format!("evidence on unknown variable `{var}`")))?;
            if s >= card {
                return Err(structural(format!(
                    "evidence state {s} out of range for `{var}` (cardinality {card})"
                )));
            }
        }
        Ok(())
    }

    /// Indices of `seeds` together with all their ancestors.
    pub(crate) fn ancestral_closure(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut keep = vec![false; self.variables.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(i) = stack.pop() {
            if keep[i] {
                continue;
            }
            keep[i] = true;
            for p in &self.parents[i] {
                stack.push(self.index[p]);
            }
        }
        keep
    }

    /// Topological order of variable indices, or `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.variables.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop() {
            order.push(i);
            for c in &self.children[i] {
                let j = self.index[c];
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// Incremental constructor for [`BayesianNetwork`].
///
/// CPT rows are given flat, row-major over `(parents..., variable)`; parents
/// may be declared after the variables that reference them.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    variables: Vec<DiscreteVariable>,
    cpts: Vec<(String, Vec<String>, Vec<f64>)>,
}

impl NetworkBuilder {
    pub fn variable(mut self, v: DiscreteVariable) -> Self {
        self.variables.push(v);
        self
    }

    pub fn cpt<S: Into<String>>(
        mut self,
        id: impl Into<String>,
        parents: impl IntoIterator<Item = S>,
        table: Vec<f64>,
    ) -> Self {
        self.cpts
            .push((id.into(), parents.into_iter().map(Into::into).collect(), table));
        self
    }

    pub fn build(self) -> Result<BayesianNetwork> {
        let mut index = HashMap::with_capacity(self.variables.len());
        for (i, v) in self.variables.iter().enumerate() {
            if index.insert(v.id().to_string(), i).is_some() {
                return Err(structural(format!("duplicate variable id `{}`", v.id())));
            }
        }
        let n = self.variables.len();
        let mut parents: Vec<Option<Vec<String>>> = vec![None; n];
        let mut cpts: Vec<Option<Factor>> = vec![None; n];
        for (id, ps, table) in self.cpts {
            let i = *index
                .get(&id)
                .ok_or_else(|| structural(format!("CPT given for unknown variable `{id}`")))?;
            if cpts[i].is_some() {
                return Err(structural(format!("more than one CPT for `{id}`")));
            }
            let mut scope = Vec::with_capacity(ps.len() + 1);
            let mut cards = Vec::with_capacity(ps.len() + 1);
            for p in &ps {
                let j = *index.get(p).ok_or_else(|| {
                    structural(format!("parent `{p}` of `{id}` is not a variable"))
                })?;
                if j == i {
                    return Err(structural(format!("`{id}` lists itself as parent")));
                }
                scope.push(p.clone());
                cards.push(self.variables[j].cardinality());
            }
            scope.push(id.clone());
            cards.push(self.variables[i].cardinality());
            let factor = Factor::new(scope, cards, table)
                .map_err(|e| structural(format!("CPT of `{id}`: {e}")))?;
            parents[i] = Some(ps);
            cpts[i] = Some(factor);
        }
        let mut children = vec![Vec::new(); n];
        let parents: Vec<Vec<String>> = parents
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| {
                    structural(format!("no CPT for `{}`", self.variables[i].id()))
                })
            })
            .collect::<Result<_>>()?;
        for (i, ps) in parents.iter().enumerate() {
            for p in ps {
                children[index[p]].push(self.variables[i].id().to_string());
            }
        }
        Ok(BayesianNetwork {
            variables: self.variables,
            index,
            parents,
            children,
            cpts: cpts.into_iter().map(Option::unwrap).collect(),
        })
    }
}
