use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{structural, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableRole {
    Skill,
    Question,
    Auxiliary,
}

/// A named categorical variable with at least two distinct state labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteVariable {
    id: String,
    states: Vec<String>,
    role: VariableRole,
}

impl DiscreteVariable {
    pub fn new<S: Into<String>>(
        id: impl Into<String>,
        states: impl IntoIterator<Item = S>,
        role: VariableRole,
    ) -> Result<Self> {
        let id = id.into();
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if id.is_empty() {
            return Err(structural("variable id must not be empty"));
        }
        if states.len() < 2 {
            return Err(structural(format!("variable `{id}` needs at least two states")));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(structural(format!("variable `{id}` repeats state label `{s}`")));
            }
        }
        Ok(Self { id, states, role })
    }

    pub fn skill<S: Into<String>>(
        id: impl Into<String>,
        states: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        Self::new(id, states, VariableRole::Skill)
    }

    pub fn question<S: Into<String>>(
        id: impl Into<String>,
        states: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        Self::new(id, states, VariableRole::Question)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn role(&self) -> VariableRole {
        self.role
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Observed states keyed by variable id; at most one state per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Evidence(BTreeMap<String, usize>);

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds evidence from pairs; later pairs overwrite earlier ones.
    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, usize)>) -> Self {
        Self(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    /// Adds an observation. Fails if the variable is already observed.
    pub fn insert(&mut self, var: impl Into<String>, state: usize) -> Result<()> {
        let var = var.into();
        if self.0.contains_key(&var) {
            return Err(structural(format!("`{var}` is already observed")));
        }
        self.0.insert(var, state);
        Ok(())
    }

    pub fn with(mut self, var: impl Into<String>, state: usize) -> Result<Self> {
        self.insert(var, state)?;
        Ok(self)
    }

    pub fn remove(&mut self, var: &str) -> Option<usize> {
        self.0.remove(var)
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.0.get(var).copied()
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_invariants() {
        assert!(DiscreteVariable::skill("S", ["yes"]).is_err());
        assert!(DiscreteVariable::skill("S", ["a", "a"]).is_err());
        assert!(DiscreteVariable::skill("", ["a", "b"]).is_err());
        let v = DiscreteVariable::question("Q", ["yes", "no"]).unwrap();
        assert_eq!(v.cardinality(), 2);
        assert_eq!(v.state_index("no"), Some(1));
        assert_eq!(v.role(), VariableRole::Question);
    }

    #[test]
    fn evidence_rejects_second_assignment() {
        let mut e = Evidence::new();
        e.insert("Q1", 0).unwrap();
        assert!(e.insert("Q1", 1).is_err());
        assert_eq!(e.get("Q1"), Some(0));
    }
}
