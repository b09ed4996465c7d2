use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BayesianNetwork, VariableRole};

/// Absolute tolerance for CPT row sums.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    /// The variable lies on a directed cycle.
    Cycle,
    /// A CPT row (one parent configuration) does not sum to one.
    RowNotNormalized { row: usize, sum: f64 },
    QuestionHasChild { child: String },
    QuestionWithoutSkillParent,
    SkillHasNonSkillParent { parent: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub variable: String,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = &self.variable;
        match &self.kind {
            ViolationKind::Cycle => write!(f, "{v}: variable lies on a directed cycle"),
            ViolationKind::RowNotNormalized { row, sum } => {
                write!(f, "{v}: CPT row not normalized (row {row} sums to {sum})")
            }
            ViolationKind::QuestionHasChild { child } => {
                write!(f, "{v}: question has child `{child}`")
            }
            ViolationKind::QuestionWithoutSkillParent => {
                write!(f, "{v}: question has no skill parent")
            }
            ViolationKind::SkillHasNonSkillParent { parent } => {
                write!(f, "{v}: skill has non-skill parent `{parent}`")
            }
        }
    }
}

/// All violations found in a network, ordered by variable id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn for_variable<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Violation> {
        self.violations.iter().filter(move |v| v.variable == id)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks acyclicity, CPT normalisation and the questionnaire structure:
/// questions are leaves with at least one skill parent, and skills have only
/// skill parents.
pub fn validate_network(net: &BayesianNetwork) -> ValidationReport {
    let mut violations = Vec::new();
    let on_cycle = cycle_members(net);
    for (i, var) in net.variables().iter().enumerate() {
        let id = var.id();
        let push = |violations: &mut Vec<Violation>, kind| {
            violations.push(Violation { variable: id.to_string(), kind })
        };
        if on_cycle[i] {
            push(&mut violations, ViolationKind::Cycle);
        }

        let cpt = net.cpt_at(i);
        let k = var.cardinality();
        for (row, chunk) in cpt.table().chunks(k).enumerate() {
            let sum: f64 = chunk.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                push(&mut violations, ViolationKind::RowNotNormalized { row, sum });
            }
        }

        let role_of = |p: &str| net.variable(p).map(|v| v.role());
        match var.role() {
            VariableRole::Question => {
                for child in net.children(id) {
                    push(&mut violations, ViolationKind::QuestionHasChild { child: child.clone() });
                }
                let has_skill_parent =
                    net.parents_at(i).iter().any(|p| role_of(p) == Some(VariableRole::Skill));
                if !has_skill_parent {
                    push(&mut violations, ViolationKind::QuestionWithoutSkillParent);
                }
            }
            VariableRole::Skill => {
                for p in net.parents_at(i) {
                    if role_of(p) != Some(VariableRole::Skill) {
                        push(
                            &mut violations,
                            ViolationKind::SkillHasNonSkillParent { parent: p.clone() },
                        );
                    }
                }
            }
            VariableRole::Auxiliary => {}
        }
    }
    // Stable sort keeps per-variable check order.
    violations.sort_by(|a, b| a.variable.cmp(&b.variable));
    ValidationReport { violations }
}

/// Marks variables that can reach themselves along parent-to-child edges.
fn cycle_members(net: &BayesianNetwork) -> Vec<bool> {
    let n = net.len();
    let ids: Vec<&str> = net.variables().iter().map(|v| v.id()).collect();
    (0..n)
        .map(|start| {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = net
                .children(ids[start])
                .iter()
                .map(|c| net.index_of(c).unwrap())
                .collect();
            while let Some(i) = stack.pop() {
                if i == start {
                    return true;
                }
                if std::mem::replace(&mut seen[i], true) {
                    continue;
                }
                stack.extend(net.children(ids[i]).iter().map(|c| net.index_of(c).unwrap()));
            }
            false
        })
        .collect()
}
