use serde::{Deserialize, Serialize};

use super::Evidence;
use crate::error::{structural, Result};

/// A non-negative table over an ordered tuple of discrete variables.
///
/// Entries are stored row-major over the scope's state indices with the last
/// scope variable varying fastest. A factor with an empty scope is a scalar
/// holding one entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    scope: Vec<String>,
    cards: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<String>, cards: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        if scope.len() != cards.len() {
            return Err(structural(format!(
                "scope has {} variables but {} cardinalities were given",
                scope.len(),
                cards.len()
            )));
        }
        for (i, v) in scope.iter().enumerate() {
            if scope[..i].contains(v) {
                return Err(structural(format!("variable `{v}` appears twice in scope")));
            }
        }
        if let Some(pos) = cards.iter().position(|&c| c == 0) {
            return Err(structural(format!("variable `{}` has cardinality 0", scope[pos])));
        }
        let expected: usize = cards.iter().product();
        if table.len() != expected {
            return Err(structural(format!(
                "table has {} entries, scope requires {expected}",
                table.len()
            )));
        }
        if let Some(pos) = table.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(structural(format!(
                "table entry {pos} is {} (entries must be finite and non-negative)",
                table[pos]
            )));
        }
        Ok(Self { scope, cards, table })
    }

    /// Convenience constructor taking `(id, cardinality)` pairs.
    pub fn from_pairs<S: Into<String>>(
        vars: impl IntoIterator<Item = (S, usize)>,
        table: Vec<f64>,
    ) -> Result<Self> {
        let (scope, cards) = vars.into_iter().map(|(s, c)| (s.into(), c)).unzip();
        Self::new(scope, cards, table)
    }

    pub fn scalar(value: f64) -> Self {
        Self { scope: Vec::new(), cards: Vec::new(), table: vec![value] }
    }

    /// All-ones factor over the given variables.
    pub fn unit<S: Into<String>>(vars: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let (scope, cards): (Vec<String>, Vec<usize>) =
            vars.into_iter().map(|(s, c)| (s.into(), c)).unzip();
        let n = cards.iter().product();
        Self::new(scope, cards, vec![1.0; n])
    }

    pub fn scope(&self) -> &[String] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn into_table(self) -> Vec<f64> {
        self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn position(&self, var: &str) -> Option<usize> {
        self.scope.iter().position(|v| v == var)
    }

    pub fn cardinality(&self, var: &str) -> Option<usize> {
        self.position(var).map(|i| self.cards[i])
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }

    pub(crate) fn strides(cards: &[usize]) -> Vec<usize> {
        let mut strides = vec![1; cards.len()];
        for i in (0..cards.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * cards[i + 1];
        }
        strides
    }

    /// Entry for a full assignment of the scope, given in scope order.
    pub fn get(&self, states: &[usize]) -> Option<f64> {
        if states.len() != self.scope.len() {
            return None;
        }
        let mut idx = 0;
        for ((&s, &c), stride) in states.iter().zip(&self.cards).zip(Self::strides(&self.cards)) {
            if s >= c {
                return None;
            }
            idx += s * stride;
        }
        Some(self.table[idx])
    }

    /// Pointwise product over the union of both scopes.
    ///
    /// The result scope is `self`'s scope followed by the variables of
    /// `other` not already present, in `other`'s order.
    pub fn product(&self, other: &Factor) -> Result<Factor> {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (v, &c) in other.scope.iter().zip(&other.cards) {
            match self.position(v) {
                Some(i) if self.cards[i] != c => {
                    return Err(structural(format!(
                        "variable `{v}` has cardinality {} in one factor and {c} in the other",
                        self.cards[i]
                    )));
                }
                Some(_) => {}
                None => {
                    scope.push(v.clone());
                    cards.push(c);
                }
            }
        }

        // Stride of each result variable inside each operand (0 when absent).
        let a_strides = Self::strides(&self.cards);
        let b_strides = Self::strides(&other.cards);
        let a_step: Vec<usize> = scope
            .iter()
            .map(|v| self.position(v).map_or(0, |i| a_strides[i]))
            .collect();
        let b_step: Vec<usize> = scope
            .iter()
            .map(|v| other.position(v).map_or(0, |i| b_strides[i]))
            .collect();

        let n: usize = cards.iter().product();
        let mut table = Vec::with_capacity(n);
        let mut counter = vec![0usize; scope.len()];
        let (mut ai, mut bi) = (0usize, 0usize);
        for _ in 0..n {
            table.push(self.table[ai] * other.table[bi]);
            // Odometer increment, last variable fastest.
            for d in (0..scope.len()).rev() {
                counter[d] += 1;
                ai += a_step[d];
                bi += b_step[d];
                if counter[d] < cards[d] {
                    break;
                }
                ai -= a_step[d] * cards[d];
                bi -= b_step[d] * cards[d];
                counter[d] = 0;
            }
        }
        Ok(Factor { scope, cards, table })
    }

    /// Sums `var` out of the factor.
    pub fn marginalize(&self, var: &str) -> Result<Factor> {
        let pos = self
            .position(var)
            .ok_or_else(|| structural(format!("cannot marginalize `{var}`: not in scope")))?;
        let card = self.cards[pos];
        let inner: usize = self.cards[pos + 1..].iter().product();
        let outer: usize = self.cards[..pos].iter().product();
        let mut table = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..card {
                let base = (o * card + s) * inner;
                let out = &mut table[o * inner..(o + 1) * inner];
                for (dst, src) in out.iter_mut().zip(&self.table[base..base + inner]) {
                    *dst += *src;
                }
            }
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        Ok(Factor { scope, cards, table })
    }

    /// Restricts the factor to the entries consistent with `evidence` and
    /// drops the evidenced variables from the scope. No renormalisation.
    pub fn reduce(&self, evidence: &Evidence) -> Result<Factor> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.scope.len()];
        for (i, v) in self.scope.iter().enumerate() {
            if let Some(s) = evidence.get(v) {
                if s >= self.cards[i] {
                    return Err(structural(format!(
                        "evidence state {s} out of range for `{v}` (cardinality {})",
                        self.cards[i]
                    )));
                }
                fixed[i] = Some(s);
            }
        }
        if fixed.iter().all(Option::is_none) {
            return Ok(self.clone());
        }

        let strides = Self::strides(&self.cards);
        let mut base = 0;
        let mut scope = Vec::new();
        let mut cards = Vec::new();
        let mut free_strides = Vec::new();
        for i in 0..self.scope.len() {
            match fixed[i] {
                Some(s) => base += s * strides[i],
                None => {
                    scope.push(self.scope[i].clone());
                    cards.push(self.cards[i]);
                    free_strides.push(strides[i]);
                }
            }
        }
        let n: usize = cards.iter().product();
        let mut table = Vec::with_capacity(n);
        let mut counter = vec![0usize; cards.len()];
        let mut idx = base;
        for _ in 0..n {
            table.push(self.table[idx]);
            for d in (0..cards.len()).rev() {
                counter[d] += 1;
                idx += free_strides[d];
                if counter[d] < cards[d] {
                    break;
                }
                idx -= free_strides[d] * cards[d];
                counter[d] = 0;
            }
        }
        Ok(Factor { scope, cards, table })
    }

    /// Reorders the scope to `order`, which must be a permutation of it.
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Factor> {
        if order.len() != self.scope.len() {
            return Err(structural("permutation length differs from scope length"));
        }
        let mut src_pos = Vec::with_capacity(order.len());
        for v in order {
            let v = v.as_ref();
            let p = self
                .position(v)
                .ok_or_else(|| structural(format!("`{v}` is not in scope")))?;
            if src_pos.contains(&p) {
                return Err(structural(format!("`{v}` repeated in permutation")));
            }
            src_pos.push(p);
        }
        if src_pos.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let src_strides = Self::strides(&self.cards);
        let cards: Vec<usize> = src_pos.iter().map(|&p| self.cards[p]).collect();
        let step: Vec<usize> = src_pos.iter().map(|&p| src_strides[p]).collect();
        let n = self.table.len();
        let mut table = Vec::with_capacity(n);
        let mut counter = vec![0usize; cards.len()];
        let mut idx = 0;
        for _ in 0..n {
            table.push(self.table[idx]);
            for d in (0..cards.len()).rev() {
                counter[d] += 1;
                idx += step[d];
                if counter[d] < cards[d] {
                    break;
                }
                idx -= step[d] * cards[d];
                counter[d] = 0;
            }
        }
        Ok(Factor {
            scope: order.iter().map(|v| v.as_ref().to_string()).collect(),
            cards,
            table,
        })
    }

    /// Copy of the factor scaled to total mass 1. Fails when the mass is 0.
    pub fn normalized(&self) -> Result<Factor> {
        let z = self.total();
        if z <= 0.0 || !z.is_finite() {
            return Err(structural("cannot normalize a factor with zero total mass"));
        }
        Ok(Factor {
            scope: self.scope.clone(),
            cards: self.cards.clone(),
            table: self.table.iter().map(|x| x / z).collect(),
        })
    }

    /// Whether the entries sum to one within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total() - 1.0).abs() <= tol
    }
}
