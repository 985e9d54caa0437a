// Copyright 2026 The ptarm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Value types shared by the Ptree miner and the reference oracle.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("threshold `{0}` is not a number or percentage")]
    Unparsable(String),
    #[error("threshold {0} is outside (0, 1]")]
    OutOfRange(f64),
    #[error("fixed mode needs at least one decision item")]
    NoDecisions,
    #[error("decision item {0} does not exist")]
    UnknownItem(usize),
    #[error("no condition items left for antecedents")]
    NoConditions,
}

/// A fraction in `(0, 1]`, compared inclusively.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self, ConfigError> {
        if value > 0.0 && value <= 1.0 {
            Ok(Threshold(value))
        } else {
            Err(ConfigError::OutOfRange(value))
        }
    }

    /// Accepts `"10%"` or `"0.10"`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let t = text.trim();
        let value = match t.strip_suffix('%') {
            Some(pct) => pct.trim().parse::<f64>().map(|v| v / 100.0),
            None => t.parse::<f64>(),
        }
        .map_err(|_| ConfigError::Unparsable(text.to_string()))?;
        Threshold::new(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `num / den >= threshold`. Both sides round to the nearest double, so a
    /// ratio exactly equal to the decimal threshold is admitted.
    #[inline]
    pub fn admits(self, num: u64, den: u64) -> bool {
        den > 0 && num as f64 / den as f64 >= self.0
    }
}

impl TryFrom<f64> for Threshold {
    type Error = ConfigError;
    fn try_from(v: f64) -> Result<Self, ConfigError> {
        Threshold::new(v)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}%", self.0 * 100.0)
    }
}

/// Non-empty, strictly increasing list of item indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Itemset(Vec<usize>);

impl Itemset {
    /// Sorts and deduplicates. `None` when empty.
    pub fn new<I: IntoIterator<Item = usize>>(items: I) -> Option<Self> {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        (!v.is_empty()).then_some(Itemset(v))
    }

    pub fn single(item: usize) -> Self {
        Itemset(vec![item])
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    /// Copy without `item`; `None` if that leaves nothing.
    pub fn without(&self, item: usize) -> Option<Itemset> {
        Itemset::new(self.0.iter().copied().filter(|&i| i != item))
    }

    /// Copy with `item` added.
    pub fn with(&self, item: usize) -> Itemset {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&item) {
            v.insert(pos, item);
        }
        Itemset(v)
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequentItemset {
    pub itemset: Itemset,
    pub count: u64,
    pub support: f64,
}

impl FrequentItemset {
    pub fn new(itemset: Itemset, count: u64, n_rows: usize) -> Self {
        FrequentItemset {
            itemset,
            count,
            support: count as f64 / n_rows as f64,
        }
    }
}

/// `antecedent -> consequent` with a single consequent item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationRule {
    pub antecedent: Itemset,
    pub consequent: usize,
    /// Rows holding antecedent and consequent.
    pub count: u64,
    /// Rows holding the antecedent.
    pub antecedent_count: u64,
    pub support: f64,
    pub confidence: f64,
}

impl AssociationRule {
    pub fn new(antecedent: Itemset, consequent: usize, count: u64, antecedent_count: u64, n_rows: usize) -> Self {
        AssociationRule {
            antecedent,
            consequent,
            count,
            antecedent_count,
            support: count as f64 / n_rows as f64,
            confidence: count as f64 / antecedent_count as f64,
        }
    }

    /// Canonical rule order: consequent, antecedent size, antecedent.
    pub fn sort_key(&self) -> (usize, usize, &[usize]) {
        (self.consequent, self.antecedent.len(), self.antecedent.items())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Consequents restricted to the listed decision items.
    Fixed { decisions: Vec<usize> },
    /// Every item may serve as consequent.
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    pub minsup: Threshold,
    pub minconf: Threshold,
    pub mode: Mode,
    /// Largest antecedent to report; itemsets are mined one item deeper.
    pub max_antecedent: Option<usize>,
}

impl MiningConfig {
    pub fn new(minsup: Threshold, minconf: Threshold, mode: Mode) -> Self {
        MiningConfig {
            minsup,
            minconf,
            mode,
            max_antecedent: None,
        }
    }

    pub fn validate(&self, n_items: usize) -> Result<(), ConfigError> {
        if let Mode::Fixed { decisions } = &self.mode {
            if decisions.is_empty() {
                return Err(ConfigError::NoDecisions);
            }
            if let Some(&d) = decisions.iter().find(|&&d| d >= n_items) {
                return Err(ConfigError::UnknownItem(d));
            }
            let mut distinct = decisions.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() >= n_items {
                return Err(ConfigError::NoConditions);
            }
        }
        Ok(())
    }

    /// Items allowed on the right-hand side, ascending.
    pub fn consequents(&self, n_items: usize) -> Vec<usize> {
        match &self.mode {
            Mode::Free => (0..n_items).collect(),
            Mode::Fixed { decisions } => {
                let mut d = decisions.clone();
                d.sort_unstable();
                d.dedup();
                d
            }
        }
    }

    /// Deepest itemset level worth mining.
    pub fn max_level(&self) -> Option<usize> {
        self.max_antecedent.map(|m| m + 1)
    }
}

/// Frequent itemsets by level (level `k` holds the `k+1`-itemsets) and the
/// strong rules derived from them.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MiningResult {
    pub n_rows: usize,
    pub levels: Vec<Vec<FrequentItemset>>,
    pub rules: Vec<AssociationRule>,
}

impl MiningResult {
    pub fn itemsets(&self) -> impl Iterator<Item = &FrequentItemset> {
        self.levels.iter().flatten()
    }

    pub fn frequent_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Looks up a rule by its antecedent and consequent.
    pub fn rule(&self, antecedent: &[usize], consequent: usize) -> Option<&AssociationRule> {
        self.rules
            .iter()
            .find(|r| r.consequent == consequent && r.antecedent.items() == antecedent)
    }
}
