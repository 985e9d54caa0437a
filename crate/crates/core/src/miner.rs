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

//! Level-wise frequent itemset mining over count trees.
//!
//! Supports come from root counts: a 1-itemset's support is its tree's root
//! count, a k-itemset's is the root count of the AND of its items' trees.
//! The bitmap table is never consulted once trees exist.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{AssociationRule, ConfigError, FrequentItemset, Itemset, MiningConfig, MiningResult, Threshold};
use crate::ptree::{PTree, PtreeError};
use crate::store::{StoreError, StoredDatabase};

#[derive(Debug, Error)]
pub enum MinerError {
    #[error(transparent)]
    Tree(#[from] PtreeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("no tree for item {0}")]
    MissingItem(usize),
    #[error("subset {0} of a frequent itemset has no recorded count")]
    MissingSubset(Itemset),
    #[error("table has no rows")]
    NoRows,
    #[error("thread pool: {0}")]
    Threads(String),
}

/// Execution knobs that never change the result.
#[derive(Debug, Clone, Copy)]
pub struct MinerOptions {
    /// Worker threads for support counting within a level; 1 runs inline.
    pub threads: usize,
    /// Upper bound on tree nodes kept for frequent k-itemsets so that level
    /// k+1 needs a single AND per candidate. Past it, candidates fall back to
    /// ANDing base trees.
    pub cache_node_budget: usize,
}

impl Default for MinerOptions {
    fn default() -> Self {
        MinerOptions {
            threads: 1,
            cache_node_budget: 1 << 23,
        }
    }
}

/// Per-item base trees, possibly sparse.
pub trait BaseTrees: Sync {
    fn tree(&self, item: usize) -> Option<&PTree>;
    fn n_items(&self) -> usize;
}

impl BaseTrees for [PTree] {
    fn tree(&self, item: usize) -> Option<&PTree> {
        self.get(item)
    }
    fn n_items(&self) -> usize {
        self.len()
    }
}

impl BaseTrees for Vec<PTree> {
    fn tree(&self, item: usize) -> Option<&PTree> {
        self.get(item)
    }
    fn n_items(&self) -> usize {
        self.len()
    }
}

impl BaseTrees for [Option<PTree>] {
    fn tree(&self, item: usize) -> Option<&PTree> {
        self.get(item).and_then(Option::as_ref)
    }
    fn n_items(&self) -> usize {
        self.len()
    }
}

/// Frequent 1-itemsets among `item_filter`, ascending by item, read from
/// root counts only.
pub fn frequent_one_itemsets<B: BaseTrees + ?Sized>(
    trees: &B,
    n_rows: usize,
    minsup: Threshold,
    item_filter: &[usize],
) -> Result<Vec<FrequentItemset>, MinerError> {
    let mut items = item_filter.to_vec();
    items.sort_unstable();
    items.dedup();
    let mut out = Vec::new();
    for i in items {
        let count = trees.tree(i).ok_or(MinerError::MissingItem(i))?.root_count();
        if minsup.admits(count, n_rows as u64) {
            out.push(FrequentItemset::new(Itemset::single(i), count, n_rows));
        }
    }
    Ok(out)
}

/// Apriori join and prune. `frequent` holds k-itemsets; the result holds
/// every (k+1)-itemset whose k-subsets are all in `frequent`, sorted.
pub fn candidate_gen(frequent: &[Itemset]) -> Vec<Itemset> {
    let mut sorted: Vec<&Itemset> = frequent.iter().collect();
    sorted.sort();
    sorted.dedup();
    let known: HashSet<&[usize]> = sorted.iter().map(|s| s.items()).collect();

    let mut out = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let k = sorted[start].len();
        let prefix = &sorted[start].items()[..k - 1];
        let mut end = start + 1;
        while end < sorted.len() && &sorted[end].items()[..k - 1] == prefix {
            end += 1;
        }
        for i in start..end {
            for j in i + 1..end {
                let last = sorted[j].items()[k - 1];
                let candidate = sorted[i].with(last);
                let closed = (0..k - 1).all(|drop| {
                    let sub: Vec<usize> = candidate
                        .items()
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != drop)
                        .map(|(_, &x)| x)
                        .collect();
                    known.contains(sub.as_slice())
                });
                if closed {
                    out.push(candidate);
                }
            }
        }
        start = end;
    }
    out.sort();
    out
}

/// Support count of `itemset`: root count of the AND of its items' trees.
pub fn support_count<B: BaseTrees + ?Sized>(itemset: &Itemset, trees: &B) -> Result<u64, MinerError> {
    let operands = itemset
        .items()
        .iter()
        .map(|&i| trees.tree(i).ok_or(MinerError::MissingItem(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PTree::and_many(&operands)?.root_count())
}

/// Strong rules from a downward-closed collection of frequent itemsets.
/// Confidence uses stored counts only.
pub fn derive_rules(
    frequents: &[FrequentItemset],
    config: &MiningConfig,
    n_items: usize,
    n_rows: usize,
) -> Result<Vec<AssociationRule>, MinerError> {
    let counts: HashMap<&Itemset, u64> = frequents.iter().map(|f| (&f.itemset, f.count)).collect();
    let consequents: HashSet<usize> = config.consequents(n_items).into_iter().collect();
    let mut rules = Vec::new();
    for f in frequents.iter().filter(|f| f.itemset.len() >= 2) {
        if config.max_antecedent.is_some_and(|m| f.itemset.len() - 1 > m) {
            continue;
        }
        for &d in f.itemset.items().iter().filter(|d| consequents.contains(d)) {
            let antecedent = f.itemset.without(d).expect("itemset has two or more items");
            let ante_count = *counts
                .get(&antecedent)
                .ok_or_else(|| MinerError::MissingSubset(antecedent.clone()))?;
            if config.minconf.admits(f.count, ante_count) {
                rules.push(AssociationRule::new(antecedent, d, f.count, ante_count, n_rows));
            }
        }
    }
    rules.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(rules)
}

struct Scored {
    itemset: Itemset,
    count: u64,
    tree: Option<PTree>,
}

fn score_candidate<B: BaseTrees + ?Sized>(
    candidate: Itemset,
    base: &B,
    cache: &HashMap<Itemset, PTree>,
    keep_tree: bool,
) -> Result<Scored, MinerError> {
    let items = candidate.items();
    let (last, prefix) = items.split_last().expect("candidates are non-empty");
    let last_tree = base.tree(*last).ok_or(MinerError::MissingItem(*last))?;
    let prefix_tree = match prefix {
        [] => None,
        [single] => base.tree(*single),
        _ => Itemset::new(prefix.iter().copied()).and_then(|p| cache.get(&p)),
    };
    let (count, tree) = match (prefix_tree, keep_tree) {
        (Some(p), false) => (p.and_count(last_tree)?, None),
        (Some(p), true) => {
            let t = p.and(last_tree)?;
            (t.root_count(), Some(t))
        }
        (None, _) => {
            let operands = items
                .iter()
                .map(|&i| base.tree(i).ok_or(MinerError::MissingItem(i)))
                .collect::<Result<Vec<_>, _>>()?;
            let t = PTree::and_many(&operands)?;
            (t.root_count(), keep_tree.then_some(t))
        }
    };
    Ok(Scored {
        itemset: candidate,
        count,
        tree,
    })
}

fn mine_levels<B: BaseTrees + ?Sized>(
    base: &B,
    n_rows: usize,
    config: &MiningConfig,
    opts: &MinerOptions,
    first: Vec<FrequentItemset>,
) -> Result<MiningResult, MinerError> {
    let pool = if opts.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.threads)
                .build()
                .map_err(|e| MinerError::Threads(e.to_string()))?,
        )
    } else {
        None
    };
    let max_level = config.max_level().unwrap_or(usize::MAX);

    let mut levels: Vec<Vec<FrequentItemset>> = Vec::new();
    let mut current = first;
    // Trees of the current level's frequent itemsets (k >= 2); 1-itemsets
    // use the base trees.
    let mut cache: HashMap<Itemset, PTree> = HashMap::new();
    let mut k = 1;
    while !current.is_empty() {
        let itemsets: Vec<Itemset> = current.iter().map(|f| f.itemset.clone()).collect();
        levels.push(std::mem::take(&mut current));
        if k >= max_level {
            break;
        }
        let candidates = candidate_gen(&itemsets);
        if candidates.is_empty() {
            break;
        }
        let keep_tree = k + 1 < max_level;
        let prefix_cache = std::mem::take(&mut cache);
        let score = |c: Itemset| score_candidate(c, base, &prefix_cache, keep_tree);
        let scored: Vec<Scored> = match &pool {
            Some(pool) => pool.install(|| candidates.into_par_iter().map(score).collect::<Result<Vec<_>, _>>())?,
            None => candidates.into_iter().map(score).collect::<Result<Vec<_>, _>>()?,
        };

        let mut budget = opts.cache_node_budget;
        for s in scored {
            if !config.minsup.admits(s.count, n_rows as u64) {
                continue;
            }
            if let Some(t) = s.tree {
                let nodes = t.node_count();
                if nodes <= budget {
                    budget -= nodes;
                    cache.insert(s.itemset.clone(), t);
                }
            }
            current.push(FrequentItemset::new(s.itemset, s.count, n_rows));
        }
        k += 1;
    }

    let all: Vec<FrequentItemset> = levels.iter().flatten().cloned().collect();
    let rules = derive_rules(&all, config, base.n_items(), n_rows)?;
    Ok(MiningResult { n_rows, levels, rules })
}

/// Mines all frequent itemsets and strong rules from per-item trees.
///
/// Itemsets come out by size then lexicographically; rules by consequent,
/// antecedent size, then antecedent. Output does not depend on
/// `opts.threads`.
pub fn bf_arm(
    trees: &[PTree],
    n_rows: usize,
    config: &MiningConfig,
    opts: &MinerOptions,
) -> Result<MiningResult, MinerError> {
    if n_rows == 0 {
        return Err(MinerError::NoRows);
    }
    config.validate(trees.len())?;
    if let Some(first) = trees.first() {
        if let Some(t) = trees.iter().find(|t| t.len() != first.len()) {
            return Err(PtreeError::LengthMismatch(first.len(), t.len()).into());
        }
    }
    let all: Vec<usize> = (0..trees.len()).collect();
    let first = frequent_one_itemsets(trees, n_rows, config.minsup, &all)?;
    mine_levels(trees, n_rows, config, opts, first)
}

/// Mines a stored database. Frequent 1-itemsets come from file headers;
/// only the trees of frequent items are loaded.
pub fn bf_arm_stored(
    db: &StoredDatabase,
    config: &MiningConfig,
    opts: &MinerOptions,
) -> Result<MiningResult, MinerError> {
    let n_rows = db.n_rows();
    if n_rows == 0 {
        return Err(MinerError::NoRows);
    }
    let n_items = db.manifest().items.len();
    config.validate(n_items)?;
    let mut first = Vec::new();
    let mut trees: Vec<Option<PTree>> = vec![None; n_items];
    for (i, slot) in trees.iter_mut().enumerate() {
        let count = db.peek(i)?;
        if config.minsup.admits(count, n_rows as u64) {
            *slot = Some(db.load(i)?);
            first.push(FrequentItemset::new(Itemset::single(i), count, n_rows));
        }
    }
    mine_levels(trees.as_slice(), n_rows, config, opts, first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitColumn;
    use crate::model::Mode;

    fn sets(v: &[&[usize]]) -> Vec<Itemset> {
        v.iter().map(|s| Itemset::new(s.iter().copied()).unwrap()).collect()
    }

    // Toy table columns A..G over 8 rows, padded to 16.
    fn toy_trees() -> Vec<PTree> {
        [
            "11000000", "11110011", "01000000", "01101101", "01010111", "01001001", "00111100",
        ]
        .iter()
        .map(|s| {
            let mut c = BitColumn::parse(s).unwrap();
            c.pad_to(16);
            PTree::build(&c).unwrap()
        })
        .collect()
    }

    fn th(v: f64) -> Threshold {
        Threshold::new(v).unwrap()
    }

    #[test]
    fn candidate_gen_examples() {
        let (a, b, c) = (0, 1, 2);
        assert_eq!(
            candidate_gen(&sets(&[&[a], &[b], &[c]])),
            sets(&[&[a, b], &[a, c], &[b, c]])
        );
        assert!(candidate_gen(&sets(&[&[a, b], &[a, c]])).is_empty());
        assert_eq!(candidate_gen(&sets(&[&[a, b], &[a, c], &[b, c]])), sets(&[&[a, b, c]]));
        assert!(candidate_gen(&[]).is_empty());
    }

    #[test]
    fn frequent_ones_on_toy() {
        let trees = toy_trees();
        let all: Vec<usize> = (0..7).collect();
        assert_eq!(frequent_one_itemsets(&trees, 8, th(0.1), &all).unwrap().len(), 7);
        assert!(frequent_one_itemsets(&trees, 8, th(1.0), &all).unwrap().is_empty());
        let tiny = frequent_one_itemsets(&trees, 8, th(1e-9), &all).unwrap();
        assert_eq!(tiny.len(), 7);
        assert_eq!(frequent_one_itemsets(&trees, 8, th(0.5), &all).unwrap().len(), 4);
    }

    #[test]
    fn support_counts_on_toy() {
        let trees = toy_trees();
        let (a, b, d, g) = (0, 1, 3, 6);
        assert_eq!(support_count(&Itemset::new([b, g]).unwrap(), &trees).unwrap(), 2);
        assert_eq!(support_count(&Itemset::new([a, g]).unwrap(), &trees).unwrap(), 0);
        assert_eq!(support_count(&Itemset::single(d), &trees).unwrap(), 5);
    }

    #[test]
    fn derive_rules_examples() {
        let (d, f, g) = (3, 5, 6);
        let fr = |s: &[usize], c| FrequentItemset::new(Itemset::new(s.iter().copied()).unwrap(), c, 8);
        let config = MiningConfig::new(th(0.1), th(0.3), Mode::Fixed { decisions: vec![g] });
        let rules = derive_rules(&[fr(&[d], 5), fr(&[g], 4), fr(&[d, g], 3)], &config, 7, 8).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].support, 0.375);
        assert_eq!(rules[0].confidence, 0.6);

        let config_f = MiningConfig::new(th(0.1), th(0.3), Mode::Fixed { decisions: vec![f] });
        let rules = derive_rules(&[fr(&[f], 3), fr(&[g], 4), fr(&[f, g], 1)], &config_f, 7, 8).unwrap();
        assert!(rules.is_empty(), "G->F has confidence 1/4");

        let missing = derive_rules(&[fr(&[d, g], 3)], &config, 7, 8);
        assert!(matches!(missing, Err(MinerError::MissingSubset(_))));
    }

    #[test]
    fn bf_arm_toy_fixed_g() {
        let trees = toy_trees();
        let g = 6;
        let config = MiningConfig::new(th(0.1), th(0.3), Mode::Fixed { decisions: vec![g] });
        let res = bf_arm(&trees, 8, &config, &MinerOptions::default()).unwrap();
        let two: Vec<usize> = res
            .rules
            .iter()
            .filter(|r| r.antecedent.len() == 1)
            .map(|r| r.antecedent.items()[0])
            .collect();
        assert_eq!(two, vec![1, 3, 4, 5]); // B, D, E, F
        let bd = res.rule(&[1, 3], g).unwrap();
        assert_eq!((bd.count, bd.antecedent_count), (1, 3));
    }

    #[test]
    fn bf_arm_minsup_one_is_empty() {
        let trees = toy_trees();
        let config = MiningConfig::new(th(1.0), th(0.3), Mode::Free);
        let res = bf_arm(&trees, 8, &config, &MinerOptions::default()).unwrap();
        assert_eq!(res.frequent_count(), 0);
        assert!(res.rules.is_empty());
    }

    #[test]
    fn max_antecedent_limits_depth() {
        let trees = toy_trees();
        let mut config = MiningConfig::new(th(0.1), th(0.3), Mode::Free);
        config.max_antecedent = Some(1);
        let res = bf_arm(&trees, 8, &config, &MinerOptions::default()).unwrap();
        assert_eq!(res.levels.len(), 2);
        assert!(res.rules.iter().all(|r| r.antecedent.len() == 1));
    }

    #[test]
    fn threads_and_cache_do_not_change_output() {
        let trees = toy_trees();
        let config = MiningConfig::new(th(0.1), th(0.3), Mode::Free);
        let base = bf_arm(&trees, 8, &config, &MinerOptions::default()).unwrap();
        for opts in [
            MinerOptions {
                threads: 4,
                ..Default::default()
            },
            MinerOptions {
                threads: 1,
                cache_node_budget: 0,
            },
            MinerOptions {
                threads: 3,
                cache_node_budget: 5,
            },
        ] {
            assert_eq!(bf_arm(&trees, 8, &config, &opts).unwrap(), base);
        }
    }

    #[test]
    fn config_errors_propagate() {
        let trees = toy_trees();
        let config = MiningConfig::new(th(0.1), th(0.3), Mode::Fixed { decisions: vec![] });
        assert!(matches!(
            bf_arm(&trees, 8, &config, &MinerOptions::default()),
            Err(MinerError::Config(ConfigError::NoDecisions))
        ));
        let all = MiningConfig::new(
            th(0.1),
            th(0.3),
            Mode::Fixed {
                decisions: (0..7).collect(),
            },
        );
        assert!(matches!(
            bf_arm(&trees, 8, &all, &MinerOptions::default()),
            Err(MinerError::Config(ConfigError::NoConditions))
        ));
    }
}
