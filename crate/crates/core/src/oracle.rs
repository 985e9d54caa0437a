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

//! Reference implementations that work on horizontal transactions.
//!
//! Nothing here touches count trees or the miner: supports are counted by
//! scanning rows, candidates are generated by a separate extend-and-prune
//! routine, and rules are enumerated directly. Speed is not a goal.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{AssociationRule, FrequentItemset, Itemset, MiningConfig, MiningResult, Mode, Threshold};

fn meets(threshold: Threshold, num: u64, den: u64) -> bool {
    den != 0 && (num as f64) / (den as f64) >= threshold.value()
}

fn consequent_items(config: &MiningConfig, n_items: usize) -> BTreeSet<usize> {
    match &config.mode {
        Mode::Free => (0..n_items).collect(),
        Mode::Fixed { decisions } => decisions.iter().copied().collect(),
    }
}

/// Rows containing every item of `itemset`.
pub fn brute_force_support(itemset: &Itemset, rows: &[Vec<usize>]) -> u64 {
    rows.iter()
        .filter(|row| itemset.items().iter().all(|i| row.contains(i)))
        .count() as u64
}

/// Classical Apriori: one scan of `rows` per level. Returns all frequent
/// itemsets ordered by size, then lexicographically.
pub fn apriori_reference(rows: &[Vec<usize>], minsup: Threshold, max_len: Option<usize>) -> Vec<FrequentItemset> {
    let n = rows.len();
    let rows: Vec<BTreeSet<usize>> = rows.iter().map(|r| r.iter().copied().collect()).collect();
    let max_len = max_len.unwrap_or(usize::MAX);

    let mut singles: BTreeMap<usize, u64> = BTreeMap::new();
    for row in &rows {
        for &i in row {
            *singles.entry(i).or_default() += 1;
        }
    }
    let mut level: BTreeMap<Vec<usize>, u64> = singles
        .into_iter()
        .filter(|&(_, c)| meets(minsup, c, n as u64))
        .map(|(i, c)| (vec![i], c))
        .collect();
    let frequent_items: Vec<usize> = level.keys().map(|k| k[0]).collect();

    let mut out = Vec::new();
    let mut size = 1;
    while !level.is_empty() {
        out.extend(
            level
                .iter()
                .map(|(s, &c)| FrequentItemset::new(Itemset::new(s.iter().copied()).unwrap(), c, n)),
        );
        if size >= max_len {
            break;
        }
        // extend each frequent set with a larger frequent item, keep the
        // extension only if every one-smaller subset is frequent
        let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in level.keys() {
            let last = *s.last().unwrap();
            for &i in frequent_items.iter().filter(|&&i| i > last) {
                let mut c = s.clone();
                c.push(i);
                let all_subsets_frequent = (0..c.len()).all(|skip| {
                    let sub: Vec<usize> = c
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    level.contains_key(&sub)
                });
                if all_subsets_frequent {
                    candidates.insert(c);
                }
            }
        }
        let mut counts: BTreeMap<Vec<usize>, u64> = candidates.into_iter().map(|c| (c, 0)).collect();
        for row in &rows {
            for (c, count) in counts.iter_mut() {
                if c.iter().all(|i| row.contains(i)) {
                    *count += 1;
                }
            }
        }
        level = counts
            .into_iter()
            .filter(|&(_, c)| meets(minsup, c, n as u64))
            .collect();
        size += 1;
    }
    out
}

/// Every frequent itemset by enumerating all `2^n_items - 1` subsets.
/// Only usable for small catalogs.
pub fn enumerate_frequent(rows: &[Vec<usize>], n_items: usize, minsup: Threshold) -> Vec<FrequentItemset> {
    assert!(n_items <= 20, "enumeration limited to 20 items");
    let masks: Vec<u32> = rows.iter().map(|r| r.iter().fold(0u32, |m, &i| m | 1 << i)).collect();
    let mut out = Vec::new();
    for set in 1u32..(1 << n_items) {
        let count = masks.iter().filter(|&&m| m & set == set).count() as u64;
        if meets(minsup, count, rows.len() as u64) {
            let items = (0..n_items).filter(|i| set >> i & 1 == 1);
            out.push(FrequentItemset::new(Itemset::new(items).unwrap(), count, rows.len()));
        }
    }
    out.sort_by(|a, b| (a.itemset.len(), &a.itemset).cmp(&(b.itemset.len(), &b.itemset)));
    out
}

/// Rules from a frequent itemset list, by direct lookup of antecedent
/// counts.
pub fn reference_rules(
    frequents: &[FrequentItemset],
    config: &MiningConfig,
    n_items: usize,
    n_rows: usize,
) -> Vec<AssociationRule> {
    let counts: BTreeMap<&[usize], u64> = frequents.iter().map(|f| (f.itemset.items(), f.count)).collect();
    let consequents = consequent_items(config, n_items);
    let mut rules = Vec::new();
    for f in frequents {
        let items = f.itemset.items();
        if items.len() < 2 || config.max_antecedent.is_some_and(|m| items.len() - 1 > m) {
            continue;
        }
        for &d in items {
            if !consequents.contains(&d) {
                continue;
            }
            let ante: Vec<usize> = items.iter().copied().filter(|&i| i != d).collect();
            let ante_count = counts[ante.as_slice()];
            if meets(config.minconf, f.count, ante_count) {
                rules.push(AssociationRule::new(
                    Itemset::new(ante).unwrap(),
                    d,
                    f.count,
                    ante_count,
                    n_rows,
                ));
            }
        }
    }
    rules.sort_by(|a, b| {
        (a.consequent, a.antecedent.len(), &a.antecedent).cmp(&(b.consequent, b.antecedent.len(), &b.antecedent))
    });
    rules
}

/// Strong rules by exhaustive enumeration of every (antecedent, consequent)
/// pair. Only usable for small catalogs.
pub fn brute_force_rules(rows: &[Vec<usize>], config: &MiningConfig, n_items: usize) -> Vec<AssociationRule> {
    assert!(n_items <= 20, "enumeration limited to 20 items");
    let n = rows.len();
    let masks: Vec<u32> = rows.iter().map(|r| r.iter().fold(0u32, |m, &i| m | 1 << i)).collect();
    let count = |set: u32| masks.iter().filter(|&&m| m & set == set).count() as u64;
    let mut rules = Vec::new();
    for d in consequent_items(config, n_items) {
        for ante in 1u32..(1 << n_items) {
            if ante >> d & 1 == 1 {
                continue;
            }
            let size = ante.count_ones() as usize;
            if config.max_antecedent.is_some_and(|m| size > m) {
                continue;
            }
            let joint = count(ante | 1 << d);
            if !meets(config.minsup, joint, n as u64) {
                continue;
            }
            let ante_count = count(ante);
            if meets(config.minconf, joint, ante_count) {
                let items = (0..n_items).filter(|i| ante >> i & 1 == 1);
                rules.push(AssociationRule::new(
                    Itemset::new(items).unwrap(),
                    d,
                    joint,
                    ante_count,
                    n,
                ));
            }
        }
    }
    rules.sort_by(|a, b| {
        (a.consequent, a.antecedent.len(), &a.antecedent).cmp(&(b.consequent, b.antecedent.len(), &b.antecedent))
    });
    rules
}

/// Horizontal Apriori end to end, in the same shape the Ptree miner
/// returns.
pub fn apriori_mine(rows: &[Vec<usize>], config: &MiningConfig, n_items: usize) -> MiningResult {
    let n_rows = rows.len();
    let frequents = apriori_reference(rows, config.minsup, config.max_level());
    let rules = reference_rules(&frequents, config, n_items, n_rows);
    let mut levels: Vec<Vec<FrequentItemset>> = Vec::new();
    for f in frequents {
        let k = f.itemset.len();
        if levels.len() < k {
            levels.resize_with(k, Vec::new);
        }
        levels[k - 1].push(f);
    }
    MiningResult { n_rows, levels, rules }
}
