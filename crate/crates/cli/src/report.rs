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

//! Run reports and their json, csv and text renderings.
//!
//! JSON field names are part of the interface:
//!
//! ```text
//! dataset, n_rows, n_items, padded_len,
//! config { minsup, minconf, mode, decisions, threads },
//! runs[] { algorithm, build_seconds, mine_seconds, level_sizes, frequent_itemsets, rules },
//! verdict ("equal" | "mismatch" | null), differences[],
//! rules[] { antecedent[], consequent, count, antecedent_count, support, confidence }
//! ```
//!
//! `rules` holds the output of the first algorithm run. Timings are omitted
//! (null) when the report is built without them.

use std::fmt::Write as _;

use ptarm::{ItemCatalog, MiningResult};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ConfigEcho {
    pub minsup: f64,
    pub minconf: f64,
    pub mode: String,
    pub decisions: Vec<String>,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AlgorithmRun {
    pub algorithm: String,
    pub build_seconds: Option<f64>,
    pub mine_seconds: Option<f64>,
    pub level_sizes: Vec<usize>,
    pub frequent_itemsets: usize,
    pub rules: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RuleRow {
    pub antecedent: Vec<String>,
    pub consequent: String,
    pub count: u64,
    pub antecedent_count: u64,
    pub support: f64,
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Mismatch,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    pub dataset: String,
    pub n_rows: usize,
    pub n_items: usize,
    pub padded_len: usize,
    pub config: ConfigEcho,
    pub runs: Vec<AlgorithmRun>,
    pub verdict: Option<Verdict>,
    pub differences: Vec<String>,
    pub rules: Vec<RuleRow>,
}

/// Positive duration in seconds; a zero reading is bumped to one nanosecond.
pub fn seconds(d: std::time::Duration) -> f64 {
    d.as_secs_f64().max(1e-9)
}

pub fn rule_rows(result: &MiningResult, catalog: &ItemCatalog) -> Vec<RuleRow> {
    result
        .rules
        .iter()
        .map(|r| RuleRow {
            antecedent: r.antecedent.items().iter().map(|&i| catalog.label(i)).collect(),
            consequent: catalog.label(r.consequent),
            count: r.count,
            antecedent_count: r.antecedent_count,
            support: r.support,
            confidence: r.confidence,
        })
        .collect()
}

/// Human-readable differences between two results, at most `limit` lines.
pub fn diff_results(a: &MiningResult, b: &MiningResult, catalog: &ItemCatalog, limit: usize) -> Vec<String> {
    let mut out = Vec::new();
    let names = |items: &[usize]| items.iter().map(|&i| catalog.label(i)).collect::<Vec<_>>().join(", ");
    let mut push = |s: String| {
        if out.len() < limit {
            out.push(s);
        }
    };
    for f in a.itemsets() {
        match b.itemsets().find(|g| g.itemset == f.itemset) {
            None => push(format!("itemset {{{}}} only in first", names(f.itemset.items()))),
            Some(g) if g.count != f.count => push(format!(
                "itemset {{{}}} count {} vs {}",
                names(f.itemset.items()),
                f.count,
                g.count
            )),
            _ => {}
        }
    }
    for g in b.itemsets() {
        if !a.itemsets().any(|f| f.itemset == g.itemset) {
            push(format!("itemset {{{}}} only in second", names(g.itemset.items())));
        }
    }
    for r in &a.rules {
        if !b.rules.contains(r) {
            push(format!(
                "rule {} -> {} differs or missing in second",
                names(r.antecedent.items()),
                catalog.label(r.consequent)
            ));
        }
    }
    for r in &b.rules {
        if !a.rules.contains(r) {
            push(format!(
                "rule {} -> {} differs or missing in first",
                names(r.antecedent.items()),
                catalog.label(r.consequent)
            ));
        }
    }
    out
}

fn fmt_secs(s: Option<f64>) -> String {
    s.map_or_else(|| "-".to_string(), |s| format!("{s:.6}"))
}

impl RunReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "antecedent",
            "consequent",
            "count",
            "antecedent_count",
            "support",
            "confidence",
        ])
        .expect("in-memory write");
        for r in &self.rules {
            w.write_record([
                r.antecedent.join(" & "),
                r.consequent.clone(),
                r.count.to_string(),
                r.antecedent_count.to_string(),
                r.support.to_string(),
                r.confidence.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    fn render_text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(
            s,
            "dataset {}: {} rows, {} items (padded to {})",
            self.dataset, self.n_rows, self.n_items, self.padded_len
        );
        let _ = writeln!(
            s,
            "minsup {} minconf {} mode {}{}",
            c.minsup,
            c.minconf,
            c.mode,
            if c.decisions.is_empty() {
                String::new()
            } else {
                format!(" decisions {}", c.decisions.join(","))
            }
        );
        for run in &self.runs {
            let _ = writeln!(
                s,
                "{}: build {}s mine {}s, frequent itemsets {} by level {:?}, rules {}",
                run.algorithm,
                fmt_secs(run.build_seconds),
                fmt_secs(run.mine_seconds),
                run.frequent_itemsets,
                run.level_sizes,
                run.rules
            );
        }
        if let Some(v) = self.verdict {
            let _ = writeln!(s, "verdict: {}", if v == Verdict::Equal { "equal" } else { "mismatch" });
            for d in &self.differences {
                let _ = writeln!(s, "  {d}");
            }
        }
        for r in &self.rules {
            let _ = writeln!(
                s,
                "{} -> {}, support {:.4}, confidence {:.4}",
                r.antecedent.join(", "),
                r.consequent,
                r.support,
                r.confidence
            );
        }
        s
    }
}
