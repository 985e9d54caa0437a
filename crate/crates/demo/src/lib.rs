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

//! Browser entry points. Each operation takes plain strings and returns a
//! JSON document, so the page needs no bindings beyond `JSON.parse`.

use ptarm::io::{parse_table, TableFormat};
use ptarm::oracle::apriori_mine;
use ptarm::{
    bf_arm, build_trees, discretize, infer_schema, pad_length, BitColumn, InferOptions, MinerOptions, MiningConfig,
    Mode, Node, PTree, Role, Threshold,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Longest column the tree views accept.
pub const MAX_BITS: usize = 1 << 12;

fn node_json(node: &Node, size: usize, offset: usize) -> Value {
    match node {
        Node::Pure0 => json!({ "kind": "pure0", "count": 0, "size": size, "offset": offset }),
        Node::Pure1 => json!({ "kind": "pure1", "count": size, "size": size, "offset": offset }),
        Node::Leaf { bits } => json!({
            "kind": "leaf",
            "count": bits.count_ones(),
            "size": size,
            "offset": offset,
            "bits": format!("{}{}", bits & 1, bits >> 1 & 1),
        }),
        Node::Mixed { count, children } => {
            let q = size / 4;
            let kids: Vec<Value> = children
                .iter()
                .enumerate()
                .map(|(i, c)| node_json(c, q, offset + i * q))
                .collect();
            json!({ "kind": "mixed", "count": count, "size": size, "offset": offset, "children": kids })
        }
    }
}

fn tree_value(tree: &PTree) -> Value {
    json!({
        "len": tree.len(),
        "root_count": tree.root_count(),
        "node_count": tree.node_count(),
        "bits": tree.to_bits().to_string(),
        "root": node_json(tree.root(), tree.len(), 0),
    })
}

/// Parses a 0/1 string and zero-pads it to a conforming length.
pub fn parse_column(text: &str) -> Result<BitColumn, String> {
    let mut col = BitColumn::parse(text).ok_or_else(|| "only 0, 1, spaces and _ are allowed".to_string())?;
    if col.is_empty() {
        return Err("column is empty".into());
    }
    if col.len() > MAX_BITS {
        return Err(format!("at most {MAX_BITS} bits"));
    }
    col.pad_to(pad_length(col.len()));
    Ok(col)
}

/// Builds the tree of one bit column.
pub fn tree_report(bits: &str) -> Result<String, String> {
    let col = parse_column(bits)?;
    let tree = PTree::build(&col).map_err(|e| e.to_string())?;
    Ok(tree_value(&tree).to_string())
}

/// ANDs the trees of two columns and checks the result against the bitwise
/// AND of the columns.
pub fn and_report(a: &str, b: &str) -> Result<String, String> {
    let (mut x, mut y) = (parse_column(a)?, parse_column(b)?);
    let len = x.len().max(y.len());
    x.pad_to(len);
    y.pad_to(len);
    let (ta, tb) = (
        PTree::build(&x).map_err(|e| e.to_string())?,
        PTree::build(&y).map_err(|e| e.to_string())?,
    );
    let tab = ta.and(&tb).map_err(|e| e.to_string())?;
    let popcount = x.and(&y).count_ones();
    Ok(json!({
        "a": tree_value(&ta),
        "b": tree_value(&tb),
        "and": tree_value(&tab),
        "popcount": popcount,
        "agrees": tab.root_count() == popcount && tab.to_bits() == x.and(&y),
    })
    .to_string())
}

/// Mines a CSV with a header row. `decisions` is a comma-separated list of
/// column names; empty means free mode.
pub fn mine_report(csv: &str, minsup: &str, minconf: &str, decisions: &str) -> Result<String, String> {
    let raw = parse_table(csv, &TableFormat::default()).map_err(|e| e.to_string())?;
    let mut schema = infer_schema(&raw, &InferOptions::default()).map_err(|e| e.to_string())?;
    let names: Vec<&str> = decisions.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if !names.is_empty() {
        schema = schema.with_decisions(&names).map_err(|e| e.to_string())?;
    }
    let (table, catalog) = discretize(&raw, &schema).map_err(|e| e.to_string())?;
    if catalog.len() > 64 {
        return Err(format!("{} items; the demo stops at 64", catalog.len()));
    }
    let minsup = Threshold::parse(minsup).map_err(|e| e.to_string())?;
    let minconf = Threshold::parse(minconf).map_err(|e| e.to_string())?;
    let mode = if names.is_empty() {
        Mode::Free
    } else {
        Mode::Fixed {
            decisions: catalog.with_role(Role::Decision),
        }
    };
    let config = MiningConfig::new(minsup, minconf, mode);
    let trees = build_trees(&table).map_err(|e| e.to_string())?;
    let result = bf_arm(&trees, table.n_rows(), &config, &MinerOptions::default()).map_err(|e| e.to_string())?;
    let baseline = apriori_mine(&table.transactions(), &config, catalog.len());
    let rules: Vec<Value> = result
        .rules
        .iter()
        .map(|r| {
            json!({
                "antecedent": r.antecedent.items().iter().map(|&i| catalog.label(i)).collect::<Vec<_>>(),
                "consequent": catalog.label(r.consequent),
                "support": r.support,
                "confidence": r.confidence,
            })
        })
        .collect();
    Ok(json!({
        "n_rows": table.n_rows(),
        "items": catalog.items().iter().map(|it| it.label()).collect::<Vec<_>>(),
        "level_sizes": result.level_sizes(),
        "rules": rules,
        "apriori_agrees": result == baseline,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn build_tree(bits: &str) -> Result<String, JsError> {
    tree_report(bits).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn and_trees(a: &str, b: &str) -> Result<String, JsError> {
    and_report(a, b).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn mine_csv(csv: &str, minsup: &str, minconf: &str, decisions: &str) -> Result<String, JsError> {
    mine_report(csv, minsup, minconf, decisions).map_err(|e| JsError::new(&e))
}
