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

//! Association rule mining over quadrant count trees (Ptrees).
//!
//! A categorical table is encoded as one bit column per item
//! ([`schema`]), each column is compressed into a quadrant count tree
//! ([`ptree`]), and frequent itemsets are found level by level using only
//! tree ANDs and root counts ([`miner`]). Trees can be persisted with their
//! root count in the file header ([`store`]). [`oracle`] holds a plain
//! horizontal Apriori used to cross-check every result.

pub mod bits;
pub mod io;
pub mod miner;
pub mod model;
pub mod oracle;
pub mod ptree;
pub mod schema;
pub mod store;

pub use bits::BitColumn;
pub use miner::{bf_arm, bf_arm_stored, MinerError, MinerOptions};
pub use model::{AssociationRule, ConfigError, FrequentItemset, Itemset, MiningConfig, MiningResult, Mode, Threshold};
pub use ptree::{Node, PTree, PtreeError};
pub use schema::{
    discretize, infer_schema, pad_length, AttributeKind, AttributeSchema, AttributeSpec, BitmapTable, InferOptions,
    ItemCatalog, RawTable, Role, SchemaError,
};

/// Builds one tree per column of `table`.
pub fn build_trees(table: &BitmapTable) -> Result<Vec<PTree>, PtreeError> {
    table.columns().iter().map(PTree::build).collect()
}
