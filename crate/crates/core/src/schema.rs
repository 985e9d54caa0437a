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

//! Attribute schemas, the item catalog and the bitmap table.
//!
//! A relational table of categorical cells becomes one bit column per item.
//! A binary attribute yields a single column (1 where the cell equals the
//! positive value). A categorical attribute with `j` values yields `j`
//! one-hot columns. Columns are zero-padded to [`pad_length`].

use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitColumn;

/// Smallest column length accepted by the tree layer.
pub const MIN_PADDED_LEN: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("input table is empty")]
    Empty,
    #[error("row {row}: expected {expected} cells, found {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("table has {found} columns but the schema declares {expected} attributes")]
    ArityMismatch { expected: usize, found: usize },
    #[error("table column {position} is `{found}`, schema expects `{expected}`")]
    ColumnName {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("row {row}: value `{value}` is not declared for attribute `{attribute}`")]
    UnknownValue {
        attribute: String,
        value: String,
        row: usize,
    },
    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),
    #[error("attribute `{0}` declares no values")]
    EmptyValues(String),
    #[error("attribute `{attribute}` declares value `{value}` twice")]
    DuplicateValue { attribute: String, value: String },
    #[error("schema has no condition attribute")]
    NoConditionAttribute,
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Condition,
    Decision,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Condition => "condition",
            Role::Decision => "decision",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeKind {
    /// Single item, present when the cell equals `positive`. Any other value
    /// means absence and has no item of its own.
    Binary { positive: String },
    /// One item per value, one-hot.
    Categorical { values: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
    pub role: Role,
}

impl AttributeSpec {
    pub fn binary(name: &str, positive: &str, role: Role) -> Self {
        AttributeSpec {
            name: name.to_string(),
            kind: AttributeKind::Binary {
                positive: positive.to_string(),
            },
            role,
        }
    }

    pub fn categorical<S: AsRef<str>>(name: &str, values: &[S], role: Role) -> Self {
        AttributeSpec {
            name: name.to_string(),
            kind: AttributeKind::Categorical {
                values: values.iter().map(|v| v.as_ref().to_string()).collect(),
            },
            role,
        }
    }

    pub fn item_count(&self) -> usize {
        match &self.kind {
            AttributeKind::Binary { .. } => 1,
            AttributeKind::Categorical { values } => values.len(),
        }
    }
}

/// Validated, ordered list of attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    attributes: Vec<AttributeSpec>,
    missing: Vec<String>,
}

impl AttributeSchema {
    pub fn new(attributes: Vec<AttributeSpec>) -> Result<Self, SchemaError> {
        let mut names = HashSet::new();
        for attr in &attributes {
            if !names.insert(attr.name.as_str()) {
                return Err(SchemaError::DuplicateAttribute(attr.name.clone()));
            }
            if let AttributeKind::Categorical { values } = &attr.kind {
                if values.is_empty() {
                    return Err(SchemaError::EmptyValues(attr.name.clone()));
                }
                let mut seen = HashSet::new();
                for v in values {
                    if !seen.insert(v.as_str()) {
                        return Err(SchemaError::DuplicateValue {
                            attribute: attr.name.clone(),
                            value: v.clone(),
                        });
                    }
                }
            }
        }
        if !attributes.iter().any(|a| a.role == Role::Condition) {
            return Err(SchemaError::NoConditionAttribute);
        }
        Ok(AttributeSchema {
            attributes,
            missing: Vec::new(),
        })
    }

    /// Cells equal to one of `tokens` encode to no item at all.
    pub fn with_missing<S: AsRef<str>>(mut self, tokens: &[S]) -> Self {
        self.missing = tokens.iter().map(|t| t.as_ref().to_string()).collect();
        self
    }

    pub fn missing(&self) -> &[String] {
        &self.missing
    }

    pub fn is_missing(&self, cell: &str) -> bool {
        self.missing.iter().any(|m| m == cell)
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn item_count(&self) -> usize {
        self.attributes.iter().map(AttributeSpec::item_count).sum()
    }

    /// Reassigns roles: the named attributes become decisions, all others
    /// conditions.
    pub fn with_decisions<S: AsRef<str>>(mut self, names: &[S]) -> Result<Self, SchemaError> {
        for n in names {
            if self.position(n.as_ref()).is_none() {
                return Err(SchemaError::UnknownAttribute(n.as_ref().to_string()));
            }
        }
        for attr in &mut self.attributes {
            attr.role = if names.iter().any(|n| n.as_ref() == attr.name) {
                Role::Decision
            } else {
                Role::Condition
            };
        }
        let missing = self.missing;
        Ok(AttributeSchema::new(self.attributes)?.with_missing(&missing))
    }
}

/// Header plus rows of text cells.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn new<S: AsRef<str>>(header: &[S], rows: &[Vec<S>]) -> Self {
        RawTable {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| r.iter().map(|s| s.as_ref().to_string()).collect())
                .collect(),
        }
    }

    /// Checks that the table is non-empty and rectangular. Row numbers in
    /// errors are 1-based data rows.
    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.header.is_empty() || self.rows.is_empty() {
            return Err(SchemaError::Empty);
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.header.len() {
                return Err(SchemaError::Ragged {
                    row: i + 1,
                    expected: self.header.len(),
                    found: row.len(),
                });
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone)]
pub struct InferOptions {
    /// Values that mark the present side of a two-valued column.
    pub positive_tokens: Vec<String>,
}

impl Default for InferOptions {
    fn default() -> Self {
        InferOptions {
            positive_tokens: vec!["yes".into(), "1".into(), "true".into()],
        }
    }
}

/// Derives a schema from the data: two-valued columns containing a positive
/// token become binary, everything else categorical over its distinct values
/// in first-appearance order. All roles default to condition.
pub fn infer_schema(raw: &RawTable, opts: &InferOptions) -> Result<AttributeSchema, SchemaError> {
    raw.validate()?;
    let mut attributes = Vec::with_capacity(raw.header.len());
    for (col, name) in raw.header.iter().enumerate() {
        let mut values: Vec<&str> = Vec::new();
        for row in &raw.rows {
            let v = row[col].as_str();
            if !values.contains(&v) {
                values.push(v);
            }
        }
        let positive = if values.len() == 2 {
            opts.positive_tokens.iter().find(|t| values.contains(&t.as_str()))
        } else {
            None
        };
        attributes.push(match positive {
            Some(p) => AttributeSpec::binary(name, p, Role::Condition),
            None => AttributeSpec::categorical(name, &values, Role::Condition),
        });
    }
    AttributeSchema::new(attributes)
}

/// Column length for `n_rows` tuples: the smallest power of two that holds
/// them, never below [`MIN_PADDED_LEN`]. Exact powers of two are kept.
pub fn pad_length(n_rows: usize) -> usize {
    n_rows.max(1).next_power_of_two().max(MIN_PADDED_LEN)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub index: usize,
    pub attribute: String,
    pub attribute_index: usize,
    pub value: String,
    pub role: Role,
    /// True for the single item of a binary attribute.
    pub binary: bool,
}

impl Item {
    /// `attribute` for binary items, `attribute=value` otherwise.
    pub fn label(&self) -> String {
        if self.binary {
            self.attribute.clone()
        } else {
            format!("{}={}", self.attribute, self.value)
        }
    }
}

/// Maps item indices to (attribute, value) pairs, in schema order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ItemCatalog {
    items: Vec<Item>,
}

impl ItemCatalog {
    pub fn from_schema(schema: &AttributeSchema) -> Self {
        let mut items = Vec::with_capacity(schema.item_count());
        for (a, attr) in schema.attributes().iter().enumerate() {
            let mut push = |value: &str, binary: bool| {
                items.push(Item {
                    index: items.len(),
                    attribute: attr.name.clone(),
                    attribute_index: a,
                    value: value.to_string(),
                    role: attr.role,
                    binary,
                })
            };
            match &attr.kind {
                AttributeKind::Binary { positive } => push(positive, true),
                AttributeKind::Categorical { values } => {
                    for v in values {
                        push(v, false);
                    }
                }
            }
        }
        ItemCatalog { items }
    }

    /// Builds a catalog from explicit items, e.g. a stored manifest. Indices
    /// must be contiguous from zero.
    pub fn from_items(items: Vec<Item>) -> Option<Self> {
        items
            .iter()
            .enumerate()
            .all(|(i, it)| it.index == i)
            .then_some(ItemCatalog { items })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Item> {
        self.items.get(index)
    }

    pub fn find(&self, attribute: &str, value: &str) -> Option<usize> {
        self.items
            .iter()
            .position(|it| it.attribute == attribute && it.value == value)
    }

    /// Items whose label or attribute name matches `name`.
    pub fn find_by_label(&self, name: &str) -> Vec<usize> {
        self.items
            .iter()
            .filter(|it| it.label() == name || it.attribute == name)
            .map(|it| it.index)
            .collect()
    }

    pub fn with_role(&self, role: Role) -> Vec<usize> {
        self.items
            .iter()
            .filter(|it| it.role == role)
            .map(|it| it.index)
            .collect()
    }

    pub fn label(&self, index: usize) -> String {
        self.items[index].label()
    }
}

/// Counts reads of table contents. Mining is expected to leave it untouched
/// once trees are built.
#[derive(Debug, Default)]
pub struct AccessCounter(AtomicU64);

impl AccessCounter {
    fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// One padded bit column per item.
#[derive(Debug)]
pub struct BitmapTable {
    n_rows: usize,
    padded_len: usize,
    columns: Vec<BitColumn>,
    reads: AccessCounter,
}

impl Clone for BitmapTable {
    fn clone(&self) -> Self {
        BitmapTable {
            n_rows: self.n_rows,
            padded_len: self.padded_len,
            columns: self.columns.clone(),
            reads: AccessCounter::default(),
        }
    }
}

impl PartialEq for BitmapTable {
    fn eq(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows && self.padded_len == other.padded_len && self.columns == other.columns
    }
}

impl BitmapTable {
    /// Wraps pre-built columns, padding each to [`pad_length`]. Returns
    /// `None` if a column is longer than `n_rows` or `n_rows` is zero.
    pub fn from_columns(n_rows: usize, columns: Vec<BitColumn>) -> Option<Self> {
        if n_rows == 0 || columns.iter().any(|c| c.len() > n_rows) {
            return None;
        }
        let padded_len = pad_length(n_rows);
        let columns = columns
            .into_iter()
            .map(|mut c| {
                c.pad_to(padded_len);
                c
            })
            .collect();
        Some(BitmapTable {
            n_rows,
            padded_len,
            columns,
            reads: AccessCounter::default(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn padded_len(&self) -> usize {
        self.padded_len
    }

    pub fn n_items(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, item: usize) -> &BitColumn {
        self.reads.bump();
        &self.columns[item]
    }

    pub fn columns(&self) -> &[BitColumn] {
        self.reads.bump();
        &self.columns
    }

    /// Item indices set in row `r`.
    pub fn row_items(&self, r: usize) -> Vec<usize> {
        self.reads.bump();
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.get(r))
            .map(|(i, _)| i)
            .collect()
    }

    /// Horizontal view: one item list per original row (padding excluded).
    pub fn transactions(&self) -> Vec<Vec<usize>> {
        (0..self.n_rows).map(|r| self.row_items(r)).collect()
    }

    pub fn access_count(&self) -> u64 {
        self.reads.get()
    }

    /// Reconstructs the cells of row `r`. A binary attribute whose bit is 0
    /// decodes to `None` since its negative value has no item.
    pub fn decode_row(&self, r: usize, catalog: &ItemCatalog) -> Vec<Option<String>> {
        let n_attrs = catalog.items().last().map_or(0, |it| it.attribute_index + 1);
        let mut cells = vec![None; n_attrs];
        for it in catalog.items() {
            if self.column(it.index).get(r) {
                cells[it.attribute_index] = Some(it.value.clone());
            }
        }
        cells
    }
}

/// Encodes `raw` under `schema`. Table columns must match schema attributes
/// by position and name.
pub fn discretize(raw: &RawTable, schema: &AttributeSchema) -> Result<(BitmapTable, ItemCatalog), SchemaError> {
    raw.validate()?;
    if raw.header.len() != schema.len() {
        return Err(SchemaError::ArityMismatch {
            expected: schema.len(),
            found: raw.header.len(),
        });
    }
    for (position, (name, attr)) in raw.header.iter().zip(schema.attributes()).enumerate() {
        if *name != attr.name {
            return Err(SchemaError::ColumnName {
                position,
                expected: attr.name.clone(),
                found: name.clone(),
            });
        }
    }
    let catalog = ItemCatalog::from_schema(schema);
    let n_rows = raw.n_rows();
    let padded_len = pad_length(n_rows);
    let mut columns = vec![BitColumn::zeros(padded_len); catalog.len()];

    let mut first_item = 0;
    for (a, attr) in schema.attributes().iter().enumerate() {
        for (r, row) in raw.rows.iter().enumerate() {
            let cell = row[a].as_str();
            if schema.is_missing(cell) {
                continue;
            }
            match &attr.kind {
                AttributeKind::Binary { positive } => {
                    if cell == positive {
                        columns[first_item].set(r, true);
                    }
                }
                AttributeKind::Categorical { values } => {
                    let offset = values
                        .iter()
                        .position(|v| v == cell)
                        .ok_or_else(|| SchemaError::UnknownValue {
                            attribute: attr.name.clone(),
                            value: cell.to_string(),
                            row: r + 1,
                        })?;
                    columns[first_item + offset].set(r, true);
                }
            }
        }
        first_item += attr.item_count();
    }

    let table = BitmapTable {
        n_rows,
        padded_len,
        columns,
        reads: AccessCounter::default(),
    };
    Ok((table, catalog))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> RawTable {
        let rows = [
            "yes yes no no no no no",
            "yes yes yes yes yes yes no",
            "no yes no yes no no yes",
            "no yes no no yes no yes",
            "no no no yes no yes yes",
            "no no no yes yes no yes",
            "no yes no no yes no no",
            "no yes no yes yes yes no",
        ];
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.split(' ').collect()).collect();
        RawTable::new(&["A", "B", "C", "D", "E", "F", "G"], &rows)
    }

    #[test]
    fn infer_binary_with_configured_token() {
        let raw = RawTable::new(
            &["Computer"],
            &[vec!["Purchased"], vec!["Not purchased"], vec!["Purchased"]],
        );
        let opts = InferOptions {
            positive_tokens: vec!["Purchased".into()],
        };
        let schema = infer_schema(&raw, &opts).unwrap();
        assert_eq!(
            schema.attributes()[0].kind,
            AttributeKind::Binary {
                positive: "Purchased".into()
            }
        );
    }

    #[test]
    fn infer_categorical_first_appearance() {
        let raw = RawTable::new(&["Income"], &[vec!["High"], vec!["Meduim"], vec!["Low"], vec!["High"]]);
        let schema = infer_schema(&raw, &InferOptions::default()).unwrap();
        assert_eq!(
            schema.attributes()[0],
            AttributeSpec::categorical("Income", &["High", "Meduim", "Low"], Role::Condition)
        );
    }

    #[test]
    fn infer_single_value_column() {
        let raw = RawTable::new(&["X"], &[vec!["a"], vec!["a"], vec!["a"]]);
        let schema = infer_schema(&raw, &InferOptions::default()).unwrap();
        assert_eq!(schema.item_count(), 1);
        assert!(matches!(schema.attributes()[0].kind, AttributeKind::Categorical { .. }));
    }

    #[test]
    fn infer_errors() {
        let ragged = RawTable::new(&["a", "b"], &[vec!["1", "2"], vec!["1"]]);
        assert_eq!(
            infer_schema(&ragged, &InferOptions::default()),
            Err(SchemaError::Ragged {
                row: 2,
                expected: 2,
                found: 1
            })
        );
        let empty = RawTable::new::<&str>(&["a"], &[]);
        assert_eq!(infer_schema(&empty, &InferOptions::default()), Err(SchemaError::Empty));
    }

    #[test]
    fn pad_length_examples() {
        assert_eq!(pad_length(8), 16);
        assert_eq!(pad_length(16), 16);
        assert_eq!(pad_length(17), 32);
        assert_eq!(pad_length(1), 16);
        // exhaustive doubling
        let mut p = 1;
        while p < 1728 {
            p *= 2;
        }
        assert_eq!(p, 2048);
        assert_eq!(pad_length(1728), 2048);
    }

    #[test]
    fn toy_bit_matrix() {
        let raw = toy();
        let schema = infer_schema(&raw, &InferOptions::default()).unwrap();
        assert!(schema
            .attributes()
            .iter()
            .all(|a| a.kind == AttributeKind::Binary { positive: "yes".into() }));
        let (table, catalog) = discretize(&raw, &schema).unwrap();
        assert_eq!(catalog.len(), 7);
        assert_eq!(table.n_rows(), 8);
        assert_eq!(table.padded_len(), 16);
        let expected = [
            "1100000", "1111110", "0101001", "0100101", "0001011", "0001101", "0100100", "0101110",
        ];
        for (r, bits) in expected.iter().enumerate() {
            for (i, b) in bits.chars().enumerate() {
                assert_eq!(table.column(i).get(r), b == '1', "row {r} item {i}");
            }
        }
        for r in 8..16 {
            assert!(table.row_items(r).is_empty());
        }
    }

    #[test]
    fn single_row_income() {
        let schema = AttributeSchema::new(vec![AttributeSpec::categorical(
            "Income",
            &["High", "Meduim", "Low"],
            Role::Condition,
        )])
        .unwrap();
        let raw = RawTable::new(&["Income"], &[vec!["High"]]);
        let (table, _) = discretize(&raw, &schema).unwrap();
        assert!(table.column(0).get(0));
        assert!(!table.column(1).get(0));
        assert!(!table.column(2).get(0));
    }

    #[test]
    fn constant_negative_binary_is_empty_column() {
        let schema = AttributeSchema::new(vec![
            AttributeSpec::binary("P", "yes", Role::Condition),
            AttributeSpec::binary("Q", "yes", Role::Condition),
        ])
        .unwrap();
        let raw = RawTable::new(&["P", "Q"], &[vec!["no", "yes"], vec!["no", "no"]]);
        let (table, _) = discretize(&raw, &schema).unwrap();
        assert_eq!(table.column(0).count_ones(), 0);
        assert_eq!(table.column(1).count_ones(), 1);
    }

    #[test]
    fn discretize_errors() {
        let schema = AttributeSchema::new(vec![AttributeSpec::categorical(
            "Income",
            &["High", "Low"],
            Role::Condition,
        )])
        .unwrap();
        let raw = RawTable::new(&["Income"], &[vec!["High"], vec!["Medium"]]);
        assert_eq!(
            discretize(&raw, &schema).unwrap_err(),
            SchemaError::UnknownValue {
                attribute: "Income".into(),
                value: "Medium".into(),
                row: 2
            }
        );
        let wide = RawTable::new(&["Income", "X"], &[vec!["High", "a"]]);
        assert!(matches!(
            discretize(&wide, &schema),
            Err(SchemaError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn schema_invariants() {
        assert!(matches!(
            AttributeSchema::new(vec![
                AttributeSpec::binary("a", "y", Role::Condition),
                AttributeSpec::binary("a", "y", Role::Decision),
            ]),
            Err(SchemaError::DuplicateAttribute(_))
        ));
        assert!(matches!(
            AttributeSchema::new(vec![AttributeSpec::categorical::<&str>("a", &[], Role::Condition)]),
            Err(SchemaError::EmptyValues(_))
        ));
        assert!(matches!(
            AttributeSchema::new(vec![AttributeSpec::categorical("a", &["x", "x"], Role::Condition)]),
            Err(SchemaError::DuplicateValue { .. })
        ));
        assert_eq!(
            AttributeSchema::new(vec![AttributeSpec::binary("a", "y", Role::Decision)]),
            Err(SchemaError::NoConditionAttribute)
        );
    }

    #[test]
    fn decisions_reassign_roles() {
        let schema = infer_schema(&toy(), &InferOptions::default())
            .unwrap()
            .with_decisions(&["G", "F"])
            .unwrap();
        let catalog = ItemCatalog::from_schema(&schema);
        assert_eq!(catalog.with_role(Role::Decision), vec![5, 6]);
        assert!(matches!(
            schema.with_decisions(&["Z"]),
            Err(SchemaError::UnknownAttribute(_))
        ));
    }

    #[test]
    fn access_counter_tracks_reads() {
        let (table, _) = discretize(&toy(), &infer_schema(&toy(), &InferOptions::default()).unwrap()).unwrap();
        let before = table.access_count();
        let _ = table.transactions();
        assert_eq!(table.access_count(), before + 8);
    }
}
