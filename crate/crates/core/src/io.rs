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

//! Reading delimited tables and schema files.
//!
//! A schema file is TOML with one `[[attribute]]` table per column:
//!
//! ```toml
//! [[attribute]]
//! name = "safety"
//! kind = "categorical"          # binary | categorical | binned | ignore
//! values = ["low", "med", "high"] # optional, inferred when absent
//! role = "condition"            # or "decision"
//!
//! [[attribute]]
//! name = "age"
//! kind = "binned"
//! cuts = [25, 45, 65]           # bins: <25, 25-45, 45-65, >=65
//! ```

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::schema::{AttributeSchema, AttributeSpec, RawTable, Role, SchemaError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed delimited text: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema file: {0}")]
    SchemaFile(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("row {row}: `{value}` is not numeric for binned attribute `{attribute}`")]
    NotNumeric {
        attribute: String,
        value: String,
        row: usize,
    },
    #[error("column `{0}` is not declared in the schema")]
    Undeclared(String),
}

#[derive(Debug, Clone)]
pub struct TableFormat {
    pub delimiter: u8,
    /// `None` means the first line is the header.
    pub header: Option<Vec<String>>,
    /// Lines starting with this byte are skipped.
    pub comment: Option<u8>,
}

impl Default for TableFormat {
    fn default() -> Self {
        TableFormat {
            delimiter: b',',
            header: None,
            comment: None,
        }
    }
}

/// Parses delimited text. Cells are trimmed; blank lines are skipped.
/// Row lengths are not checked here (see [`RawTable::validate`]).
pub fn parse_table(text: &str, format: &TableFormat) -> Result<RawTable, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(format.header.is_none())
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(format.comment)
        .from_reader(text.as_bytes());
    let header = match &format.header {
        Some(h) => h.clone(),
        None => reader.headers()?.iter().map(str::to_string).collect(),
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(RawTable { header, rows })
}

pub fn read_table(path: &Path, format: &TableFormat) -> Result<RawTable, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_table(&text, format)
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum KindDecl {
    Binary,
    Categorical,
    Binned,
    Ignore,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AttributeDecl {
    pub name: String,
    pub kind: KindDecl,
    #[serde(default)]
    pub positive: Option<String>,
    #[serde(default)]
    pub values: Option<Vec<String>>,
    #[serde(default)]
    pub cuts: Option<Vec<f64>>,
    #[serde(default = "default_role")]
    pub role: Role,
}

fn default_role() -> Role {
    Role::Condition
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SchemaFile {
    /// Tokens meaning "value unknown"; such cells produce no item.
    #[serde(default)]
    pub missing: Vec<String>,
    #[serde(rename = "attribute")]
    pub attributes: Vec<AttributeDecl>,
}

fn bin_labels(cuts: &[f64]) -> Vec<String> {
    let mut labels = Vec::with_capacity(cuts.len() + 1);
    labels.push(format!("<{}", cuts[0]));
    for w in cuts.windows(2) {
        labels.push(format!("{}-{}", w[0], w[1]));
    }
    labels.push(format!(">={}", cuts[cuts.len() - 1]));
    labels
}

impl SchemaFile {
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let file: SchemaFile = toml::from_str(text).map_err(|e| LoadError::SchemaFile(e.to_string()))?;
        for a in &file.attributes {
            let bad = |msg: &str| Err(LoadError::SchemaFile(format!("attribute `{}`: {msg}", a.name)));
            match a.kind {
                KindDecl::Binary if a.positive.is_none() => return bad("binary needs `positive`"),
                KindDecl::Binned => match &a.cuts {
                    None => return bad("binned needs `cuts`"),
                    Some(c) if c.is_empty() || c.windows(2).any(|w| w[0] >= w[1]) => {
                        return bad("`cuts` must be non-empty and strictly increasing")
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        SchemaFile::parse(&text)
    }

    /// Reorders `raw` into schema order, drops ignored columns, bins numeric
    /// columns and returns the table with its validated schema.
    pub fn apply(&self, raw: &RawTable) -> Result<(RawTable, AttributeSchema), LoadError> {
        raw.validate()?;
        for h in &raw.header {
            if !self.attributes.iter().any(|a| &a.name == h) {
                return Err(LoadError::Undeclared(h.clone()));
            }
        }
        let mut header = Vec::new();
        let mut columns: Vec<Vec<String>> = Vec::new();
        let mut specs = Vec::new();
        for decl in self.attributes.iter().filter(|a| a.kind != KindDecl::Ignore) {
            let pos = raw
                .header
                .iter()
                .position(|h| *h == decl.name)
                .ok_or_else(|| SchemaError::UnknownAttribute(decl.name.clone()))?;
            let mut cells: Vec<String> = raw.rows.iter().map(|r| r[pos].clone()).collect();
            let spec = match decl.kind {
                KindDecl::Binary => AttributeSpec::binary(&decl.name, decl.positive.as_deref().unwrap(), decl.role),
                KindDecl::Categorical => {
                    let values = match &decl.values {
                        Some(v) => v.clone(),
                        None => {
                            let mut v: Vec<String> = Vec::new();
                            for c in &cells {
                                if !v.contains(c) && !self.missing.contains(c) {
                                    v.push(c.clone());
                                }
                            }
                            v
                        }
                    };
                    AttributeSpec::categorical(&decl.name, &values, decl.role)
                }
                KindDecl::Binned => {
                    let cuts = decl.cuts.as_deref().unwrap();
                    let labels = bin_labels(cuts);
                    for (r, cell) in cells.iter_mut().enumerate() {
                        if self.missing.contains(cell) {
                            continue;
                        }
                        let x: f64 = cell.parse().map_err(|_| LoadError::NotNumeric {
                            attribute: decl.name.clone(),
                            value: cell.clone(),
                            row: r + 1,
                        })?;
                        let bin = cuts.iter().take_while(|&&c| x >= c).count();
                        *cell = labels[bin].clone();
                    }
                    AttributeSpec::categorical(&decl.name, &labels, decl.role)
                }
                KindDecl::Ignore => unreachable!(),
            };
            header.push(decl.name.clone());
            columns.push(cells);
            specs.push(spec);
        }
        let rows = (0..raw.n_rows())
            .map(|r| columns.iter().map(|c| c[r].clone()).collect())
            .collect();
        let schema = AttributeSchema::new(specs)?.with_missing(&self.missing);
        Ok((RawTable { header, rows }, schema))
    }
}
