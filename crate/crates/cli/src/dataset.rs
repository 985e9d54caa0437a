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

//! Known benchmark datasets: where they live, what they must look like.

use std::path::{Path, PathBuf};

use ptarm::io::{parse_table, SchemaFile, TableFormat};
use ptarm::RawTable;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("unknown dataset `{0}` (expected car, mushroom or adult)")]
    Unknown(String),
    #[error("dataset `{name}` not found; looked for {looked} in {dir}. Source: {source_url}")]
    NotFound {
        name: String,
        looked: String,
        dir: String,
        source_url: &'static str,
    },
    #[error("{path}: {message}")]
    Validation { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

/// One accepted on-disk form of a dataset.
#[derive(Debug, Clone, Copy)]
pub struct Variant {
    pub file: &'static str,
    pub rows: usize,
    pub has_header: bool,
    pub sha256: Option<&'static str>,
    /// Printed when this variant is used, e.g. for substitutes.
    pub notice: Option<&'static str>,
}

#[derive(Debug, Clone, Copy)]
pub struct DatasetSpec {
    pub name: &'static str,
    pub source_url: &'static str,
    /// Column names, in file order.
    pub columns: &'static [&'static str],
    pub schema: &'static str,
    pub comment: Option<u8>,
    pub variants: &'static [Variant],
}

const CAR_COLUMNS: &[&str] = &["buying", "maint", "doors", "persons", "lug_boot", "safety", "class"];

const MUSHROOM_COLUMNS: &[&str] = &[
    "class",
    "cap-shape",
    "cap-surface",
    "cap-color",
    "bruises",
    "odor",
    "gill-attachment",
    "gill-spacing",
    "gill-size",
    "gill-color",
    "stalk-shape",
    "stalk-root",
    "stalk-surface-above-ring",
    "stalk-surface-below-ring",
    "stalk-color-above-ring",
    "stalk-color-below-ring",
    "veil-type",
    "veil-color",
    "ring-number",
    "ring-type",
    "spore-print-color",
    "population",
    "habitat",
];

const ADULT_COLUMNS: &[&str] = &[
    "age",
    "workclass",
    "fnlwgt",
    "education",
    "education-num",
    "marital-status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "capital-gain",
    "capital-loss",
    "hours-per-week",
    "native-country",
    "income",
];

pub const DATASETS: &[DatasetSpec] = &[
    DatasetSpec {
        name: "car",
        source_url: "https://archive.ics.uci.edu/ml/machine-learning-databases/car/car.data",
        columns: CAR_COLUMNS,
        schema: include_str!("../../../data/schemas/car.toml"),
        comment: None,
        variants: &[
            Variant {
                file: "car.data",
                rows: 1728,
                has_header: false,
                sha256: None,
                notice: None,
            },
            Variant {
                file: "car-keel.csv",
                rows: 1728,
                has_header: true,
                sha256: Some("99d297a295cc333b364762bdada1133b34c962c2f905a4e7d20825619c30047d"),
                notice: Some(
                    "using the bundled KEEL copy of Car Evaluation: same 1728 rows and attributes, \
                     class merged into good/vgood/other; place car.data in the data directory to use the original",
                ),
            },
        ],
    },
    DatasetSpec {
        name: "mushroom",
        source_url: "https://archive.ics.uci.edu/ml/machine-learning-databases/mushroom/agaricus-lepiota.data",
        columns: MUSHROOM_COLUMNS,
        schema: include_str!("../../../data/schemas/mushroom.toml"),
        comment: None,
        variants: &[Variant {
            file: "agaricus-lepiota.data",
            rows: 8124,
            has_header: false,
            sha256: Some("e65d082030501a3ebcbcd7c9f7c71aa9d28fdfff463bf4cf4716a3fe13ac360e"),
            notice: None,
        }],
    },
    DatasetSpec {
        name: "adult",
        source_url: "https://archive.ics.uci.edu/ml/machine-learning-databases/adult/adult.data",
        columns: ADULT_COLUMNS,
        schema: include_str!("../../../data/schemas/adult.toml"),
        comment: Some(b'|'),
        variants: &[
            Variant {
                file: "adult.data",
                rows: 32561,
                has_header: false,
                sha256: Some("5b00264637dbfec36bdeaab5676b0b309ff9eb788d63554ca0a249491c86603d"),
                notice: None,
            },
            Variant {
                file: "adult.all",
                rows: 48842,
                has_header: false,
                sha256: None,
                notice: Some("using adult.all (adult.data followed by adult.test)"),
            },
        ],
    },
];

pub fn spec(name: &str) -> Result<&'static DatasetSpec, DatasetError> {
    DATASETS
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| DatasetError::Unknown(name.to_string()))
}

/// `PTARM_DATA_DIR` if set, else the `data/` directory of this source tree.
pub fn default_data_dir() -> PathBuf {
    match std::env::var_os("PTARM_DATA_DIR") {
        Some(d) => PathBuf::from(d),
        None => {
            let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
            dir.canonicalize().unwrap_or(dir)
        }
    }
}

/// A validated dataset ready to discretize.
#[derive(Debug)]
pub struct LoadedDataset {
    pub name: String,
    pub path: PathBuf,
    pub raw: RawTable,
    pub schema: SchemaFile,
    /// Human-readable provenance lines (source, checksum, substitutions).
    pub notes: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Locates `name` in `dir`, checks its checksum when one is on record and
/// its row count and arity, and parses it. Nothing is downloaded; when no
/// accepted file is present the error names the canonical source.
pub fn fetch_or_validate_dataset(name: &str, dir: &Path) -> Result<LoadedDataset, DatasetError> {
    let spec = spec(name)?;
    let variant = spec
        .variants
        .iter()
        .find(|v| dir.join(v.file).is_file())
        .ok_or_else(|| DatasetError::NotFound {
            name: name.to_string(),
            looked: spec.variants.iter().map(|v| v.file).collect::<Vec<_>>().join(", "),
            dir: dir.display().to_string(),
            source_url: spec.source_url,
        })?;
    let path = dir.join(variant.file);
    let mut notes = vec![format!(
        "dataset {name}: {} (canonical source {})",
        path.display(),
        spec.source_url
    )];
    if let Some(n) = variant.notice {
        notes.push(n.to_string());
    }
    let bytes = std::fs::read(&path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let invalid = |message: String| DatasetError::Validation {
        path: path.display().to_string(),
        message,
    };
    match variant.sha256 {
        Some(want) => {
            let got = sha256_hex(&bytes);
            if got != want {
                return Err(invalid(format!("sha256 {got} does not match the recorded {want}")));
            }
            notes.push("sha256 verified".to_string());
        }
        None => notes.push("no checksum on record; checking shape only".to_string()),
    }
    let text = String::from_utf8(bytes).map_err(|e| invalid(format!("not UTF-8: {e}")))?;
    let format = TableFormat {
        delimiter: b',',
        header: (!variant.has_header).then(|| spec.columns.iter().map(|c| c.to_string()).collect()),
        comment: spec.comment,
    };
    let mut raw = parse_table(&text, &format).map_err(|e| DatasetError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    validate_shape(&raw, spec, variant.rows).map_err(invalid)?;
    if spec.name == "adult" {
        // adult.test writes labels as ">50K." rather than ">50K"
        for row in &mut raw.rows {
            if let Some(last) = row.last_mut() {
                if let Some(stripped) = last.strip_suffix('.') {
                    *last = stripped.to_string();
                }
            }
        }
    }
    let schema = SchemaFile::parse(spec.schema).map_err(|e| DatasetError::Parse {
        path: format!("shipped schema for {name}"),
        message: e.to_string(),
    })?;
    notes.push(format!(
        "{} rows x {} columns confirmed",
        raw.n_rows(),
        spec.columns.len()
    ));
    Ok(LoadedDataset {
        name: name.to_string(),
        path,
        raw,
        schema,
        notes,
    })
}

fn validate_shape(raw: &RawTable, spec: &DatasetSpec, rows: usize) -> Result<(), String> {
    if raw.header.len() != spec.columns.len() {
        return Err(format!(
            "expected {} columns, header has {}",
            spec.columns.len(),
            raw.header.len()
        ));
    }
    if let Some((i, _)) = raw
        .header
        .iter()
        .zip(spec.columns)
        .enumerate()
        .find(|(_, (h, c))| h != *c)
    {
        return Err(format!(
            "column {} is `{}`, expected `{}`",
            i + 1,
            raw.header[i],
            spec.columns[i]
        ));
    }
    if let Some((r, row)) = raw
        .rows
        .iter()
        .enumerate()
        .find(|(_, row)| row.len() != spec.columns.len())
    {
        return Err(format!(
            "row {} has {} fields, expected {}",
            r + 1,
            row.len(),
            spec.columns.len()
        ));
    }
    if raw.n_rows() != rows {
        return Err(format!("expected {rows} rows, found {}", raw.n_rows()));
    }
    Ok(())
}
