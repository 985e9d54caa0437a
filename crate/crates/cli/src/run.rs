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

//! The load, encode, mine and report pipeline behind each subcommand.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ptarm::io::{read_table, LoadError, SchemaFile, TableFormat};
use ptarm::oracle::apriori_mine;
use ptarm::store::{save_database, StoreError, StoredDatabase};
use ptarm::{
    bf_arm, bf_arm_stored, build_trees, discretize, infer_schema, AttributeSchema, BitmapTable, ConfigError,
    InferOptions, ItemCatalog, MinerError, MinerOptions, MiningConfig, MiningResult, Mode, PTree, Role, SchemaError,
    Threshold,
};
use serde::Serialize;
use thiserror::Error;

use crate::cli::{Algo, BuildArgs, Cli, Command, MineArgs, ModeArg, OutputArgs, SourceArgs};
use crate::dataset::{default_data_dir, fetch_or_validate_dataset, DatasetError};
use crate::report::{diff_results, rule_rows, seconds, AlgorithmRun, ConfigEcho, Format, RunReport, Verdict};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Load(LoadError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("store: {0}")]
    Store(#[from] StoreError),
    #[error(transparent)]
    Dataset(DatasetError),
    #[error("mining failed: {0}")]
    Mining(MinerError),
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const MISMATCH: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const SCHEMA: i32 = 4;
    pub const THRESHOLD: i32 = 5;
    pub const STORE: i32 = 6;
    pub const DATASET: i32 = 7;
    pub const INTERNAL: i32 = 8;
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => exit::USAGE,
            RunError::Io { .. } => exit::IO,
            RunError::Load(LoadError::Io { .. }) => exit::IO,
            RunError::Load(_) | RunError::Schema(_) => exit::SCHEMA,
            RunError::Config(_) => exit::THRESHOLD,
            RunError::Store(_) => exit::STORE,
            RunError::Dataset(DatasetError::NotFound { .. } | DatasetError::Io { .. }) => exit::IO,
            RunError::Dataset(DatasetError::Unknown(_)) => exit::USAGE,
            RunError::Dataset(_) => exit::DATASET,
            RunError::Mining(MinerError::Config(_)) => exit::THRESHOLD,
            RunError::Mining(MinerError::Store(_)) => exit::STORE,
            RunError::Mining(_) => exit::INTERNAL,
        }
    }
}

impl From<LoadError> for RunError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Schema(s) => RunError::Schema(s),
            other => RunError::Load(other),
        }
    }
}

impl From<DatasetError> for RunError {
    fn from(e: DatasetError) -> Self {
        RunError::Dataset(e)
    }
}

impl From<MinerError> for RunError {
    fn from(e: MinerError) -> Self {
        match e {
            MinerError::Config(c) => RunError::Config(c),
            MinerError::Store(s) => RunError::Store(s),
            other => RunError::Mining(other),
        }
    }
}

/// What a finished command hands back to `main`.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub out_path: Option<PathBuf>,
    /// Progress and provenance lines for stderr.
    pub notes: Vec<String>,
    pub code: i32,
}

/// An encoded table with everything needed to mine it.
pub struct Encoded {
    pub name: String,
    pub table: BitmapTable,
    pub catalog: ItemCatalog,
    pub schema: AttributeSchema,
    pub encode_time: Duration,
    pub notes: Vec<String>,
}

/// Loads and discretizes the table named by `src`.
pub fn encode(src: &SourceArgs) -> Result<Encoded, RunError> {
    let start = Instant::now();
    let mut notes = Vec::new();
    let (name, raw, schema_file) = match (&src.input, &src.dataset) {
        (Some(path), _) => {
            let schema_file = src.schema.as_deref().map(SchemaFile::load).transpose()?;
            let header = if src.no_header {
                let file = schema_file
                    .as_ref()
                    .ok_or_else(|| RunError::Usage("--no-header needs --schema".into()))?;
                Some(file.attributes.iter().map(|a| a.name.clone()).collect())
            } else {
                None
            };
            let format = TableFormat {
                delimiter: src.delimiter,
                header,
                comment: None,
            };
            let raw = read_table(path, &format)?;
            (path.display().to_string(), raw, schema_file)
        }
        (None, Some(name)) => {
            let dir = src.data_dir.clone().unwrap_or_else(default_data_dir);
            let loaded = fetch_or_validate_dataset(name, &dir)?;
            notes.extend(loaded.notes);
            let schema_file = match &src.schema {
                Some(p) => SchemaFile::load(p)?,
                None => loaded.schema,
            };
            (loaded.name, loaded.raw, Some(schema_file))
        }
        (None, None) => return Err(RunError::Usage("one of --input or --dataset is required".into())),
    };
    let (raw, mut schema) = match schema_file {
        Some(file) => file.apply(&raw)?,
        None => {
            let schema = infer_schema(&raw, &InferOptions::default())?;
            (raw, schema)
        }
    };
    if !src.decision.is_empty() {
        schema = schema.with_decisions(&src.decision)?;
    }
    let (table, catalog) = discretize(&raw, &schema)?;
    Ok(Encoded {
        name,
        table,
        catalog,
        schema,
        encode_time: start.elapsed(),
        notes,
    })
}

fn mining_config(args: &MineArgs, catalog: &ItemCatalog) -> Result<(MiningConfig, Vec<String>), RunError> {
    let minsup = Threshold::parse(&args.minsup)?;
    let minconf = Threshold::parse(&args.minconf)?;
    let (mode, decisions) = match args.mode {
        ModeArg::Free => (Mode::Free, Vec::new()),
        ModeArg::Fixed => {
            let items = catalog.with_role(Role::Decision);
            let mut names: Vec<String> = Vec::new();
            for &i in &items {
                let attr = &catalog.items()[i].attribute;
                if !names.contains(attr) {
                    names.push(attr.clone());
                }
            }
            (Mode::Fixed { decisions: items }, names)
        }
    };
    let config = MiningConfig::new(minsup, minconf, mode);
    config.validate(catalog.len())?;
    Ok((config, decisions))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn stored_catalog(db: &StoredDatabase, decisions: &[String]) -> Result<ItemCatalog, RunError> {
    let catalog = db.manifest().catalog()?;
    if decisions.is_empty() {
        return Ok(catalog);
    }
    for d in decisions {
        if !catalog.items().iter().any(|it| &it.attribute == d) {
            return Err(SchemaError::UnknownAttribute(d.clone()).into());
        }
    }
    let items = catalog
        .items()
        .iter()
        .cloned()
        .map(|mut it| {
            it.role = if decisions.contains(&it.attribute) {
                Role::Decision
            } else {
                Role::Condition
            };
            it
        })
        .collect();
    ItemCatalog::from_items(items).ok_or_else(|| StoreError::Manifest("inconsistent catalog".into()).into())
}

/// Row transactions rebuilt from stored trees, for the horizontal baseline.
fn transactions_from_trees(trees: &[PTree], n_rows: usize) -> Vec<Vec<usize>> {
    let mut rows = vec![Vec::new(); n_rows];
    for (i, t) in trees.iter().enumerate() {
        for (r, bit) in t.to_bits().iter().take(n_rows).enumerate() {
            if bit {
                rows[r].push(i);
            }
        }
    }
    rows
}

struct Timed {
    result: MiningResult,
    build: Duration,
    mine: Duration,
}

/// Runs `mine` or `compare`.
pub fn run_mine(args: &MineArgs, compare: bool) -> Result<Outcome, RunError> {
    let algo = match (compare, args.algo) {
        (true, None | Some(Algo::Both)) => Algo::Both,
        (true, Some(_)) => return Err(RunError::Usage("compare always runs both algorithms".into())),
        (false, a) => a.unwrap_or(Algo::Bfarm),
    };
    let opts = MinerOptions {
        threads: usize::from(args.threads),
        ..MinerOptions::default()
    };
    let mut notes = Vec::new();
    let mut runs: Vec<(&str, Timed)> = Vec::new();

    let from_store_only = args.source.input.is_none() && args.source.dataset.is_none();
    let (name, n_rows, padded_len, catalog, decisions, config);
    if from_store_only {
        let dir = args
            .store
            .as_deref()
            .ok_or_else(|| RunError::Usage("one of --input, --dataset or --store is required".into()))?;
        if args.source.schema.is_some() {
            return Err(RunError::Usage("--schema has no effect on an existing store".into()));
        }
        let t0 = Instant::now();
        let db = StoredDatabase::open(dir)?;
        let open_time = t0.elapsed();
        let cat = stored_catalog(&db, &args.source.decision)?;
        let (cfg, dec) = mining_config(args, &cat)?;
        n_rows = db.n_rows();
        padded_len = db.manifest().padded_len as usize;
        if matches!(algo, Algo::Bfarm | Algo::Both) {
            let t1 = Instant::now();
            let result = bf_arm_stored(&db, &cfg, &opts)?;
            runs.push((
                "bfarm",
                Timed {
                    result,
                    build: open_time,
                    mine: t1.elapsed(),
                },
            ));
        }
        if matches!(algo, Algo::Apriori | Algo::Both) {
            let t1 = Instant::now();
            let rows = transactions_from_trees(&db.load_all()?, n_rows);
            let build = open_time + t1.elapsed();
            let t2 = Instant::now();
            let result = apriori_mine(&rows, &cfg, cat.len());
            runs.push((
                "apriori",
                Timed {
                    result,
                    build,
                    mine: t2.elapsed(),
                },
            ));
        }
        name = dir.display().to_string();
        catalog = cat;
        decisions = dec;
        config = cfg;
    } else {
        let enc = encode(&args.source)?;
        notes.extend(enc.notes.iter().cloned());
        let (cfg, dec) = mining_config(args, &enc.catalog)?;
        n_rows = enc.table.n_rows();
        padded_len = enc.table.padded_len();
        if matches!(algo, Algo::Bfarm | Algo::Both) {
            let t0 = Instant::now();
            let trees = build_trees(&enc.table).map_err(MinerError::from)?;
            let (result, build, mine) = match &args.store {
                Some(dir) => {
                    save_database(dir, &enc.catalog, n_rows, &trees)?;
                    let db = StoredDatabase::open(dir)?;
                    notes.push(format!("wrote {} tree files to {}", trees.len(), dir.display()));
                    let build = enc.encode_time + t0.elapsed();
                    let t1 = Instant::now();
                    (bf_arm_stored(&db, &cfg, &opts)?, build, t1.elapsed())
                }
                None => {
                    let build = enc.encode_time + t0.elapsed();
                    let t1 = Instant::now();
                    (bf_arm(&trees, n_rows, &cfg, &opts)?, build, t1.elapsed())
                }
            };
            runs.push(("bfarm", Timed { result, build, mine }));
        }
        if matches!(algo, Algo::Apriori | Algo::Both) {
            let t0 = Instant::now();
            let rows = enc.table.transactions();
            let build = enc.encode_time + t0.elapsed();
            let t1 = Instant::now();
            let result = apriori_mine(&rows, &cfg, enc.catalog.len());
            runs.push((
                "apriori",
                Timed {
                    result,
                    build,
                    mine: t1.elapsed(),
                },
            ));
        }
        name = enc.name;
        catalog = enc.catalog;
        decisions = dec;
        config = cfg;
    }

    let (verdict, differences) = if runs.len() >= 2 {
        let (a, b) = (&runs[0].1.result, &runs[1].1.result);
        if a == b {
            (Some(Verdict::Equal), Vec::new())
        } else {
            (Some(Verdict::Mismatch), diff_results(a, b, &catalog, 50))
        }
    } else {
        (None, Vec::new())
    };
    let keep_time = !args.output.no_timings;
    let report = RunReport {
        dataset: name,
        n_rows,
        n_items: catalog.len(),
        padded_len,
        config: ConfigEcho {
            minsup: config.minsup.value(),
            minconf: config.minconf.value(),
            mode: match args.mode {
                ModeArg::Fixed => "fixed".into(),
                ModeArg::Free => "free".into(),
            },
            decisions,
            threads: opts.threads,
        },
        runs: runs
            .iter()
            .map(|(algo, t)| AlgorithmRun {
                algorithm: algo.to_string(),
                build_seconds: keep_time.then(|| seconds(t.build)),
                mine_seconds: keep_time.then(|| seconds(t.mine)),
                level_sizes: t.result.level_sizes(),
                frequent_itemsets: t.result.frequent_count(),
                rules: t.result.rules.len(),
            })
            .collect(),
        verdict,
        differences,
        rules: rule_rows(&runs[0].1.result, &catalog),
    };
    let code = if verdict == Some(Verdict::Mismatch) {
        exit::MISMATCH
    } else {
        exit::OK
    };
    Ok(Outcome {
        output: report.render(args.output.format),
        out_path: args.output.out.clone(),
        notes,
        code,
    })
}

#[derive(Debug, Serialize)]
pub struct StoreReport {
    pub dataset: String,
    pub store: String,
    pub n_rows: usize,
    pub n_items: usize,
    pub padded_len: usize,
    pub tree_nodes: usize,
    pub build_seconds: Option<f64>,
}

impl StoreReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.serialize(self).expect("in-memory write");
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
            }
            Format::Text => format!(
                "stored {}: {} rows, {} items (padded to {}), {} tree nodes in {}\n",
                self.dataset, self.n_rows, self.n_items, self.padded_len, self.tree_nodes, self.store
            ),
        }
    }
}

pub fn run_build(args: &BuildArgs) -> Result<Outcome, RunError> {
    let enc = encode(&args.source)?;
    let t0 = Instant::now();
    let trees = build_trees(&enc.table).map_err(MinerError::from)?;
    save_database(&args.store, &enc.catalog, enc.table.n_rows(), &trees)?;
    let build = enc.encode_time + t0.elapsed();
    let report = StoreReport {
        dataset: enc.name,
        store: args.store.display().to_string(),
        n_rows: enc.table.n_rows(),
        n_items: enc.catalog.len(),
        padded_len: enc.table.padded_len(),
        tree_nodes: trees.iter().map(PTree::node_count).sum(),
        build_seconds: (!args.output.no_timings).then(|| seconds(build)),
    };
    Ok(Outcome {
        output: report.render(args.output.format),
        out_path: args.output.out.clone(),
        notes: enc.notes,
        code: exit::OK,
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome, RunError> {
    match &cli.command {
        Command::Mine(a) => run_mine(a, false),
        Command::Compare(a) => run_mine(a, true),
        Command::BuildStore(a) => run_build(a),
    }
}

/// Writes `text` to `path` through a temporary sibling so a failed run never
/// leaves a half-written report.
pub fn write_atomically(path: &Path, text: &str) -> Result<(), RunError> {
    let file_name = path
        .file_name()
        .ok_or_else(|| RunError::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    std::fs::write(&tmp, text).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

/// Output flags shared by all subcommands.
pub fn output_args(cli: &Cli) -> &OutputArgs {
    match &cli.command {
        Command::Mine(a) | Command::Compare(a) => &a.output,
        Command::BuildStore(a) => &a.output,
    }
}
