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

//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "ptarm",
    version,
    about = "Association rule mining over Ptrees, with a horizontal Apriori baseline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine frequent itemsets and strong rules.
    Mine(MineArgs),
    /// Mine with both algorithms and check that they agree.
    Compare(MineArgs),
    /// Discretize a table and persist one tree file per item.
    BuildStore(BuildArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Bfarm,
    Apriori,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fixed,
    Free,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Delimited table to read.
    #[arg(long, value_name = "PATH", conflicts_with = "dataset")]
    pub input: Option<PathBuf>,
    /// Named benchmark: car, mushroom or adult.
    #[arg(long, value_name = "NAME")]
    pub dataset: Option<String>,
    /// Where named benchmarks live [default: $PTARM_DATA_DIR or the bundled data/]
    #[arg(long, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    /// TOML schema file; without one, a header row is required and the
    /// schema is inferred.
    #[arg(long, value_name = "PATH")]
    pub schema: Option<PathBuf>,
    /// The input has no header row; column names come from the schema.
    #[arg(long, requires = "schema")]
    pub no_header: bool,
    /// Field delimiter of the input.
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
    /// Decision attributes, overriding roles in the schema.
    #[arg(long, value_name = "ATTR[,ATTR...]", value_delimiter = ',')]
    pub decision: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Leave timings out so reports compare byte for byte.
    #[arg(long)]
    pub no_timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Minimum support, e.g. 10% or 0.10.
    #[arg(long, value_name = "PCT")]
    pub minsup: String,
    /// Minimum confidence, e.g. 75% or 0.75.
    #[arg(long, value_name = "PCT")]
    pub minconf: String,
    #[arg(long, value_enum, default_value = "fixed")]
    pub mode: ModeArg,
    /// [default: bfarm for mine, both for compare]
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    /// Tree store directory. With an input, trees are written there and mined
    /// back from disk; alone, an existing store is mined.
    #[arg(long, value_name = "DIR")]
    pub store: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: u16,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_name = "DIR")]
    pub store: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be one ASCII character, got `{s}`")),
    }
}
