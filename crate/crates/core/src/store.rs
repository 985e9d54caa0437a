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

//! Binary persistence for count trees.
//!
//! File layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "PTRE"
//!      4     4  format version (1)
//!      8     8  padded length L
//!     16     8  original row count N_t
//!     24     8  root count
//!     32     4  item index
//!     36     8  body length in bytes
//!     44     -  body
//! ```
//!
//! The body is a pre-order node stream. Each node starts with a tag byte:
//! `0` pure-0, `1` pure-1, `2` mixed (followed by a u32 count and its four
//! children), `3` raw leaf (followed by a size byte and one byte of packed
//! bits). Node sizes follow from depth and L.
//!
//! A stored database is a directory holding one tree file per item plus a
//! `manifest.toml` with the item catalog and row counts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ptree::{Node, PTree, PtreeError};
use crate::schema::{Item, ItemCatalog, Role, MIN_PADDED_LEN};

pub const MAGIC: [u8; 4] = *b"PTRE";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 44;
pub const MANIFEST_FILE: &str = "manifest.toml";

const TAG_PURE0: u8 = 0;
const TAG_PURE1: u8 = 1;
const TAG_MIXED: u8 = 2;
const TAG_LEAF: u8 = 3;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("format error: {0}")]
    Format(String),
    #[error("corrupt tree body: {0}")]
    Corrupt(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("refusing to serialize: {0}")]
    Invalid(String),
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PtreeFileHeader {
    pub version: u32,
    pub padded_len: u64,
    pub n_rows: u64,
    pub root_count: u64,
    pub item_index: u32,
    pub body_len: u64,
}

impl PtreeFileHeader {
    fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&self.version.to_le_bytes());
        out.extend_from_slice(&self.padded_len.to_le_bytes());
        out.extend_from_slice(&self.n_rows.to_le_bytes());
        out.extend_from_slice(&self.root_count.to_le_bytes());
        out.extend_from_slice(&self.item_index.to_le_bytes());
        out.extend_from_slice(&self.body_len.to_le_bytes());
    }

    /// Parses and sanity-checks the fixed-size header.
    pub fn decode(bytes: &[u8]) -> Result<Self, StoreError> {
        if bytes.len() < HEADER_LEN {
            return Err(StoreError::Format(format!(
                "need {HEADER_LEN} header bytes, have {}",
                bytes.len()
            )));
        }
        if bytes[..4] != MAGIC {
            return Err(StoreError::Format("bad magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let header = PtreeFileHeader {
            version: u32_at(4),
            padded_len: u64_at(8),
            n_rows: u64_at(16),
            root_count: u64_at(24),
            item_index: u32_at(32),
            body_len: u64_at(36),
        };
        if header.version != VERSION {
            return Err(StoreError::Format(format!("unsupported version {}", header.version)));
        }
        let l = header.padded_len;
        if l < MIN_PADDED_LEN as u64 || !l.is_power_of_two() || l > usize::MAX as u64 {
            return Err(StoreError::Format(format!("bad padded length {l}")));
        }
        if header.n_rows > l || header.root_count > header.n_rows {
            return Err(StoreError::Format(format!(
                "header counts out of range: root {} rows {} len {l}",
                header.root_count, header.n_rows
            )));
        }
        Ok(header)
    }
}

fn encode_node(node: &Node, out: &mut Vec<u8>) -> Result<(), StoreError> {
    match node {
        Node::Pure0 => out.push(TAG_PURE0),
        Node::Pure1 => out.push(TAG_PURE1),
        Node::Leaf { bits } => out.extend_from_slice(&[TAG_LEAF, 2, *bits]),
        Node::Mixed { count, children } => {
            let count =
                u32::try_from(*count).map_err(|_| StoreError::Invalid(format!("node count {count} exceeds u32")))?;
            out.push(TAG_MIXED);
            out.extend_from_slice(&count.to_le_bytes());
            for c in children.iter() {
                encode_node(c, out)?;
            }
        }
    }
    Ok(())
}

/// Serializes `tree` for item `item_index` of a table with `n_rows` rows.
pub fn write(tree: &PTree, n_rows: u64, item_index: u32) -> Result<Vec<u8>, StoreError> {
    let len = tree.len() as u64;
    if len < MIN_PADDED_LEN as u64 {
        return Err(StoreError::Invalid(format!("tree length {len} below {MIN_PADDED_LEN}")));
    }
    if tree.root_count() > n_rows || n_rows > len {
        return Err(StoreError::Invalid(format!(
            "need root count {} <= rows {n_rows} <= length {len}",
            tree.root_count()
        )));
    }
    let mut body = Vec::new();
    encode_node(tree.root(), &mut body)?;
    let mut out = Vec::with_capacity(HEADER_LEN + body.len());
    PtreeFileHeader {
        version: VERSION,
        padded_len: len,
        n_rows,
        root_count: tree.root_count(),
        item_index,
        body_len: body.len() as u64,
    }
    .encode(&mut out);
    out.extend_from_slice(&body);
    Ok(out)
}

struct Decoder<'a> {
    body: &'a [u8],
    pos: usize,
}

impl Decoder<'_> {
    fn byte(&mut self) -> Result<u8, StoreError> {
        let b = *self
            .body
            .get(self.pos)
            .ok_or_else(|| StoreError::Corrupt(format!("truncated at body offset {}", self.pos)))?;
        self.pos += 1;
        Ok(b)
    }

    fn u32(&mut self) -> Result<u32, StoreError> {
        let mut buf = [0u8; 4];
        for b in &mut buf {
            *b = self.byte()?;
        }
        Ok(u32::from_le_bytes(buf))
    }

    fn node(&mut self, size: usize) -> Result<Node, StoreError> {
        let at = self.pos;
        match self.byte()? {
            TAG_PURE0 => Ok(Node::Pure0),
            TAG_PURE1 => Ok(Node::Pure1),
            TAG_MIXED => {
                if !size.is_multiple_of(4) {
                    return Err(StoreError::Corrupt(format!("mixed node of size {size} at offset {at}")));
                }
                let count = u64::from(self.u32()?);
                let q = size / 4;
                let children = [self.node(q)?, self.node(q)?, self.node(q)?, self.node(q)?];
                let sum: u64 = children.iter().map(|c| c.count(q)).sum();
                if sum != count {
                    return Err(StoreError::Integrity(format!(
                        "node at offset {at} stores count {count}, children sum to {sum}"
                    )));
                }
                Ok(Node::Mixed {
                    count,
                    children: Box::new(children),
                })
            }
            TAG_LEAF => {
                let stored = usize::from(self.byte()?);
                if stored != size || size >= 4 {
                    return Err(StoreError::Corrupt(format!(
                        "raw leaf size {stored} where {size} expected at offset {at}"
                    )));
                }
                let bits = self.byte()?;
                Ok(Node::Leaf { bits })
            }
            t => Err(StoreError::Corrupt(format!("unknown tag {t} at offset {at}"))),
        }
    }
}

/// Decodes a tree file. Returns the tree, original row count and item index.
pub fn read(bytes: &[u8]) -> Result<(PTree, u64, u32), StoreError> {
    if bytes.is_empty() {
        return Err(StoreError::Format("empty input".into()));
    }
    let header = PtreeFileHeader::decode(bytes)?;
    let body = &bytes[HEADER_LEN..];
    if (body.len() as u64) < header.body_len {
        return Err(StoreError::Corrupt(format!(
            "body truncated: {} of {} bytes",
            body.len(),
            header.body_len
        )));
    }
    if (body.len() as u64) > header.body_len {
        return Err(StoreError::Corrupt(format!(
            "{} trailing bytes after body",
            body.len() as u64 - header.body_len
        )));
    }
    let len = header.padded_len as usize;
    let mut dec = Decoder { body, pos: 0 };
    let root = dec.node(len)?;
    if dec.pos != body.len() {
        return Err(StoreError::Corrupt(format!(
            "node stream ends at {} of {} bytes",
            dec.pos,
            body.len()
        )));
    }
    let tree = PTree::from_root(len, root).map_err(|e| match e {
        PtreeError::Malformed(m) => StoreError::Corrupt(m),
        e => StoreError::Corrupt(e.to_string()),
    })?;
    if tree.root_count() != header.root_count {
        return Err(StoreError::Integrity(format!(
            "header root count {} but tree holds {}",
            header.root_count,
            tree.root_count()
        )));
    }
    if tree.root_count() > header.n_rows {
        return Err(StoreError::Integrity(format!(
            "tree holds {} ones in {} rows",
            tree.root_count(),
            header.n_rows
        )));
    }
    Ok((tree, header.n_rows, header.item_index))
}

/// Root count from the header alone; the body is not touched.
pub fn peek_root_count(bytes: &[u8]) -> Result<u64, StoreError> {
    Ok(PtreeFileHeader::decode(bytes)?.root_count)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestItem {
    pub index: usize,
    pub attribute: String,
    pub value: String,
    pub role: Role,
    #[serde(default)]
    pub binary: bool,
    pub file: String,
    pub root_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub n_rows: u64,
    pub padded_len: u64,
    #[serde(rename = "item")]
    pub items: Vec<ManifestItem>,
}

impl Manifest {
    pub fn catalog(&self) -> Result<ItemCatalog, StoreError> {
        let mut names: Vec<&str> = Vec::new();
        let items = self
            .items
            .iter()
            .map(|m| {
                let attribute_index = match names.iter().position(|n| *n == m.attribute) {
                    Some(p) => p,
                    None => {
                        names.push(&m.attribute);
                        names.len() - 1
                    }
                };
                Item {
                    index: m.index,
                    attribute: m.attribute.clone(),
                    attribute_index,
                    value: m.value.clone(),
                    role: m.role,
                    binary: m.binary,
                }
            })
            .collect();
        ItemCatalog::from_items(items).ok_or_else(|| StoreError::Manifest("item indices are not contiguous".into()))
    }
}

fn tree_file_name(index: usize) -> String {
    format!("item_{index:05}.ptree")
}

/// Writes one tree file per item plus the manifest into `dir`.
pub fn save_database(
    dir: &Path,
    catalog: &ItemCatalog,
    n_rows: usize,
    trees: &[PTree],
) -> Result<Manifest, StoreError> {
    if trees.len() != catalog.len() {
        return Err(StoreError::Invalid(format!(
            "{} trees for {} items",
            trees.len(),
            catalog.len()
        )));
    }
    let padded_len = trees.first().map_or(0, |t| t.len() as u64);
    fs::create_dir_all(dir)?;
    let mut items = Vec::with_capacity(trees.len());
    for (item, tree) in catalog.items().iter().zip(trees) {
        let index = u32::try_from(item.index).map_err(|_| StoreError::Invalid("item index exceeds u32".into()))?;
        let bytes = write(tree, n_rows as u64, index)?;
        let file = tree_file_name(item.index);
        fs::write(dir.join(&file), bytes)?;
        items.push(ManifestItem {
            index: item.index,
            attribute: item.attribute.clone(),
            value: item.value.clone(),
            role: item.role,
            binary: item.binary,
            file,
            root_count: tree.root_count(),
        });
    }
    let manifest = Manifest {
        version: VERSION,
        n_rows: n_rows as u64,
        padded_len,
        items,
    };
    let text = toml::to_string(&manifest).map_err(|e| StoreError::Manifest(e.to_string()))?;
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}

/// A directory written by [`save_database`].
#[derive(Debug, Clone)]
pub struct StoredDatabase {
    dir: PathBuf,
    manifest: Manifest,
}

impl StoredDatabase {
    pub fn open(dir: &Path) -> Result<Self, StoreError> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        let manifest: Manifest = toml::from_str(&text).map_err(|e| StoreError::Manifest(e.to_string()))?;
        if manifest.version != VERSION {
            return Err(StoreError::Manifest(format!(
                "unsupported manifest version {}",
                manifest.version
            )));
        }
        Ok(StoredDatabase {
            dir: dir.to_path_buf(),
            manifest,
        })
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn n_rows(&self) -> usize {
        self.manifest.n_rows as usize
    }

    fn item(&self, index: usize) -> Result<&ManifestItem, StoreError> {
        self.manifest
            .items
            .get(index)
            .ok_or_else(|| StoreError::Manifest(format!("no item {index}")))
    }

    /// Root count of item `index`, read from its file header only.
    pub fn peek(&self, index: usize) -> Result<u64, StoreError> {
        use std::io::Read;
        let mut f = fs::File::open(self.dir.join(&self.item(index)?.file))?;
        let mut buf = [0u8; HEADER_LEN];
        f.read_exact(&mut buf)
            .map_err(|_| StoreError::Format("short header".into()))?;
        peek_root_count(&buf)
    }

    pub fn load(&self, index: usize) -> Result<PTree, StoreError> {
        let entry = self.item(index)?;
        let bytes = fs::read(self.dir.join(&entry.file))?;
        let (tree, n_rows, item_index) = read(&bytes)?;
        if n_rows != self.manifest.n_rows
            || item_index as usize != entry.index
            || tree.len() as u64 != self.manifest.padded_len
        {
            return Err(StoreError::Integrity(format!(
                "{} disagrees with the manifest",
                entry.file
            )));
        }
        if tree.root_count() != entry.root_count {
            return Err(StoreError::Integrity(format!(
                "{} holds root count {}, manifest says {}",
                entry.file,
                tree.root_count(),
                entry.root_count
            )));
        }
        Ok(tree)
    }

    pub fn load_all(&self) -> Result<Vec<PTree>, StoreError> {
        (0..self.manifest.items.len()).map(|i| self.load(i)).collect()
    }
}
