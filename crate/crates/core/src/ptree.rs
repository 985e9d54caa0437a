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

//! Quadrant count trees over bit columns.
//!
//! A column of power-of-two length is split recursively into four
//! contiguous quarters. Every node records how many 1-bits its block holds;
//! blocks that are all ones or all zeros stop the recursion. The node kind
//! doubles as the three-valued purity mask (pure-1, pure-0, mixed) that
//! drives ANDing, so no separate mask tree exists.
//!
//! Node sizes are never stored: a child's size is its parent's size / 4.
//! Lengths of the form `2 * 4^k` bottom out at blocks of two bits, which are
//! kept verbatim as [`Node::Leaf`].

use thiserror::Error;

use crate::bits::BitColumn;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PtreeError {
    #[error("column length {0} is not a power of two >= 4")]
    BadLength(usize),
    #[error("tree lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("cannot AND an empty list of trees")]
    EmptyOperands,
    #[error("malformed tree: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Pure0,
    Pure1,
    /// Block with `1 <= count < size`, split into four equal quarters.
    Mixed {
        count: u64,
        children: Box<[Node; 4]>,
    },
    /// A mixed two-bit block; bit `i` of `bits` is position `i` of the block.
    Leaf {
        bits: u8,
    },
}

impl Node {
    /// 1-bit count of this node when it covers `size` bits.
    #[inline]
    pub fn count(&self, size: usize) -> u64 {
        match self {
            Node::Pure0 => 0,
            Node::Pure1 => size as u64,
            Node::Mixed { count, .. } => *count,
            Node::Leaf { bits } => u64::from(bits.count_ones()),
        }
    }

    pub fn children(&self) -> Option<&[Node; 4]> {
        match self {
            Node::Mixed { children, .. } => Some(children),
            _ => None,
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Node::Pure0 | Node::Pure1)
    }

    fn node_count(&self) -> usize {
        match self {
            Node::Mixed { children, .. } => 1 + children.iter().map(Node::node_count).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Count tree over one column of length `len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PTree {
    len: usize,
    root: Node,
}

fn check_len(len: usize) -> Result<(), PtreeError> {
    if len >= 4 && len.is_power_of_two() {
        Ok(())
    } else {
        Err(PtreeError::BadLength(len))
    }
}

fn leaf(bits: u8) -> Node {
    match bits & 0b11 {
        0 => Node::Pure0,
        0b11 => Node::Pure1,
        b => Node::Leaf { bits: b },
    }
}

/// Collapses four quarters into their canonical parent.
fn join(children: [Node; 4], quarter: usize) -> Node {
    if children.iter().all(|c| *c == Node::Pure0) {
        return Node::Pure0;
    }
    if children.iter().all(|c| *c == Node::Pure1) {
        return Node::Pure1;
    }
    let count = children.iter().map(|c| c.count(quarter)).sum();
    Node::Mixed {
        count,
        children: Box::new(children),
    }
}

fn build_node(bits: &BitColumn, start: usize, size: usize) -> Node {
    let ones = bits.count_range(start, size);
    if ones == 0 {
        return Node::Pure0;
    }
    if ones == size as u64 {
        return Node::Pure1;
    }
    if !size.is_multiple_of(4) {
        debug_assert_eq!(size, 2);
        return leaf(u8::from(bits.get(start)) | u8::from(bits.get(start + 1)) << 1);
    }
    let q = size / 4;
    let children = [0, 1, 2, 3].map(|i| build_node(bits, start + i * q, q));
    Node::Mixed {
        count: ones,
        children: Box::new(children),
    }
}

fn and_node(a: &Node, b: &Node, size: usize) -> Node {
    match (a, b) {
        (Node::Pure0, _) | (_, Node::Pure0) => Node::Pure0,
        (Node::Pure1, x) | (x, Node::Pure1) => x.clone(),
        (Node::Leaf { bits: x }, Node::Leaf { bits: y }) => leaf(x & y),
        (Node::Mixed { children: ca, .. }, Node::Mixed { children: cb, .. }) => {
            let q = size / 4;
            join([0, 1, 2, 3].map(|i| and_node(&ca[i], &cb[i], q)), q)
        }
        // A block is split or kept raw purely by its size, so two valid trees
        // of equal length never disagree here.
        _ => unreachable!("mixed node kinds differ at size {size}"),
    }
}

fn and_count_node(a: &Node, b: &Node, size: usize) -> u64 {
    match (a, b) {
        (Node::Pure0, _) | (_, Node::Pure0) => 0,
        (Node::Pure1, x) | (x, Node::Pure1) => x.count(size),
        (Node::Leaf { bits: x }, Node::Leaf { bits: y }) => u64::from((x & y).count_ones()),
        (Node::Mixed { children: ca, .. }, Node::Mixed { children: cb, .. }) => {
            let q = size / 4;
            (0..4).map(|i| and_count_node(&ca[i], &cb[i], q)).sum()
        }
        _ => unreachable!("mixed node kinds differ at size {size}"),
    }
}

fn write_bits(node: &Node, out: &mut BitColumn, start: usize, size: usize) {
    match node {
        Node::Pure0 => {}
        Node::Pure1 => out.fill_range(start, size),
        Node::Leaf { bits } => {
            for i in 0..size {
                if bits >> i & 1 == 1 {
                    out.set(start + i, true);
                }
            }
        }
        Node::Mixed { children, .. } => {
            let q = size / 4;
            for (i, c) in children.iter().enumerate() {
                write_bits(c, out, start + i * q, q);
            }
        }
    }
}

fn validate(node: &Node, size: usize, path: &mut Vec<usize>) -> Result<(), PtreeError> {
    match node {
        Node::Pure0 | Node::Pure1 => Ok(()),
        Node::Leaf { bits } => {
            if size != 2 {
                return Err(PtreeError::Malformed(format!("raw leaf of size {size} at {path:?}")));
            }
            if *bits != 0b01 && *bits != 0b10 {
                return Err(PtreeError::Malformed(format!(
                    "raw leaf bits {bits:#04b} are not mixed at {path:?}"
                )));
            }
            Ok(())
        }
        Node::Mixed { count, children } => {
            if !size.is_multiple_of(4) {
                return Err(PtreeError::Malformed(format!("mixed node of size {size} at {path:?}")));
            }
            let q = size / 4;
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                validate(c, q, path)?;
                path.pop();
            }
            if children.iter().all(|c| *c == Node::Pure0) || children.iter().all(|c| *c == Node::Pure1) {
                return Err(PtreeError::Malformed(format!(
                    "mixed node with uniform pure children at {path:?}"
                )));
            }
            let sum: u64 = children.iter().map(|c| c.count(q)).sum();
            if sum != *count {
                return Err(PtreeError::Malformed(format!(
                    "mixed node count {count} != children sum {sum} at {path:?}"
                )));
            }
            Ok(())
        }
    }
}

impl PTree {
    /// Builds the canonical tree of `bits`.
    pub fn build(bits: &BitColumn) -> Result<PTree, PtreeError> {
        check_len(bits.len())?;
        Ok(PTree {
            len: bits.len(),
            root: build_node(bits, 0, bits.len()),
        })
    }

    pub fn pure0(len: usize) -> Result<PTree, PtreeError> {
        check_len(len)?;
        Ok(PTree { len, root: Node::Pure0 })
    }

    pub fn pure1(len: usize) -> Result<PTree, PtreeError> {
        check_len(len)?;
        Ok(PTree { len, root: Node::Pure1 })
    }

    /// Assembles a tree from a root node, checking every structural
    /// invariant: sizes, canonical form and count consistency.
    pub fn from_root(len: usize, root: Node) -> Result<PTree, PtreeError> {
        check_len(len)?;
        validate(&root, len, &mut Vec::new())?;
        Ok(PTree { len, root })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; trees cover at least four bits.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Number of 1-bits in the column. Read straight off the root.
    #[inline]
    pub fn root_count(&self) -> u64 {
        self.root.count(self.len)
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    /// Structural AND. The result is canonical and its bits are the bitwise
    /// AND of the operands' bits.
    pub fn and(&self, other: &PTree) -> Result<PTree, PtreeError> {
        if self.len != other.len {
            return Err(PtreeError::LengthMismatch(self.len, other.len));
        }
        Ok(PTree {
            len: self.len,
            root: and_node(&self.root, &other.root, self.len),
        })
    }

    /// Root count of `self AND other` without materialising the result.
    pub fn and_count(&self, other: &PTree) -> Result<u64, PtreeError> {
        if self.len != other.len {
            return Err(PtreeError::LengthMismatch(self.len, other.len));
        }
        Ok(and_count_node(&self.root, &other.root, self.len))
    }

    /// Left fold of [`PTree::and`]. A single operand is returned as is.
    pub fn and_many<T: AsRef<PTree>>(trees: &[T]) -> Result<PTree, PtreeError> {
        let (first, rest) = trees.split_first().ok_or(PtreeError::EmptyOperands)?;
        let mut acc = first.as_ref().clone();
        for t in rest {
            acc = acc.and(t.as_ref())?;
        }
        Ok(acc)
    }

    /// Reconstructs the column this tree was built from.
    pub fn to_bits(&self) -> BitColumn {
        let mut out = BitColumn::zeros(self.len);
        write_bits(&self.root, &mut out, 0, self.len);
        out
    }
}

impl AsRef<PTree> for PTree {
    fn as_ref(&self) -> &PTree {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(s: &str) -> BitColumn {
        BitColumn::parse(s).unwrap()
    }

    // Toy table columns padded to 16 rows.
    const COL_A: &str = "11000000 00000000";
    const COL_B: &str = "11110011 00000000";
    const COL_D: &str = "01101101 00000000";
    const COL_G: &str = "00111100 00000000";

    #[test]
    fn pure_columns() {
        let z = PTree::build(&BitColumn::zeros(16)).unwrap();
        assert_eq!(*z.root(), Node::Pure0);
        assert_eq!(z.root_count(), 0);
        let o = PTree::build(&BitColumn::ones(16)).unwrap();
        assert_eq!(*o.root(), Node::Pure1);
        assert_eq!(o.root_count(), 16);
    }

    #[test]
    fn toy_column_a_shape() {
        let t = PTree::build(&col(COL_A)).unwrap();
        assert_eq!(t.root_count(), 2);
        let ch = t.root().children().unwrap();
        assert_eq!(ch[0].count(4), 2);
        assert!(!ch[0].is_pure());
        assert_eq!(&ch[1..], &[Node::Pure0, Node::Pure0, Node::Pure0]);
    }

    #[test]
    fn level_one_counts_sum_to_root() {
        // 64-bit column with quarter counts 16, 8, 15, 16.
        let mut bits = BitColumn::ones(64);
        for i in 16..24 {
            bits.set(i, false);
        }
        bits.set(40, false);
        let t = PTree::build(&bits).unwrap();
        assert_eq!(t.root_count(), 55);
        let counts: Vec<u64> = t.root().children().unwrap().iter().map(|c| c.count(16)).collect();
        assert_eq!(counts, vec![16, 8, 15, 16]);
        assert_eq!(t.root().children().unwrap()[0], Node::Pure1);
    }

    #[test]
    fn root_counts_of_toy() {
        assert_eq!(PTree::build(&col(COL_B)).unwrap().root_count(), 6);
        assert_eq!(PTree::build(&col(COL_G)).unwrap().root_count(), 4);
    }

    #[test]
    fn and_with_pure_operands() {
        let x = PTree::build(&col(COL_D)).unwrap();
        assert_eq!(PTree::pure1(16).unwrap().and(&x).unwrap(), x);
        assert_eq!(x.and(&PTree::pure1(16).unwrap()).unwrap(), x);
        assert_eq!(PTree::pure0(16).unwrap().and(&x).unwrap(), PTree::pure0(16).unwrap());
    }

    #[test]
    fn and_toy_pairs() {
        let a = PTree::build(&col(COL_A)).unwrap();
        let b = PTree::build(&col(COL_B)).unwrap();
        assert_eq!(a.and(&b).unwrap().root_count(), 2);
        assert_eq!(a.and_count(&b).unwrap(), 2);
        let bdg = PTree::and_many(&[
            b,
            PTree::build(&col(COL_D)).unwrap(),
            PTree::build(&col(COL_G)).unwrap(),
        ])
        .unwrap();
        assert_eq!(bdg.root_count(), 1);
        assert_eq!(bdg.to_bits(), col("00100000 00000000"));
    }

    #[test]
    fn and_many_edge_cases() {
        let t = PTree::build(&col(COL_D)).unwrap();
        assert_eq!(PTree::and_many(std::slice::from_ref(&t)).unwrap(), t);
        let p1 = PTree::pure1(16).unwrap();
        let p0 = PTree::pure0(16).unwrap();
        assert_eq!(PTree::and_many(&[&p1, &p1, &p0].map(Clone::clone)).unwrap(), p0);
        assert_eq!(PTree::and_many::<PTree>(&[]), Err(PtreeError::EmptyOperands));
    }

    #[test]
    fn and_collapses_to_pure0() {
        let a = PTree::build(&col("1010101010101010")).unwrap();
        let b = PTree::build(&col("0101010101010101")).unwrap();
        assert_eq!(*a.and(&b).unwrap().root(), Node::Pure0);
    }

    #[test]
    fn bad_lengths() {
        assert_eq!(PTree::build(&BitColumn::zeros(12)), Err(PtreeError::BadLength(12)));
        assert_eq!(PTree::build(&BitColumn::zeros(2)), Err(PtreeError::BadLength(2)));
        let a = PTree::pure1(16).unwrap();
        let b = PTree::pure1(32).unwrap();
        assert_eq!(a.and(&b), Err(PtreeError::LengthMismatch(16, 32)));
    }

    #[test]
    fn raw_leaves_for_two_times_power_of_four() {
        let bits = col("10000000 00000000 00000000 00000011");
        let t = PTree::build(&bits).unwrap();
        assert_eq!(t.root_count(), 3);
        // 32 -> 8 -> 2: first 8-block holds a mixed 2-bit leaf
        let first = &t.root().children().unwrap()[0];
        assert_eq!(first.children().unwrap()[0], Node::Leaf { bits: 0b01 });
        assert_eq!(t.to_bits(), bits);
    }

    #[test]
    fn from_root_rejects_bad_structure() {
        let bad_count = Node::Mixed {
            count: 3,
            children: Box::new([Node::Pure1, Node::Pure0, Node::Pure0, Node::Pure0]),
        };
        assert!(PTree::from_root(16, bad_count).is_err());
        let uniform = Node::Mixed {
            count: 0,
            children: Box::new([Node::Pure0, Node::Pure0, Node::Pure0, Node::Pure0]),
        };
        assert!(PTree::from_root(16, uniform).is_err());
        assert!(PTree::from_root(16, Node::Leaf { bits: 1 }).is_err());
        let ok = PTree::build(&col(COL_B)).unwrap();
        assert_eq!(PTree::from_root(16, ok.root().clone()).unwrap(), ok);
    }
}
