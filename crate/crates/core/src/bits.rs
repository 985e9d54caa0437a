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

//! Fixed-length bit columns backed by 64-bit words.

use std::fmt;

const WORD: usize = 64;

/// A sequence of bits of fixed length. Bits past `len` in the last word are
/// always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitColumn {
    len: usize,
    words: Vec<u64>,
}

impl BitColumn {
    pub fn zeros(len: usize) -> Self {
        BitColumn {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut col = BitColumn {
            len,
            words: vec![u64::MAX; len.div_ceil(WORD)],
        };
        col.clear_tail();
        col
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut col = BitColumn::default();
        for b in bits {
            col.push(b);
        }
        col
    }

    /// Parses a string of `0`/`1` characters. Whitespace and `_` are ignored.
    pub fn parse(s: &str) -> Option<Self> {
        let mut col = BitColumn::default();
        for c in s.chars() {
            match c {
                '0' => col.push(false),
                '1' => col.push(true),
                '_' => {}
                c if c.is_whitespace() => {}
                _ => return None,
            }
        }
        Some(col)
    }

    /// Builds a column of `len` bits from the low bits of `value`.
    /// Bit `i` of the column is bit `i` of `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD);
        let mut col = BitColumn::zeros(len);
        if len > 0 {
            col.words[0] = if len == WORD {
                value
            } else {
                value & ((1u64 << len) - 1)
            };
        }
        col
    }

    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(len.div_ceil(WORD), 0);
        let mut col = BitColumn { len, words };
        col.clear_tail();
        col
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    /// Extends with zeros up to `len`. Never shrinks.
    pub fn pad_to(&mut self, len: usize) {
        if len > self.len {
            self.len = len;
            self.words.resize(len.div_ceil(WORD), 0);
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Number of 1-bits in `start..start + size`.
    pub fn count_range(&self, start: usize, size: usize) -> u64 {
        let end = start + size;
        assert!(end <= self.len);
        if size == 0 {
            return 0;
        }
        let (first, last) = (start / WORD, (end - 1) / WORD);
        let lo_mask = u64::MAX << (start % WORD);
        let hi_mask = u64::MAX >> (WORD - 1 - (end - 1) % WORD);
        if first == last {
            return u64::from((self.words[first] & lo_mask & hi_mask).count_ones());
        }
        let mut n = u64::from((self.words[first] & lo_mask).count_ones());
        n += self.words[first + 1..last]
            .iter()
            .map(|w| u64::from(w.count_ones()))
            .sum::<u64>();
        n + u64::from((self.words[last] & hi_mask).count_ones())
    }

    /// Sets `start..start + size` to one.
    pub fn fill_range(&mut self, start: usize, size: usize) {
        let end = start + size;
        assert!(end <= self.len);
        let mut i = start;
        while i < end {
            if i.is_multiple_of(WORD) && end - i >= WORD {
                self.words[i / WORD] = u64::MAX;
                i += WORD;
            } else {
                self.set(i, true);
                i += 1;
            }
        }
    }

    /// Bitwise AND. Panics on length mismatch.
    pub fn and(&self, other: &BitColumn) -> BitColumn {
        assert_eq!(self.len, other.len, "bit column length mismatch");
        BitColumn {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitColumn({}; ", self.len)?;
        for b in self.iter().take(128) {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.len > 128 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for BitColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_range_matches_naive() {
        let col = BitColumn::from_bools((0..300).map(|i| (i * 7 + i / 3) % 5 < 2));
        for start in [0, 1, 63, 64, 65, 100, 127, 128, 200] {
            for size in [0, 1, 2, 63, 64, 65, 99] {
                if start + size > col.len() {
                    continue;
                }
                let naive = (start..start + size).filter(|&i| col.get(i)).count() as u64;
                assert_eq!(col.count_range(start, size), naive, "{start}+{size}");
            }
        }
    }

    #[test]
    fn ones_has_clean_tail() {
        let col = BitColumn::ones(70);
        assert_eq!(col.count_ones(), 70);
        assert_eq!(col.words()[1], (1 << 6) - 1);
    }

    #[test]
    fn parse_and_display() {
        let col = BitColumn::parse("1100 0000_1").unwrap();
        assert_eq!(col.len(), 9);
        assert_eq!(col.to_string(), "110000001");
        assert!(BitColumn::parse("10x").is_none());
    }

    #[test]
    fn fill_range_spans_words() {
        let mut col = BitColumn::zeros(200);
        col.fill_range(10, 150);
        assert_eq!(col.count_ones(), 150);
        assert!(!col.get(9) && col.get(10) && col.get(159) && !col.get(160));
    }

    #[test]
    fn pad_keeps_popcount() {
        let mut col = BitColumn::parse("10110").unwrap();
        col.pad_to(130);
        assert_eq!(col.len(), 130);
        assert_eq!(col.count_ones(), 3);
    }
}
