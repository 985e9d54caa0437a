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

#![allow(dead_code)]

use proptest::prelude::*;
use ptarm::BitColumn;
use rand::Rng;

/// Columns with long pure runs as well as noise, so trees get both pure and
/// mixed quadrants at every level.
pub fn clumpy_column<R: Rng>(rng: &mut R, len: usize) -> BitColumn {
    let mut col = BitColumn::zeros(len);
    let mut i = 0;
    while i < len {
        let run = (1usize << rng.gen_range(0..=len.trailing_zeros())).min(len - i);
        match rng.gen_range(0..3) {
            0 => {}
            1 => col.fill_range(i, run),
            _ => {
                let density = rng.gen_range(0.0..1.0);
                for k in i..i + run {
                    col.set(k, rng.gen_bool(density));
                }
            }
        }
        i += run;
    }
    col
}

pub fn column_strategy(min_exp: u32, max_exp: u32) -> impl Strategy<Value = BitColumn> {
    (min_exp..=max_exp, any::<u64>()).prop_map(|(exp, seed)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        clumpy_column(&mut rng, 1 << exp)
    })
}

pub fn column_pair_strategy(min_exp: u32, max_exp: u32) -> impl Strategy<Value = (BitColumn, BitColumn)> {
    (min_exp..=max_exp, any::<u64>()).prop_map(|(exp, seed)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (clumpy_column(&mut rng, 1 << exp), clumpy_column(&mut rng, 1 << exp))
    })
}
