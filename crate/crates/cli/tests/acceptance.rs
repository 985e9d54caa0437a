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

//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fail.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use clap::Parser;
use ptarm::io::{read_table, SchemaFile, TableFormat};
use ptarm::oracle::{apriori_mine, brute_force_rules};
use ptarm::store::{peek_root_count, read, write};
use ptarm::{
    bf_arm, build_trees, discretize, BitColumn, BitmapTable, MinerOptions, MiningConfig, MiningResult, Mode, PTree,
    Threshold,
};
use ptarm_cli::cli::Cli;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn data(rel: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn th(v: f64) -> Threshold {
    Threshold::new(v).unwrap()
}

// ---- 1 ----------------------------------------------------------------

const EXPECTED_G: &[&str] = &["B", "D", "E", "F", "B,D"];
const EXPECTED_F: &[&str] = &[
    "A",
    "B",
    "D",
    "E",
    "A,B",
    "A,C",
    "A,D",
    "A,E",
    "B,C",
    "B,D",
    "C,D",
    "A,B,C",
    "A,B,D",
    "A,B,E",
    "A,C,D",
    "B,C,D",
    "B,C,E",
    "B,D,E",
    "C,D,E",
    "A,B,C,D",
    "A,B,C,E",
    "A,C,D,E",
    "B,C,D,E",
    "A,B,C,D,E",
];

fn toy_golden() -> Check {
    let raw = read_table(&data("toy.csv"), &TableFormat::default()).map_err(|e| e.to_string())?;
    let schema = SchemaFile::load(&data("schemas/toy.toml")).map_err(|e| e.to_string())?;
    let (raw, schema) = schema.apply(&raw).map_err(|e| e.to_string())?;
    let (table, catalog) = discretize(&raw, &schema).map_err(|e| e.to_string())?;
    let trees = build_trees(&table).map_err(|e| e.to_string())?;
    let g = catalog.find_by_label("G")[0];
    let f = catalog.find_by_label("F")[0];
    let config = MiningConfig::new(th(0.10), th(0.30), Mode::Fixed { decisions: vec![f, g] });
    let result = bf_arm(&trees, 8, &config, &MinerOptions::default()).map_err(|e| e.to_string())?;

    // expected values by counting rows of the fixture directly
    let rows: Vec<BTreeSet<String>> = raw
        .rows
        .iter()
        .map(|r| {
            raw.header
                .iter()
                .zip(r)
                .filter(|(_, v)| *v == "yes")
                .map(|(h, _)| h.clone())
                .collect()
        })
        .collect();
    let count = |items: &[&str]| rows.iter().filter(|r| items.iter().all(|i| r.contains(*i))).count() as f64;
    let mut checked = 0;
    for (cons, antes) in [("G", EXPECTED_G), ("F", EXPECTED_F)] {
        for a in antes.iter() {
            let ante: Vec<&str> = a.split(',').collect();
            let idx: Vec<usize> = ante.iter().map(|l| catalog.find_by_label(l)[0]).collect();
            let c = catalog.find_by_label(cons)[0];
            let rule = result.rule(&idx, c).ok_or_else(|| format!("missing {a} -> {cons}"))?;
            let joint = count(&[ante.as_slice(), &[cons]].concat());
            let (sup, conf) = (joint / 8.0, joint / count(&ante));
            ensure(rule.support == sup && rule.confidence == conf, || {
                format!(
                    "{a} -> {cons}: got ({}, {}), counted ({sup}, {conf})",
                    rule.support, rule.confidence
                )
            })?;
            checked += 1;
        }
    }
    let dg = result.rule(&[catalog.find_by_label("D")[0]], g).unwrap();
    ensure(dg.support == 3.0 / 8.0 && dg.confidence == 3.0 / 5.0, || {
        "D -> G values".into()
    })?;
    let oracle = brute_force_rules(&table.transactions(), &config, catalog.len());
    ensure(result.rules == oracle, || {
        "rule set differs from brute-force oracle".into()
    })?;
    let c_f = result.rule(&[catalog.find_by_label("C")[0]], f).is_some();
    let de_g = result
        .rule(&[catalog.find_by_label("D")[0], catalog.find_by_label("E")[0]], g)
        .is_some();
    ensure(c_f && de_g, || "oracle extras C -> F and D,E -> G absent".into())?;
    let extras = result.rules.len() - checked;
    Ok(format!(
        "{checked} reference rules exact, output = oracle ({} rules, {extras} beyond the reference list incl. C->F, D,E->G)",
        result.rules.len()
    ))
}

// ---- 2 / 8 helpers ----------------------------------------------------

struct Instance {
    n_items: usize,
    rows: Vec<Vec<usize>>,
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n_items = rng.gen_range(2..=12);
    let n_rows = rng.gen_range(1..=64);
    let density = rng.gen_range(0.1..0.9);
    let rows = (0..n_rows)
        .map(|_| (0..n_items).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    Instance { n_items, rows }
}

impl Instance {
    fn trees(&self) -> Vec<PTree> {
        let cols = (0..self.n_items)
            .map(|i| BitColumn::from_bools(self.rows.iter().map(|r| r.contains(&i))))
            .collect();
        build_trees(&BitmapTable::from_columns(self.rows.len(), cols).unwrap()).unwrap()
    }
}

fn random_mode(rng: &mut ChaCha8Rng, n_items: usize, free: bool) -> Mode {
    if free {
        return Mode::Free;
    }
    let k = rng.gen_range(1..n_items);
    let mut d: Vec<usize> = rand::seq::index::sample(rng, n_items, k).into_vec();
    d.sort_unstable();
    Mode::Fixed { decisions: d }
}

const MINSUPS: [f64; 4] = [0.05, 0.10, 0.25, 0.50];
const MINCONFS: [f64; 3] = [0.30, 0.75, 0.90];

fn oracle_sweep() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut rules = 0;
    let mut itemsets = 0;
    for case in 0..500 {
        let inst = random_instance(&mut rng);
        let mode = random_mode(&mut rng, inst.n_items, case % 2 == 1);
        let minsup = MINSUPS[rng.gen_range(0..4)];
        let minconf = MINCONFS[rng.gen_range(0..3)];
        let config = MiningConfig::new(th(minsup), th(minconf), mode);
        let got =
            bf_arm(&inst.trees(), inst.rows.len(), &config, &MinerOptions::default()).map_err(|e| e.to_string())?;
        let want = apriori_mine(&inst.rows, &config, inst.n_items);
        ensure(got == want, || {
            format!(
                "case {case}: {} items, {} rows, {config:?}",
                inst.n_items,
                inst.rows.len()
            )
        })?;
        rules += got.rules.len();
        itemsets += got.frequent_count();
    }
    Ok(format!(
        "500 instances equal ({itemsets} itemsets, {rules} rules compared)"
    ))
}

// ---- 3 / 4 ------------------------------------------------------------

struct Corpus {
    homomorphism: Result<u64, String>,
    lossless: Result<u64, String>,
}

fn check_pair(x: &BitColumn, y: &BitColumn, a: &PTree, b: &PTree, c: &mut Corpus) {
    let ab = a.and(b).unwrap();
    let want = x.and(y).count_ones();
    if let Ok(n) = &mut c.homomorphism {
        if ab.root_count() != want || a.and_count(b).unwrap() != want {
            c.homomorphism = Err(format!(
                "{x} AND {y}: root count {} vs popcount {want}",
                ab.root_count()
            ));
        } else {
            *n += 1;
        }
    }
    if let Ok(n) = &mut c.lossless {
        if PTree::build(&ab.to_bits()).unwrap() != ab {
            c.lossless = Err(format!("{x} AND {y}: rebuilt tree differs"));
        } else {
            *n += 1;
        }
    }
}

fn tree_corpus() -> Corpus {
    let mut c = Corpus {
        homomorphism: Ok(0),
        lossless: Ok(0),
    };
    let cols: Vec<BitColumn> = (0u64..1 << 16).map(|v| BitColumn::from_u64(v, 16)).collect();
    let trees: Vec<PTree> = cols.iter().map(|x| PTree::build(x).unwrap()).collect();
    for (x, t) in cols.iter().zip(&trees) {
        if t.to_bits() != *x {
            c.lossless = Err(format!("to_bits(build({x})) differs"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for i in 0..cols.len() {
        for _ in 0..64 {
            let j = rng.gen_range(0..cols.len());
            check_pair(&cols[i], &cols[j], &trees[i], &trees[j], &mut c);
        }
    }
    for _ in 0..10_000 {
        let len = 1usize << rng.gen_range(6..=12);
        let x = random_column(&mut rng, len);
        let y = random_column(&mut rng, len);
        let (a, b) = (PTree::build(&x).unwrap(), PTree::build(&y).unwrap());
        if c.lossless.is_ok() && (a.to_bits() != x || b.to_bits() != y) {
            c.lossless = Err(format!("length {len}: to_bits(build(x)) differs"));
        }
        check_pair(&x, &y, &a, &b, &mut c);
    }
    c
}

/// Mix of uniform noise and long pure runs.
fn random_column(rng: &mut ChaCha8Rng, len: usize) -> BitColumn {
    let mut col = BitColumn::zeros(len);
    let mut i = 0;
    while i < len {
        let run = (1usize << rng.gen_range(0..=len.trailing_zeros())).min(len - i);
        match rng.gen_range(0..3) {
            0 => {}
            1 => col.fill_range(i, run),
            _ => {
                let p = rng.gen_range(0.0..1.0);
                for k in i..i + run {
                    col.set(k, rng.gen_bool(p));
                }
            }
        }
        i += run;
    }
    col
}

// ---- 5 ----------------------------------------------------------------

fn persistence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut bytes_total = 0;
    for case in 0..1000 {
        let len = 1usize << rng.gen_range(4..=14);
        let t = PTree::build(&random_column(&mut rng, len)).unwrap();
        let n_rows = rng.gen_range(t.root_count().max(1)..=len as u64);
        let item = rng.gen::<u32>();
        let bytes = write(&t, n_rows, item).map_err(|e| e.to_string())?;
        let (back, n, i) = read(&bytes).map_err(|e| format!("case {case}: {e}"))?;
        ensure(back == t && n == n_rows && i == item, || {
            format!("case {case}: round trip differs")
        })?;
        ensure(peek_root_count(&bytes).ok() == Some(t.root_count()), || {
            format!("case {case}: peek")
        })?;
        ensure(write(&back, n, i).map_err(|e| e.to_string())? == bytes, || {
            format!("case {case}: rewrite differs")
        })?;
        bytes_total += bytes.len();
    }
    Ok(format!("1000 trees, {bytes_total} bytes, byte-identical rewrite"))
}

// ---- 6 ----------------------------------------------------------------

fn benchmark(name: &str, minsup: &str, minconf: &str, limit: Duration) -> Check {
    let mut lines = Vec::new();
    let mut n_rows = 0;
    for mode in ["fixed", "free"] {
        let cli = Cli::try_parse_from([
            "ptarm",
            "compare",
            "--dataset",
            name,
            "--minsup",
            minsup,
            "--minconf",
            minconf,
            "--mode",
            mode,
            "--format",
            "json",
        ])
        .map_err(|e| e.to_string())?;
        let start = Instant::now();
        let outcome = ptarm_cli::execute(&cli).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let report: serde_json::Value = serde_json::from_str(&outcome.output).map_err(|e| e.to_string())?;
        let substitute = outcome.notes.iter().any(|n| n.contains("KEEL"));
        ensure(report["verdict"] == "equal" && outcome.code == 0, || {
            format!(
                "{mode}: verdict {} differences {}",
                report["verdict"], report["differences"]
            )
        })?;
        ensure(elapsed <= limit, || {
            format!("{mode}: took {elapsed:?}, limit {limit:?}")
        })?;
        n_rows = report["n_rows"].as_u64().unwrap_or(0);
        let runs = report["runs"].as_array().unwrap();
        lines.push(format!(
            "{mode}: {} rules, bfarm mine {:.3}s, apriori mine {:.3}s{}",
            runs[0]["rules"],
            runs[0]["mine_seconds"].as_f64().unwrap(),
            runs[1]["mine_seconds"].as_f64().unwrap(),
            if substitute { " (KEEL copy)" } else { "" }
        ));
    }
    Ok(format!("{name} {n_rows} rows; {}", lines.join("; ")))
}

// ---- 7 ----------------------------------------------------------------

fn no_scan() -> Check {
    let raw = read_table(&data("car-keel.csv"), &TableFormat::default()).map_err(|e| e.to_string())?;
    let schema = SchemaFile::load(&data("schemas/car.toml")).map_err(|e| e.to_string())?;
    let (raw, schema) = schema.apply(&raw).map_err(|e| e.to_string())?;
    let (table, catalog) = discretize(&raw, &schema).map_err(|e| e.to_string())?;
    let trees = build_trees(&table).map_err(|e| e.to_string())?;
    let after_build = table.access_count();
    let mut total = 0;
    for mode in [
        Mode::Fixed {
            decisions: catalog.find_by_label("class"),
        },
        Mode::Free,
    ] {
        let config = MiningConfig::new(th(0.10), th(0.75), mode);
        let r = bf_arm(
            &trees,
            table.n_rows(),
            &config,
            &MinerOptions {
                threads: 2,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        total += r.frequent_count();
    }
    let during = table.access_count() - after_build;
    ensure(during == 0, || format!("{during} bitmap accesses while mining"))?;
    // the counter itself must be live
    let _ = table.transactions();
    ensure(table.access_count() > after_build, || {
        "access counter never moves".into()
    })?;
    Ok(format!("0 bitmap reads across 2 runs ({total} itemsets counted)"))
}

// ---- 8 ----------------------------------------------------------------

type Keys = (BTreeSet<(Vec<usize>, u64)>, BTreeSet<(Vec<usize>, usize, u64, u64)>);

fn keys(r: &MiningResult) -> Keys {
    (
        r.itemsets().map(|f| (f.itemset.items().to_vec(), f.count)).collect(),
        r.rules
            .iter()
            .map(|r| (r.antecedent.items().to_vec(), r.consequent, r.count, r.antecedent_count))
            .collect(),
    )
}

fn monotonicity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let grid = [0.05, 0.10, 0.25, 0.30, 0.50, 0.75, 0.90, 1.0];
    let mut comparisons = 0;
    for case in 0..50 {
        let inst = random_instance(&mut rng);
        let trees = inst.trees();
        let mode = random_mode(&mut rng, inst.n_items, case % 2 == 0);
        let mine = |s: f64, c: f64| {
            bf_arm(
                &trees,
                inst.rows.len(),
                &MiningConfig::new(th(s), th(c), mode.clone()),
                &MinerOptions::default(),
            )
            .unwrap()
        };
        let (s0, c0) = (grid[rng.gen_range(0..4)], grid[rng.gen_range(0..4)]);
        let low = keys(&mine(s0, c0));
        for &s1 in grid.iter().filter(|&&s| s >= s0) {
            for &c1 in grid.iter().filter(|&&c| c >= c0) {
                let high = keys(&mine(s1, c1));
                ensure(high.0.is_subset(&low.0) && high.1.is_subset(&low.1), || {
                    format!("case {case}: ({s1}, {c1}) not contained in ({s0}, {c0})")
                })?;
                comparisons += 1;
            }
        }
    }
    Ok(format!("50 instances, {comparisons} threshold pairs nested"))
}

// -----------------------------------------------------------------------

fn main() {
    let mut failed = 0;
    let mut report = |id: &str, what: &str, limit: Option<Duration>, f: &dyn Fn() -> Check| {
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS [{id}] {what}: {detail} ({elapsed:.2?})"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{id}] {what}: {detail} ({elapsed:.2?})");
            }
        }
    };

    report(
        "1",
        "toy table golden rules",
        Some(Duration::from_secs(1)),
        &toy_golden,
    );
    report(
        "2",
        "tree miner equals horizontal Apriori on random instances",
        Some(Duration::from_secs(60)),
        &oracle_sweep,
    );

    let start = Instant::now();
    let corpus = tree_corpus();
    let elapsed = start.elapsed();
    let (h, l) = (corpus.homomorphism, corpus.lossless);
    report("3", "count homomorphism", None, &|| {
        h.clone()
            .map(|n| format!("{n} pairs (2^16 x 64 at length 16 + 10^4 at 64..4096), corpus {elapsed:.2?}"))
    });
    report("4", "losslessness and canonical AND", None, &|| {
        l.clone()
            .map(|n| format!("{n} AND results rebuilt identically, every column round-trips"))
    });

    report("5", "persistence round trip", None, &persistence);
    report("6a", "Car Evaluation 10%/75%", Some(Duration::from_secs(120)), &|| {
        benchmark("car", "10%", "75%", Duration::from_secs(60))
    });
    report("6b", "Mushroom 35%/90%", Some(Duration::from_secs(1200)), &|| {
        benchmark("mushroom", "35%", "90%", Duration::from_secs(600))
    });
    report("6c", "Adult 17%/94%", Some(Duration::from_secs(1200)), &|| {
        benchmark("adult", "17%", "94%", Duration::from_secs(600))
    });
    report("7", "no bitmap scan during mining", None, &no_scan);
    report("8", "monotone thresholds", None, &monotonicity);

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
