//! Acceptance criteria, one pass/fail line each. Exits nonzero if any fail.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;
use wikirel::ahits::{run_hits, Subgraph};
use wikirel::eval::{correlate, footrule};
use wikirel::taxonomy::{
    compute_freq_table, compute_hypo_table, condense, detect_cycles, information_content,
    res_hypo_relatedness, CorpusCounts, WordConcepts,
};
use wikirel::{KnowledgeBase, Page, PageId, PageKind, RelatednessScore};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

/// The 100 graphs shared by the taxonomy criteria: at most 200 nodes and
/// 600 edges, cycles planted in every other one.
fn generated_taxonomies() -> Vec<KnowledgeBase> {
    (0..100u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n_cats = rng.gen_range(2..=120);
            let n_articles = rng.gen_range(0..=(200 - n_cats).min(80));
            random_taxonomy(&mut rng, n_cats, n_articles, 300, !seed.is_multiple_of(2))
        })
        .collect()
}

fn hyponym_oracle() -> Outcome {
    let graphs = generated_taxonomies();
    let mut nodes_checked = 0;
    let mut cyclic = 0;
    for (i, kb) in graphs.iter().enumerate() {
        ensure!(kb.len() <= 200, "graph {i} has {} nodes", kb.len());
        ensure!(
            kb.cat_edges().len() <= 600,
            "graph {i} has {} edges",
            kb.cat_edges().len()
        );
        let ct = condense(kb).map_err(|e| e.to_string())?;
        if !detect_cycles(kb, 1).is_acyclic() {
            cyclic += 1;
        }
        let ht = compute_hypo_table(&ct);
        for cat in kb.categories() {
            let got = ht.hypo(ct.supernode_of(cat).unwrap());
            let want = brute_hypo(kb, cat);
            ensure!(
                got == want,
                "graph {i} category {cat}: hypo {got}, brute force {want}"
            );
            nodes_checked += 1;
        }
    }
    ensure!(
        cyclic == 50,
        "{cyclic} of 100 graphs had cycles, expected 50"
    );
    Ok(format!(
        "{nodes_checked} categories in 100 graphs ({cyclic} cyclic), all exact"
    ))
}

fn diamond() -> Outcome {
    let kb = KnowledgeBase::from_parts(
        vec![
            Page::new(1, PageKind::Category, "R"),
            Page::new(2, PageKind::Category, "A"),
            Page::new(3, PageKind::Category, "B"),
            Page::new(4, PageKind::Article, "X"),
        ],
        vec![],
        vec![
            (PageId(2), PageId(1)),
            (PageId(3), PageId(1)),
            (PageId(4), PageId(2)),
            (PageId(4), PageId(3)),
        ],
        vec![],
    )
    .map_err(|e| e.to_string())?;
    let ct = condense(&kb).map_err(|e| e.to_string())?;
    let h = compute_hypo_table(&ct).hypo(ct.supernode_of(PageId(1)).unwrap());
    ensure!(h == 3, "diamond hypo(R) = {h}, expected 3");
    for (i, kb) in generated_taxonomies().iter().enumerate() {
        let ct = condense(kb).unwrap();
        let ht = compute_hypo_table(&ct);
        let c = ht.total_concepts();
        ensure!(
            c == brute_total(kb),
            "graph {i}: C = {c}, expected {}",
            brute_total(kb)
        );
        for s in 0..ct.len() {
            ensure!(ht.hypo(s) < c, "graph {i}: hypo {} >= C {c}", ht.hypo(s));
        }
    }
    Ok("hypo(R) = 3; hypo <= C-1 on all 100 graphs".into())
}

fn formula() -> Outcome {
    let ic = information_content(637, 3_978_376).map_err(|e| e.to_string())?;
    ensure!((ic - 0.575).abs() <= 0.001, "ic = {ic}");
    Ok(format!("ic(637, 3978376) = {ic:.7}"))
}

fn monotonicity() -> Outcome {
    let mut edges = 0;
    for (i, kb) in generated_taxonomies().iter().enumerate() {
        let ct = condense(kb).unwrap();
        let ht = compute_hypo_table(&ct);
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        let cats: Vec<PageId> = kb.categories().collect();
        let mut counts = CorpusCounts::new();
        let mut concepts = WordConcepts::new();
        for w in 0..40 {
            let word = format!("w{w}");
            counts.add(word.clone(), rng.gen_range(1..100));
            concepts
                .entry(word)
                .or_default()
                .insert(cats[rng.gen_range(0..cats.len())]);
        }
        let ft = compute_freq_table(&ct, &counts, &concepts).map_err(|e| e.to_string())?;
        for (child, parent) in ct.dag_edges() {
            let (ic_c, ic_p) = (ht.ic(child).unwrap(), ht.ic(parent).unwrap());
            ensure!(
                ic_p <= ic_c,
                "graph {i}: ic rises from {ic_c} to {ic_p} going up"
            );
            let (p_c, p_p) = (ft.probability(child), ft.probability(parent));
            ensure!(
                p_p >= p_c,
                "graph {i}: P falls from {p_c} to {p_p} going up"
            );
            edges += 1;
        }
    }
    Ok(format!("{edges} DAG edges, zero violations"))
}

/// Concepts of a term as the taxonomy sees them: a category stands for
/// itself, an article for its categories.
fn brute_concepts(kb: &KnowledgeBase, term: &str) -> Vec<PageId> {
    let Some(p) = kb.resolve_title(term) else {
        return vec![];
    };
    if kb.kind(p) == Some(PageKind::Category) {
        vec![p]
    } else {
        kb.parents(p).to_vec()
    }
}

fn zero_at_root() -> Outcome {
    let mut pairs = 0;
    for (i, kb) in generated_taxonomies().iter().enumerate().take(40) {
        let ct = condense(kb).unwrap();
        let ht = compute_hypo_table(&ct);
        let root_group: HashSet<PageId> = brute_ancestors(kb, PageId(1))
            .into_iter()
            .filter(|&c| brute_ancestors(kb, c).contains(&PageId(1)))
            .collect();
        let up: HashMap<PageId, HashSet<PageId>> = kb
            .categories()
            .map(|c| (c, brute_ancestors(kb, c)))
            .collect();
        let titles: Vec<&str> = kb.pages().map(|p| p.title.as_str()).collect();
        for a in &titles {
            for b in &titles {
                let (ca, cb) = (brute_concepts(kb, a), brute_concepts(kb, b));
                let mut any = false;
                let mut only_root = true;
                for x in &ca {
                    for y in &cb {
                        let common: Vec<PageId> = up[x].intersection(&up[y]).copied().collect();
                        any |= !common.is_empty();
                        only_root &= common.iter().all(|c| root_group.contains(c));
                    }
                }
                if any && only_root {
                    let got =
                        res_hypo_relatedness(kb, &ct, &ht, a, b).map_err(|e| e.to_string())?;
                    ensure!(
                        got == RelatednessScore::Value(0.0),
                        "graph {i} {a}/{b}: {got:?}"
                    );
                    pairs += 1;
                }
            }
        }
    }
    ensure!(pairs > 100, "only {pairs} root-only pairs generated");
    Ok(format!("{pairs} root-only pairs, all exactly 0.0"))
}

fn hits_oracle() -> Outcome {
    let mut worst = 1.0f64;
    let mut graphs = 0;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=50);
        let p = rng.gen_range(0.05..0.4);
        let edges = random_digraph(&mut rng, n, p);
        let Some(want) = authority_oracle(n, &edges) else {
            continue;
        };
        let s = run_hits(&Subgraph::from_edges(n, &edges), 1e-13, 100_000);
        let c = cosine(&s.authority, want.as_slice());
        ensure!(
            c >= 1.0 - 1e-6,
            "digraph {seed} (n={n}, gap ratio {:.4}): cosine {c}",
            eigen_gap_ratio(n, &edges)
        );
        worst = worst.min(c);
        graphs += 1;
    }
    ensure!(graphs >= 45, "only {graphs} non-empty digraphs");
    let star = run_hits(
        &Subgraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]),
        1e-12,
        1000,
    );
    let expected = 1.0 / 3f64.sqrt();
    for leaf in 1..4 {
        ensure!(
            (star.authority[leaf] - expected).abs() <= 1e-9,
            "star leaf authority {}",
            star.authority[leaf]
        );
    }
    Ok(format!(
        "{graphs} digraphs, min cosine {worst:.12}; star 1/sqrt(3)"
    ))
}

fn footrule_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..1000 {
        let n = rng.gen_range(1..=20);
        let a = random_permutation(&mut rng, n);
        let b = random_permutation(&mut rng, n);
        let got = footrule(&a, &b).map_err(|e| e.to_string())?;
        ensure!(
            got == brute_footrule(&a, &b),
            "case {case}: {got} vs {}",
            brute_footrule(&a, &b)
        );
    }
    let padded = footrule(&["a", "b", "c"], &["b", "d"]).map_err(|e| e.to_string())?;
    ensure!(padded == 4, "padding example gave {padded}");
    Ok("1000 permutation pairs exact; padding example = 4".into())
}

fn correlation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = rng.gen_range(2..=100);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| (x + rng.gen_range(-4.0..4.0)).round())
            .collect();
        let c = correlate(&xs, &ys).map_err(|e| format!("case {case}: {e}"))?;
        let dp = (c.pearson - textbook_pearson(&xs, &ys)).abs();
        let ds = (c.spearman - textbook_spearman(&xs, &ys)).abs();
        ensure!(
            dp <= 1e-12 && ds <= 1e-12,
            "case {case}: pearson off by {dp}, spearman off by {ds}"
        );
        worst = worst.max(dp).max(ds);
    }
    let rho = correlate(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0])
        .unwrap()
        .spearman;
    ensure!(rho == 0.8, "rho = {rho}");
    Ok(format!(
        "100 series, max deviation {worst:.1e}; rho = {rho}"
    ))
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/miniwiki")
}

fn wikirel(args: &[&str]) -> Result<Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_wikirel"))
        .args(args)
        .env_remove("WIKIREL_SNAPSHOT")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "wikirel {} failed with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out)
}

fn ingest_fixture(dir: &Path) -> Result<String, String> {
    let f = fixture_dir();
    let p = |name: &str| f.join(name).to_string_lossy().into_owned();
    let snap = dir.join("kb.bin").to_string_lossy().into_owned();
    wikirel(&[
        "ingest",
        "--pages",
        &p("pages.tsv"),
        "--catlinks",
        &p("catlinks.tsv"),
        "--pagelinks",
        &p("pagelinks.tsv"),
        "--redirects",
        &p("redirects.tsv"),
        "--snapshot",
        &snap,
    ])?;
    Ok(snap)
}

fn json(out: &Output) -> Result<serde_json::Value, String> {
    serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON: {e}"))
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let snap = ingest_fixture(dir.path())?;
    let gold = fixture_dir()
        .join("gold.tsv")
        .to_string_lossy()
        .into_owned();

    // Aircraft has 9 hyponyms (Airships, Airplanes, Glider, Helicopter and
    // the five articles below the first two); the fixture has 17 categories
    // and 34 articles.
    let expected = 1.0 - 10f64.ln() / 51f64.ln();
    let rel = wikirel(&[
        "rel",
        "--snapshot",
        &snap,
        "--root",
        "Categories",
        "dirigible",
        "airplane",
    ])?;
    let line = String::from_utf8_lossy(&rel.stdout).into_owned();
    let value: f64 = line
        .trim_end()
        .strip_prefix("res_hypo=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("unexpected rel output {line:?}"))?;
    ensure!(line.lines().count() == 1, "rel printed {line:?}");
    ensure!(
        (value - expected).abs() < 1e-12,
        "rel gave {value}, expected {expected}"
    );

    let dag = wikirel(&["cycles", "--snapshot", &snap, "--root", "Nature"])?;
    ensure!(
        String::from_utf8_lossy(&dag.stdout).trim_end() == "0 components, 0 self-loops",
        "cycles on DAG printed {:?}",
        String::from_utf8_lossy(&dag.stdout)
    );

    let report = json(&wikirel(&[
        "eval",
        "--snapshot",
        &snap,
        "--root",
        "Categories",
        "--gold",
        &gold,
    ])?)?;
    let rho = report["spearman"].as_f64().ok_or("no spearman")?;
    ensure!(rho >= 0.9, "res_hypo spearman {rho}");
    ensure!(report["n_pairs"] == 10, "n_pairs {}", report["n_pairs"]);
    ensure!(
        report["n_skipped_not_found"] == 1,
        "not-found {}",
        report["n_skipped_not_found"]
    );
    ensure!(
        report["n_skipped_no_common"] == 0,
        "no-common {}",
        report["n_skipped_no_common"]
    );

    let ahits = json(&wikirel(&[
        "eval",
        "--snapshot",
        &snap,
        "--method",
        "ahits",
        "--gold",
        &gold,
        "--root-set",
        "3",
        "--increment",
        "1",
        "--n-sought",
        "10",
    ])?)?;
    for key in [
        "method",
        "params",
        "pearson",
        "spearman",
        "n_pairs",
        "n_skipped_not_found",
        "n_skipped_no_common",
        "offline_ms",
        "online_ms",
        "per_pair",
    ] {
        ensure!(ahits.get(key).is_some(), "ahits report lacks {key}");
    }
    ensure!(
        ahits["pearson"].is_f64() && ahits["spearman"].is_f64(),
        "correlations missing"
    );
    ensure!(
        ahits["n_skipped_not_found"] == 1,
        "ahits not-found {}",
        ahits["n_skipped_not_found"]
    );
    // Grass and Oak have no links, so both lists are empty.
    ensure!(
        ahits["n_skipped_no_common"] == 1,
        "ahits no-common {}",
        ahits["n_skipped_no_common"]
    );
    let per_pair = ahits["per_pair"].as_array().ok_or("per_pair not a list")?;
    let used = per_pair.iter().filter(|p| p["value"].is_number()).count();
    let skipped = per_pair.iter().filter(|p| p["skipped"].is_string()).count();
    ensure!(
        per_pair.len() == 10 && used + skipped == 10,
        "{used} used + {skipped} skipped"
    );
    ensure!(
        ahits["n_skipped"] == skipped,
        "n_skipped {} vs {skipped}",
        ahits["n_skipped"]
    );

    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 5.0, "took {elapsed:.2} s");
    Ok(format!(
        "rel = {value:.6}, res_hypo rho = {rho:.4}, ahits report valid, {elapsed:.2} s"
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let snap = ingest_fixture(dir.path())?;
    let gold = fixture_dir()
        .join("gold.tsv")
        .to_string_lossy()
        .into_owned();
    let runs: [&[&str]; 2] = [
        &["--method", "res_hypo", "--root", "Categories"],
        &[
            "--method",
            "ahits",
            "--root-set",
            "3",
            "--increment",
            "1",
            "--n-sought",
            "10",
        ],
    ];
    for extra in runs {
        let mut outputs = Vec::new();
        for jobs in ["1", "8"] {
            let mut args = vec!["eval", "--snapshot", &snap, "--gold", &gold, "--jobs", jobs];
            args.extend_from_slice(extra);
            outputs.push(wikirel(&args)?.stdout);
        }
        ensure!(
            outputs[0] == outputs[1],
            "reports differ for {}",
            extra.join(" ")
        );
        ensure!(!outputs[0].is_empty(), "empty report");
    }
    Ok("res_hypo and ahits reports byte-identical for --jobs 1 and 8".into())
}

fn cycle_census() -> Outcome {
    for k in 0..=20 {
        for m in 0..=20 {
            let report = detect_cycles(&planted_cycles(200, k, m), 10_000);
            ensure!(
                report.components.len() == k as usize && report.self_loops.len() == m as usize,
                "k={k} m={m}: {} components, {} self-loops",
                report.components.len(),
                report.self_loops.len()
            );
        }
    }
    Ok("all 441 (k, m) combinations exact".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("hyponym oracle equivalence", hyponym_oracle),
        ("diamond non-double-count", diamond),
        ("formula check", formula),
        ("monotonicity", monotonicity),
        ("zero at root", zero_at_root),
        ("HITS eigen-oracle", hits_oracle),
        ("footrule", footrule_check),
        ("correlation statistics", correlation),
        ("end-to-end fixture", end_to_end),
        ("determinism", determinism),
        ("cycle census", cycle_census),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
