use std::fmt::Write as _;
use std::io::Write;
use std::time::{Duration, Instant};

use serde_json::json;
use wikirel::ahits::related_terms;
use wikirel::eval::{
    evaluate_ahits, evaluate_relatedness, load_gold, Comparator, EvalOptions, EvalReport,
    RelatednessMethod,
};
use wikirel::taxonomy::{
    compute_freq_table, compute_hypo_table, condense, detect_cycles, load_word_concepts,
    CondensedTaxonomy, CorpusCounts, FreqTable, TaxonomyError,
};
use wikirel::{load_knowledge_base, KnowledgeBase, RelatednessScore};

use crate::options::{Command, ComparatorArg, Format, Input, Method, RunConfig};
use crate::Failure;

pub fn run(command: &Command, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let clock = Instant::now();
    let kb = load(cfg)?;
    let text = match command {
        Command::Ingest => ingest(&kb, cfg)?,
        Command::Cycles => cycles(&kb, cfg),
        Command::Hypo { category } => hypo(&kb, cfg, category)?,
        Command::Rel { word1, word2 } => rel(&kb, cfg, word1, word2, clock)?,
        Command::Hits { seed } => hits(&kb, cfg, seed)?,
        Command::Eval => eval(&kb, cfg, clock)?,
    };
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Data(format!("writing output: {e}")))
}

fn load(cfg: &RunConfig) -> Result<KnowledgeBase, Failure> {
    let kb = match &cfg.input {
        Input::Tsv(t) => {
            load_knowledge_base(&t.pages, &t.catlinks, &t.pagelinks, t.redirects.as_deref())?
        }
        Input::Snapshot(path) => KnowledgeBase::load_snapshot(path)?,
    };
    log::info!("loaded {}", kb.stats());
    match &cfg.root {
        Some(root) => {
            let sub = kb.restrict_to_root(root)?;
            log::info!("below {root:?}: {}", sub.stats());
            Ok(sub)
        }
        None => Ok(kb),
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn json_line(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn ingest(kb: &KnowledgeBase, cfg: &RunConfig) -> Result<String, Failure> {
    let path = cfg
        .snapshot_out
        .as_ref()
        .expect("ingest has an output path");
    kb.save_snapshot(path)?;
    let s = kb.stats();
    Ok(match cfg.format {
        Format::Json => json_line(&json!({
            "snapshot": path,
            "articles": s.articles,
            "categories": s.categories,
            "redirects": s.redirects,
            "category_links": s.cat_edges,
            "page_links": s.link_edges,
        })),
        Format::Csv => format!(
            "articles,categories,redirects,category_links,page_links\n{},{},{},{},{}\n",
            s.articles, s.categories, s.redirects, s.cat_edges, s.link_edges
        ),
        Format::Text => format!("{s}\nwrote {}\n", path.display()),
    })
}

fn cycles(kb: &KnowledgeBase, cfg: &RunConfig) -> String {
    let report = detect_cycles(kb, cfg.max_cycles);
    let titles = |ids: &[wikirel::PageId]| -> Vec<&str> {
        ids.iter().map(|&id| kb.title(id).unwrap_or("?")).collect()
    };
    match cfg.format {
        Format::Json => {
            let named = |groups: &[Vec<wikirel::PageId>]| -> Vec<Vec<&str>> {
                groups.iter().map(|g| titles(g)).collect()
            };
            json_line(&json!({
                "components": named(&report.components),
                "self_loops": titles(&report.self_loops),
                "elementary_cycles": named(&report.elementary_cycles),
                "truncated": report.truncated,
            }))
        }
        Format::Csv => format!(
            "components,self_loops,elementary_cycles,truncated\n{},{},{},{}\n",
            report.components.len(),
            report.self_loops.len(),
            report.elementary_cycles.len(),
            report.truncated
        ),
        Format::Text => {
            let mut s = format!(
                "{} components, {} self-loops\n",
                report.components.len(),
                report.self_loops.len()
            );
            for c in &report.components {
                let _ = writeln!(s, "component: {}", titles(c).join(" | "));
            }
            for &l in &report.self_loops {
                let _ = writeln!(s, "self-loop: {}", kb.title(l).unwrap_or("?"));
            }
            if !report.elementary_cycles.is_empty() {
                let _ = writeln!(
                    s,
                    "{} elementary cycles{}",
                    report.elementary_cycles.len(),
                    if report.truncated { " (truncated)" } else { "" }
                );
            }
            s
        }
    }
}

fn hypo(kb: &KnowledgeBase, cfg: &RunConfig, category: &str) -> Result<String, Failure> {
    let ct = condense(kb)?;
    let ht = compute_hypo_table(&ct);
    let cat = kb
        .category_by_title(category)
        .ok_or_else(|| TaxonomyError::UnknownCategoryTitle(category.to_string()))?;
    let s = ct
        .supernode_of(cat)
        .ok_or(TaxonomyError::UnknownCategory(cat))?;
    let (h, total, ic) = (ht.hypo(s), ht.total_concepts(), ht.ic(s)?);
    let title = kb.title(cat).unwrap_or(category);
    Ok(match cfg.format {
        Format::Json => {
            json_line(&json!({ "category": title, "hypo": h, "total_concepts": total, "ic": ic }))
        }
        Format::Csv => format!(
            "category,hypo,total_concepts,ic\n{},{h},{total},{ic}\n",
            csv_field(title)
        ),
        Format::Text => format!("{title}: hypo={h} total={total} ic={ic}\n"),
    })
}

/// Taxonomy artifacts for one taxonomy method.
enum Prepared {
    Hypo(CondensedTaxonomy, wikirel::taxonomy::HypoTable),
    Resnik(CondensedTaxonomy, FreqTable),
}

impl Prepared {
    fn new(kb: &KnowledgeBase, cfg: &RunConfig) -> Result<Prepared, Failure> {
        let ct = condense(kb)?;
        match cfg.method {
            Method::ResHypo => {
                let ht = compute_hypo_table(&ct);
                Ok(Prepared::Hypo(ct, ht))
            }
            Method::ResResnik => {
                let (Some(counts), Some(concepts)) = (&cfg.corpus_counts, &cfg.word_concepts)
                else {
                    return Err(Failure::Usage(
                        "res_resnik needs --corpus-counts and --word-concepts".into(),
                    ));
                };
                let counts = CorpusCounts::load(counts)?;
                let concepts = load_word_concepts(concepts, kb)?;
                let ft = compute_freq_table(&ct, &counts, &concepts)?;
                Ok(Prepared::Resnik(ct, ft))
            }
            Method::Ahits => unreachable!("link analysis has no taxonomy artifacts"),
        }
    }

    fn method(&self) -> RelatednessMethod<'_> {
        match self {
            Prepared::Hypo(ct, ht) => RelatednessMethod::ResHypo { ct, ht },
            Prepared::Resnik(ct, ft) => RelatednessMethod::ResResnik { ct, ft },
        }
    }
}

fn rel(
    kb: &KnowledgeBase,
    cfg: &RunConfig,
    w1: &str,
    w2: &str,
    clock: Instant,
) -> Result<String, Failure> {
    if cfg.method == Method::Ahits {
        return Err(Failure::Usage(
            "rel supports res_hypo and res_resnik; use hits or eval for ahits".into(),
        ));
    }
    let prepared = Prepared::new(kb, cfg)?;
    let offline = clock.elapsed();
    let method = prepared.method();
    let start = Instant::now();
    let score = method.score(kb, w1, w2)?;
    if cfg.timings {
        eprintln!(
            "offline_ms={:.3} online_ms={:.3}",
            ms(offline),
            ms(start.elapsed())
        );
    }
    let name = method.name();
    let (value, skipped) = match score {
        RelatednessScore::Value(v) => (Some(v), None),
        RelatednessScore::Skipped(r) => (None, Some(r.as_str())),
    };
    Ok(match cfg.format {
        Format::Json => json_line(&json!({
            "method": name, "word1": w1, "word2": w2, "value": value, "skipped": skipped,
        })),
        Format::Csv => format!(
            "method,word1,word2,value,skipped\n{name},{},{},{},{}\n",
            csv_field(w1),
            csv_field(w2),
            value.map(|v| v.to_string()).unwrap_or_default(),
            skipped.unwrap_or("")
        ),
        Format::Text => match (value, skipped) {
            (Some(v), _) => format!("{name}={v}\n"),
            (None, Some(r)) => format!("{name}=skipped ({r})\n"),
            (None, None) => unreachable!(),
        },
    })
}

fn hits(kb: &KnowledgeBase, cfg: &RunConfig, seed: &str) -> Result<String, Failure> {
    let list = related_terms(kb, seed, &cfg.ahits)?;
    let seed_title = kb.title(list.seed).unwrap_or(seed);
    Ok(match cfg.format {
        Format::Json => {
            json_line(&json!({ "seed": seed_title, "params": cfg.ahits, "entries": list.entries }))
        }
        Format::Csv => {
            let mut s = String::from("rank,title,score\n");
            for (i, e) in list.entries.iter().enumerate() {
                let _ = writeln!(s, "{},{},{}", i + 1, csv_field(&e.title), e.score);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (i, e) in list.entries.iter().enumerate() {
                let _ = writeln!(s, "{}\t{:.6}\t{}", i + 1, e.score, e.title);
            }
            s
        }
    })
}

fn eval(kb: &KnowledgeBase, cfg: &RunConfig, clock: Instant) -> Result<String, Failure> {
    let gold_path = cfg
        .gold
        .as_ref()
        .ok_or_else(|| Failure::Usage("eval needs --gold".into()))?;
    let gold = load_gold(gold_path)?;
    // Thread count is left out so that reports compare equal across --jobs.
    let report = match cfg.method {
        Method::Ahits => {
            let comparator = match cfg.comparator {
                ComparatorArg::Footrule => Comparator::Footrule,
                ComparatorArg::Overlap => Comparator::Overlap,
            };
            let value = match comparator {
                Comparator::Footrule => "negated footrule distance",
                Comparator::Overlap => "number of shared titles",
            };
            let params = json!({
                "root": cfg.root,
                "comparator": comparator,
                "value": value,
                "ahits": cfg.ahits,
            });
            let opts = EvalOptions {
                jobs: cfg.jobs,
                offline: clock.elapsed(),
                params,
            };
            evaluate_ahits(kb, &gold, &cfg.ahits, comparator, &opts)?
        }
        Method::ResHypo | Method::ResResnik => {
            let prepared = Prepared::new(kb, cfg)?;
            let opts = EvalOptions {
                jobs: cfg.jobs,
                offline: clock.elapsed(),
                params: json!({ "root": cfg.root }),
            };
            evaluate_relatedness(kb, &gold, prepared.method(), &opts)?
        }
    };
    let report = if cfg.timings {
        report
    } else {
        report.without_timings()
    };
    Ok(render_report(&report, cfg.format))
}

fn render_report(r: &EvalReport, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", r.to_json()),
        Format::Csv => format!("{}\n{}\n", EvalReport::CSV_HEADER, r.csv_row()),
        Format::Text => {
            let mut s = format!(
                "method: {}\npearson: {}\nspearman: {}\npairs: {} (scored {}, skipped {}: {} term-not-found, {} no-common-concept)\n",
                r.method, r.pearson, r.spearman, r.n_pairs, r.n_scored, r.n_skipped, r.n_skipped_not_found, r.n_skipped_no_common
            );
            if let (Some(off), Some(on)) = (r.offline_ms, r.online_ms) {
                let _ = writeln!(s, "offline: {off:.3} ms\nonline: {on:.3} ms");
            }
            s
        }
    }
}
