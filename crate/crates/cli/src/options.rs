//! Command-line flags, the TOML config file and their merge into a
//! validated [`RunConfig`].

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use wikirel::ahits::AhitsParams;
use wikirel::taxonomy::DEFAULT_MAX_ELEMENTARY;

use crate::Failure;

pub const SNAPSHOT_ENV: &str = "WIKIREL_SNAPSHOT";

#[derive(Debug, Parser)]
#[command(
    name = "wikirel",
    version,
    about = "Semantic relatedness over encyclopedia category and link graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Load TSV dumps and write a binary snapshot to --snapshot.
    Ingest,
    /// Report cycles in the category graph.
    Cycles,
    /// Hyponym count and information content of one category.
    Hypo { category: String },
    /// Taxonomy relatedness of two terms.
    Rel { word1: String, word2: String },
    /// Pages related to a seed term by link analysis.
    Hits { seed: String },
    /// Correlate a method with a gold file of judged word pairs.
    Eval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum Method {
    #[value(name = "res_hypo")]
    #[serde(rename = "res_hypo")]
    ResHypo,
    #[value(name = "res_resnik")]
    #[serde(rename = "res_resnik")]
    ResResnik,
    #[value(name = "ahits")]
    #[serde(rename = "ahits")]
    Ahits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparatorArg {
    Footrule,
    Overlap,
}

/// Every option is available both as a flag and as a config-file key of
/// the same name. Flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// TOML file supplying defaults for any option below.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_name = "TSV", help_heading = "Input")]
    pub pages: Option<PathBuf>,
    #[arg(long, global = true, value_name = "TSV", help_heading = "Input")]
    pub catlinks: Option<PathBuf>,
    #[arg(long, global = true, value_name = "TSV", help_heading = "Input")]
    pub pagelinks: Option<PathBuf>,
    #[arg(long, global = true, value_name = "TSV", help_heading = "Input")]
    pub redirects: Option<PathBuf>,
    /// Snapshot to read (written by `ingest`). Defaults to $WIKIREL_SNAPSHOT.
    #[arg(long, global = true, value_name = "FILE", help_heading = "Input")]
    pub snapshot: Option<PathBuf>,
    /// Keep only the taxonomy below this category.
    #[arg(long, global = true, value_name = "TITLE", help_heading = "Input")]
    pub root: Option<String>,

    #[arg(long, global = true, value_enum, help_heading = "Method")]
    pub method: Option<Method>,
    #[arg(long, global = true, value_name = "TSV", help_heading = "Method")]
    pub gold: Option<PathBuf>,
    /// `word<TAB>count` lines, needed by res_resnik.
    #[arg(long, global = true, value_name = "TSV", help_heading = "Method")]
    pub corpus_counts: Option<PathBuf>,
    /// `word<TAB>category title` lines, needed by res_resnik.
    #[arg(long, global = true, value_name = "TSV", help_heading = "Method")]
    pub word_concepts: Option<PathBuf>,
    /// How two related-page lists are compared in `eval --method ahits`.
    #[arg(long, global = true, value_enum, help_heading = "Method")]
    pub comparator: Option<ComparatorArg>,
    /// Cap on enumerated elementary cycles.
    #[arg(long, global = true, help_heading = "Method")]
    pub max_cycles: Option<usize>,

    #[arg(long, global = true, help_heading = "Link analysis")]
    pub root_set: Option<usize>,
    #[arg(long, global = true, help_heading = "Link analysis")]
    pub increment: Option<usize>,
    #[arg(long, global = true, help_heading = "Link analysis")]
    pub n_sought: Option<usize>,
    /// Accepted for compatibility; not used in scoring.
    #[arg(long, global = true, help_heading = "Link analysis")]
    pub c_max: Option<f64>,
    #[arg(long, global = true, help_heading = "Link analysis")]
    pub epsilon: Option<f64>,
    #[arg(long, global = true, help_heading = "Link analysis")]
    pub max_iter: Option<usize>,
    /// Only follow pages in at least one of these categories (comma separated).
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        help_heading = "Link analysis"
    )]
    pub category_whitelist: Option<Vec<String>>,
    /// Never follow pages in any of these categories (comma separated).
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        help_heading = "Link analysis"
    )]
    pub category_blacklist: Option<Vec<String>>,

    #[arg(long, global = true, value_enum, help_heading = "Output")]
    pub format: Option<Format>,
    /// Worker threads. Output does not depend on this.
    #[arg(long, global = true, help_heading = "Output")]
    pub jobs: Option<usize>,
    /// Include wall-clock timings in reports.
    #[arg(long, global = true, help_heading = "Output")]
    pub timings: bool,
}

impl Options {
    fn or(self, cfg: Options) -> Options {
        Options {
            config: self.config,
            pages: self.pages.or(cfg.pages),
            catlinks: self.catlinks.or(cfg.catlinks),
            pagelinks: self.pagelinks.or(cfg.pagelinks),
            redirects: self.redirects.or(cfg.redirects),
            snapshot: self.snapshot.or(cfg.snapshot),
            root: self.root.or(cfg.root),
            method: self.method.or(cfg.method),
            gold: self.gold.or(cfg.gold),
            corpus_counts: self.corpus_counts.or(cfg.corpus_counts),
            word_concepts: self.word_concepts.or(cfg.word_concepts),
            comparator: self.comparator.or(cfg.comparator),
            max_cycles: self.max_cycles.or(cfg.max_cycles),
            root_set: self.root_set.or(cfg.root_set),
            increment: self.increment.or(cfg.increment),
            n_sought: self.n_sought.or(cfg.n_sought),
            c_max: self.c_max.or(cfg.c_max),
            epsilon: self.epsilon.or(cfg.epsilon),
            max_iter: self.max_iter.or(cfg.max_iter),
            category_whitelist: self.category_whitelist.or(cfg.category_whitelist),
            category_blacklist: self.category_blacklist.or(cfg.category_blacklist),
            format: self.format.or(cfg.format),
            jobs: self.jobs.or(cfg.jobs),
            timings: self.timings || cfg.timings,
        }
    }
}

fn read_config(path: &Path) -> Result<Options, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsvInput {
    pub pages: PathBuf,
    pub catlinks: PathBuf,
    pub pagelinks: PathBuf,
    pub redirects: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Tsv(TsvInput),
    Snapshot(PathBuf),
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Input,
    /// Output path of `ingest`.
    pub snapshot_out: Option<PathBuf>,
    pub root: Option<String>,
    pub method: Method,
    pub gold: Option<PathBuf>,
    pub corpus_counts: Option<PathBuf>,
    pub word_concepts: Option<PathBuf>,
    pub comparator: ComparatorArg,
    pub max_cycles: usize,
    pub ahits: AhitsParams,
    pub format: Format,
    pub jobs: usize,
    pub timings: bool,
}

impl RunConfig {
    /// Merges flags over the config file and checks the combination.
    /// `env_snapshot` is the value of [`SNAPSHOT_ENV`], if set.
    pub fn resolve(
        command: &Command,
        flags: Options,
        env_snapshot: Option<PathBuf>,
    ) -> Result<RunConfig, Failure> {
        let o = match &flags.config {
            Some(path) => {
                let cfg = read_config(path)?;
                flags.or(cfg)
            }
            None => flags,
        };
        let usage = |m: &str| Err(Failure::Usage(m.to_string()));

        let tsv = match (o.pages, o.catlinks, o.pagelinks) {
            (Some(pages), Some(catlinks), Some(pagelinks)) => Some(TsvInput {
                pages,
                catlinks,
                pagelinks,
                redirects: o.redirects,
            }),
            (None, None, None) => {
                if o.redirects.is_some() {
                    return usage("--redirects needs --pages, --catlinks and --pagelinks");
                }
                None
            }
            _ => return usage("--pages, --catlinks and --pagelinks must be given together"),
        };
        let ingest = matches!(command, Command::Ingest);
        // The environment variable only fills in a snapshot nobody else named,
        // so it never clashes with explicit TSV input.
        let snapshot = o.snapshot.or_else(|| {
            if tsv.is_none() || ingest {
                env_snapshot
            } else {
                None
            }
        });
        let (input, snapshot_out) = if ingest {
            match (tsv, snapshot) {
                (Some(t), Some(out)) => (Input::Tsv(t), Some(out)),
                (None, _) => return usage("ingest needs --pages, --catlinks and --pagelinks"),
                (_, None) => return usage("ingest needs --snapshot for its output"),
            }
        } else {
            match (tsv, snapshot) {
                (Some(t), None) => (Input::Tsv(t), None),
                (None, Some(s)) => (Input::Snapshot(s), None),
                (Some(_), Some(_)) => {
                    return usage("give either TSV input or --snapshot, not both")
                }
                (None, None) => {
                    return usage("no input: give --snapshot or --pages/--catlinks/--pagelinks")
                }
            }
        };

        let jobs = match o.jobs {
            Some(0) => return usage("--jobs must be at least 1"),
            Some(j) => j,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };

        let mut ahits = AhitsParams::default();
        if let Some(v) = o.root_set {
            ahits.root_set_size = v;
        }
        if let Some(v) = o.increment {
            ahits.increment = v;
        }
        if let Some(v) = o.n_sought {
            ahits.n_sought = v;
        }
        if let Some(v) = o.epsilon {
            ahits.epsilon = v;
        }
        if let Some(v) = o.max_iter {
            ahits.max_iter = v;
        }
        ahits.c_max = o.c_max;
        ahits.category_whitelist = o.category_whitelist.map(BTreeSet::from_iter);
        ahits.category_blacklist = o.category_blacklist.map(BTreeSet::from_iter);
        ahits
            .validate()
            .map_err(|e| Failure::Usage(e.to_string()))?;

        let format = o.format.unwrap_or(match command {
            Command::Eval => Format::Json,
            _ => Format::Text,
        });

        Ok(RunConfig {
            input,
            snapshot_out,
            root: o.root,
            method: o.method.unwrap_or(Method::ResHypo),
            gold: o.gold,
            corpus_counts: o.corpus_counts,
            word_concepts: o.word_concepts,
            comparator: o.comparator.unwrap_or(ComparatorArg::Footrule),
            max_cycles: o.max_cycles.unwrap_or(DEFAULT_MAX_ELEMENTARY),
            ahits,
            format,
            jobs,
            timings: o.timings,
        })
    }
}
