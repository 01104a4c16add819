use std::collections::HashSet;
use std::path::Path;

use serde::Serialize;

use crate::graph_store::{for_each_row, StoreError};

use super::EvalError;

pub const MAX_GOLD_SCORE: f64 = 10.0;

/// One human-judged word pair, score on a 0..=10 scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldPair {
    pub word1: String,
    pub word2: String,
    pub score: f64,
}

pub type GoldSet = Vec<GoldPair>;

/// Reads `word1<TAB>word2<TAB>score` rows. `#` lines and blank lines are
/// skipped. A pair that repeats in either order is rejected.
pub fn load_gold(path: &Path) -> Result<GoldSet, EvalError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut range_error = None;
    let res = for_each_row(path, 3, |line, cols| {
        let score: f64 = cols[2]
            .trim()
            .parse()
            .map_err(|_| (line, format!("invalid score {:?}", cols[2])))?;
        if !(0.0..=MAX_GOLD_SCORE).contains(&score) {
            range_error = Some(EvalError::ScoreOutOfRange { line, score });
            return Err((line, String::new()));
        }
        let (w1, w2) = (cols[0].trim(), cols[1].trim());
        let key = if w1 <= w2 {
            (w1.to_string(), w2.to_string())
        } else {
            (w2.to_string(), w1.to_string())
        };
        if !seen.insert(key) {
            return Err((line, format!("duplicate pair {w1:?} / {w2:?}")));
        }
        out.push(GoldPair {
            word1: w1.to_string(),
            word2: w2.to_string(),
            score,
        });
        Ok(())
    });
    if let Some(e) = range_error {
        return Err(e);
    }
    res.map_err(|e| match e {
        StoreError::Io { path, source } => EvalError::Io { path, source },
        StoreError::Parse { line, message, .. } => EvalError::GoldParse { line, message },
        other => EvalError::GoldParse {
            line: 0,
            message: other.to_string(),
        },
    })?;
    if out.is_empty() {
        log::warn!("gold file {} has no pairs", path.display());
    }
    Ok(out)
}
