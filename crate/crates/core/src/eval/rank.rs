//! List and series comparison: adapted Spearman footrule, overlap and
//! correlation coefficients.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use super::EvalError;

fn positions<T: Eq + Hash + std::fmt::Debug>(list: &[T]) -> Result<HashMap<&T, usize>, EvalError> {
    let mut pos = HashMap::with_capacity(list.len());
    for (i, item) in list.iter().enumerate() {
        if pos.insert(item, i + 1).is_some() {
            return Err(EvalError::DuplicateElement(format!("{item:?}")));
        }
    }
    Ok(pos)
}

/// Footrule distance between a reference list `a` and a candidate `b` of
/// possibly different length.
///
/// Elements of `a` missing from `b` are appended to `b` in `a`'s order; the
/// result is the sum over `a` of `|rank_a(e) - rank_b(e)|` with 1-based
/// ranks. Elements only in `b` contribute nothing.
pub fn footrule<T: Eq + Hash + std::fmt::Debug>(a: &[T], b: &[T]) -> Result<u64, EvalError> {
    let pos_a = positions(a)?;
    let pos_b = positions(b)?;
    let mut next = b.len();
    let mut sum = 0u64;
    // `a` is walked in order, so padded ranks are assigned in `a`'s order.
    for item in a {
        let rank_b = match pos_b.get(item) {
            Some(&r) => r,
            None => {
                next += 1;
                next
            }
        };
        sum += pos_a[item].abs_diff(rank_b) as u64;
    }
    Ok(sum)
}

/// Upper bound of [`footrule`] for a reference of length `a_len` against a
/// padded candidate list of length `padded_len`: the reference placed in
/// reverse at the end of the candidate.
pub fn footrule_max(a_len: usize, padded_len: usize) -> u64 {
    let m = padded_len.max(a_len) as i64;
    (1..=a_len as i64)
        .map(|i| (m + 1 - 2 * i).unsigned_abs())
        .sum()
}

/// [`footrule`] divided by [`footrule_max`]; 0 when the bound is 0.
pub fn footrule_normalized<T: Eq + Hash + std::fmt::Debug>(
    a: &[T],
    b: &[T],
) -> Result<f64, EvalError> {
    let raw = footrule(a, b)?;
    let in_b: HashSet<&T> = b.iter().collect();
    let missing = a.iter().filter(|x| !in_b.contains(x)).count();
    let max = footrule_max(a.len(), b.len() + missing);
    Ok(if max == 0 {
        0.0
    } else {
        raw as f64 / max as f64
    })
}

/// Number of elements the two lists share.
pub fn overlap<T: Eq + Hash>(a: &[T], b: &[T]) -> usize {
    let a: HashSet<&T> = a.iter().collect();
    let b: HashSet<&T> = b.iter().collect();
    a.intersection(&b).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub pearson: f64,
    pub spearman: f64,
}

/// Pearson's r and Spearman's rho (Pearson on tie-averaged ranks).
pub fn correlate(xs: &[f64], ys: &[f64]) -> Result<Correlation, EvalError> {
    if xs.len() != ys.len() {
        return Err(EvalError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(EvalError::Degenerate(format!(
            "need at least 2 scored pairs, have {}",
            xs.len()
        )));
    }
    Ok(Correlation {
        pearson: pearson(xs, ys)?,
        spearman: pearson(&average_ranks(xs), &average_ranks(ys))?,
    })
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, EvalError> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::Degenerate("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks, ties share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn footrule_examples() {
        assert_eq!(footrule(&["a", "b"], &["a", "b"]).unwrap(), 0);
        assert_eq!(footrule(&["x", "y", "z"], &["z", "y", "x"]).unwrap(), 4);
        assert_eq!(footrule(&["a", "b", "c"], &["b", "d"]).unwrap(), 4);
        assert_eq!(footrule::<&str>(&[], &[]).unwrap(), 0);
        assert!(matches!(
            footrule(&["a", "a"], &["a"]),
            Err(EvalError::DuplicateElement(_))
        ));
    }

    #[test]
    fn footrule_bound() {
        // Full reversal of length n attains floor(n^2 / 2).
        for n in 1..10usize {
            let a: Vec<usize> = (0..n).collect();
            let rev: Vec<usize> = (0..n).rev().collect();
            assert_eq!(footrule(&a, &rev).unwrap(), footrule_max(n, n));
            assert_eq!(footrule_max(n, n), (n * n / 2) as u64);
        }
        assert_eq!(
            footrule_normalized(&["x", "y", "z"], &["z", "y", "x"]).unwrap(),
            1.0
        );
        assert_eq!(footrule_normalized::<&str>(&["a"], &["a"]).unwrap(), 0.0);
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap(&["a", "b", "c"], &["a", "b", "c"]), 3);
        assert_eq!(overlap(&["a"], &["b"]), 0);
        assert_eq!(overlap(&["a", "b", "c"], &["c", "d", "a"]), 2);
    }

    #[test]
    fn correlation_examples() {
        let c = correlate(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((c.pearson - 1.0).abs() < 1e-15 && (c.spearman - 1.0).abs() < 1e-15);
        let c = correlate(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert!((c.pearson + 1.0).abs() < 1e-15 && (c.spearman + 1.0).abs() < 1e-15);
        let c = correlate(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(c.spearman, 0.8);
    }

    #[test]
    fn correlation_errors() {
        assert!(matches!(
            correlate(&[1.0, 1.0], &[1.0, 2.0]),
            Err(EvalError::Degenerate(_))
        ));
        assert!(matches!(
            correlate(&[1.0], &[1.0]),
            Err(EvalError::Degenerate(_))
        ));
        assert!(matches!(
            correlate(&[1.0, 2.0], &[1.0]),
            Err(EvalError::LengthMismatch(2, 1))
        ));
    }

    #[test]
    fn ties_get_average_rank() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 10.0, 5.0]),
            vec![2.5, 4.0, 2.5, 1.0]
        );
    }
}
