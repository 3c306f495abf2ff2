//! Exact best-in-hindsight comparators.

use crate::error::{domain, Result};

fn check_history(history: &[Vec<f64>]) -> Result<usize> {
    let Some(first) = history.first() else {
        return domain("comparator needs a nonempty history");
    };
    let d = first.len();
    if d == 0 || history.iter().any(|c| c.len() != d) {
        return domain("history rows must share a positive dimension");
    }
    Ok(d)
}

/// Action with the smallest cumulative cost; lowest index on ties.
pub fn best_fixed_comparator(history: &[Vec<f64>]) -> Result<(usize, f64)> {
    let d = check_history(history)?;
    let mut totals = vec![0.0; d];
    for row in history {
        for (t, c) in totals.iter_mut().zip(row) {
            *t += c;
        }
    }
    let mut best = 0;
    for a in 1..d {
        if totals[a] < totals[best] {
            best = a;
        }
    }
    Ok((best, totals[best]))
}

/// Minimum-cost action sequence with at most `k` changes, by dynamic
/// programming over (round, action, changes used). Ties prefer fewer changes,
/// then lower action indices.
pub fn best_shifting_comparator(history: &[Vec<f64>], k: i64) -> Result<(Vec<usize>, f64)> {
    let d = check_history(history)?;
    if k < 0 {
        return domain(format!("shift budget must be nonnegative, got {k}"));
    }
    let horizon = history.len();
    let k = (k as usize).min(horizon - 1);
    let layers = k + 1;
    let at = |a: usize, j: usize| a * layers + j;

    // back[t][a][j]: action at t - 1 on the best path ending in (t, a, j).
    let mut back = vec![0u32; horizon * d * layers];
    let mut cost: Vec<f64> = (0..d * layers)
        .map(|i| if i % layers == 0 { history[0][i / layers] } else { f64::INFINITY })
        .collect();
    let mut next = vec![0.0; d * layers];
    for t in 1..horizon {
        // Best predecessor per layer, for paths that switch into this round.
        let best_per_layer: Vec<(f64, usize)> = (0..layers)
            .map(|j| {
                (0..d).fold((f64::INFINITY, 0), |acc, b| {
                    if cost[at(b, j)] < acc.0 { (cost[at(b, j)], b) } else { acc }
                })
            })
            .collect();
        for a in 0..d {
            for j in 0..layers {
                let stay = cost[at(a, j)];
                let (mut value, mut from) = (stay, a);
                if j > 0 {
                    let (switch, b) = best_per_layer[j - 1];
                    if switch < value && b != a {
                        value = switch;
                        from = b;
                    }
                }
                next[at(a, j)] = value + history[t][a];
                back[(t * d + a) * layers + j] = from as u32;
            }
        }
        std::mem::swap(&mut cost, &mut next);
    }

    let mut end = (0, 0);
    for j in 0..layers {
        for a in 0..d {
            if cost[at(a, j)] < cost[at(end.0, end.1)] {
                end = (a, j);
            }
        }
    }
    let total = cost[at(end.0, end.1)];
    let mut path = vec![0usize; horizon];
    let (mut a, mut j) = end;
    for t in (0..horizon).rev() {
        path[t] = a;
        if t > 0 {
            let from = back[(t * d + a) * layers + j] as usize;
            if from != a {
                j -= 1;
            }
            a = from;
        }
    }
    Ok((path, total))
}

/// Smallest total cost achievable with at most `j` changes, for every
/// `j = 0..=k`.
pub fn best_shifting_totals(history: &[Vec<f64>], k: usize) -> Result<Vec<f64>> {
    let d = check_history(history)?;
    let layers = k + 1;
    let mut cost: Vec<f64> = (0..d * layers)
        .map(|i| if i % layers == 0 { history[0][i / layers] } else { f64::INFINITY })
        .collect();
    let mut next = vec![0.0; d * layers];
    let mut best_per_layer = vec![f64::INFINITY; layers];
    for row in &history[1..] {
        for (j, best) in best_per_layer.iter_mut().enumerate() {
            *best = (0..d).map(|b| cost[b * layers + j]).fold(f64::INFINITY, f64::min);
        }
        for (a, c) in row.iter().enumerate() {
            for j in 0..layers {
                let stay = cost[a * layers + j];
                let value = if j > 0 { stay.min(best_per_layer[j - 1]) } else { stay };
                next[a * layers + j] = value + c;
            }
        }
        std::mem::swap(&mut cost, &mut next);
    }
    let mut totals: Vec<f64> = (0..layers)
        .map(|j| (0..d).map(|a| cost[a * layers + j]).fold(f64::INFINITY, f64::min))
        .collect();
    // "At most j" changes: carry the running minimum across layers.
    for j in 1..layers {
        totals[j] = totals[j].min(totals[j - 1]);
    }
    Ok(totals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]
    }

    /// Every sequence in `[0, d)^T` with at most `k` changes.
    fn exhaustive(history: &[Vec<f64>], k: usize) -> f64 {
        let (horizon, d) = (history.len(), history[0].len());
        let mut best = f64::INFINITY;
        let mut seq = vec![0usize; horizon];
        loop {
            let changes = seq.windows(2).filter(|w| w[0] != w[1]).count();
            if changes <= k {
                let total: f64 = seq.iter().enumerate().map(|(t, a)| history[t][*a]).sum();
                best = best.min(total);
            }
            let mut i = horizon;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                seq[i] += 1;
                if seq[i] < d {
                    break;
                }
                seq[i] = 0;
            }
        }
    }

    #[test]
    fn fixed_examples() {
        let constant = vec![vec![0.2, 0.8]; 10];
        let (a, total) = best_fixed_comparator(&constant).unwrap();
        assert_eq!(a, 0);
        assert!((total - 2.0).abs() < 1e-12);
        assert_eq!(best_fixed_comparator(&vec![vec![0.5; 3]; 4]).unwrap().0, 0);
        assert_eq!(best_fixed_comparator(&example()).unwrap(), (1, 1.0));
        assert!(best_fixed_comparator(&[]).is_err());
    }

    #[test]
    fn shifting_examples() {
        assert_eq!(best_shifting_comparator(&example(), 1).unwrap(), (vec![1, 1, 0], 0.0));
        let (path, total) = best_shifting_comparator(&example(), 0).unwrap();
        assert_eq!((path, total), (vec![1, 1, 1], 1.0));
        assert!(best_shifting_comparator(&example(), -1).is_err());
        let (path, _) = best_shifting_comparator(&example(), 10).unwrap();
        assert_eq!(path, vec![1, 1, 0]);
    }

    proptest! {
        #[test]
        fn shifting_matches_exhaustive_search(
            rows in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 3), 1..7),
            d in 1usize..4,
            k in 0usize..3,
        ) {
            let history: Vec<Vec<f64>> = rows.iter().map(|r| r[..d].to_vec()).collect();
            let (path, total) = best_shifting_comparator(&history, k as i64).unwrap();
            let expected = exhaustive(&history, k);
            prop_assert!((total - expected).abs() <= 1e-12);
            let recomputed: f64 = path.iter().enumerate().map(|(t, a)| history[t][*a]).sum();
            prop_assert!((recomputed - total).abs() <= 1e-12);
            prop_assert!(path.windows(2).filter(|w| w[0] != w[1]).count() <= k);
            let totals = best_shifting_totals(&history, k).unwrap();
            prop_assert!((totals[k] - expected).abs() <= 1e-12);
            prop_assert!(totals.windows(2).all(|w| w[1] <= w[0]));
            prop_assert!((totals[0] - best_fixed_comparator(&history).unwrap().1).abs() <= 1e-12);
        }
    }
}
