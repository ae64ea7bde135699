//! Non-dominated filtering of objective tuples.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Whether `a` dominates `b`: no worse in every coordinate and better by
/// more than `tol` in at least one.
fn dominates(a: &[f64], b: &[f64], senses: &[Sense], tol: f64) -> bool {
    let mut strictly = false;
    for ((&x, &y), s) in a.iter().zip(b).zip(senses) {
        let gain = match s {
            Sense::Maximize => x - y,
            Sense::Minimize => y - x,
        };
        if gain < -tol {
            return false;
        }
        if gain > tol {
            strictly = true;
        }
    }
    strictly
}

/// Indices of the points not dominated by any other point.
///
/// With `tol = 0` this is the exact definition; a positive `tol` ignores
/// differences up to `tol` in every coordinate.
pub fn pareto_filter(points: &[Vec<f64>], senses: &[Sense], tol: f64) -> Result<Vec<usize>> {
    if points.iter().any(|p| p.len() != senses.len()) {
        return Err(invalid("points", "every point needs one value per sense"));
    }
    if !(tol >= 0.0) {
        return Err(invalid("tol", "must be nonnegative"));
    }
    Ok((0..points.len()).filter(|&i| !points.iter().enumerate().any(|(j, q)| j != i && dominates(q, &points[i], senses, tol))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MAX2: [Sense; 2] = [Sense::Maximize, Sense::Maximize];

    #[test]
    fn dominated_point_is_dropped() {
        let pts = vec![vec![1.0, 1.0], vec![2.0, 0.5], vec![0.5, 0.5]];
        assert_eq!(pareto_filter(&pts, &MAX2, 0.0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn single_and_identical_points_survive() {
        assert_eq!(pareto_filter(&[vec![3.0, 1.0]], &MAX2, 0.0).unwrap(), vec![0]);
        let same = vec![vec![1.0, 2.0]; 4];
        assert_eq!(pareto_filter(&same, &MAX2, 0.0).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn minimization_sense() {
        let senses = [Sense::Maximize, Sense::Minimize];
        let pts = vec![vec![1.0, 1.0], vec![1.0, 2.0]];
        assert_eq!(pareto_filter(&pts, &senses, 0.0).unwrap(), vec![0]);
    }

    #[test]
    fn tolerance_ignores_small_differences() {
        let pts = vec![vec![1.0, 1.0], vec![1.0 + 1e-9, 1.0]];
        assert_eq!(pareto_filter(&pts, &MAX2, 0.0).unwrap(), vec![1]);
        assert_eq!(pareto_filter(&pts, &MAX2, 1e-6).unwrap(), vec![0, 1]);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        assert!(pareto_filter(&[vec![1.0]], &MAX2, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn survivors_are_mutually_non_dominated(raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 1..30)) {
            let senses = [Sense::Maximize, Sense::Maximize, Sense::Minimize];
            let pts: Vec<Vec<f64>> = raw.iter().map(|&(a, b, c)| vec![a, b, c]).collect();
            let keep = pareto_filter(&pts, &senses, 0.0).unwrap();
            prop_assert!(!keep.is_empty());
            for &i in &keep {
                for &j in &keep {
                    prop_assert!(!dominates(&pts[j], &pts[i], &senses, 0.0));
                }
            }
            // every dropped point is dominated by a survivor
            for i in 0..pts.len() {
                if !keep.contains(&i) {
                    prop_assert!(keep.iter().any(|&j| dominates(&pts[j], &pts[i], &senses, 0.0)));
                }
            }
        }
    }
}
