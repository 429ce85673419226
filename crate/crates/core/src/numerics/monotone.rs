use serde::{Deserialize, Serialize};

use super::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneVerdict {
    pub holds: bool,
    /// Index `i` of the first step `values[i-1] -> values[i]` that violates
    /// the direction by more than the tolerance.
    pub first_violation: Option<usize>,
    /// Size of that first violation.
    pub violation: f64,
    /// Largest step against the direction, and where it ends.
    pub max_violation: f64,
    pub max_index: Option<usize>,
}

/// Checks that every adjacent step goes in `direction`, allowing steps against
/// it of at most `tol` (absolute).
pub fn is_monotone(values: &[f64], direction: Direction, tol: f64) -> MonotoneVerdict {
    let mut first = None;
    let mut violation = 0.0;
    let mut max_violation = 0.0;
    let mut max_index = None;
    for i in 1..values.len() {
        let step = values[i] - values[i - 1];
        let against = match direction {
            Direction::Increasing => -step,
            Direction::Decreasing => step,
        };
        if against > max_violation {
            max_violation = against;
            max_index = Some(i);
        }
        if against > tol && first.is_none() {
            first = Some(i);
            violation = against;
        }
    }
    MonotoneVerdict {
        holds: first.is_none(),
        first_violation: first,
        violation,
        max_violation,
        max_index,
    }
}

/// First adjacent grid pair on which `g` takes strictly opposite signs.
pub fn find_sign_change<F>(mut g: F, grid: &Grid) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let xs = grid.abscissas();
    let mut prev = (xs[0], g(xs[0]));
    for &x in &xs[1..] {
        let v = g(x);
        if prev.1 * v < 0.0 {
            return Some((prev.0, x));
        }
        prev = (x, v);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn increasing_sequence_holds() {
        assert!(is_monotone(&[1.0, 2.0, 3.0], Direction::Increasing, 0.0).holds);
    }

    #[test]
    fn reports_first_violation() {
        let v = is_monotone(&[1.0, 2.0, 1.5], Direction::Increasing, 0.0);
        assert!(!v.holds);
        assert_eq!(v.first_violation, Some(2));
        assert!((v.violation - 0.5).abs() < 1e-15);
    }

    #[test]
    fn violation_below_tolerance_is_ignored() {
        let v = is_monotone(&[1.0, 1.0 - 1e-12, 2.0], Direction::Increasing, 1e-9);
        assert!(v.holds);
        assert!(v.max_violation > 0.0);
    }

    #[test]
    fn decreasing_direction() {
        assert!(is_monotone(&[3.0, 2.0, 2.0, 1.0], Direction::Decreasing, 0.0).holds);
        assert!(!is_monotone(&[3.0, 2.0, 2.5], Direction::Decreasing, 0.1).holds);
    }

    #[test]
    fn sign_change_of_linear_function() {
        let g = Grid::uniform(0.0, 2.0, 101).unwrap();
        let (a, b) = find_sign_change(|x| x - 1.0 + 1e-3, &g).unwrap();
        assert!(a <= 1.0 && 1.0 <= b + 1e-3);
        let (a, b) = find_sign_change(|x| x - 1.01, &g).unwrap();
        assert!(a < 1.01 && 1.01 < b);
    }

    #[test]
    fn exact_zero_on_grid_is_not_a_strict_sign_change() {
        // x - 1 vanishes at a grid point; neighbouring pairs have products <= 0 only
        let g = Grid::uniform(0.0, 2.0, 101).unwrap();
        let found = find_sign_change(|x| x - 1.0, &g);
        if let Some((a, b)) = found {
            assert!((a - 1.0) * (b - 1.0) < 0.0);
        }
    }

    #[test]
    fn positive_function_has_no_sign_change() {
        let g = Grid::uniform(0.0, 10.0, 101).unwrap();
        assert!(find_sign_change(|x| (-x).exp(), &g).is_none());
    }

    proptest! {
        #[test]
        fn bracket_endpoints_have_opposite_signs(root in 0.05f64..9.95, slope in -3.0f64..3.0) {
            prop_assume!(slope.abs() > 1e-3);
            let g = Grid::uniform(0.0, 10.0, 57).unwrap();
            let f = |x: f64| slope * (x - root);
            if let Some((a, b)) = find_sign_change(f, &g) {
                prop_assert!(f(a) * f(b) < 0.0);
                prop_assert!(a < b);
            }
        }

        #[test]
        fn sorted_input_is_monotone(mut v in proptest::collection::vec(-1e3f64..1e3, 2..50)) {
            v.sort_by(f64::total_cmp);
            prop_assert!(is_monotone(&v, Direction::Increasing, 0.0).holds);
            v.reverse();
            prop_assert!(is_monotone(&v, Direction::Decreasing, 0.0).holds);
        }
    }
}
