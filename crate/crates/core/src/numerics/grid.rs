use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Geometric,
}

/// Evaluation grid for "for all x" claims. Abscissas run from `lo` to `hi`
/// inclusive and are strictly increasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, points: usize, spacing: Spacing) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi <= lo {
            return Err(Error::InvalidParameter(format!(
                "grid needs 0 <= lo < hi, got [{lo}, {hi}]"
            )));
        }
        if points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 3 points, got {points}"
            )));
        }
        if spacing == Spacing::Geometric && lo <= 0.0 {
            return Err(Error::InvalidParameter(
                "geometric spacing requires lo > 0".into(),
            ));
        }
        Ok(Grid {
            lo,
            hi,
            points,
            spacing,
        })
    }

    pub fn uniform(lo: f64, hi: f64, points: usize) -> Result<Self> {
        Grid::new(lo, hi, points, Spacing::Uniform)
    }

    pub fn geometric(lo: f64, hi: f64, points: usize) -> Result<Self> {
        Grid::new(lo, hi, points, Spacing::Geometric)
    }

    /// Uniform 400-point grid on `[1e-3, 20]`.
    pub fn default_check() -> Self {
        Grid {
            lo: 1e-3,
            hi: 20.0,
            points: 400,
            spacing: Spacing::Uniform,
        }
    }

    pub fn abscissas(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        let mut xs: Vec<f64> = match self.spacing {
            Spacing::Uniform => {
                let h = (self.hi - self.lo) / last;
                (0..n).map(|i| self.lo + h * i as f64).collect()
            }
            Spacing::Geometric => {
                let ratio = (self.hi / self.lo).ln() / last;
                (0..n).map(|i| self.lo * (ratio * i as f64).exp()).collect()
            }
        };
        xs[0] = self.lo;
        xs[n - 1] = self.hi;
        xs
    }

    /// Same range with at most `max_points` points.
    pub fn coarsen(&self, max_points: usize) -> Grid {
        Grid {
            points: self.points.min(max_points.max(3)),
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn geometric_requires_positive_lo() {
        assert!(Grid::geometric(0.0, 1.0, 10).is_err());
        assert!(Grid::geometric(0.1, 1.0, 10).is_ok());
    }

    #[test]
    fn rejects_degenerate_ranges() {
        assert!(Grid::uniform(1.0, 1.0, 10).is_err());
        assert!(Grid::uniform(-1.0, 1.0, 10).is_err());
        assert!(Grid::uniform(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = Grid::default_check();
        let xs = g.abscissas();
        assert_eq!(xs.len(), 400);
        assert_eq!(xs[0], 1e-3);
        assert_eq!(xs[399], 20.0);
    }

    proptest! {
        #[test]
        fn abscissas_strictly_increasing(lo in 0.001f64..10.0, width in 0.01f64..100.0,
                                         points in 3usize..500, geometric in any::<bool>()) {
            let spacing = if geometric { Spacing::Geometric } else { Spacing::Uniform };
            let g = Grid::new(lo, lo + width, points, spacing).unwrap();
            let xs = g.abscissas();
            prop_assert_eq!(xs.len(), points);
            prop_assert_eq!(xs[0], lo);
            prop_assert_eq!(xs[points - 1], lo + width);
            prop_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
