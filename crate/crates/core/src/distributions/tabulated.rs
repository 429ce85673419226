use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Survival function given at knots, interpolated linearly in `ln sf`
/// (piecewise-constant hazard). Past the last knot the last segment's hazard
/// is extended.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    xs: Vec<f64>,
    ln_sf: Vec<f64>,
    hazards: Vec<f64>,
}

#[derive(Deserialize)]
struct Row {
    x: f64,
    sf: f64,
}

impl Tabulated {
    pub fn new(xs: Vec<f64>, sf: Vec<f64>) -> Result<Self> {
        if xs.len() != sf.len() || xs.len() < 2 {
            return Err(Error::InvalidParameter(
                "tabulated sf needs at least two (x, sf) rows".into(),
            ));
        }
        if xs[0] != 0.0 || sf[0] != 1.0 {
            return Err(Error::InvalidParameter(
                "tabulated sf must start with the row 0,1".into(),
            ));
        }
        for i in 1..xs.len() {
            if !(xs[i] > xs[i - 1]) || !xs[i].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "tabulated x must be strictly increasing (row {})",
                    i + 1
                )));
            }
            if !(sf[i] <= sf[i - 1]) {
                return Err(Error::InvalidParameter(format!(
                    "tabulated sf must be nonincreasing (row {})",
                    i + 1
                )));
            }
            if !(sf[i] > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tabulated sf must stay positive (row {})",
                    i + 1
                )));
            }
        }
        let ln_sf: Vec<f64> = sf.iter().map(|s| s.ln()).collect();
        let hazards = (0..xs.len() - 1)
            .map(|i| (ln_sf[i] - ln_sf[i + 1]) / (xs[i + 1] - xs[i]))
            .collect();
        Ok(Tabulated { xs, ln_sf, hazards })
    }

    /// Reads a CSV file with header `x,sf`.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
            .clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "sf" {
            return Err(Error::Parse(format!(
                "{}: expected header `x,sf`",
                path.display()
            )));
        }
        let mut xs = Vec::new();
        let mut sf = Vec::new();
        for row in reader.deserialize::<Row>() {
            let row = row.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            xs.push(row.x);
            sf.push(row.sf);
        }
        Tabulated::new(xs, sf)
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    fn segment(&self, x: f64) -> usize {
        // index j with xs[j] <= x < xs[j+1], clamped to the last segment
        let j = self.xs.partition_point(|&k| k <= x);
        j.saturating_sub(1).min(self.hazards.len() - 1)
    }

    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let j = self.segment(x);
        self.ln_sf[j] - self.hazards[j] * (x - self.xs[j])
    }

    pub fn hazard(&self, x: f64) -> f64 {
        self.hazards[self.segment(x.max(0.0))]
    }

    pub fn last_hazard(&self) -> f64 {
        *self.hazards.last().expect("at least one segment")
    }

    /// `∫_x^∞ sf`, exact for the piecewise-exponential interpolant.
    pub fn integrated_sf(&self, x: f64) -> Result<f64> {
        let tail_hazard = self.last_hazard();
        if tail_hazard <= 0.0 {
            return Err(Error::MeanDoesNotExist);
        }
        let x = x.max(0.0);
        let piece = |ln_s: f64, h: f64, width: f64| -> f64 {
            let s = ln_s.exp();
            if h == 0.0 {
                s * width
            } else {
                s * -(-h * width).exp_m1() / h
            }
        };
        let last = self.xs.len() - 1;
        if x >= self.xs[last] {
            return Ok(self.ln_sf(x).exp() / tail_hazard);
        }
        let j = self.segment(x);
        let mut total = piece(self.ln_sf(x), self.hazards[j], self.xs[j + 1] - x);
        for i in j + 1..last {
            total += piece(self.ln_sf[i], self.hazards[i], self.xs[i + 1] - self.xs[i]);
        }
        total += self.ln_sf[last].exp() / tail_hazard;
        Ok(total)
    }

    /// Inverse of the survival function: the `x` with `sf(x) = level`.
    pub fn inverse_sf(&self, level: f64) -> f64 {
        if level >= 1.0 {
            return 0.0;
        }
        if level <= 0.0 {
            return f64::INFINITY;
        }
        let target = level.ln();
        let j = self.ln_sf.partition_point(|&l| l > target);
        // ln_sf[j-1] > target >= ln_sf[j]  (or beyond the last knot)
        let seg = j.saturating_sub(1).min(self.hazards.len() - 1);
        let h = self.hazards[seg];
        if h <= 0.0 {
            return f64::INFINITY;
        }
        self.xs[seg] + (self.ln_sf[seg] - target) / h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn exp_table() -> Tabulated {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let sf = xs.iter().map(|x| (-2.0 * x).exp()).collect();
        Tabulated::new(xs, sf).unwrap()
    }

    #[test]
    fn exact_for_exponential_segments() {
        let t = exp_table();
        for &x in &[0.0, 0.1, 0.75, 3.3, 7.0, 12.0] {
            assert!((t.ln_sf(x) + 2.0 * x).abs() < 1e-12);
            assert!((t.hazard(x) - 2.0).abs() < 1e-12);
            let nu = t.integrated_sf(x).unwrap();
            assert!((nu - (-2.0 * x).exp() / 2.0).abs() < 1e-12);
        }
        assert!((t.inverse_sf((-3.0f64).exp()) - 1.5).abs() < 1e-12);
        assert!((t.inverse_sf((-14.0f64).exp()) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn validates_rows() {
        assert!(Tabulated::new(vec![0.0, 1.0], vec![0.9, 0.5]).is_err());
        assert!(Tabulated::new(vec![0.0, 1.0, 1.0], vec![1.0, 0.5, 0.4]).is_err());
        assert!(Tabulated::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.6]).is_err());
        assert!(Tabulated::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn flat_tail_has_no_mean() {
        let t = Tabulated::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.5]).unwrap();
        assert_eq!(t.integrated_sf(0.0), Err(Error::MeanDoesNotExist));
    }

    #[test]
    fn reads_csv() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "x,sf\n0,1\n1,0.5\n2,0.25").unwrap();
        let t = Tabulated::from_csv_path(f.path()).unwrap();
        assert_eq!(t.knots(), &[0.0, 1.0, 2.0]);
        assert!((t.ln_sf(1.5) - 1.5 * 0.5f64.ln()).abs() < 1e-12);

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "t,s\n0,1\n1,0.5").unwrap();
        assert!(matches!(Tabulated::from_csv_path(bad.path()), Err(Error::Parse(_))));
    }
}
