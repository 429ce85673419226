use crate::error::{Error, Result};

/// Right-continuous empirical distribution of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Empirical {
    sorted: Vec<f64>,
    // suffix[i] = Σ_{j >= i} sorted[j]
    suffix: Vec<f64>,
}

impl Empirical {
    pub fn new(mut sample: Vec<f64>) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::InvalidParameter("empirical sample is empty".into()));
        }
        if sample.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "empirical sample must be finite and nonnegative".into(),
            ));
        }
        sample.sort_by(f64::total_cmp);
        let mut suffix = vec![0.0; sample.len() + 1];
        for i in (0..sample.len()).rev() {
            suffix[i] = suffix[i + 1] + sample[i];
        }
        Ok(Empirical {
            sorted: sample,
            suffix,
        })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    fn first_above(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }

    pub fn sf(&self, x: f64) -> f64 {
        (self.len() - self.first_above(x)) as f64 / self.len() as f64
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.first_above(x) as f64 / self.len() as f64
    }

    /// `(1/n) Σ (s_i - x)^+`
    pub fn integrated_sf(&self, x: f64) -> f64 {
        let i = self.first_above(x);
        let above = (self.len() - i) as f64;
        (self.suffix[i] - above * x) / self.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.suffix[0] / self.len() as f64
    }

    /// Smallest sample value whose empirical cdf reaches `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[idx]
    }
}
