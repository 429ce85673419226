//! Monte Carlo engines for spacings and k-out-of-n residual lives.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::distributions::{parse_distribution, LifetimeDistribution};
use crate::error::{Error, Result};

/// Smallest replication count accepted by the engines.
pub const MIN_REPLICATIONS: usize = 1000;

/// Smallest sample accepted by the independence test.
pub const MIN_PAIRS: usize = 10_000;

/// KS acceptance bound `1.5 · 1.36 / √n`.
pub fn ks_threshold(n: usize) -> f64 {
    1.5 * 1.36 / (n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Baseline distribution in the textual grammar, e.g. `exp(1)`.
    pub baseline: String,
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn validate(&self) -> Result<LifetimeDistribution> {
        if self.k < 1 || self.k >= self.n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= k < n, got k = {}, n = {}",
                self.k, self.n
            )));
        }
        check_replications(self.samples)?;
        parse_distribution(&self.baseline)
    }
}

fn check_replications(count: usize) -> Result<()> {
    if count < MIN_REPLICATIONS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_REPLICATIONS} replications required, got {count}"
        )));
    }
    Ok(())
}

fn sorted_draw<R: Rng + ?Sized>(base: &LifetimeDistribution, rng: &mut R, n: usize) -> Vec<f64> {
    let mut xs = base.sample_with(rng, n);
    xs.sort_by(f64::total_cmp);
    xs
}

/// Pairs `(X_{n-1:n}, X_{n:n} - X_{n-1:n})` from `count` samples of size `n`.
pub fn mc_spacings(base: &LifetimeDistribution, n: usize, count: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("spacings need n >= 2, got {n}")));
    }
    check_replications(count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let xs = sorted_draw(base, &mut rng, n);
            (xs[n - 2], xs[n - 1] - xs[n - 2])
        })
        .collect())
}

/// Residual life of one survivor, picked uniformly, after the `k`-th failure.
pub fn mc_k_out_n_residuals(cfg: &McConfig) -> Result<Vec<f64>> {
    let base = cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..cfg.samples)
        .map(|_| {
            let xs = sorted_draw(&base, &mut rng, cfg.n);
            let t = xs[cfg.k - 1];
            let j = rng.random_range(cfg.k..cfg.n);
            xs[j] - t
        })
        .collect())
}

/// `sup |S_n - sf|` over the sample.
pub fn ks_statistic<F>(samples: &[f64], sf: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let s = sf(x);
            let before = 1.0 - i as f64 / n;
            let after = 1.0 - (i + 1) as f64 / n;
            (s - before).abs().max((s - after).abs())
        })
        .reduce(|| 0.0, f64::max)
}

/// Two-sample KS distance between empirical distribution functions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependenceTest {
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
    /// Rejected at the 1% level.
    pub rejected: bool,
}

fn rank_bins(values: &[f64], bins: usize) -> Result<Vec<usize>> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::InvalidParameter("degenerate marginal".into()));
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0; values.len()];
    for (rank, &i) in idx.iter().enumerate() {
        out[i] = rank * bins / values.len();
    }
    Ok(out)
}

/// Chi-square test of independence on a `bins × bins` quantile partition.
pub fn independence_check(pairs: &[(f64, f64)], bins: usize) -> Result<IndependenceTest> {
    if pairs.len() < MIN_PAIRS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_PAIRS} pairs required, got {}",
            pairs.len()
        )));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 bins, got {bins}")));
    }
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (ra, rb) = (rank_bins(&a, bins)?, rank_bins(&b, bins)?);
    let mut table = vec![vec![0.0f64; bins]; bins];
    for (i, j) in ra.into_iter().zip(rb) {
        table[i][j] += 1.0;
    }
    let n = pairs.len() as f64;
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..bins).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let mut statistic = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let e = rows[i] * cols[j] / n;
            statistic += (table[i][j] - e).powi(2) / e;
        }
    }
    let df = ((bins - 1) * (bins - 1)) as f64;
    let chi = ChiSquared::new(df).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let p_value = chi.sf(statistic);
    Ok(IndependenceTest {
        statistic,
        df,
        p_value,
        rejected: p_value < 0.01,
    })
}

/// A survival function tabulated on `[0, hi]` and interpolated linearly,
/// used to compare large samples against quadrature-based laws.
#[derive(Debug, Clone)]
pub struct SfTable {
    step: f64,
    values: Vec<f64>,
}

impl SfTable {
    pub fn build<F>(sf: F, hi: f64, points: usize) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        if !(hi > 0.0) || points < 2 {
            return Err(Error::InvalidParameter("table needs hi > 0 and two points".into()));
        }
        let step = hi / (points - 1) as f64;
        let values = (0..points)
            .into_par_iter()
            .map(|i| sf(i as f64 * step))
            .collect::<Result<Vec<_>>>()?;
        Ok(SfTable { step, values })
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.values[0];
        }
        let pos = x / self.step;
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return *self.values.last().expect("table is nonempty");
        }
        let w = pos - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixing::MixingDistribution;
    use crate::mixture::ResidualMixture;

    fn exp(rate: f64) -> LifetimeDistribution {
        LifetimeDistribution::exponential(rate).unwrap()
    }

    #[test]
    fn ks_examples() {
        let n = 100_000;
        let xs = exp(1.0).sample(n, 7);
        assert!(ks_statistic(&xs, |x| (-x).exp()) < ks_threshold(n));
        assert!((ks_statistic(&[2f64.ln()], |x| (-x).exp()) - 0.5).abs() < 1e-12);
        let ys = exp(2.0).sample(10_000, 8);
        assert!(ks_statistic(&ys, |x| (-x).exp()) > 0.1);
    }

    #[test]
    fn two_sample_ks() {
        let a = exp(1.0).sample(20_000, 1);
        let b = exp(1.0).sample(20_000, 2);
        assert!(ks_two_sample(&a, &b) < 0.02);
        let c = exp(3.0).sample(20_000, 3);
        assert!(ks_two_sample(&a, &c) > 0.3);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
    }

    #[test]
    fn exponential_spacings_are_exponential_and_independent() {
        let pairs = mc_spacings(&exp(1.0), 5, 100_000, 11).unwrap();
        assert!(pairs.iter().all(|p| p.1 >= 0.0));
        let s: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        assert!(ks_statistic(&s, |x| (-x).exp()) < 0.01);
        assert!(!independence_check(&pairs, 10).unwrap().rejected);
    }

    #[test]
    fn weibull_spacings_match_order_statistic_mixture() {
        let w = LifetimeDistribution::weibull(2.0, 1.0).unwrap();
        let pairs = mc_spacings(&w, 5, 100_000, 12).unwrap();
        let mix = ResidualMixture::new(w.clone(), MixingDistribution::order_statistic(w, 4, 5).unwrap()).unwrap();
        let table = SfTable::build(|x| mix.sf(x), 4.0, 4001).unwrap();
        let s: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        assert!(ks_statistic(&s, |x| table.sf(x)) < 0.01);
        assert!(independence_check(&pairs, 10).unwrap().rejected);
    }

    #[test]
    fn residuals_reduce_to_spacings() {
        let cfg = McConfig { baseline: "weibull(2,1)".into(), n: 5, k: 4, samples: 50_000, seed: 3 };
        let r = mc_k_out_n_residuals(&cfg).unwrap();
        let w = LifetimeDistribution::weibull(2.0, 1.0).unwrap();
        let s: Vec<f64> = mc_spacings(&w, 5, 50_000, 4).unwrap().into_iter().map(|p| p.1).collect();
        assert!(ks_two_sample(&r, &s) < 0.015);
    }

    #[test]
    fn exponential_residuals_are_memoryless() {
        let cfg = McConfig { baseline: "exp(1)".into(), n: 5, k: 3, samples: 100_000, seed: 5 };
        let r = mc_k_out_n_residuals(&cfg).unwrap();
        assert!(ks_statistic(&r, |x| (-x).exp()) < 0.01);
    }

    #[test]
    fn perfect_dependence_is_rejected() {
        let u = exp(1.0).sample(20_000, 9);
        let pairs: Vec<(f64, f64)> = u.iter().map(|&v| (v, v)).collect();
        assert!(independence_check(&pairs, 10).unwrap().rejected);
        let flat: Vec<(f64, f64)> = u.iter().map(|&v| (v, 1.0)).collect();
        assert!(independence_check(&flat, 10).is_err());
        assert!(independence_check(&pairs[..100], 10).is_err());
    }

    #[test]
    fn engines_are_seed_deterministic() {
        let cfg = McConfig { baseline: "hyperexp(0.25:1,0.75:2)".into(), n: 5, k: 2, samples: 2000, seed: 42 };
        assert_eq!(mc_k_out_n_residuals(&cfg).unwrap(), mc_k_out_n_residuals(&cfg).unwrap());
        let bad = McConfig { k: 5, ..cfg.clone() };
        assert!(mc_k_out_n_residuals(&bad).is_err());
        let few = McConfig { samples: 10, ..cfg };
        assert!(mc_k_out_n_residuals(&few).is_err());
    }
}
