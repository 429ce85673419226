//! The averaged residual lifetime `X*`.

use rayon::prelude::*;

use crate::distributions::LifetimeDistribution;
use crate::error::{Error, Result};
use crate::mixing::MixingDistribution;
use crate::model::SurvivalModel;
use crate::numerics::{integrate_finite_with, integrate_tail_with, QuadOptions, DEFAULT_TOL};

/// Below this survival probability hazards and MRLs are not evaluated.
pub const SF_FLOOR: f64 = 1e-14;

/// `X*` with `F̄*(x) = E[F̄(x + Θ) / F̄(Θ)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualMixture {
    baseline: LifetimeDistribution,
    mixing: MixingDistribution,
    quad_tol: f64,
}

/// `E(X*)` by two routes: the tail integral of `F̄*` and `E[m(Θ)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub direct: f64,
    pub via_age: f64,
    pub discrepancy: f64,
}

impl ResidualMixture {
    pub fn new(baseline: LifetimeDistribution, mixing: MixingDistribution) -> Result<Self> {
        // every age the mixing can produce must leave the baseline alive
        let probe = match mixing.masses() {
            Some(m) => m.iter().map(|a| a.0).collect(),
            None => vec![mixing.quantile(1.0 - 1e-9)?],
        };
        for t in probe {
            let ls = baseline.ln_sf(t);
            if !(ls > f64::NEG_INFINITY) {
                return Err(Error::InvalidParameter(format!(
                    "mixing puts mass at age {t} where the baseline survival function is zero"
                )));
            }
        }
        Ok(ResidualMixture {
            baseline,
            mixing,
            quad_tol: DEFAULT_TOL,
        })
    }

    /// `Θ` distributed as the equilibrium law of the baseline.
    pub fn equilibrium_mixture(baseline: LifetimeDistribution) -> Result<Self> {
        let eq = baseline.equilibrium()?;
        Self::new(baseline, MixingDistribution::continuous(eq)?)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    pub fn baseline(&self) -> &LifetimeDistribution {
        &self.baseline
    }

    pub fn mixing(&self) -> &MixingDistribution {
        &self.mixing
    }

    pub fn tolerance(&self) -> f64 {
        self.quad_tol
    }

    fn opts(&self) -> QuadOptions {
        QuadOptions::relative(self.quad_tol)
    }

    fn inner_opts(&self) -> QuadOptions {
        QuadOptions::relative(self.quad_tol * 1e-2)
    }

    /// `ln[F̄(x + θ) / F̄(θ)]`.
    pub(crate) fn ln_ratio(&self, x: f64, theta: f64) -> f64 {
        let den = self.baseline.ln_sf(theta);
        if den == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.baseline.ln_sf(x + theta) - den
    }

    fn sf_with(&self, x: f64, opts: &QuadOptions) -> Result<f64> {
        if x <= 0.0 {
            return Ok(1.0);
        }
        let v = self.mixing.expect_with(|t| Ok(self.ln_ratio(x, t).exp()), opts)?;
        Ok(v.clamp(0.0, 1.0))
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        self.sf_with(x, &self.opts())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let v = self
            .mixing
            .expect_with(|t| Ok(-self.ln_ratio(x, t).exp_m1()), &self.opts())?;
        Ok(v.clamp(0.0, 1.0))
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !self.baseline.has_density() {
            return Err(Error::Unsupported(format!(
                "{} has no density",
                self.baseline.label()
            )));
        }
        if x < 0.0 {
            return Ok(0.0);
        }
        let v = self.mixing.expect_with(
            |t| {
                let den = self.baseline.ln_sf(t);
                Ok((self.baseline.ln_pdf(x + t) - den).exp())
            },
            &self.opts(),
        )?;
        Ok(v.max(0.0))
    }

    fn guarded_sf(&self, quantity: &'static str, x: f64) -> Result<f64> {
        let s = self.sf(x)?;
        if s < SF_FLOOR {
            return Err(Error::domain(quantity, x, format!("mixture sf {s:e} below {SF_FLOOR:e}")));
        }
        Ok(s)
    }

    /// `f*(x) / F̄*(x)`.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        let s = self.guarded_sf("hazard", x)?;
        Ok(self.pdf(x)? / s)
    }

    /// `E[r(x + Θ) | X* > x]`.
    pub fn hazard_conditional(&self, x: f64) -> Result<f64> {
        let s = self.guarded_sf("hazard", x)?;
        let v = self.mixing.expect_with(
            |t| Ok(self.baseline.hazard(x + t) * self.ln_ratio(x, t).exp()),
            &self.opts(),
        )?;
        Ok(v / s)
    }

    /// Whether `E(X*)` is finite.
    pub fn mean_exists(&self) -> bool {
        if !self.baseline.moment_exists(1.0) {
            return false;
        }
        if self.baseline.has_bounded_mrl() {
            return true;
        }
        match &self.mixing {
            MixingDistribution::Continuous(d) => d.moment_exists(1.0),
            MixingDistribution::OrderStatistic { base, .. } => base.moment_exists(1.0),
            _ => true,
        }
    }

    /// `∫_x^∞ F̄*(u) du`, integrating the mixture sf directly.
    pub fn integrated_sf(&self, x: f64) -> Result<f64> {
        if !self.mean_exists() {
            return Err(Error::MeanDoesNotExist);
        }
        let inner = self.inner_opts();
        let r = integrate_tail_with(|u| self.sf_with(u, &inner), x.max(0.0), &self.opts())?;
        Ok(r.value)
    }

    /// `∫_x^∞ F̄* / F̄*(x)`.
    pub fn mrl(&self, x: f64) -> Result<f64> {
        let s = self.guarded_sf("mrl", x)?;
        Ok(self.integrated_sf(x)? / s)
    }

    /// `E[m(x + Θ) | X* > x]`.
    pub fn mrl_conditional(&self, x: f64) -> Result<f64> {
        if !self.mean_exists() {
            return Err(Error::MeanDoesNotExist);
        }
        let s = self.guarded_sf("mrl", x)?;
        let v = self.mixing.expect_with(
            |t| {
                let w = self.ln_ratio(x, t).exp();
                if w == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.baseline.mrl(x + t)? * w)
            },
            &self.opts(),
        )?;
        Ok(v / s)
    }

    /// MRL along an increasing grid, sharing the tail integral between points.
    pub fn mrl_grid(&self, xs: &[f64]) -> Vec<Result<f64>> {
        if xs.is_empty() {
            return Vec::new();
        }
        if !self.mean_exists() {
            return xs.iter().map(|_| Err(Error::MeanDoesNotExist)).collect();
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return xs.par_iter().map(|&x| self.mrl(x)).collect();
        }
        let inner = self.inner_opts();
        let outer = self.opts();
        let last = *xs.last().unwrap();
        let tail = integrate_tail_with(|u| self.sf_with(u, &inner), last, &outer).map(|r| r.value);
        let segments: Vec<Result<f64>> = xs
            .par_windows(2)
            .map(|w| {
                integrate_finite_with(|u| self.sf_with(u, &inner), w[0], w[1], &outer)
                    .map(|r| r.value)
            })
            .collect();
        let sfs: Vec<Result<f64>> = xs.par_iter().map(|&x| self.sf(x)).collect();

        let mut nus = vec![tail.clone(); xs.len()];
        let mut acc = tail;
        for i in (0..xs.len() - 1).rev() {
            acc = match (acc, &segments[i]) {
                (Ok(a), Ok(s)) => Ok(a + s),
                (Err(e), _) => Err(e),
                (_, Err(e)) => Err(e.clone()),
            };
            nus[i] = acc.clone();
        }
        nus.into_iter()
            .zip(sfs)
            .zip(xs)
            .map(|((nu, s), &x)| {
                let s = s?;
                if s < SF_FLOOR {
                    return Err(Error::domain(
                        "mrl",
                        x,
                        format!("mixture sf {s:e} below {SF_FLOOR:e}"),
                    ));
                }
                Ok(nu? / s)
            })
            .collect()
    }

    /// `Π(θ | x) = P(Θ <= θ | X* > x)`.
    pub fn conditional_age_cdf(&self, theta: f64, x: f64) -> Result<f64> {
        if theta < 0.0 {
            return Ok(0.0);
        }
        let s = self.guarded_sf("conditional_age_cdf", x)?;
        if theta.is_infinite() {
            return Ok(1.0);
        }
        let v = self.mixing.expect_over(
            |t| Ok(self.ln_ratio(x, t).exp()),
            0.0,
            theta,
            &self.opts(),
        )?;
        Ok((v / s).clamp(0.0, 1.0))
    }

    /// Density of `(Θ | X* = x)`; continuous mixing only.
    pub fn posterior_age_pdf(&self, theta: f64, x: f64) -> Result<f64> {
        if self.mixing.is_discrete() {
            return Err(Error::Unsupported(
                "posterior age density needs a continuous mixing distribution".into(),
            ));
        }
        let fx = self.pdf(x)?;
        if !(fx > 0.0) {
            return Err(Error::domain("posterior_age_pdf", x, "mixture density is zero"));
        }
        if theta < 0.0 {
            return Ok(0.0);
        }
        let h = self.mixing.density(theta);
        if h == 0.0 {
            return Ok(0.0);
        }
        let v = (self.baseline.ln_pdf(x + theta) - self.baseline.ln_sf(theta)).exp();
        Ok(v * h / fx)
    }

    /// Masses of `(Θ | X* > x)` at the atoms of a discrete mixing.
    pub fn conditional_age_masses(&self, x: f64) -> Result<Vec<(f64, f64)>> {
        let masses = self.mixing.masses().ok_or_else(|| {
            Error::Unsupported("conditional age masses need a discrete mixing".into())
        })?;
        let s = self.guarded_sf("conditional_age_masses", x)?;
        Ok(masses
            .into_iter()
            .map(|(t, p)| (t, p * self.ln_ratio(x, t).exp() / s))
            .collect())
    }

    pub fn mean_x_star(&self) -> Result<MeanEstimate> {
        if !self.mean_exists() {
            return Err(Error::MeanDoesNotExist);
        }
        let direct = self.integrated_sf(0.0)?;
        let via_age = self
            .mixing
            .expect_with(|t| self.baseline.mrl(t), &self.opts())?;
        Ok(MeanEstimate {
            direct,
            via_age,
            discrepancy: (direct - via_age).abs(),
        })
    }

    pub fn label(&self) -> String {
        format!("mix[{} @ {}]", self.baseline.label(), self.mixing.label())
    }
}

impl SurvivalModel for ResidualMixture {
    fn sf(&self, x: f64) -> Result<f64> {
        ResidualMixture::sf(self, x)
    }
    fn cdf(&self, x: f64) -> Result<f64> {
        ResidualMixture::cdf(self, x)
    }
    fn pdf(&self, x: f64) -> Result<f64> {
        ResidualMixture::pdf(self, x)
    }
    fn hazard(&self, x: f64) -> Result<f64> {
        ResidualMixture::hazard(self, x)
    }
    fn integrated_sf(&self, x: f64) -> Result<f64> {
        ResidualMixture::integrated_sf(self, x)
    }
    fn mrl(&self, x: f64) -> Result<f64> {
        ResidualMixture::mrl(self, x)
    }
    fn mrl_on(&self, xs: &[f64]) -> Vec<Result<f64>> {
        self.mrl_grid(xs)
    }
    fn mean(&self) -> Result<f64> {
        Ok(self.mean_x_star()?.direct)
    }
    fn is_closed_form(&self) -> bool {
        self.mixing.is_discrete() && self.baseline.is_closed_form()
    }
    fn label(&self) -> String {
        ResidualMixture::label(self)
    }
}
