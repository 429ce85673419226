use rayon::prelude::*;

use crate::error::{Error, Result};

/// Anything with a lifetime law on `[0, ∞)`: baselines, mixtures and mixing
/// distributions. Order and class checks are written against this trait.
pub trait SurvivalModel: Sync {
    fn sf(&self, x: f64) -> Result<f64>;

    fn cdf(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.sf(x)?)
    }

    fn ln_sf(&self, x: f64) -> Result<f64> {
        let c = self.cdf(x)?;
        if c < 0.5 {
            Ok((-c).ln_1p())
        } else {
            Ok(self.sf(x)?.ln())
        }
    }

    fn pdf(&self, x: f64) -> Result<f64>;

    fn hazard(&self, x: f64) -> Result<f64> {
        let s = self.sf(x)?;
        if !(s > 0.0) {
            return Err(Error::domain("hazard", x, "survival function is zero"));
        }
        Ok(self.pdf(x)? / s)
    }

    fn reversed_hazard(&self, x: f64) -> Result<f64> {
        let c = self.cdf(x)?;
        if !(c > 0.0) {
            return Err(Error::domain("rhazard", x, "distribution function is zero"));
        }
        Ok(self.pdf(x)? / c)
    }

    /// `Λ(x) = -ln sf(x)`.
    fn cumulative_hazard(&self, x: f64) -> Result<f64> {
        Ok(-self.ln_sf(x)?)
    }

    /// `∫_x^∞ sf`.
    fn integrated_sf(&self, x: f64) -> Result<f64>;

    fn mrl(&self, x: f64) -> Result<f64> {
        let s = self.sf(x)?;
        if !(s > 0.0) {
            return Err(Error::domain("mrl", x, "survival function is zero"));
        }
        Ok(self.integrated_sf(x)? / s)
    }

    /// MRL at many points; implementations may share work across the grid.
    fn mrl_on(&self, xs: &[f64]) -> Vec<Result<f64>> {
        xs.par_iter().map(|&x| self.mrl(x)).collect()
    }

    fn mean(&self) -> Result<f64> {
        self.integrated_sf(0.0)
    }

    /// Whether the density is available without quadrature.
    fn is_closed_form(&self) -> bool;

    fn label(&self) -> String;
}

impl<T: SurvivalModel + ?Sized> SurvivalModel for &T {
    fn sf(&self, x: f64) -> Result<f64> {
        (**self).sf(x)
    }
    fn cdf(&self, x: f64) -> Result<f64> {
        (**self).cdf(x)
    }
    fn ln_sf(&self, x: f64) -> Result<f64> {
        (**self).ln_sf(x)
    }
    fn pdf(&self, x: f64) -> Result<f64> {
        (**self).pdf(x)
    }
    fn hazard(&self, x: f64) -> Result<f64> {
        (**self).hazard(x)
    }
    fn reversed_hazard(&self, x: f64) -> Result<f64> {
        (**self).reversed_hazard(x)
    }
    fn cumulative_hazard(&self, x: f64) -> Result<f64> {
        (**self).cumulative_hazard(x)
    }
    fn integrated_sf(&self, x: f64) -> Result<f64> {
        (**self).integrated_sf(x)
    }
    fn mrl(&self, x: f64) -> Result<f64> {
        (**self).mrl(x)
    }
    fn mrl_on(&self, xs: &[f64]) -> Vec<Result<f64>> {
        (**self).mrl_on(xs)
    }
    fn mean(&self) -> Result<f64> {
        (**self).mean()
    }
    fn is_closed_form(&self) -> bool {
        (**self).is_closed_form()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

fn finite(quantity: &'static str, x: f64, v: f64) -> Result<f64> {
    if v.is_nan() {
        Err(Error::domain(quantity, x, "evaluation produced NaN"))
    } else {
        Ok(v)
    }
}

impl SurvivalModel for crate::distributions::LifetimeDistribution {
    fn sf(&self, x: f64) -> Result<f64> {
        finite("sf", x, Self::sf(self, x))
    }
    fn cdf(&self, x: f64) -> Result<f64> {
        finite("cdf", x, Self::cdf(self, x))
    }
    fn ln_sf(&self, x: f64) -> Result<f64> {
        finite("sf", x, Self::ln_sf(self, x))
    }
    fn pdf(&self, x: f64) -> Result<f64> {
        if !self.has_density() {
            return Err(Error::Unsupported(format!("{} has no density", Self::label(self))));
        }
        finite("pdf", x, Self::pdf(self, x))
    }
    fn hazard(&self, x: f64) -> Result<f64> {
        if !(Self::sf(self, x) > 0.0) {
            return Err(Error::domain("hazard", x, "survival function is zero"));
        }
        if !self.has_density() {
            return Err(Error::Unsupported(format!("{} has no density", Self::label(self))));
        }
        finite("hazard", x, Self::hazard(self, x))
    }
    fn reversed_hazard(&self, x: f64) -> Result<f64> {
        if !(Self::cdf(self, x) > 0.0) {
            return Err(Error::domain("rhazard", x, "distribution function is zero"));
        }
        finite("rhazard", x, Self::reversed_hazard(self, x))
    }
    fn integrated_sf(&self, x: f64) -> Result<f64> {
        Self::integrated_sf(self, x)
    }
    fn mrl(&self, x: f64) -> Result<f64> {
        if !(Self::sf(self, x) > 0.0) {
            return Err(Error::domain("mrl", x, "survival function is zero"));
        }
        Self::mrl(self, x)
    }
    fn mean(&self) -> Result<f64> {
        Self::mean(self)
    }
    fn is_closed_form(&self) -> bool {
        Self::is_closed_form(self)
    }
    fn label(&self) -> String {
        Self::label(self)
    }
}
