//! Baseline lifetime distributions.
//!
//! Every family exposes the survival function and friends in closed form where
//! one exists; the remaining quantities fall back to quadrature of the survival
//! function. Evaluation is split in two layers: the raw methods (`sf`, `pdf`,
//! `hazard`, ...) return plain `f64` values (possibly infinite or NaN outside
//! the support), while [`LifetimeDistribution::evaluate`] validates the domain
//! and reports errors by quantity.

mod empirical;
pub(crate) mod parse;
mod tabulated;

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::numerics::special::{log_sum_exp, scaled_upper_gamma};
use crate::numerics::{integrate_finite_with, integrate_tail_with, QuadOptions, DEFAULT_TOL};

pub use empirical::Empirical;
pub use parse::parse_distribution;
pub use tabulated::Tabulated;

/// Quantities a lifetime model can be asked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Sf,
    Cdf,
    Pdf,
    Hazard,
    ReversedHazard,
    Mrl,
    IntegratedSf,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::Sf,
        Quantity::Cdf,
        Quantity::Pdf,
        Quantity::Hazard,
        Quantity::ReversedHazard,
        Quantity::Mrl,
        Quantity::IntegratedSf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Sf => "sf",
            Quantity::Cdf => "cdf",
            Quantity::Pdf => "pdf",
            Quantity::Hazard => "hazard",
            Quantity::ReversedHazard => "rhazard",
            Quantity::Mrl => "mrl",
            Quantity::IntegratedSf => "isf",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown quantity `{s}`")))
    }
}

/// A nonnegative lifetime law.
#[derive(Debug, Clone, PartialEq)]
pub enum LifetimeDistribution {
    Exponential {
        rate: f64,
    },
    /// sf `exp(-(x/scale)^shape)`.
    Weibull {
        shape: f64,
        scale: f64,
    },
    HyperExponential {
        weights: Vec<f64>,
        rates: Vec<f64>,
    },
    /// sf `1 / (1 + (x/scale)^shape)`.
    LogLogistic {
        shape: f64,
        scale: f64,
    },
    /// Density `2 / (π s (1 + (x/s)^2))`.
    HalfCauchy {
        scale: f64,
    },
    /// Density `4 / (π s (1 + (x/s)^2)^2)`.
    CauchySquared {
        scale: f64,
    },
    /// Hazard `rate · exp(growth · x)`. A negative growth gives a defective
    /// law whose sf levels off at `exp(rate / growth)`.
    Gompertz {
        rate: f64,
        growth: f64,
    },
    Tabulated(Tabulated),
    Empirical(Empirical),
    /// cdf `∫_0^x F̄_base / E(base)`.
    Equilibrium {
        base: Box<LifetimeDistribution>,
        base_mean: f64,
    },
    /// `(base - age | base > age)`.
    Residual {
        base: Box<LifetimeDistribution>,
        age: f64,
        ln_sf_age: f64,
    },
}

use LifetimeDistribution as D;

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `sf` of the half-Cauchy-squared law at `t = x/s`, accurate in the tail.
fn cauchy_squared_sf(t: f64) -> f64 {
    if t <= 4.0 {
        FRAC_2_PI * (1.0f64.atan2(t) - t / (1.0 + t * t))
    } else {
        // atan(1/t) - t/(1+t²) = Σ_{n>=1} (-1)^{n+1} (2n/(2n+1)) t^{-(2n+1)}
        let inv2 = 1.0 / (t * t);
        let mut power = inv2 / t;
        let mut sum = 0.0;
        for n in 1..40 {
            let nf = n as f64;
            let term = 2.0 * nf / (2.0 * nf + 1.0) * power;
            sum += if n % 2 == 1 { term } else { -term };
            if term < 1e-18 * sum.abs() {
                break;
            }
            power *= inv2;
        }
        FRAC_2_PI * sum
    }
}

fn quad_opts() -> QuadOptions {
    QuadOptions::relative(DEFAULT_TOL * 1e-1)
}

impl LifetimeDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(D::Exponential {
            rate: positive("rate", rate)?,
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Ok(D::Weibull {
            shape: positive("shape", shape)?,
            scale: positive("scale", scale)?,
        })
    }

    pub fn hyper_exponential(weights: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != rates.len() {
            return Err(Error::InvalidParameter(
                "hyperexponential needs matching, nonempty weights and rates".into(),
            ));
        }
        for (&p, &l) in weights.iter().zip(&rates) {
            positive("weight", p)?;
            positive("rate", l)?;
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "hyperexponential weights must sum to 1, got {total}"
            )));
        }
        Ok(D::HyperExponential { weights, rates })
    }

    pub fn log_logistic(shape: f64, scale: f64) -> Result<Self> {
        Ok(D::LogLogistic {
            shape: positive("shape", shape)?,
            scale: positive("scale", scale)?,
        })
    }

    pub fn half_cauchy(scale: f64) -> Result<Self> {
        Ok(D::HalfCauchy {
            scale: positive("scale", scale)?,
        })
    }

    pub fn cauchy_squared(scale: f64) -> Result<Self> {
        Ok(D::CauchySquared {
            scale: positive("scale", scale)?,
        })
    }

    pub fn gompertz(rate: f64, growth: f64) -> Result<Self> {
        if !growth.is_finite() {
            return Err(Error::InvalidParameter("gompertz growth must be finite".into()));
        }
        Ok(D::Gompertz {
            rate: positive("rate", rate)?,
            growth,
        })
    }

    pub fn tabulated(table: Tabulated) -> Self {
        D::Tabulated(table)
    }

    pub fn empirical(sample: Vec<f64>) -> Result<Self> {
        Ok(D::Empirical(Empirical::new(sample)?))
    }

    /// Short spec-like label, e.g. `hyperexp(0.25:1,0.75:2)`.
    pub fn label(&self) -> String {
        match self {
            D::Exponential { rate } => format!("exp({rate})"),
            D::Weibull { shape, scale } => format!("weibull({shape},{scale})"),
            D::HyperExponential { weights, rates } => {
                let parts: Vec<String> = weights
                    .iter()
                    .zip(rates)
                    .map(|(p, l)| format!("{p}:{l}"))
                    .collect();
                format!("hyperexp({})", parts.join(","))
            }
            D::LogLogistic { shape, scale } => format!("loglogistic({shape},{scale})"),
            D::HalfCauchy { scale } => format!("halfcauchy({scale})"),
            D::CauchySquared { scale } => format!("cauchysq({scale})"),
            D::Gompertz { rate, growth } => format!("gompertz({rate},{growth})"),
            D::Tabulated(t) => format!("tabulated[{} knots]", t.knots().len()),
            D::Empirical(e) => format!("empirical[n={}]", e.len()),
            D::Equilibrium { base, .. } => format!("equilibrium({})", base.label()),
            D::Residual { base, age, .. } => format!("residual({},{age})", base.label()),
        }
    }

    /// Whether `pdf` is available without quadrature.
    pub fn is_closed_form(&self) -> bool {
        match self {
            D::Empirical(_) => false,
            D::Residual { base, .. } => base.is_closed_form(),
            _ => true,
        }
    }

    pub fn has_density(&self) -> bool {
        !matches!(self, D::Empirical(_))
    }

    /// Whether `E[X^order]` is finite.
    pub fn moment_exists(&self, order: f64) -> bool {
        match self {
            D::Exponential { .. } | D::Weibull { .. } | D::HyperExponential { .. } => true,
            D::LogLogistic { shape, .. } => order < *shape,
            D::HalfCauchy { .. } => order < 1.0,
            D::CauchySquared { .. } => order < 3.0,
            D::Gompertz { growth, .. } => *growth >= 0.0,
            D::Tabulated(t) => t.last_hazard() > 0.0,
            D::Empirical(_) => true,
            D::Equilibrium { base, .. } => base.moment_exists(order + 1.0),
            D::Residual { base, .. } => base.moment_exists(order),
        }
    }

    /// Whether the mean residual life stays bounded as the age grows.
    pub fn has_bounded_mrl(&self) -> bool {
        match self {
            D::Exponential { .. } | D::HyperExponential { .. } | D::Empirical(_) => true,
            D::Weibull { shape, .. } => *shape >= 1.0,
            D::Gompertz { growth, .. } => *growth >= 0.0,
            D::Tabulated(t) => t.last_hazard() > 0.0,
            D::LogLogistic { .. } | D::HalfCauchy { .. } | D::CauchySquared { .. } => false,
            D::Equilibrium { base, .. } | D::Residual { base, .. } => base.has_bounded_mrl(),
        }
    }

    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            D::Exponential { rate } => -rate * x,
            D::Weibull { shape, scale } => -(x / scale).powf(*shape),
            D::HyperExponential { weights, rates } => {
                let terms: Vec<f64> = weights
                    .iter()
                    .zip(rates)
                    .map(|(p, l)| p.ln() - l * x)
                    .collect();
                log_sum_exp(&terms)
            }
            D::LogLogistic { shape, scale } => -(x / scale).powf(*shape).ln_1p(),
            D::HalfCauchy { scale } => (FRAC_2_PI * 1.0f64.atan2(x / scale)).ln(),
            D::CauchySquared { scale } => cauchy_squared_sf(x / scale).ln(),
            D::Gompertz { rate, growth } => -self::gompertz_cum_hazard(*rate, *growth, x),
            D::Tabulated(t) => t.ln_sf(x),
            D::Empirical(e) => e.sf(x).ln(),
            D::Equilibrium { base, base_mean } => match base.integrated_sf(x) {
                Ok(nu) => nu.ln() - base_mean.ln(),
                Err(_) => f64::NAN,
            },
            D::Residual {
                base, age, ln_sf_age,
            } => base.ln_sf(x + age) - ln_sf_age,
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match self {
            D::HyperExponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(p, l)| p * (-l * x).exp())
                .sum(),
            D::LogLogistic { shape, scale } => 1.0 / (1.0 + (x / scale).powf(*shape)),
            D::HalfCauchy { scale } => FRAC_2_PI * 1.0f64.atan2(x / scale),
            D::CauchySquared { scale } => cauchy_squared_sf(x / scale),
            D::Empirical(e) => e.sf(x),
            _ => self.ln_sf(x).exp(),
        }
    }

    /// `1 - sf`, computed without cancellation near zero.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            D::Exponential { rate } => -(-rate * x).exp_m1(),
            D::Weibull { shape, scale } => -(-(x / scale).powf(*shape)).exp_m1(),
            D::HyperExponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(p, l)| -p * (-l * x).exp_m1())
                .sum(),
            D::LogLogistic { shape, scale } => {
                let u = (x / scale).powf(*shape);
                u / (1.0 + u)
            }
            D::HalfCauchy { scale } => FRAC_2_PI * (x / scale).atan(),
            D::CauchySquared { scale } => {
                let t = x / scale;
                if t <= 1.0 {
                    FRAC_2_PI * (t.atan() + t / (1.0 + t * t))
                } else {
                    1.0 - cauchy_squared_sf(t)
                }
            }
            D::Gompertz { rate, growth } => -(-gompertz_cum_hazard(*rate, *growth, x)).exp_m1(),
            D::Empirical(e) => e.cdf(x),
            D::Equilibrium { base, base_mean } => {
                match integrate_finite_with(|u| Ok(base.sf(u)), 0.0, x, &quad_opts()) {
                    Ok(r) => (r.value / base_mean).min(1.0),
                    Err(_) => f64::NAN,
                }
            }
            _ => -self.ln_sf(x).exp_m1(),
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        match self {
            D::Exponential { rate } => rate.ln() - rate * x,
            D::Weibull { shape, scale } => {
                let t = x / scale;
                (shape / scale).ln() + (shape - 1.0) * t.ln() - t.powf(*shape)
            }
            D::HyperExponential { weights, rates } => {
                let terms: Vec<f64> = weights
                    .iter()
                    .zip(rates)
                    .map(|(p, l)| (p * l).ln() - l * x)
                    .collect();
                log_sum_exp(&terms)
            }
            D::Residual {
                base, age, ln_sf_age,
            } => base.ln_pdf(x + age) - ln_sf_age,
            _ => self.pdf(x).ln(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            D::Exponential { .. } | D::Weibull { .. } | D::Residual { .. } => self.ln_pdf(x).exp(),
            D::HyperExponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(p, l)| p * l * (-l * x).exp())
                .sum(),
            D::LogLogistic { shape, scale } => {
                let t = x / scale;
                let u = t.powf(*shape);
                shape / scale * t.powf(shape - 1.0) / ((1.0 + u) * (1.0 + u))
            }
            D::HalfCauchy { scale } => {
                let t = x / scale;
                2.0 / (PI * scale * (1.0 + t * t))
            }
            D::CauchySquared { scale } => {
                let t = x / scale;
                let q = 1.0 + t * t;
                4.0 / (PI * scale * q * q)
            }
            D::Gompertz { .. } | D::Tabulated(_) => self.hazard(x) * self.sf(x),
            D::Empirical(_) => f64::NAN,
            D::Equilibrium { base, base_mean } => base.sf(x) / base_mean,
        }
    }

    pub fn hazard(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            D::Exponential { rate } => *rate,
            D::Weibull { shape, scale } => shape / scale * (x / scale).powf(shape - 1.0),
            D::HyperExponential { weights, rates } => {
                let lmin = rates.iter().copied().fold(f64::INFINITY, f64::min);
                let (mut num, mut den) = (0.0, 0.0);
                for (p, l) in weights.iter().zip(rates) {
                    let e = p * (-(l - lmin) * x).exp();
                    num += l * e;
                    den += e;
                }
                num / den
            }
            D::LogLogistic { shape, scale } => {
                let t = x / scale;
                shape / scale * t.powf(shape - 1.0) / (1.0 + t.powf(*shape))
            }
            D::Gompertz { rate, growth } => rate * (growth * x).exp(),
            D::Tabulated(t) => t.hazard(x),
            D::Empirical(_) => f64::NAN,
            D::Equilibrium { base, .. } => match base.mrl(x) {
                Ok(m) => 1.0 / m,
                Err(_) => f64::NAN,
            },
            D::Residual { base, age, .. } => base.hazard(x + age),
            D::HalfCauchy { .. } | D::CauchySquared { .. } => self.pdf(x) / self.sf(x),
        }
    }

    pub fn reversed_hazard(&self, x: f64) -> f64 {
        self.pdf(x) / self.cdf(x)
    }

    /// `ν(x) = ∫_x^∞ sf(u) du`.
    pub fn integrated_sf(&self, x: f64) -> Result<f64> {
        let x = x.max(0.0);
        match self {
            D::Exponential { rate } => Ok((-rate * x).exp() / rate),
            D::HyperExponential { weights, rates } => Ok(weights
                .iter()
                .zip(rates)
                .map(|(p, l)| p / l * (-l * x).exp())
                .sum()),
            D::Tabulated(t) => t.integrated_sf(x),
            D::Empirical(e) => Ok(e.integrated_sf(x)),
            D::LogLogistic { shape, scale } if *shape == 2.0 => {
                Ok(scale * 1.0f64.atan2(x / scale))
            }
            D::Weibull { .. } | D::Residual { .. } => Ok(self.mrl(x)? * self.sf(x)),
            _ => {
                if !self.moment_exists(1.0) {
                    return Err(Error::MeanDoesNotExist);
                }
                let r = integrate_tail_with(|u| Ok(self.sf(u)), x, &quad_opts())?;
                Ok(r.value)
            }
        }
    }

    /// Mean residual life `ν(x) / sf(x)`.
    pub fn mrl(&self, x: f64) -> Result<f64> {
        let x = x.max(0.0);
        match self {
            D::Exponential { rate } => Ok(1.0 / rate),
            D::Weibull { shape, scale } => {
                let z = (x / scale).powf(*shape);
                Ok(scale / shape * scaled_upper_gamma(1.0 / shape, z))
            }
            D::HyperExponential { weights, rates } => {
                let lmin = rates.iter().copied().fold(f64::INFINITY, f64::min);
                let (mut num, mut den) = (0.0, 0.0);
                for (p, l) in weights.iter().zip(rates) {
                    let e = p * (-(l - lmin) * x).exp();
                    num += e / l;
                    den += e;
                }
                Ok(num / den)
            }
            D::Residual { base, age, .. } => base.mrl(x + age),
            _ => {
                let s = self.sf(x);
                if !(s > 0.0) {
                    return Err(Error::domain("mrl", x, "survival function is zero"));
                }
                Ok(self.integrated_sf(x)? / s)
            }
        }
    }

    pub fn mean(&self) -> Result<f64> {
        if !self.moment_exists(1.0) {
            return Err(Error::MeanDoesNotExist);
        }
        match self {
            D::Exponential { rate } => Ok(1.0 / rate),
            D::Weibull { shape, scale } => Ok(scale * gamma(1.0 + 1.0 / shape)),
            D::LogLogistic { shape, scale } => {
                let b = PI / shape;
                Ok(scale * b / b.sin())
            }
            D::CauchySquared { scale } => Ok(2.0 * scale / PI),
            D::Empirical(e) => Ok(e.mean()),
            D::Residual { base, age, .. } => base.mrl(*age),
            _ => self.integrated_sf(0.0),
        }
    }

    /// Validated evaluation of one quantity.
    pub fn evaluate(&self, q: Quantity, x: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain(q.name(), x, "argument must be finite and >= 0"));
        }
        let needs_density = matches!(q, Quantity::Pdf | Quantity::Hazard | Quantity::ReversedHazard);
        if needs_density && !self.has_density() {
            return Err(Error::Unsupported(format!(
                "{} has no density",
                self.label()
            )));
        }
        let value = match q {
            Quantity::Sf => self.sf(x),
            Quantity::Cdf => self.cdf(x),
            Quantity::Pdf => self.pdf(x),
            Quantity::Hazard => {
                if !(self.sf(x) > 0.0) {
                    return Err(Error::domain("hazard", x, "survival function is zero"));
                }
                self.hazard(x)
            }
            Quantity::ReversedHazard => {
                if !(self.cdf(x) > 0.0) {
                    return Err(Error::domain("rhazard", x, "distribution function is zero"));
                }
                self.reversed_hazard(x)
            }
            Quantity::Mrl => {
                if !(self.sf(x) > 0.0) {
                    return Err(Error::domain("mrl", x, "survival function is zero"));
                }
                self.mrl(x)?
            }
            Quantity::IntegratedSf => self.integrated_sf(x)?,
        };
        if value.is_nan() {
            return Err(Error::domain(q.name(), x, "evaluation produced NaN"));
        }
        Ok(value)
    }

    /// `x` with `sf(x) = level`, for `level ∈ (0, 1]`. Returns `+∞` when a
    /// defective law never falls to `level`.
    pub fn inverse_sf(&self, level: f64) -> f64 {
        if level >= 1.0 {
            return 0.0;
        }
        if level <= 0.0 {
            return f64::INFINITY;
        }
        match self {
            D::Exponential { rate } => -level.ln() / rate,
            D::Weibull { shape, scale } => scale * (-level.ln()).powf(1.0 / shape),
            D::LogLogistic { shape, scale } => scale * ((1.0 - level) / level).powf(1.0 / shape),
            D::HalfCauchy { scale } => scale * (0.5 * PI * (1.0 - level)).tan(),
            D::Gompertz { rate, growth } => {
                let cum = -level.ln();
                if *growth == 0.0 {
                    cum / rate
                } else {
                    let arg = growth * cum / rate;
                    if arg <= -1.0 {
                        f64::INFINITY
                    } else {
                        arg.ln_1p() / growth
                    }
                }
            }
            D::Tabulated(t) => t.inverse_sf(level),
            D::Empirical(e) => e.quantile(1.0 - level),
            _ => self.bisect_sf(level),
        }
    }

    /// Quantile: smallest `x` with `cdf(x) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
        }
        match self {
            D::Empirical(e) => Ok(e.quantile(p)),
            _ => Ok(self.inverse_sf(1.0 - p)),
        }
    }

    fn bisect_sf(&self, level: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.sf(hi) > level {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        while hi - lo > 1e-12 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sf(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `count` inverse-cdf draws from a generator seeded with `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, count)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count)
            .map(|_| {
                // survival level in (0, 1]
                let level = 1.0 - rng.random::<f64>();
                self.inverse_sf(level)
            })
            .collect()
    }

    /// The equilibrium (stationary renewal age) law, cdf `∫_0^x F̄ / E(X)`.
    pub fn equilibrium(&self) -> Result<Self> {
        let base_mean = self.mean()?;
        Ok(D::Equilibrium {
            base: Box::new(self.clone()),
            base_mean,
        })
    }

    /// Residual life at a fixed age: sf `F̄(x + age) / F̄(age)`.
    pub fn residual_at_age(&self, age: f64) -> Result<Self> {
        if !(age >= 0.0) || !age.is_finite() {
            return Err(Error::InvalidParameter(format!("age must be finite and >= 0, got {age}")));
        }
        if age == 0.0 {
            return Ok(self.clone());
        }
        let ln_sf_age = self.ln_sf(age);
        if !(ln_sf_age > f64::NEG_INFINITY) {
            return Err(Error::domain("residual_at_age", age, "survival function is zero"));
        }
        Ok(D::Residual {
            base: Box::new(self.clone()),
            age,
            ln_sf_age,
        })
    }
}

fn gompertz_cum_hazard(rate: f64, growth: f64, x: f64) -> f64 {
    if growth == 0.0 {
        rate * x
    } else {
        rate / growth * (growth * x).exp_m1()
    }
}

impl fmt::Display for LifetimeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
