//! The random age `Θ`.

use std::fmt;

use statrs::function::factorial::ln_binomial;

use crate::distributions::parse::{number, pair, split_call};
use crate::distributions::{parse_distribution, LifetimeDistribution};
use crate::error::{Error, Result};
use crate::model::SurvivalModel;
use crate::numerics::special::log_sum_exp;
use crate::numerics::{integrate_finite_with, integrate_tail_with, QuadOptions};

/// Distribution of the random age at which the baseline is inspected.
#[derive(Debug, Clone, PartialEq)]
pub enum MixingDistribution {
    Degenerate(f64),
    DiscreteAtoms { atoms: Vec<f64>, weights: Vec<f64> },
    Continuous(LifetimeDistribution),
    /// The `k`-th smallest of `n` i.i.d. draws from `base`.
    OrderStatistic {
        base: LifetimeDistribution,
        k: usize,
        n: usize,
    },
}

use MixingDistribution as M;

impl MixingDistribution {
    pub fn degenerate(theta: f64) -> Result<Self> {
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "degenerate age must be finite and >= 0, got {theta}"
            )));
        }
        Ok(M::Degenerate(theta))
    }

    pub fn atoms(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("atoms list is empty".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter(
                    "atoms must be strictly increasing".into(),
                ));
            }
        }
        if points.iter().any(|&(t, p)| !(t >= 0.0) || !t.is_finite() || !(p > 0.0)) {
            return Err(Error::InvalidParameter(
                "atoms need finite locations >= 0 and positive weights".into(),
            ));
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "atom weights must sum to 1, got {total}"
            )));
        }
        Ok(M::DiscreteAtoms {
            atoms: points.iter().map(|p| p.0).collect(),
            weights: points.iter().map(|p| p.1).collect(),
        })
    }

    pub fn continuous(base: LifetimeDistribution) -> Result<Self> {
        if !base.has_density() {
            return Err(Error::InvalidParameter(
                "continuous mixing needs a distribution with a density".into(),
            ));
        }
        Ok(M::Continuous(base))
    }

    pub fn order_statistic(base: LifetimeDistribution, k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n || n > 1000 {
            return Err(Error::InvalidParameter(format!(
                "order statistic needs 1 <= k <= n <= 1000, got k={k}, n={n}"
            )));
        }
        if !base.has_density() {
            return Err(Error::InvalidParameter(
                "order-statistic mixing needs a base with a density".into(),
            ));
        }
        Ok(M::OrderStatistic { base, k, n })
    }

    /// Density `4 / (π (1 + θ²)²)`.
    pub fn ce61_h1() -> Self {
        M::Continuous(LifetimeDistribution::CauchySquared { scale: 1.0 })
    }

    /// Density `2 / (π (1 + θ²))`.
    pub fn ce61_h2() -> Self {
        M::Continuous(LifetimeDistribution::HalfCauchy { scale: 1.0 })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, M::Degenerate(_) | M::DiscreteAtoms { .. })
    }

    /// Support points with their masses for discrete variants.
    pub fn masses(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            M::Degenerate(t) => Some(vec![(*t, 1.0)]),
            M::DiscreteAtoms { atoms, weights } => {
                Some(atoms.iter().copied().zip(weights.iter().copied()).collect())
            }
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            M::Degenerate(t) => format!("degenerate({t})"),
            M::DiscreteAtoms { atoms, weights } => {
                let parts: Vec<String> = atoms
                    .iter()
                    .zip(weights)
                    .map(|(t, p)| format!("{t}:{p}"))
                    .collect();
                format!("atoms({})", parts.join(","))
            }
            M::Continuous(LifetimeDistribution::CauchySquared { scale }) if *scale == 1.0 => {
                "ce61_h1".into()
            }
            M::Continuous(LifetimeDistribution::HalfCauchy { scale }) if *scale == 1.0 => {
                "ce61_h2".into()
            }
            M::Continuous(d) => format!("cont({})", d.label()),
            M::OrderStatistic { base, k, n } => format!("os({},{k},{n})", base.label()),
        }
    }

    /// `E[g(Θ)]`.
    pub fn expect<G>(&self, g: G, tol: f64) -> Result<f64>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        self.expect_with(g, &QuadOptions::new(tol))
    }

    pub fn expect_with<G>(&self, g: G, opts: &QuadOptions) -> Result<f64>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        self.expect_over(g, 0.0, f64::INFINITY, opts)
    }

    /// `E[g(Θ); lo <= Θ <= hi]`.
    pub fn expect_over<G>(&self, mut g: G, lo: f64, hi: f64, opts: &QuadOptions) -> Result<f64>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        if let Some(masses) = self.masses() {
            let mut total = 0.0;
            for (t, p) in masses {
                if t >= lo && t <= hi {
                    total += p * g(t)?;
                }
            }
            return Ok(total);
        }
        if !(hi > lo) {
            return Ok(0.0);
        }
        let mut weighted = |t: f64| -> Result<f64> {
            let h = self.density(t);
            if h == 0.0 {
                Ok(0.0)
            } else {
                Ok(h * g(t)?)
            }
        };
        let r = if hi.is_finite() {
            integrate_finite_with(&mut weighted, lo, hi, opts)?
        } else {
            integrate_tail_with(&mut weighted, lo, opts)?
        };
        Ok(r.value)
    }

    /// Density of a continuous variant, zero for discrete ones.
    pub fn density(&self, t: f64) -> f64 {
        match self {
            M::Continuous(d) => d.pdf(t),
            M::OrderStatistic { base, k, n } => os_pdf(base, *k, *n, t),
            _ => 0.0,
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            M::Continuous(d) => d.cdf(t),
            M::OrderStatistic { base, k, n } => os_cdf(base, *k, *n, t),
            _ => self
                .masses()
                .unwrap_or_default()
                .iter()
                .filter(|(a, _)| *a <= t)
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0),
        }
    }

    pub fn sf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        match self {
            M::Continuous(d) => d.sf(t),
            M::OrderStatistic { base, k, n } => os_sf(base, *k, *n, t),
            _ => self
                .masses()
                .unwrap_or_default()
                .iter()
                .filter(|(a, _)| *a > t)
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0),
        }
    }

    /// Smallest `t` with `cdf(t) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
        }
        match self {
            M::Continuous(d) => d.quantile(p),
            M::OrderStatistic { .. } => {
                if p <= 0.0 {
                    return Ok(0.0);
                }
                let mut lo = 0.0;
                let mut hi = 1.0;
                while self.cdf(hi) < p {
                    lo = hi;
                    hi *= 2.0;
                    if hi > 1e300 {
                        return Ok(f64::INFINITY);
                    }
                }
                while hi - lo > 1e-12 * hi.max(1.0) {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(hi)
            }
            _ => {
                let masses = self.masses().unwrap_or_default();
                let mut cum = 0.0;
                for (t, w) in &masses {
                    cum += w;
                    if cum >= p - 1e-15 {
                        return Ok(*t);
                    }
                }
                Ok(masses.last().map(|m| m.0).unwrap_or(0.0))
            }
        }
    }

    /// Largest point of the support, `+∞` when unbounded.
    pub fn support_max(&self) -> f64 {
        match self.masses() {
            Some(m) => m.last().map(|a| a.0).unwrap_or(0.0),
            None => f64::INFINITY,
        }
    }
}

impl fmt::Display for MixingDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn ln_cdf(base: &LifetimeDistribution, t: f64) -> f64 {
    base.cdf(t).ln()
}

fn os_terms(base: &LifetimeDistribution, n: usize, t: f64, js: std::ops::Range<usize>) -> f64 {
    let lf = ln_cdf(base, t);
    let ls = base.ln_sf(t);
    let terms: Vec<f64> = js
        .map(|j| {
            let a = if j == 0 { 0.0 } else { j as f64 * lf };
            let b = if j == n { 0.0 } else { (n - j) as f64 * ls };
            ln_binomial(n as u64, j as u64) + a + b
        })
        .collect();
    log_sum_exp(&terms).exp()
}

/// `P(X_{k:n} <= t) = Σ_{j>=k} C(n,j) F^j F̄^{n-j}`.
pub fn os_cdf(base: &LifetimeDistribution, k: usize, n: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    os_terms(base, n, t, k..n + 1).min(1.0)
}

/// `P(X_{k:n} > t) = Σ_{j<k} C(n,j) F^j F̄^{n-j}`.
pub fn os_sf(base: &LifetimeDistribution, k: usize, n: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    os_terms(base, n, t, 0..k).min(1.0)
}

/// `n!/((k-1)!(n-k)!) F^{k-1} F̄^{n-k} f`.
pub fn os_pdf(base: &LifetimeDistribution, k: usize, n: usize, t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let ln_f = base.ln_pdf(t);
    if ln_f == f64::NEG_INFINITY {
        return 0.0;
    }
    let a = if k == 1 { 0.0 } else { (k - 1) as f64 * ln_cdf(base, t) };
    let b = if k == n { 0.0 } else { (n - k) as f64 * base.ln_sf(t) };
    let ln_c = (n as f64).ln() + ln_binomial((n - 1) as u64, (k - 1) as u64);
    (ln_c + a + b + ln_f).exp()
}

/// Parses `degenerate(θ)`, `atoms(t:p,...)`, `cont(<dist>)`, `os(<dist>,k,n)`,
/// `ce61_h1` or `ce61_h2`.
pub fn parse_mixing(spec: &str) -> Result<MixingDistribution> {
    let (name, args) = split_call(spec)?;
    let want = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "`{name}` takes {n} argument(s), got {}",
                args.len()
            )))
        }
    };
    match name {
        "degenerate" => {
            want(1)?;
            M::degenerate(number(args[0])?)
        }
        "atoms" => {
            if args.is_empty() {
                return Err(Error::Parse("`atoms` needs at least one t:p pair".into()));
            }
            let pts = args.iter().map(|a| pair(a)).collect::<Result<Vec<_>>>()?;
            M::atoms(&pts)
        }
        "cont" => {
            want(1)?;
            M::continuous(parse_distribution(args[0])?)
        }
        "os" => {
            want(3)?;
            let int = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("expected an integer, got `{s}`")))
            };
            M::order_statistic(parse_distribution(args[0])?, int(args[1])?, int(args[2])?)
        }
        "ce61_h1" => {
            want(0)?;
            Ok(M::ce61_h1())
        }
        "ce61_h2" => {
            want(0)?;
            Ok(M::ce61_h2())
        }
        other => Err(Error::Parse(format!("unknown mixing distribution `{other}`"))),
    }
}

impl std::str::FromStr for MixingDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_mixing(s)
    }
}

impl SurvivalModel for MixingDistribution {
    fn sf(&self, x: f64) -> Result<f64> {
        Ok(MixingDistribution::sf(self, x))
    }

    fn cdf(&self, x: f64) -> Result<f64> {
        Ok(MixingDistribution::cdf(self, x))
    }

    fn pdf(&self, x: f64) -> Result<f64> {
        if self.is_discrete() {
            return Err(Error::Unsupported(format!("{} has no density", self.label())));
        }
        Ok(self.density(x))
    }

    fn integrated_sf(&self, x: f64) -> Result<f64> {
        let x = x.max(0.0);
        match self {
            M::Continuous(d) => d.integrated_sf(x),
            M::OrderStatistic { base, k, n } => {
                if !base.moment_exists(1.0) && *k == *n {
                    return Err(Error::MeanDoesNotExist);
                }
                let opts = QuadOptions::relative(1e-10);
                Ok(integrate_tail_with(|t| Ok(os_sf(base, *k, *n, t)), x, &opts)?.value)
            }
            _ => Ok(self
                .masses()
                .unwrap_or_default()
                .iter()
                .map(|(t, p)| p * (t - x).max(0.0))
                .sum()),
        }
    }

    fn is_closed_form(&self) -> bool {
        match self {
            M::Continuous(d) => d.is_closed_form(),
            M::OrderStatistic { base, .. } => base.is_closed_form(),
            _ => false,
        }
    }

    fn label(&self) -> String {
        MixingDistribution::label(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::function::beta::beta_reg;

    fn exp1() -> LifetimeDistribution {
        LifetimeDistribution::exponential(1.0).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let d = M::degenerate(1.0).unwrap();
        assert_eq!(d.expect(Ok, 1e-9).unwrap(), 1.0);
        let a = M::atoms(&[(0.0, 0.25), (1.0, 0.75)]).unwrap();
        let v = a.expect(|t| Ok((-t).exp()), 1e-9).unwrap();
        assert_eq!(v, 0.25 + 0.75 * (-1.0f64).exp());
        let c = M::continuous(exp1()).unwrap();
        assert!((c.expect(|_| Ok(1.0), 1e-9).unwrap() - 1.0).abs() < 1e-9);
        for m in [M::ce61_h1(), M::ce61_h2()] {
            assert!((m.expect(|_| Ok(1.0), 1e-10).unwrap() - 1.0).abs() < 1e-8, "{m}");
        }
    }

    #[test]
    fn order_statistic_examples() {
        let e = exp1();
        for &t in &[0.1, 1.0, 3.0] {
            assert!((os_cdf(&e, 1, 1, t) - e.cdf(t)).abs() < 1e-15);
            assert!((os_cdf(&e, 5, 5, t) - e.cdf(t).powi(5)).abs() < 1e-14);
            assert!((os_pdf(&e, 1, 1, t) - e.pdf(t)).abs() < 1e-15);
        }
        // median of X_{4:5} by bisection on the binomial-sum formula
        let m = M::order_statistic(e.clone(), 4, 5).unwrap();
        let med = m.quantile(0.5).unwrap();
        assert!((os_cdf(&e, 4, 5, med) - 0.5).abs() < 1e-10);
        // at F = 1/2
        let t = 2f64.ln();
        assert!((os_pdf(&e, 5, 5, t) - 5.0 * 0.5f64.powi(4) * e.pdf(t)).abs() < 1e-14);
        let mass = m.expect(|_| Ok(1.0), 1e-10).unwrap();
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn order_statistic_cdf_matches_incomplete_beta() {
        // F_{k:n}(t) = I_{F(t)}(k, n-k+1)
        let w = LifetimeDistribution::weibull(2.0, 1.0).unwrap();
        for (k, n) in [(1, 1), (2, 5), (4, 5), (7, 10), (300, 1000)] {
            for &t in &[0.05, 0.4, 1.0, 2.2] {
                let expected = beta_reg(k as f64, (n - k + 1) as f64, w.cdf(t));
                let got = os_cdf(&w, k, n, t);
                assert!((got - expected).abs() < 1e-10, "k={k} n={n} t={t}: {got} vs {expected}");
                assert!((got + os_sf(&w, k, n, t) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn discrete_cdf_and_quantile() {
        let a = M::atoms(&[(0.0, 0.25), (1.0, 0.75)]).unwrap();
        assert_eq!(a.cdf(0.0), 0.25);
        assert_eq!(a.cdf(0.99), 0.25);
        assert_eq!(a.cdf(1.0), 1.0);
        assert_eq!(a.sf(0.5), 0.75);
        assert_eq!(a.quantile(0.2).unwrap(), 0.0);
        assert_eq!(a.quantile(0.3).unwrap(), 1.0);
        let lo = a.expect_over(|_| Ok(1.0), 0.0, 0.5, &QuadOptions::default()).unwrap();
        assert_eq!(lo, 0.25);
    }

    #[test]
    fn validation() {
        assert!(M::atoms(&[(1.0, 0.5), (0.0, 0.5)]).is_err());
        assert!(M::atoms(&[(0.0, 0.5), (1.0, 0.4)]).is_err());
        assert!(M::degenerate(-1.0).is_err());
        assert!(M::order_statistic(exp1(), 0, 3).is_err());
        assert!(M::order_statistic(exp1(), 4, 3).is_err());
    }

    #[test]
    fn parser() {
        assert_eq!(parse_mixing("degenerate(1)").unwrap(), M::Degenerate(1.0));
        assert_eq!(
            parse_mixing("atoms(0:0.25,1:0.75)").unwrap(),
            M::atoms(&[(0.0, 0.25), (1.0, 0.75)]).unwrap()
        );
        assert_eq!(parse_mixing("cont(exp(1))").unwrap(), M::Continuous(exp1()));
        assert_eq!(
            parse_mixing("os(exp(1),4,5)").unwrap(),
            M::order_statistic(exp1(), 4, 5).unwrap()
        );
        assert_eq!(parse_mixing("ce61_h1").unwrap(), M::ce61_h1());
        assert_eq!(parse_mixing("ce61_h2").unwrap(), M::ce61_h2());
        for m in [M::ce61_h1(), M::ce61_h2(), parse_mixing("os(weibull(2,1),2,3)").unwrap()] {
            assert_eq!(parse_mixing(&m.label()).unwrap(), m);
        }
        for bad in ["atoms()", "os(exp(1),4)", "cont(exp(1)", "ce61_h3", "degenerate(a)"] {
            assert!(parse_mixing(bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn os_cdf_monotone_and_ordered(n in 2usize..30, k_frac in 0.0f64..1.0, t in 0.0f64..5.0, dt in 0.0f64..1.0) {
            let k = 2 + ((n - 1) as f64 * k_frac) as usize;
            let k = k.min(n);
            let e = exp1();
            let a = os_cdf(&e, k, n, t);
            let b = os_cdf(&e, k, n, t + dt);
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b >= a - 1e-13);
            prop_assert!(a <= os_cdf(&e, k - 1, n, t) + 1e-13);
        }

        #[test]
        fn order_statistic_mass_is_one(n in 1usize..12, kf in 0.0f64..1.0) {
            let k = 1 + ((n - 1) as f64 * kf).round() as usize;
            let m = M::order_statistic(LifetimeDistribution::weibull(2.0, 1.0).unwrap(), k, n).unwrap();
            let mass = m.expect(|_| Ok(1.0), 1e-11).unwrap();
            prop_assert!((mass - 1.0).abs() < 1e-8);
        }
    }
}
