//! Dependence between the residual `X*` and the inspection age `Θ`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aging::{check_tp2_rr2, Tp2Class};
use crate::error::{Error, Result};
use crate::mixing::MixingDistribution;
use crate::mixture::ResidualMixture;
use crate::numerics::{Grid, QuadOptions};

/// The pair `(X*, Θ)` carried by a residual mixture.
#[derive(Debug, Clone)]
pub struct JointAgeModel {
    mx: ResidualMixture,
}

impl JointAgeModel {
    pub fn new(mx: ResidualMixture) -> Self {
        JointAgeModel { mx }
    }

    pub fn mixture(&self) -> &ResidualMixture {
        &self.mx
    }

    fn mixing(&self) -> &MixingDistribution {
        self.mx.mixing()
    }

    /// `f(x + θ) h(θ) / F̄(θ)`.
    pub fn joint_pdf(&self, x: f64, theta: f64) -> Result<f64> {
        if self.mixing().is_discrete() {
            return Err(Error::Unsupported(
                "joint density needs a continuous age distribution".into(),
            ));
        }
        let base = self.mx.baseline();
        if !base.has_density() {
            return Err(Error::Unsupported(format!("{} has no density", base.label())));
        }
        if x < 0.0 || theta < 0.0 {
            return Ok(0.0);
        }
        let den = base.ln_sf(theta);
        if den == f64::NEG_INFINITY {
            return Err(Error::domain("joint_pdf", theta, "baseline sf is zero at this age"));
        }
        let h = self.mixing().density(theta);
        if h == 0.0 {
            return Ok(0.0);
        }
        Ok(h * (base.ln_pdf(x + theta) - den).exp())
    }

    /// `P(X* > x, Θ ≥ θ)`.
    pub fn joint_sf(&self, x: f64, theta: f64) -> Result<f64> {
        let opts = QuadOptions::relative(self.mx.tolerance());
        let x = x.max(0.0);
        let v = self.mixing().expect_over(
            |w| Ok(self.mx.ln_ratio(x, w).exp()),
            theta.max(0.0),
            f64::INFINITY,
            &opts,
        )?;
        Ok(v.clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependenceKind {
    /// Likelihood-ratio dependence of the joint density.
    Lrd,
    /// Stochastic monotonicity of `X*` given `Θ = θ`.
    Si,
    /// Right-corner-set monotonicity of the joint survival function.
    Rcsi,
}

impl DependenceKind {
    /// Names of the positive and negative forms.
    pub fn names(self) -> (&'static str, &'static str) {
        match self {
            DependenceKind::Lrd => ("PLRD", "NLRD"),
            DependenceKind::Si => ("SI", "SD"),
            DependenceKind::Rcsi => ("RCSI", "RCSD"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependenceSign {
    Positive,
    Negative,
    /// Both forms hold, as under independence.
    Both,
    Neither,
}

impl From<Tp2Class> for DependenceSign {
    fn from(c: Tp2Class) -> Self {
        match c {
            Tp2Class::Tp2 => DependenceSign::Positive,
            Tp2Class::Rr2 => DependenceSign::Negative,
            Tp2Class::Both => DependenceSign::Both,
            Tp2Class::Neither => DependenceSign::Neither,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceVerdict {
    pub kind: DependenceKind,
    pub sign: DependenceSign,
    /// Smallest and largest statistic: normalized minors, or steps in `θ`.
    pub min_stat: f64,
    pub max_stat: f64,
    /// Where the positive form breaks.
    pub positive_witness: Option<Vec<f64>>,
    /// Where the negative form breaks.
    pub negative_witness: Option<Vec<f64>>,
    pub tol: f64,
}

impl DependenceVerdict {
    pub fn is_positive(&self) -> bool {
        matches!(self.sign, DependenceSign::Positive | DependenceSign::Both)
    }

    pub fn is_negative(&self) -> bool {
        matches!(self.sign, DependenceSign::Negative | DependenceSign::Both)
    }

    /// The name of the form that holds: `PLRD`, `SD`, `both`, `neither` and so on.
    pub fn label(&self) -> &'static str {
        let (pos, neg) = self.kind.names();
        match self.sign {
            DependenceSign::Positive => pos,
            DependenceSign::Negative => neg,
            DependenceSign::Both => "both",
            DependenceSign::Neither => "neither",
        }
    }
}

impl fmt::Display for DependenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{:.3e}, {:.3e}]", self.label(), self.min_stat, self.max_stat)
    }
}

fn tp2_verdict<F>(kind: DependenceKind, beta: F, xgrid: &Grid, tgrid: &Grid, tol: f64) -> Result<DependenceVerdict>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let v = check_tp2_rr2(beta, xgrid, tgrid, tol)?;
    Ok(DependenceVerdict {
        kind,
        sign: v.class.into(),
        min_stat: v.min_minor,
        max_stat: v.max_minor,
        positive_witness: v.tp2_witness,
        negative_witness: v.rr2_witness,
        tol,
    })
}

/// TP2 (PLRD) or RR2 (NLRD) of the joint density over `xgrid × tgrid`.
pub fn check_plrd_nlrd(jm: &JointAgeModel, xgrid: &Grid, tgrid: &Grid, tol: f64) -> Result<DependenceVerdict> {
    tp2_verdict(DependenceKind::Lrd, |x, t| jm.joint_pdf(x, t), xgrid, tgrid, tol)
}

/// TP2 (RCSI) or RR2 (RCSD) of the joint survival function.
pub fn check_rcsi_rcsd(jm: &JointAgeModel, xgrid: &Grid, tgrid: &Grid, tol: f64) -> Result<DependenceVerdict> {
    tp2_verdict(DependenceKind::Rcsi, |x, t| jm.joint_sf(x, t), xgrid, tgrid, tol)
}

/// Monotonicity in `θ` of `F̄(x + θ) / F̄(θ)` for every `x` on `xgrid`.
pub fn check_si_sd(jm: &JointAgeModel, xgrid: &Grid, tgrid: &Grid, tol: f64) -> Result<DependenceVerdict> {
    let base = jm.mixture().baseline();
    let ts = tgrid.abscissas();
    if let Some(&t) = ts.iter().find(|&&t| !(base.sf(t) > 0.0)) {
        return Err(Error::domain("si_sd", t, "baseline sf is zero at this age"));
    }
    let xs = xgrid.abscissas();
    let rows: Vec<(f64, Vec<f64>)> = xs
        .par_iter()
        .map(|&x| (x, ts.iter().map(|&t| jm.mixture().ln_ratio(x, t).exp()).collect()))
        .collect();

    let mut min = (f64::INFINITY, None);
    let mut max = (f64::NEG_INFINITY, None);
    for (x, row) in &rows {
        for j in 1..row.len() {
            let step = row[j] - row[j - 1];
            let at = Some(vec![*x, ts[j - 1], ts[j]]);
            if step < min.0 {
                min = (step, at.clone());
            }
            if step > max.0 {
                max = (step, at);
            }
        }
    }
    let pos = min.0 >= -tol;
    let neg = max.0 <= tol;
    let sign = match (pos, neg) {
        (true, true) => DependenceSign::Both,
        (true, false) => DependenceSign::Positive,
        (false, true) => DependenceSign::Negative,
        (false, false) => DependenceSign::Neither,
    };
    Ok(DependenceVerdict {
        kind: DependenceKind::Si,
        sign,
        min_stat: min.0,
        max_stat: max.0,
        positive_witness: if pos { None } else { min.1 },
        negative_witness: if neg { None } else { max.1 },
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::LifetimeDistribution as D;
    use crate::numerics::{integrate_finite, integrate_semi_infinite};
    use proptest::prelude::*;

    fn exp_mixing() -> MixingDistribution {
        MixingDistribution::continuous(D::exponential(1.0).unwrap()).unwrap()
    }

    fn model(base: D) -> JointAgeModel {
        JointAgeModel::new(ResidualMixture::new(base, exp_mixing()).unwrap())
    }

    fn hyper() -> D {
        D::hyper_exponential(vec![0.25, 0.75], vec![1.0, 2.0]).unwrap()
    }

    fn grids() -> (Grid, Grid) {
        (Grid::uniform(1e-3, 3.0, 20).unwrap(), Grid::uniform(0.0, 3.0, 20).unwrap())
    }

    #[test]
    fn joint_pdf_examples() {
        let jm = model(D::exponential(2.0).unwrap());
        for (x, t) in [(0.3f64, 0.2f64), (1.0, 2.5), (4.0, 0.0)] {
            let want = 2.0 * (-2.0 * x).exp() * (-t).exp();
            assert!((jm.joint_pdf(x, t).unwrap() - want).abs() < 1e-14);
        }
        let w = D::weibull(2.0, 1.0 / 5f64.sqrt()).unwrap();
        let jm = model(w.clone());
        let v = jm.joint_pdf(0.0, 1.0).unwrap();
        assert!((v - 10.0 * (-1f64).exp()).abs() < 1e-12, "{v}");
        let t = 0.7f64;
        assert!((jm.joint_pdf(0.0, t).unwrap() - w.hazard(t) * (-t).exp()).abs() < 1e-12);
    }

    #[test]
    fn discrete_mixing_has_no_joint_density() {
        let mx = ResidualMixture::new(hyper(), MixingDistribution::degenerate(1.0).unwrap()).unwrap();
        let jm = JointAgeModel::new(mx);
        assert!(matches!(jm.joint_pdf(0.5, 1.0), Err(Error::Unsupported(_))));
        assert!(jm.joint_sf(0.5, 0.5).unwrap() > 0.0);
    }

    #[test]
    fn joint_sf_marginals() {
        let jm = model(hyper());
        for x in [0.0, 0.4, 2.0] {
            let want = jm.mixture().sf(x).unwrap();
            assert!((jm.joint_sf(x, 0.0).unwrap() - want).abs() < 1e-9);
        }
        for t in [0.0, 0.5, 3.0] {
            assert!((jm.joint_sf(0.0, t).unwrap() - (-t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn marginal_consistency() {
        let jm = model(D::weibull(2.0, 1.0).unwrap());
        for i in 0..10 {
            let x = 0.05 + 0.3 * i as f64;
            let integral = integrate_semi_infinite(|t| jm.joint_pdf(x, t).unwrap(), 1e-10).unwrap().value;
            let want = jm.mixture().pdf(x).unwrap();
            assert!((integral - want).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn joint_density_has_unit_mass() {
        let jm = model(hyper());
        let inner = |t: f64| integrate_semi_infinite(|x| jm.joint_pdf(x, t).unwrap(), 1e-11).unwrap().value;
        let total = integrate_finite(inner, 0.0, 40.0, 1e-10).unwrap().value;
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn exponential_baseline_factorizes() {
        let jm = model(D::exponential(1.5).unwrap());
        let (xg, tg) = grids();
        let mut worst: f64 = 0.0;
        for x in xg.abscissas() {
            for t in tg.abscissas() {
                let prod = jm.mixture().sf(x).unwrap() * (-t).exp();
                worst = worst.max((jm.joint_sf(x, t).unwrap() - prod).abs());
            }
        }
        assert!(worst < 1e-6, "{worst}");
        assert_eq!(check_plrd_nlrd(&jm, &xg, &tg, 1e-6).unwrap().sign, DependenceSign::Both);
        assert_eq!(check_si_sd(&jm, &xg, &tg, 1e-6).unwrap().sign, DependenceSign::Both);
        let rc = check_rcsi_rcsd(&jm, &xg, &tg, 1e-6).unwrap();
        assert_eq!(rc.sign, DependenceSign::Both, "{rc}");
    }

    #[test]
    fn hyperexponential_is_positively_dependent() {
        let jm = model(hyper());
        let (xg, tg) = grids();
        assert_eq!(check_plrd_nlrd(&jm, &xg, &tg, 1e-6).unwrap().label(), "PLRD");
        assert_eq!(check_si_sd(&jm, &xg, &tg, 1e-6).unwrap().label(), "SI");
        assert_eq!(check_rcsi_rcsd(&jm, &xg, &tg, 1e-6).unwrap().label(), "RCSI");
    }

    #[test]
    fn weibull_is_negatively_dependent() {
        let jm = model(D::weibull(2.0, 1.0).unwrap());
        let (xg, tg) = grids();
        let v = check_plrd_nlrd(&jm, &xg, &tg, 1e-6).unwrap();
        assert_eq!(v.label(), "NLRD");
        assert!(v.positive_witness.is_some());
        assert_eq!(check_si_sd(&jm, &xg, &tg, 1e-6).unwrap().label(), "SD");
        assert_eq!(check_rcsi_rcsd(&jm, &xg, &tg, 1e-6).unwrap().label(), "RCSD");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn joint_sf_nonincreasing(x in 0.0f64..3.0, t in 0.0f64..3.0, dx in 0.01f64..1.0, dt in 0.01f64..1.0) {
            let jm = model(hyper());
            let base = jm.joint_sf(x, t).unwrap();
            prop_assert!(jm.joint_sf(x + dx, t).unwrap() <= base + 1e-12);
            prop_assert!(jm.joint_sf(x, t + dt).unwrap() <= base + 1e-12);
        }
    }
}
