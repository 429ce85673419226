//! Aging classes, log-concavity and total positivity of order two.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SurvivalModel;
use crate::numerics::{Direction, Grid};
use crate::orders::{keep, positive_ln, sample, scan_monotone, scan_pointwise, Outcome, Scan};

/// Largest grid used for the two-dimensional NBU/NWU scan.
pub const NBU_GRID_POINTS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgingClass {
    ILR,
    DLR,
    IFR,
    DFR,
    DMRL,
    IMRL,
    NBU,
    NWU,
    NBUE,
    NWUE,
}

impl AgingClass {
    pub const ALL: [AgingClass; 10] = [
        AgingClass::ILR,
        AgingClass::DLR,
        AgingClass::IFR,
        AgingClass::DFR,
        AgingClass::DMRL,
        AgingClass::IMRL,
        AgingClass::NBU,
        AgingClass::NWU,
        AgingClass::NBUE,
        AgingClass::NWUE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgingClass::ILR => "ILR",
            AgingClass::DLR => "DLR",
            AgingClass::IFR => "IFR",
            AgingClass::DFR => "DFR",
            AgingClass::DMRL => "DMRL",
            AgingClass::IMRL => "IMRL",
            AgingClass::NBU => "NBU",
            AgingClass::NWU => "NWU",
            AgingClass::NBUE => "NBUE",
            AgingClass::NWUE => "NWUE",
        }
    }

    /// The class with the opposite direction.
    pub fn dual(self) -> AgingClass {
        match self {
            AgingClass::ILR => AgingClass::DLR,
            AgingClass::DLR => AgingClass::ILR,
            AgingClass::IFR => AgingClass::DFR,
            AgingClass::DFR => AgingClass::IFR,
            AgingClass::DMRL => AgingClass::IMRL,
            AgingClass::IMRL => AgingClass::DMRL,
            AgingClass::NBU => AgingClass::NWU,
            AgingClass::NWU => AgingClass::NBU,
            AgingClass::NBUE => AgingClass::NWUE,
            AgingClass::NWUE => AgingClass::NBUE,
        }
    }
}

impl fmt::Display for AgingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgingClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AgingClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown aging class `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub cls: AgingClass,
    pub outcome: Outcome,
    /// A point `[x]`, a step `[x_prev, x]`, or a pair `[x, y]` for NBU/NWU.
    pub witness: Option<Vec<f64>>,
    pub max_violation: f64,
    pub grid: Grid,
    pub tol: f64,
    pub excluded: usize,
}

impl ClassVerdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn fails(&self) -> bool {
        self.outcome == Outcome::Fails
    }
}

/// Slopes of `values` between retained neighbours, placed at the right end.
fn slopes(xs: &[f64], values: &[Option<f64>]) -> (Vec<f64>, Vec<Option<f64>>) {
    let mut sx = Vec::with_capacity(xs.len().saturating_sub(1));
    let mut sv = Vec::with_capacity(xs.len().saturating_sub(1));
    for i in 1..xs.len() {
        sx.push(xs[i]);
        sv.push(match (values[i - 1], values[i]) {
            (Some(a), Some(b)) => Some((b - a) / (xs[i] - xs[i - 1])),
            _ => None,
        });
    }
    (sx, sv)
}

/// Checks membership of `dist` in `cls` on `grid`.
pub fn check_aging_class(
    dist: &dyn SurvivalModel,
    cls: AgingClass,
    grid: &Grid,
    tol: f64,
) -> Result<ClassVerdict> {
    let xs = grid.abscissas();
    use AgingClass::*;
    let scan: Scan = match cls {
        ILR | DLR => {
            let lp = sample(&xs, |x| positive_ln(dist.pdf(x)))?;
            let (sx, sv) = slopes(&xs, &lp);
            let dir = if cls == ILR { Direction::Decreasing } else { Direction::Increasing };
            let mut s = scan_monotone(&sx, &sv, dir, tol);
            s.excluded = lp.iter().filter(|v| v.is_none()).count();
            s
        }
        IFR | DFR => {
            let h = sample(&xs, |x| dist.hazard(x))?;
            let dir = if cls == IFR { Direction::Increasing } else { Direction::Decreasing };
            scan_monotone(&xs, &h, dir, tol)
        }
        DMRL | IMRL => {
            let m = dist.mrl_on(&xs).into_iter().map(keep).collect::<Result<Vec<_>>>()?;
            let dir = if cls == IMRL { Direction::Increasing } else { Direction::Decreasing };
            scan_monotone(&xs, &m, dir, tol)
        }
        NBU | NWU => {
            let coarse = grid.coarsen(NBU_GRID_POINTS);
            let pts = coarse.abscissas();
            let sf = sample(&pts, |x| dist.sf(x))?;
            let pairs: Vec<(usize, usize)> = (0..pts.len())
                .flat_map(|i| (i..pts.len()).map(move |j| (i, j)))
                .collect();
            let diffs = pairs
                .par_iter()
                .map(|&(i, j)| -> Result<Option<f64>> {
                    let joint = keep(dist.sf(pts[i] + pts[j]))?;
                    Ok(match (joint, sf[i], sf[j]) {
                        (Some(s), Some(a), Some(b)) => {
                            let d = s - a * b;
                            Some(if cls == NBU { d } else { -d })
                        }
                        _ => None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let firsts: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let mut s = scan_pointwise(&firsts, &diffs, tol);
            if let Some(w) = s.witness.as_mut() {
                let idx = pairs
                    .iter()
                    .zip(&diffs)
                    .filter_map(|(p, d)| d.map(|d| (p, d)))
                    .fold((pairs[0], f64::NEG_INFINITY), |acc, (p, d)| {
                        if d > acc.1 { (*p, d) } else { acc }
                    })
                    .0;
                *w = vec![pts[idx.0], pts[idx.1]];
            }
            return Ok(ClassVerdict {
                cls,
                outcome: s.outcome,
                witness: s.witness,
                max_violation: s.max_violation,
                grid: coarse,
                tol,
                excluded: s.excluded,
            });
        }
        NBUE | NWUE => {
            let mean = dist.mean()?;
            let m = dist.mrl_on(&xs).into_iter().map(keep).collect::<Result<Vec<_>>>()?;
            let diffs: Vec<Option<f64>> = m
                .iter()
                .map(|v| v.map(|v| if cls == NBUE { v - mean } else { mean - v }))
                .collect();
            scan_pointwise(&xs, &diffs, tol)
        }
    };
    Ok(ClassVerdict {
        cls,
        outcome: scan.outcome,
        witness: scan.witness,
        max_violation: scan.max_violation,
        grid: *grid,
        tol,
        excluded: scan.excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogShape {
    LogConcave,
    LogConvex,
    Neither,
    Both,
}

/// Classifies a positive function by the slopes of its logarithm.
pub fn check_log_concavity<F>(f: F, grid: &Grid, tol: f64) -> Result<LogShape>
where
    F: Fn(f64) -> f64 + Sync,
{
    let xs = grid.abscissas();
    let lv: Vec<Option<f64>> = xs.par_iter().map(|&x| Some(f(x).ln())).collect();
    for (x, v) in xs.iter().zip(&lv) {
        if !v.is_some_and(f64::is_finite) {
            return Err(Error::domain("log_concavity", *x, "function must be positive"));
        }
    }
    let (sx, sv) = slopes(&xs, &lv);
    let concave = scan_monotone(&sx, &sv, Direction::Decreasing, tol).outcome == Outcome::Holds;
    let convex = scan_monotone(&sx, &sv, Direction::Increasing, tol).outcome == Outcome::Holds;
    Ok(match (concave, convex) {
        (true, true) => LogShape::Both,
        (true, false) => LogShape::LogConcave,
        (false, true) => LogShape::LogConvex,
        (false, false) => LogShape::Neither,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tp2Class {
    Tp2,
    Rr2,
    Both,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tp2Verdict {
    pub class: Tp2Class,
    /// Extremes of the normalized adjacent minors.
    pub min_minor: f64,
    pub max_minor: f64,
    /// `[x1, x2, y1, y2]` of the most negative minor.
    pub tp2_witness: Option<Vec<f64>>,
    /// `[x1, x2, y1, y2]` of the most positive minor.
    pub rr2_witness: Option<Vec<f64>>,
    pub tol: f64,
}

impl Tp2Verdict {
    pub fn is_tp2(&self) -> bool {
        matches!(self.class, Tp2Class::Tp2 | Tp2Class::Both)
    }

    pub fn is_rr2(&self) -> bool {
        matches!(self.class, Tp2Class::Rr2 | Tp2Class::Both)
    }
}

/// Adjacent 2×2 minors `β(x1,y1)β(x2,y2) − β(x1,y2)β(x2,y1)`, each divided by
/// `β(x1,y1)β(x2,y2)` when that product is positive.
pub fn check_tp2_rr2<F>(beta: F, xgrid: &Grid, ygrid: &Grid, tol: f64) -> Result<Tp2Verdict>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let xs = xgrid.abscissas();
    let ys = ygrid.abscissas();
    let table = xs
        .par_iter()
        .map(|&x| {
            ys.iter()
                .map(|&y| {
                    let v = beta(x, y)?;
                    if !(v >= 0.0) {
                        return Err(Error::domain("tp2", x, format!("kernel is {v} at y = {y}")));
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut min = (f64::INFINITY, None);
    let mut max = (f64::NEG_INFINITY, None);
    for i in 0..xs.len() - 1 {
        for j in 0..ys.len() - 1 {
            let (a, b, c, d) = (table[i][j], table[i + 1][j + 1], table[i][j + 1], table[i + 1][j]);
            let minor = if a > 0.0 && b > 0.0 {
                if c > 0.0 && d > 0.0 {
                    let delta = a.ln() + b.ln() - c.ln() - d.ln();
                    -(-delta).exp_m1()
                } else {
                    1.0
                }
            } else {
                a * b - c * d
            };
            let at = Some(vec![xs[i], xs[i + 1], ys[j], ys[j + 1]]);
            if minor < min.0 {
                min = (minor, at.clone());
            }
            if minor > max.0 {
                max = (minor, at);
            }
        }
    }
    let tp2 = min.0 >= -tol;
    let rr2 = max.0 <= tol;
    let class = match (tp2, rr2) {
        (true, true) => Tp2Class::Both,
        (true, false) => Tp2Class::Tp2,
        (false, true) => Tp2Class::Rr2,
        (false, false) => Tp2Class::Neither,
    };
    Ok(Tp2Verdict {
        class,
        min_minor: min.0,
        max_minor: max.0,
        tp2_witness: if tp2 { None } else { min.1 },
        rr2_witness: if rr2 { None } else { max.1 },
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::LifetimeDistribution as D;
    use crate::mixing::MixingDistribution;
    use crate::mixture::ResidualMixture;
    use crate::numerics::DEFAULT_CHECK_TOL;

    fn weibull2() -> D {
        D::weibull(2.0, 1.0).unwrap()
    }

    fn hyper() -> D {
        D::hyper_exponential(vec![0.25, 0.75], vec![1.0, 2.0]).unwrap()
    }

    fn wgrid() -> Grid {
        Grid::uniform(1e-3, 3.0, 400).unwrap()
    }

    fn check(d: &dyn SurvivalModel, c: AgingClass, g: &Grid) -> ClassVerdict {
        check_aging_class(d, c, g, DEFAULT_CHECK_TOL).unwrap()
    }

    #[test]
    fn class_examples() {
        assert!(check(&weibull2(), AgingClass::IFR, &wgrid()).holds());
        let dfr = check(&weibull2(), AgingClass::DFR, &wgrid());
        assert!(dfr.fails() && dfr.witness.is_some());
        assert!(check(&hyper(), AgingClass::DFR, &Grid::default_check()).holds());
        let ll = D::log_logistic(2.0, 1.0).unwrap();
        assert!(check(&ll, AgingClass::IFR, &Grid::default_check()).fails());
        assert!(check(&ll, AgingClass::DFR, &Grid::default_check()).fails());
        let e = D::exponential(1.0).unwrap();
        for c in AgingClass::ALL {
            assert!(check(&e, c, &Grid::default_check()).holds(), "{c}");
        }
    }

    #[test]
    fn ce51_mixture_is_not_dmrl() {
        let m = ResidualMixture::new(
            D::weibull(2.0, 1.0 / 5f64.sqrt()).unwrap(),
            MixingDistribution::continuous(D::exponential(1.0).unwrap()).unwrap(),
        )
        .unwrap();
        let v = check(&m, AgingClass::DMRL, &Grid::uniform(1e-3, 1.5, 400).unwrap());
        assert!(v.fails());
        let w = v.witness.unwrap();
        assert!(w[1] < 0.05, "{w:?}");
    }

    #[test]
    fn implication_chains() {
        let families: Vec<(D, Grid)> = vec![
            (weibull2(), wgrid()),
            (D::weibull(2.0, 1.0 / 5f64.sqrt()).unwrap(), Grid::uniform(1e-3, 1.5, 300).unwrap()),
            (D::weibull(0.7, 1.0).unwrap(), Grid::default_check()),
            (hyper(), Grid::default_check()),
            (D::exponential(1.3).unwrap(), Grid::default_check()),
            (D::log_logistic(2.0, 1.0).unwrap(), Grid::default_check()),
            (D::log_logistic(4.0, 1.0).unwrap(), Grid::default_check()),
            (D::gompertz(0.5, 0.4).unwrap(), Grid::uniform(1e-3, 6.0, 300).unwrap()),
        ];
        use AgingClass::*;
        let chains = [[ILR, IFR, DMRL, NBUE], [DLR, DFR, IMRL, NWUE]];
        for (d, g) in &families {
            for chain in &chains {
                let verdicts: Vec<bool> = chain.iter().map(|&c| check(d, c, g).holds()).collect();
                for k in 0..3 {
                    if verdicts[k] {
                        assert!(verdicts[k + 1], "{d}: {} without {}", chain[k], chain[k + 1]);
                    }
                }
            }
            if check(d, IFR, g).holds() {
                assert!(check(d, NBU, g).holds(), "{d}");
            }
            if check(d, DFR, g).holds() {
                assert!(check(d, NWU, g).holds(), "{d}");
            }
        }
    }

    #[test]
    fn log_concavity_examples() {
        let g = Grid::uniform(1e-3, 5.0, 200).unwrap();
        assert_eq!(check_log_concavity(|t| (-t).exp(), &g, 1e-9).unwrap(), LogShape::Both);
        assert_eq!(check_log_concavity(|t| (-t * t).exp(), &g, 1e-9).unwrap(), LogShape::LogConcave);
        assert_eq!(check_log_concavity(|t| (t * t).exp(), &g, 1e-9).unwrap(), LogShape::LogConvex);
        let h = hyper();
        let shape = check_log_concavity(|t| h.hazard(t), &Grid::default_check(), 1e-9).unwrap();
        assert_eq!(shape, LogShape::Neither);
        assert!(check_log_concavity(|t| t - 1.0, &g, 1e-9).is_err());
    }

    #[test]
    fn tp2_examples() {
        let g = Grid::uniform(0.0, 3.0, 30).unwrap();
        let v = check_tp2_rr2(|x, y| Ok((x * y).exp()), &g, &g, 1e-9).unwrap();
        assert_eq!(v.class, Tp2Class::Tp2);
        assert!(v.rr2_witness.is_some());
        let v = check_tp2_rr2(|x, y| Ok((-x * y).exp()), &g, &g, 1e-9).unwrap();
        assert_eq!(v.class, Tp2Class::Rr2);
        let v = check_tp2_rr2(|x, y| Ok(x.exp() * y.exp()), &g, &g, 1e-9).unwrap();
        assert_eq!(v.class, Tp2Class::Both);
        let h = hyper();
        let v = check_tp2_rr2(|x, w| Ok(h.sf(x + w)), &g, &g, 1e-12).unwrap();
        assert_eq!(v.class, Tp2Class::Tp2);
        assert!(check_tp2_rr2(|x, y| Ok(x - y), &g, &g, 1e-9).is_err());
    }

    #[test]
    fn nbu_nwu_both_for_exponential() {
        let e = D::exponential(0.7).unwrap();
        let g = Grid::default_check();
        let nbu = check(&e, AgingClass::NBU, &g);
        let nwu = check(&e, AgingClass::NWU, &g);
        assert!(nbu.holds() && nwu.holds());
        assert!(nbu.max_violation < 1e-12);
    }

    #[test]
    fn class_names_round_trip() {
        for c in AgingClass::ALL {
            assert_eq!(c.name().parse::<AgingClass>().unwrap(), c);
            assert_eq!(c.dual().dual(), c);
        }
    }
}
