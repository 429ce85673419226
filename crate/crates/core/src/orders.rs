//! Grid checks of stochastic orders `X ≤ Y`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SurvivalModel;
use crate::numerics::{is_monotone, Direction, Grid, Spacing};

/// Tolerance floor for likelihood-ratio checks on quadrature densities.
pub const LR_QUADRATURE_TOL: f64 = 1e-5;

/// Share of excluded grid points above which a verdict is inconclusive.
pub const MAX_EXCLUDED_SHARE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OrderKind {
    Lr,
    Hr,
    Rh,
    St,
    Mrl,
    Ai,
    UpLr,
    UpHr,
    UpMrl,
}

impl OrderKind {
    pub const ALL: [OrderKind; 9] = [
        OrderKind::Lr,
        OrderKind::Hr,
        OrderKind::Rh,
        OrderKind::St,
        OrderKind::Mrl,
        OrderKind::Ai,
        OrderKind::UpLr,
        OrderKind::UpHr,
        OrderKind::UpMrl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderKind::Lr => "LR",
            OrderKind::Hr => "HR",
            OrderKind::Rh => "RH",
            OrderKind::St => "ST",
            OrderKind::Mrl => "MRL",
            OrderKind::Ai => "AI",
            OrderKind::UpLr => "UP_LR",
            OrderKind::UpHr => "UP_HR",
            OrderKind::UpMrl => "UP_MRL",
        }
    }

    pub fn is_upshifted(self) -> bool {
        matches!(self, OrderKind::UpLr | OrderKind::UpHr | OrderKind::UpMrl)
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OrderKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown order `{s}`")))
    }
}

/// Result of a grid check. `Holds` means no violation above `tol` was seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub kind: OrderKind,
    pub outcome: Outcome,
    /// `[x]` for pointwise orders, `[x_prev, x]` for ratio monotonicity,
    /// `[t, x]` for up-shifted orders.
    pub witness: Option<Vec<f64>>,
    pub max_violation: f64,
    pub grid: Grid,
    pub tol: f64,
    pub excluded: usize,
}

impl OrderVerdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn fails(&self) -> bool {
        self.outcome == Outcome::Fails
    }
}

/// Evaluates `f` on every abscissa; domain errors and non-finite values
/// become exclusions, other errors abort.
pub(crate) fn sample<F>(xs: &[f64], f: F) -> Result<Vec<Option<f64>>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    xs.par_iter()
        .map(|&x| keep(f(x)))
        .collect::<Result<Vec<_>>>()
}

pub(crate) fn keep(v: Result<f64>) -> Result<Option<f64>> {
    match v {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) | Err(Error::Domain { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn too_many_excluded(excluded: usize, total: usize) -> bool {
    excluded as f64 > MAX_EXCLUDED_SHARE * total as f64
}

pub(crate) struct Scan {
    pub outcome: Outcome,
    pub witness: Option<Vec<f64>>,
    pub max_violation: f64,
    pub excluded: usize,
}

/// Monotonicity of `values` over the retained abscissas.
pub(crate) fn scan_monotone(xs: &[f64], values: &[Option<f64>], dir: Direction, tol: f64) -> Scan {
    let kept: Vec<(f64, f64)> = xs
        .iter()
        .zip(values)
        .filter_map(|(&x, v)| v.map(|v| (x, v)))
        .collect();
    let excluded = xs.len() - kept.len();
    if too_many_excluded(excluded, xs.len()) || kept.len() < 2 {
        return Scan {
            outcome: Outcome::Inconclusive,
            witness: None,
            max_violation: 0.0,
            excluded,
        };
    }
    let vals: Vec<f64> = kept.iter().map(|p| p.1).collect();
    let v = is_monotone(&vals, dir, tol);
    let (outcome, witness) = if v.holds {
        (Outcome::Holds, None)
    } else {
        let i = v.max_index.expect("a violation was recorded");
        (Outcome::Fails, Some(vec![kept[i - 1].0, kept[i].0]))
    };
    Scan {
        outcome,
        witness,
        max_violation: v.max_violation,
        excluded,
    }
}

/// Pointwise `diffs <= tol`, where each diff measures a violation.
pub(crate) fn scan_pointwise(xs: &[f64], diffs: &[Option<f64>], tol: f64) -> Scan {
    let excluded = diffs.iter().filter(|d| d.is_none()).count();
    if too_many_excluded(excluded, xs.len()) {
        return Scan {
            outcome: Outcome::Inconclusive,
            witness: None,
            max_violation: 0.0,
            excluded,
        };
    }
    let mut worst = 0.0;
    let mut at = None;
    for (&x, d) in xs.iter().zip(diffs) {
        if let Some(d) = d {
            if *d > worst {
                worst = *d;
                at = Some(x);
            }
        }
    }
    let fails = worst > tol;
    Scan {
        outcome: if fails { Outcome::Fails } else { Outcome::Holds },
        witness: if fails { at.map(|x| vec![x]) } else { None },
        max_violation: worst,
        excluded,
    }
}

fn combine(a: Vec<Option<f64>>, b: Vec<Option<f64>>, op: impl Fn(f64, f64) -> f64) -> Vec<Option<f64>> {
    a.into_iter()
        .zip(b)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => Some(op(a, b)).filter(|v| v.is_finite()),
            _ => None,
        })
        .collect()
}

pub(crate) fn positive_ln(v: Result<f64>) -> Result<f64> {
    let v = v?;
    Ok(if v > 0.0 { v.ln() } else { f64::NAN })
}

/// Checks `X ≤_kind Y` on `grid`.
pub fn check_order(
    x: &dyn SurvivalModel,
    y: &dyn SurvivalModel,
    kind: OrderKind,
    grid: &Grid,
    tol: f64,
) -> Result<OrderVerdict> {
    if kind.is_upshifted() {
        return Err(Error::InvalidParameter(format!(
            "{kind} needs check_upshifted_order"
        )));
    }
    let xs = grid.abscissas();
    let mut tol = tol;
    let scan = match kind {
        OrderKind::Lr => {
            if !(x.is_closed_form() && y.is_closed_form()) {
                tol = tol.max(LR_QUADRATURE_TOL);
            }
            let fx = sample(&xs, |t| positive_ln(x.pdf(t)))?;
            let fy = sample(&xs, |t| positive_ln(y.pdf(t)))?;
            scan_monotone(&xs, &combine(fy, fx, |a, b| a - b), Direction::Increasing, tol)
        }
        OrderKind::Hr => {
            let rx = sample(&xs, |t| x.hazard(t))?;
            let ry = sample(&xs, |t| y.hazard(t))?;
            scan_pointwise(&xs, &combine(ry, rx, |a, b| a - b), tol)
        }
        OrderKind::Rh => {
            let rx = sample(&xs, |t| x.reversed_hazard(t))?;
            let ry = sample(&xs, |t| y.reversed_hazard(t))?;
            scan_pointwise(&xs, &combine(rx, ry, |a, b| a - b), tol)
        }
        OrderKind::St => {
            let sx = sample(&xs, |t| x.sf(t))?;
            let sy = sample(&xs, |t| y.sf(t))?;
            scan_pointwise(&xs, &combine(sx, sy, |a, b| a - b), tol)
        }
        OrderKind::Mrl => {
            let mx = x.mrl_on(&xs).into_iter().map(keep).collect::<Result<Vec<_>>>()?;
            let my = y.mrl_on(&xs).into_iter().map(keep).collect::<Result<Vec<_>>>()?;
            scan_pointwise(&xs, &combine(mx, my, |a, b| a - b), tol)
        }
        OrderKind::Ai => {
            let lx = sample(&xs, |t| x.cumulative_hazard(t))?;
            let ly = sample(&xs, |t| y.cumulative_hazard(t))?;
            let ratio = combine(lx, ly, |a, b| if b > 0.0 { a / b } else { f64::NAN });
            scan_monotone(&xs, &ratio, Direction::Increasing, tol)
        }
        _ => unreachable!("up-shifted kinds are rejected above"),
    };
    Ok(OrderVerdict {
        kind,
        outcome: scan.outcome,
        witness: scan.witness,
        max_violation: scan.max_violation,
        grid: *grid,
        tol,
        excluded: scan.excluded,
    })
}

/// Default `t` grid for up-shifted orders.
pub fn default_tgrid() -> Grid {
    Grid::new(1e-3, 10.0, 60, Spacing::Uniform).expect("valid constant grid")
}

/// Default shift grid for up-shifted orders.
pub fn default_xgrid() -> Grid {
    Grid::new(0.0, 5.0, 20, Spacing::Uniform).expect("valid constant grid")
}

/// Checks `X ≤_{kind} Y` for an up-shifted kind: for every shift `x`, the
/// ratio `q_X(t + x) / q_Y(t)` must decrease in `t`, with `q` the density,
/// survival function or integrated survival function.
pub fn check_upshifted_order(
    x: &dyn SurvivalModel,
    y: &dyn SurvivalModel,
    kind: OrderKind,
    tgrid: &Grid,
    xgrid: &Grid,
    tol: f64,
) -> Result<OrderVerdict> {
    let q = |m: &dyn SurvivalModel, t: f64| -> Result<f64> {
        match kind {
            OrderKind::UpLr => positive_ln(m.pdf(t)),
            OrderKind::UpHr => m.ln_sf(t),
            OrderKind::UpMrl => positive_ln(m.integrated_sf(t)),
            _ => Err(Error::InvalidParameter(format!("{kind} is not an up-shifted order"))),
        }
    };
    if !kind.is_upshifted() {
        return Err(Error::InvalidParameter(format!("{kind} is not an up-shifted order")));
    }
    let mut tol = tol;
    if kind == OrderKind::UpLr && !(x.is_closed_form() && y.is_closed_form()) {
        tol = tol.max(LR_QUADRATURE_TOL);
    }
    let ts = tgrid.abscissas();
    let shifts = xgrid.abscissas();
    let den = sample(&ts, |t| q(y, t))?;

    let rows = shifts
        .par_iter()
        .map(|&s| -> Result<(f64, Scan)> {
            let num = sample(&ts, |t| q(x, t + s))?;
            let ratio = combine(num, den.clone(), |a, b| a - b);
            Ok((s, scan_monotone(&ts, &ratio, Direction::Decreasing, tol)))
        })
        .collect::<Result<Vec<_>>>()?;

    let excluded = rows.iter().map(|r| r.1.excluded).sum::<usize>();
    let total = ts.len() * shifts.len();
    let mut worst = 0.0;
    let mut witness = None;
    let mut inconclusive = too_many_excluded(excluded, total);
    for (s, scan) in &rows {
        if scan.outcome == Outcome::Inconclusive {
            inconclusive = true;
        }
        if scan.max_violation > worst {
            worst = scan.max_violation;
            if scan.outcome == Outcome::Fails {
                witness = scan.witness.as_ref().map(|w| vec![w[1], *s]);
            }
        }
    }
    let outcome = if worst > tol {
        Outcome::Fails
    } else if inconclusive {
        Outcome::Inconclusive
    } else {
        Outcome::Holds
    };
    Ok(OrderVerdict {
        kind,
        outcome,
        witness: if outcome == Outcome::Fails { witness } else { None },
        max_violation: worst,
        grid: *tgrid,
        tol,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::LifetimeDistribution as D;
    use crate::mixing::MixingDistribution;
    use crate::mixture::ResidualMixture;
    use crate::numerics::DEFAULT_CHECK_TOL;

    fn grid() -> Grid {
        Grid::default_check()
    }

    fn e(rate: f64) -> D {
        D::exponential(rate).unwrap()
    }

    fn weibull2() -> D {
        D::weibull(2.0, 1.0).unwrap()
    }

    fn hyper() -> D {
        D::hyper_exponential(vec![0.25, 0.75], vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn exponential_orders() {
        for kind in [OrderKind::Lr, OrderKind::Hr, OrderKind::St, OrderKind::Mrl] {
            let v = check_order(&e(2.0), &e(1.0), kind, &grid(), DEFAULT_CHECK_TOL).unwrap();
            assert!(v.holds(), "{kind}");
            let r = check_order(&e(1.0), &e(2.0), kind, &grid(), DEFAULT_CHECK_TOL).unwrap();
            assert!(r.fails(), "{kind}");
            assert!(r.witness.is_some());
        }
    }

    #[test]
    fn ce61_mixings_are_lr_ordered() {
        let h1 = MixingDistribution::ce61_h1();
        let h2 = MixingDistribution::ce61_h2();
        let v = check_order(&h1, &h2, OrderKind::Lr, &grid(), DEFAULT_CHECK_TOL).unwrap();
        assert!(v.holds());
        let r = check_order(&h2, &h1, OrderKind::Lr, &grid(), DEFAULT_CHECK_TOL).unwrap();
        assert!(r.fails());
    }

    #[test]
    fn reflexive() {
        let mix = ResidualMixture::new(
            weibull2(),
            MixingDistribution::atoms(&[(0.0, 0.25), (1.0, 0.75)]).unwrap(),
        )
        .unwrap();
        let g = Grid::uniform(1e-3, 3.0, 80).unwrap();
        let (w, h) = (weibull2(), hyper());
        let objects: Vec<&dyn SurvivalModel> = vec![&mix, &w, &h];
        for &o in &objects {
            for kind in [OrderKind::Lr, OrderKind::Hr, OrderKind::Rh, OrderKind::St, OrderKind::Mrl, OrderKind::Ai] {
                let v = check_order(o, o, kind, &g, DEFAULT_CHECK_TOL).unwrap();
                assert!(v.holds(), "{} {kind}", o.label());
            }
            for kind in [OrderKind::UpLr, OrderKind::UpHr] {
                let xg = Grid::uniform(0.0, 0.0 + 1e-9, 3).unwrap();
                let v = check_upshifted_order(o, o, kind, &g, &xg, 1e-6).unwrap();
                assert!(v.holds(), "{} {kind}", o.label());
            }
        }
    }

    #[test]
    fn ai_ratio_of_equal_objects_is_flat() {
        let v = check_order(&hyper(), &hyper(), OrderKind::Ai, &grid(), 0.0).unwrap();
        assert!(v.holds());
        assert!(v.max_violation == 0.0);
    }

    #[test]
    fn upshifted_examples() {
        let base = weibull2();
        let mix = ResidualMixture::new(
            base.clone(),
            MixingDistribution::atoms(&[(0.0, 0.25), (1.0, 0.75)]).unwrap(),
        )
        .unwrap();
        let tg = Grid::uniform(1e-3, 3.0, 60).unwrap();
        for kind in [OrderKind::UpLr, OrderKind::UpHr, OrderKind::UpMrl] {
            let v = check_upshifted_order(&mix, &base, kind, &tg, &default_xgrid(), DEFAULT_CHECK_TOL)
                .unwrap();
            assert!(v.holds(), "{kind}: {v:?}");
        }
        let ex = e(1.0);
        let emix = ResidualMixture::new(ex.clone(), MixingDistribution::degenerate(2.0).unwrap()).unwrap();
        let v = check_upshifted_order(&emix, &ex, OrderKind::UpLr, &default_tgrid(), &default_xgrid(), 1e-9)
            .unwrap();
        assert!(v.holds());
        assert!(v.max_violation < 1e-12);
        // a DFR baseline is not up-shifted below its mixture
        let h = hyper();
        let hmix = ResidualMixture::new(h.clone(), MixingDistribution::degenerate(1.0).unwrap()).unwrap();
        let v = check_upshifted_order(&hmix, &h, OrderKind::UpHr, &default_tgrid(), &default_xgrid(), 1e-9)
            .unwrap();
        assert!(v.fails());
        assert_eq!(v.witness.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn excluded_points_make_verdict_inconclusive() {
        let emp = D::empirical(vec![0.5, 1.0, 1.5]).unwrap();
        let g = Grid::uniform(0.1, 5.0, 50).unwrap();
        let v = check_order(&emp, &e(1.0), OrderKind::Mrl, &g, 1e-7).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn names_round_trip() {
        for k in OrderKind::ALL {
            assert_eq!(k.name().parse::<OrderKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.name()));
        }
    }
}
