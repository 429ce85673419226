//! Adapters from verdicts to report records.

use rayon::prelude::*;

use crate::aging::{check_aging_class, check_log_concavity, AgingClass, ClassVerdict, LogShape};
use crate::dependence::{DependenceSign, DependenceVerdict};
use crate::error::Result;
use crate::mixture::ResidualMixture;
use crate::model::SurvivalModel;
use crate::numerics::{Direction, Grid};
use crate::orders::{check_order, check_upshifted_order, scan_monotone, OrderKind, OrderVerdict, Outcome};

use super::report::{CheckRecord, Expected};

fn excluded_note(excluded: usize) -> String {
    if excluded > 0 {
        format!("{excluded} grid points excluded")
    } else {
        String::new()
    }
}

pub(crate) fn from_order(name: String, expected: Expected, r: Result<OrderVerdict>) -> CheckRecord {
    match r {
        Ok(v) => CheckRecord {
            name,
            expected,
            outcome: v.outcome,
            witness: v.witness,
            max_violation: v.max_violation,
            tol: v.tol,
            grid: Some(v.grid),
            detail: excluded_note(v.excluded),
        },
        Err(e) => CheckRecord::errored(name, expected, &e),
    }
}

pub(crate) fn from_class(name: String, expected: Expected, r: Result<ClassVerdict>) -> CheckRecord {
    match r {
        Ok(v) => CheckRecord {
            name,
            expected,
            outcome: v.outcome,
            witness: v.witness,
            max_violation: v.max_violation,
            tol: v.tol,
            grid: Some(v.grid),
            detail: excluded_note(v.excluded),
        },
        Err(e) => CheckRecord::errored(name, expected, &e),
    }
}

/// Holds when the verdict shows `want`; `Both` counts for either sign.
pub(crate) fn from_dependence(name: String, want: DependenceSign, r: Result<DependenceVerdict>) -> CheckRecord {
    let v = match r {
        Ok(v) => v,
        Err(e) => return CheckRecord::errored(name, Expected::Holds, &e),
    };
    let pos_gap = (-v.min_stat).max(0.0);
    let neg_gap = v.max_stat.max(0.0);
    let (ok, violation, witness) = match want {
        DependenceSign::Positive => (v.is_positive(), pos_gap, v.positive_witness.clone()),
        DependenceSign::Negative => (v.is_negative(), neg_gap, v.negative_witness.clone()),
        DependenceSign::Both => (
            v.sign == DependenceSign::Both,
            pos_gap.max(neg_gap),
            v.positive_witness.clone().or(v.negative_witness.clone()),
        ),
        DependenceSign::Neither => (v.sign == DependenceSign::Neither, 0.0, None),
    };
    CheckRecord {
        name,
        expected: Expected::Holds,
        outcome: if ok { Outcome::Holds } else { Outcome::Fails },
        witness: if ok { None } else { witness },
        max_violation: violation,
        tol: v.tol,
        grid: None,
        detail: v.to_string(),
    }
}

pub(crate) fn order(
    name: impl Into<String>,
    expected: Expected,
    x: &dyn SurvivalModel,
    y: &dyn SurvivalModel,
    kind: OrderKind,
    grid: &Grid,
    tol: f64,
) -> CheckRecord {
    from_order(name.into(), expected, check_order(x, y, kind, grid, tol))
}

pub(crate) fn upshifted(
    name: impl Into<String>,
    x: &dyn SurvivalModel,
    y: &dyn SurvivalModel,
    kind: OrderKind,
    grids: (&Grid, &Grid),
    tol: f64,
) -> CheckRecord {
    from_order(
        name.into(),
        Expected::Holds,
        check_upshifted_order(x, y, kind, grids.0, grids.1, tol),
    )
}

pub(crate) fn class(
    name: impl Into<String>,
    expected: Expected,
    d: &dyn SurvivalModel,
    cls: AgingClass,
    grid: &Grid,
    tol: f64,
) -> CheckRecord {
    from_class(name.into(), expected, check_aging_class(d, cls, grid, tol))
}

/// Log-concavity of the hazard rate.
pub(crate) fn log_concave_hazard(
    name: impl Into<String>,
    expected: Expected,
    d: &dyn SurvivalModel,
    grid: &Grid,
    tol: f64,
) -> CheckRecord {
    let name = name.into();
    match check_log_concavity(|t| d.hazard(t).unwrap_or(f64::NAN), grid, tol) {
        Ok(shape) => {
            let holds = matches!(shape, LogShape::LogConcave | LogShape::Both);
            let mut r = CheckRecord::new(name, expected, if holds { Outcome::Holds } else { Outcome::Fails });
            r.tol = tol;
            r.grid = Some(*grid);
            r.detail = format!("{shape:?}");
            r
        }
        Err(e) => CheckRecord::errored(name, expected, &e),
    }
}

/// `sup |f|` over `xs` with its location.
pub(crate) fn sup_abs<F>(xs: &[f64], f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let vals = xs.par_iter().map(|&x| Ok((f(x)?.abs(), x))).collect::<Result<Vec<_>>>()?;
    Ok(vals.into_iter().fold((0.0, xs[0]), |acc, v| {
        if v.0 > acc.0 || v.0.is_nan() {
            v
        } else {
            acc
        }
    }))
}

/// `sup |f| <= tol` on `grid`.
pub(crate) fn agreement<F>(name: impl Into<String>, grid: &Grid, tol: f64, f: F) -> CheckRecord
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let name = name.into();
    match sup_abs(&grid.abscissas(), f) {
        Ok((err, at)) => {
            let mut r = CheckRecord::within(name, err, tol);
            r.grid = Some(*grid);
            if r.outcome == Outcome::Fails {
                r.witness = Some(vec![at]);
            }
            r
        }
        Err(e) => CheckRecord::errored(name, Expected::Holds, &e),
    }
}

/// `(Θ | X₁* = x) ≤_LR (Θ | X₂* = x)` for each shift: `ln π₂ − ln π₁` must
/// increase in `θ`.
pub(crate) fn posterior_lr(
    name: impl Into<String>,
    m1: &ResidualMixture,
    m2: &ResidualMixture,
    xs: &Grid,
    thetas: &Grid,
    tol: f64,
) -> CheckRecord {
    let name = name.into();
    let ts = thetas.abscissas();
    let rows = xs.abscissas().into_par_iter().map(|x| -> Result<_> {
        let diffs = ts
            .iter()
            .map(|&t| {
                let a = m1.posterior_age_pdf(t, x)?;
                let b = m2.posterior_age_pdf(t, x)?;
                Ok((a > 0.0 && b > 0.0).then(|| b.ln() - a.ln()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((x, scan_monotone(&ts, &diffs, Direction::Increasing, tol)))
    });
    match rows.collect::<Result<Vec<_>>>() {
        Ok(rows) => merge_rows(name, rows, tol, *thetas),
        Err(e) => CheckRecord::errored(name, Expected::Holds, &e),
    }
}

/// `(Θ | X₁* > x) ≤_ST (Θ | X₂* > x)`: `Π₂(θ|x) <= Π₁(θ|x)` everywhere.
pub(crate) fn posterior_st(
    name: impl Into<String>,
    m1: &ResidualMixture,
    m2: &ResidualMixture,
    xs: &Grid,
    thetas: &Grid,
    tol: f64,
) -> CheckRecord {
    let name = name.into();
    let ts = thetas.abscissas();
    let rows = xs.abscissas().into_par_iter().map(|x| -> Result<_> {
        let mut worst = (0.0, None);
        for &t in &ts {
            let gap = m2.conditional_age_cdf(t, x)? - m1.conditional_age_cdf(t, x)?;
            if gap > worst.0 {
                worst = (gap, Some(vec![t, x]));
            }
        }
        Ok(worst)
    });
    match rows.collect::<Result<Vec<_>>>() {
        Ok(rows) => {
            let (gap, at) = rows
                .into_iter()
                .fold((0.0, None), |acc, r| if r.0 > acc.0 { r } else { acc });
            let mut r = CheckRecord::within(name, gap, tol);
            r.grid = Some(*thetas);
            if r.outcome == Outcome::Fails {
                r.witness = at;
            }
            r
        }
        Err(e) => CheckRecord::errored(name, Expected::Holds, &e),
    }
}

fn merge_rows(name: String, rows: Vec<(f64, crate::orders::Scan)>, tol: f64, grid: Grid) -> CheckRecord {
    let mut worst = 0.0;
    let mut witness = None;
    let mut inconclusive = false;
    for (x, s) in rows {
        inconclusive |= s.outcome == Outcome::Inconclusive;
        if s.max_violation > worst {
            worst = s.max_violation;
            witness = s.witness.map(|w| vec![w[1], x]);
        }
    }
    let outcome = if worst > tol {
        Outcome::Fails
    } else if inconclusive {
        Outcome::Inconclusive
    } else {
        Outcome::Holds
    };
    CheckRecord {
        name,
        expected: Expected::Holds,
        outcome,
        witness: if outcome == Outcome::Fails { witness } else { None },
        max_violation: worst,
        tol,
        grid: Some(grid),
        detail: String::new(),
    }
}

/// `lhs <= rhs + tol` for two scalar estimates.
pub(crate) fn at_most(name: impl Into<String>, lhs: Result<f64>, rhs: Result<f64>, tol: f64) -> CheckRecord {
    let name = name.into();
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => CheckRecord::within(name, (a - b).max(0.0), tol).with_detail(format!("{a:.9} vs {b:.9}")),
        (Err(e), _) | (_, Err(e)) => CheckRecord::errored(name, Expected::Holds, &e),
    }
}
