//! User-defined runs described by a JSON document.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::aging::AgingClass;
use crate::dependence::{check_plrd_nlrd, check_rcsi_rcsd, check_si_sd, DependenceSign, JointAgeModel};
use crate::distributions::parse::split_call;
use crate::distributions::{parse_distribution, LifetimeDistribution};
use crate::error::{Error, Result};
use crate::mixing::{parse_mixing, MixingDistribution};
use crate::mixture::ResidualMixture;
use crate::model::SurvivalModel;
use crate::numerics::Grid;
use crate::orders::{default_xgrid, OrderKind};

use super::checks::{class, from_dependence, order, upshifted};
use super::report::{CheckRecord, Expectation, Expected, Report};
use super::RunOptions;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn to_grid(self) -> Result<Grid> {
        Grid::uniform(self.min, self.max, self.points)
    }
}

/// A comparison setup: one or two baselines, one or two mixings and a list
/// of checks such as `"DFR(X*)"`, `"ST(X*, X)"` (meaning `X* ≤_ST X`),
/// `"UP_LR(X*, X)"`, `"PLRD(X*)"`, or `"!IFR(X)"` for a check expected to fail.
///
/// Objects: `X`, `X2` (baselines), `X*` or `X1*` (first mixture), `X2*`
/// (second baseline and/or second mixing), `Theta`, `Theta2` (mixings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub id: Option<String>,
    pub baseline: String,
    #[serde(default)]
    pub baseline2: Option<String>,
    pub mixing: String,
    #[serde(default)]
    pub mixing2: Option<String>,
    pub checks: Vec<String>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub format: Option<String>,
}

enum Obj {
    Dist(LifetimeDistribution),
    Mix(Box<ResidualMixture>),
    Age(MixingDistribution),
}

impl Obj {
    fn model(&self) -> &dyn SurvivalModel {
        match self {
            Obj::Dist(d) => d,
            Obj::Mix(m) => m.as_ref(),
            Obj::Age(a) => a,
        }
    }
}

struct Setup {
    x: LifetimeDistribution,
    x2: Option<LifetimeDistribution>,
    theta: MixingDistribution,
    theta2: Option<MixingDistribution>,
}

impl Setup {
    fn object(&self, name: &str) -> Result<Obj> {
        let missing = |what: &str| Error::Parse(format!("`{name}` needs `{what}` in the configuration"));
        Ok(match name {
            "X" | "X1" => Obj::Dist(self.x.clone()),
            "X2" => Obj::Dist(self.x2.clone().ok_or_else(|| missing("baseline2"))?),
            "X*" | "X1*" => Obj::Mix(Box::new(ResidualMixture::new(self.x.clone(), self.theta.clone())?)),
            "X2*" => {
                if self.x2.is_none() && self.theta2.is_none() {
                    return Err(missing("baseline2` or `mixing2"));
                }
                let b = self.x2.clone().unwrap_or_else(|| self.x.clone());
                let m = self.theta2.clone().unwrap_or_else(|| self.theta.clone());
                Obj::Mix(Box::new(ResidualMixture::new(b, m)?))
            }
            "Theta" | "Θ" | "Theta1" => Obj::Age(self.theta.clone()),
            "Theta2" | "Θ2" => Obj::Age(self.theta2.clone().ok_or_else(|| missing("mixing2"))?),
            other => return Err(Error::Parse(format!("unknown object `{other}`"))),
        })
    }
}

fn dependence_kind(name: &str) -> Option<(u8, DependenceSign)> {
    Some(match name {
        "PLRD" => (0, DependenceSign::Positive),
        "NLRD" => (0, DependenceSign::Negative),
        "SI" => (1, DependenceSign::Positive),
        "SD" => (1, DependenceSign::Negative),
        "RCSI" => (2, DependenceSign::Positive),
        "RCSD" => (2, DependenceSign::Negative),
        "INDEP" => (1, DependenceSign::Both),
        _ => return None,
    })
}

fn run_check(setup: &Setup, text: &str, grid: &Grid, tol: f64) -> Result<CheckRecord> {
    let trimmed = text.trim();
    let (expected, body) = match trimmed.strip_prefix('!') {
        Some(rest) => (Expected::Fails, rest.trim()),
        None => (Expected::Holds, trimmed),
    };
    let (name, args) = split_call(body)?;
    let upper = name.to_ascii_uppercase();
    if let Ok(cls) = upper.parse::<AgingClass>() {
        if args.len() != 1 {
            return Err(Error::Parse(format!("`{name}` takes one object")));
        }
        let obj = setup.object(args[0])?;
        return Ok(class(trimmed, expected, obj.model(), cls, grid, tol));
    }
    if let Some((which, want)) = dependence_kind(&upper) {
        let target = args.first().copied().unwrap_or("X*");
        let mx = match setup.object(target)? {
            Obj::Mix(m) => *m,
            _ => return Err(Error::Parse(format!("`{name}` applies to a mixture, not `{target}`"))),
        };
        let jm = JointAgeModel::new(mx);
        let (xg, tg) = (grid.coarsen(20), Grid::uniform(0.0, grid.hi, 20)?);
        let v = match which {
            0 => check_plrd_nlrd(&jm, &xg, &tg, tol.max(1e-6)),
            1 => check_si_sd(&jm, &xg, &tg, tol.max(1e-6)),
            _ => check_rcsi_rcsd(&jm, &xg, &tg, tol.max(1e-6)),
        };
        let mut rec = from_dependence(trimmed.to_string(), want, v);
        rec.expected = expected;
        return Ok(rec);
    }
    let kind: OrderKind = upper.parse()?;
    if args.len() != 2 {
        return Err(Error::Parse(format!("`{name}` compares two objects")));
    }
    let (a, b) = (setup.object(args[0])?, setup.object(args[1])?);
    if kind.is_upshifted() {
        let mut rec = upshifted(trimmed, a.model(), b.model(), kind, (grid, &default_xgrid()), tol);
        rec.expected = expected;
        Ok(rec)
    } else {
        Ok(order(trimmed, expected, a.model(), b.model(), kind, grid, tol))
    }
}

/// Runs every check of `cfg`; the configuration's own grid and tolerance
/// take precedence over `opts`.
pub fn run_config(cfg: &RunConfig, opts: &RunOptions) -> Result<Report> {
    let start = Instant::now();
    let setup = Setup {
        x: parse_distribution(&cfg.baseline)?,
        x2: cfg.baseline2.as_deref().map(parse_distribution).transpose()?,
        theta: parse_mixing(&cfg.mixing)?,
        theta2: cfg.mixing2.as_deref().map(parse_mixing).transpose()?,
    };
    if cfg.checks.is_empty() {
        return Err(Error::Parse("`checks` is empty".into()));
    }
    let grid = match cfg.grid {
        Some(g) => g.to_grid()?,
        None => opts.grid.unwrap_or_else(Grid::default_check),
    };
    let tol = cfg.tol.unwrap_or(opts.tol);
    // resolve every check before running any, so typos fail fast
    for text in &cfg.checks {
        validate_check(&setup, text)?;
    }
    let records = cfg
        .checks
        .iter()
        .map(|text| run_check(&setup, text, &grid, tol))
        .collect::<Result<Vec<_>>>()?;
    let id = cfg.id.clone().unwrap_or_else(|| "config".to_string());
    let mut report = Report::assemble(&id, "user configuration", Expectation::Theorem, Vec::new(), records);
    report.seed = cfg.seed.unwrap_or(opts.seed);
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn validate_check(setup: &Setup, text: &str) -> Result<()> {
    let body = text.trim().trim_start_matches('!').trim();
    let (name, args) = split_call(body)?;
    let upper = name.to_ascii_uppercase();
    let known = upper.parse::<AgingClass>().is_ok()
        || dependence_kind(&upper).is_some()
        || upper.parse::<OrderKind>().is_ok();
    if !known {
        return Err(Error::Parse(format!("unknown check `{name}`")));
    }
    for a in args {
        setup.object(a)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Overall;

    fn cfg(checks: &[&str]) -> RunConfig {
        RunConfig {
            id: Some("demo".into()),
            baseline: "hyperexp(0.25:1,0.75:2)".into(),
            baseline2: Some("exp(2)".into()),
            mixing: "cont(exp(1))".into(),
            mixing2: None,
            checks: checks.iter().map(|s| s.to_string()).collect(),
            grid: Some(GridSpec { min: 1e-3, max: 10.0, points: 100 }),
            tol: None,
            seed: None,
            format: None,
        }
    }

    #[test]
    fn config_checks_run() {
        let r = run_config(
            &cfg(&["DFR(X)", "DFR(X*)", "!IFR(X*)", "ST(X, X*)", "HR(X2, X)", "SI(X*)", "UP_HR(X2, X)"]),
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(r.overall, Overall::Pass, "{}", r.to_text());
        assert_eq!(r.conclusions.len(), 7);
    }

    #[test]
    fn config_errors_are_parse_errors() {
        for bad in [&["FOO(X)"][..], &["DFR(Y)"], &["ST(X)"], &["PLRD(X)"], &["DFR(Theta2)"]] {
            assert!(run_config(&cfg(bad), &RunOptions::default()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn config_json_rejects_unknown_keys() {
        let text = r#"{"baseline": "exp(1)", "mixing": "degenerate(1)", "checks": ["IFR(X)"], "colour": 1}"#;
        assert!(serde_json::from_str::<RunConfig>(text).is_err());
        let text = r#"{"baseline": "exp(1)", "mixing": "degenerate(1)", "checks": ["IFR(X)"]}"#;
        let c: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(run_config(&c, &RunOptions::default()).unwrap().overall, Overall::Pass);
    }
}
