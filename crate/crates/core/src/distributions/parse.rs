use crate::error::{Error, Result};

use super::{LifetimeDistribution, Tabulated};

/// Splits `name(a, b(c, d), e)` into the name and its top-level arguments.
/// A bare `name` yields no arguments.
pub(crate) fn split_call(spec: &str) -> Result<(&str, Vec<&str>)> {
    let spec = spec.trim();
    let Some(open) = spec.find('(') else {
        if spec.is_empty() || !spec.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse(format!("malformed spec `{spec}`")));
        }
        return Ok((spec, Vec::new()));
    };
    if !spec.ends_with(')') {
        return Err(Error::Parse(format!("spec `{spec}` is missing a closing `)`")));
    }
    let name = spec[..open].trim();
    let body = &spec[open + 1..spec.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced `)` in `{spec}`")));
                }
            }
            ',' if depth == 0 => {
                args.push(body[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced `(` in `{spec}`")));
    }
    let last = body[start..].trim();
    if !(args.is_empty() && last.is_empty()) {
        args.push(last);
    }
    if args.iter().any(|a| a.is_empty()) {
        return Err(Error::Parse(format!("empty argument in `{spec}`")));
    }
    Ok((name, args))
}

pub(crate) fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("expected a number, got `{s}`")))
}

pub(crate) fn pair(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected `a:b`, got `{s}`")))?;
    Ok((number(a)?, number(b)?))
}

fn arity(name: &str, args: &[&str], n: usize) -> Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "`{name}` takes {n} argument(s), got {}",
            args.len()
        )))
    }
}

/// Parses a baseline spec such as `hyperexp(0.25:1,0.75:2)`.
pub fn parse_distribution(spec: &str) -> Result<LifetimeDistribution> {
    let (name, args) = split_call(spec)?;
    match name {
        "exp" => {
            arity(name, &args, 1)?;
            LifetimeDistribution::exponential(number(args[0])?)
        }
        "weibull" => {
            arity(name, &args, 2)?;
            LifetimeDistribution::weibull(number(args[0])?, number(args[1])?)
        }
        "hyperexp" => {
            if args.is_empty() {
                return Err(Error::Parse("`hyperexp` needs at least one p:rate pair".into()));
            }
            let (weights, rates) = args
                .iter()
                .map(|a| pair(a))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            LifetimeDistribution::hyper_exponential(weights, rates)
        }
        "loglogistic" => {
            arity(name, &args, 2)?;
            LifetimeDistribution::log_logistic(number(args[0])?, number(args[1])?)
        }
        "halfcauchy" => {
            arity(name, &args, 1)?;
            LifetimeDistribution::half_cauchy(number(args[0])?)
        }
        "cauchysq" => {
            arity(name, &args, 1)?;
            LifetimeDistribution::cauchy_squared(number(args[0])?)
        }
        "gompertz" => {
            arity(name, &args, 2)?;
            LifetimeDistribution::gompertz(number(args[0])?, number(args[1])?)
        }
        "tabulated" => {
            arity(name, &args, 1)?;
            Ok(LifetimeDistribution::Tabulated(Tabulated::from_csv_path(args[0])?))
        }
        other => Err(Error::Parse(format!("unknown distribution `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_family() {
        assert_eq!(
            parse_distribution("exp(2)").unwrap(),
            LifetimeDistribution::exponential(2.0).unwrap()
        );
        assert_eq!(
            parse_distribution("weibull(2, 1)").unwrap(),
            LifetimeDistribution::weibull(2.0, 1.0).unwrap()
        );
        assert_eq!(
            parse_distribution("hyperexp(0.25:1,0.75:2)").unwrap(),
            LifetimeDistribution::hyper_exponential(vec![0.25, 0.75], vec![1.0, 2.0]).unwrap()
        );
        assert_eq!(
            parse_distribution("loglogistic(2,1)").unwrap(),
            LifetimeDistribution::log_logistic(2.0, 1.0).unwrap()
        );
    }

    #[test]
    fn label_round_trips() {
        for spec in ["exp(1.5)", "weibull(2,0.5)", "hyperexp(0.25:1,0.75:2)", "loglogistic(2,1)"] {
            let d = parse_distribution(spec).unwrap();
            assert_eq!(parse_distribution(&d.label()).unwrap(), d);
        }
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in [
            "exp",
            "exp()",
            "exp(1,2)",
            "exp(x)",
            "weibull(2)",
            "hyperexp(0.5:1)",
            "hyperexp(0.5,0.5)",
            "norm(0,1)",
            "exp(1",
            "exp(-1)",
            "",
        ] {
            assert!(parse_distribution(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn splits_nested_arguments() {
        let (name, args) = split_call("os(weibull(2,1), 4, 5)").unwrap();
        assert_eq!(name, "os");
        assert_eq!(args, vec!["weibull(2,1)", "4", "5"]);
        assert_eq!(split_call("ce61_h1").unwrap(), ("ce61_h1", vec![]));
    }
}
