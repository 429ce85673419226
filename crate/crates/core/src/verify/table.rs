//! Plot data: baseline and mixture quantities tabulated on a grid.

use crate::distributions::{LifetimeDistribution, Quantity};
use crate::error::{Error, Result};
use crate::mixing::MixingDistribution;
use crate::mixture::ResidualMixture;
use crate::model::SurvivalModel;
use crate::numerics::Grid;

use rayon::prelude::*;

/// Column names and rows; `None` marks an undefined cell.
pub type Table = (Vec<String>, Vec<Vec<Option<f64>>>);

fn mixture_value(mx: &ResidualMixture, q: Quantity, x: f64) -> Result<f64> {
    match q {
        Quantity::Sf => mx.sf(x),
        Quantity::Cdf => mx.cdf(x),
        Quantity::Pdf => mx.pdf(x),
        Quantity::Hazard => mx.hazard(x),
        Quantity::ReversedHazard => SurvivalModel::reversed_hazard(mx, x),
        Quantity::Mrl => mx.mrl(x),
        Quantity::IntegratedSf => mx.integrated_sf(x),
    }
}

/// Columns `x`, then `<q>_X` and `<q>_Xstar` for each quantity. Cells that
/// are undefined at a point are left empty.
pub fn quantity_table(
    baseline: &LifetimeDistribution,
    mixing: &MixingDistribution,
    quantities: &[Quantity],
    grid: &Grid,
) -> Result<Table> {
    let mx = ResidualMixture::new(baseline.clone(), mixing.clone())?;
    let xs = grid.abscissas();
    let mut header = vec!["x".to_string()];
    let mut columns: Vec<Vec<Option<f64>>> = vec![xs.iter().map(|&x| Some(x)).collect()];
    for &q in quantities {
        header.push(format!("{q}_X"));
        header.push(format!("{q}_Xstar"));
        columns.push(xs.iter().map(|&x| baseline.evaluate(q, x).ok()).collect());
        let star: Vec<Result<f64>> = if q == Quantity::Mrl {
            mx.mrl_grid(&xs)
        } else {
            xs.par_iter().map(|&x| mixture_value(&mx, q, x)).collect()
        };
        let star = star
            .into_iter()
            .map(|v| match v {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                Ok(_) => Ok(None),
                Err(e) if e.is_numeric() => Err(e),
                Err(_) => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        columns.push(star);
    }
    let rows = (0..xs.len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    Ok((header, rows))
}

/// The table as CSV with 12 significant digits.
pub fn quantity_csv(
    baseline: &LifetimeDistribution,
    mixing: &MixingDistribution,
    quantities: &[Quantity],
    grid: &Grid,
) -> Result<String> {
    let (header, rows) = quantity_table(baseline, mixing, quantities, grid)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|v| v.map(|v| format!("{v:.11e}")).unwrap_or_default())
            .collect();
        w.write_record(&cells).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_columns_coincide() {
        let b = LifetimeDistribution::exponential(1.0).unwrap();
        let m = MixingDistribution::continuous(LifetimeDistribution::exponential(2.0).unwrap()).unwrap();
        let g = Grid::uniform(0.0, 5.0, 26).unwrap();
        let (header, rows) = quantity_table(&b, &m, &[Quantity::Sf, Quantity::Mrl], &g).unwrap();
        assert_eq!(header, ["x", "sf_X", "sf_Xstar", "mrl_X", "mrl_Xstar"]);
        assert_eq!(rows.len(), 26);
        for r in &rows {
            assert!((r[1].unwrap() - r[2].unwrap()).abs() < 1e-8);
            assert!((r[3].unwrap() - r[4].unwrap()).abs() < 1e-6);
        }
        let csv = quantity_csv(&b, &m, &[Quantity::Sf], &g).unwrap();
        assert_eq!(csv.lines().count(), 27);
        assert!(csv.lines().nth(1).unwrap().contains("1.00000000000e0"));
    }
}
