//! Size sweeps of the LDU diagnostics with log-log slope fits.

use serde::{Deserialize, Serialize};

use crate::cross::{cross_approximate, ldu_diagnostics, PivotStrategy};
use crate::error::{Error, Result};
use crate::gallery::{generate, GallerySpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessRow {
    pub n: usize,
    pub norm_l_inv: f64,
    pub norm_u_inv: f64,
    pub norm_d_inv: f64,
    pub r_m: f64,
    pub last_pivot: f64,
    pub interchanges_performed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessSweep {
    pub family: String,
    pub rows: Vec<TightnessRow>,
    pub slope_l_inv: f64,
    pub slope_u_inv: f64,
    pub slope_r_m: f64,
}

/// Parses `start:step:end` (inclusive) or a single size.
pub fn parse_range(spec: &str) -> Result<Vec<usize>> {
    let parts: Vec<usize> = spec
        .split(':')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad size range `{spec}`")))
        })
        .collect::<Result<_>>()?;
    match parts[..] {
        [n] => Ok(vec![n]),
        [start, step, end] if step > 0 && start <= end => Ok((start..=end).step_by(step).collect()),
        _ => Err(Error::Usage(format!(
            "size range must be `n` or `start:step:end`, got `{spec}`"
        ))),
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Parameter(
            "slope fit needs at least two points".into(),
        ));
    }
    if xs.iter().chain(ys).any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::Parameter("slope fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Parameter("slope fit needs distinct sizes".into()));
    }
    Ok(sxy / sxx)
}

/// Runs a complete sweep (`n − 1` steps plus the final pivot) on every size.
pub fn sweep(family: &str, sizes: &[usize]) -> Result<TightnessSweep> {
    let rows = sizes
        .iter()
        .map(|&n| {
            let spec = GallerySpec::from_name(family, n, 0, None)?;
            let a = generate(&spec)?;
            let res = cross_approximate(&a, a.n_rows() - 1, PivotStrategy::Full)?;
            let ldu = ldu_diagnostics(&a, &res)?;
            Ok(TightnessRow {
                n: a.n_rows(),
                norm_l_inv: ldu.norm_l_inv,
                norm_u_inv: ldu.norm_u_inv,
                norm_d_inv: ldu.norm_d_inv,
                r_m: ldu.r_m,
                last_pivot: ldu.last_pivot,
                interchanges_performed: ldu.interchanges_performed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let fit = |get: fn(&TightnessRow) -> f64| {
        loglog_slope(&ns, &rows.iter().map(get).collect::<Vec<_>>())
    };
    Ok(TightnessSweep {
        family: family.to_string(),
        slope_l_inv: fit(|r| r.norm_l_inv)?,
        slope_u_inv: fit(|r| r.norm_u_inv)?,
        slope_r_m: fit(|r| r.r_m)?,
        rows,
    })
}
