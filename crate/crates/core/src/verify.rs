//! Verification batteries: seeded, exhaustive where affordable, and each
//! reduced to a list of pass/fail checks.

use std::time::{Duration, Instant};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    gamma_last, min_pivot_check, rhs_bound, wilkinson_bound, BoundKind, RATIO_SLACK,
};
use crate::classify::classify;
use crate::cross::{cross_approximate, skeleton_error, PivotStrategy};
use crate::error::{Error, Result};
use crate::funcross::{
    ellipse_sup, function_bound, function_cross, sample, BivariateFunction, Grid, TestFunction,
};
use crate::gallery::{generate, GallerySpec, Rng};
use crate::linalg::{determinant, singular_values};
use crate::matrix::{IndexSet, Matrix};
use crate::maxvol::{check_principal_optimality, column_volume, volume};
use crate::tightness::sweep;

pub const SUITES: [&str; 4] = ["theorems2", "bounds3", "funcross", "tightness"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

type Battery = fn() -> Result<CheckOutcome>;

/// Runs the named suite. Checks not started before `budget` runs out are
/// reported as failures.
pub fn run_suite(suite: &str, budget: Duration) -> Result<Vec<CheckOutcome>> {
    let checks: &[(&str, Battery)] = match suite {
        "theorems2" => &[
            ("spsd_principal_optimality", spsd_principal),
            ("dd_principal_optimality", dd_principal),
            ("indefinite_counterexample", indefinite_counterexample),
            ("triangular_dd_volumes", triangular_dd_volumes),
            ("gram_column_correspondence", gram_correspondence),
        ],
        "bounds3" => &[
            ("pivot_bound_chain", pivot_bound_chain),
            ("error_bounds", error_bounds),
            ("mixed_bound_full_sweep", mixed_bound_full_sweep),
            ("no_pivoting_block_example", no_pivoting_block_example),
        ],
        "funcross" => &[
            ("matrix_function_consistency", matrix_function_consistency),
            ("runge_bound", runge_bound),
            ("gauss_kernel", gauss_kernel),
        ],
        "tightness" => &[
            ("quad_growth_sweep", quad_growth_sweep),
            ("bidiagonal_sweep", bidiagonal_sweep),
        ],
        other => {
            return Err(Error::Usage(format!(
                "unknown suite `{other}`; known: {}",
                SUITES.join(", ")
            )))
        }
    };
    let start = Instant::now();
    checks
        .iter()
        .map(|(name, run)| {
            if start.elapsed() > budget {
                return Ok(CheckOutcome::new(
                    name,
                    false,
                    "time budget exhausted before start",
                ));
            }
            run().map(|mut c| {
                c.name = (*name).to_string();
                c
            })
        })
        .collect()
}

fn gen(name: &str, n: usize, seed: u64) -> Result<Matrix> {
    generate(&GallerySpec::from_name(name, n, seed, None)?)
}

fn principal_battery(family: &str) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut runs = 0;
    for seed in 0..50u64 {
        let n = 4 + (seed % 4) as usize;
        let a = gen(family, n, seed)?;
        for k in 1..=3 {
            runs += 1;
            let check = check_principal_optimality(&a, k)?;
            if !check.holds {
                failures.push(format!("seed {seed} n {n} k {k}"));
            }
        }
    }
    Ok(CheckOutcome::new(
        "",
        failures.is_empty(),
        format!("{runs} searches, failures: {failures:?}"),
    ))
}

fn spsd_principal() -> Result<CheckOutcome> {
    principal_battery("random_spsd")
}

fn dd_principal() -> Result<CheckOutcome> {
    principal_battery("random_dd")
}

fn indefinite_counterexample() -> Result<CheckOutcome> {
    let mut ok = true;
    for k in 1..=3 {
        let a = gen("offdiag_identity", k, 0)?;
        for size in (1..=2 * k).step_by(2) {
            let check = check_principal_optimality(&a, size)?;
            ok &= !check.holds && check.overall.volume == 1.0 && check.principal.volume == 0.0;
        }
    }
    Ok(CheckOutcome::new(
        "",
        ok,
        "k = 1..3, odd sizes: overall 1, principal 0",
    ))
}

fn triangular_dd_volumes() -> Result<CheckOutcome> {
    let mut worst = 0.0_f64;
    let mut ok = true;
    for seed in 0..50u64 {
        let n = 2 + (seed % 5) as usize;
        let t = gen("random_unit_upper_dd", n, seed)?;
        for k in 1..n {
            for rows in (0..n).combinations(k) {
                let principal = volume(
                    &t,
                    &IndexSet::new(rows.clone())?,
                    &IndexSet::new(rows.clone())?,
                )?;
                for cols in (0..n).combinations(k).filter(|c| *c != rows) {
                    let v = volume(&t, &IndexSet::new(rows.clone())?, &IndexSet::new(cols)?)?;
                    ok &= v < principal;
                    worst = worst.max(v / principal);
                }
            }
        }
    }
    Ok(CheckOutcome::new(
        "",
        ok,
        format!("largest non-principal/principal ratio {worst:.6}"),
    ))
}

fn gram_correspondence() -> Result<CheckOutcome> {
    let mut ok = true;
    let mut worst = 0.0_f64;
    for seed in 0..30u64 {
        let b = Rng::new(1000 + seed).normal_matrix(6, 6);
        let gram = b.transpose().matmul(&b)?;
        for k in 1..=3 {
            let mut col_best = (f64::MIN, Vec::new());
            let mut gram_best = (f64::MIN, Vec::new());
            for set in (0..6).combinations(k) {
                let idx = IndexSet::new(set.clone())?;
                let cv = column_volume(&b, &idx)?;
                let gv = volume(&gram, &idx, &idx)?;
                let rel = (cv * cv - gv).abs() / gv.max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
                ok &= rel <= 1e-9;
                if cv > col_best.0 {
                    col_best = (cv, set.clone());
                }
                if gv > gram_best.0 {
                    gram_best = (gv, set);
                }
            }
            ok &= col_best.1 == gram_best.1;
        }
    }
    Ok(CheckOutcome::new(
        "",
        ok,
        format!("worst relative volume mismatch {worst:.3e}"),
    ))
}

/// 25 matrices from each of four classes, size 10.
fn class_battery() -> Result<Vec<(&'static str, Matrix)>> {
    let mut out = Vec::new();
    for seed in 0..25u64 {
        for family in [
            "random_general",
            "random_spsd",
            "random_dd",
            "random_doubly_dd",
        ] {
            out.push((family, gen(family, 10, seed)?));
        }
    }
    Ok(out)
}

fn pivot_bound_chain() -> Result<CheckOutcome> {
    let mut violations = 0;
    let mut runs = 0;
    for (_, a) in class_battery()? {
        let class = classify(&a)?;
        for m in 1..=8 {
            let res = cross_approximate(&a, m, PivotStrategy::Full)?;
            runs += 1;
            if !min_pivot_check(&a, &res, &class)?.all_hold() {
                violations += 1;
            }
        }
    }
    Ok(CheckOutcome::new(
        "",
        violations == 0,
        format!("{runs} runs, {violations} violations"),
    ))
}

fn error_bounds() -> Result<CheckOutcome> {
    let mut violations = Vec::new();
    let mut worst = 0.0_f64;
    for (family, a) in class_battery()? {
        let class = classify(&a)?;
        let sv = singular_values(&a);
        for (m, &sigma) in sv.iter().enumerate().take(9).skip(1) {
            let res = cross_approximate(&a, m, PivotStrategy::Full)?;
            let err = skeleton_error(&a, &res)?;
            let mut kinds = vec![(BoundKind::General, wilkinson_bound(m))];
            if class.is_spsd {
                kinds.push((BoundKind::Spsd, 1.0));
                let p = res.pivot_values_with_lookahead();
                if p.windows(2)
                    .any(|w| w[1].abs() > w[0].abs() * (1.0 + 1e-12))
                {
                    violations.push(format!("{family}: SPSD pivots increase at m {m}"));
                }
            }
            if class.is_dd {
                kinds.push((BoundKind::Dd, 1.0));
            }
            if class.is_doubly_dd {
                kinds.push((BoundKind::DoublyDd, 1.0));
            }
            for (kind, rho) in kinds {
                let ratio = err / rhs_bound(kind, m, sigma, rho, 0.0);
                worst = worst.max(ratio);
                if ratio > 1.0 + RATIO_SLACK {
                    violations.push(format!("{family} m {m} {}: ratio {ratio}", kind.name()));
                }
            }
        }
    }
    Ok(CheckOutcome::new(
        "",
        violations.is_empty(),
        format!("worst ratio {worst:.3e}; violations: {violations:?}"),
    ))
}

fn mixed_bound_full_sweep() -> Result<CheckOutcome> {
    let mut worst = 0.0_f64;
    for seed in 0..30u64 {
        let n = 4 + (seed % 5) as usize;
        let a = gen("random_general", n, 500 + seed)?;
        let res = cross_approximate(&a, n - 1, PivotStrategy::Full)?;
        let last = res.lookahead.map(|p| p.value.abs()).unwrap_or(0.0);
        let rhs = rhs_bound(
            BoundKind::Mixed,
            n - 1,
            0.0,
            wilkinson_bound(n - 1),
            gamma_last(&a)?,
        );
        worst = worst.max(last / rhs);
    }
    Ok(CheckOutcome::new(
        "",
        worst <= 1.0 + RATIO_SLACK,
        format!("worst ratio {worst:.3e}"),
    ))
}

/// `d_k = d_{k−1} + d_{k−2}/4`, `d_0 = d_1 = 1`.
pub fn tridiag_det_recurrence(m: usize) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0);
    for _ in 1..m {
        (prev, cur) = (cur, cur + prev / 4.0);
    }
    cur
}

fn no_pivoting_block_example() -> Result<CheckOutcome> {
    let mut ok = true;
    for m in 4..=10 {
        let a = gen("block_remark", m, 0)?;
        let res = cross_approximate(&a, m, PivotStrategy::Full)?;
        ok &= res
            .pivots
            .iter()
            .enumerate()
            .all(|(k, p)| p.row == k && p.col == k && p.value == 1.0);
        let det = determinant(&gen("tridiag_bm", m, 0)?)?;
        ok &= (det - tridiag_det_recurrence(m)).abs() <= 1e-12 * det;
    }
    let rate = tridiag_det_recurrence(10).powf(0.1);
    let target = (1.0 + 2f64.sqrt()) / 2.0;
    ok &= (rate - target).abs() <= 0.02;
    Ok(CheckOutcome::new(
        "",
        ok,
        format!("det(B_10)^(1/10) = {rate:.5}, limit {target:.5}"),
    ))
}

fn matrix_function_consistency() -> Result<CheckOutcome> {
    let grid = Grid::chebyshev(65)?;
    let mut ok = true;
    for f in [
        TestFunction::Gauss,
        TestFunction::Runge2d { c: 4.0 },
        TestFunction::ExpXy,
    ] {
        let fres = function_cross(&f, 8, &grid)?;
        let mres = cross_approximate(
            &sample(&f, &grid),
            fres.steps_completed(),
            PivotStrategy::Full,
        )?;
        ok &= fres.point_indices.len() == mres.pivots.len();
        ok &= fres
            .point_indices
            .iter()
            .zip(&fres.pivot_values)
            .zip(&mres.pivots)
            .all(|((&(i, j), &v), p)| p.row == i && p.col == j && p.value == v);
    }
    Ok(CheckOutcome::new(
        "",
        ok,
        "65×65 grid, 8 steps, gauss/runge2d/expxy",
    ))
}

fn sup_bound_ratio<F: BivariateFunction>(f: &F, r: f64, rho: impl Fn(usize) -> f64) -> Result<f64> {
    let grid = Grid::chebyshev(129)?;
    let sup = ellipse_sup(f, r, 512, &grid.ys)?;
    let mut worst = 0.0_f64;
    for m in 1..=8 {
        let run = function_cross(f, m, &grid)?;
        worst = worst.max(run.error_max / function_bound(2.0 * sup, r, rho(m), m)?);
    }
    Ok(worst)
}

fn runge_bound() -> Result<CheckOutcome> {
    let worst = sup_bound_ratio(&TestFunction::Runge2d { c: 4.0 }, 5.0, wilkinson_bound)?;
    Ok(CheckOutcome::new(
        "",
        worst <= 1.0,
        format!("worst error/bound {worst:.3e} at r = 5"),
    ))
}

fn gauss_kernel() -> Result<CheckOutcome> {
    let f = TestFunction::Gauss;
    let grid = Grid::chebyshev(129)?;
    let res = function_cross(&f, 8, &grid)?;
    let monotone = res
        .pivot_values
        .windows(2)
        .all(|w| w[1].abs() <= w[0].abs());
    let mut worst = 0.0_f64;
    for r in [4.5, 5.0, 6.0, 8.0] {
        worst = worst.max(sup_bound_ratio(&f, r, |_| 1.0)?);
    }
    Ok(CheckOutcome::new(
        "",
        monotone && worst <= 1.0,
        format!("pivots non-increasing: {monotone}; worst error/bound {worst:.3e}"),
    ))
}

fn quad_growth_sweep() -> Result<CheckOutcome> {
    let sizes: Vec<usize> = (8..=48).step_by(4).collect();
    let s = sweep("quad_growth", &sizes)?;
    let no_swaps = s.rows.iter().all(|r| !r.interchanges_performed);
    let half = s
        .rows
        .iter()
        .all(|r| (r.last_pivot.abs() - 0.5).abs() <= 1e-12);
    let ok = no_swaps
        && half
        && (1.2..=1.8).contains(&s.slope_l_inv)
        && (0.7..=1.3).contains(&s.slope_u_inv)
        && (1.7..=2.3).contains(&s.slope_r_m);
    Ok(CheckOutcome::new(
        "",
        ok,
        format!(
            "no interchanges: {no_swaps}; |p_n| = 1/2: {half}; slopes L⁻¹ {:.3}, U⁻¹ {:.3}, r_m {:.3}",
            s.slope_l_inv, s.slope_u_inv, s.slope_r_m
        ),
    ))
}

fn bidiagonal_sweep() -> Result<CheckOutcome> {
    let sizes: Vec<usize> = (8..=48).step_by(4).collect();
    let s = sweep("bidiagonal", &sizes)?;
    Ok(CheckOutcome::new(
        "",
        (0.7..=1.3).contains(&s.slope_r_m),
        format!("slope r_m {:.3}", s.slope_r_m),
    ))
}
