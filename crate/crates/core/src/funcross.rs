//! Cross approximation of bivariate functions on `[−1, 1]²`.
//!
//! The continuous argmax of each step is taken over a tensor grid, so a
//! run is exactly matrix cross approximation of the sampled function. The
//! residual `e_k` is kept as grid samples and can also be evaluated off the
//! grid from the chosen cross points alone.

use num_complex::Complex64;

use crate::cross::Termination;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default number of Chebyshev points per axis.
pub const DEFAULT_GRID_SIZE: usize = 129;

/// Residual maxima at or below this fraction of `max |f|` count as breakdown.
pub const DEFAULT_FUNCTION_BREAKDOWN_TOL: f64 = 1e-12;

/// A real function on `[−1, 1]²`, optionally with a complex extension in
/// its first argument.
pub trait BivariateFunction {
    fn eval(&self, x: f64, y: f64) -> f64;

    /// `f̃(η, ξ)` for complex `η`; `None` when no extension is available.
    fn eval_complex(&self, _eta: Complex64, _xi: f64) -> Option<Complex64> {
        None
    }

    /// Largest `r₀` such that every `f(·, y)` is analytic inside the
    /// Bernstein ellipse `E_{r₀}`. `None` when no finite limit is known.
    fn bernstein_radius(&self) -> Option<f64> {
        None
    }
}

impl<F: Fn(f64, f64) -> f64> BivariateFunction for F {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self(x, y)
    }
}

/// Built-in test functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `x·y`
    Product,
    /// `exp(−(x−y)²)`, a positive semidefinite kernel.
    Gauss,
    /// `1/(x + y + c)`
    Runge2d { c: f64 },
    /// `exp(x·y)`
    ExpXy,
}

impl TestFunction {
    pub const NAMES: [&'static str; 4] = ["product", "gauss", "runge2d", "expxy"];

    pub fn from_name(name: &str, c: f64) -> Result<Self> {
        match name {
            "product" => Ok(TestFunction::Product),
            "gauss" => Ok(TestFunction::Gauss),
            "runge2d" if c > 2.0 => Ok(TestFunction::Runge2d { c }),
            "runge2d" => Err(Error::Parameter(format!(
                "runge2d needs c > 2 to stay finite on [-1,1]², got {c}"
            ))),
            "expxy" => Ok(TestFunction::ExpXy),
            other => Err(Error::Usage(format!(
                "unknown function `{other}`; known: {}",
                Self::NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Product => "product",
            TestFunction::Gauss => "gauss",
            TestFunction::Runge2d { .. } => "runge2d",
            TestFunction::ExpXy => "expxy",
        }
    }
}

impl BivariateFunction for TestFunction {
    fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            TestFunction::Product => x * y,
            TestFunction::Gauss => (-(x - y) * (x - y)).exp(),
            TestFunction::Runge2d { c } => 1.0 / (x + y + c),
            TestFunction::ExpXy => (x * y).exp(),
        }
    }

    fn eval_complex(&self, eta: Complex64, xi: f64) -> Option<Complex64> {
        Some(match *self {
            TestFunction::Product => eta * xi,
            TestFunction::Gauss => (-(eta - xi) * (eta - xi)).exp(),
            TestFunction::Runge2d { c } => {
                let d = eta + xi + c;
                if d.norm() == 0.0 {
                    return None;
                }
                d.inv()
            }
            TestFunction::ExpXy => (eta * xi).exp(),
        })
    }

    fn bernstein_radius(&self) -> Option<f64> {
        match *self {
            // The nearest pole over ξ ∈ [−1, 1] sits at η = −(c − 1).
            TestFunction::Runge2d { c } => Some(bernstein_radius_of(Complex64::new(1.0 - c, 0.0))),
            _ => None,
        }
    }
}

/// Radius of the Bernstein ellipse passing through `z`: `|z ± √(z²−1)|`,
/// taking the root of modulus at least one.
pub fn bernstein_radius_of(z: Complex64) -> f64 {
    let s = (z - 1.0).sqrt() * (z + 1.0).sqrt();
    (z + s).norm().max((z - s).norm())
}

/// Ellipse with foci ±1 whose semi-axes sum to `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinEllipse {
    r: f64,
}

impl BernsteinEllipse {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r <= 1.0 {
            return Err(Error::Parameter(format!(
                "ellipse radius must exceed 1, got {r}"
            )));
        }
        Ok(BernsteinEllipse { r })
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// `(major, minor) = ((r + 1/r)/2, (r − 1/r)/2)`.
    pub fn semi_axes(&self) -> (f64, f64) {
        ((self.r + 1.0 / self.r) / 2.0, (self.r - 1.0 / self.r) / 2.0)
    }

    /// Boundary point `(u + 1/u)/2` with `u = r e^{iθ}`.
    pub fn point(&self, theta: f64) -> Complex64 {
        let u = Complex64::from_polar(self.r, theta);
        (u + u.inv()) / 2.0
    }
}

/// Sampled `max |f̃(η, ξ)|` over `η` on `∂E_r` and `ξ` in `ys`.
///
/// This is a lower estimate of the true supremum; callers that need a
/// bound inflate it.
pub fn ellipse_sup<F: BivariateFunction + ?Sized>(
    f: &F,
    r: f64,
    n_theta: usize,
    ys: &[f64],
) -> Result<f64> {
    let ellipse = BernsteinEllipse::new(r)?;
    if n_theta == 0 || ys.is_empty() {
        return Err(Error::Parameter("ellipse sampling needs points".into()));
    }
    if let Some(r0) = f.bernstein_radius() {
        if r >= r0 {
            return Err(Error::Analyticity(format!(
                "r = {r} reaches a singularity; analytic only for r < {r0}"
            )));
        }
    }
    let mut best = 0.0_f64;
    for k in 0..n_theta {
        let eta = ellipse.point(std::f64::consts::TAU * k as f64 / n_theta as f64);
        for &xi in ys {
            let v = f.eval_complex(eta, xi).ok_or_else(|| {
                Error::Analyticity(format!("no complex extension at η = {eta}, ξ = {xi}"))
            })?;
            let a = v.norm();
            if !a.is_finite() {
                return Err(Error::Analyticity(format!(
                    "non-finite value at η = {eta}, ξ = {xi}"
                )));
            }
            best = best.max(a);
        }
    }
    Ok(best)
}

/// `2Mρ/(1 − 1/r) · (r/4)^{−m}`. Decays in `m` only for `r > 4`.
pub fn function_bound(sup: f64, r: f64, rho: f64, m: usize) -> Result<f64> {
    if r.is_nan() || r <= 1.0 {
        return Err(Error::Parameter(format!("r must exceed 1, got {r}")));
    }
    if sup.is_nan() || sup < 0.0 || rho.is_nan() || rho < 1.0 {
        return Err(Error::Parameter(format!(
            "need M ≥ 0 and ρ ≥ 1, got M = {sup}, ρ = {rho}"
        )));
    }
    Ok(2.0 * sup * rho / (1.0 - 1.0 / r) * (r / 4.0).powi(-(m as i32)))
}

pub fn bound_decays(r: f64) -> bool {
    r > 4.0
}

/// Tensor grid on `[−1, 1]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Grid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        for pts in [&xs, &ys] {
            if pts.is_empty() {
                return Err(Error::Parameter("grid axes must be nonempty".into()));
            }
            if pts
                .windows(2)
                .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
            {
                return Err(Error::Parameter(
                    "grid points must be strictly increasing".into(),
                ));
            }
            if pts.iter().any(|&p| !(-1.0..=1.0).contains(&p)) {
                return Err(Error::Parameter("grid points must lie in [-1, 1]".into()));
            }
        }
        Ok(Grid { xs, ys })
    }

    /// `g` Chebyshev points of the second kind on each axis, ascending and
    /// exactly symmetric about 0.
    pub fn chebyshev(g: usize) -> Result<Self> {
        let pts = chebyshev_points(g)?;
        Grid::new(pts.clone(), pts)
    }
}

pub fn chebyshev_points(g: usize) -> Result<Vec<f64>> {
    if g < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 Chebyshev points, got {g}"
        )));
    }
    let n = (g - 1) as f64;
    Ok((0..g)
        .map(|j| (std::f64::consts::PI * (2.0 * j as f64 - n) / (2.0 * n)).sin())
        .collect())
}

/// `[f(x_i, y_j)]` over the grid.
pub fn sample<F: BivariateFunction + ?Sized>(f: &F, grid: &Grid) -> Matrix {
    Matrix::from_fn(grid.xs.len(), grid.ys.len(), |i, j| {
        f.eval(grid.xs[i], grid.ys[j])
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionCrossResult {
    pub grid: Grid,
    /// Chosen `(x_k, y_k)` in selection order.
    pub points: Vec<(f64, f64)>,
    /// Grid indices of the chosen points.
    pub point_indices: Vec<(usize, usize)>,
    /// `e_{k−1}(x_k, y_k)`.
    pub pivot_values: Vec<f64>,
    /// `e_m` on the grid.
    pub residual_grid: Matrix,
    /// `f_m` on the grid.
    pub approximant_grid: Matrix,
    pub error_max: f64,
    pub termination: Termination,
}

impl FunctionCrossResult {
    pub fn steps_completed(&self) -> usize {
        self.pivot_values.len()
    }

    /// `e_m(x, y)` at an arbitrary point, from `f` and the cross points.
    pub fn residual_at<F: BivariateFunction + ?Sized>(&self, f: &F, x: f64, y: f64) -> f64 {
        let m = self.points.len();
        let xs: Vec<f64> = self.points.iter().map(|p| p.0).chain([x]).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p.1).chain([y]).collect();
        let mut a = Matrix::from_fn(m + 1, m + 1, |i, j| f.eval(xs[i], ys[j]));
        for k in 0..m {
            let p = a[(k, k)];
            for i in k + 1..=m {
                let ci = a[(i, k)];
                for j in k + 1..=m {
                    a[(i, j)] -= ci * a[(k, j)] / p;
                }
            }
        }
        a[(m, m)]
    }
}

pub fn function_cross<F: BivariateFunction + ?Sized>(
    f: &F,
    m: usize,
    grid: &Grid,
) -> Result<FunctionCrossResult> {
    function_cross_with_tol(f, m, grid, DEFAULT_FUNCTION_BREAKDOWN_TOL)
}

/// Runs `m` steps of cross approximation of `f` with the argmax restricted
/// to `grid`. Ties go to the smallest `(x-index, y-index)`.
pub fn function_cross_with_tol<F: BivariateFunction + ?Sized>(
    f: &F,
    m: usize,
    grid: &Grid,
    tol: f64,
) -> Result<FunctionCrossResult> {
    if m == 0 {
        return Err(Error::Parameter(
            "function cross approximation needs m ≥ 1".into(),
        ));
    }
    let mut e = sample(f, grid);
    if e.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter(
            "function is not finite on the grid".into(),
        ));
    }
    let (gx, gy) = (grid.xs.len(), grid.ys.len());
    let mut approx = Matrix::zeros(gx, gy);
    let threshold = tol * e.max_norm();
    let mut result = FunctionCrossResult {
        grid: grid.clone(),
        points: Vec::with_capacity(m),
        point_indices: Vec::with_capacity(m),
        pivot_values: Vec::with_capacity(m),
        residual_grid: Matrix::zeros(1, 1),
        approximant_grid: Matrix::zeros(1, 1),
        error_max: 0.0,
        termination: Termination::RequestedRank,
    };

    for step in 0..m {
        let (mut bi, mut bj, mut best) = (0, 0, -1.0);
        for i in 0..gx {
            for j in 0..gy {
                let v = e[(i, j)].abs();
                if v > best {
                    (bi, bj, best) = (i, j, v);
                }
            }
        }
        if best <= threshold {
            if step == 0 {
                return Err(Error::ZeroFunction);
            }
            result.termination = Termination::Breakdown;
            break;
        }
        let p = e[(bi, bj)];
        // e_k(·, y_{k+1}) and e_k(x_{k+1}, ·) on the grid
        let along_x = e.col(bj);
        let along_y = e.row(bi).to_vec();
        for (i, &ci) in along_x.iter().enumerate() {
            if ci == 0.0 {
                continue;
            }
            for (j, &rj) in along_y.iter().enumerate() {
                let t = ci * rj / p;
                e[(i, j)] -= t;
                approx[(i, j)] += t;
            }
        }
        for j in 0..gy {
            e[(bi, j)] = 0.0;
        }
        for i in 0..gx {
            e[(i, bj)] = 0.0;
        }
        result.points.push((grid.xs[bi], grid.ys[bj]));
        result.point_indices.push((bi, bj));
        result.pivot_values.push(p);
    }
    result.error_max = e.max_norm();
    result.residual_grid = e;
    result.approximant_grid = approx;
    Ok(result)
}

/// `[f(x_i, y_j)]` over `(xs ∪ {x}) × (ys ∪ {y})`, the new point last.
pub fn build_interpolation_matrix<F: BivariateFunction + ?Sized>(
    f: &F,
    xs: &[f64],
    ys: &[f64],
    x: f64,
    y: f64,
) -> Result<Matrix> {
    if xs.len() != ys.len() {
        return Err(Error::dim(format!(
            "need as many x as y points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let xs: Vec<f64> = xs.iter().copied().chain([x]).collect();
    let ys: Vec<f64> = ys.iter().copied().chain([y]).collect();
    for (axis, pts) in [("x", &xs), ("y", &ys)] {
        for (a, &p) in pts.iter().enumerate() {
            if pts[..a].contains(&p) {
                return Err(Error::Precondition(format!("duplicate {axis} point {p}")));
            }
        }
    }
    let n = xs.len();
    Matrix::new(
        n,
        n,
        (0..n * n).map(|k| f.eval(xs[k / n], ys[k % n])).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_grid_shape() {
        let pts = chebyshev_points(5).unwrap();
        assert_eq!(pts[0], -1.0);
        assert_eq!(pts[4], 1.0);
        assert_eq!(pts[2], 0.0);
        assert_eq!(pts[1], -pts[3]);
        assert!(Grid::chebyshev(1).is_err());
        assert!(Grid::new(vec![0.0, 0.0], vec![0.0]).is_err());
        assert!(Grid::new(vec![0.0, 1.5], vec![0.0]).is_err());
    }

    #[test]
    fn product_is_rank_one() {
        let grid = Grid::chebyshev(33).unwrap();
        let res = function_cross(&TestFunction::Product, 1, &grid).unwrap();
        assert!(res.error_max < 1e-15);
        assert_eq!(res.pivot_values[0].abs(), 1.0);
        let res = function_cross(&TestFunction::Product, 2, &grid).unwrap();
        assert_eq!(res.termination, Termination::Breakdown);
        assert_eq!(res.steps_completed(), 1);
    }

    #[test]
    fn zero_function_is_reported() {
        let grid = Grid::chebyshev(9).unwrap();
        let zero = |_: f64, _: f64| 0.0;
        assert_eq!(
            function_cross(&zero, 2, &grid).unwrap_err(),
            Error::ZeroFunction
        );
        assert!(function_cross(&TestFunction::Gauss, 0, &grid).is_err());
    }

    #[test]
    fn telescoping_holds() {
        let grid = Grid::chebyshev(41).unwrap();
        let f = TestFunction::ExpXy;
        let res = function_cross(&f, 4, &grid).unwrap();
        let s = sample(&f, &grid);
        let sum = Matrix::from_fn(41, 41, |i, j| {
            res.approximant_grid[(i, j)] + res.residual_grid[(i, j)]
        });
        assert!(sum.sub(&s).unwrap().max_norm() <= 1e-10 * s.max_norm());
    }

    #[test]
    fn interpolation_matrix_cases() {
        let f = TestFunction::Gauss;
        let a = build_interpolation_matrix(&f, &[], &[], 0.3, -0.2).unwrap();
        assert_eq!(a.as_slice(), &[f.eval(0.3, -0.2)]);
        let a =
            build_interpolation_matrix(&TestFunction::Product, &[0.1, 0.5], &[-0.7, 0.9], 0.2, 0.3)
                .unwrap();
        let sv = crate::linalg::singular_values(&a);
        assert!(sv[1] < 1e-15);
        assert!(matches!(
            build_interpolation_matrix(&f, &[0.1, 0.5], &[0.2, 0.3], 0.5, 0.0),
            Err(Error::Precondition(_))
        ));
        assert!(build_interpolation_matrix(&f, &[0.1], &[], 0.5, 0.0).is_err());
    }

    #[test]
    fn ellipse_geometry() {
        let e = BernsteinEllipse::new(5.0).unwrap();
        let (a, b) = e.semi_axes();
        assert!((a + b - 5.0).abs() < 1e-15);
        let p0 = e.point(0.0);
        assert_eq!(p0.im, 0.0);
        assert!((p0.re - 2.6).abs() < 1e-15);
        assert!((e.point(std::f64::consts::PI).re + 2.6).abs() < 1e-14);
        assert!(BernsteinEllipse::new(1.0).is_err());
    }

    #[test]
    fn ellipse_sup_cases() {
        let one = ConstOne;
        let ys = chebyshev_points(9).unwrap();
        for r in [1.5, 3.0, 10.0] {
            assert!((ellipse_sup(&one, r, 64, &ys).unwrap() - 1.0).abs() < 1e-15);
        }
        let runge = TestFunction::Runge2d { c: 4.0 };
        let r0 = runge.bernstein_radius().unwrap();
        assert!((r0 - (3.0 + 8f64.sqrt())).abs() < 1e-12);
        let m = ellipse_sup(&runge, 5.0, 256, &ys).unwrap();
        // closest approach: η = −2.6, ξ = −1 gives |η + ξ + 4| = 0.4
        assert!((m - 2.5).abs() < 1e-12);
        assert!(matches!(
            ellipse_sup(&runge, 6.0, 16, &ys),
            Err(Error::Analyticity(_))
        ));
        let plain = |x: f64, y: f64| x + y;
        assert!(matches!(
            ellipse_sup(&plain, 2.0, 8, &ys),
            Err(Error::Analyticity(_))
        ));
    }

    struct ConstOne;
    impl BivariateFunction for ConstOne {
        fn eval(&self, _: f64, _: f64) -> f64 {
            1.0
        }
        fn eval_complex(&self, _: Complex64, _: f64) -> Option<Complex64> {
            Some(Complex64::new(1.0, 0.0))
        }
    }

    #[test]
    fn function_bound_values() {
        assert!((function_bound(1.0, 5.0, 1.0, 2).unwrap() - 1.6).abs() < 1e-14);
        assert_eq!(
            function_bound(1.0, 4.0, 1.0, 7).unwrap(),
            function_bound(1.0, 4.0, 1.0, 0).unwrap()
        );
        assert!(!bound_decays(4.0) && bound_decays(4.5));
        assert!((function_bound(3.0, 2.0, 1.0, 0).unwrap() - 12.0).abs() < 1e-14);
        assert!(matches!(
            function_bound(1.0, 1.0, 1.0, 1),
            Err(Error::Parameter(_))
        ));
        assert!(function_bound(1.0, 5.0, 0.5, 1).is_err());
    }

    #[test]
    fn test_function_names() {
        assert_eq!(
            TestFunction::from_name("runge2d", 4.0).unwrap(),
            TestFunction::Runge2d { c: 4.0 }
        );
        assert!(TestFunction::from_name("runge2d", 1.0).is_err());
        assert!(matches!(
            TestFunction::from_name("sin", 0.0),
            Err(Error::Usage(_))
        ));
    }
}
