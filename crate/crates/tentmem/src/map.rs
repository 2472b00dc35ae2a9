//! The memory process and its two-dimensional lift.
//!
//! The process iterates `x_{n+1} = tau(alpha*x_n + (1-alpha)*x_{n-1})` for a
//! piecewise-linear expanding base map `tau` on `[0,1]`. Because each update
//! consumes two consecutive states, the process is not a self-map of the
//! interval; it becomes a dynamical system on the unit square via the lift
//! `G(x, y) = (y, tau(alpha*y + (1-alpha)*x))`, whose orbit of state pairs
//! `(x_{n-1}, x_n)` carries all statistics of the process.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use serde::{Deserialize, Serialize};

/// Default tolerance for coordinate-domain checks.
pub const DOMAIN_TOL: f64 = 1e-12;
/// Orbit images must stay inside `[0,1]` up to this drift allowance;
/// beyond it the step reports [`Error::NumericalDrift`] instead of clamping.
pub const DRIFT_TOL: f64 = 1e-9;

/// The memory weight `alpha`.
///
/// `alpha` blends the current state (`alpha`) with the previous one
/// (`1 - alpha`). Values in `[0, 1)` are accepted: `alpha = 0` is the
/// degenerate full-memory case in which the two-step composition decouples
/// into the base map acting on each coordinate independently, and it is kept
/// available as a reference point for that identity. `alpha = 1` (no memory)
/// is rejected because the lift then collapses onto a graph and the planar
/// analysis in this crate does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alpha(f64);

impl Alpha {
    /// Validate and wrap a memory weight. Accepts `0 <= value < 1`.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..1.0).contains(&value) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1), got {value}"
            )));
        }
        Ok(Alpha(value))
    }

    /// The raw value.
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A state pair `(x, y) = (x_{n-1}, x_n)` in the closed unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    /// Construct a point, requiring both coordinates in `[0,1]` up to
    /// [`DRIFT_TOL`]. Values inside the allowance are kept as-is (never
    /// clamped) so exact dyadic arithmetic is preserved.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        for v in [x, y] {
            if !v.is_finite() || v < -DRIFT_TOL || v > 1.0 + DRIFT_TOL {
                return Err(Error::NumericalDrift {
                    value: v,
                    tol: DRIFT_TOL,
                });
            }
        }
        Ok(Point2 { x, y })
    }

    /// Euclidean distance to another point.
    pub fn dist(self, other: Point2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Which side of the partition line a state pair lies on.
///
/// `A2` is the region where the blend `S(x,y) = alpha*y + (1-alpha)*x`
/// reaches the base map's central breakpoint (`S >= 1/2`); the boundary is
/// assigned to `A2`, matching the base map's `1/2 <= x` branch convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionLabel {
    A1,
    A2,
}

/// A continuous piecewise-linear expanding self-map of `[0,1]`.
#[derive(Debug, Clone)]
pub struct BaseMap {
    /// Ascending breakpoints `a_0 = 0 < a_1 < ... < a_q = 1`.
    breakpoints: Vec<f64>,
    /// Slope of each branch (`q` entries).
    slopes: Vec<f64>,
    /// Intercept of each branch (`q` entries): branch `j` maps `x` to
    /// `slopes[j] * x + intercepts[j]`.
    intercepts: Vec<f64>,
}

impl BaseMap {
    /// Build a piecewise-linear map from breakpoints and per-branch
    /// slope/intercept, validating continuity, range, and expansion.
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, intercepts: Vec<f64>) -> Result<Self> {
        let q = slopes.len();
        if breakpoints.len() != q + 1 || intercepts.len() != q || q == 0 {
            return Err(Error::Domain(
                "need q+1 breakpoints and q slopes/intercepts".into(),
            ));
        }
        if (breakpoints[0] - 0.0).abs() > DOMAIN_TOL || (breakpoints[q] - 1.0).abs() > DOMAIN_TOL {
            return Err(Error::Domain("breakpoints must start at 0 and end at 1".into()));
        }
        for w in breakpoints.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Domain("breakpoints must be strictly ascending".into()));
            }
        }
        for j in 0..q {
            if slopes[j].abs() <= 1.0 {
                return Err(Error::Domain(format!(
                    "branch {} is not expanding (|slope| = {} <= 1)",
                    j + 1,
                    slopes[j].abs()
                )));
            }
            for endpoint in [breakpoints[j], breakpoints[j + 1]] {
                let v = slopes[j] * endpoint + intercepts[j];
                if v < -DOMAIN_TOL || v > 1.0 + DOMAIN_TOL {
                    return Err(Error::Domain(format!(
                        "branch {} image leaves [0,1] at x={endpoint} (value {v})",
                        j + 1
                    )));
                }
            }
            if j + 1 < q {
                let left = slopes[j] * breakpoints[j + 1] + intercepts[j];
                let right = slopes[j + 1] * breakpoints[j + 1] + intercepts[j + 1];
                if (left - right).abs() > DOMAIN_TOL {
                    return Err(Error::Domain(format!(
                        "discontinuity at breakpoint {} ({} vs {})",
                        breakpoints[j + 1],
                        left,
                        right
                    )));
                }
            }
        }
        Ok(BaseMap {
            breakpoints,
            slopes,
            intercepts,
        })
    }

    /// The symmetric tent map: `2x` on `[0, 1/2)`, `2 - 2x` on `[1/2, 1]`.
    pub fn tent() -> Self {
        BaseMap {
            breakpoints: vec![0.0, 0.5, 1.0],
            slopes: vec![2.0, -2.0],
            intercepts: vec![0.0, 2.0],
        }
    }

    /// Number of branches.
    pub fn branch_count(&self) -> usize {
        self.slopes.len()
    }

    /// Breakpoints `a_0..a_q`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Slope of branch `j` (1-based).
    pub fn slope(&self, branch: usize) -> Result<f64> {
        self.slopes
            .get(branch.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::InvalidIndex(format!("branch {branch}")))
    }

    /// 1-based branch index owning `x`; interior breakpoints belong to the
    /// branch on their right (the `a_j <= x` convention), `x = 1` to the last.
    pub fn branch_of(&self, x: f64) -> usize {
        let q = self.branch_count();
        for j in 1..q {
            if x < self.breakpoints[j] {
                return j;
            }
        }
        q
    }

    /// Evaluate the map. Domain error if `x` is outside `[0,1]` beyond
    /// [`DOMAIN_TOL`].
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < -DOMAIN_TOL || x > 1.0 + DOMAIN_TOL {
            return Err(Error::Domain(format!("base map argument {x} outside [0,1]")));
        }
        let j = self.branch_of(x.clamp(0.0, 1.0));
        Ok(self.slopes[j - 1] * x + self.intercepts[j - 1])
    }

    /// Image interval `[lo, hi]` of branch `j` (1-based).
    pub fn branch_image(&self, branch: usize) -> Result<(f64, f64)> {
        let j = branch;
        if j == 0 || j > self.branch_count() {
            return Err(Error::InvalidIndex(format!("branch {branch}")));
        }
        let a = self.slopes[j - 1] * self.breakpoints[j - 1] + self.intercepts[j - 1];
        let b = self.slopes[j - 1] * self.breakpoints[j] + self.intercepts[j - 1];
        Ok((a.min(b), a.max(b)))
    }
}

/// The symmetric tent map as a plain function: `2x` for `x < 1/2`, else `2 - 2x`.
pub fn tent(x: f64) -> Result<f64> {
    if !x.is_finite() || x < -DOMAIN_TOL || x > 1.0 + DOMAIN_TOL {
        return Err(Error::Domain(format!("tent argument {x} outside [0,1]")));
    }
    Ok(if x < 0.5 { 2.0 * x } else { 2.0 - 2.0 * x })
}

/// The blend `S(x, y) = alpha*y + (1-alpha)*x`, a convex combination of the
/// two stored states. The partition line of the lifted map is `S = 1/2`.
#[inline]
pub fn s_value(alpha: Alpha, p: Point2) -> f64 {
    let a = alpha.value();
    a * p.y + (1.0 - a) * p.x
}

/// Classify a state pair by the side of the partition line it lies on;
/// the boundary `S = 1/2` is assigned to `A2`.
#[inline]
pub fn classify(alpha: Alpha, p: Point2) -> RegionLabel {
    if s_value(alpha, p) >= 0.5 {
        RegionLabel::A2
    } else {
        RegionLabel::A1
    }
}

/// One step of the lifted map: `(x, y) -> (y, tau(S(x, y)))`.
pub fn g_step(alpha: Alpha, p: Point2, base: &BaseMap) -> Result<Point2> {
    let s = s_value(alpha, p);
    Point2::new(p.y, base.eval(s)?)
}

/// `n` successive images of `p0` after discarding the first `skip` images.
///
/// The returned sequence starts at the `(skip+1)`-th image, so with
/// `skip = 0` the first element is `G(p0)`, and consecutive elements satisfy
/// `out[k+1] = G(out[k])`.
pub fn orbit(alpha: Alpha, p0: Point2, n: usize, skip: usize, base: &BaseMap) -> Result<Vec<Point2>> {
    if n == 0 {
        return Err(Error::Domain("orbit length must be at least 1".into()));
    }
    let mut p = p0;
    for _ in 0..skip {
        p = g_step(alpha, p, base)?;
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        p = g_step(alpha, p, base)?;
        out.push(p);
    }
    Ok(out)
}

/// Derivative of the inverse branch of the lifted map.
///
/// For the branch of the lift built on base branch `j`, the inverse is
/// `(u, v) -> ((tau_j^{-1}(v) - alpha*u)/(1-alpha), u)` and its derivative is
/// the constant-per-branch matrix
/// `[[-alpha/(1-alpha), 1/((1-alpha)*tau_j')], [1, 0]]`.
/// `v` must lie in the image of branch `j`.
pub fn inverse_branch_derivative(
    alpha: Alpha,
    base: &BaseMap,
    branch: usize,
    v: f64,
) -> Result<Mat2> {
    let (lo, hi) = base.branch_image(branch)?;
    if v < lo - DOMAIN_TOL || v > hi + DOMAIN_TOL {
        return Err(Error::Domain(format!(
            "value {v} outside image [{lo}, {hi}] of branch {branch}"
        )));
    }
    let a = alpha.value();
    let slope = base.slope(branch)?;
    Ok(Mat2::new(
        -a / (1.0 - a),
        1.0 / ((1.0 - a) * slope),
        1.0,
        0.0,
    ))
}

/// A base map bundled with a memory weight: the complete lifted system.
#[derive(Debug, Clone)]
pub struct MemoryMap {
    pub alpha: Alpha,
    pub base: BaseMap,
}

impl MemoryMap {
    /// The lifted tent system at weight `alpha`.
    pub fn tent(alpha: Alpha) -> Self {
        MemoryMap {
            alpha,
            base: BaseMap::tent(),
        }
    }

    /// One step of the lift.
    pub fn step(&self, p: Point2) -> Result<Point2> {
        g_step(self.alpha, p, &self.base)
    }

    /// Orbit convenience; see [`orbit`].
    pub fn orbit(&self, p0: Point2, n: usize, skip: usize) -> Result<Vec<Point2>> {
        orbit(self.alpha, p0, n, skip, &self.base)
    }

    /// Region of a point; see [`classify`].
    pub fn classify(&self, p: Point2) -> RegionLabel {
        classify(self.alpha, p)
    }

    /// Blend value; see [`s_value`].
    pub fn s(&self, p: Point2) -> f64 {
        s_value(self.alpha, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }
    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y).unwrap()
    }

    #[test]
    fn tent_examples() {
        assert_eq!(tent(0.25).unwrap(), 0.5);
        assert_eq!(tent(0.5).unwrap(), 1.0);
        assert_eq!(tent(0.75).unwrap(), 0.5);
        assert!(tent(1.1).is_err());
        assert!(tent(-0.1).is_err());
    }

    #[test]
    fn tent_is_continuous_and_in_range() {
        let base = BaseMap::tent();
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            let v = base.eval(x).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!((v - tent(x).unwrap()).abs() == 0.0);
        }
    }

    #[test]
    fn s_value_examples() {
        assert_eq!(s_value(a(0.5), p(0.4, 0.4)), 0.4);
        assert_eq!(s_value(a(0.25), p(1.0, 0.0)), 0.75);
        // Point on the line x + y = 4/3 with x = 1/3 at alpha = 3/4.
        let s = s_value(a(0.75), p(1.0 / 3.0, 1.0));
        assert!((s - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(a(0.5), p(0.4, 0.4)), RegionLabel::A1);
        assert_eq!(classify(a(0.5), p(0.6, 0.6)), RegionLabel::A2);
        // Boundary belongs to A2.
        assert_eq!(classify(a(0.5), p(0.5, 0.5)), RegionLabel::A2);
    }

    #[test]
    fn g_step_examples() {
        let base = BaseMap::tent();
        // (2/3, 2/3) is fixed for every alpha.
        for v in [0.1, 0.3, 0.5, 0.75, 0.9] {
            let q = g_step(a(v), p(2.0 / 3.0, 2.0 / 3.0), &base).unwrap();
            assert!(q.dist(p(2.0 / 3.0, 2.0 / 3.0)) < 1e-15);
        }
        // alpha = 1/2 upper-triangle formula (y, 2 - x - y).
        let q = g_step(a(0.5), p(1.0, 1.0), &base).unwrap();
        assert_eq!((q.x, q.y), (1.0, 0.0));
        // alpha = 0: one step gives (y, tau(x)).
        let q = g_step(a(0.0), p(0.25, 0.9), &base).unwrap();
        assert_eq!((q.x, q.y), (0.9, 0.5));
    }

    #[test]
    fn shift_structure() {
        let base = BaseMap::tent();
        for (av, x, y) in [(0.3, 0.2, 0.7), (0.45, 0.9, 0.05), (0.6, 0.5, 0.5)] {
            let q = g_step(a(av), p(x, y), &base).unwrap();
            assert_eq!(q.x, y);
        }
    }

    #[test]
    fn alpha_zero_two_step_decouples() {
        let base = BaseMap::tent();
        for (x, y) in [(0.1, 0.8), (0.33, 0.77), (0.5, 0.25)] {
            let q1 = g_step(a(0.0), p(x, y), &base).unwrap();
            let q2 = g_step(a(0.0), q1, &base).unwrap();
            assert_eq!(q2.x, tent(x).unwrap());
            assert_eq!(q2.y, tent(y).unwrap());
        }
    }

    #[test]
    fn orbit_examples() {
        let base = BaseMap::tent();
        // Period 3 at alpha = 1/2.
        let o = orbit(a(0.5), p(1.0, 1.0), 3, 0, &base).unwrap();
        assert_eq!((o[0].x, o[0].y), (1.0, 0.0));
        assert_eq!((o[1].x, o[1].y), (0.0, 1.0));
        assert_eq!((o[2].x, o[2].y), (1.0, 1.0));
        // Swap on x + y = 4/3 at alpha = 3/4.
        let o = orbit(a(0.75), p(1.0 / 3.0, 1.0), 2, 0, &base).unwrap();
        assert!(o[0].dist(p(1.0, 1.0 / 3.0)) < 1e-15);
        assert!(o[1].dist(p(1.0 / 3.0, 1.0)) < 1e-15);
        // Attraction to the fixed point at alpha = 0.6.
        let o = orbit(a(0.6), p(0.9, 0.1), 1, 2000, &base).unwrap();
        assert!(o[0].dist(p(2.0 / 3.0, 2.0 / 3.0)) < 1e-6);
    }

    #[test]
    fn inverse_branch_derivative_examples() {
        let base = BaseMap::tent();
        let m1 = inverse_branch_derivative(a(0.5), &base, 1, 0.3).unwrap();
        assert_eq!(m1.entries(), (-1.0, 1.0, 1.0, 0.0));
        let m2 = inverse_branch_derivative(a(0.5), &base, 2, 0.3).unwrap();
        assert_eq!(m2.entries(), (-1.0, -1.0, 1.0, 0.0));
        assert!(inverse_branch_derivative(a(0.5), &base, 3, 0.3).is_err());
    }

    #[test]
    fn inverse_branch_derivative_top_singular_value_at_least_one() {
        let base = BaseMap::tent();
        for av in [0.05, 0.2, 0.35, 0.49, 0.6, 0.74, 0.9] {
            for branch in [1, 2] {
                let m = inverse_branch_derivative(a(av), &base, branch, 0.5).unwrap();
                assert!(
                    singular_values(m).s1 >= 1.0 - 1e-12,
                    "sigma1 < 1 at alpha {av} branch {branch}"
                );
            }
        }
    }

    #[test]
    fn inverse_branch_derivative_matches_finite_differences() {
        // Differentiate the explicit inverse
        // (u, v) -> ((tau_j^{-1}(v) - alpha*u)/(1-alpha), u)
        // numerically and compare with the matrix.
        let base = BaseMap::tent();
        let al = a(0.3);
        let alv = al.value();
        let inv = |j: usize, u: f64, v: f64| -> (f64, f64) {
            let tinv = if j == 1 { v / 2.0 } else { 1.0 - v / 2.0 };
            ((tinv - alv * u) / (1.0 - alv), u)
        };
        let h = 1e-6;
        for j in [1, 2] {
            let m = inverse_branch_derivative(al, &base, j, 0.4).unwrap();
            let (u, v) = (0.3, 0.4);
            let f0 = inv(j, u, v);
            let fu = inv(j, u + h, v);
            let fv = inv(j, u, v + h);
            let (m11, m12, m21, m22) = m.entries();
            assert!((m11 - (fu.0 - f0.0) / h).abs() < 1e-6);
            assert!((m12 - (fv.0 - f0.0) / h).abs() < 1e-6);
            assert!((m21 - (fu.1 - f0.1) / h).abs() < 1e-6);
            assert!((m22 - (fv.1 - f0.1) / h).abs() < 1e-6);
        }
    }

    #[test]
    fn forward_then_inverse_derivative_is_identity() {
        // The inverse-branch derivative is the matrix inverse of the forward
        // branch derivative.
        let base = BaseMap::tent();
        for av in [0.2, 0.3, 0.45] {
            let al = a(av);
            for branch in [1usize, 2] {
                let fwd = crate::linalg::branch_matrix(al, branch).unwrap();
                let inv = inverse_branch_derivative(al, &base, branch, 0.5).unwrap();
                let prod = fwd.mul(&inv);
                let (p11, p12, p21, p22) = prod.entries();
                assert!((p11 - 1.0).abs() < 1e-12);
                assert!(p12.abs() < 1e-12);
                assert!(p21.abs() < 1e-12);
                assert!((p22 - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn only_two_fixed_points() {
        // Scan a fine grid for near-fixed points and refine; all candidates
        // must converge to (0,0) or (2/3,2/3).
        let base = BaseMap::tent();
        for av in [0.21, 0.37, 0.52, 0.68] {
            let al = a(av);
            let n = 400;
            for i in 0..=n {
                for j in 0..=n {
                    let q = p(i as f64 / n as f64, j as f64 / n as f64);
                    let img = g_step(al, q, &base).unwrap();
                    if img.dist(q) < 1e-2 {
                        // Refine: a genuine fixed point must satisfy y = x and
                        // tau(x) = x, i.e. x in {0, 2/3}.
                        let near0 = q.dist(p(0.0, 0.0)) < 5e-2;
                        let near23 = q.dist(p(2.0 / 3.0, 2.0 / 3.0)) < 5e-2;
                        assert!(
                            near0 || near23,
                            "unexpected near-fixed point {q:?} at alpha {av}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn drift_is_reported_not_clamped() {
        assert!(Point2::new(1.0 + 1e-6, 0.5).is_err());
        assert!(Point2::new(0.5, -1e-10).is_ok()); // within drift tolerance
        assert!(Point2::new(0.5, -1e-8).is_err());
    }

    #[test]
    fn base_map_validation() {
        // Non-expanding branch rejected.
        assert!(BaseMap::new(vec![0.0, 1.0], vec![0.9], vec![0.0]).is_err());
        // Discontinuity rejected.
        assert!(BaseMap::new(vec![0.0, 0.5, 1.0], vec![2.0, 2.0], vec![0.0, 0.5]).is_err());
        // Image out of range rejected.
        assert!(BaseMap::new(vec![0.0, 1.0], vec![2.0], vec![0.5]).is_err());
    }
}
