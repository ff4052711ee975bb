//! B-spline spaces, the polar annulus geometry and Gauss–Legendre quadrature.
//!
//! Open spaces are clamped (the end basis functions interpolate). Periodic spaces are built on an
//! extended knot vector with `degree` extra knots on each side; basis functions whose index
//! differs by the number of elements are identified.

use crate::error::{Result, SimError};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
    periodic: bool,
}

impl KnotVector {
    /// Clamped knot vector on `[a, b]` with the given breakpoints (first and last are the ends).
    pub fn open_from_breakpoints(degree: usize, breakpoints: &[f64]) -> Result<Self> {
        if degree == 0 {
            return Err(SimError::invalid("spline degree must be at least 1"));
        }
        if breakpoints.len() < 2 {
            return Err(SimError::invalid("need at least one element"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SimError::invalid("breakpoints must be strictly increasing"));
        }
        let (a, b) = (breakpoints[0], breakpoints[breakpoints.len() - 1]);
        let mut knots = vec![a; degree + 1];
        knots.extend_from_slice(&breakpoints[1..breakpoints.len() - 1]);
        knots.extend(std::iter::repeat(b).take(degree + 1));
        Ok(Self {
            degree,
            knots,
            periodic: false,
        })
    }

    pub fn open_uniform(degree: usize, n_elements: usize, a: f64, b: f64) -> Result<Self> {
        if n_elements == 0 {
            return Err(SimError::invalid("need at least one element"));
        }
        let bp: Vec<f64> = (0..=n_elements)
            .map(|i| a + (b - a) * i as f64 / n_elements as f64)
            .collect();
        Self::open_from_breakpoints(degree, &bp)
    }

    /// Uniform periodic knot vector with period `b - a`.
    pub fn periodic_uniform(degree: usize, n_elements: usize, a: f64, b: f64) -> Result<Self> {
        if degree == 0 {
            // a single periodic element of degree zero leaves no room for a proper basis
            return Err(SimError::invalid(
                "periodic spline space of degree 0 is not supported",
            ));
        }
        if n_elements == 0 {
            return Err(SimError::invalid("need at least one element"));
        }
        if !(b > a) {
            return Err(SimError::invalid("empty parametric interval"));
        }
        let h = (b - a) / n_elements as f64;
        let knots = (0..=n_elements + 2 * degree)
            .map(|j| a + (j as f64 - degree as f64) * h)
            .collect();
        Ok(Self {
            degree,
            knots,
            periodic: true,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn n_elements(&self) -> usize {
        self.knots.len() - 2 * self.degree - 1
    }

    /// Parametric domain `[a, b]`; for periodic vectors `b - a` is the period.
    pub fn domain(&self) -> (f64, f64) {
        let p = self.degree;
        (self.knots[p], self.knots[self.knots.len() - 1 - p])
    }

    pub fn dimension(&self) -> usize {
        if self.periodic {
            self.n_elements()
        } else {
            self.knots.len() - self.degree - 1
        }
    }

    /// Element boundaries `[x_e, x_{e+1}]` for element `e`.
    pub fn element_bounds(&self, e: usize) -> (f64, f64) {
        (self.knots[self.degree + e], self.knots[self.degree + e + 1])
    }

    /// Maps `x` into the domain (wrapping periodic spaces) and returns `(element, x)`.
    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let (a, b) = self.domain();
        let x = if self.periodic {
            let period = b - a;
            let mut y = a + (x - a).rem_euclid(period);
            if y >= b {
                y = a;
            }
            y
        } else {
            let tol = 1e-12 * (b - a).abs().max(1.0);
            if x < a - tol || x > b + tol {
                return Err(SimError::OutOfDomain { x, lo: a, hi: b });
            }
            x.clamp(a, b)
        };
        let ne = self.n_elements();
        // knots[p..p+ne+1] are the breakpoints
        let bps = &self.knots[self.degree..=self.degree + ne];
        let e = match bps.partition_point(|&t| t <= x) {
            0 => 0,
            i => (i - 1).min(ne - 1),
        };
        Ok((e, x))
    }
}

/// Clamped (`periodic = false`) or periodic uniform knot vector on `[0, 1]`.
pub fn make_knot_vector(degree: usize, n_elements: usize, periodic: bool) -> Result<KnotVector> {
    if periodic {
        KnotVector::periodic_uniform(degree, n_elements, 0.0, 1.0)
    } else {
        KnotVector::open_uniform(degree, n_elements, 0.0, 1.0)
    }
}

/// Nonzero basis functions at a point: global indices with values and first derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisValues {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace1D {
    knot_vector: KnotVector,
    dimension: usize,
}

impl SplineSpace1D {
    pub fn new(knot_vector: KnotVector) -> Self {
        let dimension = knot_vector.dimension();
        Self {
            knot_vector,
            dimension,
        }
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.knot_vector
    }

    pub fn degree(&self) -> usize {
        self.knot_vector.degree
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn n_elements(&self) -> usize {
        self.knot_vector.n_elements()
    }

    pub fn is_periodic(&self) -> bool {
        self.knot_vector.periodic
    }

    pub fn domain(&self) -> (f64, f64) {
        self.knot_vector.domain()
    }

    pub fn element_bounds(&self, e: usize) -> (f64, f64) {
        self.knot_vector.element_bounds(e)
    }

    /// Global index of local function `a` (0..=degree) on element `e`.
    #[inline]
    pub fn global_index(&self, e: usize, a: usize) -> usize {
        let i = e + a;
        if self.knot_vector.periodic {
            i % self.dimension
        } else {
            i
        }
    }

    /// Values and derivatives of the `degree + 1` functions supported on element `e` at `x`
    /// (which should lie in that element; no wrapping is applied).
    pub fn eval_on_element(&self, e: usize, x: f64, values: &mut [f64], derivs: &mut [f64]) {
        let p = self.knot_vector.degree;
        let span = p + e;
        ders_basis(&self.knot_vector.knots, p, span, x, values, derivs);
    }

    pub fn eval_basis(&self, x: f64) -> Result<BasisValues> {
        let (e, x) = self.knot_vector.locate(x)?;
        let p = self.degree();
        let mut values = vec![0.0; p + 1];
        let mut derivatives = vec![0.0; p + 1];
        self.eval_on_element(e, x, &mut values, &mut derivatives);
        let indices = (0..=p).map(|a| self.global_index(e, a)).collect();
        Ok(BasisValues {
            indices,
            values,
            derivatives,
        })
    }

    /// Evaluates `sum_i coeffs[i] * N_i(x)`.
    pub fn eval_function(&self, coeffs: &[f64], x: f64) -> Result<f64> {
        let b = self.eval_basis(x)?;
        Ok(b.indices.iter().zip(&b.values).map(|(&i, v)| coeffs[i] * v).sum())
    }

    /// Greville abscissae, wrapped into the domain for periodic spaces.
    pub fn greville_points(&self) -> Vec<f64> {
        let p = self.degree();
        let t = &self.knot_vector.knots;
        let (a, b) = self.domain();
        (0..self.dimension)
            .map(|i| {
                let g = t[i + 1..=i + p].iter().sum::<f64>() / p as f64;
                if self.is_periodic() {
                    a + (g - a).rem_euclid(b - a)
                } else {
                    g
                }
            })
            .collect()
    }
}

/// Cox–de Boor evaluation of the nonzero basis functions and their first derivatives on `span`.
fn ders_basis(knots: &[f64], p: usize, span: usize, x: f64, values: &mut [f64], derivs: &mut [f64]) {
    // ndu[j][r]: basis values (upper triangle) and knot differences (lower triangle)
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for j in 0..=p {
        values[j] = ndu[j][p];
    }
    if p == 0 {
        derivs[0] = 0.0;
        return;
    }
    for r in 0..=p {
        let mut d = 0.0;
        if r >= 1 {
            d += ndu[r - 1][p - 1] / ndu[p][r - 1];
        }
        if r < p {
            d -= ndu[r][p - 1] / ndu[p][r];
        }
        derivs[r] = d * p as f64;
    }
}

/// Tensor-product spline patch on the annulus `r_inner <= r <= r_outer`, parameterized by
/// `(rho, theta)` with `r = r_inner + (r_outer - r_inner) * rho`, `rho` in `[0, 1]` and `theta`
/// in `[0, 2π)`. Degrees of freedom are numbered `i_radial * n_angular + j_angular`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnularPatch {
    r_inner: f64,
    r_outer: f64,
    radial_space: SplineSpace1D,
    angular_space: SplineSpace1D,
}

impl AnnularPatch {
    pub fn new(
        r_inner: f64,
        r_outer: f64,
        radial_space: SplineSpace1D,
        angular_space: SplineSpace1D,
    ) -> Result<Self> {
        if !(r_inner > 0.0 && r_outer > r_inner) {
            return Err(SimError::invalid(format!(
                "annulus radii must satisfy 0 < r_inner < r_outer, got {r_inner}, {r_outer}"
            )));
        }
        if radial_space.is_periodic() || radial_space.domain() != (0.0, 1.0) {
            return Err(SimError::invalid("radial space must be open on [0, 1]"));
        }
        let (a, b) = angular_space.domain();
        if !angular_space.is_periodic() || a != 0.0 || ((b - 2.0 * PI).abs() > 1e-14) {
            return Err(SimError::invalid("angular space must be periodic on [0, 2π]"));
        }
        Ok(Self {
            r_inner,
            r_outer,
            radial_space,
            angular_space,
        })
    }

    /// Uniform patch of the given degree in both directions.
    pub fn uniform(
        r_inner: f64,
        r_outer: f64,
        radial_elements: usize,
        angular_elements: usize,
        degree: usize,
    ) -> Result<Self> {
        let radial = SplineSpace1D::new(KnotVector::open_uniform(degree, radial_elements, 0.0, 1.0)?);
        let angular =
            SplineSpace1D::new(KnotVector::periodic_uniform(degree, angular_elements, 0.0, 2.0 * PI)?);
        Self::new(r_inner, r_outer, radial, angular)
    }

    /// Patch whose radial knot lines sit at the given physical radii (first/last are the ends).
    pub fn with_radial_breakpoints(radii: &[f64], angular_elements: usize, degree: usize) -> Result<Self> {
        if radii.len() < 2 {
            return Err(SimError::invalid("need at least two radii"));
        }
        let (r0, r1) = (radii[0], radii[radii.len() - 1]);
        if !(r0 > 0.0 && r1 > r0) {
            return Err(SimError::invalid("radii must be positive and increasing"));
        }
        let mut rho: Vec<f64> = radii.iter().map(|r| (r - r0) / (r1 - r0)).collect();
        let last = rho.len() - 1;
        rho[0] = 0.0;
        rho[last] = 1.0;
        let radial = SplineSpace1D::new(KnotVector::open_from_breakpoints(degree, &rho)?);
        let angular =
            SplineSpace1D::new(KnotVector::periodic_uniform(degree, angular_elements, 0.0, 2.0 * PI)?);
        Self::new(r0, r1, radial, angular)
    }

    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    pub fn radial_space(&self) -> &SplineSpace1D {
        &self.radial_space
    }

    pub fn angular_space(&self) -> &SplineSpace1D {
        &self.angular_space
    }

    pub fn n_radial(&self) -> usize {
        self.radial_space.dimension()
    }

    pub fn n_angular(&self) -> usize {
        self.angular_space.dimension()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_radial() * self.n_angular()
    }

    #[inline]
    pub fn dof(&self, i_radial: usize, j_angular: usize) -> usize {
        i_radial * self.n_angular() + j_angular
    }

    #[inline]
    pub fn radius(&self, rho: f64) -> f64 {
        self.r_inner + (self.r_outer - self.r_inner) * rho
    }

    pub fn map(&self, rho: f64, theta: f64) -> (f64, f64) {
        let r = self.radius(rho);
        (r * theta.cos(), r * theta.sin())
    }

    /// `|det J|` of `(rho, theta) -> (x, y)`.
    pub fn jacobian_det(&self, rho: f64) -> f64 {
        self.radius(rho) * (self.r_outer - self.r_inner)
    }

    /// Dofs of the ring `r = r_inner` in angular order.
    pub fn inner_ring(&self) -> Vec<usize> {
        (0..self.n_angular()).map(|j| self.dof(0, j)).collect()
    }

    /// Dofs of the ring `r = r_outer` in angular order.
    pub fn outer_ring(&self) -> Vec<usize> {
        let last = self.n_radial() - 1;
        (0..self.n_angular()).map(|j| self.dof(last, j)).collect()
    }

    /// Evaluates the field with coefficient vector `coeffs` at physical polar point `(r, theta)`.
    pub fn eval_field(&self, coeffs: &[f64], r: f64, theta: f64) -> Result<f64> {
        let rho = (r - self.r_inner) / (self.r_outer - self.r_inner);
        let br = self.radial_space.eval_basis(rho)?;
        let ba = self.angular_space.eval_basis(theta)?;
        let mut s = 0.0;
        for (&i, vi) in br.indices.iter().zip(&br.values) {
            for (&j, vj) in ba.indices.iter().zip(&ba.values) {
                s += coeffs[self.dof(i, j)] * vi * vj;
            }
        }
        Ok(s)
    }
}

/// Gauss–Legendre points and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

pub const MAX_GAUSS_POINTS: usize = 64;

/// n-point Gauss–Legendre rule (Newton iteration on the Legendre recurrence).
pub fn gauss_rule(n: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_GAUSS_POINTS).contains(&n) {
        return Err(SimError::invalid(format!(
            "Gauss rule needs 1..={MAX_GAUSS_POINTS} points, got {n}"
        )));
    }
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    Ok(QuadratureRule { points, weights })
}

/// `(P_n(x), P_n'(x))`
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clamped_quadratic_knots() {
        let kv = make_knot_vector(2, 4, false).unwrap();
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0]);
        assert_eq!(kv.dimension(), 6);
    }

    #[test]
    fn hat_functions() {
        let kv = make_knot_vector(1, 2, false).unwrap();
        assert_eq!(kv.knots(), &[0.0, 0.0, 0.5, 1.0, 1.0]);
        let s = SplineSpace1D::new(kv);
        assert_eq!(s.dimension(), 3);
        let b = s.eval_basis(0.25).unwrap();
        assert_eq!(b.indices, vec![0, 1]);
        assert!((b.values[0] - 0.5).abs() < 1e-15 && (b.values[1] - 0.5).abs() < 1e-15);
        assert!((b.derivatives[0] + 2.0).abs() < 1e-14 && (b.derivatives[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_dimension_equals_elements() {
        let kv = make_knot_vector(2, 8, true).unwrap();
        assert_eq!(kv.dimension(), 8);
        assert_eq!(kv.domain(), (0.0, 1.0));
    }

    #[test]
    fn degree_zero_periodic_rejected() {
        assert!(make_knot_vector(0, 1, true).is_err());
        assert!(make_knot_vector(0, 3, false).is_err());
    }

    #[test]
    fn open_space_rejects_points_outside() {
        let s = SplineSpace1D::new(make_knot_vector(2, 4, false).unwrap());
        assert!(matches!(s.eval_basis(1.5), Err(SimError::OutOfDomain { .. })));
        assert!(s.eval_basis(-0.1).is_err());
        assert!(s.eval_basis(1.0).is_ok());
    }

    #[test]
    fn periodic_wraps_and_matches() {
        let s = SplineSpace1D::new(KnotVector::periodic_uniform(3, 7, 0.0, 2.0 * PI).unwrap());
        let a = s.eval_basis(0.3).unwrap();
        let b = s.eval_basis(0.3 + 2.0 * PI).unwrap();
        let c = s.eval_basis(0.3 - 4.0 * PI).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(a.indices, b.indices);
        assert_eq!(a.indices, c.indices);
    }

    #[test]
    fn periodic_basis_is_continuous_across_seam() {
        let s = SplineSpace1D::new(KnotVector::periodic_uniform(2, 6, 0.0, 1.0).unwrap());
        let eps = 1e-9;
        let mut left = vec![0.0; 6];
        let mut right = vec![0.0; 6];
        let bl = s.eval_basis(1.0 - eps).unwrap();
        let br = s.eval_basis(eps).unwrap();
        for (i, v) in bl.indices.iter().zip(&bl.values) {
            left[*i] += v;
        }
        for (i, v) in br.indices.iter().zip(&br.values) {
            right[*i] += v;
        }
        for (l, r) in left.iter().zip(&right) {
            assert!((l - r).abs() < 1e-7);
        }
    }

    #[test]
    fn gauss_small_rules() {
        let g1 = gauss_rule(1).unwrap();
        assert_eq!(g1.points, vec![0.0]);
        assert!((g1.weights[0] - 2.0).abs() < 1e-15);
        let g2 = gauss_rule(2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!((g2.points[0] + x).abs() < 1e-15 && (g2.points[1] - x).abs() < 1e-15);
        assert!((g2.weights[0] - 1.0).abs() < 1e-15 && (g2.weights[1] - 1.0).abs() < 1e-15);
        let g3 = gauss_rule(3).unwrap();
        assert!((g3.integrate(-1.0, 1.0, |x| x.powi(4)) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn gauss_out_of_range() {
        assert!(gauss_rule(0).is_err());
        assert!(gauss_rule(65).is_err());
        assert!(gauss_rule(64).is_ok());
    }

    #[test]
    fn gauss_exactness_degree() {
        for n in 1..=64usize {
            let g = gauss_rule(n).unwrap();
            let wsum: f64 = g.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n}");
            assert!(g.weights.iter().all(|&w| w > 0.0));
            let dmax = (2 * n - 1).min(40);
            for d in 0..=dmax {
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                let got = g.integrate(-1.0, 1.0, |x| x.powi(d as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} d={d}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn circumference_is_exact() {
        let radius = 0.0443;
        let patch = AnnularPatch::uniform(0.02, radius, 4, 96, 2).unwrap();
        let ang = patch.angular_space();
        let g = gauss_rule(3).unwrap();
        let mut length = 0.0;
        let mut vals = vec![0.0; 3];
        let mut ders = vec![0.0; 3];
        for e in 0..ang.n_elements() {
            let (a, b) = ang.element_bounds(e);
            for (x, w) in g.mapped(a, b) {
                ang.eval_on_element(e, x, &mut vals, &mut ders);
                let (dx, dy) = (-radius * x.sin(), radius * x.cos());
                length += w * (dx * dx + dy * dy).sqrt() * vals.iter().sum::<f64>();
            }
        }
        assert!((length / (2.0 * PI * radius) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobian_positive() {
        let patch = AnnularPatch::uniform(1.0, 2.0, 2, 8, 2).unwrap();
        assert!((patch.jacobian_det(0.5) - 1.5).abs() < 1e-15);
        assert!(AnnularPatch::uniform(2.0, 1.0, 2, 8, 2).is_err());
        assert!(AnnularPatch::uniform(0.0, 1.0, 2, 8, 2).is_err());
    }

    fn spaces() -> impl Strategy<Value = SplineSpace1D> {
        (1usize..=4, 1usize..=12, any::<bool>()).prop_map(|(p, n, periodic)| {
            let kv = if periodic {
                KnotVector::periodic_uniform(p, n.max(p), 0.0, 2.0 * PI).unwrap()
            } else {
                KnotVector::open_uniform(p, n, 0.0, 1.0).unwrap()
            };
            SplineSpace1D::new(kv)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn partition_of_unity(space in spaces(), u in 0.0f64..1.0) {
            let (a, b) = space.domain();
            let x = a + (b - a) * u;
            let bv = space.eval_basis(x).unwrap();
            prop_assert_eq!(bv.values.len(), space.degree() + 1);
            let sum: f64 = bv.values.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-13);
            prop_assert!(bv.values.iter().all(|&v| v >= -1e-15));
            let dsum: f64 = bv.derivatives.iter().sum();
            prop_assert!(dsum.abs() < 1e-9 * space.n_elements() as f64);
            prop_assert!(bv.indices.iter().all(|&i| i < space.dimension()));
        }
    }
}
