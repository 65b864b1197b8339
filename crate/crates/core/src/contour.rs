//! Closed contours and their quadrature rules.
//!
//! Quadrature weights are normalized so that `Σ w_j f(z_j)` approximates
//! `(1/2πi) ∮ f(z) dz` directly; the residue of `(z − λ)⁻¹` at an interior
//! `λ` therefore sums to one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A closed, counterclockwise curve in the complex plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Contour {
    /// `γ + a cos θ + i b sin θ`
    Ellipse { center: Complex64, a: f64, b: f64 },
    /// Axis-aligned rectangle; optional per-side Gauss-Legendre counts for
    /// the sampling rule (`n_long` on the two longer sides).
    Rectangle {
        lower_left: Complex64,
        upper_right: Complex64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_long: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_short: Option<usize>,
    },
}

impl Contour {
    pub fn ellipse(center: Complex64, a: f64, b: f64) -> Result<Self> {
        let c = Contour::Ellipse { center, a, b };
        c.validate()?;
        Ok(c)
    }

    pub fn circle(center: Complex64, radius: f64) -> Result<Self> {
        Self::ellipse(center, radius, radius)
    }

    pub fn rectangle(lower_left: Complex64, upper_right: Complex64) -> Result<Self> {
        let c = Contour::Rectangle { lower_left, upper_right, n_long: None, n_short: None };
        c.validate()?;
        Ok(c)
    }

    /// Rectangle whose sampling rule places `n_long` Gauss points on each
    /// long side and `n_short` on each short side.
    pub fn rectangle_with_sides(
        lower_left: Complex64,
        upper_right: Complex64,
        n_long: usize,
        n_short: usize,
    ) -> Result<Self> {
        let c = Contour::Rectangle {
            lower_left,
            upper_right,
            n_long: Some(n_long),
            n_short: Some(n_short),
        };
        c.validate()?;
        Ok(c)
    }

    /// Checks shape parameters. Errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Contour::Ellipse { center, a, b } => {
                if !(center.re.is_finite() && center.im.is_finite()) {
                    return Err(Error::InvalidParameter("contour.center: must be finite".into()));
                }
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::InvalidParameter(format!("contour.a: must be positive, got {a}")));
                }
                if !(b > 0.0 && b.is_finite()) {
                    return Err(Error::InvalidParameter(format!("contour.b: must be positive, got {b}")));
                }
            }
            Contour::Rectangle { lower_left, upper_right, n_long, n_short } => {
                if !(upper_right.re > lower_left.re && upper_right.re.is_finite() && lower_left.re.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "contour.upper_right: width must be positive".into(),
                    ));
                }
                if !(upper_right.im > lower_left.im && upper_right.im.is_finite() && lower_left.im.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "contour.upper_right: height must be positive".into(),
                    ));
                }
                match (n_long, n_short) {
                    (None, None) => {}
                    (Some(l), Some(s)) if l >= 1 && s >= 1 => {}
                    (Some(0), _) => return Err(Error::InvalidParameter("contour.n_long: must be >= 1".into())),
                    (_, Some(0)) => return Err(Error::InvalidParameter("contour.n_short: must be >= 1".into())),
                    _ => {
                        return Err(Error::InvalidParameter(
                            "contour.n_long: n_long and n_short must be given together".into(),
                        ))
                    }
                }
            }
        }
        Ok(())
    }

    /// Shift γ used by the scaled moments.
    pub fn center(&self) -> Complex64 {
        match *self {
            Contour::Ellipse { center, .. } => center,
            Contour::Rectangle { lower_left, upper_right, .. } => (lower_left + upper_right) * 0.5,
        }
    }

    /// Scale ρ used by the scaled moments: `max(a, b)` for an ellipse, the
    /// larger half side for a rectangle.
    pub fn scale(&self) -> f64 {
        match *self {
            Contour::Ellipse { a, b, .. } => a.max(b),
            Contour::Rectangle { lower_left, upper_right, .. } => {
                let d = upper_right - lower_left;
                0.5 * d.re.max(d.im)
            }
        }
    }

    /// Real interval spanned by the contour.
    pub fn real_interval(&self) -> (f64, f64) {
        match *self {
            Contour::Ellipse { center, a, .. } => (center.re - a, center.re + a),
            Contour::Rectangle { lower_left, upper_right, .. } => (lower_left.re, upper_right.re),
        }
    }

    /// True when `z` lies strictly inside, at least `margin` away from the
    /// boundary (measured along the axes for the rectangle, radially in the
    /// normalized metric for the ellipse).
    pub fn contains(&self, z: Complex64, margin: f64) -> bool {
        match *self {
            Contour::Ellipse { center, a, b } => {
                let d = z - center;
                let r = ((d.re / a).powi(2) + (d.im / b).powi(2)).sqrt();
                r < 1.0 - margin / a.max(b)
            }
            Contour::Rectangle { lower_left, upper_right, .. } => {
                z.re > lower_left.re + margin
                    && z.re < upper_right.re - margin
                    && z.im > lower_left.im + margin
                    && z.im < upper_right.im - margin
            }
        }
    }

    /// Quadrature rule with about `n` nodes. Rectangles distribute nodes
    /// over the sides in proportion to side length.
    pub fn quadrature(&self, n: usize) -> Result<QuadratureSet> {
        match *self {
            Contour::Ellipse { center, a, b } => ellipse_trapezoid(center, a, b, n),
            Contour::Rectangle { lower_left, upper_right, .. } => {
                if n < 4 {
                    return Err(Error::InvalidParameter(format!(
                        "a rectangle needs at least 4 nodes, got {n}"
                    )));
                }
                let d = upper_right - lower_left;
                let (long, short) = (d.re.max(d.im), d.re.min(d.im));
                let half = n / 2;
                let n_long = ((half as f64 * long / (long + short)).round() as usize).clamp(1, half - 1);
                rectangle_gauss(lower_left, upper_right, n_long, half - n_long)
            }
        }
    }

    /// Sampling rule with `n` nodes. Rectangles with explicit side counts
    /// use them and require `n = 2 (n_long + n_short)`.
    pub fn sampling_quadrature(&self, n: usize) -> Result<QuadratureSet> {
        match *self {
            Contour::Rectangle {
                lower_left,
                upper_right,
                n_long: Some(l),
                n_short: Some(s),
            } => {
                if 2 * (l + s) != n {
                    return Err(Error::InvalidParameter(format!(
                        "rsrr.N: rectangle side counts give {} nodes, config asks for {n}",
                        2 * (l + s)
                    )));
                }
                rectangle_gauss(lower_left, upper_right, l, s)
            }
            _ => self.quadrature(n),
        }
    }
}

/// Quadrature nodes and weights on a closed contour.
#[derive(Clone, Debug)]
pub struct QuadratureSet {
    pub nodes: Vec<Complex64>,
    /// Include the `1/(2πi)` factor.
    pub weights: Vec<Complex64>,
    /// Unit tangents (counterclockwise), used to nudge a node off an eigenvalue.
    pub tangents: Vec<Complex64>,
    /// Contour scale ρ.
    pub scale: f64,
}

impl QuadratureSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node `index` moved by `1e-8 ρ` along the tangent.
    pub fn perturbed_node(&self, index: usize) -> Complex64 {
        self.nodes[index] + self.tangents[index] * (1e-8 * self.scale)
    }
}

/// Midpoint trapezoid rule on `γ + a cos θ + i b sin θ`, with
/// `θ_j = 2π (j + ½) / N` and weights `φ′(θ_j) / (iN)`.
pub fn ellipse_trapezoid(center: Complex64, a: f64, b: f64, n: usize) -> Result<QuadratureSet> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!("ellipse semi-axes must be positive, got ({a}, {b})")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("trapezoid rule needs N >= 2, got {n}")));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    for j in 0..n {
        let theta = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        let (s, c) = theta.sin_cos();
        nodes.push(center + Complex64::new(a * c, b * s));
        let dphi = Complex64::new(-a * s, b * c);
        weights.push(dphi / (I * n as f64));
        tangents.push(dphi / dphi.norm());
    }
    Ok(QuadratureSet { nodes, weights, tangents, scale: a.max(b) })
}

/// Gauss-Legendre rules on the four sides of an axis-aligned rectangle,
/// traversed counterclockwise from the lower-left vertex. `n_long` points go
/// on each of the two longer sides, `n_short` on each shorter side.
pub fn rectangle_gauss(
    lower_left: Complex64,
    upper_right: Complex64,
    n_long: usize,
    n_short: usize,
) -> Result<QuadratureSet> {
    let d = upper_right - lower_left;
    if !(d.re > 0.0 && d.im > 0.0) {
        return Err(Error::InvalidParameter("rectangle must have positive width and height".into()));
    }
    if n_long == 0 || n_short == 0 {
        return Err(Error::InvalidParameter("rectangle sides need at least one node".into()));
    }
    let (n_horizontal, n_vertical) = if d.re >= d.im { (n_long, n_short) } else { (n_short, n_long) };
    let lower_right = Complex64::new(upper_right.re, lower_left.im);
    let upper_left = Complex64::new(lower_left.re, upper_right.im);
    let sides = [
        (lower_left, lower_right, n_horizontal),
        (lower_right, upper_right, n_vertical),
        (upper_right, upper_left, n_horizontal),
        (upper_left, lower_left, n_vertical),
    ];
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut tangents = Vec::new();
    for (start, end, count) in sides {
        let (x, w) = gauss_legendre(count);
        let mid = (start + end) * 0.5;
        let half = (end - start) * 0.5;
        let tangent = half / half.norm();
        for (xk, wk) in x.iter().zip(&w) {
            nodes.push(mid + half * *xk);
            weights.push(half * *wk / (2.0 * PI * I));
            tangents.push(tangent);
        }
    }
    let scale = 0.5 * d.re.max(d.im);
    Ok(QuadratureSet { nodes, weights, tangents, scale })
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() <= 1e-16 * t.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        dp = if d.is_finite() { d } else { dp };
        let weight = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// `((z − γ)/ρ)^α`
pub fn scaled_basis_value(z: Complex64, center: Complex64, scale: f64, power: u32) -> Complex64 {
    ((z - center) / scale).powu(power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cauchy_sum(q: &QuadratureSet, lambda: Complex64) -> Complex64 {
        q.nodes.iter().zip(&q.weights).map(|(z, w)| w / (z - lambda)).sum()
    }

    #[test]
    fn unit_circle_midpoint_nodes() {
        let q = ellipse_trapezoid(c(0.0, 0.0), 1.0, 1.0, 4).unwrap();
        for (k, z) in q.nodes.iter().enumerate() {
            let expected = Complex64::from_polar(1.0, PI * (2 * k + 1) as f64 / 4.0);
            assert!((z - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn interior_residue_sums_to_one() {
        let q = ellipse_trapezoid(c(1.0, -2.0), 3.0, 0.5, 256).unwrap();
        assert!((cauchy_sum(&q, c(1.0, -2.0)) - 1.0).norm() <= 1e-12);
    }

    #[test]
    fn exterior_residue_sums_to_zero() {
        let (a, b) = (3.0, 2.0);
        let q = ellipse_trapezoid(c(0.0, 0.0), a, b, 64).unwrap();
        let outside = c(0.0, 2.0 * a.max(b));
        assert!(cauchy_sum(&q, outside).norm() <= 1e-10);
    }

    #[test]
    fn ellipse_nodes_lie_on_curve() {
        let (g, a, b) = (c(9.9, 0.8), 10.1, 1.01);
        let q = ellipse_trapezoid(g, a, b, 100).unwrap();
        for z in &q.nodes {
            let r = ((z.re - g.re) / a).powi(2) + ((z.im - g.im) / b).powi(2);
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trapezoid_converges_exponentially() {
        let g = c(0.0, 0.0);
        let lambda = c(0.3, 0.2);
        let errs: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| (cauchy_sum(&ellipse_trapezoid(g, 1.0, 0.8, n).unwrap(), lambda) - 1.0).norm())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] * w[0] + 1e-14, "{errs:?}");
        }
    }

    #[test]
    fn trapezoid_rejects_bad_parameters() {
        assert!(ellipse_trapezoid(c(0.0, 0.0), 0.0, 1.0, 8).is_err());
        assert!(ellipse_trapezoid(c(0.0, 0.0), 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1usize, 2, 5, 10, 37] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact up to degree 2n − 1
            let deg = 2 * n - 2;
            let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((integral - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn unit_square_winding() {
        let q = rectangle_gauss(c(0.0, 0.0), c(1.0, 1.0), 16, 16).unwrap();
        assert!((cauchy_sum(&q, c(0.5, 0.5)) - 1.0).norm() < 1e-10);
        assert!(cauchy_sum(&q, c(2.5, 0.5)).norm() < 1e-8);
    }

    #[test]
    fn ten_five_layout_has_thirty_nodes() {
        let q = rectangle_gauss(c(140.0, 0.0), c(335.4, 50.0), 10, 5).unwrap();
        assert_eq!(q.len(), 30);
        // long sides are horizontal here: the first side carries 10 nodes
        assert!(q.nodes[..10].iter().all(|z| z.im.abs() < 1e-12));
        let contour = Contour::rectangle_with_sides(c(140.0, 0.0), c(335.4, 50.0), 12, 6).unwrap();
        assert_eq!(contour.sampling_quadrature(36).unwrap().len(), 36);
        assert!(contour.sampling_quadrature(30).is_err());
    }

    #[test]
    fn orientation_is_counterclockwise() {
        let rect = rectangle_gauss(c(-1.0, -2.0), c(3.0, 1.0), 6, 4).unwrap();
        let ell = ellipse_trapezoid(c(0.0, 0.0), 2.0, 1.0, 16).unwrap();
        for q in [rect, ell] {
            let s = cauchy_sum(&q, c(0.1, -0.1));
            assert!(s.re > 0.9 && s.re < 1.1);
        }
    }

    #[test]
    fn scaled_basis_examples() {
        assert_eq!(scaled_basis_value(c(3.0, 4.0), c(1.0, 1.0), 2.0, 0), c(1.0, 0.0));
        let v = scaled_basis_value(c(1.0, 1.0) + 2.0, c(1.0, 1.0), 2.0, 5);
        assert!((v - 1.0).norm() < 1e-15);
    }

    #[test]
    fn containment_and_scale() {
        let e = Contour::ellipse(c(9.9, 0.8), 10.1, 1.01).unwrap();
        assert_eq!(e.scale(), 10.1);
        assert!(e.contains(c(9.9, 0.8), 1e-10));
        assert!(!e.contains(c(9.9, 2.0), 1e-10));
        let r = Contour::rectangle(c(140.0, 0.0), c(335.4, 50.0)).unwrap();
        assert!(r.contains(c(200.0, 10.0), 1e-8));
        assert!(!r.contains(c(200.0, -1.0), 1e-8));
        assert!((r.scale() - 97.7).abs() < 1e-12);
    }

    #[test]
    fn validation_names_the_field() {
        let err = Contour::ellipse(c(0.0, 0.0), 1.0, -1.0).unwrap_err().to_string();
        assert!(err.contains("contour.b"), "{err}");
    }

    proptest! {
        #[test]
        fn scaled_basis_magnitude(re in -5.0..5.0f64, im in -5.0..5.0f64, rho in 0.1..10.0f64, alpha in 0u32..12) {
            let z = c(re, im);
            let g = c(0.5, -0.25);
            let v = scaled_basis_value(z, g, rho, alpha);
            let bound = ((z - g).norm() / rho).powi(alpha as i32);
            prop_assert!(v.norm() <= bound * (1.0 + 1e-12) + 1e-300);
        }
    }
}
