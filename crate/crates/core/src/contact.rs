//! Contact sets, gradient images, ball inclusion and the area-formula check.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{gradient_and_hessian, normal_derivative, MatrixField, ScalarField, VectorField};
use crate::geometry::{unit_ball_volume, Grid, GridKind};
use crate::linalg::{det, sym_norm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Tangent planes lie below the graph.
    Lower,
    /// Tangent planes lie above the graph.
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ContactMask {
    grid: Arc<Grid>,
    marked: Vec<bool>,
    side: Side,
    tol: f64,
}

impl ContactMask {
    pub fn new(grid: Arc<Grid>, marked: Vec<bool>, side: Side, tol: f64) -> Result<Self> {
        if marked.len() != grid.len() {
            return Err(Error::InvalidArgument("mask length mismatch".into()));
        }
        Ok(ContactMask { grid, marked, side, tol })
    }

    /// Mask marking every node.
    pub fn full(grid: Arc<Grid>, side: Side) -> Self {
        let marked = vec![true; grid.len()];
        ContactMask { grid, marked, side, tol: 0.0 }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn contains(&self, i: usize) -> bool {
        self.marked[i]
    }

    pub fn marked(&self) -> &[bool] {
        &self.marked
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn count(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.marked.iter().any(|&m| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.marked.len()).filter(move |&i| self.marked[i])
    }
}

/// Largest Hessian spectral norm over all nodes.
pub fn max_hessian_norm(h: &MatrixField) -> f64 {
    let n = h.dim();
    (0..h.grid().len()).map(|i| sym_norm(h.at(i), n)).fold(0.0, f64::max)
}

/// Default contact tolerance `4·max‖∇²u‖·h²`, floored at roundoff scale.
pub fn default_tolerance(u: &ScalarField, h: &MatrixField) -> f64 {
    let spacing = u.grid().spacing();
    4.0 * max_hessian_norm(h) * spacing * spacing + 1e-12 * (1.0 + u.max_abs())
}

/// Contact set with the default tolerance.
pub fn contact_set(u: &ScalarField, side: Side) -> Result<ContactMask> {
    let (g, h) = gradient_and_hessian(u)?;
    let tol = default_tolerance(u, &h);
    Ok(contact_set_with(u, &g, side, tol))
}

/// Brute-force contact test: x is marked iff
/// `min_y [u(y) − u(x) − ∇u(x)·(y − x)] ≥ −tol` (lower side) or the mirrored
/// condition `max_y [...] ≤ tol` (upper side), over every node y.
///
/// Radial grids reduce the scan over the ball to its meridian: for each shell
/// radius s the extreme of `∇u(x)·y` is `±|u'(r)|·s`.
pub fn contact_set_with(u: &ScalarField, grad: &VectorField, side: Side, tol: f64) -> ContactMask {
    let grid = u.grid().clone();
    let v = u.values();
    let sign = match side {
        Side::Lower => 1.0,
        Side::Upper => -1.0,
    };
    let marked: Vec<bool> = match *grid.kind() {
        GridKind::Radial1d { hr, .. } => (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let r0 = i as f64 * hr;
                let d = grad.at(i)[0];
                (0..v.len()).all(|k| {
                    let s = k as f64 * hr;
                    let gap = sign * (v[k] - v[i] + d * r0) - d.abs() * s;
                    gap >= -tol
                })
            })
            .collect(),
        _ => {
            let dim = grid.dim();
            let coords = grid.coords();
            (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let x = &coords[i * dim..(i + 1) * dim];
                    let g = grad.at(i);
                    let ui = v[i];
                    (0..v.len()).all(|k| {
                        let y = &coords[k * dim..(k + 1) * dim];
                        let mut lin = 0.0;
                        for a in 0..dim {
                            lin += g[a] * (y[a] - x[a]);
                        }
                        sign * (v[k] - ui - lin) >= -tol
                    })
                })
                .collect()
        }
    };
    ContactMask { grid, marked, side, tol }
}

/// Worst violation of the defining inequality over marked nodes, recomputed
/// independently of the construction loop (0 when every marked node passes).
pub fn audit_mask(u: &ScalarField, grad: &VectorField, mask: &ContactMask) -> f64 {
    let grid = u.grid();
    let v = u.values();
    let sign = match mask.side {
        Side::Lower => 1.0,
        Side::Upper => -1.0,
    };
    let dim = grid.dim();
    mask.iter()
        .map(|i| {
            let mut worst: f64 = 0.0;
            for k in 0..grid.len() {
                let gap = match *grid.kind() {
                    GridKind::Radial1d { hr, .. } => {
                        let d = grad.at(i)[0];
                        sign * (v[k] - v[i] + d * i as f64 * hr) - d.abs() * k as f64 * hr
                    }
                    _ => {
                        let (x, y, g) = (grid.point(i), grid.point(k), grad.at(i));
                        let lin: f64 = (0..dim).map(|a| g[a] * (y[a] - x[a])).sum();
                        sign * (v[k] - v[i] - lin)
                    }
                };
                worst = worst.max(-gap - mask.tol);
            }
            worst
        })
        .fold(0.0, f64::max)
}

/// Occupancy boxes of ∇u over a contact set in a two-dimensional gradient space.
#[derive(Clone, Debug)]
pub struct GradientImage {
    lo: [f64; 2],
    dims: [usize; 2],
    h_g: f64,
    occupied: Vec<bool>,
}

impl GradientImage {
    pub fn box_size(&self) -> f64 {
        self.h_g
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// Box index containing `z`, if inside the stored range.
    pub fn locate(&self, z: [f64; 2]) -> Option<(usize, usize)> {
        let fx = ((z[0] - self.lo[0]) / self.h_g).floor();
        let fy = ((z[1] - self.lo[1]) / self.h_g).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.dims[0] as f64 || fy >= self.dims[1] as f64 {
            None
        } else {
            Some((fx as usize, fy as usize))
        }
    }

    pub fn is_occupied(&self, z: [f64; 2]) -> bool {
        self.locate(z).is_some_and(|(i, j)| self.occupied[i + j * self.dims[0]])
    }

    pub fn box_center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.lo[0] + (i as f64 + 0.5) * self.h_g,
            self.lo[1] + (j as f64 + 0.5) * self.h_g,
        ]
    }
}

/// Builds the gradient image of a two-dimensional field over `mask`.
///
/// Boxes have side `h_g = max(h·M, h)` with `h` the largest cell diagonal and
/// `M` the largest Hessian norm, so gradients at neighbouring nodes land in the
/// same or adjacent boxes.
pub fn gradient_image(grad: &VectorField, hess: &MatrixField, mask: &ContactMask) -> Result<GradientImage> {
    let grid = grad.grid();
    if grid.dim() != 2 || matches!(grid.kind(), GridKind::Radial1d { .. }) {
        return Err(Error::Unsupported("gradient images are two-dimensional".into()));
    }
    if mask.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let h = grid.max_cell_diagonal();
    let h_g = (h * max_hessian_norm(hess)).max(h);
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for i in mask.iter() {
        let z = grad.at(i);
        for a in 0..2 {
            lo[a] = lo[a].min(z[a]);
            hi[a] = hi[a].max(z[a]);
        }
    }
    let lo = [lo[0] - h_g, lo[1] - h_g];
    let dims = [
        ((hi[0] - lo[0]) / h_g).floor() as usize + 2,
        ((hi[1] - lo[1]) / h_g).floor() as usize + 2,
    ];
    let mut img = GradientImage {
        lo,
        dims,
        h_g,
        occupied: vec![false; dims[0] * dims[1]],
    };
    for i in mask.iter() {
        let z = grad.at(i);
        if let Some((bx, by)) = img.locate([z[0], z[1]]) {
            img.occupied[bx + by * dims[0]] = true;
        }
    }
    Ok(img)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub m: f64,
    pub delta: f64,
    pub covered: usize,
    pub total: usize,
    pub fraction: f64,
}

impl InclusionReport {
    pub fn pass(&self) -> bool {
        self.fraction == 1.0
    }
}

/// Checks that every box whose center lies in `B_{m−δ}(0)` is occupied.
pub fn verify_ball_inclusion(img: &GradientImage, m: f64, delta: f64) -> Result<InclusionReport> {
    if !(m > 0.0) {
        return Err(Error::InclusionHypothesis(m));
    }
    let target = m - delta;
    let (mut covered, mut total) = (0usize, 0usize);
    if target > 0.0 {
        let h = img.h_g;
        let kmin = |lo: f64| ((-target - lo) / h - 0.5).floor() as i64;
        let kmax = |lo: f64| ((target - lo) / h - 0.5).ceil() as i64;
        for bi in kmin(img.lo[0])..=kmax(img.lo[0]) {
            for bj in kmin(img.lo[1])..=kmax(img.lo[1]) {
                let c = [img.lo[0] + (bi as f64 + 0.5) * h, img.lo[1] + (bj as f64 + 0.5) * h];
                if c[0].hypot(c[1]) > target {
                    continue;
                }
                total += 1;
                let inside = bi >= 0 && bj >= 0 && (bi as usize) < img.dims[0] && (bj as usize) < img.dims[1];
                if inside && img.occupied[bi as usize + bj as usize * img.dims[0]] {
                    covered += 1;
                }
            }
        }
    }
    let fraction = if total == 0 { 1.0 } else { covered as f64 / total as f64 };
    Ok(InclusionReport { m, delta, covered, total, fraction })
}

/// End-to-end inclusion check for one side: contact set, image, inclusion
/// with `m = inf |∂u/∂ν|` and `δ = 2h_g`. An empty contact set yields a
/// failed report with fraction 0.
pub fn inclusion_check(u: &ScalarField, side: Side) -> Result<InclusionReport> {
    let (g, h) = gradient_and_hessian(u)?;
    let tol = default_tolerance(u, &h);
    let mask = contact_set_with(u, &g, side, tol);
    let m = normal_derivative(u, u.grid().boundary())?.inf_abs();
    if !(m > 0.0) {
        return Err(Error::InclusionHypothesis(m));
    }
    if mask.is_empty() {
        return Ok(InclusionReport { m, delta: 0.0, covered: 0, total: 1, fraction: 0.0 });
    }
    let img = gradient_image(&g, &h, &mask)?;
    verify_ball_inclusion(&img, m, 2.0 * img.box_size())
}

/// Weight functions g on gradient space.
#[derive(Clone)]
pub enum WeightFn {
    Unit,
    /// `(|z|ⁿ + δⁿ)^{−n}`.
    Regularized { delta: f64 },
    /// Arbitrary nonnegative weight; ball integrals by polar quadrature (2D).
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl fmt::Debug for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFn::Unit => f.write_str("Unit"),
            WeightFn::Regularized { delta } => write!(f, "Regularized {{ delta: {delta} }}"),
            WeightFn::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl WeightFn {
    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            WeightFn::Unit => 1.0,
            WeightFn::Regularized { delta } => {
                let n = z.len() as i32;
                let r: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                (r.powi(n) + delta.powi(n)).powi(-n)
            }
            WeightFn::Custom(f) => f(z),
        }
    }

    /// ∫_{B_m(0)} g in ℝⁿ.
    pub fn ball_integral(&self, m: f64, n: usize) -> Result<f64> {
        let b1 = unit_ball_volume(n);
        match self {
            WeightFn::Unit => Ok(b1 * m.powi(n as i32)),
            WeightFn::Regularized { delta } => {
                let ni = n as i32;
                let radial = |s: f64| (s.powi(ni) + delta.powi(ni)).powi(-ni) * n as f64 * b1 * s.powi(ni - 1);
                Ok(simpson(radial, 0.0, m, 20_000))
            }
            WeightFn::Custom(f) => {
                if n != 2 {
                    return Err(Error::Unsupported("custom weights integrate in two dimensions".into()));
                }
                let ring = |s: f64| {
                    simpson(|t: f64| f(&[s * t.cos(), s * t.sin()]), 0.0, 2.0 * PI, 512) * s
                };
                Ok(simpson(ring, 0.0, m, 2048))
            }
        }
    }
}

/// Composite Simpson rule with `panels` (rounded up to even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaFormula {
    pub lhs: f64,
    pub rhs: f64,
}

/// Both sides of `∫_{B_m} g ≤ ∫_Γ g(∇u)|det ∇²u|`; the determinant is clamped
/// to the sign the contact side forces (det ∇²u for lower, det(−∇²u) for upper).
pub fn area_formula_check(
    grad: &VectorField,
    hess: &MatrixField,
    mask: &ContactMask,
    g: &WeightFn,
    m: f64,
) -> Result<AreaFormula> {
    let grid = grad.grid();
    let n = grid.spec().dimension();
    let dim = grid.dim();
    let lhs = g.ball_integral(m, n)?;
    let mut neg = vec![0.0; dim * dim];
    let mut rhs = 0.0;
    for i in mask.iter() {
        let h = hess.at(i);
        let d = match mask.side() {
            Side::Lower => det(h, dim),
            Side::Upper => {
                for (a, b) in neg.iter_mut().zip(h) {
                    *a = -b;
                }
                det(&neg, dim)
            }
        };
        rhs += g.eval(grad.at(i)) * d.max(0.0) * grid.volume(i);
    }
    Ok(AreaFormula { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::fields::sample;
    use crate::geometry::{make_domain, DomainSpec};

    fn field(spec: DomainSpec, res: usize, e: Expr) -> ScalarField {
        let (g, _) = make_domain(&spec, res).unwrap();
        sample(&g, &e).unwrap()
    }

    #[test]
    fn quadratic_masks() {
        let u = field(DomainSpec::disk(1.0), 24, Expr::Quadratic { scale: 1.0 });
        let lower = contact_set(&u, Side::Lower).unwrap();
        assert_eq!(lower.count(), u.len());
        let upper = contact_set(&u, Side::Upper).unwrap();
        assert!(upper.is_empty());
        let w = field(DomainSpec::disk(1.0), 24, Expr::Quadratic { scale: -1.0 });
        assert!(contact_set(&w, Side::Lower).unwrap().is_empty());
        assert_eq!(contact_set(&w, Side::Upper).unwrap().count(), w.len());
    }

    /// Lower convex envelope of the even extension of a radial profile,
    /// returning the smallest positive radius where it touches the profile.
    fn envelope_radius(f: impl Fn(f64) -> f64, samples: usize) -> f64 {
        let xs: Vec<f64> = (0..=2 * samples).map(|k| -1.0 + k as f64 / samples as f64).collect();
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for &x in &xs {
            let p = (x, f(x));
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.iter().map(|p| p.0).filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn quartic_contact_radius_matches_envelope() {
        let rstar = envelope_radius(|s| s.powi(4) - s * s, 20_000);
        assert!((rstar - 0.5f64.sqrt()).abs() < 1e-3);
        let res = 48;
        let u = field(DomainSpec::disk(1.0), res, Expr::Quartic);
        let mask = contact_set(&u, Side::Lower).unwrap();
        let grid = u.grid();
        let inner = mask
            .iter()
            .map(|i| grid.radius_of(i))
            .fold(f64::INFINITY, f64::min);
        assert!((inner - rstar).abs() <= 2.0 * grid.spacing(), "inner {inner} vs {rstar}");
        for i in 0..grid.len() {
            if grid.radius_of(i) > rstar + 2.0 * grid.spacing() {
                assert!(mask.contains(i));
            }
        }
        let radial = field(DomainSpec::ball(2, 1.0), 400, Expr::Quartic);
        let rmask = contact_set(&radial, Side::Lower).unwrap();
        let rinner = rmask.iter().map(|i| radial.grid().radius_of(i)).fold(f64::INFINITY, f64::min);
        assert!((rinner - rstar).abs() <= 2.0 / 400.0, "radial {rinner}");
    }

    #[test]
    fn masks_pass_independent_audit() {
        for e in [Expr::Quartic, Expr::PerturbedQuadratic { eps: 0.05, freq: 5.0 }, Expr::SinX1] {
            let u = field(DomainSpec::disk(1.0), 20, e);
            let (g, h) = gradient_and_hessian(&u).unwrap();
            let tol = default_tolerance(&u, &h);
            for side in [Side::Lower, Side::Upper] {
                let mask = contact_set_with(&u, &g, side, tol);
                assert_eq!(audit_mask(&u, &g, &mask), 0.0);
                let tight = contact_set_with(&u, &g, side, 0.1 * tol);
                assert!(tight.iter().all(|i| mask.contains(i)));
            }
        }
    }

    #[test]
    fn inclusion_examples() {
        let q = field(DomainSpec::disk(1.0), 48, Expr::Quadratic { scale: 1.0 });
        let rep = inclusion_check(&q, Side::Lower).unwrap();
        assert!(rep.pass(), "{rep:?}");
        assert!((rep.m - 1.0).abs() < 1e-10);

        let nq = field(DomainSpec::disk(1.0), 48, Expr::Quadratic { scale: -1.0 });
        assert!(!inclusion_check(&nq, Side::Lower).unwrap().pass());
        assert!(inclusion_check(&nq, Side::Upper).unwrap().pass());

        let p = field(DomainSpec::disk(1.0), 48, Expr::PerturbedQuadratic { eps: 0.05, freq: 5.0 });
        assert!(inclusion_check(&p, Side::Lower).unwrap().pass());
    }

    #[test]
    fn affine_image_is_one_box() {
        let u = field(DomainSpec::disk(1.0), 16, Expr::Affine { a: vec![0.3, -0.7], b: 1.0 });
        let (g, h) = gradient_and_hessian(&u).unwrap();
        let mask = contact_set_with(&u, &g, Side::Lower, default_tolerance(&u, &h));
        let img = gradient_image(&g, &h, &mask).unwrap();
        assert_eq!(img.occupied_count(), 1);
        assert!(img.is_occupied([0.3, -0.7]));
        assert!(matches!(verify_ball_inclusion(&img, 0.0, 0.1), Err(Error::InclusionHypothesis(_))));
    }

    #[test]
    fn quadratic_area_formula_equality() {
        let u = field(DomainSpec::disk(1.0), 128, Expr::Quadratic { scale: 1.0 });
        let (g, h) = gradient_and_hessian(&u).unwrap();
        let mask = ContactMask::full(u.grid().clone(), Side::Lower);
        let a = area_formula_check(&g, &h, &mask, &WeightFn::Unit, 1.0).unwrap();
        assert!((a.lhs - PI).abs() < 1e-12);
        assert!((a.rhs / a.lhs - 1.0).abs() < 0.02);
        let r = area_formula_check(&g, &h, &mask, &WeightFn::Regularized { delta: 0.1 }, 1.0).unwrap();
        assert!(r.lhs.is_finite() && r.rhs.is_finite() && r.lhs > 0.0);
    }

    #[test]
    fn weight_integrals_agree() {
        let reg = WeightFn::Regularized { delta: 0.1 };
        let exact = PI * (1.0 / 0.01 - 1.0 / (1.0 + 0.01));
        let radial = reg.ball_integral(1.0, 2).unwrap();
        assert!((radial - exact).abs() < 1e-8 * exact);
        let custom = WeightFn::Custom(Arc::new(move |z: &[f64]| reg.eval(z)));
        let polar = custom.ball_integral(1.0, 2).unwrap();
        assert!((polar - exact).abs() < 1e-6 * exact, "{polar} vs {exact}");
    }
}
