//! Grid functions and finite-difference calculus.
//!
//! All stencils are second order and reproduce polynomials of degree two
//! exactly. Polar grids use trigonometrically fitted angular stencils (exact on
//! the Fourier modes 0, 1, 2 that quadratics occupy on every ring) and a center
//! node treated through the discrete Fourier coefficients of the first ring.

use std::sync::Arc;

use crate::contact::ContactMask;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{BoundarySampling, Grid, GridKind};

#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    source: Option<String>,
}

#[derive(Clone, Debug)]
pub struct VectorField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

/// Symmetric `n×n` matrix per node, stored row-major in full.
#[derive(Clone, Debug)]
pub struct MatrixField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct BoundaryScalar {
    sampling: Arc<BoundarySampling>,
    values: Vec<f64>,
}

fn check_finite(grid: &Grid, values: &[f64]) -> Result<()> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        let node = i / (values.len() / grid.len()).max(1);
        return Err(Error::NonFinite {
            node,
            location: grid.point(node).to_vec(),
            value: values[i],
        });
    }
    Ok(())
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        check_finite(&grid, &values)?;
        Ok(ScalarField { grid, values, source: None })
    }

    /// Evaluates `f` at node coordinates relative to the domain center.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.local(i))).collect();
        ScalarField::new(grid.clone(), values)
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise map; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        ScalarField::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        ScalarField::new(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        self.map(|v| s * v)
    }
}

fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || (a.len() == b.len() && a.spec() == b.spec() && a.resolution() == b.resolution()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument("fields live on different grids".into()))
    }
}

impl VectorField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() * grid.dim() {
            return Err(Error::InvalidArgument("vector field length mismatch".into()));
        }
        check_finite(&grid, &values)?;
        Ok(VectorField { grid, values })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn at(&self, i: usize) -> &[f64] {
        let n = self.grid.dim();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn norm(&self, i: usize) -> f64 {
        self.at(i).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Component `k` as a scalar field.
    pub fn component(&self, k: usize) -> Result<ScalarField> {
        let n = self.grid.dim();
        ScalarField::new(self.grid.clone(), (0..self.grid.len()).map(|i| self.values[i * n + k]).collect())
    }
}

impl MatrixField {
    /// Builds a matrix field, mirroring the upper triangle into the lower one.
    pub fn new(grid: Arc<Grid>, mut values: Vec<f64>) -> Result<Self> {
        let n = grid.dim();
        if values.len() != grid.len() * n * n {
            return Err(Error::InvalidArgument("matrix field length mismatch".into()));
        }
        for m in values.chunks_mut(n * n) {
            for i in 0..n {
                for j in i + 1..n {
                    m[j * n + i] = m[i * n + j];
                }
            }
        }
        check_finite(&grid, &values)?;
        Ok(MatrixField { grid, values })
    }

    /// Constant matrix at every node.
    pub fn constant(grid: Arc<Grid>, m: &[f64]) -> Result<Self> {
        let values = m.iter().copied().cycle().take(grid.len() * m.len()).collect();
        MatrixField::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn at(&self, i: usize) -> &[f64] {
        let n = self.grid.dim();
        &self.values[i * n * n..(i + 1) * n * n]
    }

    pub fn trace(&self, i: usize) -> f64 {
        let n = self.dim();
        (0..n).map(|k| self.at(i)[k * n + k]).sum()
    }

    /// Frobenius norm squared, Σ m_ij².
    pub fn frobenius_sq(&self, i: usize) -> f64 {
        self.at(i).iter().map(|v| v * v).sum()
    }
}

impl BoundaryScalar {
    pub fn new(sampling: Arc<BoundarySampling>, values: Vec<f64>) -> Result<Self> {
        if values.len() != sampling.len() {
            return Err(Error::InvalidArgument("boundary value count mismatch".into()));
        }
        Ok(BoundaryScalar { sampling, values })
    }

    pub fn sampling(&self) -> &Arc<BoundarySampling> {
        &self.sampling
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Minimum and maximum over edge samples (rectangle corners excluded).
    pub fn edge_range(&self) -> (f64, f64) {
        self.sampling
            .edge_samples()
            .map(|k| self.values[k])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// Infimum of |g| over edge samples.
    pub fn inf_abs(&self) -> f64 {
        self.sampling
            .edge_samples()
            .map(|k| self.values[k].abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Samples a registry expression at every node.
pub fn sample(grid: &Arc<Grid>, expr: &Expr) -> Result<ScalarField> {
    Ok(ScalarField::from_fn(grid, |x| expr.value(x))?.with_source(expr.tag()))
}

/// Polar-grid stencil coefficients for the angular derivatives.
#[derive(Clone, Copy, Debug)]
pub(crate) struct AngularStencil {
    /// First derivative: a1·(u₊₁ − u₋₁) + a2·(u₊₂ − u₋₂).
    pub a: [f64; 2],
    /// Second derivative: b0·u + b1·(u₊₁ + u₋₁) + b2·(u₊₂ + u₋₂).
    pub b: [f64; 3],
}

impl AngularStencil {
    pub fn new(h: f64) -> Self {
        // Fit so that e^{ikθ} is differentiated exactly for k = 0, 1, 2.
        let (s1, s2, s4) = (h.sin(), (2.0 * h).sin(), (4.0 * h).sin());
        let det = 2.0 * (s1 * s4 - s2 * s2);
        let a1 = (s4 - 2.0 * s2) / det;
        let a2 = (2.0 * s1 - s2) / det;
        let (c1, c2, c4) = (h.cos(), (2.0 * h).cos(), (4.0 * h).cos());
        // b0 + 2b1 + 2b2 = 0, b0 + 2b1 c1 + 2b2 c2 = −1, b0 + 2b1 c2 + 2b2 c4 = −4
        let (r1, r2) = (-1.0, -4.0);
        let m11 = 2.0 * (c1 - 1.0);
        let m12 = 2.0 * (c2 - 1.0);
        let m21 = 2.0 * (c2 - 1.0);
        let m22 = 2.0 * (c4 - 1.0);
        let d = m11 * m22 - m12 * m21;
        let b1 = (r1 * m22 - m12 * r2) / d;
        let b2 = (m11 * r2 - m21 * r1) / d;
        let b0 = -2.0 * (b1 + b2);
        AngularStencil { a: [a1, a2], b: [b0, b1, b2] }
    }

    fn d1(&self, ring: &[f64], j: usize) -> f64 {
        let n = ring.len();
        let at = |k: isize| ring[(j as isize + k).rem_euclid(n as isize) as usize];
        self.a[0] * (at(1) - at(-1)) + self.a[1] * (at(2) - at(-2))
    }

    fn d2(&self, ring: &[f64], j: usize) -> f64 {
        let n = ring.len();
        let at = |k: isize| ring[(j as isize + k).rem_euclid(n as isize) as usize];
        self.b[0] * at(0) + self.b[1] * (at(1) + at(-1)) + self.b[2] * (at(2) + at(-2))
    }
}

/// Discrete Fourier data of the first polar ring: (c0, c1, s1, c2, s2).
fn ring_fourier(ring: &[f64], htheta: f64) -> [f64; 5] {
    let n = ring.len() as f64;
    let mut out = [0.0; 5];
    for (j, &v) in ring.iter().enumerate() {
        let t = j as f64 * htheta;
        out[0] += v;
        out[1] += v * t.cos();
        out[2] += v * t.sin();
        out[3] += v * (2.0 * t).cos();
        out[4] += v * (2.0 * t).sin();
    }
    out[0] /= n;
    for v in &mut out[1..] {
        *v *= 2.0 / n;
    }
    out
}

/// Second-order first derivative along a line of samples `u[0..m]` with spacing `h`.
fn line_d1(u: &[f64], k: usize, h: f64) -> f64 {
    let m = u.len();
    if k == 0 {
        (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    } else if k == m - 1 {
        (3.0 * u[m - 1] - 4.0 * u[m - 2] + u[m - 3]) / (2.0 * h)
    } else {
        (u[k + 1] - u[k - 1]) / (2.0 * h)
    }
}

/// Second-order second derivative; four-point one-sided at the ends.
fn line_d2(u: &[f64], k: usize, h: f64) -> f64 {
    let m = u.len();
    if k == 0 {
        (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h)
    } else if k == m - 1 {
        (2.0 * u[m - 1] - 5.0 * u[m - 2] + 4.0 * u[m - 3] - u[m - 4]) / (h * h)
    } else {
        (u[k + 1] - 2.0 * u[k] + u[k - 1]) / (h * h)
    }
}

/// Partial derivatives in the natural frame of each grid.
struct Derivatives {
    grad: Vec<f64>,
    hess: Vec<f64>,
}

fn polar_derivatives(u: &ScalarField, nr: usize, ntheta: usize, hr: f64, htheta: f64) -> Derivatives {
    let grid = u.grid();
    let v = u.values();
    let n = grid.len();
    let st = AngularStencil::new(htheta);
    let mut grad = vec![0.0; 2 * n];
    let mut hess = vec![0.0; 4 * n];
    let ring = |i: usize| &v[1 + (i - 1) * ntheta..1 + i * ntheta];

    // u_θ on every ring, with u_θ = 0 at the center.
    let mut u_theta = vec![0.0; n];
    for i in 1..=nr {
        let r = ring(i);
        for j in 0..ntheta {
            u_theta[1 + (i - 1) * ntheta + j] = st.d1(r, j);
        }
    }

    let mut line = vec![0.0; nr + 1];
    let mut line_t = vec![0.0; nr + 1];
    for j in 0..ntheta {
        line[0] = v[0];
        line_t[0] = 0.0;
        for i in 1..=nr {
            line[i] = v[1 + (i - 1) * ntheta + j];
            line_t[i] = u_theta[1 + (i - 1) * ntheta + j];
        }
        let t = j as f64 * htheta;
        let (s, c) = t.sin_cos();
        for i in 1..=nr {
            let idx = 1 + (i - 1) * ntheta + j;
            let r = i as f64 * hr;
            let ur = line_d1(&line, i, hr);
            let urr = line_d2(&line, i, hr);
            let ut = line_t[i];
            let urt = line_d1(&line_t, i, hr);
            let utt = st.d2(ring(i), j);
            let h_rr = urr;
            let h_rt = urt / r - ut / (r * r);
            let h_tt = ur / r + utt / (r * r);
            let ut_r = ut / r;
            grad[2 * idx] = ur * c - ut_r * s;
            grad[2 * idx + 1] = ur * s + ut_r * c;
            // H = h_rr r̂r̂ᵀ + h_rt (r̂θ̂ᵀ + θ̂r̂ᵀ) + h_tt θ̂θ̂ᵀ with r̂ = (c, s), θ̂ = (−s, c).
            let h11 = h_rr * c * c - 2.0 * h_rt * c * s + h_tt * s * s;
            let h22 = h_rr * s * s + 2.0 * h_rt * c * s + h_tt * c * c;
            let h12 = (h_rr - h_tt) * c * s + h_rt * (c * c - s * s);
            hess[4 * idx] = h11;
            hess[4 * idx + 1] = h12;
            hess[4 * idx + 2] = h12;
            hess[4 * idx + 3] = h22;
        }
    }

    let f = ring_fourier(ring(1), htheta);
    let tr = 4.0 * (f[0] - v[0]) / (hr * hr);
    let d = 4.0 * f[3] / (hr * hr);
    grad[0] = f[1] / hr;
    grad[1] = f[2] / hr;
    hess[0] = 0.5 * (tr + d);
    hess[3] = 0.5 * (tr - d);
    hess[1] = 2.0 * f[4] / (hr * hr);
    hess[2] = hess[1];
    Derivatives { grad, hess }
}

fn cartesian_derivatives(u: &ScalarField, nx: usize, ny: usize, hx: f64, hy: f64) -> Derivatives {
    let v = u.values();
    let n = nx * ny;
    let mut ux = vec![0.0; n];
    let mut uy = vec![0.0; n];
    let mut uxx = vec![0.0; n];
    let mut uyy = vec![0.0; n];
    let mut row = vec![0.0; nx];
    let mut col = vec![0.0; ny];
    for j in 0..ny {
        row.copy_from_slice(&v[j * nx..(j + 1) * nx]);
        for i in 0..nx {
            ux[i + j * nx] = line_d1(&row, i, hx);
            uxx[i + j * nx] = line_d2(&row, i, hx);
        }
    }
    for i in 0..nx {
        for j in 0..ny {
            col[j] = v[i + j * nx];
        }
        for j in 0..ny {
            uy[i + j * nx] = line_d1(&col, j, hy);
            uyy[i + j * nx] = line_d2(&col, j, hy);
        }
    }
    // Mixed partial: average of ∂y(∂x u) and ∂x(∂y u).
    let mut uxy = vec![0.0; n];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = ux[i + j * nx];
        }
        for j in 0..ny {
            uxy[i + j * nx] += 0.5 * line_d1(&col, j, hy);
        }
    }
    for j in 0..ny {
        row.copy_from_slice(&uy[j * nx..(j + 1) * nx]);
        for i in 0..nx {
            uxy[i + j * nx] += 0.5 * line_d1(&row, i, hx);
        }
    }
    let mut grad = vec![0.0; 2 * n];
    let mut hess = vec![0.0; 4 * n];
    for k in 0..n {
        grad[2 * k] = ux[k];
        grad[2 * k + 1] = uy[k];
        hess[4 * k] = uxx[k];
        hess[4 * k + 1] = uxy[k];
        hess[4 * k + 2] = uxy[k];
        hess[4 * k + 3] = uyy[k];
    }
    Derivatives { grad, hess }
}

/// Radial profile derivatives (u', u'') on `[0, R]` with u'(0) = 0.
pub fn radial_profile_derivatives(v: &[f64], hr: f64) -> (Vec<f64>, Vec<f64>) {
    let m = v.len();
    let mut d1 = vec![0.0; m];
    let mut d2 = vec![0.0; m];
    for k in 1..m {
        d1[k] = line_d1(v, k, hr);
        d2[k] = line_d2(v, k, hr);
    }
    // Even extension u(−h) = u(h) at the center.
    d1[0] = 0.0;
    d2[0] = 2.0 * (v[1] - v[0]) / (hr * hr);
    (d1, d2)
}

fn radial_derivatives(u: &ScalarField, hr: f64) -> Derivatives {
    let grid = u.grid();
    let n = grid.dim();
    let m = grid.len();
    let (d1, d2) = radial_profile_derivatives(u.values(), hr);
    let mut grad = vec![0.0; n * m];
    let mut hess = vec![0.0; n * n * m];
    for k in 0..m {
        grad[k * n] = d1[k];
        let tangential = if k == 0 { d2[0] } else { d1[k] / (k as f64 * hr) };
        hess[k * n * n] = d2[k];
        for i in 1..n {
            hess[k * n * n + i * n + i] = tangential;
        }
    }
    Derivatives { grad, hess }
}

fn derivatives(u: &ScalarField) -> Derivatives {
    match *u.grid().kind() {
        GridKind::Polar2d { nr, ntheta, hr, htheta } => polar_derivatives(u, nr, ntheta, hr, htheta),
        GridKind::Cartesian2d { nx, ny, hx, hy } => cartesian_derivatives(u, nx, ny, hx, hy),
        GridKind::Radial1d { hr, .. } => radial_derivatives(u, hr),
    }
}

pub fn gradient(u: &ScalarField) -> Result<VectorField> {
    VectorField::new(u.grid().clone(), derivatives(u).grad)
}

pub fn hessian(u: &ScalarField) -> Result<MatrixField> {
    MatrixField::new(u.grid().clone(), derivatives(u).hess)
}

/// Gradient and Hessian from one derivative pass.
pub fn gradient_and_hessian(u: &ScalarField) -> Result<(VectorField, MatrixField)> {
    let d = derivatives(u);
    Ok((
        VectorField::new(u.grid().clone(), d.grad)?,
        MatrixField::new(u.grid().clone(), d.hess)?,
    ))
}

pub fn laplacian(u: &ScalarField) -> Result<ScalarField> {
    let grid = u.grid();
    match *grid.kind() {
        GridKind::Polar2d { nr, ntheta, hr, htheta } => {
            let v = u.values();
            let st = AngularStencil::new(htheta);
            let mut out = vec![0.0; grid.len()];
            let mut line = vec![0.0; nr + 1];
            for j in 0..ntheta {
                line[0] = v[0];
                for i in 1..=nr {
                    line[i] = v[1 + (i - 1) * ntheta + j];
                }
                for i in 1..=nr {
                    let r = i as f64 * hr;
                    let ring = &v[1 + (i - 1) * ntheta..1 + i * ntheta];
                    out[1 + (i - 1) * ntheta + j] =
                        line_d2(&line, i, hr) + line_d1(&line, i, hr) / r + st.d2(ring, j) / (r * r);
                }
            }
            let f = ring_fourier(&v[1..1 + ntheta], htheta);
            out[0] = 4.0 * (f[0] - v[0]) / (hr * hr);
            ScalarField::new(grid.clone(), out)
        }
        _ => {
            let h = hessian(u)?;
            ScalarField::new(grid.clone(), (0..grid.len()).map(|i| h.trace(i)).collect())
        }
    }
}

/// Outward normal derivative at each boundary sample by the one-sided
/// three-point stencil along the inward normal line.
pub fn normal_derivative(u: &ScalarField, b: &Arc<BoundarySampling>) -> Result<BoundaryScalar> {
    let v = u.values();
    let mut out = Vec::with_capacity(b.len());
    for k in 0..b.len() {
        let ([n1, n2], step) = b.stencil(k).ok_or(Error::MissingStencil(k))?;
        let n0 = b.node(k);
        out.push((3.0 * v[n0] - 4.0 * v[n1] + v[n2]) / (2.0 * step));
    }
    BoundaryScalar::new(b.clone(), out)
}

/// Values of `u` at the boundary samples.
pub fn boundary_trace(u: &ScalarField, b: &Arc<BoundarySampling>) -> Result<BoundaryScalar> {
    let v = u.values();
    BoundaryScalar::new(b.clone(), (0..b.len()).map(|k| v[b.node(k)]).collect())
}

/// |∇u| at the boundary samples.
pub fn boundary_gradient_norm(grad: &VectorField, b: &Arc<BoundarySampling>) -> Result<BoundaryScalar> {
    BoundaryScalar::new(b.clone(), (0..b.len()).map(|k| grad.norm(b.node(k))).collect())
}

/// Cell-volume quadrature of ‖u‖_{L^p}, optionally restricted to a mask.
pub fn lp_norm(u: &ScalarField, p: f64, mask: Option<&ContactMask>) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p must be at least 1, got {p}")));
    }
    let grid = u.grid();
    let included = |i: usize| mask.is_none_or(|m| m.contains(i));
    let mut any = false;
    if p.is_infinite() {
        let mut best: f64 = 0.0;
        for (i, v) in u.values().iter().enumerate() {
            if included(i) {
                any = true;
                best = best.max(v.abs());
            }
        }
        return if any { Ok(best) } else { Err(Error::EmptyRegion) };
    }
    let mut sum = 0.0;
    for (i, v) in u.values().iter().enumerate() {
        if included(i) {
            any = true;
            sum += v.abs().powf(p) * grid.volume(i);
        }
    }
    if !any {
        return Err(Error::EmptyRegion);
    }
    Ok(sum.powf(1.0 / p))
}

/// Cell-volume quadrature of ∫ u, optionally restricted to a mask.
pub fn integral(u: &ScalarField, mask: Option<&ContactMask>) -> f64 {
    let grid = u.grid();
    u.values()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask.is_none_or(|m| m.contains(*i)))
        .map(|(i, v)| v * grid.volume(i))
        .sum()
}

pub fn boundary_integral(g: &BoundaryScalar) -> f64 {
    g.values.iter().zip(g.sampling.weights()).map(|(v, w)| v * w).sum()
}

/// Transfers a radial profile onto the rings of a polar grid.
///
/// Ring radii that coincide with radial nodes are copied exactly; others are
/// interpolated by cubic Lagrange polynomials through the nearest nodes.
pub fn lift_radial(profile: &ScalarField, polar: &Arc<Grid>) -> Result<ScalarField> {
    let GridKind::Radial1d { nr: m, hr } = *profile.grid().kind() else {
        return Err(Error::InvalidArgument("lift_radial needs a radial profile".into()));
    };
    let GridKind::Polar2d { nr, ntheta, hr: pr, .. } = *polar.kind() else {
        return Err(Error::InvalidArgument("lift_radial needs a polar target grid".into()));
    };
    let v = profile.values();
    let at = |r: f64| -> f64 {
        let t = r / hr;
        let k = t.round();
        if (t - k).abs() < 1e-9 {
            return v[(k as usize).min(m)];
        }
        let base = (t.floor() as isize - 1).clamp(0, m as isize - 3) as usize;
        let mut acc = 0.0;
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (t - (base + b) as f64) / (a as f64 - b as f64);
                }
            }
            acc += w * v[base + a];
        }
        acc
    };
    let mut values = vec![0.0; polar.len()];
    values[0] = v[0];
    for i in 1..=nr {
        let ri = at(i as f64 * pr);
        for j in 0..ntheta {
            values[1 + (i - 1) * ntheta + j] = ri;
        }
    }
    let mut out = ScalarField::new(polar.clone(), values)?;
    out.source = profile.source.clone();
    Ok(out)
}
