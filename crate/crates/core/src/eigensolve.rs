//! Principal eigenpairs: finite-volume inverse power iteration for the
//! Laplacian, radial shooting for Laplace / Monge-Ampère / Pucci operators, and
//! the Lions fixed-point iteration for Monge-Ampère.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{hessian, ScalarField};
use crate::geometry::{make_domain, unit_ball_volume, DomainSpec, Grid, GridKind};
use crate::linalg::{bicgstab, det, pcg, Csr};
use crate::operators::{pucci_radial, Ellipticity, PucciSign};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bc {
    Dirichlet,
    Robin { alpha: f64 },
}

impl Bc {
    pub fn robin(alpha: f64) -> Result<Bc> {
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("Robin parameter must be nonzero, got {alpha}")));
        }
        Ok(Bc::Robin { alpha })
    }
}

impl fmt::Display for Bc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bc::Dirichlet => f.write_str("dirichlet"),
            Bc::Robin { alpha } => write!(f, "robin(alpha={alpha})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Operator {
    Laplace,
    Pucci(Ellipticity),
    MongeAmpere,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Laplace => f.write_str("laplace"),
            Operator::Pucci(e) => write!(f, "pucci(theta={},Theta={})", e.theta, e.big_theta),
            Operator::MongeAmpere => f.write_str("monge_ampere"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    FdInversePower,
    RadialShooting,
    LionsIteration,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub tol_lambda: f64,
    pub tol_residual: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol_lambda: 1e-10, tol_residual: 1e-6, max_iter: 10_000 }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda: f64,
    /// Normalized to ‖φ‖_∞ = 1.
    pub phi: ScalarField,
    pub solver: Solver,
    pub operator: Operator,
    pub bc: Bc,
    /// Exponent of the right-hand side |u|^p (n for Monge-Ampère, 1 for Laplace).
    pub p: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Conductances between neighbouring nodes for the conservative Laplacian
/// `Σ_j c_ij (u_i − u_j) = −∫_{cell i} Δu`.
fn flux_edges(grid: &Grid) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    match *grid.kind() {
        GridKind::Cartesian2d { nx, ny, hx, hy } => {
            for j in 0..ny {
                for i in 0..nx {
                    let k = i + j * nx;
                    if i + 1 < nx {
                        edges.push((k, k + 1, hy / hx));
                    }
                    if j + 1 < ny {
                        edges.push((k, k + nx, hx / hy));
                    }
                }
            }
        }
        GridKind::Polar2d { nr, ntheta, hr, htheta } => {
            for j in 0..ntheta {
                edges.push((0, 1 + j, 0.5 * htheta));
            }
            for ring in 1..=nr {
                let r = ring as f64 * hr;
                for j in 0..ntheta {
                    let k = 1 + (ring - 1) * ntheta + j;
                    let next = 1 + (ring - 1) * ntheta + (j + 1) % ntheta;
                    edges.push((k, next, hr / (r * htheta)));
                    if ring < nr {
                        edges.push((k, k + ntheta, (r + 0.5 * hr) * htheta / hr));
                    }
                }
            }
        }
        GridKind::Radial1d { nr, hr } => {
            let n = grid.dim();
            let area = n as f64 * unit_ball_volume(n);
            for k in 0..nr {
                let r = (k as f64 + 0.5) * hr;
                edges.push((k, k + 1, area * r.powi(n as i32 - 1) / hr));
            }
        }
    }
    edges
}

struct Assembly {
    matrix: Csr,
    mass: Vec<f64>,
    /// Grid node of each unknown.
    nodes: Vec<usize>,
    /// Boundary reconstruction rows: node, (unknown, weight) pairs.
    boundary: Vec<(usize, Vec<(usize, f64)>)>,
    symmetric: bool,
}

fn assemble(grid: &Grid, bc: Bc) -> Result<Assembly> {
    let mut index = vec![usize::MAX; grid.len()];
    let mut nodes = Vec::new();
    for i in grid.interior_nodes() {
        index[i] = nodes.len();
        nodes.push(i);
    }
    // Boundary node values as combinations of unknowns.
    let mut recon: Vec<Option<Vec<(usize, f64)>>> = vec![None; grid.len()];
    if let Bc::Robin { alpha } = bc {
        let b = grid.boundary();
        for k in 0..b.len() {
            let node = b.node(k);
            if recon[node].is_some() {
                continue;
            }
            let ([n1, n2], step) = b.stencil(k).ok_or(Error::MissingStencil(k))?;
            let denom = 3.0 + 2.0 * step * alpha;
            if denom.abs() < 1e-12 {
                return Err(Error::InvalidArgument(format!("Robin elimination is singular for alpha = {alpha}")));
            }
            let mut row = Vec::new();
            for (nd, w) in [(n1, 4.0 / denom), (n2, -1.0 / denom)] {
                if index[nd] == usize::MAX {
                    return Err(Error::MissingStencil(k));
                }
                row.push((index[nd], w));
            }
            recon[node] = Some(row);
        }
    }
    let mut triplets = Vec::new();
    for (a, b, c) in flux_edges(grid) {
        for (i, j) in [(a, b), (b, a)] {
            let ii = index[i];
            if ii == usize::MAX {
                continue;
            }
            triplets.push((ii, ii, c));
            if index[j] != usize::MAX {
                triplets.push((ii, index[j], -c));
            } else if let Some(row) = &recon[j] {
                for &(jj, w) in row {
                    triplets.push((ii, jj, -c * w));
                }
            }
        }
    }
    let mass = nodes.iter().map(|&i| grid.volume(i)).collect();
    let boundary = recon
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .collect();
    Ok(Assembly {
        matrix: Csr::from_triplets(nodes.len(), triplets),
        mass,
        nodes,
        boundary,
        symmetric: matches!(bc, Bc::Dirichlet),
    })
}

/// Principal Laplace eigenpair by inverse power iteration on the
/// finite-volume Laplacian of the fitted grid.
pub fn laplace_eigen_fd(domain: &DomainSpec, resolution: usize, bc: Bc, opts: &SolverOptions) -> Result<EigenPair> {
    let (grid, _) = make_domain(domain, resolution)?;
    let asm = assemble(&grid, bc)?;
    let m = asm.nodes.len();
    let a = &asm.matrix;
    let mut x = vec![1.0; m];
    let mut y = vec![0.0; m];
    let mut ax = vec![0.0; m];
    let mut lambda_prev = f64::NAN;
    let mut lambda = f64::NAN;
    let mut residual = f64::INFINITY;
    let inner_max = 20 * m + 1000;
    for it in 1..=opts.max_iter {
        let rhs: Vec<f64> = x.iter().zip(&asm.mass).map(|(v, w)| v * w).collect();
        if it > 1 {
            for (yv, xv) in y.iter_mut().zip(&x) {
                *yv = xv / lambda;
            }
        }
        if asm.symmetric {
            pcg(a, &rhs, &mut y, 1e-13, inner_max)?;
        } else {
            bicgstab(a, &rhs, &mut y, 1e-13, inner_max)?;
        }
        let scale = y.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let sign = if y.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        for (xv, yv) in x.iter_mut().zip(&y) {
            *xv = sign * yv / scale;
        }
        a.matvec(&x, &mut ax);
        let num: f64 = x.iter().zip(&ax).map(|(p, q)| p * q).sum();
        let den: f64 = x.iter().zip(&asm.mass).map(|(p, w)| p * p * w).sum();
        lambda = num / den;
        residual = x
            .iter()
            .zip(&ax)
            .zip(&asm.mass)
            .map(|((xv, av), w)| (av / w - lambda * xv).abs())
            .fold(0.0, f64::max);
        let converged = (lambda - lambda_prev).abs() < opts.tol_lambda * lambda.abs()
            && residual < opts.tol_residual * lambda.abs();
        lambda_prev = lambda;
        if converged {
            let phi = expand(&grid, &asm, &x)?;
            return Ok(EigenPair {
                lambda,
                phi: phi.with_source("laplace-eigenfunction"),
                solver: Solver::FdInversePower,
                operator: Operator::Laplace,
                bc,
                p: 1.0,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        detail: format!("inverse power iteration, lambda {lambda:.8e}, residual {residual:.3e}"),
    })
}

fn expand(grid: &Arc<Grid>, asm: &Assembly, x: &[f64]) -> Result<ScalarField> {
    let mut values = vec![0.0; grid.len()];
    for (&node, &v) in asm.nodes.iter().zip(x) {
        values[node] = v;
    }
    for (node, row) in &asm.boundary {
        values[*node] = row.iter().map(|&(j, w)| w * x[j]).sum();
    }
    let scale = values.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    ScalarField::new(grid.clone(), values.into_iter().map(|v| v / scale).collect())
}

/// Radial ODE right-hand side `u''` for each operator. `q` is `u'/r`, replaced
/// by its limit at the center.
fn radial_rhs(op: Operator, n: usize, p: f64, lambda: f64, r: f64, u: f64, v: f64) -> f64 {
    let nf = n as f64;
    let at_center = r == 0.0;
    match op {
        Operator::Laplace => {
            if at_center {
                -lambda * u / nf
            } else {
                -lambda * u - (nf - 1.0) * v / r
            }
        }
        Operator::MongeAmpere => {
            let target = lambda * u.abs().powf(nf);
            if at_center {
                lambda.powf(1.0 / nf) * u.abs()
            } else {
                let q = v / r;
                target / q.powi(n as i32 - 1)
            }
        }
        Operator::Pucci(e) => {
            let target = lambda * u.abs().powf(p);
            if at_center {
                target / (nf * e.theta)
            } else {
                let q = v / r;
                let wq = if q > 0.0 { e.theta } else { e.big_theta };
                let s = target - wq * (nf - 1.0) * q;
                if s >= 0.0 {
                    s / e.theta
                } else {
                    s / e.big_theta
                }
            }
        }
    }
}

/// RK4 profile on `r_k = k·h`, returning (u, u') at every node.
fn shoot(op: Operator, n: usize, p: f64, lambda: f64, radius: f64, steps: usize, u0: f64) -> (Vec<f64>, Vec<f64>) {
    let h = radius / steps as f64;
    let mut us = Vec::with_capacity(steps + 1);
    let mut vs = Vec::with_capacity(steps + 1);
    let (mut u, mut v) = (u0, 0.0);
    us.push(u);
    vs.push(v);
    let f = |r: f64, u: f64, v: f64| radial_rhs(op, n, p, lambda, r, u, v);
    for k in 0..steps {
        let r = k as f64 * h;
        let (k1u, k1v) = (v, f(r, u, v));
        let (k2u, k2v) = (v + 0.5 * h * k1v, f(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v));
        let (k3u, k3v) = (v + 0.5 * h * k2v, f(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v));
        let (k4u, k4v) = (v + h * k3v, f(r + h, u + h * k3u, v + h * k3v));
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        us.push(u);
        vs.push(v);
    }
    (us, vs)
}

fn boundary_residual(bc: Bc, u: f64, v: f64) -> f64 {
    match bc {
        Bc::Dirichlet => u,
        Bc::Robin { alpha } => v + alpha * u,
    }
}

/// Principal radial eigenpair by shooting from the center and bisecting on λ.
pub fn radial_shoot_eigen(
    op: Operator,
    n: usize,
    p: f64,
    radius: f64,
    bc: Bc,
    resolution: usize,
) -> Result<EigenPair> {
    let domain = DomainSpec::ball(n, radius);
    let (grid, _) = make_domain(&domain, resolution)?;
    let p = match op {
        Operator::Laplace => 1.0,
        Operator::MongeAmpere => n as f64,
        Operator::Pucci(_) => p,
    };
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("rhs exponent must be at least 1, got {p}")));
    }
    let u0 = match op {
        Operator::Laplace => 1.0,
        _ => -1.0,
    };
    let degree = match op {
        Operator::MongeAmpere => 2.0 * n as f64,
        _ => 2.0,
    };
    let eval = |lambda: f64| {
        let (u, v) = shoot(op, n, p, lambda, radius, resolution, u0);
        let f = boundary_residual(bc, u[resolution], v[resolution]);
        (f, u)
    };
    let lo_start = 1e-6 / radius.powf(degree);
    let hi_limit = 1e8 / radius.powf(degree);
    let mut lo = lo_start;
    let (mut f_lo, _) = eval(lo);
    let mut hi = lo;
    let mut iterations = 1;
    let mut bracketed = false;
    while hi < hi_limit {
        hi = lo * 1.1;
        let (f_hi, _) = eval(hi);
        iterations += 1;
        if f_hi.is_finite() && f_lo.is_finite() && f_hi.signum() != f_lo.signum() {
            bracketed = true;
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    if !bracketed {
        return Err(Error::Bracketing { what: format!("{op} eigenvalue"), lo: lo_start, hi: hi_limit });
    }
    let mut best = None;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        let (f_mid, u) = eval(mid);
        iterations += 1;
        let done = f_mid.abs() < 1e-10 || (hi - lo) <= 4.0 * f64::EPSILON * mid;
        best = Some((mid, f_mid, u));
        if done {
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let (lambda, f, u) = best.expect("bisection ran");
    let scale = u.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let phi = ScalarField::new(grid, u.iter().map(|v| v / scale).collect())?;
    Ok(EigenPair {
        lambda,
        phi: phi.with_source(format!("{op}-eigenfunction")),
        solver: Solver::RadialShooting,
        operator: op,
        bc,
        p,
        residual: f.abs(),
        iterations,
    })
}

/// Lions fixed-point iteration for `det ∇²u = λ|u|ⁿ` on the n-ball.
///
/// Each step solves `det ∇²w = |u_k|ⁿ`, `w = 0` on the boundary, through the
/// radial identity `((w')ⁿ)' = n r^{n−1}|u_k|ⁿ`, then renormalizes.
pub fn ma_lions_iteration(n: usize, radius: f64, resolution: usize, opts: &SolverOptions) -> Result<EigenPair> {
    let domain = DomainSpec::ball(n, radius);
    let (grid, _) = make_domain(&domain, resolution)?;
    let h = radius / resolution as f64;
    let nf = n as f64;
    let mut u: Vec<f64> = (0..=resolution)
        .map(|k| {
            let r = k as f64 * h;
            (r * r - radius * radius) / (radius * radius)
        })
        .collect();
    let mut lambda = f64::NAN;
    for it in 1..=opts.max_iter {
        // (w')ⁿ by exact integration of n s^{n−1}·g for piecewise-linear g = |u|ⁿ.
        let g: Vec<f64> = u.iter().map(|v| v.abs().powf(nf)).collect();
        let mut acc = 0.0;
        let mut dw = vec![0.0; resolution + 1];
        for k in 0..resolution {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            let (ga, gb) = (g[k], g[k + 1]);
            let slope = (gb - ga) / h;
            let pw = |x: f64, e: i32| x.powi(e);
            acc += ga * (pw(b, n as i32) - pw(a, n as i32))
                + slope * (nf / (nf + 1.0) * (pw(b, n as i32 + 1) - pw(a, n as i32 + 1)) - a * (pw(b, n as i32) - pw(a, n as i32)));
            dw[k + 1] = acc.powf(1.0 / nf);
        }
        let mut w = vec![0.0; resolution + 1];
        for k in (0..resolution).rev() {
            w[k] = w[k + 1] - 0.5 * h * (dw[k] + dw[k + 1]);
        }
        let peak = w.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if w.iter().take(resolution).any(|&v| v >= 0.0) || dw.windows(2).any(|d| d[1] < d[0]) {
            return Err(Error::Hypothesis(format!("iterate {it} lost sign or convexity")));
        }
        let next = peak.powf(-nf);
        u = w.iter().map(|v| v / peak).collect();
        let converged = (next - lambda).abs() < 1e-8 * next;
        lambda = next;
        if converged && it > 1 {
            let phi = ScalarField::new(grid, u)?.with_source("monge_ampere-eigenfunction");
            let residual = ma_residual(&phi, lambda)?;
            return Ok(EigenPair {
                lambda,
                phi,
                solver: Solver::LionsIteration,
                operator: Operator::MongeAmpere,
                bc: Bc::Dirichlet,
                p: nf,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::NotConverged { iterations: opts.max_iter, detail: format!("Lions iteration, lambda {lambda:.8e}") })
}

/// max over interior nodes of |det ∇²u − λ|u|ⁿ| with finite-difference Hessians.
pub fn ma_residual(phi: &ScalarField, lambda: f64) -> Result<f64> {
    let h = hessian(phi)?;
    let grid = phi.grid();
    let n = grid.dim();
    Ok(grid
        .interior_nodes()
        .map(|i| (det(h.at(i), n) - lambda * phi.values()[i].abs().powi(n as i32)).abs())
        .fold(0.0, f64::max))
}

/// Residual of the eigen-equation with finite-difference derivatives on
/// interior nodes: `‖Op(φ) − λ·rhs(φ)‖_∞`.
pub fn fd_residual(pair: &EigenPair) -> Result<f64> {
    let grid = pair.phi.grid();
    let h = hessian(&pair.phi)?;
    let n = grid.dim();
    let v = pair.phi.values();
    let value = |i: usize| -> f64 {
        let m = h.at(i);
        match pair.operator {
            Operator::Laplace => h.trace(i) + pair.lambda * v[i],
            Operator::MongeAmpere => det(m, n) - pair.lambda * v[i].abs().powi(n as i32),
            Operator::Pucci(e) => {
                let tangential = if n > 1 { m[n + 1] } else { m[0] };
                pucci_radial(m[0], tangential, n, e, PucciSign::Minus) - pair.lambda * v[i].abs().powf(pair.p)
            }
        }
    };
    Ok(grid.interior_nodes().map(|i| value(i).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const J01: f64 = 2.404_825_557_695_773;

    #[test]
    fn flux_matrix_is_symmetric_and_consistent() {
        for spec in [DomainSpec::disk(1.0), DomainSpec::rectangle(1.0, 2.0), DomainSpec::ball(3, 1.0)] {
            let (grid, _) = make_domain(&spec, 16).unwrap();
            let asm = assemble(&grid, Bc::Dirichlet).unwrap();
            assert!(asm.matrix.relative_asymmetry() < 1e-14, "{spec}");
        }
        // Robin rows are not symmetric.
        let (grid, _) = make_domain(&DomainSpec::disk(1.0), 16).unwrap();
        assert!(assemble(&grid, Bc::Robin { alpha: 1.0 }).unwrap().matrix.relative_asymmetry() > 1e-6);
    }

    #[test]
    fn fd_examples() {
        let o = SolverOptions::default();
        let disk = laplace_eigen_fd(&DomainSpec::disk(1.0), 64, Bc::Dirichlet, &o).unwrap();
        assert!((disk.lambda / (J01 * J01) - 1.0).abs() < 0.01, "{}", disk.lambda);
        let sq = laplace_eigen_fd(&DomainSpec::rectangle(1.0, 1.0), 64, Bc::Dirichlet, &o).unwrap();
        assert!((sq.lambda / (2.0 * PI * PI) - 1.0).abs() < 0.01, "{}", sq.lambda);
        let ball = laplace_eigen_fd(&DomainSpec::ball(3, 1.0), 512, Bc::Dirichlet, &o).unwrap();
        assert!((ball.lambda / (PI * PI) - 1.0).abs() < 1e-3, "{}", ball.lambda);
        for pair in [&disk, &sq, &ball] {
            let g = pair.phi.grid();
            assert!(g.interior_nodes().all(|i| pair.phi.values()[i] > 0.0));
            assert!(pair.residual < 1e-6 * pair.lambda);
        }
        let big = laplace_eigen_fd(&DomainSpec::disk(1.5), 64, Bc::Dirichlet, &o).unwrap();
        assert!(sq.lambda > disk.lambda && disk.lambda > big.lambda);
    }

    #[test]
    fn robin_matches_shooting() {
        let o = SolverOptions::default();
        for alpha in [0.5, 2.0] {
            let fd = laplace_eigen_fd(&DomainSpec::disk(1.0), 64, Bc::Robin { alpha }, &o).unwrap();
            let sh = radial_shoot_eigen(Operator::Laplace, 2, 1.0, 1.0, Bc::Robin { alpha }, 512).unwrap();
            assert!((fd.lambda / sh.lambda - 1.0).abs() < 0.01, "{alpha}: {} vs {}", fd.lambda, sh.lambda);
            assert!(fd.lambda < J01 * J01);
        }
    }

    #[test]
    fn shooting_examples() {
        let l2 = radial_shoot_eigen(Operator::Laplace, 2, 1.0, 1.0, Bc::Dirichlet, 512).unwrap();
        assert!((l2.lambda - J01 * J01).abs() < 1e-6 * J01 * J01);
        let l3 = radial_shoot_eigen(Operator::Laplace, 3, 1.0, 1.0, Bc::Dirichlet, 512).unwrap();
        assert!((l3.lambda / (PI * PI) - 1.0).abs() < 1e-6);
        let ma = radial_shoot_eigen(Operator::MongeAmpere, 2, 2.0, 1.0, Bc::Dirichlet, 512).unwrap();
        assert!((ma.lambda - 7.490_039).abs() < 1e-3, "{}", ma.lambda);
        let pl = radial_shoot_eigen(Operator::Pucci(Ellipticity::LAPLACE), 2, 1.0, 1.0, Bc::Dirichlet, 512).unwrap();
        assert!((pl.lambda - l2.lambda).abs() < 1e-8);
        let p12 = radial_shoot_eigen(
            Operator::Pucci(Ellipticity { theta: 1.0, big_theta: 2.0 }),
            2,
            1.0,
            1.0,
            Bc::Dirichlet,
            2048,
        )
        .unwrap();
        assert!((p12.lambda - 5.733_115).abs() < 1e-3, "{}", p12.lambda);
        for pair in [&l2, &l3, &ma, &pl, &p12] {
            let r = fd_residual(pair).unwrap();
            assert!(r <= 1e-4 * pair.lambda, "{:?} residual {r}", pair.operator);
        }
    }

    #[test]
    fn lions_agrees_with_shooting() {
        let o = SolverOptions::default();
        for n in [2, 3] {
            let lions = ma_lions_iteration(n, 1.0, 512, &o).unwrap();
            let sh = radial_shoot_eigen(Operator::MongeAmpere, n, n as f64, 1.0, Bc::Dirichlet, 512).unwrap();
            assert!((lions.lambda / sh.lambda - 1.0).abs() < 0.01, "n={n}: {} vs {}", lions.lambda, sh.lambda);
            assert!(lions.residual < 1e-4 * lions.lambda, "n={n}: residual {}", lions.residual);
            let v = lions.phi.values();
            assert!(v[..512].iter().all(|&x| x < 0.0));
        }
        let r2 = ma_lions_iteration(2, 2.0, 512, &o).unwrap();
        let r1 = ma_lions_iteration(2, 1.0, 512, &o).unwrap();
        assert!((r2.lambda * 16.0 / r1.lambda - 1.0).abs() < 0.01);
    }
}
