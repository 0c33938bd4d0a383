//! Radial solutions of `Δu = f(u)` on balls and the constant-free links of
//! the gradient-bound argument: the Bochner identity for `P = |∇u|²`, the
//! boundary-infimum chain, and the differentiated-equation comparison.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{abp_constant, field_name, h2, rel, BoundReport, Context, Orientation, Provenance, Tolerance};
use crate::eigensolve::{radial_shoot_eigen, Bc, Operator};
use crate::error::{Error, Result};
use crate::expr::{check_keys, param_f64, Params};
use crate::fields::{
    boundary_gradient_norm, boundary_trace, gradient, gradient_and_hessian, laplacian, lp_norm, normal_derivative,
    radial_profile_derivatives, ScalarField,
};
use crate::geometry::{make_domain, unit_ball_volume, DomainSpec, Grid, GridKind};

pub const NONLINEARITY_NAMES: &[&str] = &["constant", "linear", "power", "exp"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Nonlinearity {
    Constant { c: f64 },
    /// `k·u`; `None` means `k = −λ₁(B_R)`, resolved by radial shooting.
    Linear { k: Option<f64> },
    /// `c₀|u|^{p/n}`.
    Power { c0: f64, p: f64 },
    Exp,
}

impl Nonlinearity {
    pub fn from_name(name: &str, params: &Params) -> Result<Self> {
        let f = match name {
            "constant" => {
                check_keys(name, params, &["c"])?;
                Nonlinearity::Constant { c: param_f64(params, "c", 1.0)? }
            }
            "linear" => {
                check_keys(name, params, &["k"])?;
                Nonlinearity::Linear { k: params.contains_key("k").then(|| param_f64(params, "k", 0.0)).transpose()? }
            }
            "power" => {
                check_keys(name, params, &["c0", "p"])?;
                Nonlinearity::Power { c0: param_f64(params, "c0", 2.0)?, p: param_f64(params, "p", 4.0)? }
            }
            "exp" => {
                check_keys(name, params, &[])?;
                Nonlinearity::Exp
            }
            other => return Err(Error::UnknownName(format!("nonlinearity `{other}`"))),
        };
        Ok(f)
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Constant { c } => write!(f, "constant(c={c})"),
            Nonlinearity::Linear { k: Some(k) } => write!(f, "linear(k={k})"),
            Nonlinearity::Linear { k: None } => f.write_str("linear(k=-lambda1)"),
            Nonlinearity::Power { c0, p } => write!(f, "power(c0={c0},p={p})"),
            Nonlinearity::Exp => f.write_str("exp"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemilinearProblem {
    pub f: Nonlinearity,
    pub radius: f64,
    pub n: usize,
}

impl SemilinearProblem {
    pub fn new(f: Nonlinearity, radius: f64, n: usize) -> Result<Self> {
        DomainSpec::ball(n, radius).validate()?;
        if let Nonlinearity::Power { c0, p } = f {
            if !(p / n as f64 >= 1.0) || !c0.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "power nonlinearity needs p/n ≥ 1 to be C¹, got p = {p}, n = {n}"
                )));
            }
        }
        Ok(SemilinearProblem { f, radius, n })
    }

    fn exponent(&self) -> f64 {
        match self.f {
            Nonlinearity::Power { p, .. } => p / self.n as f64,
            _ => 1.0,
        }
    }

    fn k(&self) -> Result<f64> {
        match self.f {
            Nonlinearity::Linear { k: Some(k) } => Ok(k),
            Nonlinearity::Linear { k: None } => Err(Error::InvalidArgument("linear coefficient not resolved".into())),
            _ => Ok(0.0),
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        match self.f {
            Nonlinearity::Constant { c } => c,
            Nonlinearity::Linear { k } => k.unwrap_or(f64::NAN) * u,
            Nonlinearity::Power { c0, .. } => c0 * u.abs().powf(self.exponent()),
            Nonlinearity::Exp => u.exp(),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self.f {
            Nonlinearity::Constant { .. } => 0.0,
            Nonlinearity::Linear { k } => k.unwrap_or(f64::NAN),
            Nonlinearity::Power { c0, .. } => {
                let q = self.exponent();
                c0 * q * u.abs().powf(q - 1.0) * u.signum()
            }
            Nonlinearity::Exp => u.exp(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SemilinearSolution {
    /// The problem with the linear coefficient resolved.
    pub problem: SemilinearProblem,
    /// Profile on the radial grid.
    pub u: ScalarField,
    pub center_value: f64,
    /// `max |Δu − f(u)|` over interior nodes.
    pub residual: f64,
}

fn integrate(prob: &SemilinearProblem, s: f64, steps: usize) -> Vec<f64> {
    let nf = prob.n as f64;
    let h = prob.radius / steps as f64;
    let rhs = |r: f64, u: f64, v: f64| prob.value(u) - (nf - 1.0) * v / r;
    // First step by the series u = s + c₁r² + c₂r⁴; RK4 through the
    // singular center leaves a non-smooth O(h⁴) error at the first node.
    let c1 = prob.value(s) / (2.0 * nf);
    let c2 = prob.derivative(s) * c1 / (4.0 * (nf + 2.0));
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s);
    let (mut u, mut v) = (s + c1 * h * h + c2 * h.powi(4), 2.0 * c1 * h + 4.0 * c2 * h.powi(3));
    out.push(u);
    // Stage errors are amplified by (n−1)/r near the center; substep there.
    for k in 1..steps {
        let sub = if k < 8 { 32 } else { 1 };
        let hs = h / sub as f64;
        for m in 0..sub {
            let r = k as f64 * h + m as f64 * hs;
            let (k1u, k1v) = (v, rhs(r, u, v));
            let (k2u, k2v) = (v + 0.5 * hs * k1v, rhs(r + 0.5 * hs, u + 0.5 * hs * k1u, v + 0.5 * hs * k1v));
            let (k3u, k3v) = (v + 0.5 * hs * k2v, rhs(r + 0.5 * hs, u + 0.5 * hs * k2u, v + 0.5 * hs * k2v));
            let (k4u, k4v) = (v + hs * k3v, rhs(r + hs, u + hs * k3u, v + hs * k3v));
            u += hs / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += hs / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        out.push(u);
    }
    out
}

/// Shooting on `u(0)`: RK4 from the center, bisection until `|u(R)| < 1e-10`.
///
/// The homogeneous linear case has no shooting parameter; its profile is
/// normalized to `u(0) = −1` and must already vanish at R.
pub fn solve_radial_semilinear(prob: &SemilinearProblem, resolution: usize) -> Result<SemilinearSolution> {
    let mut prob = *prob;
    if let Nonlinearity::Linear { k: None } = prob.f {
        let pair = radial_shoot_eigen(Operator::Laplace, prob.n, 1.0, prob.radius, Bc::Dirichlet, resolution)?;
        prob.f = Nonlinearity::Linear { k: Some(-pair.lambda) };
    }
    let tail = |s: f64| {
        let v = *integrate(&prob, s, resolution).last().expect("nonempty");
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let center = if let Nonlinearity::Linear { .. } = prob.f {
        let end = tail(-1.0);
        if end.abs() > 1e-6 {
            return Err(Error::Hypothesis(format!(
                "Δu = {}·u has no nontrivial solution vanishing at R (u(R) = {end:.3e} for u(0) = −1)",
                prob.k()?
            )));
        }
        -1.0
    } else {
        // Geometric scan away from 0 on both sides.
        let mut bracket = None;
        'scan: for sign in [-1.0, 1.0] {
            let mut prev = 1e-6 * sign;
            let mut f_prev = tail(prev);
            for _ in 0..90 {
                let next = prev * 2.0;
                let f_next = tail(next);
                if f_prev == 0.0 {
                    bracket = Some((prev, prev));
                    break 'scan;
                }
                if f_next.signum() != f_prev.signum() {
                    bracket = Some((prev, next));
                    break 'scan;
                }
                prev = next;
                f_prev = f_next;
            }
        }
        let (mut lo, mut hi) = bracket.ok_or_else(|| Error::Bracketing {
            what: format!("u(0) for {}", prob.f),
            lo: -1e-6 * 2f64.powi(90),
            hi: 1e-6 * 2f64.powi(90),
        })?;
        let f_lo = tail(lo);
        let mut mid = lo;
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            let f_mid = tail(mid);
            if f_mid.abs() < 1e-10 || (hi - lo).abs() <= 4.0 * f64::EPSILON * mid.abs() {
                break;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        mid
    };
    let (grid, _) = make_domain(&DomainSpec::ball(prob.n, prob.radius), resolution)?;
    let values = integrate(&prob, center, resolution);
    let u = ScalarField::new(grid, values)?.with_source(format!("semilinear {}", prob.f));
    let residual = equation_residual(&u, &prob)?;
    Ok(SemilinearSolution { problem: prob, u, center_value: center, residual })
}

fn equation_residual(u: &ScalarField, prob: &SemilinearProblem) -> Result<f64> {
    let lap = laplacian(u)?;
    Ok(u.grid()
        .interior_nodes()
        .map(|i| (lap.values()[i] - prob.value(u.values()[i])).abs())
        .fold(0.0, f64::max))
}

/// Nodes whose second-difference stencils stay off the boundary nodes
/// (distance to the sphere at least 2h), so nested differences of one-sided
/// boundary derivatives never enter.
fn deep_interior(grid: &Grid) -> Vec<usize> {
    let radius = grid.spec().radius().unwrap_or(f64::INFINITY);
    let limit = radius - 1.5 * grid.spacing();
    grid.interior_nodes().filter(|&i| grid.radius_of(i) <= limit).collect()
}

/// `max |ΔP − 2|∇²u|² − 2f'(u)|∇u|²|` with `P = |∇u|²`, over deep-interior nodes.
pub fn p_identity_residual(u: &ScalarField, fprime: &dyn Fn(f64) -> f64) -> Result<f64> {
    let grid = u.grid();
    let (g, h) = gradient_and_hessian(u)?;
    let p = ScalarField::new(grid.clone(), (0..grid.len()).map(|i| g.norm(i).powi(2)).collect())?;
    let lap_p = laplacian(&p)?;
    Ok(deep_interior(grid)
        .into_iter()
        .map(|i| {
            let v = lap_p.values()[i] - 2.0 * h.frobenius_sq(i) - 2.0 * fprime(u.values()[i]) * p.values()[i];
            v.abs()
        })
        .fold(0.0, f64::max))
}

fn sup_abs_fprime(u: &ScalarField, prob: &SemilinearProblem) -> f64 {
    u.values().iter().map(|&v| prob.derivative(v).abs()).fold(0.0, f64::max)
}

/// The boundary-infimum chain
/// `inf_B|∇u|² ≤ inf_∂|∇u|² = (inf_∂|∂u/∂ν|)² ≤ (‖f(u)‖_{L^n}/(n|B₁|^{1/n}))²`,
/// the power-law lower bound on `‖u‖_{L^p}` when f is a power, and the
/// report-only ratio of `sup|∇u|²` to the Harnack-side bracket.
pub fn gradient_bound_chain(u: &ScalarField, prob: &SemilinearProblem) -> Result<Vec<BoundReport>> {
    let grid = u.grid();
    let b = grid.boundary();
    let n = grid.dim();
    let nf = n as f64;
    let trace = boundary_trace(u, b)?;
    let worst = trace.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > 1e-8 * u.max_abs().max(1.0) {
        return Err(Error::Hypothesis(format!("u does not vanish on the boundary (|u| up to {worst:.3e})")));
    }
    let g = gradient(u)?;
    let grad_norm = boundary_gradient_norm(&g, b)?;
    let nd = normal_derivative(u, b)?;
    let pointwise_gap = b
        .edge_samples()
        .map(|k| (grad_norm.values()[k] - nd.values()[k].abs()).abs())
        .fold(0.0, f64::max);
    let interior_inf = (0..grid.len()).map(|i| g.norm(i)).fold(f64::INFINITY, f64::min).powi(2);
    let boundary_inf = grad_norm.inf_abs().powi(2);
    let normal_inf = nd.inf_abs().powi(2);
    let fu = u.map(|v| prob.value(v))?;
    let fnorm = lp_norm(&fu, nf, None)?;
    let c = abp_constant(n);
    let ctx = || Context::of(grid, field_name(u));
    let mut out = vec![
        BoundReport::new("semilinear-interior-boundary", interior_inf, boundary_inf, Orientation::LhsLeqRhs, rel(grid), ctx()),
        BoundReport::new("semilinear-normal-gradient", boundary_inf, normal_inf, Orientation::Equal, Tolerance::Absolute(1e-6), ctx())
            .with_note(format!("max pointwise ||grad u| - |du/dnu|| = {pointwise_gap:.3e}")),
        BoundReport::new("semilinear-abp", normal_inf, (c * fnorm).powi(2), Orientation::LhsLeqRhs, rel(grid), ctx())
            .with_constant(c, Provenance::PaperExplicit),
    ];
    if let Nonlinearity::Power { c0, p } = prob.f {
        let (alpha, _) = nd.edge_range();
        let rhs = ((nf * alpha).powf(nf) * unit_ball_volume(n) / c0.powf(nf)).powf(1.0 / p);
        out.push(
            BoundReport::new("semilinear-power-lp", lp_norm(u, p, None)?, rhs, Orientation::LhsGeqRhs, rel(grid), ctx())
                .with_note(format!("alpha = {alpha:.10e}")),
        );
    }
    let (_, h) = gradient_and_hessian(u)?;
    let hsq = ScalarField::new(grid.clone(), (0..grid.len()).map(|i| h.frobenius_sq(i)).collect())?;
    let radius = grid.spec().radius().unwrap_or(1.0);
    let bracket = (fnorm / (nf * unit_ball_volume(n).powf(1.0 / nf))).powi(2) + radius * lp_norm(&hsq, nf, None)?;
    let sup = (0..grid.len()).map(|i| g.norm(i)).fold(0.0, f64::max).powi(2);
    out.push(
        BoundReport::new("semilinear-harnack-ratio", sup, bracket, Orientation::ReportOnly, rel(grid), ctx())
            .with_note(format!("R^2 sup|f'(u)| = {:.6e}", radius * radius * sup_abs_fprime(u, prob))),
    );
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct C3Check {
    /// lhs = max over nodes and i of `|Δu_{x_i}| − ‖f'‖_∞|u_{x_i}|`, rhs = 0.
    pub report: BoundReport,
    /// max over nodes and i of `||Δu_{x_i}| − ‖f'‖_∞|u_{x_i}||`.
    pub max_abs_gap: f64,
    pub tolerance: f64,
}

impl C3Check {
    /// Both sides agree to tolerance everywhere.
    pub fn equality(&self) -> bool {
        self.max_abs_gap <= self.tolerance
    }
}

/// `|Δu_{x_i}| ≤ ‖f'(u)‖_∞ |u_{x_i}|` at deep-interior nodes.
///
/// Radial profiles write `u_{x₁} = x₁·w(r)` with `w = u'/r` and use
/// `Δ(x₁w) = x₁(w'' + (n+1)w'/r)`; other grids differentiate the gradient
/// components directly and skip `r < R/8`, where polar stencils of the
/// first-harmonic components carry an O(h²/r) error.
pub fn c3_check(u: &ScalarField, prob: &SemilinearProblem) -> Result<C3Check> {
    let grid = u.grid();
    let fp = sup_abs_fprime(u, prob);
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    match *grid.kind() {
        GridKind::Radial1d { nr, hr } => {
            let nf = grid.dim() as f64;
            let (d1, _) = radial_profile_derivatives(u.values(), hr);
            // w = u'/r is even and smooth, u_{x₁} = x₁·w.
            let mut w: Vec<f64> = (0..=nr).map(|k| if k == 0 { 0.0 } else { d1[k] / (k as f64 * hr) }).collect();
            // Even extrapolation keeps the O(h²) error of w smooth through the center.
            w[0] = (4.0 * w[1] - w[2]) / 3.0;
            let (w1, w2) = radial_profile_derivatives(&w, hr);
            for k in 1..nr.saturating_sub(1) {
                let r = k as f64 * hr;
                pairs.push((r * w2[k] + (nf + 1.0) * w1[k], r * w[k]));
            }
        }
        _ => {
            let g = gradient(u)?;
            let axis = grid.spec().radius().unwrap_or(0.0) / 8.0;
            let deep: Vec<usize> = deep_interior(grid).into_iter().filter(|&i| grid.radius_of(i) >= axis).collect();
            for i in 0..grid.dim() {
                let comp = g.component(i)?;
                let lap = laplacian(&comp)?;
                pairs.extend(deep.iter().map(|&k| (lap.values()[k], comp.values()[k])));
            }
        }
    }
    let max_grad = pairs.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let mut lhs = f64::NEG_INFINITY;
    let mut gap: f64 = 0.0;
    for (lap, d) in pairs {
        let e = lap.abs() - fp * d.abs();
        lhs = lhs.max(e);
        gap = gap.max(e.abs());
    }
    let tolerance = 5.0 * h2(grid) * (fp * max_grad).max(1.0);
    let report = BoundReport::new("c3", lhs, 0.0, Orientation::LhsLeqRhs, Tolerance::Absolute(tolerance), Context::of(grid, field_name(u)))
        .with_note(format!("sup|f'(u)| = {fp:.6e}, max two-sided gap {gap:.3e}"));
    Ok(C3Check { report, max_abs_gap: gap, tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::lift_radial;
    use std::f64::consts::PI;

    fn solve(f: Nonlinearity, n: usize, res: usize) -> SemilinearSolution {
        solve_radial_semilinear(&SemilinearProblem::new(f, 1.0, n).unwrap(), res).unwrap()
    }

    #[test]
    fn torsion_profile() {
        let s = solve(Nonlinearity::Constant { c: 1.0 }, 2, 128);
        let grid = s.u.grid().clone();
        for i in 0..grid.len() {
            let r = grid.radius_of(i);
            assert!((s.u.values()[i] - (r * r - 1.0) / 4.0).abs() < 1e-8);
        }
        assert!(s.residual < 1e-8);
        assert!(p_identity_residual(&s.u, &|_| 0.0).unwrap() < 1e-8);
        let c3 = c3_check(&s.u, &s.problem).unwrap();
        assert!(c3.report.pass().unwrap() && c3.max_abs_gap < 1e-8);
    }

    #[test]
    fn eigen_profile_matches_sine() {
        let s = solve(Nonlinearity::Linear { k: None }, 3, 512);
        let k = s.problem.k().unwrap();
        assert!((k + PI * PI).abs() < 1e-6, "{k}");
        let grid = s.u.grid().clone();
        for i in 1..grid.len() {
            let r = grid.radius_of(i);
            let exact = -(PI * r).sin() / (PI * r);
            assert!((s.u.values()[i] - exact).abs() < 1e-6);
        }
        let c3 = c3_check(&s.u, &s.problem).unwrap();
        assert!(c3.report.pass().unwrap() && c3.equality(), "{c3:?}");
    }

    #[test]
    fn gelfand_and_power_solve() {
        let s = solve(Nonlinearity::Exp, 2, 256);
        assert!(s.residual < 1e-4 && s.center_value < 0.0);
        let s = solve(Nonlinearity::Power { c0: 2.0, p: 4.0 }, 2, 1024);
        assert!(s.residual < 1e-4 && s.center_value < 0.0, "{} {}", s.center_value, s.residual);
        let rs = gradient_bound_chain(&s.u, &s.problem).unwrap();
        assert!(rs.iter().filter(|r| r.is_scoped()).all(|r| r.pass().unwrap()), "{rs:#?}");
        assert!(rs.iter().any(|r| r.id == "semilinear-power-lp"));
    }

    #[test]
    fn torsion_chain_is_equality_in_2d_and_3d() {
        for n in [2, 3] {
            let s = solve(Nonlinearity::Constant { c: 1.0 }, n, 64);
            let rs = gradient_bound_chain(&s.u, &s.problem).unwrap();
            let abp = rs.iter().find(|r| r.id == "semilinear-abp").unwrap();
            assert!((abp.ratio().unwrap() - 1.0).abs() < 1e-10, "{abp:?}");
            assert!(rs.iter().filter(|r| r.is_scoped()).all(|r| r.pass().unwrap()));
        }
    }

    #[test]
    fn lifted_chain_matches_radial() {
        let s = solve(Nonlinearity::Exp, 2, 64);
        let (polar, _) = make_domain(&DomainSpec::disk(1.0), 64).unwrap();
        let lifted = lift_radial(&s.u, &polar).unwrap();
        let a = gradient_bound_chain(&s.u, &s.problem).unwrap();
        let b = gradient_bound_chain(&lifted, &s.problem).unwrap();
        for (x, y) in a.iter().zip(&b).filter(|(x, _)| x.id != "semilinear-harnack-ratio") {
            assert!((x.lhs - y.lhs).abs() < 1e-8 && (x.rhs - y.rhs).abs() < 1e-8, "{x:?} {y:?}");
        }
    }

    #[test]
    fn registry_parses_and_rejects() {
        let mut p = Params::new();
        p.insert("c".into(), toml::Value::Float(2.0));
        assert_eq!(Nonlinearity::from_name("constant", &p).unwrap(), Nonlinearity::Constant { c: 2.0 });
        assert!(Nonlinearity::from_name("linear", &p).is_err());
        assert!(Nonlinearity::from_name("cubic", &Params::new()).is_err());
        assert!(SemilinearProblem::new(Nonlinearity::Power { c0: 1.0, p: 1.0 }, 1.0, 2).is_err());
    }
}
