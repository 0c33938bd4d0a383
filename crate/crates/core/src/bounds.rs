//! Both sides of each inequality, evaluated on grid data, with pass/fail
//! against a discretization slack and the provenance of every constant.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::contact::{contact_set, ContactMask, Side};
use crate::eigensolve::{Bc, EigenPair, Operator};
use crate::error::{Error, Result};
use crate::fields::{
    boundary_integral, boundary_trace, gradient_and_hessian, hessian, laplacian, lp_norm, normal_derivative,
    BoundaryScalar, ScalarField,
};
use crate::geometry::{measures, unit_ball_volume, DomainKind, Grid};
use crate::linalg::{det, sym_norm};
use crate::operators::{linear_apply, pucci_field, Ellipticity, LinearCoefficients, PucciSign};

/// Stable registry keys of every report this module emits.
pub const BOUND_IDS: &[&str] = &[
    "abp-linear",
    "laplacian-Ln-lower",
    "laplacian-Lp-lower",
    "laplacian-Linf-lower",
    "laplacian-flux-Lp-lower",
    "laplacian-flux-Linf-lower",
    "laplace-eigen-dirichlet",
    "laplace-eigen-dirichlet-contact",
    "laplace-eigen-robin",
    "laplace-eigen-robin-contact",
    "laplace-eigen-bessel3",
    "ma-normal-derivative",
    "ma-normal-derivative-sup",
    "ma-eigen",
    "ma-eigen-robin",
    "ma-eigen-cn",
    "pucci-abp",
    "pucci-eigen",
    "pucci-eigen-robin",
    "semilinear-interior-boundary",
    "semilinear-normal-gradient",
    "semilinear-abp",
    "semilinear-power-lp",
    "semilinear-harnack-ratio",
    "c3",
    "c3-equality",
    "bochner-residual",
    "semilinear-residual",
    "ball-inclusion",
    "inclusion-wrong-branch",
    "contact-area",
    "amgm-pointwise",
    "amgm-equality",
    "eigenvalue-reference",
    "solver-agreement",
    "ma-scaling",
    "pucci-laplace-coincidence",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    LhsLeqRhs,
    LhsGeqRhs,
    Equal,
    /// Strict `lhs < rhs` without slack, for predicted failures.
    LhsLtRhs,
    /// No pass/fail judgement (constant unknown or out of scope).
    ReportOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    /// Slack as a fraction of |rhs|.
    Relative(f64),
    Absolute(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    PaperExplicit,
    DerivedFromProof,
    UserSupplied,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::PaperExplicit => "paper_explicit",
            Provenance::DerivedFromProof => "derived_from_proof",
            Provenance::UserSupplied => "user_supplied",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Context {
    pub domain: String,
    pub resolution: usize,
    pub field: String,
}

impl Context {
    pub fn of(grid: &Grid, field: impl Into<String>) -> Self {
        Context { domain: grid.spec().to_string(), resolution: grid.resolution(), field: field.into() }
    }
}

/// One evaluated inequality. `pass` is never stored; it is recomputed from
/// `lhs`, `rhs` and the tolerance whenever it is read or serialized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "WireReport", try_from = "WireReport")]
pub struct BoundReport {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub orientation: Orientation,
    pub tolerance: Tolerance,
    pub constant: Option<Constant>,
    pub vacuous: bool,
    pub context: Context,
    pub note: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct WireReport {
    id: String,
    lhs: f64,
    rhs: f64,
    ratio: Option<f64>,
    pass: Option<bool>,
    orientation: Orientation,
    tolerance: Tolerance,
    constant: Option<Constant>,
    #[serde(default)]
    vacuous: bool,
    context: Context,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl From<BoundReport> for WireReport {
    fn from(r: BoundReport) -> Self {
        WireReport {
            ratio: r.ratio(),
            pass: r.pass(),
            id: r.id,
            lhs: r.lhs,
            rhs: r.rhs,
            orientation: r.orientation,
            tolerance: r.tolerance,
            constant: r.constant,
            vacuous: r.vacuous,
            context: r.context,
            note: r.note,
        }
    }
}

impl TryFrom<WireReport> for BoundReport {
    type Error = String;

    fn try_from(w: WireReport) -> std::result::Result<Self, String> {
        let r = BoundReport {
            id: w.id,
            lhs: w.lhs,
            rhs: w.rhs,
            orientation: w.orientation,
            tolerance: w.tolerance,
            constant: w.constant,
            vacuous: w.vacuous,
            context: w.context,
            note: w.note,
        };
        if w.pass.is_some() && w.pass != r.pass() {
            return Err(format!("report `{}`: stored pass flag disagrees with lhs/rhs", r.id));
        }
        Ok(r)
    }
}

impl BoundReport {
    pub fn new(id: &str, lhs: f64, rhs: f64, orientation: Orientation, tolerance: Tolerance, context: Context) -> Self {
        BoundReport {
            id: id.to_string(),
            lhs,
            rhs,
            orientation,
            tolerance,
            constant: None,
            vacuous: false,
            context,
            note: None,
        }
    }

    pub fn with_constant(mut self, value: f64, provenance: Provenance) -> Self {
        self.constant = Some(Constant { value, provenance });
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// lhs/rhs, `None` when undefined.
    pub fn ratio(&self) -> Option<f64> {
        let r = self.lhs / self.rhs;
        r.is_finite().then_some(r)
    }

    pub fn slack(&self) -> f64 {
        match self.tolerance {
            Tolerance::Relative(t) => t * self.rhs.abs(),
            Tolerance::Absolute(t) => t,
        }
    }

    /// `None` for report-only entries.
    pub fn pass(&self) -> Option<bool> {
        let s = self.slack();
        match self.orientation {
            Orientation::LhsLeqRhs => Some(self.lhs <= self.rhs + s),
            Orientation::LhsGeqRhs => Some(self.lhs >= self.rhs - s),
            Orientation::Equal => Some((self.lhs - self.rhs).abs() <= s),
            Orientation::LhsLtRhs => Some(self.lhs < self.rhs),
            Orientation::ReportOnly => None,
        }
    }

    pub fn is_scoped(&self) -> bool {
        self.orientation != Orientation::ReportOnly
    }
}

/// 2% at resolution 128 and coarser, shrinking as h² beyond.
pub fn relative_slack(resolution: usize) -> f64 {
    let s = 128.0 / resolution as f64;
    0.02 * (s * s).min(1.0)
}

pub(crate) fn rel(grid: &Grid) -> Tolerance {
    Tolerance::Relative(relative_slack(grid.resolution()))
}

pub(crate) fn h2(grid: &Grid) -> f64 {
    let h = grid.spacing();
    h * h
}

pub(crate) fn field_name(u: &ScalarField) -> String {
    u.source().unwrap_or("field").to_string()
}

/// `1/(n|B₁|^{1/n})`, the constant the AM-GM + area-formula chain produces.
pub fn abp_constant(n: usize) -> f64 {
    1.0 / (n as f64 * unit_ball_volume(n).powf(1.0 / n as f64))
}

/// Sign branch: `∂u/∂ν > 0` everywhere selects the lower contact set,
/// `< 0` everywhere the upper one.
pub fn normal_branch(nd: &BoundaryScalar) -> Result<Side> {
    let (lo, hi) = nd.edge_range();
    if lo > 0.0 {
        Ok(Side::Lower)
    } else if hi < 0.0 {
        Ok(Side::Upper)
    } else {
        Err(Error::NoBranch(format!("normal derivative ranges over [{lo:.3e}, {hi:.3e}]")))
    }
}

/// `inf_{∂Ω}|∂u/∂ν| ≤ C‖f⁻/D*‖_{L^n(Γ)}`, Γ the contact set of the sign branch.
///
/// Requires `Lu ≥ f − 5h²` at interior nodes. The explicit constant is used
/// only without drift; with drift the report is judged only if `user_c` is
/// given.
pub fn abp_normal_derivative_linear(
    u: &ScalarField,
    l: &LinearCoefficients,
    f: &ScalarField,
    user_c: Option<f64>,
) -> Result<BoundReport> {
    let nd = normal_derivative(u, u.grid().boundary())?;
    abp_linear_on(u, l, f, normal_branch(&nd)?, user_c)
}

/// As [`abp_normal_derivative_linear`] with the branch forced; refuses the
/// branch that the boundary sign does not select.
pub fn abp_linear_on(
    u: &ScalarField,
    l: &LinearCoefficients,
    f: &ScalarField,
    side: Side,
    user_c: Option<f64>,
) -> Result<BoundReport> {
    let grid = u.grid();
    let n = grid.dim();
    let nd = normal_derivative(u, grid.boundary())?;
    let branch = normal_branch(&nd)?;
    if branch != side {
        return Err(Error::NoBranch(format!("normal derivative selects the {branch} contact set, not {side}")));
    }
    let lu = linear_apply(l, u)?;
    let tol = 5.0 * h2(grid);
    let mut worst: Option<(usize, f64)> = None;
    for i in grid.interior_nodes() {
        let gap = f.values()[i] - lu.values()[i];
        if gap > tol && worst.is_none_or(|(_, g)| gap > g) {
            worst = Some((i, gap));
        }
    }
    if let Some((i, gap)) = worst {
        return Err(Error::Hypothesis(format!(
            "subsolution check fails at node {i} {:?}: f − Lu = {gap:.3e} > {tol:.3e}",
            grid.point(i)
        )));
    }
    let lhs = nd.inf_abs();
    if !(lhs > 0.0) {
        return Err(Error::Hypothesis("inf |du/dnu| must be positive".into()));
    }
    let mask = contact_set(u, side)?;
    let ds = l.d_star()?;
    let g = f.zip_map(&ds, |fv, d| (-fv).max(0.0) / d)?;
    let norm = lp_norm(&g, n as f64, Some(&mask))?;
    let ctx = Context::of(grid, field_name(u));
    let report = match (l.has_drift(), user_c) {
        (_, Some(c)) => BoundReport::new("abp-linear", lhs, c * norm, Orientation::LhsLeqRhs, rel(grid), ctx)
            .with_constant(c, Provenance::UserSupplied),
        (false, None) => {
            let c = abp_constant(n);
            BoundReport::new("abp-linear", lhs, c * norm, Orientation::LhsLeqRhs, rel(grid), ctx)
                .with_constant(c, Provenance::DerivedFromProof)
        }
        (true, None) => BoundReport::new("abp-linear", lhs, norm, Orientation::ReportOnly, rel(grid), ctx)
            .with_note("drift present and no constant supplied: rhs is the bare norm"),
    };
    Ok(report.with_note(format!("contact set: {side}, {} nodes, coefficients {}", mask.count(), l.name())))
}

#[derive(Clone, Debug, Default)]
pub struct LowerBounds {
    pub reports: Vec<BoundReport>,
    /// (id, reason) for every form whose hypothesis failed.
    pub skipped: Vec<(String, String)>,
}

/// Lower bounds on ‖Δu‖ from `∂u/∂ν ≥ α` and, where the form needs them,
/// `∂u/∂ν = α` and `Δu ≥ 0`.
pub fn laplacian_lower_bounds(u: &ScalarField, alpha: f64, p: f64) -> Result<LowerBounds> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let grid = u.grid();
    let n = grid.dim();
    let nf = n as f64;
    let b1 = unit_ball_volume(n);
    let perimeter = measures(grid.spec()).perimeter;
    let nd = normal_derivative(u, grid.boundary())?;
    let (lo, hi) = nd.edge_range();
    let lap = laplacian(u)?;
    let eq_tol = 1e-8 * alpha.max(1.0);
    let lower_ok = lo >= alpha - eq_tol;
    let constant_ok = lower_ok && hi <= alpha + eq_tol;
    let min_lap = lap.values().iter().copied().fold(f64::INFINITY, f64::min);
    let subharmonic = min_lap >= -5.0 * h2(grid);
    let ctx = || Context::of(grid, field_name(u));
    let mut out = LowerBounds::default();
    let mut push = |id: &str, ok: std::result::Result<(), String>, make: &dyn Fn() -> Result<BoundReport>| -> Result<()> {
        match ok {
            Ok(()) => out.reports.push(make()?),
            Err(why) => out.skipped.push((id.to_string(), why)),
        }
        Ok(())
    };
    let need_lower = || if lower_ok { Ok(()) } else { Err(format!("min du/dnu = {lo:.6e} < alpha = {alpha}")) };
    let need_const = || {
        if !constant_ok {
            Err(format!("du/dnu ranges over [{lo:.6e}, {hi:.6e}], not alpha = {alpha} ± {eq_tol:.0e}"))
        } else if !subharmonic {
            Err(format!("min Laplacian {min_lap:.3e} is negative"))
        } else {
            Ok(())
        }
    };
    let need_flux = || {
        need_lower()?;
        if subharmonic {
            Ok(())
        } else {
            Err(format!("min Laplacian {min_lap:.3e} is negative"))
        }
    };
    let p_ok = || {
        if p >= nf && p.is_finite() {
            Ok(())
        } else {
            Err(format!("p = {p} is not a finite exponent ≥ n = {n}"))
        }
    };

    push("laplacian-Ln-lower", need_lower(), &|| {
        Ok(BoundReport::new(
            "laplacian-Ln-lower",
            lp_norm(&lap, nf, None)?,
            nf * alpha * b1.powf(1.0 / nf),
            Orientation::LhsGeqRhs,
            rel(grid),
            ctx(),
        )
        .with_constant(nf * b1.powf(1.0 / nf), Provenance::PaperExplicit))
    })?;
    let lp_exp = 1.0 / (p * (nf - 1.0));
    push("laplacian-Lp-lower", p_ok().and_then(|_| need_const()), &|| {
        let rhs = alpha * (nf.powf(nf * (p - 1.0)) * b1.powf(p - 1.0) / perimeter.powf(p - nf)).powf(lp_exp);
        Ok(BoundReport::new("laplacian-Lp-lower", lp_norm(&lap, p, None)?, rhs, Orientation::LhsGeqRhs, rel(grid), ctx())
            .with_note(format!("p = {p}")))
    })?;
    push("laplacian-Linf-lower", need_const(), &|| {
        let rhs = alpha * (nf.powf(nf) * b1 / perimeter).powf(1.0 / (nf - 1.0));
        Ok(BoundReport::new(
            "laplacian-Linf-lower",
            lp_norm(&lap, f64::INFINITY, None)?,
            rhs,
            Orientation::LhsGeqRhs,
            rel(grid),
            ctx(),
        ))
    })?;
    let flux = boundary_integral(&nd);
    push("laplacian-flux-Lp-lower", p_ok().and_then(|_| need_flux()), &|| {
        let rhs = ((nf * alpha).powf(nf * (p - 1.0)) * b1.powf(p - 1.0) / flux.powf(p - nf)).powf(lp_exp);
        Ok(BoundReport::new(
            "laplacian-flux-Lp-lower",
            lp_norm(&lap, p, None)?,
            rhs,
            Orientation::LhsGeqRhs,
            rel(grid),
            ctx(),
        )
        .with_note(format!("p = {p}, flux = {flux:.10e}")))
    })?;
    push("laplacian-flux-Linf-lower", need_flux(), &|| {
        let rhs = ((nf * alpha).powf(nf) * b1 / flux).powf(1.0 / (nf - 1.0));
        Ok(BoundReport::new(
            "laplacian-flux-Linf-lower",
            lp_norm(&lap, f64::INFINITY, None)?,
            rhs,
            Orientation::LhsGeqRhs,
            rel(grid),
            ctx(),
        )
        .with_note(format!("flux = {flux:.10e}")))
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryCheck {
    /// Whether the report was within 2% of equality.
    pub triggered: bool,
    pub is_equality: bool,
    pub k: f64,
    pub x0: Vec<f64>,
    pub hessian_deviation: f64,
    pub tolerance: f64,
    pub domain_is_ball: bool,
}

/// Equality-case test: Hessian ≈ k·Id everywhere and Ω a ball.
pub fn symmetry_equality_check(u: &ScalarField, report: &BoundReport) -> Result<SymmetryCheck> {
    let grid = u.grid();
    let n = grid.dim();
    let h = hessian(u)?;
    let (mut num, mut den) = (0.0, 0.0);
    for i in grid.interior_nodes() {
        num += h.trace(i) * grid.volume(i);
        den += grid.volume(i);
    }
    let k = num / den / n as f64;
    let mut deviation: f64 = 0.0;
    let mut m = vec![0.0; n * n];
    for i in grid.interior_nodes() {
        m.copy_from_slice(h.at(i));
        for a in 0..n {
            m[a * n + a] -= k;
        }
        deviation = deviation.max(sym_norm(&m, n));
    }
    let argmin = (0..u.len())
        .min_by(|&a, &b| u.values()[a].total_cmp(&u.values()[b]))
        .ok_or(Error::EmptyRegion)?;
    let triggered = report.ratio().is_some_and(|r| (r - 1.0).abs() <= 0.02);
    let tolerance = 5.0 * h2(grid);
    let domain_is_ball = grid.spec().is_ball();
    Ok(SymmetryCheck {
        triggered,
        is_equality: triggered && deviation <= tolerance && domain_is_ball,
        k,
        x0: grid.point(argmin).to_vec(),
        hessian_deviation: deviation,
        tolerance,
        domain_is_ball,
    })
}

fn check_residual(pair: &EigenPair) -> Result<()> {
    if !(pair.residual <= 1e-4 * pair.lambda.abs().max(1.0)) {
        return Err(Error::Hypothesis(format!(
            "eigenpair residual {:.3e} too large for lambda {}",
            pair.residual, pair.lambda
        )));
    }
    Ok(())
}

fn pair_context(pair: &EigenPair) -> Context {
    Context::of(pair.phi.grid(), format!("{} {} eigenfunction ({:?})", pair.operator, pair.bc, pair.solver))
}

/// Laplacian eigenvalue bounds: over Ω, and restricted to the contact set of
/// the sign branch; for the unit 3-ball also the closed Bessel form.
pub fn eigen_bound_laplace(pair: &EigenPair) -> Result<Vec<BoundReport>> {
    if pair.operator != Operator::Laplace {
        return Err(Error::InvalidArgument(format!("expected a Laplace eigenpair, got {}", pair.operator)));
    }
    check_residual(pair)?;
    let phi = &pair.phi;
    let grid = phi.grid();
    let b = grid.boundary();
    let n = grid.dim();
    let nf = n as f64;
    let c = nf * unit_ball_volume(n).powf(1.0 / nf);
    let nd = normal_derivative(phi, b)?;
    let (id, id_contact, numer) = match pair.bc {
        Bc::Dirichlet => ("laplace-eigen-dirichlet", "laplace-eigen-dirichlet-contact", nd.inf_abs()),
        Bc::Robin { alpha } => ("laplace-eigen-robin", "laplace-eigen-robin-contact", alpha.abs() * boundary_trace(phi, b)?.inf_abs()),
    };
    let lambda = pair.lambda.abs();
    let norm = lp_norm(phi, nf, None)?;
    let mut out = vec![BoundReport::new(id, lambda, c * numer / norm, Orientation::LhsGeqRhs, rel(grid), pair_context(pair))
        .with_constant(c, Provenance::PaperExplicit)];
    if let Ok(side) = normal_branch(&nd) {
        let mask = contact_set(phi, side)?;
        let norm_g = lp_norm(phi, nf, Some(&mask))?;
        out.push(
            BoundReport::new(id_contact, lambda, c * numer / norm_g, Orientation::LhsGeqRhs, rel(grid), pair_context(pair))
                .with_constant(c, Provenance::PaperExplicit)
                .with_note(format!("norm over the {side} contact set ({} nodes)", mask.count())),
        );
    }
    if let DomainKind::RadialBall { dimension: 3, radius } = grid.spec().kind {
        if radius == 1.0 && pair.bc == Bc::Dirichlet {
            let s = lambda.sqrt();
            out.push(BoundReport::new(
                "laplace-eigen-bessel3",
                lambda.powf(1.5),
                3.0 * (s * s.cos() - s.sin()).abs(),
                Orientation::LhsGeqRhs,
                rel(grid),
                pair_context(pair),
            ));
        }
    }
    Ok(out)
}

/// `inf ∂u/∂ν ≤ (‖f‖_{L¹(Γ_u)}/|B₁|)^{1/n}` when `∂u/∂ν > 0`, or
/// `sup ∂u/∂ν ≥ −(‖f‖_{L¹(Γ^u)}/|B₁|)^{1/n}` when `∂u/∂ν < 0`.
pub fn ma_normal_derivative_bound(u: &ScalarField, f: &ScalarField) -> Result<BoundReport> {
    let grid = u.grid();
    let n = grid.dim();
    let h = hessian(u)?;
    let tol = 5.0 * h2(grid);
    for i in grid.interior_nodes() {
        let gap = (det(h.at(i), n) - f.values()[i]).abs();
        if gap > tol {
            return Err(Error::Hypothesis(format!("det Hessian differs from f by {gap:.3e} at node {i}")));
        }
    }
    let nd = normal_derivative(u, grid.boundary())?;
    let side = normal_branch(&nd)?;
    let mask = contact_set(u, side)?;
    let l1 = lp_norm(f, 1.0, Some(&mask))?;
    let bound = (l1 / unit_ball_volume(n)).powf(1.0 / n as f64);
    let (lo, hi) = nd.edge_range();
    let ctx = Context::of(grid, field_name(u));
    let note = format!("contact set: {side}, {} nodes", mask.count());
    Ok(match side {
        Side::Lower => BoundReport::new("ma-normal-derivative", lo, bound, Orientation::LhsLeqRhs, rel(grid), ctx),
        Side::Upper => BoundReport::new("ma-normal-derivative-sup", hi, -bound, Orientation::LhsGeqRhs, rel(grid), ctx),
    }
    .with_note(note))
}

/// Monge-Ampère eigenvalue bound (Dirichlet or Robin) plus the report-only
/// estimate `inf|∇u| ≤ C(n)|Ω|^{−2/n}‖u‖_{L^n}`, whose ratio is the implied
/// lower bound on C(n).
pub fn ma_eigen_bound(pair: &EigenPair) -> Result<Vec<BoundReport>> {
    if pair.operator != Operator::MongeAmpere {
        return Err(Error::InvalidArgument(format!("expected a Monge-Ampère eigenpair, got {}", pair.operator)));
    }
    let u = &pair.phi;
    let grid = u.grid();
    let n = grid.dim();
    let nf = n as f64;
    let b1 = unit_ball_volume(n);
    let h = hessian(u)?;
    if let Some(i) = grid.interior_nodes().find(|&i| crate::linalg::sym_eigenvalues(h.at(i), n)[0] < -5.0 * h2(grid)) {
        return Err(Error::Hypothesis(format!("eigenfunction is not convex at node {i}")));
    }
    let b = grid.boundary();
    let grad_inf = normal_derivative(u, b)?.inf_abs();
    let norm = lp_norm(u, nf, None)?;
    let (id, numer) = match pair.bc {
        Bc::Dirichlet => ("ma-eigen", grad_inf),
        Bc::Robin { alpha } => ("ma-eigen-robin", alpha.abs() * boundary_trace(u, b)?.inf_abs()),
    };
    let mut main = BoundReport::new(id, pair.lambda, b1 * (numer / norm).powf(nf), Orientation::LhsGeqRhs, rel(grid), pair_context(pair))
        .with_constant(b1, Provenance::PaperExplicit);
    if numer == 0.0 {
        main.vacuous = true;
        main = main.with_note("boundary infimum vanishes: bound is vacuous");
    }
    let volume = measures(grid.spec()).volume;
    let cn = BoundReport::new(
        "ma-eigen-cn",
        grad_inf,
        norm / volume.powf(2.0 / nf),
        Orientation::ReportOnly,
        rel(grid),
        pair_context(pair),
    )
    .with_note("C(n) is not stated; ratio is the implied lower bound on it");
    Ok(vec![main, cn])
}

/// `1/(nθ|B₁|^{1/n})`.
pub fn pucci_constant(n: usize, e: Ellipticity) -> f64 {
    abp_constant(n) / e.theta
}

/// `inf|∂u/∂ν| ≤ C(∫_{Γ_u}(f⁺)ⁿ)^{1/n}` for `M⁻(∇²u) ≤ f`.
pub fn pucci_abp_bound(u: &ScalarField, f: &ScalarField, e: Ellipticity) -> Result<BoundReport> {
    let grid = u.grid();
    let n = grid.dim();
    let (_, h) = gradient_and_hessian(u)?;
    let m = pucci_field(&h, e, PucciSign::Minus)?;
    let tol = 5.0 * h2(grid);
    if let Some(i) = grid.interior_nodes().find(|&i| m.values()[i] > f.values()[i] + tol) {
        return Err(Error::Hypothesis(format!(
            "supersolution check fails at node {i}: M⁻ = {:.6e} > f = {:.6e}",
            m.values()[i],
            f.values()[i]
        )));
    }
    let lhs = normal_derivative(u, grid.boundary())?.inf_abs();
    if !(lhs > 0.0) {
        return Err(Error::Hypothesis("inf |du/dnu| must be positive".into()));
    }
    let mask = contact_set(u, Side::Lower)?;
    let fplus = f.map(|v| v.max(0.0))?;
    let c = pucci_constant(n, e);
    Ok(BoundReport::new("pucci-abp", lhs, c * lp_norm(&fplus, n as f64, Some(&mask))?, Orientation::LhsLeqRhs, rel(grid), Context::of(grid, field_name(u)))
        .with_constant(c, Provenance::DerivedFromProof)
        .with_note(format!("theta = {}, Theta = {}, contact set {} nodes", e.theta, e.big_theta, mask.count())))
}

/// Pucci eigenvalue bound over the lower contact set of the eigenfunction.
pub fn pucci_eigen_bound(pair: &EigenPair) -> Result<BoundReport> {
    let e = match pair.operator {
        Operator::Pucci(e) => e,
        Operator::Laplace => Ellipticity::LAPLACE,
        other => return Err(Error::InvalidArgument(format!("expected a Pucci eigenpair, got {other}"))),
    };
    check_residual(pair)?;
    let u = &pair.phi;
    let grid = u.grid();
    let n = grid.dim();
    let b = grid.boundary();
    let mask: ContactMask = contact_set(u, Side::Lower)?;
    let up = u.map(|v| v.abs().powf(pair.p))?;
    let norm = lp_norm(&up, n as f64, Some(&mask))?;
    let c = pucci_constant(n, e);
    let (id, numer) = match pair.bc {
        Bc::Dirichlet => ("pucci-eigen", normal_derivative(u, b)?.inf_abs()),
        Bc::Robin { alpha } => ("pucci-eigen-robin", alpha.abs() * boundary_trace(u, b)?.inf_abs()),
    };
    Ok(BoundReport::new(id, pair.lambda, numer / (c * norm), Orientation::LhsGeqRhs, rel(grid), pair_context(pair))
        .with_constant(c, Provenance::DerivedFromProof)
        .with_note(format!("p = {}, contact set {} of {} nodes", pair.p, mask.count(), grid.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{laplace_eigen_fd, radial_shoot_eigen, SolverOptions};
    use crate::expr::Expr;
    use crate::fields::sample;
    use crate::geometry::{make_domain, DomainSpec};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn disk(res: usize) -> Arc<Grid> {
        make_domain(&DomainSpec::disk(1.0), res).unwrap().0
    }

    fn torsion(g: &Arc<Grid>) -> ScalarField {
        ScalarField::from_fn(g, |x| (x[0] * x[0] + x[1] * x[1] - 1.0) / 4.0).unwrap()
    }

    fn constant(g: &Arc<Grid>, c: f64) -> ScalarField {
        ScalarField::new(g.clone(), vec![c; g.len()]).unwrap()
    }

    #[test]
    fn pass_is_recomputed_and_round_trips() {
        let g = disk(16);
        let r = BoundReport::new("x", 1.0, 1.01, Orientation::LhsGeqRhs, Tolerance::Relative(0.02), Context::of(&g, "f"));
        assert_eq!(r.pass(), Some(true));
        let mut moved = r.clone();
        moved.rhs = 1.1;
        assert_eq!(moved.pass(), Some(false));
        let s = serde_json::to_string(&moved).unwrap();
        let back: BoundReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, moved);
        let forged = s.replace("\"pass\":false", "\"pass\":true");
        assert!(serde_json::from_str::<BoundReport>(&forged).is_err());
    }

    #[test]
    fn linear_abp_examples() {
        let g = disk(32);
        let lap = LinearCoefficients::from_name("laplace", &g).unwrap();
        let r = abp_normal_derivative_linear(&torsion(&g), &lap, &constant(&g, -1.0), None).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-10 && (r.rhs - 0.5).abs() < 1e-10, "{r:?}");
        assert_eq!(r.constant.unwrap().provenance, Provenance::DerivedFromProof);
        let q = ScalarField::from_fn(&g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let r = abp_normal_derivative_linear(&q, &lap, &constant(&g, -2.0), None).unwrap();
        assert!((r.ratio().unwrap() - 1.0).abs() < 1e-10);
        let drift = LinearCoefficients::from_name("drift-x", &g).unwrap();
        let f = linear_apply(&drift, &torsion(&g)).unwrap().map(|v| -v).unwrap();
        let r = abp_normal_derivative_linear(&torsion(&g), &drift, &f, Some(10.0)).unwrap();
        assert_eq!(r.constant.unwrap().provenance, Provenance::UserSupplied);
        let r = abp_normal_derivative_linear(&torsion(&g), &drift, &f, None).unwrap();
        assert_eq!(r.pass(), None);
        // Subsolution failure names the node.
        let err = abp_normal_derivative_linear(&torsion(&g), &lap, &constant(&g, 2.0), None).unwrap_err();
        assert!(err.to_string().contains("node"), "{err}");
    }

    #[test]
    fn branch_consistency() {
        let g = disk(24);
        let lap = LinearCoefficients::from_name("laplace", &g).unwrap();
        let u = torsion(&g).map(|v| -v).unwrap();
        let f = constant(&g, -1.0);
        let r = abp_normal_derivative_linear(&u, &lap, &f, None).unwrap();
        assert!(r.note.as_deref().unwrap().contains("upper"));
        assert!(matches!(abp_linear_on(&u, &lap, &f, Side::Lower, None), Err(Error::NoBranch(_))));
    }

    #[test]
    fn laplacian_lower_bound_examples() {
        let g = disk(32);
        let b = laplacian_lower_bounds(&torsion(&g), 0.5, 4.0).unwrap();
        assert!(b.skipped.is_empty(), "{:?}", b.skipped);
        let by = |id: &str| b.reports.iter().find(|r| r.id == id).unwrap().clone();
        let ln = by("laplacian-Ln-lower");
        assert!((ln.lhs - PI.sqrt()).abs() < 1e-10 && (ln.rhs - PI.sqrt()).abs() < 1e-10);
        let lp = by("laplacian-Lp-lower");
        assert!((lp.lhs - PI.powf(0.25)).abs() < 1e-10);
        assert!(lp.pass().unwrap());
        for r in &b.reports {
            assert!((r.ratio().unwrap() - 1.0).abs() < 1e-8, "{r:?}");
        }
        let q = ScalarField::from_fn(&g, |x| x[0] * x[0] + x[1] * x[1]).unwrap();
        let b = laplacian_lower_bounds(&q, 2.0, 2.0).unwrap();
        let ln = &b.reports[0];
        assert!((ln.lhs - 4.0 * PI.sqrt()).abs() < 1e-9 && (ln.rhs - 4.0 * PI.sqrt()).abs() < 1e-9);
        // Non-constant normal derivative skips the equality-hypothesis forms.
        let aniso = ScalarField::from_fn(&g, |x| x[0] * x[0] + 2.0 * x[1] * x[1]).unwrap();
        let b = laplacian_lower_bounds(&aniso, 2.0, 4.0).unwrap();
        assert!(b.skipped.iter().any(|(id, _)| id == "laplacian-Lp-lower"));
        assert!(b.reports.iter().all(|r| r.pass().unwrap()));
    }

    #[test]
    fn symmetry_examples() {
        let g = disk(32);
        let u = torsion(&g);
        let r = laplacian_lower_bounds(&u, 0.5, 2.0).unwrap().reports.remove(0);
        let s = symmetry_equality_check(&u, &r).unwrap();
        assert!(s.is_equality && (s.k - 0.5).abs() < 1e-10 && s.x0.iter().all(|c| c.abs() < 1e-12));
        let a = ScalarField::from_fn(&g, |x| x[0] * x[0] + 2.0 * x[1] * x[1]).unwrap();
        let s = symmetry_equality_check(&a, &r).unwrap();
        assert!(!s.is_equality && (s.hessian_deviation - 1.0).abs() < 1e-8);
        let (sq, _) = make_domain(&DomainSpec::rectangle(1.0, 1.0), 32).unwrap();
        let t = sample(&sq, &Expr::Quadratic { scale: 0.25 }).unwrap();
        let s = symmetry_equality_check(&t, &r).unwrap();
        assert!(!s.domain_is_ball && !s.is_equality);
    }

    #[test]
    fn ma_normal_examples() {
        let g = disk(32);
        let q = ScalarField::from_fn(&g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let r = ma_normal_derivative_bound(&q, &constant(&g, 1.0)).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-10 && (r.rhs - 1.0).abs() < 1e-10);
        let q2 = q.scaled(2.0).unwrap();
        let r = ma_normal_derivative_bound(&q2, &constant(&g, 4.0)).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-10 && (r.rhs - 2.0).abs() < 1e-10);
        let neg = q.scaled(-1.0).unwrap();
        let r = ma_normal_derivative_bound(&neg, &constant(&g, 1.0)).unwrap();
        assert_eq!(r.id, "ma-normal-derivative-sup");
        assert!((r.lhs + 1.0).abs() < 1e-10 && (r.rhs + 1.0).abs() < 1e-10);
        let mixed = ScalarField::from_fn(&g, |x| x[0] * x[1]).unwrap();
        assert!(matches!(ma_normal_derivative_bound(&mixed, &constant(&g, -1.0)), Err(Error::NoBranch(_))));
    }

    #[test]
    fn eigen_bounds_disk_and_ball() {
        let o = SolverOptions::default();
        let pair = laplace_eigen_fd(&DomainSpec::disk(1.0), 64, Bc::Dirichlet, &o).unwrap();
        let rs = eigen_bound_laplace(&pair).unwrap();
        let ratio = rs[0].ratio().unwrap();
        assert!((ratio - 1.2024).abs() < 0.02, "{ratio}");
        assert!(rs.iter().all(|r| r.pass().unwrap()));
        let ball = radial_shoot_eigen(Operator::Laplace, 3, 1.0, 1.0, Bc::Dirichlet, 512).unwrap();
        let rs = eigen_bound_laplace(&ball).unwrap();
        let bessel = rs.iter().find(|r| r.id == "laplace-eigen-bessel3").unwrap();
        assert!((bessel.lhs - PI.powi(3)).abs() < 1e-3 && (bessel.rhs - 3.0 * PI).abs() < 1e-3, "{bessel:?}");
    }

    #[test]
    fn ma_eigen_examples() {
        for r in [1.0, 2.0] {
            let pair = radial_shoot_eigen(Operator::MongeAmpere, 2, 2.0, r, Bc::Dirichlet, 512).unwrap();
            let rs = ma_eigen_bound(&pair).unwrap();
            assert!(rs[0].pass().unwrap() && !rs[0].vacuous, "{:?}", rs[0]);
            assert_eq!(rs[1].pass(), None);
        }
        let mut pair = radial_shoot_eigen(Operator::MongeAmpere, 2, 2.0, 1.0, Bc::Dirichlet, 64).unwrap();
        pair.phi = pair.phi.map(|_| -1.0).unwrap();
        let rs = ma_eigen_bound(&pair).unwrap();
        assert!(rs[0].vacuous && rs[0].rhs == 0.0 && rs[0].pass().unwrap());
    }

    #[test]
    fn pucci_examples() {
        let g = disk(32);
        let q = ScalarField::from_fn(&g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let e = Ellipticity::new(1.0, 2.0).unwrap();
        let r = pucci_abp_bound(&q, &constant(&g, 2.0), e).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-10 && (r.rhs - 1.0).abs() < 1e-10);
        // θ = Θ = 1 coincides with the linear report bit for bit.
        let lap = LinearCoefficients::from_name("laplace", &g).unwrap();
        let u = torsion(&g);
        let a = abp_normal_derivative_linear(&u, &lap, &constant(&g, -1.0), None).unwrap();
        let b = pucci_abp_bound(&u, &constant(&g, 1.0), Ellipticity::LAPLACE).unwrap();
        assert_eq!((a.lhs.to_bits(), a.rhs.to_bits()), (b.lhs.to_bits(), b.rhs.to_bits()));
        for (t, big) in [(1.0, 2.0), (0.5, 1.0)] {
            let e = Ellipticity::new(t, big).unwrap();
            let pair = radial_shoot_eigen(Operator::Pucci(e), 2, 1.0, 1.0, Bc::Dirichlet, 512).unwrap();
            let r = pucci_eigen_bound(&pair).unwrap();
            assert!(r.pass().unwrap(), "{r:?}");
        }
    }
}
