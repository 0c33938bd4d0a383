//! Named, reproducible verification scenarios: config schema, built-in
//! registry and the parallel runner.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rayon::prelude::*;

use crate::bounds::{
    abp_normal_derivative_linear, eigen_bound_laplace, h2, laplacian_lower_bounds, ma_eigen_bound,
    ma_normal_derivative_bound, pucci_abp_bound, pucci_eigen_bound, BoundReport, Context, Orientation, Tolerance,
    BOUND_IDS,
};
use crate::contact::{area_formula_check, contact_set_with, default_tolerance, inclusion_check, Side, WeightFn};
use crate::eigensolve::{
    laplace_eigen_fd, ma_lions_iteration, radial_shoot_eigen, Bc, EigenPair, Operator, SolverOptions,
};
use crate::error::{Error, Result};
use crate::expr::{check_keys, param_f64, Expr, Params};
use crate::fields::{gradient_and_hessian, lift_radial, normal_derivative, sample, ScalarField};
use crate::geometry::{make_domain, DomainKind, DomainSpec, MIN_RESOLUTION};
use crate::linalg::det;
use crate::operators::{amgm_check, Ellipticity, LinearCoefficients, COEFFICIENT_NAMES};
use crate::semilinear::{
    c3_check, gradient_bound_chain, p_identity_residual, solve_radial_semilinear, Nonlinearity, SemilinearProblem,
};

const BUILTIN: &str = include_str!("scenarios.toml");

/// A scenario file: shared seed and solver options, scenarios, and suites
/// grouping scenarios under one name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<Scenario>,
    #[serde(default, rename = "suite")]
    pub suites: Vec<Suite>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub domain: DomainConfig,
    #[serde(default = "default_resolution")]
    pub resolution: Vec<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Restricts the output to these report ids; each must be produced.
    #[serde(default)]
    pub bounds: Option<Vec<String>>,
    pub check: Check,
}

fn default_resolution() -> Vec<usize> {
    vec![128]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: String,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
}

impl DomainConfig {
    pub fn spec(&self) -> Result<DomainSpec> {
        let p = &self.params;
        let kind = match self.kind.as_str() {
            "disk2d" => {
                check_keys("disk2d", p, &["radius"])?;
                DomainKind::Disk2d { radius: param_f64(p, "radius", 1.0)? }
            }
            "rectangle2d" => {
                check_keys("rectangle2d", p, &["width", "height"])?;
                DomainKind::Rectangle2d { width: param_f64(p, "width", 1.0)?, height: param_f64(p, "height", 1.0)? }
            }
            "radial_ball" => {
                check_keys("radial_ball", p, &["dimension", "radius"])?;
                let d = param_f64(p, "dimension", 3.0)?;
                if d.fract() != 0.0 || d < 0.0 {
                    return Err(Error::Config(format!("dimension must be a whole number, got {d}")));
                }
                DomainKind::RadialBall { dimension: d as usize, radius: param_f64(p, "radius", 1.0)? }
            }
            other => return Err(Error::UnknownName(format!("domain `{other}`"))),
        };
        let mut spec = DomainSpec { kind, center: Vec::new() };
        spec.center = self.center.clone().unwrap_or_else(|| vec![0.0; spec.dimension()]);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRef {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}

impl FieldRef {
    fn expr(&self, domain: &DomainSpec) -> Result<Expr> {
        Expr::from_name(&self.name, &self.params, domain)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Fd,
    Shooting,
    Lions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Laplace,
    Ma,
    Pucci,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcKind {
    Dirichlet,
    Robin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Unit,
    Regularized,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub value: f64,
    pub rel_tol: f64,
}

/// What a scenario evaluates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Check {
    AbpLinear {
        field: FieldRef,
        f: FieldRef,
        #[serde(default = "laplace_name")]
        coefficients: String,
        #[serde(default)]
        constant: Option<f64>,
    },
    LaplacianLower {
        field: FieldRef,
        alpha: f64,
        p: f64,
    },
    MaNormal {
        field: FieldRef,
        f: FieldRef,
    },
    PucciAbp {
        field: FieldRef,
        f: FieldRef,
        theta: f64,
        #[serde(rename = "Theta")]
        big_theta: f64,
    },
    Inclusion {
        field: FieldRef,
        side: Side,
        expect: Expect,
    },
    AreaFormula {
        #[serde(default)]
        fields: Vec<FieldRef>,
        #[serde(default)]
        random: usize,
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default = "default_modes")]
        modes: usize,
        weights: Vec<WeightKind>,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    Amgm {
        #[serde(default)]
        fields: Vec<FieldRef>,
        #[serde(default)]
        random: usize,
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default = "default_modes")]
        modes: usize,
    },
    Eigen {
        operator: OperatorKind,
        #[serde(default)]
        theta: Option<f64>,
        #[serde(default, rename = "Theta")]
        big_theta: Option<f64>,
        #[serde(default)]
        p: Option<f64>,
        #[serde(default = "dirichlet")]
        bc: BcKind,
        #[serde(default)]
        alpha: Option<f64>,
        solver: SolverKind,
        #[serde(default)]
        compare: Option<SolverKind>,
        #[serde(default)]
        reference: Option<Reference>,
        #[serde(default)]
        radial_resolution: Option<usize>,
    },
    MaScaling {
        radii: Vec<f64>,
        #[serde(default)]
        radial_resolution: Option<usize>,
    },
    PucciCoincidence {
        #[serde(default)]
        radial_resolution: Option<usize>,
    },
    Semilinear {
        nonlinearity: FieldRef,
        #[serde(default)]
        radial_resolution: Option<usize>,
    },
}

fn laplace_name() -> String {
    "laplace".into()
}
fn default_eps() -> f64 {
    0.05
}
fn default_modes() -> usize {
    4
}
fn default_delta() -> f64 {
    0.1
}
fn dirichlet() -> BcKind {
    BcKind::Dirichlet
}

const DEFAULT_RADIAL: usize = 512;
const PUCCI_RADIAL: usize = 2048;

/// A form that was not evaluated, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub id: String,
    pub reason: String,
}

/// Reports of one scenario at one resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub resolution: usize,
    pub reports: Vec<BoundReport>,
    #[serde(default)]
    pub skipped: Vec<Skipped>,
    pub wall_time_s: f64,
    pub version: String,
    pub config_hash: String,
}

impl RunSummary {
    /// Every scoped report passes.
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass() != Some(false))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub resolutions: Option<Vec<usize>>,
    pub seed: Option<u64>,
    /// Worker threads; `None` reads `ABPLAB_THREADS`, falling back to rayon's default.
    pub threads: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("built-in registry parses")
    }

    /// Resolves every registry name without solving anything.
    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for s in &self.scenarios {
            if !names.insert(s.name.as_str()) {
                return Err(Error::Config(format!("duplicate scenario `{}`", s.name)));
            }
            s.validate().map_err(|e| wrap(&s.name, e))?;
        }
        for suite in &self.suites {
            if names.contains(suite.name.as_str()) {
                return Err(Error::Config(format!("suite `{}` shadows a scenario", suite.name)));
            }
            for m in &suite.members {
                if !names.contains(m.as_str()) {
                    return Err(Error::UnknownName(format!("scenario `{m}` in suite `{}`", suite.name)));
                }
            }
        }
        Ok(())
    }

    /// Scenarios selected by a scenario or suite name.
    pub fn select(&self, name: &str) -> Result<Vec<Scenario>> {
        if let Some(s) = self.scenarios.iter().find(|s| s.name == name) {
            return Ok(vec![s.clone()]);
        }
        if let Some(suite) = self.suites.iter().find(|s| s.name == name) {
            return Ok(suite
                .members
                .iter()
                .filter_map(|m| self.scenarios.iter().find(|s| &s.name == m).cloned())
                .collect());
        }
        Err(Error::UnknownName(format!("scenario `{name}`")))
    }

    /// `(name, description)` for every suite then every scenario.
    pub fn listing(&self) -> Vec<(String, String)> {
        let suites = self.suites.iter().map(|s| (s.name.clone(), format!("suite: {}", s.description)));
        let scen = self.scenarios.iter().map(|s| (s.name.clone(), s.description.clone()));
        suites.chain(scen).collect()
    }

    /// Runs the given scenarios (all when `None`).
    pub fn run(&self, selection: Option<&[Scenario]>, opts: &RunOptions) -> Result<Vec<RunSummary>> {
        let scenarios = selection.unwrap_or(&self.scenarios);
        let seed = opts.seed;
        let mut jobs = Vec::new();
        for s in scenarios {
            let res = opts.resolutions.clone().unwrap_or_else(|| s.resolution.clone());
            for r in res {
                let mut s = s.clone();
                if let Some(seed) = seed {
                    s.seed = Some(seed);
                }
                s.seed.get_or_insert(self.seed);
                s.resolution = vec![r];
                s.validate().map_err(|e| wrap(&s.name, e))?;
                jobs.push(s);
            }
        }
        let threads = opts.threads.or_else(|| std::env::var("ABPLAB_THREADS").ok().and_then(|v| v.parse().ok()));
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        let solver = self.solver;
        let mut out: Vec<RunSummary> = pool.install(|| {
            jobs.par_iter().map(|s| s.run_one(&solver).map_err(|e| wrap(&s.name, e))).collect::<Result<_>>()
        })?;
        out.sort_by(|a, b| (&a.scenario, a.resolution).cmp(&(&b.scenario, b.resolution)));
        Ok(out)
    }
}

fn wrap(scenario: &str, e: Error) -> Error {
    match e {
        e @ Error::Scenario { .. } => e,
        other => Error::Scenario { scenario: scenario.to_string(), source: Box::new(other) },
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let domain = self.domain.spec()?;
        if self.resolution.is_empty() {
            return Err(Error::Config("empty resolution list".into()));
        }
        if let Some(&r) = self.resolution.iter().find(|&&r| r < MIN_RESOLUTION) {
            return Err(Error::Config(format!("resolution {r} below minimum {MIN_RESOLUTION}")));
        }
        if let Some(ids) = &self.bounds {
            if let Some(id) = ids.iter().find(|id| !BOUND_IDS.contains(&id.as_str())) {
                return Err(Error::UnknownName(format!("bound `{id}`")));
            }
        }
        let need_ball = || {
            if domain.is_ball() {
                Ok(())
            } else {
                Err(Error::Config(format!("`{}` needs a disk or ball domain", self.name)))
            }
        };
        match &self.check {
            Check::AbpLinear { field, f, coefficients, .. } => {
                field.expr(&domain)?;
                f.expr(&domain)?;
                if !COEFFICIENT_NAMES.contains(&coefficients.as_str()) {
                    return Err(Error::UnknownName(format!("coefficients `{coefficients}`")));
                }
            }
            Check::LaplacianLower { field, .. } | Check::Inclusion { field, .. } => {
                field.expr(&domain)?;
            }
            Check::MaNormal { field, f } | Check::PucciAbp { field, f, .. } => {
                field.expr(&domain)?;
                f.expr(&domain)?;
            }
            Check::AreaFormula { fields, random, .. } | Check::Amgm { fields, random, .. } => {
                for fr in fields {
                    fr.expr(&domain)?;
                }
                if *random > 0 && domain.dimension() != 2 {
                    return Err(Error::Config("random convex fields are two-dimensional".into()));
                }
            }
            Check::Eigen { operator, solver, compare, bc, alpha, .. } => {
                if matches!(bc, BcKind::Robin) && alpha.is_none() {
                    return Err(Error::Config("robin boundary condition needs `alpha`".into()));
                }
                for s in std::iter::once(solver).chain(compare) {
                    match (s, operator) {
                        (SolverKind::Fd, OperatorKind::Laplace) => {}
                        (SolverKind::Fd, _) => return Err(Error::Unsupported("fd solver is Laplace-only".into())),
                        (SolverKind::Lions, OperatorKind::Ma) => need_ball()?,
                        (SolverKind::Lions, _) => {
                            return Err(Error::Unsupported("lions iteration is Monge-Ampere-only".into()))
                        }
                        (SolverKind::Shooting, _) => need_ball()?,
                    }
                }
            }
            Check::MaScaling { radii, .. } => {
                need_ball()?;
                if radii.len() < 2 || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                    return Err(Error::Config("`radii` needs at least two positive radii".into()));
                }
            }
            Check::PucciCoincidence { .. } => need_ball()?,
            Check::Semilinear { nonlinearity, .. } => {
                need_ball()?;
                Nonlinearity::from_name(&nonlinearity.name, &nonlinearity.params)?;
            }
        }
        Ok(())
    }

    fn hash(&self, solver: &SolverOptions) -> String {
        let bytes = serde_json::to_vec(&(self, solver)).expect("scenario serializes");
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn run_one(&self, solver: &SolverOptions) -> Result<RunSummary> {
        let start = Instant::now();
        let res = self.resolution[0];
        let domain = self.domain.spec()?;
        let mut skipped = Vec::new();
        let mut reports = evaluate(&self.check, &domain, res, self.seed.unwrap_or(0), solver, &mut skipped)?;
        if let Some(ids) = &self.bounds {
            for id in ids {
                if !reports.iter().any(|r| &r.id == id) {
                    return Err(Error::Config(format!("bound `{id}` was not produced")));
                }
            }
            reports.retain(|r| ids.contains(&r.id));
        }
        Ok(RunSummary {
            scenario: self.name.clone(),
            resolution: res,
            reports,
            skipped,
            wall_time_s: start.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: self.hash(solver),
        })
    }
}

fn field_on(domain: &DomainSpec, res: usize, fr: &FieldRef) -> Result<ScalarField> {
    let (grid, _) = make_domain(domain, res)?;
    sample(&grid, &fr.expr(domain)?)
}

/// Sampled fixed fields followed by seeded random convex perturbations of `|x|²/2`.
fn field_family(
    domain: &DomainSpec,
    res: usize,
    fields: &[FieldRef],
    random: usize,
    eps: f64,
    modes: usize,
    seed: u64,
) -> Result<Vec<(ScalarField, bool)>> {
    let (grid, _) = make_domain(domain, res)?;
    let mut out = Vec::new();
    for fr in fields {
        let e = fr.expr(domain)?;
        let isotropic = matches!(e, Expr::Quadratic { .. } | Expr::CQuad { .. } | Expr::Torsion { .. });
        out.push((sample(&grid, &e)?, isotropic));
    }
    for k in 0..random as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
        let e = Expr::random_convex(&mut rng, eps, modes);
        out.push((sample(&grid, &e)?.with_source(format!("random-convex(seed={})", seed.wrapping_add(k))), false));
    }
    Ok(out)
}

fn ball_params(domain: &DomainSpec) -> (usize, f64) {
    (domain.dimension(), domain.radius().expect("validated ball domain"))
}

/// One eigenproblem: operator, boundary condition, rhs exponent (Pucci) and
/// grid resolutions.
#[derive(Clone, Copy, Debug)]
pub struct EigenRequest {
    pub op: Operator,
    pub bc: Bc,
    pub p: f64,
    pub resolution: usize,
    pub radial_resolution: Option<usize>,
}

pub fn solve_eigen(domain: &DomainSpec, req: &EigenRequest, solver: SolverKind, opts: &SolverOptions) -> Result<EigenPair> {
    let fallback = if matches!(req.op, Operator::Pucci(_)) { PUCCI_RADIAL } else { DEFAULT_RADIAL };
    let rr = radial_res(req.radial_resolution, domain, req.resolution, fallback);
    let ball = || {
        domain
            .radius()
            .filter(|_| domain.is_ball())
            .map(|r| (domain.dimension(), r))
            .ok_or_else(|| Error::Unsupported(format!("{solver:?} needs a disk or ball domain")))
    };
    match (solver, req.op) {
        (SolverKind::Fd, Operator::Laplace) => laplace_eigen_fd(domain, req.resolution, req.bc, opts),
        (SolverKind::Fd, op) => Err(Error::Unsupported(format!("fd solver is Laplace-only, got {op}"))),
        (SolverKind::Shooting, op) => {
            let (n, r) = ball()?;
            radial_shoot_eigen(op, n, req.p, r, req.bc, rr)
        }
        (SolverKind::Lions, Operator::MongeAmpere) if req.bc == Bc::Dirichlet => {
            let (n, r) = ball()?;
            ma_lions_iteration(n, r, rr, opts)
        }
        (SolverKind::Lions, _) => Err(Error::Unsupported("lions iteration is Dirichlet Monge-Ampere only".into())),
    }
}

/// Eigenvalue lower-bound reports for a pair of any operator.
pub fn eigen_bounds(pair: &EigenPair) -> Result<Vec<BoundReport>> {
    Ok(match pair.operator {
        Operator::Laplace => eigen_bound_laplace(pair)?,
        Operator::MongeAmpere => ma_eigen_bound(pair)?.to_vec(),
        Operator::Pucci(_) => vec![pucci_eigen_bound(pair)?],
    })
}

/// Radial solves on a radial-ball domain follow the scenario resolution; on a
/// disk they use their own, finer, default.
fn radial_res(explicit: Option<usize>, domain: &DomainSpec, res: usize, fallback: usize) -> usize {
    explicit.unwrap_or(match domain.kind {
        DomainKind::RadialBall { .. } => res,
        _ => fallback,
    })
}

fn coincidence(what: &str, pucci: f64, laplace: f64, ctx: Context) -> BoundReport {
    BoundReport::new("pucci-laplace-coincidence", pucci, laplace, Orientation::Equal, Tolerance::Relative(0.01), ctx)
        .with_note(what)
}

fn evaluate(
    check: &Check,
    domain: &DomainSpec,
    res: usize,
    seed: u64,
    solver: &SolverOptions,
    skipped: &mut Vec<Skipped>,
) -> Result<Vec<BoundReport>> {
    Ok(match check {
        Check::AbpLinear { field, f, coefficients, constant } => {
            let u = field_on(domain, res, field)?;
            let f = field_on(domain, res, f)?;
            let l = LinearCoefficients::from_name(coefficients, u.grid())?;
            vec![abp_normal_derivative_linear(&u, &l, &f, *constant)?]
        }
        Check::LaplacianLower { field, alpha, p } => {
            let u = field_on(domain, res, field)?;
            let lb = laplacian_lower_bounds(&u, *alpha, *p)?;
            skipped.extend(lb.skipped.into_iter().map(|(id, reason)| Skipped { id, reason }));
            lb.reports
        }
        Check::MaNormal { field, f } => {
            let u = field_on(domain, res, field)?;
            let f = field_on(domain, res, f)?;
            vec![ma_normal_derivative_bound(&u, &f)?]
        }
        Check::PucciAbp { field, f, theta, big_theta } => {
            let u = field_on(domain, res, field)?;
            let f = field_on(domain, res, f)?;
            vec![pucci_abp_bound(&u, &f, Ellipticity::new(*theta, *big_theta)?)?]
        }
        Check::Inclusion { field, side, expect } => {
            let u = field_on(domain, res, field)?;
            let inc = inclusion_check(&u, *side)?;
            let ctx = Context::of(u.grid(), format!("{}:{side}", field.name));
            let note = format!("covered {}/{} boxes, m = {:.6}, delta = {:.3e}", inc.covered, inc.total, inc.m, inc.delta);
            let r = match expect {
                Expect::Pass => BoundReport::new(
                    "ball-inclusion",
                    inc.fraction,
                    1.0,
                    Orientation::Equal,
                    Tolerance::Absolute(0.0),
                    ctx,
                ),
                Expect::Fail => {
                    BoundReport::new("inclusion-wrong-branch", inc.fraction, 1.0, Orientation::LhsLtRhs, Tolerance::Absolute(0.0), ctx)
                }
            };
            vec![r.with_note(note)]
        }
        Check::AreaFormula { fields, random, eps, modes, weights, delta } => {
            let mut out = Vec::new();
            for (u, _) in field_family(domain, res, fields, *random, *eps, *modes, seed)? {
                let (g, h) = gradient_and_hessian(&u)?;
                let mask = contact_set_with(&u, &g, Side::Lower, default_tolerance(&u, &h));
                let m = normal_derivative(&u, u.grid().boundary())?.inf_abs();
                for w in weights {
                    let (wf, tag) = match w {
                        WeightKind::Unit => (WeightFn::Unit, "g=1".to_string()),
                        WeightKind::Regularized => (WeightFn::Regularized { delta: *delta }, format!("g=reg(delta={delta})")),
                    };
                    let a = area_formula_check(&g, &h, &mask, &wf, m)?;
                    let ctx = Context::of(u.grid(), format!("{}:{tag}", u.source().unwrap_or("field")));
                    out.push(
                        BoundReport::new(
                            "contact-area",
                            a.lhs,
                            a.rhs,
                            Orientation::LhsLeqRhs,
                            Tolerance::Absolute(5.0 * h2(u.grid())),
                            ctx,
                        )
                        .with_note(format!("m = {m:.6}")),
                    );
                }
            }
            out
        }
        Check::Amgm { fields, random, eps, modes } => {
            let mut out = Vec::new();
            for (u, isotropic) in field_family(domain, res, fields, *random, *eps, *modes, seed)? {
                let (g, h) = gradient_and_hessian(&u)?;
                let mask = contact_set_with(&u, &g, Side::Lower, default_tolerance(&u, &h));
                let a = amgm_check(&h, &mask);
                let ctx = Context::of(u.grid(), u.source().unwrap_or("field"));
                out.push(
                    BoundReport::new(
                        "amgm-pointwise",
                        a.max_violation,
                        a.tolerance,
                        Orientation::LhsLeqRhs,
                        Tolerance::Absolute(0.0),
                        ctx.clone(),
                    )
                    .with_note(format!("{} contact nodes", mask.count())),
                );
                if isotropic {
                    let n = h.dim();
                    let gap = mask
                        .iter()
                        .map(|i| (det(h.at(i), n) - (h.trace(i) / n as f64).powi(n as i32)).abs())
                        .fold(0.0, f64::max);
                    out.push(BoundReport::new("amgm-equality", gap, 0.0, Orientation::Equal, Tolerance::Absolute(1e-10), ctx));
                }
            }
            out
        }
        Check::Eigen { operator, theta, big_theta, p, bc, alpha, solver: primary, compare, reference, radial_resolution } => {
            let op = match operator {
                OperatorKind::Laplace => Operator::Laplace,
                OperatorKind::Ma => Operator::MongeAmpere,
                OperatorKind::Pucci => Operator::Pucci(Ellipticity::new(theta.unwrap_or(1.0), big_theta.unwrap_or(1.0))?),
            };
            let bc = match bc {
                BcKind::Dirichlet => Bc::Dirichlet,
                BcKind::Robin => Bc::robin(alpha.expect("validated"))?,
            };
            let req = EigenRequest { op, bc, p: p.unwrap_or(1.0), resolution: res, radial_resolution: *radial_resolution };
            let pair = solve_eigen(domain, &req, *primary, solver)?;
            let mut out = eigen_bounds(&pair)?;
            let ctx = Context::of(pair.phi.grid(), format!("{op} {bc}"));
            if let Some(rf) = reference {
                out.push(BoundReport::new(
                    "eigenvalue-reference",
                    pair.lambda,
                    rf.value,
                    Orientation::Equal,
                    Tolerance::Relative(rf.rel_tol),
                    ctx.clone(),
                ));
            }
            if let Some(c) = compare {
                let other = solve_eigen(domain, &req, *c, solver)?;
                out.push(
                    BoundReport::new("solver-agreement", pair.lambda, other.lambda, Orientation::Equal, Tolerance::Relative(0.01), ctx)
                        .with_note(format!("{:?} vs {:?}", pair.solver, other.solver)),
                );
            }
            out
        }
        Check::MaScaling { radii, radial_resolution } => {
            let n = domain.dimension();
            let rr = radial_res(*radial_resolution, domain, res, DEFAULT_RADIAL);
            let pairs = radii
                .iter()
                .map(|&r| radial_shoot_eigen(Operator::MongeAmpere, n, n as f64, r, Bc::Dirichlet, rr))
                .collect::<Result<Vec<_>>>()?;
            let mut out = Vec::new();
            let (r0, base) = (radii[0], &pairs[0]);
            for (&r, pair) in radii.iter().zip(&pairs) {
                out.extend(ma_eigen_bound(pair)?);
                if r != r0 {
                    let scaled = pair.lambda * (r / r0).powi(2 * n as i32);
                    out.push(
                        BoundReport::new(
                            "ma-scaling",
                            scaled,
                            base.lambda,
                            Orientation::Equal,
                            Tolerance::Relative(0.01),
                            Context::of(pair.phi.grid(), "monge_ampere-eigenfunction"),
                        )
                        .with_note(format!("lambda(R={r})*(R/{r0})^(2n) vs lambda(R={r0})")),
                    );
                }
            }
            out
        }
        Check::PucciCoincidence { radial_resolution } => {
            let (n, r) = ball_params(domain);
            let rr = radial_resolution.unwrap_or(PUCCI_RADIAL);
            let lap = radial_shoot_eigen(Operator::Laplace, n, 1.0, r, Bc::Dirichlet, rr)?;
            let pl = radial_shoot_eigen(Operator::Pucci(Ellipticity::LAPLACE), n, 1.0, r, Bc::Dirichlet, rr)?;
            let mut out = Vec::new();
            let lap_bounds = eigen_bound_laplace(&lap)?;
            let lap_contact = lap_bounds
                .iter()
                .find(|b| b.id.ends_with("-contact"))
                .cloned()
                .ok_or_else(|| Error::Hypothesis("Laplace eigenfunction has no contact-form report".into()))?;
            let pb = pucci_eigen_bound(&pl)?;
            let ctx = Context::of(pl.phi.grid(), "pucci(1,1) vs laplace");
            out.push(coincidence("eigenvalue", pl.lambda, lap.lambda, ctx.clone()));
            out.push(coincidence(
                "eigenvalue bound ratio",
                pb.ratio().unwrap_or(f64::NAN),
                lap_contact.ratio().unwrap_or(f64::NAN),
                ctx,
            ));
            out.push(pb);
            out.push(lap_contact);
            let (grid, _) = make_domain(domain, res)?;
            let t = sample(&grid, &Expr::Torsion { radius: r })?;
            let one = |c: f64| ScalarField::new(grid.clone(), vec![c; grid.len()]);
            let lin = abp_normal_derivative_linear(&t, &LinearCoefficients::from_name("laplace", &grid)?, &one(-1.0)?, None)?;
            let pu = pucci_abp_bound(&t, &one(1.0)?, Ellipticity::LAPLACE)?;
            let ctx = Context::of(&grid, "torsion");
            out.push(coincidence("abp lhs", pu.lhs, lin.lhs, ctx.clone()));
            out.push(coincidence("abp rhs", pu.rhs, lin.rhs, ctx));
            out.push(pu);
            out.push(lin);
            out
        }
        Check::Semilinear { nonlinearity, radial_resolution } => {
            let (n, r) = ball_params(domain);
            let f = Nonlinearity::from_name(&nonlinearity.name, &nonlinearity.params)?;
            let prob = SemilinearProblem::new(f, r, n)?;
            let sol = solve_radial_semilinear(&prob, radial_resolution.unwrap_or(res))?;
            let prob = sol.problem;
            let u = match domain.kind {
                DomainKind::Disk2d { .. } => {
                    let (polar, _) = make_domain(domain, res)?;
                    lift_radial(&sol.u, &polar)?
                }
                _ => sol.u.clone(),
            };
            let mut out = gradient_bound_chain(&u, &prob)?;
            let ctx = Context::of(u.grid(), format!("semilinear {}", prob.f));
            let bochner = p_identity_residual(&u, &|v| prob.derivative(v))?;
            out.push(
                BoundReport::new("bochner-residual", bochner, h2(u.grid()), Orientation::ReportOnly, Tolerance::Absolute(0.0), ctx.clone())
                    .with_note("lhs = max |dP - 2|D2u|^2 - 2f'P|, rhs = h^2"),
            );
            out.push(BoundReport::new(
                "semilinear-residual",
                sol.residual,
                1e-4,
                Orientation::ReportOnly,
                Tolerance::Absolute(0.0),
                Context::of(sol.u.grid(), format!("semilinear {}", prob.f)),
            ));
            let c3 = c3_check(&sol.u, &prob)?;
            let orient = if matches!(prob.f, Nonlinearity::Linear { .. }) { Orientation::Equal } else { Orientation::ReportOnly };
            out.push(BoundReport::new(
                "c3-equality",
                c3.max_abs_gap,
                0.0,
                orient,
                Tolerance::Absolute(c3.tolerance),
                c3.report.context.clone(),
            ));
            out.push(c3.report);
            out
        }
    })
}
