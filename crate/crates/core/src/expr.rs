//! Closed-form test functions with exact derivatives.
//!
//! Expressions are evaluated in coordinates relative to the domain center.
//!
//! | name                  | closed form                              |
//! |-----------------------|------------------------------------------|
//! | `quadratic`           | `s·|x|²/2` (default `s = 1`)             |
//! | `neg-quadratic`       | `−s·|x|²/2`                              |
//! | `cquad`               | `c0·|x − x0|²`                           |
//! | `torsion`/`torsion2d` | `(|x|² − R²)/(2n)`                       |
//! | `bessel3d`            | `sin(k|x|)/|x|`, `k = π/R`               |
//! | `quartic`             | `|x|⁴ − |x|²`                            |
//! | `perturbed-quadratic` | `|x|²/2 + eps·sin(freq·x₁)`              |
//! | `aniso`               | `Σ aᵢxᵢ²` (default `x₁² + 2x₂²`)          |
//! | `sinx1`               | `sin(x₁)`                                |
//! | `x1x2`                | `x₁x₂`                                   |
//! | `affine`              | `a·x + b`                                |
//! | `constant`            | `c`                                      |
//! | `trig-mix`            | `|x|²/2 + Σ aₖ cos(wₖ·x + φₖ)`           |

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;

/// One cosine mode `amp·cos(freq·x + phase)` in two dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigMode {
    pub amp: f64,
    pub freq: [f64; 2],
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Expr {
    Quadratic { scale: f64 },
    CQuad { c0: f64, x0: Vec<f64> },
    Torsion { radius: f64 },
    Bessel { k: f64 },
    Quartic,
    PerturbedQuadratic { eps: f64, freq: f64 },
    Aniso { coeffs: Vec<f64> },
    SinX1,
    X1X2,
    Affine { a: Vec<f64>, b: f64 },
    Constant { c: f64 },
    TrigMix { modes: Vec<TrigMode> },
}

pub type Params = BTreeMap<String, toml::Value>;

pub(crate) fn param_f64(params: &Params, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None => Ok(default),
        Some(toml::Value::Float(v)) => Ok(*v),
        Some(toml::Value::Integer(v)) => Ok(*v as f64),
        Some(other) => Err(Error::Config(format!("parameter `{key}` must be a number, got {other}"))),
    }
}

fn param_vec(params: &Params, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
    match params.get(key) {
        None => Ok(default),
        Some(toml::Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                toml::Value::Float(x) => Ok(*x),
                toml::Value::Integer(x) => Ok(*x as f64),
                other => Err(Error::Config(format!("parameter `{key}` must hold numbers, got {other}"))),
            })
            .collect(),
        Some(other) => Err(Error::Config(format!("parameter `{key}` must be an array, got {other}"))),
    }
}

/// Names accepted by [`Expr::from_name`].
/// Rejects parameter keys outside `allowed`.
pub(crate) fn check_keys(what: &str, params: &Params, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Config(format!("unknown parameter `{k}` for `{what}` (expected one of {allowed:?})"))),
        None => Ok(()),
    }
}

pub const NAMES: &[&str] = &[
    "quadratic",
    "neg-quadratic",
    "cquad",
    "torsion",
    "torsion2d",
    "bessel3d",
    "quartic",
    "perturbed-quadratic",
    "aniso",
    "sinx1",
    "x1x2",
    "affine",
    "constant",
];

impl Expr {
    /// Resolves a registry name; domain-dependent defaults (radius) come from `domain`.
    pub fn from_name(name: &str, params: &Params, domain: &DomainSpec) -> Result<Expr> {
        let n = domain.dimension();
        let radius = domain.radius().unwrap_or(1.0);
        let allowed: &[&str] = match name {
            "quadratic" | "neg-quadratic" => &["scale"],
            "cquad" => &["c0", "x0"],
            "torsion" | "torsion2d" => &["radius"],
            "bessel3d" => &["k"],
            "perturbed-quadratic" => &["eps", "freq"],
            "aniso" => &["coeffs"],
            "affine" => &["a", "b"],
            "constant" => &["c"],
            _ => &[],
        };
        check_keys(name, params, allowed)?;
        let expr = match name {
            "quadratic" => Expr::Quadratic { scale: param_f64(params, "scale", 1.0)? },
            "neg-quadratic" => Expr::Quadratic { scale: -param_f64(params, "scale", 1.0)? },
            "cquad" => Expr::CQuad {
                c0: param_f64(params, "c0", 1.0)?,
                x0: param_vec(params, "x0", vec![0.0; n])?,
            },
            "torsion" | "torsion2d" => Expr::Torsion { radius: param_f64(params, "radius", radius)? },
            "bessel3d" => Expr::Bessel { k: param_f64(params, "k", PI / radius)? },
            "quartic" => Expr::Quartic,
            "perturbed-quadratic" => Expr::PerturbedQuadratic {
                eps: param_f64(params, "eps", 0.05)?,
                freq: param_f64(params, "freq", 5.0)?,
            },
            "aniso" => Expr::Aniso { coeffs: param_vec(params, "coeffs", vec![1.0, 2.0])? },
            "sinx1" => Expr::SinX1,
            "x1x2" => Expr::X1X2,
            "affine" => Expr::Affine {
                a: param_vec(params, "a", vec![1.0; n])?,
                b: param_f64(params, "b", 0.0)?,
            },
            "constant" => Expr::Constant { c: param_f64(params, "c", 1.0)? },
            other => return Err(Error::UnknownName(format!("expression `{other}`"))),
        };
        if let Expr::CQuad { x0, .. } | Expr::Affine { a: x0, .. } = &expr {
            if x0.len() != n {
                return Err(Error::Config(format!("`{name}` needs {n} coordinates, got {}", x0.len())));
            }
        }
        Ok(expr)
    }

    /// Short identifier used in report contexts.
    pub fn tag(&self) -> String {
        match self {
            Expr::Quadratic { scale } if *scale == 1.0 => "quadratic".into(),
            Expr::Quadratic { scale } => format!("quadratic(s={scale})"),
            Expr::CQuad { c0, .. } => format!("cquad(c0={c0})"),
            Expr::Torsion { .. } => "torsion".into(),
            Expr::Bessel { .. } => "bessel3d".into(),
            Expr::Quartic => "quartic".into(),
            Expr::PerturbedQuadratic { .. } => "perturbed-quadratic".into(),
            Expr::Aniso { .. } => "aniso".into(),
            Expr::SinX1 => "sinx1".into(),
            Expr::X1X2 => "x1x2".into(),
            Expr::Affine { .. } => "affine".into(),
            Expr::Constant { .. } => "constant".into(),
            Expr::TrigMix { .. } => "trig-mix".into(),
        }
    }

    /// Random convex perturbation of `|x|²/2` in two dimensions whose
    /// perturbation Hessian has spectral norm at most `eps`.
    pub fn random_convex<R: Rng>(rng: &mut R, eps: f64, modes: usize) -> Expr {
        let raw: Vec<(f64, [f64; 2], f64)> = (0..modes)
            .map(|_| {
                let amp = rng.random_range(-1.0..1.0);
                let freq = [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
                let phase = rng.random_range(0.0..2.0 * PI);
                (amp, freq, phase)
            })
            .collect();
        let curvature: f64 = raw
            .iter()
            .map(|(a, w, _)| a.abs() * (w[0] * w[0] + w[1] * w[1]))
            .sum();
        let scale = if curvature > 0.0 { eps / curvature } else { 0.0 };
        Expr::TrigMix {
            modes: raw
                .into_iter()
                .map(|(amp, freq, phase)| TrigMode { amp: amp * scale, freq, phase })
                .collect(),
        }
    }

    /// Value, gradient and Hessian (row-major `n×n`) at local coordinates `x`.
    pub fn jet(&self, x: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let n = x.len();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        let value = match self {
            Expr::Quadratic { scale } => {
                for i in 0..n {
                    grad[i] = scale * x[i];
                    hess[i * n + i] = *scale;
                }
                0.5 * scale * r2
            }
            Expr::CQuad { c0, x0 } => {
                let mut d2 = 0.0;
                for i in 0..n {
                    let d = x[i] - x0[i];
                    d2 += d * d;
                    grad[i] = 2.0 * c0 * d;
                    hess[i * n + i] = 2.0 * c0;
                }
                c0 * d2
            }
            Expr::Torsion { radius } => {
                let k = 1.0 / n as f64;
                for i in 0..n {
                    grad[i] = k * x[i];
                    hess[i * n + i] = k;
                }
                0.5 * k * (r2 - radius * radius)
            }
            Expr::Bessel { k } => {
                let r = r2.sqrt();
                let (f, df, ddf) = if r * k < 1e-4 {
                    let z = k * r;
                    (
                        k * (1.0 - z * z / 6.0 + z.powi(4) / 120.0),
                        k * k * (-z / 3.0 + z.powi(3) / 30.0),
                        k * k * k * (-1.0 / 3.0 + z * z / 10.0),
                    )
                } else {
                    let (s, c) = (k * r).sin_cos();
                    let f = s / r;
                    let df = (k * r * c - s) / r2;
                    let ddf = -k * k * f - 2.0 * df / r;
                    (f, df, ddf)
                };
                radial_jet(x, r, df, ddf, &mut grad, &mut hess);
                f
            }
            Expr::Quartic => {
                // f(r) = r⁴ − r², written on r² to stay smooth at the origin.
                for i in 0..n {
                    grad[i] = (4.0 * r2 - 2.0) * x[i];
                    for j in 0..n {
                        hess[i * n + j] = 8.0 * x[i] * x[j];
                    }
                    hess[i * n + i] += 4.0 * r2 - 2.0;
                }
                r2 * r2 - r2
            }
            Expr::PerturbedQuadratic { eps, freq } => {
                for i in 0..n {
                    grad[i] = x[i];
                    hess[i * n + i] = 1.0;
                }
                let (s, c) = (freq * x[0]).sin_cos();
                grad[0] += eps * freq * c;
                hess[0] -= eps * freq * freq * s;
                0.5 * r2 + eps * s
            }
            Expr::Aniso { coeffs } => {
                let mut v = 0.0;
                for i in 0..n {
                    let a = coeffs.get(i).copied().unwrap_or(0.0);
                    v += a * x[i] * x[i];
                    grad[i] = 2.0 * a * x[i];
                    hess[i * n + i] = 2.0 * a;
                }
                v
            }
            Expr::SinX1 => {
                let (s, c) = x[0].sin_cos();
                grad[0] = c;
                hess[0] = -s;
                s
            }
            Expr::X1X2 => {
                grad[0] = x[1];
                grad[1] = x[0];
                hess[1] = 1.0;
                hess[n] = 1.0;
                x[0] * x[1]
            }
            Expr::Affine { a, b } => {
                grad.copy_from_slice(a);
                b + a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>()
            }
            Expr::Constant { c } => *c,
            Expr::TrigMix { modes } => {
                for i in 0..n {
                    grad[i] = x[i];
                    hess[i * n + i] = 1.0;
                }
                let mut v = 0.5 * r2;
                for m in modes {
                    let arg = m.freq[0] * x[0] + m.freq[1] * x[1] + m.phase;
                    let (s, c) = arg.sin_cos();
                    v += m.amp * c;
                    for i in 0..2 {
                        grad[i] -= m.amp * s * m.freq[i];
                        for j in 0..2 {
                            hess[i * n + j] -= m.amp * c * m.freq[i] * m.freq[j];
                        }
                    }
                }
                v
            }
        };
        (value, grad, hess)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.jet(x).0
    }
}

/// Gradient and Hessian of a radial function from its profile derivatives.
fn radial_jet(x: &[f64], r: f64, df: f64, ddf: f64, grad: &mut [f64], hess: &mut [f64]) {
    let n = x.len();
    if r == 0.0 {
        for i in 0..n {
            hess[i * n + i] = ddf;
        }
        return;
    }
    let q = df / r;
    for i in 0..n {
        grad[i] = q * x[i];
        for j in 0..n {
            let xx = x[i] * x[j] / (r * r);
            hess[i * n + j] = (ddf - q) * xx;
        }
        hess[i * n + i] += q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn fd_check(e: &Expr, x: &[f64]) {
        let n = x.len();
        let h = 1e-5;
        let (_, g, hs) = e.jet(x);
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let (vp, gp, _) = e.jet(&xp);
            let (vm, gm, _) = e.jet(&xm);
            assert!(((vp - vm) / (2.0 * h) - g[i]).abs() < 1e-6, "{e:?} grad {i}");
            for j in 0..n {
                let d = (gp[j] - gm[j]) / (2.0 * h);
                assert!((d - hs[i * n + j]).abs() < 1e-5, "{e:?} hess {i}{j}: {d} vs {}", hs[i * n + j]);
            }
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let exprs = vec![
            Expr::Quadratic { scale: 1.5 },
            Expr::CQuad { c0: 0.7, x0: vec![0.1, -0.2] },
            Expr::Torsion { radius: 1.0 },
            Expr::Bessel { k: PI },
            Expr::Quartic,
            Expr::PerturbedQuadratic { eps: 0.05, freq: 5.0 },
            Expr::Aniso { coeffs: vec![1.0, 2.0] },
            Expr::SinX1,
            Expr::X1X2,
            Expr::Affine { a: vec![0.3, -1.0], b: 2.0 },
            Expr::random_convex(&mut rng, 0.05, 4),
        ];
        for e in &exprs {
            fd_check(e, &[0.3, -0.4]);
            fd_check(e, &[-0.61, 0.05]);
        }
        fd_check(&Expr::Bessel { k: PI }, &[0.2, 0.3, -0.1]);
    }

    #[test]
    fn bessel_limit_at_origin() {
        let e = Expr::Bessel { k: PI };
        assert!((e.value(&[0.0, 0.0, 0.0]) - PI).abs() < 1e-14);
        assert!(e.value(&[1.0, 0.0, 0.0]).abs() < 1e-14);
        assert!((e.value(&[5e-5, 0.0, 0.0]) - (PI * 5e-5).sin() / 5e-5).abs() < 1e-12);
    }

    #[test]
    fn random_convex_is_convex() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let e = Expr::random_convex(&mut rng, 0.05, 5);
            let Expr::TrigMix { modes } = &e else { unreachable!() };
            let curv: f64 = modes
                .iter()
                .map(|m| m.amp.abs() * (m.freq[0].powi(2) + m.freq[1].powi(2)))
                .sum();
            assert!(curv <= 0.05 + 1e-12);
        }
    }

    #[test]
    fn registry_resolves_defaults() {
        let d = DomainSpec::disk(2.0);
        let p = Params::new();
        assert_eq!(Expr::from_name("torsion2d", &p, &d).unwrap(), Expr::Torsion { radius: 2.0 });
        assert!(matches!(Expr::from_name("nope", &p, &d), Err(Error::UnknownName(_))));
        for name in NAMES {
            Expr::from_name(name, &p, &d).unwrap();
        }
    }
}
