//! Pointwise operators: Pucci extremal operators, Monge-Ampère determinant,
//! linear operators with coefficient fields, and the AM-GM comparison.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::contact::ContactMask;
use crate::error::{Error, Result};
use crate::fields::{gradient_and_hessian, MatrixField, ScalarField, VectorField};
use crate::geometry::Grid;
use crate::linalg::{asymmetry, det, sym_eigenvalues};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipticity {
    pub theta: f64,
    #[serde(rename = "Theta")]
    pub big_theta: f64,
}

impl Ellipticity {
    pub fn new(theta: f64, big_theta: f64) -> Result<Self> {
        if !(theta > 0.0 && big_theta >= theta && big_theta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ellipticity needs 0 < theta <= Theta, got ({theta}, {big_theta})"
            )));
        }
        Ok(Ellipticity { theta, big_theta })
    }

    pub const LAPLACE: Ellipticity = Ellipticity { theta: 1.0, big_theta: 1.0 };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PucciSign {
    Minus,
    Plus,
}

/// Sign-weighted eigenvalue sum; eigenvalues below `1e-12·‖M‖` count as zero.
fn pucci_from_eigenvalues(e: &[f64], ell: Ellipticity, sign: PucciSign) -> f64 {
    let scale = e.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let zero = 1e-12 * scale;
    let (wpos, wneg) = match sign {
        PucciSign::Minus => (ell.theta, ell.big_theta),
        PucciSign::Plus => (ell.big_theta, ell.theta),
    };
    let mut pos = 0.0;
    let mut neg = 0.0;
    for &v in e {
        if v > zero {
            pos += v;
        } else if v < -zero {
            neg += v;
        }
    }
    wpos * pos + wneg * neg
}

fn pucci(m: &[f64], n: usize, ell: Ellipticity, sign: PucciSign) -> Result<f64> {
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let asym = asymmetry(m, n);
    if asym > 1e-10 * scale.max(1.0) {
        return Err(Error::Asymmetric(asym));
    }
    Ok(pucci_from_eigenvalues(&sym_eigenvalues(m, n), ell, sign))
}

/// M⁻(M) = θ Σ_{eᵢ>0} eᵢ + Θ Σ_{eᵢ<0} eᵢ.
pub fn pucci_minus(m: &[f64], n: usize, ell: Ellipticity) -> Result<f64> {
    pucci(m, n, ell, PucciSign::Minus)
}

/// M⁺(M) = Θ Σ_{eᵢ>0} eᵢ + θ Σ_{eᵢ<0} eᵢ.
pub fn pucci_plus(m: &[f64], n: usize, ell: Ellipticity) -> Result<f64> {
    pucci(m, n, ell, PucciSign::Plus)
}

/// Pucci operator of a radial Hessian with eigenvalues `u''` (once) and
/// `u'/r` (n − 1 times).
pub fn pucci_radial(urr: f64, ur_over_r: f64, n: usize, ell: Ellipticity, sign: PucciSign) -> f64 {
    let mut e = vec![ur_over_r; n];
    e[0] = urr;
    pucci_from_eigenvalues(&e, ell, sign)
}

pub fn pucci_field(h: &MatrixField, ell: Ellipticity, sign: PucciSign) -> Result<ScalarField> {
    let n = h.dim();
    let values = (0..h.grid().len())
        .map(|i| pucci(h.at(i), n, ell, sign))
        .collect::<Result<Vec<_>>>()?;
    ScalarField::new(h.grid().clone(), values)
}

pub fn monge_ampere_det(h: &MatrixField) -> Result<ScalarField> {
    let n = h.dim();
    ScalarField::new(h.grid().clone(), (0..h.grid().len()).map(|i| det(h.at(i), n)).collect())
}

/// Coefficients of `Lu = Σ aᵢⱼ∂ᵢⱼu + Σ bᵢ∂ᵢu + cu`.
#[derive(Clone, Debug)]
pub struct LinearCoefficients {
    pub a: MatrixField,
    pub b: VectorField,
    pub c: ScalarField,
    name: String,
}

/// Coefficient sets accepted by [`LinearCoefficients::from_name`].
pub const COEFFICIENT_NAMES: &[&str] = &["laplace", "diag21", "drift-x", "varying"];

impl LinearCoefficients {
    pub fn new(name: impl Into<String>, a: MatrixField, b: VectorField, c: ScalarField) -> Result<Self> {
        if let Some(i) = (0..c.len()).find(|&i| c.values()[i] > 0.0) {
            return Err(Error::Hypothesis(format!("c must be nonpositive, c = {} at node {i}", c.values()[i])));
        }
        for i in 0..a.grid().len() {
            let e = sym_eigenvalues(a.at(i), a.dim());
            if e[0] <= 0.0 {
                return Err(Error::Hypothesis(format!("a is not positive definite at node {i}")));
            }
        }
        Ok(LinearCoefficients { a, b, c, name: name.into() })
    }

    /// `laplace`: a = I. `diag21`: a = diag(2, 1, …, 1). `drift-x`: a = I,
    /// b = e₁. `varying`: a(x) = I + 0.3·R(x₁+x₂) with R(t) the reflection
    /// [[cos t, sin t], [sin t, −cos t]] (2D), eigenvalues 0.7 and 1.3.
    pub fn from_name(name: &str, grid: &Arc<Grid>) -> Result<Self> {
        let n = grid.dim();
        let len = grid.len();
        let mut a = vec![0.0; len * n * n];
        let mut b = vec![0.0; len * n];
        let c = vec![0.0; len];
        for i in 0..len {
            for k in 0..n {
                a[i * n * n + k * n + k] = 1.0;
            }
        }
        match name {
            "laplace" => {}
            "diag21" => {
                for i in 0..len {
                    a[i * n * n] = 2.0;
                }
            }
            "drift-x" => {
                for i in 0..len {
                    b[i * n] = 1.0;
                }
            }
            "varying" => {
                if n != 2 {
                    return Err(Error::Unsupported("`varying` coefficients are two-dimensional".into()));
                }
                for i in 0..len {
                    let x = grid.local(i);
                    let (s, co) = (x[0] + x[1]).sin_cos();
                    a[i * 4] += 0.3 * co;
                    a[i * 4 + 1] = 0.3 * s;
                    a[i * 4 + 2] = 0.3 * s;
                    a[i * 4 + 3] -= 0.3 * co;
                }
            }
            other => return Err(Error::UnknownName(format!("coefficients `{other}`"))),
        }
        LinearCoefficients::new(
            name,
            MatrixField::new(grid.clone(), a)?,
            VectorField::new(grid.clone(), b)?,
            ScalarField::new(grid.clone(), c)?,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_drift(&self) -> bool {
        (0..self.b.grid().len()).any(|i| self.b.at(i).iter().any(|&v| v != 0.0))
    }

    /// D* = det(a)^{1/n} per node.
    pub fn d_star(&self) -> Result<ScalarField> {
        let n = self.a.dim();
        ScalarField::new(
            self.a.grid().clone(),
            (0..self.a.grid().len())
                .map(|i| det(self.a.at(i), n).powf(1.0 / n as f64))
                .collect(),
        )
    }

    /// Smallest and largest eigenvalue of a over all nodes.
    pub fn ellipticity(&self) -> Result<Ellipticity> {
        let n = self.a.dim();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..self.a.grid().len() {
            let e = sym_eigenvalues(self.a.at(i), n);
            lo = lo.min(e[0]);
            hi = hi.max(e[n - 1]);
        }
        Ellipticity::new(lo, hi)
    }
}

pub fn linear_apply(l: &LinearCoefficients, u: &ScalarField) -> Result<ScalarField> {
    let (g, h) = gradient_and_hessian(u)?;
    let values = (0..u.len())
        .map(|i| {
            let (a, m) = (l.a.at(i), h.at(i));
            let second: f64 = a.iter().zip(m).map(|(x, y)| x * y).sum();
            let first: f64 = l.b.at(i).iter().zip(g.at(i)).map(|(x, y)| x * y).sum();
            second + first + l.c.values()[i] * u.values()[i]
        })
        .collect();
    ScalarField::new(u.grid().clone(), values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmgmReport {
    /// Largest `det(H) − (tr(H)/n)ⁿ` over marked nodes.
    pub max_violation: f64,
    pub node: Option<usize>,
    pub tolerance: f64,
}

impl AmgmReport {
    pub fn pass(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

/// Pointwise `det H ≤ (tr H / n)ⁿ` over a lower contact set, with tolerance
/// `5h²·max(1, max (tr H/n)ⁿ)`.
pub fn amgm_check(h: &MatrixField, mask: &ContactMask) -> AmgmReport {
    let n = h.dim();
    let spacing = h.grid().spacing();
    let mut worst = f64::NEG_INFINITY;
    let mut node = None;
    let mut scale: f64 = 1.0;
    for i in mask.iter() {
        let bound = (h.trace(i) / n as f64).powi(n as i32);
        scale = scale.max(bound.abs());
        let v = det(h.at(i), n) - bound;
        if v > worst {
            worst = v;
            node = Some(i);
        }
    }
    AmgmReport {
        max_violation: if node.is_some() { worst } else { 0.0 },
        node,
        tolerance: 5.0 * spacing * spacing * scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{contact_set, Side};
    use crate::expr::Expr;
    use crate::fields::sample;
    use crate::geometry::{make_domain, DomainSpec};

    const E12: Ellipticity = Ellipticity { theta: 1.0, big_theta: 2.0 };

    #[test]
    fn pucci_examples() {
        assert_eq!(pucci_minus(&[1.0, 0.0, 0.0, 1.0], 2, E12).unwrap(), 2.0);
        assert_eq!(pucci_plus(&[1.0, 0.0, 0.0, 1.0], 2, E12).unwrap(), 4.0);
        assert_eq!(pucci_minus(&[1.0, 0.0, 0.0, -2.0], 2, E12).unwrap(), -3.0);
        assert_eq!(pucci_plus(&[1.0, 0.0, 0.0, -2.0], 2, E12).unwrap(), 0.0);
        assert_eq!(pucci_minus(&[0.0; 4], 2, E12).unwrap(), 0.0);
        assert!(matches!(pucci_minus(&[1.0, 0.5, 0.0, 1.0], 2, E12), Err(Error::Asymmetric(_))));
        assert!(Ellipticity::new(2.0, 1.0).is_err());
    }

    fn disk_field(e: Expr) -> ScalarField {
        let (g, _) = make_domain(&DomainSpec::disk(1.0), 32).unwrap();
        sample(&g, &e).unwrap()
    }

    #[test]
    fn field_examples() {
        let u = disk_field(Expr::Quadratic { scale: 1.0 });
        let (_, h) = gradient_and_hessian(&u).unwrap();
        let lap = pucci_field(&h, Ellipticity::LAPLACE, PucciSign::Minus).unwrap();
        assert!(lap.values().iter().all(|v| (v - 2.0).abs() < 1e-9));
        let m = pucci_field(&h, E12, PucciSign::Minus).unwrap();
        assert!(m.values().iter().all(|v| (v - 2.0).abs() < 1e-9));
        let d = monge_ampere_det(&h).unwrap();
        assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-9));

        let u = disk_field(Expr::CQuad { c0: 0.7, x0: vec![0.0, 0.0] });
        let (_, h) = gradient_and_hessian(&u).unwrap();
        let d = monge_ampere_det(&h).unwrap();
        assert!(d.values().iter().all(|v| (v - 4.0 * 0.49).abs() < 1e-9));
    }

    #[test]
    fn radial_fast_path_matches_matrix_path() {
        let (g, _) = make_domain(&DomainSpec::ball(3, 1.0), 64).unwrap();
        // u = cos(2r): u'' < 0 near the center while u'/r < 0, mixed later.
        let u = ScalarField::from_fn(&g, |x| (2.0 * x[0]).cos()).unwrap();
        let (_, h) = gradient_and_hessian(&u).unwrap();
        for i in 0..g.len() {
            let m = h.at(i);
            let fast = pucci_radial(m[0], m[4], 3, E12, PucciSign::Minus);
            let slow = pucci_minus(m, 3, E12).unwrap();
            assert!((fast - slow).abs() < 1e-8);
        }
    }

    #[test]
    fn linear_examples() {
        let (g, _) = make_domain(&DomainSpec::disk(1.0), 32).unwrap();
        let t = sample(&g, &Expr::Torsion { radius: 1.0 }).unwrap();
        let lap = LinearCoefficients::from_name("laplace", &g).unwrap();
        assert!(linear_apply(&lap, &t).unwrap().values().iter().all(|v| (v - 1.0).abs() < 1e-9));
        let drift = LinearCoefficients::from_name("drift-x", &g).unwrap();
        assert!(drift.has_drift());
        let x1 = sample(&g, &Expr::Affine { a: vec![1.0, 0.0], b: 0.0 }).unwrap();
        assert!(linear_apply(&drift, &x1).unwrap().values().iter().all(|v| (v - 1.0).abs() < 1e-9));
        let d21 = LinearCoefficients::from_name("diag21", &g).unwrap();
        let q = sample(&g, &Expr::Quadratic { scale: 1.0 }).unwrap();
        assert!(linear_apply(&d21, &q).unwrap().values().iter().all(|v| (v - 3.0).abs() < 1e-9));
        let var = LinearCoefficients::from_name("varying", &g).unwrap();
        let ell = var.ellipticity().unwrap();
        let ds = var.d_star().unwrap();
        assert!(ds.values().iter().all(|&d| d >= ell.theta - 1e-12 && d <= ell.big_theta + 1e-12));
    }

    #[test]
    fn amgm_examples() {
        let u = disk_field(Expr::Quadratic { scale: 1.0 });
        let (_, h) = gradient_and_hessian(&u).unwrap();
        let mask = contact_set(&u, Side::Lower).unwrap();
        let r = amgm_check(&h, &mask);
        assert!(r.max_violation.abs() <= 1e-10 && r.pass());

        let u = disk_field(Expr::Aniso { coeffs: vec![1.0, 2.0] });
        let (_, h) = gradient_and_hessian(&u).unwrap();
        let mask = contact_set(&u, Side::Lower).unwrap();
        let r = amgm_check(&h, &mask);
        assert!((r.max_violation + 1.0).abs() < 1e-8);
    }
}
