//! Spherical gradients, Hessians, and Laplace-Beltrami values on S^{d-1}.
//!
//! Functions come in two representations:
//!  - an ambient extension F: R^d -> R with exact gradient and Hessian, from
//!    which tangential quantities are obtained by projection with
//!    P = I - sigma sigma^T;
//!  - an axisymmetric profile phi(z) of the last coordinate z = sigma_d, for
//!    which the same quantities have closed forms (the fast path).
//!
//! Both routes are implemented and cross-validated against each other; the
//! projected Hessian of the restriction is P (grad² F) P - (sigma . grad F) P,
//! which annihilates sigma (rank at most d-1).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Gamma2Error, Result};
use crate::poly::legendre_series;

/// Unit-norm tolerance for sphere membership.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A point sigma on S^{d-1}, |sigma| = 1 to 1e-12, d >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    sigma: DVector<f64>,
}

impl SpherePoint {
    pub fn new(sigma: DVector<f64>) -> Result<Self> {
        if sigma.len() < 2 {
            return Err(Gamma2Error::InvalidArgument(format!(
                "ambient dimension d = {} must be at least 2",
                sigma.len()
            )));
        }
        let deviation = (sigma.norm() - 1.0).abs();
        if deviation > UNIT_NORM_TOL {
            return Err(Gamma2Error::NotOnSphere { deviation });
        }
        Ok(Self { sigma })
    }

    /// Normalizes a nonzero vector onto the sphere.
    pub fn project(mut v: DVector<f64>) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Gamma2Error::InvalidArgument(
                "cannot project the zero vector onto the sphere".into(),
            ));
        }
        v /= norm;
        Self::new(v)
    }

    /// Standard basis point e_i.
    pub fn axis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Gamma2Error::DimensionMismatch { expected: d, got: i });
        }
        let mut sigma = DVector::zeros(d);
        sigma[i] = 1.0;
        Self::new(sigma)
    }

    pub(crate) fn new_unchecked(sigma: DVector<f64>) -> Self {
        Self { sigma }
    }

    pub fn sigma(&self) -> &DVector<f64> {
        &self.sigma
    }

    pub fn d(&self) -> usize {
        self.sigma.len()
    }

    /// Last coordinate z = sigma_d.
    pub fn z(&self) -> f64 {
        self.sigma[self.sigma.len() - 1]
    }

    pub fn antipode(&self) -> Self {
        Self {
            sigma: -self.sigma.clone(),
        }
    }
}

/// An ambient function on R^d with exact analytic derivatives.
///
/// Derivatives are supplied analytically by whatever constructs the function;
/// finite differences are used only in tests.
pub trait AmbientFunction {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// Tangential projection v - (sigma . v) sigma; the result is orthogonal to sigma.
pub fn project_tangent(p: &SpherePoint, v: &DVector<f64>) -> Result<DVector<f64>> {
    if v.len() != p.d() {
        return Err(Gamma2Error::DimensionMismatch {
            expected: p.d(),
            got: v.len(),
        });
    }
    let radial = p.sigma().dot(v);
    Ok(v - p.sigma() * radial)
}

fn check_dim(f: &dyn AmbientFunction, p: &SpherePoint) -> Result<()> {
    if f.dim() != p.d() {
        return Err(Gamma2Error::DimensionMismatch {
            expected: f.dim(),
            got: p.d(),
        });
    }
    Ok(())
}

/// Spherical gradient P grad F(sigma), tangent to the sphere.
pub fn spherical_gradient(f: &dyn AmbientFunction, p: &SpherePoint) -> Result<DVector<f64>> {
    check_dim(f, p)?;
    project_tangent(p, &f.gradient(p.sigma()))
}

/// Spherical Hessian P (grad² F) P - (sigma . grad F) P of the restriction of
/// F to the sphere. sigma is in its kernel, so the rank is at most d - 1.
pub fn spherical_hessian(f: &dyn AmbientFunction, p: &SpherePoint) -> Result<DMatrix<f64>> {
    check_dim(f, p)?;
    let sigma = p.sigma();
    let d = p.d();
    let grad = f.gradient(sigma);
    let hess = f.hessian(sigma);
    let radial = sigma.dot(&grad);
    let projector = DMatrix::identity(d, d) - sigma * sigma.transpose();
    Ok(&projector * hess * &projector - radial * projector)
}

/// Laplace-Beltrami value: trace of the spherical Hessian, computed directly
/// as lap F - sigma^T (grad² F) sigma - (d-1)(sigma . grad F).
pub fn laplace_beltrami(f: &dyn AmbientFunction, p: &SpherePoint) -> Result<f64> {
    check_dim(f, p)?;
    let sigma = p.sigma();
    let grad = f.gradient(sigma);
    let hess = f.hessian(sigma);
    let u = &hess * sigma;
    Ok(hess.trace() - sigma.dot(&u) - (p.d() as f64 - 1.0) * sigma.dot(&grad))
}

/// Pointwise tangential data of an ambient function: |grad_s F|²,
/// lap_s F and ||grad²_s F||²_F, computed without forming the projected matrix.
///
/// With u = H sigma, s = sigma^T H sigma, r = sigma . g and m = tr H:
///   |grad_s F|²    = |g|² - r²
///   lap_s F        = m - s - (d-1) r
///   ||grad²_s F||² = ||H||² - 2|u|² + s² - 2 r (m - s) + r² (d-1)
#[derive(Debug, Clone, Copy)]
pub struct TangentialDerivs {
    pub grad_sq: f64,
    pub laplacian: f64,
    pub hess_norm_sq: f64,
}

pub fn tangential_derivs(
    sigma: &DVector<f64>,
    grad: &DVector<f64>,
    hess: &DMatrix<f64>,
) -> TangentialDerivs {
    let d = sigma.len() as f64;
    let r = sigma.dot(grad);
    let grad_sq = grad.norm_squared() - r * r;
    let u = hess * sigma;
    let s = sigma.dot(&u);
    let m = hess.trace();
    let laplacian = m - s - (d - 1.0) * r;
    let hess_norm_sq = hess.iter().map(|h| h * h).sum::<f64>() - 2.0 * u.norm_squared() + s * s
        - 2.0 * r * (m - s)
        + r * r * (d - 1.0);
    TangentialDerivs {
        grad_sq,
        laplacian,
        hess_norm_sq,
    }
}

/// An axisymmetric function of z = sigma_d with exact first and second
/// derivatives.
///
/// Symmetric (antipodal) functions have even profiles; the type itself does
/// not force evenness so that single eigenmodes such as phi = z remain
/// expressible.
#[derive(Clone)]
pub struct AxisymmetricProfile {
    d: usize,
    kind: ProfileKind,
}

#[derive(Clone)]
enum ProfileKind {
    /// phi = sum_j coeffs[j] z^{2j}
    EvenPoly(Vec<f64>),
    /// phi = exp(sum_j coeffs[j] z^{2j})
    ExpEvenPoly(Vec<f64>),
    /// phi = sum_k coeffs[k] P_k(z)
    LegendreSeries(Vec<f64>),
    /// Arbitrary (phi, phi', phi'') triple.
    Custom(Arc<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>),
}

impl std::fmt::Debug for AxisymmetricProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.kind {
            ProfileKind::EvenPoly(c) => format!("EvenPoly({c:?})"),
            ProfileKind::ExpEvenPoly(c) => format!("ExpEvenPoly({c:?})"),
            ProfileKind::LegendreSeries(c) => format!("LegendreSeries({c:?})"),
            ProfileKind::Custom(_) => "Custom".to_string(),
        };
        write!(f, "AxisymmetricProfile {{ d: {}, kind: {} }}", self.d, kind)
    }
}

impl AxisymmetricProfile {
    /// phi(z) = sum_j coeffs[j] z^{2j}.
    pub fn even_poly(d: usize, coeffs: Vec<f64>) -> Self {
        Self {
            d,
            kind: ProfileKind::EvenPoly(coeffs),
        }
    }

    /// phi(z) = exp(sum_j coeffs[j] z^{2j}); positive by construction.
    pub fn exp_even_poly(d: usize, coeffs: Vec<f64>) -> Self {
        Self {
            d,
            kind: ProfileKind::ExpEvenPoly(coeffs),
        }
    }

    /// phi(z) = sum_k coeffs[k] P_k(z).
    pub fn legendre_series(d: usize, coeffs: Vec<f64>) -> Self {
        Self {
            d,
            kind: ProfileKind::LegendreSeries(coeffs),
        }
    }

    /// Profile from an explicit (phi, phi', phi'') evaluator.
    pub fn custom(
        d: usize,
        eval: impl Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
    ) -> Self {
        Self {
            d,
            kind: ProfileKind::Custom(Arc::new(eval)),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// (phi, phi', phi'') at z.
    pub fn eval(&self, z: f64) -> (f64, f64, f64) {
        match &self.kind {
            ProfileKind::EvenPoly(coeffs) => even_poly_eval(coeffs, z),
            ProfileKind::ExpEvenPoly(coeffs) => {
                let (g, dg, ddg) = even_poly_eval(coeffs, z);
                let e = g.exp();
                (e, e * dg, e * (ddg + dg * dg))
            }
            ProfileKind::LegendreSeries(coeffs) => legendre_series(coeffs, z),
            ProfileKind::Custom(f) => f(z),
        }
    }

    /// Profile of the scaled function c * phi.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.clone();
        Self::custom(self.d, move |z| {
            let (v, dv, ddv) = inner.eval(z);
            (c * v, c * dv, c * ddv)
        })
    }

    pub fn phi(&self, z: f64) -> f64 {
        self.eval(z).0
    }

    pub fn dphi(&self, z: f64) -> f64 {
        self.eval(z).1
    }

    pub fn ddphi(&self, z: f64) -> f64 {
        self.eval(z).2
    }
}

/// Horner evaluation of sum_j c_j y^j and its z-derivatives at y = z².
fn even_poly_eval(coeffs: &[f64], z: f64) -> (f64, f64, f64) {
    let y = z * z;
    let mut v = 0.0; // sum c_j y^j
    let mut dy = 0.0; // sum j c_j y^{j-1}
    let mut dyy = 0.0; // sum j(j-1) c_j y^{j-2}
    for &c in coeffs.iter().rev() {
        dyy = dyy * y + 2.0 * dy;
        dy = dy * y + v;
        v = v * y + c;
    }
    // d/dz = 2z d/dy; d²/dz² = 2 d/dy + 4z² d²/dy².
    (v, 2.0 * z * dy, 2.0 * dy + 4.0 * y * dyy)
}

fn check_z(z: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&z) {
        return Err(Gamma2Error::ZOutOfRange { z });
    }
    Ok(())
}

/// |grad_s phi|² = (1-z²) phi'(z)².
pub fn axi_gradient_sq(prof: &AxisymmetricProfile, z: f64) -> Result<f64> {
    check_z(z)?;
    let (_, dphi, _) = prof.eval(z);
    Ok((1.0 - z * z) * dphi * dphi)
}

/// lap_s phi = (1-z²) phi'' - (d-1) z phi'.
pub fn axi_laplacian(prof: &AxisymmetricProfile, z: f64) -> Result<f64> {
    check_z(z)?;
    let (_, dphi, ddphi) = prof.eval(z);
    Ok(axi_reduce(prof.d, z, dphi, ddphi).1)
}

/// ||grad²_s phi||² = ((1-z²) phi'' - z phi')² + (d-2)(z phi')².
///
/// The two terms are the meridian eigenvalue and the (d-2)-fold latitude
/// eigenvalue of the spherical Hessian; the expressions extend continuously
/// to the poles.
pub fn axi_hessian_norm_sq(prof: &AxisymmetricProfile, z: f64) -> Result<f64> {
    check_z(z)?;
    let (_, dphi, ddphi) = prof.eval(z);
    Ok(axi_reduce(prof.d, z, dphi, ddphi).2)
}

/// (|grad_s|², lap_s, ||grad²_s||²) from a (phi', phi'') pair at z.
pub(crate) fn axi_reduce(d: usize, z: f64, dphi: f64, ddphi: f64) -> (f64, f64, f64) {
    let df = d as f64;
    let one_minus = 1.0 - z * z;
    let grad_sq = one_minus * dphi * dphi;
    let meridian = one_minus * ddphi - z * dphi;
    let latitude = -z * dphi;
    let laplacian = meridian + (df - 2.0) * latitude;
    let hess_norm_sq = meridian * meridian + (df - 2.0) * latitude * latitude;
    (grad_sq, laplacian, hess_norm_sq)
}
