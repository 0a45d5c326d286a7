//! The algebraic machinery behind the lower bound, as executable identities
//! and inequalities.
//!
//! The lower bound for the Gamma_2 constant combines two inequalities in the
//! variables A = lap_s log f, B = |grad_s log f|²:
//!   Q1(A, B) >= (d-1) i(f)   (curvature-dimension, after substitution)
//!   (A + B/2)² >= 2d i(f)    (spectral gap of the symmetric class)
//! through the pointwise polynomial identity
//!   theta Q1 + (1 - theta)(A + B/2)² = (A + B)(A + B/2) - tau B²
//! with theta, tau depending on (d, beta). Everything here is a pure function
//! suitable for exhaustive randomized checking.

use std::collections::BTreeMap;

use nalgebra::Matrix3;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::lambda_lower;
use crate::error::{Gamma2Error, Result};
use crate::families::{sample_random_symmetric_stream, make_quartic, PolyMode};
use crate::functionals::{evaluate_nodes, Rule, SymmetricPositiveFunction};
use crate::quadrature::SphereQuadrature;

/// Pole guard for beta = -1/2, where theta is singular.
const BETA_POLE_TOL: f64 = 1e-12;

/// Mixing parameters of the sphere version:
/// theta = -(d-2)/((d+1)(2 beta + 1)), tau = (2(d-2) beta + 2d - 3)/(4(d+1)).
///
/// d = 2 is degenerate (the Q1 coefficients blow up) and takes a dedicated
/// branch returning the constant pair (0, 1/12).
pub fn theta_tau(d: usize, beta: f64) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Gamma2Error::InvalidArgument(format!(
            "dimension d = {d} must be at least 2"
        )));
    }
    if d == 2 {
        return Ok((0.0, 1.0 / 12.0));
    }
    let df = d as f64;
    let u = 2.0 * beta + 1.0;
    if u.abs() < BETA_POLE_TOL {
        return Err(Gamma2Error::InvalidArgument(format!(
            "beta = {beta} is at the pole -1/2"
        )));
    }
    let theta = -(df - 2.0) / ((df + 1.0) * u);
    let tau = (2.0 * (df - 2.0) * beta + 2.0 * df - 3.0) / (4.0 * (df + 1.0));
    Ok((theta, tau))
}

/// Coefficients (c_ab, c_bb) of Q1 = A² - c_ab AB + c_bb B² for d >= 3.
pub fn q1_coefficients(d: usize, beta: f64) -> Result<(f64, f64)> {
    if d < 3 {
        return Err(Gamma2Error::InvalidArgument(format!(
            "Q1 coefficients need d >= 3 (got {d}); the d = 2 case is degenerate"
        )));
    }
    let df = d as f64;
    let c_ab = (df + 1.0) / (df - 2.0) * beta - (df - 5.0) / (2.0 * (df - 2.0));
    let c_bb = beta * beta + (df - 3.0) / (df - 2.0) * beta + (df - 3.0) / (2.0 * (df - 2.0));
    Ok((c_ab, c_bb))
}

fn combination_residual_with(
    d: usize,
    beta: f64,
    a: f64,
    b: f64,
    theta: f64,
    tau: f64,
) -> Result<f64> {
    let (c_ab, c_bb) = q1_coefficients(d, beta)?;
    let q1 = a * a - c_ab * a * b + c_bb * b * b;
    let half = a + 0.5 * b;
    let lhs = theta * q1 + (1.0 - theta) * half * half;
    let rhs = (a + b) * half - tau * b * b;
    Ok((lhs - rhs).abs())
}

/// |theta Q1 + (1-theta)(A + B/2)² - [(A + B)(A + B/2) - tau B²]|.
///
/// The identity is polynomial in A and B, so checking free real variables is
/// strictly stronger than checking realizable (A, B) pairs; the residual must
/// stay below 1e-12 (1 + A² + B²).
pub fn combination_residual(d: usize, beta: f64, a: f64, b: f64) -> Result<f64> {
    let (theta, tau) = theta_tau(d, beta)?;
    if d == 2 {
        return Err(Gamma2Error::InvalidArgument(
            "the combination identity is checked for d >= 3; d = 2 has its own branch".into(),
        ));
    }
    combination_residual_with(d, beta, a, b, theta, tau)
}

/// Admissible beta interval [-(2d-3)/(2d-4), -(2d-1)/(2(d+1))] for d >= 3.
///
/// This is exactly the set where 0 <= theta <= 1 and tau >= 0, which is what
/// the convex combination of the two inequalities requires. (The right
/// endpoint sits strictly left of the pole -1/2: theta <= 1 already fails on
/// (-(2d-1)/(2(d+1)), -1/2).)
pub fn beta_admissible_range(d: usize) -> Result<(f64, f64)> {
    if d < 3 {
        return Err(Gamma2Error::InvalidArgument(format!(
            "admissible beta range needs d >= 3 (got {d})"
        )));
    }
    let df = d as f64;
    Ok((
        -(2.0 * df - 3.0) / (2.0 * df - 4.0),
        -(2.0 * df - 1.0) / (2.0 * (df + 1.0)),
    ))
}

/// True iff beta lies in the admissible interval for d.
pub fn beta_admissible(d: usize, beta: f64) -> Result<bool> {
    let (lo, hi) = beta_admissible_range(d)?;
    Ok(lo <= beta && beta <= hi)
}

/// The lower bound 2d + (d-2)/(2 beta + 1) produced by an admissible beta;
/// maximized at the left endpoint beta = -(2d-3)/(2d-4) with value
/// d + 3 - 1/(d-1). For d = 2 the computation degenerates to the constant 4.
pub fn lower_bound_from_beta(d: usize, beta: f64) -> Result<f64> {
    if d < 2 {
        return Err(Gamma2Error::InvalidArgument(format!(
            "dimension d = {d} must be at least 2"
        )));
    }
    if d == 2 {
        return Ok(4.0);
    }
    let df = d as f64;
    let u = 2.0 * beta + 1.0;
    if u.abs() < BETA_POLE_TOL {
        return Err(Gamma2Error::InvalidArgument(format!(
            "beta = {beta} is at the pole -1/2"
        )));
    }
    Ok(2.0 * df + (df - 2.0) / u)
}

/// Mixing parameters of the curvature-dimension version:
/// theta = -(n-1)/((n+2)(2 beta + 1)), tau = (2(n-1) beta + 2n - 1)/(4(n+2)).
///
/// The n = d - 1 substitution recovers `theta_tau(d, beta)` exactly.
pub fn cd_theta_tau(n: f64, beta: f64) -> Result<(f64, f64)> {
    check_cd_params(n, beta)?;
    let u = 2.0 * beta + 1.0;
    let theta = -(n - 1.0) / ((n + 2.0) * u);
    let tau = (2.0 * (n - 1.0) * beta + 2.0 * n - 1.0) / (4.0 * (n + 2.0));
    Ok((theta, tau))
}

/// Q1 coefficients of the curvature-dimension version.
pub fn cd_q1_coefficients(n: f64, beta: f64) -> Result<(f64, f64)> {
    check_cd_params(n, beta)?;
    let c_ab = (n + 2.0) / (n - 1.0) * beta - (n - 4.0) / (2.0 * (n - 1.0));
    let c_bb = beta * beta + (n - 2.0) / (n - 1.0) * beta + (n - 2.0) / (2.0 * (n - 1.0));
    Ok((c_ab, c_bb))
}

/// Residual of the combination identity in the curvature-dimension version.
pub fn cd_combination_residual(n: f64, beta: f64, a: f64, b: f64) -> Result<f64> {
    let (theta, tau) = cd_theta_tau(n, beta)?;
    let (c_ab, c_bb) = cd_q1_coefficients(n, beta)?;
    let q1 = a * a - c_ab * a * b + c_bb * b * b;
    let half = a + 0.5 * b;
    let lhs = theta * q1 + (1.0 - theta) * half * half;
    let rhs = (a + b) * half - tau * b * b;
    Ok((lhs - rhs).abs())
}

/// Lower bound lambda + (n-1)/((n+2)(2 beta + 1)) (lambda - rho n/(n-1))
/// under CD(rho, n); at beta = -(2n-1)/(2n-2) it equals
/// `bounds::cd_lambda_lower(lambda, rho, n)`.
pub fn cd_lower_from_beta(lambda: f64, rho: f64, n: f64, beta: f64) -> Result<f64> {
    check_cd_params(n, beta)?;
    let u = 2.0 * beta + 1.0;
    Ok(lambda + (n - 1.0) / ((n + 2.0) * u) * (lambda - rho * n / (n - 1.0)))
}

fn check_cd_params(n: f64, beta: f64) -> Result<()> {
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Gamma2Error::InvalidArgument(format!(
            "curvature-dimension parameter n = {n} must be at least 2"
        )));
    }
    if (2.0 * beta + 1.0).abs() < BETA_POLE_TOL {
        return Err(Gamma2Error::InvalidArgument(format!(
            "beta = {beta} is at the pole -1/2"
        )));
    }
    Ok(())
}

/// Admissible beta interval for the CD version.
pub fn cd_beta_range(n: f64) -> Result<(f64, f64)> {
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Gamma2Error::InvalidArgument(format!(
            "curvature-dimension parameter n = {n} must be at least 2"
        )));
    }
    Ok((
        -(2.0 * n - 1.0) / (2.0 * n - 2.0),
        -(2.0 * n + 1.0) / (2.0 * (n + 2.0)),
    ))
}

/// tr(M²) - tr(M)²/2 for the structured 3x3 matrix arising from the
/// tangent-frame second derivatives at sigma = e_1: zero first column and
/// symmetric lower-right 2x2 block. The result is nonnegative; it reduces to
/// M22² + 2 M23² + M33² - (M22 + M33)²/2.
pub fn trace_inequality_check(m: &Matrix3<f64>) -> Result<f64> {
    let scale = m.amax().max(1.0);
    for i in 0..3 {
        if m[(i, 0)].abs() > 1e-14 * scale {
            return Err(Gamma2Error::InvalidArgument(format!(
                "first column must vanish: |M[({i},0)]| = {:.3e}",
                m[(i, 0)].abs()
            )));
        }
    }
    if (m[(1, 2)] - m[(2, 1)]).abs() > 1e-14 * scale {
        return Err(Gamma2Error::InvalidArgument(format!(
            "lower-right block must be symmetric: |M23 - M32| = {:.3e}",
            (m[(1, 2)] - m[(2, 1)]).abs()
        )));
    }
    let tr = m.trace();
    let tr_sq = (m * m).trace();
    Ok(tr_sq - 0.5 * tr * tr)
}

/// Minimum over quadrature nodes of
/// ||grad²_s log f||² - (lap_s log f)²/(d-1); nonnegative for every positive
/// symmetric f (the projected Hessian has rank at most d-1).
pub fn pointwise_logf_inequality(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<f64> {
    let d = f.d() as f64;
    let nodes = evaluate_nodes(f, rule)?;
    let mut min = f64::INFINITY;
    for n in &nodes {
        let gap = n.hess_log_sq - n.a * n.a / (d - 1.0);
        if gap < min {
            min = gap;
        }
    }
    Ok(min)
}

/// Outcome of one suite check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub count: usize,
    pub max_residual: f64,
    pub pass: bool,
}

/// Verification suite summary, keyed by check name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    #[serde(flatten)]
    pub checks: BTreeMap<String, CheckResult>,
}

impl SuiteSummary {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }
}

/// Suite configuration. `tau_perturbation` is a negative-control hook: a
/// nonzero value shifts tau in the combination check and must make it fail.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tau_perturbation: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2718,
            tau_perturbation: 0.0,
        }
    }
}

/// Runs every identity and inequality check and aggregates the results.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = BTreeMap::new();

    // 1. Combination identity over randomized (d, beta, A, B).
    {
        let count = 10_000;
        let mut max_residual: f64 = 0.0;
        for _ in 0..count {
            let d = rng.random_range(3..=10usize);
            let (lo, hi) = beta_admissible_range(d)?;
            let beta = rng.random_range(lo..=hi);
            let a = rng.random_range(-10.0..=10.0);
            let b = rng.random_range(-10.0..=10.0);
            let (theta, tau) = theta_tau(d, beta)?;
            let r = combination_residual_with(d, beta, a, b, theta, tau + cfg.tau_perturbation)?;
            max_residual = max_residual.max(r);
        }
        checks.insert(
            "combination_identity".to_string(),
            CheckResult {
                count,
                max_residual,
                pass: max_residual <= 1e-11,
            },
        );
    }

    // 2. CD-version combination identity.
    {
        let count = 10_000;
        let mut max_residual: f64 = 0.0;
        for _ in 0..count {
            let n = rng.random_range(2.0..=9.0f64);
            let (lo, hi) = cd_beta_range(n)?;
            let beta = rng.random_range(lo..=hi);
            let a = rng.random_range(-10.0..=10.0);
            let b = rng.random_range(-10.0..=10.0);
            let r = cd_combination_residual(n, beta, a, b)?;
            max_residual = max_residual.max(r);
        }
        checks.insert(
            "cd_combination_identity".to_string(),
            CheckResult {
                count,
                max_residual,
                pass: max_residual <= 1e-11,
            },
        );
    }

    // 3. Named parameter values.
    {
        let (th1, ta1) = theta_tau(3, -1.0)?;
        let (th2, ta2) = theta_tau(3, -1.5)?;
        let mut r = (th1 - 0.25).abs().max((ta1 - 0.0625).abs());
        r = r.max((th2 - 0.125).abs()).max(ta2.abs());
        r = r.max((lower_bound_from_beta(3, -1.0)? - 5.0).abs());
        r = r.max((lower_bound_from_beta(3, -1.5)? - 5.5).abs());
        checks.insert(
            "named_parameter_values".to_string(),
            CheckResult {
                count: 6,
                max_residual: r,
                pass: r <= 1e-15,
            },
        );
    }

    // 4. Admissibility interval is exactly {0 <= theta <= 1, tau >= 0}.
    {
        let mut count = 0;
        let mut mismatches = 0usize;
        for d in 3..=10usize {
            for i in 0..4000 {
                let beta = -3.0 + 3.5 * i as f64 / 3999.0;
                if (2.0 * beta + 1.0).abs() < 1e-6 {
                    continue;
                }
                let (theta, tau) = theta_tau(d, beta)?;
                let direct = (0.0..=1.0).contains(&theta) && tau >= 0.0;
                let interval = beta_admissible(d, beta)?;
                if direct != interval {
                    mismatches += 1;
                }
                count += 1;
            }
        }
        checks.insert(
            "beta_admissible_equivalence".to_string(),
            CheckResult {
                count,
                max_residual: mismatches as f64,
                pass: mismatches == 0,
            },
        );
    }

    // 5. The bound is maximized at the left endpoint with value d+3-1/(d-1).
    {
        let mut max_residual: f64 = 0.0;
        let mut count = 0;
        for d in 3..=8usize {
            let (lo, hi) = beta_admissible_range(d)?;
            let mut best = f64::NEG_INFINITY;
            for i in 0..1000 {
                let beta = lo + (hi - lo) * i as f64 / 999.0;
                best = best.max(lower_bound_from_beta(d, beta)?);
                count += 1;
            }
            max_residual = max_residual.max((best - lambda_lower(d)?).abs());
        }
        checks.insert(
            "lower_bound_maximization".to_string(),
            CheckResult {
                count,
                max_residual,
                pass: max_residual <= 1e-9,
            },
        );
    }

    // 6. Specialization: sphere parameters equal CD parameters at n = d - 1.
    {
        let mut max_residual: f64 = 0.0;
        let mut count = 0;
        for d in 3..=10usize {
            let (lo, hi) = beta_admissible_range(d)?;
            for i in 0..200 {
                let beta = lo + (hi - lo) * i as f64 / 199.0;
                let (th_s, ta_s) = theta_tau(d, beta)?;
                let (th_c, ta_c) = cd_theta_tau(d as f64 - 1.0, beta)?;
                max_residual = max_residual
                    .max((th_s - th_c).abs())
                    .max((ta_s - ta_c).abs());
                count += 1;
            }
        }
        checks.insert(
            "cd_specialization".to_string(),
            CheckResult {
                count,
                max_residual,
                pass: max_residual <= 1e-14,
            },
        );
    }

    // 7. CD bound grid maximum equals the closed form.
    {
        let mut max_residual: f64 = 0.0;
        let mut count = 0;
        for n in [2.0, 4.0, 7.0] {
            let lambda = 2.0 * (n + 1.0);
            let rho = n - 1.0;
            let (lo, hi) = cd_beta_range(n)?;
            let mut best = f64::NEG_INFINITY;
            for i in 0..1000 {
                let beta = lo + (hi - lo) * i as f64 / 999.0;
                best = best.max(cd_lower_from_beta(lambda, rho, n, beta)?);
                count += 1;
            }
            let want = crate::bounds::cd_lambda_lower(lambda, rho, n)?;
            max_residual = max_residual.max((best - want).abs());
        }
        checks.insert(
            "cd_lower_bound_maximization".to_string(),
            CheckResult {
                count,
                max_residual,
                pass: max_residual <= 1e-9,
            },
        );
    }

    // 8. Trace inequality on random structured matrices.
    {
        let count = 10_000;
        let mut worst: f64 = 0.0;
        for _ in 0..count {
            let m = random_structured_matrix(&mut rng);
            let r = trace_inequality_check(&m)?;
            worst = worst.max((-r).max(0.0));
        }
        checks.insert(
            "trace_inequality".to_string(),
            CheckResult {
                count,
                max_residual: worst,
                pass: worst <= 1e-12,
            },
        );
    }

    // 9. Pointwise log-f inequality on random symmetric functions.
    {
        let rule = Rule::Sphere(SphereQuadrature::product(32, 64)?);
        let z_rule = Rule::default_axisym(3)?;
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for k in 0..100u64 {
            let mode = if k % 2 == 0 {
                PolyMode::LogDensity
            } else {
                PolyMode::Density
            };
            let f = match sample_random_symmetric_stream(cfg.seed ^ 0x9e37, k, 0.6, mode, &rule) {
                Ok(f) => f,
                Err(_) => continue,
            };
            let min = pointwise_logf_inequality(&f, &rule)?;
            worst = worst.max((-min).max(0.0));
            count += 1;
        }
        let quartic = make_quartic(0.69214)?;
        let min = pointwise_logf_inequality(&quartic, &z_rule)?;
        worst = worst.max((-min).max(0.0));
        count += 1;
        checks.insert(
            "pointwise_logf_inequality".to_string(),
            CheckResult {
                count,
                max_residual: worst,
                pass: worst <= 1e-10,
            },
        );
    }

    // 10. Degenerate d = 2 branch: constant parameters and bound 4.
    {
        let mut max_residual: f64 = 0.0;
        let mut count = 0;
        for i in 0..100 {
            let beta = -3.0 + 3.0 * i as f64 / 99.0;
            let (theta, tau) = theta_tau(2, beta)?;
            max_residual = max_residual
                .max(theta.abs())
                .max((tau - 1.0 / 12.0).abs())
                .max((lower_bound_from_beta(2, beta)? - 4.0).abs());
            count += 1;
        }
        max_residual = max_residual.max((lambda_lower(2)? - 4.0).abs());
        checks.insert(
            "d2_branch".to_string(),
            CheckResult {
                count,
                max_residual,
                pass: max_residual <= 1e-15,
            },
        );
    }

    Ok(SuiteSummary { checks })
}

fn random_structured_matrix(rng: &mut impl Rng) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    m[(0, 1)] = rng.random_range(-5.0..5.0);
    m[(0, 2)] = rng.random_range(-5.0..5.0);
    m[(1, 1)] = rng.random_range(-5.0..5.0);
    m[(2, 2)] = rng.random_range(-5.0..5.0);
    let off = rng.random_range(-5.0..5.0);
    m[(1, 2)] = off;
    m[(2, 1)] = off;
    m
}
