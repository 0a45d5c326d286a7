//! Legendre and ultraspherical (Gegenbauer) polynomial evaluation.
//!
//! Legendre polynomials P_k are the workhorse for axisymmetric spectra on S²;
//! the symmetric-Jacobi recurrence with parameter a = (d-3)/2 generates the
//! orthogonal family for the z-marginal weight (1-z²)^{(d-3)/2} of S^{d-1}.

/// P_n(x) by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> f64 {
    legendre_with_derivatives(n, x).0
}

/// (P_n(x), P_n'(x), P_n''(x)) by differentiating the recurrence.
///
/// (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}, differentiated once and twice.
/// Valid on the closed interval, including x = ±1.
pub fn legendre_with_derivatives(n: usize, x: f64) -> (f64, f64, f64) {
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    let (mut p0, mut d0, mut s0) = (1.0, 0.0, 0.0);
    let (mut p1, mut d1, mut s1) = (x, 1.0, 0.0);
    for k in 1..n {
        let kf = k as f64;
        let a = (2.0 * kf + 1.0) / (kf + 1.0);
        let b = kf / (kf + 1.0);
        let p2 = a * x * p1 - b * p0;
        let d2 = a * (p1 + x * d1) - b * d0;
        let s2 = a * (2.0 * d1 + x * s1) - b * s0;
        (p0, d0, s0) = (p1, d1, s1);
        (p1, d1, s1) = (p2, d2, s2);
    }
    (p1, d1, s1)
}

/// Value and first two derivatives of the series sum_k a_k P_k(x).
///
/// `coeffs[k]` multiplies P_k; one pass of the recurrence serves all degrees.
pub fn legendre_series(coeffs: &[f64], x: f64) -> (f64, f64, f64) {
    let mut acc = (0.0, 0.0, 0.0);
    if coeffs.is_empty() {
        return acc;
    }
    let (mut p0, mut d0, mut s0) = (1.0, 0.0, 0.0);
    let (mut p1, mut d1, mut s1) = (x, 1.0, 0.0);
    acc.0 += coeffs[0] * p0;
    if coeffs.len() > 1 {
        acc.0 += coeffs[1] * p1;
        acc.1 += coeffs[1] * d1;
    }
    for k in 1..coeffs.len().saturating_sub(1) {
        let kf = k as f64;
        let a = (2.0 * kf + 1.0) / (kf + 1.0);
        let b = kf / (kf + 1.0);
        let p2 = a * x * p1 - b * p0;
        let d2 = a * (p1 + x * d1) - b * d0;
        let s2 = a * (2.0 * d1 + x * s1) - b * s0;
        (p0, d0, s0) = (p1, d1, s1);
        (p1, d1, s1) = (p2, d2, s2);
        let c = coeffs[k + 1];
        acc.0 += c * p1;
        acc.1 += c * d1;
        acc.2 += c * s1;
    }
    acc
}

/// Recurrence coefficients beta_k of the monic symmetric-Jacobi polynomials
/// for the weight (1-x²)^a, normalized so that beta_0 = 1 (unit total mass).
///
/// pi_{k+1} = x pi_k - beta_k pi_{k-1}; beta_k = k(k+2a) / ((2k+2a+1)(2k+2a-1)).
/// Requires a > -1/2 (the singular a = -1/2 case has closed-form Chebyshev rules).
pub fn symmetric_jacobi_betas(n: usize, a: f64) -> Vec<f64> {
    assert!(a > -0.5, "symmetric Jacobi recurrence needs a > -1/2");
    let mut betas = Vec::with_capacity(n + 1);
    betas.push(1.0);
    for k in 1..=n {
        let kf = k as f64;
        betas.push(kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0)));
    }
    betas
}

/// Orthonormal-polynomial evaluation (p_0, ..., p_m) at x for the recurrence
/// sqrt(beta_{k+1}) p_{k+1} = x p_k - sqrt(beta_k) p_{k-1}, p_0 = 1.
pub fn orthonormal_values(betas: &[f64], m: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if m == 0 {
        return;
    }
    let b: Vec<f64> = betas.iter().map(|v| v.sqrt()).collect();
    out.push(x / b[1]);
    for k in 1..m {
        let next = (x * out[k] - b[k] * out[k - 1]) / b[k + 1];
        out.push(next);
    }
}

/// (p_n(x), p_n'(x)) for the orthonormal family defined by `betas`.
pub fn orthonormal_with_derivative(betas: &[f64], n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let b: Vec<f64> = betas.iter().map(|v| v.sqrt()).collect();
    let (mut p0, mut d0) = (1.0, 0.0);
    let (mut p1, mut d1) = (x / b[1], 1.0 / b[1]);
    for k in 1..n {
        let p2 = (x * p1 - b[k] * p0) / b[k + 1];
        let d2 = (p1 + x * d1 - b[k] * d0) / b[k + 1];
        (p0, d0) = (p1, d1);
        (p1, d1) = (p2, d2);
    }
    (p1, d1)
}
