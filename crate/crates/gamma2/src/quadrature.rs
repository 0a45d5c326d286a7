//! Quadrature against the normalized surface measure of S^{d-1}.
//!
//! Axisymmetric integrands reduce to the z-marginal with density
//! c_d (1-z²)^{(d-3)/2} on [-1, 1]; `ZQuadrature` provides the matching Gauss
//! rule (Gauss-Legendre for d = 3, symmetric Gauss-Jacobi otherwise,
//! Gauss-Chebyshev for the singular d = 2 case). `SphereQuadrature` is the
//! d = 3 product rule (Gauss in z, uniform in azimuth) for integrands that are
//! not axisymmetric. All weights are normalized so that the rule integrates
//! the constant 1 to exactly 1.

use crate::error::{Gamma2Error, Result};
use crate::poly::{orthonormal_values, orthonormal_with_derivative, symmetric_jacobi_betas};
use crate::sphere::SpherePoint;

/// Deterministic pairwise summation: fixed recursive halving, so results are
/// bitwise reproducible for a given slice length and contents.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        n if n <= 8 => xs.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Gauss rule for the z-marginal of the normalized surface measure of S^{d-1}.
#[derive(Debug, Clone)]
pub struct ZQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    d: usize,
}

impl ZQuadrature {
    /// n-node rule on (-1, 1), exact for polynomial integrands of degree
    /// <= 2n-1 against the density c_d (1-z²)^{(d-3)/2}.
    ///
    /// d = 2 uses closed-form Gauss-Chebyshev nodes (the density is singular
    /// at the endpoints); d >= 3 uses the symmetric-Jacobi recurrence with
    /// Newton-polished nodes.
    pub fn gauss(n: usize, d: usize) -> Result<Self> {
        if n < 2 {
            return Err(Gamma2Error::InvalidArgument(format!(
                "quadrature size n = {n} must be at least 2"
            )));
        }
        if d < 2 {
            return Err(Gamma2Error::InvalidArgument(format!(
                "ambient dimension d = {d} must be at least 2"
            )));
        }
        let (mut nodes, mut weights) = if d == 2 {
            chebyshev_rule(n)
        } else {
            jacobi_rule(n, 0.5 * (d as f64 - 3.0))
        };
        symmetrize(&mut nodes, &mut weights);
        Ok(Self { nodes, weights, d })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// Same family of rule with twice the node count, for doubling checks.
    pub fn refined(&self) -> Result<Self> {
        Self::gauss(2 * self.nodes.len(), self.d)
    }

    /// Integral of g(z) against the normalized z-marginal.
    ///
    /// Errors if g is non-finite at any node, naming the node.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (i, (&z, &w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = g(z);
            if !v.is_finite() {
                return Err(Gamma2Error::NonFiniteIntegrand {
                    index: i,
                    z,
                    value: v,
                });
            }
            terms.push(w * v);
        }
        Ok(pairwise_sum(&terms))
    }
}

/// Product rule on S² (Gauss in z = sigma_3, uniform in azimuth), exact for
/// spherical polynomials of total degree <= min(2 n_z - 1, n_az - 1).
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
    d: usize,
}

impl SphereQuadrature {
    pub fn product(n_z: usize, n_az: usize) -> Result<Self> {
        if n_z < 2 {
            return Err(Gamma2Error::InvalidArgument(format!(
                "n_z = {n_z} must be at least 2"
            )));
        }
        if n_az < 4 {
            return Err(Gamma2Error::InvalidArgument(format!(
                "n_az = {n_az} must be at least 4"
            )));
        }
        let zrule = ZQuadrature::gauss(n_z, 3)?;
        let mut points = Vec::with_capacity(n_z * n_az);
        let mut weights = Vec::with_capacity(n_z * n_az);
        let w_az = 1.0 / n_az as f64;
        for (&z, &wz) in zrule.nodes().iter().zip(zrule.weights()) {
            let r = (1.0 - z * z).sqrt();
            for j in 0..n_az {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n_az as f64;
                let sigma =
                    nalgebra::DVector::from_vec(vec![r * theta.cos(), r * theta.sin(), z]);
                points.push(SpherePoint::new_unchecked(sigma));
                weights.push(wz * w_az);
            }
        }
        Ok(Self {
            points,
            weights,
            d: 3,
        })
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integral of g against the normalized surface measure.
    pub fn integrate(&self, g: impl Fn(&SpherePoint) -> f64) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.points.len());
        for (i, (p, &w)) in self.points.iter().zip(&self.weights).enumerate() {
            let v = g(p);
            if !v.is_finite() {
                return Err(Gamma2Error::NonFiniteIntegrand {
                    index: i,
                    z: p.z(),
                    value: v,
                });
            }
            terms.push(w * v);
        }
        Ok(pairwise_sum(&terms))
    }
}

/// Gauss-Chebyshev (first kind): nodes cos((2i-1)pi/2n), equal weights 1/n
/// after normalizing the measure.
fn chebyshev_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes: Vec<f64> = (1..=n)
        .map(|i| (std::f64::consts::PI * (2.0 * i as f64 - 1.0) / (2.0 * n as f64)).cos())
        .collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let weights = vec![1.0 / n as f64; n];
    (nodes, weights)
}

/// Gauss rule for the weight (1-x²)^a via the orthonormal recurrence:
/// nodes are the roots of p_n, located by the interlacing ladder (bisection
/// bracket + Newton polish to 1e-15), weights are the Christoffel numbers
/// 1/sum_{k<n} p_k(x)² of the measure-normalized family.
fn jacobi_rule(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    let betas = symmetric_jacobi_betas(n, a);

    // Interlacing ladder: roots of p_k separate the roots of p_{k+1}.
    let mut roots: Vec<f64> = vec![0.0]; // p_1 is proportional to x
    for k in 2..=n {
        let mut brackets = Vec::with_capacity(k);
        let mut lo = -1.0;
        for &r in &roots {
            brackets.push((lo, r));
            lo = r;
        }
        brackets.push((lo, 1.0));
        let mut next = Vec::with_capacity(k);
        for (lo, hi) in brackets {
            next.push(polish_root(&betas, k, lo, hi));
        }
        roots = next;
    }

    let mut scratch = Vec::new();
    let weights: Vec<f64> = roots
        .iter()
        .map(|&x| {
            orthonormal_values(&betas, n - 1, x, &mut scratch);
            1.0 / scratch.iter().map(|p| p * p).sum::<f64>()
        })
        .collect();
    (roots, weights)
}

/// Safeguarded Newton for the root of p_k in (lo, hi).
fn polish_root(betas: &[f64], k: usize, mut lo: f64, mut hi: f64) -> f64 {
    let f = |x: f64| orthonormal_with_derivative(betas, k, x);
    let (mut flo, _) = f(lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        // Maintain the bracket.
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let step = fx / dfx;
        let candidate = x - step;
        let next = if candidate > lo && candidate < hi {
            candidate
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() < 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

/// Enforce exact antipodal symmetry of a symmetric Gauss rule: averages the
/// mirror pairs so that nodes[i] = -nodes[n-1-i] and weights match bitwise,
/// and pins the middle node of odd rules to zero.
fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Moment oracle: E[z^{2m}] on S^{d-1} equals prod_{j=1..m} (2j-1)/(d+2j-2).
    fn z_moment(d: usize, m: usize) -> f64 {
        (1..=m).fold(1.0, |acc, j| {
            acc * (2.0 * j as f64 - 1.0) / (d as f64 + 2.0 * j as f64 - 2.0)
        })
    }

    #[test]
    fn weights_normalized_positive_sorted() {
        for d in [2, 3, 4, 5, 7, 12] {
            for n in [2, 5, 16, 64] {
                let rule = ZQuadrature::gauss(n, d).unwrap();
                let total: f64 = pairwise_sum(rule.weights());
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
                assert!(rule.weights().iter().all(|&w| w > 0.0));
                assert!(rule
                    .nodes()
                    .windows(2)
                    .all(|p| p[0] < p[1]));
                assert!(rule.nodes().iter().all(|&z| z > -1.0 && z < 1.0));
            }
        }
    }

    #[test]
    fn moment_exactness_up_to_rule_degree() {
        for d in [2, 3, 4, 5, 9] {
            for n in [3, 8, 24] {
                let rule = ZQuadrature::gauss(n, d).unwrap();
                for m in 0..=(rule.exactness_degree() / 2).min(20) {
                    let got = rule.integrate(|z| z.powi(2 * m as i32)).unwrap();
                    assert_abs_diff_eq!(got, z_moment(d, m), epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn odd_moments_vanish() {
        let rule = ZQuadrature::gauss(20, 5).unwrap();
        for m in [1, 3, 7] {
            assert_abs_diff_eq!(rule.integrate(|z| z.powi(m)).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn second_moment_is_one_over_d() {
        for d in [2, 3, 4, 10] {
            let rule = ZQuadrature::gauss(32, d).unwrap();
            assert_abs_diff_eq!(
                rule.integrate(|z| z * z).unwrap(),
                1.0 / d as f64,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn arctan_integral_on_s2() {
        // int 1/(z²+t) dsigma = arctan(1/sqrt(t))/sqrt(t); pi/4 at t = 1.
        let rule = ZQuadrature::gauss(64, 3).unwrap();
        let got = rule.integrate(|z| 1.0 / (z * z + 1.0)).unwrap();
        assert_abs_diff_eq!(got, std::f64::consts::FRAC_PI_4, epsilon = 1e-14);
        for &t in &[0.1, 0.69214, 7.5] {
            let got = rule.integrate(|z| 1.0 / (z * z + t)).unwrap();
            let want = (1.0 / t.sqrt()).atan() / t.sqrt();
            assert_abs_diff_eq!(got, want, epsilon = 1e-13 * want.abs());
        }
    }

    #[test]
    fn quartic_mass_and_p2_square() {
        let rule = ZQuadrature::gauss(64, 3).unwrap();
        for &t in &[0.3, 1.0, 4.0] {
            let got = rule.integrate(|z| (z * z + t).powi(2)).unwrap();
            assert_abs_diff_eq!(got, t * t + 2.0 * t / 3.0 + 0.2, epsilon = 1e-13);
        }
        let got = rule.integrate(|z| (z * z - 1.0 / 3.0).powi(2)).unwrap();
        assert_abs_diff_eq!(got, 4.0 / 45.0, epsilon = 1e-15);
        assert_abs_diff_eq!(24.0 * got, 32.0 / 15.0, epsilon = 1e-14);
    }

    #[test]
    fn constant_integrates_to_one() {
        for d in [2, 3, 6] {
            let rule = ZQuadrature::gauss(12, d).unwrap();
            assert_abs_diff_eq!(rule.integrate(|_| 1.0).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn doubling_changes_smooth_results_below_tolerance() {
        let rule = ZQuadrature::gauss(64, 3).unwrap();
        let fine = rule.refined().unwrap();
        for &t in &[0.05, 0.69214, 3.0] {
            let g = |z: f64| (z * z + t).powi(2) * (z * z + t).ln();
            let coarse_val = rule.integrate(g).unwrap();
            let fine_val = fine.integrate(g).unwrap();
            assert!(
                (coarse_val - fine_val).abs() < 1e-12,
                "t = {t}: {:.3e}",
                (coarse_val - fine_val).abs()
            );
        }
    }

    #[test]
    fn antipodal_consistency_is_exact() {
        let rule = ZQuadrature::gauss(33, 4).unwrap();
        // Mirror symmetry is enforced bitwise, so the negated-node rule is the
        // original rule again.
        let n = rule.len();
        for i in 0..n {
            assert_eq!(rule.nodes()[i], -rule.nodes()[n - 1 - i]);
            assert_eq!(rule.weights()[i], rule.weights()[n - 1 - i]);
        }
    }

    #[test]
    fn rejects_undersized_and_bad_dimension() {
        assert!(ZQuadrature::gauss(1, 3).is_err());
        assert!(ZQuadrature::gauss(0, 3).is_err());
        assert!(ZQuadrature::gauss(8, 1).is_err());
        assert!(SphereQuadrature::product(1, 16).is_err());
        assert!(SphereQuadrature::product(8, 3).is_err());
    }

    #[test]
    fn non_finite_integrand_names_the_node() {
        let rule = ZQuadrature::gauss(8, 3).unwrap();
        let bad = rule.integrate(|z| 1.0 / (z - rule.nodes()[3]));
        match bad {
            Err(Gamma2Error::NonFiniteIntegrand { index, .. }) => assert_eq!(index, 3),
            other => panic!("expected NonFiniteIntegrand, got {other:?}"),
        }
    }

    #[test]
    fn product_rule_moments() {
        let rule = SphereQuadrature::product(16, 32).unwrap();
        assert_abs_diff_eq!(rule.integrate(|_| 1.0).unwrap(), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(
            rule.integrate(|p| p.sigma()[0]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        // sigma_i sigma_j -> delta_ij / 3
        for i in 0..3 {
            for j in 0..3 {
                let got = rule.integrate(|p| p.sigma()[i] * p.sigma()[j]).unwrap();
                let want = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert_abs_diff_eq!(got, want, epsilon = 1e-12);
            }
        }
        // x²y² -> 1/15 on S².
        let got = rule
            .integrate(|p| (p.sigma()[0] * p.sigma()[1]).powi(2))
            .unwrap();
        assert_abs_diff_eq!(got, 1.0 / 15.0, epsilon = 1e-13);
    }

    #[test]
    fn product_rule_matches_axisymmetric_rule() {
        let sphere = SphereQuadrature::product(24, 48).unwrap();
        let zrule = ZQuadrature::gauss(24, 3).unwrap();
        for &t in &[0.2, 1.0, 5.0] {
            let g = |z: f64| (z * z + t) * (z * z + t);
            let a = sphere.integrate(|p| g(p.z())).unwrap();
            let b = zrule.integrate(g).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12 * b.abs());
            // (sigma_3² + t)² has the closed-form mean t² + 2t/3 + 1/5.
            assert_abs_diff_eq!(a, t * t + 2.0 * t / 3.0 + 0.2, epsilon = 1e-12);
        }
    }

    #[test]
    fn chebyshev_rule_for_d2_matches_singular_density_moments() {
        let rule = ZQuadrature::gauss(16, 2).unwrap();
        for m in 0..=10 {
            assert_abs_diff_eq!(
                rule.integrate(|z| z.powi(2 * m as i32)).unwrap(),
                z_moment(2, m),
                epsilon = 1e-14
            );
        }
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn z_moment(d: usize, m: usize) -> f64 {
        (1..=m).fold(1.0, |acc, j| {
            acc * (2.0 * j as f64 - 1.0) / (d as f64 + 2.0 * j as f64 - 2.0)
        })
    }

    proptest! {
        /// Gauss exactness: any even polynomial below the rule's degree
        /// integrates to its closed-form moment sum.
        #[test]
        fn rule_is_exact_on_random_even_polynomials(
            d in 2usize..9,
            n in 6usize..32,
            coeffs in proptest::collection::vec(-3.0f64..3.0, 1..6),
        ) {
            prop_assume!(2 * (coeffs.len() - 1) < 2 * n);
            let rule = ZQuadrature::gauss(n, d).unwrap();
            let got = rule
                .integrate(|z| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| c * z.powi(2 * j as i32))
                        .sum()
                })
                .unwrap();
            let want: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| c * z_moment(d, j))
                .sum();
            prop_assert!((got - want).abs() <= 1e-13 * (1.0 + want.abs()));
        }

        /// Evenness: an even integrand sees the rule and its antipodal image
        /// identically, bit for bit.
        #[test]
        fn antipodal_image_is_bitwise_identical(
            d in 2usize..7,
            n in 4usize..40,
            c in -2.0f64..2.0,
        ) {
            let rule = ZQuadrature::gauss(n, d).unwrap();
            let g = |z: f64| (c * z * z).exp();
            let a = rule.integrate(g).unwrap();
            let b = rule.integrate(|z| g(-z)).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
