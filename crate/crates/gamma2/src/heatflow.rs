//! Spectral heat flow of axisymmetric symmetric functions on S².
//!
//! The flow state is the even-degree Legendre spectrum of the profile; the
//! heat semigroup acts diagonally, a_k(t) = a_k(0) exp(-k(k+1) t), so time
//! stepping is exact and quadrature is the only error source. Along the flow
//! the entropy dissipates at rate -i(f) and the Fisher information at rate
//! -2 int f Gamma_2(log f, log f); integrating the second inequality against
//! the first is what turns a Gamma_2 bound into a log-Sobolev bound.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bounds::format_float;
use crate::error::{Gamma2Error, Result};
use crate::families::FamilyDescriptor;
use crate::functionals::{flow_observables, Rule, SymmetricPositiveFunction};
use crate::poly::legendre_with_derivatives;
use crate::quadrature::ZQuadrature;
use crate::sphere::AxisymmetricProfile;

/// Relative floor for positivity along the flow: a node value at or below
/// this fraction of the mass aborts instead of clamping (clamping would
/// silently corrupt the dissipation identities).
pub const FLOW_POSITIVITY_FLOOR: f64 = 1e-12;

/// Reconstruction tail bound for `decompose`: band-limited input must be
/// reproduced at the nodes to this relative accuracy.
pub const DECOMPOSE_TAIL_BOUND: f64 = 1e-10;

/// Default centered-difference step for `check_dissipation`.
pub const DEFAULT_DISSIPATION_DT: f64 = 1e-5;

/// `integrated_inequality` requires the final Fisher information below this.
pub const FISHER_DECAY_THRESHOLD: f64 = 1e-8;

fn flow_rule() -> &'static ZQuadrature {
    static RULE: OnceLock<ZQuadrature> = OnceLock::new();
    RULE.get_or_init(|| ZQuadrature::gauss(64, 3).expect("static 64-node rule"))
}

/// Even-degree Legendre coefficients a_0, a_2, ..., a_K of an axisymmetric
/// function on S²; odd degrees are structurally absent (antipodal symmetry is
/// preserved by the heat flow).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendreSpectrum {
    even_coeffs: Vec<f64>,
}

impl LegendreSpectrum {
    /// From coefficients of P_0, P_2, ..., P_{2(len-1)}.
    pub fn from_even_coeffs(even_coeffs: Vec<f64>) -> Result<Self> {
        if even_coeffs.is_empty() {
            return Err(Gamma2Error::InvalidArgument(
                "spectrum needs at least the constant coefficient".into(),
            ));
        }
        Ok(Self { even_coeffs })
    }

    /// Coefficient of P_k (zero for odd or out-of-range k).
    pub fn coeff(&self, k: usize) -> f64 {
        if !k.is_multiple_of(2) {
            return 0.0;
        }
        self.even_coeffs.get(k / 2).copied().unwrap_or(0.0)
    }

    pub fn even_coeffs(&self) -> &[f64] {
        &self.even_coeffs
    }

    /// Truncation degree K.
    pub fn truncation_degree(&self) -> usize {
        2 * (self.even_coeffs.len() - 1)
    }

    /// Mass int f dsigma = a_0 (all higher modes have zero mean).
    pub fn mass(&self) -> f64 {
        self.even_coeffs[0]
    }

    fn full_coeffs(&self) -> Vec<f64> {
        let mut full = vec![0.0; self.truncation_degree() + 1];
        for (j, &a) in self.even_coeffs.iter().enumerate() {
            full[2 * j] = a;
        }
        full
    }

    /// Reconstructed profile sum_k a_k P_k(z) with exact derivatives.
    pub fn to_profile(&self) -> AxisymmetricProfile {
        AxisymmetricProfile::legendre_series(3, self.full_coeffs())
    }

    /// Reconstruction wrapped for functional evaluation.
    pub fn to_function(&self) -> SymmetricPositiveFunction {
        SymmetricPositiveFunction::from_trusted_profile(
            self.to_profile(),
            FamilyDescriptor::Profile,
        )
    }

    /// Positivity along the flow: every node value must exceed
    /// `FLOW_POSITIVITY_FLOOR` times the mass.
    pub fn check_positivity(&self, rule: &ZQuadrature) -> Result<()> {
        let mass = self.mass();
        if !(mass > 0.0) {
            return Err(Gamma2Error::PositivityViolation {
                min: mass,
                index: 0,
                floor: 0.0,
            });
        }
        let profile = self.to_profile();
        let floor = FLOW_POSITIVITY_FLOOR * mass;
        for (i, &z) in rule.nodes().iter().enumerate() {
            let v = profile.phi(z);
            if v <= floor {
                return Err(Gamma2Error::PositivityViolation {
                    min: v,
                    index: i,
                    floor,
                });
            }
        }
        Ok(())
    }
}

/// Projection of a profile onto the even Legendre basis through degree K:
/// a_k = (2k+1) int prof P_k dsigma.
///
/// The rule must be exact to degree 2K; inputs that are not resolved by
/// degree K (tail above `DECOMPOSE_TAIL_BOUND`, including any odd component)
/// are rejected so that `evolve` stays exact rather than approximate.
pub fn decompose(
    prof: &AxisymmetricProfile,
    truncation: usize,
    rule: &ZQuadrature,
) -> Result<LegendreSpectrum> {
    if !truncation.is_multiple_of(2) || truncation < 2 {
        return Err(Gamma2Error::InvalidArgument(format!(
            "truncation degree {truncation} must be even and at least 2"
        )));
    }
    if prof.d() != 3 || rule.d() != 3 {
        return Err(Gamma2Error::InvalidArgument(
            "spectral decomposition is implemented for S² (d = 3) only".into(),
        ));
    }
    if rule.exactness_degree() < 2 * truncation {
        return Err(Gamma2Error::InvalidArgument(format!(
            "rule exact to degree {} cannot project onto degree {truncation} (needs {})",
            rule.exactness_degree(),
            2 * truncation
        )));
    }
    let mut even_coeffs = Vec::with_capacity(truncation / 2 + 1);
    for k in (0..=truncation).step_by(2) {
        let a = rule.integrate(|z| prof.phi(z) * legendre_with_derivatives(k, z).0)?;
        even_coeffs.push((2 * k + 1) as f64 * a);
    }
    let spectrum = LegendreSpectrum { even_coeffs };
    // Tail check: the reconstruction must reproduce the input at the nodes.
    let recon = spectrum.to_profile();
    let mut scale: f64 = 1.0;
    let mut tail: f64 = 0.0;
    for &z in rule.nodes() {
        let v = prof.phi(z);
        scale = scale.max(v.abs());
        tail = tail.max((v - recon.phi(z)).abs());
    }
    if tail > DECOMPOSE_TAIL_BOUND * scale {
        return Err(Gamma2Error::UnresolvedTail {
            degree: truncation,
            tail,
            bound: DECOMPOSE_TAIL_BOUND * scale,
        });
    }
    Ok(spectrum)
}

/// Exact heat-semigroup action: a_k(t) = a_k exp(-k(k+1) t) (eigenvalues
/// k(d+k-2) with d = 3); the constant coefficient, and with it the mass, is
/// untouched. Positivity of the evolved state is verified on the internal
/// 64-node rule.
pub fn evolve(spectrum: &LegendreSpectrum, t: f64) -> Result<LegendreSpectrum> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Gamma2Error::InvalidArgument(format!(
            "flow time t = {t} must be nonnegative and finite"
        )));
    }
    let even_coeffs = spectrum
        .even_coeffs
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let k = (2 * j) as f64;
            a * (-k * (k + 1.0) * t).exp()
        })
        .collect();
    let evolved = LegendreSpectrum { even_coeffs };
    evolved.check_positivity(flow_rule())?;
    Ok(evolved)
}

/// Monitored quantities along the flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub mass_series: Vec<f64>,
    pub entropy_series: Vec<f64>,
    pub fisher_series: Vec<f64>,
    pub gamma2_series: Vec<f64>,
}

impl FlowTrace {
    pub const CSV_HEADER: &'static str = "time,mass,entropy,fisher,gamma2";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                format_float(self.times[i]),
                format_float(self.mass_series[i]),
                format_float(self.entropy_series[i]),
                format_float(self.fisher_series[i]),
                format_float(self.gamma2_series[i]),
            ));
        }
        out
    }
}

/// Functionals of the evolved state at each requested time. Times must be
/// sorted ascending and start at 0.
pub fn trace_flow(
    spectrum: &LegendreSpectrum,
    times: &[f64],
    rule: &ZQuadrature,
) -> Result<FlowTrace> {
    if times.is_empty() || times[0] != 0.0 {
        return Err(Gamma2Error::InvalidArgument(
            "trace times must start at 0".into(),
        ));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Gamma2Error::InvalidArgument(
            "trace times must be strictly increasing".into(),
        ));
    }
    let eval_rule = Rule::Axisym(rule.clone());
    let mut trace = FlowTrace {
        times: times.to_vec(),
        mass_series: Vec::with_capacity(times.len()),
        entropy_series: Vec::with_capacity(times.len()),
        fisher_series: Vec::with_capacity(times.len()),
        gamma2_series: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let state = evolve(spectrum, t)?;
        let (mass, entropy, fisher, gamma2) = flow_observables(&state.to_function(), &eval_rule)?;
        trace.mass_series.push(mass);
        trace.entropy_series.push(entropy);
        trace.fisher_series.push(fisher);
        trace.gamma2_series.push(gamma2);
    }
    Ok(trace)
}

/// Centered-difference residuals of the two dissipation identities at time t:
/// |d/dt h + i| and |d/dt i + 2 int f Gamma_2(log f, log f)|; both are
/// O(dt²) for the exact spectral flow.
pub fn check_dissipation(
    spectrum: &LegendreSpectrum,
    t: f64,
    dt: f64,
    rule: &ZQuadrature,
) -> Result<(f64, f64)> {
    if !(dt > 0.0) || !(t >= dt) {
        return Err(Gamma2Error::InvalidArgument(format!(
            "need 0 < dt <= t (got t = {t}, dt = {dt})"
        )));
    }
    let eval_rule = Rule::Axisym(rule.clone());
    let observe = |time: f64| -> Result<(f64, f64, f64)> {
        let state = evolve(spectrum, time)?;
        let (_, h, i, g2) = flow_observables(&state.to_function(), &eval_rule)?;
        Ok((h, i, g2))
    };
    let (h_minus, i_minus, _) = observe(t - dt)?;
    let (_, i_center, g2_center) = observe(t)?;
    let (h_plus, i_plus, _) = observe(t + dt)?;
    let residual_h = ((h_plus - h_minus) / (2.0 * dt) + i_center).abs();
    let residual_i = ((i_plus - i_minus) / (2.0 * dt) + 2.0 * g2_center).abs();
    Ok((residual_h, residual_i))
}

/// Slack of the integrated dissipation inequality:
/// (i(0) - i(T))/2 - lambda (h(0) - h(T)).
///
/// T must be large enough that i(T) <= `FISHER_DECAY_THRESHOLD`; then
/// h(T) has converged to m log m and a nonnegative slack at lambda certifies
/// the log-Sobolev inequality with that constant for this initial datum.
pub fn integrated_inequality(
    spectrum: &LegendreSpectrum,
    t_final: f64,
    lambda: f64,
    rule: &ZQuadrature,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Gamma2Error::InvalidArgument(format!(
            "lambda = {lambda} must be positive"
        )));
    }
    let eval_rule = Rule::Axisym(rule.clone());
    let (_, h0, i0, _) = flow_observables(&spectrum.to_function(), &eval_rule)?;
    let state = evolve(spectrum, t_final)?;
    let (_, h_final, i_final, _) = flow_observables(&state.to_function(), &eval_rule)?;
    if i_final > FISHER_DECAY_THRESHOLD {
        return Err(Gamma2Error::InvalidArgument(format!(
            "final time {t_final} too small: i(T) = {i_final:.3e} above {FISHER_DECAY_THRESHOLD:.0e}"
        )));
    }
    Ok(0.5 * (i0 - i_final) - lambda * (h0 - h_final))
}

/// Deterministic positive band-limited initial datum: a_0 = 1 and degree-2/4
/// coefficients uniform in [-amplitude, amplitude] (amplitude < 1/2 keeps the
/// reconstruction positive since |P_k| <= 1).
pub fn sample_spectrum(seed: u64, amplitude: f64) -> Result<LegendreSpectrum> {
    use rand::prelude::*;
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Gamma2Error::InvalidArgument(format!(
            "amplitude {amplitude} must lie in [0, 1/2) to keep the state positive"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let a2 = rng.random_range(-amplitude..=amplitude);
    let a4 = rng.random_range(-amplitude..=amplitude);
    LegendreSpectrum::from_even_coeffs(vec![1.0, a2, a4])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::QuarticFamily;
    use approx::assert_abs_diff_eq;

    fn rule() -> ZQuadrature {
        ZQuadrature::gauss(64, 3).unwrap()
    }

    #[test]
    fn decompose_quartic_is_exact_through_degree_four() {
        let r = rule();
        let t = 1.0;
        let prof = QuarticFamily::new(t).unwrap().profile();
        let spec = decompose(&prof, 8, &r).unwrap();
        // (z²+t)² = a0 P0 + a2 P2 + a4 P4 with
        // a0 = t² + 2t/3 + 1/5, a2 = 4t/3 + 4/7, a4 = 8/35.
        assert_abs_diff_eq!(spec.coeff(0), t * t + 2.0 * t / 3.0 + 0.2, epsilon = 1e-13);
        assert_abs_diff_eq!(spec.coeff(2), 4.0 * t / 3.0 + 4.0 / 7.0, epsilon = 1e-13);
        assert_abs_diff_eq!(spec.coeff(4), 8.0 / 35.0, epsilon = 1e-13);
        assert_abs_diff_eq!(spec.coeff(6), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(spec.coeff(8), 0.0, epsilon = 1e-13);
        assert_eq!(spec.coeff(3), 0.0);
    }

    #[test]
    fn decompose_constant_and_pure_mode() {
        let r = rule();
        let one = AxisymmetricProfile::even_poly(3, vec![1.0]);
        let spec = decompose(&one, 4, &r).unwrap();
        assert_abs_diff_eq!(spec.coeff(0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.coeff(2), 0.0, epsilon = 1e-14);
        let p2 = AxisymmetricProfile::legendre_series(3, vec![0.0, 0.0, 1.0]);
        let spec = decompose(&p2, 4, &r).unwrap();
        assert_abs_diff_eq!(spec.coeff(2), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.coeff(0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.coeff(4), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn decompose_rejects_unresolved_functions() {
        let r = rule();
        // exp(z²) has an infinite Legendre tail.
        let gauss = AxisymmetricProfile::exp_even_poly(3, vec![0.0, 1.0]);
        assert!(matches!(
            decompose(&gauss, 4, &r),
            Err(Gamma2Error::UnresolvedTail { .. })
        ));
        // Odd component is invisible to the even basis and must be caught.
        let odd = AxisymmetricProfile::legendre_series(3, vec![1.0, 0.3]);
        assert!(matches!(
            decompose(&odd, 4, &r),
            Err(Gamma2Error::UnresolvedTail { .. })
        ));
        // Degenerate parameters.
        assert!(decompose(&AxisymmetricProfile::even_poly(3, vec![1.0]), 3, &r).is_err());
        let tiny = ZQuadrature::gauss(4, 3).unwrap();
        assert!(decompose(&AxisymmetricProfile::even_poly(3, vec![1.0]), 8, &tiny).is_err());
    }

    #[test]
    fn evolve_identity_decay_and_mass_conservation() {
        let spec = LegendreSpectrum::from_even_coeffs(vec![1.0, 0.25, -0.1]).unwrap();
        // t = 0 is the identity, bitwise.
        let same = evolve(&spec, 0.0).unwrap();
        for k in [0, 2, 4] {
            assert_eq!(same.coeff(k).to_bits(), spec.coeff(k).to_bits());
        }
        // Modes decay with e^{-k(k+1)t}.
        let t = 0.37;
        let ev = evolve(&spec, t).unwrap();
        assert_eq!(ev.coeff(0).to_bits(), spec.coeff(0).to_bits());
        assert_abs_diff_eq!(
            ev.coeff(2) / spec.coeff(2),
            (-6.0 * t).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            ev.coeff(4) / spec.coeff(4),
            (-20.0 * t).exp(),
            epsilon = 1e-15
        );
        // Repeated evolution is bitwise reproducible.
        let ev2 = evolve(&spec, t).unwrap();
        for k in [0, 2, 4] {
            assert_eq!(ev.coeff(k).to_bits(), ev2.coeff(k).to_bits());
        }
        // Long times converge to the constant (the conserved mass).
        let far = evolve(&spec, 50.0).unwrap();
        assert_eq!(far.coeff(0), spec.coeff(0));
        assert!(far.coeff(2).abs() < 1e-120);
        assert!(far.coeff(4).abs() < 1e-120);
    }

    #[test]
    fn evolve_rejects_negative_states_and_times() {
        // A state with a negative lobe dominating the mass.
        let bad = LegendreSpectrum::from_even_coeffs(vec![0.1, 1.0]).unwrap();
        assert!(matches!(
            evolve(&bad, 0.0),
            Err(Gamma2Error::PositivityViolation { .. })
        ));
        let ok = LegendreSpectrum::from_even_coeffs(vec![1.0, 0.2]).unwrap();
        assert!(evolve(&ok, -0.1).is_err());
    }

    #[test]
    fn trace_of_constant_is_identically_zero() {
        let r = rule();
        let spec = LegendreSpectrum::from_even_coeffs(vec![1.0]).unwrap();
        let trace = trace_flow(&spec, &[0.0, 0.5, 1.0], &r).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(trace.mass_series[i], 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(trace.entropy_series[i], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(trace.fisher_series[i], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(trace.gamma2_series[i], 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn trace_of_normalized_quartic() {
        let r = rule();
        let t_par = 0.69214;
        let q = QuarticFamily::new(t_par).unwrap();
        let mass = t_par * t_par + 2.0 * t_par / 3.0 + 0.2;
        let spec = decompose(&q.profile().scaled(1.0 / mass), 4, &r).unwrap();
        assert_abs_diff_eq!(spec.mass(), 1.0, epsilon = 1e-13);
        let times = [0.0, 0.05, 0.2, 1.0, 5.0];
        let trace = trace_flow(&spec, &times, &r).unwrap();
        // Initial Fisher information scales like i(h)/mass.
        assert_abs_diff_eq!(
            trace.fisher_series[0],
            (32.0 / 15.0) / mass,
            epsilon = 1e-11
        );
        // Mass constant, entropy and Fisher nonincreasing.
        for i in 0..times.len() {
            assert_abs_diff_eq!(trace.mass_series[i], 1.0, epsilon = 1e-12);
            if i > 0 {
                assert!(trace.entropy_series[i] <= trace.entropy_series[i - 1] + 1e-10);
                assert!(trace.fisher_series[i] <= trace.fisher_series[i - 1] + 1e-10);
            }
        }
        // Large final time: both functionals have decayed.
        assert!(trace.entropy_series[4].abs() <= 1e-10);
        assert!(trace.fisher_series[4].abs() <= 1e-9);
    }

    #[test]
    fn trace_validates_time_grid() {
        let r = rule();
        let spec = LegendreSpectrum::from_even_coeffs(vec![1.0, 0.1]).unwrap();
        assert!(trace_flow(&spec, &[0.1, 0.2], &r).is_err());
        assert!(trace_flow(&spec, &[0.0, 0.2, 0.2], &r).is_err());
        assert!(trace_flow(&spec, &[], &r).is_err());
    }

    #[test]
    fn dissipation_residuals_shrink_quadratically() {
        let r = rule();
        let q = QuarticFamily::new(0.69214).unwrap();
        let spec = decompose(&q.profile(), 4, &r).unwrap();
        let (h1, i1) = check_dissipation(&spec, 0.1, 1e-4, &r).unwrap();
        let (h2, i2) = check_dissipation(&spec, 0.1, 5e-5, &r).unwrap();
        let ratio_h = h1 / h2;
        let ratio_i = i1 / i2;
        assert!((3.2..=4.8).contains(&ratio_h), "h ratio {ratio_h}");
        assert!((3.2..=4.8).contains(&ratio_i), "i ratio {ratio_i}");
    }

    #[test]
    fn dissipation_of_constant_and_near_constant() {
        let r = rule();
        let one = LegendreSpectrum::from_even_coeffs(vec![1.0]).unwrap();
        let (h, i) = check_dissipation(&one, 0.1, DEFAULT_DISSIPATION_DT, &r).unwrap();
        assert_abs_diff_eq!(h, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(i, 0.0, epsilon = 1e-14);
        // Near-constant data: residuals are quadratically small.
        let near = LegendreSpectrum::from_even_coeffs(vec![1.0, 1e-3]).unwrap();
        let (h, i) = check_dissipation(&near, 0.1, DEFAULT_DISSIPATION_DT, &r).unwrap();
        assert!(h <= 1e-10, "residual_h = {h}");
        assert!(i <= 1e-10, "residual_i = {i}");
    }

    #[test]
    fn dissipation_rejects_bad_steps() {
        let r = rule();
        let spec = LegendreSpectrum::from_even_coeffs(vec![1.0, 0.1]).unwrap();
        assert!(check_dissipation(&spec, 1e-6, 1e-5, &r).is_err());
        assert!(check_dissipation(&spec, 0.1, 0.0, &r).is_err());
    }

    #[test]
    fn integrated_inequality_certifies_the_lower_bound() {
        let r = rule();
        let q = QuarticFamily::new(0.69214).unwrap();
        let spec = decompose(&q.profile(), 4, &r).unwrap();
        let slack = integrated_inequality(&spec, 5.0, 5.5, &r).unwrap();
        assert!(slack >= -1e-8, "slack {slack}");
        // Constant data: zero slack.
        let one = LegendreSpectrum::from_even_coeffs(vec![1.0]).unwrap();
        let slack = integrated_inequality(&one, 5.0, 5.5, &r).unwrap();
        assert_abs_diff_eq!(slack, 0.0, epsilon = 1e-12);
        // A constant above the true log-Sobolev ratio of this datum
        // produces negative slack.
        let t_star = 0.757585;
        let q = QuarticFamily::new(t_star).unwrap();
        let spec = decompose(&q.profile(), 4, &r).unwrap();
        let slack = integrated_inequality(&spec, 5.0, 5.8358 + 0.1, &r).unwrap();
        assert!(slack < 0.0, "slack {slack}");
        // T too small.
        assert!(integrated_inequality(&spec, 0.5, 5.5, &r).is_err());
    }

    #[test]
    fn sampled_spectra_are_positive_and_reproducible() {
        for seed in 0..20 {
            let a = sample_spectrum(seed, 0.35).unwrap();
            let b = sample_spectrum(seed, 0.35).unwrap();
            assert_eq!(a, b);
            assert!(evolve(&a, 0.0).is_ok());
        }
        assert!(sample_spectrum(1, 0.6).is_err());
    }

    #[test]
    fn flow_trace_csv_shape() {
        let r = rule();
        let spec = LegendreSpectrum::from_even_coeffs(vec![1.0, 0.2, 0.05]).unwrap();
        let trace = trace_flow(&spec, &[0.0, 0.1], &r).unwrap();
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), FlowTrace::CSV_HEADER);
        assert_eq!(lines.count(), 2);
        let json: serde_json::Value = serde_json::to_value(&trace).unwrap();
        assert!(json["times"].is_array());
        assert!(json["fisher_series"].is_array());
    }
}
