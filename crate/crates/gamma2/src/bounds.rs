//! Closed-form bounds for the optimal constants of the symmetric class and a
//! guarded scalar minimizer reproducing the quartic-family minima.
//!
//! Notation: lambda is the first nonzero symmetric Laplace-Beltrami
//! eigenvalue (2d on S^{d-1}), alpha the optimal log-Sobolev constant and
//! Lambda the optimal Gamma_2-criterion constant, ordered
//! lambda = 2d >= alpha >= Lambda. For the unconstrained (non-symmetric)
//! class on S^{d-1} all three constants equal d - 1; that value enters here
//! only through the curvature-dimension data (rho, n) = (d-2, d-1).

use serde::{Deserialize, Serialize};

use crate::error::{Gamma2Error, Result};

/// Number of pre-scan grid points used to verify unimodality before the
/// golden-section refinement.
pub const PRESCAN_POINTS: usize = 1000;

/// Default bracket for the quartic-family minimizations. The quadrature
/// agreement checks operate on t >= 0.05; the closed forms below stay
/// accurate down to the 1e-3 end of the bracket.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-3, 100.0);

/// Default minimizer tolerance on the abscissa.
pub const DEFAULT_MIN_TOL: f64 = 1e-6;

/// Lower bound d + 3 - 1/(d-1) for the Gamma_2 constant of the symmetric
/// class on S^{d-1}; 4 for d = 2 and 5.5 for d = 3.
pub fn lambda_lower(d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    Ok(df + 3.0 - 1.0 / (df - 1.0))
}

/// Generalized lower bound under the curvature-dimension condition CD(rho, n)
/// with first nonzero eigenvalue lambda_m:
/// (4n-1)/(n(n+2)) lambda_m + (n-1)²/(n(n+2)) * rho n/(n-1).
///
/// At (2d, d-2, d-1) this recovers `lambda_lower(d)`.
pub fn cd_lambda_lower(lambda_m: f64, rho: f64, n: f64) -> Result<f64> {
    check_cd(n)?;
    if !(rho > 0.0) || !(lambda_m > 0.0) {
        return Err(Gamma2Error::InvalidArgument(format!(
            "cd_lambda_lower needs rho > 0 and lambda_m > 0 (got rho = {rho}, lambda_m = {lambda_m})"
        )));
    }
    Ok((4.0 * n - 1.0) / (n * (n + 2.0)) * lambda_m
        + (n - 1.0).powi(2) / (n * (n + 2.0)) * bakry_emery_lower(rho, n)?)
}

/// Curvature-only lower bound rho n/(n-1) for the Gamma_2 constant.
pub fn bakry_emery_lower(rho: f64, n: f64) -> Result<f64> {
    check_cd(n)?;
    Ok(rho * n / (n - 1.0))
}

/// Eigenvalue lower bound rho n/(n-1); same formula as `bakry_emery_lower`,
/// distinct role (it bounds lambda_m, not the Gamma_2 constant).
pub fn lichnerowicz_lower(rho: f64, n: f64) -> Result<f64> {
    check_cd(n)?;
    Ok(rho * n / (n - 1.0))
}

/// Log-Sobolev lower bound 4n/(n+1)² lambda + (n-1)²/(n+1)² * rho n/(n-1);
/// equals d + 3 - 4/d² at (2d, d-2, d-1).
pub fn rothaus_lower(lambda: f64, rho: f64, n: f64) -> Result<f64> {
    check_cd(n)?;
    let w = (n + 1.0) * (n + 1.0);
    Ok(4.0 * n / w * lambda + (n - 1.0).powi(2) / w * bakry_emery_lower(rho, n)?)
}

/// 1 - sqrt(t) arctan(1/sqrt(t)), free of cancellation.
///
/// Direct evaluation loses all significance for large t (the product tends
/// to 1 like 1/(3t)); above t = 64 the alternating tail
/// sum_{k>=1} (-1)^{k+1} t^{-k}/(2k+1) converges to full precision in a few
/// terms and matches the direct branch at the switch to ~1e-13 relative.
fn arctan_deficit(t: f64) -> f64 {
    if t < 64.0 {
        let s = t.sqrt();
        return 1.0 - s * (1.0 / s).atan();
    }
    let x = 1.0 / t;
    let mut power = x;
    let mut sum = 0.0;
    let mut k = 1u32;
    loop {
        let term = power / (2.0 * k as f64 + 1.0);
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 * sum.abs() {
            return sum;
        }
        power *= x;
        k += 1;
    }
}

/// Upper-bound expression for the Gamma_2 constant on S² from the quartic
/// family: U(t) = 5(3t+1)(3t+2) - 15(t+1)(3t+1) sqrt(t) arctan(1/sqrt(t)).
///
/// Evaluated as 15(t+1)(3t+1) [1 - sqrt(t) arctan(1/sqrt(t))] - 5(3t+1),
/// which is the same expression with the O(t²) cancellation removed, so the
/// large-t limit 6 comes out to full precision.
pub fn upper_u(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(15.0 * (t + 1.0) * (3.0 * t + 1.0) * arctan_deficit(t) - 5.0 * (3.0 * t + 1.0))
}

/// Upper-bound expression for the log-Sobolev constant on S² from the same
/// family: the reciprocal of
/// 2 t² sqrt(t) arctan(1/sqrt(t)) + (15/16) m log((t²+2t+1)/m) - (120t²+35t+9)/60
/// with m = t² + 2t/3 + 1/5.
///
/// The bracket is evaluated in the equivalent grouped form
/// (15/16) m log1p((4t/3 + 4/5)/m) - 2t² [1 - sqrt(t) arctan(1/sqrt(t))] - 7t/12 - 3/20,
/// again to avoid the large-t cancellation.
pub fn upper_alpha_expr(t: f64) -> Result<f64> {
    check_t(t)?;
    let m = t * t + 2.0 * t / 3.0 + 0.2;
    let bracket = (15.0 / 16.0) * m * ((4.0 * t / 3.0 + 0.8) / m).ln_1p()
        - 2.0 * t * t * arctan_deficit(t)
        - 7.0 * t / 12.0
        - 0.15;
    if bracket <= 1e-14 {
        return Err(Gamma2Error::UndefinedRatio(format!(
            "log-Sobolev upper-bound bracket {bracket:.3e} at t = {t} is not positive"
        )));
    }
    Ok(1.0 / bracket)
}

/// Result of a bracketed scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarMinResult {
    pub t_star: f64,
    pub value: f64,
    pub evaluations: usize,
    pub bracket: (f64, f64),
}

/// Golden-section minimization on [lo, hi] with |t_star - argmin| <= tol for
/// unimodal objectives.
///
/// A 10³-point pre-scan (log-spaced for positive brackets) locates the
/// minimum and aborts with an error if more than one interior local minimum
/// shows up; the golden-section then refines the bracketing subinterval.
pub fn minimize_scalar(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<ScalarMinResult> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Gamma2Error::InvalidArgument(format!(
            "bracket [{lo}, {hi}] must be finite and increasing"
        )));
    }
    if !(tol > 0.0) {
        return Err(Gamma2Error::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let mut evaluations = 0usize;
    let mut eval = |t: f64| -> Result<f64> {
        evaluations += 1;
        let v = f(t);
        if !v.is_finite() {
            return Err(Gamma2Error::NonFiniteValue { at: t, value: v });
        }
        Ok(v)
    };

    // Pre-scan.
    let grid: Vec<f64> = if lo > 0.0 {
        let (llo, lhi) = (lo.ln(), hi.ln());
        (0..PRESCAN_POINTS)
            .map(|i| (llo + (lhi - llo) * i as f64 / (PRESCAN_POINTS - 1) as f64).exp())
            .collect()
    } else {
        (0..PRESCAN_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (PRESCAN_POINTS - 1) as f64)
            .collect()
    };
    let values: Vec<f64> = grid.iter().map(|&t| eval(t)).collect::<Result<_>>()?;
    let mut minima = 0usize;
    for i in 1..values.len() - 1 {
        if values[i] < values[i - 1] && values[i] <= values[i + 1] {
            minima += 1;
        }
    }
    if minima > 1 {
        return Err(Gamma2Error::NotUnimodal {
            lo,
            hi,
            count: minima,
        });
    }
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];

    // Golden-section refinement.
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while (b - a) > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
    }
    let (t_star, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(ScalarMinResult {
        t_star,
        value,
        evaluations,
        bracket: (lo, hi),
    })
}

/// min over t of `upper_u` on the default bracket (the certified upper bound
/// for the Gamma_2 constant on S², about 5.73892 at t about 0.69214).
pub fn minimize_upper_lambda3() -> Result<ScalarMinResult> {
    minimize_scalar(
        |t| upper_u(t).unwrap_or(f64::NAN),
        DEFAULT_BRACKET.0,
        DEFAULT_BRACKET.1,
        DEFAULT_MIN_TOL,
    )
}

/// min over t of `upper_alpha_expr` on the default bracket (the upper bound
/// for the log-Sobolev constant on S², about 5.8358 at t about 0.757585).
pub fn minimize_upper_alpha3() -> Result<ScalarMinResult> {
    minimize_scalar(
        |t| upper_alpha_expr(t).unwrap_or(f64::NAN),
        DEFAULT_BRACKET.0,
        DEFAULT_BRACKET.1,
        DEFAULT_MIN_TOL,
    )
}

/// Every closed-form bound for one ambient dimension. Fields that require
/// the curvature-dimension data n = d - 1 >= 2 are absent for d = 2; the
/// quartic-family upper bounds exist only for d = 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub d: usize,
    pub lambda_d: f64,
    pub lambda_lower: f64,
    pub cd_lower: Option<f64>,
    pub bakry_emery: Option<f64>,
    pub rothaus: Option<f64>,
    pub lichnerowicz: Option<f64>,
    pub upper_lambda3: Option<f64>,
    pub upper_alpha3: Option<f64>,
}

impl BoundReport {
    pub fn for_dimension(d: usize) -> Result<Self> {
        check_dim(d)?;
        let df = d as f64;
        let (cd_lower, bakry_emery, rothaus, lichnerowicz) = if d >= 3 {
            let (lam, rho, n) = (2.0 * df, df - 2.0, df - 1.0);
            (
                Some(cd_lambda_lower(lam, rho, n)?),
                Some(bakry_emery_lower(rho, n)?),
                Some(rothaus_lower(lam, rho, n)?),
                Some(lichnerowicz_lower(rho, n)?),
            )
        } else {
            (None, None, None, None)
        };
        let (upper_lambda3, upper_alpha3) = if d == 3 {
            (
                Some(minimize_upper_lambda3()?.value),
                Some(minimize_upper_alpha3()?.value),
            )
        } else {
            (None, None)
        };
        Ok(Self {
            d,
            lambda_d: 2.0 * df,
            lambda_lower: lambda_lower(d)?,
            cd_lower,
            bakry_emery,
            rothaus,
            lichnerowicz,
            upper_lambda3,
            upper_alpha3,
        })
    }

    pub const CSV_HEADER: &'static str =
        "d,lambda_d,lambda_lower,cd_lower,bakry_emery,rothaus,lichnerowicz,upper_lambda3,upper_alpha3";

    /// Fixed-column CSV row; absent fields are left empty.
    pub fn csv_row(&self) -> String {
        let opt = |v: &Option<f64>| v.map(format_float).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.d,
            format_float(self.lambda_d),
            format_float(self.lambda_lower),
            opt(&self.cd_lower),
            opt(&self.bakry_emery),
            opt(&self.rothaus),
            opt(&self.lichnerowicz),
            opt(&self.upper_lambda3),
            opt(&self.upper_alpha3),
        )
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Gamma2Error::InvalidArgument(format!(
            "ambient dimension d = {d} must be at least 2"
        )));
    }
    Ok(())
}

fn check_cd(n: f64) -> Result<()> {
    if !(n >= 2.0) || !n.is_finite() {
        return Err(Gamma2Error::InvalidArgument(format!(
            "curvature-dimension parameter n = {n} must be at least 2"
        )));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Gamma2Error::InvalidArgument(format!(
            "family parameter t = {t} must be positive and finite"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lambda_lower_reference_values() {
        assert_abs_diff_eq!(lambda_lower(2).unwrap(), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_lower(3).unwrap(), 5.5, epsilon = 1e-15);
        assert_abs_diff_eq!(lambda_lower(4).unwrap(), 20.0 / 3.0, epsilon = 1e-15);
        assert!(lambda_lower(1).is_err());
    }

    #[test]
    fn cd_bound_recovers_sphere_bound() {
        assert_abs_diff_eq!(cd_lambda_lower(6.0, 1.0, 2.0).unwrap(), 5.5, epsilon = 1e-15);
        for d in 3..=12usize {
            let df = d as f64;
            let got = cd_lambda_lower(2.0 * df, df - 2.0, df - 1.0).unwrap();
            assert_abs_diff_eq!(got, lambda_lower(d).unwrap(), epsilon = 1e-12);
        }
        // d = 5: 7.75.
        assert_abs_diff_eq!(cd_lambda_lower(10.0, 3.0, 4.0).unwrap(), 7.75, epsilon = 1e-13);
        // Convexity: the two weights sum to one, so a common value is fixed.
        let v = 3.7;
        for n in [2.0, 4.0, 9.0] {
            let rho = v * (n - 1.0) / n; // so that rho n/(n-1) = v
            assert_abs_diff_eq!(cd_lambda_lower(v, rho, n).unwrap(), v, epsilon = 1e-13);
        }
        assert!(cd_lambda_lower(6.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn bakry_emery_and_lichnerowicz() {
        assert_abs_diff_eq!(bakry_emery_lower(1.0, 2.0).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lichnerowicz_lower(1.0, 2.0).unwrap(), 2.0, epsilon = 1e-15);
        for d in 3..=10usize {
            let df = d as f64;
            assert_abs_diff_eq!(
                bakry_emery_lower(df - 2.0, df - 1.0).unwrap(),
                df - 1.0,
                epsilon = 1e-13
            );
        }
        assert_abs_diff_eq!(bakry_emery_lower(0.0, 5.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lichnerowicz_lower(0.0, 5.0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rothaus_reference_values() {
        assert_abs_diff_eq!(rothaus_lower(6.0, 1.0, 2.0).unwrap(), 50.0 / 9.0, epsilon = 1e-14);
        for d in 3..=12usize {
            let df = d as f64;
            let got = rothaus_lower(2.0 * df, df - 2.0, df - 1.0).unwrap();
            assert_abs_diff_eq!(got, df + 3.0 - 4.0 / (df * df), epsilon = 1e-12);
        }
        let v = 2.9;
        for n in [2.0, 6.0] {
            let rho = v * (n - 1.0) / n;
            assert_abs_diff_eq!(rothaus_lower(v, rho, n).unwrap(), v, epsilon = 1e-13);
        }
    }

    #[test]
    fn upper_u_reference_values() {
        assert_abs_diff_eq!(upper_u(0.69214).unwrap(), 5.73892, epsilon = 1e-4);
        assert_abs_diff_eq!(upper_u(1e6).unwrap(), 6.0, epsilon = 1e-2);
        // t -> 0+: 10 - 15 sqrt(t) pi/2 (1 + O(t)); oracle value at 1e-8.
        assert_abs_diff_eq!(upper_u(1e-8).unwrap(), 9.997644405415569, epsilon = 1e-9);
        assert!(upper_u(0.0).is_err());
        assert!(upper_u(-1.0).is_err());
    }

    #[test]
    fn upper_alpha_reference_values() {
        assert_abs_diff_eq!(upper_alpha_expr(0.757585).unwrap(), 5.8358, epsilon = 1e-3);
        assert_abs_diff_eq!(upper_alpha_expr(1e6).unwrap(), 6.0, epsilon = 1e-2);
        assert!(upper_alpha_expr(0.0).is_err());
    }

    #[test]
    fn minimizer_on_parabola() {
        let r = minimize_scalar(|t| (t - 2.0) * (t - 2.0), 1e-3, 100.0, 1e-6).unwrap();
        assert_abs_diff_eq!(r.t_star, 2.0, epsilon = 1e-6);
        assert!(r.value < 1e-11);
        assert!(r.t_star >= r.bracket.0 && r.t_star <= r.bracket.1);
        assert!(r.evaluations >= PRESCAN_POINTS);
    }

    #[test]
    fn minimizer_reproduces_quartic_minima() {
        let lam = minimize_upper_lambda3().unwrap();
        assert_abs_diff_eq!(lam.t_star, 0.69214, epsilon = 1e-3);
        assert_abs_diff_eq!(lam.value, 5.73892, epsilon = 1e-4);
        let alpha = minimize_upper_alpha3().unwrap();
        assert_abs_diff_eq!(alpha.t_star, 0.757585, epsilon = 1e-3);
        assert_abs_diff_eq!(alpha.value, 5.8358, epsilon = 1e-3);
    }

    #[test]
    fn minimizer_rejects_multimodal_objectives() {
        let wavy = |t: f64| (t * 3.0).sin();
        assert!(matches!(
            minimize_scalar(wavy, 0.0, 10.0, 1e-6),
            Err(Gamma2Error::NotUnimodal { .. })
        ));
    }

    #[test]
    fn minimizer_rejects_non_finite_objective() {
        let bad = |t: f64| if t > 50.0 { f64::NAN } else { t };
        assert!(matches!(
            minimize_scalar(bad, 1.0, 100.0, 1e-6),
            Err(Gamma2Error::NonFiniteValue { .. })
        ));
    }

    #[test]
    fn value_at_minimum_below_bracket_endpoints() {
        let r = minimize_upper_lambda3().unwrap();
        assert!(r.value <= upper_u(DEFAULT_BRACKET.0).unwrap());
        assert!(r.value <= upper_u(DEFAULT_BRACKET.1).unwrap());
    }

    #[test]
    fn sandwich_of_certified_bounds() {
        // 5.5 <= min U <= 6 and 50/9 <= min alpha-expression <= 6.
        let lam = minimize_upper_lambda3().unwrap().value;
        assert!((lambda_lower(3).unwrap()..=6.0).contains(&lam));
        let alpha = minimize_upper_alpha3().unwrap().value;
        assert!((50.0 / 9.0..=6.0).contains(&alpha));
        // Full ordering for d = 3: 2d >= alpha-upper >= Lambda-upper >= 5.5.
        assert!(6.0 >= alpha && alpha >= lam && lam >= 5.5);
    }

    #[test]
    fn trend_of_normalized_bounds_toward_one() {
        // lambda_lower(d)/d and rothaus(2d, d-2, d-1)/d both approach 1
        // monotonically as d grows toward 64.
        let mut prev_l = f64::INFINITY;
        let mut prev_r = f64::INFINITY;
        for d in 3..=64usize {
            let df = d as f64;
            let l = lambda_lower(d).unwrap() / df;
            let r = rothaus_lower(2.0 * df, df - 2.0, df - 1.0).unwrap() / df;
            assert!(l < prev_l, "lambda_lower/d not decreasing at d = {d}");
            assert!(r < prev_r, "rothaus/d not decreasing at d = {d}");
            assert!(l > 1.0 && r > 1.0);
            prev_l = l;
            prev_r = r;
        }
        assert!(prev_l - 1.0 < 0.05);
        assert!(prev_r - 1.0 < 0.05);
    }

    #[test]
    fn bound_report_for_reference_dimensions() {
        let r3 = BoundReport::for_dimension(3).unwrap();
        assert_abs_diff_eq!(r3.lambda_d, 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r3.lambda_lower, 5.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r3.cd_lower.unwrap(), 5.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r3.bakry_emery.unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r3.rothaus.unwrap(), 50.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r3.lichnerowicz.unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r3.upper_lambda3.unwrap(), 5.73892, epsilon = 1e-4);
        assert_abs_diff_eq!(r3.upper_alpha3.unwrap(), 5.8358, epsilon = 1e-3);

        let r2 = BoundReport::for_dimension(2).unwrap();
        assert_abs_diff_eq!(r2.lambda_lower, 4.0, epsilon = 1e-15);
        assert!(r2.cd_lower.is_none());
        assert!(r2.upper_lambda3.is_none());

        let r10 = BoundReport::for_dimension(10).unwrap();
        assert!(r10.lambda_d >= r10.rothaus.unwrap());
        assert!(r10.rothaus.unwrap() >= r10.lambda_lower);
        assert!(r10.lambda_lower >= r10.cd_lower.unwrap() - 1e-12);
        assert!(r10.lambda_lower >= r10.bakry_emery.unwrap());
        assert!(r10.upper_lambda3.is_none());
    }

    #[test]
    fn bound_report_csv_shape() {
        let r2 = BoundReport::for_dimension(2).unwrap();
        let row = r2.csv_row();
        assert_eq!(row.split(',').count(), BoundReport::CSV_HEADER.split(',').count());
        // Empty fields for d = 2.
        assert!(row.contains(",,"));
        let r3 = BoundReport::for_dimension(3).unwrap();
        assert!(!r3.csv_row().contains(",,"));
        // 17 significant digits.
        assert!(format_float(5.5).starts_with("5.5000000000000000e0"));
    }
}
