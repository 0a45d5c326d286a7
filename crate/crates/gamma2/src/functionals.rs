//! Fisher information, entropy, the Gamma_2 functional (direct and Bochner
//! forms) and the Rayleigh-type ratios whose optimal constants are the
//! Poincare, log-Sobolev and Gamma_2-criterion constants of the symmetric
//! class on S^{d-1}.
//!
//! All functionals are computed without normalizing f to unit mass; the three
//! ratios are scale invariant by construction. Derivatives of log f are
//! obtained from f's exact derivatives through the chain rule (or directly
//! from the exponent in log-density mode), never by differencing log-composed
//! values.

use serde::{Deserialize, Serialize};

use crate::error::{Gamma2Error, Result};
use crate::families::{EvenPolynomialFunction, FamilyDescriptor, PolyMode};
use crate::quadrature::{pairwise_sum, SphereQuadrature, ZQuadrature};
use crate::sphere::{axi_reduce, AxisymmetricProfile, SpherePoint};

/// Functions whose minimum over nodes falls below this fraction of the
/// maximum are rejected: log f derivatives blow up and ratios degrade.
pub const POSITIVITY_FLOOR_REL: f64 = 1e-10;

/// Required relative agreement of the two Gamma_2 forms. The forms are equal
/// only after integration by parts, so their agreement under quadrature is a
/// genuine resolution check.
pub const GAMMA2_FORM_TOL: f64 = 1e-9;

/// Required relative agreement of the three Fisher forms.
pub const FISHER_FORM_TOL: f64 = 1e-10;

/// Required relative agreement of int (lap_s sqrt f)² with (1/4) int f (A + B/2)².
pub const HSQ_FORM_TOL: f64 = 1e-9;

/// Below this Fisher information a function counts as constant and the
/// Gamma_2 ratio is undefined.
pub const FISHER_FLOOR: f64 = 1e-12;

/// Below this denominator the log-Sobolev and Poincare ratios are undefined.
pub const DENOMINATOR_FLOOR: f64 = 1e-14;

/// Quadrature rule used for functional evaluation: the axisymmetric z-rule or
/// the d = 3 product rule on the whole sphere.
#[derive(Debug, Clone)]
pub enum Rule {
    Axisym(ZQuadrature),
    Sphere(SphereQuadrature),
}

impl Rule {
    /// Default axisymmetric rule: 64 Gauss nodes.
    pub fn default_axisym(d: usize) -> Result<Self> {
        Ok(Rule::Axisym(ZQuadrature::gauss(64, d)?))
    }

    /// Default product rule on S²: 64 x 128 nodes.
    pub fn default_sphere() -> Result<Self> {
        Ok(Rule::Sphere(SphereQuadrature::product(64, 128)?))
    }

    pub fn d(&self) -> usize {
        match self {
            Rule::Axisym(r) => r.d(),
            Rule::Sphere(r) => r.d(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Rule::Axisym(r) => r.len(),
            Rule::Sphere(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A positive antipodally-symmetric function on S^{d-1}, represented either
/// as an axisymmetric profile or as an ambient even polynomial (density or
/// log-density). Evenness holds by construction of every representation.
#[derive(Debug, Clone)]
pub struct SymmetricPositiveFunction {
    repr: Representation,
    descriptor: FamilyDescriptor,
}

#[derive(Debug, Clone)]
pub enum Representation {
    Axisymmetric(AxisymmetricProfile),
    AmbientPoly(EvenPolynomialFunction),
}

impl SymmetricPositiveFunction {
    /// Wraps a profile that is positive and even by construction (closed
    /// families, reconstructed spectra). Positivity is still re-validated at
    /// every functional evaluation.
    pub fn from_trusted_profile(
        profile: AxisymmetricProfile,
        descriptor: FamilyDescriptor,
    ) -> Self {
        Self {
            repr: Representation::Axisymmetric(profile),
            descriptor,
        }
    }

    /// Wraps an axisymmetric profile, checking the positivity floor against
    /// the rule's nodes.
    pub fn from_profile(
        profile: AxisymmetricProfile,
        descriptor: FamilyDescriptor,
        rule: &Rule,
    ) -> Result<Self> {
        let f = Self {
            repr: Representation::Axisymmetric(profile),
            descriptor,
        };
        f.check_positivity(rule)?;
        Ok(f)
    }

    /// Wraps an even polynomial, checking the positivity floor against the
    /// rule's nodes (density mode; log-density is positive for free).
    pub fn from_even_poly(
        poly: EvenPolynomialFunction,
        descriptor: FamilyDescriptor,
        rule: &Rule,
    ) -> Result<Self> {
        if matches!(rule, Rule::Axisym(_)) {
            // A meridian cannot witness positivity of a non-axisymmetric
            // function.
            return Err(Gamma2Error::InvalidArgument(
                "ambient polynomial functions need a full sphere rule, not a z-rule".into(),
            ));
        }
        let f = Self {
            repr: Representation::AmbientPoly(poly),
            descriptor,
        };
        if let Representation::AmbientPoly(p) = &f.repr {
            if p.mode() == PolyMode::Density {
                f.check_positivity(rule)?;
            }
        }
        Ok(f)
    }

    pub fn d(&self) -> usize {
        match &self.repr {
            Representation::Axisymmetric(p) => p.d(),
            Representation::AmbientPoly(p) => p.d(),
        }
    }

    pub fn descriptor(&self) -> &FamilyDescriptor {
        &self.descriptor
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// Value at a sphere point.
    pub fn value(&self, p: &SpherePoint) -> f64 {
        match &self.repr {
            Representation::Axisymmetric(prof) => prof.phi(p.z()),
            Representation::AmbientPoly(poly) => {
                let mut grad = vec![0.0; poly.d()];
                let mut hess = vec![0.0; poly.d() * poly.d()];
                let v = poly.eval_into(p.sigma().as_slice(), &mut grad, &mut hess);
                match poly.mode() {
                    PolyMode::Density => v,
                    PolyMode::LogDensity => v.exp(),
                }
            }
        }
    }

    /// Value on the meridian (sqrt(1-z²), 0, ..., 0, z).
    pub fn value_at_z(&self, z: f64) -> f64 {
        match &self.repr {
            Representation::Axisymmetric(prof) => prof.phi(z),
            Representation::AmbientPoly(poly) => {
                let d = poly.d();
                let mut x = vec![0.0; d];
                x[0] = (1.0 - z * z).max(0.0).sqrt();
                x[d - 1] = z;
                let mut grad = vec![0.0; d];
                let mut hess = vec![0.0; d * d];
                let v = poly.eval_into(&x, &mut grad, &mut hess);
                match poly.mode() {
                    PolyMode::Density => v,
                    PolyMode::LogDensity => v.exp(),
                }
            }
        }
    }

    /// The scaled function c * f (c > 0); ratios are invariant under this.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Gamma2Error::InvalidArgument(format!(
                "scale factor {c} must be positive and finite"
            )));
        }
        let repr = match &self.repr {
            Representation::Axisymmetric(prof) => Representation::Axisymmetric(prof.scaled(c)),
            Representation::AmbientPoly(poly) => Representation::AmbientPoly(poly.scaled(c)),
        };
        Ok(Self {
            repr,
            descriptor: self.descriptor.clone(),
        })
    }

    fn check_positivity(&self, rule: &Rule) -> Result<()> {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut min_index = 0;
        let mut visit = |i: usize, v: f64| {
            if v < min {
                min = v;
                min_index = i;
            }
            if v > max {
                max = v;
            }
        };
        match rule {
            Rule::Axisym(r) => {
                for (i, &z) in r.nodes().iter().enumerate() {
                    visit(i, self.value_at_z(z));
                }
            }
            Rule::Sphere(r) => {
                for (i, p) in r.points().iter().enumerate() {
                    visit(i, self.value(p));
                }
            }
        }
        let floor = POSITIVITY_FLOOR_REL * max.max(0.0);
        if !(min > 0.0) || min < floor {
            return Err(Gamma2Error::PositivityViolation {
                min,
                index: min_index,
                floor,
            });
        }
        Ok(())
    }
}

/// Weighted pointwise data at one quadrature node. A = lap_s log f and
/// B = |grad_s log f|² are the variables of the Bochner form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NodeData {
    pub(crate) w: f64,
    pub(crate) f: f64,
    pub(crate) grad_f_sq: f64,
    pub(crate) a: f64,
    pub(crate) b: f64,
    pub(crate) hess_log_sq: f64,
    pub(crate) lap_sqrt: f64,
    pub(crate) grad_sqrt_sq: f64,
}

/// All integrals a report needs, each a deterministic pairwise sum.
#[derive(Debug, Clone, Copy)]
struct Sums {
    mass: f64,
    fisher_log: f64,
    fisher_grad: f64,
    fisher_sqrt: f64,
    entropy: f64,
    /// int f log(f/m), the log-Sobolev denominator; algebraically equal to
    /// entropy - m log m but immune to the large-mass cancellation.
    entropy_gap: f64,
    gamma2_direct: f64,
    gamma2_bochner: f64,
    hsq: f64,
    hsq_from_ab: f64,
    /// int (sqrt f - int sqrt f)², the centered variance of sqrt f.
    sqrt_variance: f64,
}

pub(crate) fn evaluate_nodes(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<Vec<NodeData>> {
    if f.d() != rule.d() {
        return Err(Gamma2Error::DimensionMismatch {
            expected: f.d(),
            got: rule.d(),
        });
    }
    let d = f.d();
    let mut nodes = Vec::with_capacity(rule.len());
    match (&f.repr, rule) {
        (Representation::Axisymmetric(prof), Rule::Axisym(r)) => {
            for (i, (&z, &w)) in r.nodes().iter().zip(r.weights()).enumerate() {
                nodes.push(axisym_node(prof, d, i, z, w)?);
            }
        }
        (Representation::Axisymmetric(prof), Rule::Sphere(r)) => {
            for (i, (p, &w)) in r.points().iter().zip(r.weights()).enumerate() {
                nodes.push(axisym_node(prof, d, i, p.z(), w)?);
            }
        }
        (Representation::AmbientPoly(poly), Rule::Sphere(r)) => {
            let mut scratch = AmbientScratch::new(d);
            for (i, (p, &w)) in r.points().iter().zip(r.weights()).enumerate() {
                nodes.push(ambient_node(poly, &mut scratch, i, p, w)?);
            }
        }
        (Representation::AmbientPoly(_), Rule::Axisym(_)) => {
            return Err(Gamma2Error::InvalidArgument(
                "ambient polynomial functions need a full sphere rule, not a z-rule".into(),
            ));
        }
    }
    // Relative positivity floor over the whole node set.
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut min_index = 0;
    for (i, n) in nodes.iter().enumerate() {
        if n.f < min {
            min = n.f;
            min_index = i;
        }
        if n.f > max {
            max = n.f;
        }
    }
    let floor = POSITIVITY_FLOOR_REL * max.max(0.0);
    if min < floor {
        return Err(Gamma2Error::PositivityViolation {
            min,
            index: min_index,
            floor,
        });
    }
    Ok(nodes)
}

fn axisym_node(
    prof: &AxisymmetricProfile,
    d: usize,
    index: usize,
    z: f64,
    w: f64,
) -> Result<NodeData> {
    let (phi, dphi, ddphi) = prof.eval(z);
    if !(phi > 0.0) || !phi.is_finite() {
        return Err(Gamma2Error::PositivityViolation {
            min: phi,
            index,
            floor: 0.0,
        });
    }
    let grad_f_sq = (1.0 - z * z) * dphi * dphi;
    // log f profile: u' = phi'/phi, u'' = phi''/phi - (phi'/phi)².
    let u1 = dphi / phi;
    let u2 = ddphi / phi - u1 * u1;
    let (b, a, hess_log_sq) = axi_reduce(d, z, u1, u2);
    // sqrt f profile: psi' = phi'/(2 psi), psi'' = (phi'' - phi'²/(2 phi))/(2 psi).
    let psi = phi.sqrt();
    let p1 = dphi / (2.0 * psi);
    let p2 = (ddphi - dphi * dphi / (2.0 * phi)) / (2.0 * psi);
    let (grad_sqrt_sq, lap_sqrt, _) = axi_reduce(d, z, p1, p2);
    Ok(NodeData {
        w,
        f: phi,
        grad_f_sq,
        a,
        b,
        hess_log_sq,
        lap_sqrt,
        grad_sqrt_sq,
    })
}

struct AmbientScratch {
    grad: Vec<f64>,
    hess: Vec<f64>,
    hsig: Vec<f64>,
}

impl AmbientScratch {
    fn new(d: usize) -> Self {
        Self {
            grad: vec![0.0; d],
            hess: vec![0.0; d * d],
            hsig: vec![0.0; d],
        }
    }
}

/// Ambient scalars of a function with gradient g and Hessian H at sigma:
/// r = sigma.g, g2 = |g|², u = H sigma (u2 = |u|², s = sigma.u), tr = tr H,
/// h2 = ||H||², ghg = g^T H g. Tangential quantities follow as
///   grad_sq = g2 - r², lap = tr - s - (d-1) r,
///   hess_sq = h2 - 2 u2 + s² - 2 r (tr - s) + r² (d-1).
fn tangential_from_scalars(
    d: f64,
    r: f64,
    g2: f64,
    u2: f64,
    s: f64,
    tr: f64,
    h2: f64,
) -> (f64, f64, f64) {
    let grad_sq = g2 - r * r;
    let lap = tr - s - (d - 1.0) * r;
    let hess_sq = h2 - 2.0 * u2 + s * s - 2.0 * r * (tr - s) + r * r * (d - 1.0);
    (grad_sq, lap, hess_sq)
}

fn ambient_node(
    poly: &EvenPolynomialFunction,
    scratch: &mut AmbientScratch,
    index: usize,
    p: &SpherePoint,
    w: f64,
) -> Result<NodeData> {
    let d = poly.d();
    let df = d as f64;
    let sigma = p.sigma().as_slice();
    let pv = poly.eval_into(sigma, &mut scratch.grad, &mut scratch.hess);
    let g = &scratch.grad;
    let hess = &scratch.hess;

    let mut r = 0.0;
    let mut g2 = 0.0;
    for i in 0..d {
        r += sigma[i] * g[i];
        g2 += g[i] * g[i];
    }
    let mut tr = 0.0;
    let mut h2 = 0.0;
    let mut ghg = 0.0;
    for i in 0..d {
        let row = &hess[i * d..(i + 1) * d];
        tr += row[i];
        let mut hs = 0.0;
        let mut hg = 0.0;
        for j in 0..d {
            let v = row[j];
            h2 += v * v;
            hs += v * sigma[j];
            hg += v * g[j];
        }
        scratch.hsig[i] = hs;
        ghg += g[i] * hg;
    }
    let mut u2 = 0.0;
    let mut s = 0.0;
    let mut gu = 0.0;
    for i in 0..d {
        u2 += scratch.hsig[i] * scratch.hsig[i];
        s += sigma[i] * scratch.hsig[i];
        gu += g[i] * scratch.hsig[i];
    }

    match poly.mode() {
        PolyMode::Density => {
            let f = pv;
            if !(f > 0.0) || !f.is_finite() {
                return Err(Gamma2Error::PositivityViolation {
                    min: f,
                    index,
                    floor: 0.0,
                });
            }
            let (grad_f_sq, _, _) = tangential_from_scalars(df, r, g2, u2, s, tr, h2);
            // log f ambient derivatives by the chain rule:
            // grad = g/f, hess = H/f - g g^T / f².
            let r_l = r / f;
            let g2_l = g2 / (f * f);
            let s_l = s / f - r * r / (f * f);
            let tr_l = tr / f - g2 / (f * f);
            let u2_l = u2 / (f * f) - 2.0 * r * gu / (f * f * f)
                + r * r * g2 / (f * f * f * f);
            let h2_l = h2 / (f * f) - 2.0 * ghg / (f * f * f) + g2 * g2 / (f * f * f * f);
            let (b, a, hess_log_sq) = tangential_from_scalars(df, r_l, g2_l, u2_l, s_l, tr_l, h2_l);
            // sqrt f: grad = g/(2 sqrt f), hess = H/(2 sqrt f) - g g^T/(4 f^{3/2}).
            let wrt = f.sqrt();
            let r_s = r / (2.0 * wrt);
            let s_s = s / (2.0 * wrt) - r * r / (4.0 * f * wrt);
            let tr_s = tr / (2.0 * wrt) - g2 / (4.0 * f * wrt);
            let lap_sqrt = tr_s - s_s - (df - 1.0) * r_s;
            let grad_sqrt_sq = (g2 - r * r) / (4.0 * f);
            Ok(NodeData {
                w,
                f,
                grad_f_sq,
                a,
                b,
                hess_log_sq,
                lap_sqrt,
                grad_sqrt_sq,
            })
        }
        PolyMode::LogDensity => {
            // The polynomial is log f itself: its tangential data is exact.
            let (b, a, hess_log_sq) = tangential_from_scalars(df, r, g2, u2, s, tr, h2);
            let f = pv.exp();
            if !f.is_finite() {
                return Err(Gamma2Error::PositivityViolation {
                    min: f,
                    index,
                    floor: 0.0,
                });
            }
            let grad_f_sq = f * f * b;
            // sqrt f = exp(p/2): grad = sqrt(f) g/2, hess = sqrt(f)(H/2 + g g^T/4).
            let wrt = f.sqrt();
            let r_s = wrt * r / 2.0;
            let s_s = wrt * (s / 2.0 + r * r / 4.0);
            let tr_s = wrt * (tr / 2.0 + g2 / 4.0);
            let lap_sqrt = tr_s - s_s - (df - 1.0) * r_s;
            let grad_sqrt_sq = f * b / 4.0;
            Ok(NodeData {
                w,
                f,
                grad_f_sq,
                a,
                b,
                hess_log_sq,
                lap_sqrt,
                grad_sqrt_sq,
            })
        }
    }
}

fn accumulate(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<Sums> {
    let nodes = evaluate_nodes(f, rule)?;
    let df = f.d() as f64;
    let n = nodes.len();
    let mut buf = vec![0.0; n];
    let fill = |get: &dyn Fn(&NodeData) -> f64, buf: &mut Vec<f64>| {
        for (slot, node) in buf.iter_mut().zip(&nodes) {
            *slot = node.w * get(node);
        }
        pairwise_sum(buf)
    };
    let mass = fill(&|n| n.f, &mut buf);
    let sqrt_mean = fill(&|n| n.f.sqrt(), &mut buf);
    let fisher_log = fill(&|n| n.f * n.b, &mut buf);
    let fisher_grad = fill(&|n| n.grad_f_sq / n.f, &mut buf);
    let fisher_sqrt = fill(&|n| 4.0 * n.grad_sqrt_sq, &mut buf);
    let entropy = fill(&|n| n.f * n.f.ln(), &mut buf);
    // The gap int f log(f/m) is computed as int [f log(f/m) - f + m]
    // = m sum w [(1+u) ln_1p(u) - u] with u = (f-m)/m. The integrand is
    // pointwise nonnegative (no sign cancellation across nodes) and the
    // expression is stationary in m, so the mass's own rounding enters only
    // quadratically; the naive h - m log m loses the gap entirely for
    // near-constant functions of large mass.
    let entropy_gap = fill(
        &|n| {
            let u = (n.f - mass) / mass;
            mass * ((1.0 + u) * u.ln_1p() - u)
        },
        &mut buf,
    );
    let gamma2_direct = fill(&|n| n.f * (n.hess_log_sq + (df - 2.0) * n.b), &mut buf);
    let gamma2_bochner = fill(&|n| n.f * (n.a + n.b) * (n.a + 0.5 * n.b), &mut buf);
    let hsq = fill(&|n| n.lap_sqrt * n.lap_sqrt, &mut buf);
    let hsq_from_ab = fill(&|n| 0.25 * n.f * (n.a + 0.5 * n.b).powi(2), &mut buf);
    let sqrt_variance = fill(&|n| (n.f.sqrt() - sqrt_mean).powi(2), &mut buf);
    Ok(Sums {
        mass,
        fisher_log,
        fisher_grad,
        fisher_sqrt,
        entropy,
        entropy_gap,
        gamma2_direct,
        gamma2_bochner,
        hsq,
        hsq_from_ab,
        sqrt_variance,
    })
}

impl Sums {
    /// Cross-form consistency: the Fisher forms are pointwise identities and
    /// must agree to rounding; the two Gamma_2 forms agree only through
    /// integration by parts, so their disagreement flags an unresolved
    /// quadrature.
    fn check_forms(&self) -> Result<()> {
        let fisher_scale = self.fisher_log.abs().max(1e-30);
        for (other, name) in [
            (self.fisher_grad, "fisher |grad f|²/f vs f|grad log f|²"),
            (self.fisher_sqrt, "fisher 4|grad sqrt f|² vs f|grad log f|²"),
        ] {
            if (other - self.fisher_log).abs() > FISHER_FORM_TOL * fisher_scale {
                return Err(Gamma2Error::NumericalConsistency {
                    context: name,
                    lhs: self.fisher_log,
                    rhs: other,
                    tolerance: FISHER_FORM_TOL,
                });
            }
        }
        let g2_tol = GAMMA2_FORM_TOL * self.gamma2_direct.abs().max(1.0);
        if (self.gamma2_direct - self.gamma2_bochner).abs() > g2_tol {
            return Err(Gamma2Error::NumericalConsistency {
                context: "gamma2 direct vs Bochner form",
                lhs: self.gamma2_direct,
                rhs: self.gamma2_bochner,
                tolerance: GAMMA2_FORM_TOL,
            });
        }
        let hsq_tol = HSQ_FORM_TOL * self.hsq.abs().max(1.0);
        if (self.hsq - self.hsq_from_ab).abs() > hsq_tol {
            return Err(Gamma2Error::NumericalConsistency {
                context: "int (lap sqrt f)² vs (1/4) int f (A + B/2)²",
                lhs: self.hsq,
                rhs: self.hsq_from_ab,
                tolerance: HSQ_FORM_TOL,
            });
        }
        Ok(())
    }

    fn gamma2_ratio(&self) -> Result<f64> {
        if self.fisher_log <= FISHER_FLOOR {
            return Err(Gamma2Error::UndefinedRatio(format!(
                "Fisher information {:.3e} is below {FISHER_FLOOR:.0e} (constant function)",
                self.fisher_log
            )));
        }
        Ok(self.gamma2_direct / self.fisher_log)
    }

    fn log_sobolev_ratio(&self) -> Result<f64> {
        // The gap int f log(f/m) equals h(f) - m log m; the centered form
        // survives masses large enough that the naive difference cancels.
        let denom = 2.0 * self.entropy_gap;
        if denom <= DENOMINATOR_FLOOR {
            return Err(Gamma2Error::UndefinedRatio(format!(
                "entropy gap {denom:.3e} is below {DENOMINATOR_FLOOR:.0e} (constant function)"
            )));
        }
        Ok(self.fisher_log / denom)
    }

    fn poincare_ratio_sqrtf(&self) -> Result<f64> {
        // int f - (int sqrt f)² as the centered variance of sqrt f.
        let denom = self.sqrt_variance;
        if denom <= DENOMINATOR_FLOOR {
            return Err(Gamma2Error::UndefinedRatio(format!(
                "variance of sqrt f {denom:.3e} is below {DENOMINATOR_FLOOR:.0e} (constant function)"
            )));
        }
        Ok(0.25 * self.fisher_sqrt / denom)
    }
}

/// The three equal expressions of the Fisher information:
/// (int f |grad log f|², int |grad f|²/f, 4 int |grad sqrt f|²).
///
/// The first is the canonical value; the pair must agree to 1e-10 relative.
pub fn fisher_information(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<(f64, f64, f64)> {
    let sums = accumulate(f, rule)?;
    let fisher_scale = sums.fisher_log.abs().max(1e-30);
    for other in [sums.fisher_grad, sums.fisher_sqrt] {
        if (other - sums.fisher_log).abs() > FISHER_FORM_TOL * fisher_scale {
            return Err(Gamma2Error::NumericalConsistency {
                context: "fisher information forms",
                lhs: sums.fisher_log,
                rhs: other,
                tolerance: FISHER_FORM_TOL,
            });
        }
    }
    Ok((sums.fisher_log, sums.fisher_grad, sums.fisher_sqrt))
}

/// Entropy int f log f dsigma (no normalization applied).
pub fn entropy(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<f64> {
    Ok(accumulate(f, rule)?.entropy)
}

/// Mass int f dsigma.
pub fn mass(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<f64> {
    Ok(accumulate(f, rule)?.mass)
}

/// The Gamma_2 functional in its two forms:
/// (int f (||grad² log f||² + (d-2)|grad log f|²), int f (A+B)(A+B/2)),
/// both from the same derivative evaluations.
pub fn gamma2_functional(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<(f64, f64)> {
    let sums = accumulate(f, rule)?;
    Ok((sums.gamma2_direct, sums.gamma2_bochner))
}

/// gamma2_direct / fisher; certifies an upper bound for the Gamma_2 constant.
/// Fails on constant functions and on unresolved quadrature (form mismatch).
pub fn gamma2_ratio(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<f64> {
    let sums = accumulate(f, rule)?;
    sums.check_forms()?;
    sums.gamma2_ratio()
}

/// i(f) / (2 [h(f) - m log m]); certifies an upper bound for the log-Sobolev
/// constant of the symmetric class.
pub fn log_sobolev_ratio(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<f64> {
    let sums = accumulate(f, rule)?;
    sums.check_forms()?;
    sums.log_sobolev_ratio()
}

/// Rayleigh quotient int |grad_s g|² / (int g² - (int g)²) for an
/// axisymmetric g; for g in the span of degree-k harmonics it returns the
/// eigenvalue k(d+k-2).
pub fn poincare_ratio(g: &AxisymmetricProfile, rule: &ZQuadrature) -> Result<f64> {
    if g.d() != rule.d() {
        return Err(Gamma2Error::DimensionMismatch {
            expected: g.d(),
            got: rule.d(),
        });
    }
    let num = rule.integrate(|z| (1.0 - z * z) * g.dphi(z).powi(2))?;
    let mean = rule.integrate(|z| g.phi(z))?;
    let second = rule.integrate(|z| g.phi(z).powi(2))?;
    // Centered variance (equal to int g² - (int g)², without the cancellation
    // that form suffers for large nearly-constant g).
    let denom = rule.integrate(|z| (g.phi(z) - mean).powi(2))?;
    if denom <= DENOMINATOR_FLOOR * second.abs().max(1.0) {
        return Err(Gamma2Error::UndefinedRatio(format!(
            "variance {denom:.3e} vanishes (constant function)"
        )));
    }
    Ok(num / denom)
}

/// Evaluated functionals and derived ratios for one function. Serializes to a
/// flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub mass: f64,
    pub fisher: f64,
    pub entropy: f64,
    pub gamma2_direct: f64,
    pub gamma2_bochner: f64,
    pub hsq: f64,
    pub gamma2_ratio: f64,
    pub log_sobolev_ratio: f64,
    pub poincare_ratio_sqrtf: f64,
}

impl FunctionalReport {
    /// Full evaluation. Errors on constant functions (undefined ratios), on
    /// positivity violations, and on cross-form disagreement beyond the
    /// declared tolerances.
    pub fn evaluate(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<Self> {
        let sums = accumulate(f, rule)?;
        sums.check_forms()?;
        if !(sums.mass > 0.0) {
            return Err(Gamma2Error::InvalidArgument(format!(
                "mass {} must be positive",
                sums.mass
            )));
        }
        Ok(Self {
            mass: sums.mass,
            fisher: sums.fisher_log,
            entropy: sums.entropy,
            gamma2_direct: sums.gamma2_direct,
            gamma2_bochner: sums.gamma2_bochner,
            hsq: sums.hsq,
            gamma2_ratio: sums.gamma2_ratio()?,
            log_sobolev_ratio: sums.log_sobolev_ratio()?,
            poincare_ratio_sqrtf: sums.poincare_ratio_sqrtf()?,
        })
    }
}

/// Mass, entropy, Fisher information and Gamma_2 (direct form) in one pass,
/// defined for constants as well (used by heat-flow traces).
pub fn flow_observables(f: &SymmetricPositiveFunction, rule: &Rule) -> Result<(f64, f64, f64, f64)> {
    let sums = accumulate(f, rule)?;
    sums.check_forms()?;
    Ok((sums.mass, sums.entropy, sums.fisher_log, sums.gamma2_direct))
}
