//! Norm engine for the Zygmund scale: the strong norm `L^q(log L)^α`, the
//! cumulative weak norm `𝔏^{q,∞}(log 𝔏)^α`, the standard weak norm
//! `L^{q,∞}(log L)^α`, their maximal-average (primed) equivalents, and the
//! uniformly local versions taken over balls of a fixed radius.
//!
//! Everything is computed from exact step profiles. Integrals of the
//! log weight are adaptive with a log substitution near `s = 0`; suprema are
//! taken over all breakpoints plus a log-spaced refinement per step, so every
//! sup-type value is a certified lower bound within the sampling resolution.

use crate::error::{Error, Result};
use crate::gridfn::{restrict_to_ball, GridFunction};
use crate::quad::{adaptive_simpson, int_phi_pow, integrate_to_zero};
use crate::rearrange::{rearrangement, StepProfile};
use std::sync::OnceLock;

/// `Φ(s) = log(e + s)`; `Φ(0) = 1` exactly.
pub fn phi(s: f64) -> f64 {
    (std::f64::consts::E + s).ln()
}

/// Doubling constant of the log weight: `sup_u Φ(2u)/Φ(u)`.
pub fn phi_doubling_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let mut best = 1.0f64;
        let mut u = 1e-8;
        while u < 1e8 {
            best = best.max(phi(2.0 * u) / phi(u));
            u *= 1.001;
        }
        best
    })
}

/// Which norm of the scale to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// `(∫ Φ(s⁻¹)^α f*(s)^q ds)^{1/q}`
    Strong,
    /// `sup_s {Φ(s⁻¹)^α ∫_0^s (f*)^q}^{1/q}`
    Frak,
    /// `sup_s {s Φ(s⁻¹)^α f*(s)^q}^{1/q}`
    Weak,
    /// strong norm with `f**` in place of `f*` (needs q > 1)
    StrongPrimed,
    /// weak norm with `f**` in place of `f*` (needs q > 1)
    WeakPrimed,
}

/// A fully specified norm: exponent, log exponent, flavor, locality radius.
#[derive(Debug, Clone, Copy)]
pub struct NormSpec {
    pub q: f64,
    pub alpha: f64,
    pub flavor: Flavor,
    /// ball radius for the uniformly local norm; `f64::INFINITY` = global
    pub rho: f64,
}

impl NormSpec {
    pub fn new(q: f64, alpha: f64, flavor: Flavor, rho: f64) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(Error::InvalidNormSpec(format!("q must be >= 1, got {q}")));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidNormSpec(format!("alpha must be >= 0, got {alpha}")));
        }
        if !(rho > 0.0) {
            return Err(Error::InvalidNormSpec(format!("rho must be positive, got {rho}")));
        }
        if matches!(flavor, Flavor::StrongPrimed | Flavor::WeakPrimed) && q.is_finite() && q <= 1.0
        {
            return Err(Error::InvalidNormSpec("primed flavors require q > 1".into()));
        }
        Ok(Self { q, alpha, flavor, rho })
    }

    pub fn global(q: f64, alpha: f64, flavor: Flavor) -> Result<Self> {
        Self::new(q, alpha, flavor, f64::INFINITY)
    }
}

/// Where to place the ball centers of a uniformly local norm.
///
/// Every choice yields a certified lower bound on the true supremum over all
/// centers; the lattice default follows the subsampling of the grid.
#[derive(Debug, Clone)]
pub enum CenterPolicy {
    /// every `stride`-th grid point per axis
    Lattice { stride: usize },
    /// the origin only — exact for radially non-increasing data
    Origin,
    /// explicit list of centers
    Explicit(Vec<[f64; 3]>),
}

impl Default for CenterPolicy {
    fn default() -> Self {
        CenterPolicy::Lattice { stride: 4 }
    }
}

fn candidate_points(p: &StepProfile) -> Vec<(f64, usize)> {
    // (s, step index whose value applies on [s_{i-1}, s_i))
    let k = p.steps();
    if k == 0 {
        return Vec::new();
    }
    let interior = if k <= 512 { 64 } else { 4 };
    let mut out = Vec::with_capacity(k * (interior + 1) + 1);
    let mut lo = 0.0f64;
    for (i, &hi) in p.cuts().iter().enumerate() {
        let lo_eff = if lo > 0.0 { lo } else { hi * 1e-12 };
        let ratio = hi / lo_eff;
        if ratio > 1.0 + 1e-13 {
            let step = ratio.powf(1.0 / (interior as f64 + 1.0));
            let mut s = lo_eff;
            for _ in 0..interior {
                s *= step;
                out.push((s, i));
            }
        }
        out.push((hi, i));
        if lo > 0.0 {
            out.push((lo, i));
        }
        lo = hi;
    }
    out
}

/// Norm of a step profile (global flavors only).
pub fn norm_profile(p: &StepProfile, q: f64, alpha: f64, flavor: Flavor) -> f64 {
    if q.is_infinite() {
        return p.sup_value();
    }
    match flavor {
        Flavor::Strong => {
            let mut acc = 0.0;
            let mut lo = 0.0;
            for (hi, v) in p.cuts().iter().zip(p.values()) {
                acc += v.powf(q) * int_phi_pow(lo, *hi, alpha, 1e-10);
                lo = *hi;
            }
            acc.powf(1.0 / q)
        }
        Flavor::Frak => {
            // Φ(1/s)^α · ∫_0^s (f*)^q, with the prefix integral exact
            let pq = p.powered(q);
            let mut best = 0.0f64;
            for (s, _) in candidate_points(p) {
                let val = phi(1.0 / s).powf(alpha) * pq.prefix_integral(s);
                best = best.max(val);
            }
            best.powf(1.0 / q)
        }
        Flavor::Weak => {
            let mut best = 0.0f64;
            for (s, i) in candidate_points(p) {
                let v = p.values()[i];
                best = best.max(s * phi(1.0 / s).powf(alpha) * v.powf(q));
            }
            best.powf(1.0 / q)
        }
        Flavor::WeakPrimed => {
            let mut best = 0.0f64;
            for (s, _) in candidate_points(p) {
                let fss = p.prefix_integral(s) / s;
                best = best.max(s * phi(1.0 / s).powf(alpha) * fss.powf(q));
            }
            best.powf(1.0 / q)
        }
        Flavor::StrongPrimed => {
            let k = p.steps();
            if k == 0 {
                return 0.0;
            }
            let cuts = p.cuts();
            let values = p.values();
            // first interval: f** = v_1 exactly
            let mut acc = values[0].powf(q) * int_phi_pow(0.0, cuts[0], alpha, 1e-10);
            let mut lo = cuts[0];
            for i in 1..k {
                let hi = cuts[i];
                let base = p.prefix_integral(lo);
                let v = values[i];
                let g = |s: f64| {
                    let fss = (base + v * (s - lo)) / s;
                    phi(1.0 / s).powf(alpha) * fss.powf(q)
                };
                acc += adaptive_simpson(&g, lo, hi, 1e-10);
                lo = hi;
            }
            // tail: f**(s) = P_K / s for s >= s_K, via w = 1/s
            let p_total = p.total_integral();
            if p_total > 0.0 {
                let w_hi = 1.0 / lo;
                let g = |w: f64| phi(w).powf(alpha) * p_total.powf(q) * w.powf(q - 2.0);
                acc += integrate_to_zero(&g, w_hi, 1e-10);
            }
            acc.powf(1.0 / q)
        }
    }
}

/// Sup of `Φ(1/s)^α ∫_0^s (f*)^q` restricted to a window of `s` (not taken
/// to the 1/q power). Used by membership checks near the singular end.
pub fn frak_sup_on_window(p: &StepProfile, q: f64, alpha: f64, window: (f64, f64)) -> f64 {
    let pq = p.powered(q);
    let (a, b) = window;
    let eval = |s: f64| phi(1.0 / s).powf(alpha) * pq.prefix_integral(s);
    let mut best = eval(a).max(eval(b));
    for (s, _) in candidate_points(p) {
        if s >= a && s <= b {
            best = best.max(eval(s));
        }
    }
    // log-spaced fill across the window itself
    let n = 256;
    let step = (b / a).powf(1.0 / n as f64);
    let mut s = a;
    for _ in 0..n {
        s *= step;
        best = best.max(eval(s.min(b)));
    }
    best
}

/// Sup of `{s Φ(1/s)^α f*(s)^q}^{1/q}` restricted to a window of `s`.
pub fn weak_sup_on_window(p: &StepProfile, q: f64, alpha: f64, window: (f64, f64)) -> f64 {
    let (a, b) = window;
    let eval = |s: f64| s * phi(1.0 / s).powf(alpha) * p.eval(s).powf(q);
    let mut best = eval(a);
    for (s, i) in candidate_points(p) {
        if s > a && s <= b {
            let v = p.values()[i];
            best = best.max(s * phi(1.0 / s).powf(alpha) * v.powf(q));
        }
    }
    let n = 256;
    let step = (b / a).powf(1.0 / n as f64);
    let mut s = a;
    for _ in 0..n {
        s *= step;
        best = best.max(eval(s.min(b)));
    }
    best.powf(1.0 / q)
}

/// Centers used for a uniformly local norm on a given grid.
pub fn centers_for(f: &GridFunction, policy: &CenterPolicy) -> Vec<[f64; 3]> {
    let spec = f.spec();
    match policy {
        CenterPolicy::Origin => vec![[0.0; 3]],
        CenterPolicy::Explicit(v) => v.clone(),
        CenterPolicy::Lattice { stride } => {
            let stride = (*stride).max(1);
            let m = spec.points_per_axis();
            let per_axis: Vec<f64> = (0..m).step_by(stride).map(|j| spec.axis_center(j)).collect();
            let mut out = Vec::new();
            match spec.dim() {
                1 => {
                    for &x in &per_axis {
                        out.push([x, 0.0, 0.0]);
                    }
                }
                2 => {
                    for &y in &per_axis {
                        for &x in &per_axis {
                            out.push([x, y, 0.0]);
                        }
                    }
                }
                _ => {
                    for &z in &per_axis {
                        for &y in &per_axis {
                            for &x in &per_axis {
                                out.push([x, y, z]);
                            }
                        }
                    }
                }
            }
            out
        }
    }
}

/// Norm of a grid function under `spec`, with the default center lattice for
/// the uniformly local case.
pub fn norm(f: &GridFunction, spec: &NormSpec) -> Result<f64> {
    norm_with_centers(f, spec, &CenterPolicy::default())
}

/// Norm of a grid function with an explicit center policy for `rho < ∞`.
pub fn norm_with_centers(f: &GridFunction, spec: &NormSpec, policy: &CenterPolicy) -> Result<f64> {
    let g = f.spec();
    let covering = g.half_width() * (g.dim() as f64).sqrt();
    if spec.rho.is_infinite() || spec.rho >= covering {
        let p = rearrangement(f);
        return Ok(norm_profile(&p, spec.q, spec.alpha, spec.flavor));
    }
    let mut best = 0.0f64;
    for c in centers_for(f, policy) {
        let cut = restrict_to_ball(f, &c[..g.dim()], spec.rho);
        let p = rearrangement(&cut);
        best = best.max(norm_profile(&p, spec.q, spec.alpha, spec.flavor));
    }
    Ok(best)
}

/// The three global norms of one function; the chain
/// `strong ≥ frak ≥ weak` is their structural ordering.
#[derive(Debug, Clone, Copy)]
pub struct OrderingReport {
    pub strong: f64,
    pub frak: f64,
    pub weak: f64,
}

impl OrderingReport {
    pub fn ordered(&self, slack: f64) -> bool {
        self.strong >= self.frak * (1.0 - slack) && self.frak >= self.weak * (1.0 - slack)
    }
}

pub fn norm_ordering_report_profile(p: &StepProfile, q: f64, alpha: f64) -> OrderingReport {
    OrderingReport {
        strong: norm_profile(p, q, alpha, Flavor::Strong),
        frak: norm_profile(p, q, alpha, Flavor::Frak),
        weak: norm_profile(p, q, alpha, Flavor::Weak),
    }
}

pub fn norm_ordering_report(f: &GridFunction, q: f64, alpha: f64) -> OrderingReport {
    norm_ordering_report_profile(&rearrangement(f), q, alpha)
}

/// Result of the weak-norm product inequality check.
#[derive(Debug, Clone, Copy)]
pub struct ProductReport {
    pub lhs: f64,
    pub rhs_factor: f64,
    /// the explicit constant `2^{1/q} · c_Φ`
    pub constant: f64,
    pub holds: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn product_norm_check(
    f: &GridFunction,
    g: &GridFunction,
    q: f64,
    q1: f64,
    q2: f64,
    alpha: f64,
    alpha1: f64,
    alpha2: f64,
    rho: f64,
    policy: &CenterPolicy,
) -> Result<ProductReport> {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    if (inv(q) - inv(q1) - inv(q2)).abs() > 1e-12 {
        return Err(Error::InvalidParameter("1/q = 1/q1 + 1/q2 violated".into()));
    }
    let term = |a: f64, qq: f64| if qq.is_infinite() { 0.0 } else { a / qq };
    if (term(alpha, q) - term(alpha1, q1) - term(alpha2, q2)).abs() > 1e-12 {
        return Err(Error::InvalidParameter("alpha/q = alpha1/q1 + alpha2/q2 violated".into()));
    }
    if f.spec() != g.spec() {
        return Err(Error::GridMismatch("product check needs one common grid".into()));
    }
    let prod = {
        let values: Vec<f64> =
            f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect();
        GridFunction::new(*f.spec(), values)?
    };
    let lhs = norm_with_centers(&prod, &NormSpec::new(q, alpha, Flavor::Weak, rho)?, policy)?;
    let nf = norm_with_centers(f, &NormSpec::new(q1, alpha1, Flavor::Weak, rho)?, policy)?;
    let ng = norm_with_centers(g, &NormSpec::new(q2, alpha2, Flavor::Weak, rho)?, policy)?;
    let constant = 2.0f64.powf(inv(q)) * phi_doubling_constant();
    let rhs_factor = nf * ng;
    Ok(ProductReport {
        lhs,
        rhs_factor,
        constant,
        holds: lhs <= constant * rhs_factor * (1.0 + 1e-9),
    })
}

/// Result of the power identity `‖|f|^r‖_{q,α;ρ} = ‖f‖_{rq,α;ρ}^r`.
#[derive(Debug, Clone, Copy)]
pub struct PowerIdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

pub fn power_identity_check(
    f: &GridFunction,
    r: f64,
    q: f64,
    alpha: f64,
    rho: f64,
    policy: &CenterPolicy,
) -> Result<PowerIdentityReport> {
    if !(r > 0.0) || r * q < 1.0 - 1e-14 {
        return Err(Error::InvalidParameter(format!("need rq >= 1, got r={r}, q={q}")));
    }
    let powered = f.map(|v| v.abs().powf(r));
    let lhs = norm_with_centers(&powered, &NormSpec::new(q, alpha, Flavor::Weak, rho)?, policy)?;
    let rhs = norm_with_centers(f, &NormSpec::new(r * q, alpha, Flavor::Weak, rho)?, policy)?
        .powf(r);
    let rel_err = (lhs - rhs).abs() / rhs.abs().max(1e-300);
    Ok(PowerIdentityReport { lhs, rhs, rel_err })
}

/// Result of the log-exponent downgrade inequality
/// `|||f|||_{1,α;ρ} ≤ C Φ(ρ⁻¹)^{α-β} |||f|||_{1,β;ρ}` for `α ≤ β`.
#[derive(Debug, Clone, Copy)]
pub struct LogDowngradeReport {
    pub lhs: f64,
    pub rhs: f64,
    pub phi_factor: f64,
    pub fitted_c: f64,
}

pub fn log_downgrade_check(
    f: &GridFunction,
    alpha: f64,
    beta: f64,
    rho: f64,
    policy: &CenterPolicy,
) -> Result<LogDowngradeReport> {
    if !(0.0 <= alpha && alpha <= beta) {
        return Err(Error::InvalidParameter(format!("need 0 <= alpha <= beta, got {alpha}, {beta}")));
    }
    if !rho.is_finite() {
        return Err(Error::InvalidParameter("log downgrade check needs finite rho".into()));
    }
    let lhs = norm_with_centers(f, &NormSpec::new(1.0, alpha, Flavor::Frak, rho)?, policy)?;
    let rhs = norm_with_centers(f, &NormSpec::new(1.0, beta, Flavor::Frak, rho)?, policy)?;
    let phi_factor = phi(1.0 / rho).powf(alpha - beta);
    let fitted_c = lhs / (phi_factor * rhs).max(1e-300);
    Ok(LogDowngradeReport { lhs, rhs, phi_factor, fitted_c })
}
