//! Duhamel integrals and the Picard fixed-point machinery: the integral
//! source `∫_0^t S(s)µ ds`, the iteration `u ↦ source + ∫_0^t S(t-s)F_p(u)`,
//! contraction-ratio measurement, and blow-up threshold bisection in the
//! forcing amplitude.
//!
//! The iteration metric is the maximal-average weak norm over balls of
//! radius `T^{1/θ}`: exponents `(p, pγ)` in the critical regime and
//! `(p r_*, 0)` in the supercritical one. For radially non-increasing data
//! the ball at the origin attains the supremum over centers, so the metric
//! defaults to the origin-centered ball.

use crate::error::{Error, Result};
use crate::gridfn::{GridFunction, GridSpec};
use crate::quad::graded_edges;
use crate::semigroup::{leakage_estimate, Propagator};
use crate::zygmund::{norm_with_centers, CenterPolicy, Flavor, NormSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Critical (`p = N/(N-θ)`) or supercritical (`p > N/(N-θ)`) setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Critical,
    Supercritical,
}

/// Everything one Picard run needs besides the forcing itself.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub theta: f64,
    pub p: f64,
    /// time horizon `T`
    pub horizon: f64,
    /// number of stored time slices (>= 16)
    pub n_time: usize,
    /// geometric grading of quadrature panels toward both endpoints (>= 1)
    pub grading: f64,
    /// smallness scale used by the contraction probe's ball radius
    pub epsilon: f64,
    pub max_iter: usize,
    /// iteration aborts once the metric norm exceeds this multiple of the
    /// source norm
    pub divergence_cap_factor: f64,
    pub regime: Regime,
    /// kernel-mass leakage tolerance for the time grid
    pub max_leakage: f64,
    /// initial quadrature panels per half interval
    pub panels_init: usize,
    /// refinement cap on panels per half interval
    pub panels_max: usize,
    /// relative refinement target of the nonlinear-term quadrature (the
    /// source integral is always refined to 1e-6)
    pub nl_rel_tol: f64,
    /// ball centers of the uniformly local metric
    pub center_policy: CenterPolicy,
    /// drop `F_p` entirely (linear sanity runs)
    pub include_nonlinearity: bool,
}

impl SolveConfig {
    pub fn new(theta: f64, p: f64, horizon: f64, regime: Regime) -> Result<Self> {
        if !(theta > 0.0 && theta <= 2.0) {
            return Err(Error::InvalidParameter(format!("theta must be in (0,2], got {theta}")));
        }
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!("p must be > 1, got {p}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        Ok(Self {
            theta,
            p,
            horizon,
            n_time: 16,
            grading: 1.4,
            epsilon: 1e-3,
            max_iter: 60,
            divergence_cap_factor: 1e6,
            regime,
            max_leakage: 1e-2,
            panels_init: 12,
            panels_max: 384,
            nl_rel_tol: 1e-4,
            center_policy: CenterPolicy::Origin,
            include_nonlinearity: true,
        })
    }

    /// Admissibility of the time grid alone (what the Duhamel source needs).
    pub fn validate_times(&self, spec: &GridSpec) -> Result<()> {
        if self.n_time < 16 {
            return Err(Error::InvalidParameter("n_time must be at least 16".into()));
        }
        if !(self.grading >= 1.0) {
            return Err(Error::InvalidParameter("grading must be >= 1".into()));
        }
        let radius = 0.5 * spec.half_width();
        let leak = leakage_estimate(spec.dim(), self.theta, self.horizon, radius);
        if leak > self.max_leakage {
            return Err(Error::InadmissibleTime {
                t: self.horizon,
                radius,
                leakage: leak,
                tolerance: self.max_leakage,
            });
        }
        Ok(())
    }

    /// Checks regime consistency against the grid dimension and the time
    /// grid's admissibility.
    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        self.validate_times(spec)?;
        let n = spec.dim() as f64;
        if n <= self.theta {
            return Err(Error::InvalidParameter(format!(
                "need N > theta, got N={n}, theta={}",
                self.theta
            )));
        }
        let p_star = n / (n - self.theta);
        match self.regime {
            Regime::Critical => {
                if (self.p - p_star).abs() > 1e-10 {
                    return Err(Error::InvalidParameter(format!(
                        "critical regime needs p = {p_star}, got {}",
                        self.p
                    )));
                }
            }
            Regime::Supercritical => {
                if self.p <= p_star + 1e-10 {
                    return Err(Error::InvalidParameter(format!(
                        "supercritical regime needs p > {p_star}, got {}",
                        self.p
                    )));
                }
            }
        }
        Ok(())
    }

    /// `γ = (N-θ)/θ`.
    pub fn gamma(&self, dim: usize) -> f64 {
        (dim as f64 - self.theta) / self.theta
    }

    /// `r_* = N(p-1)/(θp)` (supercritical source exponent).
    pub fn r_star(&self, dim: usize) -> f64 {
        dim as f64 * (self.p - 1.0) / (self.theta * self.p)
    }

    /// Metric exponents `(q, α)` of the iteration space.
    pub fn metric_exponents(&self, dim: usize) -> (f64, f64) {
        match self.regime {
            Regime::Critical => (self.p, self.p * self.gamma(dim)),
            Regime::Supercritical => (self.p * self.r_star(dim), 0.0),
        }
    }

    /// Ball radius `T^{1/θ}` of the uniformly local metric.
    pub fn ul_radius(&self) -> f64 {
        self.horizon.powf(1.0 / self.theta)
    }

    /// Graded ascending slice times in `(0, T]`.
    pub fn slice_times(&self) -> Vec<f64> {
        let n = self.n_time;
        if self.grading <= 1.0 + 1e-12 {
            return (1..=n).map(|i| self.horizon * i as f64 / n as f64).collect();
        }
        (0..n)
            .map(|i| self.horizon * self.grading.powi(-((n - 1 - i) as i32)))
            .collect()
    }

    /// Smallness gauge of the forcing: `|||µ|||_{1,γ;T^{1/θ}}` in the
    /// critical regime, `‖µ‖_{r*,0;T^{1/θ}}` in the supercritical one.
    pub fn source_gauge(&self, mu: &GridFunction) -> Result<f64> {
        let dim = mu.spec().dim();
        let (q, alpha, flavor) = match self.regime {
            Regime::Critical => (1.0, self.gamma(dim), Flavor::Frak),
            Regime::Supercritical => (self.r_star(dim), 0.0, Flavor::Weak),
        };
        norm_with_centers(
            mu,
            &NormSpec::new(q, alpha, flavor, self.ul_radius())?,
            &self.center_policy,
        )
    }
}

/// Time slices of a space-time function on the solver's graded time grid.
#[derive(Debug, Clone)]
pub struct SpaceTimeFunction {
    pub times: Vec<f64>,
    pub slices: Vec<GridFunction>,
}

impl SpaceTimeFunction {
    pub fn zeros(spec: GridSpec, times: Vec<f64>) -> Self {
        let slices = times.iter().map(|_| GridFunction::zeros(spec)).collect();
        Self { times, slices }
    }

    /// Linear interpolation in time, with `u(0) = 0`.
    pub fn eval_at(&self, t: f64, spec: GridSpec) -> GridFunction {
        if t <= 0.0 {
            return GridFunction::zeros(spec);
        }
        let i = self.times.partition_point(|&s| s < t);
        if i >= self.times.len() {
            return self.slices.last().unwrap().clone();
        }
        let (t_hi, hi) = (self.times[i], &self.slices[i]);
        if i == 0 {
            return hi.scaled(t / t_hi);
        }
        let (t_lo, lo) = (self.times[i - 1], &self.slices[i - 1]);
        let w = (t - t_lo) / (t_hi - t_lo);
        let values: Vec<f64> = lo
            .values()
            .iter()
            .zip(hi.values())
            .map(|(a, b)| a + w * (b - a))
            .collect();
        GridFunction::new_unchecked(spec, values)
    }

    pub fn is_finite(&self) -> bool {
        self.slices.iter().all(|s| s.is_finite())
    }
}

/// How a Picard run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    Diverged,
    MaxIter,
}

/// Per-iteration record of a Picard run.
#[derive(Debug, Clone)]
pub struct IterationReport {
    /// sup-in-time metric norm of each iterate
    pub sup_norms: Vec<f64>,
    /// `d(u_{k+1}, u_k)` per step
    pub step_distances: Vec<f64>,
    /// consecutive distance ratios, defined from the second step on
    pub ratios: Vec<f64>,
    pub verdict: Verdict,
    /// recorded smallness gauge of the forcing
    pub source_gauge: f64,
    pub final_sup_norm: f64,
    /// `final sup norm / gauge` (the fitted existence-bound constant)
    pub bound_constant: f64,
    /// true when the uniformly local radius exceeded the box and the global
    /// norm was used instead
    pub ul_radius_clamped: bool,
    /// per-slice quadrature convergence of the source integral
    pub source_quadrature_converged: Vec<bool>,
    pub diagnostics: Option<String>,
}

struct Metric {
    spec: NormSpec,
    policy: CenterPolicy,
    clamped: bool,
}

impl Metric {
    fn new(cfg: &SolveConfig, grid: &GridSpec) -> Result<Self> {
        let (q, alpha) = cfg.metric_exponents(grid.dim());
        let covering = grid.half_width() * (grid.dim() as f64).sqrt();
        let rho = cfg.ul_radius();
        let clamped = rho >= covering;
        let spec = NormSpec::new(q, alpha, Flavor::WeakPrimed, if clamped { f64::INFINITY } else { rho })?;
        Ok(Self { spec, policy: cfg.center_policy.clone(), clamped })
    }

    fn eval(&self, f: &GridFunction) -> Result<f64> {
        norm_with_centers(f, &self.spec, &self.policy)
    }

    fn sup_norm(&self, u: &SpaceTimeFunction) -> Result<f64> {
        let mut best = 0.0f64;
        for s in &u.slices {
            best = best.max(self.eval(s)?);
        }
        Ok(best)
    }

    fn distance(&self, a: &SpaceTimeFunction, b: &SpaceTimeFunction) -> Result<f64> {
        let mut best = 0.0f64;
        for (x, y) in a.slices.iter().zip(&b.slices) {
            best = best.max(self.eval(&x.sub(y)?)?);
        }
        Ok(best)
    }
}

fn midpoints(edges: &[f64]) -> Vec<(f64, f64)> {
    edges.windows(2).map(|w| (0.5 * (w[0] + w[1]), w[1] - w[0])).collect()
}

/// Composite graded midpoint quadrature of a grid-function-valued integrand
/// over `(offset, offset + len)`, doubling panels until the slice changes by
/// less than `1e-6` relative (or the cap is hit; the flag records which).
#[allow(clippy::too_many_arguments)]
fn refine_integral(
    spec: GridSpec,
    len: f64,
    offset: f64,
    grading: f64,
    panels_init: usize,
    panels_max: usize,
    rel_tol: f64,
    scale_hint: f64,
    integrand: &mut dyn FnMut(f64) -> GridFunction,
) -> (GridFunction, bool) {
    let mut m = panels_init.max(2);
    let mut prev: Option<GridFunction> = None;
    loop {
        let edges = graded_edges(len, m, grading);
        let mut acc = GridFunction::zeros(spec);
        for (mid, w) in midpoints(&edges) {
            let g = integrand(offset + mid);
            for (a, b) in acc.values_mut().iter_mut().zip(g.values()) {
                *a += w * b;
            }
        }
        if let Some(p) = prev {
            let mut diff = 0.0f64;
            let mut scale = scale_hint;
            for (a, b) in acc.values().iter().zip(p.values()) {
                diff = diff.max((a - b).abs());
                scale = scale.max(a.abs());
            }
            if diff <= rel_tol * scale {
                return (acc, true);
            }
            if 2 * m > panels_max {
                return (acc, false);
            }
        }
        prev = Some(acc);
        m *= 2;
    }
}

/// `t ↦ ∫_0^t S(s)µ ds` on the slice grid, accumulated piecewise so each
/// slice extends the previous one. Returns the slices and a per-slice
/// quadrature-convergence flag.
pub fn duhamel_source(
    prop: &Propagator,
    mu: &GridFunction,
    cfg: &SolveConfig,
) -> Result<(SpaceTimeFunction, Vec<bool>)> {
    let spec = *mu.spec();
    cfg.validate_times(&spec)?;
    let times = cfg.slice_times();
    let mut slices: Vec<GridFunction> = Vec::with_capacity(times.len());
    let mut flags = Vec::with_capacity(times.len());
    let mut acc = GridFunction::zeros(spec);
    let mut t_lo = 0.0f64;
    let mut scale_hint = 0.0f64;
    for &t_hi in &times {
        let mut integrand = |s: f64| prop.apply_unchecked(mu, cfg.theta, s);
        let (piece, ok) = refine_integral(
            spec,
            t_hi - t_lo,
            t_lo,
            cfg.grading,
            cfg.panels_init,
            cfg.panels_max,
            1e-6,
            scale_hint,
            &mut integrand,
        );
        acc = acc.add(&piece)?;
        scale_hint = scale_hint.max(acc.max_abs());
        slices.push(acc.clone());
        flags.push(ok);
        t_lo = t_hi;
    }
    Ok((SpaceTimeFunction { times, slices }, flags))
}

fn f_p(p: f64, v: f64) -> f64 {
    v.abs().powf(p - 1.0) * v
}

/// One application of the Duhamel map
/// `F(u)(t) = source(t) + ∫_0^t S(t-s) F_p(u(s)) ds`.
fn duhamel_map(
    prop: &Propagator,
    cfg: &SolveConfig,
    source: &SpaceTimeFunction,
    u: &SpaceTimeFunction,
) -> Result<SpaceTimeFunction> {
    let spec = *source.slices[0].spec();
    let mut slices = Vec::with_capacity(source.times.len());
    for (i, &t) in source.times.iter().enumerate() {
        if !cfg.include_nonlinearity {
            slices.push(source.slices[i].clone());
            continue;
        }
        let mut integrand = |s: f64| {
            let us = u.eval_at(s, spec);
            let fp = us.map(|v| f_p(cfg.p, v));
            prop.apply_unchecked(&fp, cfg.theta, t - s)
        };
        let (nl, _ok) = refine_integral(
            spec,
            t,
            0.0,
            cfg.grading,
            cfg.panels_init,
            cfg.panels_max,
            cfg.nl_rel_tol,
            source.slices[i].max_abs(),
            &mut integrand,
        );
        slices.push(source.slices[i].add(&nl)?);
    }
    Ok(SpaceTimeFunction { times: source.times.clone(), slices })
}

/// Runs the Picard iteration `u_{k+1} = F(u_k)` from `u_0 = 0`.
pub fn picard_iterate(
    prop: &Propagator,
    mu: &GridFunction,
    cfg: &SolveConfig,
) -> Result<(SpaceTimeFunction, IterationReport)> {
    let spec = *mu.spec();
    cfg.validate(&spec)?;
    let metric = Metric::new(cfg, &spec)?;
    let gauge = cfg.source_gauge(mu)?;
    let (source, src_flags) = duhamel_source(prop, mu, cfg)?;
    let d1 = metric.sup_norm(&source)?;
    let cap = cfg.divergence_cap_factor * d1.max(1e-300);

    let mut report = IterationReport {
        sup_norms: vec![d1],
        step_distances: vec![d1],
        ratios: Vec::new(),
        verdict: Verdict::MaxIter,
        source_gauge: gauge,
        final_sup_norm: d1,
        bound_constant: d1 / gauge.max(1e-300),
        ul_radius_clamped: metric.clamped,
        source_quadrature_converged: src_flags,
        diagnostics: None,
    };
    if d1 == 0.0 {
        report.verdict = Verdict::Converged;
        return Ok((source, report));
    }

    let mut u = source.clone();
    for _k in 1..cfg.max_iter {
        let next = duhamel_map(prop, cfg, &source, &u)?;
        if !next.is_finite() {
            report.verdict = Verdict::Diverged;
            report.diagnostics = Some("non-finite values in iterate".into());
            return Ok((next, report));
        }
        let sup = metric.sup_norm(&next)?;
        let d = metric.distance(&next, &u)?;
        report.sup_norms.push(sup);
        if let Some(&prev) = report.step_distances.last() {
            if prev > 0.0 {
                report.ratios.push(d / prev);
            }
        }
        report.step_distances.push(d);
        report.final_sup_norm = sup;
        report.bound_constant = sup / gauge.max(1e-300);
        u = next;
        if sup > cap {
            report.verdict = Verdict::Diverged;
            return Ok((u, report));
        }
        if d <= 1e-8 * d1 {
            report.verdict = Verdict::Converged;
            return Ok((u, report));
        }
    }
    Ok((u, report))
}

/// Contraction-ratio measurement across an ε-ladder.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    /// `(ε, max ratio over the drawn pairs)`
    pub ladder: Vec<(f64, f64)>,
    pub fitted_exponent: f64,
    pub predicted_exponent: f64,
}

/// Draws random pairs in metric balls of radius `C ε` for ε on a geometric
/// ladder, measures `d(F u, F v)/d(u, v)`, and fits the ε-exponent of the
/// worst ratio (predicted: `p - 1`).
pub fn contraction_probe(
    prop: &Propagator,
    mu: &GridFunction,
    cfg: &SolveConfig,
    n_pairs: usize,
    seed: u64,
) -> Result<ContractionReport> {
    let spec = *mu.spec();
    cfg.validate(&spec)?;
    let metric = Metric::new(cfg, &spec)?;
    let (source, _) = duhamel_source(prop, mu, cfg)?;
    let times = source.times.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let smooth_t = (4.0 * spec.spacing()).powi(2);

    let draw = |rng: &mut ChaCha8Rng, target: f64| -> Result<SpaceTimeFunction> {
        let mut slices = Vec::with_capacity(times.len());
        for _ in &times {
            let noise: Vec<f64> =
                (0..spec.cell_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let raw = GridFunction::new(spec, noise)?;
            slices.push(prop.apply_unchecked(&raw, 2.0, smooth_t));
        }
        let u = SpaceTimeFunction { times: times.clone(), slices };
        let norm = metric.sup_norm(&u)?;
        let k = target / norm.max(1e-300);
        Ok(SpaceTimeFunction {
            times: u.times,
            slices: u.slices.iter().map(|s| s.scaled(k)).collect(),
        })
    };

    let n_rungs = 5;
    let mut ladder = Vec::with_capacity(n_rungs);
    for j in 0..n_rungs {
        let eps = cfg.epsilon * 2.0f64.powi(j as i32);
        let mut worst = 0.0f64;
        for _ in 0..n_pairs {
            let ru = rng.gen_range(0.3..1.0);
            let rv = rng.gen_range(0.3..1.0);
            let u = draw(&mut rng, eps * ru)?;
            let v = draw(&mut rng, eps * rv)?;
            let duv = metric.distance(&u, &v)?;
            if duv <= 0.0 {
                continue;
            }
            let fu = duhamel_map(prop, cfg, &source, &u)?;
            let fv = duhamel_map(prop, cfg, &source, &v)?;
            worst = worst.max(metric.distance(&fu, &fv)? / duv);
        }
        ladder.push((eps, worst));
    }
    let fit = crate::harness::fit::fit_rate(&ladder, false)?;
    Ok(ContractionReport {
        ladder,
        fitted_exponent: fit.power_exponent,
        predicted_exponent: cfg.p - 1.0,
    })
}

/// Bracketing interval for the convergence/divergence crossover in
/// `µ = λ µ_base`, found by verdict bisection.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    /// every `(λ, converged?)` probe made along the way
    pub probes: Vec<(f64, bool)>,
}

/// Bisects the convergence verdict of the Picard iteration in the forcing
/// amplitude. A `MaxIter` verdict counts as the non-convergent side. The
/// initial bracket widens by factors of 4 (up to 6 times each way) if the
/// endpoints do not already disagree.
pub fn threshold_bisect(
    prop: &Propagator,
    mu_base: &GridFunction,
    cfg: &SolveConfig,
    lambda_lo: f64,
    lambda_hi: f64,
) -> Result<ThresholdReport> {
    if !(0.0 < lambda_lo && lambda_lo < lambda_hi) {
        return Err(Error::InvalidParameter("need 0 < lambda_lo < lambda_hi".into()));
    }
    let mut probes: Vec<(f64, bool)> = Vec::new();
    let converged_at = |lambda: f64, probes: &mut Vec<(f64, bool)>| -> Result<bool> {
        let (_, rep) = picard_iterate(prop, &mu_base.scaled(lambda), cfg)?;
        let ok = rep.verdict == Verdict::Converged;
        probes.push((lambda, ok));
        Ok(ok)
    };
    let mut lo = lambda_lo;
    let mut hi = lambda_hi;
    let mut tries = 0;
    while !converged_at(lo, &mut probes)? {
        lo /= 4.0;
        tries += 1;
        if tries > 6 {
            return Err(Error::Solver("no convergent lower endpoint found".into()));
        }
    }
    tries = 0;
    while converged_at(hi, &mut probes)? {
        hi *= 4.0;
        tries += 1;
        if tries > 6 {
            return Err(Error::Solver("no divergent upper endpoint found".into()));
        }
    }
    for _ in 0..10 {
        let mid = (lo * hi).sqrt();
        if converged_at(mid, &mut probes)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdReport { lambda_lo: lo, lambda_hi: hi, probes })
}
