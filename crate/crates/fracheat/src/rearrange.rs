//! Distribution functions, non-increasing rearrangements `f*`, maximal
//! averages `f**`, and the convolution/product inequality checks that the
//! norm engine builds on.
//!
//! On a grid every rearrangement is an exact step function: each cell
//! contributes measure `h^N`, values are sorted descending, and adjacent
//! equal values merge into a single step. All downstream integrals against
//! `f*` treat the steps exactly; no resampling happens anywhere.

use crate::error::{Error, Result};
use crate::fft;
use crate::gridfn::GridFunction;

/// Right-continuous step function `f*(s) = v_i` on `[s_{i-1}, s_i)`, zero
/// for `s >= s_K`. Values are strictly decreasing and positive.
#[derive(Debug, Clone)]
pub struct StepProfile {
    cuts: Vec<f64>,
    values: Vec<f64>,
    /// cumulative ∫_0^{s_i} f* dτ, one entry per step
    prefix: Vec<f64>,
}

impl StepProfile {
    /// Empty profile (the rearrangement of 0).
    pub fn zero() -> Self {
        Self { cuts: Vec::new(), values: Vec::new(), prefix: Vec::new() }
    }

    /// Builds from raw steps; dedupes equal adjacent values and drops zeros.
    pub fn from_steps(cuts: &[f64], values: &[f64]) -> Result<Self> {
        if cuts.len() != values.len() {
            return Err(Error::InvalidProfile("cuts/values length mismatch".into()));
        }
        let mut prev = 0.0;
        for &c in cuts {
            if !(c > prev && c.is_finite()) {
                return Err(Error::InvalidProfile("breakpoints must be strictly ascending".into()));
            }
            prev = c;
        }
        let mut prev_v = f64::INFINITY;
        for &v in values {
            if !(v >= 0.0 && v.is_finite() && v <= prev_v) {
                return Err(Error::InvalidProfile("values must be non-increasing and >= 0".into()));
            }
            prev_v = v;
        }
        let mut out_cuts: Vec<f64> = Vec::with_capacity(cuts.len());
        let mut out_values: Vec<f64> = Vec::with_capacity(values.len());
        for (&c, &v) in cuts.iter().zip(values) {
            if v == 0.0 {
                break;
            }
            if let Some(last) = out_values.last() {
                if *last == v {
                    *out_cuts.last_mut().unwrap() = c;
                    continue;
                }
            }
            out_cuts.push(c);
            out_values.push(v);
        }
        Ok(Self::assemble(out_cuts, out_values))
    }

    fn assemble(cuts: Vec<f64>, values: Vec<f64>) -> Self {
        let mut prefix = Vec::with_capacity(cuts.len());
        let mut acc = 0.0;
        let mut lo = 0.0;
        for (c, v) in cuts.iter().zip(&values) {
            acc += v * (c - lo);
            prefix.push(acc);
            lo = *c;
        }
        Self { cuts, values, prefix }
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }

    /// Measure of the support, `s_K` (0 for the zero profile).
    pub fn support_measure(&self) -> f64 {
        self.cuts.last().copied().unwrap_or(0.0)
    }

    /// `f*(0) = max |f|`.
    pub fn sup_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `f*(s)` for `s >= 0`.
    pub fn eval(&self, s: f64) -> f64 {
        match self.cuts.partition_point(|&c| c <= s) {
            i if i < self.values.len() => self.values[i],
            _ => 0.0,
        }
    }

    /// `∫_0^s f*(τ) dτ`, exact (piecewise linear in `s`).
    pub fn prefix_integral(&self, s: f64) -> f64 {
        if s <= 0.0 || self.cuts.is_empty() {
            return 0.0;
        }
        let i = self.cuts.partition_point(|&c| c <= s);
        if i >= self.cuts.len() {
            return *self.prefix.last().unwrap();
        }
        let lo = if i == 0 { 0.0 } else { self.cuts[i - 1] };
        let base = if i == 0 { 0.0 } else { self.prefix[i - 1] };
        base + self.values[i] * (s - lo)
    }

    /// Total integral `∫_0^∞ f* dτ`.
    pub fn total_integral(&self) -> f64 {
        self.prefix.last().copied().unwrap_or(0.0)
    }

    /// `∫_0^∞ (f*)^q dτ`, exact.
    pub fn total_power_integral(&self, q: f64) -> f64 {
        let mut acc = 0.0;
        let mut lo = 0.0;
        for (c, v) in self.cuts.iter().zip(&self.values) {
            acc += v.powf(q) * (c - lo);
            lo = *c;
        }
        acc
    }

    /// `f**(s) = (1/s) ∫_0^s f*`, for `s > 0`.
    pub fn two_star(&self, s: f64) -> f64 {
        assert!(s > 0.0);
        self.prefix_integral(s) / s
    }

    /// Measure of `{ |f| > lambda }` read off the profile.
    pub fn measure_above(&self, lambda: f64) -> f64 {
        let i = self.values.partition_point(|&v| v > lambda);
        if i == 0 {
            0.0
        } else {
            self.cuts[i - 1]
        }
    }

    /// Pointwise power `(|f|^r)* = (f*)^r` (same breakpoints).
    pub fn powered(&self, r: f64) -> Self {
        let values: Vec<f64> = self.values.iter().map(|v| v.powf(r)).collect();
        Self::assemble(self.cuts.clone(), values)
    }

    /// Scaled profile `(k f)* = |k| f*`.
    pub fn scaled(&self, k: f64) -> Self {
        if k == 0.0 {
            return Self::zero();
        }
        let values: Vec<f64> = self.values.iter().map(|v| v * k.abs()).collect();
        Self::assemble(self.cuts.clone(), values)
    }

    /// Head part `(f χ_{|f| > τ})*`: the profile restricted to `[0, d_f(τ))`.
    pub fn truncate_above(&self, tau: f64) -> Self {
        let i = self.values.partition_point(|&v| v > tau);
        Self::assemble(self.cuts[..i].to_vec(), self.values[..i].to_vec())
    }

    /// Tail part `(f χ_{|f| <= τ})*`: the profile shifted left past `d_f(τ)`.
    pub fn truncate_below(&self, tau: f64) -> Self {
        let i = self.values.partition_point(|&v| v > tau);
        if i == 0 {
            return self.clone();
        }
        let off = self.cuts[i - 1];
        let cuts: Vec<f64> = self.cuts[i..].iter().map(|c| c - off).collect();
        Self::assemble(cuts, self.values[i..].to_vec())
    }
}

/// `d_f(λ) = |{ |f| > λ }|` on the grid: `h^N · #{cells with |value| > λ}`.
pub fn distribution_function(f: &GridFunction, lambda: f64) -> f64 {
    assert!(lambda >= 0.0);
    let count = f.values().iter().filter(|v| v.abs() > lambda).count();
    count as f64 * f.spec().cell_measure()
}

/// Non-increasing rearrangement of a grid function as an exact step profile.
pub fn rearrangement(f: &GridFunction) -> StepProfile {
    let h_n = f.spec().cell_measure();
    let mut sorted: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cuts: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut measure = 0.0;
    for v in sorted {
        measure += h_n;
        if v == 0.0 {
            break;
        }
        if values.last() == Some(&v) {
            *cuts.last_mut().unwrap() = measure;
        } else {
            cuts.push(measure);
            values.push(v);
        }
    }
    StepProfile::assemble(cuts, values)
}

/// `f**(s)` evaluated exactly from the step profile.
pub fn maximal_average(prof: &StepProfile, s: f64) -> f64 {
    prof.two_star(s)
}

/// Outcome of the convolution inequality check.
#[derive(Debug, Clone)]
pub struct OneilReport {
    pub lhs: f64,
    pub rhs: f64,
    /// false when the supports are too large for a wrap-free torus
    /// convolution; the report is then advisory only.
    pub wrap_free: bool,
}

/// Checks O'Neil's inequality `(f∗g)**(s) ≤ ∫_s^∞ f** g** dτ`.
///
/// The convolution is computed spectrally on the torus; the right side is an
/// exact piecewise-rational integral of the two maximal averages. Past both
/// supports the integrand is `P_f P_g / τ²`, so the tail to infinity has the
/// closed form `P_f P_g / T` and nothing is truncated.
pub fn oneil_bound_check(f: &GridFunction, g: &GridFunction, s: f64) -> Result<OneilReport> {
    if f.spec() != g.spec() {
        return Err(Error::GridMismatch("O'Neil check needs one common grid".into()));
    }
    assert!(s > 0.0);
    let conv = fft::convolve(f, g)?;
    let lhs = rearrangement(&conv).two_star(s);
    let pf = rearrangement(f);
    let pg = rearrangement(g);
    let rhs = integral_two_star_product(&pf, &pg, s);
    Ok(OneilReport { lhs, rhs, wrap_free: supports_wrap_free(f, g) })
}

/// Exact `∫_a^∞ f**(τ) g**(τ) dτ` over merged step intervals plus the
/// closed-form tail.
fn integral_two_star_product(pf: &StepProfile, pg: &StepProfile, a: f64) -> f64 {
    let t_max = pf.support_measure().max(pg.support_measure()).max(a);
    let mut edges: Vec<f64> = Vec::with_capacity(pf.steps() + pg.steps() + 2);
    edges.push(a);
    for &c in pf.cuts().iter().chain(pg.cuts()) {
        if c > a && c < t_max {
            edges.push(c);
        }
    }
    edges.push(t_max);
    edges.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        // on (lo, hi): f**(τ) = (cf + vf τ)/τ with vf the step value there
        let vf = pf.eval(lo);
        let cf = pf.prefix_integral(lo) - vf * lo;
        let vg = pg.eval(lo);
        let cg = pg.prefix_integral(lo) - vg * lo;
        let anti = |t: f64| -cf * cg / t + (cf * vg + cg * vf) * t.ln() + vf * vg * t;
        total += anti(hi) - anti(lo);
    }
    total + pf.total_integral() * pg.total_integral() / t_max
}

/// Exact `(1/s) ∫_0^s f*(τ) g*(τ) dτ` (right side of the product estimate).
pub fn product_star_average(pf: &StepProfile, pg: &StepProfile, s: f64) -> f64 {
    assert!(s > 0.0);
    let mut edges: Vec<f64> = vec![0.0];
    for &c in pf.cuts().iter().chain(pg.cuts()) {
        if c < s {
            edges.push(c);
        }
    }
    edges.push(s);
    edges.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += pf.eval(w[0]) * pg.eval(w[0]) * (w[1] - w[0]);
    }
    total / s
}

fn supports_wrap_free(f: &GridFunction, g: &GridFunction) -> bool {
    let spec = f.spec();
    let m = spec.points_per_axis();
    for axis in 0..spec.dim() {
        let ext_f = support_extent(f, axis);
        let ext_g = support_extent(g, axis);
        match (ext_f, ext_g) {
            (Some(a), Some(b)) => {
                if a + b > m + 1 {
                    return false;
                }
            }
            _ => return true, // one factor is zero: nothing can wrap
        }
    }
    true
}

fn support_extent(f: &GridFunction, axis: usize) -> Option<usize> {
    let spec = f.spec();
    let mut lo = usize::MAX;
    let mut hi = 0usize;
    for (idx, v) in f.values().iter().enumerate() {
        if *v != 0.0 {
            let j = spec.multi_index(idx)[axis];
            lo = lo.min(j);
            hi = hi.max(j);
        }
    }
    if lo == usize::MAX {
        None
    } else {
        Some(hi - lo + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{make_grid, restrict_to_ball, GridFunction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid_fn(seed: u64, m: usize) -> GridFunction {
        let spec = make_grid(1, 2.0, m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..spec.cell_count()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        GridFunction::new(spec, values).unwrap()
    }

    #[test]
    fn distribution_examples() {
        let spec = make_grid(1, 32.0, 1024).unwrap();
        let one = GridFunction::constant(spec, 1.0);
        assert!((distribution_function(&one, 0.5) - 64.0).abs() < 1e-12);
        // strict inequality: right continuity at λ = 1
        assert_eq!(distribution_function(&one, 1.0), 0.0);
    }

    #[test]
    fn distribution_matches_brute_scan() {
        let f = random_grid_fn(7, 256);
        for lambda in [0.0, 0.3, 1.0, 2.5, 2.9999] {
            let scan = f.values().iter().filter(|v| v.abs() > lambda).count() as f64
                * f.spec().cell_measure();
            assert_eq!(distribution_function(&f, lambda), scan);
        }
    }

    #[test]
    fn indicator_rearrangement_is_interval() {
        let spec = make_grid(1, 2.0, 64).unwrap();
        let ind = restrict_to_ball(&GridFunction::constant(spec, 1.0), &[0.25], 0.5);
        let prof = rearrangement(&ind);
        assert_eq!(prof.steps(), 1);
        assert!((prof.values()[0] - 1.0).abs() < 1e-15);
        let measure = ind.integral();
        assert!((prof.support_measure() - measure).abs() < 1e-12);
        // χ_E rearranges to χ_{[0,|E|)}
        assert_eq!(prof.eval(measure * 0.5), 1.0);
        assert_eq!(prof.eval(measure), 0.0);
    }

    #[test]
    fn equimeasurability_exact() {
        let f = random_grid_fn(11, 512);
        let prof = rearrangement(&f);
        for q in [1.0, 2.0, 3.5] {
            let grid_sum: f64 = f.values().iter().map(|v| v.abs().powf(q)).sum::<f64>()
                * f.spec().cell_measure();
            let star_sum = prof.total_power_integral(q);
            assert!(
                (grid_sum - star_sum).abs() <= 1e-12 * grid_sum.abs(),
                "q={q}: {grid_sum} vs {star_sum}"
            );
        }
    }

    #[test]
    fn scaling_and_power_rules() {
        let f = random_grid_fn(3, 128);
        let prof = rearrangement(&f);
        let scaled = rearrangement(&f.scaled(-2.5));
        assert_eq!(scaled.cuts(), prof.cuts());
        for (a, b) in scaled.values().iter().zip(prof.values()) {
            assert!((a - 2.5 * b).abs() < 1e-13 * a.abs());
        }
        let sq = rearrangement(&f.map(|v| v * v));
        let pw = prof.powered(2.0);
        assert_eq!(sq.cuts(), pw.cuts());
        for (a, b) in sq.values().iter().zip(pw.values()) {
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }

    #[test]
    fn maximal_average_examples() {
        // χ_{[0,1)}: f**(2) = 1/2
        let prof = StepProfile::from_steps(&[1.0], &[1.0]).unwrap();
        assert!((maximal_average(&prof, 2.0) - 0.5).abs() < 1e-15);
        // constants: f** = c up to the support edge
        let c = StepProfile::from_steps(&[64.0], &[3.0]).unwrap();
        assert!((maximal_average(&c, 10.0) - 3.0).abs() < 1e-15);
        // f** >= f* everywhere
        let p = StepProfile::from_steps(&[0.5, 1.5, 4.0], &[3.0, 1.0, 0.25]).unwrap();
        for s in [0.1, 0.5, 0.9, 2.0, 4.0, 9.0] {
            assert!(p.two_star(s) >= p.eval(s) - 1e-15);
        }
    }

    #[test]
    fn maximal_average_matches_quadrature() {
        let f = random_grid_fn(21, 256);
        let prof = rearrangement(&f);
        let total = f.spec().total_measure();
        for s in [total * 0.01, total * 0.3, total * 0.999] {
            // breakpoint-aware quadrature oracle: sum each step clipped to [0, s]
            let mut q = 0.0;
            let mut lo = 0.0;
            for (c, v) in prof.cuts().iter().zip(prof.values()) {
                let hi = c.min(s);
                if hi > lo {
                    q += v * (hi - lo);
                }
                lo = *c;
                if lo >= s {
                    break;
                }
            }
            q /= s;
            assert!(
                (prof.two_star(s) - q).abs() <= 1e-10 * q.abs().max(1.0),
                "s={s}: {} vs {q}",
                prof.two_star(s)
            );
        }
    }

    #[test]
    fn oneil_inequality_on_indicators() {
        let spec = make_grid(1, 4.0, 256).unwrap();
        let ind = restrict_to_ball(&GridFunction::constant(spec, 1.0), &[0.0], 0.5);
        let rep = oneil_bound_check(&ind, &ind, 1.0).unwrap();
        assert!(rep.wrap_free);
        assert!(rep.lhs.is_finite() && rep.rhs.is_finite() && rep.lhs > 0.0);
        assert!(rep.lhs <= rep.rhs * (1.0 + 1e-9), "{} vs {}", rep.lhs, rep.rhs);
    }

    #[test]
    fn oneil_zero_case() {
        let spec = make_grid(1, 4.0, 64).unwrap();
        let z = GridFunction::zeros(spec);
        let g = GridFunction::constant(spec, 1.0);
        let rep = oneil_bound_check(&z, &g, 1.0).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.lhs <= rep.rhs + 1e-15);
    }

    #[test]
    fn oneil_random_small_supports() {
        let spec = make_grid(1, 8.0, 512).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..200 {
            let mut fv = vec![0.0; spec.cell_count()];
            let mut gv = vec![0.0; spec.cell_count()];
            // small supports near the middle of the box so nothing wraps
            for _ in 0..20 {
                let i = rng.gen_range(200..312);
                fv[i] = rng.gen_range(0.0..2.0);
                let j = rng.gen_range(200..312);
                gv[j] = rng.gen_range(0.0..2.0);
            }
            let f = GridFunction::new(spec, fv).unwrap();
            let g = GridFunction::new(spec, gv).unwrap();
            let s = rng.gen_range(0.05..4.0);
            let rep = oneil_bound_check(&f, &g, s).unwrap();
            assert!(rep.wrap_free, "trial {trial}");
            assert!(
                rep.lhs <= rep.rhs * (1.0 + 1e-9) + 1e-12,
                "trial {trial}: lhs={} rhs={}",
                rep.lhs,
                rep.rhs
            );
        }
    }

    #[test]
    fn truncation_splits_profile() {
        let p = StepProfile::from_steps(&[1.0, 3.0, 7.0], &[4.0, 2.0, 1.0]).unwrap();
        let head = p.truncate_above(1.5);
        let tail = p.truncate_below(1.5);
        assert_eq!(head.values(), &[4.0, 2.0]);
        assert_eq!(head.support_measure(), 3.0);
        assert_eq!(tail.values(), &[1.0]);
        assert_eq!(tail.support_measure(), 4.0);
        // measures add back to the original support
        assert!((head.support_measure() + tail.support_measure() - 7.0).abs() < 1e-15);
    }
}
