//! Cell-centered functions on the uniform periodic box `[-L, L)^N`,
//! including sampling of the singular radial profiles whose rearrangement
//! asymptotics drive every membership check downstream.
//!
//! Cells touching the origin get their value from an adaptive polar cell
//! average so that the near-singularity part of the rearrangement is
//! faithful; all other cells are center-sampled.

use crate::error::{Error, Result};
use crate::quad::{adaptive_simpson, integrate_to_zero};
use crate::zygmund::phi;

/// Uniform periodic grid on `[-L, L)^N` with `M` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
}

impl GridSpec {
    /// Validates and builds a grid. `M` must be a power of two, at least 16.
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dim must be 1, 2, or 3, got {dim}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("half_width must be positive, got {half_width}")));
        }
        let m = points_per_axis;
        if m < 16 || !m.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be a power of two >= 16, got {m}"
            )));
        }
        Ok(Self { dim, half_width, points_per_axis: m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Cell width `h = 2L/M`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Cell measure `h^N`.
    pub fn cell_measure(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total measure `(2L)^N` of the box.
    pub fn total_measure(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    /// Number of cells `M^N`.
    pub fn cell_count(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Cell center along one axis: `x_j = -L + (j + 1/2) h`.
    pub fn axis_center(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    /// Multi-index of a linear cell index (axis 0 fastest).
    pub fn multi_index(&self, mut idx: usize) -> [usize; 3] {
        let m = self.points_per_axis;
        let mut out = [0usize; 3];
        for a in out.iter_mut().take(self.dim) {
            *a = idx % m;
            idx /= m;
        }
        out
    }

    /// Coordinates of a cell center.
    pub fn center(&self, idx: usize) -> [f64; 3] {
        let mi = self.multi_index(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.axis_center(mi[a]);
        }
        x
    }

    /// Torus distance between two points.
    pub fn torus_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let period = 2.0 * self.half_width;
        let mut sq = 0.0;
        for a in 0..self.dim {
            let mut d = (x[a] - y[a]).abs() % period;
            if d > self.half_width {
                d = period - d;
            }
            sq += d * d;
        }
        sq.sqrt()
    }
}

/// Real samples on a grid, one value per cell center.
#[derive(Debug, Clone)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
    label: Option<String>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.cell_count() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                spec.cell_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite value in grid function".into()));
        }
        Ok(Self { spec, values, label: None })
    }

    /// Builds without the finiteness check; solver internals use this to
    /// carry diverged iterates.
    pub fn new_unchecked(spec: GridSpec, values: Vec<f64>) -> Self {
        Self { spec, values, label: None }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, values: vec![0.0; spec.cell_count()], label: None }
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        Self { spec, values: vec![c; spec.cell_count()], label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `∑ v_i · h^N`, the box integral of the samples.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_measure()
    }

    fn check_same_spec(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch(
                "grid functions combine only on identical grids".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_spec(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { spec: self.spec, values, label: None })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_spec(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { spec: self.spec, values, label: None })
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|v| k * v).collect(),
            label: None,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
            label: None,
        }
    }
}

/// Shape of a radial profile to be sampled on a grid.
#[derive(Clone)]
pub enum ProfileKind {
    /// `|x|^{-N} Φ(1/|x|)^{-N/θ}`, defined for `N > θ` (`p = N/(N-θ)`).
    Critical { theta: f64 },
    /// `|x|^{-θp/(p-1)}` with `p > N/(N-θ)`.
    Supercritical { theta: f64, p: f64 },
    /// `|x|^exponent` truncated to `|x| <= radius`.
    Power { exponent: f64, radius: f64 },
    /// Indicator of the ball `|x| < radius`.
    Indicator { radius: f64 },
    /// Constant 1 (use `scale` for other constants).
    Constant,
    /// Arbitrary bounded radial profile, center-sampled everywhere.
    CustomRadial(std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl ProfileKind {
    /// Unscaled radial value; `n` is the space dimension.
    fn radial(&self, n: f64, r: f64) -> f64 {
        match self {
            ProfileKind::Critical { theta } => r.powf(-n) * phi(1.0 / r).powf(-n / theta),
            ProfileKind::Supercritical { theta, p } => r.powf(-theta * p / (p - 1.0)),
            ProfileKind::Power { exponent, radius } => {
                if r <= *radius {
                    r.powf(*exponent)
                } else {
                    0.0
                }
            }
            ProfileKind::Indicator { radius } => {
                if r < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileKind::Constant => 1.0,
            ProfileKind::CustomRadial(f) => f(r),
        }
    }
}

/// A radial profile together with its amplitude.
#[derive(Clone)]
pub struct SingularProfileSpec {
    pub kind: ProfileKind,
    pub scale: f64,
}

impl SingularProfileSpec {
    pub fn new(kind: ProfileKind, scale: f64) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::InvalidProfile(format!("scale must be >= 0, got {scale}")));
        }
        match &kind {
            ProfileKind::Critical { theta } => {
                if !(*theta > 0.0 && *theta <= 2.0) {
                    return Err(Error::InvalidProfile(format!("theta must be in (0,2], got {theta}")));
                }
            }
            ProfileKind::Supercritical { theta, p } => {
                if !(*theta > 0.0 && *theta <= 2.0) {
                    return Err(Error::InvalidProfile(format!("theta must be in (0,2], got {theta}")));
                }
                if !(*p > 1.0) {
                    return Err(Error::InvalidProfile(format!("p must be > 1, got {p}")));
                }
            }
            ProfileKind::Power { radius, .. } | ProfileKind::Indicator { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidProfile("radius must be positive".into()));
                }
            }
            _ => {}
        }
        Ok(Self { kind, scale })
    }

    /// The critical profile `µ_c` for `p = N/(N-θ)`.
    pub fn critical(theta: f64, scale: f64) -> Result<Self> {
        Self::new(ProfileKind::Critical { theta }, scale)
    }

    /// The supercritical profile `µ_c = |x|^{-θp/(p-1)}` for `p > N/(N-θ)`.
    pub fn supercritical(theta: f64, p: f64, scale: f64) -> Result<Self> {
        Self::new(ProfileKind::Supercritical { theta, p }, scale)
    }

    /// Critical exponent `p_* = N/(N-θ)`.
    pub fn critical_exponent(dim: usize, theta: f64) -> Result<f64> {
        let n = dim as f64;
        if n <= theta {
            return Err(Error::InvalidProfile(format!(
                "critical profile needs N > theta (N={dim}, theta={theta})"
            )));
        }
        Ok(n / (n - theta))
    }

    fn validate_for_dim(&self, dim: usize) -> Result<()> {
        let n = dim as f64;
        match &self.kind {
            ProfileKind::Critical { theta } => {
                if n <= *theta {
                    return Err(Error::InvalidProfile(format!(
                        "critical profile needs N > theta (N={dim}, theta={theta})"
                    )));
                }
            }
            ProfileKind::Supercritical { theta, p } => {
                let p_star = n / (n - theta);
                if n <= *theta || *p <= p_star {
                    return Err(Error::InvalidProfile(format!(
                        "supercritical profile needs p > N/(N-theta) = {p_star}, got p={p}"
                    )));
                }
            }
            ProfileKind::Power { exponent, .. } => {
                if *exponent <= -n {
                    return Err(Error::InvalidProfile(format!(
                        "power exponent must exceed -N for local integrability, got {exponent}"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Pointwise value at radius `r > 0` in dimension `dim`.
    pub fn value_at(&self, dim: usize, r: f64) -> f64 {
        self.scale * self.kind.radial(dim as f64, r)
    }

    fn unscaled_at(&self, dim: usize, r: f64) -> f64 {
        self.kind.radial(dim as f64, r)
    }

    /// `∫_0^R g(r) r^{N-1} dr` for the unscaled radial profile `g`.
    fn radial_mass(&self, dim: usize, r_hi: f64, rel_tol: f64) -> f64 {
        let n = dim as f64;
        match &self.kind {
            ProfileKind::Critical { theta } => {
                // ∫ r^{-1} Φ(1/r)^{-m} dr with m = N/θ > 1; substitute u = log(1/r)
                let m = n / theta;
                let split = r_hi.min(1.0);
                let u_lo = (1.0 / split).ln();
                let u_cap = (u_lo + 5.0).max(50.0);
                let g = |u: f64| phi(u.exp()).powf(-m);
                let mut total = adaptive_simpson(&g, u_lo, u_cap, rel_tol);
                // analytic tail: ∫_U^∞ (u + O(e^{-u}))^{-m} du = U^{1-m}/(m-1) + O(e^{-U})
                total += u_cap.powf(1.0 - m) / (m - 1.0);
                if r_hi > 1.0 {
                    let f = |r: f64| self.unscaled_at(dim, r) * r.powf(n - 1.0);
                    total += adaptive_simpson(&f, 1.0, r_hi, rel_tol);
                }
                total
            }
            ProfileKind::Supercritical { theta, p } => {
                let e = n - 1.0 - theta * p / (p - 1.0);
                r_hi.powf(e + 1.0) / (e + 1.0)
            }
            ProfileKind::Power { exponent, radius } => {
                let top = r_hi.min(*radius);
                let e = exponent + n - 1.0;
                top.powf(e + 1.0) / (e + 1.0)
            }
            ProfileKind::Indicator { radius } => r_hi.min(*radius).powf(n) / n,
            ProfileKind::Constant => r_hi.powf(n) / n,
            ProfileKind::CustomRadial(f) => {
                let g = |r: f64| f(r) * r.powf(n - 1.0);
                integrate_to_zero(&g, r_hi, rel_tol)
            }
        }
    }
}

impl std::fmt::Debug for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileKind::Critical { theta } => write!(f, "Critical {{ theta: {theta} }}"),
            ProfileKind::Supercritical { theta, p } => {
                write!(f, "Supercritical {{ theta: {theta}, p: {p} }}")
            }
            ProfileKind::Power { exponent, radius } => {
                write!(f, "Power {{ exponent: {exponent}, radius: {radius} }}")
            }
            ProfileKind::Indicator { radius } => write!(f, "Indicator {{ radius: {radius} }}"),
            ProfileKind::Constant => write!(f, "Constant"),
            ProfileKind::CustomRadial(_) => write!(f, "CustomRadial(..)"),
        }
    }
}

impl std::fmt::Debug for SingularProfileSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SingularProfileSpec")
            .field("kind", &self.kind)
            .field("scale", &self.scale)
            .finish()
    }
}

/// Validated grid construction (alias for `GridSpec::new`).
pub fn make_grid(dim: usize, half_width: f64, points_per_axis: usize) -> Result<GridSpec> {
    GridSpec::new(dim, half_width, points_per_axis)
}

/// Average of the profile over the corner cell `[0,h]^N`, by adaptive polar
/// quadrature. By radial symmetry every cell whose closure contains the
/// origin has this same average.
fn singular_cell_average(profile: &SingularProfileSpec, dim: usize, h: f64, rel_tol: f64) -> f64 {
    let core = profile.radial_mass(dim, h, rel_tol);
    let avg_unscaled = match dim {
        1 => core / h,
        2 => {
            // quarter disk r <= h plus the corner region between the disk and the cell
            let quarter = std::f64::consts::FRAC_PI_2 * core;
            let outer = |varphi: f64| {
                let r_max = h / varphi.cos();
                adaptive_simpson(&|r: f64| profile.unscaled_at(dim, r) * r, h, r_max, rel_tol)
            };
            let corner = 2.0 * adaptive_simpson(&outer, 0.0, std::f64::consts::FRAC_PI_4, rel_tol);
            (quarter + corner) / (h * h)
        }
        3 => {
            // octant ball plus the region between the ball and the cube
            let octant = std::f64::consts::FRAC_PI_2 * core;
            let shell = |cos_t: f64, varphi: f64| {
                let sin_t = (1.0 - cos_t * cos_t).sqrt();
                let dir = [sin_t * varphi.cos(), sin_t * varphi.sin(), cos_t];
                let dmax = dir.iter().fold(0.0f64, |m, d| m.max(*d));
                let r_max = h / dmax;
                if r_max <= h {
                    0.0
                } else {
                    adaptive_simpson(
                        &|r: f64| profile.unscaled_at(dim, r) * r * r,
                        h,
                        r_max,
                        rel_tol.max(1e-9),
                    )
                }
            };
            let inner = |cos_t: f64| {
                adaptive_simpson(
                    &|varphi: f64| shell(cos_t, varphi),
                    0.0,
                    std::f64::consts::FRAC_PI_2,
                    rel_tol.max(1e-8),
                )
            };
            let corner = adaptive_simpson(&inner, 0.0, 1.0, rel_tol.max(1e-8));
            (octant + corner) / (h * h * h)
        }
        _ => unreachable!(),
    };
    profile.scale * avg_unscaled
}

/// Samples a radial profile on the grid. Cells whose closure contains the
/// origin receive the adaptive polar cell average; all others are sampled at
/// the cell center.
pub fn sample_profile(spec: &GridSpec, profile: &SingularProfileSpec) -> Result<GridFunction> {
    profile.validate_for_dim(spec.dim())?;
    let h = spec.spacing();
    let singular = matches!(
        profile.kind,
        ProfileKind::Critical { .. } | ProfileKind::Supercritical { .. } | ProfileKind::Power { .. }
    );
    let half = 0.5 * h + 1e-12 * h;
    let singular_avg = if singular && profile.scale > 0.0 {
        let coarse = singular_cell_average(profile, spec.dim(), h, 1e-7);
        let fine = singular_cell_average(profile, spec.dim(), h, 1e-10);
        if (coarse - fine).abs() > 1e-6 * fine.abs().max(1e-300) {
            return Err(Error::QuadratureNonConvergence(format!(
                "singular cell average changed by {:.2e} relative under refinement",
                (coarse - fine).abs() / fine.abs().max(1e-300)
            )));
        }
        fine
    } else {
        0.0
    };
    let mut values = vec![0.0; spec.cell_count()];
    for (idx, v) in values.iter_mut().enumerate() {
        let x = spec.center(idx);
        let touches_origin = (0..spec.dim()).all(|a| x[a].abs() <= half);
        if singular && touches_origin {
            *v = singular_avg;
        } else {
            let r = x[..spec.dim()].iter().map(|c| c * c).sum::<f64>().sqrt();
            *v = if profile.scale == 0.0 { 0.0 } else { profile.value_at(spec.dim(), r) };
        }
        if !v.is_finite() {
            return Err(Error::InvalidProfile(format!("profile not finite at cell {idx}")));
        }
    }
    Ok(GridFunction { spec: *spec, values, label: None })
}

/// Zeros every cell whose center lies outside the torus ball `B(center, radius)`.
pub fn restrict_to_ball(f: &GridFunction, center: &[f64], radius: f64) -> GridFunction {
    let spec = *f.spec();
    let mut values = f.values().to_vec();
    for (idx, v) in values.iter_mut().enumerate() {
        let x = spec.center(idx);
        if spec.torus_distance(&x[..spec.dim()], center) >= radius {
            *v = 0.0;
        }
    }
    GridFunction { spec, values, label: None }
}
