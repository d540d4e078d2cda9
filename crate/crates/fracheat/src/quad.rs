//! Adaptive quadrature helpers shared by the norm engine and the estimate
//! checkers. The log-weight `Φ(s⁻¹) = log(e + 1/s)` grows so slowly near
//! `s = 0` that a log substitution `u = log(1/s)` turns every weighted
//! integral used here into a smooth, exponentially damped one.

use crate::zygmund::phi;

/// Adaptive Simpson on `[a, b]` with relative tolerance `rel_tol`.
///
/// The integrand must be finite on the closed interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol, 52)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let s2 = left + right;
    let err = (s2 - whole) / 15.0;
    let scale = s2.abs().max(1e-300);
    if depth == 0 || err.abs() <= tol * scale || (b - a) < 1e-15 * (a.abs() + b.abs() + 1e-300) {
        return s2 + err;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol, depth - 1)
}

/// `∫_0^b f(s) ds` where `f` may have an integrable singularity at 0.
///
/// Dyadic panels shrink toward the origin; the sum stops once a panel
/// contributes less than `rel_tol` of the running total.
pub fn integrate_to_zero<F: Fn(f64) -> f64>(f: &F, b: f64, rel_tol: f64) -> f64 {
    assert!(b > 0.0);
    let mut total = 0.0;
    let mut hi = b;
    for _ in 0..2000 {
        let lo = 0.5 * hi;
        let piece = adaptive_simpson(f, lo, hi, rel_tol);
        total += piece;
        if piece.abs() < rel_tol * total.abs().max(1e-300) && total != 0.0 {
            break;
        }
        hi = lo;
    }
    total
}

/// `∫_a^b Φ(1/s)^α ds` for `0 ≤ a < b`, accurate near `s = 0`.
pub fn int_phi_pow(a: f64, b: f64, alpha: f64, rel_tol: f64) -> f64 {
    assert!(a >= 0.0 && b > a);
    if alpha == 0.0 {
        return b - a;
    }
    // split at 1: below, substitute u = log(1/s); above, integrate directly
    let split = b.min(1.0);
    let mut total = 0.0;
    if a < split {
        // ∫_a^split Φ(1/s)^α ds = ∫_{log(1/split)}^{log(1/a)} Φ(e^u)^α e^{-u} du
        let u_lo = (1.0 / split).ln();
        // mass beyond 60 e-foldings of the u = log(1/s) variable is < 1e-25 relative
        let u_hi = if a == 0.0 { u_lo + 60.0 } else { (1.0 / a).ln().min(u_lo + 60.0) };
        let g = |u: f64| phi(u.exp()).powf(alpha) * (-u).exp();
        total += adaptive_simpson(&g, u_lo, u_hi, rel_tol);
    }
    if b > 1.0 {
        let lo = a.max(1.0);
        let g = |s: f64| phi(1.0 / s).powf(alpha);
        total += adaptive_simpson(&g, lo, b, rel_tol);
    }
    total
}

/// Closed form of `∫_a^b Φ(1/s) ds` (α = 1), used as an oracle in tests.
pub fn int_phi_closed_form(a: f64, b: f64) -> f64 {
    let prim = |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            s * phi(1.0 / s) + (1.0 / std::f64::consts::E) * (std::f64::consts::E * s + 1.0).ln()
        }
    };
    prim(b) - prim(a)
}

/// Geometrically graded panel edges on `[0, len]` with `n` panels per half,
/// widths shrinking toward both endpoints by factor `ratio ≥ 1`.
pub fn graded_edges(len: f64, n_per_half: usize, ratio: f64) -> Vec<f64> {
    assert!(len > 0.0 && n_per_half >= 1 && ratio >= 1.0);
    let half = 0.5 * len;
    let mut widths = Vec::with_capacity(n_per_half);
    if (ratio - 1.0).abs() < 1e-12 {
        widths.resize(n_per_half, half / n_per_half as f64);
    } else {
        let w0 = half * (ratio - 1.0) / (ratio.powi(n_per_half as i32) - 1.0);
        let mut w = w0;
        for _ in 0..n_per_half {
            widths.push(w);
            w *= ratio;
        }
    }
    let mut edges = Vec::with_capacity(2 * n_per_half + 1);
    edges.push(0.0);
    let mut s = 0.0;
    for w in &widths {
        s += w;
        edges.push(s);
    }
    for w in widths.iter().rev() {
        s += w;
        edges.push(s.min(len));
    }
    *edges.last_mut().unwrap() = len;
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn phi_weight_alpha_one_matches_closed_form() {
        for &(a, b) in &[(0.0, 1.0), (1e-8, 0.5), (0.25, 3.0), (0.0, 10.0)] {
            let num = int_phi_pow(a, b, 1.0, 1e-12);
            let exact = int_phi_closed_form(a, b);
            assert!(
                (num - exact).abs() <= 1e-10 * exact.abs(),
                "a={a} b={b}: {num} vs {exact}"
            );
        }
    }

    #[test]
    fn phi_weight_alpha_zero_is_length() {
        assert!((int_phi_pow(0.25, 2.0, 0.0, 1e-12) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn integrate_to_zero_handles_algebraic_singularity() {
        // ∫_0^1 s^{-1/2} ds = 2
        let v = integrate_to_zero(&|s: f64| s.powf(-0.5), 1.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn graded_edges_cover_interval() {
        let e = graded_edges(3.0, 8, 1.5);
        assert_eq!(e.len(), 17);
        assert_eq!(e[0], 0.0);
        assert_eq!(*e.last().unwrap(), 3.0);
        for w in e.windows(2) {
            assert!(w[1] > w[0]);
        }
        // widths shrink toward both ends
        assert!(e[1] - e[0] < e[8] - e[7]);
        assert!(e[16] - e[15] < e[9] - e[8]);
    }
}
