//! Least-squares fitting of decay laws `y ≈ C t^a Φ(1/t)^b` in log space.

use crate::error::{Error, Result};
use crate::zygmund::phi;
use serde::Serialize;

/// Fitted exponents of a decay law.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateFit {
    /// exponent of `t`
    pub power_exponent: f64,
    /// exponent of `Φ(1/t)`; zero when the log regressor is disabled
    pub log_exponent: f64,
    pub intercept: f64,
    /// RMS residual in log space
    pub residual: f64,
}

/// Fits `log y = a·log t [+ b·log Φ(1/t)] + c` by least squares.
///
/// Needs at least 5 samples with strictly monotone geometric `t` and `y > 0`.
pub fn fit_rate(samples: &[(f64, f64)], with_log_regressor: bool) -> Result<RateFit> {
    if samples.len() < 5 {
        return Err(Error::Fit(format!("need at least 5 samples, got {}", samples.len())));
    }
    let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    check_geometric(&ts)?;
    for &(t, y) in samples {
        if !(t > 0.0 && y > 0.0 && y.is_finite()) {
            return Err(Error::Fit(format!("samples must have t > 0 and y > 0, got ({t}, {y})")));
        }
    }
    let rows: Vec<[f64; 3]> = samples
        .iter()
        .map(|&(t, _)| {
            if with_log_regressor {
                [t.ln(), phi(1.0 / t).ln(), 1.0]
            } else {
                [t.ln(), 0.0, 1.0]
            }
        })
        .collect();
    let rhs: Vec<f64> = samples.iter().map(|&(_, y)| y.ln()).collect();
    let ncol = if with_log_regressor { 3 } else { 2 };
    // normal equations
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (row, b) in rows.iter().zip(&rhs) {
        let cols: Vec<usize> = if with_log_regressor { vec![0, 1, 2] } else { vec![0, 2] };
        for (ii, &i) in cols.iter().enumerate() {
            for &j in cols.iter().skip(ii) {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * b;
        }
    }
    // symmetrize and compress to the active columns
    let cols: Vec<usize> = if with_log_regressor { vec![0, 1, 2] } else { vec![0, 2] };
    let mut a = vec![vec![0.0f64; ncol]; ncol];
    let mut b = vec![0.0f64; ncol];
    for (ii, &i) in cols.iter().enumerate() {
        for (jj, &j) in cols.iter().enumerate() {
            a[ii][jj] = if i <= j { ata[i][j] } else { ata[j][i] };
        }
        b[ii] = atb[i];
    }
    let sol = solve_dense(&mut a, &mut b)?;
    let (pa, pb, pc) = if with_log_regressor {
        (sol[0], sol[1], sol[2])
    } else {
        (sol[0], 0.0, sol[1])
    };
    let mut ss = 0.0;
    for (row, y) in rows.iter().zip(&rhs) {
        let fit = pa * row[0] + pb * row[1] + pc;
        ss += (y - fit) * (y - fit);
    }
    Ok(RateFit {
        power_exponent: pa,
        log_exponent: pb,
        intercept: pc,
        residual: (ss / samples.len() as f64).sqrt(),
    })
}

fn check_geometric(ts: &[f64]) -> Result<()> {
    let increasing = ts[1] > ts[0];
    let r0 = ts[1] / ts[0];
    for w in ts.windows(2) {
        let r = w[1] / w[0];
        if (increasing && w[1] <= w[0]) || (!increasing && w[1] >= w[0]) {
            return Err(Error::Fit("t grid must be strictly monotone".into()));
        }
        if (r / r0 - 1.0).abs() > 1e-6 {
            return Err(Error::Fit("t grid must be geometric".into()));
        }
    }
    Ok(())
}

fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col].abs() < 1e-12 {
            return Err(Error::Fit("degenerate design matrix".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Ok(x)
}
