//! Small N-dimensional FFT layer over `rustfft` for data laid out on a
//! `GridSpec` (axis 0 fastest). Used by the spectral propagator and the
//! torus convolution.

use crate::error::{Error, Result};
use crate::gridfn::{GridFunction, GridSpec};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct NdFft {
    dim: usize,
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: std::cell::RefCell<Vec<Complex64>>,
}

impl NdFft {
    pub fn new(spec: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let m = spec.points_per_axis();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len())
            .max(m);
        Self {
            dim: spec.dim(),
            m,
            forward,
            inverse,
            scratch: std::cell::RefCell::new(vec![Complex64::default(); scratch_len + m]),
        }
    }

    fn transform_axis(&self, data: &mut [Complex64], axis: usize, fft: &dyn Fft<f64>) {
        let m = self.m;
        let total = data.len();
        let mut scratch = self.scratch.borrow_mut();
        let (line, fft_scratch) = scratch.split_at_mut(m);
        if axis == 0 {
            for chunk in data.chunks_exact_mut(m) {
                fft.process_with_scratch(chunk, fft_scratch);
            }
            return;
        }
        let stride = m.pow(axis as u32);
        let block = stride * m;
        let mut base = 0;
        while base < total {
            for start in base..base + stride {
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                fft.process_with_scratch(line, fft_scratch);
                for (j, slot) in line.iter().enumerate() {
                    data[start + j * stride] = *slot;
                }
            }
            base += block;
        }
    }

    /// In-place unnormalized forward DFT along every axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        let fft = self.forward.clone();
        for axis in 0..self.dim {
            self.transform_axis(data, axis, fft.as_ref());
        }
    }

    /// In-place inverse DFT including the `1/M^N` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        let fft = self.inverse.clone();
        for axis in 0..self.dim {
            self.transform_axis(data, axis, fft.as_ref());
        }
        let norm = 1.0 / (self.m as f64).powi(self.dim as i32);
        for v in data.iter_mut() {
            *v *= norm;
        }
    }
}

/// Periodic convolution `(f ∗ g)(x) = ∫ f(x-y) g(y) dy` on the torus,
/// computed spectrally; the cell measure supplies the `dy`.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    if f.spec() != g.spec() {
        return Err(Error::GridMismatch("convolution needs one common grid".into()));
    }
    let spec = *f.spec();
    let fft = NdFft::new(&spec);
    let mut a: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut b: Vec<Complex64> = g.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.forward(&mut a);
    fft.forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft.inverse(&mut a);
    let h_n = spec.cell_measure();
    let values: Vec<f64> = a.iter().map(|c| c.re * h_n).collect();
    GridFunction::new(spec, values)
}
