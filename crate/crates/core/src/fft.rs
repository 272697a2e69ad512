//! Thin 2-D FFT layer over `rustfft`, with per-thread plan caching.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

fn fft_rows(data: &mut [Complex64], n: usize, inverse: bool) {
    let p = plan(n, inverse);
    let mut scratch = vec![Complex64::default(); p.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(n) {
        p.process_with_scratch(row, &mut scratch);
    }
}

/// Forward 2-D transform of a row-major `n x n` array; output is scaled by
/// `1/n^2` so coefficients are Fourier-series coefficients (`coeff(0)` is the
/// mean of the samples).
pub fn fft2_forward(data: &mut Vec<Complex64>, n: usize) {
    fft_rows(data, n, false);
    let mut t = vec![Complex64::default(); n * n];
    transpose(data, &mut t, n);
    fft_rows(&mut t, n, false);
    transpose(&t, data, n);
    let scale = 1.0 / (n * n) as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Inverse of [`fft2_forward`] (no additional scaling).
pub fn fft2_inverse(data: &mut Vec<Complex64>, n: usize) {
    fft_rows(data, n, true);
    let mut t = vec![Complex64::default(); n * n];
    transpose(data, &mut t, n);
    fft_rows(&mut t, n, true);
    transpose(&t, data, n);
}
