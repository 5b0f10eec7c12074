//! Scalar difference-equation reference filters, independent of the sheaf
//! machinery.

use alloc::vec;
use alloc::vec::Vec;

use crate::sheaf::FilterCoefficients;

/// Direct-form II recursion with its own delay line, newest sample first.
#[derive(Debug, Clone)]
pub struct ReferenceFilter {
    a: Vec<f64>,
    b: Vec<f64>,
    w: Vec<f64>,
}

impl ReferenceFilter {
    pub fn new(c: &FilterCoefficients) -> Self {
        ReferenceFilter {
            a: c.feedback().to_vec(),
            b: c.feedforward().to_vec(),
            w: vec![0.0; c.order()],
        }
    }

    pub fn reset(&mut self) {
        self.w.iter_mut().for_each(|x| *x = 0.0);
    }

    /// Consumes `u[k]`, returns `y[k]`.
    pub fn process(&mut self, u: f64) -> f64 {
        let mut w0 = u;
        for (aj, wj) in self.a.iter().zip(&self.w) {
            w0 -= aj * wj;
        }
        let mut y = self.b[0] * w0;
        for (bi, wi) in self.b[1..].iter().zip(&self.w) {
            y += bi * wi;
        }
        self.w.rotate_right(1);
        if let Some(first) = self.w.first_mut() {
            *first = w0;
        }
        y
    }
}

/// `y[k] = b0 w[k] + Σ b_i w[k-i]` with `w[k] = u[k] - Σ a_j w[k-j]`, zero
/// history.
pub fn iir_reference(c: &FilterCoefficients, input: &[f64]) -> Vec<f64> {
    let mut f = ReferenceFilter::new(c);
    input.iter().map(|&u| f.process(u)).collect()
}

/// Causal convolution truncated to the input length.
pub fn convolve_reference(h: &[f64], input: &[f64]) -> Vec<f64> {
    (0..input.len())
        .map(|k| {
            h.iter()
                .enumerate()
                .take(k + 1)
                .map(|(i, hi)| hi * input[k - i])
                .sum()
        })
        .collect()
}
