use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoefficientError {
    #[error("filter order must be at least 1")]
    ZeroOrder,
    #[error("{what}: expected {expected} coefficients, found {found}")]
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("branch orders differ: x has order {x}, y has order {y}")]
    OrderMismatch { x: usize, y: usize },
}

/// Classical direct-form coefficients of an order-`n` IIR filter.
///
/// `feedback` holds `a_1 … a_n` and `feedforward` holds `b_0 … b_n`, so the
/// transfer function is `(b_0 + b_1 z^-1 + …) / (1 + a_1 z^-1 + …)`.
/// Stability is not checked.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoefficients {
    feedback: Vec<f64>,
    feedforward: Vec<f64>,
}

impl FilterCoefficients {
    pub fn new(feedback: Vec<f64>, feedforward: Vec<f64>) -> Result<Self, CoefficientError> {
        let n = feedback.len();
        if n == 0 {
            return Err(CoefficientError::ZeroOrder);
        }
        if feedforward.len() != n + 1 {
            return Err(CoefficientError::Length {
                what: "feedforward",
                expected: n + 1,
                found: feedforward.len(),
            });
        }
        Ok(FilterCoefficients {
            feedback,
            feedforward,
        })
    }

    /// Pure delay line: no feedback, output equal to the current input.
    pub fn passthrough(n: usize) -> Result<Self, CoefficientError> {
        let mut b = alloc::vec![0.0; n + 1];
        b[0] = 1.0;
        Self::new(alloc::vec![0.0; n], b)
    }

    pub fn order(&self) -> usize {
        self.feedback.len()
    }

    /// `a_1 … a_n`.
    pub fn feedback(&self) -> &[f64] {
        &self.feedback
    }

    /// `b_0 … b_n`.
    pub fn feedforward(&self) -> &[f64] {
        &self.feedforward
    }

    /// Feedforward taps that reproduce the classical output when applied to
    /// an edge section `(w[k-n], …, w[k-1], u[k])`.
    ///
    /// The section holds the raw input `u[k]` in its last slot, not the
    /// updated `w[k] = u[k] - Σ a_j w[k-j]`. Folding the feedback into the
    /// taps gives `b'_0 = b_0` and `b'_i = b_i - b_0 a_i`.
    pub fn section_taps(&self) -> Vec<f64> {
        let b0 = self.feedforward[0];
        core::iter::once(b0)
            .chain(
                self.feedforward[1..]
                    .iter()
                    .zip(&self.feedback)
                    .map(|(b, a)| b - b0 * a),
            )
            .collect()
    }

    pub(crate) fn check_same_order(x: &Self, y: &Self) -> Result<usize, CoefficientError> {
        if x.order() != y.order() {
            return Err(CoefficientError::OrderMismatch {
                x: x.order(),
                y: y.order(),
            });
        }
        Ok(x.order())
    }
}

fn paired_weights(
    x: Vec<f64>,
    y: Vec<f64>,
    what: &'static str,
) -> Result<(Vec<f64>, Vec<f64>), CoefficientError> {
    if x.is_empty() {
        return Err(CoefficientError::ZeroOrder);
    }
    if y.len() != x.len() {
        return Err(CoefficientError::Length {
            what,
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok((x, y))
}

/// Per-coordinate weights of the merge map `R^2n -> R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeCoefficients {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl MergeCoefficients {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, CoefficientError> {
        let (x, y) = paired_weights(x, y, "merge y weights")?;
        Ok(MergeCoefficients { x, y })
    }

    /// Equal-weight average of the two branches.
    pub fn average(n: usize) -> Self {
        MergeCoefficients {
            x: alloc::vec![0.5; n],
            y: alloc::vec![0.5; n],
        }
    }

    /// Keeps the x branch only.
    pub fn select_x(n: usize) -> Self {
        MergeCoefficients {
            x: alloc::vec![1.0; n],
            y: alloc::vec![0.0; n],
        }
    }

    pub fn order(&self) -> usize {
        self.x.len()
    }

    pub fn x_weights(&self) -> &[f64] {
        &self.x
    }

    pub fn y_weights(&self) -> &[f64] {
        &self.y
    }
}

/// Weights of the joint output `R^2n -> R` over a 2-simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct JointOutputCoefficients {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl JointOutputCoefficients {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, CoefficientError> {
        let (x, y) = paired_weights(x, y, "joint output y weights")?;
        Ok(JointOutputCoefficients { x, y })
    }

    pub fn zeros(n: usize) -> Self {
        JointOutputCoefficients {
            x: alloc::vec![0.0; n],
            y: alloc::vec![0.0; n],
        }
    }

    pub fn order(&self) -> usize {
        self.x.len()
    }

    pub fn x_weights(&self) -> &[f64] {
        &self.x
    }

    pub fn y_weights(&self) -> &[f64] {
        &self.y
    }
}
