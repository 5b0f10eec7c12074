//! Constructors for the canonical sheaf maps.
//!
//! Edge sections of an order-`n` filter are laid out as
//! `(x_0, …, x_{n-1}, x)`: the delay line, oldest first, followed by the
//! injected input. Two-branch stalks put the x block first, then the y
//! block, each with its input last: `(x_0, …, x_{n-1}, x, y_0, …, y_{n-1}, y)`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use super::coefficients::{
    CoefficientError, FilterCoefficients, JointOutputCoefficients, MergeCoefficients,
};
use crate::linmap::LinearMap;

/// Shift-and-feedback update `R^{n+1} -> R^n`:
/// `(x_0, …, x_{n-1}, x) ↦ (x_1, …, x_{n-1}, x - Σ_j a_j x_{n-j})`.
pub fn state_update_map(c: &FilterCoefficients) -> LinearMap {
    let n = c.order();
    let mut m = LinearMap::zeros(n, n + 1);
    for i in 0..n - 1 {
        m.set(i, i + 1, 1.0);
    }
    m.set(n - 1, n, 1.0);
    for (j, a) in (1..=n).zip(c.feedback()) {
        let col = n - j;
        m.set(n - 1, col, m.get(n - 1, col) - a);
    }
    m
}

/// Feedforward output `R^{n+1} -> R`: `b_0 x + Σ_i b_i x_{n-i}`, reading
/// the coefficients verbatim.
pub fn output_map(c: &FilterCoefficients) -> LinearMap {
    taps_to_map(c.feedforward())
}

/// Output map installed on causal edges. Uses [`FilterCoefficients::section_taps`]
/// so the edge emits the classical response `b_0 w[k] + Σ_i b_i w[k-i]`.
pub fn edge_output_map(c: &FilterCoefficients) -> LinearMap {
    taps_to_map(&c.section_taps())
}

fn taps_to_map(b: &[f64]) -> LinearMap {
    let n = b.len() - 1;
    let mut m = LinearMap::zeros(1, n + 1);
    m.set(0, n, b[0]);
    for (i, bi) in b.iter().enumerate().skip(1) {
        m.set(0, n - i, *bi);
    }
    m
}

/// Retrieval `r: R^{n+1} -> R^n` dropping the injected input.
pub fn retrieval_map(n: usize) -> LinearMap {
    let mut m = LinearMap::zeros(n, n + 1);
    for i in 0..n {
        m.set(i, i, 1.0);
    }
    m
}

/// Input read-out `i: R^{n+1} -> R` selecting the injected input.
pub fn input_map(n: usize) -> LinearMap {
    let mut m = LinearMap::zeros(1, n + 1);
    m.set(0, n, 1.0);
    m
}

pub fn retrieval_and_input_maps(n: usize) -> (LinearMap, LinearMap) {
    (retrieval_map(n), input_map(n))
}

/// Coordinate-wise merge `R^2n -> R^n`: `(x, y) ↦ (a_k x_k + b_k y_k)_k`.
pub fn merge_map(mc: &MergeCoefficients) -> LinearMap {
    let n = mc.order();
    let mut m = LinearMap::zeros(n, 2 * n);
    for k in 0..n {
        m.set(k, k, mc.x_weights()[k]);
        m.set(k, n + k, mc.y_weights()[k]);
    }
    m
}

/// Joint output `R^2n -> R`: `Σ a_i x_i + Σ b_i y_i`.
pub fn joint_output_map(jc: &JointOutputCoefficients) -> LinearMap {
    let mut w = Vec::with_capacity(2 * jc.order());
    w.extend_from_slice(jc.x_weights());
    w.extend_from_slice(jc.y_weights());
    LinearMap::row_vector(&w)
}

/// Both branch updates side by side, `R^{2n+2} -> R^{2n}`.
pub fn combined_state_update(
    cx: &FilterCoefficients,
    cy: &FilterCoefficients,
) -> Result<LinearMap, CoefficientError> {
    FilterCoefficients::check_same_order(cx, cy)?;
    Ok(state_update_map(cx).direct_sum(&state_update_map(cy)))
}

/// The projections between two-branch stalks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchProjection {
    /// `R^2n -> R^n`, x delay line.
    X,
    /// `R^2n -> R^n`, y delay line.
    Y,
    /// `R^{2n+2} -> R^2n`, both delay lines without inputs.
    XY,
    /// `R^{2n+2} -> R^{n+1}`, x delay line and x input.
    XI,
    /// `R^{2n+2} -> R^{n+1}`, y delay line and y input.
    YI,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown branch projection `{0}` (expected one of x, y, xy, xi, yi)")]
pub struct UnknownProjection(pub alloc::string::String);

impl FromStr for BranchProjection {
    type Err = UnknownProjection;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.strip_prefix("r_").unwrap_or(s);
        match key {
            "x" => Ok(BranchProjection::X),
            "y" => Ok(BranchProjection::Y),
            "xy" => Ok(BranchProjection::XY),
            "xi" => Ok(BranchProjection::XI),
            "yi" => Ok(BranchProjection::YI),
            _ => Err(UnknownProjection(s.into())),
        }
    }
}

impl fmt::Display for BranchProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchProjection::X => "r_x",
            BranchProjection::Y => "r_y",
            BranchProjection::XY => "r_xy",
            BranchProjection::XI => "r_xi",
            BranchProjection::YI => "r_yi",
        })
    }
}

fn selection(cols: usize, picks: impl Iterator<Item = usize>) -> LinearMap {
    let picks: Vec<usize> = picks.collect();
    let mut m = LinearMap::zeros(picks.len(), cols);
    for (i, c) in picks.into_iter().enumerate() {
        m.set(i, c, 1.0);
    }
    m
}

pub fn branch_projection(kind: BranchProjection, n: usize) -> LinearMap {
    match kind {
        BranchProjection::X => selection(2 * n, 0..n),
        BranchProjection::Y => selection(2 * n, n..2 * n),
        BranchProjection::XY => selection(2 * n + 2, (0..n).chain(n + 1..2 * n + 1)),
        BranchProjection::XI => selection(2 * n + 2, 0..=n),
        BranchProjection::YI => selection(2 * n + 2, n + 1..2 * n + 2),
    }
}

/// Copies a shared apex delay line into both branches:
/// `(w, x, y) ↦ (w, x, w, y)`, `R^{n+2} -> R^{2n+2}`.
pub fn apex_duplication(n: usize) -> LinearMap {
    let mut m = LinearMap::zeros(2 * n + 2, n + 2);
    for i in 0..n {
        m.set(i, i, 1.0);
        m.set(n + 1 + i, i, 1.0);
    }
    m.set(n, n, 1.0);
    m.set(2 * n + 1, n + 1, 1.0);
    m
}

/// Embeds `R^k` as coordinates `offset..offset+k` of `R^total`.
pub fn block_embedding(total: usize, offset: usize, k: usize) -> LinearMap {
    selection(total, offset..offset + k).transpose()
}
