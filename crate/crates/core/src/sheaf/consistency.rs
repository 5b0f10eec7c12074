//! Path-agreement check for filter-sheaf networks.
//!
//! For every 2-simplex and every vertex of it, the two composites through
//! the edges meeting at that vertex must agree on the coordinates both edges
//! determine. Input-layer vertical squares `i ∘ F_state = F_input ∘ i` must
//! commute for every face relation. Output-layer squares are not required
//! to commute: the output maps around a 2-simplex are zero by construction
//! while the edge outputs are not.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use super::network::{EdgeKind, FilterSheafNetwork, Layer};
use crate::linmap::LinearMap;
use crate::simplex::Simplex;

/// Tolerance used when building and gluing networks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `cell -> via.0 -> target` and `cell -> via.1 -> target` disagree.
    PathDisagreement {
        cell: Simplex,
        via: (Simplex, Simplex),
        target: Simplex,
        layer: Layer,
        deviation: f64,
    },
    /// The vertical square of `cell -> face` in `layer` does not commute.
    SquareDisagreement {
        cell: Simplex,
        face: Simplex,
        layer: Layer,
        deviation: f64,
    },
    /// Two flows write overlapping coordinates of one vertex.
    WriteConflict {
        vertex: Simplex,
        first: Simplex,
        second: Simplex,
        overlap: Range<usize>,
    },
    Malformed { at: String, reason: String },
}

impl Violation {
    /// The simplices a violation is about, for matching in tests and tools.
    pub fn path_pair(&self) -> Option<(&Simplex, &Simplex, &Simplex, &Simplex)> {
        match self {
            Violation::PathDisagreement {
                cell, via, target, ..
            } => Some((cell, &via.0, &via.1, target)),
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PathDisagreement {
                cell,
                via,
                target,
                layer,
                deviation,
            } => write!(
                f,
                "path {cell} -> {} -> {target} vs {cell} -> {} -> {target} ({layer} layer): max deviation {deviation:e}",
                via.0, via.1
            ),
            Violation::SquareDisagreement {
                cell,
                face,
                layer,
                deviation,
            } => write!(
                f,
                "square {cell} -> {face} ({layer} layer): max deviation {deviation:e}"
            ),
            Violation::WriteConflict {
                vertex,
                first,
                second,
                overlap,
            } => write!(
                f,
                "conflict at vertex {vertex}: {first} and {second} both write state coordinates {}..{}",
                overlap.start, overlap.end
            ),
            Violation::Malformed { at, reason } => write!(f, "malformed {at}: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConsistencyReport {
    pub violations: Vec<Violation>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter()
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("consistent");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn intersect(a: &Range<usize>, b: &Range<usize>) -> Range<usize> {
    a.start.max(b.start)..a.end.min(b.end).max(a.start.max(b.start))
}

/// Largest absolute difference over `rows`; NaN entries count as infinite.
fn deviation_on(a: &LinearMap, b: &LinearMap, rows: Range<usize>) -> f64 {
    let mut worst: f64 = 0.0;
    for r in rows {
        for (x, y) in a.row(r).iter().zip(b.row(r)) {
            let d = (x - y).abs();
            worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
        }
    }
    worst
}

fn with_basis(net: &FilterSheafNetwork, cell: &Simplex, m: LinearMap) -> Option<LinearMap> {
    match net.section_basis(cell) {
        Some(e) => m.compose(e).ok(),
        None => Some(m),
    }
}

/// Checks every path pair and vertical square of `net` against `tol`.
/// Structural problems are reported, never raised.
pub fn check_consistency(net: &FilterSheafNetwork, tol: f64) -> ConsistencyReport {
    let mut out = Vec::new();
    check_shapes(net, &mut out);
    if !out.is_empty() {
        return ConsistencyReport { violations: out };
    }
    check_paths(net, tol, &mut out);
    check_squares(net, tol, &mut out);
    check_writers(net, &mut out);
    ConsistencyReport { violations: out }
}

fn malformed(at: String, reason: impl Into<String>) -> Violation {
    Violation::Malformed {
        at,
        reason: reason.into(),
    }
}

fn check_shapes(net: &FilterSheafNetwork, out: &mut Vec<Violation>) {
    for cell in net.complex().iter() {
        let Some(cs) = net.stalks(cell) else {
            out.push(malformed(format!("{cell}"), "no stalks"));
            continue;
        };
        match net.vertical(cell) {
            Some(v) => {
                if v.input.shape() != (cs.input, cs.state) || v.output.shape() != (cs.output, cs.state) {
                    out.push(malformed(format!("{cell}"), "vertical map shape"));
                }
            }
            None => out.push(malformed(format!("{cell}"), "no vertical maps")),
        }
        if let Some(e) = net.section_basis(cell) {
            if e.rows() != cs.state {
                out.push(malformed(format!("{cell}"), "section basis shape"));
            }
        }
        if cell.dimension() == 0 {
            continue;
        }
        let Ok(faces) = cell.faces() else { continue };
        for face in faces {
            let Some(fs) = net.stalks(&face) else {
                out.push(malformed(format!("{face}"), "no stalks"));
                continue;
            };
            let Some(r) = net.restriction(cell, &face) else {
                out.push(malformed(format!("{cell} -> {face}"), "missing restriction"));
                continue;
            };
            for layer in Layer::ALL {
                if r.layer(layer).shape() != (fs.get(layer), cs.get(layer)) {
                    out.push(malformed(
                        format!("{cell} -> {face}"),
                        format!("{layer} map has shape {:?}", r.layer(layer).shape()),
                    ));
                }
            }
            if r.support.as_ref().is_some_and(|s| s.end > fs.state || s.start > s.end) {
                out.push(malformed(format!("{cell} -> {face}"), "support out of range"));
            }
        }
        if cell.dimension() == 1 {
            match net.edge_role(cell) {
                None => out.push(malformed(format!("{cell}"), "edge without role")),
                Some(role) if role.kind == EdgeKind::Causal && role.flow.is_none() => {
                    out.push(malformed(format!("{cell}"), "causal edge without direction"))
                }
                _ => {}
            }
        }
    }
}

fn check_paths(net: &FilterSheafNetwork, tol: f64, out: &mut Vec<Violation>) {
    for cell in net.complex().of_dimension(2) {
        let Ok(edges) = cell.faces() else { continue };
        for v in cell.vertices() {
            let target = Simplex::vertex(v.clone());
            let through: Vec<&Simplex> = edges.iter().filter(|e| e.contains_vertex(v)).collect();
            let [t1, t2] = through[..] else { continue };
            for layer in Layer::ALL {
                let (Some(top1), Some(top2), Some(down1), Some(down2)) = (
                    net.restriction(cell, t1),
                    net.restriction(cell, t2),
                    net.restriction(t1, &target),
                    net.restriction(t2, &target),
                ) else {
                    continue;
                };
                let rows = intersect(&down1.determined(layer), &down2.determined(layer));
                if rows.is_empty() {
                    continue;
                }
                let compose = |down: &LinearMap, top: &LinearMap| {
                    let m = down.compose(top).ok()?;
                    if layer == Layer::State {
                        with_basis(net, cell, m)
                    } else {
                        Some(m)
                    }
                };
                let (Some(a), Some(b)) = (
                    compose(down1.layer(layer), top1.layer(layer)),
                    compose(down2.layer(layer), top2.layer(layer)),
                ) else {
                    continue;
                };
                let deviation = deviation_on(&a, &b, rows);
                if deviation > tol {
                    out.push(Violation::PathDisagreement {
                        cell: cell.clone(),
                        via: (t1.clone(), t2.clone()),
                        target: target.clone(),
                        layer,
                        deviation,
                    });
                }
            }
        }
    }
}

fn check_squares(net: &FilterSheafNetwork, tol: f64, out: &mut Vec<Violation>) {
    for (cell, face, r) in net.restrictions() {
        let (Some(vc), Some(vf)) = (net.vertical(cell), net.vertical(face)) else {
            continue;
        };
        if vf.input.rows() == 0 {
            continue;
        }
        let lhs = vf.input.compose(&r.state).ok().and_then(|m| with_basis(net, cell, m));
        let rhs = r.input.compose(&vc.input).ok().and_then(|m| with_basis(net, cell, m));
        let (Some(lhs), Some(rhs)) = (lhs, rhs) else { continue };
        let deviation = deviation_on(&lhs, &rhs, 0..lhs.rows());
        if deviation > tol {
            out.push(Violation::SquareDisagreement {
                cell: cell.clone(),
                face: face.clone(),
                layer: Layer::Input,
                deviation,
            });
        }
    }
}

fn check_writers(net: &FilterSheafNetwork, out: &mut Vec<Violation>) {
    for v in net.complex().of_dimension(0) {
        let ws = net.writers(v);
        for (i, a) in ws.iter().enumerate() {
            for b in &ws[i + 1..] {
                let o = intersect(&a.support, &b.support);
                if !o.is_empty() {
                    out.push(Violation::WriteConflict {
                        vertex: v.clone(),
                        first: a.edge.clone(),
                        second: b.edge.clone(),
                        overlap: o,
                    });
                }
            }
        }
    }
    let periodic = net.periodic();
    for (i, (sink, source)) in periodic.iter().enumerate() {
        if periodic[..i].iter().any(|(_, s)| s == source) {
            out.push(malformed(
                format!("{sink} -> {source}"),
                "source already fed by another identification",
            ));
        }
        if !net.writers(source).is_empty() {
            out.push(malformed(
                format!("{sink} -> {source}"),
                "identification target is written by a flow",
            ));
        }
    }
}
