//! The filter-sheaf network: a complex with per-simplex stalks in three
//! layers, restriction maps along every face relation, the vertical
//! input/output maps of each stalk, and the causal wiring used for
//! execution.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use thiserror::Error;

use super::coefficients::CoefficientError;
use super::consistency::{check_consistency, ConsistencyReport, DEFAULT_TOLERANCE};
use crate::linmap::LinearMap;
use crate::simplex::{Simplex, SimplexError, SimplicialComplex, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Input,
    State,
    Output,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Input, Layer::State, Layer::Output];
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::Input => "input",
            Layer::State => "state",
            Layer::Output => "output",
        })
    }
}

/// Stalk dimensions of one simplex in the input, state and output layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LayerStalks {
    pub input: usize,
    pub state: usize,
    pub output: usize,
}

impl LayerStalks {
    pub const fn new(input: usize, state: usize, output: usize) -> Self {
        LayerStalks {
            input,
            state,
            output,
        }
    }

    pub fn get(&self, layer: Layer) -> usize {
        match layer {
            Layer::Input => self.input,
            Layer::State => self.state,
            Layer::Output => self.output,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Causal,
    Concurrent,
}

/// Direction of evaluation along an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub upstream: Simplex,
    pub downstream: Simplex,
}

/// Role of a 1-simplex. Causal edges always carry a flow. A concurrent edge
/// with a flow is a propagating extension; one without is evaluated from
/// the 2-simplex it bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRole {
    pub kind: EdgeKind,
    pub flow: Option<Flow>,
}

/// The three layer maps attached to one face relation `cell -> face`.
///
/// `support`, when set, restricts the state-layer map to a block of target
/// coordinates: the map determines only those coordinates of the face stalk
/// and leaves the rest to other incident edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub input: LinearMap,
    pub state: LinearMap,
    pub output: LinearMap,
    pub support: Option<Range<usize>>,
}

impl Restriction {
    /// State map as given, zero maps in the other two layers.
    pub fn state_only(state: LinearMap, cell: LayerStalks, face: LayerStalks) -> Self {
        Restriction {
            input: LinearMap::zeros(face.input, cell.input),
            state,
            output: LinearMap::zeros(face.output, cell.output),
            support: None,
        }
    }

    pub fn with_support(mut self, support: Range<usize>) -> Self {
        self.support = Some(support);
        self
    }

    pub fn layer(&self, layer: Layer) -> &LinearMap {
        match layer {
            Layer::Input => &self.input,
            Layer::State => &self.state,
            Layer::Output => &self.output,
        }
    }

    pub fn layer_mut(&mut self, layer: Layer) -> &mut LinearMap {
        match layer {
            Layer::Input => &mut self.input,
            Layer::State => &mut self.state,
            Layer::Output => &mut self.output,
        }
    }

    /// Target coordinates this map determines in `layer`.
    pub fn determined(&self, layer: Layer) -> Range<usize> {
        let rows = self.layer(layer).rows();
        match (&self.support, layer) {
            (Some(s), Layer::State) => s.start.min(rows)..s.end.min(rows),
            _ => 0..rows,
        }
    }
}

/// Vertical maps of the per-simplex topological filter: state to input and
/// state to output.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertical {
    pub input: LinearMap,
    pub output: LinearMap,
}

impl Vertical {
    pub fn zeros(stalks: LayerStalks) -> Self {
        Vertical {
            input: LinearMap::zeros(stalks.input, stalks.state),
            output: LinearMap::zeros(stalks.output, stalks.state),
        }
    }

    pub fn layer(&self, layer: Layer) -> Option<&LinearMap> {
        match layer {
            Layer::Input => Some(&self.input),
            Layer::State => None,
            Layer::Output => Some(&self.output),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Coefficients(#[from] CoefficientError),
    #[error("a chain needs at least one edge")]
    EmptyChain,
    #[error("no stalks assigned to {0}")]
    MissingStalks(Simplex),
    #[error("no restriction maps for {cell} -> {face}")]
    MissingRestriction { cell: Simplex, face: Simplex },
    #[error("restriction {cell} -> {face} is not a face relation of the complex")]
    StrayRestriction { cell: Simplex, face: Simplex },
    #[error("shape mismatch at {at}: expected {expected:?}, found {found:?}")]
    Shape {
        at: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("edge {0} has no role")]
    MissingEdgeRole(Simplex),
    #[error("causal edge {0} has no flow direction")]
    CausalWithoutFlow(Simplex),
    #[error("flow on {0} must run between its two distinct vertices")]
    BadFlow(Simplex),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("simplex {0} occurs in both networks")]
    DuplicateSimplex(Simplex),
    #[error("stalk mismatch at {vertex}: {left:?} vs {right:?}")]
    StalkMismatch {
        vertex: Simplex,
        left: LayerStalks,
        right: LayerStalks,
    },
    #[error("conflict at {vertex}: {first} and {second} both write state coordinates {overlap:?}")]
    WriteConflict {
        vertex: Simplex,
        first: Simplex,
        second: Simplex,
        overlap: Range<usize>,
    },
    #[error("{vertex} cannot take a concurrent extension: {reason}")]
    NotExtendable { vertex: Simplex, reason: String },
    #[error("periodic identification {sink} -> {target}: {reason}")]
    BadPeriodic {
        sink: Simplex,
        target: Simplex,
        reason: String,
    },
    #[error("network is inconsistent:\n{0}")]
    Inconsistent(ConsistencyReport),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Parts {
    pub complex: SimplicialComplex,
    pub stalks: BTreeMap<Simplex, LayerStalks>,
    pub vertical: BTreeMap<Simplex, Vertical>,
    pub restrictions: BTreeMap<(Simplex, Simplex), Restriction>,
    pub edges: BTreeMap<Simplex, EdgeRole>,
    pub section_bases: BTreeMap<Simplex, LinearMap>,
    pub periodic: Vec<(Simplex, Simplex)>,
}

/// Incremental assembly of a [`FilterSheafNetwork`].
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    pub(crate) parts: Parts,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a simplex (and its faces to the complex) with the given stalks
    /// and zero vertical maps.
    pub fn add_cell(&mut self, cell: Simplex, stalks: LayerStalks) -> Result<&mut Self, NetworkError> {
        self.parts.complex.add_simplex(cell.clone())?;
        self.parts.vertical.insert(cell.clone(), Vertical::zeros(stalks));
        self.parts.stalks.insert(cell, stalks);
        Ok(self)
    }

    pub fn set_vertical(&mut self, cell: &Simplex, input: LinearMap, output: LinearMap) -> &mut Self {
        self.parts.vertical.insert(cell.clone(), Vertical { input, output });
        self
    }

    pub fn set_restriction(&mut self, cell: &Simplex, face: &Simplex, r: Restriction) -> &mut Self {
        self.parts.restrictions.insert((cell.clone(), face.clone()), r);
        self
    }

    /// Registers an edge role; `flow` names the upstream and downstream
    /// vertex identifiers.
    pub fn set_edge(&mut self, edge: &Simplex, kind: EdgeKind, flow: Option<(&str, &str)>) -> &mut Self {
        let flow = flow.map(|(u, d)| Flow {
            upstream: Simplex::vertex(u),
            downstream: Simplex::vertex(d),
        });
        self.parts.edges.insert(edge.clone(), EdgeRole { kind, flow });
        self
    }

    pub fn set_section_basis(&mut self, cell: &Simplex, basis: LinearMap) -> &mut Self {
        self.parts.section_bases.insert(cell.clone(), basis);
        self
    }

    /// At the end of every tick the state at `sink` is copied to `source`.
    pub fn add_periodic(&mut self, sink: &str, source: &str) -> &mut Self {
        self.parts
            .periodic
            .push((Simplex::vertex(sink), Simplex::vertex(source)));
        self
    }

    pub fn stalks(&self, cell: &Simplex) -> Option<LayerStalks> {
        self.parts.stalks.get(cell).copied()
    }

    /// Structural validation only.
    pub fn build_unchecked(self) -> Result<FilterSheafNetwork, NetworkError> {
        validate(&self.parts)?;
        Ok(FilterSheafNetwork { parts: self.parts })
    }

    /// Structural validation followed by the consistency check at `tol`.
    pub fn build(self, tol: f64) -> Result<FilterSheafNetwork, NetworkError> {
        let net = self.build_unchecked()?;
        net.ensure_consistent(tol)?;
        Ok(net)
    }
}

fn expect_shape(at: impl FnOnce() -> String, m: &LinearMap, expected: (usize, usize)) -> Result<(), NetworkError> {
    if m.shape() != expected {
        return Err(NetworkError::Shape {
            at: at(),
            expected,
            found: m.shape(),
        });
    }
    Ok(())
}

fn validate(p: &Parts) -> Result<(), NetworkError> {
    for s in p.complex.iter() {
        let st = *p.stalks.get(s).ok_or_else(|| NetworkError::MissingStalks(s.clone()))?;
        let v = p.vertical.get(s).ok_or_else(|| NetworkError::MissingStalks(s.clone()))?;
        expect_shape(|| format!("vertical input of {s}"), &v.input, (st.input, st.state))?;
        expect_shape(|| format!("vertical output of {s}"), &v.output, (st.output, st.state))?;
        if let Some(basis) = p.section_bases.get(s) {
            if basis.rows() != st.state {
                return Err(NetworkError::Shape {
                    at: format!("section basis of {s}"),
                    expected: (st.state, basis.cols()),
                    found: basis.shape(),
                });
            }
        }
        if s.dimension() == 0 {
            continue;
        }
        for face in s.faces()? {
            let fst = p.stalks[&face];
            let key = (s.clone(), face.clone());
            let r = p.restrictions.get(&key).ok_or_else(|| NetworkError::MissingRestriction {
                cell: s.clone(),
                face: face.clone(),
            })?;
            for layer in Layer::ALL {
                expect_shape(
                    || format!("{layer} map {s} -> {face}"),
                    r.layer(layer),
                    (fst.get(layer), st.get(layer)),
                )?;
            }
            if let Some(sup) = &r.support {
                if sup.start > sup.end || sup.end > fst.state {
                    return Err(NetworkError::Shape {
                        at: format!("support of {s} -> {face}"),
                        expected: (0, fst.state),
                        found: (sup.start, sup.end),
                    });
                }
            }
        }
        if s.dimension() == 1 {
            let role = p.edges.get(s).ok_or_else(|| NetworkError::MissingEdgeRole(s.clone()))?;
            match &role.flow {
                None if role.kind == EdgeKind::Causal => {
                    return Err(NetworkError::CausalWithoutFlow(s.clone()))
                }
                Some(f) => {
                    let ok = f.upstream != f.downstream
                        && f.upstream.is_face_of(s)
                        && f.downstream.is_face_of(s);
                    if !ok {
                        return Err(NetworkError::BadFlow(s.clone()));
                    }
                }
                None => {}
            }
        }
    }
    for (cell, face) in p.restrictions.keys() {
        if !p.complex.contains(cell) || !face.is_face_of(cell) || face.dimension() + 1 != cell.dimension() {
            return Err(NetworkError::StrayRestriction {
                cell: cell.clone(),
                face: face.clone(),
            });
        }
    }
    for (sink, source) in &p.periodic {
        let (Some(a), Some(b)) = (p.stalks.get(sink), p.stalks.get(source)) else {
            return Err(NetworkError::BadPeriodic {
                sink: sink.clone(),
                target: source.clone(),
                reason: "unknown vertex".into(),
            });
        };
        if a.state != b.state {
            return Err(NetworkError::BadPeriodic {
                sink: sink.clone(),
                target: source.clone(),
                reason: format!("state dimensions {} and {} differ", a.state, b.state),
            });
        }
    }
    Ok(())
}

/// Complex plus stalks and sheaf maps in the input, state and output
/// layers, with causal wiring for execution. Immutable once built except
/// through [`FilterSheafNetwork::restriction_mut`].
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSheafNetwork {
    pub(crate) parts: Parts,
}

/// A face map that writes into a vertex: the edge and the coordinates it
/// determines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Writer {
    pub edge: Simplex,
    pub support: Range<usize>,
}

impl FilterSheafNetwork {
    pub fn complex(&self) -> &SimplicialComplex {
        &self.parts.complex
    }

    pub fn stalks(&self, s: &Simplex) -> Option<LayerStalks> {
        self.parts.stalks.get(s).copied()
    }

    pub fn vertical(&self, s: &Simplex) -> Option<&Vertical> {
        self.parts.vertical.get(s)
    }

    pub fn restriction(&self, cell: &Simplex, face: &Simplex) -> Option<&Restriction> {
        self.parts.restrictions.get(&(cell.clone(), face.clone()))
    }

    pub fn restriction_map(&self, cell: &Simplex, face: &Simplex, layer: Layer) -> Option<&LinearMap> {
        self.restriction(cell, face).map(|r| r.layer(layer))
    }

    /// Direct access to a restriction map. Skips validation: re-run the
    /// consistency check after editing.
    pub fn restriction_mut(&mut self, cell: &Simplex, face: &Simplex, layer: Layer) -> Option<&mut LinearMap> {
        self.parts
            .restrictions
            .get_mut(&(cell.clone(), face.clone()))
            .map(|r| r.layer_mut(layer))
    }

    pub fn restrictions(&self) -> impl Iterator<Item = (&Simplex, &Simplex, &Restriction)> {
        self.parts.restrictions.iter().map(|((c, f), r)| (c, f, r))
    }

    pub fn edge_role(&self, edge: &Simplex) -> Option<&EdgeRole> {
        self.parts.edges.get(edge)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Simplex, &EdgeRole)> {
        self.parts.edges.iter()
    }

    pub fn causal_edges(&self) -> impl Iterator<Item = &Simplex> {
        self.parts
            .edges
            .iter()
            .filter(|(_, r)| r.kind == EdgeKind::Causal)
            .map(|(e, _)| e)
    }

    /// Embedding of admissible sections into the state stalk, if the cell
    /// restricts them to a subspace.
    pub fn section_basis(&self, cell: &Simplex) -> Option<&LinearMap> {
        self.parts.section_bases.get(cell)
    }

    /// `(sink, source)` pairs copied at every tick boundary.
    pub fn periodic(&self) -> &[(Simplex, Simplex)] {
        &self.parts.periodic
    }

    /// Looks up a simplex of the complex by its vertex identifiers.
    pub fn find(&self, vertices: &[&str]) -> Option<&Simplex> {
        let probe = Simplex::new(vertices.iter().copied()).ok()?;
        self.parts.complex.get(&probe)
    }

    pub fn vertex(&self, id: &str) -> Option<&Simplex> {
        self.parts.complex.get(&Simplex::vertex(id))
    }

    /// Edges and supports that write into `vertex` along a flow.
    pub fn writers(&self, vertex: &Simplex) -> Vec<Writer> {
        self.parts
            .edges
            .iter()
            .filter_map(|(e, role)| {
                let f = role.flow.as_ref()?;
                if &f.downstream != vertex {
                    return None;
                }
                let r = self.restriction(e, vertex)?;
                Some(Writer {
                    edge: e.clone(),
                    support: r.determined(Layer::State),
                })
            })
            .collect()
    }

    /// Edges reading `vertex` as their upstream end.
    pub fn readers(&self, vertex: &Simplex) -> Vec<&Simplex> {
        self.parts
            .edges
            .iter()
            .filter(|(_, r)| r.flow.as_ref().is_some_and(|f| &f.upstream == vertex))
            .map(|(e, _)| e)
            .collect()
    }

    pub fn check(&self, tol: f64) -> ConsistencyReport {
        check_consistency(self, tol)
    }

    pub(crate) fn ensure_consistent(&self, tol: f64) -> Result<(), NetworkError> {
        let report = check_consistency(self, tol);
        if report.is_consistent() {
            Ok(())
        } else {
            Err(NetworkError::Inconsistent(report))
        }
    }

    pub fn into_builder(self) -> NetworkBuilder {
        NetworkBuilder { parts: self.parts }
    }

    /// Renames vertices. Fails if two vertices would receive the same name.
    pub fn relabel(&self, mut f: impl FnMut(&str) -> VertexId) -> Result<Self, NetworkError> {
        let mut names = BTreeMap::new();
        for v in self.parts.complex.of_dimension(0) {
            let id = &v.vertices()[0];
            names.insert(id.clone(), f(id));
        }
        let distinct: BTreeSet<&VertexId> = names.values().collect();
        if distinct.len() != names.len() {
            let dup = names
                .values()
                .find(|n| names.values().filter(|m| m == n).count() > 1)
                .cloned()
                .unwrap_or_default();
            return Err(NetworkError::DuplicateSimplex(Simplex::vertex(dup)));
        }
        let map = |s: &Simplex| s.relabel(|v| names[v].clone());
        let p = &self.parts;
        let mut out = Parts::default();
        for s in by_dimension(&p.complex) {
            out.complex.add_simplex(map(s)?)?;
        }
        for (s, st) in &p.stalks {
            out.stalks.insert(map(s)?, *st);
        }
        for (s, v) in &p.vertical {
            out.vertical.insert(map(s)?, v.clone());
        }
        for ((c, fc), r) in &p.restrictions {
            out.restrictions.insert((map(c)?, map(fc)?), r.clone());
        }
        for (e, role) in &p.edges {
            let flow = match &role.flow {
                Some(fl) => Some(Flow {
                    upstream: map(&fl.upstream)?,
                    downstream: map(&fl.downstream)?,
                }),
                None => None,
            };
            out.edges.insert(map(e)?, EdgeRole { kind: role.kind, flow });
        }
        for (s, b) in &p.section_bases {
            out.section_bases.insert(map(s)?, b.clone());
        }
        for (a, b) in &p.periodic {
            out.periodic.push((map(a)?, map(b)?));
        }
        Ok(FilterSheafNetwork { parts: out })
    }

    pub fn with_prefix(&self, prefix: &str) -> Result<Self, NetworkError> {
        self.relabel(|v| format!("{prefix}{v}"))
    }

    /// Entry-wise comparison of two networks: same complex, stalks, roles,
    /// supports and periodic pairs, with every map equal within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let (a, b) = (&self.parts, &other.parts);
        let maps_eq = |x: &LinearMap, y: &LinearMap| x.approx_eq(y, tol);
        a.complex == b.complex
            && a.stalks == b.stalks
            && a.edges == b.edges
            && a.periodic == b.periodic
            && a.vertical.len() == b.vertical.len()
            && a.vertical.iter().all(|(s, v)| {
                b.vertical
                    .get(s)
                    .is_some_and(|w| maps_eq(&v.input, &w.input) && maps_eq(&v.output, &w.output))
            })
            && a.restrictions.len() == b.restrictions.len()
            && a.restrictions.iter().all(|(k, r)| {
                b.restrictions.get(k).is_some_and(|q| {
                    r.support == q.support && Layer::ALL.iter().all(|&l| maps_eq(r.layer(l), q.layer(l)))
                })
            })
            && a.section_bases.len() == b.section_bases.len()
            && a.section_bases
                .iter()
                .all(|(s, m)| b.section_bases.get(s).is_some_and(|n| maps_eq(m, n)))
    }

    fn is_written(&self, v: &Simplex) -> bool {
        self.parts
            .edges
            .values()
            .any(|r| r.flow.as_ref().is_some_and(|f| &f.downstream == v))
    }

    fn is_read(&self, v: &Simplex) -> bool {
        self.parts
            .edges
            .values()
            .any(|r| r.flow.as_ref().is_some_and(|f| &f.upstream == v))
    }

    /// Re-threads periodic identifications after gluing: pairs whose sink
    /// gained a reader are dropped, and sources that gained a writer are
    /// followed through the remaining pairs to the new boundary.
    pub(crate) fn normalize_periodic(&mut self) {
        let original = self.parts.periodic.clone();
        let mut result: Vec<(Simplex, Simplex)> = Vec::new();
        for (sink, source) in &original {
            if self.is_read(sink) {
                continue;
            }
            let mut target = source.clone();
            let mut hops = 0;
            while self.is_written(&target) && hops <= original.len() {
                match original.iter().find(|(s, _)| *s == target) {
                    Some((_, next)) => target = next.clone(),
                    None => break,
                }
                hops += 1;
            }
            if !self.is_written(&target) && !result.iter().any(|p| p.0 == *sink && p.1 == target) {
                result.push((sink.clone(), target));
            }
        }
        self.parts.periodic = result;
    }
}

/// Simplices of `c` in ascending dimension, so faces are inserted before
/// the cells that would otherwise create them with default orientation.
fn by_dimension(c: &SimplicialComplex) -> impl Iterator<Item = &Simplex> {
    (0..=crate::simplex::MAX_DIMENSION).flat_map(move |d| c.of_dimension(d))
}

/// Union of two networks with disjoint vertex sets.
pub fn disjoint_union(p: &FilterSheafNetwork, q: &FilterSheafNetwork) -> Result<FilterSheafNetwork, NetworkError> {
    let mut out = p.parts.clone();
    for s in q.parts.complex.iter() {
        if out.complex.contains(s) {
            return Err(NetworkError::DuplicateSimplex(s.clone()));
        }
    }
    for s in by_dimension(&q.parts.complex) {
        out.complex.add_simplex(s.clone())?;
    }
    out.stalks.extend(q.parts.stalks.iter().map(|(k, v)| (k.clone(), *v)));
    out.vertical.extend(q.parts.vertical.iter().map(|(k, v)| (k.clone(), v.clone())));
    out.restrictions
        .extend(q.parts.restrictions.iter().map(|(k, v)| (k.clone(), v.clone())));
    out.edges.extend(q.parts.edges.iter().map(|(k, v)| (k.clone(), v.clone())));
    out.section_bases
        .extend(q.parts.section_bases.iter().map(|(k, v)| (k.clone(), v.clone())));
    out.periodic.extend(q.parts.periodic.iter().cloned());
    Ok(FilterSheafNetwork { parts: out })
}

/// Identifies vertex `drop` with vertex `keep` inside one network.
///
/// The two vertices must have equal stalks. Write conflicts are not checked
/// here; see [`identify_vertices`].
pub fn identify_vertices_unchecked(
    net: &FilterSheafNetwork,
    keep: &str,
    drop: &str,
) -> Result<FilterSheafNetwork, NetworkError> {
    let kv = net
        .vertex(keep)
        .cloned()
        .ok_or_else(|| NetworkError::UnknownVertex(keep.into()))?;
    let dv = net
        .vertex(drop)
        .cloned()
        .ok_or_else(|| NetworkError::UnknownVertex(drop.into()))?;
    if kv == dv {
        return Ok(net.clone());
    }
    let (ks, ds) = (net.parts.stalks[&kv], net.parts.stalks[&dv]);
    if ks != ds {
        return Err(NetworkError::StalkMismatch {
            vertex: kv,
            left: ks,
            right: ds,
        });
    }
    let rename = |s: &Simplex| s.relabel(|v| if v == drop { keep.to_string() } else { v.to_string() });
    let p = &net.parts;
    let mut out = Parts::default();
    for s in by_dimension(&p.complex) {
        if s == &dv {
            continue;
        }
        let r = rename(s)?;
        if s.contains_vertex(drop) && p.complex.contains(&r) {
            return Err(NetworkError::DuplicateSimplex(r));
        }
        out.complex.add_simplex(r)?;
    }
    for (s, st) in &p.stalks {
        if s != &dv {
            out.stalks.insert(rename(s)?, *st);
        }
    }
    for (s, v) in &p.vertical {
        if s != &dv {
            out.vertical.insert(rename(s)?, v.clone());
        }
    }
    for ((c, f), r) in &p.restrictions {
        out.restrictions.insert((rename(c)?, rename(f)?), r.clone());
    }
    for (e, role) in &p.edges {
        let flow = match &role.flow {
            Some(fl) => Some(Flow {
                upstream: rename(&fl.upstream)?,
                downstream: rename(&fl.downstream)?,
            }),
            None => None,
        };
        out.edges.insert(rename(e)?, EdgeRole { kind: role.kind, flow });
    }
    for (s, b) in &p.section_bases {
        out.section_bases.insert(rename(s)?, b.clone());
    }
    for (a, b) in &p.periodic {
        out.periodic.push((rename(a)?, rename(b)?));
    }
    let mut net = FilterSheafNetwork { parts: out };
    net.normalize_periodic();
    Ok(net)
}

fn overlap(a: &Range<usize>, b: &Range<usize>) -> Option<Range<usize>> {
    let lo = a.start.max(b.start);
    let hi = a.end.min(b.end);
    (lo < hi).then_some(lo..hi)
}

/// First pair of writers into `vertex` that claim overlapping coordinates.
pub fn write_conflict(net: &FilterSheafNetwork, vertex: &Simplex) -> Option<NetworkError> {
    let ws = net.writers(vertex);
    for (i, a) in ws.iter().enumerate() {
        for b in &ws[i + 1..] {
            if let Some(o) = overlap(&a.support, &b.support) {
                return Some(NetworkError::WriteConflict {
                    vertex: vertex.clone(),
                    first: a.edge.clone(),
                    second: b.edge.clone(),
                    overlap: o,
                });
            }
        }
    }
    None
}

/// [`identify_vertices_unchecked`], rejecting identifications that leave two
/// flows writing the same coordinates of the identified vertex.
pub fn identify_vertices(net: &FilterSheafNetwork, keep: &str, drop: &str) -> Result<FilterSheafNetwork, NetworkError> {
    let out = identify_vertices_unchecked(net, keep, drop)?;
    if let Some(e) = write_conflict(&out, &Simplex::vertex(keep)) {
        return Err(e);
    }
    Ok(out)
}

/// Gluing without the conflict and consistency checks.
pub fn glue_unchecked(
    p: &FilterSheafNetwork,
    q: &FilterSheafNetwork,
    identify: &[(&str, &str)],
) -> Result<FilterSheafNetwork, NetworkError> {
    let mut net = disjoint_union(p, q)?;
    for (keep, drop) in identify {
        net = identify_vertices_unchecked(&net, keep, drop)?;
    }
    Ok(net)
}

/// Pushout of two networks along identified vertex pairs `(vertex of p,
/// vertex of q)`; the name from `p` is kept. All other vertex names must be
/// distinct (see [`FilterSheafNetwork::with_prefix`]).
///
/// Fails on stalk mismatches and on head-to-head joins where two flows
/// would write the same coordinates; such joins need
/// [`join_with_extension`]. The result is consistency-checked.
pub fn glue(
    p: &FilterSheafNetwork,
    q: &FilterSheafNetwork,
    identify: &[(&str, &str)],
) -> Result<FilterSheafNetwork, NetworkError> {
    let mut net = disjoint_union(p, q)?;
    for (keep, drop) in identify {
        net = identify_vertices(&net, keep, drop)?;
    }
    net.ensure_consistent(DEFAULT_TOLERANCE)?;
    Ok(net)
}

pub(crate) fn sole_writer(net: &FilterSheafNetwork, v: &Simplex) -> Result<Simplex, NetworkError> {
    let not = |reason: &str| NetworkError::NotExtendable {
        vertex: v.clone(),
        reason: reason.into(),
    };
    let ws = net.writers(v);
    if ws.len() != 1 {
        return Err(not("needs exactly one writing edge"));
    }
    if !net.readers(v).is_empty() {
        return Err(not("already read by a downstream edge"));
    }
    if net.parts.complex.cofaces(v).count() != 1 {
        return Err(not("must bound only its writing edge"));
    }
    let st = net.parts.stalks[v];
    if ws[0].support != (0..st.state) {
        return Err(not("writer does not determine the whole stalk"));
    }
    Ok(ws[0].edge.clone())
}

/// Joins two head vertices into one conflict vertex holding both states
/// side by side (x first), followed by a concurrent extension edge that
/// merges them into a fresh vertex of the original dimension.
///
/// Both heads must be sinks of dimension `n = mc.order()` written by a
/// single edge each.
pub fn join_with_extension(
    net: &FilterSheafNetwork,
    x_head: &str,
    y_head: &str,
    mc: &super::coefficients::MergeCoefficients,
    conflict_vertex: &str,
    output_vertex: &str,
) -> Result<FilterSheafNetwork, NetworkError> {
    let out = join_with_extension_unchecked(net, x_head, y_head, mc, conflict_vertex, output_vertex)?;
    out.ensure_consistent(DEFAULT_TOLERANCE)?;
    Ok(out)
}

pub fn join_with_extension_unchecked(
    net: &FilterSheafNetwork,
    x_head: &str,
    y_head: &str,
    mc: &super::coefficients::MergeCoefficients,
    conflict_vertex: &str,
    output_vertex: &str,
) -> Result<FilterSheafNetwork, NetworkError> {
    use super::maps::block_embedding;

    let xv = net
        .vertex(x_head)
        .cloned()
        .ok_or_else(|| NetworkError::UnknownVertex(x_head.into()))?;
    let yv = net
        .vertex(y_head)
        .cloned()
        .ok_or_else(|| NetworkError::UnknownVertex(y_head.into()))?;
    for fresh in [conflict_vertex, output_vertex] {
        if net.vertex(fresh).is_some() && fresh != x_head && fresh != y_head {
            return Err(NetworkError::DuplicateSimplex(Simplex::vertex(fresh)));
        }
    }
    let n = mc.order();
    for v in [&xv, &yv] {
        if net.parts.stalks[v].state != n {
            return Err(NetworkError::NotExtendable {
                vertex: v.clone(),
                reason: format!("state dimension {} differs from merge order {n}", net.parts.stalks[v].state),
            });
        }
    }
    let x_edge = sole_writer(net, &xv)?;
    let y_edge = sole_writer(net, &yv)?;

    let head_to_conflict = |v: &str| {
        if v == x_head || v == y_head {
            conflict_vertex.to_string()
        } else {
            v.to_string()
        }
    };
    let p = &net.parts;
    let mut out = Parts::default();
    let d = Simplex::vertex(conflict_vertex);
    let d_stalks = LayerStalks::new(0, 2 * n, 0);
    for s in by_dimension(&p.complex) {
        if s == &xv || s == &yv {
            continue;
        }
        let r = s.relabel(head_to_conflict)?;
        if out.complex.contains(&r) {
            return Err(NetworkError::DuplicateSimplex(r));
        }
        out.complex.add_simplex(r)?;
    }
    out.stalks.insert(d.clone(), d_stalks);
    out.vertical.insert(d.clone(), Vertical::zeros(d_stalks));
    for (s, st) in &p.stalks {
        if s != &xv && s != &yv {
            out.stalks.insert(s.relabel(head_to_conflict)?, *st);
        }
    }
    for (s, v) in &p.vertical {
        if s != &xv && s != &yv {
            out.vertical.insert(s.relabel(head_to_conflict)?, v.clone());
        }
    }
    for ((c, f), r) in &p.restrictions {
        let cell = c.relabel(head_to_conflict)?;
        let face = f.relabel(head_to_conflict)?;
        let offset = if f == &xv && c == &x_edge {
            Some(0)
        } else if f == &yv && c == &y_edge {
            Some(n)
        } else {
            None
        };
        let r = match offset {
            Some(off) => {
                let cst = p.stalks[c];
                let embed = block_embedding(2 * n, off, n);
                Restriction::state_only(embed.compose(&r.state).expect("head map has n rows"), cst, d_stalks)
                    .with_support(off..off + n)
            }
            None => r.clone(),
        };
        out.restrictions.insert((cell, face), r);
    }
    for (e, role) in &p.edges {
        let flow = match &role.flow {
            Some(fl) => Some(Flow {
                upstream: fl.upstream.relabel(head_to_conflict)?,
                downstream: fl.downstream.relabel(head_to_conflict)?,
            }),
            None => None,
        };
        out.edges.insert(e.relabel(head_to_conflict)?, EdgeRole { kind: role.kind, flow });
    }
    for (s, b) in &p.section_bases {
        out.section_bases.insert(s.relabel(head_to_conflict)?, b.clone());
    }
    // Feedback that left a head now leaves the merged output instead.
    let e = Simplex::vertex(output_vertex);
    out.periodic = p
        .periodic
        .iter()
        .map(|(sink, source)| {
            let sink = if sink == &xv || sink == &yv { e.clone() } else { sink.clone() };
            (sink, source.clone())
        })
        .collect();

    let mut b = NetworkBuilder { parts: out };
    super::builders::attach_extension(&mut b, conflict_vertex, output_vertex, mc)?;
    let mut net = b.build_unchecked()?;
    net.normalize_periodic();
    Ok(net)
}
