//! Causal scheduling and tick-by-tick execution.
//!
//! A network is compiled into *units*: a standalone causal edge, or a
//! 2-simplex together with its two causal edges. A unit reconstructs its
//! top section from the upstream vertex states and the external inputs,
//! emits outputs and writes downstream vertices. Units are grouped into
//! steps by Kahn's algorithm; each step ends with a concurrent group that
//! reads a frozen snapshot and writes disjoint locations, so its order is
//! irrelevant.
//!
//! One call to [`Simulator::step`] is one tick: a full pass over the
//! schedule, followed by the periodic identifications of the network.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use thiserror::Error;

use crate::linmap::LinearMap;
use crate::sheaf::network::{EdgeKind, FilterSheafNetwork, Layer};
use crate::simplex::Simplex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("causal cycle through {}", join(.0))]
    Cycle(Vec<Simplex>),
    #[error("causal edge {0} bounds more than one evaluated 2-simplex")]
    EdgeInTwoCells(Simplex),
    #[error("unsupported configuration at {cell}: {reason}")]
    Unsupported { cell: Simplex, reason: String },
    #[error("section over {0} is not determined by its upstream states and inputs")]
    Singular(Simplex),
    #[error("extension {edge} reads {vertex}, which no causal edge writes")]
    ExtensionWithoutWriter { edge: Simplex, vertex: Simplex },
    #[error("{0} does not take external input")]
    NotAnInputSite(Simplex),
    #[error("state at {site} has dimension {found}, stalk has {expected}")]
    StateDimension {
        site: Simplex,
        expected: usize,
        found: usize,
    },
}

fn join(items: &[Simplex]) -> String {
    let mut s = String::new();
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&format!("{x}"));
    }
    s
}

/// Evaluation of one causal unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalEval {
    /// The edge itself, or the 2-simplex the edges bound.
    pub cell: Simplex,
    /// Causal edges fired by this evaluation.
    pub edges: Vec<Simplex>,
}

/// Order-free evaluation inside a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConcurrentEval {
    /// Section over a concurrent face of an evaluated 2-simplex.
    FaceSection { cell: Simplex, edge: Simplex },
    /// Directed concurrent edge: pull back from `from`, push to `to`.
    Extension { edge: Simplex, from: Simplex, to: Simplex },
}

impl fmt::Display for ConcurrentEval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcurrentEval::FaceSection { cell, edge } => write!(f, "{edge} <- {cell}"),
            ConcurrentEval::Extension { edge, from, to } => write!(f, "{edge}: {from} -> {to}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Step {
    pub causal: Vec<CausalEval>,
    pub concurrent: Vec<ConcurrentEval>,
}

#[derive(Debug, Clone)]
struct Write {
    target: Simplex,
    support: Range<usize>,
    /// Top section to the supported target coordinates.
    map: LinearMap,
}

#[derive(Debug, Clone)]
struct Unit {
    eval: CausalEval,
    reads: Vec<(Simplex, Vec<usize>)>,
    inputs: Vec<(Simplex, usize)>,
    /// Gathered reads and inputs to the top section.
    solve: LinearMap,
    sections: Vec<(Simplex, LinearMap)>,
    writes: Vec<Write>,
    outputs: Vec<(Simplex, LinearMap)>,
    concurrent: Vec<Compiled>,
}

#[derive(Debug, Clone)]
struct Compiled {
    eval: ConcurrentEval,
    source: Simplex,
    /// Source state to the section stored at `store`.
    section: LinearMap,
    store: Simplex,
    write: Option<Write>,
}

/// Compiled evaluation order of a network.
#[derive(Debug, Clone)]
pub struct Schedule {
    steps: Vec<Vec<usize>>,
    units: Vec<Unit>,
    periodic: Vec<(Simplex, Simplex)>,
    stalks: BTreeMap<Simplex, usize>,
    input_sites: BTreeMap<Simplex, usize>,
    output_sites: Vec<Simplex>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> Vec<Step> {
        self.steps
            .iter()
            .map(|ids| Step {
                causal: ids.iter().map(|&i| self.units[i].eval.clone()).collect(),
                concurrent: ids
                    .iter()
                    .flat_map(|&i| self.units[i].concurrent.iter().map(|c| c.eval.clone()))
                    .collect(),
            })
            .collect()
    }

    /// Causal edges that accept an external input.
    pub fn input_sites(&self) -> impl Iterator<Item = &Simplex> {
        self.input_sites.keys()
    }

    /// Simplices with a nonzero output stalk.
    pub fn output_sites(&self) -> &[Simplex] {
        &self.output_sites
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps().iter().enumerate() {
            write!(f, "step {}:", i + 1)?;
            for c in &step.causal {
                if c.edges.len() == 1 && c.edges[0] == c.cell {
                    write!(f, " {}", c.cell)?;
                } else {
                    write!(f, " {} (", c.cell)?;
                    for (j, e) in c.edges.iter().enumerate() {
                        write!(f, "{}{e}", if j > 0 { ", " } else { "" })?;
                    }
                    f.write_str(")")?;
                }
            }
            if !step.concurrent.is_empty() {
                f.write_str(" [")?;
                for (j, c) in step.concurrent.iter().enumerate() {
                    write!(f, "{}{c}", if j > 0 { " | " } else { "" })?;
                }
                f.write_str("] order-free")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Current state of every simplex plus the tick counter.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    values: BTreeMap<Simplex, Vec<f64>>,
    tick: u64,
}

impl NetworkState {
    pub fn zeros(net: &FilterSheafNetwork) -> Self {
        let values = net
            .complex()
            .iter()
            .map(|s| (s.clone(), vec![0.0; net.stalks(s).map_or(0, |st| st.state)]))
            .collect();
        NetworkState { values, tick: 0 }
    }

    pub fn get(&self, s: &Simplex) -> Option<&[f64]> {
        self.values.get(s).map(Vec::as_slice)
    }

    /// Overwrites a state vector, e.g. to set initial conditions.
    pub fn set(&mut self, s: &Simplex, value: Vec<f64>) {
        self.values.insert(s.clone(), value);
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }
}

/// What happened in one tick.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TickRecord {
    pub tick: u64,
    pub inputs: BTreeMap<Simplex, f64>,
    pub outputs: BTreeMap<Simplex, f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub records: Vec<TickRecord>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Output of one site over all ticks.
    pub fn outputs_of(&self, site: &Simplex) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| r.outputs.get(site).copied().unwrap_or(0.0))
            .collect()
    }

    pub fn output_sites(&self) -> BTreeSet<&Simplex> {
        self.records.iter().flat_map(|r| r.outputs.keys()).collect()
    }
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert(m: &LinearMap) -> Option<LinearMap> {
    let n = m.rows();
    if m.cols() != n {
        return None;
    }
    let mut a = m.clone();
    let mut inv = LinearMap::identity(n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a.get(i, col).abs().total_cmp(&a.get(j, col).abs()))?;
        let p = a.get(pivot, col);
        if p.abs() < 1e-12 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                let (x, y) = (a.get(col, k), a.get(pivot, k));
                a.set(col, k, y);
                a.set(pivot, k, x);
                let (x, y) = (inv.get(col, k), inv.get(pivot, k));
                inv.set(col, k, y);
                inv.set(pivot, k, x);
            }
        }
        for k in 0..n {
            a.set(col, k, a.get(col, k) / p);
            inv.set(col, k, inv.get(col, k) / p);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a.get(r, col);
            if factor == 0.0 {
                continue;
            }
            for k in 0..n {
                a.set(r, k, a.get(r, k) - factor * a.get(col, k));
                inv.set(r, k, inv.get(r, k) - factor * inv.get(col, k));
            }
        }
    }
    Some(inv)
}

fn supported_rows(m: &LinearMap, support: &Range<usize>) -> LinearMap {
    m.select_rows(&support.clone().collect::<Vec<_>>())
}

fn composed(a: &LinearMap, b: &LinearMap) -> LinearMap {
    a.compose(b).expect("validated network shapes")
}

struct Compiler<'a> {
    net: &'a FilterSheafNetwork,
}

impl Compiler<'_> {
    fn unsupported(cell: &Simplex, reason: &str) -> EngineError {
        EngineError::Unsupported {
            cell: cell.clone(),
            reason: reason.into(),
        }
    }

    fn flow(&self, edge: &Simplex) -> (Simplex, Simplex) {
        let f = self.net.edge_role(edge).and_then(|r| r.flow.as_ref()).expect("causal edges carry flows");
        (f.upstream.clone(), f.downstream.clone())
    }

    /// Builds a unit over `top` firing `edges`; `to_edge` maps the top
    /// section to each edge section.
    fn unit(&self, top: &Simplex, edges: Vec<(Simplex, LinearMap)>) -> Result<Unit, EngineError> {
        let net = self.net;
        let top_dim = net.stalks(top).expect("validated").state;
        let mut rows: Vec<LinearMap> = Vec::new();
        let mut reads: Vec<(Simplex, Vec<usize>)> = Vec::new();
        let mut covered: BTreeSet<(Simplex, usize)> = BTreeSet::new();
        for (edge, to_edge) in &edges {
            let (up, _) = self.flow(edge);
            let r = net.restriction(edge, &up).expect("validated");
            let full = composed(&r.state, to_edge);
            let coords: Vec<usize> = r
                .determined(Layer::State)
                .filter(|&c| covered.insert((up.clone(), c)))
                .collect();
            if !coords.is_empty() {
                rows.push(full.select_rows(&coords));
                reads.push((up, coords));
            }
        }
        let mut inputs = Vec::new();
        for (edge, to_edge) in &edges {
            let v = net.vertical(edge).expect("validated");
            if v.input.rows() > 0 {
                rows.push(composed(&v.input, to_edge));
                inputs.push((edge.clone(), v.input.rows()));
            }
        }
        let refs: Vec<&LinearMap> = rows.iter().collect();
        let gathered = if refs.is_empty() {
            LinearMap::zeros(0, top_dim)
        } else {
            LinearMap::stack(&refs).expect("rows share the top dimension")
        };
        let basis = net
            .section_basis(top)
            .cloned()
            .unwrap_or_else(|| LinearMap::identity(top_dim));
        let inv = invert(&composed(&gathered, &basis)).ok_or_else(|| EngineError::Singular(top.clone()))?;
        let solve = composed(&basis, &inv);

        let mut writes = Vec::new();
        let mut outputs = Vec::new();
        let mut sections = Vec::new();
        for (edge, to_edge) in &edges {
            let (_, down) = self.flow(edge);
            let r = net.restriction(edge, &down).expect("validated");
            let support = r.determined(Layer::State);
            writes.push(Write {
                target: down,
                map: composed(&supported_rows(&r.state, &support), to_edge),
                support,
            });
            let v = net.vertical(edge).expect("validated");
            if v.output.rows() > 0 {
                outputs.push((edge.clone(), composed(&v.output, to_edge)));
            }
            sections.push((edge.clone(), to_edge.clone()));
        }
        let v = net.vertical(top).expect("validated");
        if top.dimension() == 2 && v.output.rows() > 0 {
            outputs.push((top.clone(), v.output.clone()));
        }
        for (site, m) in &outputs {
            if m.rows() != 1 {
                return Err(Self::unsupported(site, "output stalks wider than one"));
            }
        }
        Ok(Unit {
            eval: CausalEval {
                cell: top.clone(),
                edges: edges.into_iter().map(|(e, _)| e).collect(),
            },
            reads,
            inputs,
            solve,
            sections,
            writes,
            outputs,
            concurrent: Vec::new(),
        })
    }

    fn extension(&self, edge: &Simplex) -> Result<Compiled, EngineError> {
        let net = self.net;
        let (from, to) = self.flow(edge);
        let up = net.restriction(edge, &from).expect("validated");
        let pull = invert(&up.state).ok_or_else(|| EngineError::Singular(edge.clone()))?;
        let down = net.restriction(edge, &to).expect("validated");
        let support = down.determined(Layer::State);
        Ok(Compiled {
            eval: ConcurrentEval::Extension {
                edge: edge.clone(),
                from: from.clone(),
                to: to.clone(),
            },
            source: from,
            store: edge.clone(),
            write: Some(Write {
                target: to,
                map: composed(&supported_rows(&down.state, &support), &pull),
                support,
            }),
            section: pull,
        })
    }
}

/// Compiles `net` into a deterministic schedule.
pub fn schedule(net: &FilterSheafNetwork) -> Result<Schedule, EngineError> {
    let c = Compiler { net };
    let mut units: Vec<Unit> = Vec::new();
    let mut in_cell: BTreeMap<Simplex, Simplex> = BTreeMap::new();

    for cell in net.complex().of_dimension(2) {
        let faces = cell.faces().expect("2-simplices have faces");
        let (mut causal, other): (Vec<_>, Vec<_>) = faces
            .into_iter()
            .partition(|e| net.edge_role(e).is_some_and(|r| r.kind == EdgeKind::Causal));
        causal.sort();
        if causal.len() != 2 {
            return Err(Compiler::unsupported(cell, "needs exactly two causal edges"));
        }
        let pair = &other[0];
        if net.edge_role(pair).is_some_and(|r| r.flow.is_some()) {
            return Err(Compiler::unsupported(cell, "concurrent face carries a flow"));
        }
        for e in &causal {
            if in_cell.insert(e.clone(), cell.clone()).is_some() {
                return Err(EngineError::EdgeInTwoCells(e.clone()));
            }
        }
        let edges = causal
            .iter()
            .map(|e| (e.clone(), net.restriction(cell, e).expect("validated").state.clone()))
            .collect();
        let mut unit = c.unit(cell, edges)?;
        unit.concurrent.push(Compiled {
            eval: ConcurrentEval::FaceSection {
                cell: cell.clone(),
                edge: pair.clone(),
            },
            source: cell.clone(),
            section: net.restriction(cell, pair).expect("validated").state.clone(),
            store: pair.clone(),
            write: None,
        });
        units.push(unit);
    }
    for e in net.causal_edges() {
        if !in_cell.contains_key(e) {
            let dim = net.stalks(e).expect("validated").state;
            units.push(c.unit(e, vec![(e.clone(), LinearMap::identity(dim))])?);
        }
    }

    let mut writers: BTreeMap<Simplex, BTreeSet<usize>> = BTreeMap::new();
    for (i, u) in units.iter().enumerate() {
        for w in &u.writes {
            writers.entry(w.target.clone()).or_default().insert(i);
        }
    }
    let deps_of = |u: &Unit, writers: &BTreeMap<Simplex, BTreeSet<usize>>| -> BTreeSet<usize> {
        u.reads
            .iter()
            .filter_map(|(v, _)| writers.get(v))
            .flatten()
            .copied()
            .collect()
    };
    let mut deps: Vec<BTreeSet<usize>> = units.iter().map(|u| deps_of(u, &writers)).collect();
    let levels = compute_levels(&deps).map_err(|cycle| {
        EngineError::Cycle(cycle.iter().flat_map(|&i| units[i].eval.edges.clone()).collect())
    })?;

    // Extensions run in the group of the latest unit writing their source.
    for (edge, role) in net.edges() {
        if role.kind != EdgeKind::Concurrent || role.flow.is_none() {
            continue;
        }
        let compiled = c.extension(edge)?;
        let from = match &compiled.eval {
            ConcurrentEval::Extension { from, .. } => from.clone(),
            ConcurrentEval::FaceSection { .. } => unreachable!(),
        };
        let owner = writers
            .get(&from)
            .and_then(|ws| ws.iter().copied().max_by_key(|&i| (levels[i], i)))
            .ok_or_else(|| EngineError::ExtensionWithoutWriter {
                edge: edge.clone(),
                vertex: from.clone(),
            })?;
        let target = compiled.write.as_ref().expect("extensions write").target.clone();
        units[owner].concurrent.push(compiled);
        writers.entry(target).or_default().insert(owner);
    }
    deps = units.iter().map(|u| deps_of(u, &writers)).collect();
    let levels = compute_levels(&deps).map_err(|cycle| {
        EngineError::Cycle(cycle.iter().flat_map(|&i| units[i].eval.edges.clone()).collect())
    })?;

    let depth = levels.iter().copied().max().map_or(0, |m| m + 1);
    let mut steps = vec![Vec::new(); depth];
    for (i, &l) in levels.iter().enumerate() {
        steps[l].push(i);
    }
    for s in &mut steps {
        s.sort_by(|&a, &b| units[a].eval.cell.cmp(&units[b].eval.cell));
    }

    let stalks = net
        .complex()
        .iter()
        .map(|s| (s.clone(), net.stalks(s).expect("validated").state))
        .collect();
    let input_sites = units.iter().flat_map(|u| u.inputs.iter().cloned()).collect();
    let mut output_sites: Vec<Simplex> = units
        .iter()
        .flat_map(|u| u.outputs.iter().map(|(s, _)| s.clone()))
        .collect();
    output_sites.sort();
    Ok(Schedule {
        steps,
        units,
        periodic: net.periodic().to_vec(),
        stalks,
        input_sites,
        output_sites,
    })
}

/// Longest-path levels by repeated Kahn waves; on a cycle, returns the
/// units of one cycle in dependency order.
fn compute_levels(deps: &[BTreeSet<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let n = deps.len();
    let mut level = vec![usize::MAX; n];
    let mut remaining: BTreeSet<usize> = (0..n).collect();
    let mut wave = 0;
    while !remaining.is_empty() {
        let ready: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| deps[i].iter().all(|d| level[*d] < wave))
            .collect();
        if ready.is_empty() {
            return Err(find_cycle(deps, &remaining));
        }
        for i in ready {
            level[i] = wave;
            remaining.remove(&i);
        }
        wave += 1;
    }
    Ok(level)
}

fn find_cycle(deps: &[BTreeSet<usize>], remaining: &BTreeSet<usize>) -> Vec<usize> {
    let mut path = Vec::new();
    let mut seen = BTreeMap::new();
    let mut cur = *remaining.iter().next().expect("non-empty");
    loop {
        if let Some(&at) = seen.get(&cur) {
            let mut cycle: Vec<usize> = path[at..].to_vec();
            cycle.reverse();
            return cycle;
        }
        seen.insert(cur, path.len());
        path.push(cur);
        cur = *deps[cur]
            .iter()
            .find(|d| remaining.contains(d))
            .expect("a stuck unit depends on another stuck unit");
    }
}

fn gather<'a>(values: &'a BTreeMap<Simplex, Vec<f64>>, site: &Simplex, coords: &'a [usize]) -> impl Iterator<Item = f64> + 'a {
    let v = &values[site];
    coords.iter().map(move |&c| v[c])
}

fn apply(m: &LinearMap, x: &[f64]) -> Vec<f64> {
    m.apply(x).expect("compiled shapes")
}

/// A compiled network ready to execute.
#[derive(Debug, Clone)]
pub struct Simulator {
    schedule: Schedule,
}

impl Simulator {
    pub fn new(net: &FilterSheafNetwork) -> Result<Self, EngineError> {
        Ok(Simulator {
            schedule: schedule(net)?,
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn zero_state(&self) -> NetworkState {
        NetworkState {
            values: self.schedule.stalks.iter().map(|(s, &d)| (s.clone(), vec![0.0; d])).collect(),
            tick: 0,
        }
    }

    fn check_state(&self, state: &NetworkState) -> Result<(), EngineError> {
        for (s, &dim) in &self.schedule.stalks {
            let found = state.values.get(s).map_or(0, Vec::len);
            if found != dim {
                return Err(EngineError::StateDimension {
                    site: s.clone(),
                    expected: dim,
                    found,
                });
            }
        }
        Ok(())
    }

    /// One tick with the concurrent groups in schedule order.
    pub fn step(&self, state: &mut NetworkState, inputs: &BTreeMap<Simplex, f64>) -> Result<TickRecord, EngineError> {
        self.step_with_order(state, inputs, |_, len| (0..len).collect())
    }

    /// One tick; `order(step, len)` returns the evaluation order of each
    /// concurrent group as a permutation of `0..len`.
    pub fn step_with_order(
        &self,
        state: &mut NetworkState,
        inputs: &BTreeMap<Simplex, f64>,
        mut order: impl FnMut(usize, usize) -> Vec<usize>,
    ) -> Result<TickRecord, EngineError> {
        self.check_state(state)?;
        for site in inputs.keys() {
            if !self.schedule.input_sites.contains_key(site) {
                return Err(EngineError::NotAnInputSite(site.clone()));
            }
        }
        let mut record = TickRecord {
            tick: state.tick,
            inputs: self
                .schedule
                .input_sites
                .keys()
                .map(|s| (s.clone(), inputs.get(s).copied().unwrap_or(0.0)))
                .collect(),
            outputs: BTreeMap::new(),
        };
        let values = &mut state.values;
        for (si, ids) in self.schedule.steps.iter().enumerate() {
            for &i in ids {
                let u = &self.schedule.units[i];
                let mut rhs: Vec<f64> = Vec::new();
                for (v, coords) in &u.reads {
                    rhs.extend(gather(values, v, coords));
                }
                for (edge, dim) in &u.inputs {
                    rhs.push(record.inputs[edge]);
                    rhs.extend(core::iter::repeat_n(0.0, dim - 1));
                }
                let top = apply(&u.solve, &rhs);
                for (site, m) in &u.outputs {
                    record.outputs.insert(site.clone(), apply(m, &top)[0]);
                }
                for (edge, m) in &u.sections {
                    values.insert(edge.clone(), apply(m, &top));
                }
                for w in &u.writes {
                    let vals = apply(&w.map, &top);
                    values.get_mut(&w.target).expect("state exists")[w.support.clone()].copy_from_slice(&vals);
                }
                values.insert(u.eval.cell.clone(), top);
            }
            let group: Vec<&Compiled> = ids.iter().flat_map(|&i| self.schedule.units[i].concurrent.iter()).collect();
            if group.is_empty() {
                continue;
            }
            let snapshot = values.clone();
            let perm = order(si, group.len());
            debug_assert_eq!(perm.iter().copied().collect::<BTreeSet<_>>().len(), group.len());
            for j in perm {
                let ev = group[j];
                let section = apply(&ev.section, &snapshot[&ev.source]);
                if let Some(w) = &ev.write {
                    let vals = apply(&w.map, &snapshot[&ev.source]);
                    values.get_mut(&w.target).expect("state exists")[w.support.clone()].copy_from_slice(&vals);
                }
                values.insert(ev.store.clone(), section);
            }
        }
        let snapshot: Vec<Vec<f64>> = self
            .schedule
            .periodic
            .iter()
            .map(|(sink, _)| values[sink].clone())
            .collect();
        for ((_, source), v) in self.schedule.periodic.iter().zip(snapshot) {
            values.insert(source.clone(), v);
        }
        state.tick += 1;
        Ok(record)
    }

    /// Runs `ticks` ticks from the zero state. Streams shorter than `ticks`
    /// are padded with zeros.
    pub fn run(&self, streams: &BTreeMap<Simplex, Vec<f64>>, ticks: usize) -> Result<Trace, EngineError> {
        self.run_with_order(streams, ticks, |_, _, len| (0..len).collect())
    }

    /// [`Simulator::run`] with a caller-chosen order for every concurrent
    /// group: `order(tick, step, len)`.
    pub fn run_with_order(
        &self,
        streams: &BTreeMap<Simplex, Vec<f64>>,
        ticks: usize,
        mut order: impl FnMut(u64, usize, usize) -> Vec<usize>,
    ) -> Result<Trace, EngineError> {
        let mut state = self.zero_state();
        let mut trace = Trace::default();
        for t in 0..ticks {
            let inputs: BTreeMap<Simplex, f64> = streams
                .iter()
                .map(|(s, v)| (s.clone(), v.get(t).copied().unwrap_or(0.0)))
                .collect();
            let tick = state.tick;
            trace
                .records
                .push(self.step_with_order(&mut state, &inputs, |s, len| order(tick, s, len))?);
        }
        Ok(trace)
    }
}

/// Compiles `net` and advances `state` by one tick.
pub fn step(
    net: &FilterSheafNetwork,
    state: &mut NetworkState,
    inputs: &BTreeMap<Simplex, f64>,
) -> Result<TickRecord, EngineError> {
    Simulator::new(net)?.step(state, inputs)
}

/// Compiles `net` and runs it for `ticks` ticks from the zero state.
pub fn run(net: &FilterSheafNetwork, streams: &BTreeMap<Simplex, Vec<f64>>, ticks: usize) -> Result<Trace, EngineError> {
    Simulator::new(net)?.run(streams, ticks)
}
