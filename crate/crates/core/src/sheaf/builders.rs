//! Canonical networks: chains, the 0-to-1 fan, the 1-to-0 merge and the
//! two double cones.
//!
//! Vertex names are fixed per builder (`v0…vk` for chains, `a, b, c` for
//! the fan, `b, c, d, e` for the merge, `b, c, …` for the cones); use
//! [`FilterSheafNetwork::with_prefix`] before gluing copies together.

use alloc::format;
use alloc::vec::Vec;

use super::coefficients::{CoefficientError, FilterCoefficients, JointOutputCoefficients, MergeCoefficients};
use super::consistency::DEFAULT_TOLERANCE;
use super::maps::{
    apex_duplication, block_embedding, branch_projection, combined_state_update, edge_output_map,
    input_map, joint_output_map, merge_map, retrieval_map, state_update_map, BranchProjection,
};
use super::network::{glue, EdgeKind, FilterSheafNetwork, LayerStalks, NetworkBuilder, NetworkError, Restriction};
use crate::linmap::LinearMap;
use crate::simplex::Simplex;

/// How the pinch of a double cone is realized.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeVariant {
    /// Merge to `R^n` at the pinch, then fan out again.
    Collapsed(MergeCoefficients),
    /// Keep the whole two-branch section at the pinch and swap branches.
    Resolved,
}

fn vertex_stalks(n: usize) -> LayerStalks {
    LayerStalks::new(0, n, 0)
}

fn add_vertex(b: &mut NetworkBuilder, id: &str, state: usize) -> Result<Simplex, NetworkError> {
    let v = Simplex::vertex(id);
    b.add_cell(v.clone(), vertex_stalks(state))?;
    Ok(v)
}

/// A causal edge carrying one IIR section: `r` upstream, `s` downstream,
/// input `i` and output `o`.
fn add_filter_edge(
    b: &mut NetworkBuilder,
    up: &str,
    down: &str,
    c: &FilterCoefficients,
) -> Result<Simplex, NetworkError> {
    let e = add_filter_edge_with_target(b, up, down, c)?;
    let es = b.stalks(&e).expect("edge just added");
    b.set_restriction(
        &e,
        &Simplex::vertex(down),
        Restriction::state_only(state_update_map(c), es, vertex_stalks(c.order())),
    );
    Ok(e)
}

/// Concurrent edge between the two branch vertices of a 2-simplex, stalk
/// `R^2n` with `r_x`, `r_y` to its ends.
fn add_branch_pair_edge(b: &mut NetworkBuilder, x: &str, y: &str, n: usize) -> Result<Simplex, NetworkError> {
    let e = Simplex::edge(x, y)?;
    let es = LayerStalks::new(0, 2 * n, 0);
    let vs = vertex_stalks(n);
    b.add_cell(e.clone(), es)?;
    b.set_restriction(
        &e,
        &Simplex::vertex(x),
        Restriction::state_only(branch_projection(BranchProjection::X, n), es, vs),
    );
    b.set_restriction(
        &e,
        &Simplex::vertex(y),
        Restriction::state_only(branch_projection(BranchProjection::Y, n), es, vs),
    );
    b.set_edge(&e, EdgeKind::Concurrent, None);
    Ok(e)
}

/// Vertical input map of a two-branch 2-simplex: the x and y inputs.
fn two_branch_inputs(n: usize) -> LinearMap {
    let mut m = LinearMap::zeros(2, 2 * n + 2);
    m.set(0, n, 1.0);
    m.set(1, 2 * n + 1, 1.0);
    m
}

fn input_pick(slot: usize) -> LinearMap {
    let mut m = LinearMap::zeros(1, 2);
    m.set(0, slot, 1.0);
    m
}

/// Two-branch 2-simplex over `x_edge`, `y_edge` (causal, fed by `r_xi`,
/// `r_yi`) and `pair_edge` (fed by `pair_map`).
fn add_two_branch_cell(
    b: &mut NetworkBuilder,
    cell: &Simplex,
    n: usize,
    (x_edge, y_edge, pair_edge): (&Simplex, &Simplex, &Simplex),
    pair_map: LinearMap,
    jc: Option<&JointOutputCoefficients>,
    with_inputs: bool,
) -> Result<(), NetworkError> {
    let inputs = if with_inputs { 2 } else { 0 };
    let out = usize::from(jc.is_some());
    let cs = LayerStalks::new(inputs, 2 * n + 2, out);
    b.add_cell(cell.clone(), cs)?;
    let vin = if with_inputs {
        two_branch_inputs(n)
    } else {
        LinearMap::zeros(0, 2 * n + 2)
    };
    let vout = match jc {
        Some(jc) => joint_output_map(jc)
            .compose(&branch_projection(BranchProjection::XY, n))
            .expect("o2 acts on R^2n"),
        None => LinearMap::zeros(0, 2 * n + 2),
    };
    b.set_vertical(cell, vin, vout);
    for (edge, proj, slot) in [(x_edge, BranchProjection::XI, 0), (y_edge, BranchProjection::YI, 1)] {
        let es = b.stalks(edge).ok_or_else(|| NetworkError::MissingStalks(edge.clone()))?;
        let input = if es.input == 0 {
            LinearMap::zeros(0, inputs)
        } else {
            input_pick(slot)
        };
        b.set_restriction(
            cell,
            edge,
            Restriction {
                input,
                state: branch_projection(proj, n),
                output: LinearMap::zeros(es.output, out),
                support: None,
            },
        );
    }
    let ps = b
        .stalks(pair_edge)
        .ok_or_else(|| NetworkError::MissingStalks(pair_edge.clone()))?;
    b.set_restriction(cell, pair_edge, Restriction::state_only(pair_map, cs, ps));
    Ok(())
}

/// Line complex `v0 - v1 - ... - vk` of `k` causal edges.
///
/// `coeffs` holds one coefficient set per edge, or a single set shared by
/// all edges. State leaving `vk` re-enters at `v0` on the next tick, so a
/// chain of `k` edges processes `k` consecutive samples per tick.
pub fn build_chain(k: usize, coeffs: &[FilterCoefficients]) -> Result<FilterSheafNetwork, NetworkError> {
    if k == 0 {
        return Err(NetworkError::EmptyChain);
    }
    if coeffs.len() != 1 && coeffs.len() != k {
        return Err(CoefficientError::Length {
            what: "chain coefficient sets",
            expected: k,
            found: coeffs.len(),
        }
        .into());
    }
    let n = coeffs[0].order();
    for c in coeffs {
        FilterCoefficients::check_same_order(&coeffs[0], c)?;
    }
    let mut b = NetworkBuilder::new();
    let names: Vec<_> = (0..=k).map(|i| format!("v{i}")).collect();
    for name in &names {
        add_vertex(&mut b, name, n)?;
    }
    for i in 0..k {
        let c = &coeffs[if coeffs.len() == 1 { 0 } else { i }];
        add_filter_edge(&mut b, &names[i], &names[i + 1], c)?;
    }
    b.add_periodic(&names[k], &names[0]);
    b.build(DEFAULT_TOLERANCE)
}

/// 0-to-1 flow: apex `a` feeding branches `b` (x) and `c` (y).
///
/// The 2-simplex section is `(w, x, y)`, expanded to `(w, x, w, y)` so both
/// branches start from the shared apex state. The apex is a boundary with
/// no incoming flow; glue a chain onto it to drive it.
pub fn build_fan(
    cx: &FilterCoefficients,
    cy: &FilterCoefficients,
    jc: Option<&JointOutputCoefficients>,
) -> Result<FilterSheafNetwork, NetworkError> {
    let n = FilterCoefficients::check_same_order(cx, cy)?;
    check_joint(jc, n)?;
    let mut b = NetworkBuilder::new();
    for v in ["a", "b", "c"] {
        add_vertex(&mut b, v, n)?;
    }
    let ab = add_filter_edge(&mut b, "a", "b", cx)?;
    let ac = add_filter_edge(&mut b, "a", "c", cy)?;
    let bc = add_branch_pair_edge(&mut b, "b", "c", n)?;
    let cell = Simplex::triangle("a", "b", "c")?;
    add_two_branch_cell(&mut b, &cell, n, (&ab, &ac, &bc), combined_state_update(cx, cy)?, jc, true)?;
    b.set_section_basis(&cell, apex_duplication(n));
    b.build(DEFAULT_TOLERANCE)
}

fn check_joint(jc: Option<&JointOutputCoefficients>, n: usize) -> Result<(), NetworkError> {
    match jc {
        Some(jc) if jc.order() != n => Err(CoefficientError::Length {
            what: "joint output weights",
            expected: n,
            found: jc.order(),
        }
        .into()),
        _ => Ok(()),
    }
}

/// Edge writing an order-`n` update into one block of a two-branch vertex.
fn add_branch_edge_into(
    b: &mut NetworkBuilder,
    up: &str,
    down: &str,
    c: &FilterCoefficients,
    offset: usize,
) -> Result<Simplex, NetworkError> {
    let n = c.order();
    let e = add_filter_edge_with_target(b, up, down, c)?;
    let es = b.stalks(&e).expect("edge just added");
    let ds = b.stalks(&Simplex::vertex(down)).expect("vertex added");
    let embed = block_embedding(2 * n, offset, n);
    b.set_restriction(
        &e,
        &Simplex::vertex(down),
        Restriction::state_only(embed.compose(&state_update_map(c)).expect("s has n rows"), es, ds)
            .with_support(offset..offset + n),
    );
    Ok(e)
}

/// Causal edge with everything but its downstream restriction.
fn add_filter_edge_with_target(
    b: &mut NetworkBuilder,
    up: &str,
    down: &str,
    c: &FilterCoefficients,
) -> Result<Simplex, NetworkError> {
    let n = c.order();
    let e = Simplex::edge(up, down)?;
    let es = LayerStalks::new(1, n + 1, 1);
    b.add_cell(e.clone(), es)?;
    b.set_vertical(&e, input_map(n), edge_output_map(c));
    b.set_restriction(
        &e,
        &Simplex::vertex(up),
        Restriction::state_only(retrieval_map(n), es, vertex_stalks(n)),
    );
    b.set_edge(&e, EdgeKind::Causal, Some((up, down)));
    Ok(e)
}

fn merge_core(
    b: &mut NetworkBuilder,
    cx: &FilterCoefficients,
    cy: &FilterCoefficients,
    jc: Option<&JointOutputCoefficients>,
) -> Result<usize, NetworkError> {
    let n = FilterCoefficients::check_same_order(cx, cy)?;
    check_joint(jc, n)?;
    add_vertex(b, "b", n)?;
    add_vertex(b, "c", n)?;
    add_vertex(b, "d", 2 * n)?;
    let bd = add_branch_edge_into(b, "b", "d", cx, 0)?;
    let cd = add_branch_edge_into(b, "c", "d", cy, n)?;
    let bc = add_branch_pair_edge(b, "b", "c", n)?;
    let cell = Simplex::triangle("b", "c", "d")?;
    add_two_branch_cell(
        b,
        &cell,
        n,
        (&bd, &cd, &bc),
        branch_projection(BranchProjection::XY, n),
        jc,
        true,
    )?;
    Ok(n)
}

/// Appends a concurrent edge `d - e` to the two-branch vertex `d`: identity
/// toward `d`, the merge map toward the new vertex `e`.
pub(crate) fn attach_extension(
    b: &mut NetworkBuilder,
    d: &str,
    e: &str,
    mc: &MergeCoefficients,
) -> Result<(), NetworkError> {
    let n = mc.order();
    let dv = Simplex::vertex(d);
    let ds = b.stalks(&dv).ok_or_else(|| NetworkError::UnknownVertex(d.into()))?;
    if ds.state != 2 * n {
        return Err(NetworkError::NotExtendable {
            vertex: dv,
            reason: format!("state dimension {} is not twice the merge order {n}", ds.state),
        });
    }
    if b.stalks(&Simplex::vertex(e)).is_some() {
        return Err(NetworkError::DuplicateSimplex(Simplex::vertex(e)));
    }
    let ev = add_vertex(b, e, n)?;
    let edge = Simplex::edge(d, e)?;
    let es = LayerStalks::new(0, 2 * n, 0);
    b.add_cell(edge.clone(), es)?;
    b.set_restriction(&edge, &dv, Restriction::state_only(LinearMap::identity(2 * n), es, ds));
    b.set_restriction(&edge, &ev, Restriction::state_only(merge_map(mc), es, vertex_stalks(n)));
    b.set_edge(&edge, EdgeKind::Concurrent, Some((d, e)));
    Ok(())
}

/// 1-to-0 flow: branches `b` (x) and `c` (y) meet at the conflict vertex
/// `d` (`R^2n`), merged into `e` (`R^n`) by a concurrent extension edge.
/// State at `e` re-enters both branches on the next tick.
pub fn build_merge(
    cx: &FilterCoefficients,
    cy: &FilterCoefficients,
    mc: &MergeCoefficients,
    jc: Option<&JointOutputCoefficients>,
) -> Result<FilterSheafNetwork, NetworkError> {
    let mut b = NetworkBuilder::new();
    let n = merge_core(&mut b, cx, cy, jc)?;
    if mc.order() != n {
        return Err(CoefficientError::Length {
            what: "merge weights",
            expected: n,
            found: mc.order(),
        }
        .into());
    }
    attach_extension(&mut b, "d", "e", mc)?;
    b.add_periodic("e", "b");
    b.add_periodic("e", "c");
    b.build(DEFAULT_TOLERANCE)
}

/// The merge 2-simplex alone, ending at the `R^2n` conflict vertex `d`.
pub fn build_merge_unextended(
    cx: &FilterCoefficients,
    cy: &FilterCoefficients,
    jc: Option<&JointOutputCoefficients>,
) -> Result<FilterSheafNetwork, NetworkError> {
    let mut b = NetworkBuilder::new();
    merge_core(&mut b, cx, cy, jc)?;
    b.build(DEFAULT_TOLERANCE)
}

/// A merge into a fan through a single pinch.
///
/// Collapsed: vertices `b, c, d, e, f, g`, the merge output `e` is the fan
/// apex, branches end at `f` (x) and `g` (y). Resolved: vertices
/// `b, c, p, f, g` with pinch `p` holding both branch sections; the
/// outgoing side swaps the branches before updating. In both cases `f`
/// feeds back into `b` and `g` into `c`.
pub fn build_double_cone(
    cx: &FilterCoefficients,
    cy: &FilterCoefficients,
    variant: &ConeVariant,
) -> Result<FilterSheafNetwork, NetworkError> {
    let n = FilterCoefficients::check_same_order(cx, cy)?;
    match variant {
        ConeVariant::Collapsed(mc) => {
            let merge = build_merge(cx, cy, mc, None)?;
            let fan = build_fan(cx, cy, None)?.relabel(|v| match v {
                "a" => "pinch".into(),
                "b" => "f".into(),
                _ => "g".into(),
            })?;
            let glued = glue(&merge, &fan, &[("e", "pinch")])?;
            let mut b = glued.into_builder();
            b.add_periodic("f", "b");
            b.add_periodic("g", "c");
            b.build(DEFAULT_TOLERANCE)
        }
        ConeVariant::Resolved => resolved_cone(cx, cy, n),
    }
}

fn resolved_cone(cx: &FilterCoefficients, cy: &FilterCoefficients, n: usize) -> Result<FilterSheafNetwork, NetworkError> {
    let mut b = NetworkBuilder::new();
    for v in ["b", "c", "f", "g"] {
        add_vertex(&mut b, v, n)?;
    }
    let p = add_vertex(&mut b, "p", 2 * n + 2)?;
    let ps = vertex_stalks(2 * n + 2);
    let x_block = 0..n + 1;
    let y_block = n + 1..2 * n + 2;

    // Incoming side: sections are parked in p without an update.
    let bp = add_filter_edge_with_target(&mut b, "b", "p", cx)?;
    let cp = add_filter_edge_with_target(&mut b, "c", "p", cy)?;
    for (e, block) in [(&bp, &x_block), (&cp, &y_block)] {
        let es = b.stalks(e).expect("edge added");
        b.set_restriction(
            e,
            &p,
            Restriction::state_only(block_embedding(2 * n + 2, block.start, n + 1), es, ps).with_support(block.clone()),
        );
    }
    let bc = add_branch_pair_edge(&mut b, "b", "c", n)?;
    let left = Simplex::triangle("b", "c", "p")?;
    add_two_branch_cell(
        &mut b,
        &left,
        n,
        (&bp, &cp, &bc),
        branch_projection(BranchProjection::XY, n),
        None,
        true,
    )?;

    // Outgoing side: pf reads the y half of p, pg the x half.
    let es = LayerStalks::new(0, n + 1, 0);
    let outgoing = |b: &mut NetworkBuilder, down: &str, read: &core::ops::Range<usize>, c: &FilterCoefficients| {
        let e = Simplex::edge("p", down)?;
        b.add_cell(e.clone(), es)?;
        b.set_restriction(
            &e,
            &p,
            Restriction::state_only(block_embedding(2 * n + 2, read.start, n + 1), es, ps).with_support(read.clone()),
        );
        b.set_restriction(
            &e,
            &Simplex::vertex(down),
            Restriction::state_only(state_update_map(c), es, vertex_stalks(n)),
        );
        b.set_edge(&e, EdgeKind::Causal, Some(("p", down)));
        Ok::<_, NetworkError>(e)
    };
    let pf = outgoing(&mut b, "f", &y_block, cx)?;
    let pg = outgoing(&mut b, "g", &x_block, cy)?;
    let fg = add_branch_pair_edge(&mut b, "f", "g", n)?;
    let right = Simplex::triangle("f", "g", "p")?;
    add_two_branch_cell(
        &mut b,
        &right,
        n,
        (&pf, &pg, &fg),
        combined_state_update(cx, cy)?,
        None,
        false,
    )?;
    b.add_periodic("f", "b");
    b.add_periodic("g", "c");
    b.build(DEFAULT_TOLERANCE)
}
