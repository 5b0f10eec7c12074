//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

// Checks are written as `!(err <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toposheaf_core::engine::{run, Simulator, Trace};
use toposheaf_core::linmap::LinearMap;
use toposheaf_core::oracle::iir_reference;
use toposheaf_core::sheaf::*;
use toposheaf_core::simplex::Simplex;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn random_signal(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_streams(rng: &mut ChaCha8Rng, net: &FilterSheafNetwork, len: usize) -> BTreeMap<Simplex, Vec<f64>> {
    let sim = Simulator::new(net).unwrap();
    let sites: Vec<Simplex> = sim.schedule().input_sites().cloned().collect();
    sites.into_iter().map(|s| (s, random_signal(rng, len))).collect()
}

fn random_merge(rng: &mut ChaCha8Rng, n: usize) -> MergeCoefficients {
    MergeCoefficients::new(random_signal(rng, n), random_signal(rng, n)).unwrap()
}

// 1. Classical filters embed as chains.
fn classical_embedding() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC1);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = 1 + case % 8;
        let k = rng.gen_range(1..=4);
        let c = stable_coefficients(&mut rng, n);
        let input = random_signal(&mut rng, 256);
        let net = build_chain(k, std::slice::from_ref(&c)).unwrap();
        let (streams, ticks) = unroll(k, &input);
        let got = roll_up(k, &run(&net, &streams, ticks).unwrap(), input.len());
        let err = relative_error(&got, &iir_reference(&c, &input));
        ensure!(err <= 1e-9, "case {case} (n={n}, k={k}): relative error {err:e}");
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("200 cases, worst relative error {worst:.1e}, {elapsed:.2?}"))
}

/// One deviation the checker must report, keyed for set comparison.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Path {
        cell: Simplex,
        via: BTreeSet<Simplex>,
        target: Simplex,
        layer: String,
    },
    Square {
        cell: Simplex,
        face: Simplex,
    },
}

const DELTA: f64 = 1e-3;
const TOL: f64 = 1e-12;

/// Row `j` of `m · basis`, or of `m` when there is no basis.
fn row_through(m: &LinearMap, j: usize, basis: Option<&LinearMap>) -> Vec<f64> {
    match basis {
        None => m.row(j).to_vec(),
        Some(e) => (0..e.cols())
            .map(|c| (0..m.cols()).map(|k| m.get(j, k) * e.get(k, c)).sum())
            .collect(),
    }
}

fn max_abs_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn basis_row(net: &FilterSheafNetwork, cell: &Simplex, j: usize) -> f64 {
    match net.section_basis(cell) {
        Some(e) => max_abs_of(e.row(j).iter().copied()),
        None => 1.0,
    }
}

fn layer_basis<'a>(net: &'a FilterSheafNetwork, cell: &Simplex, layer: Layer) -> Option<&'a LinearMap> {
    if layer == Layer::State {
        net.section_basis(cell)
    } else {
        None
    }
}

fn other_edge(sigma: &Simplex, edge: &Simplex, v: &str) -> Simplex {
    sigma
        .faces()
        .unwrap()
        .into_iter()
        .find(|e| e != edge && e.contains_vertex(v))
        .unwrap()
}

fn overlap(a: std::ops::Range<usize>, b: std::ops::Range<usize>) -> std::ops::Range<usize> {
    a.start.max(b.start)..a.end.min(b.end)
}

/// Violations a `DELTA` change at entry `(i, j)` of the `layer` map of
/// `cell -> face` must cause, with their expected deviations. Derived from
/// what each check compares: two composites per corner of a triangle on the
/// rows both edges determine, and input squares against the vertical maps.
fn predicted(net: &FilterSheafNetwork, cell: &Simplex, face: &Simplex, layer: Layer, i: usize, j: usize) -> BTreeMap<Key, f64> {
    let mut out = BTreeMap::new();
    let mut push = |k: Key, d: f64| {
        if d > TOL {
            out.insert(k, d);
        }
    };
    let layer_name = layer.to_string();
    if cell.dimension() == 1 {
        // A lower map: paths from every triangle on this edge into `face`.
        let v = face.vertices()[0].as_str();
        for sigma in net.complex().of_dimension(2).filter(|s| s.faces().unwrap().contains(cell)) {
            let t2 = other_edge(sigma, cell, v);
            let rows = overlap(
                net.restriction(cell, face).unwrap().determined(layer),
                net.restriction(&t2, face).unwrap().determined(layer),
            );
            if rows.is_empty() || !rows.contains(&i) {
                continue;
            }
            let top = net.restriction_map(sigma, cell, layer).unwrap();
            let d = DELTA * max_abs_of(row_through(top, j, layer_basis(net, sigma, layer)));
            push(
                Key::Path {
                    cell: sigma.clone(),
                    via: [cell.clone(), t2].into(),
                    target: face.clone(),
                    layer: layer_name.clone(),
                },
                d,
            );
        }
    } else {
        // An upper map: paths through `face` into each of its vertices.
        for v in face.vertices() {
            let target = Simplex::vertex(v.clone());
            let t2 = other_edge(cell, face, v);
            let down = net.restriction(face, &target).unwrap();
            let rows = overlap(down.determined(layer), net.restriction(&t2, &target).unwrap().determined(layer));
            if rows.is_empty() {
                continue;
            }
            let col = max_abs_of(rows.map(|r| down.layer(layer).get(r, i)));
            let scale = if layer == Layer::State { basis_row(net, cell, j) } else { 1.0 };
            push(
                Key::Path {
                    cell: cell.clone(),
                    via: [face.clone(), t2].into(),
                    target,
                    layer: layer_name.clone(),
                },
                DELTA * col * scale,
            );
        }
    }
    let face_input = &net.vertical(face).unwrap().input;
    if face_input.rows() > 0 {
        let basis = net.section_basis(cell);
        let d = match layer {
            Layer::State => {
                let scale = basis.map_or(1.0, |e| max_abs_of(e.row(j).iter().copied()));
                DELTA * max_abs_of((0..face_input.rows()).map(|r| face_input.get(r, i))) * scale
            }
            Layer::Input => DELTA * max_abs_of(row_through(&net.vertical(cell).unwrap().input, j, basis)),
            Layer::Output => 0.0,
        };
        push(
            Key::Square {
                cell: cell.clone(),
                face: face.clone(),
            },
            d,
        );
    }
    out
}

fn reported(report: &ConsistencyReport) -> Result<BTreeMap<Key, f64>, String> {
    let mut out = BTreeMap::new();
    for v in report.iter() {
        let (k, d) = match v {
            Violation::PathDisagreement {
                cell,
                via,
                target,
                layer,
                deviation,
            } => (
                Key::Path {
                    cell: cell.clone(),
                    via: [via.0.clone(), via.1.clone()].into(),
                    target: target.clone(),
                    layer: layer.to_string(),
                },
                *deviation,
            ),
            Violation::SquareDisagreement { cell, face, deviation, .. } => (
                Key::Square {
                    cell: cell.clone(),
                    face: face.clone(),
                },
                *deviation,
            ),
            other => return Err(format!("unexpected violation: {other}")),
        };
        out.insert(k, d);
    }
    Ok(out)
}

struct PerturbationTally {
    tried: usize,
    detected: usize,
    maps: BTreeSet<(Simplex, Simplex, String)>,
    touched: BTreeSet<(Simplex, Simplex, String)>,
}

fn perturb_all(name: &str, net: &FilterSheafNetwork, rng: &mut ChaCha8Rng, budget: usize, tally: &mut PerturbationTally) -> Result<(), String> {
    let mut sites = Vec::new();
    for (cell, face, r) in net.restrictions() {
        for layer in Layer::ALL {
            let m = r.layer(layer);
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    sites.push((cell.clone(), face.clone(), layer, i, j));
                }
            }
        }
    }
    if sites.len() > budget {
        sites.shuffle(rng);
        sites.truncate(budget);
    }
    for (cell, face, layer, i, j) in sites {
        let expect = predicted(net, &cell, &face, layer, i, j);
        let mut bad = net.clone();
        let m = bad.restriction_mut(&cell, &face, layer).unwrap();
        m.set(i, j, m.get(i, j) + DELTA);
        let got = reported(&check_consistency(&bad, TOL))?;
        let keys = |m: &BTreeMap<Key, f64>| m.keys().cloned().collect::<Vec<_>>();
        ensure!(
            keys(&got) == keys(&expect),
            "{name}: {layer} map {cell} -> {face} entry ({i},{j}): expected {:?}, reported {:?}",
            keys(&expect),
            keys(&got)
        );
        for (k, d) in &expect {
            let r = got[k];
            ensure!((r - d).abs() <= 1e-9 * d + 1e-12, "{name}: {k:?} deviation {r:e}, expected {d:e}");
        }
        tally.tried += 1;
        tally.touched.insert((cell.clone(), face.clone(), format!("{name}/{layer}")));
        if !got.is_empty() {
            tally.detected += 1;
            tally.maps.insert((cell.clone(), face.clone(), format!("{name}/{layer}")));
        }
    }
    Ok(())
}

// 2. Canonical builders are consistent and every observable perturbation
// is reported against the right path pair.
fn consistency() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC2);
    let mut builds = 0;
    let mut tally = PerturbationTally {
        tried: 0,
        detected: 0,
        maps: BTreeSet::new(),
        touched: BTreeSet::new(),
    };
    for n in 1..=4 {
        let cx = stable_coefficients(&mut rng, n);
        let cy = stable_coefficients(&mut rng, n);
        let mc = random_merge(&mut rng, n);
        let jc = JointOutputCoefficients::new(random_signal(&mut rng, n), random_signal(&mut rng, n)).unwrap();
        let mut nets: Vec<(String, FilterSheafNetwork)> = (1..=8)
            .map(|k| (format!("chain k={k}"), build_chain(k, std::slice::from_ref(&cx)).unwrap()))
            .collect();
        nets.extend([
            ("fan".to_string(), build_fan(&cx, &cy, Some(&jc)).unwrap()),
            ("merge".to_string(), build_merge(&cx, &cy, &mc, Some(&jc)).unwrap()),
            ("collapsed cone".to_string(), build_double_cone(&cx, &cy, &ConeVariant::Collapsed(mc.clone())).unwrap()),
            ("resolved cone".to_string(), build_double_cone(&cx, &cy, &ConeVariant::Resolved).unwrap()),
        ]);
        for (name, net) in &nets {
            let report = check_consistency(net, TOL);
            ensure!(report.is_consistent(), "{name} (n={n}) is inconsistent:\n{report}");
            builds += 1;
            let budget = if n <= 2 { usize::MAX } else { 300 };
            perturb_all(&format!("{name} n={n}"), net, &mut rng, budget, &mut tally)?;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!(
        "{builds} builds consistent at 1e-12; {} perturbations, {} detected exactly as predicted, {} of {} perturbed maps observable, {elapsed:.2?}",
        tally.tried,
        tally.detected,
        tally.maps.len(),
        tally.touched.len()
    ))
}

// 3. Head-to-head gluing conflicts; the extension resolves it.
fn conflict_detection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC3);
    let mut joins = 0;
    for n in 1..=4 {
        for round in 0..25 {
            let p = build_chain(1, &[stable_coefficients(&mut rng, n)]).unwrap().with_prefix("p.").unwrap();
            let q = build_chain(1, &[stable_coefficients(&mut rng, n)]).unwrap().with_prefix("q.").unwrap();
            match glue(&p, &q, &[("p.v1", "q.v1")]) {
                Err(NetworkError::WriteConflict { vertex, .. }) => {
                    ensure!(vertex == Simplex::vertex("p.v1"), "conflict reported at {vertex}")
                }
                other => return Err(format!("head-to-head glue was not rejected: {other:?}")),
            }
            let mc = match round {
                0 => MergeCoefficients::average(n),
                1 => MergeCoefficients::select_x(n),
                2 => MergeCoefficients::new(vec![0.0; n], vec![0.0; n]).unwrap(),
                3 => MergeCoefficients::new(vec![1e6; n], vec![-1e6; n]).unwrap(),
                _ => random_merge(&mut rng, n),
            };
            let both = disjoint_union(&p, &q).unwrap();
            let joined = join_with_extension(&both, "p.v1", "q.v1", &mc, "d", "e").map_err(|e| format!("n={n}: {e}"))?;
            let report = check_consistency(&joined, TOL);
            ensure!(report.is_consistent(), "extension with {mc:?} is inconsistent:\n{report}");
            joins += 1;
        }
    }
    Ok(format!("100 head-to-head glues rejected at the shared vertex; {joins} extensions consistent"))
}

// 4. Merge weights (1, 0) reduce the merge to its x branch.
fn degenerate_merge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC4);
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        for _ in 0..5 {
            let cx = stable_coefficients(&mut rng, n);
            let cy = stable_coefficients(&mut rng, n);
            let mc = MergeCoefficients::new(vec![1.0; n], vec![0.0; n]).unwrap();
            let merge = Simulator::new(&build_merge(&cx, &cy, &mc, None).unwrap()).unwrap();
            let chain = Simulator::new(&build_chain(1, &[cx]).unwrap()).unwrap();
            let (x, y) = (random_signal(&mut rng, 64), random_signal(&mut rng, 64));
            let (mut ms, mut cs) = (merge.zero_state(), chain.zero_state());
            for t in 0..64 {
                let m = merge
                    .step(&mut ms, &BTreeMap::from([(edge("b", "d"), x[t]), (edge("c", "d"), y[t])]))
                    .unwrap();
                let c = chain.step(&mut cs, &BTreeMap::from([(edge("v0", "v1"), x[t])])).unwrap();
                let dy = (m.outputs[&edge("b", "d")] - c.outputs[&edge("v0", "v1")]).abs();
                let e = ms.get(&Simplex::vertex("e")).unwrap();
                let v1 = cs.get(&Simplex::vertex("v1")).unwrap();
                let ds = e.iter().zip(v1).fold(0.0f64, |w, (a, b)| w.max((a - b).abs()));
                ensure!(dy <= 1e-12 && ds <= 1e-12, "n={n} tick {t}: output gap {dy:e}, state gap {ds:e}");
                worst = worst.max(dy).max(ds);
            }
        }
    }
    Ok(format!("20 random merges track the lone x chain, worst gap {worst:.1e}"))
}

// 5. Collapsed cone is a 2-chain; resolved cone is reversal symmetric.
fn cone_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC5);
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let c = stable_coefficients(&mut rng, n);
        let chain = build_chain(2, std::slice::from_ref(&c)).unwrap();
        let cone = build_double_cone(&c, &c, &ConeVariant::Collapsed(MergeCoefficients::average(n))).unwrap();
        let mut impulse = vec![0.0; 32];
        impulse[0] = 1.0;
        let zero = vec![0.0; 32];
        let ct = run(&chain, &streams(&[(&edge("v0", "v1"), &impulse), (&edge("v1", "v2"), &zero)]), 32).unwrap();
        let kt = run(
            &cone,
            &streams(&[
                (&edge("b", "d"), &impulse),
                (&edge("c", "d"), &impulse),
                (&edge("e", "f"), &zero),
                (&edge("e", "g"), &zero),
            ]),
            32,
        )
        .unwrap();
        for (cone_site, chain_site) in [(("b", "d"), ("v0", "v1")), (("c", "d"), ("v0", "v1")), (("e", "f"), ("v1", "v2")), (("e", "g"), ("v1", "v2"))] {
            let a = kt.outputs_of(&edge(cone_site.0, cone_site.1));
            let b = ct.outputs_of(&edge(chain_site.0, chain_site.1));
            let gap = a.iter().zip(&b).fold(0.0f64, |w, (x, y)| w.max((x - y).abs()));
            ensure!(gap <= 1e-12, "n={n}: {}-{} differs from {}-{} by {gap:e}", cone_site.0, cone_site.1, chain_site.0, chain_site.1);
            worst = worst.max(gap);
        }

        let cy = stable_coefficients(&mut rng, n);
        let x = random_signal(&mut rng, 32);
        let y = random_signal(&mut rng, 32);
        let fwd = build_double_cone(&c, &cy, &ConeVariant::Resolved).unwrap();
        let rev = build_double_cone(&cy, &c, &ConeVariant::Resolved).unwrap();
        let a = run(&fwd, &streams(&[(&edge("b", "p"), &x), (&edge("c", "p"), &y)]), 32).unwrap();
        let b = run(&rev, &streams(&[(&edge("b", "p"), &y), (&edge("c", "p"), &x)]), 32).unwrap();
        ensure!(a.outputs_of(&edge("b", "p")) == b.outputs_of(&edge("c", "p")), "n={n}: reversal broken on b-p");
        ensure!(a.outputs_of(&edge("c", "p")) == b.outputs_of(&edge("b", "p")), "n={n}: reversal broken on c-p");
    }
    Ok(format!("collapsed cone within {worst:.1e} of the 2-chain over 32 ticks; resolved reversal exact, n=1..4"))
}

fn trace_bits(t: &Trace) -> Vec<(u64, Simplex, u64)> {
    t.records
        .iter()
        .flat_map(|r| r.outputs.iter().map(move |(s, y)| (r.tick, s.clone(), y.to_bits())))
        .collect()
}

// 6. Concurrent groups give the same trace in any order.
fn concurrency_contract() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC6);
    let n = 3;
    let cx = stable_coefficients(&mut rng, n);
    let cy = stable_coefficients(&mut rng, n);
    let jc = JointOutputCoefficients::new(random_signal(&mut rng, n), random_signal(&mut rng, n)).unwrap();
    let nets = [
        ("fan", build_fan(&cx, &cy, Some(&jc)).unwrap()),
        ("merge", build_merge(&cx, &cy, &random_merge(&mut rng, n), Some(&jc)).unwrap()),
    ];
    let mut groups = 0;
    for (name, net) in &nets {
        let sim = Simulator::new(net).unwrap();
        groups += sim.schedule().steps().iter().filter(|s| s.concurrent.len() > 1).count();
        let s = random_streams(&mut rng, net, 48);
        let reference = trace_bits(&sim.run(&s, 48).unwrap());
        for trial in 0..50 {
            let trace = sim
                .run_with_order(&s, 48, |_, _, len| {
                    let mut p: Vec<usize> = (0..len).collect();
                    p.shuffle(&mut rng);
                    p
                })
                .unwrap();
            ensure!(trace_bits(&trace) == reference, "{name}: permutation {trial} changed the trace");
        }
    }
    ensure!(groups > 0, "no concurrent group with more than one evaluation");
    Ok("50 random orders per network, fan and merge traces bit-identical".into())
}

// 7. Chains are linear and shift invariant.
fn lti_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC7);
    let mut worst: f64 = 0.0;
    for case in 0..60 {
        let n = 1 + case % 6;
        let k = 1 + case % 4;
        let net = build_chain(k, &[stable_coefficients(&mut rng, n)]).unwrap();
        let len = rng.gen_range(1..40);
        let (u, v) = (random_signal(&mut rng, len * k), random_signal(&mut rng, len * k));
        let (alpha, beta) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let uv: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
        let go = |x: &[f64]| {
            let (s, t) = unroll(k, x);
            run(&net, &s, t).unwrap()
        };
        let (tuv, tu, tv) = (go(&uv), go(&u), go(&v));
        for site in tuv.output_sites() {
            let rhs: Vec<f64> = tu.outputs_of(site).iter().zip(tv.outputs_of(site)).map(|(a, b)| alpha * a + beta * b).collect();
            let err = relative_error(&tuv.outputs_of(site), &rhs);
            ensure!(err <= 1e-12, "case {case}: linearity error {err:e} at {site}");
            worst = worst.max(err);
        }

        let delay = rng.gen_range(1..=8);
        let (s, t) = unroll(k, &u);
        let delayed: BTreeMap<Simplex, Vec<f64>> = s
            .iter()
            .map(|(e, x)| (e.clone(), std::iter::repeat_n(0.0, delay).chain(x.iter().copied()).collect()))
            .collect();
        let base = run(&net, &s, t).unwrap();
        let shifted = run(&net, &delayed, t + delay).unwrap();
        for site in base.output_sites() {
            let a = base.outputs_of(site);
            let b = shifted.outputs_of(site);
            ensure!(b[..delay].iter().all(|&y| y == 0.0), "case {case}: output before the delayed input");
            let err = relative_error(&b[delay..], &a);
            ensure!(err <= 1e-12, "case {case}: shift error {err:e} at {site}");
            worst = worst.max(err);
        }
    }
    Ok(format!("60 chains, worst linearity/shift error {worst:.1e}"))
}

// 8. The command line is deterministic and its verdicts match the library.
fn cli_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let chain = r#"{"order": 2, "ticks": 32, "blocks": [{"name": "c", "type": "chain", "edges": 3,
        "filters": [{"a": [-0.5, 0.06], "b": [1.0, 0.5, 0.25]}]}],
        "inputs": [{"edge": ["c.v0", "c.v1"], "signal": "impulse@0"}, {"edge": ["c.v2", "c.v3"], "signal": "step@4"}]}"#;
    let fan = r#"{"order": 1, "ticks": 16, "blocks": [{"name": "f", "type": "fan",
        "x": {"a": [-0.5], "b": [1.0, 0.0]}, "y": {"a": [0.3], "b": [0.2, 0.7]}, "joint": {"x": [1.0], "y": [-1.0]}}],
        "inputs": [{"edge": ["f.a", "f.b"], "signal": "impulse@0"}, {"edge": ["f.a", "f.c"], "signal": "step@2"}]}"#;
    let merge = r#"{"order": 1, "ticks": 16, "blocks": [{"name": "m", "type": "merge",
        "x": {"a": [-0.5], "b": [1.0, 0.0]}, "y": {"a": [0.3], "b": [0.2, 0.7]}, "merge": {"x": [0.3], "y": [0.7]}}],
        "inputs": [{"edge": ["m.b", "m.d"], "signal": "impulse@0"}]}"#;
    let cones = r#"{"order": 1, "ticks": 16, "blocks": [
        {"name": "k", "type": "double_cone", "variant": "collapsed", "x": {"a": [-0.5], "b": [1.0, 0.0]}, "y": {"a": [-0.5], "b": [1.0, 0.0]}, "merge": {"x": [0.5], "y": [0.5]}},
        {"name": "r", "type": "double_cone", "variant": "resolved", "x": {"a": [-0.5], "b": [1.0, 0.0]}, "y": {"a": [0.2], "b": [0.0, 1.0]}}],
        "inputs": [{"edge": ["k.b", "k.d"], "signal": "impulse@0"}, {"edge": ["r.b", "r.p"], "signal": "impulse@1"}]}"#;
    let h2h = r#"{"order": 1, "blocks": [
        {"name": "p", "type": "chain", "edges": 1, "filters": [{"a": [-0.5], "b": [1.0, 0.0]}]},
        {"name": "q", "type": "chain", "edges": 1, "filters": [{"a": [0.3], "b": [1.0, 0.0]}]}],
        "glue": [{"left": "p.v1", "right": "q.v1"}]}"#;
    let joined = h2h.replace(
        r#""right": "q.v1"}"#,
        r#""right": "q.v1", "extension": {"merge": {"x": [0.4], "y": [0.6]}, "conflict_vertex": "j.d", "output_vertex": "j.e"}}"#,
    );
    let bad_length = chain.replace("[-0.5, 0.06]", "[-0.5]");

    let cases: [(&str, &str, i32, Option<&str>); 7] = [
        ("chain", chain, 0, None),
        ("fan", fan, 0, None),
        ("merge", merge, 0, None),
        ("cones", cones, 0, None),
        ("joined", &joined, 0, None),
        ("h2h", h2h, 1, Some("conflict at vertex p.v1")),
        ("bad_length", &bad_length, 2, Some("blocks[0].filters[0].a")),
    ];
    let mut runs = 0;
    for (name, json, code, needle) in cases {
        let path = write_config(dir.path(), &format!("{name}.json"), json);
        let p = path.to_str().unwrap();
        let out = invoke(&["check", p]);
        ensure!(out.code == code, "{name}: check exited {} (expected {code}): {}", out.code, out.stderr);
        if let Some(n) = needle {
            ensure!(out.stderr.contains(n), "{name}: diagnostic lacks `{n}`: {}", out.stderr);
        }
        if code != 2 {
            let lib = toposheaf_cli::NetworkConfig::load(&path).unwrap().build().unwrap();
            ensure!(lib.check(DEFAULT_TOLERANCE).is_consistent() == (code == 0), "{name}: CLI and library disagree");
        }
        if code == 0 {
            let first = invoke(&["run", p]);
            let second = invoke(&["run", p]);
            ensure!(first.code == 0, "{name}: run failed: {}", first.stderr);
            ensure!(first.stdout == second.stdout, "{name}: repeated runs differ");
            let file = dir.path().join(format!("{name}.csv"));
            ensure!(invoke(&["run", p, "--out", file.to_str().unwrap()]).code == 0, "{name}: --out failed");
            ensure!(std::fs::read_to_string(&file).unwrap() == first.stdout, "{name}: file and stdout differ");
            runs += 1;
        } else {
            ensure!(invoke(&["run", p]).code == code, "{name}: run did not refuse");
        }
    }
    Ok(format!("{runs} configs run byte-identically; check exit codes 0/1/2 match the verdicts"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("classical embedding", classical_embedding),
        ("consistency", consistency),
        ("conflict detection", conflict_detection),
        ("degenerate merge", degenerate_merge),
        ("cone equivalence", cone_equivalence),
        ("concurrency contract", concurrency_contract),
        ("LTI properties", lti_properties),
        ("CLI determinism", cli_determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("AC{} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("AC{} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} acceptance criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", criteria.len());
}
