#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use toposheaf_core::engine::Trace;
use toposheaf_core::sheaf::FilterCoefficients;
use toposheaf_core::simplex::Simplex;

/// Denominator coefficients from poles of magnitude below `max_radius`:
/// conjugate pairs, plus one real pole when `n` is odd.
pub fn stable_feedback(rng: &mut impl Rng, n: usize, max_radius: f64) -> Vec<f64> {
    let mut poly = vec![1.0];
    let mut mul = |factor: &[f64]| {
        let mut out = vec![0.0; poly.len() + factor.len() - 1];
        for (i, p) in poly.iter().enumerate() {
            for (j, f) in factor.iter().enumerate() {
                out[i + j] += p * f;
            }
        }
        poly = out;
    };
    for _ in 0..n / 2 {
        let r = rng.gen_range(0.0..max_radius);
        let theta = rng.gen_range(0.0..std::f64::consts::PI);
        mul(&[1.0, -2.0 * r * theta.cos(), r * r]);
    }
    if n % 2 == 1 {
        mul(&[1.0, -rng.gen_range(-max_radius..max_radius)]);
    }
    poly[1..].to_vec()
}

pub fn stable_coefficients(rng: &mut impl Rng, n: usize) -> FilterCoefficients {
    let a = stable_feedback(rng, n, 0.95);
    let b = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    FilterCoefficients::new(a, b).unwrap()
}

pub fn edge(a: &str, b: &str) -> Simplex {
    Simplex::edge(a, b).unwrap()
}

pub fn streams(pairs: &[(&Simplex, &[f64])]) -> BTreeMap<Simplex, Vec<f64>> {
    pairs.iter().map(|(s, v)| ((*s).clone(), v.to_vec())).collect()
}

/// Feeds sample `t` to edge `t mod k` at tick `t / k`.
pub fn unroll(k: usize, input: &[f64]) -> (BTreeMap<Simplex, Vec<f64>>, usize) {
    let ticks = input.len().div_ceil(k);
    let mut map = BTreeMap::new();
    for i in 0..k {
        let e = edge(&format!("v{i}"), &format!("v{}", i + 1));
        map.insert(e, (0..ticks).map(|t| input.get(t * k + i).copied().unwrap_or(0.0)).collect());
    }
    (map, ticks)
}

/// Inverse of [`unroll`] on the edge outputs.
pub fn roll_up(k: usize, trace: &Trace, len: usize) -> Vec<f64> {
    (0..len)
        .map(|t| {
            let e = edge(&format!("v{}", t % k), &format!("v{}", t % k + 1));
            trace.records[t / k].outputs[&e]
        })
        .collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Norm-wise relative error `max|a-b| / max(1, max|b|)`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    diff / max_abs(b).max(1.0)
}

/// Path of the built `toposheaf` binary.
pub fn bin() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_toposheaf"))
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn invoke(args: &[&str]) -> Outcome {
    let out = bin().args(args).output().expect("binary runs");
    Outcome {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn write_config(dir: &std::path::Path, name: &str, json: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

/// `(tick, site, kind, value)` rows of a run CSV.
pub fn parse_trace(csv: &str) -> Vec<(u64, String, String, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("tick,site,kind,value"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 4, "row {l}");
            (f[0].parse().unwrap(), f[1].to_string(), f[2].to_string(), f[3].parse().unwrap())
        })
        .collect()
}

/// Values of one site and kind, in tick order.
pub fn column(rows: &[(u64, String, String, f64)], site: &str, kind: &str) -> Vec<f64> {
    rows.iter().filter(|r| r.1 == site && r.2 == kind).map(|r| r.3).collect()
}

pub fn parse_series(csv: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("tick,value"));
    lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
}
