use std::fmt::Write;

use toposheaf_core::engine::Trace;

/// `tick,site,kind,value` rows sorted by tick, then site, then kind.
pub fn trace_csv(trace: &Trace) -> String {
    let mut rows: Vec<(u64, String, &str, f64)> = Vec::new();
    for r in &trace.records {
        rows.extend(r.inputs.iter().map(|(s, v)| (r.tick, s.to_string(), "input", *v)));
        rows.extend(r.outputs.iter().map(|(s, v)| (r.tick, s.to_string(), "output", *v)));
    }
    rows.sort_by(|a, b| (a.0, &a.1, a.2).cmp(&(b.0, &b.1, b.2)));
    let mut out = String::from("tick,site,kind,value\n");
    for (tick, site, kind, v) in rows {
        writeln!(out, "{tick},{site},{kind},{}", number(v)).unwrap();
    }
    out
}

pub fn series_csv(values: &[f64]) -> String {
    let mut out = String::from("tick,value\n");
    for (t, v) in values.iter().enumerate() {
        writeln!(out, "{t},{}", number(*v)).unwrap();
    }
    out
}

/// Seventeen significant digits, enough to round-trip any f64.
pub fn number(v: f64) -> String {
    // Normalise -0 so that traces compare byte for byte.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}
