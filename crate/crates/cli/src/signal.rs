use std::path::{Path, PathBuf};

/// Input stream description: `impulse@T`, `step@T`, or a sample file.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpec {
    Impulse(usize),
    Step(usize),
    File(PathBuf),
}

impl SignalSpec {
    pub fn parse(s: &str) -> Self {
        let timed = |prefix: &str| {
            s.strip_prefix(prefix)
                .and_then(|t| t.strip_prefix('@'))
                .and_then(|t| t.trim().parse().ok())
        };
        if let Some(t) = timed("impulse") {
            Self::Impulse(t)
        } else if let Some(t) = timed("step") {
            Self::Step(t)
        } else {
            Self::File(PathBuf::from(s))
        }
    }

    /// Exactly `len` samples. Files shorter than `len` are zero padded.
    pub fn samples(&self, len: usize, base_dir: &Path) -> Result<Vec<f64>, String> {
        match self {
            Self::Impulse(t) => Ok((0..len).map(|i| if i == *t { 1.0 } else { 0.0 }).collect()),
            Self::Step(t) => Ok((0..len).map(|i| if i >= *t { 1.0 } else { 0.0 }).collect()),
            Self::File(p) => {
                let path = if p.is_absolute() { p.clone() } else { base_dir.join(p) };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read signal file {}: {e}", path.display()))?;
                let mut out = parse_samples(&text).map_err(|m| format!("{}: {m}", path.display()))?;
                out.resize(len, 0.0);
                Ok(out)
            }
        }
    }
}

/// Numbers separated by whitespace or commas; `#` starts a comment.
pub fn parse_samples(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let v = tok
                .parse::<f64>()
                .map_err(|_| format!("line {}: `{tok}` is not a number", lineno + 1))?;
            out.push(v);
        }
    }
    Ok(out)
}
