//! JSON network descriptions.
//!
//! A config names blocks built by the canonical builders, glues their
//! vertices, adds feedback identifications and attaches input signals to
//! causal edges. Every vertex is addressed as `block.vertex`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toposheaf_core::sheaf::{
    build_chain, build_double_cone, build_fan, build_merge, build_merge_unextended, disjoint_union,
    identify_vertices_unchecked, join_with_extension_unchecked, ConeVariant, FilterCoefficients,
    FilterSheafNetwork, JointOutputCoefficients, MergeCoefficients, NetworkError,
};
use toposheaf_core::simplex::Simplex;

use crate::error::CliError;
use crate::signal::SignalSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Filter order shared by every block.
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ticks: Option<usize>,
    pub blocks: Vec<BlockConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub glue: Vec<GlueConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub feedback: Vec<FeedbackConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeKind {
    Collapsed,
    Resolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockKind {
    Chain {
        edges: usize,
        filters: Vec<FilterConfig>,
    },
    Fan {
        x: FilterConfig,
        y: FilterConfig,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        joint: Option<WeightsConfig>,
    },
    Merge {
        x: FilterConfig,
        y: FilterConfig,
        /// Without merge weights the block ends at its conflict vertex `d`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        merge: Option<WeightsConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        joint: Option<WeightsConfig>,
    },
    DoubleCone {
        x: FilterConfig,
        y: FilterConfig,
        variant: ConeKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        merge: Option<WeightsConfig>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockConfig {
    pub name: String,
    #[serde(flatten)]
    pub kind: BlockKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionConfig {
    pub merge: WeightsConfig,
    pub conflict_vertex: String,
    pub output_vertex: String,
}

/// Identifies `right` with `left`. With an extension, both vertices are
/// instead joined into a conflict vertex followed by a merge edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueConfig {
    pub left: String,
    pub right: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionConfig>,
}

/// State at `from` is copied to `to` at the end of every tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackConfig {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub edge: [String; 2],
    /// `impulse@T`, `step@T`, or a path to a file of samples.
    pub signal: String,
}

impl NetworkConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Assembles the network. No consistency check is run here.
    pub fn build(&self) -> Result<FilterSheafNetwork, CliError> {
        if self.order == 0 {
            return Err(invalid("order", "must be at least 1"));
        }
        if self.blocks.is_empty() {
            return Err(invalid("blocks", "at least one block is required"));
        }
        let mut net: Option<FilterSheafNetwork> = None;
        let mut names = BTreeMap::new();
        for (i, block) in self.blocks.iter().enumerate() {
            let at = format!("blocks[{i}]");
            if block.name.is_empty() || block.name.contains('.') || block.name.contains('-') {
                return Err(invalid(&format!("{at}.name"), "must be non-empty without '.' or '-'"));
            }
            if names.insert(block.name.clone(), i).is_some() {
                return Err(invalid(&format!("{at}.name"), &format!("duplicate block name `{}`", block.name)));
            }
            let built = self
                .build_block(&block.kind, &at)?
                .with_prefix(&format!("{}.", block.name))
                .map_err(|e| invalid(&at, &e.to_string()))?;
            net = Some(match net {
                None => built,
                Some(acc) => disjoint_union(&acc, &built).map_err(|e| invalid(&at, &e.to_string()))?,
            });
        }
        let mut net = net.expect("at least one block");

        for (i, g) in self.glue.iter().enumerate() {
            let at = format!("glue[{i}]");
            for (field, v) in [("left", &g.left), ("right", &g.right)] {
                if net.vertex(v).is_none() {
                    return Err(invalid(&format!("{at}.{field}"), &format!("unknown vertex `{v}`")));
                }
            }
            net = match &g.extension {
                None => identify_vertices_unchecked(&net, &g.left, &g.right).map_err(|e| network_error(&at, e))?,
                Some(ext) => {
                    let mc = self.merge_weights(&ext.merge, &format!("{at}.extension.merge"))?;
                    join_with_extension_unchecked(
                        &net,
                        &g.left,
                        &g.right,
                        &mc,
                        &ext.conflict_vertex,
                        &ext.output_vertex,
                    )
                    .map_err(|e| network_error(&at, e))?
                }
            };
        }

        if !self.feedback.is_empty() {
            let mut b = net.into_builder();
            for (i, f) in self.feedback.iter().enumerate() {
                for (field, v) in [("from", &f.from), ("to", &f.to)] {
                    if b.stalks(&Simplex::vertex(v.as_str())).is_none() {
                        return Err(invalid(&format!("feedback[{i}].{field}"), &format!("unknown vertex `{v}`")));
                    }
                }
                b.add_periodic(&f.from, &f.to);
            }
            net = b.build_unchecked().map_err(|e| invalid("feedback", &e.to_string()))?;
        }
        Ok(net)
    }

    /// Input streams keyed by edge, `ticks` samples each.
    pub fn streams(
        &self,
        net: &FilterSheafNetwork,
        ticks: usize,
        base_dir: &Path,
    ) -> Result<BTreeMap<Simplex, Vec<f64>>, CliError> {
        let mut out = BTreeMap::new();
        for (i, input) in self.inputs.iter().enumerate() {
            let at = format!("inputs[{i}]");
            let [u, v] = &input.edge;
            let edge = net
                .find(&[u.as_str(), v.as_str()])
                .filter(|e| e.dimension() == 1)
                .cloned()
                .ok_or_else(|| invalid(&format!("{at}.edge"), &format!("no edge {u}-{v}")))?;
            let takes_input = net.stalks(&edge).is_some_and(|s| s.input > 0)
                && net.causal_edges().any(|c| c == &edge);
            if !takes_input {
                return Err(invalid(&format!("{at}.edge"), &format!("{edge} does not take external input")));
            }
            let spec = SignalSpec::parse(&input.signal);
            let samples = spec
                .samples(ticks, base_dir)
                .map_err(|m| invalid(&format!("{at}.signal"), &m))?;
            if out.insert(edge.clone(), samples).is_some() {
                return Err(invalid(&format!("{at}.edge"), &format!("{edge} has more than one input")));
            }
        }
        Ok(out)
    }

    fn filter(&self, f: &FilterConfig, at: &str) -> Result<FilterCoefficients, CliError> {
        let n = self.order;
        if f.a.len() != n {
            return Err(invalid(&format!("{at}.a"), &format!("expected {n} coefficients, found {}", f.a.len())));
        }
        if f.b.len() != n + 1 {
            return Err(invalid(
                &format!("{at}.b"),
                &format!("expected {} coefficients, found {}", n + 1, f.b.len()),
            ));
        }
        FilterCoefficients::new(f.a.clone(), f.b.clone()).map_err(|e| invalid(at, &e.to_string()))
    }

    fn weights(&self, w: &WeightsConfig, at: &str) -> Result<(), CliError> {
        let n = self.order;
        for (field, v) in [("x", &w.x), ("y", &w.y)] {
            if v.len() != n {
                return Err(invalid(&format!("{at}.{field}"), &format!("expected {n} weights, found {}", v.len())));
            }
        }
        Ok(())
    }

    fn merge_weights(&self, w: &WeightsConfig, at: &str) -> Result<MergeCoefficients, CliError> {
        self.weights(w, at)?;
        MergeCoefficients::new(w.x.clone(), w.y.clone()).map_err(|e| invalid(at, &e.to_string()))
    }

    fn joint_weights(&self, w: &Option<WeightsConfig>, at: &str) -> Result<Option<JointOutputCoefficients>, CliError> {
        w.as_ref()
            .map(|w| {
                self.weights(w, at)?;
                JointOutputCoefficients::new(w.x.clone(), w.y.clone()).map_err(|e| invalid(at, &e.to_string()))
            })
            .transpose()
    }

    fn build_block(&self, kind: &BlockKind, at: &str) -> Result<FilterSheafNetwork, CliError> {
        let built = match kind {
            BlockKind::Chain { edges, filters } => {
                if *edges == 0 {
                    return Err(invalid(&format!("{at}.edges"), "must be at least 1"));
                }
                if filters.len() != 1 && filters.len() != *edges {
                    return Err(invalid(
                        &format!("{at}.filters"),
                        &format!("expected 1 or {edges} filters, found {}", filters.len()),
                    ));
                }
                let cs = filters
                    .iter()
                    .enumerate()
                    .map(|(i, f)| self.filter(f, &format!("{at}.filters[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                build_chain(*edges, &cs)
            }
            BlockKind::Fan { x, y, joint } => {
                let cx = self.filter(x, &format!("{at}.x"))?;
                let cy = self.filter(y, &format!("{at}.y"))?;
                let jc = self.joint_weights(joint, &format!("{at}.joint"))?;
                build_fan(&cx, &cy, jc.as_ref())
            }
            BlockKind::Merge { x, y, merge, joint } => {
                let cx = self.filter(x, &format!("{at}.x"))?;
                let cy = self.filter(y, &format!("{at}.y"))?;
                let jc = self.joint_weights(joint, &format!("{at}.joint"))?;
                match merge {
                    Some(m) => build_merge(&cx, &cy, &self.merge_weights(m, &format!("{at}.merge"))?, jc.as_ref()),
                    None => build_merge_unextended(&cx, &cy, jc.as_ref()),
                }
            }
            BlockKind::DoubleCone { x, y, variant, merge } => {
                let cx = self.filter(x, &format!("{at}.x"))?;
                let cy = self.filter(y, &format!("{at}.y"))?;
                let variant = match (variant, merge) {
                    (ConeKind::Collapsed, Some(m)) => ConeVariant::Collapsed(self.merge_weights(m, &format!("{at}.merge"))?),
                    (ConeKind::Collapsed, None) => {
                        return Err(invalid(&format!("{at}.merge"), "collapsed cones need merge weights"))
                    }
                    (ConeKind::Resolved, None) => ConeVariant::Resolved,
                    (ConeKind::Resolved, Some(_)) => {
                        return Err(invalid(&format!("{at}.merge"), "resolved cones take no merge weights"))
                    }
                };
                build_double_cone(&cx, &cy, &variant)
            }
        };
        built.map_err(|e| invalid(at, &e.to_string()))
    }
}

fn invalid(at: &str, message: &str) -> CliError {
    CliError::Invalid {
        at: at.to_string(),
        message: message.to_string(),
    }
}

fn network_error(at: &str, e: NetworkError) -> CliError {
    match e {
        NetworkError::StalkMismatch { vertex, left, right } => CliError::Conflict {
            vertex: vertex.to_string(),
            detail: format!(
                "state stalks of dimension {} and {} cannot be identified; insert a concurrent extension",
                left.state, right.state
            ),
        },
        NetworkError::WriteConflict { vertex, first, second, .. } => CliError::Conflict {
            vertex: vertex.to_string(),
            detail: format!("{first} and {second} both write it"),
        },
        other => invalid(at, &other.to_string()),
    }
}

/// Directory against which relative signal paths resolve.
pub fn base_dir(config_path: &Path) -> PathBuf {
    config_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}
