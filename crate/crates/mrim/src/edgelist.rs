//! Edge-list ingestion.
//!
//! One record per line: `u v [p]`, whitespace separated, labels are
//! arbitrary tokens. A line holding a single label declares a node with no
//! edges. `#` starts a comment. Without `p` the weighted cascade rule must be
//! enabled. Labels are mapped to dense ids in order of first appearance.

use std::collections::HashMap;
use std::path::Path;

use mrim_core::{DirectedGraph, GraphBuilder, NodeId};

use crate::error::{Failure, Result};

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub labels: Vec<String>,
    pub index: HashMap<String, NodeId>,
    /// Repeated `(u, v)` records dropped (first one kept).
    pub duplicates: usize,
}

impl LoadedGraph {
    pub fn node(&self, label: &str) -> Result<NodeId> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Failure::input(format!("unknown node label `{label}`")))
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn labels_of(&self, nodes: &[NodeId]) -> Vec<String> {
        nodes.iter().map(|&v| self.label(v).to_string()).collect()
    }

    /// Parses a comma or whitespace separated label list.
    pub fn nodes_from_list(&self, list: &str) -> Result<Vec<NodeId>> {
        list.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| self.node(t))
            .collect()
    }
}

fn line_error(line: usize, msg: impl std::fmt::Display) -> Failure {
    Failure::input(format!("line {line}: {msg}"))
}

pub fn parse_edge_list(text: &str, weighted_cascade: bool) -> Result<LoadedGraph> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut intern = |label: &str| -> NodeId {
        if let Some(&v) = index.get(label) {
            return v;
        }
        let v = NodeId::from(labels.len());
        labels.push(label.to_string());
        index.insert(label.to_string(), v);
        v
    };
    let mut builder = GraphBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [v] => builder.ensure_node(intern(v)),
            [u, v, rest @ ..] => {
                let p = match rest {
                    [] if weighted_cascade => None,
                    [] => return Err(line_error(line, "missing probability (use --weighted-cascade)")),
                    [p] => {
                        let p: f64 = p.parse().map_err(|_| line_error(line, format!("bad probability `{p}`")))?;
                        if !(p > 0.0 && p <= 1.0) {
                            return Err(line_error(line, format!("probability {p} outside (0,1]")));
                        }
                        Some(p)
                    }
                    _ => return Err(line_error(line, "expected `u v [p]`")),
                };
                let (u, v) = (intern(u), intern(v));
                builder.add_edge(u, v, p);
            }
        }
    }
    let built = builder.build(weighted_cascade)?;
    let (graph, duplicates) = (built.graph, built.duplicates);
    // the builder only knows ids; isolated labels were registered through ensure_node
    debug_assert_eq!(graph.node_count(), labels.len());
    Ok(LoadedGraph {
        graph,
        labels,
        index,
        duplicates,
    })
}

pub fn read_edge_list(path: &Path, weighted_cascade: bool) -> Result<LoadedGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_edge_list(&text, weighted_cascade).map_err(|f| Failure::input(format!("{}: {}", path.display(), f.message)))
}
