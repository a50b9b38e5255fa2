//! JSON run reports and line-delimited trace records.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use mrim_core::SpreadEstimate;
use serde::Serialize;
use serde_json::Value;

use crate::edgelist::LoadedGraph;
use crate::error::Result;

pub const SCHEMA: &str = "mrim-report/1";

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GraphInfo {
    pub nodes: usize,
    pub edges: usize,
    pub duplicates: usize,
    pub weighted_cascade: bool,
}

impl GraphInfo {
    pub fn of(g: &LoadedGraph, weighted_cascade: bool) -> Self {
        GraphInfo {
            nodes: g.graph.node_count(),
            edges: g.graph.edge_count(),
            duplicates: g.duplicates,
            weighted_cascade,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub stderr: f64,
    /// 0 for exact values.
    pub samples: usize,
}

impl From<SpreadEstimate> for Spread {
    fn from(e: SpreadEstimate) -> Self {
        Spread {
            mean: e.mean,
            stderr: e.stderr,
            samples: e.samples,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub algorithm: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, Value>,
    pub graph: GraphInfo,
    pub result: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn new(command: &str, algorithm: &str, seed: u64, graph: GraphInfo) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            algorithm: algorithm.to_string(),
            seed,
            parameters: BTreeMap::new(),
            graph,
            result: BTreeMap::new(),
            warnings: Vec::new(),
            wall_time_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_string(), to_value(value));
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.result.insert(key.to_string(), to_value(value));
        self
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = self.to_json();
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }
}

fn to_value(v: impl Serialize) -> Value {
    // non-finite floats become null rather than failing
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// One adaptive round of one trial, rounds 1-based.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TraceRecord {
    pub trial: u64,
    pub round: usize,
    pub seeds: Vec<String>,
    pub newly_activated: Vec<String>,
    pub cumulative: usize,
}

pub fn write_trace<W: Write>(w: &mut W, records: &[TraceRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut *w, r).expect("trace record serializes");
        w.write_all(b"\n")?;
    }
    Ok(())
}
