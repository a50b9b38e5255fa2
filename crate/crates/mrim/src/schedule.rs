//! Seed schedule files: one line per round, labels separated by commas or
//! whitespace. A line holding only `-` is an empty round; blank lines and
//! `#` comments are skipped.

use std::fmt::Write as _;

use mrim_core::NodeId;

use crate::edgelist::LoadedGraph;
use crate::error::{Failure, Result};

pub fn parse_schedule(text: &str, g: &LoadedGraph) -> Result<Vec<Vec<NodeId>>> {
    let mut rounds = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body == "-" {
            rounds.push(Vec::new());
            continue;
        }
        let nodes = g
            .nodes_from_list(body)
            .map_err(|f| Failure::input(format!("line {}: {}", i + 1, f.message)))?;
        rounds.push(nodes);
    }
    Ok(rounds)
}

pub fn format_schedule(rounds: &[Vec<NodeId>], g: &LoadedGraph) -> String {
    let mut out = String::new();
    for r in rounds {
        if r.is_empty() {
            out.push('-');
        } else {
            let _ = write!(out, "{}", g.labels_of(r).join(" "));
        }
        out.push('\n');
    }
    out
}
