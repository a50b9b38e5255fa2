//! Self-activation profile files.
//!
//! ```text
//! # key = value, one per line
//! q.default = 0.1        # uniform q for every node
//! q.case = 2             # or: draw q from generator case 0..4
//! q.base = 2             # upper end c of U[0, c] for q.case
//! q.node.alice = 0.75    # per-node override, applied last
//! self_delay = exp:1     # exp:<rate> or const:<value>
//! edge_delay = exp:1
//! ```

use mrim_core::saic::{q_case_profile, DelayDist, QCase, SelfActivationProfile};
use rand::Rng;

use crate::edgelist::LoadedGraph;
use crate::error::{Failure, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum QSource {
    Uniform(f64),
    Case { case: QCase, base: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub q: QSource,
    pub overrides: Vec<(String, f64)>,
    pub self_delay: DelayDist,
    pub edge_delay: DelayDist,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec {
            q: QSource::Uniform(0.0),
            overrides: Vec::new(),
            self_delay: DelayDist::Exponential { rate: 1.0 },
            edge_delay: DelayDist::Exponential { rate: 1.0 },
        }
    }
}

pub fn parse_delay(s: &str) -> Result<DelayDist> {
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("delay `{s}`: expected exp:<rate> or const:<value>")))?;
    let x: f64 = value
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("delay `{s}`: bad number")))?;
    let d = match kind.trim() {
        "exp" => DelayDist::Exponential { rate: x },
        "const" => DelayDist::Constant { value: x },
        _ => return Err(Failure::usage(format!("delay `{s}`: unknown kind `{kind}`"))),
    };
    d.validate().map_err(|e| Failure::usage(format!("delay `{s}`: {e}")))?;
    Ok(d)
}

pub fn parse_q_case(i: u8) -> Result<QCase> {
    QCase::from_index(i).ok_or_else(|| Failure::usage(format!("q case {i} is not in 0..=4")))
}

pub fn parse_profile(text: &str) -> Result<ProfileSpec> {
    let mut spec = ProfileSpec::default();
    let mut q_default = None;
    let mut q_case = None;
    let mut q_base = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |m: String| Failure::input(format!("line {line}: {m}"));
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err("expected key = value".into()))?;
        let (key, value) = (key.trim(), value.trim());
        let num = || -> Result<f64> { value.parse().map_err(|_| err(format!("bad number `{value}`"))) };
        match key {
            "q.default" => q_default = Some(num()?),
            "q.base" => q_base = Some(num()?),
            "q.case" => {
                let c: u8 = value.parse().map_err(|_| err(format!("bad case `{value}`")))?;
                q_case = Some(QCase::from_index(c).ok_or_else(|| err(format!("q case {c} is not in 0..=4")))?);
            }
            "self_delay" => spec.self_delay = parse_delay(value).map_err(|f| err(f.message))?,
            "edge_delay" => spec.edge_delay = parse_delay(value).map_err(|f| err(f.message))?,
            _ => match key.strip_prefix("q.node.") {
                Some(label) if !label.is_empty() => {
                    let q = num()?;
                    if !(0.0..=1.0).contains(&q) {
                        return Err(err(format!("q {q} outside [0,1]")));
                    }
                    spec.overrides.push((label.to_string(), q));
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            },
        }
    }
    spec.q = match (q_default, q_case) {
        (Some(_), Some(_)) => return Err(Failure::input("q.default and q.case are mutually exclusive")),
        (Some(q), None) => {
            if !(0.0..=1.0).contains(&q) {
                return Err(Failure::input(format!("q.default {q} outside [0,1]")));
            }
            QSource::Uniform(q)
        }
        (None, Some(case)) => QSource::Case {
            case,
            base: q_base.unwrap_or(1.0),
        },
        (None, None) => QSource::Uniform(0.0),
    };
    Ok(spec)
}

impl ProfileSpec {
    /// Builds the per-node profile; generator cases draw from `rng`.
    pub fn materialize<R: Rng + ?Sized>(&self, g: &LoadedGraph, rng: &mut R) -> Result<SelfActivationProfile> {
        let n = g.graph.node_count();
        let mut profile = match self.q {
            QSource::Uniform(q) => SelfActivationProfile::uniform(n, q, self.self_delay)?,
            QSource::Case { case, base } => q_case_profile(&g.graph, case, base, self.self_delay, rng)?,
        };
        for (label, q) in &self.overrides {
            profile.q[g.node(label)?.index()] = *q;
        }
        Ok(profile)
    }
}
