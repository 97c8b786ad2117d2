//! Concrete target distributions: hardcore and Ising models on graphs, and
//! explicit weight tables loaded from JSON.
//!
//! Ising sites take values `v ∈ {0, 1}` read as spins `s = 2v − 1`.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::statespace::{normalize_weights, Distribution, ProductSpace, StateVector};

/// A simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return domain("graph needs at least one vertex");
        }
        let mut seen = HashSet::new();
        for &(a, b) in &edges {
            if a >= vertex_count || b >= vertex_count {
                return domain(format!(
                    "edge ({a}, {b}) has an endpoint outside 0..{vertex_count}"
                ));
            }
            if a == b {
                return domain(format!("self-loop at vertex {a}"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return domain(format!("duplicate edge ({a}, {b})"));
            }
        }
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Self::new(n, edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|b| (b - 1, b)).collect())
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return domain(format!("a cycle needs at least 3 vertices, got {n}"));
        }
        let mut edges: Vec<_> = (1..n).map(|b| (b - 1, b)).collect();
        edges.push((n - 1, 0));
        Self::new(n, edges)
    }

    pub fn star(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|b| (0, b)).collect())
    }

    /// `n` isolated vertices.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Hardcore model: weight `λ^{#ones}` on independent sets, zero elsewhere.
pub fn build_hardcore(graph: &GraphSpec, fugacity: f64) -> Result<Distribution> {
    build_hardcore_with_cap(graph, fugacity, crate::statespace::DEFAULT_STATE_CAP)
}

pub fn build_hardcore_with_cap(graph: &GraphSpec, fugacity: f64, cap: usize) -> Result<Distribution> {
    if !(fugacity.is_finite() && fugacity > 0.0) {
        return domain(format!("fugacity must be positive and finite, got {fugacity}"));
    }
    let space = ProductSpace::with_cap(vec![2; graph.vertex_count()], cap)?;
    let weights: Vec<f64> = (0..space.total_states())
        .map(|x| {
            let occupied = |v: usize| x >> v & 1 == 1;
            let independent = graph.edges().iter().all(|&(a, b)| !(occupied(a) && occupied(b)));
            if independent {
                fugacity.powi(x.count_ones() as i32)
            } else {
                0.0
            }
        })
        .collect();
    normalize_weights(&space, &weights)
}

/// Ising model with weight `exp(β Σ_{ij∈E} s_i s_j + h Σ_i s_i)`.
pub fn build_ising(graph: &GraphSpec, beta: f64, field: f64) -> Result<Distribution> {
    build_ising_with_cap(graph, beta, field, crate::statespace::DEFAULT_STATE_CAP)
}

pub fn build_ising_with_cap(graph: &GraphSpec, beta: f64, field: f64, cap: usize) -> Result<Distribution> {
    if !beta.is_finite() || !field.is_finite() {
        return domain(format!("ising parameters must be finite (beta={beta}, h={field})"));
    }
    let space = ProductSpace::with_cap(vec![2; graph.vertex_count()], cap)?;
    let spin = |x: usize, v: usize| if x >> v & 1 == 1 { 1.0 } else { -1.0 };
    let energies: Vec<f64> = (0..space.total_states())
        .map(|x| {
            let coupling: f64 = graph.edges().iter().map(|&(a, b)| spin(x, a) * spin(x, b)).sum();
            let magnet: f64 = (0..graph.vertex_count()).map(|v| spin(x, v)).sum();
            beta * coupling + field * magnet
        })
        .collect();
    // shift by the maximum so large |β| cannot overflow
    let top = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = energies.iter().map(|e| (e - top).exp()).collect();
    normalize_weights(&space, &weights)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelSpec {
    Hardcore { graph: GraphSpec, fugacity: f64 },
    Ising { graph: GraphSpec, beta: f64, field: f64 },
    Explicit { path: PathBuf },
}

impl ModelSpec {
    pub fn build(&self, cap: usize) -> Result<Distribution> {
        match self {
            ModelSpec::Hardcore { graph, fugacity } => build_hardcore_with_cap(graph, *fugacity, cap),
            ModelSpec::Ising { graph, beta, field } => build_ising_with_cap(graph, *beta, *field, cap),
            ModelSpec::Explicit { path } => load_weight_table_with_cap(path, cap),
        }
    }
}

fn parse_graph(kind: &str, n: usize) -> Result<GraphSpec> {
    match kind {
        "complete" => GraphSpec::complete(n),
        "path" => GraphSpec::path(n),
        "cycle" => GraphSpec::cycle(n),
        "star" => GraphSpec::star(n),
        "empty" => GraphSpec::empty(n),
        other => domain(format!("unknown graph kind '{other}'")),
    }
}

/// Parses builtin model strings such as `hardcore:complete:n=4,lambda=1`,
/// `ising:cycle:n=6,beta=0.5,h=0` or `explicit:model.json`.
impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("explicit:") {
            return Ok(ModelSpec::Explicit { path: path.into() });
        }
        let mut parts = s.splitn(3, ':');
        let family = parts.next().unwrap_or_default();
        let (Some(kind), Some(params)) = (parts.next(), parts.next()) else {
            return domain(format!("model string '{s}' is not of the form family:graph:key=value,..."));
        };
        let mut n = None;
        let mut lambda = 1.0;
        let mut beta = None;
        let mut field = 0.0;
        for kv in params.split(',').filter(|kv| !kv.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("expected key=value, got '{kv}'")))?;
            let number = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("'{key}' expects a number, got '{v}'")))
            };
            match key.trim() {
                "n" => {
                    n = Some(value.trim().parse::<usize>().map_err(|_| {
                        Error::Domain(format!("'n' expects a positive integer, got '{value}'"))
                    })?)
                }
                "lambda" => lambda = number(value)?,
                "beta" => beta = Some(number(value)?),
                "h" => field = number(value)?,
                other => return domain(format!("unknown model parameter '{other}'")),
            }
        }
        let n = n.ok_or_else(|| Error::Domain("model string needs n=...".into()))?;
        let graph = parse_graph(kind, n)?;
        match family {
            "hardcore" => {
                if !(lambda > 0.0) {
                    return domain("hardcore fugacity must be positive");
                }
                Ok(ModelSpec::Hardcore { graph, fugacity: lambda })
            }
            "ising" => Ok(ModelSpec::Ising {
                graph,
                beta: beta.ok_or_else(|| Error::Domain("ising model needs beta=...".into()))?,
                field,
            }),
            other => domain(format!("unknown model family '{other}'")),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Hardcore { graph, fugacity } => write!(
                f,
                "hardcore(n={}, edges={}, lambda={fugacity})",
                graph.vertex_count(),
                graph.edges().len()
            ),
            ModelSpec::Ising { graph, beta, field } => write!(
                f,
                "ising(n={}, edges={}, beta={beta}, h={field})",
                graph.vertex_count(),
                graph.edges().len()
            ),
            ModelSpec::Explicit { path } => write!(f, "explicit({})", path.display()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightTable {
    alphabets: Vec<usize>,
    weights: Vec<WeightEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightEntry {
    state: Vec<usize>,
    w: f64,
}

/// Parses the JSON weight-table format
/// `{"alphabets": [..], "weights": [{"state": [..], "w": number}, ..]}`.
pub fn parse_weight_table(text: &str, cap: usize) -> Result<Distribution> {
    let table: WeightTable = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let line_of = |i: usize| entry_line(text, i);
    let space = ProductSpace::with_cap(table.alphabets, cap)?;
    let mut raw = vec![0.0; space.total_states()];
    let mut seen = vec![false; space.total_states()];
    for (i, entry) in table.weights.iter().enumerate() {
        let index = space
            .encode_state(&StateVector(entry.state.clone()))
            .map_err(|e| Error::Parse {
                line: line_of(i),
                message: format!("entry {i}: {e}"),
            })?;
        if seen[index] {
            return Err(Error::Parse {
                line: line_of(i),
                message: format!("entry {i}: duplicate state {:?}", entry.state),
            });
        }
        if !(entry.w.is_finite() && entry.w >= 0.0) {
            return Err(Error::Parse {
                line: line_of(i),
                message: format!("entry {i}: weight {} is negative or not finite", entry.w),
            });
        }
        seen[index] = true;
        raw[index] = entry.w;
    }
    normalize_weights(&space, &raw)
}

// Line of the i-th `"state"` key, for error messages.
fn entry_line(text: &str, i: usize) -> usize {
    text.match_indices("\"state\"")
        .nth(i)
        .map(|(pos, _)| text[..pos].matches('\n').count() + 1)
        .unwrap_or(1)
}

pub fn load_weight_table(path: impl AsRef<Path>) -> Result<Distribution> {
    load_weight_table_with_cap(path, crate::statespace::DEFAULT_STATE_CAP)
}

pub fn load_weight_table_with_cap(path: impl AsRef<Path>, cap: usize) -> Result<Distribution> {
    let text = std::fs::read_to_string(path)?;
    parse_weight_table(&text, cap)
}

/// Serializes a distribution as a weight table listing its support.
pub fn write_weight_table(dist: &Distribution) -> String {
    let space = dist.space();
    let table = WeightTable {
        alphabets: space.alphabet_sizes().to_vec(),
        weights: dist
            .support()
            .iter()
            .map(|&i| WeightEntry {
                state: space.decode_state(i).expect("support index in range").0,
                w: dist.prob(i),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&table).expect("weight table serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::DEFAULT_STATE_CAP;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn hardcore_k2_is_uniform_on_independent_sets() {
        let d = build_hardcore(&GraphSpec::complete(2).unwrap(), 1.0).unwrap();
        let t = 1.0 / 3.0;
        assert!(close(d.probs(), &[t, t, t, 0.0], 1e-15));
        assert_eq!(d.support(), &[0, 1, 2]);
    }

    #[test]
    fn hardcore_single_vertex_fugacity() {
        let d = build_hardcore(&GraphSpec::empty(1).unwrap(), 2.0).unwrap();
        assert!(close(d.probs(), &[1.0 / 3.0, 2.0 / 3.0], 1e-15));
    }

    #[test]
    fn hardcore_complete_pi_min() {
        for n in 1..=8 {
            let d = build_hardcore(&GraphSpec::complete(n).unwrap(), 1.0).unwrap();
            assert_eq!(d.support().len(), n + 1);
            assert!((d.pi_min() - 1.0 / (n as f64 + 1.0)).abs() < 1e-14);
        }
        let d = build_hardcore(&GraphSpec::complete(3).unwrap(), 1.0).unwrap();
        for &i in d.support() {
            assert!((d.prob(i) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn ising_single_edge() {
        let beta: f64 = 0.7;
        let d = build_ising(&GraphSpec::path(2).unwrap(), beta, 0.0).unwrap();
        let z = 2.0 * beta.exp() + 2.0 * (-beta).exp();
        let expect = [beta.exp() / z, (-beta).exp() / z, (-beta).exp() / z, beta.exp() / z];
        assert!(close(d.probs(), &expect, 1e-15));
    }

    #[test]
    fn ising_field_only() {
        let d = build_ising(&GraphSpec::empty(1).unwrap(), 0.0, 1.0).unwrap();
        let e = std::f64::consts::E;
        let z = 1.0 / e + e;
        assert!(close(d.probs(), &[1.0 / e / z, e / z], 1e-15));
    }

    #[test]
    fn ising_infinite_temperature_is_uniform() {
        for graph in [GraphSpec::cycle(5).unwrap(), GraphSpec::complete(4).unwrap()] {
            let d = build_ising(&graph, 0.0, 0.0).unwrap();
            let u = 1.0 / d.space().total_states() as f64;
            assert!(d.probs().iter().all(|p| (p - u).abs() < 1e-15));
        }
        assert!(build_ising(&GraphSpec::path(2).unwrap(), f64::NAN, 0.0).is_err());
        // no overflow at large coupling
        let d = build_ising(&GraphSpec::cycle(6).unwrap(), 400.0, 0.0).unwrap();
        assert!((d.probs()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn graph_validation() {
        assert!(GraphSpec::new(2, vec![(0, 0)]).is_err());
        assert!(GraphSpec::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(GraphSpec::new(2, vec![(0, 2)]).is_err());
        assert!(GraphSpec::cycle(2).is_err());
        assert_eq!(GraphSpec::complete(4).unwrap().edges().len(), 6);
    }

    #[test]
    fn parse_builtin_strings() {
        let spec: ModelSpec = "ising:cycle:n=6,beta=0.5,h=0".parse().unwrap();
        match &spec {
            ModelSpec::Ising { graph, beta, field } => {
                assert_eq!(graph, &GraphSpec::cycle(6).unwrap());
                assert_eq!((*beta, *field), (0.5, 0.0));
            }
            _ => panic!("wrong family"),
        }
        let spec: ModelSpec = "hardcore:complete:n=4,lambda=1".parse().unwrap();
        assert_eq!(
            spec,
            ModelSpec::Hardcore { graph: GraphSpec::complete(4).unwrap(), fugacity: 1.0 }
        );
        assert!("hardcore:complete:lambda=1".parse::<ModelSpec>().is_err());
        assert!("potts:complete:n=3".parse::<ModelSpec>().is_err());
        assert!("ising:path:n=3".parse::<ModelSpec>().is_err());
        assert!("hardcore:complete:n=3,lambda=-1".parse::<ModelSpec>().is_err());
        assert!("hardcore:torus:n=3".parse::<ModelSpec>().is_err());
    }

    #[test]
    fn weight_table_matches_hardcore() {
        let text = r#"{"alphabets": [2, 2], "weights": [
            {"state": [0, 0], "w": 1},
            {"state": [1, 0], "w": 1},
            {"state": [0, 1], "w": 1}
        ]}"#;
        let d = parse_weight_table(text, DEFAULT_STATE_CAP).unwrap();
        let h = build_hardcore(&GraphSpec::complete(2).unwrap(), 1.0).unwrap();
        assert!(close(d.probs(), h.probs(), 1e-15));
    }

    #[test]
    fn weight_table_point_mass() {
        let text = r#"{"alphabets": [3, 2], "weights": [{"state": [2, 1], "w": 7}]}"#;
        let d = parse_weight_table(text, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(d.support(), &[5]);
        assert_eq!(d.prob(5), 1.0);
    }

    #[test]
    fn weight_table_errors() {
        let dup = "{\"alphabets\": [2],\n \"weights\": [\n{\"state\": [0], \"w\": 1},\n{\"state\": [0], \"w\": 2}]}";
        match parse_weight_table(dup, DEFAULT_STATE_CAP) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("duplicate"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let range = r#"{"alphabets": [2], "weights": [{"state": [2], "w": 1}]}"#;
        assert!(matches!(parse_weight_table(range, DEFAULT_STATE_CAP), Err(Error::Parse { .. })));
        let malformed = "{\"alphabets\": [2],\n \"weights\": [";
        assert!(matches!(parse_weight_table(malformed, DEFAULT_STATE_CAP), Err(Error::Parse { line: 2, .. })));
        let zero = r#"{"alphabets": [2], "weights": [{"state": [1], "w": 0}]}"#;
        assert!(matches!(parse_weight_table(zero, DEFAULT_STATE_CAP), Err(Error::Domain(_))));
    }

    #[test]
    fn weight_table_round_trip() {
        let d = build_ising(&GraphSpec::cycle(4).unwrap(), 0.3, 0.2).unwrap();
        let back = parse_weight_table(&write_weight_table(&d), DEFAULT_STATE_CAP).unwrap();
        assert!(close(d.probs(), back.probs(), 1e-12));
        let h = build_hardcore(&GraphSpec::star(4).unwrap(), 1.5).unwrap();
        let back = parse_weight_table(&write_weight_table(&h), DEFAULT_STATE_CAP).unwrap();
        assert!(close(h.probs(), back.probs(), 1e-12));
        assert_eq!(h.support(), back.support());
    }
}
