//! Finite simple connected graphs with a fixed vertex ordering.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("LoopEdge: edge ({0}, {0}) is a loop")]
    LoopEdge(String),
    #[error("DuplicateEdge: edge ({0}, {1}) appears more than once")]
    DuplicateEdge(String, String),
    #[error("Disconnected: vertex {0} is unreachable from {1}")]
    Disconnected(String, String),
    #[error("TooFewVertices: graph has {0} vertices, at least 2 required")]
    TooFewVertices(usize),
    #[error("EmptyEdgeSet: graph has no edges")]
    EmptyEdgeSet,
    #[error("DuplicateLabel: vertex label {0} is repeated")]
    DuplicateLabel(String),
    #[error("UnknownVertex: edge endpoint {0} is not a vertex")]
    UnknownVertex(String),
}

impl GraphError {
    pub fn name(&self) -> &'static str {
        match self {
            GraphError::LoopEdge(_) => "LoopEdge",
            GraphError::DuplicateEdge(..) => "DuplicateEdge",
            GraphError::Disconnected(..) => "Disconnected",
            GraphError::TooFewVertices(_) => "TooFewVertices",
            GraphError::EmptyEdgeSet => "EmptyEdgeSet",
            GraphError::DuplicateLabel(_) => "DuplicateLabel",
            GraphError::UnknownVertex(_) => "UnknownVertex",
        }
    }
}

/// A simple, loopless, connected graph on at least two vertices.
///
/// The vertex order is the label order given at construction; every matrix
/// and vector elsewhere in the crate is indexed against it. Edges are stored
/// as `(i, j)` with `i < j` in input order.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    adjacent: Vec<bool>,
}

impl Graph {
    pub fn new<S: AsRef<str>>(labels: &[S], edges: &[(S, S)]) -> Result<Self, GraphError> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.as_str(), i).is_some() {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex(s.to_owned()))
        };
        let pairs = edges
            .iter()
            .map(|(a, b)| Ok((lookup(a.as_ref())?, lookup(b.as_ref())?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Self::from_indices(labels, &pairs)
    }

    /// Builds a graph from index pairs into `labels`.
    pub fn from_indices(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let n = labels.len();
        if n < 2 {
            return Err(GraphError::TooFewVertices(n));
        }
        if pairs.is_empty() {
            return Err(GraphError::EmptyEdgeSet);
        }
        let mut adjacent = vec![false; n * n];
        let mut neighbors = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for &x in &[a, b] {
                if x >= n {
                    return Err(GraphError::UnknownVertex(format!("#{x}")));
                }
            }
            if a == b {
                return Err(GraphError::LoopEdge(labels[a].clone()));
            }
            if adjacent[a * n + b] {
                return Err(GraphError::DuplicateEdge(labels[a].clone(), labels[b].clone()));
            }
            adjacent[a * n + b] = true;
            adjacent[b * n + a] = true;
            neighbors[a].push(b);
            neighbors[b].push(a);
            edges.push((a.min(b), a.max(b)));
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        let g = Graph {
            labels,
            edges,
            neighbors,
            adjacent,
        };
        if let Some(v) = g.first_unreachable() {
            return Err(GraphError::Disconnected(g.labels[v].clone(), g.labels[0].clone()));
        }
        Ok(g)
    }

    fn first_unreachable(&self) -> Option<usize> {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().position(|&s| !s)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacent[a * self.n() + b]
    }

    pub fn adjacency_matrix(&self) -> Matrix<i64> {
        Matrix::from_fn(self.n(), self.n(), |i, j| i64::from(self.is_adjacent(i, j)))
    }

    pub fn degree_vector(&self) -> Vec<i64> {
        self.neighbors.iter().map(|nb| nb.len() as i64).collect()
    }

    /// Copy of this graph with one extra edge.
    pub fn with_edge(&self, a: usize, b: usize) -> Result<Self, GraphError> {
        let mut pairs = self.edges.clone();
        pairs.push((a, b));
        Self::from_indices(self.labels.clone(), &pairs)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|&(a, b)| format!("{}-{}", self.labels[a], self.labels[b]))
            .collect();
        write!(f, "Graph[{}]{{{}}}", self.labels.join(","), edges.join(" "))
    }
}

fn labelled(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Standard families, labelled `v0, v1, ...`.
pub mod families {
    use super::*;

    pub fn path(n: usize) -> Graph {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_indices(labelled("v", n), &pairs).expect("path on n >= 2 vertices")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycles need at least 3 vertices");
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_indices(labelled("v", n), &pairs).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Graph {
        let pairs: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph::from_indices(labelled("v", n), &pairs).expect("complete graph on n >= 2 vertices")
    }

    /// Star on `n` vertices with center `v0`.
    pub fn star(n: usize) -> Graph {
        let pairs: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Graph::from_indices(labelled("v", n), &pairs).expect("star on n >= 2 vertices")
    }

    /// Wheel on `n` vertices: hub `v0` and rim cycle `v1 .. v(n-1)`.
    pub fn wheel(n: usize) -> Graph {
        assert!(n >= 4, "wheels need at least 4 vertices");
        let rim = n - 1;
        let mut pairs: Vec<_> = (1..n).map(|i| (0, i)).collect();
        pairs.extend((0..rim).map(|i| (1 + i, 1 + (i + 1) % rim)));
        Graph::from_indices(labelled("v", n), &pairs).expect("valid wheel")
    }

    /// The eight-vertex graph whose arithmetical critical groups are all
    /// cyclic: `v1..v8` with `v_i ~ v_{i+2}` for `i <= 6`, no edges spanning
    /// more than two steps, and the consecutive pairs `v1v2 v3v4 v4v5 v5v6 v7v8`.
    pub fn ladder8() -> Graph {
        let labels: Vec<String> = (1..=8).map(|i| format!("v{i}")).collect();
        let pairs = [
            (0, 1),
            (0, 2),
            (1, 3),
            (2, 3),
            (2, 4),
            (3, 4),
            (3, 5),
            (4, 5),
            (4, 6),
            (5, 7),
            (6, 7),
        ];
        Graph::from_indices(labels, &pairs).expect("valid graph")
    }
}
