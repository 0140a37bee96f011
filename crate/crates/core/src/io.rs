//! JSON workspace files: named graphs, structures, morphisms and divisors.
//!
//! Integers are always written as decimal strings. Sections are ordered by
//! name, so saving the same workspace twice gives identical bytes.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ArithError, ArithStructure};
use crate::divisor::{Divisor, DivisorError};
use crate::graph::{Graph, GraphError};
use crate::morphism::{GraphMorphism, MorphismError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
    #[error("Json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("BadInteger: {0:?} is not a decimal integer")]
    BadInteger(String),
    #[error("UnknownName: no {kind} named {name:?}")]
    UnknownName { kind: &'static str, name: String },
    #[error("WrongGraph: {name} lives on graph {graph}")]
    WrongGraph { name: String, graph: String },
    #[error("{1} (in {0})")]
    Graph(String, GraphError),
    #[error("{1} (in {0})")]
    Arith(String, ArithError),
    #[error("{1} (in {0})")]
    Morphism(String, Box<MorphismError>),
    #[error("{1} (in {0})")]
    Divisor(String, DivisorError),
}

impl IoError {
    pub fn name(&self) -> &'static str {
        match self {
            IoError::Io(_) => "Io",
            IoError::Json(_) => "Json",
            IoError::BadInteger(_) => "BadInteger",
            IoError::UnknownName { .. } => "UnknownName",
            IoError::WrongGraph { .. } => "WrongGraph",
            IoError::Graph(_, e) => e.name(),
            IoError::Arith(_, e) => e.name(),
            IoError::Morphism(_, e) => e.name(),
            IoError::Divisor(_, e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub graph: String,
    pub r: Vec<String>,
    pub s: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub domain: String,
    pub codomain: String,
    /// Domain label to codomain label.
    pub map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorDoc {
    pub graph: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceDocument {
    #[serde(default)]
    pub graphs: BTreeMap<String, GraphDoc>,
    #[serde(default)]
    pub structures: BTreeMap<String, StructureDoc>,
    #[serde(default)]
    pub morphisms: BTreeMap<String, MorphismDoc>,
    #[serde(default)]
    pub divisors: BTreeMap<String, DivisorDoc>,
}

pub fn parse_int(s: &str) -> Result<BigInt, IoError> {
    s.parse().map_err(|_| IoError::BadInteger(s.to_owned()))
}

pub fn parse_ints(xs: &[String]) -> Result<Vec<BigInt>, IoError> {
    xs.iter().map(|x| parse_int(x)).collect()
}

pub fn int_strings(xs: &[BigInt]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

impl GraphDoc {
    pub fn from_graph(g: &Graph) -> Self {
        GraphDoc {
            vertices: g.labels().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|&(a, b)| [g.label(a).to_owned(), g.label(b).to_owned()])
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        let edges: Vec<(&str, &str)> = self.edges.iter().map(|[a, b]| (a.as_str(), b.as_str())).collect();
        let labels: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        Graph::new(&labels, &edges)
    }
}

/// A loaded workspace. Every entry has been validated by its module.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Workspace {
    pub graphs: BTreeMap<String, Arc<Graph>>,
    /// Structure together with the name of its graph.
    pub structures: BTreeMap<String, (String, ArithStructure)>,
    pub morphisms: BTreeMap<String, (String, String, GraphMorphism)>,
    pub divisors: BTreeMap<String, (String, Divisor)>,
}

impl Workspace {
    pub fn from_document(doc: &WorkspaceDocument) -> Result<Self, IoError> {
        let mut ws = Workspace::default();
        for (name, g) in &doc.graphs {
            let graph = g.to_graph().map_err(|e| IoError::Graph(format!("graph {name}"), e))?;
            ws.graphs.insert(name.clone(), Arc::new(graph));
        }
        for (name, d) in &doc.structures {
            let graph = ws.graph(&d.graph)?.clone();
            let st = ArithStructure::validate(graph, parse_ints(&d.r)?, parse_ints(&d.s)?)
                .map_err(|e| IoError::Arith(format!("structure {name}"), e))?;
            ws.structures.insert(name.clone(), (d.graph.clone(), st));
        }
        for (name, d) in &doc.morphisms {
            let (g2, g1) = (ws.graph(&d.domain)?.clone(), ws.graph(&d.codomain)?.clone());
            let pairs: Vec<(&str, &str)> = d.map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let m = GraphMorphism::from_labels(g2, g1, &pairs)
                .map_err(|e| IoError::Morphism(format!("morphism {name}"), Box::new(e)))?;
            ws.morphisms
                .insert(name.clone(), (d.domain.clone(), d.codomain.clone(), m));
        }
        for (name, d) in &doc.divisors {
            let graph = ws.graph(&d.graph)?.clone();
            let div = Divisor::new(graph, parse_ints(&d.values)?)
                .map_err(|e| IoError::Divisor(format!("divisor {name}"), e))?;
            ws.divisors.insert(name.clone(), (d.graph.clone(), div));
        }
        Ok(ws)
    }

    pub fn to_document(&self) -> WorkspaceDocument {
        WorkspaceDocument {
            graphs: self
                .graphs
                .iter()
                .map(|(k, g)| (k.clone(), GraphDoc::from_graph(g)))
                .collect(),
            structures: self
                .structures
                .iter()
                .map(|(k, (g, st))| {
                    let doc = StructureDoc {
                        graph: g.clone(),
                        r: int_strings(st.r()),
                        s: int_strings(st.s()),
                    };
                    (k.clone(), doc)
                })
                .collect(),
            morphisms: self
                .morphisms
                .iter()
                .map(|(k, (d, c, m))| {
                    let map = (0..m.domain().n())
                        .map(|v| {
                            (
                                m.domain().label(v).to_owned(),
                                m.codomain().label(m.image(v)).to_owned(),
                            )
                        })
                        .collect();
                    let doc = MorphismDoc {
                        domain: d.clone(),
                        codomain: c.clone(),
                        map,
                    };
                    (k.clone(), doc)
                })
                .collect(),
            divisors: self
                .divisors
                .iter()
                .map(|(k, (g, d))| {
                    let doc = DivisorDoc {
                        graph: g.clone(),
                        values: int_strings(d.values()),
                    };
                    (k.clone(), doc)
                })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Self::from_document(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("documents serialize") + "\n"
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IoError> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    pub fn graph(&self, name: &str) -> Result<&Arc<Graph>, IoError> {
        self.graphs.get(name).ok_or_else(|| unknown("graph", name))
    }

    pub fn structure(&self, name: &str) -> Result<&ArithStructure, IoError> {
        self.structures
            .get(name)
            .map(|(_, st)| st)
            .ok_or_else(|| unknown("structure", name))
    }

    /// A named structure, or the natural structure on `graph` when `name`
    /// is `natural` and no structure has that name.
    pub fn structure_on(&self, graph: &Arc<Graph>, name: &str) -> Result<ArithStructure, IoError> {
        match self.structures.get(name) {
            Some((_, st)) if st.graph() == graph => Ok(st.clone()),
            Some((g, _)) => Err(IoError::WrongGraph {
                name: name.to_owned(),
                graph: g.clone(),
            }),
            None if name == "natural" => Ok(ArithStructure::natural(graph.clone())),
            None => Err(unknown("structure", name)),
        }
    }

    pub fn morphism(&self, name: &str) -> Result<&GraphMorphism, IoError> {
        self.morphisms
            .get(name)
            .map(|(_, _, m)| m)
            .ok_or_else(|| unknown("morphism", name))
    }

    pub fn divisor(&self, name: &str) -> Result<&Divisor, IoError> {
        self.divisors
            .get(name)
            .map(|(_, d)| d)
            .ok_or_else(|| unknown("divisor", name))
    }

    /// The workspace name of a graph, if it has one.
    pub fn graph_name(&self, g: &Graph) -> Option<&str> {
        self.graphs
            .iter()
            .find(|(_, h)| h.as_ref() == g)
            .map(|(k, _)| k.as_str())
    }
}

fn unknown(kind: &'static str, name: &str) -> IoError {
    IoError::UnknownName {
        kind,
        name: name.to_owned(),
    }
}
