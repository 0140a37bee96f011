//! Divisors on graphs carrying an arithmetical structure.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::ArithStructure;
use crate::graph::Graph;
use crate::linalg::{solve_integer, LinalgError};
use crate::morphism::HarmonicData;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivisorError {
    #[error("GraphMismatch: {0}")]
    GraphMismatch(&'static str),
    #[error("LengthMismatch: expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("ConstantMorphism: operation requires a non-constant morphism")]
    ConstantMorphism,
    #[error("NotPrincipal: divisor is not the divisor of an integer function")]
    NotPrincipal,
}

impl DivisorError {
    pub fn name(&self) -> &'static str {
        match self {
            DivisorError::GraphMismatch(_) => "GraphMismatch",
            DivisorError::LengthMismatch { .. } => "LengthMismatch",
            DivisorError::ConstantMorphism => "ConstantMorphism",
            DivisorError::NotPrincipal => "NotPrincipal",
        }
    }
}

/// An integer labelling of the vertices of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisor {
    graph: Arc<Graph>,
    values: Vec<BigInt>,
}

impl Divisor {
    pub fn new(graph: Arc<Graph>, values: Vec<BigInt>) -> Result<Self, DivisorError> {
        if values.len() != graph.n() {
            return Err(DivisorError::LengthMismatch {
                expected: graph.n(),
                actual: values.len(),
            });
        }
        Ok(Divisor { graph, values })
    }

    pub fn zero(graph: Arc<Graph>) -> Self {
        let values = vec![BigInt::zero(); graph.n()];
        Divisor { graph, values }
    }

    /// The divisor with a single chip on `v`.
    pub fn indicator(graph: Arc<Graph>, v: usize) -> Self {
        let mut d = Self::zero(graph);
        d.values[v] = BigInt::from(1);
        d
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigInt> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Divisor) -> Result<Divisor, DivisorError> {
        same_graph(&self.graph, &other.graph, "summands live on different graphs")?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Divisor {
            graph: self.graph.clone(),
            values,
        })
    }
}

fn same_graph(a: &Arc<Graph>, b: &Arc<Graph>, what: &'static str) -> Result<(), DivisorError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(DivisorError::GraphMismatch(what))
    }
}

fn nonconstant(h: &HarmonicData) -> Result<(), DivisorError> {
    if h.constant {
        Err(DivisorError::ConstantMorphism)
    } else {
        Ok(())
    }
}

/// `Σ d(v) r(v)`.
pub fn degree(d: &Divisor, st: &ArithStructure) -> Result<BigInt, DivisorError> {
    same_graph(&d.graph, st.graph(), "divisor and structure live on different graphs")?;
    Ok(d.values.iter().zip(st.r()).map(|(a, b)| a * b).sum())
}

/// `L f`.
pub fn divisor_of_function(f: &[BigInt], st: &ArithStructure) -> Result<Divisor, DivisorError> {
    if f.len() != st.graph().n() {
        return Err(DivisorError::LengthMismatch {
            expected: st.graph().n(),
            actual: f.len(),
        });
    }
    Ok(Divisor {
        graph: st.graph().clone(),
        values: st.laplacian().mul_vec(f),
    })
}

/// An integer `f` with `L f = d`. Witnesses are unique only up to multiples
/// of `r`.
pub fn is_principal(d: &Divisor, st: &ArithStructure) -> Result<Vec<BigInt>, DivisorError> {
    same_graph(&d.graph, st.graph(), "divisor and structure live on different graphs")?;
    solve_integer(&st.laplacian(), &d.values).map_err(|e| match e {
        LinalgError::NoSolution => DivisorError::NotPrincipal,
        other => unreachable!("square system cannot fail with {other:?}"),
    })
}

/// Fibre sums `Φᵗ d`.
pub fn pushforward(h: &HarmonicData, d: &Divisor) -> Result<Divisor, DivisorError> {
    same_graph(&d.graph, h.domain(), "divisor is not on the morphism's domain")?;
    let mut values = vec![BigInt::zero(); h.codomain().n()];
    for (v, &x) in h.morphism.map().iter().enumerate() {
        values[x] += &d.values[v];
    }
    Ok(Divisor {
        graph: h.codomain().clone(),
        values,
    })
}

/// `D_μ Φ ξ`, i.e. `v ↦ μ(v) ξ(φ(v))`.
pub fn pullback_divisor(h: &HarmonicData, xi: &Divisor) -> Result<Divisor, DivisorError> {
    nonconstant(h)?;
    same_graph(&xi.graph, h.codomain(), "divisor is not on the morphism's codomain")?;
    let values = h
        .morphism
        .map()
        .iter()
        .zip(&h.mu)
        .map(|(&x, &m)| &xi.values[x] * m)
        .collect();
    Ok(Divisor {
        graph: h.domain().clone(),
        values,
    })
}

/// `K(v) = s(v) - 2`.
pub fn canonical_divisor(st: &ArithStructure) -> Divisor {
    Divisor {
        graph: st.graph().clone(),
        values: st.s().iter().map(|s| s - 2).collect(),
    }
}

/// `2μ(v) - 2 + ν(v)`.
pub fn ramification_divisor(h: &HarmonicData) -> Result<Divisor, DivisorError> {
    nonconstant(h)?;
    let values =
        h.mu.iter()
            .zip(&h.nu)
            .map(|(&m, &n)| BigInt::from(2 * m - 2 + n))
            .collect();
    Ok(Divisor {
        graph: h.domain().clone(),
        values,
    })
}

/// Degree of the canonical divisor and the genus `g` with `2g - 2 = deg K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusData {
    pub deg_k: BigInt,
    pub genus: BigRational,
}

impl GenusData {
    pub fn is_integral(&self) -> bool {
        self.genus.is_integer()
    }
}

pub fn genus_data(st: &ArithStructure) -> GenusData {
    let deg_k: BigInt = st.r().iter().zip(st.s()).map(|(r, s)| r * (s - 2)).sum();
    let genus = BigRational::new(&deg_k + 2, BigInt::from(2));
    GenusData { deg_k, genus }
}
