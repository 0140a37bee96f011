//! Arithmetical structures `(r, s)` on graphs.
//!
//! A structure assigns positive integers to vertices with `gcd(r) = 1` and
//! `s(v) r(v) = sum of r(w) over neighbours w`. Equivalently `r` spans the
//! kernel of `L = Diag(s) - A`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::{integer_kernel_primitive, IntMatrix, LinalgError};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("LengthMismatch: expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("NonPositiveEntry: entry at vertex {0} is not positive")]
    NonPositiveEntry(String),
    #[error("GcdNotOne: gcd of r is {0}")]
    GcdNotOne(BigInt),
    #[error("DefiningEquationViolated: s(v)r(v) differs from the neighbour sum of r at vertex {0}")]
    DefiningEquationViolated(String),
    #[error("DivisibilityFails: r({0}) does not divide the neighbour sum of r")]
    DivisibilityFails(String),
    #[error("KernelNotPositive: kernel generator {0:?} has non-positive entries")]
    KernelNotPositive(Vec<BigInt>),
    #[error("NotRankDeficientByOne: Laplacian kernel has dimension {0}")]
    NotRankDeficientByOne(usize),
}

impl ArithError {
    pub fn name(&self) -> &'static str {
        match self {
            ArithError::LengthMismatch { .. } => "LengthMismatch",
            ArithError::NonPositiveEntry(_) => "NonPositiveEntry",
            ArithError::GcdNotOne(_) => "GcdNotOne",
            ArithError::DefiningEquationViolated(_) => "DefiningEquationViolated",
            ArithError::DivisibilityFails(_) => "DivisibilityFails",
            ArithError::KernelNotPositive(_) => "KernelNotPositive",
            ArithError::NotRankDeficientByOne(_) => "NotRankDeficientByOne",
        }
    }
}

/// A validated arithmetical structure. Equality is componentwise on
/// `(graph, r, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithStructure {
    graph: Arc<Graph>,
    r: Vec<BigInt>,
    s: Vec<BigInt>,
}

fn check_len(g: &Graph, v: &[BigInt]) -> Result<(), ArithError> {
    if v.len() == g.n() {
        Ok(())
    } else {
        Err(ArithError::LengthMismatch {
            expected: g.n(),
            actual: v.len(),
        })
    }
}

fn check_positive(g: &Graph, v: &[BigInt]) -> Result<(), ArithError> {
    match v.iter().position(|x| !x.is_positive()) {
        Some(i) => Err(ArithError::NonPositiveEntry(g.label(i).to_owned())),
        None => Ok(()),
    }
}

fn check_primitive(r: &[BigInt]) -> Result<(), ArithError> {
    let g = r.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_one() {
        Ok(())
    } else {
        Err(ArithError::GcdNotOne(g))
    }
}

fn neighbour_sum(g: &Graph, r: &[BigInt], v: usize) -> BigInt {
    g.neighbors(v).iter().map(|&w| &r[w]).sum()
}

fn build_laplacian(g: &Graph, s: &[BigInt]) -> IntMatrix {
    IntMatrix::from_fn(g.n(), g.n(), |i, j| {
        if i == j {
            s[i].clone()
        } else if g.is_adjacent(i, j) {
            -BigInt::one()
        } else {
            BigInt::zero()
        }
    })
}

impl ArithStructure {
    /// Validates `(r, s)` against every structure invariant.
    pub fn validate(graph: Arc<Graph>, r: Vec<BigInt>, s: Vec<BigInt>) -> Result<Self, ArithError> {
        check_len(&graph, &r)?;
        check_len(&graph, &s)?;
        check_positive(&graph, &r)?;
        check_positive(&graph, &s)?;
        check_primitive(&r)?;
        for v in 0..graph.n() {
            if &s[v] * &r[v] != neighbour_sum(&graph, &r, v) {
                return Err(ArithError::DefiningEquationViolated(graph.label(v).to_owned()));
            }
        }
        let st = ArithStructure { graph, r, s };
        st.check_rank()?;
        Ok(st)
    }

    fn check_rank(&self) -> Result<(), ArithError> {
        let n = self.graph.n();
        let rank = self.laplacian().rank();
        if rank + 1 == n {
            Ok(())
        } else {
            Err(ArithError::NotRankDeficientByOne(n - rank))
        }
    }

    /// `r` all ones, `s` the vertex degrees.
    pub fn natural(graph: Arc<Graph>) -> Self {
        let s = graph.degree_vector().into_iter().map(BigInt::from).collect();
        let r = vec![BigInt::one(); graph.n()];
        ArithStructure { graph, r, s }
    }

    /// Derives `s` from `r` by exact division of neighbour sums.
    pub fn from_r(graph: Arc<Graph>, r: Vec<BigInt>) -> Result<Self, ArithError> {
        check_len(&graph, &r)?;
        check_positive(&graph, &r)?;
        check_primitive(&r)?;
        let s = Self::derive_s(&graph, &r)?;
        let st = ArithStructure { graph, r, s };
        st.check_rank()?;
        Ok(st)
    }

    fn derive_s(graph: &Graph, r: &[BigInt]) -> Result<Vec<BigInt>, ArithError> {
        (0..graph.n())
            .map(|v| {
                let (q, rem) = neighbour_sum(graph, r, v).div_rem(&r[v]);
                if rem.is_zero() {
                    Ok(q)
                } else {
                    Err(ArithError::DivisibilityFails(graph.label(v).to_owned()))
                }
            })
            .collect()
    }

    /// Recovers `r` as the positive primitive kernel vector of `Diag(s) - A`.
    pub fn from_s(graph: Arc<Graph>, s: Vec<BigInt>) -> Result<Self, ArithError> {
        check_len(&graph, &s)?;
        check_positive(&graph, &s)?;
        let l = build_laplacian(&graph, &s);
        let r = integer_kernel_primitive(&l).map_err(|e| match e {
            LinalgError::NoKernel => ArithError::NotRankDeficientByOne(0),
            LinalgError::NotRankDeficientByOne(d) => ArithError::NotRankDeficientByOne(d),
            other => unreachable!("kernel extraction cannot fail with {other:?}"),
        })?;
        if r.iter().any(|x| !x.is_positive()) {
            return Err(ArithError::KernelNotPositive(r));
        }
        Ok(ArithStructure { graph, r, s })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn r(&self) -> &[BigInt] {
        &self.r
    }

    pub fn s(&self) -> &[BigInt] {
        &self.s
    }

    pub fn is_natural(&self) -> bool {
        self.r.iter().all(One::is_one)
    }

    /// `Diag(s) - A`.
    pub fn laplacian(&self) -> IntMatrix {
        build_laplacian(&self.graph, &self.s)
    }
}

/// All structures with every `r` entry in `1..=max_r`, in lexicographic
/// order of `r`.
pub fn enumerate_structures(graph: &Arc<Graph>, max_r: u64) -> Vec<ArithStructure> {
    enumerate_structures_with(graph, max_r, Execution::default())
}

pub fn enumerate_structures_with(graph: &Arc<Graph>, max_r: u64, exec: Execution) -> Vec<ArithStructure> {
    let n = graph.n();
    if max_r == 0 {
        return Vec::new();
    }
    let base = max_r as usize;
    // Split the candidate space on a short prefix of r; each part is scanned
    // in lexicographic order, and parts are concatenated in prefix order.
    let prefix_len = n.min(2);
    let parts = base.pow(prefix_len as u32);
    exec.flat_map_range(parts, |p| {
        let mut r = vec![1u64; n];
        let mut rest = p;
        for slot in (0..prefix_len).rev() {
            r[slot] = (rest % base) as u64 + 1;
            rest /= base;
        }
        let mut found = Vec::new();
        loop {
            if let Some(st) = try_candidate(graph, &r) {
                found.push(st);
            }
            // Odometer over the suffix.
            let mut i = n;
            loop {
                if i == prefix_len {
                    return found;
                }
                i -= 1;
                if r[i] < max_r {
                    r[i] += 1;
                    break;
                }
                r[i] = 1;
            }
        }
    })
}

fn try_candidate(graph: &Arc<Graph>, r: &[u64]) -> Option<ArithStructure> {
    if r.iter().fold(0u64, |g, &x| g.gcd(&x)) != 1 {
        return None;
    }
    // Cheap u64 divisibility screen before going to big integers.
    for v in 0..graph.n() {
        let sum: u64 = graph.neighbors(v).iter().map(|&w| r[w]).sum();
        if !sum.is_multiple_of(r[v]) {
            return None;
        }
    }
    let r = r.iter().map(|&x| BigInt::from(x)).collect();
    ArithStructure::from_r(graph.clone(), r).ok()
}
