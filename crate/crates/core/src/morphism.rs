//! Graph morphisms, harmonic morphisms and pullback of structures.
//!
//! A morphism `Γ₂ → Γ₁` is a vertex map under which every edge either
//! collapses to a vertex (vertical) or lands on an edge (horizontal). It is
//! harmonic when, at every vertex `v`, the number of edges at `v` lying over
//! an edge `f` at `φ(v)` does not depend on `f`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::ArithStructure;
use crate::graph::Graph;
use crate::linalg::{IntMatrix, Matrix};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("UnknownVertex: {0} is not a vertex of the expected graph")]
    UnknownVertex(String),
    #[error("UnmappedVertex: vertex {0} has no image")]
    UnmappedVertex(String),
    #[error("NotAMorphism: edge ({0}, {1}) maps to the non-adjacent pair ({2}, {3})")]
    NotAMorphism(String, String, String, String),
    #[error(
        "NotHarmonic: at vertex {vertex}, {first_count} edges lie over ({image}, {first}) \
         but {second_count} lie over ({image}, {second})"
    )]
    NotHarmonic {
        vertex: String,
        image: String,
        first: String,
        first_count: i64,
        second: String,
        second_count: i64,
    },
    #[error("ConstantMorphism: operation requires a non-constant morphism")]
    ConstantMorphism,
    #[error("StructureMismatch: {0}")]
    StructureMismatch(String),
    #[error("InternalConsistency: {0}")]
    InternalConsistency(String),
}

impl MorphismError {
    pub fn name(&self) -> &'static str {
        match self {
            MorphismError::UnknownVertex(_) => "UnknownVertex",
            MorphismError::UnmappedVertex(_) => "UnmappedVertex",
            MorphismError::NotAMorphism(..) => "NotAMorphism",
            MorphismError::NotHarmonic { .. } => "NotHarmonic",
            MorphismError::ConstantMorphism => "ConstantMorphism",
            MorphismError::StructureMismatch(_) => "StructureMismatch",
            MorphismError::InternalConsistency(_) => "InternalConsistency",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Vertical,
    Horizontal,
}

/// A validated graph morphism `domain → codomain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMorphism {
    domain: Arc<Graph>,
    codomain: Arc<Graph>,
    map: Vec<usize>,
}

impl GraphMorphism {
    /// Builds a morphism from `(domain label, codomain label)` pairs.
    pub fn from_labels<S: AsRef<str>>(
        domain: Arc<Graph>,
        codomain: Arc<Graph>,
        pairs: &[(S, S)],
    ) -> Result<Self, MorphismError> {
        let mut map: Vec<Option<usize>> = vec![None; domain.n()];
        for (a, b) in pairs {
            let v = domain
                .index_of(a.as_ref())
                .ok_or_else(|| MorphismError::UnknownVertex(a.as_ref().to_owned()))?;
            let x = codomain
                .index_of(b.as_ref())
                .ok_or_else(|| MorphismError::UnknownVertex(b.as_ref().to_owned()))?;
            map[v] = Some(x);
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(v, x)| x.ok_or_else(|| MorphismError::UnmappedVertex(domain.label(v).to_owned())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(domain, codomain, map)
    }

    /// Builds a morphism from an index array `map[v] = φ(v)`.
    pub fn new(domain: Arc<Graph>, codomain: Arc<Graph>, map: Vec<usize>) -> Result<Self, MorphismError> {
        if map.len() != domain.n() {
            let missing = domain.label(map.len().min(domain.n() - 1));
            return Err(MorphismError::UnmappedVertex(missing.to_owned()));
        }
        if let Some(&x) = map.iter().find(|&&x| x >= codomain.n()) {
            return Err(MorphismError::UnknownVertex(format!("#{x}")));
        }
        for &(a, b) in domain.edges() {
            let (x, y) = (map[a], map[b]);
            if x != y && !codomain.is_adjacent(x, y) {
                return Err(MorphismError::NotAMorphism(
                    domain.label(a).to_owned(),
                    domain.label(b).to_owned(),
                    codomain.label(x).to_owned(),
                    codomain.label(y).to_owned(),
                ));
            }
        }
        Ok(GraphMorphism { domain, codomain, map })
    }

    /// The identity morphism of `g`.
    pub fn identity(g: Arc<Graph>) -> Self {
        let map = (0..g.n()).collect();
        GraphMorphism {
            domain: g.clone(),
            codomain: g,
            map,
        }
    }

    pub fn domain(&self) -> &Arc<Graph> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Graph> {
        &self.codomain
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self, v: usize) -> usize {
        self.map[v]
    }

    pub fn is_constant(&self) -> bool {
        self.map.windows(2).all(|w| w[0] == w[1])
    }

    /// Classification of each domain edge, in domain edge order.
    pub fn edge_kinds(&self) -> Vec<EdgeKind> {
        self.domain
            .edges()
            .iter()
            .map(|&(a, b)| {
                if self.map[a] == self.map[b] {
                    EdgeKind::Vertical
                } else {
                    EdgeKind::Horizontal
                }
            })
            .collect()
    }

    /// `n₂ × n₁` zero-one matrix with `Φ[v][φ(v)] = 1`.
    pub fn phi_matrix(&self) -> Matrix<i64> {
        Matrix::from_fn(self.domain.n(), self.codomain.n(), |v, x| i64::from(self.map[v] == x))
    }

    /// Whether `A₂Φ = D_νΦ + D_μΦA₁` is solvable for diagonal `D_μ`, `D_ν`.
    ///
    /// Works purely on the matrix `A₂Φ`: the diagonal block fixes `ν`, and
    /// every row must be a constant multiple of the `A₁` row of `φ(v)` off
    /// that entry.
    pub fn adjacency_identity_solvable(&self) -> bool {
        let a2phi = &self.domain.adjacency_matrix() * &self.phi_matrix();
        let a1 = self.codomain.adjacency_matrix();
        (0..self.domain.n()).all(|v| {
            let x = self.map[v];
            let mut mu: Option<i64> = None;
            (0..self.codomain.n()).filter(|&y| y != x).all(|y| {
                let entry = a2phi[(v, y)];
                if a1[(x, y)] == 0 {
                    entry == 0
                } else {
                    *mu.get_or_insert(entry) == entry
                }
            })
        })
    }
}

/// Multiplicity data of a harmonic morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicData {
    pub morphism: GraphMorphism,
    /// Horizontal multiplicities.
    pub mu: Vec<i64>,
    /// Vertical multiplicities.
    pub nu: Vec<i64>,
    /// Zero for a constant morphism.
    pub degree: i64,
    pub phi: Matrix<i64>,
    pub constant: bool,
}

/// Harmonicity test. Constant maps are harmonic and come back with
/// `constant = true`, `μ = 0` and degree 0.
pub fn analyze_harmonic(m: &GraphMorphism) -> Result<HarmonicData, MorphismError> {
    let (g2, g1) = (&m.domain, &m.codomain);
    let n1 = g1.n();
    let mut mu = Vec::with_capacity(g2.n());
    let mut nu = Vec::with_capacity(g2.n());
    let mut counts = vec![0i64; n1];
    for v in 0..g2.n() {
        let x = m.map[v];
        counts.iter_mut().for_each(|c| *c = 0);
        for &w in g2.neighbors(v) {
            counts[m.map[w]] += 1;
        }
        nu.push(counts[x]);
        let around = g1.neighbors(x);
        let first = around[0];
        if let Some(&other) = around.iter().find(|&&y| counts[y] != counts[first]) {
            return Err(MorphismError::NotHarmonic {
                vertex: g2.label(v).to_owned(),
                image: g1.label(x).to_owned(),
                first: g1.label(first).to_owned(),
                first_count: counts[first],
                second: g1.label(other).to_owned(),
                second_count: counts[other],
            });
        }
        mu.push(counts[first]);
    }
    let constant = m.is_constant();
    let degree = if constant { 0 } else { uniform_degree(m)? };
    Ok(HarmonicData {
        phi: m.phi_matrix(),
        morphism: m.clone(),
        mu,
        nu,
        degree,
        constant,
    })
}

/// Preimage count of the first codomain edge, checked against every edge.
fn uniform_degree(m: &GraphMorphism) -> Result<i64, MorphismError> {
    let g1 = &m.codomain;
    let mut preimages: HashMap<(usize, usize), i64> = HashMap::new();
    for &(a, b) in m.domain.edges() {
        let (x, y) = (m.map[a], m.map[b]);
        if x != y {
            *preimages.entry((x.min(y), x.max(y))).or_default() += 1;
        }
    }
    let count = |e: &(usize, usize)| preimages.get(e).copied().unwrap_or(0);
    let degree = count(&g1.edges()[0]);
    match g1.edges().iter().find(|e| count(e) != degree) {
        Some(&(x, y)) => Err(MorphismError::InternalConsistency(format!(
            "edge ({}, {}) has {} preimages, expected {degree}",
            g1.label(x),
            g1.label(y),
            count(&(x, y))
        ))),
        None => Ok(degree),
    }
}

impl HarmonicData {
    pub fn require_nonconstant(&self) -> Result<(), MorphismError> {
        if self.constant {
            Err(MorphismError::ConstantMorphism)
        } else {
            Ok(())
        }
    }

    pub fn domain(&self) -> &Arc<Graph> {
        self.morphism.domain()
    }

    pub fn codomain(&self) -> &Arc<Graph> {
        self.morphism.codomain()
    }

    pub fn mu_matrix(&self) -> Matrix<i64> {
        Matrix::from_diagonal(&self.mu)
    }

    pub fn nu_matrix(&self) -> Matrix<i64> {
        Matrix::from_diagonal(&self.nu)
    }

    pub fn is_vertex_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain().n()];
        for &x in self.morphism.map() {
            hit[x] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_edge_surjective(&self) -> bool {
        let g1 = self.codomain();
        let map = self.morphism.map();
        g1.edges().iter().all(|&(x, y)| {
            self.domain()
                .edges()
                .iter()
                .any(|&(a, b)| (map[a] == x && map[b] == y) || (map[a] == y && map[b] == x))
        })
    }

    /// Number of domain edges over each codomain edge, in codomain edge order.
    pub fn edge_preimage_counts(&self) -> Vec<i64> {
        let map = self.morphism.map();
        self.codomain()
            .edges()
            .iter()
            .map(|&(x, y)| {
                self.domain()
                    .edges()
                    .iter()
                    .filter(|&&(a, b)| (map[a] == x && map[b] == y) || (map[a] == y && map[b] == x))
                    .count() as i64
            })
            .collect()
    }
}

/// Outcome of one exact matrix identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub holds: bool,
    /// `(row, col, lhs, rhs)` of the first differing entry.
    pub first_mismatch: Option<(usize, usize, i64, i64)>,
}

impl IdentityCheck {
    fn compare(lhs: &Matrix<i64>, rhs: &Matrix<i64>) -> Self {
        let first_mismatch = (0..lhs.rows())
            .flat_map(|i| (0..lhs.cols()).map(move |j| (i, j)))
            .find(|&(i, j)| lhs[(i, j)] != rhs[(i, j)])
            .map(|(i, j)| (i, j, lhs[(i, j)], rhs[(i, j)]));
        IdentityCheck {
            holds: first_mismatch.is_none(),
            first_mismatch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    /// `A₂Φ = D_νΦ + D_μΦA₁`
    pub adjacency: IdentityCheck,
    /// `ΦᵗD_μΦ = deg(φ)·I`
    pub degree: IdentityCheck,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.adjacency.holds && self.degree.holds
    }
}

pub fn verify_matrix_identities(h: &HarmonicData) -> Result<IdentityReport, MorphismError> {
    h.require_nonconstant()?;
    let a1 = h.codomain().adjacency_matrix();
    let a2 = h.domain().adjacency_matrix();
    let (dmu, dnu, phi) = (h.mu_matrix(), h.nu_matrix(), &h.phi);
    let lhs = &a2 * phi;
    let rhs = &(&dnu * phi) + &(&(&dmu * phi) * &a1);
    let adjacency = IdentityCheck::compare(&lhs, &rhs);
    let lhs = &(&phi.transpose() * &dmu) * phi;
    let n1 = h.codomain().n();
    let rhs = Matrix::from_fn(n1, n1, |i, j| if i == j { h.degree } else { 0 });
    let degree = IdentityCheck::compare(&lhs, &rhs);
    Ok(IdentityReport { adjacency, degree })
}

/// Depth-first search over vertex maps in lexicographic order, keeping only
/// assignments where every edge to an already-placed neighbour is vertical
/// or horizontal. `visit` sees each complete map.
fn search_maps(g2: &Graph, g1: &Graph, prefix: &[usize], visit: &mut dyn FnMut(&[usize])) {
    let n2 = g2.n();
    let mut map = prefix.to_vec();
    map.resize(n2, 0);
    let feasible = |map: &[usize], v: usize| {
        g2.neighbors(v)
            .iter()
            .take_while(|&&w| w < v)
            .all(|&w| map[w] == map[v] || g1.is_adjacent(map[w], map[v]))
    };
    if !(0..prefix.len()).all(|v| feasible(&map, v)) {
        return;
    }
    fn rec(
        g1: &Graph,
        n2: usize,
        v: usize,
        map: &mut Vec<usize>,
        feasible: &dyn Fn(&[usize], usize) -> bool,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if v == n2 {
            visit(map);
            return;
        }
        for x in 0..g1.n() {
            map[v] = x;
            if feasible(map, v) {
                rec(g1, n2, v + 1, map, feasible, visit);
            }
        }
    }
    rec(g1, n2, prefix.len(), &mut map, &feasible, visit);
}

/// Splits the map space on the images of the first one or two domain
/// vertices and folds each part independently; results come back in
/// lexicographic part order.
fn fold_maps<R: Send>(
    g2: &Arc<Graph>,
    g1: &Arc<Graph>,
    exec: Execution,
    per_part: impl Fn(&mut dyn FnMut(&mut dyn FnMut(&[usize]))) -> R + Sync + Send,
) -> Vec<R> {
    let n1 = g1.n();
    let depth = g2.n().min(2);
    let parts = n1.pow(depth as u32);
    exec.map((0..parts).collect(), |p| {
        let prefix: Vec<usize> = if depth == 2 { vec![p / n1, p % n1] } else { vec![p] };
        per_part(&mut |visit| search_maps(g2, g1, &prefix, visit))
    })
}

/// Every graph morphism `g2 → g1`, in lexicographic order of the vertex map.
pub fn enumerate_graph_morphisms(g2: &Arc<Graph>, g1: &Arc<Graph>, exec: Execution) -> Vec<GraphMorphism> {
    fold_maps(g2, g1, exec, |run| {
        let mut out = Vec::new();
        run(&mut |map| {
            out.push(GraphMorphism {
                domain: g2.clone(),
                codomain: g1.clone(),
                map: map.to_vec(),
            })
        });
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Every harmonic morphism `g2 → g1` in lexicographic order of the vertex map.
pub fn enumerate_harmonic_morphisms(g2: &Arc<Graph>, g1: &Arc<Graph>, include_constant: bool) -> Vec<HarmonicData> {
    enumerate_harmonic_morphisms_with(g2, g1, include_constant, Execution::default())
}

pub fn enumerate_harmonic_morphisms_with(
    g2: &Arc<Graph>,
    g1: &Arc<Graph>,
    include_constant: bool,
    exec: Execution,
) -> Vec<HarmonicData> {
    fold_maps(g2, g1, exec, |run| {
        let mut out = Vec::new();
        run(&mut |map| {
            if !include_constant && map.windows(2).all(|w| w[0] == w[1]) {
                return;
            }
            let m = GraphMorphism {
                domain: g2.clone(),
                codomain: g1.clone(),
                map: map.to_vec(),
            };
            if let Ok(h) = analyze_harmonic(&m) {
                out.push(h);
            }
        });
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Tally of the adjacency-identity criterion against local harmonicity over
/// every graph morphism between two graphs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CriterionTally {
    pub morphisms: u64,
    pub harmonic: u64,
    /// Maps where the identity verdict and the local verdict disagree.
    pub disagreements: Vec<Vec<usize>>,
}

pub fn adjacency_criterion_tally(g2: &Arc<Graph>, g1: &Arc<Graph>, exec: Execution) -> CriterionTally {
    fold_maps(g2, g1, exec, |run| {
        let mut t = CriterionTally::default();
        run(&mut |map| {
            let m = GraphMorphism {
                domain: g2.clone(),
                codomain: g1.clone(),
                map: map.to_vec(),
            };
            let local = analyze_harmonic(&m).is_ok();
            t.morphisms += 1;
            t.harmonic += u64::from(local);
            if local != m.adjacency_identity_solvable() {
                t.disagreements.push(map.to_vec());
            }
        });
        t
    })
    .into_iter()
    .fold(CriterionTally::default(), |mut acc, t| {
        acc.morphisms += t.morphisms;
        acc.harmonic += t.harmonic;
        acc.disagreements.extend(t.disagreements);
        acc
    })
}

/// Pulls `(r₁, s₁)` back along `h`: `r₂ = r₁∘φ`, `s₂ = μ·(s₁∘φ) + ν`.
///
/// The result is revalidated and `L₂Φ = D_μΦL₁` is recomputed; failure of
/// either is reported as an internal inconsistency.
pub fn pullback_structure(h: &HarmonicData, st1: &ArithStructure) -> Result<ArithStructure, MorphismError> {
    h.require_nonconstant()?;
    if st1.graph() != h.codomain() {
        return Err(MorphismError::StructureMismatch(
            "structure does not live on the morphism's codomain".into(),
        ));
    }
    let map = h.morphism.map();
    let r2: Vec<BigInt> = map.iter().map(|&x| st1.r()[x].clone()).collect();
    let s2: Vec<BigInt> = map
        .iter()
        .enumerate()
        .map(|(v, &x)| BigInt::from(h.mu[v]) * &st1.s()[x] + h.nu[v])
        .collect();
    let st2 = ArithStructure::validate(h.domain().clone(), r2, s2)
        .map_err(|e| MorphismError::InternalConsistency(format!("pullback is not a structure: {e}")))?;
    let phi = IntMatrix::from(&h.phi);
    let dmu = IntMatrix::from(&h.mu_matrix());
    if &st2.laplacian() * &phi != &(&dmu * &phi) * &st1.laplacian() {
        return Err(MorphismError::InternalConsistency(
            "L2 Phi differs from D_mu Phi L1".into(),
        ));
    }
    Ok(st2)
}
