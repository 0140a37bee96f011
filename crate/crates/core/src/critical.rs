//! Arithmetical critical groups and the homomorphisms induced by harmonic
//! morphisms.
//!
//! The group of `(r, s)` is the torsion part of `coker L`. With
//! `U L V = D` the map `d ↦ U d` identifies `coker L` with
//! `⊕ ℤ/dᵢ ⊕ ℤ`; classes are stored as coordinates at the diagonal
//! positions holding a factor greater than one. These coordinates depend on
//! the particular transforms `U`, `V`, so only factors, orders, kernels and
//! image sizes are comparable across groups.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::ArithStructure;
use crate::divisor::{self, Divisor, DivisorError};
use crate::linalg::{smith_normal_form, IntMatrix, SnfDecomposition};
use crate::morphism::{pullback_structure, HarmonicData, MorphismError};

/// Default cap on the source order for exhaustive hom verification.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriticalError {
    #[error("NonzeroDegree: divisor has degree {0}")]
    NonzeroDegree(BigInt),
    #[error("StructureMismatch: {0}")]
    StructureMismatch(String),
    #[error("CoordinateOutOfRange: coordinate {index} must lie in [0, {modulus})")]
    CoordinateOutOfRange { index: usize, modulus: BigInt },
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error("InternalConsistency: {0}")]
    InternalConsistency(String),
}

impl CriticalError {
    pub fn name(&self) -> &'static str {
        match self {
            CriticalError::NonzeroDegree(_) => "NonzeroDegree",
            CriticalError::StructureMismatch(_) => "StructureMismatch",
            CriticalError::CoordinateOutOfRange { .. } => "CoordinateOutOfRange",
            CriticalError::Divisor(e) => e.name(),
            CriticalError::Morphism(e) => e.name(),
            CriticalError::InternalConsistency(_) => "InternalConsistency",
        }
    }
}

/// An element in SNF coordinates; `coords[i]` lies in `[0, eᵢ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub coords: Vec<BigInt>,
}

#[derive(Debug, Clone)]
pub struct CriticalGroup {
    structure: ArithStructure,
    snf: SnfDecomposition,
    invariant_factors: Vec<BigInt>,
    torsion_indices: Vec<usize>,
    free_row: usize,
}

impl PartialEq for CriticalGroup {
    fn eq(&self, other: &Self) -> bool {
        self.structure == other.structure
    }
}

pub fn critical_group(st: &ArithStructure) -> CriticalGroup {
    let snf = smith_normal_form(&st.laplacian());
    let diag = snf.diagonal();
    let n = diag.len();
    debug_assert!(diag[n - 1].is_zero() && diag[..n - 1].iter().all(|d| !d.is_zero()));
    let torsion_indices: Vec<usize> = (0..n - 1).filter(|&i| diag[i] > BigInt::one()).collect();
    let invariant_factors = torsion_indices.iter().map(|&i| diag[i].clone()).collect();
    CriticalGroup {
        structure: st.clone(),
        snf,
        invariant_factors,
        torsion_indices,
        free_row: n - 1,
    }
}

impl CriticalGroup {
    pub fn structure(&self) -> &ArithStructure {
        &self.structure
    }

    pub fn snf(&self) -> &SnfDecomposition {
        &self.snf
    }

    /// Factors `e₁ | e₂ | ...`, all greater than one.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn invariant_factor_count(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn torsion_indices(&self) -> &[usize] {
        &self.torsion_indices
    }

    pub fn free_row(&self) -> usize {
        self.free_row
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Whether row `free_row` of `U` is `±rᵗ`.
    pub fn free_row_is_r(&self) -> bool {
        let row = self.snf.u.row(self.free_row);
        let r = self.structure.r();
        row == r || row.iter().zip(r).all(|(a, b)| *a == -b)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            coords: vec![BigInt::zero(); self.invariant_factors.len()],
        }
    }

    /// Checks ranges and wraps `coords` as an element.
    pub fn element(&self, coords: Vec<BigInt>) -> Result<GroupElement, CriticalError> {
        if coords.len() != self.invariant_factors.len() {
            return Err(CriticalError::CoordinateOutOfRange {
                index: coords.len().min(self.invariant_factors.len()),
                modulus: BigInt::zero(),
            });
        }
        for (i, (c, e)) in coords.iter().zip(&self.invariant_factors).enumerate() {
            if c.is_negative() || c >= e {
                return Err(CriticalError::CoordinateOutOfRange {
                    index: i,
                    modulus: e.clone(),
                });
            }
        }
        Ok(GroupElement { coords })
    }

    /// Reduces an arbitrary integer tuple into range.
    pub fn reduce(&self, coords: &[BigInt]) -> GroupElement {
        GroupElement {
            coords: coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(c, e)| c.mod_floor(e))
                .collect(),
        }
    }

    /// Class of a degree-zero divisor.
    pub fn class_of(&self, d: &Divisor) -> Result<GroupElement, CriticalError> {
        let deg = divisor::degree(d, &self.structure)?;
        if !deg.is_zero() {
            return Err(CriticalError::NonzeroDegree(deg));
        }
        Ok(self.class_of_unchecked(d.values()))
    }

    fn class_of_unchecked(&self, values: &[BigInt]) -> GroupElement {
        let u = &self.snf.u;
        let coords = self
            .torsion_indices
            .iter()
            .zip(&self.invariant_factors)
            .map(|(&i, e)| {
                let y: BigInt = u.row(i).iter().zip(values).map(|(a, b)| a * b).sum();
                y.mod_floor(e)
            })
            .collect();
        GroupElement { coords }
    }

    /// A degree-zero divisor in the class `e`: `U⁻¹` applied to the lift of
    /// `e` with zeros at unit and free positions.
    pub fn class_representative(&self, e: &GroupElement) -> Divisor {
        let n = self.structure.graph().n();
        let mut y = vec![BigInt::zero(); n];
        for (&i, c) in self.torsion_indices.iter().zip(&e.coords) {
            y[i] = c.clone();
        }
        let values = self.snf.u_inv.mul_vec(&y);
        Divisor::new(self.structure.graph().clone(), values).expect("length matches graph")
    }

    /// Representative of the i-th standard generator.
    pub fn generator_representative(&self, i: usize) -> Divisor {
        let mut e = self.identity();
        e.coords[i] = BigInt::one();
        self.class_representative(&e)
    }

    pub fn is_identity(&self, e: &GroupElement) -> bool {
        e.coords.iter().all(Zero::is_zero)
    }
}

/// A homomorphism between finite abelian groups in SNF coordinates:
/// `target = matrix · source` reduced mod the target factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    pub source_factors: Vec<BigInt>,
    pub target_factors: Vec<BigInt>,
    /// `target_factors.len() × source_factors.len()`.
    pub matrix: IntMatrix,
}

impl GroupHom {
    pub fn identity(factors: &[BigInt]) -> Self {
        GroupHom {
            source_factors: factors.to_vec(),
            target_factors: factors.to_vec(),
            matrix: IntMatrix::identity(factors.len()),
        }
    }

    pub fn zero(source: &[BigInt], target: &[BigInt]) -> Self {
        GroupHom {
            source_factors: source.to_vec(),
            target_factors: target.to_vec(),
            matrix: IntMatrix::zeros(target.len(), source.len()),
        }
    }

    pub fn apply(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.matrix
            .mul_vec(coords)
            .iter()
            .zip(&self.target_factors)
            .map(|(x, e)| x.mod_floor(e))
            .collect()
    }

    pub fn source_order(&self) -> BigInt {
        self.source_factors.iter().product()
    }

    pub fn target_order(&self) -> BigInt {
        self.target_factors.iter().product()
    }

    /// Every column killed by its source modulus, i.e. the coordinate map
    /// descends to the quotient.
    pub fn is_well_defined(&self) -> bool {
        (0..self.source_factors.len()).all(|j| {
            (0..self.target_factors.len())
                .all(|i| (&self.matrix[(i, j)] * &self.source_factors[j]).is_multiple_of(&self.target_factors[i]))
        })
    }

    /// Order of the image, via the index of the lattice spanned by the
    /// columns together with the target relations.
    pub fn image_order(&self) -> BigInt {
        let t = self.target_factors.len();
        if t == 0 {
            return BigInt::one();
        }
        let s = self.source_factors.len();
        let aug = IntMatrix::from_fn(t, s + t, |i, j| {
            if j < s {
                self.matrix[(i, j)].clone()
            } else if j - s == i {
                self.target_factors[i].clone()
            } else {
                BigInt::zero()
            }
        });
        let index: BigInt = smith_normal_form(&aug).diagonal().iter().product();
        self.target_order() / index
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictMethod {
    /// Every source element was mapped.
    Enumerated,
    /// Decided from the Smith form of the coordinate matrix.
    Computed,
}

impl VerdictMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictMethod::Enumerated => "enumerated",
            VerdictMethod::Computed => "computed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub method: VerdictMethod,
    /// Image size for surjectivity, kernel size for injectivity.
    pub witness: BigInt,
}

/// Mixed-radix walk over every source element.
fn for_each_source(factors: &[u64], mut f: impl FnMut(&[u64]) -> bool) {
    let mut c = vec![0u64; factors.len()];
    loop {
        if !f(&c) {
            return;
        }
        let mut i = factors.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            c[i] += 1;
            if c[i] < factors[i] {
                break;
            }
            c[i] = 0;
        }
    }
}

/// Small-moduli evaluation of a hom: every source and target factor below
/// 2³² and the matrix reduced mod the target factors, so that row sums fit
/// in `u128`.
struct SmallHom {
    source: Vec<u64>,
    target: Vec<u64>,
    rows: Vec<Vec<u64>>,
}

impl SmallHom {
    fn new(hom: &GroupHom) -> Option<Self> {
        let small =
            |v: &[BigInt]| -> Option<Vec<u64>> { v.iter().map(|x| x.to_u64().filter(|&y| y < (1 << 32))).collect() };
        let source = small(&hom.source_factors)?;
        let target = small(&hom.target_factors)?;
        let rows = (0..target.len())
            .map(|i| {
                (0..source.len())
                    .map(|j| {
                        hom.matrix[(i, j)]
                            .mod_floor(&hom.target_factors[i])
                            .to_u64()
                            .expect("reduced below a u32 modulus")
                    })
                    .collect()
            })
            .collect();
        Some(SmallHom { source, target, rows })
    }

    fn apply(&self, c: &[u64], out: &mut Vec<u64>) {
        out.clear();
        for (row, &m) in self.rows.iter().zip(&self.target) {
            let acc: u128 = row.iter().zip(c).map(|(&a, &b)| a as u128 * b as u128).sum();
            out.push((acc % m as u128) as u64);
        }
    }
}

fn enumerable(order: &BigInt, bound: u64) -> bool {
    order.to_u64().is_some_and(|o| o <= bound)
}

/// Surjectivity of `hom`; exhaustive when the source order is at most `bound`.
pub fn verify_surjective(hom: &GroupHom, bound: u64) -> Verdict {
    let target_order = hom.target_order();
    if enumerable(&hom.source_order(), bound) {
        let image_size = match SmallHom::new(hom) {
            Some(sh) => {
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for_each_source(&sh.source, |c| {
                    sh.apply(c, &mut out);
                    seen.insert(out.clone());
                    true
                });
                BigInt::from(seen.len())
            }
            None => {
                let source: Vec<u64> = hom.source_factors.iter().map(|e| e.to_u64().unwrap()).collect();
                let mut seen = HashSet::new();
                for_each_source(&source, |c| {
                    let c: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
                    seen.insert(hom.apply(&c));
                    true
                });
                BigInt::from(seen.len())
            }
        };
        Verdict {
            holds: image_size == target_order,
            method: VerdictMethod::Enumerated,
            witness: image_size,
        }
    } else {
        let image = hom.image_order();
        Verdict {
            holds: image == target_order,
            method: VerdictMethod::Computed,
            witness: image,
        }
    }
}

/// Injectivity of `hom`; exhaustive when the source order is at most `bound`.
pub fn verify_injective(hom: &GroupHom, bound: u64) -> Verdict {
    let source_order = hom.source_order();
    if enumerable(&source_order, bound) {
        let mut kernel = 0u64;
        match SmallHom::new(hom) {
            Some(sh) => {
                let mut out = Vec::new();
                for_each_source(&sh.source, |c| {
                    sh.apply(c, &mut out);
                    if out.iter().all(|&x| x == 0) {
                        kernel += 1;
                    }
                    true
                });
            }
            None => {
                let source: Vec<u64> = hom.source_factors.iter().map(|e| e.to_u64().unwrap()).collect();
                for_each_source(&source, |c| {
                    let c: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
                    if hom.apply(&c).iter().all(Zero::is_zero) {
                        kernel += 1;
                    }
                    true
                });
            }
        }
        Verdict {
            holds: kernel == 1,
            method: VerdictMethod::Enumerated,
            witness: BigInt::from(kernel),
        }
    } else {
        let kernel = &source_order / hom.image_order();
        Verdict {
            holds: kernel.is_one(),
            method: VerdictMethod::Computed,
            witness: kernel,
        }
    }
}

fn check_pullback_pair(h: &HarmonicData, k2: &CriticalGroup, k1: &CriticalGroup) -> Result<(), CriticalError> {
    h.require_nonconstant()?;
    let expected = pullback_structure(h, k1.structure())?;
    if &expected != k2.structure() {
        return Err(CriticalError::StructureMismatch(
            "domain structure is not the pullback of the codomain structure".into(),
        ));
    }
    Ok(())
}

fn induced(
    source: &CriticalGroup,
    target: &CriticalGroup,
    map: impl Fn(&Divisor) -> Result<Divisor, DivisorError>,
) -> Result<GroupHom, CriticalError> {
    let s = source.invariant_factor_count();
    let t = target.invariant_factor_count();
    let mut matrix = IntMatrix::zeros(t, s);
    for j in 0..s {
        let image = map(&source.generator_representative(j))?;
        let class = target.class_of(&image)?;
        for (i, c) in class.coords.into_iter().enumerate() {
            matrix[(i, j)] = c;
        }
    }
    Ok(GroupHom {
        source_factors: source.invariant_factors().to_vec(),
        target_factors: target.invariant_factors().to_vec(),
        matrix,
    })
}

/// Pushforward `K(Γ₂) → K(Γ₁)`, `[d] ↦ [Φᵗd]`.
///
/// Descends to classes because `Φᵗ L₂ = L₁ Φᵗ D_μ`, which is rechecked here.
pub fn induced_pushforward(
    h: &HarmonicData,
    k2: &CriticalGroup,
    k1: &CriticalGroup,
) -> Result<GroupHom, CriticalError> {
    check_pullback_pair(h, k2, k1)?;
    let phi_t = IntMatrix::from(&h.phi.transpose());
    let dmu = IntMatrix::from(&h.mu_matrix());
    let l1 = k1.structure().laplacian();
    let l2 = k2.structure().laplacian();
    if &phi_t * &l2 != &(&l1 * &phi_t) * &dmu {
        return Err(CriticalError::InternalConsistency(
            "Phi^t L2 differs from L1 Phi^t D_mu".into(),
        ));
    }
    induced(k2, k1, |d| divisor::pushforward(h, d))
}

/// Pullback `K(Γ₁) → K(Γ₂)`, `[ξ] ↦ [D_μΦξ]`.
///
/// Descends to classes because `D_μΦL₁ = L₂Φ`, which is rechecked here.
pub fn induced_pullback(h: &HarmonicData, k1: &CriticalGroup, k2: &CriticalGroup) -> Result<GroupHom, CriticalError> {
    check_pullback_pair(h, k2, k1)?;
    let phi = IntMatrix::from(&h.phi);
    let dmu = IntMatrix::from(&h.mu_matrix());
    if &(&dmu * &phi) * &k1.structure().laplacian() != &k2.structure().laplacian() * &phi {
        return Err(CriticalError::InternalConsistency(
            "D_mu Phi L1 differs from L2 Phi".into(),
        ));
    }
    induced(k1, k2, |xi| divisor::pullback_divisor(h, xi))
}
