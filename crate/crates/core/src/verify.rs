//! Exact checks of the identities relating a harmonic morphism, a structure
//! on its codomain and the pulled-back structure on its domain.
//!
//! Each check evaluates one side through the library operations and the
//! other side directly from `r`, `s`, `μ`, `ν` and `φ`, so a bug in either
//! route shows up as a failing report.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{enumerate_structures_with, ArithStructure};
use crate::critical::{
    critical_group, induced_pullback, induced_pushforward, verify_injective, verify_surjective, CriticalError,
    CriticalGroup, GroupHom, VerdictMethod,
};
use crate::divisor::{self, Divisor};
use crate::graph::Graph;
use crate::morphism::{enumerate_harmonic_morphisms_with, pullback_structure, HarmonicData, MorphismError};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    RiemannHurwitz,
    CanonicalRamification,
    OrderDivides,
    GenusInequality,
    SDegree,
    PushforwardSurjective,
    PullbackInjective,
}

impl TheoremId {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::RiemannHurwitz => "riemann-hurwitz",
            TheoremId::CanonicalRamification => "canonical-ramification",
            TheoremId::OrderDivides => "order-divides",
            TheoremId::GenusInequality => "genus-inequality",
            TheoremId::SDegree => "s-degree",
            TheoremId::PushforwardSurjective => "pushforward-surjective",
            TheoremId::PullbackInjective => "pullback-injective",
        }
    }
}

/// How `lhs` and `rhs` must relate for a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    /// `lhs` divides `rhs`.
    Divides,
    /// `lhs >= rhs`.
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

/// One exact comparison. `verdict` is `pass` exactly when `relation` holds
/// between `lhs` and `rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub instance: String,
    pub relation: Relation,
    pub lhs: String,
    pub rhs: String,
    pub verdict: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<&'static str>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.verdict == Outcome::Pass
    }

    fn new(theorem: TheoremId, instance: String, relation: Relation, lhs: String, rhs: String, holds: bool) -> Self {
        TheoremReport {
            theorem,
            instance,
            relation,
            lhs,
            rhs,
            verdict: if holds { Outcome::Pass } else { Outcome::Fail },
            method: None,
        }
    }
}

pub fn fmt_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn describe(h: &HarmonicData, st1: &ArithStructure) -> String {
    let labels: Vec<&str> = h.morphism.map().iter().map(|&x| h.codomain().label(x)).collect();
    let mut s = String::new();
    let _ = write!(
        s,
        "map [{}]; r1={} s1={}",
        labels.join(","),
        fmt_vec(st1.r()),
        fmt_vec(st1.s())
    );
    s
}

/// `2g₂ - 2 = deg(φ)(2g₁ - 2) + Σ r₂(v)(2μ(v) - 2 + ν(v))`.
pub fn check_riemann_hurwitz(h: &HarmonicData, st1: &ArithStructure) -> Result<TheoremReport, MorphismError> {
    let st2 = pullback_structure(h, st1)?;
    let lhs = divisor::genus_data(&st2).deg_k;
    let map = h.morphism.map();
    let deg_k1: BigInt = st1.r().iter().zip(st1.s()).map(|(r, s)| r * (s - 2)).sum();
    let ram: BigInt = (0..map.len())
        .map(|v| &st1.r()[map[v]] * (2 * h.mu[v] - 2 + h.nu[v]))
        .sum();
    let rhs = deg_k1 * h.degree + ram;
    let holds = lhs == rhs;
    Ok(TheoremReport::new(
        TheoremId::RiemannHurwitz,
        describe(h, st1),
        Relation::Equal,
        lhs.to_string(),
        rhs.to_string(),
        holds,
    ))
}

/// `K₂ = φ*K₁ + Ram_φ`, componentwise.
pub fn check_canonical_ramification(h: &HarmonicData, st1: &ArithStructure) -> Result<TheoremReport, MorphismError> {
    let st2 = pullback_structure(h, st1)?;
    let lhs = divisor::canonical_divisor(&st2).into_values();
    let map = h.morphism.map();
    let rhs: Vec<BigInt> = (0..map.len())
        .map(|v| (&st1.s()[map[v]] - 2) * h.mu[v] + (2 * h.mu[v] - 2 + h.nu[v]))
        .collect();
    let holds = lhs == rhs;
    Ok(TheoremReport::new(
        TheoremId::CanonicalRamification,
        describe(h, st1),
        Relation::Equal,
        fmt_vec(&lhs),
        fmt_vec(&rhs),
        holds,
    ))
}

/// `g₂ >= g₁`, compared as exact rationals.
pub fn check_genus_inequality(h: &HarmonicData, st1: &ArithStructure) -> Result<TheoremReport, MorphismError> {
    let st2 = pullback_structure(h, st1)?;
    let g2 = divisor::genus_data(&st2).genus;
    let deg_k1: BigInt = st1.r().iter().zip(st1.s()).map(|(r, s)| r * (s - 2)).sum();
    let g1 = BigRational::new(deg_k1 + 2, BigInt::from(2));
    let holds = g2 >= g1;
    Ok(TheoremReport::new(
        TheoremId::GenusInequality,
        describe(h, st1),
        Relation::AtLeast,
        fmt_rational(&g2),
        fmt_rational(&g1),
        holds,
    ))
}

/// `|K₁|` divides `|K₂|`.
pub fn check_order_divisibility(h: &HarmonicData, st1: &ArithStructure) -> Result<TheoremReport, MorphismError> {
    let st2 = pullback_structure(h, st1)?;
    let o1 = critical_group(st1).order();
    let o2 = critical_group(&st2).order();
    let holds = o2.is_multiple_of(&o1);
    Ok(TheoremReport::new(
        TheoremId::OrderDivides,
        describe(h, st1),
        Relation::Divides,
        o1.to_string(),
        o2.to_string(),
        holds,
    ))
}

/// `Σ r(v)s(v) = Σ r(v)deg(v)`.
pub fn check_s_degree(st: &ArithStructure) -> TheoremReport {
    let lhs: BigInt = st.r().iter().zip(st.s()).map(|(r, s)| r * s).sum();
    let rhs: BigInt = st.r().iter().zip(st.graph().degree_vector()).map(|(r, d)| r * d).sum();
    let holds = lhs == rhs;
    TheoremReport::new(
        TheoremId::SDegree,
        format!("r={} s={}", fmt_vec(st.r()), fmt_vec(st.s())),
        Relation::Equal,
        lhs.to_string(),
        rhs.to_string(),
        holds,
    )
}

fn method_name(m: VerdictMethod) -> &'static str {
    m.as_str()
}

/// Compares the image size of the induced pushforward with `|K₁|`.
pub fn check_pushforward_surjective(
    h: &HarmonicData,
    st1: &ArithStructure,
    bound: u64,
) -> Result<TheoremReport, CriticalError> {
    let st2 = pullback_structure(h, st1)?;
    let (k1, k2) = (critical_group(st1), critical_group(&st2));
    let hom = induced_pushforward(h, &k2, &k1)?;
    let v = verify_surjective(&hom, bound);
    let mut report = TheoremReport::new(
        TheoremId::PushforwardSurjective,
        describe(h, st1),
        Relation::Equal,
        v.witness.to_string(),
        k1.order().to_string(),
        v.holds,
    );
    report.method = Some(method_name(v.method));
    Ok(report)
}

/// Compares the kernel size of the induced pullback with 1.
pub fn check_pullback_injective(
    h: &HarmonicData,
    st1: &ArithStructure,
    bound: u64,
) -> Result<TheoremReport, CriticalError> {
    let st2 = pullback_structure(h, st1)?;
    let (k1, k2) = (critical_group(st1), critical_group(&st2));
    let hom = induced_pullback(h, &k1, &k2)?;
    let v = verify_injective(&hom, bound);
    let mut report = TheoremReport::new(
        TheoremId::PullbackInjective,
        describe(h, st1),
        Relation::Equal,
        v.witness.to_string(),
        "1".into(),
        v.holds,
    );
    report.method = Some(method_name(v.method));
    Ok(report)
}

/// Maps several representatives of each generator class through `map` and
/// confirms that all land in the class recorded in the hom matrix.
pub fn spot_check_well_defined(
    source: &CriticalGroup,
    target: &CriticalGroup,
    hom: &GroupHom,
    map: impl Fn(&Divisor) -> Divisor,
    rng: &mut impl Rng,
    samples: usize,
) -> bool {
    let n = source.structure().graph().n();
    (0..source.invariant_factor_count()).all(|j| {
        let base = source.generator_representative(j);
        let expected: Vec<BigInt> = hom.matrix.column(j);
        (0..samples).all(|_| {
            let f: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-5i64..=5))).collect();
            let shift = divisor::divisor_of_function(&f, source.structure()).expect("length matches");
            let d = base.add(&shift).expect("same graph");
            match target.class_of(&map(&d)) {
                Ok(class) => class.coords == expected,
                Err(_) => false,
            }
        })
    })
}

/// Aggregate of a theorem sweep.
#[derive(Debug, Clone, Default)]
pub struct SweepSummary {
    pub instances: usize,
    /// Pairs with `|K₂|` above the enumeration bound.
    pub skipped: usize,
    pub reports: usize,
    pub failures: Vec<TheoremReport>,
    /// Instances whose homs changed under a change of representative.
    pub ill_defined: Vec<String>,
}

impl SweepSummary {
    fn merge(mut self, other: SweepSummary) -> Self {
        self.instances += other.instances;
        self.skipped += other.skipped;
        self.reports += other.reports;
        self.failures.extend(other.failures);
        self.ill_defined.extend(other.ill_defined);
        self
    }

    pub fn is_clean(&self) -> bool {
        self.failures.is_empty() && self.ill_defined.is_empty()
    }
}

/// Runs every check on one `(morphism, codomain structure)` pair. Pairs
/// whose domain group exceeds `bound` are skipped so that the hom verdicts
/// are always exhaustive.
pub fn sweep_instance(h: &HarmonicData, st1: &ArithStructure, bound: u64, seed: u64) -> SweepSummary {
    let mut out = SweepSummary {
        instances: 1,
        ..Default::default()
    };
    let st2 = match pullback_structure(h, st1) {
        Ok(st2) => st2,
        Err(e) => {
            out.failures.push(TheoremReport::new(
                TheoremId::OrderDivides,
                describe(h, st1),
                Relation::Equal,
                e.to_string(),
                "valid pullback".into(),
                false,
            ));
            return out;
        }
    };
    let (k1, k2) = (critical_group(st1), critical_group(&st2));
    if k2.order().to_u64().is_none_or(|o| o > bound) {
        out.skipped = 1;
        return out;
    }
    let mut reports = vec![
        check_riemann_hurwitz(h, st1).expect("non-constant"),
        check_canonical_ramification(h, st1).expect("non-constant"),
        check_genus_inequality(h, st1).expect("non-constant"),
        check_order_divisibility(h, st1).expect("non-constant"),
        check_s_degree(st1),
        check_s_degree(&st2),
    ];
    let push = induced_pushforward(h, &k2, &k1);
    let pull = induced_pullback(h, &k1, &k2);
    match (&push, &pull) {
        (Ok(push), Ok(pull)) => {
            for (id, verdict, target) in [
                (
                    TheoremId::PushforwardSurjective,
                    verify_surjective(push, bound),
                    k1.order(),
                ),
                (
                    TheoremId::PullbackInjective,
                    verify_injective(pull, bound),
                    BigInt::from(1),
                ),
            ] {
                let mut r = TheoremReport::new(
                    id,
                    describe(h, st1),
                    Relation::Equal,
                    verdict.witness.to_string(),
                    target.to_string(),
                    verdict.holds && verdict.method == VerdictMethod::Enumerated,
                );
                r.method = Some(method_name(verdict.method));
                reports.push(r);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let push_ok = spot_check_well_defined(
                &k2,
                &k1,
                push,
                |d| divisor::pushforward(h, d).expect("domain divisor"),
                &mut rng,
                3,
            );
            let pull_ok = spot_check_well_defined(
                &k1,
                &k2,
                pull,
                |d| divisor::pullback_divisor(h, d).expect("codomain divisor"),
                &mut rng,
                3,
            );
            if !(push_ok && pull_ok) {
                out.ill_defined.push(describe(h, st1));
            }
        }
        _ => out
            .ill_defined
            .push(format!("{}: {:?} {:?}", describe(h, st1), push.err(), pull.err())),
    }
    out.reports = reports.len();
    out.failures = reports.into_iter().filter(|r| !r.passed()).collect();
    out
}

/// Every non-constant harmonic morphism in `morphisms` against every
/// structure on its codomain with `r <= max_r`.
pub fn theorem_sweep(morphisms: &[HarmonicData], max_r: u64, bound: u64, exec: Execution) -> SweepSummary {
    let mut jobs = Vec::new();
    let mut cache: Vec<(Arc<Graph>, Arc<Vec<ArithStructure>>)> = Vec::new();
    for h in morphisms.iter().filter(|h| !h.constant) {
        let structures = match cache.iter().find(|(g, _)| g == h.codomain()) {
            Some((_, s)) => s.clone(),
            None => {
                let s = Arc::new(enumerate_structures_with(h.codomain(), max_r, exec));
                cache.push((h.codomain().clone(), s.clone()));
                s
            }
        };
        for i in 0..structures.len() {
            jobs.push((h, structures.clone(), i));
        }
    }
    exec.map(jobs.into_iter().enumerate().collect(), |(seed, (h, structures, i))| {
        sweep_instance(h, &structures[i], bound, seed as u64)
    })
    .into_iter()
    .fold(SweepSummary::default(), SweepSummary::merge)
}

/// Invariant-factor obstruction to harmonic morphisms `domain → codomain`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub max_r: u64,
    pub domain_structures: usize,
    pub codomain_structures: usize,
    pub domain_max_factors: usize,
    pub codomain_max_factors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codomain_witness_r: Option<Vec<String>>,
    pub certified: bool,
    pub statement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonconstant_harmonic_morphisms: Option<usize>,
    pub consistent: bool,
}

/// Largest number of maps the obstruction report will brute-force.
const CROSS_CHECK_LIMIT: f64 = 5e7;

/// Compares the largest invariant-factor counts over structures with
/// `r <= max_r` on both graphs.
///
/// The bound is honest in one direction: a morphism would pull a codomain
/// structure back to a domain structure with the same `r` values and at
/// least as many invariant factors, so a certificate within the bound rules
/// out non-constant harmonic morphisms outright. An uncertified result says
/// nothing about existence.
pub fn morphism_obstruction(
    domain: &Arc<Graph>,
    codomain: &Arc<Graph>,
    max_r: u64,
    exec: Execution,
) -> ObstructionReport {
    let count_max = |g: &Arc<Graph>| {
        let all = enumerate_structures_with(g, max_r, exec);
        let counts = exec.map(all.iter().collect(), |st| critical_group(st).invariant_factor_count());
        let best = counts
            .iter()
            .copied()
            .enumerate()
            .max_by_key(|&(i, c)| (c, std::cmp::Reverse(i)));
        (all.len(), best.map_or(0, |(_, c)| c), best.map(|(i, _)| all[i].clone()))
    };
    let (nd, gamma2, _) = count_max(domain);
    let (nc, gamma1, witness) = count_max(codomain);
    let certified = gamma1 > gamma2;
    let statement = if certified {
        format!(
            "every structure with r <= {max_r} on the domain has at most {gamma2} invariant factors, \
             the codomain has one with {gamma1}; no non-constant harmonic morphism exists"
        )
    } else {
        format!(
            "no invariant-factor obstruction with r <= {max_r} (domain max {gamma2}, codomain max {gamma1}); \
             this does not imply that a morphism exists"
        )
    };
    let feasible = (codomain.n() as f64).powi(domain.n() as i32) <= CROSS_CHECK_LIMIT;
    let found = feasible.then(|| enumerate_harmonic_morphisms_with(domain, codomain, false, exec).len());
    let consistent = !(certified && found.is_some_and(|c| c > 0));
    ObstructionReport {
        max_r,
        domain_structures: nd,
        codomain_structures: nc,
        domain_max_factors: gamma2,
        codomain_max_factors: gamma1,
        codomain_witness_r: witness.map(|st| st.r().iter().map(ToString::to_string).collect()),
        certified,
        statement,
        nonconstant_harmonic_morphisms: found,
        consistent,
    }
}

/// A connected graph on `n` vertices: a random recursive tree plus each
/// remaining pair independently with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if !pairs.contains(&(i, j)) && rng.gen_bool(p) {
                pairs.push((i, j));
            }
        }
    }
    Graph::from_indices(labels, &pairs).expect("tree plus extra edges is connected")
}

/// The reproducible corpus of random connected graphs on 2..=max_n vertices.
pub fn random_graph_corpus(count: usize, max_n: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_n);
            random_connected_graph(n, 0.4, &mut rng)
        })
        .collect()
}

/// Sum of a divisor's values weighted by `r`, kept here so reports do not
/// depend on the divisor module.
pub fn weighted_sum(values: &[BigInt], r: &[BigInt]) -> BigInt {
    values.iter().zip(r).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
}
