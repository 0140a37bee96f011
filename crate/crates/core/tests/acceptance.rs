//! Acceptance criteria, one printed PASS/FAIL line each.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use arithgraph::arith::{enumerate_structures, ArithStructure};
use arithgraph::critical::critical_group;
use arithgraph::divisor::{self, Divisor};
use arithgraph::graph::{families::*, Graph};
use arithgraph::linalg::{big_vec, smith_normal_form, IntMatrix};
use arithgraph::morphism::{
    adjacency_criterion_tally, analyze_harmonic, enumerate_harmonic_morphisms_with, pullback_structure,
    verify_matrix_identities, GraphMorphism, HarmonicData,
};
use arithgraph::par::Execution;
use arithgraph::verify::{random_graph_corpus, theorem_sweep};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

// Plain i64 matrix helpers, kept apart from the library's matrix type.
type M = Vec<Vec<i64>>;

fn mul(a: &M, b: &M) -> M {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

fn add(a: &M, b: &M) -> M {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

fn transpose(a: &M) -> M {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

fn diag(v: &[i64]) -> M {
    (0..v.len())
        .map(|i| (0..v.len()).map(|j| if i == j { v[i] } else { 0 }).collect())
        .collect()
}

fn adjacency(g: &Graph) -> M {
    let n = g.n();
    let mut a = vec![vec![0; n]; n];
    for &(x, y) in g.edges() {
        a[x][y] = 1;
        a[y][x] = 1;
    }
    a
}

fn phi(g2: &Graph, g1: &Graph, map: &[usize]) -> M {
    (0..g2.n())
        .map(|v| (0..g1.n()).map(|x| i64::from(map[v] == x)).collect())
        .collect()
}

fn laplacian(g: &Graph, s: &[i64]) -> M {
    let a = adjacency(g);
    (0..g.n())
        .map(|i| (0..g.n()).map(|j| if i == j { s[i] } else { -a[i][j] }).collect())
        .collect()
}

fn small(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| i64::try_from(x).unwrap()).collect()
}

fn big_rows(m: &M) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| big_vec(r)).collect()
}

/// μ and ν straight from the local definition; `None` when some vertex sees
/// two codomain edges with different counts.
fn local_multiplicities(g2: &Graph, g1: &Graph, map: &[usize]) -> Option<(Vec<i64>, Vec<i64>)> {
    let mut mu = Vec::new();
    let mut nu = Vec::new();
    for v in 0..g2.n() {
        let x = map[v];
        let count = |y: usize| g2.neighbors(v).iter().filter(|&&w| map[w] == y).count() as i64;
        nu.push(count(x));
        let counts: Vec<i64> = g1.neighbors(x).iter().map(|&y| count(y)).collect();
        if counts.windows(2).any(|w| w[0] != w[1]) {
            return None;
        }
        mu.push(counts[0]);
    }
    Some((mu, nu))
}

/// Invariant factors bigger than one, from determinantal divisors only.
fn minors_factors(l: &M) -> Vec<BigInt> {
    common::invariant_factors_by_minors(&big_rows(l))
        .into_iter()
        .filter(|e| !e.is_one())
        .collect()
}

fn factors(st: &ArithStructure) -> Vec<i64> {
    small(critical_group(st).invariant_factors())
}

fn structure(g: &Arc<Graph>, r: &[i64], s: &[i64]) -> ArithStructure {
    ArithStructure::validate(g.clone(), big_vec(r), big_vec(s)).unwrap()
}

fn wheel_to_triangle() -> (Arc<Graph>, Arc<Graph>, HarmonicData) {
    let (w5, c3) = (Arc::new(wheel(5)), Arc::new(cycle(3)));
    let m = GraphMorphism::new(w5.clone(), c3.clone(), vec![0, 1, 1, 2, 2]).unwrap();
    (w5, c3, analyze_harmonic(&m).unwrap())
}

fn criterion_1() -> Check {
    let (w5, c3, h) = wheel_to_triangle();
    ensure!(h.mu == [2, 1, 1, 1, 1], "mu = {:?}", h.mu);
    ensure!(h.nu == [0, 1, 1, 1, 1], "nu = {:?}", h.nu);
    ensure!(h.degree == 2, "degree = {}", h.degree);
    let (mu, nu) = local_multiplicities(&w5, &c3, h.morphism.map()).ok_or("local oracle says not harmonic")?;
    ensure!(mu == h.mu && nu == h.nu, "local oracle disagrees: {mu:?} {nu:?}");
    let p = phi(&w5, &c3, h.morphism.map());
    let lhs = mul(&adjacency(&w5), &p);
    let rhs = add(&mul(&diag(&nu), &p), &mul(&mul(&diag(&mu), &p), &adjacency(&c3)));
    ensure!(lhs == rhs, "adjacency identity fails in the oracle");
    ensure!(
        mul(&mul(&transpose(&p), &diag(&mu)), &p) == diag(&[2, 2, 2]),
        "degree identity fails in the oracle"
    );
    let ids = verify_matrix_identities(&h).map_err(|e| e.to_string())?;
    ensure!(ids.holds(), "library identities: {ids:?}");
    Ok("mu=(2,1,1,1,1) nu=(0,1,1,1,1) deg=2".into())
}

fn criterion_2() -> Check {
    let (w5, c3, h) = wheel_to_triangle();
    let st1 = structure(&c3, &[2, 1, 3], &[2, 5, 1]);
    let st2 = pullback_structure(&h, &st1).map_err(|e| e.to_string())?;
    ensure!(small(st2.r()) == [2, 1, 1, 3, 3], "r2 = {:?}", st2.r());
    ensure!(small(st2.s()) == [4, 6, 6, 2, 2], "s2 = {:?}", st2.s());
    let expected_l2: M = vec![
        vec![4, -1, -1, -1, -1],
        vec![-1, 6, -1, 0, -1],
        vec![-1, -1, 6, -1, 0],
        vec![-1, 0, -1, 2, -1],
        vec![-1, -1, 0, -1, 2],
    ];
    ensure!(
        st2.laplacian().to_rows() == big_rows(&expected_l2),
        "L2 differs from the expected matrix"
    );
    ensure!(laplacian(&w5, &small(st2.s())) == expected_l2, "oracle L2 differs");
    let p = phi(&w5, &c3, h.morphism.map());
    let l1 = laplacian(&c3, &[2, 5, 1]);
    ensure!(
        mul(&expected_l2, &p) == mul(&mul(&diag(&h.mu), &p), &l1),
        "L2 Phi != Dmu Phi L1"
    );
    Ok("r2=(2,1,1,3,3) s2=(4,6,6,2,2), L2 Phi = Dmu Phi L1".into())
}

fn check_group(g: &Arc<Graph>, r: &[i64], s: &[i64], want: &[i64]) -> Result<(), String> {
    let st = structure(g, r, s);
    let got = factors(&st);
    ensure!(got == want, "r={r:?}: got {got:?}, want {want:?}");
    let oracle = minors_factors(&laplacian(g, s));
    ensure!(oracle == big_vec(want), "r={r:?}: minors oracle {oracle:?}");
    Ok(())
}

fn criterion_3() -> Check {
    let w7 = Arc::new(wheel(7));
    ensure!(factors(&ArithStructure::natural(w7.clone())) == [8, 40], "natural W7");
    check_group(&w7, &[1, 1, 1, 1, 1, 1, 1], &[6, 3, 3, 3, 3, 3, 3], &[8, 40])?;
    check_group(&w7, &[1, 3, 1, 1, 3, 1, 1], &[10, 1, 5, 5, 1, 5, 5], &[8, 24])?;
    check_group(&w7, &[3, 1, 1, 1, 1, 1, 1], &[2, 5, 5, 5, 5, 5, 5], &[8, 168])?;
    Ok("Z/8xZ/40, Z/8xZ/24, Z/8xZ/168".into())
}

fn criterion_4() -> Check {
    let (k4, w7) = (Arc::new(complete(4)), Arc::new(wheel(7)));
    let w7p = Arc::new(w7.with_edge(1, 4).unwrap());
    let map = vec![0, 1, 2, 3, 1, 2, 3];
    let mut notes = Vec::new();
    for (r, s, want2, want2p) in [
        ([1, 1, 1, 3], [5, 5, 5, 1], [8, 24], None),
        ([3, 1, 1, 1], [1, 5, 5, 5], [8, 168], Some([4, 480])),
    ] {
        check_group(&k4, &r, &s, &[2, 6])?;
        let st1 = structure(&k4, &r, &s);
        let h = analyze_harmonic(&GraphMorphism::new(w7.clone(), k4.clone(), map.clone()).unwrap()).unwrap();
        let st2 = pullback_structure(&h, &st1).map_err(|e| e.to_string())?;
        check_group(&w7, &small(st2.r()), &small(st2.s()), &want2)?;
        if let Some(want) = want2p {
            let hp = analyze_harmonic(&GraphMorphism::new(w7p.clone(), k4.clone(), map.clone()).unwrap())
                .map_err(|e| e.to_string())?;
            ensure!(hp.nu.iter().sum::<i64>() == 2, "expected one vertical edge");
            let st2p = pullback_structure(&hp, &st1).map_err(|e| e.to_string())?;
            check_group(&w7p, &small(st2p.r()), &small(st2p.s()), &want)?;
        }
        notes.push(format!("{want2:?}"));
    }
    Ok(format!(
        "K4 groups Z/2xZ/6; pullbacks {}; extra rim edge Z/4xZ/480",
        notes.join(" ")
    ))
}

fn criterion_5() -> Check {
    let (s4, s5, g8) = (Arc::new(star(4)), Arc::new(star(5)), Arc::new(ladder8()));
    check_group(&s4, &[3, 1, 1, 1], &[1, 3, 3, 3], &[3])?;
    check_group(&s5, &[6, 1, 1, 2, 2], &[1, 6, 6, 3, 3], &[3, 3])?;
    let on_star = enumerate_structures(&s4, 6);
    ensure!(
        on_star
            .iter()
            .all(|st| critical_group(st).invariant_factor_count() <= 1),
        "a Star4 structure has two invariant factors"
    );
    let on_g8 = enumerate_structures(&g8, 3);
    ensure!(
        on_g8.iter().all(|st| critical_group(st).invariant_factor_count() <= 1),
        "a structure on the eight-vertex graph has two invariant factors"
    );
    Ok(format!(
        "Z/3, Z/3xZ/3; {} Star4 structures and {} eight-vertex structures all cyclic",
        on_star.len(),
        on_g8.len()
    ))
}

fn criterion_6() -> Check {
    let (w5, c3, h) = wheel_to_triangle();
    let st1 = structure(&c3, &[2, 1, 3], &[2, 5, 1]);
    let st2 = pullback_structure(&h, &st1).unwrap();
    let xi = Divisor::new(c3.clone(), big_vec(&[-4, 5, 1])).unwrap();
    let g = divisor::is_principal(&xi, &st1).map_err(|e| e.to_string())?;
    ensure!(
        mul(&laplacian(&c3, &[2, 5, 1]), &transpose(&vec![small(&g)])) == transpose(&vec![vec![-4, 5, 1]]),
        "L1 g != xi"
    );
    let pulled = divisor::pullback_divisor(&h, &xi).map_err(|e| e.to_string())?;
    ensure!(
        small(pulled.values()) == [-8, 5, 5, 1, 1],
        "pullback = {:?}",
        pulled.values()
    );
    let f = divisor::is_principal(&pulled, &st2).map_err(|e| e.to_string())?;
    ensure!(
        mul(&laplacian(&w5, &small(st2.s())), &transpose(&vec![small(&f)])) == transpose(&vec![vec![-8, 5, 5, 1, 1]]),
        "L2 f != pullback"
    );
    Ok(format!("witnesses g={:?} f={:?}", small(&g), small(&f)))
}

fn criterion_7() -> Check {
    let (_, c3, h) = wheel_to_triangle();
    let st1 = structure(&c3, &[2, 1, 3], &[2, 5, 1]);
    let st2 = pullback_structure(&h, &st1).unwrap();
    let (g1, g2) = (divisor::genus_data(&st1), divisor::genus_data(&st2));
    ensure!(g1.deg_k.is_zero() && g1.genus == BigInt::one().into(), "g1: {g1:?}");
    ensure!(
        g2.deg_k == BigInt::from(12) && g2.genus == BigInt::from(7).into(),
        "g2: {g2:?}"
    );
    let ram = divisor::ramification_divisor(&h).unwrap();
    ensure!(small(ram.values()) == [2, 1, 1, 1, 1], "Ram = {:?}", ram.values());
    // The weighted ramification sum, by hand.
    let weighted: i64 = [2, 1, 1, 3, 3].iter().zip([2, 1, 1, 1, 1]).map(|(a, b)| a * b).sum();
    let (deg_phi, deg_k1) = (h.degree, 0);
    ensure!(12 == deg_phi * deg_k1 + weighted, "12 != 2*0 + {weighted}");
    let report = arithgraph::verify::check_riemann_hurwitz(&h, &st1).unwrap();
    ensure!(
        report.passed() && report.lhs == "12" && report.rhs == "12",
        "{report:?}"
    );
    Ok("deg K1=0, deg K2=12, g1=1, g2=7, 12 = 2*0 + 12".into())
}

fn criterion_8() -> Check {
    let mut graphs = random_graph_corpus(50, 6, 0x5EED);
    graphs.extend((3..=6).map(cycle));
    graphs.extend((2..=6).map(path));
    graphs.extend([star(4), star(5), complete(4), wheel(5)]);
    let mut checked = 0usize;
    for g in graphs {
        ensure!(g.n() <= 6, "corpus graph too large");
        let g = Arc::new(g);
        for st in enumerate_structures(&g, 3) {
            let (r, s) = (small(st.r()), small(st.s()));
            let l = laplacian(&g, &s);
            let lr = mul(&l, &transpose(&vec![r.clone()]));
            ensure!(lr.iter().all(|x| x[0] == 0), "L r != 0 for r={r:?}");
            let gk = common::minor_gcds(&big_rows(&l));
            let n = g.n();
            ensure!(gk[n - 1].is_zero() && !gk[n - 2].is_zero(), "rank != n-1 for r={r:?}");
            let deg = g.degree_vector();
            let lhs: i64 = r.iter().zip(&s).map(|(a, b)| a * b).sum();
            let rhs: i64 = r.iter().zip(&deg).map(|(a, b)| a * b).sum();
            ensure!(lhs == rhs, "S-deg fails for r={r:?}");
            let k = critical_group(&st);
            let free = small(k.snf().u.row(k.free_row()));
            let neg: Vec<i64> = free.iter().map(|x| -x).collect();
            ensure!(free == r || neg == r, "free SNF row {free:?} vs r={r:?}");
            ensure!(k.free_row_is_r(), "library disagrees on the free row");
            let oracle = minors_factors(&l);
            ensure!(
                k.invariant_factors() == oracle.as_slice(),
                "factors vs minors for r={r:?}"
            );
            let order: BigInt = oracle.iter().product();
            ensure!(k.order() == order && order == gk[n - 2].abs(), "order for r={r:?}");
            checked += 1;
        }
    }
    Ok(format!("{checked} structures on 67 graphs, corpus seed 0x5EED"))
}

fn criterion_9_graphs() -> Vec<(&'static str, Arc<Graph>)> {
    vec![
        ("C3", cycle(3)),
        ("C4", cycle(4)),
        ("C6", cycle(6)),
        ("Star4", star(4)),
        ("K4", complete(4)),
        ("W5", wheel(5)),
        ("W7", wheel(7)),
        ("G8", ladder8()),
    ]
    .into_iter()
    .map(|(n, g)| (n, Arc::new(g)))
    .collect()
}

fn criterion_9_morphisms() -> Vec<HarmonicData> {
    let gs = criterion_9_graphs();
    let mut out = Vec::new();
    for (_, g2) in &gs {
        for (_, g1) in &gs {
            if g2.n() <= 8 {
                out.extend(enumerate_harmonic_morphisms_with(g2, g1, false, Execution::Parallel));
            }
        }
    }
    out
}

fn criterion_9() -> Check {
    let gs = criterion_9_graphs();
    let all = criterion_9_morphisms();
    for h in &all {
        let (g2, g1, map) = (h.domain(), h.codomain(), h.morphism.map());
        let (mu, nu) = local_multiplicities(g2, g1, map).ok_or("enumerated map is not locally harmonic")?;
        ensure!(mu == h.mu && nu == h.nu, "multiplicities differ for {map:?}");
        let p = phi(g2, g1, map);
        let (a2, a1) = (adjacency(g2), adjacency(g1));
        ensure!(
            mul(&a2, &p) == add(&mul(&diag(&nu), &p), &mul(&mul(&diag(&mu), &p), &a1)),
            "adjacency identity fails for {map:?}"
        );
        let pt = mul(&mul(&transpose(&p), &diag(&mu)), &p);
        ensure!(pt == diag(&vec![h.degree; g1.n()]), "degree identity fails for {map:?}");
        ensure!((0..g1.n()).all(|x| map.contains(&x)), "not vertex surjective: {map:?}");
        let mut counts = vec![0i64; g1.edge_count()];
        for &(a, b) in g2.edges() {
            let (x, y) = (map[a].min(map[b]), map[a].max(map[b]));
            if x != y {
                counts[g1.edges().iter().position(|&e| e == (x, y)).unwrap()] += 1;
            }
        }
        ensure!(
            counts.iter().all(|&c| c == h.degree && c > 0),
            "edge preimages {counts:?} for {map:?}"
        );
        let l1s = [ArithStructure::natural(g1.clone())]
            .into_iter()
            .chain(enumerate_structures(g1, 2));
        for st1 in l1s {
            let st2 = pullback_structure(h, &st1).map_err(|e| format!("{map:?}: {e}"))?;
            let l2 = laplacian(g2, &small(st2.s()));
            let l1 = laplacian(g1, &small(st1.s()));
            ensure!(
                mul(&l2, &p) == mul(&mul(&diag(&mu), &p), &l1),
                "L2 Phi != Dmu Phi L1 for {map:?}"
            );
        }
    }
    let mut maps = 0u64;
    for (_, g2) in &gs {
        for (_, g1) in &gs {
            let t = adjacency_criterion_tally(g2, g1, Execution::Parallel);
            ensure!(
                t.disagreements.is_empty(),
                "converse fails: {:?}",
                t.disagreements.first()
            );
            maps += t.morphisms;
        }
    }
    Ok(format!(
        "{} harmonic morphisms; converse held on {maps} graph morphisms",
        all.len()
    ))
}

fn criterion_10() -> Check {
    let all = criterion_9_morphisms();
    let s = theorem_sweep(&all, 3, 10_000, Execution::Parallel);
    ensure!(
        s.failures.is_empty(),
        "{} failures, first {:?}",
        s.failures.len(),
        s.failures[0]
    );
    ensure!(
        s.ill_defined.is_empty(),
        "ill-defined homs: {:?}",
        s.ill_defined.first()
    );
    ensure!(s.instances > s.skipped, "nothing was checked");
    Ok(format!(
        "{} pairs checked, {} above the group bound, {} reports, 0 counterexamples",
        s.instances - s.skipped,
        s.skipped,
        s.reports
    ))
}

fn criterion_11() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..200 {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let m: M = (0..r)
            .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let mm = IntMatrix::from_rows(big_rows(&m));
        let snf = smith_normal_form(&mm);
        let product = &(&snf.u * &mm) * &snf.v;
        ensure!(product == snf.d, "matrix {i}: UMV != D");
        ensure!(common::det(&snf.u.to_rows()).abs().is_one(), "matrix {i}: |det U| != 1");
        ensure!(common::det(&snf.v.to_rows()).abs().is_one(), "matrix {i}: |det V| != 1");
        let nonzero: Vec<BigInt> = snf.diagonal().into_iter().filter(|x| !x.is_zero()).collect();
        ensure!(
            nonzero == common::invariant_factors_by_minors(&big_rows(&m)),
            "matrix {i}: diagonal {nonzero:?} vs minors"
        );
        let d = &snf.d;
        for a in 0..d.rows() {
            for b in 0..d.cols() {
                ensure!(a == b || d[(a, b)].is_zero(), "matrix {i}: D not diagonal");
            }
        }
    }
    Ok("200 matrices, seed 11".into())
}

fn criterion_12() -> Check {
    let bad = common::golden_mismatches();
    ensure!(bad.is_empty(), "mismatched golden outputs: {bad:?}");
    Ok(format!("{} CLI cases byte-identical", common::golden_cases().len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 12] = [
        ("harmonic multiplicities and matrix identities, W5 -> C3", criterion_1),
        ("pullback structure and its Laplacian, W5 -> C3", criterion_2),
        ("critical groups on the wheel W7", criterion_3),
        (
            "K4 structures, their W7 pullbacks and the extra-edge variant",
            criterion_4,
        ),
        ("star graphs and the cyclic-only eight-vertex graph", criterion_5),
        ("principal divisor and its pullback", criterion_6),
        (
            "canonical divisors, genera and Riemann-Hurwitz on W5 -> C3",
            criterion_7,
        ),
        ("structure properties over the seeded corpus", criterion_8),
        ("harmonic morphism properties and the converse criterion", criterion_9),
        ("theorem sweep over morphisms and codomain structures", criterion_10),
        ("Smith normal form against determinantal divisors", criterion_11),
        ("CLI golden outputs", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
