#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub fn crate_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub const FIXTURE: &str = "fixtures/paper.json";

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary from the crate root with the fixture workspace.
pub fn cli(args: &[&str]) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_arithgraph"))
        .current_dir(crate_root())
        .arg("-w")
        .arg(FIXTURE)
        .args(args)
        .output()
        .expect("binary runs");
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn render(args: &str, o: &Outcome) -> String {
    format!(
        "$ {args}\n--- exit {}\n--- stdout\n{}--- stderr\n{}",
        o.code, o.stdout, o.stderr
    )
}

pub fn golden_dir() -> PathBuf {
    crate_root().join("tests/golden")
}

pub fn golden_cases() -> Vec<(String, String)> {
    let text = std::fs::read_to_string(golden_dir().join("cases.txt")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (name, args) = l.split_once('|').expect("name | args");
            (name.trim().to_owned(), args.trim().to_owned())
        })
        .collect()
}

/// Runs every golden case; returns the names whose output differs from the
/// committed file. With `UPDATE_GOLDEN=1` the files are rewritten instead.
pub fn golden_mismatches() -> Vec<String> {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut bad = Vec::new();
    for (name, args) in golden_cases() {
        let argv: Vec<&str> = args.split_whitespace().collect();
        let actual = render(&args, &cli(&argv));
        let path = golden_dir().join(format!("{name}.out"));
        if update {
            std::fs::write(&path, &actual).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(expected) if expected == actual => {}
            _ => bad.push(name),
        }
    }
    bad
}

pub fn golden_file(name: &str) -> String {
    std::fs::read_to_string(golden_dir().join(format!("{name}.out"))).unwrap()
}

pub fn exists(p: &Path) -> bool {
    p.exists()
}

/// Determinant by cofactor expansion over exact integers.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Determinantal divisors `g_k`, the gcd of all `k×k` minors, for
/// `k = 1..=min(rows, cols)`.
pub fn minor_gcds(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let (r, c) = (m.len(), m.first().map_or(0, Vec::len));
    (1..=r.min(c))
        .map(|k| {
            let mut g = BigInt::zero();
            for rows in subsets(r, k) {
                for cols in subsets(c, k) {
                    let sub: Vec<Vec<BigInt>> = rows
                        .iter()
                        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
                        .collect();
                    g = g.gcd(&det(&sub));
                }
            }
            g
        })
        .collect()
}

/// Invariant factors `e_k = g_k / g_{k-1}` up to the rank, from minors alone.
pub fn invariant_factors_by_minors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let g = minor_gcds(m);
    let mut out = Vec::new();
    let mut prev = BigInt::from(1);
    for gk in g {
        if gk.is_zero() {
            break;
        }
        out.push((&gk / &prev).abs());
        prev = gk;
    }
    out
}
