//! Shared fixtures and random generators for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use promptcheck::cli::random_instance;
use promptcheck::formula::Formula;
use promptcheck::lts::{self, Lts};
use promptcheck::runs::{enumerate_lassos, eval_bounded, LassoRun};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

pub fn load(name: &str) -> Lts {
    lts::parse_lts(&std::fs::read(data(name)).unwrap()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const ATOMS: [&str; 2] = ["p0", "p1"];

/// Random system with 1..=max_states states over atoms `p0`, `p1`.
pub fn random_lts(r: &mut ChaCha8Rng, max_states: usize) -> Lts {
    let n = r.gen_range(1..=max_states);
    let d = [0.2, 0.35, 0.5, 0.7][r.gen_range(0..4)];
    random_instance(n, d, ATOMS.len(), r.gen()).unwrap()
}

/// Random strongly connected system: a Hamiltonian ring plus random chords.
pub fn random_strongly_connected(r: &mut ChaCha8Rng, n: usize, density: f64, atoms: usize) -> Lts {
    let name = |i: usize| format!("s{i}");
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if j == (i + 1) % n || r.gen_bool(density) {
                edges.push((name(i), name(j)));
            }
        }
    }
    let states: Vec<(String, Vec<String>)> = (0..n)
        .map(|i| {
            let labels = (0..atoms).filter(|_| r.gen_bool(0.5)).map(|a| format!("p{a}")).collect();
            (name(i), labels)
        })
        .collect();
    Lts::new(&states, &name(0), &edges).unwrap()
}

pub fn literal(r: &mut ChaCha8Rng) -> Formula {
    let a = *ATOMS.choose(r).unwrap();
    if r.gen_bool(0.3) {
        Formula::NegAtom(a.into())
    } else {
        Formula::Atom(a.into())
    }
}

/// Budgets for the formula generators.
pub struct Budget {
    pub fpinf: usize,
    pub and: usize,
}

/// Random Muller-fragment formula within the budget.
pub fn muller(r: &mut ChaCha8Rng, depth: usize, b: &mut Budget) -> Formula {
    let mut choices = vec![0, 0, 1];
    if depth > 0 {
        choices.push(1);
        if b.and > 0 {
            choices.push(2);
        }
        if b.fpinf > 0 {
            choices.extend([3, 3]);
        }
    }
    match *choices.choose(r).unwrap() {
        0 => literal(r),
        1 if depth > 0 => Formula::Or(vec![muller(r, depth - 1, b), muller(r, depth - 1, b)]),
        1 => literal(r),
        2 => {
            b.and -= 1;
            Formula::And(vec![muller(r, depth - 1, b), muller(r, depth - 1, b)])
        }
        _ => {
            b.fpinf -= 1;
            Formula::fpinf(muller(r, depth - 1, b))
        }
    }
}

/// Muller formula with at most three `FPinf` and two `&`.
pub fn random_muller(r: &mut ChaCha8Rng) -> Formula {
    muller(r, 3, &mut Budget { fpinf: 3, and: 2 })
}

/// Positive Muller formula: every atom sits under some `FPinf`.
pub fn random_positive(r: &mut ChaCha8Rng) -> Formula {
    let mut b = Budget { fpinf: 2, and: 1 };
    let first = Formula::fpinf(muller(r, 2, &mut b));
    match r.gen_range(0..3) {
        0 => first,
        k => {
            let second = Formula::fpinf(muller(r, 1, &mut Budget { fpinf: 1, and: 1 }));
            if k == 1 {
                Formula::Or(vec![first, second])
            } else {
                Formula::And(vec![first, second])
            }
        }
    }
}

pub fn random_initialized(r: &mut ChaCha8Rng) -> Formula {
    Formula::Finally(Box::new(random_positive(r)))
}

/// Random lasso from the initial state.
pub fn random_lasso(r: &mut ChaCha8Rng, l: &Lts, max_len: usize) -> LassoRun {
    loop {
        let len = r.gen_range(1..=max_len);
        let mut path = vec![l.init()];
        while path.len() < len {
            let s = *path.last().unwrap();
            path.push(*l.succ(s).choose(r).unwrap());
        }
        let last = *path.last().unwrap();
        let starts: Vec<usize> = (0..path.len()).filter(|&i| l.has_edge(last, path[i])).collect();
        if let Some(&p) = starts.choose(r) {
            return LassoRun::new(path[..p].to_vec(), path[p..].to_vec());
        }
    }
}

/// Some enumerated lasso falsifies `f` at bound `k`.
pub fn lasso_falsifies(l: &Lts, f: &Formula, k: u64, max_prefix: usize, max_cycle: usize) -> Option<LassoRun> {
    enumerate_lassos(l, max_prefix, max_cycle)
        .unwrap()
        .find(|run| !eval_bounded(l, run, k, f).unwrap())
}

/// Reachable bottom components of `l`.
pub fn bottoms(l: &Lts) -> Vec<Vec<usize>> {
    lts::sccs(l)
        .bottoms()
        .filter(|c| c.reachable)
        .map(|c| c.states.clone())
        .collect()
}
