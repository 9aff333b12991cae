#![allow(dead_code)]

use facloc::instances::{gen_random, RandomMode, RandomParams};
use facloc::{Instance, ProblemKind};

/// One member of a seeded random suite.
pub struct Case {
    pub seed: u64,
    pub n: usize,
    pub k: Option<usize>,
    pub mode: RandomMode,
    pub inst: Instance,
}

/// Deterministic mix over `n ∈ {6..=10}`, `k ∈ {2, 3}` and both generators.
pub fn suite(kind: ProblemKind, count: usize, base_seed: u64, p: Option<f64>) -> Vec<Case> {
    (0..count)
        .map(|i| {
            let n = 6 + i % 5;
            let mode = if (i / 5) % 2 == 0 { RandomMode::EuclideanUnitSquare } else { RandomMode::RandomGraphClosure };
            let k = kind.needs_k().then_some(2 + (i / 10) % 2);
            let mut params = RandomParams::new(kind);
            params.k = k;
            params.p = p;
            let seed = base_seed + i as u64;
            let inst = gen_random(seed, n, mode, &params).unwrap();
            Case { seed, n, k, mode, inst }
        })
        .collect()
}

/// Cost of `open` straight from the distance matrix: `conn(d)` per client
/// plus opening costs when `with_fac`.
pub fn naive_cost(inst: &Instance, open: &[usize], conn: impl Fn(f64) -> f64, with_fac: bool) -> f64 {
    let mut total = 0.0;
    for &j in inst.clients() {
        let mut best = f64::INFINITY;
        for &f in open {
            if inst.d(j, f) < best {
                best = inst.d(j, f);
            }
        }
        total += conn(best);
    }
    if with_fac {
        total += open.iter().map(|&f| inst.opening_cost(f)).sum::<f64>();
    }
    total
}

/// Minimum by bitmask enumeration over facility subsets whose size passes
/// `size_ok`; independent of the library oracle's combination order.
pub fn naive_min(inst: &Instance, size_ok: impl Fn(usize) -> bool, cost: impl Fn(&[usize]) -> f64) -> f64 {
    let fac = inst.facilities();
    let m = fac.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << m) {
        if !size_ok(mask.count_ones() as usize) {
            continue;
        }
        let open: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| fac[b]).collect();
        best = best.min(cost(&open));
    }
    best
}

pub fn ratio(alg: f64, opt: f64) -> f64 {
    if opt == 0.0 {
        if alg == 0.0 { 1.0 } else { f64::INFINITY }
    } else {
        alg / opt
    }
}
