//! Fixed instances shared by the criterion benches.

use facloc::instances::{gen_random, gen_torus, RandomMode, RandomParams, TorusInstance, TorusSpec};
use facloc::{Instance, ProblemKind};

/// Euclidean k-median instance on `n` uniform points.
pub fn kmedian(seed: u64, n: usize, k: usize) -> Instance {
    gen_random(seed, n, RandomMode::EuclideanUnitSquare, &RandomParams::new(ProblemKind::KMedian).k(k)).expect("valid parameters")
}

pub fn lp(seed: u64, n: usize, k: usize, p: f64) -> Instance {
    gen_random(seed, n, RandomMode::EuclideanUnitSquare, &RandomParams::new(ProblemKind::LpNorm).k(k).p(p)).expect("valid parameters")
}

/// Graph-metric UFL instance with opening costs in `[0, diameter]`.
pub fn ufl(seed: u64, n: usize) -> Instance {
    gen_random(seed, n, RandomMode::RandomGraphClosure, &RandomParams::new(ProblemKind::Ufl)).expect("valid parameters")
}

pub fn kufl(seed: u64, n: usize, k: usize) -> Instance {
    gen_random(seed, n, RandomMode::RandomGraphClosure, &RandomParams::new(ProblemKind::Kufl).k(k)).expect("valid parameters")
}

pub fn torus(side: usize, p: f64) -> TorusInstance {
    gen_torus(TorusSpec::new(side, p).expect("even side")).expect("torus builds")
}
