//! Instance generators: seeded random suites and the torus family on which
//! single-swap local search for `Φ_p` gets stuck at ratio `2p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Instance, MetricSpace, ProblemKind};

/// An `N × N` torus of lattice facilities with a gadget of four clients
/// around each even lattice point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSpec {
    side: usize,
    p: f64,
}

impl TorusSpec {
    pub fn new(side: usize, p: f64) -> Result<Self> {
        if side < 2 || !side.is_multiple_of(2) {
            return Err(Error::input(format!("torus side N = {side} must be even and at least 2")));
        }
        if !p.is_finite() || p < 1.0 {
            return Err(Error::input(format!("p = {p} must be a finite real >= 1")));
        }
        Ok(TorusSpec { side, p })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Gadget radius `1 / (2p + 1)`.
    pub fn x(&self) -> f64 {
        1.0 / (2.0 * self.p + 1.0)
    }

    /// Facility budget `N² / 2`.
    pub fn k(&self) -> usize {
        self.side * self.side / 2
    }
}

#[derive(Debug, Clone)]
pub struct TorusInstance {
    pub spec: TorusSpec,
    pub instance: Instance,
    /// Even lattice points (the optimum).
    pub even: Vec<usize>,
    /// Odd lattice points (the stuck local optimum).
    pub odd: Vec<usize>,
}

const DIRECTIONS: [(&str, isize, isize); 4] = [("W", 0, -1), ("E", 0, 1), ("S", -1, 0), ("N", 1, 0)];

/// Builds the torus instance. Lattice point `(r, c)` is node `r·N + c`; the
/// gadget clients follow, four per even point in `W, E, S, N` order. Every
/// even point is at distance `x` from its gadget points; each gadget point is
/// at distance `1 − x` from the odd lattice point on its side. Adjacency
/// wraps around in both axes and the metric is the shortest-path closure.
pub fn gen_torus(spec: TorusSpec) -> Result<TorusInstance> {
    let n = spec.side;
    let lattice = n * n;
    let x = spec.x();
    let node = |r: usize, c: usize| r * n + c;
    let step = |v: usize, d: isize| (v as isize + d).rem_euclid(n as isize) as usize;

    let mut labels: Vec<String> = (0..lattice).map(|v| format!("L({},{})", v / n, v % n)).collect();
    let mut edges = Vec::new();
    let (mut even, mut odd) = (Vec::new(), Vec::new());
    for r in 0..n {
        for c in 0..n {
            let v = node(r, c);
            if (r + c) % 2 == 1 {
                odd.push(v);
                continue;
            }
            even.push(v);
            for &(name, dr, dc) in &DIRECTIONS {
                let gadget = labels.len();
                labels.push(format!("G({r},{c},{name})"));
                edges.push((v, gadget, x));
                edges.push((gadget, node(step(r, dr), step(c, dc)), 1.0 - x));
            }
        }
    }
    let total = labels.len();
    let metric = MetricSpace::from_graph(total, &edges)?.with_labels(labels)?;
    let instance = Instance::builder(metric, ProblemKind::LpNorm)
        .clients((lattice..total).collect())
        .facilities((0..lattice).collect())
        .k(Some(spec.k()))
        .p(Some(spec.p))
        .named_set("even", even.clone())
        .named_set("odd", odd.clone())
        .build()?;
    Ok(TorusInstance { spec, instance, even, odd })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomMode {
    /// Uniform points in the unit square, Euclidean distances.
    EuclideanUnitSquare,
    /// Random connected weighted graph, shortest-path closure.
    RandomGraphClosure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    pub kind: ProblemKind,
    pub k: Option<usize>,
    pub p: Option<f64>,
    /// Opening costs are drawn uniformly from this range; `None` means
    /// `[0, diameter]`.
    pub cost_range: Option<(f64, f64)>,
    /// Probability of each non-tree edge in graph mode.
    pub edge_probability: f64,
    /// Edge weights in graph mode are uniform in this range.
    pub weight_range: (f64, f64),
}

impl RandomParams {
    pub fn new(kind: ProblemKind) -> Self {
        RandomParams { kind, k: None, p: None, cost_range: None, edge_probability: 0.3, weight_range: (0.1, 1.0) }
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn cost_range(mut self, lo: f64, hi: f64) -> Self {
        self.cost_range = Some((lo, hi));
        self
    }
}

/// Seeded random instance with every point acting as client and facility.
pub fn gen_random(seed: u64, n: usize, mode: RandomMode, params: &RandomParams) -> Result<Instance> {
    if n < 2 {
        return Err(Error::input(format!("random instances need n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = match mode {
        RandomMode::EuclideanUnitSquare => {
            let points: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
            MetricSpace::from_points(&points)?
        }
        RandomMode::RandomGraphClosure => {
            let (lo, hi) = params.weight_range;
            if !(0.0..=hi).contains(&lo) {
                return Err(Error::input(format!("invalid weight range [{lo}, {hi}]")));
            }
            let weight = |rng: &mut ChaCha8Rng| if lo == hi { lo } else { rng.random_range(lo..hi) };
            let mut edges = Vec::new();
            let mut tree = vec![usize::MAX; n];
            for v in 1..n {
                let u = rng.random_range(0..v);
                tree[v] = u;
                edges.push((u, v, weight(&mut rng)));
            }
            for u in 0..n {
                for v in (u + 1)..n {
                    if tree[v] != u && rng.random_bool(params.edge_probability) {
                        edges.push((u, v, weight(&mut rng)));
                    }
                }
            }
            MetricSpace::from_graph(n, &edges)?
        }
    };
    let opening_costs = if params.kind.needs_opening_costs() {
        let (lo, hi) = params.cost_range.unwrap_or((0.0, metric.diameter()));
        if !(0.0..=hi).contains(&lo) {
            return Err(Error::input(format!("invalid opening cost range [{lo}, {hi}]")));
        }
        Some((0..n).map(|_| if lo == hi { lo } else { rng.random_range(lo..=hi) }).collect())
    } else {
        None
    };
    Instance::builder(metric, params.kind).k(params.k).p(params.p).opening_costs(opening_costs).build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_sizes() {
        let t = gen_torus(TorusSpec::new(4, 1.0).unwrap()).unwrap();
        assert_eq!(t.instance.facilities().len(), 16);
        assert_eq!(t.instance.clients().len(), 32);
        assert_eq!(t.instance.k(), Some(8));
        assert!((t.spec.x() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.even.len(), 8);
        assert_eq!(t.odd.len(), 8);
        assert_eq!(t.instance.named_set("odd"), Some(t.odd.as_slice()));
    }

    #[test]
    fn torus_rejects_odd_side() {
        assert!(TorusSpec::new(3, 1.0).is_err());
        assert!(TorusSpec::new(0, 1.0).is_err());
        assert!(TorusSpec::new(4, 0.5).is_err());
    }

    #[test]
    fn west_gadget_to_east_odd_neighbor() {
        let t = gen_torus(TorusSpec::new(4, 1.0).unwrap()).unwrap();
        let x = t.spec.x();
        // even point (0,0) is node 0 and owns the first gadget block; W is first
        let west = 16;
        let east_odd = 1;
        assert!((t.instance.d(west, east_odd) - (1.0 + x)).abs() < 1e-12);
        assert!((t.instance.d(west, 0) - x).abs() < 1e-15);
        // (0,-1) wraps to (0,3)
        assert!((t.instance.d(west, 3) - (1.0 - x)).abs() < 1e-15);
    }

    #[test]
    fn small_torus_with_wraparound_builds() {
        let t = gen_torus(TorusSpec::new(2, 2.0).unwrap()).unwrap();
        assert!(t.instance.metric().validate().is_empty());
        assert_eq!(t.instance.clients().len(), 8);
    }

    #[test]
    fn random_is_deterministic() {
        let params = RandomParams::new(ProblemKind::Ufl);
        for mode in [RandomMode::EuclideanUnitSquare, RandomMode::RandomGraphClosure] {
            let a = gen_random(7, 9, mode, &params).unwrap();
            let b = gen_random(7, 9, mode, &params).unwrap();
            assert_eq!(a, b);
            let c = gen_random(8, 9, mode, &params).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn random_graph_is_metric() {
        for seed in 0..20 {
            let inst = gen_random(seed, 10, RandomMode::RandomGraphClosure, &RandomParams::new(ProblemKind::KMedian).k(3))
                .unwrap();
            assert!(inst.metric().validate().is_empty());
        }
    }

    #[test]
    fn random_costs_respect_range() {
        let inst = gen_random(3, 8, RandomMode::EuclideanUnitSquare, &RandomParams::new(ProblemKind::Kufl).k(2)).unwrap();
        let diam = inst.metric().diameter();
        for &f in inst.facilities() {
            let c = inst.opening_cost(f);
            assert!((0.0..=diam).contains(&c));
        }
        assert!(gen_random(1, 1, RandomMode::EuclideanUnitSquare, &RandomParams::new(ProblemKind::KMedian).k(1)).is_err());
    }
}
