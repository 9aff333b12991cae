mod common;

use common::naive_cost;
use facloc::certify;
use facloc::instances::{gen_random, RandomMode, RandomParams};
use facloc::objective::{self, cost_kcenter, delta_eval, kcenter_exponent, phi_p, Objective};
use facloc::search::{enumerate_moves, SearchConfig};
use facloc::{assign, Instance, ProblemKind};
use proptest::prelude::*;

fn kinds() -> impl Strategy<Value = ProblemKind> {
    prop_oneof![Just(ProblemKind::KMedian), Just(ProblemKind::LpNorm), Just(ProblemKind::Ufl), Just(ProblemKind::Kufl)]
}

fn instance(seed: u64, n: usize, graph: bool, kind: ProblemKind) -> Instance {
    let mode = if graph { RandomMode::RandomGraphClosure } else { RandomMode::EuclideanUnitSquare };
    let mut params = RandomParams::new(kind);
    if kind.needs_k() {
        params.k = Some(2);
    }
    if kind == ProblemKind::LpNorm {
        params.p = Some(1.0 + (seed % 4) as f64 * 0.5);
    }
    gen_random(seed, n, mode, &params).unwrap()
}

fn subset(mask: u32, n: usize) -> Vec<usize> {
    let v: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
    if v.is_empty() { vec![0] } else { v }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_matches_recomputation(seed in 0u64..10_000, graph: bool, kind in kinds(), t in 1usize..=2) {
        let inst = instance(seed, 5, graph, kind);
        let open = if kind.needs_k() { vec![(seed % 5) as usize, ((seed / 5) % 4 + 1 + seed % 5) as usize % 5] } else { subset((seed % 31) as u32 + 1, 5) };
        let mut open = open;
        open.sort_unstable();
        open.dedup();
        let sol = assign(&inst, &open).unwrap();
        let obj = Objective::for_instance(&inst);
        let cfg = SearchConfig::default().with_t(if kind.needs_k() && kind != ProblemKind::Kufl { t } else { 1 });
        for mv in enumerate_moves(&inst, &sol, &cfg) {
            let after = objective::apply_move(&inst, &sol, &mv).unwrap();
            let d = delta_eval(&inst, &sol, &mv).unwrap();
            prop_assert_eq!(d, obj.of(&inst, &after) - obj.of(&inst, &sol));
            prop_assert_eq!(d, mv.delta);
            let conn = |x: f64| match obj { Objective::PowP(p) => x.powf(p), _ => x };
            let naive = naive_cost(&inst, after.open(), conn, kind.needs_opening_costs()) - naive_cost(&inst, sol.open(), conn, kind.needs_opening_costs());
            prop_assert!((d - naive).abs() <= 1e-9 * naive.abs().max(1.0));
        }
    }

    #[test]
    fn adding_facilities_never_raises_connection_cost(seed in 0u64..10_000, graph: bool, a in 1u32..256, b in 1u32..256) {
        let inst = instance(seed, 8, graph, ProblemKind::KMedian);
        let small = subset(a, 8);
        let mut big = small.clone();
        big.extend(subset(b, 8));
        big.sort_unstable();
        big.dedup();
        let s = assign(&inst, &small).unwrap();
        let l = assign(&inst, &big).unwrap();
        for (x, y) in s.per_client_dist().iter().zip(l.per_client_dist()) {
            prop_assert!(y <= x);
        }
        prop_assert!(cost_kcenter(&l) <= cost_kcenter(&s));
        for p in [1.0, 2.0, 3.5] {
            prop_assert!(phi_p(&l, p).phi <= phi_p(&s, p).phi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn norms_bracket_the_max(seed in 0u64..10_000, graph: bool, a in 1u32..1024) {
        let inst = instance(seed, 10, graph, ProblemKind::KMedian);
        let sol = assign(&inst, &subset(a, 10)).unwrap();
        let max = cost_kcenter(&sol);
        let n = inst.clients().len() as f64;
        for p in [1.0, 2.0, 4.0, kcenter_exponent(inst.clients().len())] {
            let phi = phi_p(&sol, p).phi;
            prop_assert!(max <= phi * (1.0 + 1e-12));
            prop_assert!(phi <= n.powf(1.0 / p) * max * (1.0 + 1e-12));
        }
        // at p = ceil(log2 n) the gap is at most a factor 2
        let p = kcenter_exponent(inst.clients().len());
        prop_assert!(phi_p(&sol, p).phi <= 2.0 * max * (1.0 + 1e-12));
        let mut prev = f64::INFINITY;
        for p in [1.0, 1.5, 2.0, 3.0, 6.0] {
            let phi = phi_p(&sol, p).phi;
            prop_assert!(phi <= prev * (1.0 + 1e-12));
            prev = phi;
        }
    }

    #[test]
    fn unconditional_records_hold_for_arbitrary_pairs(seed in 0u64..10_000, graph: bool, kind in kinds(), a in 1u32..256, b in 1u32..256) {
        let inst = instance(seed, 8, graph, kind);
        let pick = |mask: u32| -> Vec<usize> {
            let s = subset(mask, 8);
            match inst.k() {
                Some(k) if kind.needs_k() => s.into_iter().take(k).collect(),
                _ => s,
            }
        };
        let local = assign(&inst, &pick(a)).unwrap();
        let reference = assign(&inst, &pick(b)).unwrap();
        for t in [1, 2] {
            if t == 2 && !matches!(kind, ProblemKind::KMedian | ProblemKind::LpNorm) {
                continue;
            }
            for cert in certify::certify_all(&inst, &local, &reference, t).unwrap() {
                prop_assert!(cert.unconditional_verdict(), "{:?}: {:?}", cert.kind, cert.failures().find(|r| !r.requires_local_opt));
            }
        }
    }
}
