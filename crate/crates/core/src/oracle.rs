//! Exact optima by exhaustive subset enumeration.
//!
//! Subsets are scanned in lexicographic order and a candidate replaces the
//! incumbent only on a strictly smaller cost, so ties resolve to the
//! lexicographically smallest open set.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::metric::Instance;
use crate::objective::{assign_sorted, Objective, Solution};

/// Hard cap on the number of subsets any oracle evaluates.
pub const ENUMERATION_LIMIT: u128 = 2_000_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn guard(subsets: u128) -> Result<()> {
    if subsets > ENUMERATION_LIMIT {
        Err(Error::Guard { subsets, limit: ENUMERATION_LIMIT })
    } else {
        Ok(())
    }
}

fn require_k(inst: &Instance) -> Result<usize> {
    inst.k().ok_or_else(|| Error::input("oracle needs k"))
}

/// Per-client nearest distance to `open`, streamed in client order.
fn evaluate(inst: &Instance, objective: Objective, open: &[usize]) -> f64 {
    let metric = inst.metric();
    let per_client = inst.clients().iter().map(|&j| {
        let row = metric.row(j);
        open.iter().map(|&f| row[f]).fold(f64::INFINITY, f64::min)
    });
    objective.total(inst, open, per_client)
}

fn best_over(inst: &Instance, objective: Objective, sizes: impl Iterator<Item = usize>) -> Solution {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for size in sizes {
        for subset in inst.facilities().iter().copied().combinations(size) {
            let cost = evaluate(inst, objective, &subset);
            let better = match &best {
                None => true,
                Some((c, set)) => cost < *c || (cost == *c && subset < *set),
            };
            if better {
                best = Some((cost, subset));
            }
        }
    }
    let (_, open) = best.expect("at least one subset enumerated");
    assign_sorted(inst, open)
}

/// Optimal `k`-subset under the k-median objective.
pub fn brute_kmedian(inst: &Instance) -> Result<Solution> {
    let k = require_k(inst)?;
    guard(binomial(inst.facilities().len(), k))?;
    Ok(best_over(inst, Objective::KMedian, std::iter::once(k)))
}

/// Optimal `k`-subset under `Φ_p^p`.
pub fn brute_lp(inst: &Instance) -> Result<Solution> {
    let k = require_k(inst)?;
    let p = inst.p().ok_or_else(|| Error::input("oracle needs p"))?;
    guard(binomial(inst.facilities().len(), k))?;
    Ok(best_over(inst, Objective::PowP(p), std::iter::once(k)))
}

/// Optimal non-empty facility set under opening plus connection cost.
pub fn brute_ufl(inst: &Instance) -> Result<Solution> {
    if !inst.has_opening_costs() {
        return Err(Error::input("oracle needs opening costs"));
    }
    let m = inst.facilities().len();
    let subsets = if m >= 127 { u128::MAX } else { (1u128 << m) - 1 };
    guard(subsets)?;
    Ok(best_over(inst, Objective::FacilityPlusConnection, 1..=m))
}

/// Optimal facility set of size at most `k` under opening plus connection cost.
pub fn brute_kufl(inst: &Instance) -> Result<Solution> {
    if !inst.has_opening_costs() {
        return Err(Error::input("oracle needs opening costs"));
    }
    let k = require_k(inst)?;
    let m = inst.facilities().len();
    let subsets = (1..=k).map(|s| binomial(m, s)).fold(0u128, u128::saturating_add);
    guard(subsets)?;
    Ok(best_over(inst, Objective::FacilityPlusConnection, 1..=k))
}

/// Oracle matching the instance's problem kind.
pub fn brute_force(inst: &Instance) -> Result<Solution> {
    use crate::metric::ProblemKind::*;
    match inst.kind() {
        KMedian => brute_kmedian(inst),
        LpNorm => brute_lp(inst),
        Ufl => brute_ufl(inst),
        Kufl => brute_kufl(inst),
    }
}
