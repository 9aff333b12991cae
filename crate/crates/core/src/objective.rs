//! Nearest-facility assignment, the four objective functions, and exact
//! incremental move evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Instance, ProblemKind};
use crate::search::Move;

/// An open facility set with its nearest-facility assignment.
///
/// `assignment` and `per_client_dist` are parallel to [`Instance::clients`].
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    open: Vec<usize>,
    assignment: Vec<usize>,
    per_client_dist: Vec<f64>,
}

impl Solution {
    /// Open facilities, ascending.
    pub fn open(&self) -> &[usize] {
        &self.open
    }

    pub fn is_open(&self, f: usize) -> bool {
        self.open.binary_search(&f).is_ok()
    }

    /// Serving facility of each client, by client position.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn per_client_dist(&self) -> &[f64] {
        &self.per_client_dist
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    pub fn report(&self, inst: &Instance) -> SolutionReport {
        SolutionReport {
            open: self.open.clone(),
            cost: natural_cost(inst, self),
            per_client: inst
                .clients()
                .iter()
                .zip(&self.assignment)
                .zip(&self.per_client_dist)
                .map(|((&client, &facility), &dist)| ClientAssignment { client, facility, dist })
                .collect(),
        }
    }
}

/// Nearest-facility assignment; ties go to the smallest facility index.
pub fn assign(inst: &Instance, open: &[usize]) -> Result<Solution> {
    if open.is_empty() {
        return Err(Error::input("open facility set is empty"));
    }
    let mut open = open.to_vec();
    open.sort_unstable();
    if let Some(w) = open.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::input(format!("facility {} listed twice in open set", w[0])));
    }
    if let Some(&f) = open.iter().find(|&&f| !inst.is_facility(f)) {
        return Err(Error::input(format!("point {f} is not a candidate facility")));
    }
    Ok(assign_sorted(inst, open))
}

/// `open` must be sorted, unique, non-empty and made of facilities.
pub(crate) fn assign_sorted(inst: &Instance, open: Vec<usize>) -> Solution {
    let metric = inst.metric();
    let mut assignment = Vec::with_capacity(inst.clients().len());
    let mut per_client_dist = Vec::with_capacity(inst.clients().len());
    for &j in inst.clients() {
        let row = metric.row(j);
        let mut best = open[0];
        let mut best_d = row[best];
        for &f in &open[1..] {
            if row[f] < best_d {
                best = f;
                best_d = row[f];
            }
        }
        assignment.push(best);
        per_client_dist.push(best_d);
    }
    Solution { open, assignment, per_client_dist }
}

/// `Φ_p` together with `Φ_p^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiP {
    pub phi: f64,
    pub phi_pow_p: f64,
}

#[inline]
pub(crate) fn pow_p(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else {
        d.powf(p)
    }
}

pub fn cost_kmedian(sol: &Solution) -> f64 {
    sol.per_client_dist.iter().sum()
}

/// `Φ_p` for an explicit exponent.
pub fn phi_p(sol: &Solution, p: f64) -> PhiP {
    let phi_pow_p: f64 = sol.per_client_dist.iter().map(|&d| pow_p(d, p)).sum();
    PhiP { phi: pow_p(phi_pow_p, 1.0 / p), phi_pow_p }
}

/// `Φ_p` with the instance's exponent.
pub fn cost_phi_p(inst: &Instance, sol: &Solution) -> Result<PhiP> {
    let p = inst.p().ok_or_else(|| Error::input("instance has no exponent p"))?;
    Ok(phi_p(sol, p))
}

/// Largest client distance.
pub fn cost_kcenter(sol: &Solution) -> f64 {
    sol.per_client_dist.iter().copied().fold(0.0, f64::max)
}

/// Exponent for approximating k-center through the ℓp objective:
/// `max(1, ⌈log2 n⌉)`.
pub fn kcenter_exponent(n_clients: usize) -> f64 {
    (n_clients.max(1) as f64).log2().ceil().max(1.0)
}

/// Total opening cost of a facility set.
pub fn facility_cost(inst: &Instance, open: &[usize]) -> f64 {
    open.iter().map(|&f| inst.opening_cost(f)).sum()
}

pub fn cost_ufl(inst: &Instance, sol: &Solution) -> Result<f64> {
    if !inst.has_opening_costs() {
        return Err(Error::input("instance has no opening costs"));
    }
    Ok(facility_cost(inst, &sol.open) + cost_kmedian(sol))
}

pub fn cost_kufl(inst: &Instance, sol: &Solution) -> Result<f64> {
    let k = inst.k().ok_or_else(|| Error::input("k-UFL needs k"))?;
    if sol.open.len() > k {
        return Err(Error::input(format!("{} facilities open, k = {k}", sol.open.len())));
    }
    cost_ufl(inst, sol)
}

/// The value the local search minimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// `Σ_j d(j, F)`.
    KMedian,
    /// `Φ_p^p = Σ_j d(j, F)^p`.
    PowP(f64),
    /// `fac(F) + Σ_j d(j, F)`.
    FacilityPlusConnection,
}

impl Objective {
    pub fn for_instance(inst: &Instance) -> Objective {
        match inst.kind() {
            ProblemKind::KMedian => Objective::KMedian,
            ProblemKind::LpNorm => Objective::PowP(inst.p().expect("lp instances carry p")),
            ProblemKind::Ufl | ProblemKind::Kufl => Objective::FacilityPlusConnection,
        }
    }

    /// Evaluates from per-client distances in client order; every cost in the
    /// crate goes through here so equal inputs give bit-equal totals.
    #[inline]
    pub(crate) fn total(self, inst: &Instance, open: &[usize], per_client: impl Iterator<Item = f64>) -> f64 {
        match self {
            Objective::KMedian => per_client.sum(),
            Objective::PowP(p) => per_client.map(|d| pow_p(d, p)).sum(),
            Objective::FacilityPlusConnection => facility_cost(inst, open) + per_client.sum::<f64>(),
        }
    }

    pub fn of(self, inst: &Instance, sol: &Solution) -> f64 {
        self.total(inst, &sol.open, sol.per_client_dist.iter().copied())
    }

    /// Objective of an arbitrary facility set.
    pub fn of_set(self, inst: &Instance, open: &[usize]) -> Result<f64> {
        Ok(self.of(inst, &assign(inst, open)?))
    }
}

/// Search objective of the instance's problem kind (`Φ_p^p` for ℓp).
pub fn objective(inst: &Instance, sol: &Solution) -> f64 {
    Objective::for_instance(inst).of(inst, sol)
}

/// Reported cost: like [`objective`] except ℓp reports `Φ_p`.
pub fn natural_cost(inst: &Instance, sol: &Solution) -> f64 {
    match inst.kind() {
        ProblemKind::LpNorm => phi_p(sol, inst.p().expect("lp instances carry p")).phi,
        _ => objective(inst, sol),
    }
}

/// `objective(apply(move)) − objective(sol)`, computed by re-examining only
/// clients whose serving facility is removed.
pub fn delta_eval(inst: &Instance, sol: &Solution, mv: &Move) -> Result<f64> {
    mv.check(inst, sol)?;
    Ok(delta_unchecked(inst, sol, mv))
}

/// Facility set after applying `mv`, ascending.
pub(crate) fn moved_open_set(sol: &Solution, mv: &Move) -> Vec<usize> {
    let mut next: Vec<usize> = sol.open.iter().copied().filter(|f| !mv.remove.contains(f)).collect();
    next.extend(mv.add.iter().copied());
    next.sort_unstable();
    next.dedup();
    next
}

pub(crate) fn delta_unchecked(inst: &Instance, sol: &Solution, mv: &Move) -> f64 {
    let objective = Objective::for_instance(inst);
    let before = objective.of(inst, sol);
    let next = moved_open_set(sol, mv);
    let metric = inst.metric();
    let closed_server = |f: usize| mv.remove.contains(&f) && !mv.add.contains(&f);
    let per_client = inst.clients().iter().enumerate().map(|(c, &j)| {
        let row = metric.row(j);
        if closed_server(sol.assignment[c]) {
            next.iter().map(|&f| row[f]).fold(f64::INFINITY, f64::min)
        } else {
            mv.add.iter().map(|&f| row[f]).fold(sol.per_client_dist[c], f64::min)
        }
    });
    objective.total(inst, &next, per_client) - before
}

/// Applies a move, recomputing the assignment from scratch.
pub fn apply_move(inst: &Instance, sol: &Solution, mv: &Move) -> Result<Solution> {
    mv.check(inst, sol)?;
    Ok(assign_sorted(inst, moved_open_set(sol, mv)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientAssignment {
    pub client: usize,
    pub facility: usize,
    pub dist: f64,
}

/// JSON solution report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub open: Vec<usize>,
    pub cost: f64,
    pub per_client: Vec<ClientAssignment>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpace;

    fn line(kind: ProblemKind) -> Instance {
        let m = MetricSpace::from_points(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let b = Instance::builder(m, kind).k(Some(2));
        match kind {
            ProblemKind::LpNorm => b.p(Some(2.0)),
            ProblemKind::Ufl | ProblemKind::Kufl => b.opening_costs(Some(vec![1.0; 4])),
            ProblemKind::KMedian => b,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn colocated_client_gets_distance_zero() {
        let inst = line(ProblemKind::KMedian);
        let sol = assign(&inst, &[2, 0]).unwrap();
        assert_eq!(sol.open(), &[0, 2]);
        assert_eq!(sol.assignment()[2], 2);
        assert_eq!(sol.per_client_dist()[2], 0.0);
    }

    #[test]
    fn ties_go_to_smallest_index() {
        // client at 0, facilities 3 and 5 both at distance 1
        let m = MetricSpace::from_points(&[
            vec![0.0],
            vec![10.0],
            vec![11.0],
            vec![1.0],
            vec![12.0],
            vec![-1.0],
        ])
        .unwrap();
        let inst = Instance::builder(m, ProblemKind::KMedian)
            .clients(vec![0])
            .facilities(vec![3, 5])
            .k(Some(2))
            .build()
            .unwrap();
        let sol = assign(&inst, &[5, 3]).unwrap();
        assert_eq!(sol.assignment(), &[3]);
    }

    #[test]
    fn line_assignment_and_costs() {
        let inst = line(ProblemKind::KMedian);
        let sol = assign(&inst, &[0, 3]).unwrap();
        assert_eq!(sol.assignment(), &[0, 0, 3, 3]);
        assert_eq!(cost_kmedian(&sol), 2.0);
        assert_eq!(cost_kcenter(&sol), 1.0);
        let ufl = line(ProblemKind::Ufl);
        let sol = assign(&ufl, &[0, 3]).unwrap();
        assert_eq!(cost_ufl(&ufl, &sol).unwrap(), 4.0);
    }

    #[test]
    fn all_open_costs_zero() {
        let inst = line(ProblemKind::KMedian);
        let sol = assign(&inst, &[0, 1, 2, 3]).unwrap();
        assert_eq!(cost_kmedian(&sol), 0.0);
        assert_eq!(cost_kcenter(&sol), 0.0);
    }

    #[test]
    fn ufl_single_facility() {
        let m = MetricSpace::from_points(&[vec![0.0], vec![1.0], vec![-2.0]]).unwrap();
        let inst = Instance::builder(m, ProblemKind::Ufl)
            .clients(vec![1, 2])
            .facilities(vec![0])
            .opening_costs(Some(vec![10.0]))
            .build()
            .unwrap();
        let sol = assign(&inst, &[0]).unwrap();
        assert_eq!(cost_ufl(&inst, &sol).unwrap(), 13.0);
    }

    #[test]
    fn zero_opening_costs_match_kmedian() {
        let m = MetricSpace::from_points(&[vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        let inst = Instance::builder(m, ProblemKind::Ufl).opening_costs(Some(vec![0.0; 3])).build().unwrap();
        let sol = assign(&inst, &[0]).unwrap();
        assert_eq!(cost_ufl(&inst, &sol).unwrap(), cost_kmedian(&sol));
    }

    #[test]
    fn missing_opening_costs_is_an_error() {
        let inst = line(ProblemKind::KMedian);
        let sol = assign(&inst, &[0]).unwrap();
        assert!(cost_ufl(&inst, &sol).is_err());
    }

    #[test]
    fn kufl_rejects_too_many_open() {
        let inst = line(ProblemKind::Kufl);
        let sol = assign(&inst, &[0, 1, 2]).unwrap();
        assert!(cost_kufl(&inst, &sol).is_err());
    }

    #[test]
    fn phi_with_p_one_is_kmedian() {
        let inst = line(ProblemKind::KMedian);
        let sol = assign(&inst, &[1]).unwrap();
        let phi = phi_p(&sol, 1.0);
        assert_eq!(phi.phi, cost_kmedian(&sol));
        assert_eq!(phi.phi_pow_p, cost_kmedian(&sol));
    }

    #[test]
    fn empty_open_set_rejected() {
        let inst = line(ProblemKind::KMedian);
        assert!(assign(&inst, &[]).is_err());
        assert!(assign(&inst, &[0, 0]).is_err());
    }

    #[test]
    fn identity_swap_has_zero_delta() {
        let inst = line(ProblemKind::KMedian);
        let sol = assign(&inst, &[0, 3]).unwrap();
        let mv = Move::swap(vec![3], vec![3]);
        assert_eq!(delta_eval(&inst, &sol, &mv).unwrap(), 0.0);
    }

    #[test]
    fn closing_an_idle_facility_saves_its_cost() {
        let m = MetricSpace::from_points(&[vec![0.0], vec![1.0], vec![50.0]]).unwrap();
        let inst = Instance::builder(m, ProblemKind::Ufl)
            .clients(vec![1])
            .facilities(vec![0, 2])
            .opening_costs(Some(vec![1.0, 2.5]))
            .build()
            .unwrap();
        let sol = assign(&inst, &[0, 2]).unwrap();
        assert_eq!(delta_eval(&inst, &sol, &Move::close(2)).unwrap(), -2.5);
    }

    #[test]
    fn illegal_moves_rejected() {
        let inst = line(ProblemKind::KMedian);
        let sol = assign(&inst, &[0, 3]).unwrap();
        assert!(delta_eval(&inst, &sol, &Move::open(1)).is_err());
        assert!(delta_eval(&inst, &sol, &Move::swap(vec![1], vec![2])).is_err());
        assert!(delta_eval(&inst, &sol, &Move::swap(vec![0], vec![3])).is_err());
    }
}
