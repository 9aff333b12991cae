//! Proof objects for local optima and numeric checks of the inequalities they
//! imply.
//!
//! Given a local optimum `F` and a reference solution `F*` (by default the
//! oracle optimum), the builders here construct the nearest-facility map
//! `η: F* → F` and the pairings derived from it, and the checkers evaluate
//! every inequality of the exchange argument on the concrete instance.
//!
//! Each [`Record`] states `lhs <= rhs`. Records come in two flavours:
//!
//! * unconditional ones hold for any pair `(F, F*)` and realize the
//!   per-move upper bounds and structural facts;
//! * local-optimum ones (`requires_local_opt`) follow only when every test
//!   move is non-improving, and end in the approximation-ratio records.
//!
//! Structural facts are encoded as `violations <= 0`.

mod kmedian;
mod kufl;
mod lp;
mod pairing;
mod ufl;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Instance, ProblemKind};
use crate::objective::{assign_sorted, Objective, Solution};
use crate::tolerance;

pub use kmedian::{check_kmed_swap_lemma, check_projection, check_tswap_lemmas};
pub use kufl::{build_kufl_pairing, check_kufl, HeavyStrip, KuflPairing};
pub use lp::{check_lowerbound_inequality, check_lp_inequalities, lowerbound_swap_rhs, LpStructure};
pub use pairing::{build_eta, build_test_pairs, build_tswap_partition, EtaMap, PartitionBlock, TSwapPartition, TestPairs};
pub use ufl::{build_ufl_pairing, check_ufl_lemmas, BadFacility, UflPairing};

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// Whether the inequality depends on `F` being a local optimum.
    #[serde(skip)]
    pub requires_local_opt: bool,
}

impl Record {
    pub fn leq(label: impl Into<String>, lhs: f64, rhs: f64) -> Record {
        Record { label: label.into(), lhs, rhs, pass: tolerance::leq(lhs, rhs), requires_local_opt: false }
    }

    /// Like [`Record::leq`] with an explicit additive tolerance.
    pub fn leq_within(label: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Record {
        Record { label: label.into(), lhs, rhs, pass: lhs <= rhs + tol, requires_local_opt: false }
    }

    pub fn at_local_opt(label: impl Into<String>, lhs: f64, rhs: f64) -> Record {
        Record { requires_local_opt: true, ..Record::leq(label, lhs, rhs) }
    }

    /// A structural fact, recorded as `violations <= 0`.
    pub fn structural(label: impl Into<String>, violations: usize) -> Record {
        Record { label: label.into(), lhs: violations as f64, rhs: 0.0, pass: violations == 0, requires_local_opt: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Eta,
    Projection,
    KmedianSwap,
    KmedianTswap,
    LpNorm,
    Ufl,
    Kufl,
    LowerBound,
}

/// Evaluated records with their conjunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub records: Vec<Record>,
    pub verdict: bool,
}

impl Certificate {
    pub(crate) fn new(kind: CertificateKind) -> Self {
        Certificate { kind, records: Vec::new(), verdict: true }
    }

    pub(crate) fn push(&mut self, record: Record) {
        self.verdict &= record.pass;
        self.records.push(record);
    }

    pub(crate) fn extend(&mut self, records: impl IntoIterator<Item = Record>) {
        for r in records {
            self.push(r);
        }
    }

    /// Conjunction over records that hold for any `(F, F*)`.
    pub fn unconditional_verdict(&self) -> bool {
        self.records.iter().filter(|r| !r.requires_local_opt).all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn record(&self, label_prefix: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.label.starts_with(label_prefix))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

/// Shared view of a `(local, reference)` solution pair on one instance.
pub(crate) struct Analysis<'a> {
    pub inst: &'a Instance,
    pub local: &'a Solution,
    pub reference: &'a Solution,
    served: BTreeMap<usize, Vec<usize>>,
    served_opt: BTreeMap<usize, Vec<usize>>,
}

impl<'a> Analysis<'a> {
    pub fn new(inst: &'a Instance, local: &'a Solution, reference: &'a Solution) -> Result<Self> {
        let nc = inst.clients().len();
        if local.assignment().len() != nc || reference.assignment().len() != nc {
            return Err(Error::input("solutions do not belong to this instance"));
        }
        let mut served: BTreeMap<usize, Vec<usize>> = local.open().iter().map(|&f| (f, Vec::new())).collect();
        let mut served_opt: BTreeMap<usize, Vec<usize>> = reference.open().iter().map(|&f| (f, Vec::new())).collect();
        for c in 0..nc {
            served.get_mut(&local.assignment()[c]).expect("assigned to open facility").push(c);
            served_opt.get_mut(&reference.assignment()[c]).expect("assigned to open facility").push(c);
        }
        Ok(Analysis { inst, local, reference, served, served_opt })
    }

    pub fn n_clients(&self) -> usize {
        self.inst.clients().len()
    }

    /// Point index of client position `c`.
    pub fn point(&self, c: usize) -> usize {
        self.inst.clients()[c]
    }

    /// `A_j`.
    pub fn a(&self, c: usize) -> f64 {
        self.local.per_client_dist()[c]
    }

    /// `O_j`.
    pub fn o(&self, c: usize) -> f64 {
        self.reference.per_client_dist()[c]
    }

    /// `φ(j)`.
    pub fn phi(&self, c: usize) -> usize {
        self.local.assignment()[c]
    }

    /// `φ*(j)`.
    pub fn phi_star(&self, c: usize) -> usize {
        self.reference.assignment()[c]
    }

    /// `N(f)`: client positions served by `f` in the local solution.
    pub fn served(&self, f: usize) -> &[usize] {
        self.served.get(&f).map_or(&[], Vec::as_slice)
    }

    /// `N*(f*)`.
    pub fn served_opt(&self, f: usize) -> &[usize] {
        self.served_opt.get(&f).map_or(&[], Vec::as_slice)
    }

    /// Distance from client position `c` to facility `f`.
    pub fn dist(&self, c: usize, f: usize) -> f64 {
        self.inst.d(self.point(c), f)
    }

    /// `(F \ remove) ∪ add`.
    pub fn exchanged(&self, remove: &[usize], add: &[usize]) -> Vec<usize> {
        let mut next: Vec<usize> = self.local.open().iter().copied().filter(|f| !remove.contains(f)).collect();
        next.extend_from_slice(add);
        next.sort_unstable();
        next.dedup();
        next
    }

    /// `objective(exchanged) − objective(F)`.
    pub fn exchange_delta(&self, objective: Objective, remove: &[usize], add: &[usize]) -> f64 {
        let next = assign_sorted(self.inst, self.exchanged(remove, add));
        objective.of(self.inst, &next) - objective.of(self.inst, self.local)
    }

    pub fn sum_o(&self) -> f64 {
        (0..self.n_clients()).map(|c| self.o(c)).sum()
    }

    pub fn sum_a(&self) -> f64 {
        (0..self.n_clients()).map(|c| self.a(c)).sum()
    }
}

fn pad_to(inst: &Instance, sol: &Solution, target: usize) -> Result<Solution> {
    let mut candidates: Vec<(f64, usize)> = inst
        .facilities()
        .iter()
        .copied()
        .filter(|&f| !sol.is_open(f))
        .map(|f| (sol.open().iter().map(|&g| inst.d(f, g)).fold(f64::INFINITY, f64::min), f))
        .collect();
    let need = target - sol.len();
    if candidates.len() < need {
        return Err(Error::Construction(format!("cannot pad {} facilities up to {target}", sol.len())));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut open = sol.open().to_vec();
    open.extend(candidates.into_iter().take(need).map(|(_, f)| f));
    open.sort_unstable();
    Ok(assign_sorted(inst, open))
}

/// Brings `|F|` and `|F*|` to the same size by opening, in the smaller set,
/// the closed candidates nearest to it (ties to the smaller index).
pub fn equalize_sizes(inst: &Instance, local: &Solution, reference: &Solution) -> Result<(Solution, Solution)> {
    use std::cmp::Ordering::*;
    match local.len().cmp(&reference.len()) {
        Equal => Ok((local.clone(), reference.clone())),
        Less => Ok((pad_to(inst, local, reference.len())?, reference.clone())),
        Greater => Ok((local.clone(), pad_to(inst, reference, local.len())?)),
    }
}

/// Worst-case ratio the local-search analysis guarantees for `kind` at swap
/// size `t` (`p` is read only for ℓp).
pub fn approximation_bound(kind: ProblemKind, p: f64, t: usize) -> f64 {
    match kind {
        ProblemKind::KMedian => 3.0 + 2.0 / t.max(1) as f64,
        ProblemKind::LpNorm => lp::ratio_bound(p, t.max(1)).0,
        ProblemKind::Ufl => 3.0,
        ProblemKind::Kufl => 5.0,
    }
}

/// Every certificate that applies to the instance's problem kind.
///
/// k-median and ℓp get the single-swap family and, for `t >= 2`, the t-swap
/// family as well (a t-swap local optimum is also a single-swap one).
pub fn certify_all(inst: &Instance, local: &Solution, reference: &Solution, t: usize) -> Result<Vec<Certificate>> {
    if t == 0 {
        return Err(Error::input("t must be at least 1"));
    }
    let mut out = Vec::new();
    match inst.kind() {
        ProblemKind::KMedian | ProblemKind::LpNorm => {
            let (local, reference) = equalize_sizes(inst, local, reference)?;
            let eta = build_eta(local.open(), reference.open(), inst.metric());
            out.push(eta.certificate(inst.metric()));
            out.push(check_projection(inst, &local, &reference, &eta)?);
            let pairs = build_test_pairs(&eta)?;
            let partition = if t >= 2 { Some(build_tswap_partition(&eta)?) } else { None };
            if inst.kind() == ProblemKind::KMedian {
                out.push(check_kmed_swap_lemma(inst, &local, &reference, &pairs)?);
                if let Some(part) = &partition {
                    out.push(check_tswap_lemmas(inst, &local, &reference, part, t)?);
                }
            } else {
                let p = inst.p().expect("lp instances carry p");
                out.push(check_lp_inequalities(inst, &local, &reference, LpStructure::Pairs(&pairs), p, 1)?);
                if let Some(part) = &partition {
                    out.push(check_lp_inequalities(inst, &local, &reference, LpStructure::Partition(part), p, t)?);
                }
            }
        }
        ProblemKind::Ufl => {
            let eta = build_eta(local.open(), reference.open(), inst.metric());
            out.push(eta.certificate(inst.metric()));
            out.push(check_projection(inst, local, reference, &eta)?);
            let pairing = build_ufl_pairing(&eta, inst.metric());
            out.push(check_ufl_lemmas(inst, local, reference, &pairing)?);
        }
        ProblemKind::Kufl => {
            let eta = build_eta(local.open(), reference.open(), inst.metric());
            out.push(eta.certificate(inst.metric()));
            out.push(check_projection(inst, local, reference, &eta)?);
            let k = inst.k().expect("k-UFL instances carry k");
            let pairing = if local.len() == k { Some(build_kufl_pairing(&eta, inst.metric())?) } else { None };
            out.push(check_kufl(inst, local, reference, pairing.as_ref())?);
        }
    }
    Ok(out)
}
