//! Best-improvement local search over swap, open and close moves.
//!
//! Neighborhoods by problem kind:
//!
//! | kind          | moves                                                    |
//! |---------------|----------------------------------------------------------|
//! | k-median, ℓp  | swaps of every size `1..=t`                              |
//! | UFL           | open, close (never emptying `F`), single swaps           |
//! | k-UFL         | open only while `|F| < k`, close, single swaps           |
//!
//! Each step applies the move with the most negative delta; ties go to the
//! lexicographically smallest `(remove, add)` pair. The search stops when the
//! best move fails to bring the cost below `(1 − ε)` times the current cost.

use std::cmp::Ordering;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Instance, ProblemKind};
use crate::objective::{self, assign, assign_sorted, delta_unchecked, moved_open_set, Solution};
use crate::tolerance;

/// Neighborhoods at least this large have their deltas evaluated on the
/// rayon pool.
const PARALLEL_MOVES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    SwapSet,
    Open,
    Close,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    /// Facilities closed, ascending.
    pub remove: Vec<usize>,
    /// Facilities opened, ascending.
    pub add: Vec<usize>,
    /// Objective change; zero until evaluated.
    pub delta: f64,
}

impl Move {
    pub fn swap(mut remove: Vec<usize>, mut add: Vec<usize>) -> Move {
        remove.sort_unstable();
        add.sort_unstable();
        Move { kind: MoveKind::SwapSet, remove, add, delta: 0.0 }
    }

    pub fn open(f: usize) -> Move {
        Move { kind: MoveKind::Open, remove: Vec::new(), add: vec![f], delta: 0.0 }
    }

    pub fn close(f: usize) -> Move {
        Move { kind: MoveKind::Close, remove: vec![f], add: Vec::new(), delta: 0.0 }
    }

    fn tie_key(&self) -> (&[usize], &[usize]) {
        (&self.remove, &self.add)
    }

    /// Legality of the move against `sol` under the instance's problem kind.
    ///
    /// A facility listed in both `remove` and `add` is a no-op component and
    /// is accepted, so the identity swap `(f, f)` evaluates to zero.
    pub fn check(&self, inst: &Instance, sol: &Solution) -> Result<()> {
        let illegal = |msg: String| Err(Error::IllegalMove(msg));
        for set in [&self.remove, &self.add] {
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return illegal(format!("facility lists must be strictly ascending: {set:?}"));
            }
        }
        if let Some(f) = self.remove.iter().find(|&&f| !sol.is_open(f)) {
            return illegal(format!("cannot remove {f}: not open"));
        }
        if let Some(f) = self.add.iter().find(|&&f| !inst.is_facility(f)) {
            return illegal(format!("cannot add {f}: not a candidate facility"));
        }
        if let Some(f) = self.add.iter().find(|&&f| sol.is_open(f) && !self.remove.contains(&f)) {
            return illegal(format!("cannot add {f}: already open"));
        }
        let kind = inst.kind();
        let single_swaps_only = matches!(kind, ProblemKind::Ufl | ProblemKind::Kufl);
        match self.kind {
            MoveKind::SwapSet => {
                if self.remove.is_empty() || self.remove.len() != self.add.len() {
                    return illegal(format!(
                        "swap needs |remove| = |add| >= 1, got {} and {}",
                        self.remove.len(),
                        self.add.len()
                    ));
                }
                if single_swaps_only && self.remove.len() != 1 {
                    return illegal(format!("{kind} allows single swaps only"));
                }
            }
            MoveKind::Open => {
                if !single_swaps_only {
                    return illegal(format!("{kind} does not allow open moves"));
                }
                if !self.remove.is_empty() || self.add.len() != 1 {
                    return illegal("open adds exactly one facility".into());
                }
                if kind == ProblemKind::Kufl && sol.len() >= inst.k().unwrap_or(0) {
                    return illegal(format!("k-UFL cannot open with {} of k facilities open", sol.len()));
                }
            }
            MoveKind::Close => {
                if !single_swaps_only {
                    return illegal(format!("{kind} does not allow close moves"));
                }
                if !self.add.is_empty() || self.remove.len() != 1 {
                    return illegal("close removes exactly one facility".into());
                }
                if sol.len() < 2 {
                    return illegal("closing the last open facility".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Largest swap size for k-median and ℓp.
    pub t: usize,
    /// Relative improvement a move must achieve to be applied.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Seed for the random initial solution.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { t: 1, epsilon: 0.0, max_iters: 100_000, seed: 0 }
    }
}

impl SearchConfig {
    pub fn with_t(mut self, t: usize) -> Self {
        self.t = t;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::input("t must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::input(format!("epsilon = {} must lie in [0, 1)", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::input("max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Termination {
    /// No move decreases the cost.
    LocalOpt,
    /// Improving moves exist but none by a factor of `1 − ε`.
    EpsStop,
    IterCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iter: usize,
    #[serde(rename = "move")]
    pub mv: Move,
    /// Search objective after the move.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub initial_cost: f64,
    pub steps: Vec<TraceStep>,
    pub termination: Termination,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    iter: usize,
    remove: &'a [usize],
    add: &'a [usize],
    delta: f64,
    cost: f64,
}

impl SearchTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// One JSON object per applied move:
    /// `{"iter", "remove", "add", "delta", "cost"}`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let line = TraceLine { iter: s.iter, remove: &s.mv.remove, add: &s.mv.add, delta: s.mv.delta, cost: s.cost };
            out.push_str(&serde_json::to_string(&line).expect("trace line serializes"));
            out.push('\n');
        }
        out
    }
}

/// Every legal move of the neighborhood, with its delta filled in.
pub fn enumerate_moves(inst: &Instance, sol: &Solution, cfg: &SearchConfig) -> Vec<Move> {
    let closed: Vec<usize> = inst.facilities().iter().copied().filter(|&f| !sol.is_open(f)).collect();
    let mut moves = Vec::new();
    match inst.kind() {
        ProblemKind::KMedian | ProblemKind::LpNorm => {
            for size in 1..=cfg.t.min(sol.len()).min(closed.len()) {
                for remove in sol.open().iter().copied().combinations(size) {
                    for add in closed.iter().copied().combinations(size) {
                        moves.push(Move::swap(remove.clone(), add));
                    }
                }
            }
        }
        kind @ (ProblemKind::Ufl | ProblemKind::Kufl) => {
            let may_open = kind == ProblemKind::Ufl || sol.len() < inst.k().unwrap_or(0);
            if may_open {
                moves.extend(closed.iter().map(|&f| Move::open(f)));
            }
            if sol.len() >= 2 {
                moves.extend(sol.open().iter().map(|&f| Move::close(f)));
            }
            for &r in sol.open() {
                moves.extend(closed.iter().map(|&f| Move::swap(vec![r], vec![f])));
            }
        }
    }
    if moves.len() >= PARALLEL_MOVES {
        moves.par_iter_mut().for_each(|m| m.delta = delta_unchecked(inst, sol, m));
    } else {
        moves.iter_mut().for_each(|m| m.delta = delta_unchecked(inst, sol, m));
    }
    moves
}

/// Most negative delta, ties to the smallest `(remove, add)`.
fn best_move(moves: Vec<Move>) -> Option<Move> {
    moves.into_iter().min_by(|a, b| match a.delta.total_cmp(&b.delta) {
        Ordering::Equal => a.tie_key().cmp(&b.tie_key()),
        other => other,
    })
}

/// Initial facility set: seeded uniform `k`-subset, or every facility for UFL.
pub fn initial_open_set(inst: &Instance, cfg: &SearchConfig) -> Vec<usize> {
    match inst.kind() {
        ProblemKind::Ufl => inst.facilities().to_vec(),
        _ => {
            let k = inst.k().expect("instance carries k");
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut open: Vec<usize> =
                rand::seq::index::sample(&mut rng, inst.facilities().len(), k).into_iter().map(|i| inst.facilities()[i]).collect();
            open.sort_unstable();
            open
        }
    }
}

fn check_initial(inst: &Instance, open: &[usize]) -> Result<()> {
    if let Some(k) = inst.k().filter(|_| inst.kind().needs_k()) {
        if open.len() > k {
            return Err(Error::input(format!("initial solution opens {} facilities, k = {k}", open.len())));
        }
    }
    Ok(())
}

/// Runs the local search from `initial` (or a seeded start) to termination.
pub fn run_local_search(inst: &Instance, cfg: &SearchConfig, initial: Option<&[usize]>) -> Result<(Solution, SearchTrace)> {
    cfg.validate()?;
    let start = match initial {
        Some(open) => {
            check_initial(inst, open)?;
            assign(inst, open)?
        }
        None => assign(inst, &initial_open_set(inst, cfg))?,
    };
    let initial_cost = objective::objective(inst, &start);
    let mut sol = start;
    let mut cost = initial_cost;
    let mut steps = Vec::new();
    let termination = loop {
        let best = best_move(enumerate_moves(inst, &sol, cfg));
        let Some(best) = best.filter(|m| m.delta < 0.0) else {
            break Termination::LocalOpt;
        };
        if steps.len() == cfg.max_iters {
            break Termination::IterCap;
        }
        let next = assign_sorted(inst, moved_open_set(&sol, &best));
        let next_cost = objective::objective(inst, &next);
        if !(next_cost < (1.0 - cfg.epsilon) * cost) {
            break Termination::EpsStop;
        }
        steps.push(TraceStep { iter: steps.len() + 1, mv: best, cost: next_cost });
        sol = next;
        cost = next_cost;
    };
    Ok((sol, SearchTrace { initial_cost, steps, termination }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalOptimality {
    pub is_local_opt: bool,
    /// The most improving move when the check fails.
    pub witness: Option<Move>,
}

/// True iff no move of the neighborhood improves the cost by more than the
/// comparison slack.
pub fn verify_local_optimum(inst: &Instance, sol: &Solution, cfg: &SearchConfig) -> LocalOptimality {
    let cost = objective::objective(inst, sol);
    let witness = best_move(enumerate_moves(inst, sol, cfg)).filter(|m| tolerance::strictly_less(cost + m.delta, cost));
    LocalOptimality { is_local_opt: witness.is_none(), witness }
}
