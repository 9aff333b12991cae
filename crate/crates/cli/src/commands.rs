use std::path::{Path, PathBuf};
use std::time::Instant;

use facloc::certify::{self, Certificate};
use facloc::instances::{gen_random, gen_torus, RandomMode, RandomParams, TorusSpec};
use facloc::objective::{natural_cost, objective};
use facloc::search::{run_local_search, verify_local_optimum, LocalOptimality};
use facloc::{oracle, tolerance, Instance, ProblemKind, SearchConfig, SolutionReport, Termination};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::{digest, digest_all, read_open_set, read_text, to_pretty, write_text};
use crate::{BenchArgs, CertifyArgs, GenArgs, InstanceArgs, OracleArgs, OutputArgs, SearchArgs, SolveArgs};

#[derive(Debug, Serialize)]
struct RunReport<C, R> {
    command: &'static str,
    instance_digest: String,
    config: C,
    results: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

/// Everything needed to re-run a solve, oracle or certify command.
#[derive(Debug, Serialize)]
struct Config {
    input: Option<String>,
    problem: ProblemKind,
    k: Option<usize>,
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    search: Option<SearchConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<String>,
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn emit<C: Serialize, R: Serialize>(out: &OutputArgs, start: Instant, report: RunReport<C, R>) -> CliResult<()> {
    let report = RunReport { wall_ms: out.timing.then(|| elapsed_ms(start)), ..report };
    write_text(out.out.as_deref(), &to_pretty(&report))
}

/// `alg / opt`, with 0/0 read as 1 and x/0 as unbounded.
fn ratio(alg: f64, opt: f64) -> f64 {
    if opt > 0.0 {
        alg / opt
    } else if alg == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn load_instance(a: &InstanceArgs) -> CliResult<Instance> {
    let text = read_text(a.input.as_deref())?;
    let inst = Instance::from_json(&text).map_err(|e| CliError::from(e).context("parsing instance"))?;
    if a.problem.is_none() && a.k.is_none() && a.p.is_none() {
        return Ok(inst);
    }
    let mut b = inst.rebuild();
    if let Some(kind) = a.problem {
        b = b.kind(kind);
    }
    if let Some(k) = a.k {
        b = b.k(Some(k));
    }
    if let Some(p) = a.p {
        b = b.p(Some(p));
    }
    Ok(b.build()?)
}

fn config(a: &InstanceArgs, inst: &Instance) -> Config {
    Config {
        input: a.input.as_ref().map(|p| p.display().to_string()),
        problem: inst.kind(),
        k: inst.k(),
        p: inst.p(),
        search: None,
        initial: None,
        reference: None,
    }
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig { t: self.t, epsilon: self.eps, max_iters: self.max_iters, seed: self.seed }
    }

    /// `None` asks the search for its seeded default start.
    fn initial(&self, inst: &Instance) -> CliResult<Option<Vec<usize>>> {
        Ok(match self.initial.as_str() {
            "random" => None,
            "all" => Some(inst.facilities().to_vec()),
            name => match inst.named_set(name) {
                Some(set) => Some(set.to_vec()),
                None if Path::new(name).is_file() => Some(read_open_set(Path::new(name))?),
                None => return Err(CliError::input(format!("--initial {name:?}: not a named set of the instance nor a file"))),
            },
        })
    }
}

pub fn gen(a: GenArgs) -> CliResult<()> {
    let inst = if a.torus {
        let side = a.side.ok_or_else(|| CliError::usage("--torus needs --N"))?;
        gen_torus(TorusSpec::new(side, a.p.unwrap_or(1.0))?)?.instance
    } else {
        let n = a.n.ok_or_else(|| CliError::usage("random instances need --n"))?;
        let mut params = RandomParams::new(a.problem);
        if a.problem.needs_k() {
            params = params.k(a.k.ok_or_else(|| CliError::usage(format!("--problem {} needs --k", a.problem)))?);
        }
        if a.problem == ProblemKind::LpNorm {
            params = params.p(a.p.ok_or_else(|| CliError::usage("--problem lp needs --p"))?);
        }
        if let Some(r) = &a.cost_range {
            params = params.cost_range(r[0], r[1]);
        }
        gen_random(a.seed, n, RandomMode::from(a.mode), &params)?
    };
    let mut text = inst.to_json_pretty();
    text.push('\n');
    write_text(a.out.as_deref(), &text)
}

#[derive(Debug, Serialize)]
struct SolveResults {
    solution: SolutionReport,
    objective: f64,
    initial_objective: f64,
    termination: Termination,
    iterations: usize,
}

pub fn solve(a: SolveArgs) -> CliResult<()> {
    let start = Instant::now();
    let inst = load_instance(&a.instance)?;
    let cfg = a.search.config();
    let initial = a.search.initial(&inst)?;
    let (sol, trace) = run_local_search(&inst, &cfg, initial.as_deref())?;
    if let Some(path) = &a.search.trace {
        write_text(Some(path), &trace.to_jsonl())?;
    }
    let results = SolveResults {
        solution: sol.report(&inst),
        objective: objective(&inst, &sol),
        initial_objective: trace.initial_cost,
        termination: trace.termination,
        iterations: trace.iterations(),
    };
    let config = Config { search: Some(cfg), initial: Some(a.search.initial.clone()), ..config(&a.instance, &inst) };
    emit(&a.output, start, RunReport { command: "solve", instance_digest: digest(&inst), config, results, wall_ms: None })
}

#[derive(Debug, Serialize)]
struct OracleResults {
    solution: SolutionReport,
    objective: f64,
}

pub fn oracle(a: OracleArgs) -> CliResult<()> {
    let start = Instant::now();
    let inst = load_instance(&a.instance)?;
    let best = oracle::brute_force(&inst)?;
    let results = OracleResults { objective: objective(&inst, &best), solution: best.report(&inst) };
    emit(&a.output, start, RunReport { command: "oracle", instance_digest: digest(&inst), config: config(&a.instance, &inst), results, wall_ms: None })
}

#[derive(Debug, Serialize)]
struct CertifyResults {
    solution: SolutionReport,
    termination: Termination,
    iterations: usize,
    local_opt: LocalOptimality,
    reference_source: String,
    reference: SolutionReport,
    alg_cost: f64,
    opt_cost: f64,
    ratio: Option<f64>,
    bound: f64,
    certificates: Vec<Certificate>,
    verdict: bool,
}

pub fn certify(a: CertifyArgs) -> CliResult<bool> {
    let start = Instant::now();
    let inst = load_instance(&a.instance)?;
    let cfg = a.search.config();
    let initial = a.search.initial(&inst)?;
    let (sol, trace) = run_local_search(&inst, &cfg, initial.as_deref())?;
    if let Some(path) = &a.search.trace {
        write_text(Some(path), &trace.to_jsonl())?;
    }
    let (reference, source) = match &a.reference {
        Some(path) => (facloc::assign(&inst, &read_open_set(path)?)?, path.display().to_string()),
        None => (oracle::brute_force(&inst)?, "oracle".to_string()),
    };
    let certificates = certify::certify_all(&inst, &sol, &reference, cfg.t)?;
    let verdict = certificates.iter().all(|c| c.verdict);
    let local_opt = verify_local_optimum(&inst, &sol, &cfg);
    let (alg_cost, opt_cost) = (natural_cost(&inst, &sol), natural_cost(&inst, &reference));
    let r = ratio(alg_cost, opt_cost);
    let bound = certify::approximation_bound(inst.kind(), inst.p().unwrap_or(1.0), cfg.t);
    eprintln!(
        "{:?}{}; ratio {r} against bound {bound}; {} certificates, {}",
        trace.termination,
        if local_opt.is_local_opt { " (local optimum verified)" } else { " (not a local optimum)" },
        certificates.len(),
        if verdict { "all pass" } else { "FAILED" },
    );
    let results = CertifyResults {
        solution: sol.report(&inst),
        termination: trace.termination,
        iterations: trace.iterations(),
        local_opt,
        reference_source: source,
        reference: reference.report(&inst),
        alg_cost,
        opt_cost,
        ratio: r.is_finite().then_some(r),
        bound,
        certificates,
        verdict,
    };
    let config = Config {
        search: Some(cfg),
        initial: Some(a.search.initial.clone()),
        reference: a.reference.as_ref().map(|p: &PathBuf| p.display().to_string()),
        ..config(&a.instance, &inst)
    };
    emit(&a.output, start, RunReport { command: "certify", instance_digest: digest(&inst), config, results, wall_ms: None })?;
    Ok(verdict)
}

/// One CSV row; the column order is part of the output format.
#[derive(Debug, Serialize)]
struct BenchRow {
    seed: u64,
    n: usize,
    k: Option<usize>,
    p: Option<f64>,
    t: usize,
    alg_cost: f64,
    opt_cost: f64,
    ratio: f64,
    bound: f64,
    iters: usize,
    wall_ms: f64,
}

#[derive(Debug, Serialize)]
struct BenchConfig {
    problem: ProblemKind,
    runs: usize,
    n: usize,
    k: Option<usize>,
    p: Option<f64>,
    mode: RandomMode,
    first_seed: u64,
    search: SearchConfig,
}

#[derive(Debug, Serialize)]
struct BenchResults {
    runs: usize,
    max_ratio: Option<f64>,
    mean_ratio: Option<f64>,
    bound: f64,
    /// Seeds whose ratio exceeded the bound.
    violations: Vec<u64>,
    all_within_bound: bool,
}

pub fn bench(a: BenchArgs) -> CliResult<bool> {
    let start = Instant::now();
    let k = a.problem.needs_k().then(|| a.k.unwrap_or(2));
    let p = (a.problem == ProblemKind::LpNorm).then(|| a.p.unwrap_or(2.0));
    let mode = RandomMode::from(a.mode);
    let mut params = RandomParams::new(a.problem);
    params.k = k;
    params.p = p;
    let base = SearchConfig { t: a.t, epsilon: a.eps, max_iters: a.max_iters, seed: a.seed };
    base.validate()?;
    let bound = certify::approximation_bound(a.problem, p.unwrap_or(1.0), a.t);

    let runs: Vec<(BenchRow, String)> = (0..a.runs as u64)
        .into_par_iter()
        .map(|i| -> CliResult<(BenchRow, String)> {
            let seed = a.seed + i;
            let inst = gen_random(seed, a.n, mode, &params)?;
            let t0 = Instant::now();
            let (sol, trace) = run_local_search(&inst, &base.clone().with_seed(seed), None)?;
            let wall_ms = elapsed_ms(t0);
            let opt = oracle::brute_force(&inst)?;
            let (alg_cost, opt_cost) = (natural_cost(&inst, &sol), natural_cost(&inst, &opt));
            let row = BenchRow { seed, n: a.n, k, p, t: a.t, alg_cost, opt_cost, ratio: ratio(alg_cost, opt_cost), bound, iters: trace.iterations(), wall_ms };
            Ok((row, digest(&inst)))
        })
        .collect::<CliResult<_>>()?;

    let mut out = csv::Writer::from_writer(Vec::new());
    for (row, _) in &runs {
        out.serialize(row)?;
    }
    let bytes = out.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    write_text(a.out.as_deref(), &String::from_utf8(bytes).expect("csv output is utf-8"))?;

    let violations: Vec<u64> = runs.iter().filter(|(r, _)| !tolerance::leq(r.ratio, bound)).map(|(r, _)| r.seed).collect();
    let ratios = runs.iter().map(|(r, _)| r.ratio);
    let max_ratio = ratios.clone().reduce(f64::max);
    let mean_ratio = (!runs.is_empty()).then(|| ratios.sum::<f64>() / runs.len() as f64);
    let ok = violations.is_empty();
    eprintln!("{} runs, max ratio {}, bound {bound}, {} over bound", runs.len(), max_ratio.unwrap_or(f64::NAN), violations.len());
    if let Some(path) = &a.report {
        let results = BenchResults {
            runs: runs.len(),
            max_ratio: max_ratio.filter(|r| r.is_finite()),
            mean_ratio: mean_ratio.filter(|r| r.is_finite()),
            bound,
            violations,
            all_within_bound: ok,
        };
        let config = BenchConfig { problem: a.problem, runs: a.runs, n: a.n, k, p, mode, first_seed: a.seed, search: base };
        let report = RunReport {
            command: "bench",
            instance_digest: digest_all(runs.iter().map(|(_, d)| d.as_str())),
            config,
            results,
            wall_ms: a.timing.then(|| elapsed_ms(start)),
        };
        write_text(Some(path), &to_pretty(&report))?;
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::ratio;

    #[test]
    fn ratio_edge_cases() {
        assert_eq!(ratio(3.0, 1.5), 2.0);
        assert_eq!(ratio(0.0, 0.0), 1.0);
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
    }
}
