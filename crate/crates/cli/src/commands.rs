use std::error::Error as StdError;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use ssal_core::instance::Instance;
use ssal_core::model::{ConvexSetX, ObjectiveKind, ProblemSpec, SemicontinuousSet};
use ssal_core::oracle::{global_solve, MAX_DIM};
use ssal_core::problems::rng::Stream;
use ssal_core::problems::{gen_cs, gen_portfolio, hard_threshold, mse};
use ssal_core::semiproj::project_semicard;
use ssal_core::ssal::{run, SolveReport, SolverParams};

use crate::args::{BenchArgs, CheckArgs, Family, GenArgs, GeneratorArgs, OracleArgs, SolveArgs};
use crate::records::{append_row, write_rows, BenchRow, SolveRow};

pub const EXIT_ERROR: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;
pub const EXIT_CHECK_FAILED: u8 = 3;

type CmdResult = Result<ExitCode, Box<dyn StdError>>;

fn emit(out: Option<&Path>, text: &str) -> Result<(), Box<dyn StdError>> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn default_params(spec: &ProblemSpec) -> SolverParams {
    match spec.objective {
        ObjectiveKind::QuadraticForm { .. } => SolverParams::portfolio(),
        ObjectiveKind::LeastSquares { .. } => SolverParams::compressed_sensing(),
    }
}

fn generate(g: &GeneratorArgs, seed: u64) -> Result<Instance, Box<dyn StdError>> {
    Ok(match g.family {
        Family::Cs => gen_cs(g.p, g.n, g.k, g.sigma2, seed)?.to_instance(),
        Family::Portfolio => gen_portfolio(g.n, g.m, seed, &g.portfolio_params())?.to_instance(),
    })
}

pub fn gen(a: &GenArgs) -> CmdResult {
    let inst = generate(&a.generator, a.generator.seed)?;
    emit(a.out.as_deref(), &inst.to_json_string()?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ParamsEcho {
    rho: f64,
    omega: f64,
    epsilon: f64,
    max_outer: usize,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    instance_id: Option<&'a str>,
    params: ParamsEcho,
    mse: Option<f64>,
    report: &'a SolveReport,
}

fn deliverable_mse(inst: &Instance, report: &SolveReport) -> Result<Option<f64>, Box<dyn StdError>> {
    match &inst.f_true {
        Some(f) => Ok(Some(mse(f, &DVector::from_column_slice(report.deliverable()))?)),
        None => Ok(None),
    }
}

pub fn solve(a: &SolveArgs) -> CmdResult {
    let inst = Instance::load(&a.instance)?;
    let params = a.solver.apply(default_params(&inst.spec));
    let report = run(&inst.spec, &params)?;
    let mse = deliverable_mse(&inst, &report)?;
    let output = SolveOutput {
        instance_id: inst.id.as_deref(),
        params: ParamsEcho {
            rho: params.rho,
            omega: params.omega,
            epsilon: params.epsilon,
            max_outer: params.max_outer,
        },
        mse,
        report: &report,
    };
    emit(a.out.as_deref(), &serde_json::to_string_pretty(&output)?)?;
    let row = SolveRow {
        instance_id: inst.id.clone().unwrap_or_default(),
        n: inst.spec.dim(),
        k: inst.spec.y_set.cardinality(),
        rho: params.rho,
        omega: params.omega,
        epsilon: params.epsilon,
        iterations: report.outer_iterations,
        converged: report.converged,
        objective_x: report.objective_x,
        objective_polished: report.objective_polished,
        primal_residual: report.primal_residual_final,
        stationarity_residual: report.stationarity_residual,
        wall_time_s: report.wall_time,
        mse,
    };
    if let Some(path) = &a.csv {
        append_row(path, &row)?;
    }
    Ok(if report.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_CONVERGED)
    })
}

#[derive(Serialize)]
struct OracleOutput<'a> {
    instance_id: Option<&'a str>,
    support: &'a [usize],
    x_star: Vec<f64>,
    objective: f64,
    supports_examined: usize,
    wall_time: f64,
}

pub fn oracle(a: &OracleArgs) -> CmdResult {
    let inst = Instance::load(&a.instance)?;
    let started = Instant::now();
    let r = global_solve(&inst.spec)?;
    let output = OracleOutput {
        instance_id: inst.id.as_deref(),
        support: &r.support,
        x_star: r.x_star.as_slice().to_vec(),
        objective: r.objective,
        supports_examined: r.supports_examined,
        wall_time: started.elapsed().as_secs_f64(),
    };
    emit(a.out.as_deref(), &serde_json::to_string_pretty(&output)?)?;
    Ok(ExitCode::SUCCESS)
}

/// Closed-form and enumerated projection objectives for one seeded target.
fn projection_pair(n: usize, k: usize, seed: u64) -> Result<(f64, f64), Box<dyn StdError>> {
    let mut stream = Stream::new(seed);
    let w = DVector::from_fn(n, |_, _| stream.normal());
    let spec = ProblemSpec::new(
        ObjectiveKind::LeastSquares {
            a: DMatrix::identity(n, n),
            b_obs: w.clone(),
        },
        ConvexSetX::uniform_box(n, f64::NEG_INFINITY, f64::INFINITY),
        SemicontinuousSet::uniform(n, 0.1, 1.0, k)?,
    )?;
    let (p, _) = project_semicard(&w, &spec.y_set)?;
    let closed = 0.5 * (&p - &w).norm_squared();
    Ok((closed, global_solve(&spec)?.objective))
}

pub fn check(a: &CheckArgs) -> CmdResult {
    if a.n > MAX_DIM {
        return Err(format!("n = {} exceeds the enumeration cap {MAX_DIM}", a.n).into());
    }
    let p = a.p.unwrap_or_else(|| (2 * a.n / 3).max(1));
    let mut mismatches = 0;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(
        out,
        "{:>8} {:>14} {:>14} {:>10} {:>4} {:>14} {:>14} {:>10}",
        "seed", "proj_closed", "proj_oracle", "proj_diff", "ok", "ssal", "oracle", "gap"
    )?;
    for seed in a.seed..a.seed + a.repeat {
        let (mut closed, enumerated) = projection_pair(a.n, a.k, seed)?;
        if a.inject_mismatch {
            closed += 1e-6;
        }
        let diff = (closed - enumerated).abs();
        let ok = diff <= 1e-10;
        mismatches += usize::from(!ok);

        let inst = gen_cs(p, a.n, a.k, a.sigma2, seed)?;
        let params = a.solver.apply(SolverParams::compressed_sensing());
        let report = run(&inst.spec, &params)?;
        let best = global_solve(&inst.spec)?.objective;
        let ours = report.objective_polished.unwrap_or(f64::NAN);
        let gap = (ours - best) / best.abs().max(1e-12);
        writeln!(
            out,
            "{seed:>8} {closed:>14.6e} {enumerated:>14.6e} {diff:>10.2e} {:>4} {ours:>14.6e} {best:>14.6e} {gap:>10.3e}",
            if ok { "yes" } else { "NO" }
        )?;
    }
    writeln!(out, "projection mismatches: {mismatches}/{}", a.repeat)?;
    Ok(if mismatches == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}

fn bench_one(a: &BenchArgs, seed: u64) -> BenchRow {
    let g = &a.generator;
    let (family, p, m) = match g.family {
        Family::Cs => ("cs", Some(g.p), None),
        Family::Portfolio => ("portfolio", None, Some(g.m)),
    };
    let mut row = BenchRow {
        row: "instance",
        family,
        seed: Some(seed),
        n: g.n,
        p,
        m,
        k: g.k,
        ..BenchRow::default()
    };
    let outcome = (|| -> Result<(), Box<dyn StdError>> {
        let inst = generate(g, seed)?;
        let params = a.solver.apply(default_params(&inst.spec));
        let report = run(&inst.spec, &params)?;
        row.iterations = Some(report.outer_iterations);
        row.converged = Some(report.converged);
        row.objective_polished = report.objective_polished;
        row.wall_time_s = Some(report.wall_time);
        if let Some(f) = &inst.f_true {
            row.mse_ssal = deliverable_mse(&inst, &report)?;
            row.mse_baseline = Some(mse(f, &hard_threshold(&inst.spec)?)?);
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row
}

fn mean<I: Iterator<Item = f64>>(values: I) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn summarize(a: &BenchArgs, rows: &[BenchRow]) -> BenchRow {
    let first = &rows[0];
    let iters: Vec<usize> = rows.iter().filter_map(|r| r.iterations).collect();
    let times: Vec<f64> = rows.iter().filter_map(|r| r.wall_time_s).collect();
    let failures = rows
        .iter()
        .filter(|r| r.error.is_some() || r.converged == Some(false))
        .count();
    BenchRow {
        row: "summary",
        family: first.family,
        seed: None,
        n: a.generator.n,
        p: first.p,
        m: first.m,
        k: a.generator.k,
        mse_ssal: mean(rows.iter().filter_map(|r| r.mse_ssal)),
        mse_baseline: mean(rows.iter().filter_map(|r| r.mse_baseline)),
        iterations_min: iters.iter().copied().min(),
        iterations_max: iters.iter().copied().max(),
        iterations_mean: mean(iters.iter().map(|&i| i as f64)),
        wall_time_min: times.iter().copied().reduce(f64::min),
        wall_time_max: times.iter().copied().reduce(f64::max),
        wall_time_mean: mean(times.iter().copied()),
        failures: Some(failures),
        ..BenchRow::default()
    }
}

pub fn bench(a: &BenchArgs) -> CmdResult {
    if a.repeat == 0 {
        return Err("--repeat must be positive".into());
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = a.jobs {
        pool = pool.num_threads(jobs.max(1));
    }
    let pool = pool.build()?;
    let seeds: Vec<u64> = (a.generator.seed..a.generator.seed + a.repeat).collect();
    // Collecting an indexed parallel iterator keeps seed order.
    let mut rows: Vec<BenchRow> = pool.install(|| seeds.par_iter().map(|&s| bench_one(a, s)).collect());
    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    let not_converged = rows.iter().filter(|r| r.converged == Some(false)).count();
    let summary = summarize(a, &rows);
    rows.push(summary);
    match &a.out {
        Some(path) => write_rows(std::fs::File::create(path)?, &rows)?,
        None => write_rows(std::io::stdout().lock(), &rows)?,
    }
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("seed {}: {}", r.seed.unwrap_or_default(), r.error.as_deref().unwrap_or_default());
    }
    Ok(if errors > 0 {
        ExitCode::from(EXIT_ERROR)
    } else if not_converged > 0 {
        ExitCode::from(EXIT_NOT_CONVERGED)
    } else {
        ExitCode::SUCCESS
    })
}
