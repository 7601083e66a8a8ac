//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use ssal_core::model::{augmented_lagrangian, ConvexSetX, ObjectiveKind, ProblemSpec, SemicontinuousSet};
use ssal_core::oracle::global_solve;
use ssal_core::problems::rng::Stream;
use ssal_core::problems::{baseline_hard_threshold, gen_cs, gen_portfolio, mse, PortfolioParams};
use ssal_core::semiproj::project_semicard;
use ssal_core::ssal::{run_observed, IterateState, SolveReport, SolverParams};
use ssal_core::stationarity::{stationarity_residual, DEFAULT_ZERO_TOL};

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn report(outcomes: &mut Vec<Outcome>, id: u32, pass: bool, detail: String) {
    outcomes.push(Outcome { id, pass, detail });
}

/// Worst violations of the per-iteration contract seen so far.
#[derive(Default)]
struct Contract {
    runs: usize,
    converged: usize,
    iterations: usize,
    multiplier: f64,
    y_step: f64,
    x_step: f64,
    final_gap_excess: f64,
}

impl Contract {
    fn observe(&mut self, spec: &ProblemSpec, params: &SolverParams, prev: &IterateState, cur: &IterateState) {
        let (rho, omega) = (params.rho, params.omega);
        self.iterations += 1;
        let expected = (&cur.y - &cur.x) * (omega * rho);
        let actual = &cur.lambda - &prev.lambda;
        self.multiplier = self.multiplier.max((actual - expected).amax());
        let l = |x: &DVector<f64>, y: &DVector<f64>| augmented_lagrangian(spec, x, y, &prev.lambda, rho);
        self.y_step = self.y_step.max(l(&prev.x, &cur.y) - l(&prev.x, &prev.y));
        self.x_step = self.x_step.max(l(&cur.x, &cur.y) - l(&prev.x, &cur.y));
    }

    fn finish(&mut self, r: &SolveReport, epsilon: f64) {
        self.runs += 1;
        if r.converged {
            self.converged += 1;
            self.final_gap_excess = self.final_gap_excess.max(r.primal_residual_final - epsilon);
        }
    }

    fn pass(&self) -> bool {
        self.multiplier <= 1e-12 && self.y_step <= 1e-12 && self.x_step <= 1e-10 && self.final_gap_excess <= 0.0
    }
}

fn solve_checked(spec: &ProblemSpec, params: &SolverParams, contract: &mut Contract) -> SolveReport {
    let r = run_observed(spec, params, |prev, cur| contract.observe(spec, params, prev, cur)).expect("solver error");
    contract.finish(&r, params.epsilon);
    r
}

fn projection_exactness(outcomes: &mut Vec<Outcome>) {
    let started = Instant::now();
    let mut stream = Stream::new(20_240_601);
    let mut agree = 0;
    let mut worst: f64 = 0.0;
    let total = 1000;
    for _ in 0..total {
        let n = 4 + stream.index(7);
        let k = 1 + stream.index(n - 1);
        let w = DVector::from_fn(n, |_, _| stream.normal());
        let spec = ProblemSpec::new(
            ObjectiveKind::LeastSquares {
                a: DMatrix::identity(n, n),
                b_obs: w.clone(),
            },
            ConvexSetX::uniform_box(n, f64::NEG_INFINITY, f64::INFINITY),
            SemicontinuousSet::uniform(n, 0.1, 1.0, k).unwrap(),
        )
        .unwrap();
        let (p, _) = project_semicard(&w, &spec.y_set).unwrap();
        let closed = 0.5 * (&p - &w).norm_squared();
        let oracle = global_solve(&spec).unwrap().objective;
        let diff = (closed - oracle).abs();
        worst = worst.max(diff);
        if diff <= 1e-10 {
            agree += 1;
        }
    }
    report(
        outcomes,
        1,
        agree == total,
        format!(
            "projection matches enumeration on {agree}/{total}, max |diff| {worst:.2e}, {:.1}s",
            started.elapsed().as_secs_f64()
        ),
    );
}

fn relative_gap(value: f64, best: f64) -> f64 {
    (value - best) / best.abs().max(1e-12)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn small_sensing(outcomes: &mut Vec<Outcome>, contract: &mut Contract) {
    let started = Instant::now();
    let params = SolverParams::compressed_sensing();
    let total = 100;
    let mut beats_baseline = 0;
    let mut gaps = Vec::new();
    let mut worst_polished: f64 = 0.0;
    let mut polished_ok = true;
    let mut worst_oracle: f64 = 0.0;
    let mut oracle_beaten = 0.0f64;
    for seed in 0..total {
        let inst = gen_cs(8, 12, 3, 0.01, seed).unwrap();
        let spec = &inst.spec;
        let r = solve_checked(spec, &params, contract);
        let baseline = spec.objective.value(&baseline_hard_threshold(&inst));
        let ours = r.objective_polished.unwrap_or(f64::INFINITY);
        if ours <= baseline {
            beats_baseline += 1;
        }
        let oracle = global_solve(spec).unwrap();
        gaps.push(relative_gap(ours, oracle.objective));
        oracle_beaten = oracle_beaten.max(oracle.objective - ours);
        if r.converged {
            match r.stationarity_residual {
                Some(res) => worst_polished = worst_polished.max(res),
                None => polished_ok = false,
            }
        }
        let cert = stationarity_residual(spec, &oracle.x_star, DEFAULT_ZERO_TOL).unwrap();
        worst_oracle = worst_oracle.max(cert.residual);
    }
    let med = median(&mut gaps);
    report(
        outcomes,
        3,
        beats_baseline >= 90,
        format!(
            "polished <= baseline on {beats_baseline}/{total} (need 90), median oracle gap {:.2}%, max {:.2}%, oracle margin {oracle_beaten:.1e}, {:.1}s",
            100.0 * med,
            100.0 * gaps.last().copied().unwrap_or(f64::NAN),
            started.elapsed().as_secs_f64()
        ),
    );
    report(
        outcomes,
        4,
        polished_ok && worst_polished <= 1e-4 && worst_oracle <= 1e-6,
        format!("max residual {worst_polished:.2e} at polished points, {worst_oracle:.2e} at oracle optima"),
    );
}

fn portfolio_envelope(outcomes: &mut Vec<Outcome>, contract: &mut Contract) {
    let started = Instant::now();
    let params = SolverParams::portfolio();
    let mut converged = 0;
    let mut counts = Vec::new();
    for seed in 0..10 {
        let inst = gen_portfolio(200, 10, seed, &PortfolioParams::default()).unwrap();
        let r = solve_checked(&inst.spec, &params, contract);
        if r.converged && r.outer_iterations <= 50 {
            converged += 1;
        }
        counts.push(r.outer_iterations);
    }
    let (min, max) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    report(
        outcomes,
        5,
        converged == 10,
        format!(
            "{converged}/10 converged within 50 iterations (min {min}, max {max}, mean {mean:.1}), {:.1}s",
            started.elapsed().as_secs_f64()
        ),
    );
}

fn sensing_recovery(outcomes: &mut Vec<Outcome>) {
    let started = Instant::now();
    let params = SolverParams::compressed_sensing();
    let mut wins = 0;
    let mut ratios = Vec::new();
    for seed in 0..20 {
        let inst = gen_cs(256, 512, 50, 0.01, seed).unwrap();
        let r = ssal_core::ssal::run(&inst.spec, &params).expect("solver error");
        let ours = mse(&inst.f_true, &DVector::from_column_slice(r.deliverable())).unwrap();
        let baseline = mse(&inst.f_true, &baseline_hard_threshold(&inst)).unwrap();
        if ours <= baseline {
            wins += 1;
        }
        ratios.push(ours / baseline);
    }
    let med = median(&mut ratios);
    report(
        outcomes,
        6,
        wins >= 18,
        format!(
            "MSE <= baseline on {wins}/20 (need 18), median MSE ratio {med:.3}, {:.1}s",
            started.elapsed().as_secs_f64()
        ),
    );
}

fn main() -> ExitCode {
    let mut outcomes = Vec::new();
    let mut contract = Contract::default();
    projection_exactness(&mut outcomes);
    small_sensing(&mut outcomes, &mut contract);
    portfolio_envelope(&mut outcomes, &mut contract);
    report(
        &mut outcomes,
        2,
        contract.pass(),
        format!(
            "{} runs ({} converged, {} iterations): multiplier {:.1e}, y-step {:.1e}, x-step {:.1e}, final gap excess {:.1e}",
            contract.runs,
            contract.converged,
            contract.iterations,
            contract.multiplier,
            contract.y_step,
            contract.x_step,
            contract.final_gap_excess.max(0.0)
        ),
    );
    sensing_recovery(&mut outcomes);
    outcomes.sort_by_key(|o| o.id);
    let mut failed = false;
    for o in &outcomes {
        println!("criterion {}: {} - {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed |= !o.pass;
    }
    println!(
        "criterion 7: NOT REPRODUCIBLE - solver timing comparisons against external MIQP and penalty-decomposition codes and real market data are out of scope"
    );
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
