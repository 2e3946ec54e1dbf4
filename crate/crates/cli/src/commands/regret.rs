//! Alternating mirror descent on an entropic simplex game, one run per horizon
//! `K` with `η = c·K^(−1/(N+2))`.

use anyhow::Result;
use modham::diagnostics::loglog_fit;
use modham::games::{
    average_iterate_gap, duality_gap, regret_identity_residual, run_amd, total_regret, verify_gap_regret_identity,
    AmdTrajectory, GameInstance, StrategyPair,
};
use modham::{Error, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentKind, GameSection, Loaded};
use crate::report::{num, Report, Table};
use crate::svg::{Plot, Series, Style};
use crate::{AssertionFailed, Context};

const RESIDUAL_TOL: f64 = 1e-9;

struct Setup {
    payoff: Matrix<f64>,
    a0: Vec<f64>,
    b0: Vec<f64>,
}

fn random_simplex(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn setup(cfg: &Loaded, game: &GameSection) -> Result<Setup> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.config.experiment.seed);
    let payoff = match (&game.payoff, game.dim) {
        (Some(rows), None) => {
            let d = rows.len();
            if d == 0 || rows.iter().any(|r| r.len() != d) {
                return Err(cfg.section_error("game", "payoff must be a nonempty square matrix").into());
            }
            Matrix::from_rows(rows)
        }
        (None, Some(d)) if d > 0 => Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)),
        _ => return Err(cfg.section_error("game", "give exactly one of payoff or dim (> 0)").into()),
    };
    let d = payoff.rows();
    let mut start = |given: &Option<Vec<f64>>, name: &str| -> Result<Vec<f64>> {
        match given {
            None => Ok(random_simplex(&mut rng, d)),
            Some(v) => {
                let sum: f64 = v.iter().sum();
                if v.len() != d || v.iter().any(|x| !(*x > 0.0)) || (sum - 1.0).abs() > 1e-12 {
                    Err(cfg.section_error("game", format!("{name} must be a positive probability vector of length {d}")).into())
                } else {
                    Ok(v.clone())
                }
            }
        }
    };
    let a0 = start(&game.a0, "a0")?;
    let b0 = start(&game.b0, "b0")?;
    Ok(Setup { payoff, a0, b0 })
}

struct Outcome {
    k: usize,
    eta: f64,
    traj: AmdTrajectory<f64>,
    regret: f64,
    avg_gap: f64,
    /// Largest relative residual of the energy form of the regret, over near-vertex comparators.
    energy_residual: f64,
    gap_residual: f64,
}

fn vertex(d: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

fn horizon(game: &GameInstance<f64>, start: &StrategyPair<f64>, k: usize, eta: f64) -> modham::Result<Outcome> {
    let traj = run_amd(game, start, eta, k)?;
    let d = game.dim();
    let mut energy_residual = 0.0f64;
    // Vertices have no dual image under negative entropy; mix them slightly toward uniform.
    let inside = |v: Vec<f64>| -> Vec<f64> { v.iter().map(|x| (x + 1e-3) / (1.0 + 1e-3 * d as f64)).collect() };
    for i in 0..d {
        for j in 0..d {
            let cmp = StrategyPair::new(inside(vertex(d, i)), inside(vertex(d, j)));
            energy_residual = energy_residual.max(regret_identity_residual(game, &traj, k, &cmp)?);
        }
    }
    energy_residual = energy_residual.max(regret_identity_residual(game, &traj, k, &StrategyPair::uniform(d))?);
    Ok(Outcome {
        k,
        eta,
        regret: total_regret(game, &traj, k)?,
        avg_gap: average_iterate_gap(game, &traj, k)?,
        gap_residual: verify_gap_regret_identity(game, &traj, k)?,
        energy_residual,
        traj,
    })
}

fn write_trajectory(ctx: &Context, game: &GameInstance<f64>, o: &Outcome) -> Result<()> {
    let d = game.dim();
    let mut header = vec!["step".to_string()];
    for prefix in ["a", "b", "x", "y"] {
        header.extend((1..=d).map(|i| format!("{prefix}_{i}")));
    }
    header.extend(["gap".to_string(), "running_avg_gap".to_string()]);
    let mut table = Table::create(&ctx.path(&format!("trajectory_K{}.csv", o.k)), &header)?;
    let mut sum_a = vec![0.0; d];
    let mut sum_b = vec![0.0; d];
    for (step, (s, z)) in o.traj.pairs.iter().zip(&o.traj.duals).enumerate() {
        for i in 0..d {
            sum_a[i] += s.a[i];
            sum_b[i] += s.b[i];
        }
        let n = (step + 1) as f64;
        let mean = StrategyPair::new(sum_a.iter().map(|x| x / n).collect(), sum_b.iter().map(|x| x / n).collect());
        let mut row = vec![step.to_string()];
        row.extend(s.a.iter().chain(&s.b).chain(&z.x).chain(&z.y).map(|&v| num(v)));
        row.push(num(duality_gap(game, s)?));
        row.push(num(duality_gap(game, &mean)?));
        table.row(row)?;
    }
    table.finish()
}

pub fn run(ctx: &Context) -> Result<()> {
    let cfg = ctx.config()?;
    cfg.expect_kind(ExperimentKind::Regret)?;
    let gs = cfg.game()?;
    if gs.ks.is_empty() || gs.ks.contains(&0) {
        return Err(ConfigError("[game] ks must list positive horizons".into()).into());
    }
    if !(gs.c > 0.0) {
        return Err(cfg.section_error("game", "c must be positive").into());
    }
    let s = setup(cfg, gs)?;
    let game = GameInstance::entropic(s.payoff.clone())?;
    let start = StrategyPair::new(s.a0.clone(), s.b0.clone());
    let mut ks = gs.ks.clone();
    ks.sort_unstable();
    ks.dedup();
    let exponent = -1.0 / (gs.order as f64 + 2.0);

    let outcomes: Vec<Outcome> = ks
        .par_iter()
        .map(|&k| horizon(&game, &start, k, gs.c * (k as f64).powf(exponent)))
        .collect::<modham::Result<_>>()?;

    let mut report = Report::new(&cfg.hash, "regret");
    let seed = cfg.config.experiment.seed.to_string();
    let mut table = Table::create(
        &ctx.path("regret.csv"),
        &["k", "eta", "total_regret", "average_gap", "energy_identity_residual", "gap_identity_residual"],
    )?;
    let mut bad = Vec::new();
    println!("{:>8}  {:>10}  {:>12}  {:>12}  {:>10}  {:>10}", "K", "eta", "R_K", "avg gap", "res energy", "res gap");
    for o in &outcomes {
        table.row([o.k.to_string(), num(o.eta), num(o.regret), num(o.avg_gap), num(o.energy_residual), num(o.gap_residual)])?;
        println!(
            "{:>8}  {:>10.5}  {:>12.5e}  {:>12.5e}  {:>10.2e}  {:>10.2e}",
            o.k, o.eta, o.regret, o.avg_gap, o.energy_residual, o.gap_residual
        );
        let params = [("seed", seed.clone()), ("k", o.k.to_string()), ("eta", num(o.eta))];
        report.push(&params, "total_regret", num(o.regret));
        report.push(&params, "average_gap", num(o.avg_gap));
        report.push(&params, "energy_identity_residual", num(o.energy_residual));
        report.push(&params, "gap_identity_residual", num(o.gap_residual));
        if !(o.energy_residual <= RESIDUAL_TOL && o.gap_residual <= RESIDUAL_TOL) {
            bad.push(format!("K = {}: residuals {:.2e}, {:.2e}", o.k, o.energy_residual, o.gap_residual));
        }
        if gs.write_trajectories {
            write_trajectory(ctx, &game, o)?;
        }
    }
    table.finish()?;

    let xs: Vec<f64> = outcomes.iter().map(|o| o.k as f64).collect();
    let gaps: Vec<f64> = outcomes.iter().map(|o| o.avg_gap).collect();
    let regrets: Vec<f64> = outcomes.iter().map(|o| o.regret.abs()).collect();
    let params = [("seed", seed.clone()), ("order", gs.order.to_string()), ("c", num(gs.c))];
    let mut gap_slope = None;
    for (metric, ys) in [("average_gap", &gaps), ("total_regret", &regrets)] {
        match loglog_fit(&xs, ys) {
            Ok(fit) => {
                report.push(&params, &format!("slope_{metric}"), num(fit.slope));
                println!("log-log slope of {metric} vs K: {:.4}", fit.slope);
                if metric == "average_gap" {
                    gap_slope = Some(fit.slope);
                }
            }
            Err(Error::DegenerateFit(msg)) => {
                report.push(&params, &format!("fit_{metric}"), format!("degenerate: {msg}"));
                eprintln!("{metric}: degenerate fit ({msg})");
            }
            Err(e) => return Err(e.into()),
        }
    }
    report.write(&ctx.path("report.csv"))?;
    Plot::new("average-iterate duality gap", "log K", "log gap", Style::Line)
        .with(Series::new("gap", xs.iter().zip(&gaps).map(|(k, g)| (k.ln(), g.ln())).collect()))
        .write(&ctx.path("regret.svg"))?;

    if let (Some(limit), Some(slope)) = (gs.max_gap_slope, gap_slope) {
        if slope > limit {
            bad.push(format!("average-gap slope {slope:.4} exceeds {limit}"));
        }
    } else if gs.max_gap_slope.is_some() {
        bad.push("average-gap slope could not be fitted".into());
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(AssertionFailed(bad.join("; ")).into())
    }
}
