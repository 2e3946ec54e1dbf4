//! Conservation error of `H̃^(N)` against the step size.
//!
//! Two error measures are fitted per order: the largest deviation from the
//! initial value over the run, and the largest single-step change. The first
//! scales like `η^(N+1)` (bounded oscillation), the second like `η^(N+2)`.
//! Errors within a few hundred ulps of `|H̃^(N)(z₀)|` are rounding noise and
//! make the fit degenerate rather than fatal.

use anyhow::Result;
use modham::diagnostics::{loglog_fit_above, mh_traces, trace_stats, TraceStats};
use modham::mh_symbolic::phi_bound;
use modham::{Error, PhasePoint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::config::ExperimentKind;
use crate::report::{num, nums, Report, Table};
use crate::svg::{Plot, Series, Style};
use crate::Context;

const NOISE_ULPS: f64 = 256.0;

pub fn run(ctx: &Context) -> Result<()> {
    let cfg = ctx.config()?;
    cfg.expect_kind(ExperimentKind::OrderSweep)?;
    let (h, p0, q0) = cfg.build_hamiltonian()?;
    let run = cfg.run()?;
    let mut etas = run.etas.clone().ok_or_else(|| cfg.section_error("run", "etas is required"))?;
    if etas.len() < 3 {
        return Err(cfg.section_error("run", format!("etas needs at least 3 values, got {}", etas.len())).into());
    }
    if let Some(bad) = etas.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(cfg.section_error("run", format!("eta must be positive, got {bad}")).into());
    }
    etas.sort_by(|a, b| b.total_cmp(a));
    let mut orders = if run.orders.is_empty() { vec![0, 1, 2, 3] } else { run.orders.clone() };
    orders.sort_unstable();
    orders.dedup();
    let max_order = *orders.last().expect("orders is nonempty");
    let steps = run.steps;
    if steps == 0 {
        return Err(cfg.section_error("run", "steps must be positive").into());
    }
    let z0 = PhasePoint::new(p0, q0)?;

    let runs: Vec<Vec<(TraceStats, f64)>> = etas
        .par_iter()
        .map(|&eta| {
            let tr = mh_traces(&h, &z0, eta, steps, max_order)?;
            Ok(orders.iter().map(|&n| (trace_stats(&tr.values[n]), tr.values[n][0].abs())).collect())
        })
        .collect::<modham::Result<_>>()?;
    let stats: Vec<Vec<TraceStats>> = runs.iter().map(|r| r.iter().map(|x| x.0).collect()).collect();

    let mut report = Report::new(&cfg.hash, "order-sweep");
    let mut table = Table::create(&ctx.path("sweep.csv"), &["eta", "order", "max_deviation", "max_step_change"])?;
    for (i, &eta) in etas.iter().enumerate() {
        for (j, &n) in orders.iter().enumerate() {
            let s = stats[i][j];
            table.row([num(eta), n.to_string(), num(s.max_deviation), num(s.max_step_change)])?;
        }
    }
    table.finish()?;

    let mut plot = Plot::new(format!("conservation error, K = {steps}"), "log eta", "log error", Style::Line);
    println!("{:>3}  {:>10}  {:>10}  {:>12}  {:>12}", "N", "slope max", "slope step", "phi_hat", "phi_bound");
    for (j, &n) in orders.iter().enumerate() {
        let params = [("etas", nums(&etas)), ("steps", steps.to_string()), ("order", n.to_string())];
        let dev: Vec<f64> = stats.iter().map(|s| s[j].max_deviation).collect();
        let step: Vec<f64> = stats.iter().map(|s| s[j].max_step_change).collect();
        let scale = runs.iter().map(|r| r[j].1).fold(1.0, f64::max);
        let floor = NOISE_ULPS * f64::EPSILON * scale;
        let mut cells = Vec::new();
        for (label, ys) in [("max_deviation", &dev), ("max_step_change", &step)] {
            match loglog_fit_above(&etas, ys, floor) {
                Ok(fit) => {
                    report.push(&params, &format!("slope_{label}"), num(fit.slope));
                    report.push(&params, &format!("intercept_{label}"), num(fit.intercept));
                    cells.push(format!("{:10.3}", fit.slope));
                }
                Err(Error::DegenerateFit(msg)) => {
                    report.push(&params, &format!("fit_{label}"), format!("degenerate: {msg}"));
                    eprintln!("N = {n}, {label}: degenerate fit ({msg})");
                    cells.push(format!("{:>10}", "degenerate"));
                }
                Err(e) => return Err(e.into()),
            }
        }
        let phi_hat = etas.iter().zip(&step).map(|(e, s)| s / e.powi(n as i32 + 2)).fold(0.0, f64::max);
        let bound: BigRational = phi_bound(n);
        let bound_f = bound.to_f64().unwrap_or(f64::NAN);
        report.push(&params, "phi_hat", num(phi_hat));
        report.push(&params, "phi_bound", &bound);
        println!("{n:>3}  {}  {}  {phi_hat:12.4e}  {:>12}", cells[0], cells[1], format!("{bound} ({bound_f:.4})"));
        let series: Vec<(f64, f64)> = etas.iter().zip(&step).map(|(e, s)| (e.ln(), s.ln())).collect();
        plot = plot.with(Series::new(format!("N = {n}, per step"), series));
        let series: Vec<(f64, f64)> = etas.iter().zip(&dev).map(|(e, s)| (e.ln(), s.ln())).collect();
        plot = plot.with(Series::new(format!("N = {n}, max"), series));
    }
    plot.write(&ctx.path("sweep.svg"))?;
    report.write(&ctx.path("report.csv"))?;
    Ok(())
}
