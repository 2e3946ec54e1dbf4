use anyhow::Result;
use modham::diagnostics::{mh_values_along, trace_stats};
use modham::integrators::run_trajectory;
use modham::mh_closed::quadratic_1d_values;
use modham::{PhasePoint, StepperConfig};

use crate::config::ExperimentKind;
use crate::report::{num, Report, Table};
use crate::svg::{Plot, Series, Style};
use crate::Context;

pub fn run(ctx: &Context) -> Result<()> {
    let cfg = ctx.config()?;
    cfg.expect_kind(ExperimentKind::Simulate)?;
    let (h, p0, q0) = cfg.build_hamiltonian()?;
    let eta = cfg.eta()?;
    let scheme = cfg.scheme()?;
    let run = cfg.run()?;
    let steps = run.steps;
    let mut orders = run.orders.clone();
    orders.sort_unstable();
    orders.dedup();
    let d = p0.len();
    let closed = cfg.quadratic_1d();

    let mut header = vec!["step".to_string()];
    header.extend((1..=d).map(|i| format!("p_{i}")));
    header.extend((1..=d).map(|i| format!("q_{i}")));
    header.push("energy".into());
    let mut mh_header = vec!["step".to_string()];
    mh_header.extend(orders.iter().map(|n| format!("mh_{n}")));
    if closed.is_some() {
        mh_header.push("mh_closed".into());
    }

    let traj_path = ctx.path("trajectory.csv");
    let mh_path = ctx.path("mh_values.csv");
    let mut report = Report::new(&cfg.hash, "simulate");
    if steps == 0 {
        Table::create(&traj_path, &header)?.finish()?;
        if !orders.is_empty() {
            Table::create(&mh_path, &mh_header)?.finish()?;
        }
        report.write(&ctx.path("report.csv"))?;
        println!("K = 0: wrote header-only {}", traj_path.display());
        return Ok(());
    }

    let z0 = PhasePoint::new(p0, q0)?;
    let traj = run_trajectory(&h, &z0, &StepperConfig::new(eta, scheme)?, steps)?;
    let mut table = Table::create(&traj_path, &header)?;
    for (k, (z, e)) in traj.points.iter().zip(&traj.energies).enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(z.p().iter().chain(z.q()).map(|&x| num(x)));
        row.push(num(*e));
        table.row(row)?;
    }
    table.finish()?;
    let portrait: Vec<(f64, f64)> = traj.points.iter().map(|z| (z.p()[0], z.q()[0])).collect();
    Plot::new(format!("{scheme:?} Euler, eta = {eta}"), "p_1", "q_1", Style::Line)
        .with(Series::new("trajectory", portrait))
        .write(&ctx.path("trajectory.svg"))?;

    let base = [("eta", num(eta)), ("steps", steps.to_string())];
    let e0 = traj.energies[0];
    let drift = traj.energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
    report.push(&base, "energy_max_drift", num(drift));
    println!("energy drift max |H(z_k) - H(z_0)| = {drift:e}");

    if let Some(&max_order) = orders.last() {
        let values = mh_values_along(&h, &traj.points, eta, max_order)?;
        let closed_values = match closed {
            Some((a, b)) => Some(quadratic_1d_values(a, b, eta, &traj.points)?),
            None => None,
        };
        let mut table = Table::create(&mh_path, &mh_header)?;
        for k in 0..traj.points.len() {
            let mut row = vec![k.to_string()];
            row.extend(orders.iter().map(|&n| num(values[n][k])));
            if let Some(c) = &closed_values {
                row.push(num(c[k]));
            }
            table.row(row)?;
        }
        table.finish()?;

        let mut plot = Plot::new(format!("truncated modified Hamiltonians, eta = {eta}"), "k", "value", Style::Line);
        for &n in &orders {
            let stats = trace_stats(&values[n]);
            let params = [("eta", num(eta)), ("steps", steps.to_string()), ("order", n.to_string())];
            report.push(&params, "peak_to_peak", num(stats.peak_to_peak));
            report.push(&params, "max_deviation", num(stats.max_deviation));
            report.push(&params, "max_step_change", num(stats.max_step_change));
            println!(
                "N = {n}: H(z_0) = {:.8}  peak-to-peak {:.3e}  max step change {:.3e}",
                values[n][0], stats.peak_to_peak, stats.max_step_change
            );
            plot = plot.with(Series::new(format!("N = {n}"), pts(&values[n])));
        }
        if let Some(c) = &closed_values {
            let stats = trace_stats(c);
            let rel = stats.max_deviation / c[0].abs().max(f64::MIN_POSITIVE);
            report.push(&base, "closed_form_relative_drift", num(rel));
            println!("closed form: relative drift {rel:.3e}");
            plot = plot.with(Series::new("closed form", pts(c)));
        }
        plot.write(&ctx.path("mh_values.svg"))?;
    }
    report.write(&ctx.path("report.csv"))?;
    Ok(())
}

fn pts(v: &[f64]) -> Vec<(f64, f64)> {
    v.iter().enumerate().map(|(k, &y)| (k as f64, y)).collect()
}
