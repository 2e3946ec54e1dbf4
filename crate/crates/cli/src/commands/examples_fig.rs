//! Orbit clouds of `H = F(x) + G(y)` with `F = G` a power family, at η = 1.

use anyhow::Result;
use modham::integrators::symplectic_euler_step;
use modham::{PhasePoint, SeparableHamiltonian, SmoothScalarFamily};
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentKind, FigureSection};
use crate::report::{num, Report, Table};
use crate::svg::{Plot, Series, Style};
use crate::{AssertionFailed, Context};

fn defaults() -> FigureSection {
    FigureSection {
        exponents: vec![1.5, 2.0, 4.0],
        starts: vec![[1.0, 1.0], [0.5, 0.0], [0.0, 0.75], [0.25, 0.25]],
        eta: 1.0,
        steps: 10_000,
        bound: 10.0,
        normalized: true,
    }
}

struct Orbit {
    points: Vec<(f64, f64)>,
    /// Step at which the orbit left the box or stopped being finite.
    escaped_at: Option<usize>,
}

fn orbit(h: &SeparableHamiltonian<f64>, start: [f64; 2], eta: f64, steps: usize, bound: f64) -> Orbit {
    let mut points = vec![(start[0], start[1])];
    let inside = |p: f64, q: f64| p.abs() <= bound && q.abs() <= bound;
    if !inside(start[0], start[1]) {
        return Orbit { points, escaped_at: Some(0) };
    }
    let Ok(mut z) = PhasePoint::scalar(start[0], start[1]) else {
        return Orbit { points, escaped_at: Some(0) };
    };
    for k in 1..=steps {
        match symplectic_euler_step(h, &z, eta) {
            Ok(next) if inside(next.p()[0], next.q()[0]) => {
                points.push((next.p()[0], next.q()[0]));
                z = next;
            }
            Ok(next) => {
                points.push((next.p()[0], next.q()[0]));
                return Orbit { points, escaped_at: Some(k) };
            }
            Err(_) => return Orbit { points, escaped_at: Some(k) },
        }
    }
    Orbit { points, escaped_at: None }
}

pub fn run(ctx: &Context) -> Result<()> {
    let fig = match &ctx.config {
        Some(cfg) => {
            cfg.expect_kind(ExperimentKind::ExamplesFig)?;
            cfg.config.figure.clone().unwrap_or_else(defaults)
        }
        None => defaults(),
    };
    if let Some(e) = fig.exponents.iter().find(|e| !(**e > 1.0)) {
        return Err(ConfigError(format!("[figure] exponent must exceed 1, got {e}")).into());
    }
    if !(fig.eta > 0.0 && fig.bound > 0.0) {
        return Err(ConfigError("[figure] eta and bound must be positive".into()).into());
    }
    let hash = ctx.hash("examples-fig");

    let runs: Vec<Vec<Orbit>> = fig
        .exponents
        .par_iter()
        .map(|&e| {
            let fam = || {
                if fig.normalized {
                    SmoothScalarFamily::normalized_power(e)
                } else {
                    SmoothScalarFamily::power(e)
                }
            };
            let h = SeparableHamiltonian::new(fam(), fam(), 1)?;
            Ok(fig.starts.iter().map(|&s| orbit(&h, s, fig.eta, fig.steps, fig.bound)).collect())
        })
        .collect::<modham::Result<_>>()?;

    let mut table = Table::create(&ctx.path("orbits.csv"), &["exponent", "start", "step", "x", "y"])?;
    let mut report = Report::new(&hash, "examples-fig");
    let mut escaped = Vec::new();
    for (&e, orbits) in fig.exponents.iter().zip(&runs) {
        let mut plot = Plot::new(format!("|x|^{e} Hamiltonian, eta = {}", fig.eta), "x", "y", Style::Scatter);
        for (i, (start, o)) in fig.starts.iter().zip(orbits).enumerate() {
            for (k, &(x, y)) in o.points.iter().enumerate() {
                table.row([num(e), i.to_string(), k.to_string(), num(x), num(y)])?;
            }
            let radius = o.points.iter().map(|(x, y)| x.abs().max(y.abs())).fold(0.0, f64::max);
            let params = [("exponent", num(e)), ("start", format!("{} {}", start[0], start[1]))];
            report.push(&params, "max_abs_coordinate", num(radius));
            report.push(&params, "bounded", o.escaped_at.is_none());
            println!(
                "e = {e}, start ({}, {}): {} points, max |coordinate| {radius:.4}{}",
                start[0],
                start[1],
                o.points.len(),
                o.escaped_at.map(|k| format!(", left the box at step {k}")).unwrap_or_default()
            );
            if let Some(k) = o.escaped_at {
                escaped.push(format!("exponent {e} from ({}, {}) at step {k}", start[0], start[1]));
            }
            plot = plot.with(Series::new(format!("({}, {})", start[0], start[1]), o.points.clone()));
        }
        plot.write(&ctx.path(&format!("orbits_e{e}.svg")))?;
    }
    table.finish()?;
    report.write(&ctx.path("report.csv"))?;
    if escaped.is_empty() {
        Ok(())
    } else {
        Err(AssertionFailed(format!("orbits left [-{0}, {0}]^2: {1}", fig.bound, escaped.join("; "))).into())
    }
}
