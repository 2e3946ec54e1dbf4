use anyhow::Result;
use modham::mh_closed::t_function;

use crate::config::{ExperimentKind, QuadSection};
use crate::report::{num, Report, Table};
use crate::svg::{Plot, Series, Style};
use crate::Context;

/// Largest `|λη²|` sampled; the arcsin branch blows up at 1.
const EDGE: f64 = 0.99;

pub fn run(ctx: &Context) -> Result<()> {
    let quad = match &ctx.config {
        Some(cfg) => {
            cfg.expect_kind(ExperimentKind::QuadMh)?;
            cfg.config.quad.clone().ok_or_else(|| cfg.section_error("quad", "section is required"))?
        }
        None => QuadSection { pairs: vec![[1.0, 1.0], [1.0, -1.0], [2.0, 3.0]], samples: 200 },
    };
    if quad.samples < 2 {
        return Err(crate::config::ConfigError("[quad] samples must be at least 2".into()).into());
    }
    if let Some([a, b]) = quad.pairs.iter().find(|[a, b]| !(a * b != 0.0 && (a * b).is_finite())) {
        return Err(crate::config::ConfigError(format!("[quad] pair ({a}, {b}) needs a nonzero finite product")).into());
    }
    let mut table = Table::create(&ctx.path("quad_mh.csv"), &["a", "b", "eta", "lambda_eta2", "t"])?;
    let mut report = Report::new(&ctx.hash("quad-mh"), "quad-mh");
    let mut plot = Plot::new("T-function along each pair", "lambda eta^2", "T", Style::Line);
    for &[a, b] in &quad.pairs {
        let lambda = a * b;
        let eta_max = (EDGE / lambda.abs()).sqrt();
        let mut series = Vec::with_capacity(quad.samples);
        for i in 1..=quad.samples {
            let eta = eta_max * i as f64 / quad.samples as f64;
            let t = t_function(eta, lambda)?;
            let x = lambda * eta * eta;
            table.row([num(a), num(b), num(eta), num(x), num(t)])?;
            series.push((x, t));
        }
        let params = [("a", num(a)), ("b", num(b))];
        report.push(&params, "eta_max_sampled", num(eta_max));
        report.push(&params, "t_at_eta_max", num(series.last().map_or(f64::NAN, |s| s.1)));
        plot = plot.with(Series::new(format!("a = {a}, b = {b}"), series));
    }
    table.finish()?;
    plot.write(&ctx.path("quad_mh.svg"))?;
    report.write(&ctx.path("report.csv"))?;
    println!("tabulated {} pairs x {} step sizes", quad.pairs.len(), quad.samples);
    Ok(())
}
