use std::time::{Duration, Instant};

use anyhow::Result;
use modham::mh_symbolic::OmegaEngine;
use modham::Error;
use num_traits::ToPrimitive;

use crate::config::ConfigError;
use crate::report::{Report, Table};
use crate::{AssertionFailed, Context};

/// Highest order checked without `--best-effort`.
const SAFE_ORDER: usize = 5;

pub fn cancel_verify(ctx: &Context, max_order: usize, best_effort: bool, budget_secs: u64) -> Result<()> {
    if max_order > SAFE_ORDER && !best_effort {
        return Err(ConfigError(format!("--max-order {max_order} exceeds {SAFE_ORDER}; pass --best-effort")).into());
    }
    let budget = Duration::from_secs(budget_secs);
    let start = Instant::now();
    let mut engine = OmegaEngine::new();
    let mut table = Table::create(&ctx.path("cancel.csv"), &["order", "diagonal_zero", "seconds"])?;
    let mut report = Report::new(&ctx.hash(&format!("cancel-verify;{max_order}")), "cancel-verify");
    let mut failures = Vec::new();
    let mut exhausted = None;
    println!("{:>5}  {:>8}  {:>9}", "order", "diagonal", "seconds");
    for i in 0..=max_order {
        if start.elapsed() > budget {
            exhausted = Some(i);
            break;
        }
        let zero = engine.diagonal(i).is_zero();
        let secs = start.elapsed().as_secs_f64();
        println!("{i:>5}  {:>8}  {secs:>9.3}", if zero { "0" } else { "NONZERO" });
        table.row([i.to_string(), zero.to_string(), format!("{secs:.3}")])?;
        report.push(&[("order", i.to_string())], "diagonal_zero", zero);
        if !zero {
            failures.push(i);
        }
    }
    table.finish()?;
    report.write(&ctx.path("report.csv"))?;
    if let Some(i) = exhausted {
        let e = Error::ResourceBudgetExceeded(format!("stopped before order {i} after {budget_secs} s"));
        println!("partial table: {e}");
        return Err(AssertionFailed(e.to_string()).into());
    }
    if !failures.is_empty() {
        return Err(AssertionFailed(format!("nonzero diagonals at orders {failures:?}")).into());
    }
    println!("all diagonals up to order {max_order} vanish exactly");
    Ok(())
}

pub fn phi(ctx: &Context, max_order: usize) -> Result<()> {
    let mut engine = OmegaEngine::new();
    let mut table = Table::create(&ctx.path("phi.csv"), &["order", "phi_exact", "phi_float"])?;
    println!("{:>5}  {:>14}  {:>12}", "N", "Phi(N)", "");
    for n in 0..=max_order {
        let phi = engine.phi_bound(n);
        let f = phi.to_f64().unwrap_or(f64::NAN);
        println!("{n:>5}  {:>14}  {f:>12.6}", phi.to_string());
        table.row([n.to_string(), phi.to_string(), format!("{f}")])?;
    }
    table.finish()
}
