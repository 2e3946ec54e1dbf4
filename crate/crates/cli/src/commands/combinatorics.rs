use anyhow::Result;
use modham::combinatorics::{
    backseat_bound, backseat_log_bound, backseat_log_sum, backseat_sum, bernoulli, bernoulli_via_stirling, factorial,
    fubini, lemma1_lhs, lemma1_rhs, quadratic_ipb_bound_check, quartic_alternating_formula, quartic_alternating_ipb,
};
use num_traits::ToPrimitive;

use crate::report::{Report, Table};
use crate::{AssertionFailed, Context};

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let lemma = (1..=10).all(|k| (1..=k).all(|n| lemma1_lhs(k, n) == lemma1_rhs(k, n)));
    out.push(Check { name: "composition identity", passed: lemma, detail: "k <= 10, all n <= k".into() });

    let ln2 = std::f64::consts::LN_2;
    let mut worst = 0.0f64;
    for k in 1..=20usize {
        let lhs = fubini(k - 1).to_f64().unwrap_or(f64::INFINITY);
        let rhs = factorial(k - 1).to_f64().unwrap_or(f64::INFINITY) / ln2.powi(k as i32);
        worst = worst.max(lhs / rhs);
    }
    out.push(Check { name: "Fubini bound", passed: worst < 1.0, detail: format!("k <= 20, worst ratio {worst:.6}") });

    let mut backseat = true;
    for r in [0.5, 2.0, 10.0] {
        for k in 1..=200 {
            backseat &= match backseat_sum(k, r) {
                Ok(s) => s <= backseat_bound(k, r),
                Err(_) => backseat_log_sum(k, r)? <= backseat_log_bound(k, r),
            };
        }
    }
    out.push(Check { name: "backseat bound", passed: backseat, detail: "k <= 200, r in {0.5, 2, 10}".into() });

    let quartic = (1..=4).all(|n| quartic_alternating_ipb(n) == quartic_alternating_formula(n));
    out.push(Check { name: "quartic IPB growth", passed: quartic, detail: "n <= 4, (n+1)(2n)! 4^(2n-1)".into() });

    let bern = (0..=20).filter(|&n| n != 1).all(|n| bernoulli(n) == bernoulli_via_stirling(n));
    out.push(Check { name: "Bernoulli two ways", passed: bern, detail: "n <= 20 (B_1 sign conventions differ)".into() });

    let mut ipb_ok = true;
    let mut ipb_worst = 0.0f64;
    for (a, b) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.25)] {
        let r = quadratic_ipb_bound_check(a, b, 8)?;
        ipb_ok &= r.passed;
        ipb_worst = ipb_worst.max(r.worst_ratio);
    }
    out.push(Check { name: "quadratic IPB bound", passed: ipb_ok, detail: format!("weight <= 8, worst ratio {ipb_worst:.4}") });
    Ok(out)
}

pub fn run(ctx: &Context) -> Result<()> {
    let results = checks()?;
    let mut table = Table::create(&ctx.path("combinatorics.csv"), &["check", "passed", "detail"])?;
    let mut report = Report::new(&ctx.hash("combinatorics-verify"), "combinatorics-verify");
    for c in &results {
        println!("{}  {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        table.row([c.name, if c.passed { "true" } else { "false" }, c.detail.as_str()])?;
        report.push(&[("check", c.name.to_string())], "passed", c.passed);
    }
    table.finish()?;
    report.write(&ctx.path("report.csv"))?;
    let failed: Vec<&str> = results.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(AssertionFailed(format!("failed checks: {}", failed.join(", "))).into())
    }
}
