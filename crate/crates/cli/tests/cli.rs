use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

struct Run {
    out: PathBuf,
    output: Output,
}

impl Run {
    fn code(&self) -> i32 {
        self.output.status.code().expect("exit code")
    }

    fn stdout(&self) -> String {
        String::from_utf8_lossy(&self.output.stdout).into_owned()
    }

    fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.output.stderr).into_owned()
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.out.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
    }

    fn table(&self, name: &str) -> Vec<Vec<String>> {
        let mut r = csv::Reader::from_path(self.out.join(name)).unwrap();
        let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
        rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
        rows
    }

    /// `value` of the report row whose parameters contain `param` and whose metric is `metric`.
    fn metric(&self, param: &str, metric: &str) -> String {
        self.table("report.csv")
            .into_iter()
            .skip(1)
            .find(|r| r[2].split(';').any(|p| p == param) && r[3] == metric)
            .unwrap_or_else(|| panic!("no {metric} row for {param}"))[4]
            .clone()
    }
}

fn modham(dir: &Path, sub: &str, config: Option<&str>, extra: &[&str]) -> Run {
    let out = dir.join(format!("out-{sub}-{}", extra.join("_").replace(['-', '/'], "")));
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_modham"));
    cmd.arg(sub).arg("--out").arg(&out).args(extra);
    if let Some(text) = config {
        let path = dir.join(format!("{sub}.toml"));
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    Run { output: cmd.output().unwrap(), out }
}

fn f(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

fn assert_valid_svg(path: &Path) {
    let text = std::fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert!(!text.contains("href"), "external reference in {}", path.display());
}

fn svgs_valid(dir: &Path) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "svg") {
            assert_valid_svg(&p);
        }
    }
}

const LOGCOSH: &str = r#"
[experiment]
kind = "simulate"

[hamiltonian]
f = "logcosh"
g = "logcosh"
p0 = [1.0]
q0 = [1.0]

[run]
eta = 0.05
steps = 1000
orders = [0, 1, 2, 3]
"#;

#[test]
fn simulate_logcosh_traces() {
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "simulate", Some(LOGCOSH), &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    let mh = run.table("mh_values.csv");
    assert_eq!(mh[0], ["step", "mh_0", "mh_1", "mh_2", "mh_3"]);
    assert_eq!(mh.len(), 1002);
    assert!((f(&mh[1][2]) - 0.85316).abs() <= 1e-4);
    let p2p: Vec<f64> = (0..=3).map(|n| f(&run.metric(&format!("order={n}"), "peak_to_peak"))).collect();
    assert!(p2p.windows(2).all(|w| w[1] < w[0]), "{p2p:?}");
    assert_eq!(run.table("trajectory.csv")[0], ["step", "p_1", "q_1", "energy"]);
    svgs_valid(&run.out);
}

#[test]
fn simulate_quadratic_closed_form_is_flat() {
    let cfg = r#"
[experiment]
kind = "simulate"
[hamiltonian]
f = "quadratic"
g = "quadratic"
f_coeff = 1.0
g_coeff = 1.0
p0 = [1.0]
q0 = [0.0]
[run]
eta = 0.5
steps = 10000
orders = [1]
"#;
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "simulate", Some(cfg), &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert!(f(&run.metric("steps=10000", "closed_form_relative_drift")) <= 1e-9);
    assert_eq!(run.table("mh_values.csv")[0].last().unwrap(), "mh_closed");
}

#[test]
fn simulate_zero_steps_writes_header_only() {
    let cfg = LOGCOSH.replace("steps = 1000", "steps = 0");
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "simulate", Some(&cfg), &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert_eq!(run.read("trajectory.csv"), "step,p_1,q_1,energy\n");
    assert_eq!(run.read("mh_values.csv").lines().count(), 1);
}

#[test]
fn simulate_forward_scheme_in_two_dimensions() {
    let cfg = r#"
[experiment]
kind = "simulate"
[hamiltonian]
f = "quadratic"
g = "logcosh"
f_coeff = 0.5
p0 = [1.0, -0.5]
q0 = [0.2, 0.3]
[run]
scheme = "forward"
eta = 0.01
steps = 50
orders = [0, 2]
"#;
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "simulate", Some(cfg), &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert_eq!(run.table("trajectory.csv")[0], ["step", "p_1", "p_2", "q_1", "q_2", "energy"]);
    assert_eq!(run.table("mh_values.csv")[0], ["step", "mh_0", "mh_2"]);
}

#[test]
fn config_errors_exit_2_with_location() {
    let dir = TempDir::new().unwrap();
    let typo = LOGCOSH.replace("steps = 1000", "stepz = 1000");
    let run = modham(dir.path(), "simulate", Some(&typo), &[]);
    assert_eq!(run.code(), 2);
    assert!(run.stderr().contains("simulate.toml:"), "{}", run.stderr());
    assert!(run.stderr().contains("stepz"), "{}", run.stderr());

    let line = typo.lines().position(|l| l.starts_with("stepz")).unwrap() + 1;
    assert!(run.stderr().contains(&format!("simulate.toml:{line}:")), "{}", run.stderr());

    let wrong_kind = modham(dir.path(), "order-sweep", Some(LOGCOSH), &[]);
    assert_eq!(wrong_kind.code(), 2);

    let missing = modham(dir.path(), "simulate", None, &[]);
    assert_eq!(missing.code(), 2);

    let bad_family = LOGCOSH.replace("f = \"logcosh\"", "f = \"logcosh\"\nf_coeff = 2.0");
    assert_eq!(modham(dir.path(), "simulate", Some(&bad_family), &[]).code(), 2);
}

fn sweep_config(h: &str, etas: &str, orders: &str) -> String {
    format!("[experiment]\nkind = \"order-sweep\"\n{h}\n[run]\netas = {etas}\nsteps = 1000\norders = {orders}\n")
}

const LOGCOSH_H: &str = "[hamiltonian]\nf = \"logcosh\"\ng = \"logcosh\"\np0 = [1.0]\nq0 = [1.0]";

#[test]
fn order_sweep_slopes() {
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "order-sweep", Some(&sweep_config(LOGCOSH_H, "[0.2, 0.1, 0.05, 0.025]", "[0, 1, 2, 3]")), &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    for n in 0..=3 {
        let order = format!("order={n}");
        let per_step = f(&run.metric(&order, "slope_max_step_change"));
        let target = n as f64 + 2.0;
        assert!((per_step - target).abs() <= 0.3, "N = {n}: per-step slope {per_step}");
        let max_dev = f(&run.metric(&order, "slope_max_deviation"));
        assert!((max_dev - (target - 1.0)).abs() <= 0.3, "N = {n}: max-deviation slope {max_dev}");
        assert!(f(&run.metric(&order, "phi_hat")) > 0.0);
    }
    assert_eq!(run.metric("order=2", "phi_bound"), "49/12");
    assert_eq!(run.table("sweep.csv").len(), 1 + 4 * 4);
    svgs_valid(&run.out);
}

#[test]
fn order_sweep_flags_degenerate_fit() {
    let quad = "[hamiltonian]\nf = \"quadratic\"\ng = \"quadratic\"\np0 = [1.0]\nq0 = [0.5]";
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "order-sweep", Some(&sweep_config(quad, "[0.2, 0.1, 0.05]", "[1]")), &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert!(run.metric("order=1", "fit_max_deviation").starts_with("degenerate"));
}

#[test]
fn order_sweep_needs_three_step_sizes() {
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "order-sweep", Some(&sweep_config(LOGCOSH_H, "[0.2, 0.1]", "[0]")), &[]);
    assert_eq!(run.code(), 2);
}

#[test]
fn phi_table() {
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "phi", None, &["--max-order", "3"]);
    assert_eq!(run.code(), 0);
    let exact: Vec<String> = run.table("phi.csv").into_iter().skip(1).map(|r| r[1].clone()).collect();
    assert_eq!(exact, ["1", "3", "49/12", "197/36"]);
    assert!(run.stdout().contains("197/36"));
}

#[test]
fn cancel_verify() {
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "cancel-verify", None, &["--max-order", "5"]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert!(run.table("cancel.csv").iter().skip(1).all(|r| r[1] == "true"));
    assert_eq!(modham(dir.path(), "cancel-verify", None, &["--max-order", "6"]).code(), 2);
    let budget = modham(dir.path(), "cancel-verify", None, &["--max-order", "7", "--best-effort", "--time-budget", "0"]);
    assert_eq!(budget.code(), 1);
    assert!(budget.stdout().contains("partial table"), "{}", budget.stdout());
}

const ANTISYMMETRIC: &str = r#"
[experiment]
kind = "regret"
[game]
payoff = [[0.0, 1.0], [-1.0, 0.0]]
regularizer = "entropy"
a0 = [0.8, 0.2]
b0 = [0.3, 0.7]
ks = [100, 1000, 10000]
order = 1
max_gap_slope = -0.55
"#;

#[test]
fn regret_antisymmetric_game() {
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "regret", Some(ANTISYMMETRIC), &[]);
    assert_eq!(run.code(), 0, "{}{}", run.stdout(), run.stderr());
    let rows = run.table("regret.csv");
    let gaps: Vec<f64> = rows.iter().skip(1).map(|r| f(&r[3])).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    for r in rows.iter().skip(1) {
        assert!(f(&r[4]) <= 1e-9 && f(&r[5]) <= 1e-9, "{r:?}");
    }
    let traj = run.table("trajectory_K100.csv");
    assert_eq!(traj[0], ["step", "a_1", "a_2", "b_1", "b_2", "x_1", "x_2", "y_1", "y_2", "gap", "running_avg_gap"]);
    assert_eq!(traj.len(), 102);
    svgs_valid(&run.out);
}

#[test]
fn regret_slope_assertion_can_fail() {
    let strict = ANTISYMMETRIC.replace("max_gap_slope = -0.55", "max_gap_slope = -5.0");
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "regret", Some(&strict), &[]);
    assert_eq!(run.code(), 1);
    assert!(run.stderr().contains("slope"), "{}", run.stderr());
}

const RANDOM_GAME: &str = r#"
[experiment]
kind = "regret"
seed = 3
[game]
dim = 4
regularizer = "entropy"
ks = [50, 200]
c = 0.5
"#;

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = modham(dir.path(), "regret", Some(RANDOM_GAME), &["--jobs", "1"]);
    let b = modham(dir.path(), "regret", Some(RANDOM_GAME), &["--jobs", "3"]);
    assert_eq!(a.code(), 0, "{}", a.stderr());
    for name in ["regret.csv", "report.csv", "trajectory_K200.csv"] {
        assert_eq!(a.read(name), b.read(name), "{name}");
    }
    let c = modham(dir.path(), "regret", Some(RANDOM_GAME), &["--seed", "4"]);
    assert_eq!(c.code(), 0, "{}", c.stderr());
    assert_ne!(a.read("trajectory_K200.csv"), c.read("trajectory_K200.csv"));
    assert_ne!(a.table("report.csv")[1][0], c.table("report.csv")[1][0]);

    let s1 = modham(dir.path(), "simulate", Some(LOGCOSH), &[]);
    let s2 = modham(dir.path(), "simulate", Some(LOGCOSH), &["--jobs", "2"]);
    assert_eq!(s1.read("mh_values.csv"), s2.read("mh_values.csv"));
    assert_eq!(s1.read("mh_values.svg"), s2.read("mh_values.svg"));
}

#[test]
fn examples_fig_bounded_orbits() {
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "examples-fig", None, &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    let rows = run.table("orbits.csv");
    assert_eq!(rows.len(), 1 + 3 * 4 * 10_001);
    svgs_valid(&run.out);
}

#[test]
fn examples_fig_single_step_and_escape() {
    let cfg = r#"
[experiment]
kind = "examples-fig"
[figure]
exponents = [4.0]
starts = [[1.0, 1.0]]
eta = 1.0
steps = 1
bound = 10.0
"#;
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "examples-fig", Some(cfg), &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert_eq!(run.table("orbits.csv").len(), 3);

    let literal = cfg.replace("bound = 10.0", "bound = 10.0\nnormalized = false").replace("steps = 1\n", "steps = 100\n");
    let escaped = modham(dir.path(), "examples-fig", Some(&literal), &[]);
    assert_eq!(escaped.code(), 1);
}

#[test]
fn quad_mh_table() {
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "quad-mh", None, &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    let rows = run.table("quad_mh.csv");
    assert_eq!(rows[0], ["a", "b", "eta", "lambda_eta2", "t"]);
    assert_eq!(rows.len(), 1 + 3 * 200);
    for r in &rows[1..] {
        let x = f(&r[3]);
        let t = f(&r[4]);
        assert!(x.abs() < 1.0 && t > 0.0);
        assert_eq!(t > 1.0, x > 0.0, "{r:?}");
    }
    svgs_valid(&run.out);
}

#[test]
fn combinatorics_verify() {
    let dir = TempDir::new().unwrap();
    let run = modham(dir.path(), "combinatorics-verify", None, &[]);
    assert_eq!(run.code(), 0, "{}", run.stdout());
    assert!(run.table("combinatorics.csv").iter().skip(1).all(|r| r[1] == "true"));
}
