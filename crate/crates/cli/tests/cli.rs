use std::fs;
use std::process::{Command, Output};

fn stodars(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stodars"))
        .args(args)
        .env_remove("STODARS_SEED")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_happy_path_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let o = stodars(&["solve", "--problem", "ext_rosenbrock_n8_add_normal", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("k,outcome,delta,ell,t,f_true,f_est_incumbent,evals_cumulative"));
    assert!(text.lines().count() > 100);
}

#[test]
fn seed_falls_back_to_environment() {
    let run = |env: Option<&str>, seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_stodars"));
        c.args(["solve", "--problem", "sphere_n4_add_normal"]);
        if let Some(s) = seed {
            c.args(["--seed", s]);
        }
        c.env_remove("STODARS_SEED");
        if let Some(e) = env {
            c.env("STODARS_SEED", e);
        }
        c.output().unwrap().stdout
    };
    assert_eq!(run(Some("5"), None), run(None, Some("5")));
    assert_ne!(run(Some("5"), None), run(None, Some("6")));
}

fn config_exit(text: &str) -> (Option<i32>, String) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("solver.cfg");
    fs::write(&cfg, text).unwrap();
    let o = stodars(&["solve", "--problem", "sphere_n4_add_normal", "--config", cfg.to_str().unwrap()]);
    (o.status.code(), stderr(&o))
}

#[test]
fn gamma_two_is_a_config_error() {
    let (code, msg) = config_exit("solver.gamma = 2\n");
    assert_eq!(code, Some(2));
    assert!(msg.contains("solver.gamma") && msg.contains("gamma > 2"), "{msg}");
}

#[test]
fn tau_above_bound_is_a_config_error() {
    let (code, msg) = config_exit("solver.gamma = 4\nsolver.tau = 0.6\n");
    assert_eq!(code, Some(2));
    assert!(msg.contains("solver.tau"), "{msg}");
}

#[test]
fn runtime_errors_exit_one() {
    let o = stodars(&["solve", "--problem", "no_such_problem"]);
    assert_eq!(o.status.code(), Some(1));
    let o = stodars(&["solve", "--problem", "sphere_n4_add_normal", "--config", "/nonexistent/cfg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dumped_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("in.cfg");
    fs::write(&cfg, "solver.p = n\nsolver.nk_schedule = quartic:0.5:64\nsolver.opportunistic = false\n").unwrap();
    let first = dir.path().join("first.cfg");
    let second = dir.path().join("second.cfg");
    let dump = |from: &std::path::Path, to: &std::path::Path| {
        let o = stodars(&["solve", "--problem", "sphere_n4_add_normal", "--dump-config", "--config", from.to_str().unwrap(), "--out", to.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    };
    dump(&cfg, &first);
    dump(&first, &second);
    let a = fs::read_to_string(&first).unwrap();
    assert_eq!(a, fs::read_to_string(&second).unwrap());
    assert!(a.contains("solver.p = n"));
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.csv");
    let o = stodars(&["verify", "--suite", "sphere", "--trials", "2000", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("checks, 0 failed"));
    assert!(fs::read_to_string(&out).unwrap().starts_with("name,trials,"));
    let o = stodars(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_then_profile() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.cfg");
    fs::write(
        &plan,
        "plan.problems = sphere_n4_add_normal,ext_powell_n4_mul_normal\n\
         plan.seeds = 0..2\n\
         plan.budget_multiplier = 50\n\
         plan.tolerances = 1e-2\n\
         plan.solvers = sto2,sdds\n\
         sto2.p = 2\n\
         sdds.variant = sdds_minimal\n",
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let o = stodars(&["bench", "--plan-file", plan.to_str().unwrap(), "--parallelism", "2", "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out_dir.join("manifest.txt").exists());
    assert_eq!(fs::read_dir(out_dir.join("traces")).unwrap().count(), 8);

    let profile = dir.path().join("profile.csv");
    let o = stodars(&["profile", "--trace-dir", out_dir.to_str().unwrap(), "--tolerance", "0.01", "--out", profile.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&profile).unwrap();
    assert!(text.starts_with("solver,normalized_budget,fraction"));
    assert!(text.contains("sto2,") && text.contains("sdds,"));

    fs::write(&plan, "plan.solvers = a\na.gamma = 1.5\n").unwrap();
    let o = stodars(&["bench", "--plan-file", plan.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("a.gamma"));
}
