use std::fs;
use std::process::{Command, Output};

fn memkick(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memkick"))
        .args(args)
        .env_remove("MEMKICK_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn mlf_exponential() {
    let o = memkick(&["mlf", "--alpha", "1", "--beta", "1", "--z", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - std::f64::consts::E).abs() < 1e-14);
    assert!(stdout(&o).starts_with("2.718281828"));
}

#[test]
fn logistic_fixed_point_csv() {
    let o = memkick(&["simulate", "--map", "logistic", "--lambda", "2", "--z0", "0.5", "--n-steps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,Y\n0,0.5\n1,0.5\n2,0.5\n3,0.5\n");
    let o = memkick(&["simulate", "--map", "logistic", "--lambda", "4", "--z0", "0.75", "--n-steps", "3"]);
    assert_eq!(stdout(&o), "n,Y\n0,0.75\n1,0.75\n2,0.75\n3,0.75\n");
}

#[test]
fn invalid_order_exits_one_and_names_key() {
    let o = memkick(&["simulate", "--map", "burst", "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
}

#[test]
fn unknown_flag_and_subcommand_exit_one() {
    assert_eq!(memkick(&["simulate", "--alpah", "1"]).status.code(), Some(1));
    assert_eq!(memkick(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(memkick(&["--help"]).status.code(), Some(0));
}

#[test]
fn numeric_failure_exits_two() {
    assert_eq!(memkick(&["mlf", "--z", "40"]).status.code(), Some(2));
}

#[test]
fn escape_writes_sentinel_row() {
    let o = memkick(&["simulate", "--map", "logistic", "--lambda", "4", "--z0", "1.5", "--n-steps", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("escaped,"), "{last}");
}

#[test]
fn config_layers_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let env_conf = dir.path().join("env.conf");
    let file_conf = dir.path().join("run.conf");
    fs::write(&env_conf, "map = logistic\nlambda = 2\nz0 = 0.1\nn-steps = 2\n").unwrap();
    fs::write(&file_conf, "# overrides\nlambda = 3\n").unwrap();

    let run = |extra: &[&str]| {
        let mut args = vec!["simulate", "--config", file_conf.to_str().unwrap()];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_memkick"))
            .args(&args)
            .env("MEMKICK_CONFIG", &env_conf)
            .output()
            .unwrap()
    };
    // λ = 3 from the file, z0 and n-steps from the environment file
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(0));
    let y1: f64 = stdout(&o).lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((y1 - 3.0 * 0.1 * 0.9).abs() < 1e-15);
    assert_eq!(stdout(&o).lines().count(), 4);

    let o = run(&["--lambda", "4"]);
    let y1: f64 = stdout(&o).lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((y1 - 4.0 * 0.1 * 0.9).abs() < 1e-15);
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "lamda = 3\n").unwrap();
    let o = memkick(&["simulate", "--config", conf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lamda"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("scan{i}.csv"))).collect();
    for p in &paths {
        let o = memkick(&[
            "bifurcate", "--map", "logistic", "--from", "2.8", "--to", "3.6", "--grid", "40",
            "--transient", "200", "--sample", "8", "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let a = fs::read(&paths[0]).unwrap();
    assert_eq!(a, fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("param,sample_index,value,escaped\n"));
    assert_eq!(text.lines().count(), 1 + 40 * 8);
}

#[test]
fn generalized_and_memory_maps_run() {
    let o = memkick(&["simulate", "--map", "generalized", "--alpha", "1.5", "--g-case", "power", "--n-steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("n,R,R_d1,Y\n"));
    let o = memkick(&["simulate", "--map", "logistic-memory", "--alpha", "0.7", "--lambda", "3", "--n-steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn kernel_and_growth_tables() {
    let o = memkick(&["kernel", "--alpha", "1", "--nmax", "3"]);
    assert_eq!(stdout(&o), "z,value\n1,0\n2,0\n3,0\n");
    let o = memkick(&["solve-growth", "--alpha", "1", "--rate", "0.5", "--y0", "1", "--t", "2"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - std::f64::consts::E).abs() < 1e-12);
}

#[test]
fn period_and_lyapunov() {
    let o = memkick(&["period", "--map", "logistic", "--lambda", "3.2"]);
    assert_eq!(stdout(&o).trim(), "2");
    let o = memkick(&["period", "--map", "logistic", "--lambda", "3.9"]);
    assert_eq!(stdout(&o).trim(), "aperiodic");
    let o = memkick(&["lyapunov", "--map", "logistic", "--lambda", "4", "--n-steps", "100000"]);
    let l: f64 = stdout(&o).trim().parse().unwrap();
    assert!((l - std::f64::consts::LN_2).abs() < 0.02);
}

#[test]
fn verify_passes_and_detects_fault() {
    let o = memkick(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all 10 criteria pass"));
    let o = memkick(&["verify", "--fault", "flip-kernel-sign"]);
    assert_eq!(o.status.code(), Some(2));
}
