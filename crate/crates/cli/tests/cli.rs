use std::process::{Command, Output};

fn ddl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddl")).args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = ddl(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Header and rows of a CSV document after checking its schema comment.
fn parse(csv: &str, command: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with(&format!("# ddl {command} ")), "{comment}");
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

const REGRESSION: &[&str] =
    &["regression", "--n", "120", "--order", "8", "--lambdas", "1,0.01,0.0001", "--trials", "4"];

#[test]
fn reruns_are_byte_identical_for_any_thread_count() {
    let a = stdout_of(REGRESSION);
    let b = stdout_of(REGRESSION);
    let mut threaded = REGRESSION.to_vec();
    threaded.extend(["--threads", "3"]);
    let c = stdout_of(&threaded);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn regression_rows_and_regrets() {
    let (header, rows) = parse(&stdout_of(REGRESSION), "regression");
    assert_eq!(header, ["trial", "method", "chosen_index", "chosen_value", "regret_bits"]);
    // ddl, cv, cv_split and bayes per trial.
    assert_eq!(rows.len(), 4 * 4);
    let regret = column(&header, "regret_bits");
    for r in rows.iter().filter(|r| r[1] != "cv_split") {
        assert!(r[regret].parse::<f64>().unwrap() >= 0.0, "{r:?}");
    }

    let order = ["regression", "--mode", "order", "--orders", "1,3,5", "--n", "80", "--trials", "3"];
    let (header, rows) = parse(&stdout_of(&order), "regression");
    assert_eq!(rows.len(), 3 * 2);
    assert!(rows.iter().all(|r| r[column(&header, "regret_bits")].parse::<f64>().unwrap() >= 0.0));
}

#[test]
fn model_select_has_one_row_per_alpha_plus_mdl() {
    let args = ["model-select", "--step", "0.25", "--trials", "10", "--alphas", "0.7,0.2,0.5"];
    let (header, rows) = parse(&stdout_of(&args), "model-select");
    assert_eq!(header[..4], ["alpha", "n", "method", "worst_regret_bits"]);
    assert_eq!(rows.len(), 4);
    let alphas: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(alphas, ["0", "0.2", "0.5", "0.7"]);
    assert_eq!(rows[0][2], "mdl");
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() >= 0.0));
}

#[test]
fn analysis_and_sweep_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let opt = dir.path().join("opt.csv");
    let args = [
        "analysis-curves",
        "--k",
        "4,10",
        "--n",
        "1000,100000",
        "--points",
        "9",
        "--optimum-out",
        opt.to_str().unwrap(),
    ];
    let (_, rows) = parse(&stdout_of(&args), "analysis-curves");
    assert_eq!(rows.len(), 2 * 2 * 9);
    let (header, rows) = parse(&std::fs::read_to_string(&opt).unwrap(), "analysis-curves");
    assert_eq!(rows.len(), 4);
    let a = column(&header, "stationary_alpha");
    assert!(rows.iter().all(|r| (0.0..1.0).contains(&r[a].parse::<f64>().unwrap())));

    let sweep = ["bernoulli-sweep", "--n", "200", "--trials", "20", "--alphas", "0.25,0.5"];
    let (header, rows) = parse(&stdout_of(&sweep), "bernoulli-sweep");
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[column(&header, "mse_bits2")].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn nn_scores_file_and_config_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("nn.json");
    std::fs::write(&cfg, r#"{"n": 400, "trials": 2, "schedule": {"hidden": 4, "train_epochs": 5}}"#).unwrap();
    let scores = dir.path().join("scores.csv");
    let out = dir.path().join("regret.csv");
    let args = [
        "nn-toy",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "300",
        "--test-size",
        "200",
        "--lambdas",
        "0.1,0.01,0",
        "--scores-out",
        scores.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    let run = ddl(&args);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    // The flag wins over the config value.
    assert!(text.lines().next().unwrap().contains(r#""n":300"#));
    assert!(text.contains(r#""hidden":4"#));
    let (_, rows) = parse(&text, "nn-toy");
    assert_eq!(rows.len(), 2 * 2);
    let (_, rows) = parse(&std::fs::read_to_string(&scores).unwrap(), "nn-toy");
    assert_eq!(rows.len(), 2 * 2 * 3);
}

fn exit_code(args: &[&str]) -> i32 {
    ddl(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let unknown = write("unknown.json", r#"{"bogus": 1}"#);
    assert_eq!(exit_code(&["regression", "--config", &unknown]), 2);
    let not_object = write("list.json", "[1, 2]");
    assert_eq!(exit_code(&["regression", "--config", &not_object]), 2);
    assert_eq!(exit_code(&["regression", "--config", "/nonexistent/ddl.json"]), 2);
    assert_eq!(exit_code(&["bernoulli-sweep", "--alphas", "1.5"]), 2);
    assert_eq!(exit_code(&["regression", "--mode", "order", "--lambdas", "1"]), 2);
    assert_eq!(exit_code(&["model-select", "--threads", "0"]), 2);
    assert_eq!(exit_code(&["no-such-command"]), 2);

    let diverge = write("diverge.json", r#"{"schedule": {"train_lr": 1e12}}"#);
    let args = ["nn-toy", "--config", &diverge, "--n", "100", "--test-size", "10", "--trials", "1", "--lambdas", "0"];
    assert_eq!(exit_code(&args), 3);
}
