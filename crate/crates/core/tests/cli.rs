use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conflink"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
}

fn run(cmd: &mut Command) -> (Output, String) {
    let out = cmd.output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    (out, stdout)
}

fn predict_toy(alpha: &str, seed: &str, output: &Path) -> Output {
    bin()
        .args(["predict"])
        .arg(data("toy_edges.txt"))
        .arg(data("toy_mask.txt"))
        .args([
            "--alpha",
            alpha,
            "--scorer",
            "cn",
            "--seed",
            seed,
            "--no-self-pairs",
            "--output",
        ])
        .arg(output)
        .output()
        .unwrap()
}

#[test]
fn toy_prediction_is_a_deterministic_subset_of_the_test_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let out = predict_toy("0.9", "4", &a);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(
        report.contains("selected:") && report.contains("alpha_used:"),
        "{report}"
    );
    assert!(predict_toy("0.9", "4", &b).status.success());

    let selected = std::fs::read_to_string(&a).unwrap();
    assert_eq!(selected, std::fs::read_to_string(&b).unwrap());
    for line in selected.lines() {
        assert!(line == "1 3" || line == "2 3", "unexpected pair {line}");
    }
}

#[test]
fn tiny_calibration_at_small_alpha_selects_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sel.txt");
    let out = predict_toy("0.01", "0", &out_path);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), "");
}

#[test]
fn predict_reports_parse_errors_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.txt");
    std::fs::write(&edges, "0 1\n1 two\n").unwrap();
    let (out, _) = run(bin().arg("predict").arg(&edges).arg(data("toy_mask.txt")));
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(":2"), "{stderr}");
}

#[test]
fn predict_without_observed_non_edges_explains_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.txt");
    let mask = dir.path().join("mask.txt");
    std::fs::write(&edges, "0 1\n0 2\n").unwrap();
    std::fs::write(&mask, "1 2\n").unwrap();
    let (out, _) = run(bin()
        .arg("predict")
        .arg(&edges)
        .arg(&mask)
        .arg("--no-self-pairs"));
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("calibration"));
}

fn evaluate(selected: &str, truth: &Path) -> (Output, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("selected.txt");
    std::fs::write(&path, selected).unwrap();
    run(bin().arg("evaluate").arg(&path).arg(truth))
}

#[test]
fn evaluate_reports_fdp_and_tdp() {
    let dir = tempfile::tempdir().unwrap();
    let truth = dir.path().join("truth.txt");
    std::fs::write(&truth, "0 1 1\n0 2 1\n1 2 0\n2 3 1\n").unwrap();

    let (out, stdout) = evaluate("", &truth);
    assert!(out.status.success());
    assert!(
        stdout.contains("fdp: 0\n") && stdout.contains("tdp: 0\n"),
        "{stdout}"
    );

    let (_, stdout) = evaluate("0 1\n0 2\n2 3\n", &truth);
    assert!(
        stdout.contains("fdp: 0\n") && stdout.contains("tdp: 1\n"),
        "{stdout}"
    );

    let (_, stdout) = evaluate("1 0\n2 1\n3 2\n", &truth);
    assert!(
        stdout.contains(&format!("fdp: {}\n", 1.0 / 3.0)),
        "{stdout}"
    );

    let (out, _) = evaluate("0 3\n", &truth);
    assert!(!out.status.success());
}

#[test]
fn evaluate_on_the_toy_truth() {
    let (out, stdout) = evaluate("1 3\n", &data("toy_truth.txt"));
    assert!(out.status.success());
    assert!(stdout.contains("tdp: 1\n"), "{stdout}");
}

#[test]
fn missing_config_fails_without_writing_a_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let (out, _) = run(bin()
        .arg("simulate")
        .arg(dir.path().join("absent.cfg"))
        .arg("--output")
        .arg(&csv));
    assert!(!out.status.success());
    assert!(!csv.exists());
}

#[test]
fn simulate_with_one_replication_has_zero_spread() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one.cfg");
    std::fs::write(
        &cfg,
        "experiment.replications = 1\nexperiment.alphas = [0.1, 0.2]\noutput.csv = \"one.csv\"\n",
    )
    .unwrap();
    let (out, stdout) = run(bin().arg("simulate").arg(&cfg));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("one.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("method,alpha,replication,fdp,tdp,n_selected,seed")
    );
    assert_eq!(lines.count(), 3 * 2);
    assert!(csv.ends_with('\n'));
    for row in stdout.lines().skip(1) {
        assert_eq!(row.matches("(0.000)").count(), 2, "{row}");
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.cfg");
    std::fs::write(&cfg, "experiment.replication = 3\n").unwrap();
    let (out, _) = run(bin().arg("simulate").arg(&cfg));
    assert!(!out.status.success());
}

#[test]
fn exported_experiment_round_trips_through_the_commands() {
    use conflink::harness::{replication_experiment, ExperimentConfig};
    let dir = tempfile::tempdir().unwrap();
    let (observed, truth) =
        replication_experiment(&ExperimentConfig::block_model_study(), 3).unwrap();
    let [edges, mask, truth_path] =
        conflink::io::export_experiment(dir.path(), &observed, &truth).unwrap();
    let reloaded = conflink::io::load_observed(
        &edges,
        Some(&mask),
        &conflink::io::LoadOptions {
            n: Some(observed.n()),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(reloaded, observed);

    let sel = dir.path().join("sel.txt");
    let (out, _) = run(bin()
        .arg("predict")
        .arg(&edges)
        .arg(&mask)
        .args(["--nodes", "100", "--alpha", "0.3", "--output"])
        .arg(&sel));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (out, stdout) = run(bin().arg("evaluate").arg(&sel).arg(&truth_path));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains("fdp:"));
}
