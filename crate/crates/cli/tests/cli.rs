use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn linxfer(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linxfer"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = linxfer(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    linxfer(dir, args).status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Rows of a CSV as header-keyed string maps.
fn csv(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            header
                .iter()
                .map(|h| h.to_string())
                .zip(l.split(',').map(String::from))
                .collect()
        })
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn generate_random_ising_reports_label_and_edges() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(
        dir.path(),
        &[
            "generate",
            "random-ising",
            "--n",
            "16",
            "--d",
            "0.6",
            "--seed",
            "7",
            "--out",
            "r.json",
        ],
    );
    assert!(stdout.contains("72 edges"), "{stdout}");
    let inst = json(&dir.path().join("r.json"));
    assert_eq!(inst["edges"].as_array().unwrap().len(), 72);
    assert_eq!(inst["n_qubits"], 16);
}

#[test]
fn generate_maxcut_triangle() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["generate", "maxcut", "--n", "3", "--d", "1.0", "--out", "t.json"],
    );
    let inst = json(&dir.path().join("t.json"));
    assert_eq!(inst["edges"].as_array().unwrap().len(), 3);
    assert_eq!(inst["offset"], -1.5);
}

#[test]
fn generate_sk_uses_scaled_variance() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(dir.path(), &["generate", "sk", "--n", "9", "--variance-scale", "4"]);
    let inst: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(inst["edges"].as_array().unwrap().len(), 36);
    assert!(inst["label"]
        .as_str()
        .unwrap()
        .contains(&format!("variance={}", 4.0 / 9.0)));
}

#[test]
fn generate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = ok(dir.path(), &["generate", "random-ising", "--n", "8", "--seed", "3"]);
    let b = ok(dir.path(), &["generate", "random-ising", "--n", "8", "--seed", "3"]);
    assert_eq!(a, b);
}

#[test]
fn oracle_emits_energy_config_and_method() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["generate", "maxcut", "--n", "3", "--d", "1.0", "--out", "t.json"],
    );
    let out: Value = serde_json::from_str(&ok(dir.path(), &["oracle", "--instance", "t.json"])).unwrap();
    assert_eq!(out["energy"], -2.0);
    assert_eq!(out["method"], "exhaustive");
    assert_eq!(out["config"].as_str().unwrap().len(), 3);
    assert_eq!(out["args"]["sa_seed"], 0);

    ok(
        dir.path(),
        &[
            "oracle",
            "--instance",
            "t.json",
            "--method",
            "annealing",
            "--sa-seed",
            "5",
            "--out",
            "o.json",
        ],
    );
    let sa = json(&dir.path().join("o.json"));
    assert_eq!(sa["energy"], -2.0);
    assert_eq!(sa["method"], "annealing");
    assert_eq!(sa["args"]["sa_seed"], 5);
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(dir.path(), &["bogus"]), 2);
    assert_eq!(
        code(
            dir.path(),
            &["compare", "--kind", "maxcut", "--n", "4", "--strategies", ""]
        ),
        2
    );
    assert_eq!(
        code(dir.path(), &["compare", "--kind", "maxcut", "--n", "4", "--p", "2,2"]),
        2
    );
    assert_eq!(code(dir.path(), &["compare", "--n", "4"]), 2);
    assert_eq!(
        code(
            dir.path(),
            &["transfer", "--kind", "maxcut", "--n", "4", "--normalization", "fixed-x"]
        ),
        2
    );
    assert_eq!(code(dir.path(), &["generate", "random-ising", "-n", "4"]), 2);
    assert_eq!(
        code(dir.path(), &["landscape", "--kind", "maxcut", "--n", "4", "--x", "8"]),
        2
    );
}

#[test]
fn closed_stdout_is_not_an_error() {
    let dir = TempDir::new().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_linxfer"))
        .current_dir(dir.path())
        .args(["generate", "sk", "--n", "12"])
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    drop(child.stdout.take());
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).contains("panicked"));
}

#[test]
fn runtime_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(dir.path(), &["oracle", "--instance", "missing.json"]), 1);
    assert_eq!(code(dir.path(), &["generate", "random-ising", "--n", "1"]), 1);
    fs::write(
        dir.path().join("bad.json"),
        "{\"n_qubits\": 2, \"edges\": [], \"offset\": 0}",
    )
    .unwrap();
    assert_eq!(code(dir.path(), &["oracle", "--instance", "bad.json"]), 1);
}

#[test]
fn compare_linxfer_only_costs_no_evaluations() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["generate", "random-ising", "--n", "8", "--out", "r.json"]);
    ok(
        dir.path(),
        &[
            "compare",
            "--instance",
            "r.json",
            "--strategies",
            "linxfer",
            "--p",
            "8",
            "--out",
            "c",
        ],
    );
    let rows = csv(&dir.path().join("c/compare.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["method"], "linxfer");
    assert_eq!(rows[0]["total_eval_count"], "0");
    assert_eq!(num(&rows[0]["mean_eval_count"]), 0.0);
    assert!(!dir.path().join("c/traces").exists());
}

#[test]
fn compare_totals_match_report_files() {
    let dir = TempDir::new().unwrap();
    let args = [
        "compare",
        "--kind",
        "random-ising",
        "--n",
        "6",
        "--count",
        "3",
        "--p",
        "1,2",
        "--strategies",
        "standard,fourier,linxfer",
        "--budget",
        "60",
        "--out",
        "c",
    ];
    let table = ok(dir.path(), &args);
    assert!(table.starts_with("method,p=1,p=2\nstandard,"), "{table}");
    let rows = csv(&dir.path().join("c/compare.csv"));
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let mut evals = 0;
        let mut ratios = Vec::new();
        for seed in 0..3 {
            let path = dir.path().join(format!(
                "c/reports/random-ising-n6-s{seed}__{}__p{}.json",
                row["method"], row["p"]
            ));
            let file = json(&path);
            assert_eq!(file["instance_seed"], seed);
            assert_eq!(file["args"]["budget"], 60);
            let report = &file["report"];
            let count = report["eval_count"].as_u64().unwrap();
            evals += count;
            ratios.push(report["ratio"].as_f64().unwrap());
            if row["method"] != "linxfer" {
                let p: u64 = row["p"].parse().unwrap();
                assert!(count >= 2 * p);
                let trace = fs::read_to_string(
                    path.to_string_lossy()
                        .replace("reports", "traces")
                        .replace(".json", ".jsonl"),
                )
                .unwrap();
                assert_eq!(trace.lines().count() as u64, count);
                let first: Value = serde_json::from_str(trace.lines().next().unwrap()).unwrap();
                assert!(first["params"].is_array() && first["value"].is_f64());
            }
        }
        assert_eq!(row["total_eval_count"], evals.to_string());
        assert_eq!(row["n_instances"], "3");
        let mean = ratios.iter().sum::<f64>() / 3.0;
        assert!((num(&row["mean_ratio"]) - mean).abs() < 1e-12);
    }
    let config = json(&dir.path().join("c/config.json"));
    assert_eq!(config["instances"].as_array().unwrap().len(), 3);
    assert_eq!(config["instances"][2]["instance_seed"], 2);
}

#[test]
fn compare_is_independent_of_worker_count() {
    let dir = TempDir::new().unwrap();
    let base = [
        "compare",
        "--kind",
        "maxcut",
        "--n",
        "6",
        "--count",
        "3",
        "--p",
        "2",
        "--strategies",
        "standard,interp",
        "--budget",
        "40",
    ];
    let mut one = base.to_vec();
    one.extend(["--workers", "1", "--out", "w1"]);
    let mut two = base.to_vec();
    two.extend(["--workers", "2", "--out", "w2"]);
    ok(dir.path(), &one);
    ok(dir.path(), &two);
    let dir_path = |d: &str| dir.path().join(d).join("compare.csv");
    let strip = |d: &str| -> Vec<Vec<String>> {
        csv(&dir_path(d))
            .into_iter()
            .map(|r| {
                ["method", "p", "mean_ratio", "std_ratio", "total_eval_count"]
                    .iter()
                    .map(|k| r[*k].clone())
                    .collect()
            })
            .collect()
    };
    assert_eq!(strip("w1"), strip("w2"));
    assert_eq!(
        fs::read_to_string(dir.path().join("w1/table.csv")).unwrap(),
        fs::read_to_string(dir.path().join("w2/table.csv")).unwrap()
    );
}

#[test]
fn transfer_writes_both_variants_with_denormalized_energies() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "transfer",
            "--kind",
            "random-ising",
            "--n",
            "10",
            "--count",
            "2",
            "--params",
            "rough-guess",
            "--shots",
            "200",
            "--sample-seed",
            "4",
            "--out",
            "t",
        ],
    );
    let rows = csv(&dir.path().join("t/transfer.csv"));
    assert_eq!(rows.len(), 4);
    for pair in rows.chunks(2) {
        let (plain, normed) = (&pair[0], &pair[1]);
        assert_eq!(plain["variant"], "unnormalized");
        assert_eq!(normed["variant"], "normalized");
        assert!(num(&normed["expectation"]) < num(&plain["expectation"]));
        assert!(num(&normed["factor"]) > 1.0);

        let samples = fs::read_to_string(
            dir.path()
                .join(format!("t/samples/{}__normalized.csv", normed["target"])),
        )
        .unwrap();
        let mut lines = samples.lines();
        assert_eq!(lines.next(), Some("bitstring,count,energy"));
        let mut shots = 0;
        let mut total = 0.0;
        for l in lines {
            let f: Vec<&str> = l.split(',').collect();
            let count: u64 = f[1].parse().unwrap();
            shots += count;
            total += count as f64 * num(f[2]);
            assert!(num(f[2]) >= num(&normed["e_ref"]));
        }
        assert_eq!(shots, 200);
        assert!((total / 200.0 - num(&normed["sample_mean"])).abs() < 1e-9);
    }
    let meta = json(&dir.path().join("t/transfer.json"));
    assert_eq!(meta["args"]["sample_seed"], 4);
    assert_eq!(meta["params"]["gamma_slope"], -1.0);
}

#[test]
fn transfer_with_zero_shots_is_exact_only() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "transfer",
            "--kind",
            "random-ising",
            "--n",
            "8",
            "--shots",
            "0",
            "--out",
            "t",
        ],
    );
    let rows = csv(&dir.path().join("t/transfer.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows
        .iter()
        .all(|r| r["sample_mean"].is_empty() && !r["expectation"].is_empty()));
    assert!(!dir.path().join("t/samples").exists());
}

#[test]
fn landscape_degenerate_grid_is_one_row() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "landscape",
            "--kind",
            "random-ising",
            "--n",
            "6",
            "--resolution",
            "1",
            "--slope-range=-0.5,-0.5",
            "--intcp-range",
            "0.3,0.3",
            "--p",
            "2",
            "--out",
            "l",
        ],
    );
    let rows = csv(&dir.path().join("l/gamma.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["slope"], "-0.5");
    assert_eq!(rows[0]["intcp"], "0.3");
    let meta = json(&dir.path().join("l/gamma.json"));
    assert_eq!(meta["grid"]["plane"], "gamma_plane");
    assert_eq!(meta["grid"]["p"], 2);
    assert_eq!(meta["args"]["resolution"], 1);
}

#[test]
fn landscape_both_planes_writes_two_grids() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &[
            "landscape",
            "--kind",
            "maxcut",
            "--n",
            "9",
            "--plane",
            "both",
            "--resolution",
            "5",
            "--p",
            "2",
            "--out",
            "l",
        ],
    );
    for plane in ["gamma", "beta"] {
        assert_eq!(csv(&dir.path().join(format!("l/{plane}.csv"))).len(), 25);
        assert!(json(&dir.path().join(format!("l/{plane}.json")))["grid"]["fixed_other"].is_array());
    }
}

#[test]
fn landscape_scaling_norms_do_not_grow() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(
        dir.path(),
        &[
            "landscape",
            "--kind",
            "random-ising",
            "--n",
            "9",
            "--resolution",
            "16",
            "--p",
            "4",
            "--normalization",
            "fixed-x",
            "--x",
            "8,16,32",
            "--out",
            "l",
        ],
    );
    assert_eq!(stdout.lines().count(), 4);
    let best = csv(&dir.path().join("l/best.csv"));
    let norms: Vec<f64> = best.iter().map(|r| num(&r["best_norm"])).collect();
    assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{norms:?}");
    for x in [8, 16, 32] {
        let meta = json(&dir.path().join(format!("l/gamma_x{x}.json")));
        assert_eq!(meta["grid"]["normalization"]["mode"]["x"], x as f64);
        assert_eq!(meta["e_ref_method"], "exhaustive");
    }
}

#[test]
fn fitline_on_linear_schedule_is_exact() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["generate", "random-ising", "--n", "6", "--out", "r.json"]);
    ok(
        dir.path(),
        &[
            "compare",
            "--instance",
            "r.json",
            "--strategies",
            "linxfer",
            "--p",
            "6",
            "--out",
            "c",
        ],
    );
    let fit: Value = serde_json::from_str(&ok(
        dir.path(),
        &["fitline", "--input", "c/reports/r__linxfer__p6.json"],
    ))
    .unwrap();
    assert_eq!(fit["p"], 6);
    for key in ["gamma", "beta"] {
        assert!((fit[key]["r_squared"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
    assert!((fit["gamma"]["slope"].as_f64().unwrap() - -0.376).abs() < 1e-12);
    assert!((fit["beta"]["intercept"].as_f64().unwrap() - 0.913).abs() < 1e-12);
}

#[test]
fn fitline_constant_schedule_has_zero_slope() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("s.json"),
        r#"{"gammas":[0.3,0.3,0.3],"betas":[-0.2,-0.2,-0.2]}"#,
    )
    .unwrap();
    ok(dir.path(), &["fitline", "--input", "s.json", "--out", "f.json"]);
    let fit = json(&dir.path().join("f.json"));
    assert_eq!(fit["gamma"]["slope"], 0.0);
    assert_eq!(fit["beta"]["slope"], 0.0);
    assert!((fit["gamma"]["intercept"].as_f64().unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn fitline_rejects_single_layer() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("s.json"), r#"{"gammas":[0.3],"betas":[0.2]}"#).unwrap();
    assert_eq!(code(dir.path(), &["fitline", "--input", "s.json"]), 2);
}

#[test]
fn sample_is_seeded_and_counts_sum_to_shots() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["generate", "random-ising", "--n", "8", "--out", "r.json"]);
    let run = |out: &str, seed: &str| {
        ok(
            dir.path(),
            &[
                "sample",
                "--instance",
                "r.json",
                "--params",
                "reference",
                "--p",
                "4",
                "--shots",
                "300",
                "--sample-seed",
                seed,
                "--out",
                out,
            ],
        );
        fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "1"));
    assert_ne!(a, run("c.csv", "2"));
    let shots: u64 = a
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(shots, 300);
    let meta = json(&dir.path().join("a.json"));
    assert_eq!(meta["convention"], "gate");
    assert_eq!(meta["schedule"]["gammas"].as_array().unwrap().len(), 4);
}

#[test]
fn sample_accepts_schedule_files_and_checks_conventions() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["generate", "maxcut", "--n", "4", "--d", "1.0", "--out", "m.json"],
    );
    fs::write(dir.path().join("s.json"), r#"{"gammas":[0.4],"betas":[0.3]}"#).unwrap();
    ok(
        dir.path(),
        &[
            "sample",
            "--instance",
            "m.json",
            "--schedule",
            "s.json",
            "--convention",
            "hamiltonian",
            "--out",
            "s.csv",
        ],
    );
    assert_eq!(json(&dir.path().join("s.json"))["convention"], "hamiltonian");

    ok(
        dir.path(),
        &[
            "compare",
            "--instance",
            "m.json",
            "--strategies",
            "linxfer",
            "--p",
            "2",
            "--out",
            "c",
        ],
    );
    let report = "c/reports/m__linxfer__p2.json";
    ok(
        dir.path(),
        &["sample", "--instance", "m.json", "--schedule", report, "--out", "r.csv"],
    );
    assert_eq!(
        code(
            dir.path(),
            &[
                "sample",
                "--instance",
                "m.json",
                "--schedule",
                report,
                "--convention",
                "hamiltonian"
            ]
        ),
        2
    );
    assert_eq!(
        code(dir.path(), &["sample", "--instance", "m.json", "--params", "reference"]),
        2
    );
    assert_eq!(
        code(
            dir.path(),
            &[
                "sample",
                "--instance",
                "m.json",
                "--schedule",
                "s.json",
                "--params",
                "reference"
            ]
        ),
        2
    );
}
