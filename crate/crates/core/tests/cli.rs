use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(rel);
    p.display().to_string()
}

fn run(sub: &str, config: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depolarize"))
        .arg(sub)
        .arg("--config")
        .arg(config)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn jsonl(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn small_quench(noise: &str) -> String {
    format!(
        r#"kind = "quench"
seed = 3
noise = "{noise}"

[tfim]
n = 5
hx = 0.5
hz = 0.75

[quench]
t_max = 1.5
points = 6
n_t = [3, 4]
shots = 512
extrapolate = true
"#
    )
}

fn dir_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn output_bytes_do_not_depend_on_threads_or_repetition() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "q.toml",
        &small_quench(&data("noise/depolarizing.json")),
    );
    let mut outs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = tmp.path().join(format!("out{i}"));
        let o = run(
            "quench",
            &cfg,
            &["--threads", threads, "--out", out.to_str().unwrap()],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(dir_files(&out));
    }
    assert!(outs[0].len() >= 4);
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[0], outs[2]);
}

#[test]
fn provenance_tracks_seed_but_not_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "q.toml",
        &small_quench(&data("noise/depolarizing.json")),
    );
    let hash = |out: &str, seed: &str| {
        let out = tmp.path().join(out);
        let o = run(
            "quench",
            &cfg,
            &["--seed", seed, "--out", out.to_str().unwrap()],
        );
        assert!(o.status.success());
        let rec = &jsonl(&out.join("quench_calibration.jsonl"))[0];
        assert_eq!(rec["seed"].as_u64().unwrap().to_string(), seed);
        rec["config_sha256"].as_str().unwrap().to_string()
    };
    let a = hash("a", "5");
    assert_eq!(a, hash("b", "5"));
    assert_ne!(a, hash("c", "6"));
    assert_eq!(a.len(), 64);
}

#[test]
fn noiseless_calibration_gives_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.toml",
        r#"kind = "calibrate"
seed = 1
out = "out"

[tfim]
n = 4
hx = 0.5
hz = 0.75

[calibrate]
circuit = "tfim"
t = 0.5
n_t = 2
purity_source = "exact"
"#,
    );
    let o = run("calibrate", &cfg, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = &jsonl(&tmp.path().join("out/calibration.jsonl"))[0];
    assert!(rec["p_tot"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(rec["depth_tag"], "nt=2");
    assert_eq!(rec["kind"], "calibrate");
}

#[test]
fn depolarizing_chain_matches_composition_oracle() {
    let cfg = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/calibrate_chain.toml");
    let tmp = tempfile::tempdir().unwrap();
    let o = run("calibrate", &cfg, &["--out", tmp.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = &jsonl(&tmp.path().join("calibration.jsonl"))[0];
    let (p, s) = (
        rec["p_tot"].as_f64().unwrap(),
        rec["sigma_p"].as_f64().unwrap(),
    );
    let oracle = 1.0 - 0.98f64.powi(10);
    assert!((p - oracle).abs() < 3.0 * s, "{p} +- {s} vs {oracle}");
    assert!(s > 0.0 && s < 0.1);
}

#[test]
fn known_observable_clamping_exits_with_warning_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.toml",
        r#"kind = "calibrate"
seed = 1
out = "out"

[tfim]
n = 3
hx = 0.5

[calibrate]
method = "known"
circuit = "tfim"
t = 0.0
known_value = 0.5
shots = 1000
"#,
    );
    let o = run("calibrate", &cfg, &[]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rec = &jsonl(&tmp.path().join("out/calibration.jsonl"))[0];
    assert_eq!(rec["clamped"], true);
    assert_eq!(rec["p_tot"].as_f64(), Some(0.0));
}

#[test]
fn method_override_switches_route() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!(
        r#"kind = "calibrate"
seed = 1
out = "out"
noise = "{}"

[tfim]
n = 3
hx = 0.5

[calibrate]
circuit = "tfim"
t = 0.2
purity_source = "exact"
"#,
        data("noise/depolarizing.json")
    );
    let cfg = write(tmp.path(), "c.toml", &text);
    let o = run("calibrate", &cfg, &["--method", "known", "--nt", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = &jsonl(&tmp.path().join("out/calibration.jsonl"))[0];
    assert_eq!(rec["method"], "known_observable");
    assert_eq!(rec["depth_tag"], "nt=3");
}

#[test]
fn hard_failures_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let missing = Command::new(env!("CARGO_BIN_EXE_depolarize"))
        .arg("quench")
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let q = write(d, "q.toml", &small_quench(&data("noise/depolarizing.json")));
    assert_eq!(run("renyi", &q, &[]).status.code(), Some(1));

    let no_cal = write(
        d,
        "nocal.toml",
        &small_quench(&data("noise/depolarizing.json")).replace(
            "extrapolate = true",
            "extrapolate = true\nself_calibrate = false",
        ),
    );
    let o = run("quench", &no_cal, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("calibration_file"));

    let r = write(
        d,
        "r.toml",
        r#"kind = "renyi"
seed = 1

[tfim]
n = 4
hx = 0.5

[renyi]
t_max = 1.0
points = 2
n_t = 1
n_u = 1
n_m = 100
"#,
    );
    let o = run("renyi", &r, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_u"));

    write(d, "bad.txt", "1.0 XQZ\n");
    let b = write(
        d,
        "b.toml",
        r#"kind = "brickwork-bench"
seed = 1

[brickwork]
depths = [2]
points = 2

[[brickwork.operators]]
name = "bad"
file = "bad.txt"
"#,
    );
    assert_eq!(run("brickwork-bench", &b, &[]).status.code(), Some(1));

    let u = write(d, "u.toml", "kind = \"quench\"\nseed = 1\nbogus = 3\n");
    assert_eq!(run("quench", &u, &[]).status.code(), Some(1));
}

#[test]
fn fully_depolarizing_noise_is_a_hard_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let noise = write(
        tmp.path(),
        "full.json",
        r#"{"name": "full", "gates": [{"gate": "cx", "depolarizing": 1.0}, {"gate": "rx", "depolarizing": 1.0}]}"#,
    );
    let cfg = write(tmp.path(), "q.toml", &small_quench(noise.to_str().unwrap()));
    let o = run(
        "quench",
        &cfg,
        &["--out", tmp.path().join("out").to_str().unwrap()],
    );
    assert_eq!(
        o.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
}
