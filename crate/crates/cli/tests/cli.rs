//! End-to-end checks of the command-line surface: exit codes, output
//! files, config handling and worker-count determinism.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jamcov"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn nmse_run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "nmse-sinr",
            "--trials",
            "3",
            "--grid",
            "-5,0",
            "--seed",
            "7",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for name in ["trials.csv", "aggregate.csv", "plot.nmse-sinr.txt", "meta.txt"] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let trials = read(&dir.path().join("trials.csv"));
    assert!(trials.starts_with("sweep_value,trial_index,seed,detected_rank,jd_converged"));
    assert_eq!(trials.lines().count(), 1 + 2 * 3);
    let plot = read(&dir.path().join("plot.nmse-sinr.txt"));
    assert!(plot.contains("set logscale y"));
    assert!(plot.contains("title 'JD'"));
}

#[test]
fn identical_seed_different_workers_byte_identical_csv() {
    let run = |workers: &str, dir: &Path| {
        let out = bin()
            .args([
                "nmse-samples",
                "--trials",
                "4",
                "--grid",
                "4,8",
                "--seed",
                "99",
                "--workers",
                workers,
                "--out",
            ])
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.join("trials.csv")).unwrap()
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let a = run("1", d1.path());
    let b = run("4", d2.path());
    assert_eq!(a, b, "trials.csv differs across worker counts");
}

#[test]
fn rejected_spec_exits_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    // empty method set is rejected before any trial runs
    let out = bin()
        .args(["nmse-sinr", "--methods", "", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error:"), "stderr was: {stderr}");
    assert!(!dir.path().join("trials.csv").exists());

    // unreachable SINR grid under the jamming-power mapping
    let out = bin()
        .args([
            "nmse-sinr",
            "--sinr-mode",
            "jamming-power",
            "--grid",
            "40",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unreachable"));
}

#[test]
fn config_file_applies_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(
        &cfg_path,
        "# scenario\nnb = 4\nnm = 3\nnm_prime = 2\nnx = 8\nsamples = 6\ntrials = 2\nseed = 5\nmethods = scm,jd\ngrid = -2.5,0\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["nmse-sinr", "--config"])
        .arg(&cfg_path)
        .args(["--trials", "3", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let trials = read(&out_dir.join("trials.csv"));
    // flag overrode the file's trial count: 2 sweep points x 3 trials
    assert_eq!(trials.lines().count(), 1 + 6);
    let header = trials.lines().next().unwrap();
    assert!(header.contains("nmse_scm") && header.contains("nmse_jd"));
    assert!(!header.contains("nmse_pca_evd"));
    let meta = read(&out_dir.join("meta.txt"));
    assert!(meta.contains("nb=4"));
    assert!(meta.contains("nt=8"), "nt should be derived from nx: {meta}");
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.cfg");
    std::fs::write(&cfg_path, "snr = 3\n").unwrap();
    let out = bin()
        .args(["nmse-sinr", "--config"])
        .arg(&cfg_path)
        .args(["--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn flops_subcommand_prints_reference_values() {
    let out = bin().args(["flops", "--samples", "8", "--dim", "8", "--rank", "3"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("3072"));
    assert!(stdout.contains("69632"));
}

#[test]
fn rank_detect_runs_aic_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "rank-detect",
            "--trials",
            "5",
            "--grid",
            "16,32",
            "--seed",
            "3",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let meta = read(&dir.path().join("meta.txt"));
    assert!(meta.contains("rank_mode = aic"));
    let agg = read(&dir.path().join("aggregate.csv"));
    assert!(agg.lines().next().unwrap().contains("rank_match_rate"));
    let plot = read(&dir.path().join("plot.rank-detect.txt"));
    assert!(plot.contains("detection probability"));
}
