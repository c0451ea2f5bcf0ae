//! End-to-end runs of the `adafilter` binary.

use adafilter::cli::{read_analysis, read_metrics};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adafilter"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const MATRIX: &str = "\
gene,s1,s2,s3,s4
a,1e-7,3e-6,0.2,0.5
b,0.3,0.6,0.1,0.9
c,2e-5,1e-8,4e-6,0.01
d,0.8,0.02,0.5,0.7
";

#[test]
fn analyze_writes_a_readable_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.csv", MATRIX);
    let out = dir.path().join("out.csv");
    let o = bin(&[
        "analyze",
        "--input",
        &input,
        "--u",
        "2",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_analysis(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(report.features, vec!["a", "b", "c", "d"]);
    assert_eq!(report.result.rejected, vec![0, 2]);

    let o = bin(&[
        "analyze", "--input", &input, "--method", "hochberg", "--u", "3",
    ]);
    assert!(o.status.success());
    let report = read_analysis(o.stdout.as_slice()).unwrap();
    assert!(report.pc_pvalues.is_some());
    assert_eq!(report.result.rejected, vec![2]);

    let o = bin(&["analyze", "--input", &input, "--augment", "--gamma", "0.5"]);
    assert!(o.status.success());
    let report = read_analysis(o.stdout.as_slice()).unwrap();
    assert!(report.result.diagnostics.base_threshold.is_some());
}

#[test]
fn bad_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write(dir.path(), "m.csv", "s1,s2\n0.1,0.2\n0.3,\n");
    let o = bin(&["analyze", "--input", &missing]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 3, column 2"));

    let input = write(dir.path(), "p.csv", MATRIX);
    for args in [
        vec!["analyze", "--input", input.as_str(), "--u", "5"],
        vec![
            "analyze",
            "--input",
            input.as_str(),
            "--method",
            "bonferroni",
            "--augment",
        ],
        vec![
            "analyze",
            "--input",
            input.as_str(),
            "--method",
            "adaptive-bonferroni",
            "--k",
            "2",
        ],
        vec!["analyze", "--input", "/nonexistent/p.csv"],
    ] {
        assert_eq!(bin(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn simulate_is_reproducible_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "sweep.toml",
        "reps = 5\npi1 = [0.05, 0.1]\nrho = [-0.2, 0.8]\nu = [2, 4]\nk = [1, 5]\n",
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = bin(&[
            "simulate",
            "--config",
            &config,
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("# adafilter "));
    assert!(text.contains("rng=chacha8-keyed-v1"));
    let recs = read_metrics(text.as_bytes()).unwrap();
    // 6 methods at k = 1, 4 at k = 5, over 2 x 2 x 2 settings.
    assert_eq!(recs.len(), (6 + 4) * 8);

    let figs = dir.path().join("figs");
    let o = bin(&[
        "plot",
        "--input",
        a.to_str().unwrap(),
        "--output-dir",
        figs.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(figs.join("metrics_k1.svg").exists());
    assert!(figs.join("metrics_k5.svg").exists());

    let bad = write(dir.path(), "bad.toml", "reps = 5\nnot_a_field = 1\n");
    assert_eq!(bin(&["simulate", "--config", &bad]).status.code(), Some(2));
    let empty = write(dir.path(), "empty.csv", "");
    assert_eq!(bin(&["plot", "--input", &empty]).status.code(), Some(2));
    let partial = write(dir.path(), "partial.csv", "method,u,k\nbonferroni,2,1\n");
    assert_eq!(bin(&["plot", "--input", &partial]).status.code(), Some(2));
}
