use std::path::Path;
use std::process::{Command, Output};

fn cimsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cimsr")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn column(header: &str, name: &str) -> usize {
    header.split(',').position(|c| c == name).unwrap()
}

#[test]
fn validate_prints_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.conf", "experiment.kind = ber-vs-snr\n");
    let out = cimsr(&["validate", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("frame.sf = 510"));
    assert!(text.contains("link.alpha = 2"));
    assert!(text.contains("geometry.d_sd = 2"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.conf", "experiment.kind = ber-vs-snr\nalpha_ = 3\n");
    let out = cimsr(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha_"));
    let cfg = write(dir.path(), "b.conf", "experiment.kind = ber-vs-relay-distance\nsweep.stop = 2.5\n");
    assert_eq!(cimsr(&["validate", &cfg]).status.code(), Some(2));
    assert_eq!(cimsr(&["validate", "/nonexistent/x.conf"]).status.code(), Some(2));
}

#[test]
fn theory_run_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.conf", "experiment.kind = throughput-vs-snr\nexperiment.name = tp\nsweep.start = 26\nsweep.stop = 30\n");
    let out_dir = dir.path().join("out");
    let out = cimsr(&["theory", &cfg, "--out-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("tp.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 3 * 3);
    let t = column(lines[0], "throughput");
    let last: Vec<f64> = lines[1..]
        .iter()
        .filter(|l| l.contains(",30.0000,"))
        .map(|l| l.split(',').nth(t).unwrap().parse().unwrap())
        .collect();
    assert_eq!(last.len(), 3);
    assert!((last[0] - 1.0).abs() < 0.01 && (last[1] - 2.0 / 3.0).abs() < 0.01 && (last[2] - 0.5).abs() < 0.01);
    let svg = std::fs::read_to_string(out_dir.join("tp.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn seeded_runs_are_byte_identical_and_mix_correctly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.conf",
        "experiment.kind = sim-theory-compare\nframe.m_c = 1, 2\nsweep.start = 12\nsweep.stop = 16\nsweep.step = 4\nsim.seed = 99\n",
    );
    let run = |sub: &str, workers: &str| {
        let out_dir = dir.path().join(sub);
        let out = cimsr(&["run", &cfg, "--out-dir", out_dir.to_str().unwrap(), "--workers", workers, "--max-frames", "20000"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(out_dir.join("sim-theory-compare.csv")).unwrap()
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let (m, sys, frames, ei, em, st) = (
        column(header, "m_c"),
        column(header, "ber_sys_sim"),
        column(header, "frames"),
        column(header, "errors_index"),
        column(header, "errors_mod"),
        column(header, "status"),
    );
    let mut checked = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f[st] != "ok" {
            continue;
        }
        let m_c: f64 = f[m].parse().unwrap();
        let n: f64 = f[frames].parse().unwrap();
        let e_idx: f64 = f[ei].parse().unwrap();
        let e_mod: f64 = f[em].parse().unwrap();
        let mixed = (m_c * (e_idx / (m_c * n)) + e_mod / n) / (m_c + 1.0);
        let reported: f64 = f[sys].parse().unwrap();
        assert!((mixed - reported).abs() <= 5e-6 * mixed.max(1e-300), "{line}");
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn runtime_failure_exits_3_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "f.conf",
        "experiment.kind = ber-vs-snr\nexperiment.name = broken\nchannel.kind = rayleigh-unequal\n\
         channel.mean_squares = 0.5, 0.5\nsweep.start = 10\nsweep.stop = 12\n",
    );
    let out_dir = dir.path().join("out");
    let out = cimsr(&["theory", &cfg, "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let csv = std::fs::read_to_string(out_dir.join("broken.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("experiment_kind,"));
    assert!(lines.last().unwrap().contains("failed: "), "{csv}");
}
