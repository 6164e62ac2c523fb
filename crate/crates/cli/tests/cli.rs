//! End-to-end checks of the CLI pipelines: config round trips, artifact
//! shapes, exit codes, and byte determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

use levyratio_cli::{run, Command as Cmd, ExperimentConfig, Invocation};

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn base_config(out: &Path) -> String {
    format!(
        "[measure]\nkind = stable_positive\nbeta = 0.5\n\n\
         [weights]\nkind = two_point\na = 0\nb = 1\np = 0.5\n\n\
         [run]\nt = 1.0\nn = 4000\nengine = series\nseed = 11\n\
         jump_floor_eps = 1e-8\njump_floor_rel = 0\n\n\
         [compare]\ntarget = limit_cdf\nbeta = 0.5\nks_pass = 0.05\n\n\
         [output]\ndir = {}\n",
        out.display()
    )
}

#[test]
fn verify_passes_on_arcsine_configuration() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "exp.cfg", &base_config(&out));
    let code = run(&Invocation {
        command: Cmd::Verify,
        config_path: cfg,
        seed_override: None,
        jobs: None,
        out_override: None,
        format_override: None,
    });
    assert_eq!(code, 0);
    assert!(out.join("verify.csv").exists());
    assert!(out.join("manifest.json").exists());
    let verify = fs::read_to_string(out.join("verify.csv")).unwrap();
    assert!(verify.lines().count() == 2, "{verify}");
    assert!(verify.contains("true"));
}

#[test]
fn verify_fails_against_wrong_target() {
    // the arcsine-law batch cannot match a centered gaussian weight CDF
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let text = base_config(&out)
        .replace("target = limit_cdf\nbeta = 0.5", "target = weight_cdf")
        .replace("kind = two_point\na = 0\nb = 1\np = 0.5", "kind = gaussian\nmu = 0\nsigma = 1");
    let cfg = write_config(tmp.path(), "exp.cfg", &text);
    let code = run(&Invocation {
        command: Cmd::Verify,
        config_path: cfg,
        seed_override: None,
        jobs: None,
        out_override: None,
        format_override: None,
    });
    assert_eq!(code, 1);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_levyratio");
    let tmp = tempfile::tempdir().unwrap();

    // missing config file -> usage/config error
    let status = Command::new(exe)
        .args(["verify", "--config", "/nonexistent/path.cfg"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // malformed config -> 2
    let bad = write_config(tmp.path(), "bad.cfg", "[measure]\nkind = no_such_measure\n");
    let status = Command::new(exe)
        .args(["simulate", "--config"])
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // healthy run -> 0
    let out = tmp.path().join("out");
    let good = write_config(tmp.path(), "good.cfg", &base_config(&out));
    let status = Command::new(exe)
        .args(["simulate", "--jobs", "2", "--config"])
        .arg(&good)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("batch_t1e0.csv").exists());
    assert!(out.join("batch_t1e0.meta.json").exists());
}

#[test]
fn seed_and_out_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    let cfg = write_config(tmp.path(), "exp.cfg", &base_config(&out_a));
    for (dir, seed) in [(&out_a, None), (&out_b, Some(99u64))] {
        let code = run(&Invocation {
            command: Cmd::Simulate,
            config_path: cfg.clone(),
            seed_override: seed,
            jobs: None,
            out_override: Some(dir.to_path_buf()),
            format_override: None,
        });
        assert_eq!(code, 0);
    }
    let a = fs::read_to_string(out_a.join("batch_t1e0.csv")).unwrap();
    let b = fs::read_to_string(out_b.join("batch_t1e0.csv")).unwrap();
    assert_ne!(a, b, "different seeds must change the batch");
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    let cfg = write_config(tmp.path(), "exp.cfg", &base_config(&out_a));
    for dir in [&out_a, &out_b] {
        let code = run(&Invocation {
            command: Cmd::Simulate,
            config_path: cfg.clone(),
            seed_override: None,
            jobs: None,
            out_override: Some(dir.to_path_buf()),
            format_override: None,
        });
        assert_eq!(code, 0);
    }
    let a = fs::read(out_a.join("batch_t1e0.csv")).unwrap();
    let b = fs::read(out_b.join("batch_t1e0.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn user_tail_and_empirical_weights_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("tail.csv"), "x,tail\n0.5,2.0\n1.0,0.8\n2.0,0.0\n").unwrap();
    fs::write(tmp.path().join("weights.csv"), "value\n-1.0\n0.0\n1.0\n2.0\n").unwrap();
    let out = tmp.path().join("out");
    let text = format!(
        "[measure]\nkind = user_tail\npath = tail.csv\n\n\
         [weights]\nkind = empirical\npath = weights.csv\n\n\
         [run]\nt = 2.0\nn = 2000\nengine = layered\nseed = 5\nshell_floor = 1e-4\n\n\
         [output]\ndir = {}\n",
        out.display()
    );
    let cfg = write_config(tmp.path(), "exp.cfg", &text);
    let code = run(&Invocation {
        command: Cmd::Simulate,
        config_path: cfg,
        seed_override: None,
        jobs: None,
        out_override: None,
        format_override: None,
    });
    assert_eq!(code, 0);
    let meta = fs::read_to_string(out.join("batch_t2e0.meta.json")).unwrap();
    assert!(meta.contains("user_tail"));
    assert!(meta.contains("empirical"));
}

#[test]
fn limit_emits_monotone_cdf() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let text = base_config(&out)
        + "\n[limit]\nbeta = 0.5\nx_min = 0.02\nx_max = 0.98\npoints = 49\nmethod = closed_form\n";
    let cfg = write_config(tmp.path(), "exp.cfg", &text);
    let code = run(&Invocation {
        command: Cmd::Limit,
        config_path: cfg,
        seed_override: None,
        jobs: None,
        out_override: None,
        format_override: None,
    });
    assert_eq!(code, 0);
    let csv = fs::read_to_string(out.join("limit.csv")).unwrap();
    let mut prev = -1.0f64;
    for line in csv.lines().skip(1) {
        let mut it = line.split(',');
        let _x: f64 = it.next().unwrap().parse().unwrap();
        let cdf: f64 = it.next().unwrap().parse().unwrap();
        let dens: f64 = it.next().unwrap().parse().unwrap();
        assert!(cdf >= prev - 1e-12);
        assert!(dens >= 0.0);
        prev = cdf;
    }
    assert_eq!(csv.lines().count(), 50);
}

#[test]
fn diagnose_classifies_stable_measure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let text = base_config(&out) + "\n[diagnose]\nend = zero\ndecades = 4\nper_decade = 16\n";
    let cfg = write_config(tmp.path(), "exp.cfg", &text);
    let code = run(&Invocation {
        command: Cmd::Diagnose,
        config_path: cfg,
        seed_override: None,
        jobs: None,
        out_override: None,
        format_override: None,
    });
    assert_eq!(code, 0);
    let report = fs::read_to_string(out.join("diagnostics.json")).unwrap();
    assert!(report.contains("RegularlyVarying"), "{report}");
    assert!(report.contains("grid estimate, not a proof"));
    assert!(out.join("scan_centered_feller.csv").exists());
    assert!(out.join("scan_relative_stability.csv").exists());
    assert!(out.join("scan_stochastic_compactness.csv").exists());
}

#[test]
fn er_rt_reports_stable_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let text = base_config(&out).replace("t = 1.0\nn = 4000", "t = 0.5, 2.0\nn = 4000");
    let cfg = write_config(tmp.path(), "exp.cfg", &text);
    let code = run(&Invocation {
        command: Cmd::ErRt,
        config_path: cfg,
        seed_override: None,
        jobs: None,
        out_override: None,
        format_override: None,
    });
    assert_eq!(code, 0);
    let csv = fs::read_to_string(out.join("er_rt.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let er: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((er - 0.5).abs() < 1e-5, "{line}");
    }
}

#[test]
fn config_parse_failure_is_config_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "exp.cfg", "key_without_section = 1\n");
    let code = run(&Invocation {
        command: Cmd::Verify,
        config_path: cfg,
        seed_override: None,
        jobs: None,
        out_override: None,
        format_override: None,
    });
    assert_eq!(code, 2);
}

#[test]
fn config_file_parses_from_disk_with_relative_paths() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("tail.csv"), "0.5,1.0\n1.5,0.0\n").unwrap();
    let text = "[measure]\nkind = user_tail\npath = tail.csv\n\n\
                [weights]\nkind = uniform\na = 0\nb = 1\n";
    let path = write_config(tmp.path(), "exp.cfg", text);
    let cfg = ExperimentConfig::from_file(&path).unwrap();
    assert_eq!(cfg.measure.support_upper(), Some(1.5));
}
