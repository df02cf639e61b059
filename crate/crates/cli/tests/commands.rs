use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use qimetric_cli::commands::amplitudes::{self, AmplitudesArgs};
use qimetric_cli::commands::metric::{self, MetricArgs};
use qimetric_cli::commands::sweep::{self, SweepArgs};
use qimetric_cli::commands::validate::{self, Status};
use qimetric_cli::config::MetricSourceArg;
use qimetric_cli::RunConfig;

fn demo_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/demo.toml")
}

fn demo_text() -> String {
    fs::read_to_string(demo_path()).unwrap()
}

fn demo() -> RunConfig {
    RunConfig::parse(&demo_text()).unwrap()
}

fn with(old: &str, new: &str) -> RunConfig {
    let text = demo_text();
    assert!(text.contains(old), "demo config lacks {old:?}");
    RunConfig::parse(&text.replace(old, new)).unwrap()
}

const DEMO_F: &str = "f = [[[0.006, 0.0], [0.01, 0.0]], [[0.01, 0.0], [-0.004, 0.0]]]";

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn cli(args: &[&str], config: &Path, out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qimetric"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn zero_drive_amplitudes() {
    let cfg = with(DEMO_F, "f = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]");
    let a = amplitudes::compute(&cfg, AmplitudesArgs::from_config(&cfg)).unwrap();
    let (_, rows) = parse_csv(&a.table.render());
    for r in &rows {
        for cell in &r[1..7] {
            assert_eq!(cell, "0.0");
        }
        assert_eq!(&r[7..], ["1.0", "0.0", "0.0", "0.0"]);
    }
}

#[test]
fn amplitudes_have_steps_plus_one_rows() {
    let cfg = demo();
    let mut args = AmplitudesArgs::from_config(&cfg);
    args.steps = 37;
    let a = amplitudes::compute(&cfg, args).unwrap();
    assert_eq!(a.table.rows(), 38);
    let (header, rows) = parse_csv(&a.table.render());
    assert_eq!(header, amplitudes::HEADER);
    assert_eq!(num(&rows[0][0]), args.t0);
    assert_eq!(num(&rows[37][0]), args.t1);
}

#[test]
fn perturbative_columns_are_linear_in_f() {
    let base = demo();
    let doubled = with(DEMO_F, "f = [[[0.012, 0.0], [0.02, 0.0]], [[0.02, 0.0], [-0.008, 0.0]]]");
    let args = AmplitudesArgs::from_config(&base);
    let (_, r1) = parse_csv(&amplitudes::compute(&base, args).unwrap().table.render());
    let (_, r2) = parse_csv(&amplitudes::compute(&doubled, args).unwrap().table.render());
    for (a, b) in r1.iter().zip(&r2) {
        for col in 1..7 {
            assert_eq!(2.0 * num(&a[col]), num(&b[col]), "column {col}");
        }
    }
}

#[test]
fn metric_examples() {
    let cfg = with("lambda2 = 0.35", "lambda2 = 0.6");
    let sys = cfg.system().unwrap();
    let params = cfg.params().unwrap();
    let m = metric::evaluate(&cfg, &sys, &params, MetricSourceArg::Closed, 0.7).unwrap();
    assert_eq!(m.chi12.re, 1.0 / (2.0 * 0.6));

    let dir = tempfile::tempdir().unwrap();
    let mut args = MetricArgs::from_config(&cfg);
    args.dl1 = 0.0;
    args.dl2 = 0.0;
    let out = metric::run(&cfg, args, dir.path()).unwrap();
    assert!(out.report.contains("ds2 = 0.0 "), "{}", out.report);

    let cfg = demo();
    let sys = cfg.system().unwrap();
    let params = cfg.params().unwrap();
    let fd = metric::evaluate(&cfg, &sys, &params, MetricSourceArg::DefinitionFd, 0.7).unwrap();
    let exact = metric::evaluate(&cfg, &sys, &params, MetricSourceArg::DefinitionAnalytic, 0.7).unwrap();
    assert!(metric::max_relative_difference(&fd, &exact) <= 1e-6);
}

#[test]
fn sweep_flags_singular_rows() {
    let cfg = demo();
    // ω = 3: sin(ωt) = 0 at t = 0 and t = π/3
    let args = SweepArgs {
        t0: 0.0,
        t1: std::f64::consts::PI / 3.0,
        nt: 11,
    };
    let s = sweep::compute(&cfg, args).unwrap();
    assert_eq!(s.rows.len(), 11);
    assert!(s.rows[0].closed.is_none());
    let (header, rows) = parse_csv(&s.table().render());
    assert_eq!(header, sweep::HEADER);
    assert_eq!(&rows[0][1..5], ["1", "", "", ""]);
    for r in rows.iter().filter(|r| r[1] == "0") {
        assert!(num(&r[4]) >= 0.0);
    }
}

#[test]
fn uv_columns_track_closed_form_at_high_frequency() {
    let cfg = with("omega = 3.0", "omega = 100.0");
    let cfg = RunConfig {
        numerics: qimetric_cli::config::NumericsConfig {
            uv_gamma: qimetric_cli::config::UvGamma::Asymptotic,
            ..cfg.numerics.clone()
        },
        ..cfg
    };
    let s = sweep::compute(&cfg, SweepArgs { t0: 0.0, t1: 1.0, nt: 101 }).unwrap();
    let mut checked = 0;
    for r in &s.rows {
        if (100.0 * r.t).sin().abs() < 0.3 {
            continue;
        }
        let closed = r.closed.unwrap();
        for k in 0..3 {
            assert!((closed[k] - r.uv[k]).abs() <= 0.02 * closed[k].abs().max(1e-12));
        }
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn validate_on_zero_drive_reports_exact_agreement() {
    let cfg = with(DEMO_F, "f = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]");
    let checks = validate::checks(&cfg).unwrap();
    let scaling = checks.iter().find(|c| c.name == "perturbation_scaling").unwrap();
    assert_eq!(scaling.status, Status::Pass);
    assert!(scaling.detail.contains("exact agreement"));
    let op = checks.iter().find(|c| c.name == "operator_vs_hamiltonian").unwrap();
    assert_eq!(op.status, Status::Pass);
}

#[test]
fn validate_on_demo_measures_known_discrepancies() {
    let checks = validate::checks(&demo()).unwrap();
    let get = |name: &str| checks.iter().find(|c| c.name == name).unwrap();
    assert_eq!(get("perturbation_scaling").status, Status::Pass);
    assert_eq!(get("a11_factor").status, Status::Discrepancy);
    assert!(get("a11_factor").detail.contains("factor = -1.99"));
    assert_eq!(get("a21_factor").status, Status::Pass);
    assert_eq!(get("high_frequency_profile").status, Status::Pass);
    assert!(get("high_frequency_gamma").detail.contains("matches 4|W12/V11|^2"));
    assert_eq!(get("step_halving").status, Status::Pass);
    assert_eq!(get("norm_conservation").status, Status::Pass);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let ok = cli(&["amplitudes", "--steps", "10"], &demo_path(), &out);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let csv = fs::read_to_string(out.join("amplitudes.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);

    let write = |name: &str, text: String| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };

    let typo = write("typo.toml", demo_text().replace("omega = 3.0", "omega = 3.0\nomgea = 1.0"));
    let r = cli(&["metric"], &typo, &out);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("omgea") && err.contains("drive"), "{err}");

    let resonant = write("resonant.toml", demo_text().replace("omega = 3.0", "omega = 1.0"));
    let r = cli(&["amplitudes"], &resonant, &out);
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stderr).contains("resonance"));

    let zero_l1 = write("zero.toml", demo_text().replace("lambda1 = 0.6", "lambda1 = 0.0"));
    let r = cli(&["metric"], &zero_l1, &out);
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stderr).contains("lambda1"));

    let coarse = write(
        "coarse.toml",
        demo_text()
            .replace(DEMO_F, "f = [[[0.6, 0.0], [0.8, 0.0]], [[0.8, 0.0], [-0.3, 0.0]]]")
            .replace("fd_step = 1e-5", "fd_step = 1e-5\nrk_step = 0.5"),
    );
    let r = cli(&["amplitudes"], &coarse, &out);
    assert_eq!(r.status.code(), Some(4));

    let r = cli(&["metric"], &dir.path().join("missing.toml"), &out);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn noise_artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let r = cli(&["noise", "--nt", "11", "--nomega", "6"], &demo_path(), dir.path());
    assert!(r.status.success());
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("chi_from_lines"));
    assert!(stdout.contains("chi_from_second_derivative"));
    let (header, rows) = parse_csv(&fs::read_to_string(dir.path().join("noise.csv")).unwrap());
    assert_eq!(header, ["t", "omega", "s_q"]);
    assert_eq!(rows.len(), 66);
    let cfg = demo();
    let p = cfg.params().unwrap();
    let max = 2.0 * (p.w12 * p.lambda2).norm_sqr();
    for r in &rows {
        let (t, w, v) = (num(&r[0]), num(&r[1]), num(&r[2]));
        let c = (w * t).cos();
        assert_eq!(v, max * c * c);
    }
    let svg = fs::read_to_string(dir.path().join("noise.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}
