use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use oped::io::parse_sinogram;
use serde_json::Value;
use tempfile::TempDir;

fn oped(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oped"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn json(p: impl AsRef<Path>) -> Value {
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

#[test]
fn disk_sinogram_is_the_chord_length() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "disk.sg");
    let run = oped(&[
        "sinogram",
        "--phantom",
        "disk",
        "--N",
        "8",
        "--Nd",
        "4",
        "--out",
        &out,
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));

    let bytes = fs::read(&out).unwrap();
    assert!(bytes
        .starts_with(b"OPEDSG1\nN=8 Nd=4 r=0 parity=even_half_circle noise_sigma=0 seed=none\n"));
    let s = parse_sinogram(&bytes).unwrap();
    for view in 0..4 {
        for (j, g) in s.view(view).unwrap().iter().enumerate() {
            let psi = (2 * j + 1) as f64 * std::f64::consts::PI / 8.0;
            assert!((g - 2.0 * psi.sin()).abs() < 1e-14);
        }
    }
}

#[test]
fn limited_sinogram_stores_only_available_views() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "sl.sg");
    let run = oped(&[
        "sinogram", "--N", "502", "--Nd", "251", "--r", "21", "--out", &out,
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let bytes = fs::read(&out).unwrap();
    let s = parse_sinogram(&bytes).unwrap();
    assert_eq!(s.geometry().r(), 21);
    assert_eq!(s.values().len(), 230 * 251);
    assert!(s.view(20).is_none() && s.view(21).is_some());
}

#[test]
fn noisy_sinogram_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (a, b, c) = (path(&dir, "a.sg"), path(&dir, "b.sg"), path(&dir, "c.sg"));
    for (out, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let run = oped(&[
            "sinogram", "--N", "64", "--sigma", "0.03", "--seed", seed, "--out", out,
        ]);
        assert_eq!(code(&run), 0, "{}", stderr(&run));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
    let s = parse_sinogram(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(s.noise_sigma(), 0.03);
    assert_eq!(s.seed(), Some(7));
}

#[test]
fn sinogram_from_ellipse_file() {
    let dir = TempDir::new().unwrap();
    let phantom = path(&dir, "two.txt");
    fs::write(
        &phantom,
        "# two blobs\n0.2 0 0.3 0.1 0.5 1\n-0.4 0.1 0.2 0.2 0 -0.5\n",
    )
    .unwrap();
    let out = path(&dir, "two.sg");
    assert_eq!(
        code(&oped(&[
            "sinogram",
            "--phantom",
            &phantom,
            "--N",
            "16",
            "--out",
            &out
        ])),
        0
    );

    let missing = path(&dir, "nope.txt");
    let run = oped(&[
        "sinogram",
        "--phantom",
        &missing,
        "--N",
        "16",
        "--out",
        &out,
    ]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("unknown phantom"));
}

#[test]
fn invalid_geometry_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.sg");
    assert_eq!(
        code(&oped(&["sinogram", "--N", "16", "--r", "7", "--out", &out])),
        1
    );
    assert_eq!(
        code(&oped(&[
            "sinogram", "--N", "16", "--sigma", "-1", "--out", &out
        ])),
        1
    );
    assert!(!Path::new(&out).exists());
}

#[test]
fn full_data_disk_reconstructs_exactly() {
    let dir = TempDir::new().unwrap();
    let (sg, img, metrics) = (
        path(&dir, "d.sg"),
        path(&dir, "d.pgm"),
        path(&dir, "d.json"),
    );
    assert_eq!(
        code(&oped(&[
            "sinogram",
            "--phantom",
            "disk",
            "--N",
            "32",
            "--out",
            &sg
        ])),
        0
    );
    let run = oped(&[
        "reconstruct",
        "--in",
        &sg,
        "--grid",
        "32",
        "--out",
        &img,
        "--metrics",
        &metrics,
        "--phantom",
        "disk",
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));

    let m = json(&metrics);
    for key in [
        "rmse_inside_disk",
        "rel_l2_inside_disk",
        "max_abs_inside_disk",
    ] {
        assert!(m[key].as_f64().unwrap() <= 1e-10, "{key} = {}", m[key]);
    }
    let pgm = fs::read(&img).unwrap();
    let header = b"P5\n32 32\n65535\n";
    assert!(pgm.starts_with(header));
    assert_eq!(pgm.len(), header.len() + 2 * 32 * 32);
}

#[test]
fn limited_angle_shepp_logan_reconstructs() {
    let dir = TempDir::new().unwrap();
    let (sg, img, metrics) = (
        path(&dir, "sl.sg"),
        path(&dir, "sl.pgm"),
        path(&dir, "sl.json"),
    );
    assert_eq!(
        code(&oped(&[
            "sinogram", "--N", "502", "--Nd", "251", "--r", "21", "--out", &sg
        ])),
        0
    );
    let run = oped(&[
        "reconstruct",
        "--in",
        &sg,
        "--tau",
        "0",
        "--beta",
        "0.9",
        "--grid",
        "256",
        "--out",
        &img,
        "--metrics",
        &metrics,
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    // Same value the end-to-end acceptance run freezes.
    let rel = json(&metrics)["rel_l2_inside_disk"].as_f64().unwrap();
    assert!(
        (rel - 0.12614416760563346).abs() <= 1e-6 * 0.12614416760563346,
        "{rel}"
    );
}

#[test]
fn singular_completion_is_refused_with_the_bound() {
    let dir = TempDir::new().unwrap();
    let (sg, img) = (path(&dir, "wide.sg"), path(&dir, "wide.pgm"));
    // r = 251 * 0.9, rounded down.
    assert_eq!(
        code(&oped(&[
            "sinogram", "--N", "502", "--r", "225", "--out", &sg
        ])),
        0
    );
    let run = oped(&["reconstruct", "--in", &sg, "--tau", "0.2", "--out", &img]);
    assert_eq!(code(&run), 2);
    let msg = stderr(&run);
    assert!(msg.contains("tau < 1 - r/N_sys"), "{msg}");
    assert!(msg.contains("0.1035"), "{msg}");
    assert!(!Path::new(&img).exists());
}

#[test]
fn reconstruct_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let (sg, img) = (path(&dir, "bad.sg"), path(&dir, "bad.pgm"));
    fs::write(
        &sg,
        b"OPEDSG1\nN=8 Nd=4 r=0 parity=even_half_circle noise_sigma=0 seed=none\n\x00\x01",
    )
    .unwrap();
    assert_eq!(code(&oped(&["reconstruct", "--in", &sg, "--out", &img])), 1);
    let missing = path(&dir, "missing.sg");
    assert_eq!(
        code(&oped(&["reconstruct", "--in", &missing, "--out", &img])),
        1
    );
}

#[test]
fn reconstruction_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let sg = path(&dir, "n.sg");
    let run = oped(&[
        "sinogram", "--N", "64", "--r", "3", "--sigma", "0.01", "--seed", "3", "--out", &sg,
    ]);
    assert_eq!(code(&run), 0);
    let mut outputs = Vec::new();
    for i in 0..2 {
        let (img, metrics) = (
            path(&dir, &format!("{i}.pgm")),
            path(&dir, &format!("{i}.json")),
        );
        let run = oped(&[
            "reconstruct",
            "--in",
            &sg,
            "--tau",
            "0.1",
            "--grid",
            "48",
            "--out",
            &img,
            "--metrics",
            &metrics,
        ]);
        assert_eq!(code(&run), 0, "{}", stderr(&run));
        outputs.push((fs::read(&img).unwrap(), fs::read(&metrics).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bump_filter_and_explicit_window() {
    let dir = TempDir::new().unwrap();
    let (sg, img) = (path(&dir, "b.sg"), path(&dir, "b.pgm"));
    assert_eq!(code(&oped(&["sinogram", "--N", "32", "--out", &sg])), 0);
    let run = oped(&[
        "reconstruct",
        "--in",
        &sg,
        "--filter",
        "bump",
        "--order",
        "3",
        "--tau",
        "0.3",
        "--grid",
        "16",
        "--out",
        &img,
        "--window-lo",
        "0",
        "--window-hi",
        "1.05",
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let inverted = oped(&[
        "reconstruct",
        "--in",
        &sg,
        "--grid",
        "16",
        "--out",
        &img,
        "--window-lo",
        "1",
        "--window-hi",
        "0",
    ]);
    assert_eq!(code(&inverted), 1);
}

#[test]
fn cond_report_sweep_writes_csv_and_summary() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "r21.csv");
    let run = oped(&[
        "cond-report",
        "--N",
        "502",
        "--r",
        "21",
        "--sweep",
        "--out",
        &csv,
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau,beta,k,mu_min,mu_max,cond"));
    assert_eq!(lines.count(), 6 * 251);

    let summary = json(dir.path().join("r21.json"));
    let rows = summary.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let first = &rows[0];
    assert_eq!(
        (first["tau"].as_f64(), first["beta"].as_f64()),
        (Some(0.0), Some(0.5))
    );
    let max = first["max_condition"].as_f64().unwrap();
    assert!((max - 44.0).abs() <= 4.4, "{max}");
}

#[test]
fn cond_report_quarter_circle() {
    let run = oped(&[
        "cond-report",
        "--N",
        "502",
        "--r",
        "126",
        "--tau",
        "0",
        "--beta",
        "0.9",
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let stdout = String::from_utf8(run.stdout).unwrap();
    let row = stdout.lines().last().unwrap();
    let max: f64 = row.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((max - 4084.0).abs() <= 408.4, "{row}");
}

#[test]
fn cond_report_small_theorem_regime() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "small.csv");
    let args = [
        "cond-report",
        "--N",
        "16",
        "--r",
        "4",
        "--tau",
        "0.5",
        "--beta",
        "0",
        "--out",
        &csv,
    ];

    // N_sys = N: tau = 0.5 < 1 - 4/16, every A is invertible.
    let mut full = args.to_vec();
    full.extend(["--table-convention", "full"]);
    assert_eq!(code(&oped(&full)), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 16);
    assert!(!text.contains("inf"));

    // N_sys = N/2 puts tau exactly on 1 - 4/8.
    assert_eq!(code(&oped(&args)), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 8);
    assert!(text.contains("inf"));
}

#[test]
fn cond_report_rejects_bad_arguments() {
    assert_eq!(
        code(&oped(&[
            "cond-report",
            "--N",
            "502",
            "--table-convention",
            "both"
        ])),
        1
    );
    assert_eq!(code(&oped(&["cond-report", "--N", "16", "--r", "7"])), 1);
    assert_eq!(code(&oped(&["cond-report", "--N", "15", "--r", "2"])), 1);
}

#[test]
fn verify_suites_pass_at_defaults() {
    for (suite, n) in [("theorems", "16"), ("parity", "9"), ("preservation", "64")] {
        let run = oped(&["verify", "--suite", suite, "--N", n]);
        assert_eq!(
            code(&run),
            0,
            "{suite}: {}",
            String::from_utf8_lossy(&run.stdout)
        );
        let stdout = String::from_utf8(run.stdout).unwrap();
        assert!(stdout.lines().any(|l| l.starts_with("[PASS]")));
        assert!(!stdout.contains("[FAIL]"));
    }
    assert_eq!(code(&oped(&["verify", "--suite", "theorems"])), 0);
}

#[test]
fn verify_reports_failure() {
    // N_d = 4 and tau = 1/4 preserve only degree 1, so x^2 + y^2 must fail.
    let run = oped(&["verify", "--suite", "preservation", "--N", "8"]);
    assert_eq!(code(&run), 3);
    assert!(String::from_utf8(run.stdout)
        .unwrap()
        .contains("[FAIL] x^2+y^2"));
}

#[test]
fn verify_usage_errors() {
    assert_eq!(code(&oped(&["verify", "--suite", "everything"])), 1);
    assert_eq!(
        code(&oped(&["verify", "--suite", "theorems", "--N", "3"])),
        1
    );
}

#[test]
fn usage_exit_codes() {
    assert_eq!(code(&oped(&[])), 1);
    assert_eq!(code(&oped(&["frobnicate"])), 1);
    assert_eq!(code(&oped(&["sinogram"])), 1);
    assert_eq!(code(&oped(&["--help"])), 0);
    assert_eq!(code(&oped(&["--version"])), 0);
}
