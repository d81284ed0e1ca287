use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_epi-ghost");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn CLI")
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

fn ok(dir: &Path, args: &[&str]) {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn combined(dir: &Path, seed: &str) {
    ok(
        dir,
        &[
            "simulate",
            "--phase-even",
            "0.3",
            "--shift-even",
            "2",
            "--noise-sigma",
            "0.05",
            "--seed",
            seed,
            "--out",
            "k.epik",
            "--ref-out",
            "ref.epik",
            "--truth-out",
            "truth.epik",
        ],
    );
}

#[test]
fn simulate_is_deterministic_and_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = |out: &'static str, seed: &'static str| {
        [
            "simulate",
            "--noise-sigma",
            "0.1",
            "--phase-even",
            "-0.2",
            "--seed",
            seed,
            "--out",
            out,
        ]
    };
    ok(d, &args("a.epik", "9"));
    ok(d, &args("b.epik", "9"));
    ok(d, &args("c.epik", "10"));
    let read = |n: &str| fs::read(d.join(n)).unwrap();
    assert_eq!(read("a.epik"), read("b.epik"));
    assert_ne!(read("a.epik"), read("c.epik"));
    assert_eq!(read("a.epik.json"), read("b.epik.json"));
    assert_eq!(read("a.epik").len(), 16 + 8 * 64 * 64);
}

#[test]
fn pipeline_report_has_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    combined(d, "1");
    ok(
        d,
        &[
            "correct", "--in", "k.epik", "--method", "pa", "--ir", "--out", "c.epik", "--report",
            "r.json",
        ],
    );
    let r = json(&d.join("r.json"));
    for key in [
        "original",
        "corrected",
        "residual_percent",
        "roi",
        "config",
        "peak_shift",
    ] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["config"]["method"], "pa");
    assert_eq!(r["config"]["ir"]["interp_factor"], 64);
    assert_eq!(r["config"]["ir"]["mode"], "centered-average");
    assert_eq!(r["peak_shift"], -2);
    let (orig, corr) = (
        r["original"]["gsr"].as_f64().unwrap(),
        r["corrected"]["gsr"].as_f64().unwrap(),
    );
    assert!(corr < orig);
    let pct = r["residual_percent"].as_f64().unwrap();
    assert!((pct - 100.0 * corr / orig).abs() < 1e-9);
}

#[test]
fn five_configuration_export() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    combined(d, "2");
    ok(
        d,
        &["recon", "--in", "k.epik", "--out-image", "original.pgm"],
    );
    let configs: [(&str, &[&str]); 4] = [
        ("ref", &["--ref", "ref.epik", "--method", "ref"]),
        ("ref_ir", &["--ref", "ref.epik", "--method", "ref", "--ir"]),
        ("pa", &["--method", "pa"]),
        ("pa_ir", &["--method", "pa", "--ir"]),
    ];
    let mut gsr = Vec::new();
    for (name, extra) in configs {
        let out = format!("corrected_{name}.epik");
        let report = format!("{name}.json");
        let mut args = vec![
            "correct", "--in", "k.epik", "--out", &out, "--report", &report,
        ];
        args.extend_from_slice(extra);
        ok(d, &args);
        ok(
            d,
            &[
                "recon",
                "--in",
                &out,
                "--out-image",
                &format!("{name}.pgm"),
                "--out-raw",
                &format!("{name}.raw"),
            ],
        );
        let r = json(&d.join(&report));
        gsr.push((
            name,
            r["original"]["gsr"].as_f64().unwrap(),
            r["corrected"]["gsr"].as_f64().unwrap(),
        ));
        assert_eq!(
            fs::read(d.join(format!("{name}.raw"))).unwrap().len(),
            8 * 64 * 64
        );
        let pgm = fs::read(d.join(format!("{name}.pgm"))).unwrap();
        assert!(pgm.starts_with(b"P5\n64 64\n255\n"));
        assert_eq!(*pgm.iter().skip(13).max().unwrap(), 255);
    }
    for (name, orig, corr) in gsr {
        assert!(corr < orig, "{name}: {orig} -> {corr}");
    }
}

#[test]
fn metrics_matches_the_pipeline_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    combined(d, "3");
    ok(
        d,
        &[
            "correct", "--in", "k.epik", "--method", "pa", "--out", "c.epik", "--report", "r.json",
        ],
    );
    ok(
        d,
        &[
            "metrics",
            "--image",
            "c.epik",
            "--baseline",
            "r.json",
            "--out",
            "m.json",
        ],
    );
    let (r, m) = (json(&d.join("r.json")), json(&d.join("m.json")));
    let (a, b) = (
        r["corrected"]["gsr"].as_f64().unwrap(),
        m["gsr"].as_f64().unwrap(),
    );
    assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
    assert!(
        (m["residual_percent"].as_f64().unwrap() - r["residual_percent"].as_f64().unwrap()).abs()
            < 1e-3
    );

    ok(
        d,
        &[
            "metrics",
            "--image",
            "c.epik",
            "--roi-size",
            "8x8",
            "--noise-size",
            "4x4",
            "--noise-corner",
            "br",
            "--out",
            "m2.json",
        ],
    );
    let m2 = json(&d.join("m2.json"));
    assert_eq!(m2["roi"]["signal_size"], serde_json::json!([8, 8]));
    assert_eq!(m2["roi"]["noise_corner"], "br");
    assert!(m2["residual_percent"].is_null());
    // A baseline measured on other ROIs is not comparable.
    assert_eq!(
        code(
            d,
            &[
                "metrics",
                "--image",
                "c.epik",
                "--roi-size",
                "8x8",
                "--baseline",
                "m.json",
                "--out",
                "m3.json"
            ]
        ),
        3
    );
}

#[test]
fn profiles_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    combined(d, "4");
    ok(
        d,
        &[
            "profiles", "--in", "k.epik", "--axis", "col", "--out", "p.csv",
        ],
    );
    let csv = fs::read_to_string(d.join("p.csv")).unwrap();
    assert_eq!(csv.lines().count(), 64);
    assert!(csv
        .lines()
        .all(|l| l.split(',').count() == 64 && l.split(',').all(|v| v.parse::<f64>().is_ok())));

    ok(
        d,
        &[
            "sweep",
            "--in",
            "k.epik",
            "--interp-factors",
            "64,2,8",
            "--out",
            "s.json",
        ],
    );
    let s = json(&d.join("s.json"));
    let factors: Vec<u64> = s["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["interp_factor"].as_u64().unwrap())
        .collect();
    assert_eq!(factors, [64, 2, 8]);
    assert_eq!(s["entries"][0]["interp_points"], 4096);
    assert_eq!(s["method"], "pa");
    ok(
        d,
        &[
            "sweep",
            "--in",
            "k.epik",
            "--ref",
            "ref.epik",
            "--interp-factors",
            "4",
            "--out",
            "s2.json",
        ],
    );
    assert_eq!(json(&d.join("s2.json"))["method"], "ref");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["--help"]), 0);
    assert_eq!(code(d, &["--version"]), 0);
    assert_eq!(code(d, &["frobnicate"]), 3);
    assert_eq!(code(d, &["simulate"]), 3);
    assert_eq!(
        code(d, &["simulate", "--shift-even", "16", "--out", "x.epik"]),
        3
    );
    assert_eq!(
        code(d, &["simulate", "--radius", "20", "--out", "x.epik"]),
        3
    );
    assert_eq!(
        code(
            d,
            &["simulate", "--xphase-poly", "0.1,zz", "--out", "x.epik"]
        ),
        3
    );
    assert!(!d.join("x.epik").exists());

    combined(d, "5");
    assert_eq!(
        code(
            d,
            &["correct", "--in", "k.epik", "--method", "ref", "--out", "c.epik"]
        ),
        3
    );
    assert_eq!(
        code(
            d,
            &[
                "correct", "--in", "k.epik", "--method", "pa", "--ref", "ref.epik", "--out",
                "c.epik"
            ]
        ),
        3
    );
    assert_eq!(
        code(
            d,
            &[
                "correct",
                "--in",
                "k.epik",
                "--method",
                "pa",
                "--ir-passes",
                "2",
                "--out",
                "c.epik"
            ]
        ),
        3
    );
    assert_eq!(
        code(
            d,
            &[
                "correct",
                "--in",
                "k.epik",
                "--method",
                "pa",
                "--ir",
                "--interp-factor",
                "0",
                "--out",
                "c.epik"
            ]
        ),
        3
    );
    assert_eq!(
        code(
            d,
            &[
                "correct",
                "--in",
                "missing.epik",
                "--method",
                "pa",
                "--out",
                "c.epik"
            ]
        ),
        1
    );
    assert!(!d.join("c.epik").exists());

    // Sidecars that disagree on acquisition parameters.
    let side = fs::read_to_string(d.join("ref.epik.json")).unwrap();
    fs::write(
        d.join("ref.epik.json"),
        side.replace("\"te_ms\":8.6", "\"te_ms\":9.6"),
    )
    .unwrap();
    assert_eq!(
        code(
            d,
            &[
                "correct", "--in", "k.epik", "--ref", "ref.epik", "--method", "ref", "--out",
                "c.epik"
            ]
        ),
        3
    );
    fs::write(d.join("ref.epik.json"), "{not json").unwrap();
    assert_eq!(
        code(
            d,
            &[
                "correct", "--in", "k.epik", "--ref", "ref.epik", "--method", "ref", "--out",
                "c.epik"
            ]
        ),
        2
    );

    let bytes = fs::read(d.join("k.epik")).unwrap();
    fs::write(d.join("short.epik"), &bytes[..100]).unwrap();
    assert_eq!(
        code(d, &["recon", "--in", "short.epik", "--out-image", "o.pgm"]),
        2
    );
    let mut long = bytes.clone();
    long.push(0);
    fs::write(d.join("long.epik"), &long).unwrap();
    assert_eq!(
        code(d, &["recon", "--in", "long.epik", "--out-image", "o.pgm"]),
        2
    );
    let mut version = bytes.clone();
    version[4] = 9;
    fs::write(d.join("version.epik"), &version).unwrap();
    assert_eq!(
        code(
            d,
            &["recon", "--in", "version.epik", "--out-image", "o.pgm"]
        ),
        2
    );
    fs::write(d.join("text.txt"), "hello").unwrap();
    assert_eq!(
        code(d, &["metrics", "--image", "text.txt", "--out", "m.json"]),
        2
    );

    // All-zero data: peaks and metrics are undefined.
    let mut zero = bytes[..16].to_vec();
    zero.resize(bytes.len(), 0);
    fs::write(d.join("zero.epik"), &zero).unwrap();
    assert_eq!(
        code(
            d,
            &[
                "correct",
                "--in",
                "zero.epik",
                "--method",
                "pa",
                "--out",
                "c.epik"
            ]
        ),
        4
    );
    assert_eq!(
        code(d, &["metrics", "--image", "zero.epik", "--out", "m.json"]),
        4
    );
    assert!(!d.join("o.pgm").exists());
    assert!(!d.join("m.json").exists());
}

#[test]
fn raw_acquisition_order_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    combined(d, "6");
    let mut raw = fs::read(d.join("k.epik")).unwrap();
    // Clear the reversal flag and undo the even-row reversal by hand; even
    // rows are 1-indexed, so 0-indexed 1, 3, 5, ...
    let flags = 6;
    assert_eq!(raw[flags] & 1, 1);
    raw[flags] &= !1;
    let row_bytes = 8 * 64;
    for r in (1..64).step_by(2) {
        let row = &mut raw[16 + r * row_bytes..16 + (r + 1) * row_bytes];
        let mut samples: Vec<[u8; 8]> = row.chunks(8).map(|c| c.try_into().unwrap()).collect();
        samples.reverse();
        row.copy_from_slice(&samples.concat());
    }
    fs::write(d.join("raw.epik"), &raw).unwrap();
    ok(
        d,
        &[
            "correct", "--in", "k.epik", "--method", "pa", "--out", "a.epik",
        ],
    );
    ok(
        d,
        &[
            "correct", "--in", "raw.epik", "--method", "pa", "--out", "b.epik",
        ],
    );
    assert_eq!(
        fs::read(d.join("a.epik")).unwrap(),
        fs::read(d.join("b.epik")).unwrap()
    );
}
