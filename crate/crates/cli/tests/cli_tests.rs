//! End-to-end tests of the `urafocus` binary: exit codes, CSV shape,
//! reproducibility, and the preset plumbing.

use std::path::Path;
use std::process::{Command, Output};

fn urafocus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_urafocus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("output file exists")
}

#[test]
fn beamdepth_preset_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let res = urafocus(&["beamdepth", "--preset", "fig3", "--out", out.to_str().unwrap()]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let (ta, tb) = (read(&a), read(&b));
    assert_eq!(ta, tb, "same config must produce identical bytes");
    assert!(ta.contains("phi_rad,theta_rad,rf_m,bd_m,rf_min_m,rf_max_m,alpha_3db"));
    assert!(ta.starts_with("# urafocus v"));
    // the sweep rises toward the edges: compare boresight to the widest angle
    let rows: Vec<&str> = ta.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 61);
    let bd = |row: &str| -> f64 {
        let field = row.split(',').nth(3).unwrap();
        if field == "inf" {
            f64::INFINITY
        } else {
            field.parse().unwrap()
        }
    };
    let (edge, mid) = (bd(rows[0]), bd(rows[30]));
    assert!(edge > mid, "window should widen off boresight");
    // nondecreasing in |phi| on the right half
    let mut prev = mid;
    for row in &rows[30..] {
        let v = bd(row);
        assert!(v >= prev * (1.0 - 1e-9), "bd not increasing with |phi|");
        prev = v;
    }
}

#[test]
fn missing_config_and_preset_is_a_usage_error() {
    let res = urafocus(&["beamdepth"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let res = urafocus(&["beamdepth", "--config", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("extra.json");
    std::fs::write(
        &path,
        r#"{"experiment":"eta-sweep","n_bs":4096,"carrier_hz":28e9,"surprise":true}"#,
    )
    .unwrap();
    let res = urafocus(&["eta-sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn preset_subcommand_mismatch_exits_2() {
    let res = urafocus(&["beamdepth", "--preset", "fig6"]);
    assert_eq!(res.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&res.stderr);
    assert!(msg.contains("sumrate"), "should name the mismatch: {msg}");
}

#[test]
fn runtime_domain_failure_exits_3() {
    // passes load-time validation (fraction inside (0, 0.5)) but the
    // square row's focal range lands below 1.2 D at run time
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eta.json");
    std::fs::write(
        &path,
        r#"{"experiment":"eta-sweep","n_bs":4096,"carrier_hz":28e9,"rf_fraction":0.005}"#,
    )
    .unwrap();
    let res = urafocus(&["eta-sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_4() {
    let res = urafocus(&[
        "eta-sweep",
        "--preset",
        "fig4",
        "--out",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn gnuplot_flag_writes_companion_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4.csv");
    let res = urafocus(&[
        "eta-sweep",
        "--preset",
        "fig4",
        "--out",
        out.to_str().unwrap(),
        "--gnuplot",
    ]);
    assert!(res.status.success());
    let script = read(&dir.path().join("fig4.gp"));
    assert!(script.contains("plot"));
    assert!(script.contains("fig4.csv"));
    // but gnuplot without a file target is a config error
    let res = urafocus(&["eta-sweep", "--preset", "fig4", "--gnuplot"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn stdout_when_no_out_given() {
    let res = urafocus(&["eta-sweep", "--preset", "fig4"]);
    assert!(res.status.success());
    let text = String::from_utf8_lossy(&res.stdout);
    assert!(text.contains("eta,n1,n2,rayleigh_m"));
}

#[test]
fn ebrd_preset_orders_aspect_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig5.csv");
    let res = urafocus(&["ebrd", "--preset", "fig5", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = read(&out);
    // collect the boresight row per aspect ratio
    let mut boresight: Vec<(f64, f64)> = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (eta, phi, e): (f64, f64, f64) = (
            f[0].parse().unwrap(),
            f[1].parse().unwrap(),
            f[3].parse().unwrap(),
        );
        if phi.abs() < 1e-12 {
            boresight.push((eta, e));
        }
    }
    assert_eq!(boresight.len(), 5);
    let at = |eta: f64| {
        boresight
            .iter()
            .find(|(e, _)| (e - eta).abs() / eta < 0.05)
            .unwrap()
            .1
    };
    let min = boresight.iter().map(|&(_, e)| e).fold(f64::INFINITY, f64::min);
    let max = boresight.iter().map(|&(_, e)| e).fold(0.0f64, f64::max);
    assert_eq!(at(1.0), min, "square must have the shortest focusing limit");
    assert_eq!(at(0.004), max, "near-linear shape must have the longest");
    // the boresight rows agree with the library
    let cfg = urafocus_core::geometry::UraConfig::half_wavelength(64, 64, 28e9).unwrap();
    let direct = urafocus_core::focusing::ebrd(&cfg, 0.0, std::f64::consts::FRAC_PI_2)
        .unwrap()
        .ebrd_m;
    assert!((at(1.0) - direct).abs() <= 1e-12 * direct);
    // tall shape: nearly flat across azimuth
    let tall: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let eta: f64 = f[0].parse().unwrap();
            ((eta - 0.015625).abs() < 1e-9).then(|| f[3].parse::<f64>().unwrap())
        })
        .collect();
    let (lo, hi) = tall
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    assert!(hi / lo - 1.0 < 0.01, "tall-array limit should be near-flat in azimuth");
}

#[test]
fn sumrate_seed_and_trials_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("tiny.json");
    std::fs::write(
        &cfg_path,
        r#"{
            "experiment": "sumrate",
            "runs": [{
                "array": { "n1": 16, "n2": 8, "carrier_hz": 28e9 },
                "codebook": "polar",
                "users": { "count": 3, "region": { "kind": "ebrd" } }
            }],
            "snr_db": [0.0, 10.0],
            "trials": 4
        }"#,
    )
    .unwrap();
    let out1 = dir.path().join("r1.csv");
    let out2 = dir.path().join("r2.csv");
    let out3 = dir.path().join("r3.csv");
    for (out, seed) in [(&out1, "11"), (&out2, "11"), (&out3, "12")] {
        let res = urafocus(&[
            "sumrate",
            "--config",
            cfg_path.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    assert_eq!(read(&out1), read(&out2), "same seed, same bytes");
    assert_ne!(read(&out1), read(&out3), "different seed, different bytes");
    assert!(read(&out1).contains("# seed: 11"));

    // trials = 0 produces a header-only table
    let out0 = dir.path().join("r0.csv");
    let res = urafocus(&[
        "sumrate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--trials",
        "0",
        "--out",
        out0.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let rows: Vec<&str> = read(&out0)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|_| "")
        .collect();
    assert!(rows.is_empty(), "no data rows without trials");

    // seed override on a non-random experiment is rejected
    let res = urafocus(&["eta-sweep", "--preset", "fig4", "--seed", "3"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn shipped_example_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).expect("docs/examples exists") {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = urafocus_cli::ExperimentConfig::from_json(&text)
            .unwrap_or_else(|e| panic!("{} failed to validate: {e}", path.display()));
        // file name matches the subcommand it documents
        let stem = path.file_stem().unwrap().to_str().unwrap();
        assert!(
            stem.starts_with(cfg.kind_name()) || cfg.kind_name().starts_with(stem),
            "{stem} vs {}",
            cfg.kind_name()
        );
        seen += 1;
    }
    assert_eq!(seen, 5, "one example per experiment kind");
}

#[test]
fn gain_profile_crossings_bracket_closed_form_window() {
    // run a dense boresight profile for a 32 x 32 array focused at 60 %
    // of the focusing limit and read the 3 dB crossings out of the CSV
    let cfg = urafocus_core::geometry::UraConfig::half_wavelength(32, 32, 28e9).unwrap();
    let limit = urafocus_core::focusing::ebrd(&cfg, 0.0, std::f64::consts::FRAC_PI_2)
        .unwrap()
        .ebrd_m;
    let r_f = 0.6 * limit;
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("gp.json");
    std::fs::write(
        &cfg_path,
        format!(
            r#"{{
                "experiment": "gain-profile",
                "array": {{ "n1": 32, "n2": 32, "carrier_hz": 28e9 }},
                "rf_m": {r_f},
                "z_grid": {{ "points": 4096 }}
            }}"#
        ),
    )
    .unwrap();
    let out = dir.path().join("gp.csv");
    let res = urafocus(&[
        "gain-profile",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = read(&out);
    let mut crossings = Vec::new();
    let mut max_gap = 0.0f64;
    let mut prev: Option<(f64, f64)> = None;
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let z: f64 = f[0].parse().unwrap();
        let exact: f64 = f[1].parse().unwrap();
        let closed: f64 = f[2].parse().unwrap();
        max_gap = max_gap.max((exact - closed).abs());
        if let Some((zp, gp)) = prev {
            if (gp < 0.5) != (exact < 0.5) {
                crossings.push(0.5 * (zp + z));
            }
        }
        prev = Some((z, exact));
    }
    assert!(max_gap <= 3e-2, "summation vs closed form gap {max_gap}");
    assert_eq!(crossings.len(), 2, "one crossing on each side of the focus");
    let window = urafocus_core::focusing::beamdepth(
        &cfg,
        0.0,
        std::f64::consts::FRAC_PI_2,
        r_f,
    )
    .unwrap();
    let rel_lo = (crossings[0] - window.rf_min_m).abs() / window.rf_min_m;
    let upper = window.rf_max_m.finite().unwrap();
    let rel_hi = (crossings[1] - upper).abs() / upper;
    assert!(rel_lo <= 0.02, "near edge off by {rel_lo}");
    assert!(rel_hi <= 0.02, "far edge off by {rel_hi}");
}
