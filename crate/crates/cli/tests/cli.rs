use std::fs;
use std::process::{Command, Output};

fn dqdsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqdsim"))
        .args(args)
        .env_remove("DQDSIM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn data(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn headers_match_schemas() {
    let cases: [(&[&str], &str); 8] = [
        (&["spectrum", "--eps-range", "0:0.1:0.05"], "epsilon_mev,xi_mev,E0_mev,E1_mev,J_mev,J_ghz"),
        (&["exchange-tilt", "--eps-range", "0:0.1:0.05"], "scheme,control_mev,J_clean_ghz,J_imp_ghz,delta_J_ghz,rel_noise"),
        (&["exchange-barrier", "--xi-range", "1:1.3:0.1"], "scheme,control_mev,J_clean_ghz,J_imp_ghz,delta_J_ghz,rel_noise"),
        (&["noise-compare", "--J-mhz", "100"], "J_ghz,rel_tilt,rel_barrier,chi"),
        (&["qfactor", "--J-mhz", "100"], "J_ghz,Q_tilt,Q_barrier,Q_constmodel"),
        (&["impurity-scan"], "direction,Rc_over_a,rel_tilt,rel_barrier"),
        (&["near-impurity", "--J-mhz", "100"], "J_ghz,rel_tilt,rel_barrier,chi"),
        (&["potential-profile"], "x_nm,y_nm,V_meV"),
    ];
    for (args, expected) in cases {
        let o = dqdsim(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let csv = stdout(&o);
        assert!(csv.starts_with("# dqdsim_version = "), "{args:?}");
        assert!(csv.contains(&format!("# experiment = {}\n", args[0])));
        assert_eq!(header(&csv), expected, "{args:?}");
        assert!(!data(&csv).is_empty(), "{args:?}");
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_dqdsim"))
            .args(["qfactor", "--J-mhz", "300", "--seed", "7", "--out"])
            .arg(&path)
            .env("DQDSIM_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "4");
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(String::from_utf8(a).unwrap().contains("# seed = 7\n"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_dqdsim"))
        .arg("potential-profile")
        .env("DQDSIM_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("DQDSIM_THREADS"));
}

#[test]
fn impurity_scan_has_three_tagged_blocks() {
    let csv = stdout(&dqdsim(&["impurity-scan", "--J-mhz", "242"]));
    let blocks: Vec<&str> = csv.lines().filter(|l| l.starts_with("# block ")).collect();
    assert_eq!(blocks, ["# block x", "# block y", "# block xy"]);
    assert!(csv.contains("# J_target_ghz = 0.242\n"));
    let rows = data(&csv);
    assert_eq!(rows.len(), 3 * 31);
    for tag in ["x", "y", "xy"] {
        assert_eq!(rows.iter().filter(|r| r[0] == tag).count(), 31);
    }
}

#[test]
fn near_impurity_defaults() {
    let csv = stdout(&dqdsim(&["near-impurity", "--J-mhz", "100"]));
    assert!(csv.contains("# impurity = -150,50,-0.01\n"), "{csv}");
    let first = &data(&csv)[0];
    assert_eq!(first[3], "1");
}

#[test]
fn spectrum_gap_matches_exchange_tilt_at_zero_detuning() {
    let s = stdout(&dqdsim(&["spectrum", "--eps-range", "0:0:1"]));
    let t = stdout(&dqdsim(&["exchange-tilt", "--eps-range", "0:0:1"]));
    let row = &data(&s)[0];
    let num = |x: &str| x.parse::<f64>().unwrap();
    assert_eq!(num(&row[1]), 1.3);
    let gap = num(&row[3]) - num(&row[2]);
    assert!((gap - num(&row[4])).abs() <= 1e-12 * num(&row[4]));
    assert_eq!(row[5], data(&t)[0][2]);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# device\ndevice.a_nm = 90\ncontrol.xi_mev = 1.2\nimpurity.x_nm = -500\nimpurity.y_nm = 500\nimpurity.charge_e = -0.5\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let csv = stdout(&dqdsim(&["exchange-tilt", "--config", cfg, "--eps-range", "0:0.1:0.1", "--charge-e", "-1"]));
    assert!(csv.contains("# device.a_nm = 90\n"));
    assert!(csv.contains("# control.xi_mev = 1.2\n"));
    assert!(csv.contains("# impurity = -500,500,-1\n"), "{csv}");
    let csv = stdout(&dqdsim(&["exchange-tilt", "--config", cfg, "--impurity", "-700,700", "--eps-range", "0:0:1"]));
    assert!(csv.contains("# impurity = -700,700,-0.5\n"), "{csv}");
}

#[test]
fn config_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "device.a_nm = 100\nbogus.key = 3\n").unwrap();
    let o = dqdsim(&["potential-profile", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = dqdsim(&["potential-profile", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flags_and_unreachable_targets_fail() {
    assert!(!dqdsim(&["spectrum", "--no-such-flag"]).status.success());
    let o = dqdsim(&["noise-compare", "--J-mhz", "5"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside the reachable range"));
}

#[test]
fn barrier_spectrum_sweeps_xi() {
    let csv = stdout(&dqdsim(&["spectrum", "--scheme", "barrier", "--xi-range", "1:1.3:0.1"]));
    let rows = data(&csv);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[0] == "0"));
    let j: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(j.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn full_mode_is_recorded_and_differs() {
    let paper = stdout(&dqdsim(&["exchange-tilt", "--eps-range", "0:0:1"]));
    let full = stdout(&dqdsim(&["exchange-tilt", "--eps-range", "0:0:1", "--mode", "full"]));
    assert!(full.contains("# mode = full\n"));
    assert_ne!(data(&paper)[0][2], data(&full)[0][2]);
}

#[test]
fn quick_validate_passes_and_catches_corrupt_bessel() {
    let o = dqdsim(&["validate", "--quick"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let o = dqdsim(&["validate", "--quick", "--corrupt-bessel"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL oracle"));
}
