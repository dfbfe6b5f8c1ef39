use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn noclone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noclone"))
        .args(args)
        .env_remove("NOCLONE_N_TRUNC")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("noclone-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn num(v: &serde_json::Value, path: &[&str]) -> f64 {
    path.iter().fold(v, |v, k| &v[*k]).as_f64().unwrap_or_else(|| panic!("{path:?} missing in {v}"))
}

#[test]
fn vacuum_bounds() {
    let v = json_of(&noclone(&["bounds", "fock:0"]));
    assert!((num(&v, &["ultimate", "bound"]) - 0.682556).abs() < 1e-5);
    assert!((num(&v, &["gaussian"]) - 2.0 / 3.0).abs() < 1e-12);
    assert!((num(&v, &["classical"]) - 0.5).abs() < 1e-9);
    assert!(num(&v, &["ultimate", "residual"]) < 1e-6);
    assert_eq!(v["config"]["n_trunc"], "120");
}

#[test]
fn cat_at_zero_amplitude_is_the_vacuum() {
    let a = json_of(&noclone(&["bounds", "cat:0,1", "--solver", "fock"]));
    let b = json_of(&noclone(&["bounds", "fock:0"]));
    assert!((num(&a, &["ultimate", "bound"]) - num(&b, &["ultimate", "bound"])).abs() < 1e-9);
}

#[test]
fn grid_and_fock_routes_agree_on_one_photon() {
    let f = json_of(&noclone(&["bounds", "fock:1", "--solver", "fock"]));
    let g = json_of(&noclone(&["bounds", "fock:1", "--solver", "grid", "--grid-size", "256"]));
    assert_eq!(g["ultimate"]["solver"], "grid");
    let d = (num(&f, &["ultimate", "bound"]) - num(&g, &["ultimate", "bound"])).abs();
    assert!(d < 1e-4, "routes differ by {d}");
}

#[test]
fn gaussian_teleport_threshold() {
    let v = json_of(&noclone(&["teleport", "fock:0", "--bound=gaussian"]));
    assert!((num(&v, &["r_c"]) - (1.0f64 / 3.0).atanh()).abs() < 1e-9);
    let u = json_of(&noclone(&["teleport", "fock:0", "--bound", "0.6"]));
    assert!((num(&u, &["fidelity_at_r_c"]) - 0.6).abs() < 1e-9);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bounds", "squeezed:1"][..],
        &["bounds", "cat:1,3"],
        &["sweep", "fig9"],
        &["qng", "gaussian"],
        &["teleport", "fock:0", "--bound", "best"],
        &["bounds", "fock:0", "--set", "ntrunc=10"],
        &["bounds", "fock:0", "--grid-size", "15"],
        &["frobnicate"],
    ] {
        let out = noclone(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn unknown_environment_key_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_noclone")).args(["bounds", "fock:0"]).env("NOCLONE_NTRUNC", "10").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn clipped_kernel_exits_with_four() {
    // the interference lobes of a wide cat sit far outside the default grid
    let out = noclone(&["bounds", "cat:40,1", "--solver", "grid"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unsupported_route_exits_with_three() {
    let out = noclone(&["bounds", "cat:6,1", "--solver", "fock"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_precedence() {
    let dir = scratch("precedence");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("run.conf");
    std::fs::write(&file, "n_trunc = 60\nsolver = fock\n").unwrap();
    let f = file.to_str().unwrap();
    let v = json_of(&noclone(&["bounds", "fock:0", "--config", f]));
    assert_eq!(v["config"]["n_trunc"], "60");
    let env = Command::new(env!("CARGO_BIN_EXE_noclone")).args(["bounds", "fock:0", "--config", f]).env("NOCLONE_N_TRUNC", "70").output().unwrap();
    assert_eq!(json_of(&env)["config"]["n_trunc"], "70");
    let flag = Command::new(env!("CARGO_BIN_EXE_noclone"))
        .args(["bounds", "fock:0", "--config", f, "--ntrunc", "80"])
        .env("NOCLONE_N_TRUNC", "70")
        .output()
        .unwrap();
    assert_eq!(json_of(&flag)["config"]["n_trunc"], "80");
}

fn read(dir: &Path, file: &str) -> Vec<u8> {
    std::fs::read(dir.join(file)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(file).display()))
}

#[test]
fn sweeps_are_reproducible_and_echo_their_config() {
    let dir = scratch("sweep");
    let cheap = ["--set", "i_max=120", "--set", "lambda_points=12", "--ntrunc", "40"];
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.join(k.to_string());
        let mut args = vec!["sweep", "s6", "--out", out.to_str().unwrap()];
        args.extend(cheap);
        let o = noclone(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push(out.join("s6"));
    }
    for file in ["pnes_frontier.csv", "tmsv.csv", "required_photon_number.csv"] {
        assert_eq!(read(&runs[0], file), read(&runs[1], file), "{file} differs between runs");
    }
    // the echoes differ only in the output directory
    let settings = |dir: &Path| -> Vec<String> {
        String::from_utf8(read(dir, "config.txt")).unwrap().lines().filter(|l| !l.starts_with("out ")).map(String::from).collect()
    };
    assert_eq!(settings(&runs[0]), settings(&runs[1]));
    let echo = String::from_utf8(read(&runs[0], "config.txt")).unwrap();
    assert!(echo.contains("i_max = 120") && echo.contains("lambda_points = 12"), "{echo}");
    let meta: serde_json::Value = serde_json::from_slice(&read(&runs[0], "s6.meta.json")).unwrap();
    assert_eq!(meta["dataset"], "s6");
    assert_eq!(meta["config"]["n_trunc"], "40");

    // the echoed configuration reproduces the run
    let again = dir.join("again");
    let conf = runs[0].join("config.txt");
    let o = noclone(&["sweep", "s6", "--config", conf.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(read(&runs[0], "pnes_frontier.csv"), read(&again.join("s6"), "pnes_frontier.csv"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn fidelity_sweep_has_expected_shape() {
    let dir = scratch("fig2");
    let o = noclone(&["sweep", "fig2", "--ntrunc", "60", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    let mut rd = csv::Reader::from_path(dir.join("fig2/thresholds.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let r_c: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(r_c.windows(2).all(|w| w[1] > w[0]), "ultimate thresholds grow with n: {r_c:?}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn qng_family_writes_a_scatter() {
    let dir = scratch("qng");
    let o = noclone(&["qng", "sup01", "--set", "samples=3", "--grid-size", "64", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rd = csv::Reader::from_path(dir.join("qng-sup01/scatter.csv")).unwrap();
    assert_eq!(rd.records().count(), 3);
    assert!(dir.join("qng-sup01/qng-sup01.meta.json").exists());
    let _ = std::fs::remove_dir_all(&dir);
}
