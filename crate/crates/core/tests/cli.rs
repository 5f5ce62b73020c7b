use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rqbm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqbm"))
        .args(args)
        .current_dir(cwd)
        .env("RQBM_LOG", "off")
        .output()
        .unwrap()
}

fn footer(text: &str, key: &str) -> f64 {
    let prefix = format!("# {key}=");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no footer {key}"))
        .parse()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn evolve_then_madelung_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let evolve = [
        "evolve",
        "--init",
        "plane",
        "--k0",
        "1",
        "--n",
        "32",
        "--length",
        "6.283185307179586",
        "--dt",
        "0.001",
        "--steps",
        "4",
        "--snapshot-stride",
        "1",
        "--out",
        "ev",
    ];
    let o = rqbm(&evolve, d);
    assert!(o.status.success(), "{}", stderr(&o));
    let traj = fs::read_to_string(d.join("ev/traj.csv")).unwrap();
    assert_eq!(
        traj.lines().next().unwrap(),
        "t,N,N_mod,E,continuity_residual,hj_residual"
    );

    // files given out of time order are sorted
    let o = rqbm(
        &[
            "madelung",
            "ev/snap_0.003.csv",
            "ev/snap_0.001.csv",
            "ev/snap_0.002.csv",
            "--out",
            "md",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(d.join("md/madelung.csv")).unwrap();
    let l = 2.0 * std::f64::consts::PI;
    assert!((footer(&text, "t") - 0.002).abs() < 1e-15);
    assert!((footer(&text, "E") / l - (2f64.sqrt() - 1.0)).abs() < 1e-6);
    assert!(footer(&text, "continuity_residual") < 1e-6);
    assert!(footer(&text, "hj_residual") < 1e-6);
    assert!(footer(&text, "reconstruction_error") < 1e-12);

    let o = rqbm(
        &[
            "madelung",
            "ev/snap_0.csv",
            "ev/snap_0.001.csv",
            "ev/snap_0.003.csv",
            "--out",
            "bad",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(!d.join("bad").exists());
}

#[test]
fn json_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let base = [
        "dispersion",
        "--model",
        "phase-diffusion",
        "--diffusion",
        "2",
        "--k-steps",
        "20",
    ];
    assert!(rqbm(&[&base[..], &["--out", "c"]].concat(), d).status.success());
    assert!(rqbm(&[&base[..], &["--out", "j", "--format", "json"]].concat(), d)
        .status
        .success());
    let csv = fs::read_to_string(d.join("c/roots.csv")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("j/roots.json")).unwrap()).unwrap();
    let records = json["records"].as_array().unwrap();
    assert_eq!(records.len(), 20);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = csv.lines().nth(5).unwrap().split(',').collect();
    for (h, v) in header.iter().zip(&row) {
        match v.parse::<f64>() {
            Ok(x) => assert_eq!(records[4][*h].as_f64(), Some(x), "{h}"),
            Err(_) => assert_eq!(records[4][*h].as_str(), Some(*v), "{h}"),
        }
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("run.toml"),
        "model = \"collisional\"\ngamma = 0.5\nk-min = 0.1\nk-max = 1.0\nk-steps = 7\nk-scale = \"linear\"\n",
    )
    .unwrap();
    let o = rqbm(
        &["dispersion", "--config", "run.toml", "--k-steps", "4", "--out", "o"],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(d.join("o/roots.csv")).unwrap();
    let ks: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ks.len(), 4);
    assert!((ks[1] - 0.4).abs() < 1e-15);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("collisional,")));

    fs::write(d.join("bad.toml"), "model = \"radiative\"\ntua = 1.0\n").unwrap();
    let o = rqbm(&["dispersion", "--config", "bad.toml", "--out", "b"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tua"), "{}", stderr(&o));
}

#[test]
fn spectrum_domain_error_names_the_level() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // a deep uniform well pushes ε below −½, where √(1 + 2ε) is undefined
    fs::write(d.join("u.txt"), "-0.8\n".repeat(64)).unwrap();
    let o = rqbm(
        &[
            "spectrum",
            "--potential",
            "file",
            "--potential-file",
            "u.txt",
            "--n",
            "64",
            "--length",
            "10",
            "--levels",
            "2",
            "--out",
            "s",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("index 0"), "{}", stderr(&o));
    assert!(!d.join("s").exists());
}

#[test]
fn dissipative_evolve_writes_density_modes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = rqbm(
        &[
            "evolve",
            "--model",
            "radiative",
            "--tau",
            "0.2",
            "--n",
            "16",
            "--length",
            "50",
            "--dt",
            "0.5",
            "--steps",
            "4",
            "--snapshot-stride",
            "2",
            "--out",
            "m",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(d.join("m/modes.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,k,re_rho,im_rho");
    assert!(footer(&text, "growing_roots") >= 0.0);
}

#[test]
fn help_and_unknown_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(rqbm(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(rqbm(&["fly"], dir.path()).status.code(), Some(2));
}
