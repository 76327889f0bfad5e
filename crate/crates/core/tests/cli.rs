use std::path::Path;
use std::process::{Command, Output};

use scw_qkd::config::RunConfig;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scw-qkd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn small_sweep() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.sweep.stop = 45.0;
    cfg.sweep.steps = 10;
    cfg.montecarlo.windows = 200_000;
    cfg
}

fn rows(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let body = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, body)
}

#[test]
fn every_subcommand_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_sweep().to_toml().unwrap());
    let cases = [
        ("qber-curve", "loss_db,length_km,E,G,Q"),
        ("keyrate-curve", "loss_db,length_km,Q,G,chi,K_b92,K_bb84-osd"),
        ("optimal-mu", "loss_db,length_km,mu_star,m_star,K_star,K_fixed,status"),
        ("compare-bb84", "loss_db,length_km,mu_s,"),
        ("validate", "quantity,estimate,analytic,std_err,z,pass"),
    ];
    for (cmd, header) in cases {
        let out = dir.path().join(format!("{cmd}.csv"));
        let o = run(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.starts_with(header), "{cmd}: {text}");
        let (_, body) = rows(&text);
        assert!(!body.is_empty());
    }
}

#[test]
fn numbers_carry_enough_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_sweep().to_toml().unwrap());
    let o = run(&["keyrate-curve", "--config", &cfg]);
    let (_, body) = rows(&String::from_utf8(o.stdout).unwrap());
    for cell in body.iter().flatten() {
        let mantissa = cell.split('e').next().unwrap().replace(['-', '.'], "");
        assert!(mantissa.len() >= 9, "{cell}");
    }
}

#[test]
fn flags_override_config() {
    let o = run(&["keyrate-curve", "--protocol", "bb84-osd", "--detector", "apd", "--mode", "exact"]);
    assert!(o.status.success());
    let (header, body) = rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(header.last().unwrap(), "K_bb84-osd");
    assert_eq!(header.len(), 6);
    // APD rate is already zero by 30 dB
    let k30: f64 = body[30][5].parse().unwrap();
    assert_eq!(k30, 0.0);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["validate", "--seed", "7", "--config", "/dev/null"]);
    let b = run(&["validate", "--seed", "7", "--config", "/dev/null"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["validate", "--seed", "8", "--config", "/dev/null"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn failures_exit_nonzero_with_error_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "[sweep]\nvariable = \"loss_db\"\nstart = 5.0\nstop = 1.0\nsteps = 3\n");
    let cases: [(&[&str], &str); 4] = [
        (&["qber-curve", "--config", &bad], "config"),
        (&["qber-curve", "--config", "/no/such/file.toml"], "io"),
        (&["qber-curve", "--detector", "pmt"], "usage"),
        (&["keyrate-curve", "--out", "/no/such/dir/k.csv"], "io"),
    ];
    for (args, kind) in cases {
        let o = run(args);
        assert!(!o.status.success(), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        let line = err.lines().last().unwrap();
        assert!(line.starts_with(&format!("error kind={kind} message=")), "{args:?}: {err}");
    }
}

#[test]
fn shipped_config_round_trips_through_a_file() {
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml");
    let cfg = RunConfig::load(&shipped).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("copy.toml");
    std::fs::write(&copy, cfg.to_toml().unwrap()).unwrap();
    assert_eq!(RunConfig::load(&copy).unwrap(), cfg);
}
