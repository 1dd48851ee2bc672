use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hawkes_longrange::io::read_csv;

const BIN: &str = env!("CARGO_BIN_EXE_hawkes-longrange");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const SUB: &str =
    "kernel = { family = \"exponential\", a = 0.5, b = 1.0 }\nalpha = 1.5\nL = 4\nT = 20.0\n\
target = \"subcritical_law\"\nreplicas = 20\ntimes = [10.0, 20.0]\nseed = 3\n";

#[test]
fn theta_reports_root() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "k.toml",
        "kernel = { family = \"exponential\", a = 2.0, b = 1.0 }\n",
    );
    let out = run(&[
        "theta",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = read_csv(&dir.path().join("theta.csv")).unwrap();
    let row = table.rows.iter().find(|r| r[0] == "theta").unwrap();
    assert_eq!(row[1].parse::<f64>().unwrap(), 1.0);
    assert!(table
        .metadata
        .echo
        .iter()
        .any(|l| l == "seed = 0 (default)"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let unknown = config(dir.path(), "u.toml", "alpha = 1.5\nwidth = 3\n");
    let out = run(&["theta", "--config", unknown.to_str().unwrap(), "--out", d]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let regime = config(
        dir.path(),
        "r.toml",
        "kernel = { family = \"exponential\", a = 2.0, b = 1.0 }\ntarget = \"subcritical_law\"\n",
    );
    assert_eq!(
        code(&run(&[
            "theta",
            "--config",
            regime.to_str().unwrap(),
            "--out",
            d
        ])),
        3
    );

    let boom = config(
        dir.path(),
        "b.toml",
        "kernel = { family = \"exponential\", a = 3.0, b = 1.0 }\nalpha = 1.5\nL = 2\nT = 20.0\nexplosion_guard = 500\n",
    );
    assert_eq!(
        code(&run(&[
            "simulate",
            "--config",
            boom.to_str().unwrap(),
            "--out",
            d
        ])),
        5
    );

    let alpha_one = config(dir.path(), "a.toml", "alpha = 1.0\n");
    let out = run(&[
        "stable-check",
        "--config",
        alpha_one.to_str().unwrap(),
        "--out",
        d,
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha = 1"));

    assert_eq!(code(&run(&["theta"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn simulate_writes_sorted_log_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "s.toml", SUB);
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "both",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let log = read_csv(&dir.path().join("events.csv")).unwrap();
    assert_eq!(log.header, ["site", "time"]);
    assert_eq!(log.metadata.seed, 3);
    let keys: Vec<(i64, f64)> = log
        .rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert!(keys
        .windows(2)
        .all(|w| w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 <= w[1].1)));
    let text = std::fs::read_to_string(dir.path().join("events.csv")).unwrap();
    assert!(text.starts_with("# hawkes-longrange v"));
    assert!(text.lines().next().unwrap().contains("seed=3 config-hash="));

    let table = read_csv(&dir.path().join("convergence.csv")).unwrap();
    assert_eq!(table.rows.len(), 4);
    assert!(table
        .reals("theory")
        .unwrap()
        .iter()
        .all(|&v| (v - 2.0).abs() < 1e-10));
    let svg = std::fs::read_to_string(dir.path().join("convergence.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains(&format!("config-hash={}", table.metadata.config_hash)));
}

#[test]
fn seed_flag_changes_hash_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "s.toml", SUB);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, seed) in [(&a, "3"), (&b, "4")] {
        let o = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(code(&o), 0);
    }
    let (ta, tb) = (
        read_csv(&a.join("events.csv")).unwrap(),
        read_csv(&b.join("events.csv")).unwrap(),
    );
    assert_ne!(ta.metadata.config_hash, tb.metadata.config_hash);
    assert_ne!(ta.rows, tb.rows);
}

#[test]
fn meanfield_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "m.toml",
        "kernel = { family = \"exponential\", a = 2.0, b = 1.0 }\nalpha = 1.5\nL = 3\nT = 5.0\nh = 0.01\nsites = [0, 1, 3]\n",
    );
    let d = dir.path().to_str().unwrap();
    assert_eq!(
        code(&run(&[
            "meanfield",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            d
        ])),
        0
    );
    let table = read_csv(&dir.path().join("meanfield.csv")).unwrap();
    assert_eq!(table.header, ["t", "site", "m", "x", "rescaled"]);
    assert_eq!(table.rows.len(), 501 * 3);
    let last = table.rows.last().unwrap();
    let rescaled: f64 = last[4].parse().unwrap();
    // e^{-t} m_t = 2 − (2 + t) e^{-t} for a = 2, b = 1, μ = 1
    assert!(
        (rescaled - (2.0 - 7.0 * (-5.0f64).exp())).abs() < 1e-3,
        "{rescaled}"
    );
    assert!(!dir.path().join("meanfield.svg").exists());

    let input = dir.path().join("meanfield.csv");
    let out = run(&[
        "plot",
        "--input",
        input.to_str().unwrap(),
        "--y",
        "x",
        "--group",
        "site",
        "--log-y",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(dir.path().join("meanfield.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
    let zero = run(&[
        "plot",
        "--input",
        input.to_str().unwrap(),
        "--y",
        "m",
        "--log-y",
    ]);
    assert_ne!(code(&zero), 0);
}

#[test]
fn lattice_powers_and_stable_check() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cfg = config(
        dir.path(),
        "l.toml",
        "alpha = 1.5\nL = 16\npowers = [1, 3]\nllt_steps = [4, 16]\n",
    );
    assert_eq!(
        code(&run(&[
            "lattice-powers",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            d
        ])),
        0
    );
    let powers = read_csv(&dir.path().join("lattice_powers.csv")).unwrap();
    assert_eq!(powers.rows.len(), 2 * 33);
    let mass: f64 = powers
        .rows
        .iter()
        .filter(|r| r[0] == "3")
        .map(|r| r[2].parse::<f64>().unwrap())
        .sum();
    assert!((mass - 1.0).abs() < 1e-12);
    let eps = read_csv(&dir.path().join("row_sq_sup.csv")).unwrap();
    assert_eq!(eps.rows.len(), 3);

    assert_eq!(
        code(&run(&[
            "stable-check",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            d,
            "--format",
            "both"
        ])),
        0
    );
    let llt = read_csv(&dir.path().join("stable_check.csv")).unwrap();
    assert_eq!(
        llt.header,
        [
            "alpha",
            "n",
            "sup_error",
            "rescaled_sup_error",
            "tv_error",
            "deficit"
        ]
    );
    assert!(dir.path().join("stable_check.svg").exists());
}

#[test]
fn verify_against_detects_changes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let out = run(&["verify", "--out", a.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout)
        .lines()
        .all(|l| l.starts_with("PASS")));

    // same seed, tampered table: tolerance failure
    std::fs::create_dir_all(&b).unwrap();
    for entry in std::fs::read_dir(&a).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, b.join(p.file_name().unwrap())).unwrap();
    }
    let lattice = b.join("lattice.csv");
    let text = std::fs::read_to_string(&lattice).unwrap();
    let (head, tail) = text
        .rsplit_once('\n')
        .map(|(h, _)| h.rsplit_once('\n').unwrap())
        .unwrap();
    std::fs::write(
        &lattice,
        format!("{head}\n{}\n", tail.replacen("64", "65", 1)),
    )
    .unwrap();
    let out = run(&[
        "verify",
        "--out",
        a.to_str().unwrap(),
        "--seed",
        "5",
        "--against",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lattice.csv"));

    // different seed: hashes differ and the comparison is refused
    let out = run(&[
        "verify",
        "--out",
        b.to_str().unwrap(),
        "--seed",
        "6",
        "--against",
        a.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("hash mismatch"));
}
