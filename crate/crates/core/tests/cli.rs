use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bifract"));
    for (k, _) in std::env::vars() {
        if k.starts_with("BIFRACT_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TENT: &str = "x,y,s\n0,0,0.8\n0.5,1,0.8\n1,0,0.8\n";
const THREE: &str = "x,y,s\n0,0,0.5\n1,0.8,0.6\n2,0.3,0.4\n3,0,0.5\n";

#[test]
fn interpolate_writes_the_full_lattice() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "three.csv", THREE);
    let out = dir.path().join("f.csv");
    let res = run(&["interpolate", "--in", s(&input), "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    assert!(stdout(&res).contains("samples=3073"));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,f"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, f) = l.split_once(',').unwrap();
            (x.parse().unwrap(), f.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), (1 << 10) * 3 + 1);
    for (i, (x, y)) in [(0.0, 0.0), (1.0, 0.8), (2.0, 0.3), (3.0, 0.0)].into_iter().enumerate() {
        assert_eq!(rows[i << 10], (x, y));
    }
}

#[test]
fn interpolate_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "tent.csv", TENT);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        assert_eq!(code(&run(&["interpolate", "--in", s(&input), "--out", s(out), "--depth", "8"])), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn zero_scaling_outputs_the_polygon() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "flat.csv", "x,y,s\n0,0,0\n0.5,1,0\n1,0,0\n");
    let res = run(&["interpolate", "--in", s(&input), "--depth", "3"]);
    assert_eq!(code(&res), 0);
    for line in stdout(&res).lines().skip(1) {
        let (x, f) = line.split_once(',').unwrap();
        let (x, f): (f64, f64) = (x.parse().unwrap(), f.parse().unwrap());
        let h = if x <= 0.5 { 2.0 * x } else { 2.0 - 2.0 * x };
        assert!((f - h).abs() < 1e-15, "{x}: {f} vs {h}");
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.csv");
    assert_eq!(code(&run(&["interpolate", "--in", s(&missing)])), 2);

    let unsorted = write(dir.path(), "bad.csv", "x,y,s\n0,0,0.5\n2,1,0.5\n1,0,0.5\n");
    assert_eq!(code(&run(&["interpolate", "--in", s(&unsorted)])), 2);

    let loud = write(dir.path(), "loud.csv", "x,y,s\n0,0,0.5\n0.5,1,1.2\n1,0,0.5\n");
    assert_eq!(code(&run(&["interpolate", "--in", s(&loud)])), 3);

    let tent = write(dir.path(), "tent.csv", TENT);
    let img = dir.path().join("a.pgm");
    let res = run(&[
        "render", "--in", s(&tent), "--out", s(&img), "--mode", "deterministic", "--ymin", "0", "--ymax", "0.2",
        "--width", "64", "--height", "48",
    ]);
    assert_eq!(code(&res), 4);

    let signed = write(dir.path(), "signed.csv", "x,y,s\n0,0,0.5\n0.5,1,-0.5\n1,0,0.5\n");
    assert_eq!(code(&run(&["dimension", "--in", s(&signed), "--closed-form"])), 5);
}

#[test]
fn dimension_reports_closed_form_and_degenerate_cases() {
    let dir = TempDir::new().unwrap();
    let tent = write(dir.path(), "tent.csv", TENT);
    let res = run(&["dimension", "--in", s(&tent), "--closed-form"]);
    assert_eq!(code(&res), 0);
    assert!(stdout(&res).contains("closed_form=1.67807190511263"), "{}", stdout(&res));

    let low = write(dir.path(), "low.csv", "x,y,s\n0,0,0.4\n0.5,1,0.4\n1,0,0.4\n");
    let res = run(&["dimension", "--in", s(&low), "--closed-form"]);
    assert!(stdout(&res).contains("degenerate: gamma<=1, dimension=1"));

    let line = write(dir.path(), "line.csv", "x,y,s\n0,0,0.9\n0.5,0.5,0.9\n1,1,0.9\n");
    let res = run(&["dimension", "--in", s(&line), "--closed-form"]);
    assert!(stdout(&res).contains("degenerate: collinear, dimension=1"));
}

#[test]
fn empirical_dimension_writes_report() {
    let dir = TempDir::new().unwrap();
    let tent = write(dir.path(), "tent.csv", TENT);
    let report = dir.path().join("r.csv");
    let plot = dir.path().join("r.svg");
    let res = run(&[
        "dimension", "--in", s(&tent), "--empirical", "--rmin", "4", "--rmax", "8", "--oversample", "4",
        "--report", s(&report), "--plot", s(&plot),
    ]);
    assert_eq!(code(&res), 0);
    let slope: f64 = stdout(&res)
        .lines()
        .find_map(|l| l.strip_prefix("slope="))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope - 1.678).abs() < 0.15, "{slope}");
    let csv = fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("r,N_r,slope_partial"));
    assert_eq!(csv.lines().count(), 6);
    assert!(fs::read_to_string(&plot).unwrap().contains("<svg"));
}

#[test]
fn verify_passes_on_builtin_and_chain() {
    let dir = TempDir::new().unwrap();
    let log = dir.path().join("log.jsonl");
    let res = run(&["verify", "--trials", "2000", "--r", "3", "--log", s(&log)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let lines = fs::read_to_string(&log).unwrap();
    for line in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true, "{line}");
    }

    let chain = write(dir.path(), "chain.csv", "x,ylow,yhigh\n0,0.1,0.6\n0.5,0.3,0.7\n1,0.2,0.5\n");
    let res = run(&["verify", "--in", s(&chain), "--suite", "vertices"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn collinear_render_is_a_segment() {
    let dir = TempDir::new().unwrap();
    let line = write(dir.path(), "line.csv", "x,y,s\n0,0,0.7\n0.5,0.5,0.7\n1,1,0.7\n");
    let img = dir.path().join("a.pgm");
    let res = run(&[
        "render", "--in", s(&line), "--out", s(&img), "--points", "20000", "--width", "64", "--height", "64",
        "--ymin", "-0.05", "--ymax", "1.05",
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let bytes = fs::read(&img).unwrap();
    let header = b"P5\n64 64\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    let pixels = &bytes[header.len()..];
    for (i, &p) in pixels.iter().enumerate() {
        if p == 0 {
            let (col, row) = ((i % 64) as f64 + 0.5, (i / 64) as f64 + 0.5);
            let x = col / 64.0;
            let y = 1.05 - row / 64.0 * 1.1;
            assert!((x - y).abs() < 0.05, "dark pixel off the diagonal at ({col}, {row})");
        }
    }
}

#[test]
fn renders_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "three.csv", THREE);
    for mode in ["chaos", "deterministic"] {
        let (a, b) = (dir.path().join("a.pgm"), dir.path().join("b.pgm"));
        for out in [&a, &b] {
            let res = run(&[
                "render", "--in", s(&input), "--out", s(out), "--mode", mode, "--points", "50000", "--k", "6",
                "--width", "200", "--height", "150",
            ]);
            assert_eq!(code(&res), 0);
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{mode}");
    }
}
