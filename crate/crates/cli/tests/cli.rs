//! End-to-end runs of the `polytrunc` binary on the bundled scenarios.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polytrunc"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

fn out_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("polytrunc-test-{}-{tag}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

fn run(name: &str, tag: &str, extra: &[&str]) -> (Output, PathBuf) {
    let dir = out_dir(tag);
    let out = bin().arg("run").arg(scenario(name)).arg("--out").arg(&dir).args(extra).output().unwrap();
    (out, dir)
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap()
}

fn csv_rows(dir: &Path, file: &str) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::Reader::from_path(dir.join(file)).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records().map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect()).collect()
}

#[test]
fn intro_grid_reproduces_the_closed_form() {
    let (out, dir) = run("intro_1d", "intro", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rows = csv_rows(&dir, "03-grid-values.csv");
    assert_eq!(rows.len(), 19);
    for r in &rows {
        let (b, a): (f64, f64) = (-r["a0"].parse::<f64>().unwrap(), r["a1"].parse().unwrap());
        let j: f64 = r["value"].parse().unwrap();
        assert!(a < b);
        assert!((j - (2.0 - a + b)).abs() < 1e-8 * j, "{r:?}");
        assert!(r["value"].contains('e'), "floats use exponent notation");
    }
    let report = read(&dir, "03-grid.txt");
    assert!(report.contains("PASS") && report.contains("2 - a0 - a1"));
}

#[test]
fn obtuse_fails_with_not_acute_and_a_probe_table() {
    let (out, dir) = run("obtuse", "obtuse", &[]);
    assert_eq!(out.status.code(), Some(1));
    let j: serde_json::Value = serde_json::from_str(&read(&dir, "03-integral.json")).unwrap();
    assert_eq!(j["status"], "fail");
    assert_eq!(j["error"]["kind"], "NotAcute");
    let rows = csv_rows(&dir, "03-integral-divergence-probe.csv");
    assert_eq!(rows.len(), 6);
    let v: Vec<f64> = rows.iter().map(|r| r["abs_integral"].parse().unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] > w[0] + 1.0), "{v:?}");
    // The partition failure is expected, so that task passes.
    let p: serde_json::Value = serde_json::from_str(&read(&dir, "02-partition.json")).unwrap();
    assert_eq!(p["status"], "pass");
    assert_eq!(p["results"]["holds"], false);
    assert!(read(&dir, "summary.txt").contains("NotAcute"));
}

#[test]
fn rectangle_fit_recovers_the_coefficients() {
    let (out, dir) = run("rectangle", "rect", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let coefs = csv_rows(&dir, "03-coefficients-coefficients.csv");
    assert_eq!(coefs.len(), 15);
    let get = |m: &str| -> f64 { coefs.iter().find(|r| r["monomial"] == m).unwrap()["coefficient"].parse().unwrap() };
    for (m, want) in [("1", 4.0), ("a0", -2.0), ("a3", -2.0), ("a0*a1", 1.0), ("a2*a3", 1.0), ("a0*a2", 0.0), ("a1^2", 0.0)] {
        assert!((get(m) - want).abs() < 1e-4, "{m}: {}", get(m));
    }
}

#[test]
fn other_bundled_scenarios() {
    for (name, code) in [("decompositions", 0), ("hexagon", 0), ("exponential", 1)] {
        let (out, dir) = run(name, name, &[]);
        assert_eq!(out.status.code(), Some(code), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(dir.join("summary.json").exists());
    }
}

#[test]
fn outputs_are_deterministic_across_runs_and_jobs() {
    let (a, da) = run("hexagon", "det-a", &["--seed", "17"]);
    let (b, db) = run("hexagon", "det-b", &["--seed", "17", "--jobs", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(files(&da), files(&db));
    let (_, dc) = run("decompositions", "det-c", &["--jobs", "3"]);
    let (_, dd) = run("decompositions", "det-d", &[]);
    assert_eq!(files(&dc), files(&dd));
}

#[test]
fn validate_round_trips_every_bundled_scenario() {
    for name in ["intro_1d", "rectangle", "obtuse", "hexagon", "decompositions", "exponential"] {
        let out = bin().arg("validate").arg("--print").arg(scenario(name)).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{name}");
        let dir = out_dir(&format!("rt-{name}"));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("again.toml");
        fs::write(&p, &out.stdout).unwrap();
        let again = bin().arg("validate").arg("--print").arg(&p).output().unwrap();
        assert_eq!(again.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&again.stderr));
        assert_eq!(out.stdout, again.stdout, "{name}");
    }
}

#[test]
fn parse_and_validation_errors_have_their_exit_codes() {
    let dir = out_dir("errors");
    fs::create_dir_all(&dir).unwrap();
    let text = fs::read_to_string(scenario("intro_1d")).unwrap();

    let p = dir.join("typo.toml");
    fs::write(&p, text.replace("expect_acute", "expect_cute")).unwrap();
    let out = bin().arg("validate").arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line") && err.contains("column") && err.contains("expect_cute"), "{err}");

    let p = dir.join("header.toml");
    fs::write(&p, text.replacen("# polytrunc-scenario v1", "# something else", 1)).unwrap();
    assert_eq!(bin().arg("validate").arg(&p).output().unwrap().status.code(), Some(2));

    let p = dir.join("name.toml");
    fs::write(&p, text.replace("support = \"unit\"\nsamples", "support = \"missing\"\nsamples")).unwrap();
    let out = bin().arg("run").arg(&p).arg("--out").arg(dir.join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));

    let p = dir.join("kexpr.toml");
    fs::write(&p, text.replace("1 + exp(-abs(x1))", "1 / x1")).unwrap();
    assert_eq!(bin().arg("validate").arg(&p).output().unwrap().status.code(), Some(3));
}

#[test]
fn arrangement_cap_is_read_from_the_environment() {
    let dir = out_dir("cap");
    let out = bin()
        .env("POLYTRUNC_MAX_ARRANGEMENT", "1")
        .arg("run")
        .arg(scenario("decompositions"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let j: serde_json::Value = serde_json::from_str(&read(&dir, "01-brianchon-gram.json")).unwrap();
    assert_eq!(j["error"]["kind"], "ArrangementTooLarge");
}
