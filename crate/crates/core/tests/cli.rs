use std::path::PathBuf;
use std::process::{Command, Output};

fn condcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condcap"))
        .args(args)
        .env_remove("CONDCAP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn single_value(o: &Output) -> f64 {
    let text = stdout(o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|&c| c == "qm" || c == "value").unwrap();
    row[k].parse().unwrap()
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("condcap-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn qm_examples() {
    for (a, b, expected) in [("7+5i", "-1+2i", 1.17336589158553), ("4+5i", "-2+1i", 1.02479880902234)] {
        let o = condcap(&["qm", "--A", a, "--B", b]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!((single_value(&o) - expected).abs() < 1e-9);
    }
}

#[test]
fn malformed_literal_is_a_usage_error() {
    let o = condcap(&["qm", "--A", "7+5k", "--B", "-1+2i"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["errors"][0]["kind"], "usage");
}

#[test]
fn unknown_command_is_a_usage_error() {
    assert_eq!(condcap(&["table9"]).status.code(), Some(2));
}

#[test]
fn table2_deviations_small() {
    let o = condcap(&["table2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|&c| c == "abs_deviation").unwrap();
    let mut rows = 0;
    for line in lines {
        let dev: f64 = line.split(',').nth(k).unwrap().parse().unwrap();
        assert!(dev < 1e-6, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 36);
}

#[test]
fn table4_reports_fifteen_digits() {
    let o = condcap(&["table4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("a,b,c,d,cap,"));
    let row = text
        .lines()
        .skip(1)
        .find(|l| {
            let key: Vec<f64> = l.split(',').take(4).map(|x| x.parse().unwrap()).collect();
            key == [10.0, 1.0, 0.25, 0.75]
        })
        .unwrap();
    assert!(row.starts_with("10.0000000000000,1.00000000000000,0.250000000000000,"), "{row}");
    assert!(row.contains("4.00013977481468"), "{row}");
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch_dir("env");
    let o = Command::new(env!("CARGO_BIN_EXE_condcap"))
        .args(["--format", "json", "table1"])
        .env("CONDCAP_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let written: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("table1.json")).unwrap()).unwrap();
    assert_eq!(written["rows"].as_array().unwrap().len(), 8);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn explicit_output_path() {
    let dir = scratch_dir("out");
    let path = dir.join("lb.csv");
    let o = condcap(&["--out", path.to_str().unwrap(), "lbnew"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 5);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn et_curve_range_checked_before_solving() {
    let started = std::time::Instant::now();
    let o = condcap(&["et-curve", "--r", "0.5", "--tmin", "0.1", "--tmax", "5", "--steps", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(started.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["--h", "0.0625", "--levels", "2", "sweep-edi", "--family", "hyperbolic", "--count", "2", "--seed", "4"];
    let first = condcap(&args);
    let second = condcap(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}
