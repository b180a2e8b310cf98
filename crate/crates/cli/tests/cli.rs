use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fenchel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fenchel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn trig_symmetric_hexagon() {
    let v = json(&fenchel(&["trig", "--l1", "2.6339", "--l2", "2.6339", "--lp", "2.6339"]));
    let d = v["d"].as_f64().unwrap();
    assert!((d - 1.3170).abs() < 1e-4);
    assert!(v["bounds"]["lower"].as_f64().unwrap() <= d && d <= v["bounds"]["upper"].as_f64().unwrap());
    assert!(v["formula"].as_str().unwrap().contains("cosh"));
}

#[test]
fn trig_csv_has_seventeen_digits() {
    let out = fenchel(&["trig", "--l1", "1", "--l2", "2", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "l1,l2,lp,d,lower,upper,c1,c2,d1,d2");
    let d = lines.next().unwrap().split(',').nth(3).unwrap().to_string();
    let mantissa = d.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn nonconvexity_csv_ends_with_verdict() {
    let out = fenchel(&["nonconvexity", "--truncate", "1000", "--output", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,d_n,cumulative,asymptote,ratio\n"));
    assert_eq!(text.lines().last().unwrap(), "INCOMPLETE_BY_CONVERGENCE");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1002);
}

#[test]
fn reports_are_deterministic() {
    let a = fenchel(&["nonconvexity", "--truncate", "200"]);
    let b = fenchel(&["nonconvexity", "--truncate", "200"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["truncation"], 200);
    assert!(v["tail_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn trichotomy_witnesses_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let wdir = dir.path().join("w");
    let v = json(&fenchel(&[
        "trichotomy",
        "--mc",
        "twist-power:0.5",
        "--subspace",
        "dr:2",
        "--emit-witnesses",
        wdir.to_str().unwrap(),
    ]));
    assert_eq!(v["verdict"]["type"], "SOMETIMES");
    let qc = wdir.join("qc.json");
    let not_qc = wdir.join("not_qc.json");
    for (file, expect) in [(&qc, "QC"), (&not_qc, "NOT_QC")] {
        let r = json(&fenchel(&["classify", "--mc", "twist-power:0.5", "--config", file.to_str().unwrap()]));
        assert_eq!(r["matsuzaki"]["verdict"], expect);
        let m = json(&fenchel(&["drmember", "--r", "2", "--config", file.to_str().unwrap()]));
        assert_eq!(m["requested"]["membership"], "MEMBER");
    }
    let never = json(&fenchel(&["trichotomy", "--mc", "twist-power:0.5", "--subspace", "dr:3"]));
    assert_eq!(never["verdict"]["type"], "NEVER");
}

#[test]
fn transverse_bound_is_reported() {
    let v = json(&fenchel(&[
        "trichotomy",
        "--mc",
        "twist-power:0.5",
        "--subspace",
        "dr:3",
        "--transverse-upper",
        "2",
    ]));
    assert!(v["verdict"]["detail"].as_str().unwrap().contains("K = 2 r(C/2)"));
}

#[test]
fn metric_zigzag_and_segment() {
    let dir = tempfile::tempdir().unwrap();
    let z = write(dir.path(), "z.json", r#"{"lengths": {"const": 1.0}}"#);
    let w = write(dir.path(), "w.json", r#"{"lengths": {"A": 4.0, "p": 0, "q": 1}, "twists": {"const": 0.5}}"#);
    let m = json(&fenchel(&["metric", "--config", &z, "--config", &w, "--truncate", "30"]));
    let full = m["value"].as_f64().unwrap();
    assert!(full > 0.0 && full < 2.0);
    let mut last = f64::INFINITY;
    for t in ["0.5", "0.75", "0.875", "0.9375"] {
        let v = json(&fenchel(&["zigzag", "--t", t, "--config", &z, "--config", &w, "--truncate", "30"]));
        let d = v["distance_to_end"].as_f64().unwrap();
        assert!(d <= last);
        last = d;
    }
    let s = json(&fenchel(&["segment", "--s", "1", "--config", &z, "--config", &w, "--truncate", "30"]));
    assert_eq!(s["distance_to_end"].as_f64().unwrap(), 0.0);
}

#[test]
fn complete_classifies_config() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"lengths": {"A": 4.0, "p": 0, "q": 1}}"#);
    let v = json(&fenchel(&["complete", "--config", &f, "--truncate", "100"]));
    assert_eq!(v["verdict"]["status"], "INCOMPLETE_BY_CONVERGENCE");
    assert_eq!(v["end_geometry"], "HALF_PLANE_BOUNDARY");
    let c = write(dir.path(), "c.json", r#"{"lengths": {"const": 1.0}}"#);
    let v = json(&fenchel(&["complete", "--config", &c, "--truncate", "100"]));
    assert_eq!(v["verdict"]["status"], "COMPLETE_BY_DIVERGENCE");
}

#[test]
fn classify_support() {
    let v = json(&fenchel(&["classify", "--mc", "twist:3:2,perm:1-2"]));
    assert_eq!(v["support"], "FINITE");
    let v = json(&fenchel(&["classify", "--mc", "twist-power:0.5"]));
    assert_eq!(v["support"], "INFINITE");
    assert_eq!(v["count_class"]["class"], "UNBOUNDED");
}

#[test]
fn mapping_class_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let mc = write(
        dir.path(),
        "mc.json",
        r#"{"generators": [{"kind": "multi-twist", "counts": {"const": 2.0}}]}"#,
    );
    let v = json(&fenchel(&["trichotomy", "--mc", &mc, "--subspace", "systole:1"]));
    assert_eq!(v["verdict"]["type"], "SOMETIMES");
}

#[test]
fn extract_flute_cantor() {
    let v = json(&fenchel(&["extract-flute", "--family", "cantor-tree", "--depth", "10"]));
    assert_eq!(v["spine_length"], 10);
    let out = fenchel(&["extract-flute", "--family", "flute", "--depth", "5", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("spine,")).count(), 6);
}

#[test]
fn exit_codes() {
    let bad_flag = fenchel(&["trig", "--l1", "1", "--l2", "1", "--bogus"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let domain = fenchel(&["trig", "--l1", "-1", "--l2", "1"]);
    assert_eq!(domain.status.code(), Some(2));
    assert!(!domain.stderr.is_empty() && domain.stdout.is_empty());
    let missing = fenchel(&["metric"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_mc = fenchel(&["classify", "--mc", "twist-nope:1"]);
    assert_eq!(bad_mc.status.code(), Some(2));
    let shift = fenchel(&["trichotomy", "--mc", "shift:1", "--subspace", "full"]);
    assert!(shift.status.success());
    let numerical = fenchel(&["trig", "--l1", "1", "--l2", "2.5", "--lp", "3", "--tol", "1e-300"]);
    assert_eq!(numerical.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&numerical.stderr).contains("numerical error"));
}
