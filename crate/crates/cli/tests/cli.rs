use std::path::Path;
use std::process::{Command, Output};

use hienergy::genset::{gen, SetRecipe};
use hienergy::moments::{energy_k, t_k};
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hienergy")).current_dir(dir).args(args).env_remove("HIENERGY_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = run(dir, args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn with_a() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("a.txt"), "group: Z\n0\n1\n3\n").unwrap();
    d
}

#[test]
fn compute_quantities() {
    let d = with_a();
    let p = d.path();
    assert_eq!(ok(p, &["compute", "Ek", "--k", "2", "--set", "a.txt"]), "15\n");
    assert_eq!(ok(p, &["compute", "Ek", "--k", "1", "--set", "a.txt"]), "9\n");
    assert_eq!(ok(p, &["compute", "Ek", "--k", "3", "--set", "a.txt"]), "33\n");
    assert_eq!(ok(p, &["compute", "Tk", "--k", "2", "--set", "a.txt"]), "15\n");
    assert_eq!(ok(p, &["compute", "Dk", "--k", "2", "--set", "a.txt"]), "25\n");
    assert_eq!(ok(p, &["compute", "Sk", "--k", "2", "--set", "a.txt"]), "24\n");
    assert_eq!(ok(p, &["compute", "mag", "--set", "a.txt", "--b", "a.txt"]), "2\n");
    assert_eq!(ok(p, &["compute", "levels", "--set", "a.txt"]), "3 1 1 1 1 1 1\n");
    assert_eq!(ok(p, &["compute", "magk", "--k", "2", "--recipe", "interval:len=2"]), "7/2\n");
    assert_eq!(ok(p, &["compute", "sigmak", "--k", "2", "--recipe", "interval:N=4,len=1"]), "1\n");
    assert_eq!(ok(p, &["compute", "dim", "--recipe", "interval:N=8,start=1,len=3"]), "2\n");
    assert_eq!(ok(p, &["compute", "Ralpha", "--alpha", "0.9", "--recipe", "gap:N=4,d=2,L=2"]), "group: Z/4\n0\n2\n");
}

#[test]
fn output_formats() {
    let d = with_a();
    let p = d.path();
    let v: Value = serde_json::from_str(&ok(p, &["--json", "compute", "Ek", "--k", "2", "--set", "a.txt"])).unwrap();
    assert_eq!(v["value"], 15);
    assert_eq!(v["quantity"], "Ek");
    assert_eq!(ok(p, &["--csv", "compute", "Ek", "--k", "2", "--set", "a.txt"]), "quantity,k,value\nEk,2,15\n");
    let v: Value = serde_json::from_str(&ok(p, &["--json", "compute", "mag", "--set", "a.txt"])).unwrap();
    assert_eq!(v["value"], "2");
    let v: Value = serde_json::from_str(&ok(p, &["--json", "compute", "lambdas", "--k", "1", "--recipe", "interval:len=2"])).unwrap();
    assert!(v.is_object());
    let csv = ok(p, &["--csv", "compute", "spectrum", "--recipe", "gap:N=4,d=2,L=2"]);
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("xi,re,im,abs\n"));
}

#[test]
fn verify_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let out = ok(p, &["verify", "C1,C4", "--recipe", "random:N=64,delta=0.25,seed=1"]);
    assert!(out.contains("report: hienergy-report.json"));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(p.join("hienergy-report.json")).unwrap()).unwrap();
    assert!(!rep["results"].as_array().unwrap().is_empty());
    ok(p, &["verify", "C15", "--recipe", "qr:p=13"]);
    assert_eq!(run(p, &["verify", "C99", "--recipe", "qr:p=13"]).status.code(), Some(2));
    assert_eq!(run(p, &["verify", "C1"]).status.code(), Some(2));
    assert_eq!(run(p, &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn cap_and_parse_errors() {
    let d = with_a();
    let p = d.path();
    let o = run(p, &["--cap-tuples", "10", "compute", "Dk", "--k", "3", "--set", "a.txt"]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::write(p.join("bad.txt"), "group: Z\n0\n x\n").unwrap();
    let o = run(p, &["compute", "Ek", "--set", "bad.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3, column 2"), "{err}");
}

#[test]
fn extraction_reports() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["gen", "interval:len=16", "--out", "ap16.txt"]);
    ok(p, &["gen", "interval:N=64,len=16", "--out", "g.txt"]);
    let line = ok(p, &["extract", "bsg2", "--set", "ap16.txt", "--eps", "1", "--nm", "1,1", "--out", "bsg2.json"]);
    assert!(line.starts_with("bsg2: ") && line.contains("checks=ok"), "{line}");
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(p.join("bsg2.json")).unwrap()).unwrap();
    assert!(rep["ratio"].as_f64().unwrap().is_finite());

    ok(p, &["extract", "cs", "--set", "g.txt", "--b", "g.txt", "--k", "4", "--trials", "200", "--seed", "1", "--out", "cs.json"]);
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(p.join("cs.json")).unwrap()).unwrap();
    let t = rep["outputs"]["T"]["elements"].as_array().map(|v| v.len());
    assert!(t.unwrap_or(0) > 0, "{}", rep["outputs"]["T"]);
    assert_eq!(rep["outputs"]["violators"]["elements"].as_array().map(|v| v.len()), Some(0));

    std::fs::write(p.join("c.txt"), "group: Z/7\n0\n1\n2\n").unwrap();
    assert_eq!(ok(p, &["extract", "config", "--set", "c.txt", "--c", "0,1,2"]), "(0,1)\n");
    std::fs::write(p.join("s.txt"), "group: Z/97\n0\n1\n").unwrap();
    assert_eq!(ok(p, &["extract", "config", "--set", "s.txt", "--c", "0,1,2,3"]), "none\n");
    assert_eq!(ok(p, &["extract", "cover", "--recipe", "interval:N=5,len=2"]), "4\n");
    ok(p, &["extract", "bsg1", "--set", "ap16.txt"]);
    ok(p, &["extract", "smallT4", "--set", "ap16.txt"]);
}

#[test]
fn gen_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    for r in ["random:N=64,delta=0.25,seed=3", "random:group=Z/4xZ/8,size=9,seed=2", "convex:n=12", "qr:p=29"] {
        ok(p, &["gen", r, "--out", "s.txt"]);
        let a = gen(&r.parse::<SetRecipe>().unwrap()).unwrap();
        let e = ok(p, &["compute", "Ek", "--k", "3", "--set", "s.txt"]);
        assert_eq!(e.trim(), energy_k(&a, 3).unwrap().to_string(), "{r}");
        let t = ok(p, &["compute", "Tk", "--k", "2", "--set", "s.txt"]);
        assert_eq!(t.trim(), t_k(&a, 2).unwrap().to_string(), "{r}");
        assert_eq!(ok(p, &["gen", r]), a.to_file_string());
    }
}

#[test]
fn output_is_thread_independent() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let args = |n: &'static str, out: &'static str| {
        ["--threads", n, "suite", "C1,C4,C16", "--recipe", "random:N=64,size=10,seed=4", "--recipe", "qr:p=13", "--out", out]
    };
    let a = ok(p, &args("1", "r1.json"));
    let b = ok(p, &args("3", "r3.json"));
    assert_eq!(a.replace("r1.json", ""), b.replace("r3.json", ""));
    assert_eq!(std::fs::read(p.join("r1.json")).unwrap(), std::fs::read(p.join("r3.json")).unwrap());
}
