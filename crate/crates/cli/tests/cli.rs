use std::fs;
use std::process::{Command, Output};

use hyperbolic_vinberg::coxeter::CoxeterDiagram;
use hyperbolic_vinberg::table::FormReport;
use hyperbolic_vinberg::BigRational;

fn realcubic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_realcubic")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn vinberg_lists_roots() {
    let text = stdout(&realcubic(&["vinberg", "--diag", "-1,1,1,1,1"]));
    assert!(text.contains("root 4 (1,-1,-1,-1,0) norm=2 height=1/2"), "{text}");
    assert!(text.contains("chi 1/1920"));
    assert!(text.contains("volume 1/1440 pi^2 = 0.006853891945200943"));
}

#[test]
fn vinberg_json_report() {
    let out = realcubic(&["vinberg", "--diag", "-1,1,1,1,1", "--format", "json", "--precision", "20"]);
    let report = FormReport::from_json(&out.stdout).unwrap();
    assert_eq!(report.facet_count, 5);
    assert_eq!(report.chi_pgamma, BigRational::new(1.into(), 1920.into()));
    assert_eq!(report.volume.unwrap().numeric, "0.0068538919452009434853");
}

#[test]
fn vinberg_from_form_file_with_v0() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("form.txt");
    fs::write(&path, "# I_{4,1}\ndim 5\ndiag -1 1 1 1 1\n").unwrap();
    let text = stdout(&realcubic(&["vinberg", "--form", path.to_str().unwrap(), "--v0", "2,1,1,1,0"]));
    assert!(text.contains("chi 1/1920"), "{text}");
}

#[test]
fn limit_exhaustion_exits_3() {
    let out = realcubic(&["vinberg", "--diag", "-1,3,3,3,3", "--max-height", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("height limit 2"));
}

#[test]
fn invalid_input_exits_4() {
    assert_eq!(realcubic(&["vinberg", "--diag", "1,1,1"]).status.code(), Some(4));
    assert_eq!(realcubic(&["vinberg", "--diag", "-1,x,1"]).status.code(), Some(4));
    assert_eq!(realcubic(&["table", "--format", "yaml"]).status.code(), Some(4));
}

#[test]
fn missing_file_exits_5() {
    assert_eq!(realcubic(&["vinberg", "--form", "/nonexistent/form.txt"]).status.code(), Some(5));
    let out = realcubic(&["fixed-lattice", "--out", "/nonexistent/dir/out.txt"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn usage_error_exits_2() {
    assert_eq!(realcubic(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(realcubic(&["table", "--max-height", "many"]).status.code(), Some(2));
}

#[test]
fn fixed_lattices() {
    let text = stdout(&realcubic(&["fixed-lattice"]));
    assert!(text.contains("# chi_0 [+1 +1 +1 +1 +1]\ndim 5\ndiag -1 1 1 1 1\n"), "{text}");
    assert!(text.contains("# chi_4 [+1 -1 -1 -1 -1]\ndim 5\ndiag -1 3 3 3 3\n"), "{text}");
    let one = stdout(&realcubic(&["fixed-lattice", "--j", "3"]));
    assert_eq!(one, "# chi_3 [+1 +1 -1 -1 -1]\ndim 5\ndiag -1 1 3 3 3\n");
    assert_eq!(realcubic(&["fixed-lattice", "--j", "5"]).status.code(), Some(4));
}

#[test]
fn galois_signatures() {
    let text = stdout(&realcubic(&["galois", "--diag", "-1,r3,1,1,1"]));
    assert_eq!(text, "signature (4,1)\nconjugate (3,2)\nnonarithmetic true\n");
    let text = stdout(&realcubic(&["galois", "--diag", "-1,1,1,1,3"]));
    assert!(text.ends_with("nonarithmetic false\n"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.txt");
    fs::write(&path, "dim 5\ndiag -1 2+1*r3 1 1 1\n").unwrap();
    let out = realcubic(&["galois", "--form", path.to_str().unwrap(), "--format", "json"]);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["conjugate_signature"], serde_json::json!([4, 1]));
    assert_eq!(value["nonarithmeticity_witness"], serde_json::json!(false));
}

#[test]
fn euler_of_diagram_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("237.txt");
    fs::write(&path, "node 0 norm=1\nnode 1 norm=1\nnode 2 norm=1\nbond 1 2 3\nbond 0 2 m:7\n").unwrap();
    let text = stdout(&realcubic(&["euler", "--diagram", path.to_str().unwrap(), "--dim", "2"]));
    assert!(text.contains("chi_W -1/84\n"), "{text}");
    assert!(text.contains("volume 1/42 pi"), "{text}");

    let open = dir.path().join("open.txt");
    fs::write(&open, "node 0 norm=1\nnode 1 norm=1\nbond 0 1 3\n").unwrap();
    assert_eq!(realcubic(&["euler", "--diagram", open.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn diagram_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.txt");
    let status = realcubic(&["diagram-export", "--diag", "-1,1,1,1,3", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let diagram = CoxeterDiagram::from_text(&text).unwrap();
    assert_eq!(diagram.len(), 7);
    assert_eq!(diagram.to_text(), text);

    let dot = stdout(&realcubic(&["diagram-export", "--diagram", out.to_str().unwrap(), "--format", "dot"]));
    assert!(dot.starts_with("graph coxeter {"));
    assert!(dot.contains("style=dashed") || dot.contains("style=bold"));
    assert_eq!(realcubic(&["diagram-export", "--diag", "-1,1,1", "--format", "json"]).status.code(), Some(4));
}
