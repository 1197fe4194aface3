use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lrc_core::construct::{self, ConstructionSpec};
use lrc_core::gf::Field;
use lrc_core::locality::{InterpBasis, RecoverySet, RecoveryStructure};
use lrc_core::LinearCode;

const TB27: &str = "construction = \"tb\"\nq = 27\nkind = \"trace\"\nr = 8\nk_prime = 10\n";
const TB16: &str =
    "construction = \"tb\"\nq = 16\nkind = \"subspace\"\nr = 3\nk_prime = 2\nparts = 2\n";
const HERMITIAN: &str = "construction = \"hermitian_avail2\"\nq = 4\ns = 20\n";

fn lrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn product_spec() -> String {
    let factor = TB16.trim_end();
    format!("construction = \"product\"\n\n[[factors]]\n{factor}\n\n[[factors]]\n{factor}\n")
}

fn built(dir: &Path, name: &str, spec: &str) -> String {
    let cfg = write(dir, &format!("{name}.toml"), spec);
    let out = dir
        .join(format!("{name}.lrcc"))
        .to_str()
        .unwrap()
        .to_string();
    let o = lrc(&["build", "--config", &cfg, "--out", &out]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    out
}

#[test]
fn build_writes_code_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tb.toml", TB27);
    let out = dir.path().join("tb.lrcc");
    let o = lrc(&["build", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[27, 9, 18]"), "{}", stdout(&o));
    assert!(out.with_extension("lrcs").exists());
    // reload is byte-identical to an in-process build
    let b = construct::build(&ConstructionSpec::from_toml(TB27).unwrap()).unwrap();
    assert_eq!(fs::read(&out).unwrap(), b.code.to_bytes());
    let back = LinearCode::from_bytes(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(back.generator(), b.code.generator());
}

#[test]
fn product_of_two_tb_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.toml", &product_spec());
    let o = lrc(&["distance", "--config", &cfg, "--method", "exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("[64, 4] method exhaustive exact 49"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn certify_reports_availability() {
    let dir = tempfile::tempdir().unwrap();
    let code = built(dir.path(), "h", HERMITIAN);
    let o = lrc(&["certify", "--in", &code]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("localities {3,4}") && text.contains("all certified"),
        "{text}"
    );
}

fn repetition_files(dir: &Path, sets: Vec<Vec<RecoverySet>>) -> String {
    let f = Field::of_order(8).unwrap();
    let code = LinearCode::repetition(f, 3);
    let p = dir.join("rep.lrcc");
    fs::write(&p, code.to_bytes()).unwrap();
    let s = RecoveryStructure {
        sets,
        dropped: vec![],
    };
    fs::write(p.with_extension("lrcs"), s.to_bytes()).unwrap();
    p.to_str().unwrap().to_string()
}

fn one(p: Vec<usize>) -> RecoverySet {
    RecoverySet {
        abscissae: vec![0; p.len()],
        positions: p,
        target: 0,
        basis: InterpBasis::Degree(0),
    }
}

#[test]
fn repetition_code_has_locality_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = repetition_files(
        dir.path(),
        (0..3).map(|j| vec![one(vec![(j + 1) % 3])]).collect(),
    );
    let o = lrc(&["certify", "--in", &path]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("localities {1}"), "{}", stdout(&o));
}

#[test]
fn overlapping_sets_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let sets = (0..3)
        .map(|j| vec![one(vec![(j + 1) % 3]), one(vec![(j + 1) % 3])])
        .collect();
    let path = repetition_files(dir.path(), sets);
    let o = lrc(&["certify", "--in", &path]);
    assert_eq!(o.status.code(), Some(3));
    assert!(
        stdout(&o).contains("disjointness failure"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn corrupt_file_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let code = built(dir.path(), "tb", TB27);
    let mut bytes = fs::read(&code).unwrap();
    bytes.truncate(12);
    fs::write(&code, bytes).unwrap();
    let o = lrc(&["certify", "--in", &code]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FormatError"));
}

#[test]
fn repair_patterns() {
    let dir = tempfile::tempdir().unwrap();
    let code = built(dir.path(), "h", HERMITIAN);
    let single = lrc(&["repair", "--in", &code, "--trials", "1000", "--seed", "5"]);
    assert_eq!(single.status.code(), Some(0));
    assert!(
        stdout(&single).contains("1000 repaired (100.00%)"),
        "{}",
        stdout(&single)
    );
    let again = lrc(&["repair", "--in", &code, "--trials", "1000", "--seed", "5"]);
    assert_eq!(stdout(&again), stdout(&single));

    let fiber = lrc(&[
        "repair",
        "--in",
        &code,
        "--pattern",
        "fiber",
        "--trials",
        "300",
    ]);
    assert_eq!(fiber.status.code(), Some(0));
    assert!(stdout(&fiber).contains(" 0 failed"), "{}", stdout(&fiber));

    let all = lrc(&[
        "repair",
        "--in",
        &code,
        "--pattern",
        "all",
        "--trials",
        "50",
    ]);
    assert_eq!(all.status.code(), Some(0));
    assert!(stdout(&all).contains("0 repaired") && stdout(&all).contains("50 unrecoverable"));
}

#[test]
fn params_formulas() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(
        dir.path(),
        "p.toml",
        "construction = \"params_only\"\nq = 8\nalpha = 1\nwhich = \"thm1\"\n",
    );
    let o = lrc(&["params", "--config", &ok]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[29120, 208, 28603]"), "{}", stdout(&o));
    let missing = write(
        dir.path(),
        "m.toml",
        "construction = \"params_only\"\nq = 27\nwhich = \"prop1\"\n",
    );
    let o = lrc(&["params", "--config", &missing]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("MissingEllG"));
}

#[test]
fn usage_errors() {
    assert_eq!(lrc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lrc(&["repair"]).status.code(), Some(1));
    assert_eq!(lrc(&["--help"]).status.code(), Some(0));
    assert_eq!(lrc(&["table", "--family", "nope"]).status.code(), Some(2));
}

#[test]
fn tables_with_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("suzuki.csv");
    let o = lrc(&[
        "table",
        "--family",
        "suzuki_f8",
        "--compare",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("construction,n,k,locality,availability,d_designed,d_upper,d_exact,s,notes")
    );
    assert_eq!(lines.count(), 29);
    assert!(text.contains("ref [64, 10, 36]: match"));

    let o = lrc(&["table", "--family", "products", "--compare"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("ref [64, 16, 16]: match"),
        "{}",
        stdout(&o)
    );

    let o = lrc(&["table", "--family", "hermitian_f16"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("hermitian_avail2,64,10,") && l.contains(",46,")));
}
