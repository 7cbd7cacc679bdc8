use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn hflz(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hflz"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_reports_verdicts_and_exit_codes() {
    let out = hflz(&["eval", path(&data("sum_neg1.hfl"))], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).starts_with("VALID steps="));

    let out = hflz(&["eval", path(&data("sum_2.hfl"))], None);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(text(&out.stdout).trim(), "INVALID exhaustive=true");

    let out = hflz(&["eval", "--fuel", "3", path(&data("sum_neg1.hfl"))], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(text(&out.stdout).trim(), "UNKNOWN reason=fuel-exhausted");
}

#[test]
fn input_errors_exit_with_three() {
    let out = hflz(&["eval", "-"], Some("true /\\\n  (1 <= "));
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("-:2:"), "{}", text(&out.stderr));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.hfl");
    assert_eq!(hflz(&["eval", path(&missing)], None).status.code(), Some(3));
    assert_ne!(hflz(&["eval", "--fuel", "0", path(&data("sum_neg1.hfl"))], None).status.code(), Some(0));
}

#[test]
fn lower_writes_system_and_stats_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("low.hes");
    let out = hflz(&["lower", path(&data("d_sum.hes")), "-o", path(&out_file)], None);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stats = std::fs::read_to_string(dir.path().join("low.hes.stats")).unwrap();
    assert!(stats.lines().any(|l| l == "defs_out=9"), "{stats}");
    assert!(stats.lines().any(|l| l == "order_out=0"), "{stats}");
    let lowered = std::fs::read_to_string(&out_file).unwrap();
    let es = hflz::parse::parse_system(&lowered).unwrap();
    assert_eq!(es.defs.len(), 9);
    assert_eq!(es.order(), 0);

    let tc = hflz(&["typecheck", path(&out_file)], None);
    assert_eq!(text(&tc.stdout).trim(), "ok system order=0 defs=9");
}

#[test]
fn raised_output_reparses_from_stdin() {
    let raised = hflz(&["raise", path(&data("sum_neg1.hfl"))], None);
    assert_eq!(raised.status.code(), Some(0));
    let tc = hflz(&["typecheck", "-"], Some(&text(&raised.stdout)));
    assert_eq!(tc.status.code(), Some(0), "{}", text(&tc.stderr));
    assert!(text(&tc.stdout).starts_with("ok formula order=2"), "{}", text(&tc.stdout));
    let ev = hflz(&["eval", "-"], Some(&text(&raised.stdout)));
    assert!(text(&ev.stdout).starts_with("VALID"));
}

#[test]
fn terms_translate_to_formulas() {
    let out = hflz(&["from-term", path(&data("sum.term"))], None);
    assert_eq!(out.status.code(), Some(0));
    let f = hflz::parse::parse_formula(&text(&out.stdout)).unwrap();
    assert!(hflz::typecheck(&hflz::SimpleTypeEnv::new(), &f).is_ok());
}

#[test]
fn stats_lists_key_value_lines() {
    let out = hflz(&["stats", path(&data("d_sum.hes"))], None);
    let s = text(&out.stdout);
    assert!(s.lines().all(|l| l.contains('=')));
    assert!(s.lines().any(|l| l == "defs=4"));
}
