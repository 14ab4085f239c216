use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_gcwsnet");

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn gcwsnet(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn")
}

fn path(dir: &Path, name: &str) -> (PathBuf, String) {
    let p = dir.join(name);
    let s = p.to_string_lossy().into_owned();
    (p, s)
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(gcwsnet(&[]).status.code(), Some(2));
    assert_eq!(gcwsnet(&["hash", "--input", "x"]).status.code(), Some(2));
    assert_eq!(gcwsnet(&["train", "--bogus"]).status.code(), Some(2));
    let out = gcwsnet(&["sketch", "--input", "a", "--bins", "4", "--m", "2", "--out", "b"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_row_exits_1_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let (bad, bad_s) = path(dir.path(), "bad.libsvm");
    std::fs::write(&bad, "1 1:0.5\n2 3:x\n").unwrap();
    let (_, out_s) = path(dir.path(), "codes.txt");
    let out = gcwsnet(&["hash", "--input", &bad_s, "--out", &out_s]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn empty_row_names_the_sample() {
    let dir = tempfile::tempdir().unwrap();
    let (bad, bad_s) = path(dir.path(), "zero.libsvm");
    std::fs::write(&bad, "1 1:0.5\n2 3:0\n").unwrap();
    let (_, out_s) = path(dir.path(), "codes.txt");
    let out = gcwsnet(&["hash", "--input", &bad_s, "--out", &out_s]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sample 1"), "{err}");
}

#[test]
fn power_overflow_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (_, hist) = path(dir.path(), "h.csv");
    let input = fixture("digits_large.libsvm");
    let out = gcwsnet(&["train", "--input", &input, "--preproc", "power:80", "--history", &hist]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).to_lowercase();
    assert!(err.contains("overflow"), "{err}");
}

#[test]
fn piped_stages_match_fused_training() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let train = fixture("gaussians_train.libsvm");
    let test = fixture("gaussians_test.libsvm");
    let gcws = ["--p", "1", "--k", "32", "--b", "6"];
    let mut staged = Vec::new();
    for (name, input) in [("train", &train), ("test", &test)] {
        let (_, codes) = path(d, &format!("{name}.codes"));
        let (_, sk) = path(d, &format!("{name}.sketch"));
        let mut args = vec!["hash", "--input", input, "--seed", "5", "--out", &codes];
        args.extend(gcws);
        assert!(gcwsnet(&args).status.success());
        assert!(gcwsnet(&["sketch", "--input", &codes, "--m", "4", "--seed", "5", "--out", &sk])
            .status
            .success());
        staged.push(sk);
    }
    let common = ["--layers", "2", "--hidden", "16", "--epochs", "0.5", "--seed", "5"];
    let (piped_h, piped_s) = path(d, "piped.csv");
    let mut args = vec!["train", "--input", &staged[0], "--eval", &staged[1], "--history", &piped_s];
    args.extend(common);
    let out = gcwsnet(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let (fused_h, fused_s) = path(d, "fused.csv");
    let mut args = vec![
        "train", "--input", &train, "--eval", &test, "--preproc", "gcws+cs", "--m", "4", "--history", &fused_s,
    ];
    args.extend(gcws);
    args.extend(common);
    let out = gcwsnet(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let piped = std::fs::read(piped_h).unwrap();
    assert!(piped.len() > 100);
    assert_eq!(piped, std::fs::read(fused_h).unwrap());
}

#[test]
fn ratio_accepts_grids_and_lists() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, csv_s) = path(dir.path(), "r.csv");
    let out = gcwsnet(&["ratio", "--b", "8", "--m", "1,16", "--j-grid", "0.5", "--out", &csv_s]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "b,J,m,P_b,R");
    assert!(lines[1].ends_with(",0.019562125677119097"), "{}", lines[1]);
    assert_eq!(lines.len(), 3);

    let out = gcwsnet(&["ratio", "--b", "8,12", "--m", "eight", "--j-grid", "0:1:0.25", "--out", &csv_s]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1 + 2 * 5);
}

#[test]
fn manifest_records_inputs_and_detects_changes() {
    let dir = tempfile::tempdir().unwrap();
    let (input, input_s) = path(dir.path(), "in.libsvm");
    std::fs::copy(fixture("tiny.libsvm"), &input).unwrap();
    let (_, out_s) = path(dir.path(), "codes.txt");
    assert!(gcwsnet(&["hash", "--input", &input_s, "--k", "8", "--out", &out_s]).status.success());
    let manifest_s = format!("{out_s}.manifest.json");
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest_s).unwrap()).unwrap();
    assert_eq!(manifest["command"], "hash");
    assert_eq!(manifest["inputs"][0]["bytes"], 34);
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    std::fs::write(&input, "1 1:1\n").unwrap();
    let out = gcwsnet(&["rerun", &manifest_s]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("changed since the recorded run"));
}
