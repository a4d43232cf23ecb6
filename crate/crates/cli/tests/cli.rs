//! End-to-end runs of the installed binary: exit codes, file outputs, and
//! the documented flag behavior.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_signsight"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn generate_validate_evaluate_roundtrip() {
    let tmp = tempfile::tempdir().unwrap();
    let scene_dir = tmp.path().join("scene");
    let out_dir = tmp.path().join("out");

    let gen = run(bin()
        .arg("gen-synthetic")
        .arg(fixtures().join("specs/straight.toml"))
        .arg("-o")
        .arg(&scene_dir));
    assert!(gen.status.success(), "{}", stderr(&gen));

    let manifest = scene_dir.join("scene.toml");
    let val = run(bin().arg("validate").arg(&manifest));
    assert!(val.status.success(), "{}", stderr(&val));
    assert!(stdout(&val).contains("manifest ok"));

    let eval = run(bin()
        .arg("evaluate")
        .arg(&manifest)
        .arg("-o")
        .arg(&out_dir)
        .arg("--export-field"));
    assert!(eval.status.success(), "{}", stderr(&eval));
    assert!(out_dir.join("report.txt").is_file());
    assert!(out_dir.join("field_s1.csv").is_file());

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let lanes = json["signs"][0]["lanes"].as_array().unwrap();
    assert_eq!(lanes.len(), 2);
    for lane in lanes {
        assert_eq!(lane["timely"], 1, "{lane}");
    }
    assert_eq!(json["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn unknown_flag_prints_usage_and_exits_1() {
    let out = run(bin().arg("evaluate").arg("x.toml").arg("--bogus"));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"), "{}", stderr(&out));
}

#[test]
fn missing_subcommand_exits_1() {
    let out = run(&mut bin());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = run(bin().arg("--help"));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("evaluate"));
}

#[test]
fn validate_rejects_a_broken_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("broken.toml");
    std::fs::write(&path, "trajectory = \"missing.xyz\"\nenvironment = []\nbogus = 1\n")
        .unwrap();
    let out = run(bin().arg("validate").arg(&path));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error:"), "{}", stderr(&out));
}

#[test]
fn params_file_overrides_change_the_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let params = tmp.path().join("slow.params");
    // Ten seconds of reaction at 25 mph needs 111.76 m, more than any
    // 55 m field can offer.
    std::fs::write(&params, "reaction_time = 10.0\n").unwrap();
    let out_dir = tmp.path().join("out");
    let eval = run(bin()
        .arg("evaluate")
        .arg(fixtures().join("straight.toml"))
        .arg("-o")
        .arg(&out_dir)
        .arg("--params")
        .arg(&params));
    assert!(eval.status.success(), "{}", stderr(&eval));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let sign = &json["signs"][0];
    assert_eq!(sign["flags"]["vrd_exceeds_sight_distance"], true);
    for lane in sign["lanes"].as_array().unwrap() {
        assert_eq!(lane["timely"], 0);
    }
}

#[test]
fn bad_params_file_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let params = tmp.path().join("bad.params");
    std::fs::write(&params, "no_such_knob = 1.0\n").unwrap();
    let out = run(bin()
        .arg("evaluate")
        .arg(fixtures().join("straight.toml"))
        .arg("-o")
        .arg(tmp.path().join("out"))
        .arg("--params")
        .arg(&params));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no_such_knob"), "{}", stderr(&out));
}

#[test]
fn library_can_come_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("scene.toml");
    let straight = fixtures().join("straight");
    std::fs::write(
        &manifest,
        format!(
            "trajectory = {:?}\nenvironment = []\nmarkings = [{:?}, {:?}]\n\n\
             [[sign]]\nid = \"s1\"\ntype = \"square\"\npanel = {:?}\nsight_distance = 50.0\n",
            straight.join("trajectory.xyz"),
            straight.join("marking_0.xyz"),
            straight.join("marking_1.xyz"),
            straight.join("sign_s1.xyz"),
        ),
    )
    .unwrap();
    // Without the variable the manifest has no library to resolve "square".
    let bare = run(bin().arg("validate").arg(&manifest));
    assert_eq!(bare.status.code(), Some(1));
    let out = run(bin()
        .arg("validate")
        .arg(&manifest)
        .env("SIGNSIGHT_LIBRARY", fixtures().join("library")));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn empty_sign_list_reports_and_exits_0() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("scene.toml");
    let straight = fixtures().join("straight");
    std::fs::write(
        &manifest,
        format!(
            "trajectory = {:?}\nenvironment = []\n",
            straight.join("trajectory.xyz")
        ),
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let eval = run(bin().arg("evaluate").arg(&manifest).arg("-o").arg(&out_dir));
    assert_eq!(eval.status.code(), Some(0), "{}", stderr(&eval));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(json["signs"].as_array().unwrap().len(), 0);
}

#[test]
fn unwritable_output_path_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("out");
    std::fs::write(&blocker, "a plain file").unwrap();
    let out = run(bin()
        .arg("evaluate")
        .arg(fixtures().join("straight.toml"))
        .arg("-o")
        .arg(&blocker));
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}
