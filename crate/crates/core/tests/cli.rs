use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aperiodic"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files_in(dir: &Path) -> Vec<String> {
    match fs::read_dir(dir) {
        Ok(rd) => rd.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect(),
        Err(_) => Vec::new(),
    }
}

#[test]
fn help_succeeds() {
    let o = Command::new(env!("CARGO_BIN_EXE_aperiodic")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("psf-check"));
}

#[test]
fn unbounded_region_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.toml");
    fs::write(&path, "[comb]\nkind = \"lattice\"\nbasis_rows = [[1]]\n\n[run]\nregion = { lo = [0], hi = [\"inf\"] }\n")
        .unwrap();
    let out = dir.path().join("out");
    let o = run(&["points", path.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("run.region.hi"), "{}", stderr(&o));
    assert!(files_in(&out).is_empty());
}

#[test]
fn missing_scene_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["points", dir.path().join("absent.toml").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn psf_check_on_the_integers() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["psf-check", scene("psf_unit_z.toml").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!files_in(dir.path()).is_empty());
}

#[test]
fn diffract_on_fibonacci() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["diffract", scene("diffract_fibonacci.toml").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!files_in(dir.path()).is_empty());
}

#[test]
fn failed_runs_leave_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["psf-check", scene("points_fibonacci.toml").to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(files_in(&out).is_empty(), "{:?}", files_in(&out));
}

#[test]
fn required_structure_fails_on_fibonacci_with_a_full_report() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(scene("points_fibonacci.toml")).unwrap();
    let path = dir.path().join("scene.toml");
    fs::write(&path, src.replace("[run]\n", "[run]\nrequire_structure = true\n")).unwrap();
    let out = dir.path().join("out");
    let o = run(&["classify", path.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert_eq!(files_in(&out), vec!["scene.classify.json".to_string()]);
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("scene.classify.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["structure"]["found"], serde_json::Value::Bool(false));
}
