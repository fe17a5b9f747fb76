use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn rgb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rgb")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Writes `text` to a fresh file in the temp directory.
fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("rgb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn supplementarity_sides_are_equal() {
    let o = rgb(&["equal", &corpus("supp_lhs.rgd"), &corpus("supp_rhs.rgd")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "equal");
}

#[test]
fn different_diagrams_exit_one() {
    let o = rgb(&["equal", &corpus("supp_lhs.rgd"), &corpus("euler_lhs.rgd"), "--float"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn search_in_rg_finds_nothing() {
    let o = rgb(&[
        "search",
        &corpus("supp_lhs.rgd"),
        &corpus("supp_rhs.rgd"),
        "--depth",
        "5",
        "--flavour",
        "rg",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("not found"));
}

#[test]
fn search_prints_a_replayable_path() {
    let two = scratch(
        "two.rgd",
        "diagram rg { inputs a; outputs b; node x: green 1; node y: green 1; wire a -> x; wire x -> y; wire y -> b; }",
    );
    let one = scratch("one.rgd", "diagram rg { inputs a; outputs b; node z: green 2; wire a -> z; wire z -> b; }");
    let o = rgb(&["search", &two, &one, "--depth", "2"]);
    assert_eq!(code(&o), 0);
    let script = scratch("found.rgs", &stdout(&o));
    let o = rgb(&["rewrite", &two, "--script", &script, "--verify", "--target", &one]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn euler_suite_passes() {
    let o = rgb(&["verify", "--suite", "euler"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count() >= 2);
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn group_suite_passes() {
    let o = rgb(&["verify", "--suite", "group"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn supplementarity_script_replays_after_translation() {
    let o = rgb(&["translate", &corpus("supp_lhs.rgd"), "--to", "rgb"]);
    assert_eq!(code(&o), 0);
    let start = scratch("t_lhs.rgd", &stdout(&o));
    let o = rgb(&["translate", &corpus("supp_rhs.rgd"), "--to", "rgb"]);
    let target = scratch("t_rhs.rgd", &stdout(&o));
    let o = rgb(&[
        "rewrite",
        &start,
        "--script",
        &corpus("supplementarity.rgs"),
        "--verify",
        "--target",
        &target,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("diagram rgb"));
}

#[test]
fn euler_script_rewrites_h() {
    let o = rgb(&[
        "rewrite",
        &corpus("euler_lhs.rgd"),
        "--script",
        &corpus("euler.rgs"),
        "--verify",
        "--target",
        &corpus("euler_rhs.rgd"),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn eval_prints_one_row_per_output_state() {
    let o = rgb(&["eval", &corpus("euler_lhs.rgd")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);
    let f = rgb(&["eval", &corpus("euler_lhs.rgd"), "--float"]);
    assert_eq!(stdout(&f).lines().count(), 2);
}

#[test]
fn bad_input_exits_three() {
    let blue = scratch("blue.rgd", "diagram rg { outputs b; node n: blue 1; wire n -> b; }");
    let o = rgb(&["eval", &blue]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("validation"));
    let broken = scratch("broken.rgd", "diagram rg { inputs a");
    assert_eq!(code(&rgb(&["eval", &broken])), 3);
    assert_eq!(code(&rgb(&["eval", "/nonexistent/file.rgd"])), 3);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&rgb(&["verify", "--suite", "bogus"])), 2);
    assert_eq!(code(&rgb(&["frobnicate"])), 2);
    let rgb_file = scratch("unit.rgd", "diagram rgb { outputs b; node n: red 1; wire n -> b; }");
    assert_eq!(code(&rgb(&["search", &rgb_file, &rgb_file, "--depth", "1", "--flavour", "rg"])), 2);
}

#[test]
fn failing_script_exits_four() {
    let script = scratch("bad.rgs", "apply hopf\n");
    let o = rgb(&["rewrite", &corpus("supp_lhs.rgd"), "--script", &script]);
    assert_eq!(code(&o), 4);
}

#[test]
fn translate_round_trip_shapes() {
    let o = rgb(&["translate", &corpus("euler_rhs.rgd"), "--to", "rgb"]);
    assert_eq!(code(&o), 0);
    let t = scratch("euler_t.rgd", &stdout(&o));
    let o = rgb(&["translate", &t, "--to", "rgplus"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("diagram rgplus"));
    // S needs an rgb diagram.
    assert_eq!(code(&rgb(&["translate", &corpus("supp_lhs.rgd"), "--to", "rgplus"])), 3);
}
