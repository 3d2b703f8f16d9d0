use std::process::{Command, Output};

fn cfwords(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfwords")).args(args).env_remove("CFWORDS_PRECISION").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn word_golden() {
    let o = cfwords(&["word", "--directive", "(12)^w", "--length", "40"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1321213121321312132121321312132121312132\n");
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("# config:"));
}

#[test]
fn seminorm_table_rows_and_footer() {
    let o = cfwords(&["seminorm-table", "--matrix", "c1c2^3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("# config:"));
    assert_eq!(lines[1], "u,v,z,Mt_z,excluded,normD_z,normD_Mtz");
    assert_eq!(lines.len(), 2 + 36 + 1);
    assert_eq!(*lines.last().unwrap(), "# max 4/5 at (2,-3,2)");
    let literal = cfwords(&["seminorm-table", "--matrix", "[2,3,2;2,2,1;1,2,1]"]);
    assert_eq!(stdout(&literal).replace("[2,3,2;2,2,1;1,2,1]", ""), out.replace("c1c2^3", ""));
    let singular = cfwords(&["seminorm-table", "--matrix", "c1"]);
    assert_eq!(singular.status.code(), Some(1));
}

#[test]
fn classify_square_blocks() {
    let o = cfwords(&["classify", "--pre", "", "--per", "1122"]);
    assert_eq!(stdout(&o), "dim2\n");
    let o = cfwords(&["classify", "--per", "12"]);
    assert_eq!(stdout(&o), "dim3\n");
}

#[test]
fn orbit_csv() {
    let o = cfwords(&["orbit", "--algo", "fc", "--x", "3,15,22", "--steps", "4"]);
    let out = stdout(&o);
    assert!(out.contains("\n0,3,15,22,2\n"));
    assert!(out.ends_with("4,14,1,3,\n"));
    let o = cfwords(&["orbit", "--algo", "fs", "--x", "40,18,37", "--steps", "4"]);
    assert!(stdout(&o).ends_with("4,18,15,4,\n"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cfwords(&["word", "--bogus"]).status.code(), Some(2));
    assert_eq!(cfwords(&["nonsense"]).status.code(), Some(2));
    // seed is mandatory for sampling commands
    assert_eq!(cfwords(&["lyapunov", "--measure", "lebesgue"]).status.code(), Some(2));
}

#[test]
fn module_errors_exit_one() {
    let o = cfwords(&["expand", "--x", "-1,2,3", "--n", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: Domain:"));
    let o = cfwords(&["word", "--directive", "1212", "--length", "1000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: InsufficientDirective:"));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["lyapunov", "--measure", "bernoulli:0.5", "--steps", "2000", "--traj", "3", "--seed", "9"];
    assert_eq!(cfwords(&args).stdout, cfwords(&args).stdout);
    let args = ["cylinder", "--measure", "xi", "--word", "11", "--samples", "5000", "--seed", "3"];
    assert_eq!(cfwords(&args).stdout, cfwords(&args).stdout);
}

#[test]
fn json_carries_config() {
    let o = cfwords(&["project", "--directive", "(12)^w", "--tol", "1e-10"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["command"], "project");
    let f = v["f"].as_array().unwrap();
    assert!((f[0].as_f64().unwrap() - 0.4302).abs() < 1e-4);
    let o = cfwords(&["complexity", "--directive", "(12)^w", "--nmax", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][3]["p_n"], "7");
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_cfwords"))
        .args(["orbit", "--x", "1,e,pi", "--mode", "float", "--steps", "2"])
        .env("CFWORDS_PRECISION", "128")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("# config: precision=128 "));
}

#[test]
fn rauzy_color_modes() {
    let cur = stdout(&cfwords(&["rauzy", "--length", "3"]));
    let prev = stdout(&cfwords(&["rauzy", "--length", "3", "--mode", "previous"]));
    assert!(cur.lines().nth(2).unwrap().starts_with("0,"));
    assert!(prev.lines().nth(2).unwrap().starts_with("1,"));
    assert_eq!(cfwords(&["rauzy", "--mode", "sideways"]).status.code(), Some(1));
}
