use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hamcert"));
    cmd.env_remove("HAMCERT_SEED");
    cmd
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn identical_inputs_accept() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "0.3 XZ\n-0.2 IY\n");
    let out = run(bin()
        .args([
            "certify",
            "--epsilon",
            "0.2",
            "--delta",
            "0.2",
            "--k",
            "2",
            "--h0",
        ])
        .arg(&h)
        .arg("--h")
        .arg(&h));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict = ACCEPT"));
}

#[test]
fn flipped_pair_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let h0 = write(dir.path(), "h0.txt", "-0.2 X\n");
    let h = write(dir.path(), "h.txt", "0.2 X\n");
    let report = dir.path().join("report.txt");
    let out = run(bin()
        .args([
            "certify",
            "--epsilon",
            "0.2",
            "--delta",
            "0.2",
            "--k",
            "1",
            "--seed",
            "4",
        ])
        .arg("--h0")
        .arg(&h0)
        .arg("--h")
        .arg(&h)
        .arg("--out")
        .arg(&report));
    assert_eq!(code(&out), 1);
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.contains("verdict = REJECT"));
    assert!(text.contains("seed = 4"));
}

#[test]
fn malformed_input_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.txt", "0.2 X\n");
    let bad = write(dir.path(), "bad.txt", "0.2 X\nzero Z\n");
    let out = run(bin()
        .args([
            "certify",
            "--epsilon",
            "0.2",
            "--delta",
            "0.2",
            "--k",
            "1",
            "--h0",
        ])
        .arg(&bad)
        .arg("--h")
        .arg(&good));
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(bin().args(["certify", "--epsilon", "0.2"]))), 2);
    assert_eq!(code(&run(bin().args(["frobnicate"]))), 2);
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "0.2 X\n");
    let out = run(bin()
        .args([
            "certify",
            "--epsilon",
            "0.2",
            "--delta",
            "1.5",
            "--k",
            "1",
            "--h0",
        ])
        .arg(&h)
        .arg("--h")
        .arg(&h));
    assert_eq!(code(&out), 2);
    let out = run(bin()
        .args([
            "certify",
            "--epsilon",
            "0.2",
            "--delta",
            "0.2",
            "--k",
            "1",
            "--h0",
        ])
        .arg(dir.path().join("missing.txt"))
        .arg("--h")
        .arg(&h));
    assert_eq!(code(&out), 2);
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&run(bin().arg("--help"))), 0);
}

#[test]
fn sweep_table_and_unit_norm_check() {
    let dir = tempfile::tempdir().unwrap();
    let h0 = write(dir.path(), "h0.txt", "0.3 XI\n-0.1 IZ\n");
    let unit = write(dir.path(), "dir.txt", "0.6 ZI\n0.8 IX\n");
    let half = write(dir.path(), "half.txt", "0.5 ZI\n");
    let out = run(bin()
        .args([
            "sweep",
            "--eps-list",
            "0.4,0.2,0.1,0.05",
            "--delta",
            "0.2",
            "--k",
            "1",
            "--seed",
            "2",
        ])
        .arg("--h0")
        .arg(&h0)
        .arg("--direction")
        .arg(&unit));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epsilon,total_time,queries,verdict,seed"
    );
    let rows: Vec<&str> = lines.clone().take_while(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4);
    let slope_line = csv
        .lines()
        .find(|l| l.starts_with("# loglog_slope="))
        .unwrap();
    let slope: f64 = slope_line
        .trim_start_matches("# loglog_slope=")
        .parse()
        .unwrap();
    assert!((-1.2..=-0.8).contains(&slope), "{slope}");

    let out = run(bin()
        .args(["sweep", "--eps-list", "0.4", "--delta", "0.2", "--k", "1"])
        .arg("--h0")
        .arg(&h0)
        .arg("--direction")
        .arg(&half));
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_suites() {
    let out = run(bin().args(["verify", "--suite", "gapbound", "--trials", "20"]));
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("gapbound: PASS"));
    assert_eq!(code(&run(bin().args(["verify", "--suite", "nosuch"]))), 2);
}

#[test]
fn seed_flag_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let h0 = write(dir.path(), "h0.txt", "-0.1 X\n");
    let h = write(dir.path(), "h.txt", "0.1 X\n");
    let certify = |seed: Option<&str>, env: Option<&str>| {
        let mut cmd = bin();
        cmd.args(["certify", "--epsilon", "0.2", "--delta", "0.2", "--k", "1"])
            .arg("--h0")
            .arg(&h0)
            .arg("--h")
            .arg(&h);
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        if let Some(e) = env {
            cmd.env("HAMCERT_SEED", e);
        }
        String::from_utf8(run(&mut cmd).stdout).unwrap()
    };
    let from_env = certify(None, Some("17"));
    assert!(from_env.contains("seed = 17"));
    assert_eq!(certify(Some("17"), None), from_env);
    assert!(certify(Some("5"), Some("17")).contains("seed = 5"));
    assert!(certify(None, None).contains("seed = 0"));
}
