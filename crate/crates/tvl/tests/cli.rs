// Runs the built `tvl` binary.

use std::process::{Command, Output};

fn tvl(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tvl"));
    cmd.args(args).env_remove("TVL_SEED");
    if let Some(s) = seed_env {
        cmd.env("TVL_SEED", s);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn exit_codes() {
    assert_eq!(tvl(&["gen", "--n", "3"], None).status.code(), Some(0));
    assert_eq!(tvl(&["sts", "--m", "4"], None).status.code(), Some(1));
    assert_eq!(
        tvl(&["template", "--h", "9", "--attempts", "0"], None)
            .status
            .code(),
        Some(2)
    );
    let bad = tvl(&["gen", "--bogus"], None);
    assert_eq!(bad.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("Usage"));
    assert_eq!(tvl(&["--help"], None).status.code(), Some(0));
}

#[test]
fn seed_env_overrides_flag() {
    let args = ["solve", "--nibble", "--family", "random:5:200", "--n", "30"];
    let with = |flag: &str, env: Option<&str>| {
        let mut a = args.to_vec();
        a.extend(["--seed", flag]);
        tvl(&a, env).stdout
    };
    assert_eq!(with("1", Some("9")), with("9", None));
    assert_eq!(with("3", Some("9")), with("1", Some("9")));
    assert_eq!(tvl(&["gen", "--n", "3"], Some("x")).status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &[
            "switchers",
            "--bounds",
            "--family",
            "random:4:100",
            "--n",
            "7",
        ][..],
        &["expander", "--graph", "gnp:40:0.3", "--seed", "3"],
        &["audit", "--n", "7"],
        &["sts", "--reduce", "--balanced", "--m", "5", "--seed", "2"],
        &["addstep", "--steps", "2", "--threads", "4"],
    ] {
        let a = tvl(args, None);
        let b = tvl(args, None);
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        assert!(v.is_object());
    }
}

#[test]
fn out_file_and_csv() {
    let dir = std::env::temp_dir().join(format!("tvl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("z5.csv");
    let o = tvl(
        &[
            "gen",
            "--n",
            "5",
            "--format",
            "csv",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("0,1,2,3,4"));
    assert_eq!(text.lines().count(), 5);

    let sq = dir.join("sq.json");
    std::fs::write(&sq, tvl(&["gen", "--family", "maillet:3:2"], None).stdout).unwrap();
    let o = tvl(&["solve", "--input", sq.to_str().unwrap()], None);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["size"], 5);
    assert_eq!(v["optimal"], true);
    std::fs::remove_dir_all(&dir).ok();
}
