use std::path::PathBuf;
use std::process::{Command, Output};

fn expsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expsum"))
        .args(args)
        .env_remove("EXPSUM_SEED")
        .env_remove("EXPSUM_SAMPLES")
        .env_remove("EXPSUM_OUT")
        .env_remove("EXPSUM_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("expsum-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn shell_counts_agree_on_every_level() {
    let out = expsum(&["shell", "--d", "3", "--D", "100", "--mode", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 100 * 100 - 100 + 1);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn divisor_summatory_at_ten() {
    let text = stdout(&expsum(&["divisor", "--x", "10"]));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "27");
}

#[test]
fn output_is_reproducible_across_runs_and_threads() {
    let args = [
        "moment",
        "--process",
        "poisson",
        "--map",
        "power:2",
        "--sizes",
        "8,16",
        "--samples",
        "30",
        "--p",
        "3",
    ];
    let a = expsum(&[&["--threads", "1"][..], &args].concat());
    let b = expsum(&[&["--threads", "4"][..], &args].concat());
    let c = expsum(&[&["--threads", "4"][..], &args].concat());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
}

#[test]
fn verify_passes() {
    let out = expsum(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).lines().skip(1).all(|r| r.ends_with(",pass")));
}

#[test]
fn exit_codes_by_error_kind() {
    assert_eq!(expsum(&["moment"]).status.code(), Some(1));
    assert_eq!(expsum(&["moment", "--sizes", "8", "--p", "-1"]).status.code(), Some(1));
    assert_eq!(expsum(&["moment", "--sizes", "400", "--exact"]).status.code(), Some(2));
    assert_eq!(expsum(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_writes_data_and_manifest() {
    let dir = scratch("manifest");
    let path = dir.join("d.csv");
    let out = expsum(&["--out", path.to_str().unwrap(), "--seed", "5", "divisor", "--x", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let data = std::fs::read(&path).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("d.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "divisor");
    assert_eq!(manifest["master_seed"], 5);
    assert_eq!(manifest["output_sha256"].as_str().unwrap().len(), 64);
    assert!(String::from_utf8(data).unwrap().contains(",482,"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn flags_override_environment_override_config() {
    let dir = scratch("precedence");
    let conf = dir.join("run.conf");
    std::fs::write(&conf, "seed=1\nformat=json\n").unwrap();
    let run = |env_seed: Option<&str>, flag_seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_expsum"));
        cmd.env("EXPSUM_CONFIG", &conf).env_remove("EXPSUM_SEED");
        if let Some(s) = env_seed {
            cmd.env("EXPSUM_SEED", s);
        }
        if let Some(s) = flag_seed {
            cmd.args(["--seed", s]);
        }
        let out = cmd.args(["moment", "--sizes", "6", "--samples", "5"]).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let with_seed = |s: &str| {
        expsum(&[
            "--seed",
            s,
            "--format",
            "json",
            "moment",
            "--sizes",
            "6",
            "--samples",
            "5",
        ])
        .stdout
    };
    assert!(run(None, None).starts_with(b"["));
    assert_eq!(run(None, None), with_seed("1"));
    assert_eq!(run(Some("2"), None), with_seed("2"));
    assert_eq!(run(Some("2"), Some("3")), with_seed("3"));
    assert_ne!(with_seed("1"), with_seed("2"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn slope_reads_moment_output() {
    let dir = scratch("slope");
    let path = dir.join("m.csv");
    let p = path.to_str().unwrap();
    assert_eq!(
        expsum(&["--out", p, "moment", "--sizes", "8,16,32", "--samples", "20"])
            .status
            .code(),
        Some(0)
    );
    let text = stdout(&expsum(&["slope", "--input", p, "--alpha", "1"]));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "3");
    let slope: f64 = row[2].parse().unwrap();
    assert!((2.0..4.0).contains(&slope), "{slope}");
    std::fs::remove_dir_all(dir).unwrap();
}
