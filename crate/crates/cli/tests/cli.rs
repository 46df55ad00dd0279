use std::fs;
use std::process::{Command, Output};

fn codedcache(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codedcache"))
        .args(args)
        .output()
        .expect("binary runs")
}

const SMALL: &[&str] = &[
    "--users",
    "3",
    "--files",
    "6",
    "--packets",
    "4",
    "--alpha",
    "0.8",
    "--cache-sizes",
    "0,2",
    "--trials",
    "3",
    "--grasp-iterations",
    "5",
    "--scheme",
    "lfu",
    "--scheme",
    "gcc",
    "--scheme",
    "grasp",
];

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn csv_to_stdout_is_reproducible() {
    let args: Vec<&str> = SMALL.iter().copied().chain(["--no-timestamp"]).collect();
    let a = stdout(&codedcache(&args));
    let b = stdout(&codedcache(&args));
    assert_eq!(a, b);
    assert!(a.contains(
        "\nscheme,n,m,B,alpha,M,trials,avg_rate,std_rate,avg_colors,r_ub,seed,runtime_ms\n"
    ));
    assert!(a.contains("# schemes=lfu,gcc,grasp\n"));
    assert!(!a.contains("# generated"));
    let rows: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    // lfu, gcc, gcc_raw, grasp, grasp_raw and bound at two cache sizes.
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.split(',').count() == 13));
}

#[test]
fn timestamp_is_on_by_default() {
    let out = stdout(&codedcache(SMALL));
    assert!(out.lines().any(|l| l.starts_with("# generated unix=")));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    fs::write(
        &path,
        "users=3\nfiles=6\npackets=4\ngrasp_iterations=5\ntrials=2\ncache_sizes=1\nschemes=grasp\n",
    )
    .unwrap();
    let out = stdout(&codedcache(&[
        "--config",
        path.to_str().unwrap(),
        "--grasp-iterations",
        "7",
        "--no-timestamp",
    ]));
    assert!(out.contains("# grasp_iterations=7\n"));
    assert!(out.contains("# trials=2\n"));
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    fs::write(&path, "users=10\nfiles=250\npackets=100\nalpha=x\n").unwrap();
    let out = codedcache(&["--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4: expected real"), "{err}");
}

#[test]
fn unknown_scheme_is_rejected() {
    let out = codedcache(&["--scheme", "magic", "--trials", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scheme `magic`"));
}

#[test]
fn output_file_and_dimacs_dump() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out/rates.csv");
    let graphs = dir.path().join("graphs");
    let args: Vec<&str> = SMALL
        .iter()
        .copied()
        .chain([
            "--output",
            csv.to_str().unwrap(),
            "--export-dimacs",
            graphs.to_str().unwrap(),
        ])
        .collect();
    let out = codedcache(&args);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(&csv)
        .unwrap()
        .contains("grasp_raw,3,6,4,0.8,2,3,"));
    for name in ["trial_0_1.col", "trial_0_3.col", "trial_2_2.col"] {
        assert!(graphs.join(name).exists(), "{name}");
    }
}

#[test]
fn bound_only_skips_simulation() {
    let out = stdout(&codedcache(&[
        "--users",
        "10",
        "--files",
        "250",
        "--packets",
        "100",
        "--alpha",
        "0.2",
        "--cache-sizes",
        "50,100",
        "--bound-only",
        "--no-timestamp",
    ]));
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with("bound,")).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("bound,10,250,100,0.2,50,0,3.570503,"));
    assert!(rows[1].starts_with("bound,10,250,100,0.2,100,0,1.490930,"));
}
