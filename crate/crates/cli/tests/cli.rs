use std::path::Path;
use std::process::{Command, Output};

fn perslab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perslab"))
        .args(args)
        .current_dir(dir)
        .env_remove("PERSISTLAB_SEED")
        .output()
        .expect("run perslab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn exact_p_prints_and_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = perslab(dir.path(), &["exact-p", "--family", "simple", "--n", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "3/8\n");
    let csv = std::fs::read_to_string(dir.path().join("exact-p.csv")).unwrap();
    assert_eq!(csv, "spec_id,n,quantity,value_num,value_den\nsimple,3,pN,3,8\n");
    let manifest = std::fs::read_to_string(dir.path().join("exact-p.manifest")).unwrap();
    assert!(manifest.contains("command = exact-p"));
    assert!(manifest.contains("seed = 0"));
}

#[test]
fn spitzer_half_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let o = perslab(dir.path(), &["spitzer", "--probs", "half", "--n", "3"]);
    assert_eq!(stdout(&o), "5/16\n");
    let csv = std::fs::read_to_string(dir.path().join("spitzer.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.ends_with("3,strict,1,2,5,16\n"), "{csv}");
}

#[test]
fn prop2_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = perslab(dir.path(), &["prop2", "--bspec", "correlated-coin", "--n", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("1,1/2,1/4,PASS,1/2,1/4,FAIL"), "{out}");
    assert!(out.contains("verdict,NOT-ASSERTED"));

    let o = perslab(dir.path(), &["prop2", "--bspec", "coupled-coin", "--n", "5"]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("verdict,PASS\n"));
    let csv = std::fs::read_to_string(dir.path().join("prop2.csv")).unwrap();
    assert!(csv.starts_with("bspec_id,n,x,lhs1_num"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let unknown = perslab(d, &["exact-p", "--family", "simple", "--n", "3", "--bogus", "1"]);
    assert_eq!(unknown.status.code(), Some(2));

    std::fs::write(d.join("bad.conf"), "command = exact-p\nfamily = simple\nn = 3\nbogus = 1\n").unwrap();
    let o = perslab(d, &["run", "--config", "bad.conf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config-error"), "{}", stderr(&o));

    let o = perslab(d, &["exact-p", "--family", "simple", "--n", "40", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget-exceeded"));

    let o = perslab(d, &["exact-p", "--family", "laplace", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));

    let o = perslab(d, &["mc-p", "--family", "simple", "--n", "3", "--samples", "10", "--assert", "maybe"]);
    assert_eq!(o.status.code(), Some(2));

    // a slope far from the target exponent is an assertion failure
    std::fs::write(
        d.join("steep.csv"),
        "spec_id,quantity,n,value,stderr,n_samples,seed,shards\n\
         x,pN,16,0.0625,0.001,1000,0,1\nx,pN,32,0.03125,0.001,1000,0,1\n\
         x,pN,64,0.015625,0.001,1000,0,1\nx,pN,128,0.0078125,0.001,1000,0,1\n",
    )
    .unwrap();
    let o = perslab(d, &["estimate-constant", "--input", "steep.csv"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = perslab(d, &["fit-exponent", "--input", "steep.csv"]);
    assert!(o.status.success());
    let slope: f64 = stdout(&o).lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((slope + 1.0).abs() < 1e-9, "{slope}");
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args =
        ["mc-p", "--family", "laplace", "--grid", "8,16,32", "--samples", "5000", "--seed", "11", "--shards", "3"];
    assert!(perslab(d, &args).status.success());
    let first = std::fs::read(d.join("mc-p.csv")).unwrap();
    std::fs::rename(d.join("mc-p.manifest"), d.join("run.conf")).unwrap();
    std::fs::remove_file(d.join("mc-p.csv")).unwrap();
    let o = perslab(d, &["run", "--config", "run.conf"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(d.join("mc-p.csv")).unwrap(), first);

    // shard count does not change the numbers
    let o = perslab(d, &["run", "--config", "run.conf", "--shards", "1", "--output", "one.csv"]);
    assert!(o.status.success());
    let one = std::fs::read_to_string(d.join("one.csv")).unwrap();
    let strip = |s: &str| s.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>();
    assert_eq!(strip(&one), strip(&String::from_utf8(first).unwrap()));
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_perslab"));
        c.args(["mc-p", "--family", "simple", "--n", "6", "--samples", "2000"]).current_dir(dir.path());
        match seed {
            Some(s) => c.env("PERSISTLAB_SEED", s),
            None => c.env_remove("PERSISTLAB_SEED"),
        };
        assert!(c.output().unwrap().status.success());
        std::fs::read_to_string(dir.path().join("mc-p.manifest")).unwrap()
    };
    assert!(run(Some("42")).contains("seed = 42"));
    assert!(run(None).contains("seed = 0"));
}

#[test]
fn exact_scaling_report_never_samples() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        perslab(dir.path(), &["scaling-report", "--family", "simple", "--grid", "16,23,32,45,64", "--exact", "true"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("sampled,false"));
    assert!(out.contains("verdict,PASS"));
}

#[test]
fn cycle_law_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let o = perslab(dir.path(), &["cycle-law", "--family", "simple", "--horizon", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("convention,horizon,law,theta,psi,num,den\nweak-up,4,first,2,1,1,4\n"));
    let o = perslab(dir.path(), &["symmetry-audit", "--family", "lazy", "--stay_prob", "1/2", "--horizon", "6"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 9);
}

#[test]
fn bridge_values_and_bridge_set() {
    let dir = tempfile::tempdir().unwrap();
    let o = perslab(dir.path(), &["exact-bridge", "--family", "simple", "--grid", "2,4"]);
    assert_eq!(stdout(&o), "2,1/2\n4,1/3\n");
    let o = perslab(dir.path(), &["exact-bridge", "--family", "simple", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
}
