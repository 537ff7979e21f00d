use std::path::Path;
use std::process::{Command, Output};

fn latpoly(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latpoly"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("LATPOLY_THREADS")
        .output()
        .expect("run binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn files(dir: &Path, prefix: &str) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(prefix))
        .collect();
    v.sort();
    v
}

#[test]
fn enumerate_walks_prints_count_and_writes_manifest() {
    let d = tempfile::tempdir().unwrap();
    let o = latpoly(d.path(), &["enumerate", "--model", "walk", "--dim", "2", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("100"));
    let m = files(d.path(), "manifest-");
    assert_eq!(m.len(), 1);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&m[0]).unwrap()).unwrap();
    let id = manifest["id"].as_str().unwrap();
    assert_eq!(manifest["log_convention"], "natural");
    assert_eq!(manifest["outputs"][0]["rigor"][0], "exact");
    let csv = std::fs::read_to_string(&files(d.path(), "enumerate-")[0]).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.starts_with(id), "{line}");
    }
    assert!(csv.contains(",walk,site,2,4,contains-origin,100,exact"));
}

#[test]
fn single_contact_verifier_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = latpoly(d.path(), &["verify", "single-contact", "--dim", "2", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS single-contact"), "{}", stdout(&o));
}

#[test]
fn single_site_tree_has_unit_partition_function() {
    let d = tempfile::tempdir().unwrap();
    let o = latpoly(d.path(), &["partition", "--model", "tree", "--dim", "2", "--n", "1", "--beta", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(" Z=1 "), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        vec!["enumerate", "--n", "3", "--no-such-flag"],
        vec!["enumerate", "--model", "walk", "--n", "3", "--constraint", "lex-star"],
        vec!["enumerate", "--model", "tree", "--n", "3", "--animal-convention", "subgraph"],
        vec!["partition", "--n", "3", "--beta", "0.1", "--beta-grid", "0,1"],
        vec!["partition", "--n", "3"],
        vec!["enumerate"],
        vec!["sample", "--model", "tree", "--method", "perm", "--n", "5"],
        vec!["theorem3", "--model", "tree", "--n", "4"],
        vec!["spans", "--dim", "7", "--n", "3"],
    ] {
        let o = latpoly(d.path(), &args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn help_exits_zero() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(latpoly(d.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn resource_limit_exits_three() {
    let d = tempfile::tempdir().unwrap();
    let o = latpoly(d.path(), &["enumerate", "--model", "walk", "--n", "8", "--limit", "50"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failed_verification_exits_two() {
    // the literal edge-weight comparison fails already for one step
    let d = tempfile::tempdir().unwrap();
    let o = latpoly(d.path(), &["theorem3", "--n", "3", "--j", "1", "--beta", "0.25"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL ZW+(b) <= ZWW+(2b)"));
}

#[test]
fn json_output_and_table_store() {
    let d = tempfile::tempdir().unwrap();
    let table = d.path().join("counts.txt");
    let o = latpoly(
        d.path(),
        &["enumerate", "--n", "5", "--format", "json", "--table", table.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("87"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&files(d.path(), "enumerate-")[0]).unwrap()).unwrap();
    assert_eq!(json[4]["count"], "87");
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.contains("tree site 2 5 translation-classes 87\n"));
}

#[test]
fn rerun_reproduces_identical_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["sample", "--model", "walk", "--n", "8", "--size", "2000", "--seed", "5"];
    let oa = Command::new(env!("CARGO_BIN_EXE_latpoly"))
        .args(args)
        .arg("--out")
        .arg(a.path())
        .env("LATPOLY_THREADS", "1")
        .output()
        .unwrap();
    let ob = latpoly(b.path(), &[&args[..], &["--threads", "3"]].concat());
    assert!(oa.status.success() && ob.status.success());
    let fa = files(a.path(), "sample-");
    let fb = files(b.path(), "sample-");
    assert_eq!(fa[0].file_name(), fb[0].file_name());
    assert_eq!(std::fs::read(&fa[0]).unwrap(), std::fs::read(&fb[0]).unwrap());
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&files(a.path(), "manifest-")[0]).unwrap()).unwrap();
    assert_eq!(m["threads"], 1);
    assert_eq!(m["seeds"][0], 5);
}

#[test]
fn every_subcommand_runs() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        vec!["profile", "--model", "walk", "--n", "4", "--edges"],
        vec!["spans", "--model", "animal", "--animal-convention", "subgraph", "--n", "4"],
        vec!["growth", "--model", "walk", "--n", "6"],
        vec!["verify", "marks", "--n", "3", "--j", "2"],
        vec!["verify", "marks", "--model", "walk", "--n", "3", "--j", "1"],
        vec!["verify", "concat", "--n", "2", "--m", "3"],
        vec!["verify", "bridge", "--model", "walk", "--n", "2", "--m", "2"],
        vec!["verify", "zeta", "--model", "walk", "--n", "3", "--k", "1"],
        vec!["verify", "supermult", "--model", "walk", "--n", "6"],
        vec!["theorem1", "--n", "5", "--j", "2", "--beta-grid", "-0.5,0,0.3"],
        vec!["sample", "--model", "tree", "--method", "regraft", "--n", "5", "--size", "2000"],
        vec!["span-report", "--model", "walk", "--n-list", "4,12", "--exact-max", "8", "--size", "2000"],
    ] {
        let o = latpoly(d.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
