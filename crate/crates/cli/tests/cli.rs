use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use omegacat::pasting::enumerate_trees;
use omegacat::pros::{MonoidModel, Pro};
use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omegacat"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("OMEGACAT_LOG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["validate", "theories/monoid.json"]).status.code(), Some(0));
    let bad = run(&["validate", "theories/broken_types.json"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("bad-unit"), "{}", stderr(&bad));
    let malformed = run(&["validate", "theories/malformed.json"]);
    assert_eq!(malformed.status.code(), Some(2));
    assert!(stderr(&malformed).starts_with("error:"));
    assert_eq!(run(&["validate", "no/such/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["hom", "theories/monoid.json", "4", "1"]).status.code(), Some(2));
    assert_eq!(run(&["hom", "theories/monoid.json", "1", "1", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "theories/monoid.json", "--hom-bound", "x"]).status.code(), Some(2));
}

#[test]
fn every_fixture_validates() {
    for dir in ["collections", "contraction", "algebras"] {
        for e in std::fs::read_dir(fixtures().join(dir)).unwrap() {
            let p = e.unwrap().path();
            let o = run(&["validate", p.to_str().unwrap(), "--format", "text"]);
            assert_eq!(o.status.code(), Some(0), "{}: {}", p.display(), stderr(&o));
        }
    }
}

#[test]
fn dim0_hom_listing_matches_the_model() {
    for (n, m) in [(0, 1), (1, 1), (2, 1), (2, 2), (3, 1), (1, 2)] {
        let o = run(&["hom", "theories/monoid.json", &n.to_string(), &m.to_string()]);
        assert!(o.status.success());
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        let cells = v["cells"].as_array().unwrap();
        assert_eq!(cells.len(), MonoidModel.enumerate_hom(n, m, 0).unwrap().len(), "hom({n},{m})");
        assert!(cells.iter().all(|c| c["tree"] == "[]"));
    }
}

#[test]
fn dim1_hom_listing_matches_the_engine() {
    let trees = enumerate_trees(1, 2);
    for (n, m) in [(2, 1), (2, 2), (0, 1)] {
        let o = run(&["hom", "theories/monoid.json", &n.to_string(), &m.to_string(), "--dim", "1", "--format", "text"]);
        assert!(o.status.success());
        let rows: BTreeSet<(String, String)> = stdout(&o)
            .lines()
            .map(|l| {
                let (p, t) = l.split_once('\t').unwrap();
                (p.to_string(), t.to_string())
            })
            .collect();
        let mut want = BTreeSet::new();
        for f in MonoidModel.enumerate_hom(n, m, 0).unwrap() {
            for t in &trees {
                want.insert((MonoidModel.describe(&f), t.to_string()));
            }
        }
        assert_eq!(rows, want, "hom({n},{m})");
    }
}

#[test]
fn check_algebra_accepts_and_rejects() {
    let ok = run(&["check-algebra", "theories/monoid.json", "algebras/z2_xor.json"]);
    assert!(ok.status.success(), "{}", stderr(&ok));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["ok"], true);
    let bad = run(&["check-algebra", "theories/monoid.json", "algebras/z2_corrupted.json"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("composition"));
}

#[test]
fn weaken_text_matches_the_golden_counts() {
    let o = run(&["weaken", "theories/monoid.json", "--format", "text"]);
    assert!(o.status.success());
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("golden/monoid_d1_counts.json")).unwrap()).unwrap();
    let counts = golden["counts"].as_object().unwrap();
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), counts.len());
    for l in lines {
        let (k, c) = l.split_once('\t').unwrap();
        assert_eq!(counts[k].as_u64().unwrap().to_string(), c, "{k}");
    }
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = std::env::temp_dir().join(format!("omegacat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.json");
    let a = run(&["globularize", "theories/pointed.json"]);
    let b = run(&["globularize", "theories/pointed.json", "--out", path.to_str().unwrap()]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn dot_exports() {
    for p in ["collections/arrow.json", "contraction/endo_loop.json", "algebras/z2_xor.json", "theories/pointed.json"] {
        let o = run(&["export-dot", p]);
        assert!(o.status.success(), "{p}: {}", stderr(&o));
        let s = stdout(&o);
        assert!(s.starts_with("digraph"), "{p}");
        assert!(s.trim_end().ends_with('}'));
    }
}

#[test]
fn shuffled_weaken_keeps_counts() {
    let a = run(&["weaken", "theories/monoid.json", "--format", "text"]);
    let b = run(&["weaken", "theories/monoid.json", "--format", "text", "--shuffle", "11"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn presented_theory_validates_at_small_bounds() {
    let o = run(&["validate", "theories/group.json", "--hom-bound", "1", "--max-expr-size", "2", "--format", "text"]);
    assert!(o.status.success(), "{}", stderr(&o));
}
