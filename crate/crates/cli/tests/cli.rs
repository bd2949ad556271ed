use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn boxdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxdist")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_table_rows() {
    let out = boxdist(&["bounds", "--n", "2-3", "--q", "2,3", "--s", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# manifest: {"));
    let body = lines.collect::<Vec<_>>().join("\n");
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    let row = |n: &str, q: &str, s: &str| rows.iter().find(|r| &r[0] == n && &r[1] == q && &r[2] == s).unwrap();
    let r = row("2", "2", "1");
    assert_eq!(&r[col("main_theorem")], "6");
    assert_eq!(&r[col("dfrank_box")], "3");
    assert_eq!(&r[col("bbs")], "3");
    assert_eq!(&row("3", "3", "2")[col("dfrank_box")], "10");
}

#[test]
fn empty_grid_gives_header_only() {
    let out = boxdist(&["bounds", "--n", "", "--q", "2", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("n,q,s,"));
}

#[test]
fn bounds_json_carries_manifest() {
    let out = boxdist(&["bounds", "--n", "3", "--q", "2", "--s", "1", "--format", "json"]);
    let v = json_of(&out);
    assert_eq!(v["manifest"]["subcommand"], "bounds");
    assert_eq!(v["rows"][0]["bounds"]["main_theorem"]["value"], "8");
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = boxdist(&["bounds", "--n", "1-3", "--q", "2-4", "--s", "1-3", "--out", path_str(p)]);
        assert_eq!(out.status.code(), Some(0));
    }
    // the manifest records the output path, so compare everything after it
    let body = |p: &Path| fs::read_to_string(p).unwrap().split_once('\n').unwrap().1.to_string();
    assert_eq!(body(&a), body(&b));
    let x = boxdist(&["probe", "--n", "2", "--q", "3", "--s", "2"]);
    let y = boxdist(&["probe", "--n", "2", "--q", "3", "--s", "2", "--workers", "1"]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn probe_on_the_tight_cube() {
    let out = boxdist(&["probe", "--n", "3", "--q", "2", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["best_size"], 4);
    assert_eq!(v["count_monomials"], "4");
    assert_eq!(v["optimal"], true);
    assert_eq!(v["conjecture_consistent"], true);
    assert_eq!(v["theorem_consistent"], true);
}

#[test]
fn malformed_input_exits_one() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let out = boxdist(&["search", "--box", path_str(&bad), "--s", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let missing = boxdist(&["search", "--box", path_str(&dir.path().join("nope.json")), "--s", "1"]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(boxdist(&["jconst", "--t", "3"]).status.code(), Some(1));
    assert_eq!(boxdist(&["construct", "charvec", "--n", "3", "--s", "4"]).status.code(), Some(1));
    assert_eq!(boxdist(&["--help"]).status.code(), Some(0));
}

#[test]
fn construct_witness_search_round_trip() {
    let dir = TempDir::new().unwrap();
    let set = dir.path().join("set.json");
    let poly = dir.path().join("poly.json");
    let check = dir.path().join("check.json");
    let found = dir.path().join("found.json");

    let out = boxdist(&["construct", "charvec", "--n", "4", "--s", "2", "--out", path_str(&set)]);
    assert_eq!(out.status.code(), Some(0));
    let v = read_json(&set);
    assert_eq!(v["claimed_size"], "6");
    assert_eq!(v["s_achieved"], 2);
    assert_eq!(v["points"].as_array().unwrap().len(), 6);

    let out = boxdist(&["witness", "build", "--points", path_str(&set), "--out", path_str(&poly)]);
    assert_eq!(out.status.code(), Some(0));
    let out = boxdist(&["witness", "check", "--poly", path_str(&poly), "--points", path_str(&set), "--out", path_str(&check)]);
    assert_eq!(out.status.code(), Some(0));
    let r = read_json(&check);
    assert_eq!(r["condition_i_ok"], true);
    assert_eq!(r["condition_ii_ok"], true);

    let out = boxdist(&["search", "--box", path_str(&set), "--s", "2", "--out", path_str(&found)]);
    assert_eq!(out.status.code(), Some(0));
    let r = read_json(&found);
    // the 4-cube holds 8 points at two distances, more than the construction
    assert_eq!(r["best_size"], 8);
    assert_eq!(r["optimal"], true);
    assert_eq!(r["manifest"]["subcommand"], "search");
}

#[test]
fn tampered_palette_fails_the_check() {
    let dir = TempDir::new().unwrap();
    let set = dir.path().join("set.json");
    let poly = dir.path().join("poly.json");
    boxdist(&["construct", "charvec", "--n", "3", "--s", "1", "--out", path_str(&set)]);
    // the set's only squared distance is 2; a polynomial vanishing at 1 instead misses it
    let out = boxdist(&["witness", "build", "--points", path_str(&set), "--palette", "1", "--out", path_str(&poly)]);
    assert_eq!(out.status.code(), Some(0));
    let out = boxdist(&["witness", "check", "--poly", path_str(&poly), "--points", path_str(&set)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["condition_ii_ok"], false);
}

#[test]
fn full_box_and_jconst() {
    let dir = TempDir::new().unwrap();
    let bx = dir.path().join("box.json");
    fs::write(&bx, r#"{"coords": [["0", "1/2", "2"], ["-1", "0", "1"]]}"#).unwrap();
    let v = json_of(&boxdist(&["construct", "full-box", "--box", path_str(&bx)]));
    assert_eq!(v["claimed_size"], "9");
    assert_eq!(v["points"].as_array().unwrap().len(), 9);

    let v = json_of(&boxdist(&["jconst", "--t", "3", "--d", "3"]));
    let (lo, hi) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lo <= hi && (lo - 0.9184).abs() < 1e-3);
    let v = json_of(&boxdist(&["jconst", "--limit"]));
    assert!((v["lo"].as_f64().unwrap() - 0.8414).abs() < 1e-3);
}
