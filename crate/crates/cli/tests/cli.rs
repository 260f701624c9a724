use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hedonic_core::format::{parse_instance, parse_partition};
use hedonic_core::{is_connected_partition, is_nash_stable};
use tempfile::TempDir;

fn ashg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ashg")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn assert_stable_witness(instance: &Path, witness: &Path, connected: bool) {
    let g = parse_instance(&fs::read_to_string(instance).unwrap()).unwrap();
    let p = parse_partition(&fs::read_to_string(witness).unwrap()).unwrap();
    assert!(is_nash_stable(&g, &p).unwrap());
    if connected {
        assert!(is_connected_partition(&g, &p).unwrap());
    }
}

#[test]
fn sat_generators_emit_witnesses_from_a_certificate() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", "p cnf 3 2\n1 -2 3 0\n-1 2 0\n");
    let cert = write(&dir, "a.txt", "1 2 -3\n");
    let (g, w) = (dir.path().join("g"), dir.path().join("w"));
    for args in [vec!["gen", "sat-hd", "--cnf", s(&cnf), "--delta", "4"], vec!["gen", "sat-bd", "--cnf", s(&cnf)]] {
        let mut args = args;
        args.extend(["--certificate", s(&cert), "--witness", s(&w), "-o", s(&g)]);
        let o = ashg(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(&g).unwrap();
        assert!(text.starts_with("c sat-") && text.contains("c v 1 ") && text.contains(" selection "));
        assert_stable_witness(&g, &w, false);
        assert_eq!(code(&ashg(&["verify", s(&g), s(&w)])), 0);
    }
}

#[test]
fn unsatisfying_or_malformed_certificates_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", "p cnf 2 1\n1 2 0\n");
    let w = dir.path().join("w");
    for cert in ["-1 -2\n", "1\n", "1 1 2\n", "3 -1 2\n"] {
        let c = write(&dir, "a.txt", cert);
        let o = ashg(&["gen", "sat-bd", "--cnf", s(&cnf), "--certificate", s(&c), "--witness", s(&w)]);
        assert_eq!(code(&o), 3, "certificate {cert:?}");
    }
    let o = ashg(&["gen", "sat-bd", "--cnf", s(&cnf), "--witness", s(&w)]);
    assert_eq!(code(&o), 3, "a witness needs a certificate");
}

#[test]
fn three_partition_and_bin_packing_witnesses() {
    let dir = TempDir::new().unwrap();
    let (g, w) = (dir.path().join("g"), dir.path().join("w"));
    let items = write(&dir, "items", "1 2 3 2 2 2\n");
    let cert = write(&dir, "cert", "1 2 3\n4 5 6\n");
    let o = ashg(&[
        "gen",
        "3part",
        "--items",
        s(&items),
        "--target",
        "6",
        "--normalize",
        "--certificate",
        s(&cert),
        "--witness",
        s(&w),
        "-o",
        s(&g),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_stable_witness(&g, &w, false);
    let bad = write(&dir, "bad", "1 2 4\n3 5 6\n");
    let o = ashg(&[
        "gen",
        "3part",
        "--items",
        s(&items),
        "--target",
        "6",
        "--normalize",
        "--certificate",
        s(&bad),
        "--witness",
        s(&w),
    ]);
    assert_eq!(code(&o), 3);

    let items = write(&dir, "bp", "1 1 2\n");
    let cert = write(&dir, "bins", "1 1 2\n");
    for unit in [false, true] {
        let mut args = vec!["gen", "binpack", "--items", s(&items), "--capacity", "2", "--bins", "2"];
        if unit {
            args.push("--unit-weights");
        }
        args.extend(["--certificate", s(&cert), "--witness", s(&w), "-o", s(&g)]);
        assert_eq!(code(&ashg(&args)), 0);
        assert_stable_witness(&g, &w, true);
        assert_eq!(code(&ashg(&["verify", "--connected", s(&g), s(&w)])), 0);
    }
}

#[test]
fn square_witness_is_connected() {
    let dir = TempDir::new().unwrap();
    // every payoff is zero, so the grand coalition is stable
    let inst = write(&dir, "g", "p ashg 3 2\na 1 2 0\na 3 2 0\n");
    let cert = write(&dir, "p", "s part 3 1\n1 1\n2 1\n3 1\n");
    let (g, w) = (dir.path().join("sq"), dir.path().join("w"));
    let o = ashg(&["gen", "square", s(&inst), "--certificate", s(&cert), "--witness", s(&w), "-o", s(&g)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_stable_witness(&g, &w, true);
    let unstable = write(&dir, "q", "s part 2 1\n1 1\n2 1\n");
    let stalker = write(&dir, "st", "p ashg 2 2\na 1 2 1\na 2 1 -1\n");
    let o = ashg(&["gen", "square", s(&stalker), "--certificate", s(&unstable), "--witness", s(&w)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_connected_rejects_split_coalitions() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "g", "p ashg 3 2\na 1 2 0\na 3 2 0\n");
    let p = write(&dir, "p", "s part 3 2\n1 1\n2 2\n3 1\n");
    assert_eq!(code(&ashg(&["verify", s(&inst), s(&p)])), 0);
    let o = ashg(&["verify", "--connected", s(&inst), s(&p)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("not connected"));
}

#[test]
fn random_generation_is_deterministic() {
    let args = ["gen", "random", "--n", "7", "--seed", "42", "--min-weight", "-2", "--max-weight", "2"];
    let (a, b) = (ashg(&args), ashg(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let g = parse_instance(&String::from_utf8_lossy(&a.stdout)).unwrap();
    assert_eq!(g.n(), 7);
    assert!(g.max_abs_weight() <= 2);
    assert_ne!(ashg(&["gen", "random", "--n", "7", "--seed", "43"]).stdout, a.stdout);
}

#[test]
fn solve_modes_agree_and_report_json() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "g", "p ashg 4 6\na 1 2 2\na 2 1 1\na 2 3 -1\na 3 2 2\na 3 4 1\na 4 3 1\n");
    let td = dir.path().join("td");
    assert_eq!(code(&ashg(&["decompose", s(&inst), "--heuristic", "min-fill", "-o", s(&td)])), 0);
    for mode in ["nash", "connected-nash", "dynamics"] {
        let out = dir.path().join(mode);
        let o = ashg(&["solve", s(&inst), "--mode", mode, "--td", s(&td), "--workers", "2", "-o", s(&out)]);
        assert_eq!(code(&o), 0, "{mode}: {}", String::from_utf8_lossy(&o.stderr));
        assert_stable_witness(&inst, &out, mode == "connected-nash");
        let report: serde_json::Value = serde_json::from_slice(o.stderr.trim_ascii()).unwrap();
        assert_eq!(report["answer"], "SOME");
        assert_eq!(report["n"], 4);
    }
    let wrong = write(&dir, "td2", "s td 1 2 3\nb 1 1 2\n");
    assert_eq!(code(&ashg(&["solve", s(&inst), "--td", s(&wrong)])), 3);
}
