use std::fs;
use std::path::Path;
use std::process::Command;

use gff_excursions::harness::{exit, parse_config, run, Subcommand};
use gff_excursions::Error;

const BASE: &str = "domain = square(side=2, center=0,0)\nn = 4\nsamples = 20\nseed = 5\n";

fn gfflab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gfflab")).args(args).output().expect("run gfflab")
}

fn body(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn crossing_grid_has_one_row_per_pair_and_level() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{BASE}n_list = 4, 5\n[crossing]\na_grid = 0.1, 0.2, 0.3\nb_grid = 0.4, 0.5, 0.6\n");
    let mut config = parse_config(&text).unwrap();
    config.out = dir.path().to_path_buf();
    let outcome = run(&config, Subcommand::Crossing).unwrap();
    assert!(outcome.passed());
    let csv = body(dir.path(), "crossing.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,a,b,M,p_hat,ci_low,ci_high,seed0"));
    assert_eq!(lines.count(), 9 * 2);
    assert!(body(dir.path(), "manifest.txt").contains("rows crossing.csv = 18"));
}

#[test]
fn same_seed_gives_identical_tables() {
    for sub in [Subcommand::Sample, Subcommand::Decompose, Subcommand::Spin, Subcommand::Minkowski] {
        let mut bodies = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            let mut config = parse_config(BASE).unwrap();
            config.out = dir.path().to_path_buf();
            run(&config, sub).unwrap();
            bodies.push(fs::read(dir.path().join(format!("{sub}.csv"))).unwrap());
        }
        assert_eq!(bodies[0], bodies[1], "{sub}");
    }
}

#[test]
fn every_table_starts_with_its_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = parse_config(&format!("{BASE}[stats]\ntest = sign-independence\nk = 2\n")).unwrap();
    config.out = dir.path().to_path_buf();
    for sub in Subcommand::ALL {
        if sub == Subcommand::Markov || sub == Subcommand::Conjecture {
            continue; // covered by the slower test below
        }
        run(&config, sub).unwrap();
        let csv = body(dir.path(), &format!("{sub}.csv"));
        assert_eq!(csv.lines().next(), Some(sub.csv_header()), "{sub}");
    }
}

#[test]
fn markov_and_conjecture_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = parse_config(BASE).unwrap();
    config.out = dir.path().to_path_buf();
    for sub in [Subcommand::Markov, Subcommand::Conjecture] {
        run(&config, sub).unwrap();
        let csv = body(dir.path(), &format!("{sub}.csv"));
        assert_eq!(csv.lines().next(), Some(sub.csv_header()));
        assert_eq!(csv.lines().count(), 3, "{sub}");
    }
}

#[test]
fn corrupted_sign_test_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad = gfflab(&["stats", "sign-independence", "--corrupt", "--n", "4", "--samples", "400", "--out", out]);
    assert_eq!(bad.status.code(), Some(exit::ASSERTION), "{}", String::from_utf8_lossy(&bad.stderr));
    assert!(body(dir.path(), "manifest.txt").contains("status = fail"));
}

#[test]
fn config_errors_exit_two_and_list_every_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "domain = square(side=2, center=0,0)\nn = 1\nbogus = 3\n").unwrap();
    let o = gfflab(&["sample", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("line 3"), "{err}");
    assert!(matches!(parse_config("n = 4\n"), Err(Error::Config(e)) if e.len() == 1));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("not-a-dir");
    fs::write(&file, "x").unwrap();
    let o = gfflab(&["sample", "--n", "2", "--samples", "1", "--out", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(exit::IO));
}

#[test]
fn cli_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, BASE).unwrap();
    let out = dir.path().join("out");
    let o = gfflab(&[
        "sample",
        "--config",
        path.to_str().unwrap(),
        "--seed",
        "9",
        "--n",
        "3",
        "--samples",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = body(&out, "manifest.txt");
    assert!(manifest.contains("base_seed = 9"));
    assert!(manifest.contains("rows sample.csv = 4"));
    assert!(body(&out, "sample.csv").lines().skip(1).all(|l| l.starts_with("3,")));
}
