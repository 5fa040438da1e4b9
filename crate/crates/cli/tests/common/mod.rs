//! Golden-file runs of the binary. `HIVEFLOW_UPDATE_GOLDEN=1` rewrites the files.

#![allow(dead_code)]

use hiveflow::checks::Outcome;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

pub const GOLDEN_INSTANCES: [(&str, &str, &str, &str); 5] = [
    ("worked", "5,5,5,5,3,2,1,1,1", "8,8,7,5,3,3,3,3", "10,9,9,9,7,4,4,4,4,4,4"),
    ("c2", "2,1", "2,1", "3,2,1"),
    ("c3", "4,2", "4,2", "6,4,2"),
    ("negative", "2", "1,1", "2,2"),
    ("unit", "1", "1", "1,1"),
];

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hiveflow"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// `(file name, arguments)` for every golden output.
pub fn golden_cases() -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for (name, l, m, n) in GOLDEN_INSTANCES {
        let triple = vec!["--lambda".to_string(), l.into(), "--mu".into(), m.into(), "--nu".into(), n.into()];
        let with = |cmd: &[&str]| cmd.iter().map(|s| s.to_string()).chain(triple.iter().cloned()).collect::<Vec<_>>();
        out.push((format!("{name}.decide.json"), with(&["decide"])));
        out.push((format!("{name}.count.json"), with(&["count"])));
        out.push((format!("{name}.render.tikz"), with(&["render", "--format", "tikz"])));
        out.push((format!("{name}.render.dot"), with(&["render", "--format", "dot"])));
    }
    out
}

/// Runs every golden case twice; both runs must match each other and the stored file.
pub fn golden_outcome() -> Outcome {
    let start = Instant::now();
    let update = std::env::var("HIVEFLOW_UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    let mut failures = Vec::new();
    let cases = golden_cases();
    for (file, args) in &cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (run(&args).stdout, run(&args).stdout);
        if a != b {
            failures.push(format!("{file}: two runs differ"));
        }
        let path = golden_dir().join(file);
        if update {
            std::fs::create_dir_all(golden_dir()).expect("golden dir");
            std::fs::write(&path, &a).expect("write golden file");
        }
        match std::fs::read(&path) {
            Ok(stored) if stored == a => {}
            Ok(_) => failures.push(format!("{file}: differs from the stored golden file")),
            Err(e) => failures.push(format!("{file}: {e}")),
        }
    }
    Outcome {
        name: "golden outputs (decide, count, render x2)".into(),
        cases: cases.len(),
        failures,
        elapsed: start.elapsed(),
        detail: format!("{} instances", GOLDEN_INSTANCES.len()),
    }
}
