//! Acceptance gate, criterion 11: every command rerun with the same seed
//! produces byte-identical CSV output (criteria 1-10 live in the library
//! crate).

use std::path::PathBuf;
use std::process::Command;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("covert-irs-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

#[test]
fn criterion_11_rerun_determinism() {
    let commands: [(&str, &[&str]); 6] = [
        ("solve", &["solve", "--n-elements", "6", "--seed", "11", "--solver", "gd"]),
        ("prob-n2", &["prob-n2", "--sigma-aw", "1.2", "--seed", "2"]),
        ("prob-mc", &["prob-mc", "--n-elements", "8", "--trials", "20000", "--seed", "5"]),
        ("bounds-stats", &["bounds-stats", "--n-elements", "8", "--trials", "20000", "--seed", "6"]),
        (
            "sweep",
            &[
                "sweep",
                "--sweep",
                "sigma-aw:0.5:2:5",
                "--metric",
                "prob-mc",
                "--n-elements",
                "4",
                "--trials",
                "5000",
                "--seed",
                "7",
            ],
        ),
        ("trace", &["trace", "--n-elements", "4", "--seed", "3"]),
    ];
    for (name, args) in commands {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = scratch(&format!("{name}_{run}.csv"));
            let out = Command::new(env!("CARGO_BIN_EXE_covert-irs"))
                .args(args)
                .arg("--out")
                .arg(&path)
                .output()
                .expect("binary runs");
            assert!(
                out.status.success(),
                "{name} run {run}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            outputs.push(std::fs::read(&path).expect("csv written"));
        }
        assert_eq!(outputs[0], outputs[1], "{name}: reruns differ");
        assert!(!outputs[0].is_empty(), "{name}: empty output");
    }
    println!("criterion 11: PASS - all 6 commands byte-identical across seeded reruns");
}
