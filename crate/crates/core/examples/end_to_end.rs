//! The whole command-line pipeline in one process: synth -> preprocess ->
//! train -> eval -> roc, through the same entry point the `qeeg` binary uses.
//!
//! cargo run --release --example end_to_end

use qeeg::cli::run_cli;

fn run(line: &str) {
    println!("$ qeeg {line}");
    let argv: Vec<String> = std::iter::once("qeeg").chain(line.split_whitespace()).map(String::from).collect();
    let code = run_cli(&argv);
    if code != 0 {
        eprintln!("exit code {code}");
        std::process::exit(code);
    }
}

fn main() {
    let dir = std::env::temp_dir().join("qeeg-end-to-end");
    let d = dir.display();
    run(&format!("synth --trials 100 --seed 7 --out {d}"));
    run(&format!("preprocess --input {d}/eeg.csv --out {d}/features.csv"));
    run(&format!(
        "train --features {d}/features.csv --model {d}/model.json --seed 1 --dump-circuit {d}/circuit.txt"
    ));
    run(&format!("eval --model {d}/model.json --features {d}/features.csv"));
    run(&format!("roc --model {d}/model.json --features {d}/features.csv --out {d}/roc.csv"));
    println!("artifacts in {d}");
}
