//! Drives the `dvs-snn` subcommands in-process on a temporary directory,
//! the same way a shell pipeline would.
//!
//! cargo run --release --example cli_pipeline

use dvs_snn::cli::main_with_args;

fn dvs_snn(args: &[&str]) -> i32 {
    println!("$ dvs-snn {}", args.join(" "));
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    main_with_args(std::iter::once("dvs-snn").chain(args.iter().copied()), &mut out, &mut err)
}

fn main() {
    let dir = std::env::temp_dir().join(format!("dvs-snn-example-{}", std::process::id()));
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let (train, test, weights) = (path("train"), path("test"), path("net.snnw"));

    let steps: [&[&str]; 5] = [
        &["--seed", "1", "gen-synthetic", "-o", &train, "--uav", "120", "--distractors", "120"],
        &["--seed", "2", "gen-synthetic", "-o", &test, "--uav", "120", "--distractors", "120"],
        &["train", &train, "-o", &weights, "--frames", "3000"],
        &["detect", &test, "-w", &weights, "--labels"],
        &["noise-sweep", &test, "-w", &weights, "--fractions", "0.005,0.02,0.05"],
    ];
    for step in steps {
        let code = dvs_snn(step);
        if code != 0 {
            eprintln!("exit code {code}");
            std::process::exit(code);
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
}
