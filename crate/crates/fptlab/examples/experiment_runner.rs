//! Drive a full experiment from a config file: the same path the `fptlab`
//! CLI takes, producing per-method CSVs, a JSON summary, a comparison
//! report and a gnuplot script.
//!
//! ```bash
//! cargo run --release --example experiment_runner
//! ```

use fptlab::runner::{run, ExperimentConfig};

fn main() {
    let out_dir = std::env::temp_dir().join("fptlab-example-run");
    std::fs::remove_dir_all(&out_dir).ok();

    let config_text = format!(
        "\
# Markov benchmark at desk scale: simulation against both analytic routes.
[process]
family = exp-cosine
alpha = 1e-10
beta = 0.5

[boundary]
family = daniels-ou
d = 0.25
rate = 0.5

[methods]
list = mc, volterra, closed-form

[grid]
dt = 0.01
t_max = 8
h = 0.002

[estimate]
n_paths = 10000
seed = 42

[output]
dir = {}
",
        out_dir.display()
    );

    let config = ExperimentConfig::parse(&config_text).unwrap();
    println!("parsed config; canonical echo:\n{}", config.to_text());

    let outputs = run(&config).unwrap();
    println!("outputs:");
    for f in &outputs.files {
        println!("  {}", f.display());
    }

    println!("\ncomparison report:");
    print!("{}", outputs.report.render());

    println!("summary.json method keys and masses:");
    if let Some(methods) = outputs.summary["methods"].as_object() {
        for (name, v) in methods {
            println!("  {name}: mass = {}", v["mass"]);
        }
    }
}
