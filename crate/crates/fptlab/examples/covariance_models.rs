//! Tour of the covariance families: evaluation, spectral density, and the
//! correlation time that summarizes each model with a single number.
//!
//! ```bash
//! cargo run --release --example covariance_models
//! ```

use fptlab::asymptotics::correlation_time;
use fptlab::covariance::Covariance;

fn main() {
    let models = [
        ("exp-cosine, almost Markov", Covariance::exp_cosine(1e-10, 0.5).unwrap()),
        ("exp-cosine, oscillating", Covariance::exp_cosine(0.5, 0.5).unwrap()),
        ("damped-oscillatory", Covariance::damped_oscillatory(1.0, 1.0).unwrap()),
    ];

    println!("covariance values gamma(t)");
    print!("{:>8}", "t");
    for (name, _) in &models {
        print!("  {name:>26}");
    }
    println!();
    for i in 0..=8 {
        let t = i as f64 * 0.75;
        print!("{t:>8.2}");
        for (_, m) in &models {
            print!("  {:>26.6}", m.eval(t));
        }
        println!();
    }

    println!("\nspectral density of the rational (exp-cosine) family");
    let m = Covariance::exp_cosine(0.25, 0.5).unwrap();
    for omega in [0.0, 0.25, 0.5, 1.0, 2.0, 5.0] {
        println!("  Gamma({omega:>4}) = {:.6}", m.spectral_density(omega).unwrap());
    }
    println!(
        "  damped-oscillatory family: {:?}",
        Covariance::damped_oscillatory(1.0, 1.0)
            .unwrap()
            .spectral_density(1.0)
            .unwrap_err()
            .to_string()
    );

    println!("\ncorrelation time theta = integral of |gamma|");
    for (name, m) in &models {
        println!("  {name:<28} theta = {:.6}", correlation_time(m));
    }
    println!(
        "  (pure exponential check: beta = 0.5 gives theta = {:.6}, expected 2)",
        correlation_time(&Covariance::exp_cosine(1e-10, 0.5).unwrap())
    );
}
