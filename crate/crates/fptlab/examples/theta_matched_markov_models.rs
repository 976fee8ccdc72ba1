//! Parameterize Markov models by their correlation time and compare their
//! first-passage densities through the same falling polynomial threshold.
//!
//! The correlation time `theta = integral |gamma|` compresses a stationary
//! model into one number; matching it across model families is the natural
//! way to compare their crossing behavior. Here the conditioned
//! Ornstein-Uhlenbeck process at several theta values runs against the
//! Brownian-motion reference, all through `S(t) = 5 - t - t^2/2`.
//!
//! ```bash
//! cargo run --release --example theta_matched_markov_models
//! ```

use fptlab::asymptotics::correlation_time;
use fptlab::boundary::Boundary;
use fptlab::covariance::Covariance;
use fptlab::gauss_markov::GaussMarkov;
use fptlab::runner::{compare, NamedCurve};
use fptlab::volterra::solve_volterra;

fn main() {
    let boundary = Boundary::polynomial(vec![5.0, -1.0, -0.5]).unwrap();
    let t_max = 5.0;
    let h = 2e-3;

    // The stationary exp-cosine model in its Markov corner has
    // theta = 1/beta, so a target theta picks the decay rate directly.
    let mut curves = Vec::new();
    println!("{:>8} {:>8} {:>10} {:>10}", "theta", "beta", "mode", "mass");
    for theta in [0.25, 1.0, 4.0] {
        let beta = 1.0 / theta;
        let model = Covariance::exp_cosine(1e-10, beta).unwrap();
        let measured = correlation_time(&model);
        let ou = GaussMarkov::conditioned_ou(beta).unwrap();
        let sol = solve_volterra(&ou, &boundary, 0.0, h, t_max).unwrap();
        let values = sol.clamped_values();
        let (imax, _) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        println!(
            "{measured:>8.3} {beta:>8.3} {:>10.3} {:>10.4}",
            sol.times()[imax],
            sol.cumulative_mass()
        );
        curves.push(NamedCurve::from_points(
            &format!("ou-theta-{theta}"),
            sol.times().to_vec(),
            values,
        ));
    }

    // Brownian motion as the memoryless reference through the same curve.
    let wiener = GaussMarkov::wiener();
    let sol = solve_volterra(&wiener, &boundary, 0.0, h, t_max).unwrap();
    println!(
        "{:>8} {:>8} {:>10.3} {:>10.4}",
        "-",
        "-",
        sol.times()[sol
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0],
        sol.cumulative_mass()
    );
    curves.push(NamedCurve::from_points(
        "wiener",
        sol.times().to_vec(),
        sol.clamped_values(),
    ));

    let report = compare(&curves).unwrap();
    println!("\ndistances from the Brownian reference:");
    for p in report.pairs.iter().filter(|p| p.b == "wiener") {
        println!("  {:<14} L1 = {:.4}  sup = {:.4}", p.a, p.l1, p.sup);
    }
}
