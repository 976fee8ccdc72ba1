//! Two independent exact samplers of the same law: the rational spectrum
//! of the exp-cosine family factorizes into a 2-state linear system, whose
//! exactly discretized recursion must agree in distribution with circulant
//! embedding. Their agreement is a strong correctness check of both.
//!
//! ```bash
//! cargo run --release --example state_space_vs_circulant
//! ```

use fptlab::covariance::Covariance;
use fptlab::num::{ks_critical, ks_statistic};
use fptlab::simulate::{
    generate_batch, plan_embedding, state_space_batch, transfer_magnitude_sq, Conditioning,
    PathGrid,
};

fn main() {
    let (alpha, beta) = (0.25, 0.5);
    let model = Covariance::exp_cosine(alpha, beta).unwrap();

    println!("spectral factorization |H(i w)|^2 vs Gamma(w):");
    for omega in [0.0, 0.5, 1.0, 5.0, 20.0] {
        let h2 = transfer_magnitude_sq(alpha, beta, omega);
        let gamma = model.spectral_density(omega).unwrap();
        println!(
            "  w = {omega:>5}: |H|^2 = {h2:.12}, Gamma = {gamma:.12}, rel diff = {:.1e}",
            ((h2 - gamma) / gamma).abs()
        );
    }

    let grid = PathGrid::new(0.01, 501).unwrap();
    let n_paths = 30_000;
    let plan = plan_embedding(&model, &grid).unwrap();
    let circ = generate_batch(&plan, &model, &grid, n_paths, 11, &Conditioning::Unconditional).unwrap();
    let ss = state_space_batch(alpha, beta, &grid, n_paths, 12).unwrap();

    println!("\ntwo-sample KS on marginals ({n_paths} paths each):");
    let crit = ks_critical(0.01, n_paths, n_paths);
    for k in [50usize, 150, 250, 350, 500] {
        let a: Vec<f64> = circ.paths().map(|p| p[k]).collect();
        let b: Vec<f64> = ss.paths().map(|p| p[k]).collect();
        let d = ks_statistic(&a, &b);
        println!(
            "  t = {:>5.2}: D = {d:.5} ({} at the 1% level, critical {crit:.5})",
            grid.time(k),
            if d < crit { "accept" } else { "reject" }
        );
    }
}
