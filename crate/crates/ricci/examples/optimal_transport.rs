//! Exact Wasserstein distances and optimal couplings on a small metric
//! space, cross-checked against the dense-LP brute force.
//!
//! Run with: `cargo run --example optimal_transport`

use ndarray::array;
use ricci::markov::Distribution;
use ricci::space::FiniteMetricSpace;
use ricci::{oracle, transport};

fn main() -> ricci::Result<()> {
    // three collinear points: d(a,b) = d(b,c) = 1, d(a,c) = 2
    let space = FiniteMetricSpace::new(
        vec!["a".into(), "b".into(), "c".into()],
        array![[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
    )?;
    let mu = Distribution::dirac(3, 0);
    let nu = Distribution::from_vec(vec![0.0, 0.5, 0.5])?;

    let w = transport::w1(&mu, &nu, &space)?;
    println!("W1(delta_a, (0, 1/2, 1/2)) = {w}");

    let coupling = transport::optimal_coupling(&mu, &nu, &space)?;
    println!("optimal coupling (cost {:.6}):", coupling.cost);
    for ((x, y), &mass) in coupling.joint.indexed_iter() {
        if mass > 1e-12 {
            println!("  {:>3} -> {:<3} carries {mass:.6}", space.labels()[x], space.labels()[y]);
        }
    }
    println!("marginal error: {:.3e}", coupling.marginal_error(&mu, &nu));

    let lp = oracle::w1_bruteforce(
        mu.weights().as_slice().unwrap(),
        nu.weights().as_slice().unwrap(),
        space.dist_matrix(),
    )?;
    println!("dense-LP brute force agrees: {lp} (|diff| = {:.3e})", (lp - w).abs());

    let tv = transport::tv_distance(&mu, &nu);
    println!("TV sandwich: {} <= {w} <= {}", space.d0() * tv, space.diam() * tv);
    Ok(())
}
