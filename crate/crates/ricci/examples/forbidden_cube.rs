//! The random walk on a binary cube with a forbidden region: negative
//! boundary curvature, the per-level recursion that eventually turns
//! positive, and the resulting gap/mixing certificates.
//!
//! Run with: `cargo run --example forbidden_cube`

use ricci::curvature::{curvature_profile_with_pairs, PairMode};
use ricci::{oracle, zoo};

fn main() -> ricci::Result<()> {
    // desk-scale instance with exact curvature
    let chain = zoo::binary_cube_chain(6, 3)?;
    let profile = curvature_profile_with_pairs(&chain, 4, PairMode::GeodesicNeighbors(1.0))?;
    println!(
        "n=6, r=3: kappa_1 = {:.6} (boundary value (2-r)/(2n) = {:.6})",
        profile.kappa(1),
        (2.0 - 3.0) / 12.0
    );
    for k in 1..=4 {
        println!("  exact kappa_{k} = {:+.6}", profile.kappa(k));
    }

    // the certified recursion at the paper scale
    let table = zoo::cube_recursion(500, 100, 500)?;
    println!(
        "\nn=500, r=100: kappa_tilde_1(r) = {}, minimum turns positive at k = {:?}",
        table.kappa_tilde[(0, 0)],
        table.first_positive_k()
    );
    println!(
        "rho(r/n) = {:.6}; kappa_sigma_c <= {:.3}",
        table.rho,
        table.sigma_c_bound()
    );

    // remark-level consequences, certified against sparse oracles at n = 14
    let n = 14;
    let r = 1;
    let cube = zoo::SparseCube::new(n, r)?;
    let csr = cube.to_csr();
    let states = cube.len();
    let top = vec![1.0 / (states as f64).sqrt(); states];
    let apply = |x: &[f64], y: &mut [f64]| csr.apply(x, y);
    let est = oracle::second_eigenvalue_symmetric(&apply, states, &top, 50_000, 1e-8);
    let rho = 0.5 - (-1.0f64).exp() - r as f64 / (n - 2 * r) as f64;
    println!(
        "\nn=14, r=1 ({states} states): gamma = {:.6} >= rho/n = {:.6}",
        1.0 - est.value,
        rho / n as f64
    );
    let pi = vec![1.0 / states as f64; states];
    let starts: Vec<usize> = (r..=n)
        .map(|level| cube.index[&((1u32 << level) - 1)] as usize)
        .collect();
    let t_mix = oracle::exact_mixing_sparse(&apply, states, &pi, &starts, &[0.25], 10_000)?[0].1;
    println!(
        "t_mix(1/4) = {t_mix} <= 2 n ln n / rho = {:.0}",
        2.0 * n as f64 * (n as f64).ln() / rho
    );
    Ok(())
}
