//! Variance, moment and tail certificates for Lipschitz observables under
//! the stationary measure of a Curie-Weiss chain, compared with exhaustive
//! enumeration.
//!
//! Run with: `cargo run --example concentration_tails`

use ricci::curvature::{curvature_profile, PairMode};
use ricci::{concentration, geometry, oracle, zoo};

fn main() -> ricci::Result<()> {
    let n = 6;
    let beta = 0.5;
    let chain = zoo::curie_weiss_chain(n, beta, 0.0, zoo::Scan::Random)?;
    let profile = curvature_profile(&chain, 12, PairMode::GeodesicNeighbors(1.0))?;
    let summary = geometry::geometry(&chain, &[1]);

    // magnetization / 2 is 1-Lipschitz for the Hamming distance
    let f: Vec<f64> = (0..chain.len())
        .map(|s| (2.0 * (s as u32).count_ones() as f64 - n as f64) / 2.0)
        .collect();
    let exact_var = oracle::exact_variance(&chain, &f);
    let var_bound = concentration::variance_bound(&chain, &profile, &summary)?;
    println!("Var_pi(magnetization/2) = {exact_var:.6} <= bound {var_bound:.6}");

    let m4 = oracle::exact_central_moment(&chain, &f, 4);
    let m4_bound = concentration::moment_bound_reversible(&chain, &profile, &summary, 2)?;
    println!("4th central moment = {m4:.6} <= bound {m4_bound:.6}");

    println!("\n t     exact tail   gaussian     bernstein    tail-1       tail-2");
    let sigma_c = profile.kappa_sigma_c_upper()?;
    let v: Vec<f64> = summary.sigma_hat.iter().map(|s| sigma_c * s * s).collect();
    let k_block = profile.first_positive().unwrap();
    for t in [0.5, 1.0, 1.5, 2.0, 2.5] {
        let exact = oracle::exact_tail(&chain, &f, t);
        let gauss = concentration::gaussian_tail_reversible(&chain, &profile, &summary, 1.0, t)?;
        let bern = concentration::bernstein_tail_reversible(&chain, &profile, &summary, &v, 1.0, t)?;
        let (_, t1) = concentration::tail_nonreversible(&profile, &summary, 1.0, t)?;
        let (_, t2) = concentration::tail_nonreversible2(
            &chain, &profile, &summary, &summary.s_upper, 1.0, k_block, t,
        )?;
        println!("{t:.1}   {exact:10.6}   {gauss:10.6}   {bern:10.6}   {t1:10.6}   {t2:10.6}");
    }
    Ok(())
}
