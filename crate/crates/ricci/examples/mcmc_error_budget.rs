//! Bias, variance and tail certificates for an MCMC empirical average,
//! validated by the reproducible Monte Carlo harness.
//!
//! Run with: `cargo run --example mcmc_error_budget`

use ricci::curvature::{curvature_profile, PairMode};
use ricci::markov::Distribution;
use ricci::{geometry, mcmc, zoo};

fn main() -> ricci::Result<()> {
    let chain = zoo::two_state_chain(0.25, 0.25)?;
    let profile = curvature_profile(&chain, 16, PairMode::AllPairs)?;
    let summary = geometry::geometry(&chain, &[1]);

    // average f over 100 steps, starting out of equilibrium at state 0
    let q = Distribution::dirac(2, 0);
    let k = mcmc::choose_block_lag(&profile)?;
    let plan = mcmc::McmcPlan::new(&chain, &profile, q, 100, 10, k, 1.0)?;
    let f = vec![0.0, 1.0];

    println!("plan: N = 100, t0 = 10, K = {k}, W1(q, pi) = {}", plan.w1_q_pi);
    println!("bias bound:     {:.6}", mcmc::bias_bound(&plan, &profile)?);
    let var_bound = mcmc::mcmc_variance_bound(&chain, &plan, &profile, &summary, None)?;
    println!("variance bound: {var_bound:.6}");

    let sim = mcmc::simulate(&chain, &plan, &f, 50_000, 7)?;
    println!(
        "Monte Carlo (50k replicas): mean {:.5} +/- {:.5}, variance {:.6}",
        sim.mean, sim.se_mean, sim.variance
    );

    let exact_mean = 0.5;
    println!("\n t      bound-1      bound-2      empirical");
    for (t, p_hat, _se) in sim.tail(exact_mean, &[0.05, 0.1, 0.2, 0.3]) {
        let (_, b1) = mcmc::mcmc_tail_bound(&plan, &profile, &summary, t)?;
        let (_, b2) = mcmc::mcmc_tail_bound2(&chain, &plan, &profile, &summary, None, t)?;
        println!("{t:.2}   {:10.6}   {:10.6}   {p_hat:10.6}", b1.min(2.0), b2.min(2.0));
    }
    Ok(())
}
