//! Computes the multi-step curvature profile of a chain and prints the
//! sequence together with its submultiplicativity slack.
//!
//! Run with: `cargo run --example curvature_profile`

use ricci::curvature::{curvature_profile, kappa_pair, PairMode};
use ricci::zoo;

fn main() -> ricci::Result<()> {
    // Two-state chain with symmetric rate 1/4: kappa_k = 1 - (1/2)^k.
    let chain = zoo::two_state_chain(0.25, 0.25)?;
    let profile = curvature_profile(&chain, 8, PairMode::AllPairs)?;
    println!("two-state chain, exact profile:");
    print!("{}", profile.to_csv());
    println!(
        "M = {}, kappa_sigma_c upper bound = {:.12}",
        profile.m_sup(),
        profile.kappa_sigma_c_upper()?
    );
    println!(
        "worst submultiplicativity violation: {:.3e}",
        profile.submult_violation()
    );

    // Per-pair values at a chosen lag.
    let sm = zoo::split_merge_chain(5)?;
    let k3 = kappa_pair(&sm.chain, 0, 3, 3)?;
    println!("\nsplit-merge n=5: kappa_3(0, 3) = {k3:.6}");
    let profile = curvature_profile(&sm.chain, 6, PairMode::AllPairs)?;
    println!(
        "split-merge n=5: kappa_1 = {:.6} (coupling floor 2/25 = {:.6})",
        profile.kappa(1),
        2.0 / 25.0
    );
    Ok(())
}
