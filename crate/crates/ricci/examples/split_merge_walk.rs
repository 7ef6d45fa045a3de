//! The split-merge walk on integer partitions: stationary distribution from
//! cycle types, curvature, and the resulting diameter/gap certificates.
//!
//! Run with: `cargo run --example split_merge_walk`

use ricci::curvature::{curvature_profile, PairMode};
use ricci::{geometry, oracle, zoo};

fn main() -> ricci::Result<()> {
    let n = 6;
    let sm = zoo::split_merge_chain(n)?;
    println!(
        "partitions of {n}: {} states, diameter {}",
        sm.space.partitions.len(),
        sm.chain.space().diam()
    );
    println!("\nstationary distribution (cycle-type frequencies):");
    for (i, parts) in sm.space.partitions.iter().enumerate() {
        let label: Vec<String> = parts.iter().map(|v| v.to_string()).collect();
        println!(
            "  {:<12} pi = {:>8.6} ({} permutations)",
            label.join("+"),
            sm.chain.pi().get(i),
            sm.cycle_counts[i]
        );
    }

    let profile = curvature_profile(&sm.chain, 2 * n as usize, PairMode::AllPairs)?;
    println!(
        "\nkappa_1 = {:.6} (the one-step coupling argument guarantees 2/n^2 = {:.6})",
        profile.kappa(1),
        2.0 / (n * n) as f64
    );

    let gaps = oracle::exact_gaps(&sm.chain, 4)?;
    let bound = geometry::spectral_gap_bound(&sm.chain, &profile)?;
    println!(
        "spectral gap: best curvature bound {:.6} <= exact {:.6}",
        bound.best,
        gaps.gamma_star.unwrap()
    );

    let k = profile.decay_cert().unwrap().k;
    let summary = geometry::geometry(&sm.chain, &[1, k]);
    let bm = geometry::bonnet_myers(&summary, &profile, k)?;
    println!(
        "diameter: bound {:.3} at lag {k} >= true {}",
        bm.diam,
        sm.chain.space().diam()
    );
    Ok(())
}
