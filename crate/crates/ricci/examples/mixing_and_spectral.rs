//! Mixing-time and spectral-gap bounds from the curvature profile, checked
//! against the exact oracles (dense eigensolver, exact TV mixing).
//!
//! Run with: `cargo run --example mixing_and_spectral`

use ricci::curvature::{curvature_profile, PairMode};
use ricci::{geometry, oracle, zoo};

fn main() -> ricci::Result<()> {
    let sm = zoo::split_merge_chain(5)?;
    let chain = &sm.chain;
    let profile = curvature_profile(chain, 40, PairMode::AllPairs)?;

    for eps in [0.25, 0.125] {
        let bound = geometry::mixing_time_bound(&profile, chain.space(), eps)?;
        let exact = oracle::exact_mixing(chain, &[eps], None, 10_000)?[0].1;
        println!("t_mix({eps}): bound {bound}, exact {exact}");
    }

    let gap_bound = geometry::spectral_gap_bound(chain, &profile)?;
    let gaps = oracle::exact_gaps(chain, 4)?;
    println!(
        "spectral gap: bound {:.6} <= gamma* {:.6} (gamma = {:.6})",
        gap_bound.best,
        gaps.gamma_star.unwrap(),
        gaps.gamma.unwrap()
    );

    let reversed = chain.reversed()?;
    let profile_star = curvature_profile(&reversed, 40, PairMode::AllPairs)?;
    let ps_bound = geometry::pseudo_spectral_gap_bound(&profile, &profile_star)?;
    println!("pseudo gap: bound {ps_bound:.6} <= gamma_ps {:.6}", gaps.gamma_ps);

    // Bonnet-Myers diameter and eccentricity bounds at the best decaying lag
    let k = profile.decay_cert().unwrap().k;
    let summary = geometry::geometry(chain, &[1, k]);
    let bm = geometry::bonnet_myers(&summary, &profile, k)?;
    println!(
        "diameter: bound {:.3} >= true {}",
        bm.diam,
        chain.space().diam()
    );
    for (x, (e, b)) in summary.ecc.iter().zip(bm.ecc.iter()).enumerate() {
        println!("  E({}) = {e:.4} <= {b:.4}", sm.space.partitions[x]
            .iter().map(|v| v.to_string()).collect::<Vec<_>>().join("+"));
    }
    Ok(())
}
