//! The independent oracle layer on its own: dense symmetric eigensolver,
//! exact TV mixing times, and the claim-vs-oracle verdict table.
//!
//! Run with: `cargo run --example exact_oracles`

use ricci::oracle::{self, Claim};
use ricci::zoo;

fn main() -> ricci::Result<()> {
    let chain = zoo::curie_weiss_chain(5, 0.5, 0.0, zoo::Scan::Random)?;
    let gaps = oracle::exact_gaps(&chain, 3)?;
    println!(
        "Curie-Weiss n=5: gamma = {:.8}, gamma* = {:.8}, gamma_ps (k <= 3) = {:.8}",
        gaps.gamma.unwrap(),
        gaps.gamma_star.unwrap(),
        gaps.gamma_ps
    );
    for (k, v) in &gaps.gamma_ps_per_k {
        println!("  gamma((P*)^{k} P^{k}) / {k} = {v:.8}");
    }

    let times = oracle::exact_mixing(&chain, &[0.5, 0.25, 0.125, 0.0625], None, 100_000)?;
    println!("\nexact mixing times:");
    for (eps, t) in &times {
        println!("  t_mix({eps}) = {t}");
    }
    // spot-check the remark gamma_ps <= 1 / (2 t_mix)
    let t_mix = times[1].1;
    println!(
        "gamma_ps = {:.6} <= 1/(2 t_mix) = {:.6}",
        gaps.gamma_ps,
        1.0 / (2.0 * t_mix as f64)
    );

    // verdict table with a deliberately inflated claim
    let report = oracle::certify(vec![
        Claim::lower("kappa/k at k=1", 0.05, gaps.gamma_star.unwrap()),
        Claim::upper("mixing bound", 8.0, t_mix as f64),
        Claim::lower("deliberately inflated", gaps.gamma_star.unwrap() + 0.1, gaps.gamma_star.unwrap()),
    ]);
    println!("\n{}", report.to_csv());
    println!("passed {}, failed {}", report.passed, report.failed);
    Ok(())
}
