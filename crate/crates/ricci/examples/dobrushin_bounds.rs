//! Dobrushin interdependence matrices for spin systems and the curvature
//! bounds they imply for random- and systemic-scan Glauber dynamics.
//!
//! Run with: `cargo run --example dobrushin_bounds`

use ricci::curvature::{curvature_profile, PairMode};
use ricci::dobrushin::{
    curie_weiss_closed_forms, estimate_dobrushin, ising1d_closed_forms, random_scan_bound,
    systemic_scan_kappa_lower, CurieWeissModel,
};
use ricci::zoo;

fn main() -> ricci::Result<()> {
    let n = 5;
    let beta = 0.5;
    let model = CurieWeissModel { n, beta, h: 0.0 };
    let data = estimate_dobrushin(&model, true)?;
    println!(
        "Curie-Weiss n={n}, beta={beta}: ||A||_1 = {:.6} (row reading {:.6}), sp(A) = {:.6}",
        data.norm1, data.norm1_row, data.spectral_radius
    );
    println!("Dobrushin condition: {}", data.dobrushin_condition);

    // contraction bounds vs the exact curvature of the materialized chain
    let chain = zoo::curie_weiss_chain(n, beta, 0.0, zoo::Scan::Random)?;
    let profile = curvature_profile(&chain, 3, PairMode::AllPairs)?;
    for k in 1..=3 {
        let rs = random_scan_bound(&data.a, k)?;
        println!(
            "random scan k={k}: bound {:.6} <= exact kappa_{k} = {:.6}",
            rs.kappa_lower,
            profile.kappa(k)
        );
    }

    println!("\nsystemic scan, kappa_k >= 1 - ||B^k||_1:");
    for k in 1..=3 {
        println!("  k={k}: {:.6}", systemic_scan_kappa_lower(&data.b, k));
    }

    let cw = curie_weiss_closed_forms(10, 0.5)?;
    println!(
        "\nclosed forms (n=10, beta=0.5): kappa_sys >= {:.4}, gamma_ps >= {:.4}, ||B||_1 = {:.12}",
        cw.kappa_sys_lower, cw.gamma_ps_lower, cw.b_norm1_closed
    );
    println!(
        "B-entry formula max error {:.2e}; v-lemma worst slack {:.2e}",
        cw.b_entry_max_err, cw.v_lemma_max_violation
    );

    let ising = ising1d_closed_forms(8, 0.25, 0.0)?;
    println!(
        "\n1D Ising (n=8, beta=0.25): rho = {:.6}, kappa_rand >= {:.6}, kappa_sys >= {:.6}, gamma_ps >= {:.6}",
        ising.rho, ising.kappa_rand_lower, ising.kappa_sys_lower, ising.gamma_ps_lower
    );
    Ok(())
}
