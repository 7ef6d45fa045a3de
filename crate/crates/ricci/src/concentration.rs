//! Stationary-measure concentration certificates: variance and moment
//! bounds, the reversible Gaussian and Bernstein tails, and the two
//! non-reversible tail certificates.
//!
//! Every infinite series is evaluated as an exact partial sum over the
//! profile horizon plus a certified geometric remainder, so each reported
//! constant is a valid upper bound rather than an estimate.

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureProfile;
use crate::error::{Result, RicciError};
use crate::geometry::GeometrySummary;
use crate::markov::ChainSpec;

/// Piecewise Gaussian-then-exponential tail certificate:
/// `2 exp(-t^2 / d)` up to `t_max`, then
/// `2 exp(-t_max^2 / d - lambda_max (t - t_max))`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailBound {
    pub d: f64,
    pub t_max: f64,
    pub lambda_max: f64,
    pub prefactor: f64,
}

impl TailBound {
    pub fn new(d: f64, t_max: f64, lambda_max: f64) -> Self {
        Self {
            d,
            t_max,
            lambda_max,
            prefactor: 2.0,
        }
    }

    /// Evaluates the certificate at deviation `t >= 0`.
    pub fn eval(&self, t: f64) -> f64 {
        if self.d == 0.0 {
            // degenerate certificate (constant observable)
            return if t <= 0.0 { self.prefactor } else { 0.0 };
        }
        if t <= self.t_max {
            self.prefactor * (-t * t / self.d).exp()
        } else {
            self.prefactor
                * (-self.t_max * self.t_max / self.d - self.lambda_max * (t - self.t_max)).exp()
        }
    }

    /// Samples the curve on a grid, as CSV `t,bound`.
    pub fn curve_csv(&self, ts: &[f64]) -> String {
        let mut out = String::from("t,bound\n");
        for &t in ts {
            out.push_str(&format!("{},{}\n", t, self.eval(t)));
        }
        out
    }
}

/// Upper bound on `Var_pi(f)` over 1-Lipschitz f:
/// `(sum_k (1 - kappa_k)^2) * E_pi(sigma^2 / n)`, with the certified
/// surrogate standing in for `sigma^2/n`.
pub fn variance_bound(
    chain: &ChainSpec,
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
) -> Result<f64> {
    let series = profile.series_upper(2)?;
    Ok(series * summary.expected_s(chain))
}

/// Upper bound on the 2p-th central moment of 1-Lipschitz f for reversible
/// chains: `((2p-1) kappa_sigma_c / 2)^p * E_pi(sigma_hat^{2p})`.
pub fn moment_bound_reversible(
    chain: &ChainSpec,
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
    p: u32,
) -> Result<f64> {
    if !chain.reversible() {
        return Err(RicciError::NotReversible);
    }
    if p == 0 {
        return Err(RicciError::InvalidInput("moment order p must be >= 1".into()));
    }
    let sigma_c = profile.kappa_sigma_c_upper()?;
    let moment: f64 = summary
        .sigma_hat
        .iter()
        .enumerate()
        .map(|(x, s)| chain.pi().get(x) * s.powi(2 * p as i32))
        .sum();
    Ok(((2.0 * p as f64 - 1.0) * sigma_c / 2.0).powi(p as i32) * moment)
}

/// Reversible Gaussian tail: `2 exp(-t^2 / (kappa_sigma_c sigma_hat_max^2))`,
/// rescaled for an `f_lip`-Lipschitz observable.
pub fn gaussian_tail_reversible(
    chain: &ChainSpec,
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
    f_lip: f64,
    t: f64,
) -> Result<f64> {
    if !chain.reversible() {
        return Err(RicciError::NotReversible);
    }
    let sigma_c = profile.kappa_sigma_c_upper()?;
    let denom = sigma_c * summary.sigma_hat_max * summary.sigma_hat_max * f_lip * f_lip;
    if denom == 0.0 {
        return Ok(if t <= 0.0 { 2.0 } else { 0.0 });
    }
    Ok(2.0 * (-t * t / denom).exp())
}

/// Exact Lipschitz coefficient of a per-state vector.
pub fn lipschitz_coefficient(chain: &ChainSpec, values: &[f64]) -> f64 {
    let space = chain.space();
    let n = chain.len();
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            worst = worst.max((values[x] - values[y]).abs() / space.dist(x, y));
        }
    }
    worst
}

/// Reversible Bernstein tail from a variance proxy `V`:
/// `2 exp(-t^2 / (4 E_pi(V) + 4 L^{-1/2} t))` with
/// `L = 8 E_pi(V) / (||V||_Lip^2 sigma_hat_max^2 kappa_sigma_c)`.
///
/// `V` must dominate `sum_y kappa_sigma_c(x,y) d(x,y)^2 P_x(y)` at every
/// state; the check uses per-pair complement sums when the profile carries
/// them and the global upper bound otherwise.
pub fn bernstein_tail_reversible(
    chain: &ChainSpec,
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
    v: &[f64],
    f_lip: f64,
    t: f64,
) -> Result<f64> {
    if !chain.reversible() {
        return Err(RicciError::NotReversible);
    }
    let sigma_c = profile.kappa_sigma_c_upper()?;
    let n = chain.len();
    let p = chain.kernel().matrix();
    let space = chain.space();
    for x in 0..n {
        let required: f64 = match profile.per_pair() {
            Some(_) => (0..n)
                .map(|y| {
                    if x == y || p[(x, y)] <= 0.0 {
                        0.0
                    } else {
                        let pair_sigma_c = pair_sigma_c_upper(profile, x, y)
                            .unwrap_or(sigma_c);
                        pair_sigma_c * space.dist(x, y).powi(2) * p[(x, y)]
                    }
                })
                .sum(),
            None => sigma_c * summary.sigma_hat[x] * summary.sigma_hat[x],
        };
        if v[x] < required - 1e-12 {
            return Err(RicciError::InvalidV {
                state: x,
                v: v[x],
                required,
            });
        }
    }
    let ev: f64 = v
        .iter()
        .enumerate()
        .map(|(x, val)| chain.pi().get(x) * val)
        .sum();
    let v_lip = lipschitz_coefficient(chain, v);
    let shm = summary.sigma_hat_max;
    // Constant V: L -> infinity and the exponential correction vanishes.
    let l_inv_sqrt = if v_lip <= 1e-300 {
        0.0
    } else {
        let l = 8.0 * ev / (v_lip * v_lip * shm * shm * sigma_c);
        1.0 / l.sqrt()
    };
    let scaled_t = t / f_lip.max(1e-300);
    Ok(2.0 * (-scaled_t * scaled_t / (4.0 * ev + 4.0 * l_inv_sqrt * scaled_t)).exp())
}

/// Upper bound on the per-pair complement sum `kappa_sigma_c(x,y)`, using the
/// audited per-pair values up to the horizon and the global geometric tail.
fn pair_sigma_c_upper(profile: &CurvatureProfile, x: usize, y: usize) -> Option<f64> {
    let cert = profile.decay_cert()?;
    let horizon = profile.horizon();
    let mut head = 0.0;
    for k in 0..=horizon {
        head += 1.0 - profile.kappa_pair_at(x, y, k)?;
    }
    let r = 1.0 - cert.kappa;
    let m0 = (horizon + 1) / cert.k;
    Some(head + cert.m_sup * cert.k as f64 * r.powi(m0 as i32) / (1.0 - r))
}

/// Non-reversible tail certificate (exp-weighted series route):
/// `D_max = 2 f_lip^2 S_max sum_i exp((2/3)(1-kappa_i) f_lip) (1-kappa_i)^2`,
/// `t_max = D_max / (6 sigma_inf)`, rate `1/(3 sigma_inf)`.
pub fn tail_nonreversible(
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
    f_lip: f64,
    t: f64,
) -> Result<(TailBound, f64)> {
    let cert = profile.decay_cert().ok_or(RicciError::NoPositiveKappa)?;
    let sigma_inf = summary.sigma_inf_global;
    if sigma_inf <= 0.0 {
        return Err(RicciError::ZeroGranularity);
    }
    if f_lip == 0.0 {
        let b = TailBound::new(0.0, 0.0, 1.0 / (3.0 * sigma_inf));
        let val = b.eval(t);
        return Ok((b, val));
    }
    let weighted = |one_minus_kappa: f64| {
        ((2.0 / 3.0) * one_minus_kappa * f_lip).exp() * one_minus_kappa * one_minus_kappa
    };
    let mut series: f64 = profile
        .kappas()
        .iter()
        .map(|&k| weighted((1.0 - k).max(0.0)))
        .sum();
    // geometric remainder: blocks of cert.k lags share the same cap
    let r = 1.0 - cert.kappa;
    let m0 = (profile.horizon() + 1) / cert.k;
    let mut m = m0;
    loop {
        let cap = cert.m_sup * r.powi(m as i32);
        let term = cert.k as f64 * weighted(cap.max(0.0));
        series += term;
        if term <= series * 1e-18 || term < 1e-300 {
            break;
        }
        m += 1;
        if m > m0 + 100_000 {
            break;
        }
    }
    let d_max = 2.0 * f_lip * f_lip * summary.s_max() * series;
    let bound = TailBound::new(d_max, d_max / (6.0 * sigma_inf), 1.0 / (3.0 * sigma_inf));
    let val = bound.eval(t);
    Ok((bound, val))
}

/// Second non-reversible tail certificate (block route):
/// `D = f_lip^2 E_pi(S) 16 M^2 K / (kappa_K - kappa_K^2/4)`,
/// `lambda'_max = min(1/(6 M sigma_inf f_lip), kappa_K/(4 K M^2 ||S||_Lip f_lip))`,
/// `t'_max = D lambda'_max / 2`.
pub fn tail_nonreversible2(
    chain: &ChainSpec,
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
    s: &[f64],
    f_lip: f64,
    k_block: usize,
    t: f64,
) -> Result<(TailBound, f64)> {
    let kappa_k = profile.kappa(k_block);
    if kappa_k <= 0.0 {
        return Err(RicciError::NonPositiveKappa {
            k: k_block,
            kappa: kappa_k,
        });
    }
    validate_s(chain, summary, s)?;
    let m = profile.m_sup();
    let es: f64 = s
        .iter()
        .enumerate()
        .map(|(x, v)| chain.pi().get(x) * v)
        .sum();
    let d = f_lip * f_lip * es * 16.0 * m * m * k_block as f64
        / (kappa_k - kappa_k * kappa_k / 4.0);
    let s_lip = lipschitz_coefficient(chain, s);
    let sigma_inf = summary.sigma_inf_global;
    let first = if sigma_inf > 0.0 {
        1.0 / (6.0 * m * sigma_inf * f_lip)
    } else {
        f64::INFINITY
    };
    let second = if s_lip > 0.0 {
        kappa_k / (4.0 * k_block as f64 * m * m * s_lip * f_lip)
    } else {
        f64::INFINITY
    };
    let lambda = first.min(second);
    let bound = TailBound::new(d, d * lambda / 2.0, lambda);
    let val = bound.eval(t);
    Ok((bound, val))
}

/// Requires `S` to dominate the certified `sigma^2/n` surrogate everywhere.
pub(crate) fn validate_s(
    chain: &ChainSpec,
    summary: &GeometrySummary,
    s: &[f64],
) -> Result<()> {
    for x in 0..chain.len() {
        if s[x] < summary.s_upper[x] - 1e-12 {
            return Err(RicciError::InvalidS {
                state: x,
                s: s[x],
                required: summary.s_upper[x],
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{curvature_profile, curvature_profile_with_pairs, PairMode};
    use crate::geometry::geometry;
    use crate::zoo;

    fn two_state() -> (ChainSpec, CurvatureProfile, GeometrySummary) {
        let c = zoo::two_state_chain(0.25, 0.25).unwrap();
        let p = curvature_profile(&c, 12, PairMode::AllPairs).unwrap();
        let g = geometry(&c, &[1]);
        (c, p, g)
    }

    #[test]
    fn variance_bound_two_state_is_tight() {
        let (c, p, g) = two_state();
        let b = variance_bound(&c, &p, &g).unwrap();
        // sum (1/4)^k = 4/3 times E(S) = 3/16 gives exactly 1/4
        assert!((b - 0.25).abs() < 1e-9, "bound = {b}");
        // exact variance of f(i) = i under pi = (1/2, 1/2)
        let exact = 0.25;
        assert!(b >= exact - 1e-12);
    }

    #[test]
    fn variance_bound_requires_positive_kappa() {
        let c = zoo::two_state_chain(0.25, 0.25).unwrap();
        let p = crate::curvature::CurvatureProfile::from_lower_bounds(vec![0.0, 0.0]).unwrap();
        let g = geometry(&c, &[1]);
        assert!(matches!(
            variance_bound(&c, &p, &g),
            Err(RicciError::NoPositiveKappa)
        ));
    }

    #[test]
    fn moment_bounds_two_state() {
        let (c, p, g) = two_state();
        let m1 = moment_bound_reversible(&c, &p, &g, 1).unwrap();
        assert!((m1 - 0.25).abs() < 1e-9);
        let m2 = moment_bound_reversible(&c, &p, &g, 2).unwrap();
        // ((3 * 2) / 2)^2 * E(sigma_hat^4) = 9/16
        assert!((m2 - 9.0 / 16.0).abs() < 1e-9, "m2 = {m2}");
        // exact fourth central moment of f(i) = i is 1/16
        assert!(m2 >= 1.0 / 16.0);
    }

    #[test]
    fn gaussian_tail_two_state_closed_form() {
        let (c, p, g) = two_state();
        for &t in &[0.0, 0.3, 1.0, 2.5] {
            let b = gaussian_tail_reversible(&c, &p, &g, 1.0, t).unwrap();
            let expect = 2.0 * (-2.0 * t * t).exp();
            assert!((b - expect).abs() < 1e-9, "t = {t}: {b} vs {expect}");
        }
    }

    #[test]
    fn bernstein_tail_accepts_canonical_v_and_rejects_violations() {
        let (c, p, g) = two_state();
        let sigma_c = p.kappa_sigma_c_upper().unwrap();
        let v: Vec<f64> = g
            .sigma_hat
            .iter()
            .map(|s| sigma_c * s * s)
            .collect();
        let b = bernstein_tail_reversible(&c, &p, &g, &v, 1.0, 0.5).unwrap();
        assert!(b > 0.0 && b <= 2.0);
        let mut bad = v.clone();
        bad[1] = 0.0;
        assert!(matches!(
            bernstein_tail_reversible(&c, &p, &g, &bad, 1.0, 0.5),
            Err(RicciError::InvalidV { state: 1, .. })
        ));
    }

    #[test]
    fn bernstein_constant_v_reduces_to_pure_gaussian() {
        let (c, p, g) = two_state();
        let sigma_c = p.kappa_sigma_c_upper().unwrap();
        let v = vec![sigma_c * 0.25; 2];
        for &t in &[0.2, 0.7, 1.5] {
            let b = bernstein_tail_reversible(&c, &p, &g, &v, 1.0, t).unwrap();
            let ev = sigma_c * 0.25;
            let expect = 2.0 * (-t * t / (4.0 * ev)).exp();
            assert!((b - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn bernstein_uses_per_pair_table_when_present() {
        let c = zoo::two_state_chain(0.25, 0.25).unwrap();
        let p = curvature_profile_with_pairs(&c, 12, PairMode::AllPairs).unwrap();
        let g = geometry(&c, &[1]);
        let sigma_c = p.kappa_sigma_c_upper().unwrap();
        let v: Vec<f64> = g.sigma_hat.iter().map(|s| sigma_c * s * s).collect();
        assert!(bernstein_tail_reversible(&c, &p, &g, &v, 1.0, 0.5).is_ok());
    }

    #[test]
    fn nonreversible_tail_series_matches_direct_summation() {
        let (_c, p, g) = two_state();
        let (bound, _) = tail_nonreversible(&p, &g, 1.0, 0.5).unwrap();
        // independent summation: kappa_k = 1 - (1/2)^k exactly, far past the
        // profile horizon
        let mut series = 0.0;
        for i in 0..400 {
            let omk = 0.5f64.powi(i);
            series += ((2.0 / 3.0) * omk).exp() * omk * omk;
        }
        let d_direct = 2.0 * (3.0 / 16.0) * series;
        assert!(
            bound.d >= d_direct - 1e-12,
            "certified D {} below direct sum {}",
            bound.d,
            d_direct
        );
        // the certified series only pads the tail beyond the horizon
        assert!(bound.d <= d_direct * 1.001);
        assert!((bound.t_max - bound.d / 3.0).abs() < 1e-12); // sigma_inf = 1/2
        assert!((bound.lambda_max - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn nonreversible_tail_constant_observable_degenerates() {
        let (_c, p, g) = two_state();
        let (bound, at0) = tail_nonreversible(&p, &g, 0.0, 0.0).unwrap();
        assert_eq!(bound.d, 0.0);
        assert_eq!(at0, 2.0);
        assert_eq!(bound.eval(0.5), 0.0);
    }

    #[test]
    fn second_tail_two_state_frozen_value() {
        let (c, p, g) = two_state();
        let s = vec![3.0 / 16.0; 2];
        let (bound, _) = tail_nonreversible2(&c, &p, &g, &s, 1.0, 1, 0.5).unwrap();
        // D = 16 * 1 * 1 / (1/2 - 1/16) * 3/16
        let expect = 16.0 * (3.0 / 16.0) / (0.5 - 0.0625);
        assert!((bound.d - expect).abs() < 1e-12, "D = {}", bound.d);
        // constant S: lambda' = 1/(6 M sigma_inf f) = 1/3
        assert!((bound.lambda_max - 1.0 / 3.0).abs() < 1e-15);
        let mut bad = s.clone();
        bad[0] = 0.0;
        assert!(matches!(
            tail_nonreversible2(&c, &p, &g, &bad, 1.0, 1, 0.5),
            Err(RicciError::InvalidS { state: 0, .. })
        ));
    }

    #[test]
    fn tail_bound_is_continuous_and_monotone() {
        let b = TailBound::new(1.7, 0.9, 2.3);
        let at = b.eval(b.t_max);
        let just_after = b.eval(b.t_max + 1e-13);
        assert!((at - just_after).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for i in 0..2000 {
            let t = i as f64 * 0.005;
            let v = b.eval(t);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }
}
