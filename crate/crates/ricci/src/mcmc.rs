//! Bias, variance and tail certificates for MCMC empirical averages, plus
//! the reproducible Monte Carlo harness used to validate them.
//!
//! Convention: the chain starts at `X_0 ~ q`, the average runs over
//! `i = t0+1 ..= N`, and the i-th summand has law `q P^i`.

use rayon::prelude::*;

use crate::curvature::CurvatureProfile;
use crate::error::{Result, RicciError};
use crate::geometry::GeometrySummary;
use crate::markov::{ChainSpec, Distribution};
use crate::transport;

/// A planned MCMC run: initial law, length, burn-in, block lag and the
/// Lipschitz class of the observable.
#[derive(Debug, Clone)]
pub struct McmcPlan {
    pub q: Distribution,
    /// chain length N (the average ends at X_N)
    pub n_steps: usize,
    /// burn-in t0 (the average starts at X_{t0+1})
    pub t0: usize,
    /// block lag K with kappa_K > 0
    pub k_lag: usize,
    /// Lipschitz coefficient of the observable class
    pub f_lip: f64,
    /// W1(q, pi), computed exactly at construction
    pub w1_q_pi: f64,
}

impl McmcPlan {
    pub fn new(
        chain: &ChainSpec,
        profile: &CurvatureProfile,
        q: Distribution,
        n_steps: usize,
        t0: usize,
        k_lag: usize,
        f_lip: f64,
    ) -> Result<Self> {
        if t0 >= n_steps {
            return Err(RicciError::InvalidInput(format!(
                "burn-in t0 = {t0} must be below the chain length N = {n_steps}"
            )));
        }
        if k_lag < 1 || k_lag > profile.horizon() {
            return Err(RicciError::InvalidInput(format!(
                "block lag K = {k_lag} outside the profile horizon {}",
                profile.horizon()
            )));
        }
        let kappa = profile.kappa(k_lag);
        if kappa <= 0.0 {
            return Err(RicciError::NonPositiveKappa {
                k: k_lag,
                kappa,
            });
        }
        let w1_q_pi = transport::w1(&q, chain.pi(), chain.space())?;
        Ok(Self {
            q,
            n_steps,
            t0,
            k_lag,
            f_lip,
            w1_q_pi,
        })
    }

    fn span(&self) -> f64 {
        (self.n_steps - self.t0) as f64
    }
}

/// Picks the block lag minimizing the stationary variance-bound shape
/// `(sum_{i<K} (1-kappa_i)^2) K / kappa_K^2` over positive lags.
pub fn choose_block_lag(profile: &CurvatureProfile) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    let mut partial_sq = 0.0;
    for k in 1..=profile.horizon() {
        partial_sq += {
            let omk = 1.0 - profile.kappa(k - 1);
            omk * omk
        };
        let kap = profile.kappa(k);
        if kap > 0.0 {
            let shape = partial_sq * k as f64 / (kap * kap);
            if best.is_none() || shape < best.unwrap().0 {
                best = Some((shape, k));
            }
        }
    }
    best.map(|(_, k)| k).ok_or(RicciError::NoPositiveKappa)
}

/// Bias bound `(1 - kappa_{t0+1}) kappa_sigma_c / (N - t0) * W1(q, pi) * f_lip`.
pub fn bias_bound(plan: &McmcPlan, profile: &CurvatureProfile) -> Result<f64> {
    let sigma_c = profile.kappa_sigma_c_upper()?;
    let omk = profile.one_minus_kappa_upper(plan.t0 + 1)?;
    Ok(omk * sigma_c / plan.span() * plan.w1_q_pi * plan.f_lip)
}

/// Eccentricity fallback for `W1(q, pi)` when the stationary distribution is
/// not in hand: `W1(q, pi) <= sum_y E(y) q(y)` with `E(y) <= J_k(y)/kappa_k`
/// from the average Bonnet-Myers bound (also capped by the diameter).
pub fn w1_to_pi_upper(
    chain: &ChainSpec,
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
    q: &Distribution,
) -> Result<f64> {
    let cert = profile.decay_cert().ok_or(RicciError::NoPositiveKappa)?;
    let bm = crate::geometry::bonnet_myers(summary, profile, cert.k)?;
    let diam = chain.space().diam();
    let total: f64 = q
        .weights()
        .iter()
        .enumerate()
        .map(|(y, &w)| w * bm.ecc[y].min(diam))
        .sum();
    Ok(total)
}

fn partial_square_sum(profile: &CurvatureProfile, k: usize) -> f64 {
    (0..k)
        .map(|i| {
            let omk = 1.0 - profile.kappa(i);
            omk * omk
        })
        .sum()
}

/// Variance bound for the empirical average (two-term display; the second
/// term vanishes for stationary starts).
pub fn mcmc_variance_bound(
    chain: &ChainSpec,
    plan: &McmcPlan,
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
    s: Option<&[f64]>,
) -> Result<f64> {
    let k = plan.k_lag;
    let kappa = profile.kappa(k);
    if kappa <= 0.0 {
        return Err(RicciError::NonPositiveKappa { k, kappa });
    }
    let (es, s_lip) = expected_and_lipschitz_s(chain, summary, s)?;
    let m = profile.m_sup();
    let span = plan.span();
    let sum_sq = partial_square_sum(profile, k);
    let indicator = if plan.t0 > 0 { 1.0 } else { 0.0 };
    let f2 = plan.f_lip * plan.f_lip;
    let main = f2 * (sum_sq / span) * (k as f64 / (kappa * kappa))
        * es
        * (1.0 + indicator * k as f64 * m * m / (kappa * span));
    let w_factor = s_lip * plan.w1_q_pi;
    let correction = if w_factor > 0.0 {
        f2 * w_factor
            * m.powi(3)
            * (2.0 * (k * k) as f64 / kappa)
            * (1.0 - kappa).powf(plan.t0 as f64 / k as f64 - 3.0)
    } else {
        0.0
    };
    Ok(main + correction)
}

/// Tail certificate for the empirical average (jump-diameter route).
pub fn mcmc_tail_bound(
    plan: &McmcPlan,
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
    t: f64,
) -> Result<(crate::concentration::TailBound, f64)> {
    let k = plan.k_lag;
    let kappa = profile.kappa(k);
    if kappa <= 0.0 {
        return Err(RicciError::NonPositiveKappa { k, kappa });
    }
    let sigma_inf = summary.sigma_inf_global;
    if sigma_inf <= 0.0 {
        return Err(RicciError::ZeroGranularity);
    }
    let m = profile.m_sup();
    let span = plan.span();
    let kf = k as f64;
    let sum_sq = partial_square_sum(profile, k);
    let indicator = if plan.t0 > 0 { 1.0 } else { 0.0 };
    let reach = (span + kf - 1.0) + indicator * kf / kappa;
    let e16 = (1.0f64 / 6.0).exp();
    let f = plan.f_lip;
    let lambda_max = kappa * span / (12.0 * m * kf * sigma_inf * f);
    let t_max = e16 * f * reach / span * sum_sq / (12.0 * m * sigma_inf * kappa);
    let d_max = 2.0 * e16 * f * f * summary.s_max() * reach / (span * span)
        * (kf / (kappa * kappa))
        * sum_sq;
    let bound = crate::concentration::TailBound::new(d_max, t_max, lambda_max);
    let val = bound.eval(t);
    Ok((bound, val))
}

/// Second tail certificate (dimension-aware route with the Wasserstein
/// correction for non-stationary starts).
pub fn mcmc_tail_bound2(
    chain: &ChainSpec,
    plan: &McmcPlan,
    profile: &CurvatureProfile,
    summary: &GeometrySummary,
    s: Option<&[f64]>,
    t: f64,
) -> Result<(crate::concentration::TailBound, f64)> {
    let k = plan.k_lag;
    let kappa = profile.kappa(k);
    if kappa <= 0.0 {
        return Err(RicciError::NonPositiveKappa { k, kappa });
    }
    let (es, s_lip) = expected_and_lipschitz_s(chain, summary, s)?;
    let m = profile.m_sup();
    let span = plan.span();
    let kf = k as f64;
    let f = plan.f_lip;
    let sigma_inf = summary.sigma_inf_global;
    let first = if sigma_inf > 0.0 {
        1.0 / (3.0 * sigma_inf)
    } else {
        f64::INFINITY
    };
    let second = if s_lip > 0.0 {
        kappa / (4.0 * kf * m * m * s_lip)
    } else {
        f64::INFINITY
    };
    let min_part = first.min(second);
    let lambda = 1.0 / (4.0 * kf * m) * (kappa * span / f) * min_part;
    let t_max = min_part * 8.0 * m * f * kf * es / kappa;
    let indicator = if plan.t0 > 0 { 1.0 } else { 0.0 };
    let w_factor = s_lip * plan.w1_q_pi;
    let correction = if w_factor > 0.0 {
        m * w_factor * (3.0 * kf / (span * kappa))
            * (1.0 - kappa / 2.0).powi((plan.t0 / k) as i32 - 3)
    } else {
        0.0
    };
    let d = 64.0 * m * m * f * f * (kf * kf) / (kappa * kappa * span)
        * (es * (1.0 + indicator * 2.0 * kf / (span * kappa)) + correction);
    let bound = crate::concentration::TailBound::new(d, t_max, lambda);
    let val = bound.eval(t);
    Ok((bound, val))
}

fn expected_and_lipschitz_s(
    chain: &ChainSpec,
    summary: &GeometrySummary,
    s: Option<&[f64]>,
) -> Result<(f64, f64)> {
    match s {
        Some(s) => {
            crate::concentration::validate_s(chain, summary, s)?;
            let es = s
                .iter()
                .enumerate()
                .map(|(x, v)| chain.pi().get(x) * v)
                .sum();
            Ok((es, crate::concentration::lipschitz_coefficient(chain, s)))
        }
        None => {
            let es = summary.expected_s(chain);
            Ok((
                es,
                crate::concentration::lipschitz_coefficient(chain, &summary.s_upper),
            ))
        }
    }
}

/// Stateless counter-based generator: every draw is a pure function of
/// `(seed, replica, step)`, so parallel decomposition cannot change results.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn draw(&self, replica: u64, step: u64) -> u64 {
        const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
        let mut h = Self::mix(self.seed ^ GOLDEN);
        h = Self::mix(h ^ replica.wrapping_mul(GOLDEN).wrapping_add(1));
        h = Self::mix(h ^ step.wrapping_mul(GOLDEN).wrapping_add(2));
        h
    }

    /// Uniform in [0, 1).
    pub fn uniform(&self, replica: u64, step: u64) -> f64 {
        (self.draw(replica, step) >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

/// Per-replica empirical averages with summary statistics.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub z: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
}

impl SimulationReport {
    fn from_z(z: Vec<f64>) -> Self {
        let r = z.len() as f64;
        let mean = z.iter().sum::<f64>() / r;
        let variance = if z.len() > 1 {
            z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0)
        } else {
            0.0
        };
        Self {
            z,
            mean,
            variance,
            se_mean: (variance / r).sqrt(),
        }
    }

    /// Empirical tail of `|Z - center| >= t` with its binomial standard
    /// error, for each requested deviation.
    pub fn tail(&self, center: f64, ts: &[f64]) -> Vec<(f64, f64, f64)> {
        let r = self.z.len() as f64;
        ts.iter()
            .map(|&t| {
                let hits = self.z.iter().filter(|&&z| (z - center).abs() >= t).count();
                let p = hits as f64 / r;
                (t, p, (p * (1.0 - p) / r).sqrt())
            })
            .collect()
    }
}

/// Simulates `replicas` independent runs of the plan and returns the Z
/// statistics. Deterministic for a fixed seed regardless of worker count:
/// replicas use disjoint counter streams and are reduced in index order.
pub fn simulate(
    chain: &ChainSpec,
    plan: &McmcPlan,
    f: &[f64],
    replicas: usize,
    seed: u64,
) -> Result<SimulationReport> {
    if replicas < 1 {
        return Err(RicciError::InvalidInput("need at least one replica".into()));
    }
    if f.len() != chain.len() {
        return Err(RicciError::InvalidInput(format!(
            "observable has {} entries for {} states",
            f.len(),
            chain.len()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(RicciError::InvalidInput("observable must be finite".into()));
    }
    let n = chain.len();
    let cum_q = cumulative(plan.q.weights().as_slice().unwrap());
    let p = chain.kernel().matrix();
    let mut cum_rows = Vec::with_capacity(n);
    for x in 0..n {
        cum_rows.push(cumulative(p.row(x).to_slice().unwrap()));
    }
    let rng = CounterRng::new(seed);
    let span = plan.n_steps - plan.t0;
    let z: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let rep = rep as u64;
            let mut state = sample(&cum_q, rng.uniform(rep, 0));
            let mut acc = 0.0;
            for step in 1..=plan.n_steps {
                state = sample(&cum_rows[state], rng.uniform(rep, step as u64));
                if step > plan.t0 {
                    acc += f[state];
                }
            }
            acc / span as f64
        })
        .collect();
    Ok(SimulationReport::from_z(z))
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(p.len());
    for &v in p {
        acc += v;
        out.push(acc);
    }
    // guard against rounding at the top
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}

fn sample(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}
