//! Step-size and dimension statistics of a chain, plus the mixing-time,
//! spectral-gap, pseudo-spectral-gap, Bonnet-Myers and eccentricity bounds
//! they feed.

use std::collections::BTreeMap;

use crate::curvature::CurvatureProfile;
use crate::error::{Result, RicciError};
use crate::markov::ChainSpec;

/// Support entries below this threshold are treated as zero when measuring
/// the support of a jump measure.
const SUPPORT_TOL: f64 = 1e-15;

/// Per-state step statistics and certified dimension surrogates.
#[derive(Debug, Clone)]
pub struct GeometrySummary {
    /// diffusion constant sigma(x) per state
    pub sigma: Vec<f64>,
    /// sigma = E_pi(sigma^2)^(1/2)
    pub sigma_avg: f64,
    /// mean-square jump length sigma_hat(x)
    pub sigma_hat: Vec<f64>,
    pub sigma_hat_avg: f64,
    /// local granularity sigma_inf(x) = diam(supp P_x)/2
    pub sigma_inf: Vec<f64>,
    /// global granularity sup_x sigma_inf(x)
    pub sigma_inf_global: f64,
    pub sigma_max: f64,
    pub sigma_hat_max: f64,
    /// certified upper bound on sigma(x)^2 / n(x)
    pub s_upper: Vec<f64>,
    /// certified lower bound on the local dimension n(x)
    pub n_lower: Vec<f64>,
    /// J_k(x) tables for the requested lags
    pub jumps: BTreeMap<usize, Vec<f64>>,
    /// eccentricity E(x) = sum_y d(x,y) pi(y)
    pub ecc: Vec<f64>,
}

impl GeometrySummary {
    /// `sup_x sigma(x)^2 / n(x)` via the certified surrogate.
    pub fn s_max(&self) -> f64 {
        self.s_upper.iter().copied().fold(0.0, f64::max)
    }

    /// `E_pi` of the certified `sigma^2/n` surrogate.
    pub fn expected_s(&self, chain: &ChainSpec) -> f64 {
        self.s_upper
            .iter()
            .enumerate()
            .map(|(x, s)| chain.pi().get(x) * s)
            .sum()
    }

    pub fn jump(&self, k: usize) -> Result<&[f64]> {
        self.jumps
            .get(&k)
            .map(|v| v.as_slice())
            .ok_or_else(|| RicciError::InvalidInput(format!("J_{k} was not requested")))
    }

    /// One row per state:
    /// `state,sigma,sigma_hat,sigma_inf,s_upper,n_lower,ecc,j_<k>...`
    pub fn to_csv(&self) -> String {
        let mut header = String::from("state,sigma,sigma_hat,sigma_inf,s_upper,n_lower,ecc");
        for k in self.jumps.keys() {
            header.push_str(&format!(",j_{k}"));
        }
        header.push('\n');
        let mut out = header;
        for x in 0..self.sigma.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}",
                x,
                self.sigma[x],
                self.sigma_hat[x],
                self.sigma_inf[x],
                self.s_upper[x],
                self.n_lower[x],
                self.ecc[x]
            ));
            for v in self.jumps.values() {
                out.push_str(&format!(",{}", v[x]));
            }
            out.push('\n');
        }
        out
    }
}

/// Computes the per-state statistics. `k_list` selects the lags for which
/// jump lengths J_k are tabulated.
pub fn geometry(chain: &ChainSpec, k_list: &[usize]) -> GeometrySummary {
    geometry_impl(chain, k_list, None)
}

/// As [`geometry`], but for states whose jump support has at most
/// `exact_dim_cap` points, the local dimension is computed exactly by
/// maximizing the variance over the vertices of the Lipschitz polytope.
pub fn geometry_exact_dimension(
    chain: &ChainSpec,
    k_list: &[usize],
    exact_dim_cap: usize,
) -> GeometrySummary {
    geometry_impl(chain, k_list, Some(exact_dim_cap))
}

fn geometry_impl(
    chain: &ChainSpec,
    k_list: &[usize],
    exact_dim_cap: Option<usize>,
) -> GeometrySummary {
    let n = chain.len();
    let space = chain.space();
    let p = chain.kernel().matrix();
    let pi = chain.pi();

    let mut sigma = vec![0.0; n];
    let mut sigma_hat = vec![0.0; n];
    let mut sigma_inf = vec![0.0; n];
    let mut s_upper = vec![0.0; n];
    let mut n_lower = vec![1.0; n];
    let mut ecc = vec![0.0; n];

    for x in 0..n {
        let support: Vec<usize> = (0..n).filter(|&y| p[(x, y)] > SUPPORT_TOL).collect();
        let mut sig2 = 0.0;
        let mut hat2 = 0.0;
        let mut supp_diam = 0.0f64;
        for (ai, &a) in support.iter().enumerate() {
            let pa = p[(x, a)];
            hat2 += space.dist(x, a).powi(2) * pa;
            for &b in &support[ai + 1..] {
                let d = space.dist(a, b);
                sig2 += d * d * pa * p[(x, b)];
                supp_diam = supp_diam.max(d);
            }
        }
        // the double integral counts ordered pairs; off-diagonal terms twice
        sig2 = (2.0 * sig2) * 0.5;
        sigma[x] = sig2.max(0.0).sqrt();
        sigma_hat[x] = hat2.max(0.0).sqrt();
        sigma_inf[x] = 0.5 * supp_diam;

        let mut s = sig2.min(sigma_inf[x] * sigma_inf[x]);
        if let Some(cap) = exact_dim_cap {
            if support.len() <= cap {
                let probs: Vec<f64> = support.iter().map(|&a| p[(x, a)]).collect();
                if let Some(var) = max_lipschitz_variance(space, &support, &probs) {
                    s = s.min(var);
                }
            }
        }
        s_upper[x] = s;
        n_lower[x] = if s > 0.0 { (sig2 / s).max(1.0) } else { 1.0 };

        ecc[x] = (0..n).map(|y| space.dist(x, y) * pi.get(y)).sum();
    }

    let sigma_avg = (0..n)
        .map(|x| pi.get(x) * sigma[x] * sigma[x])
        .sum::<f64>()
        .sqrt();
    let sigma_hat_avg = (0..n)
        .map(|x| pi.get(x) * sigma_hat[x] * sigma_hat[x])
        .sum::<f64>()
        .sqrt();
    let sigma_inf_global = sigma_inf.iter().copied().fold(0.0, f64::max);
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let sigma_hat_max = sigma_hat.iter().copied().fold(0.0, f64::max);

    let mut jumps = BTreeMap::new();
    if !k_list.is_empty() {
        let max_k = *k_list.iter().max().unwrap();
        let mut power = ndarray::Array2::eye(n);
        let mut wanted: Vec<usize> = k_list.to_vec();
        wanted.sort_unstable();
        wanted.dedup();
        if wanted.first() == Some(&0) {
            jumps.insert(0, vec![0.0; n]);
        }
        for k in 1..=max_k {
            power = power.dot(p);
            if wanted.contains(&k) {
                let j: Vec<f64> = (0..n)
                    .map(|x| (0..n).map(|y| space.dist(x, y) * power[(x, y)]).sum())
                    .collect();
                jumps.insert(k, j);
            }
        }
    }

    GeometrySummary {
        sigma,
        sigma_avg,
        sigma_hat,
        sigma_hat_avg,
        sigma_inf,
        sigma_inf_global,
        sigma_max,
        sigma_hat_max,
        s_upper,
        n_lower,
        jumps,
        ecc,
    }
}

/// Maximizes `Var_p(f)` over 1-Lipschitz functions on the support, by
/// enumerating the vertices of the Lipschitz polytope (anchored at the first
/// point). Vertices correspond to spanning trees of the support with signed
/// tight edges; trees are enumerated through Prufer sequences.
///
/// Returns `None` when the support is too large to enumerate (more than 8
/// points) or trivial.
pub fn max_lipschitz_variance(
    space: &crate::space::FiniteMetricSpace,
    support: &[usize],
    probs: &[f64],
) -> Option<f64> {
    let m = support.len();
    if m > 8 {
        return None;
    }
    if m <= 1 {
        return Some(0.0);
    }
    let d = |a: usize, b: usize| space.dist(support[a], support[b]);
    let mut best = 0.0f64;
    let mut f = vec![0.0f64; m];
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m - 1);

    let mut prufer = vec![0usize; m.saturating_sub(2)];
    loop {
        edges.clear();
        prufer_to_tree(&prufer, m, &mut edges);
        // Sign of the first edge is fixed: Var(-f) = Var(f).
        let sign_patterns = 1usize << (m - 2).min(63);
        for signs in 0..sign_patterns.max(1) {
            // Propagate values from the anchor along the tree.
            f[0] = 0.0;
            let mut assigned = vec![false; m];
            assigned[0] = true;
            let mut remaining: Vec<(usize, usize, f64)> = edges
                .iter()
                .enumerate()
                .map(|(ei, &(a, b))| {
                    let s = if ei == 0 {
                        1.0
                    } else if (signs >> (ei - 1)) & 1 == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    (a, b, s)
                })
                .collect();
            let mut progress = true;
            while progress && !remaining.is_empty() {
                progress = false;
                remaining.retain(|&(a, b, s)| {
                    if assigned[a] && !assigned[b] {
                        f[b] = f[a] + s * d(a, b);
                        assigned[b] = true;
                        progress = true;
                        false
                    } else if assigned[b] && !assigned[a] {
                        f[a] = f[b] - s * d(a, b);
                        assigned[a] = true;
                        progress = true;
                        false
                    } else if assigned[a] && assigned[b] {
                        false
                    } else {
                        true
                    }
                });
            }
            // Feasibility: f must be 1-Lipschitz on all support pairs.
            let mut ok = true;
            'feas: for a in 0..m {
                for b in (a + 1)..m {
                    if (f[a] - f[b]).abs() > d(a, b) + 1e-12 {
                        ok = false;
                        break 'feas;
                    }
                }
            }
            if !ok {
                continue;
            }
            let mean: f64 = f.iter().zip(probs).map(|(v, p)| v * p).sum();
            let var: f64 = f
                .iter()
                .zip(probs)
                .map(|(v, p)| (v - mean) * (v - mean) * p)
                .sum();
            best = best.max(var);
        }
        if !next_prufer(&mut prufer, m) {
            break;
        }
    }
    Some(best)
}

fn prufer_to_tree(prufer: &[usize], m: usize, edges: &mut Vec<(usize, usize)>) {
    if m == 2 {
        edges.push((0, 1));
        return;
    }
    let mut degree = vec![1usize; m];
    for &v in prufer {
        degree[v] += 1;
    }
    let mut seq = prufer.to_vec();
    seq.push(usize::MAX); // sentinel consumed at the end
    let mut used = vec![false; m];
    for &v in seq.iter() {
        // smallest leaf
        let leaf = (0..m).find(|&u| degree[u] == 1 && !used[u]).unwrap();
        used[leaf] = true;
        if v == usize::MAX {
            let other = (0..m).find(|&u| degree[u] >= 1 && !used[u]).unwrap();
            edges.push((leaf.min(other), leaf.max(other)));
        } else {
            edges.push((leaf.min(v), leaf.max(v)));
            degree[v] -= 1;
            degree[leaf] -= 1;
        }
    }
}

fn next_prufer(prufer: &mut [usize], m: usize) -> bool {
    for digit in prufer.iter_mut().rev() {
        *digit += 1;
        if *digit < m {
            return true;
        }
        *digit = 0;
    }
    false
}

/// `inf { k <= K : 1 - kappa_k <= eps d0 / diam }`, the mixing-time bound.
pub fn mixing_time_bound(
    profile: &CurvatureProfile,
    space: &crate::space::FiniteMetricSpace,
    eps: f64,
) -> Result<usize> {
    let d0 = space.d0();
    let diam = space.diam();
    if !(d0 > 0.0) || !diam.is_finite() {
        return Err(RicciError::InvalidInput(
            "mixing bound needs d0 > 0 and a finite diameter".into(),
        ));
    }
    let threshold = eps * d0 / diam;
    for k in 0..=profile.horizon() {
        if 1.0 - profile.kappa(k) <= threshold {
            return Ok(k);
        }
    }
    Err(RicciError::Unbounded {
        horizon: profile.horizon(),
    })
}

/// Curvature from a known mixing time: for `t_half = t_mix(eps/2)`, every
/// `k >= t_half` has `kappa_k >= 1 - eps diam / d0`.
pub fn kappa_from_mixing(t_half: usize, eps: f64, d0: f64, diam: f64) -> (usize, f64) {
    (t_half, 1.0 - eps * diam / d0)
}

/// Spectral-gap lower bounds per lag, for reversible chains.
#[derive(Debug, Clone)]
pub struct SpectralGapBound {
    /// best over k of 1 - (1 - kappa_k)^(1/k)
    pub best: f64,
    /// (k, strong bound, weaker kappa_k / k) for every positive lag
    pub per_k: Vec<(usize, f64, f64)>,
}

/// `gamma* >= 1 - (1 - kappa_k)^(1/k) >= kappa_k / k` over positive lags.
pub fn spectral_gap_bound(chain: &ChainSpec, profile: &CurvatureProfile) -> Result<SpectralGapBound> {
    if !chain.reversible() {
        return Err(RicciError::NotReversible);
    }
    let mut per_k = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for k in 1..=profile.horizon() {
        let kap = profile.kappa(k);
        if kap > 0.0 {
            let strong = 1.0 - (1.0 - kap).powf(1.0 / k as f64);
            per_k.push((k, strong, kap / k as f64));
            best = best.max(strong);
        }
    }
    if per_k.is_empty() {
        return Err(RicciError::NoPositiveKappa);
    }
    Ok(SpectralGapBound { best, per_k })
}

/// Pseudo-spectral-gap lower bound
/// `max_k (1 - (1 - kappa_k(P*)) (1 - kappa_k)) / k` over lags where the
/// product contracts.
pub fn pseudo_spectral_gap_bound(
    profile_p: &CurvatureProfile,
    profile_pstar: &CurvatureProfile,
) -> Result<f64> {
    let horizon = profile_p.horizon().min(profile_pstar.horizon());
    let mut best = f64::NEG_INFINITY;
    for k in 1..=horizon {
        let v = (1.0 - (1.0 - profile_pstar.kappa(k)) * (1.0 - profile_p.kappa(k))) / k as f64;
        if v > 0.0 {
            best = best.max(v);
        }
    }
    if best > 0.0 {
        Ok(best)
    } else {
        Err(RicciError::NoPositiveKappa)
    }
}

/// Diameter and eccentricity bounds from the k-step jump lengths.
#[derive(Debug, Clone)]
pub struct DiameterBounds {
    pub k: usize,
    /// diam <= 2 sup_x J_k(x) / kappa_k
    pub diam: f64,
    /// weaker route diam <= 2 k sup_x J_1(x) / kappa_k
    pub diam_weak: Option<f64>,
    /// E(x) <= J_k(x) / kappa_k per state
    pub ecc: Vec<f64>,
    /// double stationary average <= 2 inf_x J_k(x) / kappa_k
    pub avg_avg: f64,
    /// d(x,y) <= (J_k(x) + J_k(y)) / kappa_k(x,y) for audited pairs
    pub per_pair: Vec<((usize, usize), f64)>,
}

/// L1 Bonnet-Myers bounds at lag `k`; requires `kappa_k > 0`.
pub fn bonnet_myers(
    summary: &GeometrySummary,
    profile: &CurvatureProfile,
    k: usize,
) -> Result<DiameterBounds> {
    let kap = profile.kappa(k);
    if kap <= 0.0 {
        return Err(RicciError::NonPositiveKappa { k, kappa: kap });
    }
    let jk = summary.jump(k)?;
    let sup_j = jk.iter().copied().fold(0.0, f64::max);
    let inf_j = jk.iter().copied().fold(f64::INFINITY, f64::min);
    let diam = 2.0 * sup_j / kap;
    let diam_weak = summary.jumps.get(&1).map(|j1| {
        let sup_j1 = j1.iter().copied().fold(0.0, f64::max);
        2.0 * k as f64 * sup_j1 / kap
    });
    let ecc = jk.iter().map(|j| j / kap).collect();
    let avg_avg = 2.0 * inf_j / kap;
    let mut per_pair = Vec::new();
    if let Some(table) = profile.per_pair() {
        for (idx, &(x, y)) in table.pairs.iter().enumerate() {
            let kxy = table.values[(k, idx)];
            if kxy > 0.0 {
                per_pair.push(((x, y), (jk[x] + jk[y]) / kxy));
            }
        }
    }
    Ok(DiameterBounds {
        k,
        diam,
        diam_weak,
        ecc,
        avg_avg,
        per_pair,
    })
}
