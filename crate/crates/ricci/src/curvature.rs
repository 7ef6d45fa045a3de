//! Multi-step coarse Ricci curvature: per-pair values, global infima,
//! profiles with submultiplicativity bookkeeping, and the recursive
//! lower-bound engine driven by explicit couplings.

use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Result, RicciError};
use crate::markov::ChainSpec;
use crate::transport::{self, Coupling};

/// Slack allowed when checking the submultiplicativity inequality.
pub const SUBMULT_TOL: f64 = 1e-9;

/// Pair set over which curvature infima are taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairMode {
    /// Exhaustive enumeration of all unordered pairs.
    AllPairs,
    /// Pairs at distance <= eps; valid as a global infimum on eps-geodesic
    /// spaces.
    GeodesicNeighbors(f64),
}

/// Geometric-decay certificate extracted from a profile: for every i,
/// `1 - kappa_i <= (1 - kappa)^(floor(i/k)) * m_sup`.
#[derive(Debug, Clone, Copy)]
pub struct DecayCert {
    pub k: usize,
    pub kappa: f64,
    pub m_sup: f64,
}

/// The sequence kappa_0..kappa_K with running complement sums and the
/// quantities the bound formulas consume.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    kappa: Vec<f64>,
    running_sigma_c: Vec<f64>,
    m_sup: f64,
    submult_violation: f64,
    per_pair: Option<PerPairTable>,
}

/// Per-pair curvature table for audited pairs.
#[derive(Debug, Clone)]
pub struct PerPairTable {
    pub pairs: Vec<(usize, usize)>,
    /// values[(k, pair_idx)] = kappa_k(x, y)
    pub values: Array2<f64>,
}

impl CurvatureProfile {
    /// Builds a profile from externally certified lower bounds on kappa_k
    /// (index 0 must hold kappa_0 = 0). Bounds remain valid downstream since
    /// every constant is monotone in the kappa inputs.
    pub fn from_lower_bounds(kappa: Vec<f64>) -> Result<Self> {
        if kappa.is_empty() {
            return Err(RicciError::InvalidInput("empty profile".into()));
        }
        if kappa.iter().any(|k| !k.is_finite() || *k > 1.0 + 1e-12) {
            return Err(RicciError::InvalidInput(
                "kappa values must be finite and at most 1".into(),
            ));
        }
        Ok(Self::assemble(kappa, None))
    }

    fn assemble(kappa: Vec<f64>, per_pair: Option<PerPairTable>) -> Self {
        let mut running = Vec::with_capacity(kappa.len());
        let mut acc = 0.0;
        let mut m_sup = f64::NEG_INFINITY;
        for &k in &kappa {
            acc += 1.0 - k;
            running.push(acc);
            m_sup = m_sup.max(1.0 - k);
        }
        let mut violation = f64::NEG_INFINITY;
        let kk = kappa.len() - 1;
        for a in 1..=kk {
            for b in a..=kk {
                if a + b > kk {
                    break;
                }
                let lhs = 1.0 - kappa[a + b];
                let rhs = (1.0 - kappa[a]) * (1.0 - kappa[b]);
                violation = violation.max(lhs - rhs);
            }
        }
        Self {
            kappa,
            running_sigma_c: running,
            m_sup,
            submult_violation: violation,
            per_pair,
        }
    }

    /// Largest computed lag.
    pub fn horizon(&self) -> usize {
        self.kappa.len() - 1
    }

    pub fn kappa(&self, k: usize) -> f64 {
        self.kappa[k]
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappa
    }

    /// `sup_k (1 - kappa_k)` over the profile; equals the paper's M whenever
    /// the profile reaches a positive kappa.
    pub fn m_sup(&self) -> f64 {
        self.m_sup
    }

    /// Running partial sums of `1 - kappa_i` up to each lag.
    pub fn running_sigma_c(&self) -> &[f64] {
        &self.running_sigma_c
    }

    /// Partial sum over i < k of `1 - kappa_i`.
    pub fn partial_sigma_c(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.running_sigma_c[k - 1]
        }
    }

    /// Worst observed violation of `1-k_{a+b} <= (1-k_a)(1-k_b)`; exact
    /// profiles stay below `SUBMULT_TOL`.
    pub fn submult_violation(&self) -> f64 {
        self.submult_violation
    }

    pub fn per_pair(&self) -> Option<&PerPairTable> {
        self.per_pair.as_ref()
    }

    /// Per-pair curvature value, when the pair was audited.
    pub fn kappa_pair_at(&self, x: usize, y: usize, k: usize) -> Option<f64> {
        let key = norm_pair(x, y);
        let table = self.per_pair.as_ref()?;
        let idx = table.pairs.iter().position(|&p| p == key)?;
        Some(table.values[(k, idx)])
    }

    /// The decay certificate minimizing the geometric rate
    /// `(1 - kappa_k)^(1/k)` over lags with positive curvature.
    pub fn decay_cert(&self) -> Option<DecayCert> {
        let mut best: Option<(f64, usize)> = None;
        for k in 1..=self.horizon() {
            if self.kappa[k] > 0.0 {
                let rate = (1.0 - self.kappa[k]).powf(1.0 / k as f64);
                if best.is_none() || rate < best.unwrap().0 {
                    best = Some((rate, k));
                }
            }
        }
        best.map(|(_, k)| DecayCert {
            k,
            kappa: self.kappa[k],
            m_sup: self.m_sup,
        })
    }

    /// First lag with positive curvature.
    pub fn first_positive(&self) -> Option<usize> {
        (1..=self.horizon()).find(|&k| self.kappa[k] > 0.0)
    }

    /// Upper bound on `1 - kappa_i` valid for any i, including lags beyond
    /// the horizon (closed by the geometric certificate).
    pub fn one_minus_kappa_upper(&self, i: usize) -> Result<f64> {
        if i <= self.horizon() {
            return Ok(1.0 - self.kappa[i]);
        }
        let cert = self.decay_cert().ok_or(RicciError::NoPositiveKappa)?;
        let m = (i / cert.k) as i32;
        Ok((1.0 - cert.kappa).powi(m) * cert.m_sup)
    }

    /// Upper bound on the full series `sum_i (1 - kappa_i)^power`, combining
    /// the exact partial sum with a certified geometric remainder.
    pub fn series_upper(&self, power: i32) -> Result<f64> {
        let cert = self.decay_cert().ok_or(RicciError::NoPositiveKappa)?;
        let head: f64 = self
            .kappa
            .iter()
            .map(|&k| (1.0 - k).max(0.0).powi(power))
            .sum();
        Ok(head + self.series_tail(power, cert))
    }

    fn series_tail(&self, power: i32, cert: DecayCert) -> f64 {
        let horizon = self.horizon();
        let r = (1.0 - cert.kappa).powi(power);
        let m0 = (horizon + 1) / cert.k;
        let ma = cert.m_sup.max(0.0).powi(power);
        ma * cert.k as f64 * r.powi(m0 as i32) / (1.0 - r)
    }

    /// Upper bound on `kappa_sigma_c = sum_k (1 - kappa_k)`, optimized over
    /// the profile's positive lags.
    pub fn kappa_sigma_c_upper(&self) -> Result<f64> {
        let mut best = f64::INFINITY;
        for k in 1..=self.horizon() {
            if self.kappa[k] > 0.0 {
                best = best.min(kappa_sigma_c_bound(self, k)?);
            }
        }
        if best.is_finite() {
            Ok(best)
        } else {
            Err(RicciError::NoPositiveKappa)
        }
    }

    /// Serializes the profile as CSV with columns
    /// `k,kappa_k,one_minus_kappa_k,running_kappa_sigma_c`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,kappa_k,one_minus_kappa_k,running_kappa_sigma_c\n");
        for (k, &kap) in self.kappa.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                k,
                kap,
                1.0 - kap,
                self.running_sigma_c[k]
            ));
        }
        out
    }
}

/// `kappa_k(x, y) = 1 - W1(P_x^k, P_y^k) / d(x, y)`, and 1 on the diagonal.
pub fn kappa_pair(chain: &ChainSpec, x: usize, y: usize, k: usize) -> Result<f64> {
    if x == y {
        return Ok(1.0);
    }
    let pk = chain.kernel().k_step(k);
    kappa_pair_rows(chain, &pk, x, y)
}

fn kappa_pair_rows(chain: &ChainSpec, pk: &crate::markov::MarkovKernel, x: usize, y: usize) -> Result<f64> {
    let space = chain.space();
    let rx = pk.matrix().row(x);
    let ry = pk.matrix().row(y);
    let w = transport::w1_slices(
        rx.to_slice().expect("row-major kernel"),
        ry.to_slice().expect("row-major kernel"),
        space,
    )?;
    Ok(1.0 - w / space.dist(x, y))
}

/// The pair set scanned by the infimum for a given mode.
pub fn pair_set(chain: &ChainSpec, mode: PairMode) -> Result<Vec<(usize, usize)>> {
    let n = chain.len();
    let space = chain.space();
    match mode {
        PairMode::AllPairs => {
            let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
            for x in 0..n {
                for y in (x + 1)..n {
                    pairs.push((x, y));
                }
            }
            Ok(pairs)
        }
        PairMode::GeodesicNeighbors(eps) => {
            let check = space.check_geodesic(eps)?;
            if !check.is_geodesic {
                let (x, y) = check.witness.unwrap();
                return Err(RicciError::NotGeodesic { eps, x, y });
            }
            let mut pairs = Vec::new();
            for x in 0..n {
                for y in (x + 1)..n {
                    if space.dist(x, y) <= eps {
                        pairs.push((x, y));
                    }
                }
            }
            Ok(pairs)
        }
    }
}

/// Global curvature at lag `k`: the infimum of `kappa_k(x,y)` over the pair
/// set selected by `mode`.
pub fn kappa_k(chain: &ChainSpec, k: usize, mode: PairMode) -> Result<f64> {
    let profile = curvature_profile(chain, k, mode)?;
    Ok(profile.kappa(k))
}

/// Computes the profile kappa_0..kappa_K over the selected pair set, caching
/// kernel powers incrementally (P^{k+1} = P^k P).
pub fn curvature_profile(chain: &ChainSpec, k_max: usize, mode: PairMode) -> Result<CurvatureProfile> {
    curvature_profile_impl(chain, k_max, mode, false)
}

/// Same as [`curvature_profile`] but records the audited per-pair table.
pub fn curvature_profile_with_pairs(
    chain: &ChainSpec,
    k_max: usize,
    mode: PairMode,
) -> Result<CurvatureProfile> {
    curvature_profile_impl(chain, k_max, mode, true)
}

fn curvature_profile_impl(
    chain: &ChainSpec,
    k_max: usize,
    mode: PairMode,
    record_pairs: bool,
) -> Result<CurvatureProfile> {
    if k_max < 1 {
        return Err(RicciError::InvalidInput("profile horizon must be >= 1".into()));
    }
    let n = chain.len();
    if n < 2 {
        return Err(RicciError::InvalidInput(
            "curvature needs at least two states".into(),
        ));
    }
    let pairs = pair_set(chain, mode)?;
    let space = chain.space();
    let p = chain.kernel().matrix();

    let mut kappa = vec![0.0f64; k_max + 1];
    let mut table = record_pairs.then(|| Array2::zeros((k_max + 1, pairs.len())));

    let mut power = Array2::eye(n);
    for k in 1..=k_max {
        power = power.dot(p);
        let values: Vec<f64> = pairs
            .par_iter()
            .map(|&(x, y)| {
                let w = transport::w1_slices(
                    power.row(x).to_slice().expect("row-major power"),
                    power.row(y).to_slice().expect("row-major power"),
                    space,
                )
                .expect("w1 on matching supports");
                1.0 - w / space.dist(x, y)
            })
            .collect();
        let mut min = f64::INFINITY;
        for (idx, &v) in values.iter().enumerate() {
            min = min.min(v);
            if let Some(t) = table.as_mut() {
                t[(k, idx)] = v;
            }
        }
        kappa[k] = min;
    }
    let per_pair = table.map(|values| PerPairTable { pairs, values });
    Ok(CurvatureProfile::assemble(kappa, per_pair))
}

/// Upper bound on kappa_sigma_c from lag `k`:
/// `min(sum_{i<k}(1-kappa_i)/kappa_k, k M / kappa_k)`.
pub fn kappa_sigma_c_bound(profile: &CurvatureProfile, k: usize) -> Result<f64> {
    let kap = profile.kappa(k);
    if kap <= 0.0 {
        return Err(RicciError::NonPositiveKappa { k, kappa: kap });
    }
    let partial = profile.partial_sigma_c(k);
    let via_partial = partial / kap;
    let via_m = k as f64 * profile.m_sup() / kap;
    Ok(via_partial.min(via_m))
}

/// Couplings of `P_x` and `P_y` for each audited pair, either user supplied
/// or built from the optimal transport plan.
#[derive(Debug, Clone, Default)]
pub struct PairCouplingFamily {
    map: BTreeMap<(usize, usize), Coupling>,
}

impl PairCouplingFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: usize, y: usize, coupling: Coupling) {
        self.map.insert(norm_pair(x, y), coupling);
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&Coupling> {
        self.map.get(&norm_pair(x, y))
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.map.keys().copied().collect()
    }

    /// Builds the optimal-coupling family over the given pairs.
    pub fn optimal(chain: &ChainSpec, pairs: &[(usize, usize)]) -> Result<Self> {
        let space = chain.space();
        let p = chain.kernel().matrix();
        let n = chain.len();
        let mut family = Self::new();
        for &(x, y) in pairs {
            let mu = crate::markov::Distribution::new(p.row(x).to_owned())?;
            let nu = crate::markov::Distribution::new(p.row(y).to_owned())?;
            let c = transport::optimal_coupling(&mu, &nu, space)?;
            debug_assert_eq!(c.joint.nrows(), n);
            family.insert(x, y, c);
        }
        Ok(family)
    }
}

/// Certified lower bounds on `kappa_k(x,y)` for every audited pair and
/// k = 1..=k_max.
#[derive(Debug, Clone)]
pub struct RecursiveBounds {
    pub pairs: Vec<(usize, usize)>,
    /// bounds[(k - 1, pair_idx)] lower-bounds kappa_k at that pair
    pub bounds: Array2<f64>,
}

impl RecursiveBounds {
    pub fn at(&self, x: usize, y: usize, k: usize) -> Option<f64> {
        let key = norm_pair(x, y);
        let idx = self.pairs.iter().position(|&p| p == key)?;
        Some(self.bounds[(k - 1, idx)])
    }

    /// Global lower bound per lag: the min over all audited pairs. Valid for
    /// the whole space when the audited pairs dominate it (geodesic spaces
    /// with all neighbour pairs audited).
    pub fn min_per_k(&self) -> Vec<f64> {
        (0..self.bounds.nrows())
            .map(|r| self.bounds.row(r).iter().copied().fold(f64::INFINITY, f64::min))
            .collect()
    }
}

/// Iterates the one-step coupling recursion: given couplings of `(P_x, P_y)`
/// and valid floors on `kappa_1(x,y)`, produces certified lower bounds on
/// `kappa_k(x,y)` for k up to `k_max`.
///
/// The update is monotone: raising any floor never lowers any output, because
/// every coefficient `joint(a,b) d(a,b)` is nonnegative.
pub fn recursive_lower_bound(
    chain: &ChainSpec,
    couplings: &PairCouplingFamily,
    kappa1_floor: &BTreeMap<(usize, usize), f64>,
    k_max: usize,
) -> Result<RecursiveBounds> {
    let space = chain.space();
    let pairs = couplings.pairs();
    if pairs.is_empty() {
        return Err(RicciError::InvalidInput("no audited pairs".into()));
    }
    let mut index = BTreeMap::new();
    for (i, &p) in pairs.iter().enumerate() {
        index.insert(p, i);
    }
    // Precompute, per audited pair, the support terms
    // (audited index of (a,b), joint(a,b) * d(a,b) / d(x,y)).
    let mut terms: Vec<Vec<(usize, f64)>> = Vec::with_capacity(pairs.len());
    for &(x, y) in &pairs {
        let coupling = couplings.get(x, y).unwrap();
        let dxy = space.dist(x, y);
        let mut row = Vec::new();
        for ((a, b), &mass) in coupling.joint.indexed_iter() {
            if a == b || mass <= 1e-15 {
                continue;
            }
            let key = norm_pair(a, b);
            let idx = *index
                .get(&key)
                .ok_or(RicciError::IncompletePairSet { x: key.0, y: key.1 })?;
            row.push((idx, mass * space.dist(a, b) / dxy));
        }
        terms.push(row);
    }
    let mut cur: Vec<f64> = pairs
        .iter()
        .map(|p| {
            kappa1_floor
                .get(p)
                .copied()
                .ok_or(RicciError::IncompletePairSet { x: p.0, y: p.1 })
        })
        .collect::<Result<_>>()?;
    let mut bounds = Array2::zeros((k_max, pairs.len()));
    for (i, &v) in cur.iter().enumerate() {
        bounds[(0, i)] = v;
    }
    for k in 1..k_max {
        let next: Vec<f64> = terms
            .iter()
            .map(|row| {
                let moved: f64 = row.iter().map(|&(idx, w)| w * (1.0 - cur[idx])).sum();
                1.0 - moved
            })
            .collect();
        for (i, &v) in next.iter().enumerate() {
            bounds[(k, i)] = v;
        }
        cur = next;
    }
    Ok(RecursiveBounds { pairs, bounds })
}

fn norm_pair(x: usize, y: usize) -> (usize, usize) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}
