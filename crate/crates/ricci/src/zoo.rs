//! The built-in model zoo: two-state chains, the split-merge walk on integer
//! partitions, Glauber dynamics for the Curie-Weiss and 1D Ising models, and
//! the binary cube with a forbidden region (dense chain, sparse walker, and
//! the per-level curvature recursion).

use std::collections::HashMap;
use std::sync::Arc;

use ndarray::Array2;

use crate::dobrushin::{BinarySpinModel, CurieWeissModel, Ising1dModel};
use crate::error::{Result, RicciError};
use crate::markov::{ChainSpec, Distribution, MarkovKernel};
use crate::space::{hamming_space, FiniteMetricSpace, DEFAULT_STATE_CAP};

/// Scan order for Glauber dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scan {
    /// one uniformly chosen site per step
    Random,
    /// one full sweep through the sites per step
    Systemic,
}

/// Two-state chain with P(0,1) = a, P(1,0) = b on a unit-distance space.
pub fn two_state_chain(a: f64, b: f64) -> Result<ChainSpec> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a + b <= 0.0 {
        return Err(RicciError::InvalidInput(format!(
            "two-state rates a = {a}, b = {b} must lie in [0,1] with a + b > 0"
        )));
    }
    let space = Arc::new(FiniteMetricSpace::new(
        vec!["0".into(), "1".into()],
        ndarray::array![[0.0, 1.0], [1.0, 0.0]],
    )?);
    let p = ndarray::array![[1.0 - a, a], [b, 1.0 - b]];
    let kernel = MarkovKernel::new(space, p)?;
    let pi = Distribution::from_vec(vec![b / (a + b), a / (a + b)])?;
    ChainSpec::new(kernel, Some(pi))
}

/// Integer partitions of `n` in weakly decreasing order, with the split/merge
/// graph distance.
#[derive(Debug, Clone)]
pub struct PartitionSpace {
    pub n: u32,
    pub partitions: Vec<Vec<u32>>,
    pub index: HashMap<Vec<u32>, usize>,
}

/// Split-merge walk bundled with its exact integer transition numerators
/// (entries of `P` are `numerators / n^2`) and permutation cycle counts.
#[derive(Debug, Clone)]
pub struct SplitMergeChain {
    pub chain: ChainSpec,
    pub space: PartitionSpace,
    pub numerators: Array2<u64>,
    pub cycle_counts: Vec<u128>,
}

/// Builds the split-merge walk on partitions of `n` (2 <= n <= 30).
///
/// A part `a_i` splits into `(r, a_i - r)` with probability `a_i / n^2` per
/// choice of `r`, parts `a_i, a_j` merge with probability `2 a_i a_j / n^2`,
/// and the walk stays put with probability `1/n`. The stationary distribution
/// is the push-forward of the uniform permutation by cycle type.
pub fn split_merge_chain(n: u32) -> Result<SplitMergeChain> {
    if !(2..=30).contains(&n) {
        return Err(RicciError::TooLarge {
            states: n as usize,
            cap: 30,
        });
    }
    let partitions = enumerate_partitions(n);
    let count = partitions.len();
    let index: HashMap<Vec<u32>, usize> = partitions
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();

    let denom = (n as u64) * (n as u64);
    let mut numerators = Array2::<u64>::zeros((count, count));
    for (i, parts) in partitions.iter().enumerate() {
        // stay
        numerators[(i, i)] += n as u64;
        // splits: a_k -> (r, a_k - r), each r with numerator a_k;
        // (r, a_k - r) and (a_k - r, r) land on the same partition.
        for (k, &a) in parts.iter().enumerate() {
            for r in 1..a {
                let mut next: Vec<u32> = parts
                    .iter()
                    .enumerate()
                    .filter(|&(kk, _)| kk != k)
                    .map(|(_, &v)| v)
                    .collect();
                next.push(r);
                next.push(a - r);
                next.sort_unstable_by(|x, y| y.cmp(x));
                let j = index[&next];
                numerators[(i, j)] += a as u64;
            }
        }
        // merges
        for k in 0..parts.len() {
            for l in (k + 1)..parts.len() {
                let mut next: Vec<u32> = parts
                    .iter()
                    .enumerate()
                    .filter(|&(kk, _)| kk != k && kk != l)
                    .map(|(_, &v)| v)
                    .collect();
                next.push(parts[k] + parts[l]);
                next.sort_unstable_by(|x, y| y.cmp(x));
                let j = index[&next];
                numerators[(i, j)] += 2 * parts[k] as u64 * parts[l] as u64;
            }
        }
    }

    let mut p = Array2::<f64>::zeros((count, count));
    for i in 0..count {
        for j in 0..count {
            p[(i, j)] = numerators[(i, j)] as f64 / denom as f64;
        }
    }

    // Split/merge graph distance via BFS per source.
    let mut dist = Array2::<f64>::zeros((count, count));
    for src in 0..count {
        let mut d = vec![u32::MAX; count];
        d[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in 0..count {
                if v != u && numerators[(u, v)] > 0 && d[v] == u32::MAX {
                    d[v] = d[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (v, &dv) in d.iter().enumerate() {
            dist[(src, v)] = dv as f64;
        }
    }

    let labels: Vec<String> = partitions
        .iter()
        .map(|p| {
            p.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    let space = Arc::new(FiniteMetricSpace::new_unchecked(labels, dist));

    let cycle_counts: Vec<u128> = partitions.iter().map(|p| cycle_count(n, p)).collect();
    let n_fact = factorial(n);
    let pi: Vec<f64> = cycle_counts
        .iter()
        .map(|&c| c as f64 / n_fact as f64)
        .collect();

    let kernel = MarkovKernel::new(space, p)?;
    let chain = ChainSpec::new(kernel, Some(Distribution::from_vec(pi)?))?;
    Ok(SplitMergeChain {
        chain,
        space: PartitionSpace {
            n,
            partitions,
            index,
        },
        numerators,
        cycle_counts,
    })
}

fn enumerate_partitions(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        let top = rest.min(max);
        for part in (1..=top).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    rec(n, n, &mut cur, &mut out);
    out
}

/// Number of permutations of S_n with the given cycle type:
/// `n! / prod_j j^{m_j} m_j!`.
fn cycle_count(n: u32, parts: &[u32]) -> u128 {
    let mut mult: HashMap<u32, u32> = HashMap::new();
    for &p in parts {
        *mult.entry(p).or_insert(0) += 1;
    }
    let mut denom: u128 = 1;
    for (&j, &m) in &mult {
        denom *= (j as u128).pow(m);
        denom *= factorial(m);
    }
    factorial(n) / denom
}

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// Glauber chain (random or systemic scan) for any binary spin model, over
/// the Hamming metric on the full configuration space.
pub fn glauber_chain(model: &dyn BinarySpinModel, scan: Scan) -> Result<ChainSpec> {
    let sites = model.sites();
    let count = 1usize
        .checked_shl(sites as u32)
        .filter(|&c| c <= DEFAULT_STATE_CAP)
        .ok_or(RicciError::TooLarge {
            states: usize::MAX,
            cap: DEFAULT_STATE_CAP,
        })?;
    let states: Vec<u32> = (0..count as u32).collect();
    let space = Arc::new(hamming_space(&states, sites)?);

    let p = match scan {
        Scan::Random => {
            let mut p = Array2::<f64>::zeros((count, count));
            let inv = 1.0 / sites as f64;
            for s in 0..count as u32 {
                let mut stay = 0.0;
                for i in 0..sites {
                    let plus = model.conditional_plus(s, i);
                    let bit = 1u32 << i;
                    let flipped = s ^ bit;
                    let to_flipped = if s & bit == 0 { plus } else { 1.0 - plus };
                    let to_keep = 1.0 - to_flipped;
                    p[(s as usize, flipped as usize)] += inv * to_flipped;
                    stay += inv * to_keep;
                }
                p[(s as usize, s as usize)] += stay;
            }
            p
        }
        Scan::Systemic => {
            // One sweep through sites 1..n; multiply the per-site heat-bath
            // kernels in sweep order, exploiting their two-entry rows.
            let mut m = Array2::<f64>::eye(count);
            for i in 0..sites {
                let bit = 1u32 << i;
                let mut next = Array2::<f64>::zeros((count, count));
                for z in 0..count as u32 {
                    let plus = model.conditional_plus(z, i);
                    let zp = (z | bit) as usize;
                    let zm = (z & !bit) as usize;
                    for x in 0..count {
                        let v = m[(x, z as usize)];
                        if v != 0.0 {
                            next[(x, zp)] += v * plus;
                            next[(x, zm)] += v * (1.0 - plus);
                        }
                    }
                }
                m = next;
            }
            m
        }
    };

    // Stationary distribution from the Hamiltonian, stabilized by the max.
    let h: Vec<f64> = (0..count as u32).map(|s| model.hamiltonian(s)).collect();
    let hmax = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut pi: Vec<f64> = h.iter().map(|v| (v - hmax).exp()).collect();
    let z: f64 = pi.iter().sum();
    for v in pi.iter_mut() {
        *v /= z;
    }

    let kernel = MarkovKernel::new(space, p)?;
    ChainSpec::new(kernel, Some(Distribution::from_vec(pi)?))
}

/// Curie-Weiss Glauber dynamics on `{-1,1}^n` with the Hamming metric.
pub fn curie_weiss_chain(n: usize, beta: f64, h: f64, scan: Scan) -> Result<ChainSpec> {
    glauber_chain(&CurieWeissModel { n, beta, h }, scan)
}

/// 1D Ising Glauber dynamics with coupling `beta` per bond (the convention
/// the conditional probabilities use) and pinned boundary, so every site's
/// conditional follows the two-neighbour table.
pub fn ising1d_chain(n: usize, beta: f64, h: f64, scan: Scan) -> Result<ChainSpec> {
    glauber_chain(
        &Ising1dModel {
            n,
            beta,
            h,
            boundary: crate::dobrushin::IsingBoundary::Pinned,
        },
        scan,
    )
}

/// Random walk on `{x in {0,1}^n : sum x_i >= r}` that resamples a uniformly
/// chosen coordinate as Bernoulli(1/2), except that a set coordinate on the
/// boundary level is left untouched. Stationary distribution is uniform.
pub fn binary_cube_chain(n: usize, r: usize) -> Result<ChainSpec> {
    if n > 16 {
        return Err(RicciError::TooLarge { states: n, cap: 16 });
    }
    if r >= n {
        return Err(RicciError::InvalidInput(format!(
            "forbidden level r = {r} must be below n = {n}"
        )));
    }
    let states: Vec<u32> = (0..1u32 << n)
        .filter(|s| s.count_ones() as usize >= r)
        .collect();
    let count = states.len();
    if count > DEFAULT_STATE_CAP {
        return Err(RicciError::TooLarge {
            states: count,
            cap: DEFAULT_STATE_CAP,
        });
    }
    let index: HashMap<u32, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let space = Arc::new(hamming_space(&states, n)?);
    let mut p = Array2::<f64>::zeros((count, count));
    let half = 1.0 / (2.0 * n as f64);
    for (i, &s) in states.iter().enumerate() {
        let level = s.count_ones() as usize;
        let mut stay = 0.0;
        for site in 0..n {
            let bit = 1u32 << site;
            if level == r && s & bit != 0 {
                // frozen coordinate on the boundary level
                stay += 1.0 / n as f64;
            } else {
                stay += half;
                let flipped = s ^ bit;
                p[(i, index[&flipped])] += half;
            }
        }
        p[(i, i)] += stay;
    }
    let kernel = MarkovKernel::new(space, p)?;
    let pi = Distribution::from_vec(vec![1.0 / count as f64; count])?;
    ChainSpec::new(kernel, Some(pi))
}

/// Sparse walker for the forbidden-region cube, for oracle work beyond the
/// dense state cap. Rows are generated on demand.
#[derive(Debug, Clone)]
pub struct SparseCube {
    pub n: usize,
    pub r: usize,
    pub states: Vec<u32>,
    pub index: HashMap<u32, u32>,
}

impl SparseCube {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if n > 26 {
            return Err(RicciError::TooLarge { states: n, cap: 26 });
        }
        let states: Vec<u32> = (0..1u32 << n)
            .filter(|s| s.count_ones() as usize >= r)
            .collect();
        let index = states.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
        Ok(Self { n, r, states, index })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Transitions out of state index `i`, including the holding probability,
    /// in deterministic order (self first, then sites ascending).
    pub fn transitions(&self, i: usize) -> Vec<(usize, f64)> {
        let s = self.states[i];
        let level = s.count_ones() as usize;
        let half = 1.0 / (2.0 * self.n as f64);
        let mut out = Vec::with_capacity(self.n + 1);
        let mut stay = 0.0;
        let mut moves = Vec::new();
        for site in 0..self.n {
            let bit = 1u32 << site;
            if level == self.r && s & bit != 0 {
                stay += 1.0 / self.n as f64;
            } else {
                stay += half;
                moves.push((self.index[&(s ^ bit)] as usize, half));
            }
        }
        out.push((i, stay));
        out.extend(moves);
        out
    }

    /// `y = x P` for a dense vector over the cube states.
    pub fn apply_left(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.len() {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for (j, p) in self.transitions(i) {
                y[j] += xi * p;
            }
        }
    }

    /// Materializes the kernel as compressed sparse rows for iterative
    /// oracle work.
    pub fn to_csr(&self) -> crate::oracle::CsrMatrix {
        crate::oracle::CsrMatrix::from_rows(self.len(), (0..self.len()).map(|i| self.transitions(i)))
    }
}

/// Per-level lower-bound tables for the forbidden-region cube: the exact
/// recursion values and the closed-form analytic minorant.
#[derive(Debug, Clone)]
pub struct CubeTable {
    pub n: usize,
    pub r: usize,
    /// kappa_tilde[(k-1, j-r)] for k = 1..=k_max, j = r..=n-1
    pub kappa_tilde: Array2<f64>,
    /// closed-form kappa_hat on the same grid
    pub kappa_hat: Array2<f64>,
    /// 1/2 - 1/e - r/(n - 2r)
    pub rho: f64,
}

impl CubeTable {
    /// min_j kappa_tilde_k(j), a certified lower bound on kappa_k.
    pub fn min_tilde(&self, k: usize) -> f64 {
        self.kappa_tilde
            .row(k - 1)
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_tilde_per_k(&self) -> Vec<f64> {
        (1..=self.kappa_tilde.nrows()).map(|k| self.min_tilde(k)).collect()
    }

    /// First lag whose recursion minimum turns positive.
    pub fn first_positive_k(&self) -> Option<usize> {
        (1..=self.kappa_tilde.nrows()).find(|&k| self.min_tilde(k) > 0.0)
    }

    /// Upper bound on kappa_sigma_c from the closed forms:
    /// `n / rho * (1 + r / (n - 2r))`.
    pub fn sigma_c_bound(&self) -> f64 {
        self.n as f64 / self.rho * (1.0 + self.r as f64 / (self.n as f64 - 2.0 * self.r as f64))
    }

    /// A curvature profile of certified lower bounds (kappa_0 = 0, then
    /// min_j kappa_tilde_k(j)); valid globally by the geodesic property.
    pub fn profile(&self) -> Result<crate::curvature::CurvatureProfile> {
        let mut kappa = vec![0.0];
        kappa.extend(self.min_tilde_per_k());
        crate::curvature::CurvatureProfile::from_lower_bounds(kappa)
    }

    /// CSV with columns `k,j,kappa_tilde,kappa_hat`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,j,kappa_tilde,kappa_hat\n");
        for k in 1..=self.kappa_tilde.nrows() {
            for j in self.r..self.n {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    k,
                    j,
                    self.kappa_tilde[(k - 1, j - self.r)],
                    self.kappa_hat[(k - 1, j - self.r)]
                ));
            }
        }
        out
    }
}

/// Runs the per-level curvature recursion for the forbidden-region cube.
///
/// Levels j = r..=n-1 track neighbouring pairs across levels (j, j+1). The
/// base case is the exact one-step curvature: `(2-r)/(2n)` at the boundary
/// and `1/n` above. The analytic minorant `kappa_hat` is evaluated alongside.
pub fn cube_recursion(n: usize, r: usize, k_max: usize) -> Result<CubeTable> {
    if r >= n || k_max < 1 {
        return Err(RicciError::InvalidInput(format!(
            "cube recursion needs r < n and k_max >= 1 (got n = {n}, r = {r}, k_max = {k_max})"
        )));
    }
    let levels = n - r;
    let nf = n as f64;
    let rf = r as f64;
    let mut tilde = Array2::<f64>::zeros((k_max, levels));
    for (col, j) in (r..n).enumerate() {
        tilde[(0, col)] = if j == r { (2.0 - rf) / (2.0 * nf) } else { 1.0 / nf };
    }
    for k in 1..k_max {
        for (col, j) in (r..n).enumerate() {
            let jf = j as f64;
            let prev = |c: usize| tilde[(k - 1, c)];
            let v = if j == r {
                let up = if col + 1 < levels { prev(col + 1) } else { 0.0 };
                (2.0 - rf) / (2.0 * nf)
                    + (nf - 1.0 + rf) / (2.0 * nf) * prev(col)
                    + (nf - rf - 1.0) / (2.0 * nf) * up
            } else {
                let up = if col + 1 < levels { prev(col + 1) } else { 0.0 };
                1.0 / nf
                    + (nf - 1.0) / (2.0 * nf) * prev(col)
                    + jf / (2.0 * nf) * prev(col - 1)
                    + (nf - jf - 1.0) / (2.0 * nf) * up
            };
            tilde[(k, col)] = v;
        }
    }

    let eps = rf / nf;
    let mut hat = Array2::<f64>::zeros((k_max, levels));
    for k in 1..=k_max {
        let kf = k as f64;
        for (col, _j) in (r..n).enumerate() {
            let i = col as f64;
            hat[(k - 1, col)] = -eps / (1.0 - 2.0 * eps) * (eps / (1.0 - eps)).powf(i)
                + (1.0 - (-kf / nf).exp())
                - (kf - 1.0) / (2.0 * nf);
        }
    }

    let rho = 0.5 - (-1.0f64).exp() - rf / (nf - 2.0 * rf);
    Ok(CubeTable {
        n,
        r,
        kappa_tilde: tilde,
        kappa_hat: hat,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_small_n() {
        assert_eq!(enumerate_partitions(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(enumerate_partitions(5).len(), 7);
        assert_eq!(enumerate_partitions(7).len(), 15);
    }

    #[test]
    fn split_merge_n3_transitions_and_stationary() {
        let sm = split_merge_chain(3).unwrap();
        let i = sm.space.index[&vec![1, 1, 1]];
        let j = sm.space.index[&vec![2, 1]];
        let p = sm.chain.kernel().matrix();
        // three merge pairs at 2/9 each, stay 1/3
        assert!((p[(i, j)] - 6.0 / 9.0).abs() < 1e-15);
        assert!((p[(i, i)] - 3.0 / 9.0).abs() < 1e-15);
        // stationary = cycle-type frequencies over S_3
        let pi = sm.chain.pi();
        let k3 = sm.space.index[&vec![3]];
        assert!((pi.get(k3) - 1.0 / 3.0).abs() < 1e-15);
        assert!((pi.get(j) - 0.5).abs() < 1e-15);
        assert!((pi.get(i) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn split_merge_rows_sum_exactly_in_integers() {
        for n in 2..=10u32 {
            let sm = split_merge_chain(n).unwrap();
            let denom = (n as u64) * (n as u64);
            for i in 0..sm.space.partitions.len() {
                let total: u64 = sm.numerators.row(i).iter().sum();
                assert_eq!(total, denom, "row {i} of split-merge n = {n}");
            }
            let nf = factorial(n);
            let total: u128 = sm.cycle_counts.iter().sum();
            assert_eq!(total, nf);
        }
    }

    #[test]
    fn split_merge_diameter_is_n_minus_1() {
        for n in [3u32, 5, 7] {
            let sm = split_merge_chain(n).unwrap();
            assert_eq!(sm.chain.space().diam(), (n - 1) as f64);
            assert_eq!(sm.chain.space().d0(), 1.0);
        }
    }

    #[test]
    fn curie_weiss_random_scan_is_reversible() {
        let c = curie_weiss_chain(4, 0.5, 0.1, Scan::Random).unwrap();
        assert!(c.reversible());
    }

    #[test]
    fn curie_weiss_systemic_scan_preserves_pi() {
        // ChainSpec::new verifies pi P = pi within 1e-10.
        let c = curie_weiss_chain(4, 0.7, 0.0, Scan::Systemic).unwrap();
        assert!(!c.reversible());
    }

    #[test]
    fn independent_spins_reduce_to_lazy_walk() {
        let c = curie_weiss_chain(3, 0.0, 0.0, Scan::Random).unwrap();
        let p = c.kernel().matrix();
        for s in 0..8usize {
            assert!((p[(s, s)] - 0.5).abs() < 1e-15);
            for i in 0..3 {
                let f = s ^ (1 << i);
                assert!((p[(s, f)] - 1.0 / 6.0).abs() < 1e-15);
            }
        }
        let ising = ising1d_chain(3, 0.0, 0.0, Scan::Random).unwrap();
        for s in 0..8usize {
            for t in 0..8usize {
                assert!((ising.kernel().matrix()[(s, t)] - p[(s, t)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cube_chain_uniform_stationary_and_frozen_boundary() {
        let c = binary_cube_chain(6, 3).unwrap();
        assert_eq!(c.len(), 42);
        assert!(c.reversible());
        for v in c.pi().weights() {
            assert!((v - 1.0 / 42.0).abs() < 1e-15);
        }
        // moving below the boundary level is impossible
        let p = c.kernel().matrix();
        for (i, l) in c.space().labels().iter().enumerate() {
            let ones = l.chars().filter(|&ch| ch == '1').count();
            if ones == 3 {
                for (j, l2) in c.space().labels().iter().enumerate() {
                    let ones2 = l2.chars().filter(|&ch| ch == '1').count();
                    if ones2 < 3 {
                        assert_eq!(p[(i, j)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn cube_with_r0_is_plain_lazy_walk() {
        let c = binary_cube_chain(4, 0).unwrap();
        let p = c.kernel().matrix();
        for s in 0..16usize {
            assert!((p[(s, s)] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn sparse_cube_matches_dense_rows() {
        let dense = binary_cube_chain(6, 2).unwrap();
        let sparse = SparseCube::new(6, 2).unwrap();
        assert_eq!(dense.len(), sparse.len());
        let p = dense.kernel().matrix();
        for i in 0..sparse.len() {
            let mut row = vec![0.0; sparse.len()];
            for (j, v) in sparse.transitions(i) {
                row[j] += v;
            }
            for j in 0..sparse.len() {
                assert!((row[j] - p[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cube_recursion_base_case_and_growth() {
        let t = cube_recursion(500, 100, 500).unwrap();
        assert_eq!(t.kappa_tilde[(0, 0)], (2.0 - 100.0) / 1000.0);
        assert_eq!(t.kappa_tilde[(0, 0)], -0.098);
        assert!((t.kappa_tilde[(0, 5)] - 1.0 / 500.0).abs() < 1e-18);
        let first = t.first_positive_k();
        assert!(first.is_some_and(|k| k <= 500), "recursion never turned positive");
    }

    #[test]
    fn cube_recursion_rho_value() {
        let t = cube_recursion(100, 10, 100).unwrap();
        let expect = 0.5 - (-1.0f64).exp() - 0.125;
        assert!((t.rho - expect).abs() < 1e-15);
        assert!(t.min_tilde(100) >= t.rho);
    }
}
