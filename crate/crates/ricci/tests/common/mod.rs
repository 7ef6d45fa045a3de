//! Shared generators for the integration suites: seeded random metrics,
//! stochastic kernels, reversible chains and Lipschitz observables.

use std::sync::Arc;

use ndarray::Array2;
use ricci::markov::{ChainSpec, Distribution, MarkovKernel};
use ricci::mcmc::CounterRng;
use ricci::space::FiniteMetricSpace;

pub struct SeededRng {
    rng: CounterRng,
    stream: u64,
    counter: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: CounterRng::new(seed),
            stream: 0,
            counter: 0,
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.counter += 1;
        self.rng.uniform(self.stream, self.counter)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.uniform() * n as f64) as usize % n
    }
}

/// Random metric: a symmetric gap matrix repaired into a metric by
/// shortest-path closure.
pub fn random_metric(n: usize, rng: &mut SeededRng) -> FiniteMetricSpace {
    let mut d = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.range(0.5, 2.5);
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    // Floyd-Warshall closure
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[(i, k)] + d[(k, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    FiniteMetricSpace::from_matrix(d).expect("closure yields a metric")
}

/// Random ergodic chain: strictly positive rows over a random metric.
pub fn random_chain(n: usize, rng: &mut SeededRng) -> ChainSpec {
    let space = Arc::new(random_metric(n, rng));
    let mut p = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        let mut total = 0.0;
        for j in 0..n {
            let v = 0.05 + rng.uniform();
            p[(i, j)] = v;
            total += v;
        }
        for j in 0..n {
            p[(i, j)] /= total;
        }
        // re-normalize exactly
        let s: f64 = p.row(i).sum();
        for j in 0..n {
            p[(i, j)] /= s;
        }
    }
    let kernel = MarkovKernel::new(space, p).unwrap();
    ChainSpec::new(kernel, None).unwrap()
}

/// Random reversible chain: symmetric positive weights row-normalized, with
/// the stationary distribution proportional to row sums.
pub fn random_reversible_chain(n: usize, rng: &mut SeededRng) -> ChainSpec {
    let space = Arc::new(random_metric(n, rng));
    let mut w = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = 0.1 + rng.uniform();
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let row_sums: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let total: f64 = row_sums.iter().sum();
    let mut p = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] = w[(i, j)] / row_sums[i];
        }
        let s: f64 = p.row(i).sum();
        for j in 0..n {
            p[(i, j)] /= s;
        }
    }
    let pi: Vec<f64> = row_sums.iter().map(|r| r / total).collect();
    let kernel = MarkovKernel::new(space, p).unwrap();
    match ChainSpec::new(kernel.clone(), Some(Distribution::from_vec(pi).unwrap())) {
        Ok(chain) => chain,
        // row renormalization may perturb pi P = pi past its tolerance;
        // recompute instead
        Err(_) => ChainSpec::new(kernel, None).unwrap(),
    }
}

/// Random probability vector with optional zero support outside `support`.
pub fn random_distribution(n: usize, support: usize, rng: &mut SeededRng) -> Distribution {
    let mut w = vec![0.0f64; n];
    let mut picked = Vec::new();
    while picked.len() < support {
        let c = rng.below(n);
        if !picked.contains(&c) {
            picked.push(c);
        }
    }
    let mut total = 0.0;
    for &c in &picked {
        let v = 0.05 + rng.uniform();
        w[c] = v;
        total += v;
    }
    for v in w.iter_mut() {
        *v /= total;
    }
    let s: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= s;
    }
    Distribution::from_vec(w).unwrap()
}

/// Deterministic 1-Lipschitz observable (min-extension of seeded anchors).
pub fn random_lipschitz(chain: &ChainSpec, seed: u64) -> Vec<f64> {
    ricci::cli::random_lipschitz(chain, seed)
}
