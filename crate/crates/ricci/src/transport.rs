//! Exact L1 transportation distance on finite metric spaces.
//!
//! `w1` cancels the common mass of the two distributions and routes the
//! signed remainder through an uncapacitated bipartite min-cost flow, solved
//! by successive shortest augmenting paths with node potentials. Demands are
//! scaled to integers at 1e12 resolution so the augmentation count is finite
//! and the result is reproducible; arc costs stay in f64.

use ndarray::Array2;

use crate::error::{Result, RicciError};
use crate::markov::Distribution;
use crate::space::FiniteMetricSpace;

/// Probability entries below this threshold are truncated (and the rest
/// renormalized) before building the flow network.
pub const MASS_TRUNCATION: f64 = 1e-15;

/// Integer scaling applied to probability masses.
const SCALE: f64 = 1e12;

/// A coupling of two distributions with its transport cost.
#[derive(Debug, Clone)]
pub struct Coupling {
    pub joint: Array2<f64>,
    pub cost: f64,
}

impl Coupling {
    /// Largest deviation of the row/column marginals from the two target
    /// distributions.
    pub fn marginal_error(&self, mu: &Distribution, nu: &Distribution) -> f64 {
        let mut worst = 0.0f64;
        for (i, &m) in mu.weights().iter().enumerate() {
            let row: f64 = self.joint.row(i).sum();
            worst = worst.max((row - m).abs());
        }
        for (j, &m) in nu.weights().iter().enumerate() {
            let col: f64 = self.joint.column(j).sum();
            worst = worst.max((col - m).abs());
        }
        worst
    }
}

/// Total variation distance: half the l1 distance between the two vectors.
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> f64 {
    0.5 * mu
        .weights()
        .iter()
        .zip(nu.weights().iter())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

/// Exact Wasserstein (L1 transportation) distance between `mu` and `nu`.
pub fn w1(mu: &Distribution, nu: &Distribution, space: &FiniteMetricSpace) -> Result<f64> {
    w1_slices(
        mu.weights().as_slice().unwrap(),
        nu.weights().as_slice().unwrap(),
        space,
    )
}

/// `w1` on raw probability slices (used for rows of kernel powers).
pub fn w1_slices(mu: &[f64], nu: &[f64], space: &FiniteMetricSpace) -> Result<f64> {
    let net = FlowNetwork::build(mu, nu, space)?;
    Ok(match net {
        None => 0.0,
        Some(mut net) => {
            net.solve();
            net.cost
        }
    })
}

/// An optimal coupling achieving `w1(mu, nu)`.
pub fn optimal_coupling(
    mu: &Distribution,
    nu: &Distribution,
    space: &FiniteMetricSpace,
) -> Result<Coupling> {
    let n = space.len();
    let mu_s = mu.weights().as_slice().unwrap();
    let nu_s = nu.weights().as_slice().unwrap();
    let mut joint = Array2::zeros((n, n));
    // Mass shared by the two distributions stays in place.
    for i in 0..n {
        joint[(i, i)] = mu_s[i].min(nu_s[i]);
    }
    if let Some(mut net) = FlowNetwork::build(mu_s, nu_s, space)? {
        net.solve();
        for (s, t, units) in net.flows {
            let x = net.sources[s].0;
            let y = net.sinks[t].0;
            joint[(x, y)] += units as f64 / SCALE;
        }
    }
    let mut cost = 0.0;
    for x in 0..n {
        for y in 0..n {
            if joint[(x, y)] > 0.0 {
                cost += joint[(x, y)] * space.dist(x, y);
            }
        }
    }
    Ok(Coupling { joint, cost })
}

/// Uncapacitated bipartite transportation network over the supports of the
/// positive and negative parts of `mu - nu`.
struct FlowNetwork<'a> {
    space: &'a FiniteMetricSpace,
    sources: Vec<(usize, u64)>,
    sinks: Vec<(usize, u64)>,
    /// flow units shipped per (source index, sink index)
    flows: Vec<(usize, usize, u64)>,
    cost: f64,
}

impl<'a> FlowNetwork<'a> {
    /// Returns `None` when the two distributions coincide after truncation.
    fn build(mu: &[f64], nu: &[f64], space: &'a FiniteMetricSpace) -> Result<Option<Self>> {
        let n = space.len();
        if mu.len() != n || nu.len() != n {
            return Err(RicciError::InvalidInput(format!(
                "distributions of length {}/{} on a space of {} states",
                mu.len(),
                nu.len(),
                n
            )));
        }
        let mu = truncate(mu);
        let nu = truncate(nu);
        let mut sources = Vec::new();
        let mut sinks = Vec::new();
        for i in 0..n {
            let diff = mu[i] - nu[i];
            let units = (diff.abs() * SCALE).round() as u64;
            if units == 0 {
                continue;
            }
            if diff > 0.0 {
                sources.push((i, units));
            } else {
                sinks.push((i, units));
            }
        }
        if sources.is_empty() || sinks.is_empty() {
            return Ok(None);
        }
        // Rounding each side independently can leave a few units of
        // imbalance; repair on the largest entry.
        let supply: u64 = sources.iter().map(|s| s.1).sum();
        let demand: u64 = sinks.iter().map(|s| s.1).sum();
        if supply > demand {
            let k = argmax(&sinks);
            sinks[k].1 += supply - demand;
        } else if demand > supply {
            let k = argmax(&sources);
            sources[k].1 += demand - supply;
        }
        Ok(Some(Self {
            space,
            sources,
            sinks,
            flows: Vec::new(),
            cost: 0.0,
        }))
    }

    /// Successive shortest augmenting paths with potentials. All arc costs
    /// are nonnegative, so zero initial potentials are admissible. The
    /// network is complete bipartite, so Dijkstra runs as a dense scan and
    /// stops at the first finalized sink with unmet demand (nodes not yet
    /// finalized sit at distance >= d*, so updating their potentials by d*
    /// keeps every reduced cost nonnegative).
    fn solve(&mut self) {
        let ns = self.sources.len();
        let nt = self.sinks.len();
        let mut supply: Vec<u64> = self.sources.iter().map(|s| s.1).collect();
        let mut demand: Vec<u64> = self.sinks.iter().map(|s| s.1).collect();
        // Flow currently on (source, sink) arcs; backward residuals come from
        // these entries.
        let mut flow: Vec<Vec<u64>> = vec![vec![0; nt]; ns];
        // Node ids: sources 0..ns, sinks ns..ns+nt.
        let total = ns + nt;
        let mut pot = vec![0.0f64; total];
        let mut dist = vec![0.0f64; total];
        let mut parent = vec![usize::MAX; total];
        let mut done = vec![false; total];

        let arc_cost = |s: usize, t: usize, this: &Self| -> f64 {
            this.space.dist(this.sources[s].0, this.sinks[t].0)
        };

        loop {
            let mut remaining_supply = false;
            for v in dist.iter_mut() {
                *v = f64::INFINITY;
            }
            for p in parent.iter_mut() {
                *p = usize::MAX;
            }
            for d in done.iter_mut() {
                *d = false;
            }
            for (s, &sup) in supply.iter().enumerate() {
                if sup > 0 {
                    remaining_supply = true;
                    dist[s] = 0.0;
                }
            }
            if !remaining_supply {
                break;
            }
            let mut target: Option<usize> = None;
            loop {
                // dense extraction of the unfinished node with least distance
                let mut u = usize::MAX;
                let mut best = f64::INFINITY;
                for v in 0..total {
                    if !done[v] && dist[v] < best {
                        best = dist[v];
                        u = v;
                    }
                }
                if u == usize::MAX {
                    break;
                }
                done[u] = true;
                if u >= ns && demand[u - ns] > 0 {
                    target = Some(u - ns);
                    break;
                }
                if u < ns {
                    // forward arcs source -> every sink
                    let du = dist[u];
                    for t in 0..nt {
                        if done[ns + t] {
                            continue;
                        }
                        let rc = (arc_cost(u, t, self) + pot[u] - pot[ns + t]).max(0.0);
                        let nd = du + rc;
                        if nd < dist[ns + t] {
                            dist[ns + t] = nd;
                            parent[ns + t] = u;
                        }
                    }
                } else {
                    // backward arcs sink -> source where flow exists
                    let t = u - ns;
                    let du = dist[u];
                    for s in 0..ns {
                        if done[s] || flow[s][t] == 0 {
                            continue;
                        }
                        let rc = (-arc_cost(s, t, self) + pot[u] - pot[s]).max(0.0);
                        let nd = du + rc;
                        if nd < dist[s] {
                            dist[s] = nd;
                            parent[s] = u;
                        }
                    }
                }
            }
            let t_star = target.expect("supply remains but no sink reachable");

            // Bottleneck along the augmenting path.
            let mut bottleneck = demand[t_star];
            let mut node = ns + t_star;
            loop {
                let prev = parent[node];
                if node >= ns {
                    // arrived via forward arc prev(source) -> node(sink)
                    if parent[prev] == usize::MAX && supply[prev] > 0 {
                        bottleneck = bottleneck.min(supply[prev]);
                        break;
                    }
                } else {
                    // arrived via backward arc prev(sink) -> node(source)
                    bottleneck = bottleneck.min(flow[node][prev - ns]);
                }
                node = prev;
                if parent[node] == usize::MAX {
                    break;
                }
            }

            // Apply the augmentation.
            let mut node = ns + t_star;
            demand[t_star] -= bottleneck;
            loop {
                let prev = parent[node];
                if node >= ns {
                    flow[prev][node - ns] += bottleneck;
                } else {
                    flow[node][prev - ns] -= bottleneck;
                }
                node = prev;
                if parent[node] == usize::MAX {
                    break;
                }
            }
            supply[node] -= bottleneck;

            // Standard potential update keeps reduced costs nonnegative.
            let d_star = dist[ns + t_star];
            for v in 0..total {
                pot[v] += if dist[v].is_finite() {
                    dist[v].min(d_star)
                } else {
                    d_star
                };
            }
        }

        self.cost = 0.0;
        self.flows.clear();
        for s in 0..ns {
            for t in 0..nt {
                if flow[s][t] > 0 {
                    self.cost += flow[s][t] as f64 / SCALE * arc_cost(s, t, self);
                    self.flows.push((s, t, flow[s][t]));
                }
            }
        }
    }
}

fn truncate(p: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = p
        .iter()
        .map(|&v| if v < MASS_TRUNCATION { 0.0 } else { v })
        .collect();
    let s: f64 = out.iter().sum();
    if s > 0.0 {
        for v in out.iter_mut() {
            *v /= s;
        }
    }
    out
}

fn argmax(entries: &[(usize, u64)]) -> usize {
    let mut best = 0;
    for (k, e) in entries.iter().enumerate() {
        if e.1 > entries[best].1 {
            best = k;
        }
    }
    best
}
