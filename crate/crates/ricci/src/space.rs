//! Finite metric spaces: dense distance matrices with cached extremes and
//! the geodesic check that licences neighbour-only curvature infima.

use ndarray::Array2;

use crate::error::{Result, RicciError};

/// Default cap on the number of states a dense space may hold.
pub const DEFAULT_STATE_CAP: usize = 4096;

/// Tolerance used when validating metric axioms.
const METRIC_TOL: f64 = 1e-12;

/// A finite metric space with a dense distance matrix.
///
/// `d0` is the minimum off-diagonal distance and `diam` the maximum distance;
/// both are cached at construction.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Array2<f64>,
    d0: f64,
    diam: f64,
}

/// Outcome of the geodesic check: either the space is `eps`-geodesic or a
/// witness pair violates the chain condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicCheck {
    pub is_geodesic: bool,
    pub witness: Option<(usize, usize)>,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Array2<f64>) -> Result<Self> {
        Self::with_cap(labels, dist, DEFAULT_STATE_CAP)
    }

    pub fn with_cap(labels: Vec<String>, dist: Array2<f64>, cap: usize) -> Result<Self> {
        let n = labels.len();
        if dist.nrows() != dist.ncols() {
            return Err(RicciError::NotSquare {
                rows: dist.nrows(),
                cols: dist.ncols(),
            });
        }
        if dist.nrows() != n {
            return Err(RicciError::InvalidInput(format!(
                "{} labels but {}x{} distance matrix",
                n,
                dist.nrows(),
                dist.ncols()
            )));
        }
        if n > cap {
            return Err(RicciError::TooLarge { states: n, cap });
        }
        for i in 0..n {
            if dist[(i, i)] != 0.0 {
                return Err(RicciError::MetricViolation(format!(
                    "d({i},{i}) = {} is not zero",
                    dist[(i, i)]
                )));
            }
            for j in 0..n {
                let d = dist[(i, j)];
                if !d.is_finite() || d < 0.0 {
                    return Err(RicciError::MetricViolation(format!(
                        "d({i},{j}) = {d} is not a finite nonnegative value"
                    )));
                }
                if i != j && d <= 0.0 {
                    return Err(RicciError::MetricViolation(format!(
                        "d({i},{j}) = {d} vanishes off the diagonal"
                    )));
                }
                if (d - dist[(j, i)]).abs() > METRIC_TOL {
                    return Err(RicciError::MetricViolation(format!(
                        "d({i},{j}) = {d} differs from d({j},{i}) = {}",
                        dist[(j, i)]
                    )));
                }
            }
        }
        // Triangle inequality, with a small slack for rounded inputs. The full
        // O(n^3) scan is run up to 1024 states; beyond that every pair is
        // still checked against 48 evenly spaced anchor midpoints.
        let anchors: Vec<usize> = if n <= 1024 {
            (0..n).collect()
        } else {
            let step = n.div_ceil(48);
            (0..n).step_by(step.max(1)).collect()
        };
        for i in 0..n {
            for j in 0..n {
                let dij = dist[(i, j)];
                for &k in &anchors {
                    if dij > dist[(i, k)] + dist[(k, j)] + METRIC_TOL {
                        return Err(RicciError::MetricViolation(format!(
                            "triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})"
                        )));
                    }
                }
            }
        }
        let mut d0 = f64::INFINITY;
        let mut diam = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d0 = d0.min(dist[(i, j)]);
                }
                diam = diam.max(dist[(i, j)]);
            }
        }
        if n < 2 {
            d0 = f64::INFINITY;
        }
        Ok(Self {
            labels,
            dist,
            d0,
            diam,
        })
    }

    /// Space with unlabelled points; labels default to the state index.
    pub fn from_matrix(dist: Array2<f64>) -> Result<Self> {
        let labels = (0..dist.nrows()).map(|i| i.to_string()).collect();
        Self::new(labels, dist)
    }

    /// Builds a space whose metric axioms are guaranteed by construction
    /// (Hamming distances, graph shortest paths), skipping validation.
    pub(crate) fn new_unchecked(labels: Vec<String>, dist: Array2<f64>) -> Self {
        let n = labels.len();
        let mut d0 = f64::INFINITY;
        let mut diam = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d0 = d0.min(dist[(i, j)]);
                }
                diam = diam.max(dist[(i, j)]);
            }
        }
        Self {
            labels,
            dist,
            d0,
            diam,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, x: usize, y: usize) -> f64 {
        self.dist[(x, y)]
    }

    pub fn dist_matrix(&self) -> &Array2<f64> {
        &self.dist
    }

    /// Minimum off-diagonal distance.
    pub fn d0(&self) -> f64 {
        self.d0
    }

    /// Maximum distance.
    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Checks whether every pair is joined by a chain of points with additive
    /// distances and links of length at most `eps`.
    ///
    /// Equivalent formulation used here: `d(x,y)` must equal the shortest-path
    /// distance in the graph whose edges are the pairs at distance <= `eps`.
    pub fn check_geodesic(&self, eps: f64) -> Result<GeodesicCheck> {
        if eps <= 0.0 {
            return Err(RicciError::InvalidInput(format!(
                "eps = {eps} must be positive"
            )));
        }
        let n = self.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && self.dist[(i, j)] <= eps {
                    adj[i].push((j, self.dist[(i, j)]));
                }
            }
        }
        let tol = 1e-9 * self.diam.max(1.0);
        for src in 0..n {
            let sp = dijkstra(&adj, src, n);
            for (dst, &sp_d) in sp.iter().enumerate() {
                if sp_d > self.dist[(src, dst)] + tol {
                    return Ok(GeodesicCheck {
                        is_geodesic: false,
                        witness: Some((src, dst)),
                    });
                }
            }
        }
        Ok(GeodesicCheck {
            is_geodesic: true,
            witness: None,
        })
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize, n: usize) -> Vec<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut dist = vec![f64::INFINITY; n];
    dist[src] = 0.0;
    let mut heap: BinaryHeap<Reverse<(OrdF64, usize)>> = BinaryHeap::new();
    heap.push(Reverse((OrdF64(0.0), src)));
    while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((OrdF64(nd), v)));
            }
        }
    }
    dist
}

/// Total-order wrapper so f64 keys can live in a binary heap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Hamming space over `sites` binary coordinates, restricted to the given
/// bitmask states.
pub fn hamming_space(states: &[u32], sites: usize) -> Result<FiniteMetricSpace> {
    let n = states.len();
    if n > DEFAULT_STATE_CAP {
        return Err(RicciError::TooLarge {
            states: n,
            cap: DEFAULT_STATE_CAP,
        });
    }
    let mut dist = Array2::zeros((n, n));
    for (i, &a) in states.iter().enumerate() {
        for (j, &b) in states.iter().enumerate() {
            dist[(i, j)] = (a ^ b).count_ones() as f64;
        }
    }
    let labels = states
        .iter()
        .map(|s| format!("{s:0width$b}", width = sites))
        .collect();
    Ok(FiniteMetricSpace::new_unchecked(labels, dist))
}
