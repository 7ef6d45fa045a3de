//! Markov kernels on finite metric spaces: validation, powers, stationary
//! distributions, time reversal, and the JSON chain format.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RicciError};
use crate::space::FiniteMetricSpace;

/// Row-sum tolerance for stochastic matrices.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Tolerance for `pi P = pi` when a stationary distribution is supplied.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Tolerance for the detailed-balance check.
pub const REVERSIBLE_TOL: f64 = 1e-10;

/// A probability distribution over the states of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Array1<f64>,
}

impl Distribution {
    pub fn new(weights: Array1<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(RicciError::NegativeEntry {
                    row: 0,
                    col: i,
                    value: w,
                });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(RicciError::NonStochasticRow { row: 0, sum });
        }
        Ok(Self { weights })
    }

    pub fn from_vec(weights: Vec<f64>) -> Result<Self> {
        Self::new(Array1::from_vec(weights))
    }

    /// Point mass at `x`.
    pub fn dirac(n: usize, x: usize) -> Self {
        let mut w = Array1::zeros(n);
        w[x] = 1.0;
        Self { weights: w }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: Array1::from_elem(n, 1.0 / n as f64),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Pushes the distribution one step through the kernel: `mu P`.
    pub fn step(&self, kernel: &MarkovKernel) -> Distribution {
        let w = self.weights.dot(kernel.matrix());
        Distribution { weights: w }
    }
}

/// A row-stochastic transition kernel over a finite metric space.
#[derive(Debug, Clone)]
pub struct MarkovKernel {
    space: Arc<FiniteMetricSpace>,
    p: Array2<f64>,
}

impl MarkovKernel {
    pub fn new(space: Arc<FiniteMetricSpace>, p: Array2<f64>) -> Result<Self> {
        let n = space.len();
        if p.nrows() != p.ncols() {
            return Err(RicciError::NotSquare {
                rows: p.nrows(),
                cols: p.ncols(),
            });
        }
        if p.nrows() != n {
            return Err(RicciError::InvalidInput(format!(
                "kernel is {}x{} but the space has {} states",
                p.nrows(),
                p.ncols(),
                n
            )));
        }
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                let v = p[(i, j)];
                if !v.is_finite() || v < 0.0 || v > 1.0 + ROW_SUM_TOL {
                    return Err(RicciError::NegativeEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(RicciError::NonStochasticRow { row: i, sum });
            }
        }
        Ok(Self { space, p })
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.p
    }

    /// Row `x` of the kernel: the jump measure from `x`.
    pub fn row(&self, x: usize) -> ndarray::ArrayView1<'_, f64> {
        self.p.row(x)
    }

    /// The k-step kernel `P^k`; `k = 0` yields the identity (Dirac) kernel.
    pub fn k_step(&self, k: usize) -> MarkovKernel {
        let n = self.len();
        let mut m = Array2::eye(n);
        for _ in 0..k {
            m = m.dot(&self.p);
        }
        MarkovKernel {
            space: Arc::clone(&self.space),
            p: m,
        }
    }

    /// Strongly connected components of the support graph that have no
    /// outgoing edges, i.e. the recurrent classes.
    pub fn recurrent_classes(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut graph = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.p[(i, j)] > 0.0 {
                    graph.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        let sccs = petgraph::algo::tarjan_scc(&graph);
        let mut comp_of = vec![0usize; n];
        for (c, scc) in sccs.iter().enumerate() {
            for &node in scc {
                comp_of[node.index()] = c;
            }
        }
        let mut closed = vec![true; sccs.len()];
        for i in 0..n {
            for j in 0..n {
                if self.p[(i, j)] > 0.0 && comp_of[i] != comp_of[j] {
                    closed[comp_of[i]] = false;
                }
            }
        }
        sccs.iter()
            .enumerate()
            .filter(|(c, _)| closed[*c])
            .map(|(_, scc)| {
                let mut v: Vec<usize> = scc.iter().map(|n| n.index()).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// Computes the unique stationary distribution with `||pi P - pi||_1 <= tol`.
    ///
    /// Uniqueness is verified first by counting recurrent classes of the
    /// support graph. Dense solve for up to 2000 states, damped power
    /// iteration beyond.
    pub fn stationary(&self, tol: f64) -> Result<Distribution> {
        let classes = self.recurrent_classes();
        if classes.len() != 1 {
            return Err(RicciError::NonUniqueStationary {
                classes: classes.len(),
            });
        }
        let n = self.len();
        let pi = if n <= 2000 {
            self.stationary_dense()?
        } else {
            self.stationary_power(tol)?
        };
        let err = l1_residual(&pi, &self.p);
        if err > tol.max(1e-12) {
            return Err(RicciError::StationaryMismatch { err });
        }
        Distribution::new(pi)
    }

    fn stationary_dense(&self) -> Result<Array1<f64>> {
        let n = self.len();
        // Solve (P^T - I) pi = 0 with the last equation replaced by sum = 1.
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = self.p[(j, i)];
            }
            a[(i, i)] -= 1.0;
        }
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = Array1::<f64>::zeros(n);
        b[n - 1] = 1.0;
        let x = crate::linalg::solve_dense(a, b)
            .ok_or_else(|| RicciError::InvalidInput("singular stationary system".into()))?;
        let mut pi = x;
        // Clamp noise-level negatives introduced by elimination.
        for v in pi.iter_mut() {
            if *v < 0.0 {
                if *v < -1e-9 {
                    return Err(RicciError::InvalidInput(format!(
                        "stationary solve produced negative mass {v}"
                    )));
                }
                *v = 0.0;
            }
        }
        let s: f64 = pi.sum();
        pi.mapv_inplace(|v| v / s);
        Ok(pi)
    }

    fn stationary_power(&self, tol: f64) -> Result<Array1<f64>> {
        let n = self.len();
        let mut mu = Array1::from_elem(n, 1.0 / n as f64);
        for _ in 0..200_000 {
            // Damping handles periodic chains.
            let next = 0.5 * &mu + 0.5 * &mu.dot(&self.p);
            let diff: f64 = next
                .iter()
                .zip(mu.iter())
                .map(|(a, b)| (a - b).abs())
                .sum();
            mu = next;
            if diff <= tol * 0.25 {
                return Ok(mu);
            }
        }
        Err(RicciError::InvalidInput(
            "power iteration for the stationary distribution did not converge".into(),
        ))
    }

    /// Detailed-balance check against `pi` within `REVERSIBLE_TOL`.
    pub fn is_reversible(&self, pi: &Distribution) -> bool {
        let n = self.len();
        for x in 0..n {
            for y in (x + 1)..n {
                let fwd = pi.get(x) * self.p[(x, y)];
                let bwd = pi.get(y) * self.p[(y, x)];
                if (fwd - bwd).abs() > REVERSIBLE_TOL {
                    return false;
                }
            }
        }
        true
    }
}

fn l1_residual(pi: &Array1<f64>, p: &Array2<f64>) -> f64 {
    let pushed = pi.dot(p);
    pushed
        .iter()
        .zip(pi.iter())
        .map(|(a, b)| (a - b).abs())
        .sum()
}

/// A kernel bundled with its stationary distribution and reversibility flag:
/// the universe every bound in this crate consumes.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    kernel: MarkovKernel,
    pi: Distribution,
    reversible: bool,
}

impl ChainSpec {
    /// Builds a chain, verifying `pi P = pi` when `pi` is supplied and
    /// computing the stationary distribution otherwise.
    pub fn new(kernel: MarkovKernel, pi: Option<Distribution>) -> Result<Self> {
        let pi = match pi {
            Some(pi) => {
                if pi.len() != kernel.len() {
                    return Err(RicciError::InvalidInput(format!(
                        "stationary distribution has {} entries for {} states",
                        pi.len(),
                        kernel.len()
                    )));
                }
                let err = l1_residual(pi.weights(), kernel.matrix());
                if err > STATIONARY_TOL {
                    return Err(RicciError::StationaryMismatch { err });
                }
                pi
            }
            None => kernel.stationary(STATIONARY_TOL)?,
        };
        let reversible = kernel.is_reversible(&pi);
        Ok(Self {
            kernel,
            pi,
            reversible,
        })
    }

    pub fn kernel(&self) -> &MarkovKernel {
        &self.kernel
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        self.kernel.space()
    }

    pub fn pi(&self) -> &Distribution {
        &self.pi
    }

    pub fn reversible(&self) -> bool {
        self.reversible
    }

    pub fn len(&self) -> usize {
        self.kernel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernel.is_empty()
    }

    /// Time reversal `P*(x,y) = P(y,x) pi(y) / pi(x)`.
    ///
    /// `P*` is row stochastic with the same stationary distribution; for
    /// reversible chains it equals `P` entrywise.
    pub fn time_reversal(&self) -> Result<MarkovKernel> {
        let n = self.len();
        for x in 0..n {
            if self.pi.get(x) <= 0.0 {
                return Err(RicciError::ZeroMass { state: x });
            }
        }
        let p = self.kernel.matrix();
        let mut q = Array2::zeros((n, n));
        for x in 0..n {
            for y in 0..n {
                q[(x, y)] = p[(y, x)] * self.pi.get(y) / self.pi.get(x);
            }
        }
        // Rescale away rounding so each row sums to one exactly enough.
        for mut row in q.rows_mut() {
            let s: f64 = row.sum();
            row.mapv_inplace(|v| v / s);
        }
        MarkovKernel::new(Arc::clone(self.kernel.space()), q)
    }

    /// The chain driven by `P*`, sharing `pi`.
    pub fn reversed(&self) -> Result<ChainSpec> {
        let kernel = self.time_reversal()?;
        ChainSpec::new(kernel, Some(self.pi.clone()))
    }
}

/// Serialized chain document: labels, distance matrix, transition matrix and
/// optional stationary vector, all row-major arrays of finite doubles.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpecJson {
    pub labels: Vec<String>,
    pub distance: Vec<Vec<f64>>,
    pub transition: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary: Option<Vec<f64>>,
}

impl ChainSpecJson {
    pub fn from_chain(chain: &ChainSpec) -> Self {
        let n = chain.len();
        let space = chain.space();
        let to_rows = |m: &Array2<f64>| {
            (0..n)
                .map(|i| m.row(i).to_vec())
                .collect::<Vec<Vec<f64>>>()
        };
        Self {
            labels: space.labels().to_vec(),
            distance: to_rows(space.dist_matrix()),
            transition: to_rows(chain.kernel().matrix()),
            stationary: Some(chain.pi().weights().to_vec()),
        }
    }

    pub fn into_chain(self) -> Result<ChainSpec> {
        let n = self.labels.len();
        let dist = rows_to_matrix(self.distance, n, "distance")?;
        let p = rows_to_matrix(self.transition, n, "transition")?;
        let space = Arc::new(FiniteMetricSpace::new(self.labels, dist)?);
        let kernel = MarkovKernel::new(space, p)?;
        let pi = self.stationary.map(Distribution::from_vec).transpose()?;
        ChainSpec::new(kernel, pi)
    }
}

fn rows_to_matrix(rows: Vec<Vec<f64>>, n: usize, what: &str) -> Result<Array2<f64>> {
    if rows.len() != n {
        return Err(RicciError::InvalidInput(format!(
            "{what} matrix has {} rows for {n} labels",
            rows.len()
        )));
    }
    let mut m = Array2::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != n {
            return Err(RicciError::InvalidInput(format!(
                "{what} row {i} has {} entries for {n} states",
                row.len()
            )));
        }
        for (j, v) in row.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// Loads a chain from the JSON document format.
pub fn load_chain_json(text: &str) -> Result<ChainSpec> {
    let doc: ChainSpecJson = serde_json::from_str(text)?;
    doc.into_chain()
}

/// Serializes a chain to the JSON document format.
pub fn save_chain_json(chain: &ChainSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ChainSpecJson::from_chain(
        chain,
    ))?)
}
