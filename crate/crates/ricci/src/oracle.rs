//! Independent exact oracles used to certify every bound: an in-repo dense
//! symmetric eigensolver (Householder tridiagonalization + shifted QL),
//! certified power iteration for spectra beyond the dense cap, exact total
//! variation mixing times, a dense-tableau simplex for transport brute
//! force, and the claim-vs-oracle verdict table.
//!
//! Nothing here shares numerics with the bound-producing code paths.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Result, RicciError};
use crate::markov::ChainSpec;

/// State cap for the dense oracles.
pub const ORACLE_STATE_CAP: usize = 4096;

// ---------------------------------------------------------------------------
// dense symmetric eigensolver

/// All eigenvalues of a symmetric matrix, ascending. Householder reduction
/// to tridiagonal form followed by the implicit-shift QL iteration.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(RicciError::NotSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = householder_tridiagonalize(a.clone());
    tql_eigenvalues(&mut d, &mut e)?;
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d)
}

/// Reduces a symmetric matrix to tridiagonal form; returns the diagonal `d`
/// and subdiagonal `e` (with `e[0] = 0`, `e[i] = t[i][i-1]`).
fn householder_tridiagonalize(mut a: Array2<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut e = vec![0.0f64; n];
    let mut v = vec![0.0f64; n];
    let mut p = vec![0.0f64; n];
    for k in 0..n.saturating_sub(2) {
        let mut norm2 = 0.0;
        for i in (k + 1)..n {
            norm2 += a[(i, k)] * a[(i, k)];
        }
        if norm2 == 0.0 {
            e[k + 1] = 0.0;
            continue;
        }
        let mut alpha = norm2.sqrt();
        if a[(k + 1, k)] > 0.0 {
            alpha = -alpha;
        }
        for i in (k + 1)..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = ((k + 1)..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            e[k + 1] = alpha;
            continue;
        }
        let beta = 2.0 / vnorm2;
        for i in (k + 1)..n {
            let mut acc = 0.0;
            for j in (k + 1)..n {
                acc += a[(i, j)] * v[j];
            }
            p[i] = beta * acc;
        }
        let pv: f64 = ((k + 1)..n).map(|i| p[i] * v[i]).sum();
        let half = 0.5 * beta * pv;
        for i in (k + 1)..n {
            p[i] -= half * v[i];
        }
        for i in (k + 1)..n {
            for j in (k + 1)..=i {
                let upd = v[i] * p[j] + p[i] * v[j];
                a[(i, j)] -= upd;
                if i != j {
                    a[(j, i)] = a[(i, j)];
                }
            }
        }
        a[(k + 1, k)] = alpha;
        e[k + 1] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = 0.0;
        }
    }
    if n >= 2 {
        e[n - 1] = a[(n - 1, n - 2)];
    }
    let d = (0..n).map(|i| a[(i, i)]).collect();
    (d, e)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix
/// (eigenvalues only).
fn tql_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(RicciError::InvalidInput(
                    "QL iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut pp = 0.0f64;
            let mut broke = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= pp;
                    e[m] = 0.0;
                    broke = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - pp;
                r = (d[i] - g) * s + 2.0 * c * b;
                pp = s * r;
                d[i + 1] = g + pp;
                g = c * r - b;
            }
            if broke {
                continue;
            }
            d[l] -= pp;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// spectral gaps

/// Exact spectral quantities of a chain.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    /// spectral gap 1 - lambda_2 (reversible chains only)
    pub gamma: Option<f64>,
    /// absolute spectral gap 1 - max(|lambda|) over non-unit eigenvalues
    /// (reversible chains only)
    pub gamma_star: Option<f64>,
    /// pseudo spectral gap max_k gamma((P*)^k P^k) / k over k <= kmax
    pub gamma_ps: f64,
    pub gamma_ps_per_k: Vec<(usize, f64)>,
}

/// The symmetrized operator `D^{1/2} P D^{-1/2}`; similar to `P` and
/// symmetric exactly when the chain is reversible.
fn symmetrize(chain: &ChainSpec) -> Result<Array2<f64>> {
    let n = chain.len();
    let pi = chain.pi();
    for x in 0..n {
        if pi.get(x) <= 0.0 {
            return Err(RicciError::ZeroMass { state: x });
        }
    }
    let p = chain.kernel().matrix();
    let mut s = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = (pi.get(i) / pi.get(j)).sqrt() * p[(i, j)];
        }
    }
    Ok(s)
}

/// Computes gamma and gamma* (reversible case) and the pseudo spectral gap
/// over k <= `kmax` from eigenvalues of the pi-symmetrizations.
pub fn exact_gaps(chain: &ChainSpec, kmax: usize) -> Result<OracleReport> {
    let n = chain.len();
    if n > ORACLE_STATE_CAP {
        return Err(RicciError::TooLarge {
            states: n,
            cap: ORACLE_STATE_CAP,
        });
    }
    let s = symmetrize(chain)?;
    let (gamma, gamma_star) = if chain.reversible() {
        let eig = symmetric_eigenvalues(&s)?;
        let top = eig[n - 1];
        if (top - 1.0).abs() > 1e-8 {
            return Err(RicciError::InvalidInput(format!(
                "largest eigenvalue {top} is not 1"
            )));
        }
        if n == 1 {
            (Some(1.0), Some(1.0))
        } else {
            let second = eig[n - 2];
            // eigenvalue 1 with multiplicity > 1 forces both gaps to 0
            if second >= 1.0 - 1e-12 {
                (Some(0.0), Some(0.0))
            } else {
                let bottom = eig[0];
                (
                    Some(1.0 - second),
                    Some(1.0 - second.abs().max(bottom.abs())),
                )
            }
        }
    } else {
        (None, None)
    };

    let mut gamma_ps = 0.0f64;
    let mut per_k = Vec::with_capacity(kmax);
    let mut sk = Array2::<f64>::eye(n);
    for k in 1..=kmax {
        sk = sk.dot(&s);
        let m = sk.t().dot(&sk);
        let eig = symmetric_eigenvalues(&m)?;
        let top = eig[n - 1];
        if (top - 1.0).abs() > 1e-8 {
            return Err(RicciError::InvalidInput(format!(
                "multiplicative reversibilization at k = {k} has top eigenvalue {top}"
            )));
        }
        let gap = if n == 1 {
            1.0
        } else if eig[n - 2] >= 1.0 - 1e-12 {
            0.0
        } else {
            1.0 - eig[n - 2]
        };
        per_k.push((k, gap / k as f64));
        gamma_ps = gamma_ps.max(gap / k as f64);
    }
    Ok(OracleReport {
        gamma,
        gamma_star,
        gamma_ps,
        gamma_ps_per_k: per_k,
    })
}

// ---------------------------------------------------------------------------
// certified power iteration (for instances beyond the dense cap)

/// Compressed sparse rows, for iterative oracles on kernels too large to
/// handle densely.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_rows(n: usize, rows: impl Iterator<Item = Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (j, v) in row {
                if v != 0.0 {
                    cols.push(j as u32);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        assert_eq!(row_ptr.len(), n + 1);
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn from_dense(m: &Array2<f64>, threshold: f64) -> Self {
        let n = m.nrows();
        Self::from_rows(
            n,
            (0..n).map(|i| {
                m.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.abs() > threshold)
                    .map(|(j, &v)| (j, v))
                    .collect()
            }),
        )
    }

    /// `y = M x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[i] = acc;
        }
    }

    /// `y = x M` (left action of a row vector).
    pub fn apply_left(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.cols[k] as usize] += xi * self.vals[k];
            }
        }
    }
}

/// Result of a power-iteration eigenvalue estimate with its residual
/// certificate: some eigenvalue lies within `residual` of `value`. Iteration
/// stops when the residual reaches `tol` or the Rayleigh quotient drift
/// plateaus (clustered eigenvalues keep the residual high long after the
/// value has settled inside the cluster).
#[derive(Debug, Clone, Copy)]
pub struct PowerEstimate {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Largest eigenvalue of a symmetric operator restricted to the complement
/// of a known top eigenvector, via power iteration on the shifted operator
/// `(A + I)/2` (which maps eigenvalues monotonically into [0, 1] for
/// stochastic symmetrizations).
///
/// `apply` computes `y = A x`; `top` must be the normalized eigenvector for
/// the known top eigenvalue.
pub fn second_eigenvalue_symmetric(
    apply: &dyn Fn(&[f64], &mut [f64]),
    n: usize,
    top: &[f64],
    max_iters: usize,
    tol: f64,
) -> PowerEstimate {
    let rng = crate::mcmc::CounterRng::new(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|i| rng.uniform(7, i as u64) - 0.5).collect();
    let mut w = vec![0.0f64; n];
    deflate(&mut v, top);
    normalize(&mut v);
    let mut prev = f64::INFINITY;
    let mut value = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        // one operator application serves both the Rayleigh estimate and the
        // shifted power step (A v + v)/2
        apply(&v, &mut w);
        let rq: f64 = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
        let mut res2 = 0.0;
        for i in 0..n {
            let r = w[i] - rq * v[i];
            res2 += r * r;
        }
        residual = res2.sqrt();
        value = rq;
        let drift = (value - prev).abs();
        if residual <= tol || drift <= 5e-12 * value.abs().max(1.0) {
            break;
        }
        prev = value;
        for i in 0..n {
            w[i] = 0.5 * (w[i] + v[i]);
        }
        deflate(&mut w, top);
        normalize(&mut w);
        std::mem::swap(&mut v, &mut w);
    }
    PowerEstimate {
        value,
        residual,
        iterations,
    }
}

/// Smallest eigenvalue of a symmetric operator (no deflation needed when the
/// bottom of the spectrum is separated from the stochastic top), via power
/// iteration on `(I - A)/2`.
pub fn smallest_eigenvalue_symmetric(
    apply: &dyn Fn(&[f64], &mut [f64]),
    n: usize,
    max_iters: usize,
    tol: f64,
) -> PowerEstimate {
    let rng = crate::mcmc::CounterRng::new(0xbeef);
    let mut v: Vec<f64> = (0..n).map(|i| rng.uniform(11, i as u64) - 0.5).collect();
    let mut w = vec![0.0f64; n];
    normalize(&mut v);
    let mut prev = f64::INFINITY;
    let mut value = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        apply(&v, &mut w);
        let rq: f64 = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
        let mut res2 = 0.0;
        for i in 0..n {
            let r = w[i] - rq * v[i];
            res2 += r * r;
        }
        residual = res2.sqrt();
        value = rq;
        let drift = (value - prev).abs();
        if residual <= tol || drift <= 5e-12 * value.abs().max(1.0) {
            break;
        }
        prev = value;
        for i in 0..n {
            w[i] = 0.5 * (v[i] - w[i]);
        }
        normalize(&mut w);
        std::mem::swap(&mut v, &mut w);
    }
    PowerEstimate {
        value,
        residual,
        iterations,
    }
}

fn deflate(v: &mut [f64], top: &[f64]) {
    let dot: f64 = v.iter().zip(top.iter()).map(|(a, b)| a * b).sum();
    for (vi, ti) in v.iter_mut().zip(top.iter()) {
        *vi -= dot * ti;
    }
}

fn normalize(v: &mut [f64]) {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

// ---------------------------------------------------------------------------
// exact mixing times

/// Exact `t_mix(eps)` for each requested eps: the first t at which
/// `max_x TV(P^t_x, pi)` over the chosen starting states drops to eps.
///
/// `starts = None` scans every state. Restricting the starts is exact when
/// they hit every orbit of a symmetry of the kernel (the caller certifies
/// that). Results are returned in the order of `eps_list`.
pub fn exact_mixing(
    chain: &ChainSpec,
    eps_list: &[f64],
    starts: Option<&[usize]>,
    t_cap: usize,
) -> Result<Vec<(f64, usize)>> {
    let n = chain.len();
    if n > ORACLE_STATE_CAP {
        return Err(RicciError::TooLarge {
            states: n,
            cap: ORACLE_STATE_CAP,
        });
    }
    let default_starts: Vec<usize>;
    let starts = match starts {
        Some(s) => s,
        None => {
            default_starts = (0..n).collect();
            &default_starts
        }
    };
    let p = chain.kernel().matrix();
    let pi = chain.pi();
    let mut rows = Array2::<f64>::zeros((starts.len(), n));
    for (r, &x) in starts.iter().enumerate() {
        rows[(r, x)] = 1.0;
    }
    let mut remaining: Vec<(usize, f64)> = eps_list.iter().copied().enumerate().
        map(|(i, e)| (i, e)).collect();
    let mut out = vec![(0.0, 0usize); eps_list.len()];
    for t in 0..=t_cap {
        let d_t = (0..starts.len())
            .map(|r| {
                0.5 * (0..n)
                    .map(|y| (rows[(r, y)] - pi.get(y)).abs())
                    .sum::<f64>()
            })
            .fold(0.0f64, f64::max);
        remaining.retain(|&(i, eps)| {
            if d_t <= eps {
                out[i] = (eps, t);
                false
            } else {
                true
            }
        });
        if remaining.is_empty() {
            return Ok(out);
        }
        rows = rows.dot(p);
    }
    Err(RicciError::Unbounded { horizon: t_cap })
}

/// Sparse analogue of [`exact_mixing`] for operators given as a left-action
/// closure (`y = x P`).
pub fn exact_mixing_sparse(
    apply_left: &dyn Fn(&[f64], &mut [f64]),
    n: usize,
    pi: &[f64],
    starts: &[usize],
    eps_list: &[f64],
    t_cap: usize,
) -> Result<Vec<(f64, usize)>> {
    let mut rows: Vec<Vec<f64>> = starts
        .iter()
        .map(|&x| {
            let mut v = vec![0.0; n];
            v[x] = 1.0;
            v
        })
        .collect();
    let mut scratch = vec![0.0f64; n];
    let mut remaining: Vec<(usize, f64)> =
        eps_list.iter().copied().enumerate().map(|(i, e)| (i, e)).collect();
    let mut out = vec![(0.0, 0usize); eps_list.len()];
    for t in 0..=t_cap {
        let d_t = rows
            .iter()
            .map(|row| {
                0.5 * row
                    .iter()
                    .zip(pi.iter())
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>()
            })
            .fold(0.0f64, f64::max);
        remaining.retain(|&(i, eps)| {
            if d_t <= eps {
                out[i] = (eps, t);
                false
            } else {
                true
            }
        });
        if remaining.is_empty() {
            return Ok(out);
        }
        for row in rows.iter_mut() {
            apply_left(row, &mut scratch);
            row.copy_from_slice(&scratch);
        }
    }
    Err(RicciError::Unbounded { horizon: t_cap })
}

// ---------------------------------------------------------------------------
// transport brute force (dense-tableau simplex)

/// Exact transportation cost by a two-phase dense simplex with Bland's rule.
/// Independent of the min-cost-flow path; intended for supports up to a
/// dozen points.
pub fn w1_bruteforce(mu: &[f64], nu: &[f64], dist: &Array2<f64>) -> Result<f64> {
    let m: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] > 0.0).collect();
    let n: Vec<usize> = (0..nu.len()).filter(|&j| nu[j] > 0.0).collect();
    if m.len() > 16 || n.len() > 16 {
        return Err(RicciError::TooLarge {
            states: m.len().max(n.len()),
            cap: 16,
        });
    }
    let rows = m.len() + n.len() - 1; // last column constraint is implied
    let vars = m.len() * n.len();
    let mut a = Array2::<f64>::zeros((rows, vars));
    let mut b = vec![0.0f64; rows];
    let mut c = vec![0.0f64; vars];
    for (ii, &i) in m.iter().enumerate() {
        for (jj, &j) in n.iter().enumerate() {
            let v = ii * n.len() + jj;
            c[v] = dist[(i, j)];
            a[(ii, v)] = 1.0;
            if jj + 1 < n.len() {
                a[(m.len() + jj, v)] = 1.0;
            }
        }
        b[ii] = mu[i];
    }
    for (jj, &j) in n.iter().enumerate().take(n.len() - 1) {
        b[m.len() + jj] = nu[j];
    }
    simplex_min(&c, &a, &b).ok_or_else(|| {
        RicciError::InvalidInput("transportation simplex did not converge".into())
    })
}

/// Two-phase primal simplex, Bland's rule throughout; returns the optimal
/// objective for min c'x subject to Ax = b, x >= 0 (b >= 0).
fn simplex_min(c: &[f64], a: &Array2<f64>, b: &[f64]) -> Option<f64> {
    const TOL: f64 = 1e-11;
    let rows = a.nrows();
    let vars = a.ncols();
    let total = vars + rows; // artificials appended
    let mut t = Array2::<f64>::zeros((rows, total + 1));
    for r in 0..rows {
        for v in 0..vars {
            t[(r, v)] = a[(r, v)];
        }
        t[(r, vars + r)] = 1.0;
        t[(r, total)] = b[r];
    }
    let mut basis: Vec<usize> = (vars..total).collect();

    let run_phase = |t: &mut Array2<f64>, basis: &mut Vec<usize>, cost: &dyn Fn(usize) -> f64, allowed: usize| -> Option<()> {
        for _ in 0..50_000 {
            // reduced costs from the basis
            let cb: Vec<f64> = basis.iter().map(|&v| cost(v)).collect();
            let mut entering = None;
            for v in 0..allowed {
                if basis.contains(&v) {
                    continue;
                }
                let mut red = cost(v);
                for r in 0..rows {
                    red -= cb[r] * t[(r, v)];
                }
                if red < -TOL {
                    entering = Some(v); // Bland: first improving index
                    break;
                }
            }
            let Some(v_in) = entering else {
                return Some(());
            };
            // ratio test with Bland's tie-break (smallest basis variable)
            let mut leave: Option<(f64, usize, usize)> = None;
            for r in 0..rows {
                if t[(r, v_in)] > TOL {
                    let ratio = t[(r, total)] / t[(r, v_in)];
                    match leave {
                        None => leave = Some((ratio, basis[r], r)),
                        Some((best, bvar, _)) => {
                            if ratio < best - TOL
                                || (ratio < best + TOL && basis[r] < bvar)
                            {
                                leave = Some((ratio, basis[r], r));
                            }
                        }
                    }
                }
            }
            let (_, _, r_out) = leave?;
            // pivot
            let piv = t[(r_out, v_in)];
            for v in 0..=total {
                t[(r_out, v)] /= piv;
            }
            for r in 0..rows {
                if r != r_out {
                    let f = t[(r, v_in)];
                    if f != 0.0 {
                        for v in 0..=total {
                            t[(r, v)] -= f * t[(r_out, v)];
                        }
                    }
                }
            }
            basis[r_out] = v_in;
        }
        None
    };

    // Phase 1: drive artificials to zero.
    let phase1_cost = |v: usize| if v >= vars { 1.0 } else { 0.0 };
    run_phase(&mut t, &mut basis, &phase1_cost, total)?;
    let obj1: f64 = basis
        .iter()
        .enumerate()
        .map(|(r, &v)| phase1_cost(v) * t[(r, total)])
        .sum();
    if obj1 > 1e-8 {
        return None; // infeasible
    }
    // Phase 2 over the original variables only (artificial basics, if any,
    // sit at zero and stay there because their columns are excluded).
    let phase2_cost = |v: usize| if v < vars { c[v] } else { 0.0 };
    run_phase(&mut t, &mut basis, &phase2_cost, vars)?;
    let obj: f64 = basis
        .iter()
        .enumerate()
        .map(|(r, &v)| phase2_cost(v) * t[(r, total)])
        .sum();
    Some(obj)
}

// ---------------------------------------------------------------------------
// exhaustive moments

/// Exact stationary variance of an observable by enumeration.
pub fn exact_variance(chain: &ChainSpec, f: &[f64]) -> f64 {
    let pi = chain.pi();
    let mean: f64 = f.iter().enumerate().map(|(x, v)| pi.get(x) * v).sum();
    f.iter()
        .enumerate()
        .map(|(x, v)| pi.get(x) * (v - mean) * (v - mean))
        .sum()
}

/// Exact stationary central moment of even order `2p`.
pub fn exact_central_moment(chain: &ChainSpec, f: &[f64], two_p: u32) -> f64 {
    let pi = chain.pi();
    let mean: f64 = f.iter().enumerate().map(|(x, v)| pi.get(x) * v).sum();
    f.iter()
        .enumerate()
        .map(|(x, v)| pi.get(x) * (v - mean).powi(two_p as i32))
        .sum()
}

/// Exact stationary tail `P_pi(|f - E f| >= t)`.
pub fn exact_tail(chain: &ChainSpec, f: &[f64], t: f64) -> f64 {
    let pi = chain.pi();
    let mean: f64 = f.iter().enumerate().map(|(x, v)| pi.get(x) * v).sum();
    f.iter()
        .enumerate()
        .filter(|(_, v)| (**v - mean).abs() >= t)
        .map(|(x, _)| pi.get(x))
        .sum()
}

// ---------------------------------------------------------------------------
// certification

/// Which way a claim must sit relative to its oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// the bound must not exceed the oracle (lower bounds on a true value)
    LowerBound,
    /// the bound must not fall below the oracle (upper bounds)
    UpperBound,
}

/// One bound-vs-oracle comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub name: String,
    pub bound: f64,
    pub oracle: f64,
    pub direction: Direction,
}

impl Claim {
    pub fn lower(name: impl Into<String>, bound: f64, oracle: f64) -> Self {
        Self {
            name: name.into(),
            bound,
            oracle,
            direction: Direction::LowerBound,
        }
    }

    pub fn upper(name: impl Into<String>, bound: f64, oracle: f64) -> Self {
        Self {
            name: name.into(),
            bound,
            oracle,
            direction: Direction::UpperBound,
        }
    }
}

/// A judged claim; `slack = oracle - bound`.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub claim: Claim,
    pub slack: f64,
    pub pass: bool,
}

/// Pass/fail table over a list of claims, with 1e-9 slack.
#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub verdicts: Vec<Verdict>,
    pub passed: usize,
    pub failed: usize,
}

pub const CERTIFY_SLACK: f64 = 1e-9;

/// Judges every claim against its oracle with the stated direction.
pub fn certify(claims: Vec<Claim>) -> CertificationReport {
    let verdicts: Vec<Verdict> = claims
        .into_iter()
        .map(|claim| {
            let slack = claim.oracle - claim.bound;
            let pass = match claim.direction {
                Direction::LowerBound => slack >= -CERTIFY_SLACK,
                Direction::UpperBound => slack <= CERTIFY_SLACK,
            };
            Verdict { claim, slack, pass }
        })
        .collect();
    let passed = verdicts.iter().filter(|v| v.pass).count();
    let failed = verdicts.len() - passed;
    CertificationReport {
        verdicts,
        passed,
        failed,
    }
}

impl CertificationReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("claim,direction,bound,oracle,slack,pass\n");
        for v in &self.verdicts {
            out.push_str(&format!(
                "{},{:?},{},{},{},{}\n",
                v.claim.name, v.claim.direction, v.claim.bound, v.claim.oracle, v.slack, v.pass
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

// ---------------------------------------------------------------------------

/// Samples the stationary distribution `count` times with the counter RNG
/// and reports the empirical tail of `|f - E_pi f| >= t` with its standard
/// error, for each requested t.
pub fn empirical_stationary_tail(
    chain: &ChainSpec,
    f: &[f64],
    ts: &[f64],
    count: usize,
    seed: u64,
) -> Vec<(f64, f64, f64)> {
    let pi = chain.pi();
    let mean: f64 = f.iter().enumerate().map(|(x, v)| pi.get(x) * v).sum();
    let mut cum = Vec::with_capacity(chain.len());
    let mut acc = 0.0;
    for x in 0..chain.len() {
        acc += pi.get(x);
        cum.push(acc);
    }
    if let Some(last) = cum.last_mut() {
        *last = 1.0;
    }
    let rng = crate::mcmc::CounterRng::new(seed);
    let mut hits = vec![0usize; ts.len()];
    for i in 0..count {
        let u = rng.uniform(0, i as u64);
        let x = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
        let dev = (f[x] - mean).abs();
        for (j, &t) in ts.iter().enumerate() {
            if dev >= t {
                hits[j] += 1;
            }
        }
    }
    ts.iter()
        .enumerate()
        .map(|(j, &t)| {
            let p = hits[j] as f64 / count as f64;
            (t, p, (p * (1.0 - p) / count as f64).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;
    use ndarray::array;

    #[test]
    fn eigenvalues_of_small_symmetric_matrices() {
        let a = array![[2.0, 0.0], [0.0, -1.0]];
        let eig = symmetric_eigenvalues(&a).unwrap();
        assert!((eig[0] + 1.0).abs() < 1e-12);
        assert!((eig[1] - 2.0).abs() < 1e-12);

        // 3x3 with known spectrum {0, 1, 3}
        let b = array![[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        let eig = symmetric_eigenvalues(&b).unwrap();
        let sqrt2 = 2.0f64.sqrt();
        let expect = [2.0 - sqrt2, 2.0, 2.0 + sqrt2];
        for (got, want) in eig.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn eigenvalues_of_lazy_hypercube_walk() {
        // beta = 0 random scan on n sites: spectrum {1 - k/n} with
        // multiplicity C(n, k).
        let chain = zoo::curie_weiss_chain(4, 0.0, 0.0, zoo::Scan::Random).unwrap();
        let s = symmetrize(&chain).unwrap();
        let eig = symmetric_eigenvalues(&s).unwrap();
        let mut expect = Vec::new();
        for k in 0..=4u32 {
            let mult = [1, 4, 6, 4, 1][k as usize];
            for _ in 0..mult {
                expect.push(1.0 - k as f64 / 4.0);
            }
        }
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(eig.len(), expect.len());
        for (got, want) in eig.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn gaps_of_two_state_chain() {
        let c = zoo::two_state_chain(0.25, 0.25).unwrap();
        let r = exact_gaps(&c, 3).unwrap();
        assert!((r.gamma.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.gamma_star.unwrap() - 0.5).abs() < 1e-12);
        // gamma_ps for the symmetric two-state chain: gap((P^2)^k)/k
        assert!(r.gamma_ps > 0.0);
    }

    #[test]
    fn gaps_of_periodic_two_cycle() {
        use crate::markov::{ChainSpec, Distribution, MarkovKernel};
        use crate::space::FiniteMetricSpace;
        use std::sync::Arc;

        let space = Arc::new(
            FiniteMetricSpace::from_matrix(array![[0.0, 1.0], [1.0, 0.0]]).unwrap(),
        );
        let p = array![[0.0, 1.0], [1.0, 0.0]];
        let kernel = MarkovKernel::new(space, p).unwrap();
        let chain = ChainSpec::new(
            kernel,
            Some(Distribution::from_vec(vec![0.5, 0.5]).unwrap()),
        )
        .unwrap();
        let r = exact_gaps(&chain, 2).unwrap();
        // eigenvalues {1, -1}: gamma = 2, gamma* = 0
        assert!((r.gamma.unwrap() - 2.0).abs() < 1e-12);
        assert!(r.gamma_star.unwrap().abs() < 1e-12);
        // (P*)^k P^k = identity: pseudo gap 0
        assert!(r.gamma_ps.abs() < 1e-12);
    }

    #[test]
    fn mixing_times_two_state() {
        let c = zoo::two_state_chain(0.25, 0.25).unwrap();
        let t = exact_mixing(&c, &[0.25, 0.125, 1.0], None, 1000).unwrap();
        assert_eq!(t[0], (0.25, 1));
        assert_eq!(t[1], (0.125, 2));
        assert_eq!(t[2], (1.0, 0));
    }

    #[test]
    fn mixing_is_monotone_in_eps() {
        let c = zoo::two_state_chain(0.3, 0.1).unwrap();
        let eps = [0.5, 0.25, 0.125, 0.0625];
        let t = exact_mixing(&c, &eps, None, 10_000).unwrap();
        for w in t.windows(2) {
            assert!(w[0].1 <= w[1].1);
        }
    }

    #[test]
    fn bruteforce_matches_flow_on_three_points() {
        let dist = array![[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]];
        let mu = [1.0, 0.0, 0.0];
        let nu = [0.0, 0.5, 0.5];
        let lp = w1_bruteforce(&mu, &nu, &dist).unwrap();
        assert!((lp - 1.5).abs() < 1e-10);
    }

    #[test]
    fn power_iteration_agrees_with_dense_eigensolver() {
        let c = zoo::curie_weiss_chain(5, 0.4, 0.0, zoo::Scan::Random).unwrap();
        let s = symmetrize(&c).unwrap();
        let n = c.len();
        let eig = symmetric_eigenvalues(&s).unwrap();
        let pi = c.pi();
        let top: Vec<f64> = (0..n).map(|x| pi.get(x).sqrt()).collect();
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                y[i] = (0..n).map(|j| s[(i, j)] * x[j]).sum();
            }
        };
        let est = second_eigenvalue_symmetric(&apply, n, &top, 200_000, 1e-11);
        assert!(
            (est.value - eig[n - 2]).abs() < 1e-8,
            "power {} vs dense {}",
            est.value,
            eig[n - 2]
        );
        let low = smallest_eigenvalue_symmetric(&apply, n, 200_000, 1e-11);
        assert!((low.value - eig[0]).abs() < 1e-8);
    }

    #[test]
    fn certify_directions_and_exit_logic() {
        let report = certify(vec![
            Claim::lower("valid lower", 0.4, 0.5),
            Claim::upper("valid upper", 0.7, 0.5),
            Claim::lower("inflated", 0.5 + 1e-6, 0.5),
        ]);
        assert_eq!(report.passed, 2);
        assert_eq!(report.failed, 1);
        assert!(!report.all_pass());
        let empty = certify(Vec::new());
        assert!(empty.all_pass());
        assert_eq!(empty.verdicts.len(), 0);
    }

    #[test]
    fn exhaustive_moments_two_state() {
        let c = zoo::two_state_chain(0.25, 0.25).unwrap();
        let f = [0.0, 1.0];
        assert!((exact_variance(&c, &f) - 0.25).abs() < 1e-15);
        assert!((exact_central_moment(&c, &f, 4) - 1.0 / 16.0).abs() < 1e-15);
        assert!((exact_tail(&c, &f, 0.5) - 1.0).abs() < 1e-15);
        assert!(exact_tail(&c, &f, 0.6) == 0.0);
    }
}
