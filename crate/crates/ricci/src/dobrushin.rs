//! Dobrushin interdependence matrices for binary spin systems, the Glauber
//! random/systemic scan curvature bounds they imply, and the Curie-Weiss and
//! 1D Ising closed forms.

use ndarray::{Array1, Array2};

use crate::error::{Result, RicciError};
use crate::linalg::{max_column_sum, max_row_sum, spectral_radius_nonneg};

/// Site cap for exact Dobrushin enumeration (2^n configurations scanned).
pub const EXACT_SITE_CAP: usize = 20;

/// A binary spin system given by its heat-bath conditionals. Configurations
/// are bitmasks with a set bit meaning spin +1.
pub trait BinarySpinModel: Sync {
    fn sites(&self) -> usize;

    /// Probability that `site` resamples to +1 given the rest of `cfg`
    /// (the current value of `site` in `cfg` is ignored).
    fn conditional_plus(&self, cfg: u32, site: usize) -> f64;

    /// Hamiltonian, defining the Gibbs measure `pi ~ exp(H)`.
    fn hamiltonian(&self, cfg: u32) -> f64;

    /// Closed-form interdependence matrix when the model has one.
    fn analytic_dobrushin(&self) -> Option<Array2<f64>> {
        None
    }
}

/// Mean-field model: `H = beta/n * sum_{i<j} w_i w_j + h * sum_i w_i`.
#[derive(Debug, Clone, Copy)]
pub struct CurieWeissModel {
    pub n: usize,
    pub beta: f64,
    pub h: f64,
}

impl CurieWeissModel {
    fn spin_sum(cfg: u32, n: usize) -> f64 {
        let ones = (cfg & ((1u32 << n) - 1)).count_ones() as f64;
        2.0 * ones - n as f64
    }
}

impl BinarySpinModel for CurieWeissModel {
    fn sites(&self) -> usize {
        self.n
    }

    fn conditional_plus(&self, cfg: u32, site: usize) -> f64 {
        let spin = if cfg & (1 << site) != 0 { 1.0 } else { -1.0 };
        let rest = Self::spin_sum(cfg, self.n) - spin;
        let delta = 2.0 * (self.beta / self.n as f64 * rest + self.h);
        1.0 / (1.0 + (-delta).exp())
    }

    fn hamiltonian(&self, cfg: u32) -> f64 {
        let s = Self::spin_sum(cfg, self.n);
        self.beta / self.n as f64 * (s * s - self.n as f64) / 2.0 + self.h * s
    }

    fn analytic_dobrushin(&self) -> Option<Array2<f64>> {
        let n = self.n;
        let x = self.beta / n as f64;
        let mut a = Array2::from_elem((n, n), x);
        for i in 0..n {
            a[(i, i)] = 0.0;
        }
        Some(a)
    }
}

/// Boundary convention for the 1D Ising chain.
///
/// The conditional-probability table (a spin given `m` of its two neighbours
/// up) presumes every site has exactly two neighbours. `Pinned` realizes
/// that on a path by fixing a phantom spin of -1 beyond each end, which is
/// the convention whose tight interdependence matrix is exactly the
/// tridiagonal `rho - 1/2` band. `Free` drops the phantom spins (end sites
/// then have the larger sensitivity `tanh beta`); `Periodic` closes the
/// ring (the band wraps around).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsingBoundary {
    #[default]
    Pinned,
    Free,
    Periodic,
}

/// Nearest-neighbour chain with coupling `beta` per bond (the convention the
/// conditional probabilities use) and `h` external field.
#[derive(Debug, Clone, Copy)]
pub struct Ising1dModel {
    pub n: usize,
    pub beta: f64,
    pub h: f64,
    pub boundary: IsingBoundary,
}

impl Ising1dModel {
    /// Sum of the two neighbouring spins seen by `site` (phantom spins count
    /// as -1 under the pinned convention).
    fn neighbour_sum(&self, cfg: u32, site: usize) -> f64 {
        let spin = |s: usize| if cfg & (1 << s) != 0 { 1.0 } else { -1.0 };
        let n = self.n;
        match self.boundary {
            IsingBoundary::Periodic => spin((site + n - 1) % n) + spin((site + 1) % n),
            IsingBoundary::Free => {
                let mut total = 0.0;
                if site > 0 {
                    total += spin(site - 1);
                }
                if site + 1 < n {
                    total += spin(site + 1);
                }
                total
            }
            IsingBoundary::Pinned => {
                let left = if site > 0 { spin(site - 1) } else { -1.0 };
                let right = if site + 1 < n { spin(site + 1) } else { -1.0 };
                left + right
            }
        }
    }
}

impl BinarySpinModel for Ising1dModel {
    fn sites(&self) -> usize {
        self.n
    }

    fn conditional_plus(&self, cfg: u32, site: usize) -> f64 {
        let field = self.h + self.beta * self.neighbour_sum(cfg, site);
        1.0 / (1.0 + (-2.0 * field).exp())
    }

    fn hamiltonian(&self, cfg: u32) -> f64 {
        let spin = |s: usize| if cfg & (1 << s) != 0 { 1.0 } else { -1.0 };
        let mut h = 0.0;
        for i in 0..(self.n - 1) {
            h += self.beta * spin(i) * spin(i + 1);
        }
        match self.boundary {
            IsingBoundary::Periodic => h += self.beta * spin(self.n - 1) * spin(0),
            IsingBoundary::Pinned => h += self.beta * (-spin(0) - spin(self.n - 1)),
            IsingBoundary::Free => {}
        }
        h + self.h * (0..self.n).map(spin).sum::<f64>()
    }

    fn analytic_dobrushin(&self) -> Option<Array2<f64>> {
        let n = self.n;
        let rho = 1.0 / (1.0 + (-4.0 * self.beta).exp());
        let entry = if self.h == 0.0 {
            rho - 0.5
        } else if self.h < 0.0 {
            1.0 / (1.0 + (-4.0 * self.beta - 2.0 * self.h).exp())
                - 1.0 / (1.0 + (-2.0 * self.h).exp())
        } else {
            1.0 / (1.0 + (-2.0 * self.h).exp())
                - 1.0 / (1.0 + (4.0 * self.beta - 2.0 * self.h).exp())
        };
        let mut a = Array2::zeros((n, n));
        match self.boundary {
            IsingBoundary::Pinned => {
                for i in 0..n {
                    if i > 0 {
                        a[(i, i - 1)] = entry;
                    }
                    if i + 1 < n {
                        a[(i, i + 1)] = entry;
                    }
                }
            }
            IsingBoundary::Periodic => {
                for i in 0..n {
                    a[(i, (i + n - 1) % n)] = entry;
                    a[(i, (i + 1) % n)] = entry;
                }
            }
            // free ends have a different (larger) sensitivity; enumerate
            IsingBoundary::Free => return None,
        }
        Some(a)
    }
}

/// Interdependence matrix with the norms and scan matrices the bounds use.
#[derive(Debug, Clone)]
pub struct DobrushinData {
    pub a: Array2<f64>,
    /// max column sum (the norm the systemic-scan proof uses)
    pub norm1: f64,
    /// max row sum, reported for sensitivity checks
    pub norm1_row: f64,
    pub spectral_radius: f64,
    /// systemic-scan matrix B = B_n ... B_1
    pub b: Array2<f64>,
    /// whether the Dobrushin condition holds in the column reading
    pub dobrushin_condition: bool,
}

impl DobrushinData {
    pub fn from_matrix(a: Array2<f64>) -> Self {
        let norm1 = max_column_sum(&a);
        let norm1_row = max_row_sum(&a);
        let spectral_radius = spectral_radius_nonneg(&a, 1e-12);
        let b = systemic_scan_matrix(&a);
        Self {
            dobrushin_condition: norm1 < 1.0,
            a,
            norm1,
            norm1_row,
            spectral_radius,
            b,
        }
    }
}

/// Estimates the interdependence matrix of a binary spin model.
///
/// In exact mode the tight `a_ij` is the maximum over configurations,
/// differing only at `j`, of the change in the conditional law of site `i`
/// (Bernoulli W1 under the discrete spin metric). The non-exact mode returns
/// the model's closed-form matrix.
pub fn estimate_dobrushin(model: &dyn BinarySpinModel, exact: bool) -> Result<DobrushinData> {
    let n = model.sites();
    if !exact {
        let a = model.analytic_dobrushin().ok_or_else(|| {
            RicciError::InvalidInput("model has no closed-form Dobrushin matrix".into())
        })?;
        return Ok(DobrushinData::from_matrix(a));
    }
    if n > EXACT_SITE_CAP {
        return Err(RicciError::TooLarge {
            states: n,
            cap: EXACT_SITE_CAP,
        });
    }
    let mut a = Array2::zeros((n, n));
    let total = 1u32 << n;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let bit = 1u32 << j;
            let mut worst = 0.0f64;
            for cfg in 0..total {
                if cfg & bit == 0 {
                    continue;
                }
                let up = model.conditional_plus(cfg, i);
                let down = model.conditional_plus(cfg ^ bit, i);
                worst = worst.max((up - down).abs());
            }
            a[(i, j)] = worst;
        }
    }
    Ok(DobrushinData::from_matrix(a))
}

/// Curvature and gap bounds for the random-scan Glauber chain.
#[derive(Debug, Clone, Copy)]
pub struct RandomScanBound {
    pub k: usize,
    /// kappa_k >= 1 - ||((n-1)/n I + A/n)^k||_1
    pub kappa_lower: f64,
    /// gamma* >= (1 - sp(A)) / n
    pub gap_lower: f64,
}

/// `kappa_k >= 1 - ||((n-1)/n I + A/n)^k||_1` plus the spectral-radius gap
/// bound for the random-scan chain driven by `a`.
pub fn random_scan_bound(a: &Array2<f64>, k: usize) -> Result<RandomScanBound> {
    if k < 1 {
        return Err(RicciError::InvalidInput("k must be >= 1".into()));
    }
    let n = a.nrows();
    let nf = n as f64;
    let mut m = a.mapv(|v| v / nf);
    for i in 0..n {
        m[(i, i)] += (nf - 1.0) / nf;
    }
    let mut power = Array2::<f64>::eye(n);
    for _ in 0..k {
        power = power.dot(&m);
    }
    let kappa_lower = 1.0 - max_column_sum(&power);
    let gap_lower = (1.0 - spectral_radius_nonneg(a, 1e-12)) / nf;
    Ok(RandomScanBound {
        k,
        kappa_lower,
        gap_lower,
    })
}

/// Builds `B = B_n ... B_1` where `B_i` is the identity with row `i`
/// replaced by row `i` of `A`.
pub fn systemic_scan_matrix(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut b = Array2::<f64>::eye(n);
    // Left-multiplying by B_i replaces row i of the accumulator with
    // (row i of A) * accumulator.
    for i in 0..n {
        let new_row: Array1<f64> = a.row(i).dot(&b);
        b.row_mut(i).assign(&new_row);
    }
    b
}

/// `kappa_k >= 1 - ||B^k||_1` for the systemic-scan chain.
pub fn systemic_scan_kappa_lower(b: &Array2<f64>, k: usize) -> f64 {
    let n = b.nrows();
    let mut power = Array2::<f64>::eye(n);
    for _ in 0..k {
        power = power.dot(b);
    }
    1.0 - max_column_sum(&power)
}

/// Closed forms for the Curie-Weiss Glauber chains, with the numerical
/// verifications of the B-matrix structure.
#[derive(Debug, Clone)]
pub struct CurieWeissReport {
    pub n: usize,
    pub beta: f64,
    pub x: f64,
    /// kappa(random scan) >= (1 - beta (n-1)/n) / n
    pub kappa_rand_lower: f64,
    /// kappa(systemic scan) >= 2 - e^beta
    pub kappa_sys_lower: f64,
    /// kappa_k(systemic scan) >= 1 - beta e^beta (beta (n-1)/n)^(k-1)
    pub kappa_sys_k_lower: Vec<f64>,
    /// gamma_ps(systemic scan) >= (1 - beta (n-1)/n) / 4
    pub gamma_ps_lower: f64,
    /// ||B||_1 from the finite-n closed form (1+x)^n - 1 - x
    pub b_norm1_closed: f64,
    /// ||B||_1 computed from the materialized matrix
    pub b_norm1_numeric: f64,
    /// worst deviation of B entries from the displayed formulas
    pub b_entry_max_err: f64,
    /// worst violation of (v B)_i <= v_i beta (n-1)/n
    pub v_lemma_max_violation: f64,
}

/// Evaluates the Curie-Weiss closed forms at `(n, beta)` and verifies the
/// B-matrix entry formulas and the v-vector contraction lemma numerically.
pub fn curie_weiss_closed_forms(n: usize, beta: f64) -> Result<CurieWeissReport> {
    if n < 2 || beta <= 0.0 {
        return Err(RicciError::InvalidInput(format!(
            "need n >= 2 and beta > 0 (got n = {n}, beta = {beta})"
        )));
    }
    let nf = n as f64;
    let x = beta / nf;
    let model = CurieWeissModel { n, beta, h: 0.0 };
    let a = model.analytic_dobrushin().unwrap();
    let b = systemic_scan_matrix(&a);

    // Displayed entries: b_{i,1} = 0, b_{i,i+1} = ... = b_{i,N} = x(1+x)^{i-1},
    // b_{i+k,i} = x((1+x)^{i+k-1} - (1+x)^k)  (1-based indices).
    let mut entry_err = 0.0f64;
    for i in 1..=n {
        entry_err = entry_err.max(b[(i - 1, 0)].abs());
        for j in (i + 1)..=n {
            let expect = x * (1.0 + x).powi(i as i32 - 1);
            entry_err = entry_err.max((b[(i - 1, j - 1)] - expect).abs());
        }
        for k in 0..=(n - i) {
            let expect = x * ((1.0 + x).powi((i + k) as i32 - 1) - (1.0 + x).powi(k as i32));
            if i >= 2 {
                entry_err = entry_err.max((b[(i + k - 1, i - 1)] - expect).abs());
            }
        }
    }

    let b_norm1_closed = (1.0 + x).powi(n as i32) - 1.0 - x;
    let b_norm1_numeric = max_column_sum(&b);

    // v = (0, 1/(n-1), ..., 1): (v B)_i <= v_i * beta (n-1)/n entrywise.
    let v = Array1::from_iter((0..n).map(|i| i as f64 / (nf - 1.0)));
    let vb = v.dot(&b);
    let factor = beta * (nf - 1.0) / nf;
    let mut v_violation = f64::NEG_INFINITY;
    for i in 0..n {
        v_violation = v_violation.max(vb[i] - v[i] * factor);
    }

    let kappa_sys_k_lower = (1..=n)
        .map(|k| 1.0 - beta * beta.exp() * (beta * (nf - 1.0) / nf).powi(k as i32 - 1))
        .collect();

    Ok(CurieWeissReport {
        n,
        beta,
        x,
        kappa_rand_lower: (1.0 - beta * (nf - 1.0) / nf) / nf,
        kappa_sys_lower: 2.0 - beta.exp(),
        kappa_sys_k_lower,
        gamma_ps_lower: (1.0 - beta * (nf - 1.0) / nf) / 4.0,
        b_norm1_closed,
        b_norm1_numeric,
        b_entry_max_err: entry_err,
        v_lemma_max_violation: v_violation,
    })
}

/// Closed forms for the 1D Ising Glauber chains.
#[derive(Debug, Clone)]
pub struct Ising1dReport {
    pub n: usize,
    pub beta: f64,
    pub h: f64,
    /// rho = 1 / (1 + e^{-4 beta})
    pub rho: f64,
    /// tridiagonal interdependence matrix (path convention)
    pub a: Array2<f64>,
    /// ||A||_1 = 2 rho - 1 at h = 0
    pub a_norm1: f64,
    /// kappa(random scan) >= 2 (1 - rho) / n
    pub kappa_rand_lower: f64,
    /// kappa(systemic scan) >= 2 (1 - rho) / (3/2 - rho)
    pub kappa_sys_lower: f64,
    /// gamma_ps >= 2 (1 - rho) / (3/2 - rho)^2
    pub gamma_ps_lower: f64,
    /// ||B||_1 of the materialized systemic matrix
    pub b_norm1_numeric: f64,
    /// closed-form cap (rho - 1/2) / (3/2 - rho) on ||B||_1
    pub b_norm1_bound: f64,
}

/// Evaluates the 1D Ising closed forms: the tridiagonal matrix, the scan
/// curvature bounds and the systemic-scan norm cap.
pub fn ising1d_closed_forms(n: usize, beta: f64, h: f64) -> Result<Ising1dReport> {
    if n < 2 || beta <= 0.0 {
        return Err(RicciError::InvalidInput(format!(
            "need n >= 2 and beta > 0 (got n = {n}, beta = {beta})"
        )));
    }
    let rho = 1.0 / (1.0 + (-4.0 * beta).exp());
    let entry = if h == 0.0 {
        rho - 0.5
    } else if h < 0.0 {
        1.0 / (1.0 + (-4.0 * beta - 2.0 * h).exp()) - 1.0 / (1.0 + (-2.0 * h).exp())
    } else {
        1.0 / (1.0 + (-2.0 * h).exp()) - 1.0 / (1.0 + (4.0 * beta - 2.0 * h).exp())
    };
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        if i > 0 {
            a[(i, i - 1)] = entry;
        }
        if i + 1 < n {
            a[(i, i + 1)] = entry;
        }
    }
    let b = systemic_scan_matrix(&a);
    Ok(Ising1dReport {
        n,
        beta,
        h,
        rho,
        a_norm1: max_column_sum(&a),
        a,
        kappa_rand_lower: 2.0 / n as f64 * (1.0 - rho),
        kappa_sys_lower: 2.0 * (1.0 - rho) / (1.5 - rho),
        gamma_ps_lower: 2.0 * (1.0 - rho) / (1.5 - rho) / (1.5 - rho),
        b_norm1_numeric: max_column_sum(&b),
        b_norm1_bound: (rho - 0.5) / (1.5 - rho),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curie_weiss_tight_matrix_is_dominated_by_beta_over_n() {
        let model = CurieWeissModel {
            n: 5,
            beta: 0.7,
            h: 0.0,
        };
        let data = estimate_dobrushin(&model, true).unwrap();
        let cap = 0.7 / 5.0 + 1e-12;
        for ((i, j), &v) in data.a.indexed_iter() {
            if i == j {
                assert_eq!(v, 0.0);
            } else {
                assert!(v <= cap, "a[{i}][{j}] = {v} exceeds beta/n");
                assert!(v > 0.0);
            }
        }
    }

    #[test]
    fn independent_spins_have_zero_matrix() {
        let model = CurieWeissModel {
            n: 4,
            beta: 0.0,
            h: 0.3,
        };
        let data = estimate_dobrushin(&model, true).unwrap();
        assert!(data.a.iter().all(|&v| v.abs() < 1e-15));
        let rs = random_scan_bound(&data.a, 3).unwrap();
        // A = 0: kappa_k >= 1 - ((n-1)/n)^k
        let expect = 1.0 - (3.0f64 / 4.0).powi(3);
        assert!((rs.kappa_lower - expect).abs() < 1e-12);
    }

    #[test]
    fn ising_tight_matrix_is_the_tridiagonal_band() {
        let n = 5;
        let beta = 0.25;
        let model = Ising1dModel {
            n,
            beta,
            h: 0.0,
            boundary: IsingBoundary::Pinned,
        };
        let data = estimate_dobrushin(&model, true).unwrap();
        let rho = 1.0 / (1.0 + (-4.0f64 * beta).exp());
        for i in 0..n {
            for j in 0..n {
                let adjacent = i.abs_diff(j) == 1;
                let expect = if adjacent { rho - 0.5 } else { 0.0 };
                assert!(
                    (data.a[(i, j)] - expect).abs() < 1e-12,
                    "a[{i}][{j}] = {}, expected {expect}",
                    data.a[(i, j)]
                );
            }
        }
        assert!((data.norm1 - (2.0 * rho - 1.0)).abs() < 1e-12);
        // free ends are strictly more sensitive than the band value
        let free = Ising1dModel {
            n,
            beta,
            h: 0.0,
            boundary: IsingBoundary::Free,
        };
        let tight = estimate_dobrushin(&free, true).unwrap();
        assert!((tight.a[(0, 1)] - beta.tanh()).abs() < 1e-12);
        assert!(tight.a[(0, 1)] > rho - 0.5);
    }

    #[test]
    fn curie_weiss_b_matrix_n2() {
        // n = 2, beta = 1: x = 0.5, b_{1,2} = 0.5, b_{2,2} = 0.25,
        // ||B||_1 = 0.75 = (1+x)^2 - 1 - x.
        let report = curie_weiss_closed_forms(2, 1.0).unwrap();
        assert!((report.b_norm1_numeric - 0.75).abs() < 1e-12);
        assert!((report.b_norm1_closed - 0.75).abs() < 1e-15);
        assert!(report.b_entry_max_err < 1e-12);
        let model = CurieWeissModel {
            n: 2,
            beta: 1.0,
            h: 0.0,
        };
        let b = systemic_scan_matrix(&model.analytic_dobrushin().unwrap());
        assert!((b[(0, 1)] - 0.5).abs() < 1e-15);
        assert!((b[(1, 1)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn curie_weiss_closed_norm_matches_up_to_n_200() {
        for &n in &[3usize, 10, 50, 200] {
            for &beta in &[0.3, 0.5, 0.9, 1.0] {
                let report = curie_weiss_closed_forms(n, beta).unwrap();
                assert!(
                    (report.b_norm1_numeric - report.b_norm1_closed).abs() < 1e-12,
                    "n = {n}, beta = {beta}: {} vs {}",
                    report.b_norm1_numeric,
                    report.b_norm1_closed
                );
            }
        }
    }

    #[test]
    fn v_lemma_holds_entrywise() {
        for &n in &[3usize, 10, 25, 50] {
            for &beta in &[0.3, 0.5, 0.9, 1.0] {
                let report = curie_weiss_closed_forms(n, beta).unwrap();
                assert!(
                    report.v_lemma_max_violation <= 1e-12,
                    "n = {n} beta = {beta}: violation {}",
                    report.v_lemma_max_violation
                );
            }
        }
    }

    #[test]
    fn systemic_scan_of_zero_matrix_is_zero() {
        let a = Array2::<f64>::zeros((4, 4));
        let b = systemic_scan_matrix(&a);
        assert!(b.iter().all(|&v| v == 0.0));
        assert_eq!(systemic_scan_kappa_lower(&b, 1), 1.0);
    }

    #[test]
    fn ising_closed_forms_at_quarter_beta() {
        let r = ising1d_closed_forms(5, 0.25, 0.0).unwrap();
        assert!((r.rho - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        assert!((r.rho - 0.7310585786300049).abs() < 1e-12);
        assert!((r.a_norm1 - 0.4621171572600098).abs() < 1e-12);
        // ||B||_1 respects the closed-form cap
        assert!(r.b_norm1_numeric <= r.b_norm1_bound + 1e-12);
        // b entries from the proof: b_{r-1,r} = rho - 1/2, b_{r,r} = (rho-1/2)^2
        let b = systemic_scan_matrix(&r.a);
        let e = r.rho - 0.5;
        assert!((b[(0, 1)] - e).abs() < 1e-15);
        assert!((b[(1, 1)] - e * e).abs() < 1e-15);
    }

    #[test]
    fn ising_bounds_approach_independence_as_beta_vanishes() {
        let r = ising1d_closed_forms(6, 1e-9, 0.0).unwrap();
        assert!((r.rho - 0.5).abs() < 1e-8);
        assert!((r.kappa_sys_lower - 1.0).abs() < 1e-7);
    }
}
