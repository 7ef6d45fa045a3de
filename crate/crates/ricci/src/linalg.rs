//! Small dense linear-algebra helpers shared across modules.

use ndarray::{Array1, Array2};

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot degenerates.
pub fn solve_dense(mut a: Array2<f64>, mut b: Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.len(), n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[(col, col)].abs();
        for r in (col + 1)..n {
            let v = a[(r, col)].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-13 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                let tmp = a[(col, c)];
                a[(col, c)] = a[(piv, c)];
                a[(piv, c)] = tmp;
            }
            b.swap(col, piv);
        }
        let d = a[(col, col)];
        for r in (col + 1)..n {
            let f = a[(r, col)] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[(r, c)] -= f * a[(col, c)];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = Array1::zeros(n);
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= a[(row, c)] * x[c];
        }
        x[row] = acc / a[(row, row)];
    }
    Some(x)
}

/// Maximum column sum (the induced l1 operator norm on column vectors).
pub fn max_column_sum(m: &Array2<f64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        let s: f64 = m.column(j).iter().map(|v| v.abs()).sum();
        best = best.max(s);
    }
    best
}

/// Maximum row sum (the l-infinity induced norm).
pub fn max_row_sum(m: &Array2<f64>) -> f64 {
    let mut best = 0.0f64;
    for i in 0..m.nrows() {
        let s: f64 = m.row(i).iter().map(|v| v.abs()).sum();
        best = best.max(s);
    }
    best
}

/// Spectral radius of a nonnegative matrix by power iteration on |M|, with a
/// Gelfand fallback `||M^64||_1^(1/64)` when the iteration stalls.
pub fn spectral_radius_nonneg(m: &Array2<f64>, tol: f64) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let abs = m.mapv(f64::abs);
    let mut v = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0f64;
    for _ in 0..20_000 {
        let w = abs.dot(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm;
        let wn = w.mapv(|x| x / norm);
        // Nonnegative iterates cannot oscillate in sign, so the Rayleigh
        // quotient estimate is monotone enough to test directly.
        if (next - lambda).abs() <= tol * next.max(1.0) {
            return next;
        }
        lambda = next;
        v = wn;
    }
    // Gelfand fallback for defective matrices.
    let mut p = abs.clone();
    for _ in 0..6 {
        p = p.dot(&p);
    }
    max_column_sum(&p).powf(1.0 / 64.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn solves_small_system() {
        let a = array![[2.0, 1.0], [1.0, 3.0]];
        let b = array![3.0, 5.0];
        let x = solve_dense(a, b).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12);
        assert!((x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn spectral_radius_of_diagonal() {
        let m = array![[0.5, 0.0], [0.0, 0.25]];
        let sp = spectral_radius_nonneg(&m, 1e-12);
        assert!((sp - 0.5).abs() < 1e-10);
    }

    #[test]
    fn spectral_radius_of_nilpotent_is_zero() {
        let m = array![[0.0, 1.0], [0.0, 0.0]];
        let sp = spectral_radius_nonneg(&m, 1e-12);
        assert!(sp.abs() < 1e-6);
    }
}
