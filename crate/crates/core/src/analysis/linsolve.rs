//! Dense Gaussian elimination over exact rationals and over floats.

use num::{BigRational, Zero};

/// Solves `M x = b` exactly. Returns `None` when the matrix is singular.
pub fn solve_rational(mut m: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    debug_assert!(m.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        b.swap(col, pivot);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    Some(b)
}

/// Solves `M x = b` in floating point with partial pivoting. Returns `None`
/// when the best pivot is smaller than `tol`.
pub fn solve_float(mut m: Vec<Vec<f64>>, mut b: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())?;
        if m[pivot][col].abs() < tol {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        let inv = 1.0 / m[col][col];
        for v in m[col].iter_mut() {
            *v *= inv;
        }
        b[col] *= inv;
        for r in 0..n {
            if r == col || m[r][col] == 0.0 {
                continue;
            }
            let factor = m[r][col];
            for c in col..n {
                m[r][c] -= factor * m[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_two_by_two() {
        // x + y = 1, x - y = 0  =>  x = y = 1/2
        let m = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(-1, 1)]];
        let b = vec![rat(1, 1), rat(0, 1)];
        let x = solve_rational(m, b).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn singular_is_detected() {
        let m = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(2, 1), rat(2, 1)]];
        let b = vec![rat(1, 1), rat(2, 1)];
        assert!(solve_rational(m, b).is_none());
        let m = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(solve_float(m, vec![1.0, 2.0], 1e-12).is_none());
    }

    #[test]
    fn float_matches_exact() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_float(m, vec![3.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12);
        assert!((x[1] - 1.4).abs() < 1e-12);
    }
}
