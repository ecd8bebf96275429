//! Small dense vector/matrix helpers for ambient dimensions n ≤ 3-ish.
//! Matrices are row-major flat slices.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        acc += d * d;
    }
    math::sqrt(acc)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// a + c·b
pub fn add_scaled(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

/// Normalize in place; returns the original norm (0.0 left untouched).
pub fn normalize(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
    n
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mat: &[f64], n: usize) -> f64 {
    debug_assert_eq!(mat.len(), n * n);
    let mut a = mat.to_vec();
    let mut sign = 1.0;
    let mut d = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if math::abs(a[r * n + col]) > math::abs(a[piv * n + col]) {
                piv = r;
            }
        }
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            sign = -sign;
        }
        let p = a[col * n + col];
        d *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            for c in col..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
        }
    }
    sign * d
}

/// Solve A x = b in place; returns None when the pivot degenerates.
pub fn solve(mat: &[f64], rhs: &[f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(mat.len(), n * n);
    debug_assert_eq!(rhs.len(), n);
    let mut a = mat.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if math::abs(a[r * n + col]) > math::abs(a[piv * n + col]) {
                piv = r;
            }
        }
        let p = a[piv * n + col];
        if math::abs(p) < 1e-300 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / a[col * n + col];
            for c in col..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row * n + c] * x[c];
        }
        x[row] = acc / a[row * n + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_2x2() {
        assert_eq!(det(&[1.0, 2.0, 3.0, 4.0], 2), -2.0);
        assert_eq!(det(&[2.0, 0.0, 0.0, 3.0], 2), 6.0);
    }

    #[test]
    fn det_3x3_singular() {
        let m = [1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.5, 1.0, 2.0];
        assert!(math::abs(det(&m, 3)) < 1e-14);
    }

    #[test]
    fn solve_roundtrip() {
        let a = [3.0, 1.0, -1.0, 2.0, 4.0, 1.0, -1.0, 2.0, 5.0];
        let x_true = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        for r in 0..3 {
            b[r] = (0..3).map(|c| a[r * 3 + c] * x_true[c]).sum();
        }
        let x = solve(&a, &b, 3).unwrap();
        for i in 0..3 {
            assert!(math::abs(x[i] - x_true[i]) < 1e-12);
        }
    }

    #[test]
    fn solve_singular_is_none() {
        assert!(solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 2.0], 2).is_none());
    }
}
