//! Gaussian elimination for the tiny dense systems of the steady-state solve.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Solves `A x = b` for a row-major `n×n` complex matrix by partial pivoting.
///
/// A pivot smaller than `1e-13·max|A|` is treated as singular.
pub fn solve(mut a: Vec<C64>, mut b: Vec<C64>) -> Result<Vec<C64>> {
    let n = b.len();
    if a.len() != n * n {
        return Err(Error::InvalidArgument(format!("matrix has {} entries, expected {}", a.len(), n * n)));
    }
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    if scale == 0.0 {
        return Err(Error::SingularSystem);
    }
    let tiny = 1e-13 * scale;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm())).unwrap();
        if a[pivot * n + col].norm() <= tiny {
            return Err(Error::SingularSystem);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn solves_complex_2x2() {
        let a = vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 2.0)];
        let x_true = vec![c(0.5, -2.0), c(-1.0, 0.25)];
        let b = vec![a[0] * x_true[0] + a[1] * x_true[1], a[2] * x_true[0] + a[3] * x_true[1]];
        let x = solve(a, b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).norm() < 1e-14);
        }
    }

    #[test]
    fn needs_pivoting() {
        let a = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let x = solve(a, vec![c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(3.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn singular_detected() {
        let a = vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)];
        assert!(matches!(solve(a, vec![c(1.0, 0.0); 2]), Err(Error::SingularSystem)));
        assert!(matches!(solve(vec![c(0.0, 0.0); 4], vec![c(1.0, 0.0); 2]), Err(Error::SingularSystem)));
    }
}
