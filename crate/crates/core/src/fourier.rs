//! Direct solver for operators that are tridiagonal in the radial index and
//! constant-coefficient periodic in the angular index. A DFT along each row
//! decouples the angular modes; each mode is then a tridiagonal system whose
//! Thomas factors are computed once and reused.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::par;

struct ModeFactor {
    c_prime: Vec<f64>,
    inv_pivot: Vec<f64>,
}

/// Solves
/// `lower[i] x[i-1,j] + diag[i] x[i,j] + upper[i] x[i+1,j]
///   - coupling[i] (x[i,j+1] - 2 x[i,j] + x[i,j-1]) = rhs[i,j]`
/// on `rows x cols` with `x[-1,.] = x[rows,.] = 0` (fold boundary values into
/// the right-hand side) and periodic `j`.
pub(crate) struct PeriodicTridiagonal {
    rows: usize,
    cols: usize,
    lower: Vec<f64>,
    factors: Vec<ModeFactor>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl PeriodicTridiagonal {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>, coupling: Vec<f64>, cols: usize) -> Self {
        let rows = diag.len();
        assert!(lower.len() == rows && upper.len() == rows && coupling.len() == rows);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(cols);
        let inverse = planner.plan_fft_inverse(cols);

        let distinct = cols / 2 + 1;
        let factors = (0..distinct)
            .map(|m| {
                let s = (std::f64::consts::PI * m as f64 / cols as f64).sin();
                let eig = 4.0 * s * s;
                let mut c_prime = vec![0.0; rows];
                let mut inv_pivot = vec![0.0; rows];
                let mut prev_c = 0.0;
                for i in 0..rows {
                    let b = diag[i] + coupling[i] * eig;
                    let pivot = if i == 0 { b } else { b - lower[i] * prev_c };
                    inv_pivot[i] = 1.0 / pivot;
                    c_prime[i] = upper[i] * inv_pivot[i];
                    prev_c = c_prime[i];
                }
                ModeFactor { c_prime, inv_pivot }
            })
            .collect();

        Self {
            rows,
            cols,
            lower,
            factors,
            forward,
            inverse,
        }
    }

    /// Overwrite `rhs` (row-major, `rows * cols`) with the solution.
    pub fn solve(&self, rhs: &mut [f64]) {
        let (rows, cols) = (self.rows, self.cols);
        assert_eq!(rhs.len(), rows * cols);

        let mut spectral: Vec<Complex64> = rhs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let fwd = &self.forward;
        par::for_each_row(&mut spectral, cols, |_, row| fwd.process(row));

        let mut by_mode = vec![Complex64::new(0.0, 0.0); rows * cols];
        {
            let src = &spectral;
            par::for_each_row(&mut by_mode, rows, |m, col| {
                for (i, c) in col.iter_mut().enumerate() {
                    *c = src[i * cols + m];
                }
                let f = &self.factors[m.min(cols - m)];
                col[0] *= f.inv_pivot[0];
                for i in 1..rows {
                    col[i] = (col[i] - col[i - 1] * self.lower[i]) * f.inv_pivot[i];
                }
                for i in (0..rows.saturating_sub(1)).rev() {
                    col[i] -= col[i + 1] * f.c_prime[i];
                }
            });
        }

        {
            let src = &by_mode;
            let inv = &self.inverse;
            par::for_each_row(&mut spectral, cols, |i, row| {
                for (m, c) in row.iter_mut().enumerate() {
                    *c = src[m * rows + i];
                }
                inv.process(row);
            });
        }

        let scale = 1.0 / cols as f64;
        for (out, c) in rhs.iter_mut().zip(&spectral) {
            *out = c.re * scale;
        }
    }
}
