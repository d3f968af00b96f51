//! Small dense helpers and the closed-form Cholesky factor of `I + 11ᵀ`.

use crate::error::{Error, Result};

/// The `dim × dim` matrix `I + 11ᵀ` (2 on the diagonal, 1 elsewhere).
pub fn ones_plus_identity(dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 2.0 } else { 1.0 }).collect())
        .collect()
}

/// Lower-triangular `L` with `L Lᵀ = a` for a symmetric positive definite `a`.
pub fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let dim = a.len();
    if a.iter().any(|row| row.len() != dim) {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    let mut l = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let pivot = a[i][i] - dot;
                if pivot <= 0.0 {
                    return Err(Error::Domain(format!("matrix not positive definite at pivot {i}")));
                }
                l[i][j] = pivot.sqrt();
            } else {
                l[i][j] = (a[i][j] - dot) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Determinant of a symmetric positive definite matrix via its Cholesky factor.
pub fn determinant(a: &[Vec<f64>]) -> Result<f64> {
    let l = cholesky(a)?;
    Ok((0..a.len()).map(|i| l[i][i] * l[i][i]).product())
}

/// Cholesky factor `L` of `I + 11ᵀ` in `dim` dimensions, stored in O(dim).
///
/// Column `j` has diagonal `√((j+2)/(j+1))` and the same value
/// `1/√((j+1)(j+2))` in every entry below it, so products and solves with
/// `C = Lᵀ` take linear time.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneCholesky {
    diag: Vec<f64>,
    below: Vec<f64>,
}

impl RankOneCholesky {
    pub fn new(dim: usize) -> Self {
        let mut diag = Vec::with_capacity(dim);
        let mut below = Vec::with_capacity(dim);
        for j in 0..dim {
            let s = 1.0 / (j as f64 + 1.0);
            let d = (1.0 + s).sqrt();
            diag.push(d);
            below.push(s / d);
        }
        Self { diag, below }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Expands to the dense lower-triangular factor.
    pub fn dense_lower(&self) -> Vec<Vec<f64>> {
        let dim = self.dim();
        let mut l = vec![vec![0.0; dim]; dim];
        for j in 0..dim {
            l[j][j] = self.diag[j];
            for row in l.iter_mut().skip(j + 1) {
                row[j] = self.below[j];
            }
        }
        l
    }

    /// `w = C z` with `C = Lᵀ`, so that `wᵀw = zᵀ(I + 11ᵀ)z`.
    pub fn apply_upper(&self, z: &[f64], w: &mut [f64]) {
        let mut suffix = 0.0;
        for j in (0..self.dim()).rev() {
            w[j] = self.diag[j] * z[j] + self.below[j] * suffix;
            suffix += z[j];
        }
    }

    /// Solves `C z = w`; maps standard normal `w` to `z ~ N(0, (I + 11ᵀ)⁻¹)`.
    pub fn solve_upper(&self, w: &[f64], z: &mut [f64]) {
        let mut suffix = 0.0;
        for j in (0..self.dim()).rev() {
            z[j] = (w[j] - self.below[j] * suffix) / self.diag[j];
            suffix += z[j];
        }
    }

    /// `ln det(I + 11ᵀ)`, which is `ln(dim + 1)`.
    pub fn log_determinant(&self) -> f64 {
        self.diag.iter().map(|d| 2.0 * d.ln()).sum()
    }
}
