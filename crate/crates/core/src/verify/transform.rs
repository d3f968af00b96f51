use crate::error::{Error, Result};

/// A sequence in mean/deviation coordinates: `y` is the sample mean and
/// `z_j = x_j - y` for the first `n - 1` entries. The map `x ↦ (y, z)` has
/// Jacobian determinant `±1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedSample {
    pub y: f64,
    pub z: Vec<f64>,
}

impl TransformedSample {
    pub fn from_x(x: &[f64]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidArgument("empty sequence".into()));
        }
        let y = x.iter().sum::<f64>() / x.len() as f64;
        let z = x[..x.len() - 1].iter().map(|v| v - y).collect();
        Ok(Self { y, z })
    }

    pub fn n(&self) -> usize {
        self.z.len() + 1
    }

    /// Inverse map: `x_j = y + z_j` for `j < n`, `x_n = y - Σ z_j`.
    pub fn to_x(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n());
        self.write_x(&mut x);
        x
    }

    pub fn write_x(&self, x: &mut Vec<f64>) {
        x.clear();
        x.extend(self.z.iter().map(|z| self.y + z));
        x.push(self.y - self.z.iter().sum::<f64>());
    }

    /// `Σ z_j² + (Σ z_j)²`, which equals `Σ (x_i - y)²`.
    pub fn quadratic_form(&self) -> f64 {
        let s: f64 = self.z.iter().sum();
        self.z.iter().map(|v| v * v).sum::<f64>() + s * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(mut m: Vec<Vec<f64>>) -> f64 {
        let n = m.len();
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            det *= m[c][c];
            for r in c + 1..n {
                let f = m[r][c] / m[c][c];
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
        det
    }

    #[test]
    fn round_trip() {
        let x = vec![1.5, -2.0, 0.25, 7.0, 3.3];
        let t = TransformedSample::from_x(&x).unwrap();
        for (a, b) in t.to_x().iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        let y = 1.5 + -2.0 + 0.25 + 7.0 + 3.3;
        let sse: f64 = x.iter().map(|v| (v - y / 5.0).powi(2)).sum();
        assert!((t.quadratic_form() - sse).abs() < 1e-12);
        assert_eq!(TransformedSample::from_x(&[4.0]).unwrap().to_x(), vec![4.0]);
        assert!(TransformedSample::from_x(&[]).is_err());
    }

    #[test]
    fn inverse_map_jacobian_is_n() {
        let h = 1e-6;
        for n in 2..=6 {
            let base = TransformedSample { y: 0.3, z: (0..n - 1).map(|j| j as f64 * 0.4 - 0.5).collect() };
            let x0 = base.to_x();
            let mut jac = vec![vec![0.0; n]; n];
            for k in 0..n {
                let mut plus = base.clone();
                let mut minus = base.clone();
                if k == 0 {
                    plus.y += h;
                    minus.y -= h;
                } else {
                    plus.z[k - 1] += h;
                    minus.z[k - 1] -= h;
                }
                let (xp, xm) = (plus.to_x(), minus.to_x());
                for i in 0..n {
                    jac[i][k] = (xp[i] - xm[i]) / (2.0 * h);
                }
            }
            assert_eq!(x0.len(), n);
            assert!((det(jac).abs() - n as f64).abs() < 1e-8, "n={n}");
        }
    }
}
