//! Polynomial least squares in a standardised regressor.

use nalgebra::{DMatrix, DVector};

/// Basis `1, z, …, z^d` with `z = (x − center)/scale`, fitted once per
/// exercise date and shared by every energy level.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    pub degree: usize,
    pub center: f64,
    pub scale: f64,
    design: DMatrix<f64>,
    /// Cholesky factor of the Gram matrix; `None` when it is singular.
    gram: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

/// Coefficients of one fit in the standardised basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub coeffs: Vec<f64>,
}

impl PolyFit {
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }
}

impl PolyBasis {
    pub fn new(x: &[f64], degree: usize) -> Self {
        let n = x.len();
        let center = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - center).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        let degenerate = !(sd > 1e-12 * center.abs().max(1.0));
        let scale = if degenerate { 1.0 } else { sd };
        let cols = degree + 1;
        let design = DMatrix::from_fn(n, cols, |i, p| ((x[i] - center) / scale).powi(p as i32));
        let gram = if degenerate || n < cols {
            None
        } else {
            (design.transpose() * &design).cholesky()
        };
        if gram.is_none() {
            log::warn!("regression design is rank deficient; falling back to the sample mean");
        }
        Self {
            degree,
            center,
            scale,
            design,
            gram,
        }
    }

    pub fn standardise(&self, x: f64) -> f64 {
        (x - self.center) / self.scale
    }

    pub fn is_degenerate(&self) -> bool {
        self.gram.is_none()
    }

    /// Least-squares fit of `y`; the sample mean if the design is singular.
    pub fn fit(&self, y: &[f64]) -> PolyFit {
        match &self.gram {
            Some(chol) => {
                let rhs = self.design.tr_mul(&DVector::from_column_slice(y));
                PolyFit {
                    coeffs: chol.solve(&rhs).iter().copied().collect(),
                }
            }
            None => PolyFit {
                coeffs: vec![y.iter().sum::<f64>() / y.len() as f64],
            },
        }
    }
}
