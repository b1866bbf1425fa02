//! Matrix-valued (MIMO) fitting: scalarize samples through fixed random
//! unit vectors, run the scalar fit, then lift the weights back onto the
//! matrix samples. The lifted model interpolates the full matrices at every
//! support tuple with nonzero weight.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::barycentric::MatrixBarycentricModel;
use crate::error::{Error, Result};
use crate::fit::{fit, FitOptions, FitTrace};
use crate::grid::{support_cross_matrices, MatrixTensorGrid, Partition, TensorGrid};

fn draw_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| {
            Complex64::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Seeded random complex unit vector from a standard complex normal.
pub fn random_unit(dim: usize, seed: u64) -> Result<Vec<Complex64>> {
    if dim == 0 {
        return Err(Error::InvalidOptions {
            context: "dimension must be at least 1".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_unit(dim, &mut rng))
}

/// Fixed scalarizing direction pair: `h = wᵀ H v` (plain transpose).
#[derive(Debug, Clone, PartialEq)]
pub struct Scalarizer {
    /// Output-side unit vector (length = matrix rows).
    pub w: Vec<Complex64>,
    /// Input-side unit vector (length = matrix cols).
    pub v: Vec<Complex64>,
    /// Seed the pair was drawn from.
    pub seed: u64,
}

impl Scalarizer {
    /// Draw `w` then `v` from one seeded stream.
    pub fn from_seed(n_out: usize, n_in: usize, seed: u64) -> Result<Self> {
        if n_out == 0 || n_in == 0 {
            return Err(Error::InvalidOptions {
                context: "scalarizer dimensions must be at least 1".into(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = draw_unit(n_out, &mut rng);
        let v = draw_unit(n_in, &mut rng);
        Ok(Self { w, v, seed })
    }

    /// Build from explicit vectors (normalized here).
    pub fn from_vectors(w: Vec<Complex64>, v: Vec<Complex64>, seed: u64) -> Result<Self> {
        if w.is_empty() || v.is_empty() {
            return Err(Error::InvalidOptions {
                context: "scalarizer vectors must be nonempty".into(),
            });
        }
        let normalize = |mut x: Vec<Complex64>| -> Result<Vec<Complex64>> {
            let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n == 0.0 {
                return Err(Error::InvalidOptions {
                    context: "scalarizer vector is zero".into(),
                });
            }
            for z in &mut x {
                *z /= n;
            }
            Ok(x)
        };
        Ok(Self {
            w: normalize(w)?,
            v: normalize(v)?,
            seed,
        })
    }

    /// `wᵀ M v` without conjugation.
    pub fn apply(&self, m: &DMatrix<Complex64>) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..m.nrows() {
            let mut row = Complex64::new(0.0, 0.0);
            for c in 0..m.ncols() {
                row += m[(r, c)] * self.v[c];
            }
            acc += self.w[r] * row;
        }
        acc
    }
}

/// Compress a matrix grid to the scalar grid `h = wᵀ H v` on the same axes.
pub fn scalarize(mgrid: &MatrixTensorGrid, sc: &Scalarizer) -> Result<TensorGrid> {
    let (rows, cols) = mgrid.value_shape();
    if sc.w.len() != rows || sc.v.len() != cols {
        return Err(Error::DimensionMismatch {
            context: format!(
                "scalarizer ({}, {}) does not match value shape ({rows}, {cols})",
                sc.w.len(),
                sc.v.len()
            ),
        });
    }
    let values: Vec<Complex64> = mgrid.values().iter().map(|m| sc.apply(m)).collect();
    TensorGrid::new(mgrid.axes().to_vec(), values)
}

/// Fit a matrix grid: run scalar p-AAA on the scalarized data, keep its
/// support points and weights, and set the support values to the original
/// matrix samples.
pub fn mimo_fit(
    mgrid: &MatrixTensorGrid,
    opts: &FitOptions,
    sc: &Scalarizer,
) -> Result<(MatrixBarycentricModel, FitTrace)> {
    let scalar_grid = scalarize(mgrid, sc)?;
    let (scalar_model, trace) = fit(&scalar_grid, opts)?;
    let part = Partition::from_coords(mgrid.axes(), scalar_model.support_points())?;
    let model = MatrixBarycentricModel::new(
        scalar_model.support_points().to_vec(),
        support_cross_matrices(mgrid, &part)?,
        scalar_model.weights().to_vec(),
    )?;
    Ok((model, trace))
}

/// Per-tuple max-entry absolute errors and the relative max-norm ratio
/// against the largest sample entry.
pub fn matrix_error_report(
    mgrid: &MatrixTensorGrid,
    model: &MatrixBarycentricModel,
) -> Result<(f64, Vec<f64>)> {
    if model.value_shape() != mgrid.value_shape() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "model value shape {:?} vs grid {:?}",
                model.value_shape(),
                mgrid.value_shape()
            ),
        });
    }
    let mut errors = Vec::with_capacity(mgrid.len());
    for lin in 0..mgrid.len() {
        let tuple = mgrid.multi_index(lin);
        let point = mgrid.point_at(&tuple);
        let approx = match model.eval_matrix(&point) {
            Ok(v) => v,
            Err(Error::ZeroDenominator { .. }) => {
                return Err(Error::PoleOnGrid {
                    tuple: tuple.clone(),
                    point,
                })
            }
            Err(e) => return Err(e),
        };
        let diff = mgrid.values()[lin].clone() - approx;
        let err = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !err.is_finite() {
            return Err(Error::PoleOnGrid { tuple, point });
        }
        errors.push(err);
    }
    let max_err = errors.iter().copied().fold(0.0, f64::max);
    let max_abs = mgrid.max_abs();
    let rel = if max_err == 0.0 {
        0.0
    } else {
        max_err / max_abs
    };
    Ok((rel, errors))
}
