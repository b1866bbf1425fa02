//! Constrained least squares: minimize `‖L a‖₂` subject to `‖a‖₂ = 1`.
//!
//! The minimizer is the right singular vector of the smallest singular
//! value. When the matrix has fewer rows than columns the same call
//! returns a null vector of `L`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Solution of `min ‖L a‖₂ s.t. ‖a‖₂ = 1`.
#[derive(Debug, Clone)]
pub struct LsqSolution {
    /// Unit-norm coefficient vector, phase-fixed for reproducibility.
    pub a: DVector<Complex64>,
    /// Smallest singular value of the matrix.
    pub sigma_min: f64,
    /// `‖L a‖₂`, recomputed on the input matrix.
    pub residual: f64,
}

/// Right singular vector of the smallest singular value, phase-fixed so
/// that the entry of largest modulus is real positive.
pub fn min_unit(matrix: &DMatrix<Complex64>) -> Result<LsqSolution> {
    if matrix.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    // A thin SVD of a wide matrix spans only the row space. Padding with
    // zero rows keeps the singular values and exposes the null vectors.
    // Very tall systems go through QR first: R shares the right singular
    // vectors of the input at a fraction of the cost.
    let work = if matrix.nrows() < matrix.ncols() {
        let mut m = DMatrix::zeros(matrix.ncols(), matrix.ncols());
        m.view_mut((0, 0), (matrix.nrows(), matrix.ncols()))
            .copy_from(matrix);
        m
    } else if matrix.nrows() > 2 * matrix.ncols() {
        matrix.clone().qr().unpack_r()
    } else {
        matrix.clone()
    };

    let svd = work
        .try_svd(false, true, f64::EPSILON, 0)
        .ok_or(Error::SvdFailed)?;
    let v_t = svd.v_t.as_ref().expect("v_t requested");

    let mut min_idx = 0;
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < svd.singular_values[min_idx] {
            min_idx = i;
        }
    }
    let sigma_min = svd.singular_values[min_idx];

    // v_t stores V^H, so the singular vector is the conjugated row.
    let mut a: DVector<Complex64> = v_t.row(min_idx).map(|z| z.conj()).transpose();
    phase_fix(&mut a);

    let residual = (matrix * &a).norm();
    Ok(LsqSolution {
        a,
        sigma_min,
        residual,
    })
}

/// Rotate the phase so the largest-modulus entry (first on ties) becomes
/// real positive, then renormalize.
fn phase_fix(a: &mut DVector<Complex64>) {
    let mut best = 0;
    for i in 1..a.len() {
        if a[i].norm() > a[best].norm() {
            best = i;
        }
    }
    let pivot = a[best];
    if pivot.norm() > 0.0 {
        let rotation = pivot.conj() / pivot.norm();
        *a *= rotation;
    }
    let norm = a.norm();
    if norm > 0.0 {
        *a /= Complex64::new(norm, 0.0);
    }
}
