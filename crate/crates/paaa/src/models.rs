//! Built-in benchmark transfer functions and grid samplers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{lin_to_multi, MatrixTensorGrid, TensorGrid};

/// `n` linearly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.log10(), hi.log10(), n)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

/// Real points promoted to the complex plane.
pub fn real_axis(points: &[f64]) -> Vec<Complex64> {
    points.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Real points placed on the imaginary axis (frequencies `i·ω`).
pub fn imaginary_axis(points: &[f64]) -> Vec<Complex64> {
    points.iter().map(|&x| Complex64::new(0.0, x)).collect()
}

/// Low-order two-variable rational test function: two bump terms in `s`
/// (one shifted by `p`) plus a slow `1/(p+25)` drift.
pub fn synthetic_2var(s: Complex64, p: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let sp = s + p;
    let sm = s - Complex64::new(0.5, 0.0);
    one / (one + Complex64::new(25.0, 0.0) * sp * sp)
        + Complex64::new(0.5, 0.0) / (one + Complex64::new(25.0, 0.0) * sm * sm)
        + Complex64::new(0.1, 0.0) / (p + Complex64::new(25.0, 0.0))
}

/// Parameters of the Penzl-style benchmark: three rotating 2x2 blocks and
/// a long negative-diagonal tail, driven through a vector of `peak_gain`
/// entries on the rotating blocks and unit entries on the tail.
#[derive(Debug, Clone, PartialEq)]
pub struct PenzlSpec {
    /// Rotation of the second 2x2 block (fixed in the two-variable case).
    pub rotation_mid: f64,
    /// Rotation of the third 2x2 block (fixed in the two-variable case).
    pub rotation_high: f64,
    /// Length of the diagonal tail `-diag(1..=tail_len)`.
    pub tail_len: usize,
    /// Input/output gain on the rotating blocks.
    pub peak_gain: f64,
}

impl Default for PenzlSpec {
    fn default() -> Self {
        Self {
            rotation_mid: 200.0,
            rotation_high: 400.0,
            tail_len: 1000,
            peak_gain: 10.0,
        }
    }
}

impl PenzlSpec {
    pub fn new(
        rotation_mid: f64,
        rotation_high: f64,
        tail_len: usize,
        peak_gain: f64,
    ) -> Result<Self> {
        if rotation_mid <= 0.0 || rotation_high <= 0.0 {
            return Err(Error::InvalidOptions {
                context: "rotations must be positive".into(),
            });
        }
        if tail_len == 0 {
            return Err(Error::InvalidOptions {
                context: "tail length must be at least 1".into(),
            });
        }
        Ok(Self {
            rotation_mid,
            rotation_high,
            tail_len,
            peak_gain,
        })
    }

    /// Contribution of one rotating block `[[-1, ρ], [-ρ, -1]]` driven by
    /// two `peak_gain` entries: `2 g² (s+1) / ((s+1)² + ρ²)`.
    fn peak(&self, s: Complex64, rotation: Complex64) -> Complex64 {
        let s1 = s + Complex64::new(1.0, 0.0);
        Complex64::new(2.0 * self.peak_gain * self.peak_gain, 0.0) * s1
            / (s1 * s1 + rotation * rotation)
    }

    /// Tail contribution `Σ_{m=1..tail_len} 1/(s+m)`.
    fn tail(&self, s: Complex64) -> Complex64 {
        (1..=self.tail_len)
            .map(|m| (s + Complex64::new(m as f64, 0.0)).finv())
            .sum()
    }

    /// Two-variable transfer function: the first block rotates with `p`.
    pub fn transfer_2var(&self, s: Complex64, p: Complex64) -> Complex64 {
        self.peak(s, p)
            + self.peak(s, Complex64::new(self.rotation_mid, 0.0))
            + self.peak(s, Complex64::new(self.rotation_high, 0.0))
            + self.tail(s)
    }

    /// Three-variable transfer function: blocks rotate with `p`, `z`, `2z`.
    pub fn transfer_3var(&self, s: Complex64, p: Complex64, z: Complex64) -> Complex64 {
        self.peak(s, p)
            + self.peak(s, z)
            + self.peak(s, Complex64::new(2.0, 0.0) * z)
            + self.tail(s)
    }
}

/// Two-variable Penzl benchmark with the standard parameters.
pub fn penzl_2var(s: Complex64, p: Complex64) -> Complex64 {
    PenzlSpec::default().transfer_2var(s, p)
}

/// Three-variable Penzl benchmark with the standard parameters.
pub fn penzl_3var(s: Complex64, p: Complex64, z: Complex64) -> Complex64 {
    PenzlSpec::default().transfer_3var(s, p, z)
}

/// Random stable parametric state-space sampler
/// `C (sI − A₀ − p·A₁)^{-1} B` with diagonal negative `A₀` and a rank-one
/// `A₁` scaled to keep the spectrum in the left half plane for `|p| ≤ 1`.
#[derive(Debug, Clone)]
pub struct ParametricStateSpace {
    a0_diag: Vec<f64>,
    a1: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
}

/// Draw a seeded sampler; identical seeds give identical systems.
pub fn random_parametric_mimo(
    state_dim: usize,
    n_out: usize,
    n_in: usize,
    seed: u64,
) -> Result<ParametricStateSpace> {
    if state_dim == 0 || n_out == 0 || n_in == 0 {
        return Err(Error::InvalidOptions {
            context: "state_dim, n_out and n_in must be at least 1".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0_diag: Vec<f64> = (0..state_dim)
        .map(|_| -(0.5 + 1.5 * rng.gen::<f64>()))
        .collect();

    let u = DVector::from_fn(state_dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let v = DVector::from_fn(state_dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    // numerical-abscissa bound: ‖A₁‖₂ = 1/4 < min |Re a₀|, so |p| ≤ 1 stays stable
    let a1 = &u * v.transpose() * (0.25 / (u.norm() * v.norm()));

    let b = DMatrix::from_fn(state_dim, n_in, |_, _| rng.sample::<f64, _>(StandardNormal));
    let c = DMatrix::from_fn(n_out, state_dim, |_, _| {
        rng.sample::<f64, _>(StandardNormal)
    });
    Ok(ParametricStateSpace { a0_diag, a1, b, c })
}

impl ParametricStateSpace {
    pub fn state_dim(&self) -> usize {
        self.a0_diag.len()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    /// Transfer matrix at `(s, p)` via a dense resolvent solve.
    pub fn eval(&self, s: Complex64, p: Complex64) -> Result<DMatrix<Complex64>> {
        let n = self.state_dim();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let a = if i == j { self.a0_diag[i] } else { 0.0 };
                m[(i, j)] = -Complex64::new(a + p.re * self.a1[(i, j)], p.im * self.a1[(i, j)]);
            }
            m[(i, i)] += s;
        }
        let bc = self.b.map(|x| Complex64::new(x, 0.0));
        let x = m
            .lu()
            .solve(&bc)
            .ok_or(Error::ZeroDenominator { point: vec![s, p] })?;
        Ok(self.c.map(|x| Complex64::new(x, 0.0)) * x)
    }
}

/// Sample a scalar function on the tensor product of the given axes.
pub fn sample_grid<F>(axes: Vec<Vec<Complex64>>, f: F) -> Result<TensorGrid>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let point_of = |lin: usize| -> Vec<Complex64> {
        lin_to_multi(lin, &shape)
            .iter()
            .zip(&axes)
            .map(|(&i, axis)| axis[i])
            .collect()
    };

    #[cfg(feature = "parallel")]
    let values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|lin| f(&point_of(lin)))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let values: Vec<Complex64> = (0..total).map(|lin| f(&point_of(lin))).collect();

    TensorGrid::new(axes, values)
}

/// Sample a matrix-valued function on the tensor product of the given axes.
pub fn sample_matrix_grid<F>(axes: Vec<Vec<Complex64>>, f: F) -> Result<MatrixTensorGrid>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + Sync,
{
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let point_of = |lin: usize| -> Vec<Complex64> {
        lin_to_multi(lin, &shape)
            .iter()
            .zip(&axes)
            .map(|(&i, axis)| axis[i])
            .collect()
    };

    #[cfg(feature = "parallel")]
    let values: Result<Vec<DMatrix<Complex64>>> = (0..total)
        .into_par_iter()
        .map(|lin| f(&point_of(lin)))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let values: Result<Vec<DMatrix<Complex64>>> = (0..total).map(|lin| f(&point_of(lin))).collect();

    MatrixTensorGrid::new(axes, values?)
}

/// The standard sampling of [`synthetic_2var`]: 21×21, `s ∈ [−1,1]`,
/// `p ∈ [0,1]`, both linear and real.
pub fn synthetic_2var_grid(n_s: usize, n_p: usize) -> Result<TensorGrid> {
    sample_grid(
        vec![
            real_axis(&linspace(-1.0, 1.0, n_s)),
            real_axis(&linspace(0.0, 1.0, n_p)),
        ],
        |x| synthetic_2var(x[0], x[1]),
    )
}

/// The standard sampling of [`penzl_2var`]: log-spaced `s ∈ [0.1, 1000]i`,
/// linear `p ∈ [10, 100]`.
pub fn penzl_2var_grid(n_s: usize, n_p: usize) -> Result<TensorGrid> {
    sample_grid(
        vec![
            imaginary_axis(&logspace(0.1, 1000.0, n_s)),
            real_axis(&linspace(10.0, 100.0, n_p)),
        ],
        |x| penzl_2var(x[0], x[1]),
    )
}

/// The standard sampling of [`penzl_3var`]: log-spaced `s ∈ [1, 2000]i`,
/// linear `p ∈ [10, 100]` and `z ∈ [150, 250]`.
pub fn penzl_3var_grid(n_s: usize, n_p: usize, n_z: usize) -> Result<TensorGrid> {
    sample_grid(
        vec![
            imaginary_axis(&logspace(1.0, 2000.0, n_s)),
            real_axis(&linspace(10.0, 100.0, n_p)),
            real_axis(&linspace(150.0, 250.0, n_z)),
        ],
        |x| penzl_3var(x[0], x[1], x[2]),
    )
}

/// Sample a seeded random parametric MIMO system on log-spaced
/// `s ∈ [0.1, 10]i` times linear `p ∈ [0, 1]`.
pub fn random_mimo_grid(
    state_dim: usize,
    n_out: usize,
    n_in: usize,
    seed: u64,
    n_s: usize,
    n_p: usize,
) -> Result<MatrixTensorGrid> {
    let sys = random_parametric_mimo(state_dim, n_out, n_in, seed)?;
    sample_matrix_grid(
        vec![
            imaginary_axis(&logspace(0.1, 10.0, n_s)),
            real_axis(&linspace(0.0, 1.0, n_p)),
        ],
        |x| sys.eval(x[0], x[1]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn synthetic_value_at_origin() {
        let v = synthetic_2var(r(0.0), r(0.0));
        assert!((v - r(1.0729655172413793)).norm() < 1e-15);
    }

    #[test]
    fn synthetic_centered_term() {
        // at s = 0.5 the middle term is exactly 0.5 for any p
        for p in [0.0, 0.3, 1.0] {
            let v = synthetic_2var(r(0.5), r(p));
            let rest = r(1.0) / (r(1.0) + r(25.0) * (r(0.5) + r(p)) * (r(0.5) + r(p)))
                + r(0.1) / (r(p) + r(25.0));
            assert!((v - rest - r(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn synthetic_first_term_even_in_s_plus_p() {
        let f = |s: f64, p: f64| {
            synthetic_2var(r(s), r(p))
                - r(0.5) / (r(1.0) + r(25.0) * (r(s) - r(0.5)) * (r(s) - r(0.5)))
                - r(0.1) / (r(p) + r(25.0))
        };
        let a = f(0.3, 0.4);
        let b = f(-0.3, -0.4);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn penzl_decays_at_large_real_s() {
        let v = penzl_2var(r(1e9), r(50.0));
        assert!(v.norm() < 1e-5);
    }

    #[test]
    fn penzl_left_peak_tracks_parameter() {
        // near s = i·p the parameter-driven term dominates
        let p = 80.0;
        let at_peak = penzl_2var(Complex64::new(0.0, p), r(p)).norm();
        let off_peak = penzl_2var(Complex64::new(0.0, p * 2.0), r(p)).norm();
        assert!(at_peak > 5.0 * off_peak);
    }

    #[test]
    fn penzl_3var_specializes_to_2var() {
        // z = 200 makes the middle block match the two-variable default,
        // but the third block rotates at 2z = 400 = rotation_high too
        let s = Complex64::new(0.0, 37.0);
        let p = r(42.0);
        let a = penzl_3var(s, p, r(200.0));
        let b = penzl_2var(s, p);
        assert!((a - b).norm() < 1e-12 * b.norm());
    }

    #[test]
    fn penzl_3var_peaks_sit_at_all_three_rotations() {
        // |H(iω)| peaks near ω = p, z and 2z
        let p = 60.0;
        let z = 180.0;
        for peak in [p, z, 2.0 * z] {
            let at = penzl_3var(Complex64::new(0.0, peak), r(p), r(z)).norm();
            let below = penzl_3var(Complex64::new(0.0, peak * 0.8), r(p), r(z)).norm();
            let above = penzl_3var(Complex64::new(0.0, peak * 1.2), r(p), r(z)).norm();
            assert!(at > below && at > above, "no peak at ω = {peak}");
        }
    }

    #[test]
    fn penzl_spec_validation() {
        assert!(PenzlSpec::new(0.0, 400.0, 1000, 10.0).is_err());
        assert!(PenzlSpec::new(200.0, 400.0, 0, 10.0).is_err());
        assert!(PenzlSpec::new(200.0, 400.0, 10, 10.0).is_ok());
    }

    #[test]
    fn state_space_is_deterministic() {
        let a = random_parametric_mimo(4, 2, 3, 99).unwrap();
        let b = random_parametric_mimo(4, 2, 3, 99).unwrap();
        let s = Complex64::new(0.1, 2.0);
        let p = r(0.7);
        assert_eq!(a.eval(s, p).unwrap(), b.eval(s, p).unwrap());
    }

    #[test]
    fn state_space_scalar_case() {
        let sys = random_parametric_mimo(3, 1, 1, 5).unwrap();
        let m = sys.eval(Complex64::new(0.0, 1.0), r(0.5)).unwrap();
        assert_eq!(m.shape(), (1, 1));
    }

    #[test]
    fn state_space_dimension_validation() {
        assert!(random_parametric_mimo(0, 1, 1, 0).is_err());
        assert!(random_parametric_mimo(1, 0, 1, 0).is_err());
        assert!(random_parametric_mimo(1, 1, 0, 0).is_err());
    }

    #[test]
    fn sample_grid_matches_direct_evaluation() {
        let grid = synthetic_2var_grid(5, 4).unwrap();
        assert_eq!(grid.shape(), &[5, 4]);
        let tuple = [3, 2];
        let point = grid.point_at(&tuple);
        assert_eq!(grid.value_at(&tuple), synthetic_2var(point[0], point[1]));
    }

    #[test]
    fn spacing_helpers() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        let ls = logspace(0.1, 1000.0, 5);
        assert!((ls[0] - 0.1).abs() < 1e-12);
        assert!((ls[4] - 1000.0).abs() < 1e-9);
        assert!((ls[2] - 10.0).abs() < 1e-9);
    }
}
