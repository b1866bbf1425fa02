//! N-variable barycentric rational functions.
//!
//! A model is the ratio of two weighted Cauchy-kernel sums over a tensor
//! product of support points. At a coordinate that equals a support point
//! the sums restrict to the matching multi-indices and the corresponding
//! Cauchy factor is dropped; this realizes the removable-singularity limit
//! exactly and makes support tuples interpolate their stored values.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{lin_to_multi, multi_to_lin};

/// How one coordinate of an evaluation point relates to its support axis.
enum AxisFactor {
    /// Coordinate equals support point at this position: restrict the sums
    /// and drop the Cauchy factor.
    Matched(usize),
    /// Free coordinate: reciprocal Cauchy factors `1/(x − σ_i)`.
    Free(Vec<Complex64>),
}

/// Classify each coordinate against the support points (exact equality).
fn axis_factors(support_points: &[Vec<Complex64>], point: &[Complex64]) -> Vec<AxisFactor> {
    support_points
        .iter()
        .zip(point)
        .map(|(supp, &x)| match supp.iter().position(|&s| s == x) {
            Some(pos) => AxisFactor::Matched(pos),
            None => AxisFactor::Free(supp.iter().map(|&s| (x - s).finv()).collect()),
        })
        .collect()
}

/// Accumulate `Σ coeff(I)·Π_free factors` over the restricted index set.
/// `coeff` receives the flat row-major index of the weight tensor.
fn restricted_sum(
    counts: &[usize],
    factors: &[AxisFactor],
    mut accumulate: impl FnMut(usize, Complex64),
) {
    let free_shape: Vec<usize> = factors
        .iter()
        .zip(counts)
        .map(|(f, &k)| match f {
            AxisFactor::Matched(_) => 1,
            AxisFactor::Free(_) => k,
        })
        .collect();
    let total: usize = free_shape.iter().product();
    let mut multi = vec![0usize; counts.len()];
    for lin in 0..total {
        let reduced = lin_to_multi(lin, &free_shape);
        let mut cauchy = Complex64::new(1.0, 0.0);
        for (d, f) in factors.iter().enumerate() {
            match f {
                AxisFactor::Matched(pos) => multi[d] = *pos,
                AxisFactor::Free(recip) => {
                    multi[d] = reduced[d];
                    cauchy *= recip[reduced[d]];
                }
            }
        }
        accumulate(multi_to_lin(&multi, counts), cauchy);
    }
}

fn validate_support_points(support_points: &[Vec<Complex64>]) -> Result<usize> {
    let mut total = 1usize;
    for (d, supp) in support_points.iter().enumerate() {
        if supp.is_empty() {
            return Err(Error::EmptySupport { axis: d });
        }
        for i in 0..supp.len() {
            for j in i + 1..supp.len() {
                if supp[i] == supp[j] {
                    return Err(Error::DuplicateAxisPoint {
                        axis: d,
                        point: supp[i],
                    });
                }
            }
        }
        total *= supp.len();
    }
    Ok(total)
}

/// Scalar N-variable barycentric rational model.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricModel {
    support_points: Vec<Vec<Complex64>>,
    support_values: Vec<Complex64>,
    weights: Vec<Complex64>,
}

impl BarycentricModel {
    /// Build a model; `support_values` and `weights` are flat row-major over
    /// the per-axis support counts.
    pub fn new(
        support_points: Vec<Vec<Complex64>>,
        support_values: Vec<Complex64>,
        weights: Vec<Complex64>,
    ) -> Result<Self> {
        let total = validate_support_points(&support_points)?;
        if support_values.len() != total {
            return Err(Error::ShapeMismatch {
                values: support_values.len(),
                expected: total,
            });
        }
        if weights.len() != total {
            return Err(Error::ShapeMismatch {
                values: weights.len(),
                expected: total,
            });
        }
        if weights.iter().all(|w| *w == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidOptions {
                context: "weight tensor is identically zero".into(),
            });
        }
        Ok(Self {
            support_points,
            support_values,
            weights,
        })
    }

    pub fn ndim(&self) -> usize {
        self.support_points.len()
    }

    pub fn support_points(&self) -> &[Vec<Complex64>] {
        &self.support_points
    }

    pub fn support_values(&self) -> &[Complex64] {
        &self.support_values
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Support counts per axis (`k_d`).
    pub fn counts(&self) -> Vec<usize> {
        self.support_points.iter().map(Vec::len).collect()
    }

    /// Rational order per axis, `k_d − 1`.
    pub fn orders(&self) -> Vec<usize> {
        self.support_points.iter().map(|s| s.len() - 1).collect()
    }

    /// Multi-indices of exactly-zero weights. Interpolation is undefined at
    /// those support tuples; callers may want to warn.
    pub fn zero_weights(&self) -> Vec<Vec<usize>> {
        let counts = self.counts();
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w == Complex64::new(0.0, 0.0))
            .map(|(lin, _)| lin_to_multi(lin, &counts))
            .collect()
    }

    fn check_point(&self, point: &[Complex64]) -> Result<()> {
        if point.len() != self.ndim() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "point has {} coordinates, model has {} variables",
                    point.len(),
                    self.ndim()
                ),
            });
        }
        Ok(())
    }

    /// Numerator and denominator sums over the restricted index set.
    fn sums(&self, factors: &[AxisFactor]) -> (Complex64, Complex64) {
        let counts = self.counts();
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        restricted_sum(&counts, factors, |lin, cauchy| {
            let wf = self.weights[lin] * cauchy;
            den += wf;
            num += self.support_values[lin] * wf;
        });
        (num, den)
    }

    /// Evaluate the model, resolving removable singularities at support
    /// coordinates exactly.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        self.check_point(point)?;
        let factors = axis_factors(&self.support_points, point);
        if factors.iter().all(|f| matches!(f, AxisFactor::Matched(_))) {
            let tuple: Vec<usize> = factors
                .iter()
                .map(|f| match f {
                    AxisFactor::Matched(p) => *p,
                    AxisFactor::Free(_) => unreachable!(),
                })
                .collect();
            let lin = multi_to_lin(&tuple, &self.counts());
            if self.weights[lin] == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroWeightAtSupport { tuple });
            }
            return Ok(self.support_values[lin]);
        }
        let (num, den) = self.sums(&factors);
        if den == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroDenominator {
                point: point.to_vec(),
            });
        }
        Ok(num / den)
    }

    /// The two barycentric sums separately. Defined only away from support
    /// coordinates, where neither sum degenerates.
    pub fn num_den(&self, point: &[Complex64]) -> Result<(Complex64, Complex64)> {
        self.check_point(point)?;
        for (d, (supp, &x)) in self.support_points.iter().zip(point).enumerate() {
            if supp.contains(&x) {
                return Err(Error::SupportCollision { axis: d, point: x });
            }
        }
        let factors = axis_factors(&self.support_points, point);
        Ok(self.sums(&factors))
    }

    /// Denominator sum with the restriction rule applied at matched
    /// coordinates; the scaling used by the previous-denominator weighting.
    pub(crate) fn den_restricted(&self, point: &[Complex64]) -> Result<Complex64> {
        self.check_point(point)?;
        let factors = axis_factors(&self.support_points, point);
        if factors.iter().all(|f| matches!(f, AxisFactor::Matched(_))) {
            let tuple: Vec<usize> = factors
                .iter()
                .map(|f| match f {
                    AxisFactor::Matched(p) => *p,
                    AxisFactor::Free(_) => unreachable!(),
                })
                .collect();
            return Ok(self.weights[multi_to_lin(&tuple, &self.counts())]);
        }
        Ok(self.sums(&factors).1)
    }
}

/// Matrix-valued barycentric model: matrix support values, scalar weights,
/// shared scalar denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixBarycentricModel {
    support_points: Vec<Vec<Complex64>>,
    support_values: Vec<DMatrix<Complex64>>,
    weights: Vec<Complex64>,
    value_shape: (usize, usize),
}

impl MatrixBarycentricModel {
    pub fn new(
        support_points: Vec<Vec<Complex64>>,
        support_values: Vec<DMatrix<Complex64>>,
        weights: Vec<Complex64>,
    ) -> Result<Self> {
        let total = validate_support_points(&support_points)?;
        if support_values.len() != total {
            return Err(Error::ShapeMismatch {
                values: support_values.len(),
                expected: total,
            });
        }
        if weights.len() != total {
            return Err(Error::ShapeMismatch {
                values: weights.len(),
                expected: total,
            });
        }
        let value_shape = support_values[0].shape();
        for m in &support_values {
            if m.shape() != value_shape {
                return Err(Error::DimensionMismatch {
                    context: "support value matrices must share one shape".into(),
                });
            }
        }
        if weights.iter().all(|w| *w == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidOptions {
                context: "weight tensor is identically zero".into(),
            });
        }
        Ok(Self {
            support_points,
            support_values,
            weights,
            value_shape,
        })
    }

    pub fn ndim(&self) -> usize {
        self.support_points.len()
    }

    pub fn support_points(&self) -> &[Vec<Complex64>] {
        &self.support_points
    }

    pub fn support_values(&self) -> &[DMatrix<Complex64>] {
        &self.support_values
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn value_shape(&self) -> (usize, usize) {
        self.value_shape
    }

    pub fn counts(&self) -> Vec<usize> {
        self.support_points.iter().map(Vec::len).collect()
    }

    pub fn orders(&self) -> Vec<usize> {
        self.support_points.iter().map(|s| s.len() - 1).collect()
    }

    /// Scalar model built from one matrix entry, sharing points and weights.
    pub fn entry_model(&self, row: usize, col: usize) -> Result<BarycentricModel> {
        if row >= self.value_shape.0 || col >= self.value_shape.1 {
            return Err(Error::DimensionMismatch {
                context: format!("entry ({row},{col}) outside {:?}", self.value_shape),
            });
        }
        BarycentricModel::new(
            self.support_points.clone(),
            self.support_values.iter().map(|m| m[(row, col)]).collect(),
            self.weights.clone(),
        )
    }

    /// Entrywise evaluation with the shared scalar denominator.
    pub fn eval_matrix(&self, point: &[Complex64]) -> Result<DMatrix<Complex64>> {
        if point.len() != self.ndim() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "point has {} coordinates, model has {} variables",
                    point.len(),
                    self.ndim()
                ),
            });
        }
        let factors = axis_factors(&self.support_points, point);
        let counts = self.counts();
        if factors.iter().all(|f| matches!(f, AxisFactor::Matched(_))) {
            let tuple: Vec<usize> = factors
                .iter()
                .map(|f| match f {
                    AxisFactor::Matched(p) => *p,
                    AxisFactor::Free(_) => unreachable!(),
                })
                .collect();
            let lin = multi_to_lin(&tuple, &counts);
            if self.weights[lin] == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroWeightAtSupport { tuple });
            }
            return Ok(self.support_values[lin].clone());
        }
        let (rows, cols) = self.value_shape;
        let mut num = DMatrix::<Complex64>::zeros(rows, cols);
        let mut den = Complex64::new(0.0, 0.0);
        restricted_sum(&counts, &factors, |lin, cauchy| {
            let wf = self.weights[lin] * cauchy;
            den += wf;
            num.zip_apply(&self.support_values[lin], |n, h| *n += h * wf);
        });
        if den == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroDenominator {
                point: point.to_vec(),
            });
        }
        Ok(num / den)
    }
}
