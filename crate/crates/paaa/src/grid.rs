//! Tensor-product sample grids and the support/LS index partition.
//!
//! A grid stores per-variable sample axes plus the sampled values as a flat
//! row-major tensor (last axis fastest). A [`Partition`] splits each axis
//! into the ordered support (interpolated) indices and the implied rest.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Flat row-major index of a multi-index.
pub(crate) fn multi_to_lin(index: &[usize], shape: &[usize]) -> usize {
    let mut lin = 0;
    for (i, n) in index.iter().zip(shape) {
        lin = lin * n + i;
    }
    lin
}

/// Multi-index of a flat row-major index.
pub(crate) fn lin_to_multi(mut lin: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for d in (0..shape.len()).rev() {
        out[d] = lin % shape[d];
        lin /= shape[d];
    }
    out
}

fn validate_axes(axes: &[Vec<Complex64>]) -> Result<usize> {
    let mut total = 1usize;
    for (d, axis) in axes.iter().enumerate() {
        if axis.is_empty() {
            return Err(Error::AxisTooShort {
                axis: d,
                len: 0,
                needed: 1,
            });
        }
        for i in 0..axis.len() {
            for j in i + 1..axis.len() {
                if axis[i] == axis[j] {
                    return Err(Error::DuplicateAxisPoint {
                        axis: d,
                        point: axis[i],
                    });
                }
            }
        }
        total *= axis.len();
    }
    Ok(total)
}

/// Sampled scalar data on a tensor-product grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    axes: Vec<Vec<Complex64>>,
    shape: Vec<usize>,
    values: Vec<Complex64>,
}

impl TensorGrid {
    /// Build a validated grid from per-variable axes and flat row-major values.
    pub fn new(axes: Vec<Vec<Complex64>>, values: Vec<Complex64>) -> Result<Self> {
        let total = validate_axes(&axes)?;
        if values.len() != total {
            return Err(Error::ShapeMismatch {
                values: values.len(),
                expected: total,
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteValue { index: i });
            }
        }
        let shape = axes.iter().map(Vec::len).collect();
        Ok(Self {
            axes,
            shape,
            values,
        })
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<Complex64>] {
        &self.axes
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Flat row-major values (last axis fastest).
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Total number of sample tuples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, index: &[usize]) -> Complex64 {
        self.values[multi_to_lin(index, &self.shape)]
    }

    /// Coordinates of the given grid tuple.
    pub fn point_at(&self, index: &[usize]) -> Vec<Complex64> {
        index
            .iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis[i])
            .collect()
    }

    pub fn multi_index(&self, lin: usize) -> Vec<usize> {
        lin_to_multi(lin, &self.shape)
    }

    /// Largest absolute sample value, the max-norm normalizer.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Sampled matrix data on a tensor-product grid. All entries share one
/// matrix shape (rows = outputs, cols = inputs).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTensorGrid {
    axes: Vec<Vec<Complex64>>,
    shape: Vec<usize>,
    value_shape: (usize, usize),
    values: Vec<DMatrix<Complex64>>,
}

impl MatrixTensorGrid {
    pub fn new(axes: Vec<Vec<Complex64>>, values: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let total = validate_axes(&axes)?;
        if values.len() != total {
            return Err(Error::ShapeMismatch {
                values: values.len(),
                expected: total,
            });
        }
        let value_shape = match values.first() {
            Some(m) => m.shape(),
            None => {
                return Err(Error::ShapeMismatch {
                    values: 0,
                    expected: total,
                })
            }
        };
        for (i, m) in values.iter().enumerate() {
            if m.shape() != value_shape {
                return Err(Error::DimensionMismatch {
                    context: format!(
                        "matrix at flat index {i} has shape {:?}, expected {:?}",
                        m.shape(),
                        value_shape
                    ),
                });
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFiniteValue { index: i });
            }
        }
        let shape = axes.iter().map(Vec::len).collect();
        Ok(Self {
            axes,
            shape,
            value_shape,
            values,
        })
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<Complex64>] {
        &self.axes
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// (rows, cols) of every sample matrix.
    pub fn value_shape(&self) -> (usize, usize) {
        self.value_shape
    }

    pub fn values(&self) -> &[DMatrix<Complex64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at(&self, index: &[usize]) -> &DMatrix<Complex64> {
        &self.values[multi_to_lin(index, &self.shape)]
    }

    pub fn point_at(&self, index: &[usize]) -> Vec<Complex64> {
        index
            .iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis[i])
            .collect()
    }

    pub fn multi_index(&self, lin: usize) -> Vec<usize> {
        lin_to_multi(lin, &self.shape)
    }

    /// Largest absolute entry over all sample matrices.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|m| m.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }
}

/// Per-axis split into ordered support indices; the complement is implied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    support: Vec<Vec<usize>>,
}

impl Partition {
    /// Empty support on every axis.
    pub fn empty(ndim: usize) -> Self {
        Self {
            support: vec![Vec::new(); ndim],
        }
    }

    /// Partition from explicit per-axis support index lists.
    pub fn from_support(support: Vec<Vec<usize>>) -> Result<Self> {
        for (d, list) in support.iter().enumerate() {
            for i in 0..list.len() {
                for j in i + 1..list.len() {
                    if list[i] == list[j] {
                        return Err(Error::DuplicateSupport {
                            axis: d,
                            index: list[i],
                        });
                    }
                }
            }
        }
        Ok(Self { support })
    }

    pub fn ndim(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[Vec<usize>] {
        &self.support
    }

    /// Number of support points per axis (`k_d`).
    pub fn counts(&self) -> Vec<usize> {
        self.support.iter().map(Vec::len).collect()
    }

    /// Position of `index` within the support list of `axis`, if present.
    pub fn support_position(&self, axis: usize, index: usize) -> Option<usize> {
        self.support[axis].iter().position(|&i| i == index)
    }

    /// True when every coordinate of the tuple is a support index.
    pub fn contains_tuple(&self, tuple: &[usize]) -> bool {
        tuple
            .iter()
            .zip(&self.support)
            .all(|(&i, list)| list.contains(&i))
    }

    /// Append `index` to the support of `axis`, preserving order.
    pub fn add_support(&self, axis: usize, index: usize) -> Result<Self> {
        if axis >= self.support.len() {
            return Err(Error::IndexOutOfBounds {
                axis,
                index,
                len: self.support.len(),
            });
        }
        if self.support[axis].contains(&index) {
            return Err(Error::DuplicateSupport { axis, index });
        }
        let mut out = self.clone();
        out.support[axis].push(index);
        Ok(out)
    }

    /// Check index bounds against a grid shape.
    pub fn validate_for(&self, shape: &[usize]) -> Result<()> {
        if self.support.len() != shape.len() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "partition has {} axes, grid has {}",
                    self.support.len(),
                    shape.len()
                ),
            });
        }
        for (d, list) in self.support.iter().enumerate() {
            for &i in list {
                if i >= shape[d] {
                    return Err(Error::IndexOutOfBounds {
                        axis: d,
                        index: i,
                        len: shape[d],
                    });
                }
            }
        }
        Ok(())
    }

    /// Support coordinates per axis, in selection order.
    pub fn support_coords(&self, axes: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        self.support
            .iter()
            .zip(axes)
            .map(|(list, axis)| list.iter().map(|&i| axis[i]).collect())
            .collect()
    }

    /// Rebuild a partition from support coordinates that were taken from
    /// the given axes; matching is exact.
    pub fn from_coords(axes: &[Vec<Complex64>], coords: &[Vec<Complex64>]) -> Result<Self> {
        if axes.len() != coords.len() {
            return Err(Error::DimensionMismatch {
                context: format!("{} coordinate lists for {} axes", coords.len(), axes.len()),
            });
        }
        let mut support = Vec::with_capacity(axes.len());
        for (d, (axis, chosen)) in axes.iter().zip(coords).enumerate() {
            let mut list = Vec::with_capacity(chosen.len());
            for &point in chosen {
                let idx = axis
                    .iter()
                    .position(|&x| x == point)
                    .ok_or(Error::SupportCollision { axis: d, point })?;
                list.push(idx);
            }
            support.push(list);
        }
        Self::from_support(support)
    }
}

/// Sampled values at the support cross product, `k_1 × … × k_D` row-major,
/// ordered by each axis's support-selection order.
pub fn support_cross_values(grid: &TensorGrid, part: &Partition) -> Result<Vec<Complex64>> {
    part.validate_for(grid.shape())?;
    let counts = part.counts();
    let total: usize = counts.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut tuple = vec![0usize; grid.ndim()];
    for lin in 0..total {
        let multi = lin_to_multi(lin, &counts);
        for (d, &pos) in multi.iter().enumerate() {
            tuple[d] = part.support()[d][pos];
        }
        out.push(grid.value_at(&tuple));
    }
    Ok(out)
}

/// Matrix-valued analogue of [`support_cross_values`].
pub fn support_cross_matrices(
    grid: &MatrixTensorGrid,
    part: &Partition,
) -> Result<Vec<DMatrix<Complex64>>> {
    part.validate_for(grid.shape())?;
    let counts = part.counts();
    let total: usize = counts.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut tuple = vec![0usize; grid.ndim()];
    for lin in 0..total {
        let multi = lin_to_multi(lin, &counts);
        for (d, &pos) in multi.iter().enumerate() {
            tuple[d] = part.support()[d][pos];
        }
        out.push(grid.value_at(&tuple).clone());
    }
    Ok(out)
}
