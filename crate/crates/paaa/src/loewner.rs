//! Loewner matrices for the linearized least-squares fit.
//!
//! One row rule covers every dimension: for a grid tuple outside the
//! support cross product, the entry at support multi-index `I` is
//! `(H(tuple) − H(σ_I)) / Π_{d free} (x_d − σ^{(d)}_{I_d})`, restricted to
//! the multi-indices that agree with the tuple on every matched axis.
//! Matched axes drop their Cauchy factor; all other entries are exactly
//! zero, which reproduces the 1-D Loewner matrix and the block-diagonal
//! 2-D stacking as special cases.

use nalgebra::DMatrix;
use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::barycentric::BarycentricModel;
use crate::error::{Error, Result};
use crate::grid::{lin_to_multi, multi_to_lin, support_cross_values, Partition, TensorGrid};

/// Assembled linearized-LS system. Rows follow row-major grid-tuple order
/// over the non-support tuples; columns follow row-major weight order.
#[derive(Debug, Clone)]
pub struct LoewnerSystem {
    pub matrix: DMatrix<Complex64>,
    /// Grid multi-index of each row.
    pub row_map: Vec<Vec<usize>>,
}

/// Classic 1-D Loewner matrix: entry `(i,j) = (ĝ_i − g_j)/(σ̂_i − σ_j)`.
pub fn loewner_1d(
    support_pts: &[Complex64],
    support_vals: &[Complex64],
    other_pts: &[Complex64],
    other_vals: &[Complex64],
) -> Result<DMatrix<Complex64>> {
    if support_pts.len() != support_vals.len() || other_pts.len() != other_vals.len() {
        return Err(Error::DimensionMismatch {
            context: "point and value lists must have equal length".into(),
        });
    }
    for &s in support_pts {
        if other_pts.contains(&s) {
            return Err(Error::SupportCollision { axis: 0, point: s });
        }
    }
    Ok(DMatrix::from_fn(
        other_pts.len(),
        support_pts.len(),
        |i, j| (other_vals[i] - support_vals[j]) / (other_pts[i] - support_pts[j]),
    ))
}

/// Shared per-assembly state: support coordinates and cross values.
struct RowBuilder<'a> {
    grid: &'a TensorGrid,
    part: &'a Partition,
    counts: Vec<usize>,
    cols: usize,
    support_coords: Vec<Vec<Complex64>>,
    cross_vals: Vec<Complex64>,
}

impl<'a> RowBuilder<'a> {
    fn new(grid: &'a TensorGrid, part: &'a Partition) -> Result<Self> {
        part.validate_for(grid.shape())?;
        let counts = part.counts();
        for (d, &k) in counts.iter().enumerate() {
            if k == 0 {
                return Err(Error::EmptySupport { axis: d });
            }
        }
        let cols = counts.iter().product();
        Ok(Self {
            grid,
            part,
            counts,
            cols,
            support_coords: part.support_coords(grid.axes()),
            cross_vals: support_cross_values(grid, part)?,
        })
    }

    /// Fill one row for `tuple`; `out` must hold `cols` entries.
    fn fill_row(&self, tuple: &[usize], out: &mut [Complex64]) -> Result<()> {
        out.fill(Complex64::new(0.0, 0.0));
        let ndim = self.grid.ndim();
        let point = self.grid.point_at(tuple);
        let h_tuple = self.grid.value_at(tuple);

        // Matched axes pin the support position; free axes carry reciprocals.
        let mut pinned: Vec<Option<usize>> = Vec::with_capacity(ndim);
        let mut recip: Vec<Vec<Complex64>> = Vec::with_capacity(ndim);
        let mut all_matched = true;
        for d in 0..ndim {
            match self.part.support_position(d, tuple[d]) {
                Some(pos) => {
                    pinned.push(Some(pos));
                    recip.push(Vec::new());
                }
                None => {
                    all_matched = false;
                    pinned.push(None);
                    recip.push(
                        self.support_coords[d]
                            .iter()
                            .map(|&s| (point[d] - s).finv())
                            .collect(),
                    );
                }
            }
        }
        if all_matched {
            return Err(Error::NoFreeSamples);
        }

        let free_shape: Vec<usize> = pinned
            .iter()
            .zip(&self.counts)
            .map(|(p, &k)| if p.is_some() { 1 } else { k })
            .collect();
        let total: usize = free_shape.iter().product();
        let mut multi = vec![0usize; ndim];
        for lin in 0..total {
            let reduced = lin_to_multi(lin, &free_shape);
            let mut cauchy = Complex64::new(1.0, 0.0);
            for d in 0..ndim {
                match pinned[d] {
                    Some(pos) => multi[d] = pos,
                    None => {
                        multi[d] = reduced[d];
                        cauchy *= recip[d][reduced[d]];
                    }
                }
            }
            let col = multi_to_lin(&multi, &self.counts);
            out[col] = (h_tuple - self.cross_vals[col]) * cauchy;
        }
        Ok(())
    }
}

/// Single Loewner row for one grid tuple, in row-major weight order.
/// The tuple must not lie fully inside the support cross product.
pub fn loewner_row(grid: &TensorGrid, part: &Partition, tuple: &[usize]) -> Result<Vec<Complex64>> {
    if tuple.len() != grid.ndim() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "tuple has {} entries, grid has {} axes",
                tuple.len(),
                grid.ndim()
            ),
        });
    }
    for (d, (&i, &n)) in tuple.iter().zip(grid.shape()).enumerate() {
        if i >= n {
            return Err(Error::IndexOutOfBounds {
                axis: d,
                index: i,
                len: n,
            });
        }
    }
    let builder = RowBuilder::new(grid, part)?;
    let mut row = vec![Complex64::new(0.0, 0.0); builder.cols];
    builder.fill_row(tuple, &mut row)?;
    Ok(row)
}

fn free_tuples(grid: &TensorGrid, part: &Partition) -> Vec<Vec<usize>> {
    (0..grid.len())
        .map(|lin| lin_to_multi(lin, grid.shape()))
        .filter(|tuple| !part.contains_tuple(tuple))
        .collect()
}

fn assemble_with(grid: &TensorGrid, part: &Partition, parallel: bool) -> Result<LoewnerSystem> {
    let builder = RowBuilder::new(grid, part)?;
    let row_map = free_tuples(grid, part);
    if row_map.is_empty() {
        return Err(Error::NoFreeSamples);
    }
    let cols = builder.cols;
    let mut flat = vec![Complex64::new(0.0, 0.0); row_map.len() * cols];

    #[cfg(feature = "parallel")]
    if parallel {
        flat.par_chunks_mut(cols)
            .zip(row_map.par_iter())
            .try_for_each(|(out, tuple)| builder.fill_row(tuple, out))?;
        let matrix = DMatrix::from_row_slice(row_map.len(), cols, &flat);
        return Ok(LoewnerSystem { matrix, row_map });
    }
    let _ = parallel;
    for (out, tuple) in flat.chunks_mut(cols).zip(&row_map) {
        builder.fill_row(tuple, out)?;
    }
    let matrix = DMatrix::from_row_slice(row_map.len(), cols, &flat);
    Ok(LoewnerSystem { matrix, row_map })
}

/// Stack [`loewner_row`] over every grid tuple outside the support cross
/// product, in row-major tuple order.
pub fn assemble(grid: &TensorGrid, part: &Partition) -> Result<LoewnerSystem> {
    assemble_with(grid, part, true)
}

/// Sequential variant of [`assemble`]; same result, one thread.
pub fn assemble_serial(grid: &TensorGrid, part: &Partition) -> Result<LoewnerSystem> {
    assemble_with(grid, part, false)
}

/// Scale each row by the reciprocal of the previous iterate's denominator
/// at that row's tuple. Returns a new system; the input is untouched.
pub fn apply_weighting(
    system: &LoewnerSystem,
    grid: &TensorGrid,
    previous: &BarycentricModel,
) -> Result<LoewnerSystem> {
    let mut matrix = system.matrix.clone();
    for (r, tuple) in system.row_map.iter().enumerate() {
        let point = grid.point_at(tuple);
        let den = previous.den_restricted(&point)?;
        if den == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroWeightingDenominator {
                tuple: tuple.clone(),
            });
        }
        let scale = den.finv();
        for e in matrix.row_mut(r).iter_mut() {
            *e *= scale;
        }
    }
    Ok(LoewnerSystem {
        matrix,
        row_map: system.row_map.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TensorGrid;

    fn r(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn loewner_1d_quadratic_data() {
        // data h = s^2: support {0}, others {1, 2}
        let m = loewner_1d(&[r(0.0)], &[r(0.0)], &[r(1.0), r(2.0)], &[r(1.0), r(4.0)]).unwrap();
        assert_eq!(m.nrows(), 2);
        assert_eq!(m[(0, 0)], r(1.0));
        assert_eq!(m[(1, 0)], r(2.0));
    }

    #[test]
    fn loewner_1d_constant_data_is_zero() {
        let m = loewner_1d(
            &[r(0.0), r(3.0)],
            &[r(5.0), r(5.0)],
            &[r(1.0), r(2.0)],
            &[r(5.0), r(5.0)],
        )
        .unwrap();
        assert!(m.iter().all(|z| *z == r(0.0)));
    }

    #[test]
    fn loewner_1d_identity_data_is_ones() {
        let m = loewner_1d(&[r(0.5)], &[r(0.5)], &[r(1.0), r(-2.0)], &[r(1.0), r(-2.0)]).unwrap();
        assert!(m.iter().all(|z| (*z - r(1.0)).norm() < 1e-15));
    }

    #[test]
    fn loewner_1d_coincident_points_rejected() {
        let err = loewner_1d(&[r(1.0)], &[r(0.0)], &[r(1.0)], &[r(0.0)]);
        assert!(matches!(err, Err(Error::SupportCollision { .. })));
    }

    fn toy_grid_2d() -> TensorGrid {
        // H(s, p) = s^2 + 2 p on a 3x3 grid
        let s_axis = vec![r(0.0), r(1.0), r(2.0)];
        let p_axis = vec![r(0.0), r(1.0), r(3.0)];
        let mut vals = Vec::new();
        for &s in &s_axis {
            for &p in &p_axis {
                vals.push(s * s + r(2.0) * p);
            }
        }
        TensorGrid::new(vec![s_axis, p_axis], vals).unwrap()
    }

    #[test]
    fn row_for_fully_free_tuple_matches_formula() {
        let grid = toy_grid_2d();
        let part = Partition::from_support(vec![vec![0], vec![0]]).unwrap();
        // tuple (2, 2): both coordinates free
        let row = loewner_row(&grid, &part, &[2, 2]).unwrap();
        assert_eq!(row.len(), 1);
        let expect = (grid.value_at(&[2, 2]) - grid.value_at(&[0, 0]))
            / ((r(2.0) - r(0.0)) * (r(3.0) - r(0.0)));
        assert!((row[0] - expect).norm() < 1e-15);
    }

    #[test]
    fn row_for_matched_axis_restricts_to_block() {
        let grid = toy_grid_2d();
        let part = Partition::from_support(vec![vec![0, 2], vec![0]]).unwrap();
        // tuple (0, 1): s-coordinate matches support position 0, p free
        let row = loewner_row(&grid, &part, &[0, 1]).unwrap();
        assert_eq!(row.len(), 2);
        let expect = (grid.value_at(&[0, 1]) - grid.value_at(&[0, 0])) / (r(1.0) - r(0.0));
        assert!((row[0] - expect).norm() < 1e-15);
        // entry for support multi-index (1, 0) must be exactly zero
        assert_eq!(row[1], r(0.0));
    }

    #[test]
    fn row_rejects_interpolated_tuple() {
        let grid = toy_grid_2d();
        let part = Partition::from_support(vec![vec![0], vec![0]]).unwrap();
        assert!(matches!(
            loewner_row(&grid, &part, &[0, 0]),
            Err(Error::NoFreeSamples)
        ));
    }

    #[test]
    fn one_dimensional_rows_match_loewner_1d() {
        let pts: Vec<Complex64> = (0..6).map(|i| r(i as f64 * 0.5 - 1.0)).collect();
        let vals: Vec<Complex64> = pts.iter().map(|&s| s * s * s + c(0.3, 0.2)).collect();
        let grid = TensorGrid::new(vec![pts.clone()], vals.clone()).unwrap();
        let part = Partition::from_support(vec![vec![1, 4]]).unwrap();

        let support_pts = vec![pts[1], pts[4]];
        let support_vals = vec![vals[1], vals[4]];
        let other: Vec<usize> = vec![0, 2, 3, 5];
        let other_pts: Vec<Complex64> = other.iter().map(|&i| pts[i]).collect();
        let other_vals: Vec<Complex64> = other.iter().map(|&i| vals[i]).collect();
        let reference = loewner_1d(&support_pts, &support_vals, &other_pts, &other_vals).unwrap();

        let sys = assemble(&grid, &part).unwrap();
        assert_eq!(sys.matrix.nrows(), 4);
        for (r_idx, &orig) in other.iter().enumerate() {
            assert_eq!(sys.row_map[r_idx], vec![orig]);
            for j in 0..2 {
                assert!((sys.matrix[(r_idx, j)] - reference[(r_idx, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn assemble_counts_rows_and_columns() {
        let grid = TensorGrid::new(
            vec![vec![r(0.0), r(1.0)], vec![r(0.0), r(1.0)]],
            vec![r(1.0), r(2.0), r(3.0), r(4.0)],
        )
        .unwrap();
        let part = Partition::from_support(vec![vec![0], vec![0]]).unwrap();
        let sys = assemble(&grid, &part).unwrap();
        assert_eq!(sys.matrix.nrows(), 3);
        assert_eq!(sys.matrix.ncols(), 1);
        assert_eq!(sys.row_map, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn assemble_requires_support_everywhere() {
        let grid = toy_grid_2d();
        let part = Partition::from_support(vec![vec![0], vec![]]).unwrap();
        assert!(matches!(
            assemble(&grid, &part),
            Err(Error::EmptySupport { axis: 1 })
        ));
    }

    #[test]
    fn assemble_rejects_full_coverage() {
        let grid = TensorGrid::new(vec![vec![r(0.0), r(1.0)]], vec![r(1.0), r(2.0)]).unwrap();
        let part = Partition::from_support(vec![vec![0, 1]]).unwrap();
        assert!(matches!(assemble(&grid, &part), Err(Error::NoFreeSamples)));
    }

    #[test]
    fn serial_and_parallel_agree() {
        let grid = toy_grid_2d();
        let part = Partition::from_support(vec![vec![1], vec![2, 0]]).unwrap();
        let a = assemble(&grid, &part).unwrap();
        let b = assemble_serial(&grid, &part).unwrap();
        assert_eq!(a.row_map, b.row_map);
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn linearization_identity_on_free_rows() {
        // random-ish small grid, weights; identity row·a = H·d − n on free tuples
        let s_axis = vec![r(-1.0), r(-0.2), r(0.7), r(1.5)];
        let p_axis = vec![r(0.1), r(0.9), r(2.0)];
        let mut vals = Vec::new();
        for (i, &s) in s_axis.iter().enumerate() {
            for (j, &p) in p_axis.iter().enumerate() {
                vals.push(s * s - p * r(0.5) + c(0.1 * i as f64, 0.2 * j as f64));
            }
        }
        let grid = TensorGrid::new(vec![s_axis, p_axis], vals).unwrap();
        let part = Partition::from_support(vec![vec![0, 2], vec![1]]).unwrap();
        let weights = vec![c(0.6, -0.1), c(-0.3, 0.8)];
        let model = BarycentricModel::new(
            part.support_coords(grid.axes()),
            support_cross_values(&grid, &part).unwrap(),
            weights.clone(),
        )
        .unwrap();

        let sys = assemble(&grid, &part).unwrap();
        for (row_idx, tuple) in sys.row_map.iter().enumerate() {
            let free_everywhere =
                (0..grid.ndim()).all(|d| part.support_position(d, tuple[d]).is_none());
            if !free_everywhere {
                continue;
            }
            let point = grid.point_at(tuple);
            let (n, d) = model.num_den(&point).unwrap();
            let h = grid.value_at(tuple);
            let lhs: Complex64 = (0..weights.len())
                .map(|j| sys.matrix[(row_idx, j)] * weights[j])
                .sum();
            let rhs = h * d - n;
            assert!(
                (lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0),
                "row {row_idx}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn weighting_scales_each_row_by_previous_denominator() {
        let grid = toy_grid_2d();
        let part = Partition::from_support(vec![vec![0], vec![0]]).unwrap();
        let sys = assemble(&grid, &part).unwrap();
        let model = BarycentricModel::new(
            vec![vec![r(10.0)], vec![r(10.0)]],
            vec![r(1.0)],
            vec![r(2.0)],
        )
        .unwrap();
        let weighted = apply_weighting(&sys, &grid, &model).unwrap();
        for (r_idx, tuple) in sys.row_map.iter().enumerate() {
            let point = grid.point_at(tuple);
            let den = r(2.0) * ((point[0] - r(10.0)) * (point[1] - r(10.0))).finv();
            for j in 0..sys.matrix.ncols() {
                let expect = sys.matrix[(r_idx, j)] / den;
                let tol = 1e-13 * expect.norm().max(1.0);
                assert!((weighted.matrix[(r_idx, j)] - expect).norm() < tol);
            }
        }
    }

    #[test]
    fn uniform_row_scaling_keeps_minimizer() {
        // scaling every row by the same constant must not move the argmin
        let grid = toy_grid_2d();
        let part = Partition::from_support(vec![vec![0, 1], vec![0, 2]]).unwrap();
        let sys = assemble(&grid, &part).unwrap();
        let scaled = LoewnerSystem {
            matrix: sys.matrix.map(|z| z * 4.0),
            row_map: sys.row_map.clone(),
        };
        let a = crate::lsq::min_unit(&sys.matrix).unwrap().a;
        let b = crate::lsq::min_unit(&scaled.matrix).unwrap().a;
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn weighting_rejects_zero_denominator() {
        let grid = toy_grid_2d();
        let part = Partition::from_support(vec![vec![0], vec![0]]).unwrap();
        let sys = assemble(&grid, &part).unwrap();
        // antisymmetric weights put a denominator zero at s = 1 (midpoint of 0, 2)
        let model = BarycentricModel::new(
            vec![vec![r(0.0), r(2.0)], vec![r(10.0)]],
            vec![r(1.0), r(1.0)],
            vec![r(1.0), r(1.0)],
        )
        .unwrap();
        // d(s,p) = [1/(s-0) + 1/(s-2)] / (p-10) = 0 at s = 1 for any p
        let err = apply_weighting(&sys, &grid, &model);
        assert!(matches!(err, Err(Error::ZeroWeightingDenominator { .. })));
    }
}
