//! The p-AAA driver: greedy tuple selection, per-variable order growth,
//! interpolation + linearized-LS weight update, and stopping logic. The
//! one-variable case runs through the identical code path.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::barycentric::BarycentricModel;
use crate::error::{Error, Result};
use crate::grid::{support_cross_values, Partition, TensorGrid};
use crate::loewner::{apply_weighting, assemble};
use crate::lsq::{min_unit, LsqSolution};

/// Fitting mode selected by front ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMode {
    /// Greedy interpolation/LS split (the adaptive algorithm).
    #[default]
    Greedy,
    /// One-shot interpolation on a user-supplied support partition; see
    /// [`interpolate_fixed`].
    Interpolate,
}

/// Options for [`fit`].
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Relative max-norm stopping tolerance.
    pub tol: f64,
    /// Iteration cap.
    pub max_iters: usize,
    /// Optional per-axis caps on the support counts `k_d`.
    pub max_orders: Option<Vec<usize>>,
    /// Scale LS rows by the previous iterate's reciprocal denominator.
    pub weighted: bool,
    /// Front-end dispatch; [`fit`] itself implements [`FitMode::Greedy`].
    pub mode: FitMode,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_iters: 100,
            max_orders: None,
            weighted: false,
            mode: FitMode::Greedy,
        }
    }
}

impl FitOptions {
    fn validate(&self, ndim: usize) -> Result<()> {
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidOptions {
                context: format!("tol must be positive, got {}", self.tol),
            });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidOptions {
                context: "max_iters must be at least 1".into(),
            });
        }
        if let Some(caps) = &self.max_orders {
            if caps.len() != ndim {
                return Err(Error::InvalidOptions {
                    context: format!("max_orders has {} entries for {} axes", caps.len(), ndim),
                });
            }
            if caps.contains(&0) {
                return Err(Error::InvalidOptions {
                    context: "max_orders entries must be at least 1".into(),
                });
            }
        }
        Ok(())
    }
}

/// Why the fit loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Relative max-norm error reached the tolerance.
    Converged,
    /// Iteration cap reached.
    IterationCap,
    /// Per-axis order caps blocked further growth.
    OrderCap,
    /// Support grew to cover the whole grid; everything is interpolated.
    AllInterpolated,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::IterationCap => "iteration_cap",
            StopReason::OrderCap => "order_cap",
            StopReason::AllInterpolated => "all_interpolated",
        }
    }
}

/// One greedy iteration record.
#[derive(Debug, Clone, PartialEq)]
pub struct FitIteration {
    /// 1-based iteration number.
    pub iter: usize,
    /// Coordinates of the greedy-selected grid tuple.
    pub selected: Vec<Complex64>,
    /// Grid multi-index of the selected tuple.
    pub selected_index: Vec<usize>,
    /// Which axes grew this iteration.
    pub grew: Vec<bool>,
    /// Support counts `k_d` after the step.
    pub support_counts: Vec<usize>,
    /// Relative max-norm error after the solve.
    pub rel_error: f64,
}

/// Per-iteration history plus the stop reason.
#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub iterations: Vec<FitIteration>,
    pub stop: StopReason,
}

impl FitTrace {
    /// Support counts after the last iteration (empty if none ran).
    pub fn final_counts(&self) -> Vec<usize> {
        self.iterations
            .last()
            .map(|it| it.support_counts.clone())
            .unwrap_or_default()
    }

    pub fn final_error(&self) -> Option<f64> {
        self.iterations.last().map(|it| it.rel_error)
    }
}

/// Absolute approximation errors over the whole grid, flat row-major.
/// Fails if the model has a pole (or overflows) on a grid tuple.
fn abs_error_tensor(grid: &TensorGrid, model: &BarycentricModel) -> Result<Vec<f64>> {
    let eval_one = |lin: usize| -> Result<f64> {
        let tuple = grid.multi_index(lin);
        let point = grid.point_at(&tuple);
        let approx = match model.eval(&point) {
            Ok(v) => v,
            Err(Error::ZeroDenominator { .. }) => {
                return Err(Error::PoleOnGrid {
                    tuple: tuple.clone(),
                    point,
                })
            }
            Err(e) => return Err(e),
        };
        let err = (grid.values()[lin] - approx).norm();
        if !err.is_finite() {
            return Err(Error::PoleOnGrid { tuple, point });
        }
        Ok(err)
    };

    #[cfg(feature = "parallel")]
    {
        (0..grid.len()).into_par_iter().map(eval_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..grid.len()).map(eval_one).collect()
    }
}

fn abs_error_tensor_vs_constant(grid: &TensorGrid, surrogate: Complex64) -> Vec<f64> {
    grid.values()
        .iter()
        .map(|h| (h - surrogate).norm())
        .collect()
}

/// Per-tuple absolute errors and the relative max-norm error ratio.
pub fn error_report(grid: &TensorGrid, model: &BarycentricModel) -> Result<(f64, Vec<f64>)> {
    let errors = abs_error_tensor(grid, model)?;
    Ok((relative_max(&errors, grid.max_abs()), errors))
}

/// Sequential variant of [`error_report`]; same result, one thread.
pub fn error_report_serial(grid: &TensorGrid, model: &BarycentricModel) -> Result<(f64, Vec<f64>)> {
    let mut errors = Vec::with_capacity(grid.len());
    for lin in 0..grid.len() {
        let tuple = grid.multi_index(lin);
        let point = grid.point_at(&tuple);
        let approx = match model.eval(&point) {
            Ok(v) => v,
            Err(Error::ZeroDenominator { .. }) => {
                return Err(Error::PoleOnGrid {
                    tuple: tuple.clone(),
                    point,
                })
            }
            Err(e) => return Err(e),
        };
        let err = (grid.values()[lin] - approx).norm();
        if !err.is_finite() {
            return Err(Error::PoleOnGrid { tuple, point });
        }
        errors.push(err);
    }
    Ok((relative_max(&errors, grid.max_abs()), errors))
}

fn relative_max(errors: &[f64], max_abs: f64) -> f64 {
    let max_err = errors.iter().copied().fold(0.0, f64::max);
    if max_err == 0.0 {
        0.0
    } else {
        max_err / max_abs
    }
}

/// Row-major-first argmax; ties resolve to the smallest flat index.
fn argmax(errors: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for i in 1..errors.len() {
        if errors[i] > errors[best] {
            best = i;
        }
    }
    (best, errors[best])
}

/// Grid tuple of maximum absolute error under the current model.
pub fn greedy_select(grid: &TensorGrid, model: &BarycentricModel) -> Result<Vec<usize>> {
    let errors = abs_error_tensor(grid, model)?;
    let (lin, err) = argmax(&errors);
    if err == 0.0 {
        return Err(Error::AllErrorsZero);
    }
    Ok(grid.multi_index(lin))
}

/// Order-0 model evaluating to `value` everywhere, anchored at the first
/// grid point of each axis.
fn constant_model(grid: &TensorGrid, value: Complex64) -> BarycentricModel {
    let points: Vec<Vec<Complex64>> = grid.axes().iter().map(|axis| vec![axis[0]]).collect();
    BarycentricModel::new(points, vec![value], vec![Complex64::new(1.0, 0.0)])
        .expect("order-0 model is always valid")
}

/// Interpolation model on a support set covering the whole grid: uniform
/// unit-norm weights make every tuple a removable singularity.
fn full_coverage_model(grid: &TensorGrid, part: &Partition) -> Result<BarycentricModel> {
    let total: usize = part.counts().iter().product();
    let w = Complex64::new(1.0 / (total as f64).sqrt(), 0.0);
    BarycentricModel::new(
        part.support_coords(grid.axes()),
        support_cross_values(grid, part)?,
        vec![w; total],
    )
}

fn solve_weights(
    grid: &TensorGrid,
    part: &Partition,
    previous: Option<&BarycentricModel>,
) -> Result<(BarycentricModel, LsqSolution)> {
    let mut system = assemble(grid, part)?;
    if let Some(prev) = previous {
        system = apply_weighting(&system, grid, prev)?;
    }
    let solution = min_unit(&system.matrix)?;
    let model = BarycentricModel::new(
        part.support_coords(grid.axes()),
        support_cross_values(grid, part)?,
        solution.a.iter().copied().collect(),
    )?;
    Ok((model, solution))
}

/// Run greedy p-AAA on a sampled grid.
///
/// Starts from the mean-of-samples surrogate, then repeats: pick the tuple
/// of maximum absolute error, grow the support of every axis whose selected
/// coordinate is new, rebuild the Loewner system, take the minimal right
/// singular vector as weights, and re-measure the grid error. Stops at the
/// tolerance, the iteration cap, the per-axis order caps, or full
/// interpolation.
pub fn fit(grid: &TensorGrid, opts: &FitOptions) -> Result<(BarycentricModel, FitTrace)> {
    opts.validate(grid.ndim())?;
    if opts.mode != FitMode::Greedy {
        return Err(Error::InvalidOptions {
            context: "fixed-support interpolation needs an explicit partition; call \
                      interpolate_fixed"
                .into(),
        });
    }
    for (d, axis) in grid.axes().iter().enumerate() {
        if axis.len() < 2 {
            return Err(Error::AxisTooShort {
                axis: d,
                len: axis.len(),
                needed: 2,
            });
        }
    }

    let max_abs = grid.max_abs();
    let mean = grid.values().iter().sum::<Complex64>() / Complex64::new(grid.len() as f64, 0.0);

    let mut model = constant_model(grid, mean);
    let mut abs_errors = abs_error_tensor_vs_constant(grid, mean);
    let mut rel_error = relative_max(&abs_errors, max_abs);
    let mut iterations = Vec::new();
    let mut part = Partition::empty(grid.ndim());

    if rel_error <= opts.tol {
        return Ok((
            model,
            FitTrace {
                iterations,
                stop: StopReason::Converged,
            },
        ));
    }

    let caps = opts.max_orders.as_deref();
    let stop;
    let mut iter = 0;
    loop {
        iter += 1;

        let (sel_lin, sel_err) = argmax(&abs_errors);
        let sel_tuple = grid.multi_index(sel_lin);

        if part.contains_tuple(&sel_tuple) {
            // An interpolated tuple can only win the greedy search through
            // rounding noise (or a zero weight). Treat noise as converged;
            // anything larger is a genuine failure the caller must see.
            if sel_err <= 1e2 * f64::EPSILON * max_abs {
                stop = StopReason::Converged;
                break;
            }
            return Err(Error::StalledGreedy {
                tuple: sel_tuple,
                error: sel_err,
            });
        }

        let mut grew = vec![false; grid.ndim()];
        for d in 0..grid.ndim() {
            if part.support_position(d, sel_tuple[d]).is_none() {
                if let Some(caps) = caps {
                    if part.counts()[d] >= caps[d] {
                        continue;
                    }
                }
                part = part.add_support(d, sel_tuple[d])?;
                grew[d] = true;
            }
        }
        if !grew.iter().any(|&g| g) {
            // Order caps blocked every admissible axis; support is unchanged
            // so re-solving would reproduce the current model.
            stop = StopReason::OrderCap;
            break;
        }

        let covered = part.counts().iter().zip(grid.shape()).all(|(k, n)| k == n);
        if covered {
            // no LS rows remain: every sample interpolates exactly
            model = full_coverage_model(grid, &part)?;
        } else {
            let previous = (opts.weighted && iter > 1).then_some(&model);
            let (next, _) = solve_weights(grid, &part, previous)?;
            model = next;
        }

        abs_errors = abs_error_tensor(grid, &model)?;
        rel_error = relative_max(&abs_errors, max_abs);

        iterations.push(FitIteration {
            iter,
            selected: grid.point_at(&sel_tuple),
            selected_index: sel_tuple,
            grew,
            support_counts: part.counts(),
            rel_error,
        });

        if covered {
            stop = StopReason::AllInterpolated;
            break;
        }
        if rel_error <= opts.tol {
            stop = StopReason::Converged;
            break;
        }
        if iter >= opts.max_iters {
            stop = StopReason::IterationCap;
            break;
        }
    }

    Ok((model, FitTrace { iterations, stop }))
}

/// One-shot interpolation on a fixed support partition: weights from the
/// null direction (or best LS direction) of the assembled Loewner system.
/// A small `sigma_min` in the returned solution signals a true interpolant.
pub fn interpolate_fixed(
    grid: &TensorGrid,
    part: &Partition,
) -> Result<(BarycentricModel, LsqSolution)> {
    solve_weights(grid, part, None)
}
