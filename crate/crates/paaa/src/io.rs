//! File formats: grid JSON/CSV, model JSON, trace JSON lines.
//!
//! Complex numbers are always `[re, im]` pairs; tensors are flat row-major
//! arrays. serde_json prints shortest round-trip decimals, so write → read
//! reproduces every value bit-exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::barycentric::{BarycentricModel, MatrixBarycentricModel};
use crate::error::{Error, Result};
use crate::fit::FitTrace;
use crate::grid::{MatrixTensorGrid, TensorGrid};

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().copied().map(pair).collect()
}

fn complexes(ps: &[[f64; 2]]) -> Vec<Complex64> {
    ps.iter().copied().map(complex).collect()
}

fn parse_err(context: impl Into<String>) -> Error {
    Error::InvalidOptions {
        context: context.into(),
    }
}

// ---------------------------------------------------------------------------
// Grid JSON

#[derive(Serialize, Deserialize)]
struct GridJson {
    axes: Vec<Vec<[f64; 2]>>,
    shape: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value_shape: Option<[usize; 2]>,
    values: serde_json::Value,
}

pub fn grid_to_json(grid: &TensorGrid) -> String {
    let file = GridJson {
        axes: grid.axes().iter().map(|a| pairs(a)).collect(),
        shape: grid.shape().to_vec(),
        value_shape: None,
        values: serde_json::to_value(pairs(grid.values())).expect("pairs serialize"),
    };
    serde_json::to_string(&file).expect("grid serializes")
}

pub fn matrix_grid_to_json(grid: &MatrixTensorGrid) -> String {
    let (rows, cols) = grid.value_shape();
    let values: Vec<Vec<[f64; 2]>> = grid
        .values()
        .iter()
        .map(|m| {
            let mut flat = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    flat.push(pair(m[(r, c)]));
                }
            }
            flat
        })
        .collect();
    let file = GridJson {
        axes: grid.axes().iter().map(|a| pairs(a)).collect(),
        shape: grid.shape().to_vec(),
        value_shape: Some([rows, cols]),
        values: serde_json::to_value(values).expect("pairs serialize"),
    };
    serde_json::to_string(&file).expect("grid serializes")
}

/// Either kind of grid, as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum GridData {
    Scalar(TensorGrid),
    Matrix(MatrixTensorGrid),
}

pub fn grid_from_json(text: &str) -> Result<GridData> {
    let file: GridJson =
        serde_json::from_str(text).map_err(|e| parse_err(format!("grid JSON: {e}")))?;
    let axes: Vec<Vec<Complex64>> = file.axes.iter().map(|a| complexes(a)).collect();
    let axis_shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    if file.shape != axis_shape {
        return Err(parse_err(format!(
            "grid JSON: shape field {:?} does not match axis lengths {:?}",
            file.shape, axis_shape
        )));
    }
    match file.value_shape {
        None => {
            let values: Vec<[f64; 2]> = serde_json::from_value(file.values)
                .map_err(|e| parse_err(format!("grid JSON values: {e}")))?;
            Ok(GridData::Scalar(TensorGrid::new(axes, complexes(&values))?))
        }
        Some([rows, cols]) => {
            let values: Vec<Vec<[f64; 2]>> = serde_json::from_value(file.values)
                .map_err(|e| parse_err(format!("grid JSON values: {e}")))?;
            let mut mats = Vec::with_capacity(values.len());
            for flat in &values {
                if flat.len() != rows * cols {
                    return Err(parse_err(format!(
                        "grid JSON: matrix value has {} entries, value_shape says {}",
                        flat.len(),
                        rows * cols
                    )));
                }
                mats.push(DMatrix::from_fn(rows, cols, |r, c| {
                    complex(flat[r * cols + c])
                }));
            }
            Ok(GridData::Matrix(MatrixTensorGrid::new(axes, mats)?))
        }
    }
}

// ---------------------------------------------------------------------------
// Grid CSV (two variables, real data)

/// Two-variable CSV layout: first row lists the second-axis samples, first
/// column the first-axis samples, body holds real values. Grids with any
/// nonzero imaginary part are rejected rather than truncated.
pub fn grid_to_csv(grid: &TensorGrid) -> Result<String> {
    if grid.ndim() != 2 {
        return Err(Error::DimensionMismatch {
            context: format!("CSV grids are two-variable; got {} axes", grid.ndim()),
        });
    }
    let all_real = grid
        .axes()
        .iter()
        .flatten()
        .chain(grid.values())
        .all(|z| z.im == 0.0);
    if !all_real {
        return Err(Error::InvalidOptions {
            context: "CSV grids hold real data; this grid has nonzero imaginary parts".into(),
        });
    }
    let mut out = String::new();
    out.push_str(&format!(
        ",{}\n",
        grid.axes()[1]
            .iter()
            .map(|p| format!("{}", p.re))
            .collect::<Vec<_>>()
            .join(",")
    ));
    for (i, s) in grid.axes()[0].iter().enumerate() {
        let row: Vec<String> = (0..grid.axes()[1].len())
            .map(|j| format!("{}", grid.value_at(&[i, j]).re))
            .collect();
        out.push_str(&format!("{},{}\n", s.re, row.join(",")));
    }
    Ok(out)
}

pub fn grid_from_csv(text: &str) -> Result<TensorGrid> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| parse_err("CSV grid: empty file"))?;
    let p_axis: Vec<Complex64> = header
        .split(',')
        .skip(1)
        .map(|cell| {
            cell.trim()
                .parse::<f64>()
                .map(|x| Complex64::new(x, 0.0))
                .map_err(|e| parse_err(format!("CSV grid header: {e}")))
        })
        .collect::<Result<_>>()?;
    let mut s_axis = Vec::new();
    let mut values = Vec::new();
    for line in lines {
        let mut cells = line.split(',');
        let s = cells
            .next()
            .ok_or_else(|| parse_err("CSV grid: empty row"))?
            .trim()
            .parse::<f64>()
            .map_err(|e| parse_err(format!("CSV grid row label: {e}")))?;
        s_axis.push(Complex64::new(s, 0.0));
        let row: Vec<Complex64> = cells
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map(|x| Complex64::new(x, 0.0))
                    .map_err(|e| parse_err(format!("CSV grid value: {e}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != p_axis.len() {
            return Err(parse_err(format!(
                "CSV grid: row has {} values, header has {}",
                row.len(),
                p_axis.len()
            )));
        }
        values.extend(row);
    }
    TensorGrid::new(vec![s_axis, p_axis], values)
}

// ---------------------------------------------------------------------------
// Model JSON

#[derive(Serialize, Deserialize)]
struct ModelJson {
    support_points: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value_shape: Option<[usize; 2]>,
    support_values: serde_json::Value,
    weights: Vec<[f64; 2]>,
}

pub fn model_to_json(model: &BarycentricModel) -> String {
    let file = ModelJson {
        support_points: model.support_points().iter().map(|a| pairs(a)).collect(),
        value_shape: None,
        support_values: serde_json::to_value(pairs(model.support_values()))
            .expect("pairs serialize"),
        weights: pairs(model.weights()),
    };
    serde_json::to_string(&file).expect("model serializes")
}

pub fn matrix_model_to_json(model: &MatrixBarycentricModel) -> String {
    let (rows, cols) = model.value_shape();
    let values: Vec<Vec<[f64; 2]>> = model
        .support_values()
        .iter()
        .map(|m| {
            let mut flat = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    flat.push(pair(m[(r, c)]));
                }
            }
            flat
        })
        .collect();
    let file = ModelJson {
        support_points: model.support_points().iter().map(|a| pairs(a)).collect(),
        value_shape: Some([rows, cols]),
        support_values: serde_json::to_value(values).expect("pairs serialize"),
        weights: pairs(model.weights()),
    };
    serde_json::to_string(&file).expect("model serializes")
}

/// Either kind of model, as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelData {
    Scalar(BarycentricModel),
    Matrix(MatrixBarycentricModel),
}

impl ModelData {
    pub fn ndim(&self) -> usize {
        match self {
            ModelData::Scalar(m) => m.ndim(),
            ModelData::Matrix(m) => m.ndim(),
        }
    }

    pub fn orders(&self) -> Vec<usize> {
        match self {
            ModelData::Scalar(m) => m.orders(),
            ModelData::Matrix(m) => m.orders(),
        }
    }
}

pub fn model_from_json(text: &str) -> Result<ModelData> {
    let file: ModelJson =
        serde_json::from_str(text).map_err(|e| parse_err(format!("model JSON: {e}")))?;
    let points: Vec<Vec<Complex64>> = file.support_points.iter().map(|a| complexes(a)).collect();
    let weights = complexes(&file.weights);
    match file.value_shape {
        None => {
            let values: Vec<[f64; 2]> = serde_json::from_value(file.support_values)
                .map_err(|e| parse_err(format!("model JSON values: {e}")))?;
            Ok(ModelData::Scalar(BarycentricModel::new(
                points,
                complexes(&values),
                weights,
            )?))
        }
        Some([rows, cols]) => {
            let values: Vec<Vec<[f64; 2]>> = serde_json::from_value(file.support_values)
                .map_err(|e| parse_err(format!("model JSON values: {e}")))?;
            let mut mats = Vec::with_capacity(values.len());
            for flat in &values {
                if flat.len() != rows * cols {
                    return Err(parse_err(format!(
                        "model JSON: matrix value has {} entries, value_shape says {}",
                        flat.len(),
                        rows * cols
                    )));
                }
                mats.push(DMatrix::from_fn(rows, cols, |r, c| {
                    complex(flat[r * cols + c])
                }));
            }
            Ok(ModelData::Matrix(MatrixBarycentricModel::new(
                points, mats, weights,
            )?))
        }
    }
}

// ---------------------------------------------------------------------------
// Trace JSON lines

#[derive(Serialize, Deserialize)]
struct TraceLine {
    iter: usize,
    selected: Vec<[f64; 2]>,
    orders: Vec<usize>,
    rel_error: f64,
}

/// One JSON object per iteration: `{iter, selected, orders, rel_error}`,
/// where `orders` lists the per-axis support counts after the step.
pub fn trace_to_jsonl(trace: &FitTrace) -> String {
    let mut out = String::new();
    for it in &trace.iterations {
        let line = TraceLine {
            iter: it.iter,
            selected: pairs(&it.selected),
            orders: it.support_counts.clone(),
            rel_error: it.rel_error,
        };
        out.push_str(&serde_json::to_string(&line).expect("trace serializes"));
        out.push('\n');
    }
    out
}
