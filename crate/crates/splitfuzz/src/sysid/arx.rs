use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::SignalDataset;
use crate::error::SysIdError;

pub const MAX_ORDER: usize = 10;
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArxOrder {
    pub na: usize,
    pub nb: usize,
    pub nk: usize,
}

impl ArxOrder {
    pub fn new(na: usize, nb: usize, nk: usize) -> Result<Self, SysIdError> {
        let ok = |n: usize| (1..=MAX_ORDER).contains(&n);
        if ok(na) && ok(nb) && ok(nk) {
            Ok(Self { na, nb, nk })
        } else {
            Err(SysIdError::Order { na, nb, nk })
        }
    }

    pub fn max_lag(&self) -> usize {
        self.na.max(self.nb + self.nk - 1)
    }

    pub fn all() -> impl Iterator<Item = ArxOrder> {
        (1..=MAX_ORDER).flat_map(|na| {
            (1..=MAX_ORDER).flat_map(move |nb| (1..=MAX_ORDER).map(move |nk| ArxOrder { na, nb, nk }))
        })
    }
}

/// `y(t) + a1 y(t-1) + ... + a_na y(t-na) = b1 u(t-nk) + ... + b_nb u(t-nk-nb+1)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArxModel {
    pub order: ArxOrder,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ArxModel {
    pub fn new(order: ArxOrder, a: Vec<f64>, b: Vec<f64>) -> Result<Self, SysIdError> {
        if a.len() != order.na || b.len() != order.nb {
            return Err(SysIdError::Dataset(format!(
                "coefficient lengths ({}, {}) do not match order ({}, {})",
                a.len(),
                b.len(),
                order.na,
                order.nb
            )));
        }
        Ok(Self { order, a, b })
    }

    /// Free-run simulation from zero initial conditions.
    pub fn simulate(&self, u: &[f64]) -> Vec<f64> {
        self.simulate_from(u, &[])
    }

    /// Free-run simulation whose first `initial.len()` outputs are taken as
    /// given; later samples use only simulated outputs.
    pub fn simulate_from(&self, u: &[f64], initial: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; u.len()];
        let warm = initial.len().min(u.len());
        y[..warm].copy_from_slice(&initial[..warm]);
        for t in warm..u.len() {
            let mut acc = 0.0;
            for (i, a) in self.a.iter().enumerate() {
                if let Some(k) = t.checked_sub(i + 1) {
                    acc -= a * y[k];
                }
            }
            for (j, b) in self.b.iter().enumerate() {
                if let Some(k) = t.checked_sub(self.order.nk + j) {
                    acc += b * u[k];
                }
            }
            y[t] = acc;
        }
        y
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn centered(v: &[f64]) -> Vec<f64> {
    let m = mean(v);
    v.iter().map(|x| x - m).collect()
}

fn regression(u: &[f64], y: &[f64], order: ArxOrder) -> (DMatrix<f64>, DVector<f64>) {
    let start = order.max_lag();
    let rows = y.len() - start;
    let cols = order.na + order.nb;
    let phi = DMatrix::from_fn(rows, cols, |r, c| {
        let t = r + start;
        if c < order.na {
            -y[t - c - 1]
        } else {
            u[t - order.nk - (c - order.na)]
        }
    });
    let target = DVector::from_iterator(rows, y[start..].iter().copied());
    demean_columns(phi, target)
}

/// Removes the mean of every regressor column and of the target, so the
/// offset left by the lag window does not leak into the coefficients.
fn demean_columns(mut phi: DMatrix<f64>, mut target: DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
    for mut col in phi.column_iter_mut() {
        let m = col.mean();
        col.add_scalar_mut(-m);
    }
    let m = target.mean();
    target.add_scalar_mut(-m);
    (phi, target)
}

/// Ordinary least squares on mean-removed data.
pub fn fit_arx(data: &SignalDataset, order: ArxOrder) -> Result<ArxModel, SysIdError> {
    let ArxOrder { na, nb, nk } = order;
    ArxOrder::new(na, nb, nk)?;
    if data.len() <= na + nb + nk + 10 {
        return Err(SysIdError::Dataset(format!(
            "{} samples are too few for order ({na}, {nb}, {nk})",
            data.len()
        )));
    }
    let (u, y) = (centered(&data.u), centered(&data.y));
    let (phi, target) = regression(&u, &y, order);
    let svd = phi.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= RANK_TOL * smax {
        return Err(SysIdError::RankDeficient { na, nb, nk });
    }
    let theta = svd.solve(&target, 0.0).map_err(|_| SysIdError::RankDeficient { na, nb, nk })?;
    ArxModel::new(order, theta.as_slice()[..na].to_vec(), theta.as_slice()[na..].to_vec())
}

/// `Phi^T (y - Phi theta)` relative to `|Phi^T y|`, for checking the normal
/// equations of a fitted model.
pub fn residual_orthogonality(data: &SignalDataset, model: &ArxModel) -> f64 {
    let (u, y) = (centered(&data.u), centered(&data.y));
    let (phi, target) = regression(&u, &y, model.order);
    let theta = DVector::from_iterator(model.a.len() + model.b.len(), model.a.iter().chain(&model.b).copied());
    let r = &target - &phi * theta;
    let num = (phi.transpose() * r).norm();
    let den = (phi.transpose() * target).norm().max(f64::MIN_POSITIVE);
    num / den
}

/// Normalized fit `100 (1 - |y - yhat| / |y - mean(y)|)`.
pub fn fit_percent(y: &[f64], yhat: &[f64]) -> Result<f64, SysIdError> {
    if y.len() != yhat.len() || y.is_empty() {
        return Err(SysIdError::Dataset("output and estimate lengths differ".into()));
    }
    let m = mean(y);
    let den = y.iter().map(|v| (v - m).powi(2)).sum::<f64>().sqrt();
    if den == 0.0 {
        return Err(SysIdError::ConstantOutput);
    }
    let num = y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    Ok(100.0 * (1.0 - num / den))
}

/// First sample scored by [`model_fit_percent`]; no order in the grid needs
/// more history than this.
pub const SCORE_START: usize = 2 * MAX_ORDER - 1;

/// Simulation fit of `model` on `validation`, with measured and simulated
/// outputs each centered on their own mean. The simulation is seeded with the measured outputs over the model's
/// lag window and scored from [`SCORE_START`] on.
pub fn model_fit_percent(model: &ArxModel, validation: &SignalDataset) -> Result<f64, SysIdError> {
    let (u, y) = (centered(&validation.u), centered(&validation.y));
    let lag = model.order.max_lag();
    if y.len() <= SCORE_START.max(lag) + 1 {
        return Err(SysIdError::Dataset(format!("{} validation samples are too few", y.len())));
    }
    let yhat = model.simulate_from(&u, &y[..lag]);
    let start = SCORE_START.max(lag);
    fit_percent(&centered(&y[start..]), &centered(&yhat[start..]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub order: ArxOrder,
    pub misfit_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResult {
    /// All orders, sorted by (na, nb, nk).
    pub rows: Vec<GridRow>,
    pub best: ArxOrder,
    pub best_misfit_pct: f64,
    pub best_model: ArxModel,
}

impl GridResult {
    pub fn misfit(&self, order: ArxOrder) -> Option<f64> {
        self.rows.iter().find(|r| r.order == order).map(|r| r.misfit_pct)
    }
}

/// Fits every order on the first half of `data` and scores it on the second.
/// Failed fits count as 100% misfit.
pub fn grid_search(data: &SignalDataset) -> Result<GridResult, SysIdError> {
    let (work, valid) = data.split_half();
    let orders: Vec<ArxOrder> = ArxOrder::all().collect();
    let rows: Vec<GridRow> = orders
        .par_iter()
        .map(|&order| {
            let misfit = fit_arx(&work, order)
                .and_then(|m| model_fit_percent(&m, &valid))
                .map(|fit| 100.0 - fit)
                .ok()
                .filter(|m| m.is_finite())
                .unwrap_or(100.0);
            GridRow { order, misfit_pct: misfit }
        })
        .collect();
    let best = rows
        .iter()
        .fold(None::<GridRow>, |acc, r| match acc {
            Some(b) if b.misfit_pct <= r.misfit_pct => Some(b),
            _ => Some(*r),
        })
        .expect("grid is non-empty");
    let best_model = fit_arx(&work, best.order).or_else(|_| {
        ArxModel::new(best.order, vec![0.0; best.order.na], vec![0.0; best.order.nb])
    })?;
    Ok(GridResult { rows, best: best.order, best_misfit_pct: best.misfit_pct, best_model })
}
