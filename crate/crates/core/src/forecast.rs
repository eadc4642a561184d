//! ARIMA(p, d, q) forecasting of overlap series.
//!
//! Coefficients are estimated by conditional sum of squares: a Hannan–Rissanen
//! start (long autoregression for residual proxies, then OLS on lags) refined
//! by damped Gauss–Newton (Levenberg–Marquardt) with an analytic Jacobian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};

const MAX_ITERATIONS: usize = 100;
const REL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl Order {
    pub fn new(p: usize, d: usize, q: usize) -> Order {
        Order { p, d, q }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Arima,
    /// Constant series: forecast is the constant.
    Intercept,
    /// Every candidate failed: forecast is the window mean.
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastModel {
    pub kind: ModelKind,
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub sse: f64,
    pub aic: f64,
    /// Refinement did not converge; coefficients are the start values.
    pub fallback: bool,
}

impl ForecastModel {
    pub fn order(&self) -> Order {
        Order::new(self.p, self.d, self.q)
    }

    fn constant(kind: ModelKind, value: f64, order: Order, n: usize) -> ForecastModel {
        ForecastModel {
            kind,
            p: order.p,
            d: order.d,
            q: order.q,
            ar: vec![0.0; order.p],
            ma: vec![0.0; order.q],
            intercept: value,
            residuals: vec![0.0; n],
            sse: 0.0,
            aic: f64::NEG_INFINITY,
            fallback: kind == ModelKind::Mean,
        }
    }
}

/// Which orders [`select_model`] searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    /// p, q in 0..=3, d in 0..=1, excluding the empty (0,0,0) model.
    #[default]
    Arima,
    /// ARIMA(p,0,0), p in 1..=3.
    Ar,
    /// ARIMA(0,0,q), q in 1..=3.
    Ma,
    /// ARIMA(p,0,q), p, q in 1..=3.
    Arma,
    Fixed(Order),
}

impl ModelFamily {
    /// Candidate orders in tie-break order: (d, p, q) ascending.
    pub fn candidates(self) -> Vec<Order> {
        let mut out = Vec::new();
        let (ps, ds, qs): (Vec<usize>, Vec<usize>, Vec<usize>) = match self {
            ModelFamily::Arima => ((0..=3).collect(), vec![0, 1], (0..=3).collect()),
            ModelFamily::Ar => ((1..=3).collect(), vec![0], vec![0]),
            ModelFamily::Ma => (vec![0], vec![0], (1..=3).collect()),
            ModelFamily::Arma => ((1..=3).collect(), vec![0], (1..=3).collect()),
            ModelFamily::Fixed(o) => return vec![o],
        };
        for &d in &ds {
            for &p in &ps {
                for &q in &qs {
                    if d == 0 && p == 0 && q == 0 {
                        continue;
                    }
                    out.push(Order::new(p, d, q));
                }
            }
        }
        out
    }
}

impl std::str::FromStr for ModelFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arima" => Ok(Self::Arima),
            "ar" => Ok(Self::Ar),
            "ma" => Ok(Self::Ma),
            "arma" => Ok(Self::Arma),
            other => Err(Error::InvalidArgument(format!("unknown model family '{other}'"))),
        }
    }
}

pub fn difference(series: &[f64], d: usize) -> Vec<f64> {
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

fn is_constant(xs: &[f64]) -> bool {
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1.0)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= f * p;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Ordinary least squares via normal equations with a tiny ridge fallback.
fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = rows.first()?.len();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (r, &t) in rows.iter().zip(y) {
        for i in 0..k {
            xty[i] += r[i] * t;
            for j in 0..k {
                xtx[i][j] += r[i] * r[j];
            }
        }
    }
    solve(xtx.clone(), xty.clone()).or_else(|| {
        let trace: f64 = (0..k).map(|i| xtx[i][i]).sum::<f64>().max(1.0);
        for (i, row) in xtx.iter_mut().enumerate() {
            row[i] += 1e-10 * trace;
        }
        solve(xtx, xty)
    })
}

/// Parameter vector layout: `[c, α_1..α_p, β_1..β_q]`.
struct Css<'a> {
    z: &'a [f64],
    p: usize,
    q: usize,
}

impl Css<'_> {
    fn nparams(&self) -> usize {
        1 + self.p + self.q
    }

    /// Residuals for t >= p (earlier residuals are taken as zero).
    fn residuals(&self, theta: &[f64]) -> Vec<f64> {
        let (p, q, z) = (self.p, self.q, self.z);
        let mut e = vec![0.0; z.len()];
        for t in p..z.len() {
            let mut fit = theta[0];
            for i in 1..=p {
                fit += theta[i] * z[t - i];
            }
            for j in 1..=q {
                if t >= p + j {
                    fit += theta[p + j] * e[t - j];
                }
            }
            e[t] = z[t] - fit;
        }
        e[p..].to_vec()
    }

    fn sse(&self, theta: &[f64]) -> f64 {
        self.residuals(theta).iter().map(|e| e * e).sum()
    }

    /// Residuals and their Jacobian rows `∂e_t/∂θ`.
    fn jacobian(&self, theta: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let (p, q, z) = (self.p, self.q, self.z);
        let k = self.nparams();
        let n = z.len();
        let mut e = vec![0.0; n];
        let mut jac = vec![vec![0.0; k]; n];
        for t in p..n {
            let mut x = vec![0.0; k];
            x[0] = 1.0;
            for i in 1..=p {
                x[i] = z[t - i];
            }
            for j in 1..=q {
                if t >= p + j {
                    x[p + j] = e[t - j];
                }
            }
            e[t] = z[t] - theta.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
            for col in 0..k {
                let mut g = -x[col];
                for j in 1..=q {
                    if t >= p + j {
                        g -= theta[p + j] * jac[t - j][col];
                    }
                }
                jac[t][col] = g;
            }
        }
        (e[p..].to_vec(), jac[p..].to_vec())
    }

    fn hannan_rissanen(&self) -> Option<Vec<f64>> {
        let (p, q, z) = (self.p, self.q, self.z);
        let n = z.len();
        let proxies = if q > 0 {
            let m = (p + q).max(4).min(n / 3).max(1);
            let rows: Vec<Vec<f64>> = (m..n)
                .map(|t| std::iter::once(1.0).chain((1..=m).map(|i| z[t - i])).collect())
                .collect();
            let long = least_squares(&rows, &z[m..])?;
            let mut e = vec![0.0; n];
            for t in m..n {
                e[t] = z[t] - long[0] - (1..=m).map(|i| long[i] * z[t - i]).sum::<f64>();
            }
            e
        } else {
            vec![0.0; n]
        };
        let start = p.max(q);
        let rows: Vec<Vec<f64>> = (start..n)
            .map(|t| {
                std::iter::once(1.0)
                    .chain((1..=p).map(|i| z[t - i]))
                    .chain((1..=q).map(|j| proxies[t - j]))
                    .collect()
            })
            .collect();
        least_squares(&rows, &z[start..])
    }

    /// Levenberg–Marquardt; `None` when it fails to converge.
    fn refine(&self, start: &[f64]) -> Option<Vec<f64>> {
        let k = self.nparams();
        let mut theta = start.to_vec();
        let mut sse = self.sse(&theta);
        if !sse.is_finite() {
            return None;
        }
        let mut lambda = 1e-3;
        for _ in 0..MAX_ITERATIONS {
            if sse <= f64::MIN_POSITIVE {
                return Some(theta);
            }
            let (e, jac) = self.jacobian(&theta);
            let mut jtj = vec![vec![0.0; k]; k];
            let mut jte = vec![0.0; k];
            for (row, &et) in jac.iter().zip(&e) {
                for i in 0..k {
                    jte[i] -= row[i] * et;
                    for j in 0..k {
                        jtj[i][j] += row[i] * row[j];
                    }
                }
            }
            let mut improved = false;
            while lambda < 1e12 {
                let mut damped = jtj.clone();
                for (i, row) in damped.iter_mut().enumerate() {
                    row[i] += lambda * jtj[i][i].max(1e-12);
                }
                if let Some(step) = solve(damped, jte.clone()) {
                    let cand: Vec<f64> = theta.iter().zip(&step).map(|(a, b)| a + b).collect();
                    let cand_sse = self.sse(&cand);
                    if cand_sse.is_finite() && cand_sse <= sse {
                        let rel = (sse - cand_sse) / sse;
                        theta = cand;
                        sse = cand_sse;
                        lambda = (lambda / 10.0).max(1e-12);
                        improved = true;
                        if rel < REL_TOLERANCE {
                            return Some(theta);
                        }
                        break;
                    }
                }
                lambda *= 10.0;
            }
            if !improved {
                // no descent direction left: stationary point
                return Some(theta);
            }
        }
        None
    }
}

/// Step-down (Schur–Cohn) test that `1 - c_1 z - ... - c_k z^k` has every
/// root strictly outside the unit circle.
fn roots_outside_unit_circle(coefs: &[f64]) -> bool {
    let mut c = coefs.to_vec();
    while let Some(&k) = c.last() {
        if !k.is_finite() || k.abs() >= 1.0 - 1e-6 {
            return false;
        }
        let m = c.len() - 1;
        let denom = 1.0 - k * k;
        c = (0..m).map(|j| (c[j] + k * c[m - 1 - j]) / denom).collect();
    }
    true
}

impl ForecastModel {
    /// Stationary AR part and invertible MA part.
    pub fn is_admissible(&self) -> bool {
        let neg_ma: Vec<f64> = self.ma.iter().map(|b| -b).collect();
        roots_outside_unit_circle(&self.ar) && roots_outside_unit_circle(&neg_ma)
    }
}

fn aic(n: usize, sse: f64, params: usize) -> f64 {
    let n = n as f64;
    n * (sse / n).max(f64::MIN_POSITIVE).ln() + 2.0 * params as f64
}

/// Fits ARIMA(p, d, q) to `window` by conditional sum of squares.
pub fn fit_arima(window: &[f64], p: usize, d: usize, q: usize) -> Result<ForecastModel> {
    let order = Order::new(p, d, q);
    if window.len() < p.max(q) + d + 2 {
        return Err(Error::SeriesTooShort {
            len: window.len(),
            needed: p.max(q) + d + 1,
        });
    }
    if window.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    let z = difference(window, d);
    if is_constant(&z) {
        return Ok(ForecastModel::constant(ModelKind::Intercept, z[0], order, z.len() - p));
    }
    let css = Css { z: &z, p, q };
    let n_eff = z.len() - p;
    if n_eff < css.nparams() {
        return Err(Error::SeriesTooShort {
            len: window.len(),
            needed: css.nparams() + p + d - 1,
        });
    }
    let init = css
        .hannan_rissanen()
        .ok_or_else(|| Error::InvalidArgument("singular start-value regression".into()))?;
    let (theta, fallback) = if q == 0 {
        // pure AR: the start regression already minimises the CSS
        (init, false)
    } else {
        match css.refine(&init) {
            Some(t) if css.sse(&t).is_finite() => (t, false),
            _ => {
                log::debug!("ARIMA{:?} refinement did not converge", (p, d, q));
                (init, true)
            }
        }
    };
    let residuals = css.residuals(&theta);
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    if !sse.is_finite() {
        return Err(Error::InvalidArgument("fit diverged".into()));
    }
    Ok(ForecastModel {
        kind: ModelKind::Arima,
        p,
        d,
        q,
        ar: theta[1..=p].to_vec(),
        ma: theta[p + 1..].to_vec(),
        intercept: theta[0],
        residuals,
        sse,
        aic: aic(n_eff, sse, 1 + p + q),
        fallback,
    })
}

/// Minimum-AIC admissible model over `family`; constant windows give an intercept model
/// and a window where every candidate fails gives a mean forecast.
pub fn select_model(window: &[f64], family: ModelFamily) -> Result<ForecastModel> {
    if window.len() < 6 {
        return Err(Error::SeriesTooShort {
            len: window.len(),
            needed: 5,
        });
    }
    if window.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    if is_constant(window) {
        return Ok(ForecastModel::constant(
            ModelKind::Intercept,
            window[0],
            Order::new(0, 0, 0),
            window.len(),
        ));
    }
    let mut best: Option<ForecastModel> = None;
    for o in family.candidates() {
        let Ok(model) = fit_arima(window, o.p, o.d, o.q) else {
            continue;
        };
        if !model.is_admissible() {
            continue;
        }
        if best.as_ref().is_none_or(|b| model.aic < b.aic) {
            best = Some(model);
        }
    }
    Ok(best.unwrap_or_else(|| {
        let mean = window.iter().sum::<f64>() / window.len() as f64;
        ForecastModel::constant(ModelKind::Mean, mean, Order::new(0, 0, 0), window.len())
    }))
}

/// Unclamped one-step forecast for the differenced level, then integrated.
fn raw_forecast(model: &ForecastModel, window: &[f64]) -> f64 {
    let (p, q) = (model.p, model.q);
    let z = difference(window, model.d);
    let mut theta = vec![model.intercept];
    theta.extend(&model.ar);
    theta.extend(&model.ma);
    let n = z.len();
    if n < p {
        return *window.last().unwrap_or(&0.0);
    }
    let resid = Css { z: &z, p, q }.residuals(&theta);
    // resid[i] is e_{p+i}
    let mut next = model.intercept;
    for i in 1..=p {
        next += model.ar[i - 1] * z[n - i];
    }
    for j in 1..=q {
        if n >= p + j {
            next += model.ma[j - 1] * resid[n - j - p];
        }
    }
    // undo differencing: add back the last value of each lower level
    for level in (0..model.d).rev() {
        next += *difference(window, level).last().unwrap();
    }
    next
}

/// One-step-ahead forecast clamped to [0, 1].
pub fn predict_next(model: &ForecastModel, window: &[f64]) -> f64 {
    let raw = raw_forecast(model, window);
    if raw.is_finite() {
        raw.clamp(0.0, 1.0)
    } else {
        window.last().copied().unwrap_or(0.0).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub t: usize,
    pub actual: f64,
    pub predicted: f64,
    /// `|actual - predicted| / actual * 100`; absent when `actual == 0`.
    pub error_pct: Option<f64>,
    pub order: Order,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub history: usize,
    pub recursive: bool,
    pub family: ModelFamily,
    pub rows: Vec<ForecastRow>,
    pub mean: f64,
    pub std: f64,
    pub skipped: usize,
}

/// Population mean and standard deviation; zeros for an empty slice.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Rolling one-step evaluation: every point after the first `history` is
/// forecast from the preceding `history` values. With `recursive`, those
/// values are the earlier forecasts wherever available.
pub fn rolling_evaluate(
    series: &[f64],
    history: usize,
    recursive: bool,
    family: ModelFamily,
) -> Result<ErrorReport> {
    rolling_evaluate_with(series, history, recursive, family, Execution::default())
}

pub fn rolling_evaluate_with(
    series: &[f64],
    history: usize,
    recursive: bool,
    family: ModelFamily,
    exec: Execution,
) -> Result<ErrorReport> {
    if series.len() <= history {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            needed: history,
        });
    }
    let forecast = |window: &[f64]| -> Result<(f64, Order)> {
        let model = select_model(window, family)?;
        Ok((predict_next(&model, window), model.order()))
    };
    let steps = series.len() - history;
    let predictions: Vec<(f64, Order)> = if recursive {
        let mut buffer = series[..history].to_vec();
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            let (pred, order) = forecast(&buffer[buffer.len() - history..])?;
            buffer.push(pred);
            out.push((pred, order));
        }
        out
    } else {
        map_indexed(exec, steps, |i| forecast(&series[i..i + history]))
            .into_iter()
            .collect::<Result<_>>()?
    };

    let mut rows = Vec::with_capacity(steps);
    let mut errors = Vec::new();
    for (i, (predicted, order)) in predictions.into_iter().enumerate() {
        let t = history + i;
        let actual = series[t];
        let error_pct = (actual != 0.0).then(|| (actual - predicted).abs() / actual * 100.0);
        errors.extend(error_pct);
        rows.push(ForecastRow {
            t,
            actual,
            predicted,
            error_pct,
            order,
        });
    }
    let (mean, std) = mean_std(&errors);
    Ok(ErrorReport {
        history,
        recursive,
        family,
        skipped: rows.len() - errors.len(),
        rows,
        mean,
        std,
    })
}
