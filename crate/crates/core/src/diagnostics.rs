//! Conservation diagnostics for truncated modified Hamiltonians and log-log fits.

use crate::error::{Error, Result};
use crate::hamiltonian::SeparableHamiltonian;
use crate::integrators::symplectic_euler_step;
use crate::mh_symbolic::{general_d_truncation_eval, TruncatedMh};
use crate::phase::PhasePoint;
use crate::scalar::Real;

/// Least-squares line `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fits `log y` against `log x`. Nonpositive, non-finite or subnormal-scale
/// `y` make the fit degenerate.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    loglog_fit_above(xs, ys, f64::EPSILON * 1e-2)
}

/// As [`loglog_fit`], treating every `y ≤ floor` as rounding noise. A natural
/// floor for conservation errors is a small multiple of `ε·|H̃(z₀)|`.
pub fn loglog_fit_above(xs: &[f64], ys: &[f64], floor: f64) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points".into()));
    }
    if let Some(y) = ys.iter().find(|y| !(y.is_finite() && **y > floor)) {
        return Err(Error::DegenerateFit(format!("value {y:e} is at or below the noise floor {floor:e}")));
    }
    if xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::DegenerateFit("abscissae must be positive".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(LinearFit { slope, intercept: my - slope * mx })
}

/// `H̃^(0), …, H̃^(N)` evaluated along a symplectic Euler trajectory.
#[derive(Clone, Debug)]
pub struct MhTraces<T> {
    pub points: Vec<PhasePoint<T>>,
    /// `values[n][k] = H̃^(n)(z_k)`.
    pub values: Vec<Vec<T>>,
}

/// `values[n][k] = H̃^(n)(points[k])` for `n ≤ max_order`. One-dimensional
/// Hamiltonians use the exact term algebra; other dimensions are limited to
/// `max_order ≤ 3`.
pub fn mh_values_along<T: Real>(
    h: &SeparableHamiltonian<T>,
    points: &[PhasePoint<T>],
    eta: T,
    max_order: usize,
) -> Result<Vec<Vec<T>>> {
    let compiled = (h.dim() == 1).then(|| TruncatedMh::new(max_order));
    let mut values = vec![Vec::with_capacity(points.len()); max_order + 1];
    for z in points {
        let row = match &compiled {
            Some(c) => c.partial_sums(h, z, eta)?,
            None => (0..=max_order).map(|n| general_d_truncation_eval(h, z, eta, n)).collect::<Result<_>>()?,
        };
        for (n, v) in row.into_iter().enumerate() {
            values[n].push(v);
        }
    }
    Ok(values)
}

/// Runs `steps` symplectic Euler steps and evaluates every truncation up to
/// `max_order` along the way (see [`mh_values_along`]).
pub fn mh_traces<T: Real>(
    h: &SeparableHamiltonian<T>,
    z0: &PhasePoint<T>,
    eta: T,
    steps: usize,
    max_order: usize,
) -> Result<MhTraces<T>> {
    let mut points = Vec::with_capacity(steps + 1);
    points.push(z0.clone());
    for k in 0..steps {
        let z = symplectic_euler_step(h, &points[k], eta).map_err(|e| Error::StepFailed { index: k, source: Box::new(e) })?;
        points.push(z);
    }
    let values = mh_values_along(h, &points, eta, max_order)?;
    Ok(MhTraces { points, values })
}

/// Summary of one trace `H̃^(N)(z_k)`, `k = 0..K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceStats {
    /// `max_k |H̃(z_k) − H̃(z_0)|`.
    pub max_deviation: f64,
    /// `max_k |H̃(z_{k+1}) − H̃(z_k)|`.
    pub max_step_change: f64,
    /// `max_k H̃(z_k) − min_k H̃(z_k)`.
    pub peak_to_peak: f64,
}

pub fn trace_stats<T: Real>(trace: &[T]) -> TraceStats {
    let v: Vec<f64> = trace.iter().map(|x| x.as_f64()).collect();
    let Some(&v0) = v.first() else {
        return TraceStats { max_deviation: 0.0, max_step_change: 0.0, peak_to_peak: 0.0 };
    };
    let max_deviation = v.iter().map(|x| (x - v0).abs()).fold(0.0, f64::max);
    let max_step_change = v.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    TraceStats { max_deviation, max_step_change, peak_to_peak: hi - lo }
}
