use super::MetricError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<FitResult, MetricError> {
    let n = points.len();
    if n < 2 {
        return Err(MetricError::DegenerateFit(format!("{n} point(s)")));
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(MetricError::DegenerateFit("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    Ok(FitResult { slope, intercept: mean_y - slope * mean_x, points_used: n })
}
