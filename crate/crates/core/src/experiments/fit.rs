//! Log-log rate fitting.

use serde::Serialize;

use crate::error::{Error, Result};

/// Values with magnitude below this are dropped before fitting.
pub const FIT_FLOOR: f64 = 1e-12;

/// Least-squares line through `(log₂ k, log₂ |value|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub ks: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log₂ units.
    pub max_residual: f64,
}

pub fn fit_rate(ks: &[f64], values: &[f64]) -> Result<RateFit> {
    if ks.len() != values.len() {
        return Err(Error::Data(format!(
            "{} abscissae for {} values",
            ks.len(),
            values.len()
        )));
    }
    let (used_k, used_v): (Vec<f64>, Vec<f64>) = ks
        .iter()
        .zip(values)
        .filter(|(k, v)| **k > 0.0 && v.is_finite() && v.abs() >= FIT_FLOOR)
        .map(|(k, v)| (*k, *v))
        .unzip();
    if used_k.len() < 4 {
        return Err(Error::Data(format!(
            "need at least 4 usable points, have {}",
            used_k.len()
        )));
    }
    let xs: Vec<f64> = used_k.iter().map(|k| k.log2()).collect();
    let ys: Vec<f64> = used_v.iter().map(|v| v.abs().log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Data("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        ks: used_k,
        values: used_v,
        slope,
        intercept,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks() -> Vec<f64> {
        [8.0, 16.0, 32.0, 64.0, 128.0, 256.0].to_vec()
    }

    #[test]
    fn exact_power() {
        let v: Vec<f64> = ks().iter().map(|k| 3.0 * k * k).collect();
        let fit = fit_rate(&ks(), &v).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn perturbed_half_power() {
        let v: Vec<f64> = ks().iter().map(|k| 0.7 * k.sqrt() * (1.0 + 1.0 / k)).collect();
        let fit = fit_rate(&ks(), &v).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.05, "{}", fit.slope);
    }

    #[test]
    fn constant_and_sign() {
        let fit = fit_rate(&ks(), &[-2.0; 6]).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let v = [1.0, 0.0, 1e-13, 2.0, 3.0, f64::NAN];
        assert!(matches!(fit_rate(&ks(), &v), Err(Error::Data(_))));
        assert!(matches!(fit_rate(&ks()[..3], &[1.0, 2.0, 3.0]), Err(Error::Data(_))));
    }
}
