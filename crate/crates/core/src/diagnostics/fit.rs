//! Least-squares scaling fits of timescales against system size.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `y = a + b N`.
    Linear,
    /// `y = a + b ln N`.
    Logarithmic,
    /// `y = a N^β`, fitted as a line in log-log space.
    PowerLaw,
    /// `y = a + b N^d` for a fixed degree `d`.
    FixedPower(f64),
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitModel::Linear => f.write_str("linear"),
            FitModel::Logarithmic => f.write_str("log"),
            FitModel::PowerLaw => f.write_str("power"),
            FitModel::FixedPower(d) => write!(f, "degree-{d}"),
        }
    }
}

impl FromStr for FitModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(FitModel::Linear),
            "log" => Ok(FitModel::Logarithmic),
            "power" => Ok(FitModel::PowerLaw),
            other => other
                .strip_prefix("degree-")
                .and_then(|d| d.parse().ok())
                .map(FitModel::FixedPower)
                .ok_or_else(|| Error::Invalid(format!("unknown fit model '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    /// `[intercept or prefactor, slope or exponent]`.
    pub params: Vec<f64>,
    /// Sum of squared residuals in the space the fit is linear in.
    pub residual: f64,
}

impl FitResult {
    pub fn predict(&self, n: f64) -> f64 {
        let (a, b) = (self.params[0], self.params[1]);
        match self.model {
            FitModel::Linear => a + b * n,
            FitModel::Logarithmic => a + b * n.ln(),
            FitModel::PowerLaw => a * n.powf(b),
            FitModel::FixedPower(d) => a + b * n.powf(d),
        }
    }
}

/// Ordinary least squares for `v = a + b u`; returns `(a, b, ssr)`.
fn line_fit(u: &[f64], v: &[f64]) -> Result<(f64, f64, f64)> {
    let k = u.len() as f64;
    let mu = u.iter().sum::<f64>() / k;
    let mv = v.iter().sum::<f64>() / k;
    let suu: f64 = u.iter().map(|x| (x - mu) * (x - mu)).sum();
    if suu == 0.0 {
        return Err(Error::Invalid("fit abscissae are all equal".into()));
    }
    let suv: f64 = u.iter().zip(v).map(|(x, y)| (x - mu) * (y - mv)).sum();
    let b = suv / suu;
    let a = mv - b * mu;
    let ssr = u.iter().zip(v).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    Ok((a, b, ssr))
}

pub fn fit_scaling(x: &[f64], y: &[f64], model: FitModel) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::Invalid(format!("{} sizes but {} values", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::Underdetermined { needed: 3, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite fit input".into()));
    }
    let positive = |vals: &[f64], what: &str| {
        if vals.iter().all(|&v| v > 0.0) {
            Ok(())
        } else {
            Err(Error::Invalid(format!("{what} must be positive for this model")))
        }
    };
    let (params, residual) = match model {
        FitModel::Linear => {
            let (a, b, r) = line_fit(x, y)?;
            (vec![a, b], r)
        }
        FitModel::Logarithmic => {
            positive(x, "sizes")?;
            let u: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            let (a, b, r) = line_fit(&u, y)?;
            (vec![a, b], r)
        }
        FitModel::PowerLaw => {
            positive(x, "sizes")?;
            positive(y, "values")?;
            let u: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            let v: Vec<f64> = y.iter().map(|v| v.ln()).collect();
            let (a, b, r) = line_fit(&u, &v)?;
            (vec![a.exp(), b], r)
        }
        FitModel::FixedPower(d) => {
            positive(x, "sizes")?;
            let u: Vec<f64> = x.iter().map(|v| v.powf(d)).collect();
            let (a, b, r) = line_fit(&u, y)?;
            (vec![a, b], r)
        }
    };
    Ok(FitResult { model, params, residual })
}
