use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::standardize;
use crate::error::{Error, Result};

/// One fitted OLS specification with an intercept.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionTable {
    pub feature_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    /// Two-sided, Student's t with `n_obs - k - 1` degrees of freedom.
    pub p_values: Vec<f64>,
    pub intercept: f64,
    pub intercept_se: f64,
    pub intercept_p: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub n_obs: usize,
    pub df_resid: usize,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl RegressionTable {
    pub fn coefficient(&self, name: &str) -> Option<(f64, f64)> {
        self.feature_names
            .iter()
            .position(|n| n == name)
            .map(|i| (self.coefficients[i], self.p_values[i]))
    }
}

fn two_sided_p(t: f64, df: usize) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df > 0");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Least squares fit of `y` on an intercept plus the given feature columns,
/// via Householder QR of the design matrix.
pub fn ols_fit(y: &[f64], columns: &[Vec<f64>], names: &[&str]) -> Result<RegressionTable> {
    let n = y.len();
    let k = columns.len();
    if names.len() != k {
        return Err(Error::InvalidArgument(format!("{} names for {k} columns", names.len())));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::InvalidArgument(format!("column of length {} against {n} observations", c.len())));
    }
    if n <= k + 1 {
        return Err(Error::InsufficientData(format!("{n} observations for {k} features plus intercept")));
    }

    let p = k + 1;
    let design = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { columns[j - 1][i] });
    let qr = design.clone().qr();
    let r = qr.r();
    let max_diag = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if let Some(j) = (0..p).find(|&j| r[(j, j)].abs() <= 1e-10 * max_diag.max(1.0)) {
        return Err(Error::RankDeficient { column: j });
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient { column: 0 })?;

    let fitted = &design * &beta;
    let residuals: Vec<f64> = yv.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    if !(sst > 0.0) {
        return Err(Error::ZeroVariance("response".into()));
    }
    let df_resid = n - p;
    let sigma2 = ssr / df_resid as f64;

    // (X'X)^-1 = R^-1 R^-T
    let r_inv = r.clone().try_inverse().ok_or(Error::RankDeficient { column: 0 })?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let se: Vec<f64> = (0..p).map(|j| (sigma2 * xtx_inv[(j, j)]).max(0.0).sqrt()).collect();
    let t: Vec<f64> = (0..p).map(|j| beta[j] / se[j]).collect();
    let pv: Vec<f64> = t.iter().map(|&t| two_sided_p(t, df_resid)).collect();

    let r2 = (1.0 - ssr / sst).clamp(0.0, 1.0);
    let adj_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / df_resid as f64;
    Ok(RegressionTable {
        feature_names: names.iter().map(|s| s.to_string()).collect(),
        coefficients: beta.iter().skip(1).copied().collect(),
        std_errors: se[1..].to_vec(),
        t_values: t[1..].to_vec(),
        p_values: pv[1..].to_vec(),
        intercept: beta[0],
        intercept_se: se[0],
        intercept_p: pv[0],
        r2,
        adj_r2,
        n_obs: n,
        df_resid,
        residuals,
    })
}

/// Sector-level regression inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorRow {
    pub sector_id: String,
    pub pre_segregation: f64,
    pub pre_mobility: f64,
    pub bridge_index: f64,
    pub centrality: f64,
    pub delta_s: f64,
    pub delta_m: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SectorTable {
    pub rows: Vec<SectorRow>,
}

impl SectorTable {
    fn column(&self, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match name {
                "pre_segregation" => r.pre_segregation,
                "pre_mobility" => r.pre_mobility,
                "bridge_index" => r.bridge_index,
                "centrality" => r.centrality,
                "delta_s" => r.delta_s,
                "delta_m" => r.delta_m,
                _ => unreachable!("unknown column {name}"),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependent {
    DeltaS,
    DeltaM,
}

impl Dependent {
    pub fn name(self) -> &'static str {
        match self {
            Dependent::DeltaS => "delta_s",
            Dependent::DeltaM => "delta_m",
        }
    }

    /// Feature entry order of the four nested specifications: the dependent's
    /// own pre-shock level first.
    pub fn feature_order(self) -> [&'static str; 4] {
        match self {
            Dependent::DeltaS => ["pre_segregation", "pre_mobility", "bridge_index", "centrality"],
            Dependent::DeltaM => ["pre_mobility", "pre_segregation", "bridge_index", "centrality"],
        }
    }
}

/// Four nested specifications adding one standardized feature at a time.
pub fn nested_regressions(table: &SectorTable, dependent: Dependent) -> Result<Vec<RegressionTable>> {
    let y = table.column(dependent.name());
    let order = dependent.feature_order();
    let standardized: Vec<Vec<f64>> = order
        .iter()
        .map(|name| standardize(&table.column(name)).map_err(|_| Error::ZeroVariance((*name).to_string())))
        .collect::<Result<_>>()?;
    (1..=order.len())
        .map(|k| ols_fit(&y, &standardized[..k], &order[..k]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureShare {
    pub feature: String,
    pub share: f64,
}

/// Squared-coefficient share of each feature in a fit on standardized features.
pub fn feature_importance(table: &RegressionTable) -> Vec<FeatureShare> {
    let total: f64 = table.coefficients.iter().map(|b| b * b).sum();
    table
        .feature_names
        .iter()
        .zip(&table.coefficients)
        .map(|(name, b)| FeatureShare {
            feature: name.clone(),
            share: if total > 0.0 { b * b / total } else { 0.0 },
        })
        .collect()
}
