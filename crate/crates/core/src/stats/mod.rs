//! Statistical kernel: standardization, OLS with t-tests, rank correlation,
//! the Wilcoxon signed-rank test, and the bridge index covariate.

mod bridge;
mod ols;
mod rank;
mod wilcoxon;

pub use bridge::{bridge_index, bridge_indices, catchment_evenness, BridgeIndex, DEFAULT_BRIDGE_RADIUS_KM};
pub use ols::{
    feature_importance, nested_regressions, ols_fit, Dependent, FeatureShare, RegressionTable, SectorRow, SectorTable,
};
pub use rank::{average_ranks, pearson, spearman};
pub use wilcoxon::{
    exact_signed_rank_counts, wilcoxon_signed_rank, wilcoxon_signed_rank_with, PairedTestResult, DEFAULT_EXACT_MAX_N,
};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator), two-pass.
pub fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

/// Centers on the mean and scales by the sample standard deviation.
pub fn standardize(column: &[f64]) -> Result<Vec<f64>> {
    if column.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "standardization needs at least 2 values, got {}",
            column.len()
        )));
    }
    let m = mean(column);
    let sd = sample_sd(column);
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::ZeroVariance("standardized column".into()));
    }
    Ok(column.iter().map(|x| (x - m) / sd).collect())
}

/// Table significance markers: `***` p < 0.01, `**` p < 0.05, `*` p < 0.1.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}
