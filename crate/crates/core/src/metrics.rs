//! Per-venue experienced income segregation and visitation change.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{Dataset, Period};

/// Normalization constant mapping the maximal deviation `2(n-1)/n` to 1.
pub fn tau(n_groups: usize) -> f64 {
    n_groups as f64 / (2.0 * (n_groups as f64 - 1.0))
}

/// Experienced income segregation of one venue from its per-group visit counts:
/// `tau(n) * sum_i |m_i / sum(m) - 1/n|`.
///
/// Evaluated as `sum_i |n m_i - T| / (2 (n-1) T)` in integer arithmetic, so the
/// uniform and one-hot cases come out as exactly 0 and 1 and the value is
/// exactly invariant under permutation and scaling of the counts.
pub fn venue_segregation(counts: &[u64]) -> Result<f64> {
    let n = counts.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("segregation needs at least 2 groups, got {n}")));
    }
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    if total == 0 {
        return Err(Error::InvalidArgument("segregation of an all-zero count vector".into()));
    }
    let n128 = n as u128;
    let deviation: u128 = counts.iter().map(|&c| (n128 * c as u128).abs_diff(total)).sum();
    Ok(deviation as f64 / (2 * (n128 - 1) * total) as f64)
}

/// `(in - pre) / pre`; undefined when `pre <= 0`.
pub fn relative_change(pre_value: f64, in_value: f64) -> Result<f64> {
    if !(pre_value > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "relative change undefined for pre value {pre_value}"
        )));
    }
    Ok((in_value - pre_value) / pre_value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VenueOutcome {
    pub venue_id: String,
    pub sector_id: String,
    pub s_pre: f64,
    pub s_in: f64,
    pub delta_s: Option<f64>,
    pub m_pre: u64,
    pub m_in: u64,
    pub delta_m: Option<f64>,
}

impl VenueOutcome {
    pub fn field(&self, field: OutcomeField) -> Option<f64> {
        match field {
            OutcomeField::DeltaS => self.delta_s,
            OutcomeField::DeltaM => self.delta_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exclusion {
    pub venue_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct OutcomeReport {
    pub outcomes: Vec<VenueOutcome>,
    pub exclusions: Vec<Exclusion>,
}

/// Per-income-group visit counts of every venue, indexed `[venue][period][group]`.
pub fn group_counts(dataset: &Dataset) -> Vec<[Vec<u64>; 2]> {
    let g = dataset.n_groups();
    let mut counts: Vec<[Vec<u64>; 2]> = (0..dataset.venues().len()).map(|_| [vec![0; g], vec![0; g]]).collect();
    for e in dataset.edges() {
        counts[e.venue][e.period.index()][dataset.income_group(e.cbg)] += e.visit_count;
    }
    counts
}

/// One outcome per venue visited in both periods. Venues with zero pre-shock
/// segregation keep their outcome row but get no `delta_s`.
pub fn compute_outcomes(dataset: &Dataset) -> OutcomeReport {
    let counts = group_counts(dataset);
    let mut report = OutcomeReport::default();
    for (venue, by_period) in dataset.venues().iter().zip(&counts) {
        let m_pre: u64 = by_period[Period::Pre.index()].iter().sum();
        let m_in: u64 = by_period[Period::Shock.index()].iter().sum();
        let reason = match (m_pre, m_in) {
            (0, 0) => Some("no visits"),
            (0, _) => Some("no pre-shock visits"),
            (_, 0) => Some("no in-shock visits"),
            _ => None,
        };
        if let Some(reason) = reason {
            report.exclusions.push(Exclusion {
                venue_id: venue.venue_id.clone(),
                reason: reason.into(),
            });
            continue;
        }
        let s_pre = venue_segregation(&by_period[0]).expect("nonzero counts");
        let s_in = venue_segregation(&by_period[1]).expect("nonzero counts");
        report.outcomes.push(VenueOutcome {
            venue_id: venue.venue_id.clone(),
            sector_id: venue.sector_id.clone(),
            s_pre,
            s_in,
            delta_s: relative_change(s_pre, s_in).ok(),
            m_pre,
            m_in,
            delta_m: relative_change(m_pre as f64, m_in as f64).ok(),
        });
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeField {
    DeltaS,
    DeltaM,
}

impl OutcomeField {
    pub fn name(self) -> &'static str {
        match self {
            OutcomeField::DeltaS => "delta_s",
            OutcomeField::DeltaM => "delta_m",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Highest,
    Lowest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorShare {
    pub sector_id: String,
    pub share_in_top_band: f64,
    /// Venues of the sector with the field defined; 0 marks a sector emptied
    /// by exclusions.
    pub venue_count: usize,
}

/// Number of venues in the extreme band: `ceil(band * n)`, with products that
/// land within rounding error of an integer taken as that integer.
pub fn band_size(band: f64, n: usize) -> usize {
    let x = band * n as f64;
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Fraction of each sector's venues falling in the extreme `band` of `field`.
///
/// Venues are ranked by the field value (descending for
/// [`Direction::Highest`]), ties broken by `venue_id`, and the first
/// `ceil(band * N)` are marked. Sectors whose venues all lack the field are
/// reported with `venue_count == 0`.
pub fn sector_top_share(
    outcomes: &[VenueOutcome],
    field: OutcomeField,
    band: f64,
    direction: Direction,
) -> Result<Vec<SectorShare>> {
    if !(band > 0.0 && band < 1.0) {
        return Err(Error::InvalidArgument(format!("band must lie in (0, 1), got {band}")));
    }
    let mut ranked: Vec<(&VenueOutcome, f64)> =
        outcomes.iter().filter_map(|o| o.field(field).map(|v| (o, v))).collect();
    if ranked.is_empty() {
        return Err(Error::InsufficientData(format!("no venue has {} defined", field.name())));
    }
    ranked.sort_by(|(a, va), (b, vb)| {
        let ord = match direction {
            Direction::Highest => vb.total_cmp(va),
            Direction::Lowest => va.total_cmp(vb),
        };
        ord.then_with(|| a.venue_id.cmp(&b.venue_id))
    });
    let k = band_size(band, ranked.len());

    let mut tally: BTreeMap<&str, (usize, usize)> = outcomes.iter().map(|o| (o.sector_id.as_str(), (0, 0))).collect();
    for (rank, (o, _)) in ranked.iter().enumerate() {
        let entry = tally.get_mut(o.sector_id.as_str()).expect("sector seeded above");
        entry.1 += 1;
        if rank < k {
            entry.0 += 1;
        }
    }
    Ok(tally
        .into_iter()
        .map(|(sector, (marked, total))| SectorShare {
            sector_id: sector.to_string(),
            share_in_top_band: if total == 0 { 0.0 } else { marked as f64 / total as f64 },
            venue_count: total,
        })
        .collect())
}
