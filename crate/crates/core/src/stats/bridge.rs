use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::Dataset;
use crate::metrics::venue_segregation;
use crate::spatiotemporal::{haversine_km, LatLon};

pub const DEFAULT_BRIDGE_RADIUS_KM: f64 = 5.0;

/// `1 - S` of the population-per-income-group vector of a catchment.
pub fn catchment_evenness(pops_by_group: &[u64]) -> Result<f64> {
    Ok(1.0 - venue_segregation(pops_by_group)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BridgeIndex {
    pub value: f64,
    pub venues_used: usize,
    /// Venues whose catchment holds no populated CBG.
    pub venues_excluded: Vec<String>,
}

fn venue_evenness(dataset: &Dataset, venue: usize, radius_km: f64) -> Option<f64> {
    let v = &dataset.venues()[venue];
    let at = LatLon::new(v.lat, v.lon);
    let mut pops = vec![0u64; dataset.n_groups()];
    for (i, c) in dataset.cbgs().iter().enumerate() {
        if haversine_km(at, LatLon::new(c.lat, c.lon)) <= radius_km {
            pops[dataset.income_group(i)] += c.population;
        }
    }
    catchment_evenness(&pops).ok()
}

fn check_radius(radius_km: f64) -> Result<()> {
    if radius_km > 0.0 && radius_km.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("bridge radius must be positive, got {radius_km}")))
    }
}

fn aggregate(ids: &[&str], values: &[Option<f64>]) -> Result<BridgeIndex> {
    let used: Vec<f64> = values.iter().flatten().copied().collect();
    if used.is_empty() {
        return Err(Error::InsufficientData("no venue of the sector has a populated catchment".into()));
    }
    Ok(BridgeIndex {
        value: used.iter().sum::<f64>() / used.len() as f64,
        venues_used: used.len(),
        venues_excluded: ids
            .iter()
            .zip(values)
            .filter(|(_, v)| v.is_none())
            .map(|(id, _)| id.to_string())
            .collect(),
    })
}

/// Mean catchment evenness over the sector's venues, the catchment being all
/// CBGs whose centroid lies within `radius_km` of the venue.
pub fn bridge_index(dataset: &Dataset, sector_id: &str, radius_km: f64) -> Result<BridgeIndex> {
    check_radius(radius_km)?;
    let members: Vec<usize> = (0..dataset.venues().len())
        .filter(|&v| dataset.venues()[v].sector_id == sector_id)
        .collect();
    if members.is_empty() {
        return Err(Error::InvalidArgument(format!("sector \"{sector_id}\" has no venues")));
    }
    let ids: Vec<&str> = members.iter().map(|&v| dataset.venues()[v].venue_id.as_str()).collect();
    let values: Vec<Option<f64>> = members.iter().map(|&v| venue_evenness(dataset, v, radius_km)).collect();
    aggregate(&ids, &values)
}

/// [`bridge_index`] for every sector. Sectors with no populated catchment
/// map to an error.
pub fn bridge_indices(dataset: &Dataset, radius_km: f64) -> Result<BTreeMap<String, Result<BridgeIndex>>> {
    check_radius(radius_km)?;
    let per_venue: Vec<Option<f64>> = (0..dataset.venues().len())
        .into_par_iter()
        .map(|v| venue_evenness(dataset, v, radius_km))
        .collect();
    let mut by_sector: BTreeMap<String, (Vec<&str>, Vec<Option<f64>>)> = BTreeMap::new();
    for (v, value) in dataset.venues().iter().zip(per_venue) {
        let entry = by_sector.entry(v.sector_id.clone()).or_default();
        entry.0.push(&v.venue_id);
        entry.1.push(value);
    }
    Ok(by_sector
        .into_iter()
        .map(|(s, (ids, values))| (s, aggregate(&ids, &values)))
        .collect())
}
