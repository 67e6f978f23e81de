//! Geographic dispersion of venue sets and per-venue visitation statistics.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{Dataset, Period};

/// Mean Earth radius (IUGG), km.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

pub const DEFAULT_CELL_KM: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        LatLon { lat, lon }
    }
}

pub fn haversine_km(a: LatLon, b: LatLon) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Coordinate centroid (mean latitude, mean longitude).
pub fn centroid(points: &[LatLon]) -> Option<LatLon> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    Some(LatLon {
        lat: points.iter().map(|p| p.lat).sum::<f64>() / n,
        lon: points.iter().map(|p| p.lon).sum::<f64>() / n,
    })
}

/// Direction of the mean of the points as unit vectors: the point minimizing the
/// mean squared chord distance. Falls back to the coordinate centroid when the
/// mean vector vanishes.
pub fn spherical_centroid(points: &[LatLon]) -> Option<LatLon> {
    let fallback = centroid(points)?;
    let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
    for p in points {
        let (lat, lon) = (p.lat.to_radians(), p.lon.to_radians());
        x += lat.cos() * lon.cos();
        y += lat.cos() * lon.sin();
        z += lat.sin();
    }
    let h = x.hypot(y);
    if h.hypot(z) < 1e-12 * points.len() as f64 {
        return Some(fallback);
    }
    if points.iter().all(|p| *p == points[0]) {
        return Some(points[0]);
    }
    Some(LatLon::new(z.atan2(h).to_degrees(), y.atan2(x).to_degrees()))
}

/// Equirectangular projection to km about an origin. Adequate at metro scale;
/// distortion grows with the square of the extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalProjection {
    origin: LatLon,
    cos_lat: f64,
}

impl LocalProjection {
    pub fn new(origin: LatLon) -> Self {
        LocalProjection {
            origin,
            cos_lat: origin.lat.to_radians().cos(),
        }
    }

    /// Projection about the coordinate centroid of `points`.
    pub fn centered_on(points: &[LatLon]) -> Option<Self> {
        centroid(points).map(Self::new)
    }

    pub fn project(&self, p: LatLon) -> (f64, f64) {
        let x = (p.lon - self.origin.lon).to_radians() * self.cos_lat * EARTH_RADIUS_KM;
        let y = (p.lat - self.origin.lat).to_radians() * EARTH_RADIUS_KM;
        (x, y)
    }

    pub fn unproject(&self, (x, y): (f64, f64)) -> LatLon {
        LatLon {
            lat: self.origin.lat + (y / EARTH_RADIUS_KM).to_degrees(),
            lon: self.origin.lon + (x / (EARTH_RADIUS_KM * self.cos_lat)).to_degrees(),
        }
    }
}

/// Azimuthal equidistant projection to km about an origin: distance and
/// bearing from the origin are kept exactly, other distances to second order in
/// the extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AzimuthalProjection {
    origin: LatLon,
    lat0: f64,
    lon0: f64,
}

impl AzimuthalProjection {
    pub fn new(origin: LatLon) -> Self {
        AzimuthalProjection {
            origin,
            lat0: origin.lat.to_radians(),
            lon0: origin.lon.to_radians(),
        }
    }

    pub fn centered_on(points: &[LatLon]) -> Option<Self> {
        spherical_centroid(points).map(Self::new)
    }

    pub fn project(&self, p: LatLon) -> (f64, f64) {
        let rho = haversine_km(self.origin, p);
        if rho == 0.0 {
            return (0.0, 0.0);
        }
        let (lat, dlon) = (p.lat.to_radians(), p.lon.to_radians() - self.lon0);
        let bearing = (dlon.sin() * lat.cos())
            .atan2(self.lat0.cos() * lat.sin() - self.lat0.sin() * lat.cos() * dlon.cos());
        (rho * bearing.sin(), rho * bearing.cos())
    }

    pub fn unproject(&self, (x, y): (f64, f64)) -> LatLon {
        if x == 0.0 && y == 0.0 {
            return self.origin;
        }
        let c = x.hypot(y) / EARTH_RADIUS_KM;
        let bearing = x.atan2(y);
        let lat = (self.lat0.sin() * c.cos() + self.lat0.cos() * c.sin() * bearing.cos()).asin();
        let lon = self.lon0
            + (bearing.sin() * c.sin() * self.lat0.cos()).atan2(c.cos() - self.lat0.sin() * lat.sin());
        LatLon::new(lat.to_degrees(), lon.to_degrees())
    }
}

fn require_points(points: &[LatLon]) -> Result<()> {
    if points.is_empty() {
        Err(Error::InsufficientData("empty point set".into()))
    } else {
        Ok(())
    }
}

/// Root-mean-square haversine distance from the spherical centroid.
pub fn radius_of_gyration(points: &[LatLon]) -> Result<f64> {
    require_points(points)?;
    let c = spherical_centroid(points).expect("nonempty");
    let ms = points.iter().map(|&p| haversine_km(c, p).powi(2)).sum::<f64>() / points.len() as f64;
    Ok(ms.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl Circle {
    fn around(p: (f64, f64)) -> Self {
        Circle { x: p.0, y: p.1, r: 0.0 }
    }

    fn diameter(a: (f64, f64), b: (f64, f64)) -> Self {
        let (x, y) = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        Circle {
            x,
            y,
            r: dist((x, y), a).max(dist((x, y), b)),
        }
    }

    /// Circumcircle; falls back to the widest diameter circle for
    /// (near-)collinear triples.
    fn through(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Self {
        let (bx, by) = (b.0 - a.0, b.1 - a.1);
        let (cx, cy) = (c.0 - a.0, c.1 - a.1);
        let d = 2.0 * (bx * cy - by * cx);
        let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
        if d.abs() <= 1e-12 * scale {
            return [Circle::diameter(a, b), Circle::diameter(a, c), Circle::diameter(b, c)]
                .into_iter()
                .max_by(|p, q| p.r.total_cmp(&q.r))
                .expect("three candidates");
        }
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        let center = (a.0 + ux, a.1 + uy);
        Circle {
            x: center.0,
            y: center.1,
            r: dist(center, a).max(dist(center, b)).max(dist(center, c)),
        }
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        dist((self.x, self.y), p) <= self.r * (1.0 + 1e-12) + 1e-12
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Smallest circle enclosing planar points (Welzl's algorithm in its
/// iterative move-to-front form, over a fixed-seed shuffle).
pub fn min_enclosing_circle(points: &[(f64, f64)]) -> Option<Circle> {
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    let mut c = Circle::around(*pts.first()?);
    for i in 1..pts.len() {
        if c.contains(pts[i]) {
            continue;
        }
        c = Circle::around(pts[i]);
        for j in 0..i {
            if c.contains(pts[j]) {
                continue;
            }
            c = Circle::diameter(pts[i], pts[j]);
            for k in 0..j {
                if !c.contains(pts[k]) {
                    c = Circle::through(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Some(c)
}

/// Minimum enclosing radius (km). The circle is found in the azimuthal
/// equidistant projection about the spherical centroid; the radius is the
/// largest haversine distance from its center, so it is measured the same way
/// as the radius of gyration.
pub fn min_enclosing_radius(points: &[LatLon]) -> Result<f64> {
    require_points(points)?;
    let proj = AzimuthalProjection::centered_on(points).expect("nonempty");
    let xy: Vec<(f64, f64)> = points.iter().map(|&p| proj.project(p)).collect();
    let circle = min_enclosing_circle(&xy).expect("nonempty");
    let center = proj.unproject((circle.x, circle.y));
    Ok(points.iter().map(|&p| haversine_km(center, p)).fold(0.0, f64::max))
}

/// Base-2 Shannon entropy of a count distribution; 0 for an empty one.
pub fn entropy_bits(counts: impl IntoIterator<Item = u64>) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Entropy of the point distribution over a square grid of side `cell_km`
/// anchored at the coordinate centroid.
pub fn spatial_entropy(points: &[LatLon], cell_km: f64) -> Result<f64> {
    require_points(points)?;
    if !(cell_km > 0.0) {
        return Err(Error::InvalidArgument(format!("cell size must be positive, got {cell_km}")));
    }
    let proj = LocalProjection::centered_on(points).expect("nonempty");
    let mut cells: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for &p in points {
        let (x, y) = proj.project(p);
        *cells.entry(((x / cell_km).floor() as i64, (y / cell_km).floor() as i64)).or_insert(0) += 1;
    }
    Ok(entropy_bits(cells.into_values()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialStats {
    pub rog_km: f64,
    pub mer_km: f64,
    pub entropy_bits: f64,
}

pub fn spatial_stats(points: &[LatLon], cell_km: f64) -> Result<SpatialStats> {
    Ok(SpatialStats {
        rog_km: radius_of_gyration(points)?,
        mer_km: min_enclosing_radius(points)?,
        entropy_bits: spatial_entropy(points, cell_km)?,
    })
}

/// Median with the midpoint rule for even lengths. Sorts in place.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Median of the multiset in which each value appears `weight` times, with the
/// midpoint rule when the total weight is even. Sorts in place.
pub fn weighted_median(pairs: &mut [(f64, u64)]) -> Option<f64> {
    let total: u64 = pairs.iter().map(|p| p.1).sum();
    if total == 0 {
        return None;
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nth = |k: u64| -> f64 {
        let mut seen = 0;
        for &(v, w) in pairs.iter() {
            seen += w;
            if seen > k {
                return v;
            }
        }
        unreachable!("k < total")
    };
    Some(if total % 2 == 1 {
        nth(total / 2)
    } else {
        (nth(total / 2 - 1) + nth(total / 2)) / 2.0
    })
}

/// Per-venue visitation figures for one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VenueVisitation {
    /// Visit-weighted median CBG-centroid-to-venue distance.
    pub distance_km: Option<f64>,
    /// Distinct CBGs with at least one visit.
    pub covered_cbgs: usize,
    pub dwell_min: Option<f64>,
    pub hourly_entropy_bits: Option<f64>,
}

pub fn venue_visitation(dataset: &Dataset, venue: usize, period: Period) -> VenueVisitation {
    let v = &dataset.venues()[venue];
    let here = LatLon::new(v.lat, v.lon);
    let mut pairs: Vec<(f64, u64)> = dataset
        .venue_edges(venue)
        .iter()
        .filter(|e| e.period == period && e.visit_count > 0)
        .map(|e| {
            let c = &dataset.cbgs()[e.cbg];
            (haversine_km(LatLon::new(c.lat, c.lon), here), e.visit_count)
        })
        .collect();
    VenueVisitation {
        covered_cbgs: pairs.len(),
        distance_km: weighted_median(&mut pairs),
        dwell_min: v.dwell(period),
        hourly_entropy_bits: v
            .hourly(period)
            .filter(|h| h.iter().any(|&c| c > 0))
            .map(|h| entropy_bits(h.iter().copied())),
    }
}

/// Medians over a venue set. A field is `None` when no venue in the set has
/// data for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisitationStats {
    pub median_distance_km: Option<f64>,
    pub covered_cbgs: Option<f64>,
    pub median_dwell_min: Option<f64>,
    pub hourly_entropy_bits: Option<f64>,
}

pub const MAX_HOURLY_ENTROPY: f64 = 4.584_962_500_721_156; // log2(24)

pub fn visitation_stats(dataset: &Dataset, venues: &[usize], period: Period) -> Result<VisitationStats> {
    if venues.is_empty() {
        return Err(Error::InsufficientData("empty venue set".into()));
    }
    let per_venue: Vec<VenueVisitation> = venues
        .par_iter()
        .map(|&v| venue_visitation(dataset, v, period))
        .collect();
    Ok(summarize(&per_venue))
}

pub fn summarize(per_venue: &[VenueVisitation]) -> VisitationStats {
    let collect = |f: &dyn Fn(&VenueVisitation) -> Option<f64>| -> Option<f64> {
        let mut vals: Vec<f64> = per_venue.iter().filter_map(f).collect();
        median(&mut vals)
    };
    VisitationStats {
        median_distance_km: collect(&|v| v.distance_km),
        // venues without visits in the period contribute no coverage figure
        covered_cbgs: collect(&|v| (v.covered_cbgs > 0).then_some(v.covered_cbgs as f64)),
        median_dwell_min: collect(&|v| v.dwell_min),
        hourly_entropy_bits: collect(&|v| v.hourly_entropy_bits),
    }
}
