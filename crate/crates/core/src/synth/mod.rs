//! Seeded synthetic cities with planted core/peripheral structure.
//!
//! Every sector gets an essentialness `e` in `[0, 1]`. Essential sectors draw
//! broad, short-range demand from all CBGs; the others concentrate demand on a
//! taste window of CBGs (their niche) and draw visitors from farther away. In
//! the shock period each CBG's budget shrinks by `budget_contraction` and is
//! re-spent preferentially on essential sectors, while discretionary trips
//! lose their non-niche visitors and get shorter, though they stay longer than
//! essential ones. With a contraction of 1 the
//! two periods are independent draws from the same model.
//!
//! Each CBG and each venue draws from its own ChaCha stream, so the output is
//! a pure function of the config whatever the thread schedule.
//!
//! [`oracle`] holds brute-force reference implementations for the tests.

pub mod oracle;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, LogNormal, Normal, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{Cbg, Dataset, Period, RawVisit, Venue, DEFAULT_GROUPS, HOURS};
use crate::spatiotemporal::{LatLon, LocalProjection};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthConfig {
    pub n_cbgs: usize,
    pub n_sectors: usize,
    pub n_venues: usize,
    /// Fraction of sectors planted as core.
    pub core_fraction: f64,
    /// In-shock visit budget multiplier; 1 disables the shock.
    pub budget_contraction: f64,
    /// Demand multiplier inside the niche of the least essential sector.
    pub niche_affinity: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_cbgs: 200,
            n_sectors: 50,
            n_venues: 2000,
            core_fraction: 0.2,
            budget_contraction: 0.5,
            niche_affinity: 8.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.n_sectors < 2 {
            return fail(format!("n_sectors must be at least 2, got {}", self.n_sectors));
        }
        if self.n_venues < self.n_sectors {
            return fail(format!("n_venues ({}) is less than n_sectors ({})", self.n_venues, self.n_sectors));
        }
        if self.n_cbgs < DEFAULT_GROUPS {
            return fail(format!("n_cbgs must be at least {DEFAULT_GROUPS}, got {}", self.n_cbgs));
        }
        if !(self.core_fraction > 0.0 && self.core_fraction < 1.0) {
            return fail(format!("core_fraction must lie in (0, 1), got {}", self.core_fraction));
        }
        if !(self.budget_contraction > 0.0 && self.budget_contraction <= 1.0) {
            return fail(format!("budget_contraction must lie in (0, 1], got {}", self.budget_contraction));
        }
        if !(self.niche_affinity >= 1.0 && self.niche_affinity.is_finite()) {
            return fail(format!("niche_affinity must be at least 1, got {}", self.niche_affinity));
        }
        Ok(())
    }
}

/// Direction of a sector's change relative to the cross-sector median:
/// -1 below, +1 above, 0 when no shock is planted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpectedSign {
    pub delta_s: i8,
    pub delta_m: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    pub config: SynthConfig,
    /// Sorted.
    pub planted_core: Vec<String>,
    pub essentialness: BTreeMap<String, f64>,
    pub expected_sign: BTreeMap<String, ExpectedSign>,
}

const ORIGIN: LatLon = LatLon { lat: 39.95, lon: -75.16 };
const CITY_KM: f64 = 30.0;
const BASE_INCOME: f64 = 60_000.0;
const VISITS_PER_RESIDENT: f64 = 2.5;
/// Weight of the income rank in a CBG's taste coordinate.
const TASTE_INCOME_WEIGHT: f64 = 0.2;
/// Exponents of the contraction applied to discretionary demand in the shock.
const SECTOR_SHIFT: f64 = 2.0;
const NICHE_SHIFT: f64 = 2.0;
/// Exponent of the contraction applied to the decay length of discretionary trips.
const DECAY_SHIFT: f64 = 0.5;
/// Poisson means below this are treated as zero visits.
const MIN_RATE: f64 = 1e-6;

const LAYOUT_STREAM: u64 = 0;
const CBG_STREAM: u64 = 1 << 32;
const VENUE_STREAM: u64 = 2 << 32;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

struct Sector {
    id: String,
    essentialness: f64,
    window_center: f64,
    window_half_width: f64,
    affinity: f64,
    mean_affinity: f64,
    decay_km: f64,
    peak_hour: f64,
    hour_spread: f64,
}

impl Sector {
    fn in_niche(&self, taste: f64) -> bool {
        (taste - self.window_center).abs() <= self.window_half_width
    }

    /// Pre-shock demand weight of a CBG with the given taste, normalized so
    /// the mean over all CBGs is 1.
    fn pre_weight(&self, taste: f64) -> f64 {
        if self.in_niche(taste) {
            self.affinity / self.mean_affinity
        } else {
            1.0 / self.mean_affinity
        }
    }

    fn discretion(&self) -> f64 {
        1.0 - self.essentialness
    }
}

struct Layout {
    cbgs: Vec<Cbg>,
    cbg_xy: Vec<(f64, f64)>,
    taste: Vec<f64>,
    sectors: Vec<Sector>,
    venues: Vec<Venue>,
    venue_xy: Vec<(f64, f64)>,
    venue_sector: Vec<usize>,
    attractiveness: Vec<f64>,
}

fn layout(cfg: &SynthConfig) -> Layout {
    let mut rng = stream(cfg.seed, LAYOUT_STREAM);
    let proj = LocalProjection::new(ORIGIN);
    let std_normal = Normal::new(0.0, 1.0).expect("valid normal");

    let cbg_xy: Vec<(f64, f64)> = (0..cfg.n_cbgs)
        .map(|_| (rng.random::<f64>() * CITY_KM, rng.random::<f64>() * CITY_KM))
        .collect();
    // richer toward the east
    let cbgs: Vec<Cbg> = cbg_xy
        .iter()
        .enumerate()
        .map(|(m, &(x, y))| {
            let log_income = BASE_INCOME.ln() + 0.8 * (x / CITY_KM - 0.5) + 0.3 * std_normal.sample(&mut rng);
            let population = rng.random_range(600..=3000);
            let at = proj.unproject((x - CITY_KM / 2.0, y - CITY_KM / 2.0));
            Cbg::new(format!("C{m:04}"), at.lat, at.lon, log_income.exp().round(), population)
        })
        .collect();

    let mut by_income: Vec<usize> = (0..cfg.n_cbgs).collect();
    by_income.sort_by(|&a, &b| cbgs[a].median_income.total_cmp(&cbgs[b].median_income).then(a.cmp(&b)));
    let mut taste = vec![0.0; cfg.n_cbgs];
    for (rank, &m) in by_income.iter().enumerate() {
        let income_rank = rank as f64 / (cfg.n_cbgs - 1) as f64;
        taste[m] = TASTE_INCOME_WEIGHT * income_rank + (1.0 - TASTE_INCOME_WEIGHT) * rng.random::<f64>();
    }

    let mut levels: Vec<f64> = (0..cfg.n_sectors).map(|i| i as f64 / (cfg.n_sectors - 1) as f64).collect();
    levels.shuffle(&mut rng);
    let sectors: Vec<Sector> = levels
        .into_iter()
        .enumerate()
        .map(|(i, e)| Sector {
            id: format!("S{i:03}"),
            essentialness: e,
            window_center: rng.random::<f64>(),
            window_half_width: 0.05 + 0.2 * e,
            affinity: cfg.niche_affinity.powf(1.0 - e),
            mean_affinity: 1.0,
            decay_km: 3.0 + 2.0 * (1.0 - e),
            peak_hour: rng.random_range(10.0..17.0),
            hour_spread: 2.0 + 4.0 * e,
        })
        .collect();

    let mut sectors = sectors;
    for s in sectors.iter_mut() {
        let inside = taste.iter().filter(|&&t| s.in_niche(t)).count() as f64;
        let n = taste.len() as f64;
        s.mean_affinity = (inside * s.affinity + (n - inside)) / n;
    }

    let mut venue_sector: Vec<usize> = (0..cfg.n_venues).map(|v| v % cfg.n_sectors).collect();
    venue_sector.shuffle(&mut rng);
    let attr_dist = LogNormal::new(0.0, 0.5).expect("valid lognormal");
    let mut venues = Vec::with_capacity(cfg.n_venues);
    let mut venue_xy = Vec::with_capacity(cfg.n_venues);
    let mut attractiveness = Vec::with_capacity(cfg.n_venues);
    for (v, &s) in venue_sector.iter().enumerate() {
        let (x, y) = (rng.random::<f64>() * CITY_KM, rng.random::<f64>() * CITY_KM);
        let at = proj.unproject((x - CITY_KM / 2.0, y - CITY_KM / 2.0));
        venues.push(Venue::new(format!("V{v:05}"), at.lat, at.lon, sectors[s].id.clone()));
        venue_xy.push((x, y));
        attractiveness.push(attr_dist.sample(&mut rng));
    }
    Layout {
        cbgs,
        cbg_xy,
        taste,
        sectors,
        venues,
        venue_xy,
        venue_sector,
        attractiveness,
    }
}

/// Expected visits of CBG `m` to every venue in one period.
fn visit_rates(cfg: &SynthConfig, lay: &Layout, m: usize, period: Period) -> Vec<f64> {
    let c = match period {
        Period::Pre => 1.0,
        Period::Shock => cfg.budget_contraction,
    };
    let budget = lay.cbgs[m].population as f64 * VISITS_PER_RESIDENT * c;

    let sector_weight: Vec<f64> = lay
        .sectors
        .iter()
        .map(|s| {
            let niche = s.in_niche(lay.taste[m]);
            let mut w = s.pre_weight(lay.taste[m]);
            w *= c.powf(SECTOR_SHIFT * s.discretion());
            if !niche {
                w *= c.powf(NICHE_SHIFT * s.discretion());
            }
            w
        })
        .collect();
    let weight_total: f64 = sector_weight.iter().sum();

    let (x, y) = lay.cbg_xy[m];
    let mut venue_weight = vec![0.0; lay.venues.len()];
    let mut per_sector = vec![0.0; lay.sectors.len()];
    for (v, &s) in lay.venue_sector.iter().enumerate() {
        let sector = &lay.sectors[s];
        let decay = sector.decay_km * c.powf(DECAY_SHIFT * sector.discretion());
        let (vx, vy) = lay.venue_xy[v];
        let d = ((vx - x).powi(2) + (vy - y).powi(2)).sqrt();
        venue_weight[v] = lay.attractiveness[v] * (-d / decay).exp();
        per_sector[s] += venue_weight[v];
    }
    venue_weight
        .iter()
        .zip(&lay.venue_sector)
        .map(|(w, &s)| budget * sector_weight[s] / weight_total * w / per_sector[s])
        .collect()
}

fn hourly_profile(sector: &Sector) -> [f64; HOURS] {
    let mut p = [0.0; HOURS];
    for (h, slot) in p.iter_mut().enumerate() {
        let z = (h as f64 + 0.5 - sector.peak_hour) / sector.hour_spread;
        *slot = (-0.5 * z * z).exp() + 0.01;
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    p
}

/// Multinomial split of `total` over the profile via sequential binomials.
fn split_hours(total: u64, profile: &[f64; HOURS], rng: &mut ChaCha8Rng) -> [u64; HOURS] {
    let mut out = [0u64; HOURS];
    let mut left = total;
    let mut mass = 1.0;
    for h in 0..HOURS - 1 {
        if left == 0 {
            break;
        }
        let p = (profile[h] / mass).clamp(0.0, 1.0);
        let k = Binomial::new(left, p).expect("valid binomial").sample(rng);
        out[h] = k;
        left -= k;
        mass -= profile[h];
    }
    out[HOURS - 1] += left;
    out
}

/// Generates a city and its planted ground truth.
pub fn generate_city(cfg: &SynthConfig) -> Result<(Dataset, GroundTruth)> {
    cfg.validate()?;
    let mut lay = layout(cfg);

    let per_cbg: Vec<Vec<RawVisit>> = (0..cfg.n_cbgs)
        .into_par_iter()
        .map(|m| {
            let mut rng = stream(cfg.seed, CBG_STREAM + m as u64);
            let mut out = Vec::new();
            for period in Period::ALL {
                for (v, rate) in visit_rates(cfg, &lay, m, period).into_iter().enumerate() {
                    if rate < MIN_RATE {
                        continue;
                    }
                    let k = Poisson::new(rate).expect("positive rate").sample(&mut rng) as u64;
                    if k > 0 {
                        out.push(RawVisit::new(lay.venues[v].venue_id.clone(), lay.cbgs[m].cbg_id.clone(), period, k));
                    }
                }
            }
            out
        })
        .collect();
    let visits: Vec<RawVisit> = per_cbg.into_iter().flatten().collect();

    let mut totals = vec![[0u64; 2]; cfg.n_venues];
    let venue_index: BTreeMap<&str, usize> =
        lay.venues.iter().enumerate().map(|(i, v)| (v.venue_id.as_str(), i)).collect();
    for visit in &visits {
        totals[venue_index[visit.venue_id.as_str()]][visit.period.index()] += visit.visit_count;
    }
    let dwell_noise = Normal::<f64>::new(0.0, 0.05).expect("valid normal");
    for (v, venue) in lay.venues.iter_mut().enumerate() {
        let mut rng = stream(cfg.seed, VENUE_STREAM + v as u64);
        let sector = &lay.sectors[lay.venue_sector[v]];
        let profile = hourly_profile(sector);
        let base_dwell = 20.0 + 50.0 * sector.discretion();
        for period in Period::ALL {
            let c: f64 = if period == Period::Pre { 1.0 } else { cfg.budget_contraction };
            let dwell = base_dwell * c.powf(0.5 * sector.discretion()) * dwell_noise.sample(&mut rng).exp();
            venue.dwell_minutes[period.index()] = Some((dwell * 10.0).round() / 10.0);
            venue.hourly_counts[period.index()] = Some(split_hours(totals[v][period.index()], &profile, &mut rng));
        }
    }

    let truth = ground_truth(cfg, &lay.sectors);
    let dataset = Dataset::new(lay.venues, lay.cbgs, visits, DEFAULT_GROUPS)?;
    Ok((dataset, truth))
}

fn ground_truth(cfg: &SynthConfig, sectors: &[Sector]) -> GroundTruth {
    let mut by_e: Vec<&Sector> = sectors.iter().collect();
    by_e.sort_by(|a, b| b.essentialness.total_cmp(&a.essentialness).then_with(|| a.id.cmp(&b.id)));
    let n_core = ((cfg.core_fraction * sectors.len() as f64).round() as usize).clamp(1, sectors.len() - 1);
    let mut planted_core: Vec<String> = by_e[..n_core].iter().map(|s| s.id.clone()).collect();
    planted_core.sort();

    let mut levels: Vec<f64> = sectors.iter().map(|s| s.essentialness).collect();
    levels.sort_by(f64::total_cmp);
    let median = crate::spatiotemporal::median(&mut levels).expect("at least two sectors");
    let shocked = cfg.budget_contraction < 1.0;
    let expected_sign = sectors
        .iter()
        .map(|s| {
            let side: i8 = if !shocked || s.essentialness == median {
                0
            } else if s.essentialness > median {
                1
            } else {
                -1
            };
            (s.id.clone(), ExpectedSign { delta_s: -side, delta_m: side })
        })
        .collect();
    GroundTruth {
        config: cfg.clone(),
        planted_core,
        essentialness: sectors.iter().map(|s| (s.id.clone(), s.essentialness)).collect(),
        expected_sign,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SynthConfig {
        SynthConfig {
            n_cbgs: 40,
            n_sectors: 8,
            n_venues: 80,
            seed,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            SynthConfig { n_venues: 10, n_sectors: 20, ..small(0) },
            SynthConfig { core_fraction: 1.0, ..small(0) },
            SynthConfig { budget_contraction: 0.0, ..small(0) },
            SynthConfig { niche_affinity: 0.5, ..small(0) },
            SynthConfig { n_cbgs: 3, ..small(0) },
        ];
        for cfg in bad {
            assert!(matches!(generate_city(&cfg), Err(Error::Config(_))), "{cfg:?}");
        }
    }

    #[test]
    fn same_seed_same_city() {
        let (a, ta) = generate_city(&small(7)).unwrap();
        let (b, tb) = generate_city(&small(7)).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.venues(), b.venues());
        assert_eq!(ta, tb);
        let (c, _) = generate_city(&small(8)).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn every_sector_has_venues_and_hours_match_totals() {
        let (ds, truth) = generate_city(&small(1)).unwrap();
        assert_eq!(ds.sectors().len(), 8);
        assert_eq!(truth.planted_core.len(), 2);
        for (v, venue) in ds.venues().iter().enumerate() {
            for p in Period::ALL {
                let visits: u64 = ds.venue_edges(v).iter().filter(|e| e.period == p).map(|e| e.visit_count).sum();
                assert_eq!(venue.hourly(p).unwrap().iter().sum::<u64>(), visits);
                assert!(venue.dwell(p).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn null_world_has_no_expected_direction() {
        let (_, truth) = generate_city(&SynthConfig { budget_contraction: 1.0, ..small(2) }).unwrap();
        assert!(truth.expected_sign.values().all(|s| s.delta_s == 0 && s.delta_m == 0));
    }
}
