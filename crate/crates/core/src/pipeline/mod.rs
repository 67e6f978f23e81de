//! Pipeline stages and their on-disk artifacts.
//!
//! Every CSV artifact starts with a `# <tool version> config_hash=<hex>` line;
//! every JSON artifact carries the same two values under `meta`. The hash
//! covers the analysis parameters and the input bytes, so two runs with equal
//! hashes produce identical files whatever the thread count or output
//! directory.

mod config;

pub use config::{config_hash, parse_config, InputPaths, RunConfig};

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::{load_dataset, write_file, Dataset, Period};
use crate::metrics::{compute_outcomes, sector_top_share, Direction, OutcomeField, OutcomeReport, SectorShare};
use crate::sectornet::{
    build_network, classify_core_periphery, sample_balanced_pois, BalancedSample, CorePeripheryLabels, SectorNetwork,
    VenueClass,
};
use crate::spatiotemporal::{spatial_stats, summarize, venue_visitation, LatLon, VenueVisitation};
use crate::stats::{
    bridge_indices, feature_importance, mean, nested_regressions, ols_fit, significance_stars, wilcoxon_signed_rank_with,
    Dependent, FeatureShare, PairedTestResult, RegressionTable, SectorRow, SectorTable,
};
use crate::synth::{generate_city, GroundTruth, SynthConfig};
use crate::TOOL_VERSION;

/// Runs `f` on a dedicated pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub tool_version: String,
    pub config_hash: String,
}

#[derive(Serialize)]
struct Doc<'a, T: Serialize> {
    meta: &'a Meta,
    #[serde(flatten)]
    body: &'a T,
}

fn header_line(meta: &Meta) -> String {
    format!("# {} config_hash={}\n", meta.tool_version, meta.config_hash)
}

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_body(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Error::InvalidArgument(format!("csv encoding: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv encoding: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields is utf-8"))
}

struct Artifacts<'a> {
    dir: &'a Path,
    meta: &'a Meta,
    written: Vec<String>,
}

impl<'a> Artifacts<'a> {
    fn new(dir: &'a Path, meta: &'a Meta) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Artifacts {
            dir,
            meta,
            written: Vec::new(),
        })
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let text = header_line(self.meta) + &csv_body(header, rows)?;
        write_file(&self.dir.join(name), &text)?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&Doc { meta: self.meta, body })?;
        text.push('\n');
        write_file(&self.dir.join(name), &text)?;
        self.written.push(name.to_string());
        Ok(())
    }
}

/// A loaded dataset with the configuration it is analyzed under.
pub struct Run {
    pub cfg: RunConfig,
    pub dataset: Dataset,
    pub meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub venues: usize,
    pub cbgs: usize,
    pub sectors: usize,
    pub visit_rows: usize,
    pub visits_pre: u64,
    pub visits_shock: u64,
    pub groups: usize,
    pub venues_with_dwell: usize,
    pub venues_with_hourly: usize,
}

pub struct Analysis {
    pub report: OutcomeReport,
    /// `(field, direction, shares)` for both fields and both directions.
    pub shares: Vec<(OutcomeField, Direction, Vec<SectorShare>)>,
}

pub struct NetworkResult {
    pub network: SectorNetwork,
    pub labels: CorePeripheryLabels,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedSector {
    pub sector_id: String,
    pub reason: String,
}

pub struct RegressionResult {
    pub table: SectorTable,
    pub dropped: Vec<DroppedSector>,
    pub delta_s: Vec<RegressionTable>,
    pub delta_m: Vec<RegressionTable>,
    /// Centrality regressed on the raw change, one predictor each.
    pub reverse_delta_s: RegressionTable,
    pub reverse_delta_m: RegressionTable,
}

impl RegressionResult {
    pub fn specifications(&self, dependent: Dependent) -> &[RegressionTable] {
        match dependent {
            Dependent::DeltaS => &self.delta_s,
            Dependent::DeltaM => &self.delta_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub metric: String,
    pub class: VenueClass,
    /// `static`, `pre` or `shock`.
    pub period: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRecord {
    pub metric: String,
    /// `core_vs_peripheral` or `pre_vs_shock`.
    pub comparison: String,
    pub class: Option<VenueClass>,
    pub period: Option<String>,
    pub n_pairs: usize,
    pub result: Option<PairedTestResult>,
    pub error: Option<String>,
}

pub struct Comparison {
    pub sample: BalancedSample,
    pub rows: Vec<CompareRow>,
    pub tests: Vec<TestRecord>,
    /// `(class, venue, period, figures)` for every sampled venue.
    pub per_venue: Vec<(VenueClass, usize, Period, VenueVisitation)>,
}

const DYNAMIC_METRICS: [&str; 4] = ["median_distance_km", "covered_cbgs", "median_dwell_min", "hourly_entropy_bits"];

fn dynamic_value(metric: &str, v: &VenueVisitation) -> Option<f64> {
    match metric {
        "median_distance_km" => v.distance_km,
        "covered_cbgs" => (v.covered_cbgs > 0).then_some(v.covered_cbgs as f64),
        "median_dwell_min" => v.dwell_min,
        "hourly_entropy_bits" => v.hourly_entropy_bits,
        _ => unreachable!("unknown metric {metric}"),
    }
}

/// Per-sector means feeding the regressions. Sectors outside the network or
/// without a defined change or bridge index are dropped and listed.
pub fn sector_table(
    dataset: &Dataset,
    report: &OutcomeReport,
    network: &SectorNetwork,
    bridge_radius_km: f64,
) -> Result<(SectorTable, Vec<DroppedSector>)> {
    let bridges = bridge_indices(dataset, bridge_radius_km)?;
    let centrality = network.centrality_map();
    let mut by_sector: BTreeMap<&str, Vec<&crate::metrics::VenueOutcome>> = BTreeMap::new();
    for o in &report.outcomes {
        by_sector.entry(o.sector_id.as_str()).or_default().push(o);
    }
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for sector in dataset.sectors() {
        let mut drop = |reason: &str| {
            dropped.push(DroppedSector {
                sector_id: sector.clone(),
                reason: reason.into(),
            })
        };
        let Some(&c) = centrality.get(&sector) else {
            drop("not in the sector network");
            continue;
        };
        let outs = by_sector.get(sector.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let ds: Vec<f64> = outs.iter().filter_map(|o| o.delta_s).collect();
        let dm: Vec<f64> = outs.iter().filter_map(|o| o.delta_m).collect();
        if ds.is_empty() || dm.is_empty() {
            drop("no venue with a defined change");
            continue;
        }
        let bridge = match bridges.get(&sector) {
            Some(Ok(b)) => b.value,
            _ => {
                drop("no venue with a populated catchment");
                continue;
            }
        };
        let s_pre: Vec<f64> = outs.iter().map(|o| o.s_pre).collect();
        let m_pre: Vec<f64> = outs.iter().map(|o| o.m_pre as f64).collect();
        rows.push(SectorRow {
            sector_id: sector.clone(),
            pre_segregation: mean(&s_pre),
            pre_mobility: mean(&m_pre),
            bridge_index: bridge,
            centrality: c,
            delta_s: mean(&ds),
            delta_m: mean(&dm),
        });
    }
    Ok((SectorTable { rows }, dropped))
}

impl Run {
    /// Loads the configured inputs. Every failure to build a dataset from them
    /// counts as an input error.
    pub fn load(cfg: RunConfig) -> Result<Run> {
        cfg.validate()?;
        let inputs = cfg.input_paths()?;
        let dataset = load_dataset(&inputs.visits, &inputs.venues, &inputs.cbgs, cfg.groups).map_err(|e| {
            if e.is_input_error() {
                e
            } else {
                Error::InvalidInput(e.to_string())
            }
        })?;
        let hash = config_hash(&cfg, &inputs)?;
        Ok(Run::from_dataset(cfg, dataset, hash))
    }

    /// Wraps an in-memory dataset; `config_hash` is stamped into artifacts as is.
    pub fn from_dataset(cfg: RunConfig, dataset: Dataset, config_hash: String) -> Run {
        Run {
            cfg,
            dataset,
            meta: Meta {
                tool_version: TOOL_VERSION.to_string(),
                config_hash,
            },
        }
    }

    pub fn out_dir(&self) -> &Path {
        &self.cfg.out
    }

    pub fn validation(&self) -> ValidationReport {
        let ds = &self.dataset;
        ValidationReport {
            venues: ds.venues().len(),
            cbgs: ds.cbgs().len(),
            sectors: ds.sectors().len(),
            visit_rows: ds.edges().len(),
            visits_pre: ds.total_visits(Period::Pre),
            visits_shock: ds.total_visits(Period::Shock),
            groups: ds.n_groups(),
            venues_with_dwell: ds.venues().iter().filter(|v| v.dwell_minutes.iter().any(Option::is_some)).count(),
            venues_with_hourly: ds.venues().iter().filter(|v| v.hourly_counts.iter().any(Option::is_some)).count(),
        }
    }

    pub fn analyze(&self) -> Result<Analysis> {
        let report = compute_outcomes(&self.dataset);
        let mut shares = Vec::new();
        for field in [OutcomeField::DeltaS, OutcomeField::DeltaM] {
            for direction in [Direction::Highest, Direction::Lowest] {
                shares.push((field, direction, sector_top_share(&report.outcomes, field, self.cfg.band, direction)?));
            }
        }
        Ok(Analysis { report, shares })
    }

    /// Network from pre-shock visits. When the graph has fewer than
    /// `2 * core_k` sectors, `k` shrinks to half the sector count.
    pub fn network(&self) -> Result<NetworkResult> {
        let network = build_network(&self.dataset, self.cfg.eigen_tol, self.cfg.eigen_max_iter)?;
        let k = self.cfg.core_k.min(network.sectors.len() / 2);
        let labels = classify_core_periphery(&network, k)?;
        Ok(NetworkResult { network, labels })
    }

    pub fn regress(&self, analysis: &Analysis, net: &NetworkResult) -> Result<RegressionResult> {
        let (table, dropped) = sector_table(&self.dataset, &analysis.report, &net.network, self.cfg.bridge_radius_km)?;
        let delta_s = nested_regressions(&table, Dependent::DeltaS)?;
        let delta_m = nested_regressions(&table, Dependent::DeltaM)?;
        let centrality: Vec<f64> = table.rows.iter().map(|r| r.centrality).collect();
        let ds: Vec<f64> = table.rows.iter().map(|r| r.delta_s).collect();
        let dm: Vec<f64> = table.rows.iter().map(|r| r.delta_m).collect();
        Ok(RegressionResult {
            reverse_delta_s: ols_fit(&centrality, &[ds], &["delta_s"])?,
            reverse_delta_m: ols_fit(&centrality, &[dm], &["delta_m"])?,
            table,
            dropped,
            delta_s,
            delta_m,
        })
    }

    pub fn compare(&self, net: &NetworkResult) -> Result<Comparison> {
        let sample = sample_balanced_pois(&self.dataset, &net.labels, self.cfg.seed)?;
        let classes = [(VenueClass::Core, &sample.core), (VenueClass::Peripheral, &sample.peripheral)];

        let mut per_venue = Vec::new();
        for (class, venues) in classes {
            for &v in venues.iter() {
                for p in Period::ALL {
                    per_venue.push((class, v, p));
                }
            }
        }
        let figures: Vec<VenueVisitation> = {
            use rayon::prelude::*;
            per_venue
                .par_iter()
                .map(|&(_, v, p)| venue_visitation(&self.dataset, v, p))
                .collect()
        };
        let per_venue: Vec<(VenueClass, usize, Period, VenueVisitation)> =
            per_venue.into_iter().zip(figures).map(|((c, v, p), f)| (c, v, p, f)).collect();
        let lookup: BTreeMap<(VenueClass, usize, Period), &VenueVisitation> =
            per_venue.iter().map(|(c, v, p, f)| ((*c, *v, *p), f)).collect();

        let mut rows = Vec::new();
        for (class, venues) in classes {
            let points: Vec<LatLon> = venues
                .iter()
                .map(|&v| {
                    let venue = &self.dataset.venues()[v];
                    LatLon::new(venue.lat, venue.lon)
                })
                .collect();
            let st = spatial_stats(&points, self.cfg.cell_km)?;
            for (metric, value) in [("rog_km", st.rog_km), ("mer_km", st.mer_km), ("spatial_entropy_bits", st.entropy_bits)] {
                rows.push(CompareRow {
                    metric: metric.into(),
                    class,
                    period: "static".into(),
                    value,
                });
            }
            for p in Period::ALL {
                let figs: Vec<VenueVisitation> = venues.iter().map(|&v| *lookup[&(class, v, p)]).collect();
                let s = summarize(&figs);
                let values = [s.median_distance_km, s.covered_cbgs, s.median_dwell_min, s.hourly_entropy_bits];
                for (metric, value) in DYNAMIC_METRICS.iter().zip(values) {
                    if let Some(value) = value {
                        rows.push(CompareRow {
                            metric: metric.to_string(),
                            class,
                            period: p.tag().into(),
                            value,
                        });
                    }
                }
            }
        }

        let test = |pairs: Vec<(f64, f64)>| -> (usize, Option<PairedTestResult>, Option<String>) {
            match wilcoxon_signed_rank_with(&pairs, self.cfg.wilcoxon_exact_max) {
                Ok(r) => (pairs.len(), Some(r), None),
                Err(e) => (pairs.len(), None, Some(e.to_string())),
            }
        };
        let mut tests = Vec::new();
        for metric in DYNAMIC_METRICS {
            for p in Period::ALL {
                let pairs: Vec<(f64, f64)> = sample
                    .core
                    .iter()
                    .zip(&sample.peripheral)
                    .filter_map(|(&c, &q)| {
                        let a = dynamic_value(metric, lookup[&(VenueClass::Core, c, p)])?;
                        let b = dynamic_value(metric, lookup[&(VenueClass::Peripheral, q, p)])?;
                        Some((a, b))
                    })
                    .collect();
                let (n_pairs, result, error) = test(pairs);
                tests.push(TestRecord {
                    metric: metric.into(),
                    comparison: "core_vs_peripheral".into(),
                    class: None,
                    period: Some(p.tag().into()),
                    n_pairs,
                    result,
                    error,
                });
            }
            for (class, venues) in classes {
                let pairs: Vec<(f64, f64)> = venues
                    .iter()
                    .filter_map(|&v| {
                        let a = dynamic_value(metric, lookup[&(class, v, Period::Pre)])?;
                        let b = dynamic_value(metric, lookup[&(class, v, Period::Shock)])?;
                        Some((a, b))
                    })
                    .collect();
                let (n_pairs, result, error) = test(pairs);
                tests.push(TestRecord {
                    metric: metric.into(),
                    comparison: "pre_vs_shock".into(),
                    class: Some(class),
                    period: None,
                    n_pairs,
                    result,
                    error,
                });
            }
        }
        Ok(Comparison {
            sample,
            rows,
            tests,
            per_venue,
        })
    }

    // ---- artifact writers ----

    fn artifacts(&self) -> Result<Artifacts<'_>> {
        Artifacts::new(&self.cfg.out, &self.meta)
    }

    pub fn write_validation(&self, report: &ValidationReport) -> Result<Vec<String>> {
        let mut a = self.artifacts()?;
        a.json("validation.json", report)?;
        Ok(a.written)
    }

    pub fn write_analysis(&self, analysis: &Analysis) -> Result<Vec<String>> {
        let mut a = self.artifacts()?;
        a.csv(
            "outcomes.csv",
            &["venue_id", "sector_id", "s_pre", "s_in", "delta_s", "m_pre", "m_in", "delta_m"],
            analysis.report.outcomes.iter().map(|o| {
                vec![
                    o.venue_id.clone(),
                    o.sector_id.clone(),
                    num(o.s_pre),
                    num(o.s_in),
                    opt(o.delta_s),
                    o.m_pre.to_string(),
                    o.m_in.to_string(),
                    opt(o.delta_m),
                ]
            }),
        )?;
        a.csv(
            "exclusions.csv",
            &["venue_id", "reason"],
            analysis.report.exclusions.iter().map(|e| vec![e.venue_id.clone(), e.reason.clone()]),
        )?;
        a.csv(
            "shares.csv",
            &["field", "direction", "band", "sector_id", "share_in_top_band", "venue_count"],
            analysis.shares.iter().flat_map(|(field, direction, shares)| {
                shares.iter().map(move |s| {
                    vec![
                        field.name().to_string(),
                        match direction {
                            Direction::Highest => "highest".to_string(),
                            Direction::Lowest => "lowest".to_string(),
                        },
                        num(self.cfg.band),
                        s.sector_id.clone(),
                        num(s.share_in_top_band),
                        s.venue_count.to_string(),
                    ]
                })
            }),
        )?;
        Ok(a.written)
    }

    pub fn write_network(&self, net: &NetworkResult) -> Result<Vec<String>> {
        #[derive(Serialize)]
        struct SectorNode<'a> {
            sector_id: &'a str,
            centrality: f64,
            class: Option<VenueClass>,
        }
        #[derive(Serialize)]
        struct NetworkDoc<'a> {
            sectors: Vec<SectorNode<'a>>,
            iterations: usize,
            core_k_requested: usize,
            core_k: usize,
            core: &'a [String],
            peripheral: &'a [String],
            excluded_sectors: &'a [String],
            weak_sectors: &'a [String],
            proximity: &'a [Vec<f64>],
        }
        let core: BTreeSet<&str> = net.labels.core.iter().map(String::as_str).collect();
        let periph: BTreeSet<&str> = net.labels.peripheral.iter().map(String::as_str).collect();
        let n = &net.network;
        let doc = NetworkDoc {
            sectors: n
                .sectors
                .iter()
                .zip(&n.centrality)
                .map(|(s, &c)| SectorNode {
                    sector_id: s,
                    centrality: c,
                    class: if core.contains(s.as_str()) {
                        Some(VenueClass::Core)
                    } else if periph.contains(s.as_str()) {
                        Some(VenueClass::Peripheral)
                    } else {
                        None
                    },
                })
                .collect(),
            iterations: n.iterations,
            core_k_requested: self.cfg.core_k,
            core_k: net.labels.k,
            core: &net.labels.core,
            peripheral: &net.labels.peripheral,
            excluded_sectors: &n.excluded_sectors,
            weak_sectors: &n.weak_sectors,
            proximity: &n.proximity,
        };
        let mut a = self.artifacts()?;
        a.json("network.json", &doc)?;
        let mut edges = Vec::new();
        for i in 0..n.sectors.len() {
            for j in (i + 1)..n.sectors.len() {
                if n.proximity[i][j] > 0.0 {
                    edges.push(vec![n.sectors[i].clone(), n.sectors[j].clone(), num(n.proximity[i][j])]);
                }
            }
        }
        a.csv("edgelist.csv", &["sector_i", "sector_j", "proximity"], edges)?;
        Ok(a.written)
    }

    pub fn write_regression(&self, reg: &RegressionResult) -> Result<Vec<String>> {
        #[derive(Serialize)]
        struct Coef<'a> {
            name: &'a str,
            coefficient: f64,
            std_error: f64,
            t_value: f64,
            p_value: f64,
            stars: &'static str,
        }
        #[derive(Serialize)]
        struct Spec<'a> {
            specification: usize,
            dependent: &'a str,
            features: Vec<Coef<'a>>,
            intercept: Coef<'a>,
            r2: f64,
            adj_r2: f64,
            n_obs: usize,
            df_resid: usize,
        }
        fn spec<'a>(i: usize, dependent: &'a str, t: &'a RegressionTable) -> Spec<'a> {
            Spec {
                specification: i,
                dependent,
                features: (0..t.feature_names.len())
                    .map(|k| Coef {
                        name: &t.feature_names[k],
                        coefficient: t.coefficients[k],
                        std_error: t.std_errors[k],
                        t_value: t.t_values[k],
                        p_value: t.p_values[k],
                        stars: significance_stars(t.p_values[k]),
                    })
                    .collect(),
                intercept: Coef {
                    name: "const",
                    coefficient: t.intercept,
                    std_error: t.intercept_se,
                    t_value: t.intercept / t.intercept_se,
                    p_value: t.intercept_p,
                    stars: significance_stars(t.intercept_p),
                },
                r2: t.r2,
                adj_r2: t.adj_r2,
                n_obs: t.n_obs,
                df_resid: t.df_resid,
            }
        }
        #[derive(Serialize)]
        struct Reverse<'a> {
            note: &'static str,
            centrality_on_delta_s: Spec<'a>,
            centrality_on_delta_m: Spec<'a>,
        }
        #[derive(Serialize)]
        struct RegressionDoc<'a> {
            sectors_used: usize,
            dropped_sectors: &'a [DroppedSector],
            standardization: &'static str,
            stars: &'static str,
            delta_s: Vec<Spec<'a>>,
            delta_m: Vec<Spec<'a>>,
            reverse: Reverse<'a>,
            importance_method: &'static str,
        }
        let doc = RegressionDoc {
            sectors_used: reg.table.rows.len(),
            dropped_sectors: &reg.dropped,
            standardization: "features centered and scaled by the sample standard deviation",
            stars: "*** p<0.01, ** p<0.05, * p<0.1 (two-sided t-test)",
            delta_s: reg.delta_s.iter().enumerate().map(|(i, t)| spec(i + 1, "delta_s", t)).collect(),
            delta_m: reg.delta_m.iter().enumerate().map(|(i, t)| spec(i + 1, "delta_m", t)).collect(),
            reverse: Reverse {
                note: "centrality regressed on the unstandardized sector change; the opposite direction to the specifications above",
                centrality_on_delta_s: spec(1, "centrality", &reg.reverse_delta_s),
                centrality_on_delta_m: spec(1, "centrality", &reg.reverse_delta_m),
            },
            importance_method: "squared standardized coefficient share in specification 4",
        };
        let mut a = self.artifacts()?;
        a.json("regression.json", &doc)?;
        let mut rows = Vec::new();
        for (dep, specs) in [("delta_s", &reg.delta_s), ("delta_m", &reg.delta_m)] {
            if let Some(last) = specs.last() {
                for FeatureShare { feature, share } in feature_importance(last) {
                    rows.push(vec![dep.to_string(), feature, num(share)]);
                }
            }
        }
        a.csv("feature_importance.csv", &["dependent", "feature", "share"], rows)?;
        a.csv(
            "sector_table.csv",
            &["sector_id", "pre_segregation", "pre_mobility", "bridge_index", "centrality", "delta_s", "delta_m"],
            reg.table.rows.iter().map(|r| {
                vec![
                    r.sector_id.clone(),
                    num(r.pre_segregation),
                    num(r.pre_mobility),
                    num(r.bridge_index),
                    num(r.centrality),
                    num(r.delta_s),
                    num(r.delta_m),
                ]
            }),
        )?;
        Ok(a.written)
    }

    pub fn write_comparison(&self, cmp: &Comparison) -> Result<Vec<String>> {
        #[derive(Serialize)]
        struct TestsDoc<'a> {
            pairing: &'static str,
            sampled_class: VenueClass,
            core_pool: usize,
            peripheral_pool: usize,
            venues_per_class: usize,
            tests: &'a [TestRecord],
        }
        let mut a = self.artifacts()?;
        a.csv(
            "compare.csv",
            &["metric", "class", "period", "value"],
            cmp.rows
                .iter()
                .map(|r| vec![r.metric.clone(), r.class.name().into(), r.period.clone(), num(r.value)]),
        )?;
        a.csv(
            "compare_venues.csv",
            &["venue_id", "sector_id", "class", "period", "distance_km", "covered_cbgs", "dwell_min", "hourly_entropy_bits"],
            cmp.per_venue.iter().map(|(class, v, p, f)| {
                let venue = &self.dataset.venues()[*v];
                vec![
                    venue.venue_id.clone(),
                    venue.sector_id.clone(),
                    class.name().into(),
                    p.tag().into(),
                    opt(f.distance_km),
                    f.covered_cbgs.to_string(),
                    opt(f.dwell_min),
                    opt(f.hourly_entropy_bits),
                ]
            }),
        )?;
        a.json(
            "tests.json",
            &TestsDoc {
                pairing: "core_vs_peripheral pairs the i-th core venue with the i-th peripheral venue of the balanced sample; pre_vs_shock pairs each venue with itself",
                sampled_class: cmp.sample.sampled,
                core_pool: cmp.sample.core_pool,
                peripheral_pool: cmp.sample.peripheral_pool,
                venues_per_class: cmp.sample.core.len(),
                tests: &cmp.tests,
            },
        )?;
        Ok(a.written)
    }

    /// All stages plus `manifest.json`.
    pub fn report(&self) -> Result<Vec<String>> {
        let mut written = self.write_validation(&self.validation())?;
        let analysis = self.analyze()?;
        written.extend(self.write_analysis(&analysis)?);
        let net = self.network()?;
        written.extend(self.write_network(&net)?);
        let reg = self.regress(&analysis, &net)?;
        written.extend(self.write_regression(&reg)?);
        let cmp = self.compare(&net)?;
        written.extend(self.write_comparison(&cmp)?);

        #[derive(Serialize)]
        struct Manifest<'a> {
            parameters: BTreeMap<&'static str, String>,
            artifacts: &'a [String],
        }
        written.sort();
        let mut a = self.artifacts()?;
        a.json(
            "manifest.json",
            &Manifest {
                parameters: self.cfg.analysis_parameters().into_iter().collect(),
                artifacts: &written,
            },
        )?;
        written.extend(a.written);
        Ok(written)
    }
}

/// Generates a synthetic city and writes its input tables and ground truth.
pub fn write_synth(cfg: &SynthConfig, out: &Path) -> Result<(Dataset, GroundTruth, Vec<PathBuf>)> {
    let (dataset, truth) = generate_city(cfg)?;
    let hash = hex::encode(Sha256::digest(serde_json::to_vec(cfg)?));
    let meta = Meta {
        tool_version: TOOL_VERSION.to_string(),
        config_hash: hash,
    };
    dataset.write_csvs(out, Some(header_line(&meta).trim_start_matches("# ").trim_end()))?;
    let mut a = Artifacts::new(out, &meta)?;
    a.json("ground_truth.json", &truth)?;
    let paths = ["venues.csv", "cbgs.csv", "visits.csv", "ground_truth.json"]
        .iter()
        .map(|n| out.join(n))
        .collect();
    Ok((dataset, truth, paths))
}
