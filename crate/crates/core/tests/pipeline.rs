use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resilience::pipeline::{with_threads, write_synth, NetworkResult, Run, RunConfig};
use resilience::sectornet::{CorePeripheryLabels, VenueClass};
use resilience::spatiotemporal::{spatial_stats, LatLon};
use resilience::stats::{wilcoxon_signed_rank, Dependent};
use resilience::synth::{generate_city, GroundTruth, SynthConfig};
use resilience::{Cbg, Dataset, Error, Period, RawVisit, Venue};

fn synth(seed: u64, contraction: f64) -> (Dataset, GroundTruth) {
    generate_city(&SynthConfig {
        seed,
        budget_contraction: contraction,
        ..SynthConfig::default()
    })
    .unwrap()
}

fn run_on(ds: Dataset, out: &Path) -> Run {
    let cfg = RunConfig {
        out: out.to_path_buf(),
        ..RunConfig::default()
    };
    Run::from_dataset(cfg, ds, "test".into())
}

fn read_csv(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    let header = r.headers().unwrap().clone();
    r.records()
        .map(|rec| header.iter().zip(rec.unwrap().iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn synth_is_byte_identical_for_a_seed() {
    let cfg = SynthConfig {
        seed: 7,
        ..SynthConfig::default()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    with_threads(Some(1), || write_synth(&cfg, a.path())).unwrap().unwrap();
    with_threads(Some(4), || write_synth(&cfg, b.path())).unwrap().unwrap();
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.keys().collect::<Vec<_>>(), ["cbgs.csv", "ground_truth.json", "venues.csv", "visits.csv"]);
    assert_eq!(fa, fb);

    let other = tempfile::tempdir().unwrap();
    write_synth(&SynthConfig { seed: 8, ..cfg }, other.path()).unwrap();
    assert_ne!(fa["visits.csv"], files(other.path())["visits.csv"]);
}

#[test]
fn synth_output_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let (ds, truth, _) = write_synth(&SynthConfig::default(), dir.path()).unwrap();
    let cfg = RunConfig {
        data: Some(dir.path().to_path_buf()),
        ..RunConfig::default()
    };
    let run = Run::load(cfg).unwrap();
    assert_eq!(run.dataset.venues().len(), ds.venues().len());
    assert_eq!(run.dataset.edges().len(), ds.edges().len());
    assert_eq!(run.dataset.total_visits(Period::Shock), ds.total_visits(Period::Shock));
    let sectors: BTreeSet<String> = ds.sectors().into_iter().collect();
    assert!(truth.planted_core.iter().all(|s| sectors.contains(s)));
}

#[test]
fn planted_core_ranks_in_the_top_half() {
    let mut seeds_all_in = 0;
    let (mut in_top, mut planted) = (0, 0);
    for seed in 0..20 {
        let (ds, truth) = synth(seed, 0.5);
        let dir = tempfile::tempdir().unwrap();
        let net = run_on(ds, dir.path()).network().unwrap().network;
        let mut order: Vec<usize> = (0..net.sectors.len()).collect();
        order.sort_by(|&a, &b| net.centrality[b].total_cmp(&net.centrality[a]));
        let top: BTreeSet<&String> = order[..net.sectors.len() / 2].iter().map(|&i| &net.sectors[i]).collect();
        let hits = truth.planted_core.iter().filter(|s| top.contains(s)).count();
        in_top += hits;
        planted += truth.planted_core.len();
        if hits == truth.planted_core.len() {
            seeds_all_in += 1;
        }
    }
    eprintln!("seeds with every planted core sector in the top half: {seeds_all_in}/20; sectors: {in_top}/{planted}");
    assert!(seeds_all_in >= 19);
    assert!(in_top as f64 >= 0.95 * planted as f64);
}

#[test]
fn analyze_keeps_venues_visited_in_both_periods() {
    let (ds, _) = synth(1, 0.5);
    let mut visited = vec![[0u64; 2]; ds.venues().len()];
    for e in ds.edges() {
        visited[e.venue][e.period.index()] += e.visit_count;
    }
    let both = visited.iter().filter(|v| v[0] > 0 && v[1] > 0).count();
    let dir = tempfile::tempdir().unwrap();
    let run = run_on(ds, dir.path());
    let analysis = run.analyze().unwrap();
    assert_eq!(analysis.report.outcomes.len(), both);
    assert_eq!(analysis.report.outcomes.len() + analysis.report.exclusions.len(), run.dataset.venues().len());
    run.write_analysis(&analysis).unwrap();
    assert_eq!(read_csv(&dir.path().join("outcomes.csv")).len(), both);
}

#[test]
fn empty_shock_period_is_an_error() {
    let venues = vec![Venue::new("v1", 40.0, -75.0, "s1"), Venue::new("v2", 40.0, -75.0, "s2")];
    let cbgs: Vec<Cbg> = (0..4).map(|i| Cbg::new(format!("c{i}"), 40.0, -75.0, 1000.0 * (i + 1) as f64, 100)).collect();
    let visits = vec![RawVisit::new("v1", "c0", Period::Pre, 3), RawVisit::new("v2", "c1", Period::Pre, 3)];
    let err = Dataset::new(venues, cbgs, visits, 2).unwrap_err();
    assert!(err.is_input_error(), "{err}");
}

fn small_city(prefs: &[&[u64]], n_groups: usize) -> Dataset {
    let n_sectors = prefs[0].len();
    let venues: Vec<Venue> = (0..n_sectors).map(|i| Venue::new(format!("v{i}"), 40.0, -75.0, format!("s{i}"))).collect();
    let cbgs: Vec<Cbg> = (0..prefs.len())
        .map(|m| Cbg::new(format!("c{m}"), 40.0 + 0.01 * m as f64, -75.0, 1000.0 * (m + 1) as f64, 100))
        .collect();
    let mut visits = Vec::new();
    for (m, row) in prefs.iter().enumerate() {
        for (i, &c) in row.iter().enumerate() {
            for p in Period::ALL {
                if c > 0 {
                    visits.push(RawVisit::new(format!("v{i}"), format!("c{m}"), p, c));
                }
            }
        }
    }
    Dataset::new(venues, cbgs, visits, n_groups).unwrap()
}

#[test]
fn two_sector_city_has_no_positive_edge() {
    // A CBG over-represented in one of two sectors is under-represented in the
    // other, so the preferred sets are disjoint and the proximity is zero.
    let ds = small_city(&[&[5, 1], &[1, 5], &[4, 2], &[2, 4]], 2);
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(run_on(ds, dir.path()).network(), Err(Error::ZeroMatrix)));
}

#[test]
fn smallest_city_with_one_edge() {
    // s0 and s1 share their preferring CBGs; s2 is preferred by a third CBG only.
    let ds = small_city(&[&[4, 4, 1], &[4, 4, 1], &[1, 1, 8], &[3, 3, 3]], 2);
    let dir = tempfile::tempdir().unwrap();
    let run = run_on(ds, dir.path());
    let net = run.network().unwrap();
    run.write_network(&net).unwrap();
    let edges = read_csv(&dir.path().join("edgelist.csv"));
    let positive: Vec<_> = edges.iter().filter(|e| e["proximity"].parse::<f64>().unwrap() > 0.0).collect();
    assert_eq!(positive.len(), 1, "{edges:?}");
    assert_eq!((positive[0]["sector_i"].as_str(), positive[0]["sector_j"].as_str()), ("s0", "s1"));
    assert_eq!(positive[0]["proximity"], "1");
    let c = net.network.centrality_map();
    assert!((c["s0"] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    assert!((c["s1"] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    assert!(c["s2"] < 1e-9);
}

#[test]
fn harsher_contraction_shrinks_peripheral_shock_visits() {
    let levels = [1.0, 0.75, 0.5, 0.25];
    let mut ratios = Vec::new();
    for &c in &levels {
        let mut sum = 0.0;
        for seed in 0..5 {
            let (ds, truth) = synth(seed, c);
            let core: BTreeSet<&String> = truth.planted_core.iter().collect();
            let mut v = [0u64; 2];
            for e in ds.edges() {
                if !core.contains(&ds.venues()[e.venue].sector_id) {
                    v[e.period.index()] += e.visit_count;
                }
            }
            sum += v[1] as f64 / v[0] as f64;
        }
        ratios.push(sum / 5.0);
    }
    eprintln!("peripheral shock/pre visit ratio by contraction {levels:?}: {ratios:?}");
    for w in ratios.windows(2) {
        assert!(w[1] < w[0], "{ratios:?}");
    }
    assert!((ratios[0] - 1.0).abs() < 0.05);
}

#[test]
fn regressions_on_the_planted_city() {
    let (ds, _) = synth(0, 0.5);
    let dir = tempfile::tempdir().unwrap();
    let run = run_on(ds, dir.path());
    let analysis = run.analyze().unwrap();
    let net = run.network().unwrap();
    let reg = run.regress(&analysis, &net).unwrap();
    for dep in [Dependent::DeltaS, Dependent::DeltaM] {
        let specs = reg.specifications(dep);
        assert_eq!(specs.len(), 4);
        for w in specs.windows(2) {
            assert!(w[1].r2 >= w[0].r2 - 1e-12);
            assert!((w[1].intercept - w[0].intercept).abs() < 1e-12);
        }
    }
    let (b, p) = reg.specifications(Dependent::DeltaS)[3].coefficient("centrality").unwrap();
    assert!(b < 0.0 && p < 0.01, "delta_s centrality {b} p {p}");
    let (b, p) = reg.specifications(Dependent::DeltaM)[3].coefficient("centrality").unwrap();
    assert!(b > 0.0 && p < 0.01, "delta_m centrality {b} p {p}");
}

#[test]
fn peripheral_visitors_travel_further() {
    for seed in 0..3 {
        let (ds, _) = synth(seed, 0.5);
        let dir = tempfile::tempdir().unwrap();
        let run = run_on(ds, dir.path());
        let cmp = run.compare(&run.network().unwrap()).unwrap();
        for period in ["pre", "shock"] {
            let value = |class| {
                cmp.rows
                    .iter()
                    .find(|r| r.metric == "median_distance_km" && r.class == class && r.period == period)
                    .unwrap()
                    .value
            };
            let (core, peri) = (value(VenueClass::Core), value(VenueClass::Peripheral));
            assert!(peri > core, "seed {seed} {period}: peripheral {peri} core {core}");
        }
    }
}

#[test]
fn shuffled_labels_give_negligible_effects() {
    let (ds, _) = synth(2, 0.5);
    let dir = tempfile::tempdir().unwrap();
    let run = run_on(ds, dir.path());
    let network = run.network().unwrap().network;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut total = 0.0;
    let rounds = 10;
    for _ in 0..rounds {
        let mut sectors = network.sectors.clone();
        sectors.shuffle(&mut rng);
        let labels = CorePeripheryLabels {
            core: sectors[..10].to_vec(),
            peripheral: sectors[sectors.len() - 10..].to_vec(),
            k: 10,
        };
        let net = NetworkResult {
            network: network.clone(),
            labels,
        };
        let cmp = run.compare(&net).unwrap();
        let t = cmp
            .tests
            .iter()
            .find(|t| t.metric == "median_distance_km" && t.comparison == "core_vs_peripheral" && t.period.as_deref() == Some("pre"))
            .unwrap();
        total += t.result.as_ref().unwrap().effect_r;
    }
    let mean_r = total / rounds as f64;
    assert!(mean_r < 0.15, "mean effect r under shuffled labels {mean_r}");

    let net = run.network().unwrap();
    let t = run
        .compare(&net)
        .unwrap()
        .tests
        .into_iter()
        .find(|t| t.metric == "median_distance_km" && t.comparison == "core_vs_peripheral" && t.period.as_deref() == Some("pre"))
        .unwrap();
    assert!(t.result.unwrap().effect_r > 2.0 * mean_r);
}

#[test]
fn compare_outputs_rederive_from_per_venue_table() {
    let (ds, _) = synth(3, 0.5);
    let dir = tempfile::tempdir().unwrap();
    ds.write_csvs(dir.path(), None).unwrap();
    let run = run_on(ds, dir.path());
    run.report().unwrap();

    let venues: BTreeMap<String, (f64, f64)> = read_csv(&dir.path().join("venues.csv"))
        .into_iter()
        .map(|r| (r["venue_id"].clone(), (r["lat"].parse().unwrap(), r["lon"].parse().unwrap())))
        .collect();
    let per_venue = read_csv(&dir.path().join("compare_venues.csv"));
    let compare = read_csv(&dir.path().join("compare.csv"));
    let reported = |metric: &str, class: &str, period: &str| -> f64 {
        compare
            .iter()
            .find(|r| r["metric"] == metric && r["class"] == class && r["period"] == period)
            .unwrap_or_else(|| panic!("{metric} {class} {period}"))["value"]
            .parse()
            .unwrap()
    };
    let columns = [
        ("median_distance_km", "distance_km"),
        ("covered_cbgs", "covered_cbgs"),
        ("median_dwell_min", "dwell_min"),
        ("hourly_entropy_bits", "hourly_entropy_bits"),
    ];
    for class in ["core", "peripheral"] {
        for period in ["pre", "shock"] {
            let rows: Vec<_> = per_venue.iter().filter(|r| r["class"] == class && r["period"] == period).collect();
            for (metric, column) in columns {
                let vals: Vec<f64> = rows
                    .iter()
                    .filter(|r| !r[column].is_empty())
                    .map(|r| r[column].parse().unwrap())
                    .filter(|v| column != "covered_cbgs" || *v > 0.0)
                    .collect();
                assert_eq!(median(vals), reported(metric, class, period), "{metric} {class} {period}");
            }
        }
        let mut ids: Vec<&String> = per_venue.iter().filter(|r| r["class"] == class).map(|r| &r["venue_id"]).collect();
        ids.dedup();
        let points: Vec<LatLon> = ids.iter().map(|id| LatLon::new(venues[*id].0, venues[*id].1)).collect();
        let st = spatial_stats(&points, 1.0).unwrap();
        assert_eq!(st.rog_km, reported("rog_km", class, "static"));
        assert_eq!(st.mer_km, reported("mer_km", class, "static"));
        assert_eq!(st.entropy_bits, reported("spatial_entropy_bits", class, "static"));
    }

    // the core-vs-peripheral test pairs the i-th venue of each class
    let distances = |class: &str| -> Vec<f64> {
        per_venue
            .iter()
            .filter(|r| r["class"] == class && r["period"] == "pre")
            .map(|r| r["distance_km"].parse().unwrap())
            .collect()
    };
    let pairs: Vec<(f64, f64)> = distances("core").into_iter().zip(distances("peripheral")).collect();
    let ours = wilcoxon_signed_rank(&pairs).unwrap();
    let tests: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("tests.json")).unwrap()).unwrap();
    let t = tests["tests"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["metric"] == "median_distance_km" && t["comparison"] == "core_vs_peripheral" && t["period"] == "pre")
        .unwrap();
    assert_eq!(t["n_pairs"].as_u64().unwrap() as usize, pairs.len());
    assert_eq!(t["result"]["p_two_sided"].as_f64().unwrap(), ours.p_two_sided);
    assert_eq!(t["result"]["effect_r"].as_f64().unwrap(), ours.effect_r);
}

#[test]
fn every_artifact_carries_the_header() {
    let (ds, _) = synth(4, 0.5);
    let dir = tempfile::tempdir().unwrap();
    let run = run_on(ds, dir.path());
    let written = run.report().unwrap();
    let expected = format!("# {} config_hash=test", run.meta.tool_version);
    for name in &written {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        if name.ends_with(".csv") {
            assert_eq!(text.lines().next().unwrap(), expected, "{name}");
        } else {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["meta"]["config_hash"], "test", "{name}");
            assert_eq!(v["meta"]["tool_version"].as_str().unwrap(), run.meta.tool_version);
        }
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["artifacts"].as_array().unwrap().len(), written.len() - 1);
}
