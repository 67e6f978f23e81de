//! Sector dependency network built from revealed visitation preferences.
//!
//! A CBG prefers a sector when its share of visits to the sector exceeds the
//! sector's share of all visits. Two sectors are close when CBGs preferring
//! one also tend to prefer the other; proximity is the larger of the two
//! conditional co-preference frequencies. Sector importance is the dominant
//! eigenvector of the proximity matrix.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{Dataset, Period};

#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceMatrix {
    /// Row keys.
    pub cbgs: Vec<String>,
    /// Column keys.
    pub sectors: Vec<String>,
    /// `r[m][i]`: CBG `m`'s visit share to sector `i` over the sector's share
    /// of all visits.
    pub r: Vec<Vec<f64>>,
    /// `preferred[m][i]` iff `r[m][i] > 1`, decided in exact integer arithmetic.
    pub preferred: Vec<Vec<bool>>,
    /// CBG visit totals over the grand total; `sum_m weight[m] * r[m][i] == 1`.
    pub cbg_weights: Vec<f64>,
    /// Sectors with no visits in the period.
    pub dropped_sectors: Vec<String>,
    /// CBGs with no visits in the period.
    pub dropped_cbgs: Vec<String>,
}

/// Preference matrix from a `cbgs x sectors` count table. Zero rows and zero
/// columns are dropped and listed.
pub fn preferences_from_counts(cbgs: &[String], sectors: &[String], counts: &[Vec<u64>]) -> Result<PreferenceMatrix> {
    if counts.len() != cbgs.len() || counts.iter().any(|row| row.len() != sectors.len()) {
        return Err(Error::InvalidArgument("count table does not match its keys".into()));
    }
    let col_totals: Vec<u64> = (0..sectors.len()).map(|i| counts.iter().map(|row| row[i]).sum()).collect();
    let keep_cols: Vec<usize> = (0..sectors.len()).filter(|&i| col_totals[i] > 0).collect();
    let row_totals: Vec<u64> = counts.iter().map(|row| row.iter().sum()).collect();
    let keep_rows: Vec<usize> = (0..cbgs.len()).filter(|&m| row_totals[m] > 0).collect();
    if keep_cols.is_empty() || keep_rows.is_empty() {
        return Err(Error::InsufficientData("no visits to build preferences from".into()));
    }
    let grand: u64 = row_totals.iter().sum();

    let mut r = Vec::with_capacity(keep_rows.len());
    let mut preferred = Vec::with_capacity(keep_rows.len());
    for &m in &keep_rows {
        let row_total = row_totals[m];
        let mut r_row = Vec::with_capacity(keep_cols.len());
        let mut p_row = Vec::with_capacity(keep_cols.len());
        for &i in &keep_cols {
            let c = counts[m][i];
            let f_mi = c as f64 / row_total as f64;
            let f_i = col_totals[i] as f64 / grand as f64;
            r_row.push(f_mi / f_i);
            p_row.push(c as u128 * grand as u128 > row_total as u128 * col_totals[i] as u128);
        }
        r.push(r_row);
        preferred.push(p_row);
    }

    Ok(PreferenceMatrix {
        cbgs: keep_rows.iter().map(|&m| cbgs[m].clone()).collect(),
        sectors: keep_cols.iter().map(|&i| sectors[i].clone()).collect(),
        r,
        preferred,
        cbg_weights: keep_rows.iter().map(|&m| row_totals[m] as f64 / grand as f64).collect(),
        dropped_sectors: (0..sectors.len())
            .filter(|&i| col_totals[i] == 0)
            .map(|i| sectors[i].clone())
            .collect(),
        dropped_cbgs: (0..cbgs.len())
            .filter(|&m| row_totals[m] == 0)
            .map(|m| cbgs[m].clone())
            .collect(),
    })
}

/// CBG-by-sector visit counts for one period.
pub fn sector_counts(dataset: &Dataset, period: Period) -> (Vec<String>, Vec<String>, Vec<Vec<u64>>) {
    let sectors = dataset.sectors();
    let sector_of: BTreeMap<&str, usize> = sectors.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let venue_sector: Vec<usize> = dataset.venues().iter().map(|v| sector_of[v.sector_id.as_str()]).collect();
    let mut counts = vec![vec![0u64; sectors.len()]; dataset.cbgs().len()];
    for e in dataset.edges().iter().filter(|e| e.period == period) {
        counts[e.cbg][venue_sector[e.venue]] += e.visit_count;
    }
    let cbgs = dataset.cbgs().iter().map(|c| c.cbg_id.clone()).collect();
    (cbgs, sectors, counts)
}

pub fn preference_matrix(dataset: &Dataset, period: Period) -> Result<PreferenceMatrix> {
    let (cbgs, sectors, counts) = sector_counts(dataset, period);
    preferences_from_counts(&cbgs, &sectors, &counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proximity {
    /// Indices (into the preference matrix columns) of the retained sectors.
    pub retained: Vec<usize>,
    /// Columns preferred by no CBG.
    pub excluded: Vec<usize>,
    /// Symmetric, zero diagonal, over `retained`.
    pub matrix: Vec<Vec<f64>>,
}

/// Packed column of a boolean matrix.
struct BitColumn(Vec<u64>);

impl BitColumn {
    fn from_column(rows: &[Vec<bool>], col: usize) -> Self {
        let mut words = vec![0u64; rows.len().div_ceil(64)];
        for (m, row) in rows.iter().enumerate() {
            if row[col] {
                words[m / 64] |= 1 << (m % 64);
            }
        }
        BitColumn(words)
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn overlap(&self, other: &BitColumn) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum()
    }
}

/// Proximity from a `cbgs x sectors` preference table:
/// `P[i][j] = max(|S_i & S_j| / |S_j|, |S_i & S_j| / |S_i|)` where `S_i` is
/// the set of CBGs preferring sector `i`.
pub fn proximity_from_preferred(preferred: &[Vec<bool>]) -> Proximity {
    let n_cols = preferred.first().map_or(0, Vec::len);
    let columns: Vec<BitColumn> = (0..n_cols).map(|i| BitColumn::from_column(preferred, i)).collect();
    let sizes: Vec<u32> = columns.iter().map(BitColumn::count).collect();
    let (retained, excluded): (Vec<usize>, Vec<usize>) = (0..n_cols).partition(|&i| sizes[i] > 0);

    let k = retained.len();
    let mut matrix = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in (a + 1)..k {
            let (i, j) = (retained[a], retained[b]);
            let both = columns[i].overlap(&columns[j]) as f64;
            let given_j = both / sizes[j] as f64;
            let given_i = both / sizes[i] as f64;
            let p = given_j.max(given_i);
            matrix[a][b] = p;
            matrix[b][a] = p;
        }
    }
    Proximity {
        retained,
        excluded,
        matrix,
    }
}

pub fn proximity(pref: &PreferenceMatrix) -> Proximity {
    proximity_from_preferred(&pref.preferred)
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Centrality {
    pub scores: Vec<f64>,
    pub iterations: usize,
}

/// Dominant eigenvector of a symmetric nonnegative matrix by power iteration.
///
/// Iterates `x <- (A + sI) x / |(A + sI) x|` from the uniform vector, with `s`
/// half the largest row sum. The shift leaves the eigenvectors unchanged and
/// keeps the iteration from oscillating on bipartite graphs, where
/// `-lambda_max` is also an eigenvalue; tying it to the row sums makes the
/// iterates independent of the scale of the weights. Stops once successive
/// iterates differ by less than `tol` in L2.
pub fn eigenvector_centrality(matrix: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<Centrality> {
    let n = matrix.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("centrality needs at least 2 nodes, got {n}")));
    }
    if matrix.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    let mut has_edge = false;
    for i in 0..n {
        for j in 0..n {
            let w = matrix[i][j];
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidArgument(format!("entry ({i}, {j}) = {w} is not a nonnegative number")));
            }
            if w != matrix[j][i] {
                return Err(Error::InvalidArgument(format!("matrix is not symmetric at ({i}, {j})")));
            }
            has_edge |= i != j && w > 0.0;
        }
    }
    if !has_edge {
        return Err(Error::ZeroMatrix);
    }

    let shift = matrix.iter().map(|row| row.iter().sum::<f64>()).fold(0.0, f64::max) / 2.0;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut last_step = f64::INFINITY;
    for iter in 1..=max_iter {
        let mut next: Vec<f64> = matrix
            .par_iter()
            .enumerate()
            .map(|(i, row)| shift * x[i] + row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        last_step = next.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        x = next;
        if last_step < tol {
            return Ok(Centrality { scores: x, iterations: iter });
        }
    }
    Err(Error::NonConvergence { max_iter, last_step })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorNetwork {
    pub sectors: Vec<String>,
    /// Row-major, symmetric, zero diagonal.
    pub proximity: Vec<Vec<f64>>,
    /// Nonnegative, unit L2 norm.
    pub centrality: Vec<f64>,
    pub iterations: usize,
    /// Sectors without visits or preferred by no CBG; not part of the graph.
    pub excluded_sectors: Vec<String>,
    /// Sectors whose centrality is negligible, typically outside the dominant
    /// connected component.
    pub weak_sectors: Vec<String>,
}

impl SectorNetwork {
    pub fn centrality_of(&self, sector: &str) -> Option<f64> {
        self.sectors.iter().position(|s| s == sector).map(|i| self.centrality[i])
    }

    pub fn centrality_map(&self) -> BTreeMap<String, f64> {
        self.sectors.iter().cloned().zip(self.centrality.iter().copied()).collect()
    }
}

/// Centrality below this marks a sector as cut off from the dominant component.
pub const WEAK_CENTRALITY: f64 = 1e-6;

/// Builds the network from pre-shock visitation.
pub fn build_network(dataset: &Dataset, tol: f64, max_iter: usize) -> Result<SectorNetwork> {
    let pref = preference_matrix(dataset, Period::Pre)?;
    network_from_preferences(&pref, tol, max_iter)
}

pub fn network_from_preferences(pref: &PreferenceMatrix, tol: f64, max_iter: usize) -> Result<SectorNetwork> {
    let prox = proximity(pref);
    let sectors: Vec<String> = prox.retained.iter().map(|&i| pref.sectors[i].clone()).collect();
    let mut excluded_sectors = pref.dropped_sectors.clone();
    excluded_sectors.extend(prox.excluded.iter().map(|&i| pref.sectors[i].clone()));
    excluded_sectors.sort();

    let centrality = eigenvector_centrality(&prox.matrix, tol, max_iter)?;
    let weak_sectors = sectors
        .iter()
        .zip(&centrality.scores)
        .filter(|(_, &c)| c < WEAK_CENTRALITY)
        .map(|(s, _)| s.clone())
        .collect();
    Ok(SectorNetwork {
        sectors,
        proximity: prox.matrix,
        centrality: centrality.scores,
        iterations: centrality.iterations,
        excluded_sectors,
        weak_sectors,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorePeripheryLabels {
    /// Most central first.
    pub core: Vec<String>,
    /// Least central last.
    pub peripheral: Vec<String>,
    pub k: usize,
}

/// Top-`k` and bottom-`k` sectors by centrality; ties go to the smaller key.
pub fn classify_core_periphery(network: &SectorNetwork, k: usize) -> Result<CorePeripheryLabels> {
    let n = network.sectors.len();
    if k == 0 || 2 * k > n {
        return Err(Error::InvalidArgument(format!(
            "cannot pick {k} core and {k} peripheral sectors from {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        network.centrality[b]
            .total_cmp(&network.centrality[a])
            .then_with(|| network.sectors[a].cmp(&network.sectors[b]))
    });
    Ok(CorePeripheryLabels {
        core: order[..k].iter().map(|&i| network.sectors[i].clone()).collect(),
        peripheral: order[n - k..].iter().map(|&i| network.sectors[i].clone()).collect(),
        k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VenueClass {
    Core,
    Peripheral,
}

impl VenueClass {
    pub fn name(self) -> &'static str {
        match self {
            VenueClass::Core => "core",
            VenueClass::Peripheral => "peripheral",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalancedSample {
    /// Venue indices. The sampled class keeps the sampler's draw order, the
    /// other class is in venue-key order; position `i` of each list forms a pair.
    pub core: Vec<usize>,
    pub peripheral: Vec<usize>,
    /// The class that was subsampled (the larger pool).
    pub sampled: VenueClass,
    pub core_pool: usize,
    pub peripheral_pool: usize,
}

/// All venues of the smaller class plus an equal-size seeded sample without
/// replacement from the larger one (normally the core pool).
pub fn sample_balanced_pois(dataset: &Dataset, labels: &CorePeripheryLabels, seed: u64) -> Result<BalancedSample> {
    let core: BTreeSet<&str> = labels.core.iter().map(String::as_str).collect();
    let peripheral: BTreeSet<&str> = labels.peripheral.iter().map(String::as_str).collect();
    let pool = |set: &BTreeSet<&str>| -> Vec<usize> {
        dataset
            .venues()
            .iter()
            .enumerate()
            .filter(|(_, v)| set.contains(v.sector_id.as_str()))
            .map(|(i, _)| i)
            .collect()
    };
    let core_pool = pool(&core);
    let periph_pool = pool(&peripheral);
    if core_pool.is_empty() || periph_pool.is_empty() {
        return Err(Error::InsufficientData(format!(
            "core pool has {} venues and peripheral pool {}",
            core_pool.len(),
            periph_pool.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |from: &[usize], amount: usize, rng: &mut ChaCha8Rng| -> Vec<usize> {
        index::sample(rng, from.len(), amount).into_iter().map(|i| from[i]).collect()
    };
    let (core_pool_len, periph_pool_len) = (core_pool.len(), periph_pool.len());
    let (core, peripheral, sampled) = if core_pool_len >= periph_pool_len {
        (draw(&core_pool, periph_pool_len, &mut rng), periph_pool, VenueClass::Core)
    } else {
        let p = draw(&periph_pool, core_pool_len, &mut rng);
        (core_pool, p, VenueClass::Peripheral)
    };
    Ok(BalancedSample {
        core,
        peripheral,
        sampled,
        core_pool: core_pool_len,
        peripheral_pool: periph_pool_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Cbg, RawVisit, Venue};

    fn keys(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn two_by_two_preferences() {
        let p = preferences_from_counts(&keys("c", 2), &keys("s", 2), &[vec![3, 1], vec![1, 3]]).unwrap();
        assert_eq!(p.r, vec![vec![1.5, 0.5], vec![0.5, 1.5]]);
        assert_eq!(p.preferred, vec![vec![true, false], vec![false, true]]);
    }

    #[test]
    fn ratio_of_one_is_not_preferred() {
        let p = preferences_from_counts(&keys("c", 2), &keys("s", 2), &[vec![1, 1], vec![2, 2]]).unwrap();
        assert!(p.r.iter().flatten().all(|&r| r == 1.0));
        assert!(p.preferred.iter().flatten().all(|&b| !b));
        // f_mi = 0.2, f_i = 0.1
        let p = preferences_from_counts(&keys("c", 2), &keys("s", 2), &[vec![1, 4], vec![0, 5]]).unwrap();
        assert_eq!(p.r[0][0], 2.0);
        assert!(p.preferred[0][0]);
    }

    #[test]
    fn empty_rows_and_columns_are_dropped() {
        let p = preferences_from_counts(&keys("c", 3), &keys("s", 3), &[vec![1, 0, 2], vec![0, 0, 0], vec![3, 0, 1]])
            .unwrap();
        assert_eq!(p.sectors, vec!["s0", "s2"]);
        assert_eq!(p.dropped_sectors, vec!["s1"]);
        assert_eq!(p.dropped_cbgs, vec!["c1"]);
    }

    #[test]
    fn proximity_examples() {
        // CBGs A, B, C; sector 0 preferred by {A, B}, sector 1 by {B}
        let pref = vec![vec![true, false], vec![true, true], vec![false, false]];
        let p = proximity_from_preferred(&pref);
        assert_eq!(p.matrix, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);

        let same = vec![vec![true, true], vec![false, false]];
        assert_eq!(proximity_from_preferred(&same).matrix[0][1], 1.0);

        let disjoint = vec![vec![true, false], vec![false, true]];
        assert_eq!(proximity_from_preferred(&disjoint).matrix[0][1], 0.0);

        let unpreferred = vec![vec![true, false, true], vec![true, false, false]];
        let p = proximity_from_preferred(&unpreferred);
        assert_eq!(p.retained, vec![0, 2]);
        assert_eq!(p.excluded, vec![1]);
        assert_eq!(p.matrix[0][1], 1.0);
    }

    #[test]
    fn centrality_of_complete_and_path_graphs() {
        let k3 = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        let c = eigenvector_centrality(&k3, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        for v in &c.scores {
            assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        }

        let path = vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]];
        let c = eigenvector_centrality(&path, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let expected = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (v, e) in c.scores.iter().zip(expected) {
            assert!((v - e).abs() < 1e-9, "{:?}", c.scores);
        }

        let scaled: Vec<Vec<f64>> = path.iter().map(|r| r.iter().map(|v| v * 10.0).collect()).collect();
        let c10 = eigenvector_centrality(&scaled, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        for (a, b) in c.scores.iter().zip(&c10.scores) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn centrality_errors() {
        assert!(matches!(
            eigenvector_centrality(&[vec![0.0, 0.0], vec![0.0, 0.0]], 1e-10, 10),
            Err(Error::ZeroMatrix)
        ));
        assert!(eigenvector_centrality(&[vec![0.0]], 1e-10, 10).is_err());
        assert!(eigenvector_centrality(&[vec![0.0, 1.0], vec![2.0, 0.0]], 1e-10, 10).is_err());
        assert!(eigenvector_centrality(&[vec![0.0, -1.0], vec![-1.0, 0.0]], 1e-10, 10).is_err());
        let k3 = vec![vec![0.0, 1.0, 0.1], vec![1.0, 0.0, 1.0], vec![0.1, 1.0, 0.0]];
        assert!(matches!(
            eigenvector_centrality(&k3, 1e-300, 3),
            Err(Error::NonConvergence { max_iter: 3, .. })
        ));
    }

    #[test]
    fn disconnected_component_is_flagged() {
        // triangle {0,1,2} and a weaker edge {3,4}
        let mut m = vec![vec![0.0; 5]; 5];
        for (i, j, w) in [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 0.5)] {
            m[i][j] = w;
            m[j][i] = w;
        }
        let c = eigenvector_centrality(&m, DEFAULT_TOL, 10_000).unwrap();
        assert!(c.scores[3] < WEAK_CENTRALITY && c.scores[4] < WEAK_CENTRALITY);
    }

    fn network(centrality: &[f64]) -> SectorNetwork {
        let n = centrality.len();
        SectorNetwork {
            sectors: keys("s", n),
            proximity: vec![vec![0.0; n]; n],
            centrality: centrality.to_vec(),
            iterations: 1,
            excluded_sectors: vec![],
            weak_sectors: vec![],
        }
    }

    #[test]
    fn core_periphery_partition() {
        let net = network(&(0..20).map(|i| i as f64).collect::<Vec<_>>());
        let labels = classify_core_periphery(&net, 10).unwrap();
        assert_eq!(labels.core[0], "s19");
        assert_eq!(labels.peripheral.last().unwrap(), "s0");
        assert!(labels.core.iter().all(|s| !labels.peripheral.contains(s)));

        let labels = classify_core_periphery(&network(&[0.3, 0.9, 0.1]), 1).unwrap();
        assert_eq!((labels.core, labels.peripheral), (vec!["s1".to_string()], vec!["s2".to_string()]));

        // s0 and s2 tie at rank 1; the smaller key wins
        let labels = classify_core_periphery(&network(&[0.5, 0.1, 0.5, 0.2]), 1).unwrap();
        assert_eq!(labels.core, vec!["s0"]);
        assert!(classify_core_periphery(&network(&[0.5, 0.1, 0.5]), 2).is_err());
    }

    fn pool_dataset(n_core: usize, n_periph: usize) -> Dataset {
        let mut venues = Vec::new();
        let mut visits = Vec::new();
        for i in 0..n_core + n_periph {
            let sector = if i < n_core { "core" } else { "edge" };
            let id = format!("v{i:04}");
            venues.push(Venue::new(id.clone(), 40.0, -75.0, sector));
            visits.push(RawVisit::new(id.clone(), "c0", Period::Pre, 1));
            visits.push(RawVisit::new(id, "c1", Period::Shock, 1));
        }
        let cbgs = vec![Cbg::new("c0", 40.0, -75.0, 1.0, 1), Cbg::new("c1", 40.0, -75.0, 2.0, 1)];
        Dataset::new(venues, cbgs, visits, 2).unwrap()
    }

    #[test]
    fn balanced_sampling() {
        let ds = pool_dataset(1000, 100);
        let labels = CorePeripheryLabels {
            core: vec!["core".into()],
            peripheral: vec!["edge".into()],
            k: 1,
        };
        let a = sample_balanced_pois(&ds, &labels, 7).unwrap();
        assert_eq!((a.core.len(), a.peripheral.len()), (100, 100));
        assert_eq!(a.sampled, VenueClass::Core);
        let distinct: BTreeSet<_> = a.core.iter().collect();
        assert_eq!(distinct.len(), 100);
        assert!(a.core.iter().all(|&v| ds.venues()[v].sector_id == "core"));

        assert_eq!(a, sample_balanced_pois(&ds, &labels, 7).unwrap());
        let b = sample_balanced_pois(&ds, &labels, 8).unwrap();
        assert_ne!(a.core, b.core);
        assert_eq!(b.core.len(), 100);

        let small_core = pool_dataset(10, 50);
        let s = sample_balanced_pois(&small_core, &labels, 1).unwrap();
        assert_eq!((s.core.len(), s.peripheral.len(), s.sampled), (10, 10, VenueClass::Peripheral));
    }
}
