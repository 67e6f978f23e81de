//! Input tables: venues, CBGs and per-period visit counts.
//!
//! A [`Dataset`] is immutable once built. Venues and CBGs are stored sorted by
//! key and referenced by index from [`VisitEdge`]s, which are aggregated over
//! duplicate `(venue, cbg, period)` rows and kept in sorted order so that the
//! result does not depend on input row order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GROUPS: usize = 5;
pub const HOURS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Period {
    Pre,
    Shock,
}

impl Period {
    pub const ALL: [Period; 2] = [Period::Pre, Period::Shock];

    /// Tag used in `visits.csv` and in report files.
    pub fn tag(self) -> &'static str {
        match self {
            Period::Pre => "pre",
            Period::Shock => "shock",
        }
    }

    /// Long name used in diagnostics.
    pub fn label(self) -> &'static str {
        match self {
            Period::Pre => "pre_shock",
            Period::Shock => "in_shock",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn parse(s: &str) -> Option<Period> {
        match s {
            "pre" => Some(Period::Pre),
            "shock" => Some(Period::Shock),
            _ => None,
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Venue {
    pub venue_id: String,
    pub lat: f64,
    pub lon: f64,
    pub sector_id: String,
    /// Median per-visit dwell in minutes, indexed by [`Period::index`].
    pub dwell_minutes: [Option<f64>; 2],
    /// Visits by local hour, indexed by [`Period::index`].
    pub hourly_counts: [Option<[u64; HOURS]>; 2],
}

impl Venue {
    pub fn new(venue_id: impl Into<String>, lat: f64, lon: f64, sector_id: impl Into<String>) -> Self {
        Venue {
            venue_id: venue_id.into(),
            lat,
            lon,
            sector_id: sector_id.into(),
            dwell_minutes: [None, None],
            hourly_counts: [None, None],
        }
    }

    pub fn dwell(&self, period: Period) -> Option<f64> {
        self.dwell_minutes[period.index()]
    }

    pub fn hourly(&self, period: Period) -> Option<&[u64; HOURS]> {
        self.hourly_counts[period.index()].as_ref()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cbg {
    pub cbg_id: String,
    pub lat: f64,
    pub lon: f64,
    pub median_income: f64,
    pub population: u64,
    pub income_group: Option<usize>,
}

impl Cbg {
    pub fn new(cbg_id: impl Into<String>, lat: f64, lon: f64, median_income: f64, population: u64) -> Self {
        Cbg {
            cbg_id: cbg_id.into(),
            lat,
            lon,
            median_income,
            population,
            income_group: None,
        }
    }
}

/// One input visit row before key resolution and aggregation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawVisit {
    pub venue_id: String,
    pub cbg_id: String,
    pub period: Period,
    pub visit_count: u64,
    /// Source line, when the row came from a file.
    pub line: Option<u64>,
}

impl RawVisit {
    pub fn new(venue_id: impl Into<String>, cbg_id: impl Into<String>, period: Period, visit_count: u64) -> Self {
        RawVisit {
            venue_id: venue_id.into(),
            cbg_id: cbg_id.into(),
            period,
            visit_count,
            line: None,
        }
    }
}

/// Aggregated visit count; `venue` and `cbg` index into the owning [`Dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VisitEdge {
    pub venue: usize,
    pub cbg: usize,
    pub period: Period,
    pub visit_count: u64,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    venues: Vec<Venue>,
    cbgs: Vec<Cbg>,
    edges: Vec<VisitEdge>,
    /// `edges[venue_offsets[v]..venue_offsets[v + 1]]` belong to venue `v`.
    venue_offsets: Vec<usize>,
    n_groups: usize,
    venue_index: HashMap<String, usize>,
    cbg_index: HashMap<String, usize>,
}

impl Dataset {
    /// Validates the tables, assigns income groups and aggregates visits.
    pub fn new(mut venues: Vec<Venue>, mut cbgs: Vec<Cbg>, visits: Vec<RawVisit>, n_groups: usize) -> Result<Self> {
        venues.sort_by(|a, b| a.venue_id.cmp(&b.venue_id));
        cbgs.sort_by(|a, b| a.cbg_id.cmp(&b.cbg_id));
        for v in &venues {
            validate_venue(v)?;
        }
        for c in &cbgs {
            validate_cbg(c)?;
        }
        let venue_index = index_keys(venues.iter().map(|v| v.venue_id.as_str()), "venue_id")?;
        let cbg_index = index_keys(cbgs.iter().map(|c| c.cbg_id.as_str()), "cbg_id")?;
        assign_income_groups(&mut cbgs, n_groups)?;

        let mut totals = [0u64; 2];
        let mut agg: BTreeMap<(usize, usize, Period), u64> = BTreeMap::new();
        for row in &visits {
            let line = row.line.unwrap_or(0);
            let venue = *venue_index.get(&row.venue_id).ok_or_else(|| Error::UnknownKey {
                file: "visits".into(),
                line,
                kind: "venue_id",
                id: row.venue_id.clone(),
            })?;
            let cbg = *cbg_index.get(&row.cbg_id).ok_or_else(|| Error::UnknownKey {
                file: "visits".into(),
                line,
                kind: "cbg_id",
                id: row.cbg_id.clone(),
            })?;
            *agg.entry((venue, cbg, row.period)).or_insert(0) += row.visit_count;
            totals[row.period.index()] += row.visit_count;
        }
        for p in Period::ALL {
            if totals[p.index()] == 0 {
                return Err(Error::MissingPeriod(p.label()));
            }
        }

        let edges: Vec<VisitEdge> = agg
            .into_iter()
            .map(|((venue, cbg, period), visit_count)| VisitEdge {
                venue,
                cbg,
                period,
                visit_count,
            })
            .collect();
        let mut venue_offsets = vec![0usize; venues.len() + 1];
        for e in &edges {
            venue_offsets[e.venue + 1] += 1;
        }
        for i in 0..venues.len() {
            venue_offsets[i + 1] += venue_offsets[i];
        }

        Ok(Dataset {
            venues,
            cbgs,
            edges,
            venue_offsets,
            n_groups,
            venue_index,
            cbg_index,
        })
    }

    pub fn venues(&self) -> &[Venue] {
        &self.venues
    }

    pub fn cbgs(&self) -> &[Cbg] {
        &self.cbgs
    }

    pub fn edges(&self) -> &[VisitEdge] {
        &self.edges
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn venue_idx(&self, venue_id: &str) -> Option<usize> {
        self.venue_index.get(venue_id).copied()
    }

    pub fn cbg_idx(&self, cbg_id: &str) -> Option<usize> {
        self.cbg_index.get(cbg_id).copied()
    }

    pub fn income_group(&self, cbg: usize) -> usize {
        self.cbgs[cbg].income_group.expect("groups are assigned at construction")
    }

    /// All edges of one venue, sorted by (cbg, period).
    pub fn venue_edges(&self, venue: usize) -> &[VisitEdge] {
        &self.edges[self.venue_offsets[venue]..self.venue_offsets[venue + 1]]
    }

    /// Sorted, deduplicated sector keys.
    pub fn sectors(&self) -> Vec<String> {
        let mut s: Vec<String> = self.venues.iter().map(|v| v.sector_id.clone()).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn total_visits(&self, period: Period) -> u64 {
        self.edges.iter().filter(|e| e.period == period).map(|e| e.visit_count).sum()
    }

    /// Writes the three input tables in the format read by [`load_dataset`],
    /// each starting with `header` as a `#` comment line when given.
    pub fn write_csvs(&self, dir: &Path, header: Option<&str>) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let start = || header.map(|h| format!("# {h}\n")).unwrap_or_default();

        let has_optional = self
            .venues
            .iter()
            .any(|v| v.dwell_minutes.iter().any(Option::is_some) || v.hourly_counts.iter().any(Option::is_some));
        let mut out = start();
        out.push_str("venue_id,lat,lon,sector_id");
        if has_optional {
            out.push_str(",dwell_pre,dwell_shock,hourly_pre,hourly_shock");
        }
        out.push('\n');
        for v in &self.venues {
            out.push_str(&format!("{},{},{},{}", v.venue_id, v.lat, v.lon, v.sector_id));
            if has_optional {
                for d in v.dwell_minutes {
                    out.push(',');
                    if let Some(d) = d {
                        out.push_str(&d.to_string());
                    }
                }
                for h in &v.hourly_counts {
                    out.push(',');
                    if let Some(h) = h {
                        let joined: Vec<String> = h.iter().map(u64::to_string).collect();
                        out.push_str(&joined.join("|"));
                    }
                }
            }
            out.push('\n');
        }
        write_file(&dir.join("venues.csv"), &out)?;

        let mut out = start() + "cbg_id,lat,lon,median_income,population\n";
        for c in &self.cbgs {
            out.push_str(&format!("{},{},{},{},{}\n", c.cbg_id, c.lat, c.lon, c.median_income, c.population));
        }
        write_file(&dir.join("cbgs.csv"), &out)?;

        let mut out = start() + "venue_id,cbg_id,period,visit_count\n";
        for e in &self.edges {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.venues[e.venue].venue_id, self.cbgs[e.cbg].cbg_id, e.period, e.visit_count
            ));
        }
        write_file(&dir.join("visits.csv"), &out)
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))
}

fn index_keys<'a>(keys: impl Iterator<Item = &'a str>, kind: &'static str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, k) in keys.enumerate() {
        if map.insert(k.to_string(), i).is_some() {
            return Err(Error::DuplicateKey { kind, id: k.to_string() });
        }
    }
    Ok(map)
}

fn validate_venue(v: &Venue) -> Result<()> {
    let bad = |m: String| Error::InvalidArgument(format!("venue \"{}\": {m}", v.venue_id));
    if !(-90.0..=90.0).contains(&v.lat) || !(-180.0..=180.0).contains(&v.lon) {
        return Err(bad(format!("coordinates ({}, {}) out of range", v.lat, v.lon)));
    }
    for d in v.dwell_minutes.iter().flatten() {
        if !d.is_finite() || *d < 0.0 {
            return Err(bad(format!("dwell {d} must be a nonnegative number")));
        }
    }
    Ok(())
}

fn validate_cbg(c: &Cbg) -> Result<()> {
    let bad = |m: String| Error::InvalidArgument(format!("cbg \"{}\": {m}", c.cbg_id));
    if !(-90.0..=90.0).contains(&c.lat) || !(-180.0..=180.0).contains(&c.lon) {
        return Err(bad(format!("coordinates ({}, {}) out of range", c.lat, c.lon)));
    }
    if !c.median_income.is_finite() || c.median_income <= 0.0 {
        return Err(bad(format!("median_income {} must be positive", c.median_income)));
    }
    if c.population == 0 {
        return Err(bad("population must be positive".into()));
    }
    Ok(())
}

/// Assigns each CBG to one of `n_groups` income groups holding roughly equal
/// population.
///
/// CBGs are ordered by `(median_income, cbg_id)`; a CBG goes to the group whose
/// population band contains its cumulative-population midpoint. The sequence is
/// then clamped so consecutive CBGs never skip a group and every group is
/// nonempty, which only changes anything when a single very large CBG spans
/// more than one band.
pub fn assign_income_groups(cbgs: &mut [Cbg], n_groups: usize) -> Result<()> {
    if n_groups < 2 {
        return Err(Error::InvalidArgument(format!("n_groups must be at least 2, got {n_groups}")));
    }
    let n = cbgs.len();
    if n < n_groups {
        return Err(Error::InsufficientData(format!("{n} CBGs cannot fill {n_groups} income groups")));
    }
    if let Some(c) = cbgs.iter().find(|c| c.population == 0) {
        return Err(Error::InvalidArgument(format!("cbg \"{}\": population must be positive", c.cbg_id)));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        cbgs[a]
            .median_income
            .total_cmp(&cbgs[b].median_income)
            .then_with(|| cbgs[a].cbg_id.cmp(&cbgs[b].cbg_id))
    });

    let total: u128 = cbgs.iter().map(|c| c.population as u128).sum();
    let groups = n_groups as u128;
    let mut cumulative: u128 = 0;
    let mut prev: Option<usize> = None;
    for (rank, &idx) in order.iter().enumerate() {
        let pop = cbgs[idx].population as u128;
        // floor(midpoint / (total / groups)) in exact integer arithmetic
        let midpoint_group = (((2 * cumulative + pop) * groups) / (2 * total)).min(groups - 1) as usize;
        cumulative += pop;

        let lo = (rank + n_groups).saturating_sub(n).max(prev.unwrap_or(0));
        let hi = prev.map_or(0, |p| p + 1).min(rank);
        let g = midpoint_group.clamp(lo, hi);
        cbgs[idx].income_group = Some(g);
        prev = Some(g);
    }
    Ok(())
}

/// Loads and validates the three CSV tables.
pub fn load_dataset(visits_path: &Path, venues_path: &Path, cbgs_path: &Path, n_groups: usize) -> Result<Dataset> {
    let venues = read_venues(venues_path)?;
    let cbgs = read_cbgs(cbgs_path)?;
    let visits = read_visits(visits_path)?;
    Dataset::new(venues, cbgs, visits, n_groups)
}

struct Table {
    file: String,
    columns: HashMap<String, usize>,
    reader: csv::Reader<File>,
}

impl Table {
    fn open(path: &Path, required: &[&str]) -> Result<Self> {
        let file = path.display().to_string();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(f);
        let headers = reader.headers().map_err(|e| csv_error(&file, e))?.clone();
        let columns: HashMap<String, usize> = headers.iter().enumerate().map(|(i, h)| (h.to_string(), i)).collect();
        for col in required {
            if !columns.contains_key(*col) {
                return Err(Error::MissingColumn {
                    file,
                    column: col.to_string(),
                });
            }
        }
        Ok(Table { file, columns, reader })
    }

    fn for_each_row(mut self, mut f: impl FnMut(&Row<'_>) -> Result<()>) -> Result<()> {
        for rec in self.reader.records() {
            let rec = rec.map_err(|e| csv_error(&self.file, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            f(&Row {
                file: &self.file,
                columns: &self.columns,
                rec: &rec,
                line,
            })?;
        }
        Ok(())
    }
}

struct Row<'a> {
    file: &'a str,
    columns: &'a HashMap<String, usize>,
    rec: &'a csv::StringRecord,
    line: u64,
}

impl Row<'_> {
    fn err(&self, message: String) -> Error {
        Error::Malformed {
            file: self.file.to_string(),
            line: self.line,
            message,
        }
    }

    fn get(&self, col: &str) -> Option<&str> {
        self.columns.get(col).and_then(|&i| self.rec.get(i))
    }

    fn str(&self, col: &str) -> Result<String> {
        match self.get(col) {
            Some(s) if !s.is_empty() => Ok(s.to_string()),
            _ => Err(self.err(format!("empty `{col}`"))),
        }
    }

    fn f64(&self, col: &str) -> Result<f64> {
        let s = self.str(col)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(format!("`{col}`: \"{s}\" is not a finite number"))),
        }
    }

    fn u64(&self, col: &str) -> Result<u64> {
        let s = self.str(col)?;
        s.parse::<u64>()
            .map_err(|_| self.err(format!("`{col}`: \"{s}\" is not a nonnegative integer")))
    }

    fn opt_f64(&self, col: &str) -> Result<Option<f64>> {
        match self.get(col) {
            None | Some("") => Ok(None),
            Some(_) => self.f64(col).map(Some),
        }
    }

    fn opt_hourly(&self, col: &str) -> Result<Option<[u64; HOURS]>> {
        let s = match self.get(col) {
            None | Some("") => return Ok(None),
            Some(s) => s,
        };
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != HOURS {
            return Err(self.err(format!("`{col}` has {} entries, expected {HOURS}", parts.len())));
        }
        let mut out = [0u64; HOURS];
        for (slot, p) in out.iter_mut().zip(parts) {
            *slot = p
                .trim()
                .parse()
                .map_err(|_| self.err(format!("`{col}`: \"{p}\" is not a nonnegative integer")))?;
        }
        Ok(Some(out))
    }
}

fn csv_error(file: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Malformed {
        file: file.to_string(),
        line,
        message: e.to_string(),
    }
}

fn read_venues(path: &Path) -> Result<Vec<Venue>> {
    let table = Table::open(path, &["venue_id", "lat", "lon", "sector_id"])?;
    let mut venues = Vec::new();
    table.for_each_row(|row| {
        let mut v = Venue::new(row.str("venue_id")?, row.f64("lat")?, row.f64("lon")?, row.str("sector_id")?);
        v.dwell_minutes = [row.opt_f64("dwell_pre")?, row.opt_f64("dwell_shock")?];
        v.hourly_counts = [row.opt_hourly("hourly_pre")?, row.opt_hourly("hourly_shock")?];
        validate_venue(&v).map_err(|e| row.err(e.to_string()))?;
        venues.push(v);
        Ok(())
    })?;
    Ok(venues)
}

fn read_cbgs(path: &Path) -> Result<Vec<Cbg>> {
    let table = Table::open(path, &["cbg_id", "lat", "lon", "median_income", "population"])?;
    let mut cbgs = Vec::new();
    table.for_each_row(|row| {
        let c = Cbg::new(
            row.str("cbg_id")?,
            row.f64("lat")?,
            row.f64("lon")?,
            row.f64("median_income")?,
            row.u64("population")?,
        );
        validate_cbg(&c).map_err(|e| row.err(e.to_string()))?;
        cbgs.push(c);
        Ok(())
    })?;
    Ok(cbgs)
}

fn read_visits(path: &Path) -> Result<Vec<RawVisit>> {
    let table = Table::open(path, &["venue_id", "cbg_id", "period", "visit_count"])?;
    let mut visits = Vec::new();
    table.for_each_row(|row| {
        let tag = row.str("period")?;
        let period = Period::parse(&tag)
            .ok_or_else(|| row.err(format!("period \"{tag}\" is not one of `pre`, `shock`")))?;
        visits.push(RawVisit {
            venue_id: row.str("venue_id")?,
            cbg_id: row.str("cbg_id")?,
            period,
            visit_count: row.u64("visit_count")?,
            line: Some(row.line),
        });
        Ok(())
    })?;
    Ok(visits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cbgs_with(pops: &[u64], incomes: &[f64]) -> Vec<Cbg> {
        pops.iter()
            .zip(incomes)
            .enumerate()
            .map(|(i, (&p, &inc))| Cbg::new(format!("c{i:02}"), 40.0, -75.0, inc, p))
            .collect()
    }

    fn groups(cbgs: &[Cbg]) -> Vec<usize> {
        cbgs.iter().map(|c| c.income_group.unwrap()).collect()
    }

    #[test]
    fn exact_quintiles_for_equal_populations() {
        let mut c = cbgs_with(&[10; 5], &[5.0, 1.0, 4.0, 2.0, 3.0]);
        assign_income_groups(&mut c, 5).unwrap();
        assert_eq!(groups(&c), vec![4, 0, 3, 1, 2]);

        let mut c = cbgs_with(&[7; 10], &(1..=10).map(f64::from).collect::<Vec<_>>());
        assign_income_groups(&mut c, 5).unwrap();
        assert_eq!(groups(&c), vec![0, 0, 1, 1, 2, 2, 3, 3, 4, 4]);
    }

    /// Midpoints 50 and 150 fall below the cut at 500; the large CBG's midpoint
    /// (600) falls above it.
    #[test]
    fn cumulative_midpoint_rule() {
        let mut c = cbgs_with(&[100, 100, 800], &[1.0, 2.0, 3.0]);
        assign_income_groups(&mut c, 2).unwrap();
        assert_eq!(groups(&c), vec![0, 0, 1]);
    }

    #[test]
    fn income_ties_break_by_id() {
        let mut c = vec![
            Cbg::new("b", 0.0, 0.0, 1.0, 10),
            Cbg::new("a", 0.0, 0.0, 1.0, 10),
        ];
        assign_income_groups(&mut c, 2).unwrap();
        assert_eq!(groups(&c), vec![1, 0]);
    }

    #[test]
    fn oversized_cbg_does_not_empty_a_group() {
        // raw midpoints would give [0, 0, 0, 2, 4, 4, 4]
        let mut c = cbgs_with(&[1, 1, 1, 1000, 1, 1, 1], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        assign_income_groups(&mut c, 5).unwrap();
        let g = groups(&c);
        for k in 0..5 {
            assert!(g.contains(&k), "group {k} empty in {g:?}");
        }
        assert!(g.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn too_few_cbgs_is_an_error() {
        let mut c = cbgs_with(&[1, 1], &[1.0, 2.0]);
        assert!(assign_income_groups(&mut c, 5).is_err());
        assert!(assign_income_groups(&mut c, 1).is_err());
    }

    fn tiny_tables() -> (Vec<Venue>, Vec<Cbg>) {
        let venues = vec![Venue::new("v1", 40.0, -75.0, "s1"), Venue::new("v2", 40.1, -75.1, "s2")];
        let cbgs = cbgs_with(&[10, 10], &[1.0, 2.0]);
        (venues, cbgs)
    }

    #[test]
    fn duplicate_rows_are_summed() {
        let (venues, cbgs) = tiny_tables();
        let visits = vec![
            RawVisit::new("v1", "c00", Period::Pre, 3),
            RawVisit::new("v1", "c00", Period::Pre, 4),
            RawVisit::new("v2", "c01", Period::Shock, 1),
        ];
        let ds = Dataset::new(venues, cbgs, visits, 2).unwrap();
        assert_eq!(ds.edges().len(), 2);
        assert_eq!(ds.edges()[0].visit_count, 7);
        assert_eq!(ds.venue_edges(0).len(), 1);
        assert_eq!(ds.venue_edges(1)[0].period, Period::Shock);
    }

    #[test]
    fn unknown_venue_is_named() {
        let (venues, cbgs) = tiny_tables();
        let mut bad = RawVisit::new("X9", "c00", Period::Pre, 1);
        bad.line = Some(3);
        let err = Dataset::new(venues, cbgs, vec![bad], 2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("X9") && msg.contains("line 3"), "{msg}");
        assert!(err.is_input_error());
    }

    #[test]
    fn both_periods_are_required() {
        let (venues, cbgs) = tiny_tables();
        let err = Dataset::new(venues.clone(), cbgs.clone(), vec![], 2).unwrap_err();
        assert_eq!(err.to_string(), "no pre_shock records");
        let only_pre = vec![RawVisit::new("v1", "c00", Period::Pre, 2)];
        let err = Dataset::new(venues, cbgs, only_pre, 2).unwrap_err();
        assert_eq!(err.to_string(), "no in_shock records");
    }

    #[test]
    fn duplicate_venue_rejected() {
        let (mut venues, cbgs) = tiny_tables();
        venues.push(venues[0].clone());
        let visits = vec![
            RawVisit::new("v1", "c00", Period::Pre, 1),
            RawVisit::new("v1", "c00", Period::Shock, 1),
        ];
        assert!(matches!(
            Dataset::new(venues, cbgs, visits, 2),
            Err(Error::DuplicateKey { .. })
        ));
    }
}
