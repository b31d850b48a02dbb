//! Returns panels, the system loss index, weekly aggregation, rolling-window
//! estimation and pairwise network grids.
//!
//! Panels hold simple returns; losses are negated returns and the sign flip
//! happens only where series enter an estimator.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

pub use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use crate::copula::{fit_beta_copula, pseudo_observations};
use crate::error::Diagnostics;
use crate::fmt::{sig, sig_opt};
use crate::margins::LossSample;
use crate::measures::{coes, estimate_from_pairs, solve_omega, CoRiskEstimates, RiskLevels};
use crate::simlab::with_pool;
use crate::{Error, Result};

/// Paired observations required before any estimate is produced.
pub const MIN_SAMPLE_FLOOR: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelRecord {
    pub date: NaiveDate,
    pub entity: String,
    pub ret: f64,
    pub mv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observation {
    pub ret: f64,
    pub mv: f64,
}

/// Unbalanced long-format panel, indexed by entity then date.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReturnsPanel {
    series: BTreeMap<String, BTreeMap<NaiveDate, Observation>>,
}

impl ReturnsPanel {
    /// Validates and indexes records; every violation is reported.
    pub fn from_records(records: impl IntoIterator<Item = PanelRecord>) -> Result<Self> {
        let mut panel = Self::default();
        let mut diags = Vec::new();
        for (i, r) in records.into_iter().enumerate() {
            if let Err(msg) = panel.insert(r) {
                diags.push((i as u64 + 1, msg));
            }
        }
        if diags.is_empty() {
            Ok(panel)
        } else {
            Err(Error::Panel(Diagnostics(diags)))
        }
    }

    fn insert(&mut self, r: PanelRecord) -> std::result::Result<(), String> {
        if !(r.ret.is_finite() && r.ret > -1.0) {
            return Err(format!("return {} must be finite and > -1", r.ret));
        }
        if !(r.mv.is_finite() && r.mv >= 0.0) {
            return Err(format!("market value {} must be finite and >= 0", r.mv));
        }
        let series = self.series.entry(r.entity.clone()).or_default();
        if series.contains_key(&r.date) {
            return Err(format!("duplicate row for ({}, {})", r.date, r.entity));
        }
        series.insert(
            r.date,
            Observation {
                ret: r.ret,
                mv: r.mv,
            },
        );
        Ok(())
    }

    pub fn entities(&self) -> Vec<&str> {
        self.series.keys().map(String::as_str).collect()
    }

    pub fn num_entities(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn contains(&self, entity: &str) -> bool {
        self.series.contains_key(entity)
    }

    /// Date-ordered observations of one entity.
    pub fn series(&self, entity: &str) -> Option<&BTreeMap<NaiveDate, Observation>> {
        self.series.get(entity)
    }

    /// Date-ordered returns of one entity.
    pub fn returns(&self, entity: &str) -> Option<Vec<(NaiveDate, f64)>> {
        self.series
            .get(entity)
            .map(|s| s.iter().map(|(d, o)| (*d, o.ret)).collect())
    }

    fn require(&self, entity: &str) -> Result<&BTreeMap<NaiveDate, Observation>> {
        self.series
            .get(entity)
            .ok_or_else(|| Error::Config(format!("entity {entity:?} is not in the panel")))
    }
}

/// Reads a delimited `date,entity,ret,mv` table (header required, column
/// order free). Rows are checked individually and all problems are returned
/// together with their line numbers.
pub fn load_panel<R: Read>(source: R, delimiter: u8) -> Result<ReturnsPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let cols = match (find("date"), find("entity"), find("ret"), find("mv")) {
        (Some(d), Some(e), Some(r), Some(m)) => [d, e, r, m],
        _ => {
            return Err(Error::Panel(Diagnostics(vec![(
                1,
                format!(
                    "header must name date, entity, ret and mv columns, found {:?}",
                    headers.iter().collect::<Vec<_>>()
                ),
            )])))
        }
    };

    let mut panel = ReturnsPanel::default();
    let mut diags = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                diags.push((line, e.to_string()));
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.iter().all(str::is_empty) {
            continue;
        }
        match parse_row(&row, cols).and_then(|r| panel.insert(r)) {
            Ok(()) => {}
            Err(msg) => diags.push((line, msg)),
        }
    }
    if diags.is_empty() {
        Ok(panel)
    } else {
        Err(Error::Panel(Diagnostics(diags)))
    }
}

pub fn load_panel_path(path: &Path, delimiter: u8) -> Result<ReturnsPanel> {
    load_panel(std::fs::File::open(path)?, delimiter)
}

fn parse_row(
    row: &csv::StringRecord,
    [d, e, r, m]: [usize; 4],
) -> std::result::Result<PanelRecord, String> {
    let field = |i: usize, name: &str| {
        row.get(i)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| format!("missing {name}"))
    };
    let date = field(d, "date")?;
    let date = NaiveDate::parse_from_str(date, "%Y-%m-%d")
        .map_err(|err| format!("bad date {date:?}: {err}"))?;
    let entity = field(e, "entity")?.to_string();
    let number = |i: usize, name: &str| {
        let s = field(i, name)?;
        s.parse::<f64>().map_err(|_| format!("bad {name} {s:?}"))
    };
    Ok(PanelRecord {
        date,
        entity,
        ret: number(r, "ret")?,
        mv: number(m, "mv")?,
    })
}

/// Market-value weighted system loss `−Σ MVᵢ·rᵢ / Σ MVᵢ` per date, over all
/// entities except `exclude`.
pub fn system_loss_index(
    panel: &ReturnsPanel,
    exclude: &BTreeSet<String>,
) -> Result<Vec<(NaiveDate, f64)>> {
    let mut sums: BTreeMap<NaiveDate, (f64, f64)> = BTreeMap::new();
    for (entity, series) in &panel.series {
        if exclude.contains(entity) {
            continue;
        }
        for (date, o) in series {
            let s = sums.entry(*date).or_insert((0.0, 0.0));
            s.0 += o.mv * o.ret;
            s.1 += o.mv;
        }
    }
    sums.into_iter()
        .map(|(date, (weighted, total))| {
            if total > 0.0 {
                Ok((date, -weighted / total))
            } else {
                Err(Error::ZeroMarketValue(date))
            }
        })
        .collect()
}

/// Compounds consecutive blocks of five daily returns, `∏(1 + rᵢ) − 1`;
/// a trailing partial week is dropped.
pub fn weekly_aggregate(daily: &[f64]) -> Vec<f64> {
    daily
        .chunks_exact(5)
        .map(|w| w.iter().map(|r| 1.0 + r).product::<f64>() - 1.0)
        .collect()
}

/// [`weekly_aggregate`] on a dated series; each week carries its last date.
pub fn weekly_aggregate_dated(daily: &[(NaiveDate, f64)]) -> Vec<(NaiveDate, f64)> {
    let rets: Vec<f64> = daily.iter().map(|(_, r)| *r).collect();
    weekly_aggregate(&rets)
        .into_iter()
        .zip(daily.chunks_exact(5))
        .map(|(r, w)| (w[4].0, r))
        .collect()
}

/// Losses of `x` and `y` on their common dates, in date order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedLosses {
    pub dates: Vec<NaiveDate>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PairedLosses {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

pub fn paired_losses(panel: &ReturnsPanel, x: &str, y: &str) -> Result<PairedLosses> {
    let sx = panel.require(x)?;
    let sy = panel.require(y)?;
    let mut out = PairedLosses {
        dates: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
    };
    for (date, ox) in sx {
        if let Some(oy) = sy.get(date) {
            out.dates.push(*date);
            out.x.push(-ox.ret);
            out.y.push(-oy.ret);
        }
    }
    Ok(out)
}

fn check_floor(n: usize, floor: usize, allow_small: bool, what: &str) -> Result<()> {
    if n >= floor {
        return Ok(());
    }
    if allow_small {
        log::warn!(
            "{what}: {n} observations is below the minimum of {floor}; estimates may be unreliable"
        );
        Ok(())
    } else {
        Err(Error::InsufficientData(format!(
            "{what}: {n} paired observations, at least {floor} required"
        )))
    }
}

/// Estimates on paired loss data after checking the sample floor.
pub fn estimate_paired(
    xs: &[f64],
    ys: &[f64],
    levels: RiskLevels,
    allow_small: bool,
) -> Result<CoRiskEstimates> {
    check_floor(
        xs.len().min(ys.len()),
        MIN_SAMPLE_FLOOR,
        allow_small,
        "estimate",
    )?;
    estimate_from_pairs(xs, ys, levels)
}

/// `(ω(α, 0), MES_α)` on paired loss data after checking the sample floor.
pub fn estimate_mes(xs: &[f64], ys: &[f64], alpha: f64, allow_small: bool) -> Result<(f64, f64)> {
    check_floor(
        xs.len().min(ys.len()),
        MIN_SAMPLE_FLOOR,
        allow_small,
        "estimate",
    )?;
    let pobs = pseudo_observations(xs, ys)?;
    let copula = fit_beta_copula(&pobs);
    let sol = solve_omega(RiskLevels::mes(alpha)?, &copula)?;
    let mes = coes(&LossSample::new(ys.to_vec())?, sol.omega)?;
    Ok((sol.omega, mes))
}

// ---------------------------------------------------------------------------
// Rolling windows
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RollingConfig {
    pub window: usize,
    pub levels: RiskLevels,
    pub target: String,
    pub xs: Vec<String>,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    /// Accept windows shorter than [`MIN_SAMPLE_FLOOR`] with a warning.
    pub allow_small: bool,
    pub keep_pairs: bool,
    pub jobs: usize,
}

impl RollingConfig {
    pub fn new(target: impl Into<String>, xs: Vec<String>) -> Self {
        Self {
            window: MIN_SAMPLE_FLOOR,
            levels: RiskLevels::default(),
            target: target.into(),
            xs,
            start: None,
            end: None,
            allow_small: false,
            keep_pairs: false,
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollingRow {
    pub date: NaiveDate,
    /// X entities that contributed to the average.
    pub used: usize,
    /// X entities without an observation on this date or without a full window.
    pub dropped: usize,
    pub average: CoRiskEstimates,
    pub pairs: Vec<(String, Option<CoRiskEstimates>)>,
}

/// For every date `t` with at least one full window, estimates `(Y | X)` on
/// the last `window` paired observations up to and including `t` for each
/// `X` observed on `t`, then averages over `X`.
pub fn rolling_estimate(cfg: &RollingConfig, panel: &ReturnsPanel) -> Result<Vec<RollingRow>> {
    if cfg.xs.contains(&cfg.target) {
        return Err(Error::Config(format!(
            "X set must not contain the target {:?}",
            cfg.target
        )));
    }
    if cfg.xs.is_empty() {
        return Err(Error::Config("X set is empty".into()));
    }
    if cfg.window < 2 {
        return Err(Error::Config(
            "window must hold at least 2 observations".into(),
        ));
    }
    check_floor(
        cfg.window,
        MIN_SAMPLE_FLOOR,
        cfg.allow_small,
        "rolling window",
    )?;

    let pairs: Vec<(String, PairedLosses)> = cfg
        .xs
        .iter()
        .map(|x| Ok((x.clone(), paired_losses(panel, x, &cfg.target)?)))
        .collect::<Result<_>>()?;
    let dates: Vec<NaiveDate> = panel
        .require(&cfg.target)?
        .keys()
        .copied()
        .filter(|d| cfg.start.is_none_or(|s| *d >= s) && cfg.end.is_none_or(|e| *d <= e))
        .collect();

    let rows: Vec<Result<Option<RollingRow>>> = with_pool(cfg.jobs, || {
        dates
            .par_iter()
            .map(|&date| rolling_row(cfg, &pairs, date))
            .collect()
    })?;
    let rows: Vec<RollingRow> = rows
        .into_iter()
        .filter_map(Result::transpose)
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no date has {} paired observations for any X",
            cfg.window
        )));
    }
    Ok(rows)
}

fn rolling_row(
    cfg: &RollingConfig,
    pairs: &[(String, PairedLosses)],
    date: NaiveDate,
) -> Result<Option<RollingRow>> {
    let mut per_pair = Vec::with_capacity(pairs.len());
    for (name, p) in pairs {
        let est = match p.dates.binary_search(&date) {
            Ok(i) if i + 1 >= cfg.window => {
                let lo = i + 1 - cfg.window;
                Some(estimate_from_pairs(&p.x[lo..=i], &p.y[lo..=i], cfg.levels)?)
            }
            _ => None,
        };
        per_pair.push((name.clone(), est));
    }
    let used: Vec<&CoRiskEstimates> = per_pair.iter().filter_map(|(_, e)| e.as_ref()).collect();
    if used.is_empty() {
        return Ok(None);
    }
    Ok(Some(RollingRow {
        date,
        used: used.len(),
        dropped: per_pair.len() - used.len(),
        average: average_estimates(&used),
        pairs: if cfg.keep_pairs { per_pair } else { Vec::new() },
    }))
}

/// Field-wise mean; optional fields average over the entries that have them.
pub fn average_estimates(items: &[&CoRiskEstimates]) -> CoRiskEstimates {
    let m = items.len() as f64;
    let mean = |f: fn(&CoRiskEstimates) -> f64| items.iter().map(|e| f(e)).sum::<f64>() / m;
    let mean_opt = |f: fn(&CoRiskEstimates) -> Option<f64>| {
        let vals: Vec<f64> = items.iter().filter_map(|e| f(e)).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    CoRiskEstimates {
        omega: mean(|e| e.omega),
        covar: mean(|e| e.covar),
        coes: mean(|e| e.coes),
        dcov: mean(|e| e.dcov),
        dcoes: mean(|e| e.dcoes),
        mes: mean_opt(|e| e.mes),
        ratio: mean_opt(|e| e.ratio),
        xi_hat: mean_opt(|e| e.xi_hat),
    }
}

/// Long format `date,used,dropped,omega,covar,coes,dcov,dcoes,mes,ratio,xi`,
/// then one row per pair when kept (`date,x,...` in a second table).
pub fn write_rolling_csv<W: Write>(rows: &[RollingRow], out: W, digits: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["date", "x", "used", "dropped"];
    header.extend(ESTIMATE_COLUMNS);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.date.to_string(),
            "mean".into(),
            r.used.to_string(),
            r.dropped.to_string(),
        ];
        rec.extend(estimate_fields(&r.average, digits));
        w.write_record(&rec)?;
        for (x, e) in &r.pairs {
            if let Some(e) = e {
                let mut rec = vec![r.date.to_string(), x.clone(), String::new(), String::new()];
                rec.extend(estimate_fields(e, digits));
                w.write_record(&rec)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub const ESTIMATE_COLUMNS: [&str; 8] = [
    "omega", "covar", "coes", "dcov", "dcoes", "mes", "ratio", "xi",
];

pub fn estimate_fields(e: &CoRiskEstimates, digits: usize) -> Vec<String> {
    vec![
        sig(e.omega, digits),
        sig(e.covar, digits),
        sig(e.coes, digits),
        sig(e.dcov, digits),
        sig(e.dcoes, digits),
        sig_opt(e.mes, digits),
        sig_opt(e.ratio, digits),
        sig_opt(e.xi_hat, digits),
    ]
}

// ---------------------------------------------------------------------------
// Network grid
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkCell {
    pub x: String,
    pub y: String,
    pub n_obs: usize,
    pub estimates: Option<CoRiskEstimates>,
    /// Why `estimates` is empty.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkGrid {
    pub roster: Vec<String>,
    /// Ordered pairs, X-major in roster order, diagonal omitted.
    pub cells: Vec<NetworkCell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMeasure {
    Omega,
    Dcov,
    Dcoes,
    Ratio,
    Xi,
}

impl GridMeasure {
    pub const ALL: [GridMeasure; 5] = [
        GridMeasure::Omega,
        GridMeasure::Dcov,
        GridMeasure::Dcoes,
        GridMeasure::Ratio,
        GridMeasure::Xi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GridMeasure::Omega => "omega",
            GridMeasure::Dcov => "dcov",
            GridMeasure::Dcoes => "dcoes",
            GridMeasure::Ratio => "ratio",
            GridMeasure::Xi => "xi",
        }
    }

    pub fn get(self, e: &CoRiskEstimates) -> Option<f64> {
        match self {
            GridMeasure::Omega => Some(e.omega),
            GridMeasure::Dcov => Some(e.dcov),
            GridMeasure::Dcoes => Some(e.dcoes),
            GridMeasure::Ratio => e.ratio,
            GridMeasure::Xi => e.xi_hat,
        }
    }
}

impl NetworkGrid {
    pub fn cell(&self, x: &str, y: &str) -> Option<&NetworkCell> {
        self.cells.iter().find(|c| c.x == x && c.y == y)
    }

    pub fn succeeded(&self) -> usize {
        self.cells.iter().filter(|c| c.estimates.is_some()).count()
    }

    /// Matrix with X on rows and Y on columns; diagonal and failed cells empty.
    pub fn write_matrix<W: Write>(
        &self,
        measure: GridMeasure,
        out: W,
        digits: usize,
    ) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string()];
        header.extend(self.roster.iter().cloned());
        w.write_record(&header)?;
        for x in &self.roster {
            let mut rec = vec![x.clone()];
            for y in &self.roster {
                let v = self
                    .cell(x, y)
                    .and_then(|c| c.estimates.as_ref())
                    .and_then(|e| measure.get(e));
                rec.push(sig_opt(v, digits));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Long format, one row per ordered pair, with a status column.
    pub fn write_long<W: Write>(&self, out: W, digits: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x", "y", "n_obs", "status"];
        header.extend(ESTIMATE_COLUMNS);
        w.write_record(&header)?;
        for c in &self.cells {
            let mut rec = vec![c.x.clone(), c.y.clone(), c.n_obs.to_string()];
            match &c.estimates {
                Some(e) => {
                    rec.push("ok".into());
                    rec.extend(estimate_fields(e, digits));
                }
                None => {
                    rec.push(c.note.clone().unwrap_or_default());
                    rec.extend(std::iter::repeat_n(String::new(), ESTIMATE_COLUMNS.len()));
                }
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Pairs without estimates, `x,y,n_obs,reason`.
    pub fn write_report<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "n_obs", "reason"])?;
        for c in self.cells.iter().filter(|c| c.estimates.is_none()) {
            w.write_record([
                c.x.as_str(),
                c.y.as_str(),
                &c.n_obs.to_string(),
                c.note.as_deref().unwrap_or(""),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Estimates for every ordered pair `(X, Y)`, `X ≠ Y`, of `roster` on the
/// dates both are observed. Pairs below the sample floor, or whose
/// estimation fails, are kept with a note instead of an estimate.
pub fn network_grid(
    panel: &ReturnsPanel,
    levels: RiskLevels,
    roster: &[String],
    min_obs: usize,
    jobs: usize,
) -> Result<NetworkGrid> {
    if roster.len() < 2 {
        return Err(Error::Config(
            "network roster needs at least 2 entities".into(),
        ));
    }
    let unique: BTreeSet<&String> = roster.iter().collect();
    if unique.len() != roster.len() {
        return Err(Error::Config("network roster contains duplicates".into()));
    }
    for e in roster {
        panel.require(e)?;
    }
    if min_obs < MIN_SAMPLE_FLOOR {
        log::warn!("network floor lowered to {min_obs} observations (default {MIN_SAMPLE_FLOOR})");
    }
    let ordered: Vec<(&String, &String)> = roster
        .iter()
        .flat_map(|x| roster.iter().filter(move |y| *y != x).map(move |y| (x, y)))
        .collect();
    let cells: Vec<Result<NetworkCell>> = with_pool(jobs, || {
        ordered
            .par_iter()
            .map(|(x, y)| {
                let p = paired_losses(panel, x, y)?;
                let mut cell = NetworkCell {
                    x: (*x).clone(),
                    y: (*y).clone(),
                    n_obs: p.len(),
                    estimates: None,
                    note: None,
                };
                if p.len() < min_obs.max(2) {
                    cell.note = Some(format!("insufficient overlap ({} < {})", p.len(), min_obs));
                    return Ok(cell);
                }
                match estimate_from_pairs(&p.x, &p.y, levels) {
                    Ok(e) => cell.estimates = Some(e),
                    Err(e) => cell.note = Some(e.to_string()),
                }
                Ok(cell)
            })
            .collect()
    })?;
    Ok(NetworkGrid {
        roster: roster.to_vec(),
        cells: cells.into_iter().collect::<Result<_>>()?,
    })
}

/// Dated index series as `date,loss`.
pub fn write_index_csv<W: Write>(index: &[(NaiveDate, f64)], out: W, digits: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "loss"])?;
    for (d, v) in index {
        w.write_record([d.to_string(), sig(*v, digits)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, day).unwrap()
    }

    fn rec(day: u32, e: &str, ret: f64, mv: f64) -> PanelRecord {
        PanelRecord {
            date: d(day),
            entity: e.into(),
            ret,
            mv,
        }
    }

    #[test]
    fn load_orders_by_date_and_reports_lines() {
        let text =
            "date,entity,ret,mv\n2020-01-03,A,0.03,1\n2020-01-01,A,0.01,1\n2020-01-02,A,0.02,1\n";
        let p = load_panel(text.as_bytes(), b',').unwrap();
        let r = p.returns("A").unwrap();
        assert_eq!(
            r.iter().map(|x| x.1).collect::<Vec<_>>(),
            vec![0.01, 0.02, 0.03]
        );

        let bad =
            "date,entity,ret,mv\n2020-01-01,A,0.01,1\n2020-01-01,A,0.02,1\n2020-01-02,A,-1,1\n";
        match load_panel(bad.as_bytes(), b',') {
            Err(Error::Panel(Diagnostics(diags))) => {
                assert_eq!(diags.iter().map(|x| x.0).collect::<Vec<_>>(), vec![3, 4]);
                assert!(diags[0].1.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_and_semicolon_panels() {
        let p = load_panel("date,entity,ret,mv\n".as_bytes(), b',').unwrap();
        assert_eq!(p.num_entities(), 0);
        let p = load_panel("mv;ret;entity;date\n5;0.1;B;2020-01-01\n".as_bytes(), b';').unwrap();
        assert_eq!(p.returns("B").unwrap(), vec![(d(1), 0.1)]);
        assert!(load_panel("date,ret,mv\n".as_bytes(), b',').is_err());
    }

    #[test]
    fn index_values() {
        let p =
            ReturnsPanel::from_records([rec(1, "A", 0.01, 5.0), rec(1, "B", 0.03, 5.0)]).unwrap();
        let idx = system_loss_index(&p, &BTreeSet::new()).unwrap();
        assert_abs_diff_eq!(idx[0].1, -0.02, epsilon = 1e-15);

        let p = ReturnsPanel::from_records([
            rec(1, "A", 0.01, 1.0),
            rec(1, "B", -0.02, 3.0),
            rec(1, "C", 0.05, 6.0),
        ])
        .unwrap();
        let all = system_loss_index(&p, &BTreeSet::new()).unwrap();
        assert_abs_diff_eq!(all[0].1, -(0.01 - 0.06 + 0.30) / 10.0, epsilon = 1e-15);
        let ex = system_loss_index(&p, &["C".to_string()].into()).unwrap();
        assert_abs_diff_eq!(ex[0].1, -(0.01 - 0.06) / 4.0, epsilon = 1e-15);

        let z = ReturnsPanel::from_records([rec(2, "A", 0.01, 0.0)]).unwrap();
        assert!(matches!(
            system_loss_index(&z, &BTreeSet::new()),
            Err(Error::ZeroMarketValue(date)) if date == d(2)
        ));
    }

    #[test]
    fn weekly_compounding() {
        assert_eq!(weekly_aggregate(&[0.0; 5]), vec![0.0]);
        let w = weekly_aggregate(&[0.01; 12]);
        assert_eq!(w.len(), 2);
        assert_abs_diff_eq!(w[0], 0.0510100501, epsilon = 1e-12);
        let dated: Vec<_> = (1..=5).map(|i| (d(i), 0.0)).collect();
        assert_eq!(weekly_aggregate_dated(&dated), vec![(d(5), 0.0)]);
    }

    #[test]
    fn pairs_join_on_common_dates() {
        let p = ReturnsPanel::from_records([
            rec(1, "A", 0.01, 1.0),
            rec(2, "A", 0.02, 1.0),
            rec(2, "B", -0.03, 1.0),
            rec(3, "B", 0.04, 1.0),
        ])
        .unwrap();
        let pl = paired_losses(&p, "A", "B").unwrap();
        assert_eq!(pl.dates, vec![d(2)]);
        assert_eq!((pl.x[0], pl.y[0]), (-0.02, 0.03));
        assert!(paired_losses(&p, "A", "Z").is_err());
    }

    #[test]
    fn rolling_rejects_overlap_and_small_windows() {
        let p = ReturnsPanel::from_records([rec(1, "A", 0.01, 1.0)]).unwrap();
        let cfg = RollingConfig::new("A", vec!["A".into()]);
        assert!(matches!(rolling_estimate(&cfg, &p), Err(Error::Config(_))));
        let mut cfg = RollingConfig::new("A", vec!["B".into()]);
        cfg.window = 100;
        assert!(matches!(
            rolling_estimate(&cfg, &p),
            Err(Error::InsufficientData(_))
        ));
    }
}
