use std::collections::BTreeSet;

use corisk::copula::{seeded_rng, GumbelParam, GumbelSampler};
use corisk::dataio::{
    network_grid, rolling_estimate, system_loss_index, GridMeasure, NaiveDate, PanelRecord,
    ReturnsPanel, RollingConfig,
};
use corisk::margins::StudentT;
use corisk::measures::RiskLevels;
use corisk::simlab::Truths;

const SCALE: f64 = 0.005;

fn day(i: usize) -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 3).unwrap() + chrono::Days::new(i as u64)
}

fn record(i: usize, entity: &str, loss: f64) -> PanelRecord {
    PanelRecord {
        date: day(i),
        entity: entity.into(),
        ret: -SCALE * loss,
        mv: 100.0,
    }
}

/// `(X, Y)` losses from the Gumbel copula with t(3) margins.
fn gumbel_losses(n: usize, theta: f64, seed: u64) -> Vec<(f64, f64)> {
    let t3 = StudentT::standard(3.0).unwrap();
    let sampler = GumbelSampler::new(GumbelParam::new(theta).unwrap());
    let mut rng = seeded_rng(seed, 0);
    (0..n)
        .map(|_| {
            let (u, v) = sampler.draw(&mut rng);
            (t3.quantile(u).unwrap(), t3.quantile(v).unwrap())
        })
        .collect()
}

#[test]
fn index_hand_computed_with_and_without_the_target() {
    let d = day(0);
    let rec = |e: &str, ret: f64, mv: f64| PanelRecord {
        date: d,
        entity: e.into(),
        ret,
        mv,
    };
    let panel = ReturnsPanel::from_records([
        rec("A", 0.01, 1.0),
        rec("B", 0.03, 3.0),
        rec("Y", -0.02, 4.0),
    ])
    .unwrap();
    let all = system_loss_index(&panel, &BTreeSet::new()).unwrap();
    // -(0.01 + 0.09 - 0.08) / 8
    assert!((all[0].1 - (-0.0025)).abs() < 1e-15);
    let ex: BTreeSet<String> = ["Y".to_string()].into();
    let without = system_loss_index(&panel, &ex).unwrap();
    // -(0.01 + 0.09) / 4
    assert!((without[0].1 - (-0.025)).abs() < 1e-15);
}

#[test]
fn rolling_windows_center_on_the_analytic_truths() {
    let theta = GumbelParam::from_kendall_tau(0.55).unwrap();
    let t3 = StudentT::standard(3.0).unwrap();
    let truths = Truths::analytic(theta, &t3, RiskLevels::default()).unwrap();
    let n = 2020;
    let losses = gumbel_losses(n, theta.theta(), 5);
    let records = losses
        .iter()
        .enumerate()
        .flat_map(|(i, (x, y))| [record(i, "X", *x), record(i, "Y", *y)]);
    let panel = ReturnsPanel::from_records(records).unwrap();
    let cfg = RollingConfig::new("Y", vec!["X".into()]);
    let rows = rolling_estimate(&cfg, &panel).unwrap();
    assert_eq!(rows.len(), n - 2000 + 1);
    assert_eq!(rows[0].date, day(1999));

    let m = rows.len() as f64;
    let mean = |f: fn(&corisk::measures::CoRiskEstimates) -> f64| {
        rows.iter().map(|r| f(&r.average)).sum::<f64>() / m
    };
    // Sampling scale at n = 2000: bias around -2e-5 for omega, sd about 1.1
    // for ΔCoVaR and 2.8 for ΔCoES (on the unscaled losses)
    let omega = mean(|e| e.omega);
    assert!((omega - truths.omega).abs() < 5e-4, "omega {omega}");
    let dcov = mean(|e| e.dcov) / SCALE;
    assert!((dcov - truths.dcov).abs() < 3.0 * 1.1, "dcov {dcov}");
    let dcoes = mean(|e| e.dcoes) / SCALE;
    assert!((dcoes - truths.dcoes).abs() < 3.0 * 2.8, "dcoes {dcoes}");
}

#[test]
fn comonotone_pair_attains_the_largest_omega() {
    let n = 2000;
    let base = gumbel_losses(n, 1.5, 8);
    let other = gumbel_losses(n, 1.0, 9);
    let records = (0..n).flat_map(|i| {
        [
            record(i, "A", base[i].0),
            record(i, "B", base[i].0),
            record(i, "C", other[i].0),
        ]
    });
    let panel = ReturnsPanel::from_records(records).unwrap();
    let roster: Vec<String> = ["A", "B", "C"].map(String::from).into();
    let grid = network_grid(&panel, RiskLevels::default(), &roster, 2000, 1).unwrap();
    assert_eq!(grid.cells.len(), 6);
    assert_eq!(grid.succeeded(), 6);
    let omega = |x: &str, y: &str| grid.cell(x, y).unwrap().estimates.unwrap().omega;
    let best = grid
        .cells
        .iter()
        .map(|c| c.estimates.unwrap().omega)
        .fold(f64::MIN, f64::max);
    assert_eq!(omega("A", "B"), best);
    assert_eq!(omega("B", "A"), best);
    let upper = RiskLevels::default().omega_upper();
    assert!((best - upper).abs() < 1e-4, "omega {best}");
    assert!(omega("A", "C") < best);
}

#[test]
fn network_is_symmetric_on_an_exchangeable_fixture() {
    // every draw (u, v) also enters as (v, u), so both pairs see the same
    // sample up to a relabelling of the coordinates
    let half = gumbel_losses(1000, 2.0, 12);
    let pairs: Vec<(f64, f64)> = half.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    let records = pairs
        .iter()
        .enumerate()
        .flat_map(|(i, (a, b))| [record(i, "A", *a), record(i, "B", *b)]);
    let panel = ReturnsPanel::from_records(records).unwrap();
    let roster: Vec<String> = ["A", "B"].map(String::from).into();
    let grid = network_grid(&panel, RiskLevels::default(), &roster, 2000, 1).unwrap();
    let ab = grid.cell("A", "B").unwrap().estimates.unwrap();
    let ba = grid.cell("B", "A").unwrap().estimates.unwrap();
    for m in GridMeasure::ALL {
        let (x, y) = (m.get(&ab).unwrap(), m.get(&ba).unwrap());
        assert_eq!(x, y, "{}", m.name());
    }
}

#[test]
fn independent_columns_have_no_risk_contribution() {
    let n = 4000;
    let a = gumbel_losses(n, 1.0, 21);
    let records = (0..n).flat_map(|i| [record(i, "A", a[i].0), record(i, "B", a[i].1)]);
    let panel = ReturnsPanel::from_records(records).unwrap();
    let roster: Vec<String> = ["A", "B"].map(String::from).into();
    let grid = network_grid(&panel, RiskLevels::default(), &roster, 2000, 1).unwrap();
    for c in &grid.cells {
        let e = c.estimates.unwrap();
        // sd(omega) ≈ sqrt(0.0025/n)/(1 − alpha) ≈ 0.016 at independence
        assert!((e.omega - 0.95).abs() < 0.05, "omega {}", e.omega);
        assert!((e.dcov / SCALE).abs() < 1.5, "dcov {}", e.dcov / SCALE);
        assert!((e.dcoes / SCALE).abs() < 2.5, "dcoes {}", e.dcoes / SCALE);
    }
}
