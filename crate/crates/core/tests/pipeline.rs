//! Simulate, serialise, read back and refit.

use chp_core::chains::TickChainParams;
use chp_core::estimate::{estimate_transitions, exponential_log_likelihood, fit_exponential_hawkes, ExponentialFit};
use chp_core::hawkes::HawkesParams;
use chp_core::io::{self, JumpPolicy};
use chp_core::kernels::KernelSpec;
use chp_core::mc::{self, MCConfig};
use chp_core::price::{simulate_chp, PriceModel};

fn truth() -> (HawkesParams, TickChainParams) {
    (
        HawkesParams::new(0.03, KernelSpec::exponential(400.0, 800.0).unwrap()).unwrap(),
        TickChainParams::new(0.01, 0.6, 0.55).unwrap(),
    )
}

#[test]
fn csv_round_trip_and_refit() {
    let (hawkes, tick) = truth();
    let window = 2.0e5;
    let path = simulate_chp(&hawkes, &tick, 24.5, window, 11).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("path.csv");
    io::write_price_path_csv(&file, &path).unwrap();

    let back = io::ingest(&file, 0.01, JumpPolicy::Truncate).unwrap();
    assert_eq!(back.events.len(), path.events.len());
    assert_eq!(back.marks.signs, path.marks.signs);
    assert!((back.initial_price - 24.5).abs() < 1e-12);
    for (a, b) in back.events.times().iter().zip(path.events.times()) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    let fit = fit_exponential_hawkes(&back.events, &hawkes, 1e-6).unwrap();
    let p = fit.params;
    assert!((p.baseline - 0.03).abs() / 0.03 < 0.25, "{p:?}");
    assert!((p.branching_ratio() - 0.5).abs() < 0.1, "{p:?}");

    let tr = estimate_transitions(&back.marks.signs).unwrap();
    assert!((tr.p - 0.6).abs() < 0.05 && (tr.p_prime - 0.55).abs() < 0.05, "{tr:?}");

    // The generating parameters beat a doubled baseline.
    let true_fit = ExponentialFit { baseline: 0.03, alpha: 400.0, beta: 800.0 };
    let doubled = ExponentialFit { baseline: 0.06, ..true_fit };
    let (l_true, _) = exponential_log_likelihood(&back.events, &true_fit);
    let (l_doubled, _) = exponential_log_likelihood(&back.events, &doubled);
    assert!(l_true > l_doubled);
    assert!(fit.log_likelihood >= l_true - 1e-6);
}

#[test]
fn band_width_grows_like_root_time() {
    let (hawkes, _) = truth();
    // Symmetric chain so the drift vanishes and the median stays at S0.
    let tick = TickChainParams::new(0.01, 0.6, 0.6).unwrap();
    let model = PriceModel::chp(hawkes, tick, 24.5);
    let config = MCConfig::new(400, 1.0, 40_000.0, 5).unwrap();
    let grid = [10_000.0, 40_000.0];
    let report = mc::quantile_bands(&config, &model, &grid).unwrap();
    let width = |row: &mc::QuantileRow| row.values[row.values.len() - 2] - row.values[1];
    let ratio = width(&report.quantiles[1]) / width(&report.quantiles[0]);
    assert!((ratio - 2.0).abs() / 2.0 < 0.1, "width ratio {ratio}");
}
