//! Calibration from data.
//!
//! Exponential-kernel Hawkes maximum likelihood, tick transition
//! frequencies, regime construction from per-period intensities, and the
//! summary statistics used by the reproduction report.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::chains::{irreducible, stationary_from_balance, RegimeSpec, TickChainParams};
use crate::error::{Error, Result};
use crate::hawkes::{EventSequence, HawkesParams};
use crate::kernels::KernelSpec;

/// Unconstrained exponential-kernel Hawkes parameters as fitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub baseline: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ExponentialFit {
    pub fn branching_ratio(&self) -> f64 {
        self.alpha / self.beta
    }

    /// Fails when the fitted branching ratio is not below 1.
    pub fn to_hawkes(&self) -> Result<HawkesParams> {
        HawkesParams::new(self.baseline, KernelSpec::exponential(self.alpha, self.beta)?)
    }

    fn to_log(self) -> Vector3<f64> {
        Vector3::new(self.baseline.ln(), self.alpha.ln(), self.beta.ln())
    }

    fn from_log(x: &Vector3<f64>) -> Self {
        Self { baseline: x[0].exp(), alpha: x[1].exp(), beta: x[2].exp() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ExponentialFit,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm of the per-event log-likelihood gradient in log-parameters.
    pub gradient_norm: f64,
    pub branching_ratio: f64,
    pub stationary: bool,
    /// Standard errors of (λ, α, β) from the observed information, when it is invertible.
    pub standard_errors: Option<[f64; 3]>,
}

/// Log-likelihood `Σ log λ(tᵢ) − Λ(T)` and its gradient in `(λ, α, β)`,
/// computed in one pass with the exponential recursions.
pub fn exponential_log_likelihood(events: &EventSequence, p: &ExponentialFit) -> (f64, Vector3<f64>) {
    let (lambda, alpha, beta) = (p.baseline, p.alpha, p.beta);
    let horizon = events.window_end();
    // a = Σ_{j<i} e^{-β(tᵢ−tⱼ)},  b = Σ_{j<i} (tᵢ−tⱼ) e^{-β(tᵢ−tⱼ)}
    let (mut a, mut b) = (0.0f64, 0.0f64);
    let mut prev: Option<f64> = None;
    let mut ll = 0.0;
    let mut g = Vector3::zeros();
    let (mut mass, mut mass_dbeta) = (0.0, 0.0);
    for &t in events.times() {
        if let Some(tp) = prev {
            let dt = t - tp;
            let e = (-beta * dt).exp();
            b = e * (b + dt * (1.0 + a));
            a = e * (1.0 + a);
        }
        let intensity = lambda + alpha * a;
        ll += intensity.ln();
        g[0] += 1.0 / intensity;
        g[1] += a / intensity;
        g[2] -= alpha * b / intensity;
        let u = horizon - t;
        let e = (-beta * u).exp();
        mass += 1.0 - e;
        mass_dbeta += u * e;
        prev = Some(t);
    }
    ll -= lambda * horizon + alpha / beta * mass;
    g[0] -= horizon;
    g[1] -= mass / beta;
    g[2] -= -alpha / (beta * beta) * mass + alpha / beta * mass_dbeta;
    (ll, g)
}

const MAX_ITERATIONS: usize = 500;

struct Optimum {
    x: Vector3<f64>,
    value: f64,
    grad: Vector3<f64>,
    iterations: usize,
}

/// BFGS on the per-event negative log-likelihood in log-parameters.
fn bfgs(events: &EventSequence, start: Vector3<f64>, tol: f64) -> Optimum {
    let n = events.len() as f64;
    let objective = |x: &Vector3<f64>| {
        let p = ExponentialFit::from_log(x);
        let (ll, g) = exponential_log_likelihood(events, &p);
        let theta = Vector3::new(p.baseline, p.alpha, p.beta);
        (-ll / n, -g.component_mul(&theta) / n)
    };
    let mut x = start;
    let (mut f, mut g) = objective(&x);
    let mut h = Matrix3::identity();
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        if g.amax() < tol {
            break;
        }
        iterations += 1;
        let mut d = -(h * g);
        if g.dot(&d) >= 0.0 {
            h = Matrix3::identity();
            d = -g;
        }
        // Keep each trial step within a factor e² per parameter.
        let mut step = (2.0 / d.amax()).min(1.0);
        let slope = g.dot(&d);
        let mut accepted = None;
        for _ in 0..60 {
            let trial = x + d * step;
            let (ft, gt) = objective(&trial);
            if ft.is_finite() && ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gn)) = accepted else {
            break;
        };
        let s = xn - x;
        let y = gn - g;
        let sy = s.dot(&y);
        if sy > 1e-16 {
            let rho = 1.0 / sy;
            let i = Matrix3::identity();
            h = (i - s * y.transpose() * rho) * h * (i - y * s.transpose() * rho) + s * s.transpose() * rho;
        }
        let improvement = f - fnew;
        x = xn;
        f = fnew;
        g = gn;
        if improvement.abs() < 1e-15 && s.amax() < 1e-12 {
            break;
        }
    }
    Optimum { x, value: f, grad: g, iterations }
}

fn observed_standard_errors(events: &EventSequence, p: &ExponentialFit) -> Option<[f64; 3]> {
    let theta = [p.baseline, p.alpha, p.beta];
    let mut info = Matrix3::zeros();
    for j in 0..3 {
        let h = 1e-5 * theta[j];
        let shifted = |sign: f64| {
            let mut t = theta;
            t[j] += sign * h;
            let q = ExponentialFit { baseline: t[0], alpha: t[1], beta: t[2] };
            exponential_log_likelihood(events, &q).1
        };
        let col = (shifted(1.0) - shifted(-1.0)) / (2.0 * h);
        for i in 0..3 {
            info[(i, j)] = -col[i];
        }
    }
    let info = (info + info.transpose()) * 0.5;
    let cov = info.try_inverse()?;
    let mut se = [0.0; 3];
    for i in 0..3 {
        if !(cov[(i, i)] > 0.0) {
            return None;
        }
        se[i] = cov[(i, i)].sqrt();
    }
    Some(se)
}

/// Starting points derived from the data: baseline at half the empirical
/// rate, branching ratio 1/2, and decay rates at the reciprocals of the
/// 10%, 25% and 50% quantiles of the inter-arrival times.
fn default_starts(events: &EventSequence) -> Vec<ExponentialFit> {
    let rate = events.len() as f64 / events.window_end();
    let mut gaps: Vec<f64> = events.times().windows(2).map(|w| w[1] - w[0]).filter(|g| *g > 0.0).collect();
    gaps.sort_by(f64::total_cmp);
    [0.10, 0.25, 0.50]
        .iter()
        .map(|&q| {
            let gap = crate::stats::quantile_sorted(&gaps, q).max(1e-12);
            let beta = 1.0 / gap;
            ExponentialFit { baseline: 0.5 * rate, alpha: 0.5 * beta, beta }
        })
        .collect()
}

/// Maximum likelihood fit of an exponential-kernel Hawkes process.
///
/// Runs BFGS in log-parameters from `init` and from three data-driven
/// starts, keeping the best. `converged` is reported, never assumed.
pub fn fit_exponential_hawkes(events: &EventSequence, init: &HawkesParams, tol: f64) -> Result<FitResult> {
    let KernelSpec::Exponential { alpha, beta } = init.kernel else {
        return Err(Error::param("maximum likelihood fitting needs an exponential kernel"));
    };
    if events.len() < 10 {
        return Err(Error::Insufficient(format!("{} events, need at least 10", events.len())));
    }
    let times = events.times();
    if !(times[times.len() - 1] > times[0]) || !(events.window_end() > 0.0) {
        return Err(Error::Data("degenerate event sequence".into()));
    }
    let mut starts = vec![ExponentialFit { baseline: init.baseline, alpha, beta }];
    starts.extend(default_starts(events));
    let best = starts
        .iter()
        .map(|s| bfgs(events, s.to_log(), tol))
        .filter(|o| o.value.is_finite())
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::Estimation("likelihood not finite at any start".into()))?;
    let params = ExponentialFit::from_log(&best.x);
    let (log_likelihood, _) = exponential_log_likelihood(events, &params);
    let gradient_norm = best.grad.amax();
    let converged = gradient_norm < tol;
    if !converged {
        log::warn!("Hawkes MLE did not converge: gradient norm {gradient_norm:.3e} >= {tol:.1e}");
    }
    Ok(FitResult {
        params,
        log_likelihood,
        iterations: best.iterations,
        converged,
        gradient_norm,
        branching_ratio: params.branching_ratio(),
        stationary: params.branching_ratio() < 1.0,
        standard_errors: observed_standard_errors(events, &params),
    })
}

/// Transition counts of a ±1 sign sequence and the implied stay probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub up_up: u64,
    pub up_down: u64,
    pub down_up: u64,
    pub down_down: u64,
    pub p: f64,
    pub p_prime: f64,
}

impl TransitionEstimate {
    pub fn to_params(&self, delta: f64) -> Result<TickChainParams> {
        TickChainParams::new(delta, self.p, self.p_prime)
    }
}

pub fn estimate_transitions(signs: &[i8]) -> Result<TransitionEstimate> {
    if signs.len() < 2 {
        return Err(Error::Insufficient(format!("{} marks, need at least 2", signs.len())));
    }
    let (mut uu, mut ud, mut du, mut dd) = (0u64, 0u64, 0u64, 0u64);
    for w in signs.windows(2) {
        match (w[0] > 0, w[1] > 0) {
            (true, true) => uu += 1,
            (true, false) => ud += 1,
            (false, true) => du += 1,
            (false, false) => dd += 1,
        }
    }
    if uu + ud == 0 {
        return Err(Error::Data("no transitions out of the up state".into()));
    }
    if du + dd == 0 {
        return Err(Error::Data("no transitions out of the down state".into()));
    }
    Ok(TransitionEstimate {
        up_up: uu,
        up_down: ud,
        down_up: du,
        down_down: dd,
        p: uu as f64 / (uu + ud) as f64,
        p_prime: dd as f64 / (du + dd) as f64,
    })
}

/// Two-regime summary built from a series of per-period intensities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    /// Arithmetic mean of the series; values above it are state 0.
    pub threshold: f64,
    /// State of each period: 0 above the mean, 1 at or below it.
    pub labels: Vec<usize>,
    /// Per-period transition matrix from cyclic transition counts.
    pub transition: Vec<Vec<f64>>,
    /// Solution of `p P = p`, `Σp = 1`.
    pub stationary: Vec<f64>,
    /// Fraction of periods in each state.
    pub occupancy: Vec<f64>,
    /// Mean intensity of the member periods of each state.
    pub lambdas: Vec<f64>,
    pub lambda_hat: f64,
}

impl RegimeSummary {
    /// Continuous-time regime chain with one period lasting `period` seconds,
    /// generator `(P − I)/period`.
    pub fn to_regime_spec(&self, period: f64) -> Result<RegimeSpec> {
        if !(period > 0.0) {
            return Err(Error::param("period length must be > 0"));
        }
        let n = self.transition.len();
        let mut generator = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    generator[i][j] = self.transition[i][j] / period;
                }
            }
            generator[i][i] = -(0..n).filter(|&j| j != i).map(|j| generator[i][j]).sum::<f64>();
        }
        RegimeSpec::new(generator, self.lambdas.clone())
    }
}

/// Splits periods at the mean intensity and estimates the two-state chain.
///
/// Transitions are counted cyclically (the last period is followed by the
/// first), so the counted chain is irreducible whenever both states occur
/// and its stationary law equals the occupancy frequencies.
pub fn estimate_regimes(series: &[f64]) -> Result<RegimeSummary> {
    if series.len() < 2 {
        return Err(Error::Insufficient(format!("{} periods, need at least 2", series.len())));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite intensity in series".into()));
    }
    let threshold = crate::stats::mean(series);
    let labels: Vec<usize> = series.iter().map(|&v| if v > threshold { 0 } else { 1 }).collect();
    let mut members = [0usize; 2];
    let mut sums = [0.0; 2];
    for (&l, &v) in labels.iter().zip(series) {
        members[l] += 1;
        sums[l] += v;
    }
    if members.contains(&0) {
        return Err(Error::Data("all periods fall in one regime".into()));
    }
    let mut counts = [[0.0f64; 2]; 2];
    for i in 0..labels.len() {
        let next = labels[(i + 1) % labels.len()];
        counts[labels[i]][next] += 1.0;
    }
    let transition: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            row.iter().map(|c| c / total).collect()
        })
        .collect();
    if !irreducible(2, |i, j| transition[i][j] > 0.0) {
        return Err(Error::Data("estimated regime chain is reducible".into()));
    }
    let balance = DMatrix::from_fn(2, 2, |i, j| transition[i][j] - if i == j { 1.0 } else { 0.0 });
    let stationary = stationary_from_balance(&balance)?;
    let lambdas: Vec<f64> = (0..2).map(|s| sums[s] / members[s] as f64).collect();
    let occupancy = members.iter().map(|&m| m as f64 / labels.len() as f64).collect();
    let lambda_hat = stationary.iter().zip(&lambdas).map(|(p, l)| p * l).sum();
    Ok(RegimeSummary { threshold, labels, transition, stationary, occupancy, lambdas, lambda_hat })
}

/// Sample standard deviation (`n − 1` denominator).
pub fn sd(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Insufficient(format!("{} samples, need at least 2", samples.len())));
    }
    Ok(crate::stats::std_dev(samples))
}

/// Normal-theory standard error of the sample SD, `sd/√(2(n−1))`.
pub fn se_of_sd(samples: &[f64]) -> Result<f64> {
    let s = sd(samples)?;
    Ok(s / (2.0 * (samples.len() as f64 - 1.0)).sqrt())
}

/// Mean squared deviation of `sds` from `√n · coef`.
pub fn estimation_error(sds: &[f64], coef: f64, n: f64) -> Result<f64> {
    if sds.is_empty() {
        return Err(Error::Insufficient("no standard deviations supplied".into()));
    }
    if !(n > 0.0) {
        return Err(Error::param("n must be > 0"));
    }
    let target = n.sqrt() * coef;
    Ok(sds.iter().map(|s| (s - target).powi(2)).sum::<f64>() / sds.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn likelihood_matches_direct_formula_and_gradient() {
        let true_p = HawkesParams::new(0.7, KernelSpec::exponential(1.0, 2.5).unwrap()).unwrap();
        let ev = true_p.simulate(300.0, 4).unwrap();
        let p = ExponentialFit { baseline: 0.6, alpha: 1.1, beta: 2.0 };
        let (ll, g) = exponential_log_likelihood(&ev, &p);
        let h = p.to_hawkes().unwrap();
        let direct: f64 = h.intensities_at_events_direct(&ev).iter().map(|l| l.ln()).sum::<f64>()
            - h.compensator(&ev, ev.window_end());
        assert_relative_eq!(ll, direct, max_relative = 1e-10);
        // Finite-difference oracle for the gradient.
        let base = [p.baseline, p.alpha, p.beta];
        for j in 0..3 {
            let eps = 1e-6 * base[j];
            let mut up = base;
            let mut dn = base;
            up[j] += eps;
            dn[j] -= eps;
            let f = |v: [f64; 3]| exponential_log_likelihood(&ev, &ExponentialFit { baseline: v[0], alpha: v[1], beta: v[2] }).0;
            let fd = (f(up) - f(dn)) / (2.0 * eps);
            assert_relative_eq!(g[j], fd, max_relative = 1e-5, epsilon = 1e-6);
        }
    }

    #[test]
    fn fit_recovers_moderate_parameters() {
        let true_p = HawkesParams::new(0.5, KernelSpec::exponential(1.2, 2.0).unwrap()).unwrap();
        let ev = true_p.simulate(20_000.0, 21).unwrap();
        let fit = fit_exponential_hawkes(&ev, &true_p, 1e-6).unwrap();
        assert!(fit.converged, "{fit:?}");
        assert!((fit.params.baseline / 0.5 - 1.0).abs() < 0.1, "{fit:?}");
        assert!((fit.params.alpha / 1.2 - 1.0).abs() < 0.1, "{fit:?}");
        assert!((fit.params.beta / 2.0 - 1.0).abs() < 0.1, "{fit:?}");
        let se = fit.standard_errors.unwrap();
        assert!(se.iter().all(|s| *s > 0.0 && s.is_finite()));
        // A far-off start still finds the same optimum through the default starts.
        let off = HawkesParams::new(5.0, KernelSpec::exponential(0.01, 50.0).unwrap()).unwrap();
        let fit2 = fit_exponential_hawkes(&ev, &off, 1e-6).unwrap();
        assert_relative_eq!(fit2.log_likelihood, fit.log_likelihood, max_relative = 1e-8);
    }

    #[test]
    fn fit_on_poisson_data_finds_little_excitation() {
        let p = HawkesParams::poisson(2.0).unwrap();
        let ev = p.simulate(5_000.0, 2).unwrap();
        let init = HawkesParams::new(1.0, KernelSpec::exponential(0.5, 1.0).unwrap()).unwrap();
        let fit = fit_exponential_hawkes(&ev, &init, 1e-6).unwrap();
        assert!(fit.branching_ratio < 0.05, "{fit:?}");
        assert!((fit.params.baseline - ev.len() as f64 / 5000.0).abs() < 0.1);
    }

    #[test]
    fn fit_preconditions() {
        let init = HawkesParams::new(1.0, KernelSpec::exponential(0.5, 1.0).unwrap()).unwrap();
        let short = EventSequence::new(vec![1.0, 2.0, 3.0], 4.0).unwrap();
        assert!(matches!(fit_exponential_hawkes(&short, &init, 1e-6), Err(Error::Insufficient(_))));
        let ev = HawkesParams::poisson(1.0).unwrap().simulate(100.0, 1).unwrap();
        assert!(fit_exponential_hawkes(&ev, &HawkesParams::poisson(1.0).unwrap(), 1e-6).is_err());
    }

    #[test]
    fn transition_examples() {
        let e = estimate_transitions(&[1, 1, -1, -1]).unwrap();
        assert_eq!((e.up_up, e.up_down, e.down_up, e.down_down), (1, 1, 0, 1));
        assert_eq!((e.p, e.p_prime), (0.5, 1.0));
        let alt: Vec<i8> = (0..20).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        let e = estimate_transitions(&alt).unwrap();
        assert_eq!((e.p, e.p_prime), (0.0, 0.0));
        assert!(estimate_transitions(&[1]).is_err());
        assert!(estimate_transitions(&[1, 1, 1]).is_err());
        assert!(estimate_transitions(&[1, 1, -1]).is_err());
    }

    #[test]
    fn transitions_from_simulated_day_one_chain() {
        let c = TickChainParams::new(0.01, 0.5187097, 0.5085865).unwrap();
        let marks = c.simulate_tick_chain(1_000_000, crate::chains::InitialMark::Stationary, 6);
        let e = estimate_transitions(&marks.signs).unwrap();
        let se_p = (c.p * (1.0 - c.p) / (e.up_up + e.up_down) as f64).sqrt();
        let se_q = (c.p_prime * (1.0 - c.p_prime) / (e.down_up + e.down_down) as f64).sqrt();
        assert!((e.p - c.p).abs() < 3.0 * se_p);
        assert!((e.p_prime - c.p_prime).abs() < 3.0 * se_q);
    }

    #[test]
    fn regime_examples() {
        let s = estimate_regimes(&[2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(s.threshold, 0.4);
        assert_eq!(s.lambdas, vec![2.0, 0.0]);
        assert_eq!(s.occupancy, vec![0.2, 0.8]);
        assert_relative_eq!(s.stationary[0], 0.2, epsilon = 1e-12);

        let daily = [0.03238898, 0.02643083, 0.02590728, 0.02530517, 0.02417804];
        let s = estimate_regimes(&daily).unwrap();
        assert_eq!(s.labels, vec![0, 1, 1, 1, 1]);
        assert_relative_eq!(s.lambdas[0], 0.03238898);
        assert_relative_eq!(s.lambdas[1], 0.02545533, epsilon = 1e-8);
        assert_relative_eq!(s.stationary[0], 0.2, epsilon = 1e-12);
        assert_relative_eq!(s.lambda_hat, 0.0268421, epsilon = 1e-6);
        assert!((s.lambda_hat - 0.02688).abs() < 2e-4);
        let spec = s.to_regime_spec(100.0).unwrap();
        assert_relative_eq!(spec.lambda_hat().unwrap(), s.lambda_hat, max_relative = 1e-12);

        assert!(estimate_regimes(&[0.3; 6]).is_err());
        assert!(estimate_regimes(&[0.3]).is_err());
    }

    #[test]
    fn tie_goes_to_lower_state() {
        let s = estimate_regimes(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.labels, vec![1, 1, 0]);
    }

    #[test]
    fn sd_examples() {
        assert_eq!(sd(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(se_of_sd(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(sd(&[1.0]).is_err());
        let ten_minute = crate::reference::TEN_MINUTE_SAMPLES;
        assert!((sd(&ten_minute).unwrap() - 0.2763).abs() < 5e-4);
        let five_minute = crate::reference::FIVE_MINUTE_SAMPLES;
        assert!((sd(&five_minute).unwrap() - 0.2864).abs() < 5e-4);
    }

    #[test]
    fn estimation_error_examples() {
        assert_eq!(estimation_error(&[2.0, 2.0], 0.5, 16.0).unwrap(), 0.0);
        assert_eq!(estimation_error(&[1.0, 3.0], 2.0, 1.0).unwrap(), 1.0);
        assert!(estimation_error(&[], 2.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn sd_shift_and_scale(v in proptest::collection::vec(-10.0f64..10.0, 2..40), c in -100.0f64..100.0, k in -5.0f64..5.0) {
            let base = sd(&v).unwrap();
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            prop_assert!((sd(&shifted).unwrap() - base).abs() <= 1e-9 * (1.0 + c.abs()));
            let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
            prop_assert!((sd(&scaled).unwrap() - k.abs() * base).abs() <= 1e-9 * (1.0 + base));
        }

        #[test]
        fn regime_rows_are_stochastic(v in proptest::collection::vec(0.0f64..1.0, 2..30)) {
            if let Ok(s) = estimate_regimes(&v) {
                for row in &s.transition {
                    prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
                for j in 0..2 {
                    let r: f64 = (0..2).map(|i| s.stationary[i] * s.transition[i][j]).sum();
                    prop_assert!((r - s.stationary[j]).abs() < 1e-12);
                }
                prop_assert!((s.stationary[0] - s.occupancy[0]).abs() < 1e-12);
            }
        }

        #[test]
        fn transition_counts_are_exact(signs in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 2..200)) {
            if let Ok(e) = estimate_transitions(&signs) {
                prop_assert_eq!(e.up_up + e.up_down + e.down_up + e.down_down, signs.len() as u64 - 1);
                prop_assert_eq!(e.p, e.up_up as f64 / (e.up_up + e.up_down) as f64);
            }
        }
    }
}
