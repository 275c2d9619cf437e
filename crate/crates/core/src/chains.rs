//! Tick chain and regime chain.
//!
//! Price changes are marks `X_k ∈ {-δ, +δ}` following a two-state Markov
//! chain with stay probabilities `p` (up→up) and `p'` (down→down). Regimes
//! follow a finite continuous-time chain with generator `A`, each state
//! carrying its own baseline intensity.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Stream, StreamSeed};

/// Two-state price-change chain over `{-δ, +δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTick")]
pub struct TickChainParams {
    pub delta: f64,
    /// P(+δ → +δ).
    pub p: f64,
    /// P(-δ → -δ).
    pub p_prime: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTick {
    delta: f64,
    p: f64,
    p_prime: f64,
}

impl TryFrom<RawTick> for TickChainParams {
    type Error = Error;
    fn try_from(raw: RawTick) -> Result<Self> {
        TickChainParams::new(raw.delta, raw.p, raw.p_prime)
    }
}

/// Distribution of the first mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialMark {
    Up,
    Down,
    #[default]
    Stationary,
}

/// A sequence of marks stored as signs; mark `k` is `signs[k] · δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TickMarks {
    pub delta: f64,
    pub signs: Vec<i8>,
}

impl TickMarks {
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.signs.iter().map(move |&s| f64::from(s) * self.delta)
    }
}

impl TickChainParams {
    pub fn new(delta: f64, p: f64, p_prime: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::param(format!("tick size must be > 0, got {delta}")));
        }
        for (name, v) in [("p", p), ("p_prime", p_prime)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::param(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(Self { delta, p, p_prime })
    }

    /// Stationary probability `π*` of the up state.
    pub fn stationary_tick(&self) -> f64 {
        let leave_up = 1.0 - self.p;
        let leave_down = 1.0 - self.p_prime;
        leave_down / (leave_up + leave_down)
    }

    /// Mean mark under stationarity, `δ(2π* − 1)`.
    pub fn s_star(&self) -> f64 {
        self.delta * (2.0 * self.stationary_tick() - 1.0)
    }

    /// Asymptotic variance per event of the centered mark sums.
    pub fn sigma_squared(&self) -> f64 {
        let (p, q) = (self.p, self.p_prime);
        let pi = self.stationary_tick();
        let v = 4.0
            * self.delta
            * self.delta
            * ((1.0 - q + pi * (q - p)) / ((p + q - 2.0) * (p + q - 2.0)) - pi * (1.0 - pi));
        assert!(
            v >= -1e-12 * self.delta * self.delta,
            "negative mark variance {v} for an ergodic chain"
        );
        v.max(0.0)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_squared().sqrt()
    }

    /// Lag-one autocorrelation of the marks, `p + p' − 1`.
    pub fn correlation(&self) -> f64 {
        self.p + self.p_prime - 1.0
    }

    /// Same chain with a different tick size.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(delta, self.p, self.p_prime)
    }

    pub(crate) fn draw_initial<R: Rng + ?Sized>(&self, initial: InitialMark, rng: &mut R) -> i8 {
        match initial {
            InitialMark::Up => 1,
            InitialMark::Down => -1,
            InitialMark::Stationary => {
                if rng.random::<f64>() < self.stationary_tick() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    #[inline]
    pub(crate) fn step<R: Rng + ?Sized>(&self, current: i8, rng: &mut R) -> i8 {
        let stay = if current > 0 { self.p } else { self.p_prime };
        if rng.random::<f64>() < stay {
            current
        } else {
            -current
        }
    }

    pub fn simulate_with<R: Rng + ?Sized>(&self, n: usize, initial: InitialMark, rng: &mut R) -> TickMarks {
        let mut signs = Vec::with_capacity(n);
        if n > 0 {
            let mut s = self.draw_initial(initial, rng);
            signs.push(s);
            for _ in 1..n {
                s = self.step(s, rng);
                signs.push(s);
            }
        }
        TickMarks { delta: self.delta, signs }
    }

    pub fn simulate_tick_chain(&self, n: usize, initial: InitialMark, seed: u64) -> TickMarks {
        let mut rng = StreamSeed::new(seed, 0).rng(Stream::Marks);
        self.simulate_with(n, initial, &mut rng)
    }
}

/// Finite continuous-time regime chain and its per-state baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRegime")]
pub struct RegimeSpec {
    /// Row-major generator; off-diagonal rates ≥ 0, rows sum to zero.
    pub generator: Vec<Vec<f64>>,
    /// Baseline intensity in each state.
    pub baselines: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegime {
    generator: Vec<Vec<f64>>,
    baselines: Vec<f64>,
}

impl TryFrom<RawRegime> for RegimeSpec {
    type Error = Error;
    fn try_from(raw: RawRegime) -> Result<Self> {
        RegimeSpec::new(raw.generator, raw.baselines)
    }
}

const ROW_SUM_TOLERANCE: f64 = 1e-12;

impl RegimeSpec {
    pub fn new(generator: Vec<Vec<f64>>, baselines: Vec<f64>) -> Result<Self> {
        let n = generator.len();
        if n == 0 {
            return Err(Error::InvalidGenerator("empty generator".into()));
        }
        if baselines.len() != n {
            return Err(Error::InvalidGenerator(format!(
                "{} baselines for {} states",
                baselines.len(),
                n
            )));
        }
        for (i, row) in generator.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGenerator(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            let scale = row.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (j, &a) in row.iter().enumerate() {
                if !a.is_finite() {
                    return Err(Error::InvalidGenerator(format!("entry ({i},{j}) is not finite")));
                }
                if i != j && a < 0.0 {
                    return Err(Error::InvalidGenerator(format!("negative rate {a} at ({i},{j})")));
                }
            }
            let sum: f64 = row.iter().sum();
            if sum.abs() > ROW_SUM_TOLERANCE * scale {
                return Err(Error::InvalidGenerator(format!("row {i} sums to {sum}, expected 0")));
            }
        }
        for (i, &l) in baselines.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::param(format!("baseline of state {i} must be > 0, got {l}")));
            }
        }
        let spec = Self { generator, baselines };
        if !spec.is_irreducible() {
            return Err(Error::InvalidGenerator("generator is reducible".into()));
        }
        Ok(spec)
    }

    /// Single-state chain with baseline `lambda`.
    pub fn single(lambda: f64) -> Result<Self> {
        Self::new(vec![vec![0.0]], vec![lambda])
    }

    pub fn n_states(&self) -> usize {
        self.generator.len()
    }

    fn is_irreducible(&self) -> bool {
        irreducible(self.n_states(), |i, j| self.generator[i][j] > 0.0)
    }

    /// Stationary law `p*` solving `p*A = 0`, `Σ p*_i = 1`.
    pub fn stationary_regime(&self) -> Result<Vec<f64>> {
        let n = self.n_states();
        let a = DMatrix::from_fn(n, n, |i, j| self.generator[i][j]);
        stationary_from_balance(&a)
    }

    /// `λ̂ = Σ p*_i λ_i`.
    pub fn lambda_hat(&self) -> Result<f64> {
        let p = self.stationary_regime()?;
        Ok(p.iter().zip(&self.baselines).map(|(p, l)| p * l).sum())
    }

    pub fn exit_rate(&self, state: usize) -> f64 {
        -self.generator[state][state]
    }

    /// Samples the regime path on `[0, window)`.
    pub fn simulate_path<R: Rng + ?Sized>(&self, window: f64, initial: Option<usize>, rng: &mut R) -> Result<RegimePath> {
        let start = match initial {
            Some(s) if s < self.n_states() => s,
            Some(s) => return Err(Error::param(format!("initial regime {s} out of range"))),
            None => {
                let p = self.stationary_regime()?;
                sample_index(&p, rng.random::<f64>())
            }
        };
        let mut switches = Vec::new();
        let mut state = start;
        let mut t = 0.0;
        loop {
            let rate = self.exit_rate(state);
            if rate <= 0.0 {
                break;
            }
            let hold: f64 = rng.sample::<f64, _>(Exp1) / rate;
            t += hold;
            if t >= window {
                break;
            }
            let u = rng.random::<f64>() * rate;
            let mut acc = 0.0;
            let mut next = state;
            for (j, &a) in self.generator[state].iter().enumerate() {
                if j == state {
                    continue;
                }
                acc += a;
                next = j;
                if u < acc {
                    break;
                }
            }
            state = next;
            switches.push((t, state));
        }
        Ok(RegimePath { initial_state: start, switches, window_end: window })
    }
}

fn sample_index(probabilities: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities.len() - 1
}

/// Strong connectivity of the directed graph `i → j` where `edge(i, j)`.
pub(crate) fn irreducible(n: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let e = if forward { edge(i, j) } else { edge(j, i) };
                if i != j && e && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Solves `x B = 0`, `Σx = 1` for a generator-like matrix `B`.
pub(crate) fn stationary_from_balance(b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = b.nrows();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let mut m = b.transpose();
    for j in 0..n {
        m[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidGenerator("singular balance equations".into()))?;
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidGenerator("stationary vector is not strictly positive".into()));
    }
    Ok(x.iter().copied().collect())
}

/// Realized regime trajectory: the initial state and every switch `(time, new state)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimePath {
    pub initial_state: usize,
    pub switches: Vec<(f64, usize)>,
    pub window_end: f64,
}

impl RegimePath {
    pub fn constant(state: usize, window_end: f64) -> Self {
        Self { initial_state: state, switches: Vec::new(), window_end }
    }

    pub fn state_at(&self, t: f64) -> usize {
        let idx = self.switches.partition_point(|&(s, _)| s <= t);
        if idx == 0 {
            self.initial_state
        } else {
            self.switches[idx - 1].1
        }
    }

    /// Fraction of `[0, window_end)` spent in each of `n_states` states.
    pub fn occupancy(&self, n_states: usize) -> Vec<f64> {
        let mut time = vec![0.0; n_states];
        let mut state = self.initial_state;
        let mut last = 0.0;
        for &(t, next) in &self.switches {
            time[state] += t - last;
            last = t;
            state = next;
        }
        time[state] += self.window_end - last;
        time.iter().map(|x| x / self.window_end).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn day(p: f64, q: f64) -> TickChainParams {
        TickChainParams::new(0.01, p, q).unwrap()
    }

    #[test]
    fn stationary_tick_examples() {
        assert_eq!(day(0.5, 0.5).stationary_tick(), 0.5);
        let d1 = day(0.5187097, 0.5085865);
        assert_relative_eq!(d1.stationary_tick(), 0.5052036, epsilon = 1e-7);
        assert!((d1.s_star() - 0.0001040723).abs() <= 1e-7);
        let d3 = day(0.6175041, 0.5941278);
        assert_relative_eq!(d3.stationary_tick(), 0.5148258, epsilon = 1e-6);
        assert!((d3.s_star() - 0.0002965143).abs() <= 1e-7);
    }

    #[test]
    fn s_star_examples() {
        assert_eq!(day(0.5, 0.5).s_star(), 0.0);
        assert!((day(0.4790503, 0.4537445).s_star() - 0.0002371220).abs() <= 1e-9);
    }

    #[test]
    fn sigma_squared_examples() {
        assert_relative_eq!(day(0.5, 0.5).sigma_squared(), 1e-4, max_relative = 1e-12);
        assert_relative_eq!(day(0.5187097, 0.5085865).sigma_squared(), 1.0560e-4, max_relative = 1e-3);
        let sticky = TickChainParams::new(1.0, 0.9, 0.9).unwrap();
        assert_relative_eq!(sticky.sigma_squared(), 9.0, max_relative = 1e-12);
    }

    /// Independent closed form: σ² = γ₀ (1 + ρ)/(1 − ρ) for a two-state chain
    /// with lag-one autocorrelation ρ and stationary variance γ₀.
    #[test]
    fn sigma_squared_matches_autocorrelation_formula() {
        for &(p, q) in &[(0.2, 0.7), (0.9, 0.3), (0.55, 0.45), (0.05, 0.95)] {
            let c = TickChainParams::new(0.5, p, q).unwrap();
            let pi = c.stationary_tick();
            let gamma0 = 4.0 * c.delta * c.delta * pi * (1.0 - pi);
            let rho = c.correlation();
            assert_relative_eq!(c.sigma_squared(), gamma0 * (1.0 + rho) / (1.0 - rho), max_relative = 1e-10);
        }
    }

    #[test]
    fn invalid_tick_params() {
        assert!(TickChainParams::new(0.0, 0.5, 0.5).is_err());
        assert!(TickChainParams::new(0.01, 1.0, 0.5).is_err());
        assert!(TickChainParams::new(0.01, 0.5, 0.0).is_err());
        assert!(serde_json::from_str::<TickChainParams>(r#"{"delta":0.01,"p":0.5,"p_prime":1.5}"#).is_err());
    }

    #[test]
    fn simulate_tick_chain_basics() {
        let c = day(0.5187097, 0.5085865);
        assert!(c.simulate_tick_chain(0, InitialMark::Up, 1).is_empty());
        let a = c.simulate_tick_chain(1000, InitialMark::Stationary, 5);
        let b = c.simulate_tick_chain(1000, InitialMark::Stationary, 5);
        assert_eq!(a, b);
        assert!(a.signs.iter().all(|&s| s == 1 || s == -1));
        assert_eq!(c.simulate_tick_chain(3, InitialMark::Down, 5).signs[0], -1);
    }

    #[test]
    fn near_absorbing_stay_frequency_within_binomial_ci() {
        let eps = 1e-3;
        let c = TickChainParams::new(0.01, 1.0 - eps, 0.5).unwrap();
        let marks = c.simulate_tick_chain(200_000, InitialMark::Up, 11);
        let (mut stay, mut from_up) = (0u64, 0u64);
        for w in marks.signs.windows(2) {
            if w[0] > 0 {
                from_up += 1;
                if w[1] > 0 {
                    stay += 1;
                }
            }
        }
        let n = from_up as f64;
        let phat = stay as f64 / n;
        let se = (c.p * (1.0 - c.p) / n).sqrt();
        assert!((phat - c.p).abs() <= 4.0 * se, "phat {phat} se {se}");
    }

    #[test]
    fn empirical_mean_of_marks_matches_s_star() {
        let c = TickChainParams::new(0.01, 0.6175041, 0.5941278).unwrap();
        let n = 1_000_000;
        let marks = c.simulate_tick_chain(n, InitialMark::Stationary, 3);
        let mean = marks.values().sum::<f64>() / n as f64;
        let tol = 3.0 * c.sigma() / (n as f64).sqrt();
        assert!((mean - c.s_star()).abs() <= tol, "mean {mean} s* {} tol {tol}", c.s_star());
    }

    #[test]
    fn stationary_regime_examples() {
        let sym = RegimeSpec::new(vec![vec![-1.0, 1.0], vec![1.0, -1.0]], vec![1.0, 1.0]).unwrap();
        let p = sym.stationary_regime().unwrap();
        assert_relative_eq!(p[0], 0.5, epsilon = 1e-14);
        let asym = RegimeSpec::new(vec![vec![-4.0, 4.0], vec![1.0, -1.0]], vec![0.03238898, 0.02545533]).unwrap();
        let p = asym.stationary_regime().unwrap();
        assert_relative_eq!(p[0], 0.2, epsilon = 1e-14);
        assert_relative_eq!(p[1], 0.8, epsilon = 1e-14);
        assert_relative_eq!(asym.lambda_hat().unwrap(), 0.02684206, epsilon = 1e-8);
        assert!((asym.lambda_hat().unwrap() - 0.02688).abs() < 2e-4);
    }

    #[test]
    fn lambda_hat_degenerate_cases() {
        assert_eq!(RegimeSpec::single(0.7).unwrap().lambda_hat().unwrap(), 0.7);
        let uniform = RegimeSpec::new(
            vec![vec![-3.0, 1.0, 2.0], vec![0.5, -0.5, 0.0], vec![0.0, 4.0, -4.0]],
            vec![0.2, 0.2, 0.2],
        )
        .unwrap();
        assert_relative_eq!(uniform.lambda_hat().unwrap(), 0.2, max_relative = 1e-12);
    }

    #[test]
    fn reducible_and_malformed_generators_rejected() {
        assert!(RegimeSpec::new(vec![vec![-1.0, 1.0], vec![0.0, 0.0]], vec![1.0, 1.0]).is_err());
        assert!(RegimeSpec::new(vec![vec![-1.0, 0.5], vec![1.0, -1.0]], vec![1.0, 1.0]).is_err());
        assert!(RegimeSpec::new(vec![vec![1.0, -1.0], vec![1.0, -1.0]], vec![1.0, 1.0]).is_err());
        assert!(RegimeSpec::new(vec![vec![-1.0, 1.0], vec![1.0, -1.0]], vec![1.0]).is_err());
        assert!(RegimeSpec::new(vec![vec![-1.0, 1.0], vec![1.0, -1.0]], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn regime_path_occupancy_tracks_stationary_law() {
        let spec = RegimeSpec::new(vec![vec![-4.0, 4.0], vec![1.0, -1.0]], vec![1.0, 2.0]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let path = spec.simulate_path(20_000.0, None, &mut rng).unwrap();
        let occ = path.occupancy(2);
        assert!((occ[0] - 0.2).abs() < 0.01, "{occ:?}");
        assert_eq!(path.state_at(0.0), path.initial_state);
        for w in path.switches.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 != w[1].1);
        }
    }

    fn random_generator() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (2usize..6).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(0.01f64..5.0, n), n).prop_map(|mut rows| {
                let n = rows.len();
                for i in 0..n {
                    let off: f64 = (0..n).filter(|&j| j != i).map(|j| rows[i][j]).sum();
                    rows[i][i] = -off;
                }
                rows
            })
        })
    }

    proptest! {
        #[test]
        fn stationary_regime_balances(generator in random_generator()) {
            let n = generator.len();
            let spec = RegimeSpec::new(generator.clone(), vec![1.0; n]).unwrap();
            let p = spec.stationary_regime().unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for j in 0..n {
                let r: f64 = (0..n).map(|i| p[i] * generator[i][j]).sum();
                prop_assert!(r.abs() < 1e-10);
            }
        }

        #[test]
        fn stationary_tick_is_fixed_point(p in 0.001f64..0.999, q in 0.001f64..0.999) {
            let c = TickChainParams::new(0.01, p, q).unwrap();
            let pi = c.stationary_tick();
            prop_assert!((pi * p + (1.0 - pi) * (1.0 - q) - pi).abs() < 1e-12);
            prop_assert!(c.s_star().abs() < c.delta);
            prop_assert!(c.sigma_squared() >= 0.0);
        }

        #[test]
        fn tick_size_homogeneity(p in 0.01f64..0.99, q in 0.01f64..0.99, scale in 0.1f64..10.0) {
            let a = TickChainParams::new(0.01, p, q).unwrap();
            let b = a.with_delta(0.01 * scale).unwrap();
            prop_assert!((b.s_star() - scale * a.s_star()).abs() <= 1e-12 * scale.max(1.0));
            prop_assert!((b.sigma() - scale * a.sigma()).abs() <= 1e-10 * b.sigma().max(1e-12));
        }
    }
}
