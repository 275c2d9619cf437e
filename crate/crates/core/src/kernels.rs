//! Excitation kernels.
//!
//! A kernel `μ(t)` is the contribution of one past event to the intensity
//! `t` seconds later. Its integral over `[0, ∞)` is the branching ratio; a
//! Hawkes process built on it is stationary only when that ratio is below 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Excitation function of a Hawkes process.
///
/// Serialized as `{"type": "exponential", "alpha": .., "beta": ..}`,
/// `{"type": "power_law", "k": .., "c": .., "p": ..}` or `{"type": "none"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", try_from = "RawKernel")]
pub enum KernelSpec {
    /// `α e^{-βt}`.
    Exponential { alpha: f64, beta: f64 },
    /// `k / (c + t)^p`, with `p > 1`.
    PowerLaw { k: f64, c: f64, p: f64 },
    /// No excitation: the process is homogeneous Poisson.
    None,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawKernel {
    Exponential { alpha: f64, beta: f64 },
    PowerLaw { k: f64, c: f64, p: f64 },
    None,
}

impl TryFrom<RawKernel> for KernelSpec {
    type Error = Error;

    fn try_from(raw: RawKernel) -> Result<Self> {
        match raw {
            RawKernel::Exponential { alpha, beta } => KernelSpec::exponential(alpha, beta),
            RawKernel::PowerLaw { k, c, p } => KernelSpec::power_law(k, c, p),
            RawKernel::None => Ok(KernelSpec::None),
        }
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("kernel {name} must be finite and > 0, got {value}")))
    }
}

impl KernelSpec {
    pub fn exponential(alpha: f64, beta: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        Ok(KernelSpec::Exponential { alpha, beta })
    }

    pub fn power_law(k: f64, c: f64, p: f64) -> Result<Self> {
        positive("k", k)?;
        positive("c", c)?;
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::param(format!(
                "power-law exponent must be > 1 for a finite branching ratio, got {p}"
            )));
        }
        Ok(KernelSpec::PowerLaw { k, c, p })
    }

    /// Re-checks parameter ranges, for values built from the public variants.
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Exponential { alpha, beta } => KernelSpec::exponential(alpha, beta).map(|_| ()),
            KernelSpec::PowerLaw { k, c, p } => KernelSpec::power_law(k, c, p).map(|_| ()),
            KernelSpec::None => Ok(()),
        }
    }

    /// `μ(t)` for elapsed time `t ≥ 0`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::param(format!("kernel evaluated at negative time {t}")));
        }
        Ok(self.value(t))
    }

    /// `μ(t)` without the sign check; callers guarantee `t ≥ 0`.
    #[inline]
    pub(crate) fn value(&self, t: f64) -> f64 {
        match *self {
            KernelSpec::Exponential { alpha, beta } => alpha * (-beta * t).exp(),
            KernelSpec::PowerLaw { k, c, p } => k * (c + t).powf(-p),
            KernelSpec::None => 0.0,
        }
    }

    /// `∫₀ᵘ μ(s) ds`.
    #[inline]
    pub fn integrated(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match *self {
            KernelSpec::Exponential { alpha, beta } => alpha / beta * (-(-beta * u).exp_m1()),
            KernelSpec::PowerLaw { k, c, p } => {
                k / (p - 1.0) * (c.powf(1.0 - p) - (c + u).powf(1.0 - p))
            }
            KernelSpec::None => 0.0,
        }
    }

    /// `μ̂ = ∫₀^∞ μ(s) ds`.
    pub fn branching_ratio(&self) -> f64 {
        match *self {
            KernelSpec::Exponential { alpha, beta } => alpha / beta,
            KernelSpec::PowerLaw { k, c, p } => k * c.powf(1.0 - p) / (p - 1.0),
            KernelSpec::None => 0.0,
        }
    }

    pub fn check_stationarity(&self) -> bool {
        self.branching_ratio() < 1.0
    }

    pub(crate) fn require_stationary(&self) -> Result<f64> {
        let ratio = self.branching_ratio();
        if ratio < 1.0 {
            Ok(ratio)
        } else {
            Err(Error::NonStationary { branching_ratio: ratio })
        }
    }

    /// Whether `∫ s μ(s) ds` is finite and the point-process CLT applies.
    ///
    /// Power laws need `p > 2`.
    pub fn supports_clt(&self) -> bool {
        match *self {
            KernelSpec::PowerLaw { p, .. } => p > 2.0,
            _ => true,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, KernelSpec::None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Adaptive Simpson on `[a, b]`, used only as an oracle.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    /// `∫₀^∞` via the substitution `s = e^x - 1`, truncated where the tail is negligible.
    fn integrate_to_infinity(kernel: &KernelSpec) -> f64 {
        let f = |x: f64| kernel.value(x.exp_m1()) * x.exp();
        simpson(&f, 0.0, 150.0, 1e-12)
    }

    #[test]
    fn evaluate_examples() {
        let e = KernelSpec::exponential(1.0, 2.0).unwrap();
        assert_eq!(e.evaluate(0.0).unwrap(), 1.0);
        let e = KernelSpec::exponential(1.0, 1.0).unwrap();
        assert_relative_eq!(e.evaluate(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        let pl = KernelSpec::power_law(1.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(pl.evaluate(1.0).unwrap(), 0.25, max_relative = 1e-15);
        assert_eq!(KernelSpec::None.evaluate(3.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_time_rejected() {
        let e = KernelSpec::exponential(1.0, 2.0).unwrap();
        assert!(e.evaluate(-1e-9).is_err());
        assert!(e.evaluate(f64::NAN).is_err());
    }

    #[test]
    fn branching_ratio_examples() {
        let day1 = KernelSpec::exponential(438.2557, 865.9344).unwrap();
        assert_relative_eq!(day1.branching_ratio(), 0.506107, epsilon = 1e-6);
        assert_eq!(KernelSpec::exponential(1.0, 2.0).unwrap().branching_ratio(), 0.5);
        // Oracle: quadrature of (2 + s)^-3 over [0, ∞) is 1/8.
        let pl = KernelSpec::power_law(1.0, 2.0, 3.0).unwrap();
        let oracle = integrate_to_infinity(&pl);
        assert_relative_eq!(oracle, 0.125, epsilon = 1e-10);
        assert_relative_eq!(pl.branching_ratio(), oracle, epsilon = 1e-10);
    }

    #[test]
    fn stationarity_examples() {
        assert!(KernelSpec::exponential(1.0, 2.0).unwrap().check_stationarity());
        assert!(!KernelSpec::exponential(2.0, 1.0).unwrap().check_stationarity());
        assert!(KernelSpec::None.check_stationarity());
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(KernelSpec::exponential(0.0, 1.0).is_err());
        assert!(KernelSpec::exponential(1.0, -1.0).is_err());
        assert!(KernelSpec::power_law(1.0, 1.0, 1.0).is_err());
        assert!(KernelSpec::power_law(1.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn clt_capability() {
        assert!(KernelSpec::exponential(1.0, 2.0).unwrap().supports_clt());
        assert!(!KernelSpec::power_law(0.1, 1.0, 1.5).unwrap().supports_clt());
        assert!(KernelSpec::power_law(0.1, 1.0, 2.5).unwrap().supports_clt());
    }

    #[test]
    fn json_shape() {
        let k: KernelSpec = serde_json::from_str(r#"{"type":"exponential","alpha":1.5,"beta":3}"#).unwrap();
        assert_eq!(k, KernelSpec::Exponential { alpha: 1.5, beta: 3.0 });
        let k: KernelSpec = serde_json::from_str(r#"{"type":"power_law","k":1,"c":2,"p":3}"#).unwrap();
        assert_eq!(k.branching_ratio(), 0.125);
        let k: KernelSpec = serde_json::from_str(r#"{"type":"none"}"#).unwrap();
        assert!(k.is_none());
        assert!(serde_json::from_str::<KernelSpec>(r#"{"type":"exponential","alpha":-1,"beta":3}"#).is_err());
        assert!(serde_json::from_str::<KernelSpec>(r#"{"type":"exponential","alpha":1,"beta":3,"gamma":1}"#).is_err());
        let back = serde_json::to_string(&KernelSpec::exponential(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(back, r#"{"type":"exponential","alpha":1.0,"beta":2.0}"#);
    }

    fn any_kernel() -> impl Strategy<Value = KernelSpec> {
        prop_oneof![
            (0.01f64..5.0, 0.1f64..10.0).prop_map(|(a, b)| KernelSpec::exponential(a, b).unwrap()),
            (0.01f64..2.0, 0.1f64..3.0, 1.5f64..4.0).prop_map(|(k, c, p)| KernelSpec::power_law(k, c, p).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn quadrature_matches_branching_ratio(kernel in any_kernel()) {
            let oracle = integrate_to_infinity(&kernel);
            prop_assert!((oracle - kernel.branching_ratio()).abs() <= 1e-6 * kernel.branching_ratio().max(1.0));
        }

        #[test]
        fn values_nonnegative_and_nonincreasing(kernel in any_kernel(), t in 0.0f64..100.0, dt in 0.0f64..10.0) {
            let a = kernel.evaluate(t).unwrap();
            let b = kernel.evaluate(t + dt).unwrap();
            prop_assert!(a >= 0.0 && b >= 0.0);
            prop_assert!(b <= a);
        }

        #[test]
        fn integrated_tends_to_branching_ratio(kernel in any_kernel(), u in 0.0f64..50.0) {
            let part = kernel.integrated(u);
            prop_assert!(part >= 0.0 && part <= kernel.branching_ratio() * (1.0 + 1e-12));
        }

        #[test]
        fn branching_ratio_homogeneous_in_amplitude(a in 0.01f64..5.0, b in 0.1f64..10.0, k in 0.01f64..2.0, c in 0.1f64..3.0, p in 1.2f64..4.0) {
            let e1 = KernelSpec::exponential(a, b).unwrap().branching_ratio();
            let e2 = KernelSpec::exponential(2.0 * a, b).unwrap().branching_ratio();
            prop_assert!((e2 - 2.0 * e1).abs() <= 1e-12 * e2);
            let p1 = KernelSpec::power_law(k, c, p).unwrap().branching_ratio();
            let p2 = KernelSpec::power_law(2.0 * k, c, p).unwrap().branching_ratio();
            prop_assert!((p2 - 2.0 * p1).abs() <= 1e-12 * p2);
        }
    }
}
