//! Published per-day estimates for the CISCO sample of 3–7 November 2014,
//! tick size 0.01, used as reference values by the reproduction report and
//! the acceptance tests.

pub const TICK_SIZE: f64 = 0.01;

/// Daily stay probabilities `(p, p')` (up→up, down→down).
pub const TRANSITIONS: [(f64, f64); 5] = [
    (0.5187097, 0.5085865),
    (0.4790503, 0.4537445),
    (0.6175041, 0.5941278),
    (0.5806988, 0.5699659),
    (0.4608844, 0.4438596),
];

/// Daily off-diagonal probabilities as printed (up→down, down→up).
pub const SWITCH_PROBABILITIES: [(f64, f64); 5] = [
    (0.4812903, 0.4914135),
    (0.5209497, 0.5462555),
    (0.3824959, 0.4058722),
    (0.4193012, 0.4300341),
    (0.5391156, 0.5561404),
];

pub const S_STAR: [f64; 5] = [0.0001040723, 0.0002371220, 0.0002965143, 0.0001263690, 0.0001554404];

/// Printed per-day "σ" column. Not reproducible from the transition matrices.
pub const SIGMA_COLUMN: [f64; 5] = [1.066708e-04, 1.005524e-04, 1.165201e-04, 1.134621e-04, 9.954487e-05];

pub const BASELINE: [f64; 5] = [0.03238898, 0.02643083, 0.02590728, 0.02530517, 0.02417804];
pub const ALPHA: [f64; 5] = [438.2557, 401.0505, 559.1927, 418.7816, 449.8632];
pub const BETA: [f64; 5] = [865.9344, 718.0325, 1132.0741, 834.2553, 878.9675];

/// Printed long-run rates `λ/(1 − α/β)`.
pub const LONG_RUN_RATE: [f64; 5] = [0.06560129, 0.059801686, 0.051181133, 0.050801432, 0.04957073];

/// Printed "volatility coefficient" row. Not reproducible from the other columns.
pub const VOLATILITY_COEFFICIENT: [f64; 5] = [0.04033114, 0.04098132, 0.04770726, 0.04725449, 0.04483260];

/// Printed stationary up-probabilities. They do not solve `πP = π` for the printed matrices.
pub const STATIONARY_PRINTED: [f64; 5] = [0.5525, 0.6195, 0.6494, 0.5637, 0.5783];

/// `S_{nt} − N(nt)s*` samples over 7 sampled hours × 5 days, horizon 10 minutes.
pub const TEN_MINUTE_SAMPLES: [f64; 35] = [
    24.50981, 24.54490, 24.52375, 24.59209, 24.47209, 24.57042, 24.61063, 24.76987, 24.68749, 24.81599, 24.77026,
    24.79883, 24.80073, 24.90121, 24.87772, 24.98492, 25.09788, 25.09441, 24.99085, 25.18195, 25.15721, 25.04236,
    25.18323, 25.15222, 25.20424, 25.14171, 25.18323, 25.25348, 25.10225, 25.29003, 25.28282, 25.33267, 25.30313,
    25.27407, 25.30438,
];

/// Same, horizon 5 minutes.
pub const FIVE_MINUTE_SAMPLES: [f64; 35] = [
    24.49896, 24.52906, 24.50417, 24.53417, 24.53500, 24.51458, 24.55479, 24.93026, 24.66931, 24.74263, 24.79358,
    24.80310, 24.84500, 24.88405, 24.85729, 24.98907, 25.08085, 25.07500, 24.99322, 25.13381, 25.15144, 25.15197,
    25.12475, 25.15449, 25.18475, 25.20348, 25.20500, 25.25348, 25.21251, 25.35376, 25.30407, 25.30469, 25.30469,
    25.27500, 25.30469,
];

/// Same, horizon 20 minutes.
pub const TWENTY_MINUTE_SAMPLES: [f64; 35] = [
    24.48419, 24.53970, 24.56292, 24.57105, 24.48938, 24.52751, 24.50751, 24.76465, 24.59753, 24.82935, 24.76552,
    24.81741, 24.75409, 24.84077, 24.92942, 24.99721, 25.05551, 25.04848, 25.08492, 25.09780, 25.09551, 24.95124,
    25.24222, 25.19096, 25.18273, 25.14070, 25.20171, 25.26785, 25.23013, 25.38661, 25.32127, 25.34065, 25.30313,
    25.25251, 25.24972,
];

/// Printed SDs of the three sample sets (10, 5, 20 minutes).
pub const SAMPLE_SD: [f64; 3] = [0.2763377, 0.2863928, 0.2912967];

/// Printed standard errors of those SDs. Not reproducible by standard formulas.
pub const SAMPLE_SE_OF_SD: [f64; 3] = [0.01133634, 0.01233352, 0.01234808];

/// Per-state baselines of the two-regime construction and their occupancy.
pub const REGIME_BASELINES: [f64; 2] = [0.03238898, 0.02545533];
pub const REGIME_PROBABILITIES: [f64; 2] = [0.2, 0.8];
pub const REGIME_LAMBDA_HAT: f64 = 0.02688;

/// Inputs and outputs of the SD-matching error.
pub const ERROR_SCALE_N: f64 = 1000.0;
pub const ERROR_COEF: f64 = 0.3276;
pub const ERROR_VALUES: [f64; 2] = [0.07617229, 0.07980041];

/// Horizons of the three sample sets, in minutes.
pub const SAMPLE_HORIZONS_MINUTES: [f64; 3] = [10.0, 5.0, 20.0];

pub fn sample_sets() -> [(&'static str, &'static [f64]); 3] {
    [
        ("10 min", &TEN_MINUTE_SAMPLES),
        ("5 min", &FIVE_MINUTE_SAMPLES),
        ("20 min", &TWENTY_MINUTE_SAMPLES),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrices_are_stochastic() {
        for ((p, q), (pu, qd)) in TRANSITIONS.iter().zip(SWITCH_PROBABILITIES) {
            assert!((p + pu - 1.0).abs() < 1e-6);
            assert!((q + qd - 1.0).abs() < 1e-6);
        }
    }
}
