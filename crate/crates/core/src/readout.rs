//! Single-shot readout simulation.
//!
//! A cavity-enhanced readout ion fluoresces unless a nearby qubit blockades
//! it, so state detection reduces to separating photon statistics: the
//! bright hypothesis is a homogeneous Poisson process at the detection rate,
//! the dark hypothesis emits only background until the blockading qubit
//! decays, after which the trace turns bright. [`bayes_discriminate`]
//! computes the exact likelihood ratio on full timestamp records,
//! marginalized over the unknown decay time. [`buffer_protocol`] cycles the
//! state through a dedicated buffer ion so a decay during one readout window
//! cannot erase the qubit information.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_trials, trial_rng};

/// Transfer-pulse destruction probability that lands the four-cycle buffer
/// protocol at ~99.9% discrimination fidelity.
pub const DEFAULT_TRANSFER_ERROR: f64 = 5.0e-4;

/// Readout windows span ten mean photon gaps; fidelity has saturated by then.
pub const WINDOW_GAPS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitState {
    Bright,
    Dark,
}

/// Parameters of the readout channel.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReadoutConfig {
    /// Detected photon rate while the readout ion fluoresces, s⁻¹.
    pub detection_rate: f64,
    /// Detector background rate, s⁻¹.
    pub background_rate: f64,
    /// Interaction shift in units of the readout linewidth; must exceed ~1
    /// for blockade discrimination to be meaningful at all.
    pub shift_over_decay: f64,
    /// Dark-state qubit lifetime in units of 1/detection_rate (∞ permitted).
    pub qubit_lifetime_ratio: f64,
    /// Probability per qubit→buffer transfer pulse that the stored state is
    /// destroyed (replaced by a coin flip).
    pub transfer_error: f64,
    /// Prior probability of the bright state.
    pub prior_bright: f64,
    /// Fraction of the bright rate leaking through an imperfect blockade.
    pub dark_leakage: f64,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        ReadoutConfig {
            detection_rate: 1e6,
            background_rate: 0.0,
            shift_over_decay: 5.0,
            qubit_lifetime_ratio: 1e4,
            transfer_error: DEFAULT_TRANSFER_ERROR,
            prior_bright: 0.5,
            dark_leakage: 0.0,
        }
    }
}

impl ReadoutConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.detection_rate > 0.0) {
            return Err(Error::domain("detection rate must be positive"));
        }
        if !(self.background_rate >= 0.0) {
            return Err(Error::domain("background rate must be non-negative"));
        }
        if !(self.shift_over_decay > 0.0) || !(self.qubit_lifetime_ratio > 0.0) {
            return Err(Error::domain("ratios must be positive"));
        }
        if !(0.0..=1.0).contains(&self.transfer_error) {
            return Err(Error::domain("transfer error must be in [0, 1]"));
        }
        if !(self.prior_bright > 0.0 && self.prior_bright < 1.0) {
            return Err(Error::domain("prior must be in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.dark_leakage) {
            return Err(Error::domain("dark leakage must be in [0, 1]"));
        }
        Ok(())
    }

    /// Dark→bright flip rate of the blockading qubit, s⁻¹.
    pub fn decay_rate(&self) -> f64 {
        if self.qubit_lifetime_ratio.is_infinite() {
            0.0
        } else {
            self.detection_rate / self.qubit_lifetime_ratio
        }
    }

    /// Detected rate while the trace is bright.
    pub fn bright_rate(&self) -> f64 {
        self.detection_rate + self.background_rate
    }

    /// Detected rate while the trace is dark (background plus any blockade
    /// leakage).
    pub fn dark_rate(&self) -> f64 {
        self.background_rate + self.dark_leakage * self.detection_rate
    }

    /// Whether the interaction shift is large enough for discrimination by
    /// photon counting to make sense.
    pub fn shift_regime_ok(&self) -> bool {
        self.shift_over_decay > 1.0
    }

    /// Default readout window: ten mean photon gaps.
    pub fn window_s(&self) -> f64 {
        WINDOW_GAPS / self.detection_rate
    }
}

/// Timestamped detection record for one readout window, with the hidden
/// truth needed for scoring.
#[derive(Debug, Clone, Serialize)]
pub struct ReadoutTrace {
    pub duration_s: f64,
    pub timestamps_s: Vec<f64>,
    pub true_initial_state: QubitState,
    /// When the dark qubit decayed and the trace turned bright, if it did.
    pub decay_time_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscriminationResult {
    pub decided_state: QubitState,
    pub posterior_bright: f64,
    pub correct: bool,
}

/// Simulates one readout window. Deterministic given `seed`.
pub fn simulate_trace(
    config: &ReadoutConfig,
    true_state: QubitState,
    duration_s: f64,
    seed: u64,
) -> Result<ReadoutTrace> {
    config.validate()?;
    if !(duration_s >= 0.0) {
        return Err(Error::domain("duration must be non-negative"));
    }
    let mut rng = trial_rng(seed, 0);
    Ok(simulate_trace_with(config, true_state, duration_s, &mut rng))
}

fn poisson_times(rng: &mut ChaCha8Rng, rate: f64, from: f64, to: f64, out: &mut Vec<f64>) {
    if rate <= 0.0 || to <= from {
        return;
    }
    let gap = Exp::new(rate).expect("positive rate");
    let mut t = from + gap.sample(rng);
    while t < to {
        out.push(t);
        t += gap.sample(rng);
    }
}

pub(crate) fn simulate_trace_with(
    config: &ReadoutConfig,
    true_state: QubitState,
    duration_s: f64,
    rng: &mut ChaCha8Rng,
) -> ReadoutTrace {
    let mut timestamps = Vec::new();
    let mut decay_time = None;
    match true_state {
        QubitState::Bright => {
            poisson_times(rng, config.bright_rate(), 0.0, duration_s, &mut timestamps);
        }
        QubitState::Dark => {
            let lambda = config.decay_rate();
            let decay = if lambda > 0.0 {
                Exp::new(lambda).expect("positive rate").sample(rng)
            } else {
                f64::INFINITY
            };
            let flip = decay.min(duration_s);
            poisson_times(rng, config.dark_rate(), 0.0, flip, &mut timestamps);
            if decay < duration_s {
                decay_time = Some(decay);
                poisson_times(rng, config.bright_rate(), decay, duration_s, &mut timestamps);
            }
        }
    }
    ReadoutTrace {
        duration_s,
        timestamps_s: timestamps,
        true_initial_state: true_state,
        decay_time_s: decay_time,
    }
}

fn logsumexp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// log ∫ over one inter-photon interval of e^(−c·τ) dτ, stable for any sign
/// of `c`.
fn log_interval_integral(a: f64, b: f64, c: f64) -> f64 {
    let span = b - a;
    debug_assert!(span >= 0.0);
    if span == 0.0 {
        return f64::NEG_INFINITY;
    }
    if c.abs() * span < 1e-12 {
        // ∫ ≈ span · e^(−c·midpoint)
        return span.ln() - c * 0.5 * (a + b);
    }
    if c > 0.0 {
        -c * a + (-(-c * span).exp_m1()).ln() - c.ln()
    } else {
        -c * b + (-(c * span).exp_m1()).ln() - (-c).ln()
    }
}

/// Log-likelihoods of the timestamp record under the bright and dark
/// hypotheses. The dark likelihood marginalizes the decay time analytically,
/// interval by interval between photons.
pub(crate) fn log_likelihoods(
    timestamps: &[f64],
    duration_s: f64,
    config: &ReadoutConfig,
) -> (f64, f64) {
    let rb = config.bright_rate();
    let rd = config.dark_rate();
    let lambda = config.decay_rate();
    let n = timestamps.len();

    // Bright: constant rate rb over the whole window.
    let log_bright = if n > 0 && rb <= 0.0 {
        f64::NEG_INFINITY
    } else {
        let mut l = -rb * duration_s;
        if n > 0 {
            l += n as f64 * rb.ln();
        }
        l
    };

    // Dark, no decay inside the window: rate rd throughout.
    let mut terms = Vec::with_capacity(n + 2);
    if n == 0 || rd > 0.0 {
        let mut l = -lambda * duration_s - rd * duration_s;
        if n > 0 {
            l += n as f64 * rd.ln();
        }
        terms.push(l);
    }

    // Dark with decay at τ in the interval (t_k, t_{k+1}): k photons at rate
    // rd before τ, the rest at rate rb after.
    if lambda > 0.0 {
        for k in 0..=n {
            if (k > 0 && rd <= 0.0) || (n - k > 0 && rb <= 0.0) {
                continue;
            }
            let a = if k == 0 { 0.0 } else { timestamps[k - 1] };
            let b = if k == n { duration_s } else { timestamps[k] };
            if b <= a {
                continue;
            }
            let mut base = lambda.ln() - rb * duration_s;
            if k > 0 {
                base += k as f64 * rd.ln();
            }
            if n - k > 0 {
                base += (n - k) as f64 * rb.ln();
            }
            let c = lambda + rd - rb;
            terms.push(base + log_interval_integral(a, b, c));
        }
    }

    let log_dark = if terms.is_empty() {
        f64::NEG_INFINITY
    } else {
        logsumexp(&terms)
    };
    (log_bright, log_dark)
}

/// Exact Bayesian discrimination between the bright and dark hypotheses on a
/// full timestamp record. Ties decide dark.
pub fn bayes_discriminate(trace: &ReadoutTrace, config: &ReadoutConfig) -> DiscriminationResult {
    let (log_b, log_d) = log_likelihoods(&trace.timestamps_s, trace.duration_s, config);
    let posterior = posterior_bright(log_b, log_d, config.prior_bright);
    let decided = if posterior > 0.5 {
        QubitState::Bright
    } else {
        QubitState::Dark
    };
    DiscriminationResult {
        decided_state: decided,
        posterior_bright: posterior,
        correct: decided == trace.true_initial_state,
    }
}

pub(crate) fn posterior_bright(log_b: f64, log_d: f64, prior_bright: f64) -> f64 {
    let lp_b = prior_bright.ln() + log_b;
    let lp_d = (1.0 - prior_bright).ln() + log_d;
    if lp_b.is_infinite() && lp_d.is_infinite() {
        return prior_bright; // no evidence either way
    }
    1.0 / (1.0 + (lp_d - lp_b).exp())
}

/// One point of a readout fidelity curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FidelityPoint {
    pub duration_s: f64,
    pub fidelity: f64,
    pub stderr: f64,
    pub trials: u64,
}

fn binomial_stderr(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Monte Carlo discrimination fidelity over equal-prior true states, one
/// point per duration. Deterministic given `seed` at any parallelism.
pub fn fidelity_curve(
    config: &ReadoutConfig,
    durations_s: &[f64],
    trials: u64,
    seed: u64,
    parallelism: usize,
) -> Result<Vec<FidelityPoint>> {
    config.validate()?;
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let mut points = Vec::with_capacity(durations_s.len());
    for (di, &duration) in durations_s.iter().enumerate() {
        if !(duration >= 0.0) {
            return Err(Error::domain("durations must be non-negative"));
        }
        let correct: Vec<u64> = map_trials(trials, parallelism, |k| {
            let base = 2 * (di as u64 * trials + k);
            let mut rng_state = trial_rng(seed, base);
            let mut rng_trace = trial_rng(seed, base + 1);
            let state = draw_state(&mut rng_state, config.prior_bright);
            let trace = simulate_trace_with(config, state, duration, &mut rng_trace);
            bayes_discriminate(&trace, config).correct as u64
        });
        let hits: u64 = correct.iter().sum();
        let fidelity = hits as f64 / trials as f64;
        points.push(FidelityPoint {
            duration_s: duration,
            fidelity,
            stderr: binomial_stderr(fidelity, trials),
            trials,
        });
    }
    Ok(points)
}

fn draw_state(rng: &mut ChaCha8Rng, prior_bright: f64) -> QubitState {
    if rng.random::<f64>() < prior_bright {
        QubitState::Bright
    } else {
        QubitState::Dark
    }
}

/// Outcome of the buffer-ion readout protocol.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BufferOutcome {
    pub fidelity: f64,
    pub stderr: f64,
    pub total_duration_s: f64,
    pub cycles: u32,
    pub trials: u64,
}

/// Buffer-ion readout: each cycle transfers the qubit's classical state to a
/// dedicated buffer ion (a transfer pulse destroys the stored state with
/// probability `transfer_error`) and reads a fresh window on the buffer, so
/// buffer decay only corrupts that one window. Windows are fused by summing
/// log-likelihoods; the decision is scored against the original state.
pub fn buffer_protocol(
    config: &ReadoutConfig,
    cycles: u32,
    seed: u64,
    trials: u64,
    parallelism: usize,
) -> Result<BufferOutcome> {
    config.validate()?;
    if cycles == 0 {
        return Err(Error::domain("at least one cycle is required"));
    }
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let window = config.window_s();
    let correct: Vec<u64> = map_trials(trials, parallelism, |k| {
        let mut rng_state = trial_rng(seed, 2 * k);
        let mut rng_trace = trial_rng(seed, 2 * k + 1);
        let original = draw_state(&mut rng_state, config.prior_bright);
        let mut stored = original;
        let (mut log_b, mut log_d) = (0.0, 0.0);
        for _ in 0..cycles {
            if rng_state.random::<f64>() < config.transfer_error {
                // Decay during the transfer pulse randomizes the stored state.
                stored = if rng_state.random::<f64>() < 0.5 {
                    QubitState::Bright
                } else {
                    QubitState::Dark
                };
            }
            let trace = simulate_trace_with(config, stored, window, &mut rng_trace);
            let (lb, ld) = log_likelihoods(&trace.timestamps_s, window, config);
            log_b += lb;
            log_d += ld;
        }
        let posterior = posterior_bright(log_b, log_d, config.prior_bright);
        let decided = if posterior > 0.5 {
            QubitState::Bright
        } else {
            QubitState::Dark
        };
        (decided == original) as u64
    });
    let hits: u64 = correct.iter().sum();
    let fidelity = hits as f64 / trials as f64;
    Ok(BufferOutcome {
        fidelity,
        stderr: binomial_stderr(fidelity, trials),
        total_duration_s: cycles as f64 * window,
        cycles,
        trials,
    })
}

/// Renders fidelity points as the CSV interface:
/// `duration_us,fidelity,stderr,trials`.
pub fn fidelity_csv(points: &[FidelityPoint]) -> String {
    let mut out = String::from("duration_us,fidelity,stderr,trials\n");
    for p in points {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{}\n",
            p.duration_s * 1e6,
            p.fidelity,
            p.stderr,
            p.trials
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_decay(config: &ReadoutConfig) -> ReadoutConfig {
        ReadoutConfig {
            qubit_lifetime_ratio: f64::INFINITY,
            ..*config
        }
    }

    #[test]
    fn trace_determinism() {
        let cfg = ReadoutConfig::default();
        let a = simulate_trace(&cfg, QubitState::Bright, 1e-5, 3).unwrap();
        let b = simulate_trace(&cfg, QubitState::Bright, 1e-5, 3).unwrap();
        assert_eq!(a.timestamps_s, b.timestamps_s);
        let c = simulate_trace(&cfg, QubitState::Bright, 1e-5, 4).unwrap();
        assert_ne!(a.timestamps_s, c.timestamps_s);
    }

    #[test]
    fn dark_without_decay_is_silent() {
        let cfg = no_decay(&ReadoutConfig::default());
        for seed in 0..50 {
            let t = simulate_trace(&cfg, QubitState::Dark, 1e-4, seed).unwrap();
            assert!(t.timestamps_s.is_empty());
            assert!(t.decay_time_s.is_none());
        }
    }

    #[test]
    fn bright_counts_match_poisson_mean() {
        let cfg = ReadoutConfig::default();
        let duration = 10.0 / cfg.detection_rate;
        let trials = 10_000u64;
        let total: usize = (0..trials)
            .map(|s| {
                simulate_trace(&cfg, QubitState::Bright, duration, s)
                    .unwrap()
                    .timestamps_s
                    .len()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        let sigma = (10.0 / trials as f64).sqrt();
        assert!((mean - 10.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn timestamps_sorted_and_bounded() {
        let cfg = ReadoutConfig {
            background_rate: 2e4,
            ..ReadoutConfig::default()
        };
        for seed in 0..20 {
            for state in [QubitState::Bright, QubitState::Dark] {
                let t = simulate_trace(&cfg, state, 2e-5, seed).unwrap();
                for w in t.timestamps_s.windows(2) {
                    assert!(w[0] <= w[1]);
                }
                assert!(t.timestamps_s.iter().all(|&x| (0.0..=2e-5).contains(&x)));
            }
        }
    }

    #[test]
    fn empty_trace_decides_dark_with_tiny_posterior() {
        let cfg = ReadoutConfig::default();
        let trace = ReadoutTrace {
            duration_s: 10.0 / cfg.detection_rate,
            timestamps_s: vec![],
            true_initial_state: QubitState::Dark,
            decay_time_s: None,
        };
        let r = bayes_discriminate(&trace, &cfg);
        assert_eq!(r.decided_state, QubitState::Dark);
        assert!(r.posterior_bright < 1e-3, "posterior {}", r.posterior_bright);
        // Closed form: L_bright = e^(−10); L_dark ≈ 1 up to the tiny decay mass.
        let expected = 1.0 / (1.0 + (10.0f64).exp() * 0.999_something());
        assert!((r.posterior_bright - expected).abs() < 1e-6);
    }

    fn zero() {}

    #[test]
    fn any_photon_with_decay_disabled_is_certainly_bright() {
        let cfg = no_decay(&ReadoutConfig::default());
        let trace = ReadoutTrace {
            duration_s: 1e-5,
            timestamps_s: vec![3e-6],
            true_initial_state: QubitState::Bright,
            decay_time_s: None,
        };
        let r = bayes_discriminate(&trace, &cfg);
        assert_eq!(r.decided_state, QubitState::Bright);
        assert_eq!(r.posterior_bright, 1.0);
    }

    #[test]
    fn zero_duration_ties_to_dark() {
        let cfg = ReadoutConfig::default();
        let trace = ReadoutTrace {
            duration_s: 0.0,
            timestamps_s: vec![],
            true_initial_state: QubitState::Bright,
            decay_time_s: None,
        };
        let r = bayes_discriminate(&trace, &cfg);
        assert_eq!(r.posterior_bright, 0.5);
        assert_eq!(r.decided_state, QubitState::Dark);
    }

    #[test]
    fn analytic_fidelity_without_decay() {
        // With no background and no decay, fidelity(T) = 1 − e^(−RT)/2.
        let cfg = no_decay(&ReadoutConfig::default());
        let durations = [1.0 / cfg.detection_rate, 3.0 / cfg.detection_rate];
        let trials = 40_000;
        let points = fidelity_curve(&cfg, &durations, trials, 99, 0).unwrap();
        for (p, gaps) in points.iter().zip([1.0f64, 3.0]) {
            let expected = 1.0 - 0.5 * (-gaps).exp();
            assert!(
                (p.fidelity - expected).abs() < 3.0 * binomial_stderr(expected, trials),
                "duration {gaps}/R: {} vs {expected}",
                p.fidelity
            );
        }
    }

    #[test]
    fn fidelity_limits() {
        let cfg = ReadoutConfig::default();
        // Zero duration: no information, fidelity 1/2 exactly (all decide dark).
        let p = fidelity_curve(&cfg, &[0.0], 20_000, 5, 0).unwrap();
        assert!((p[0].fidelity - 0.5).abs() < 3.0 * p[0].stderr + 0.01);
        // No decay channel, long window: fidelity → 1.
        let p = fidelity_curve(&no_decay(&cfg), &[30.0 / cfg.detection_rate], 20_000, 5, 0)
            .unwrap();
        assert!(p[0].fidelity > 0.999, "got {}", p[0].fidelity);
    }

    #[test]
    fn fidelity_curve_is_monotone_to_saturation() {
        let cfg = ReadoutConfig::default();
        let r = cfg.detection_rate;
        let durations: Vec<f64> = [0.5, 1.0, 2.0, 5.0, 10.0].iter().map(|g| g / r).collect();
        let points = fidelity_curve(&cfg, &durations, 30_000, 17, 0).unwrap();
        for w in points.windows(2) {
            assert!(
                w[1].fidelity >= w[0].fidelity - 3.0 * (w[0].stderr + w[1].stderr),
                "non-monotone: {} then {}",
                w[0].fidelity,
                w[1].fidelity
            );
        }
    }

    #[test]
    fn fidelity_invariant_under_rate_rescaling() {
        // Only dimensionless products matter: (R, T, lifetime) → (cR, T/c, l/c).
        let base = ReadoutConfig {
            background_rate: 5e4,
            ..ReadoutConfig::default()
        };
        let c = 7.3;
        let scaled = ReadoutConfig {
            detection_rate: base.detection_rate * c,
            background_rate: base.background_rate * c,
            ..base
        };
        let trials = 60_000;
        let d = 6.0 / base.detection_rate;
        let f1 = fidelity_curve(&base, &[d], trials, 31, 0).unwrap()[0];
        let f2 = fidelity_curve(&scaled, &[d / c], trials, 31, 0).unwrap()[0];
        let tol = 3.0 * (f1.stderr + f2.stderr);
        assert!(
            (f1.fidelity - f2.fidelity).abs() < tol,
            "{} vs {}",
            f1.fidelity,
            f2.fidelity
        );
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let cfg = ReadoutConfig::default();
        let d = [10.0 / cfg.detection_rate];
        let seq = fidelity_curve(&cfg, &d, 2_000, 8, 1).unwrap();
        let par = fidelity_curve(&cfg, &d, 2_000, 8, 0).unwrap();
        assert_eq!(seq[0].fidelity, par[0].fidelity);
        let b_seq = buffer_protocol(&cfg, 4, 8, 2_000, 1).unwrap();
        let b_par = buffer_protocol(&cfg, 4, 8, 2_000, 4).unwrap();
        assert_eq!(b_seq.fidelity, b_par.fidelity);
    }

    #[test]
    fn buffer_single_cycle_reduces_to_fidelity_curve() {
        let cfg = ReadoutConfig {
            transfer_error: 0.0,
            ..ReadoutConfig::default()
        };
        let trials = 20_000;
        let window = cfg.window_s();
        let curve = fidelity_curve(&cfg, &[window], trials, 123, 0).unwrap();
        let buffer = buffer_protocol(&cfg, 1, 123, trials, 0).unwrap();
        assert_eq!(curve[0].fidelity, buffer.fidelity);
        assert_eq!(buffer.total_duration_s, window);
    }

    #[test]
    fn destructive_transfers_cap_fidelity() {
        // With transfer_error = 1/2 the first transfer destroys the stored
        // state half the time; enumerating outcomes for one cycle gives
        // fidelity = 1/4 + q/2 where q is the error-free window fidelity,
        // and no cycle count can beat 3/4.
        let cfg = ReadoutConfig {
            transfer_error: 0.5,
            ..ReadoutConfig::default()
        };
        let trials = 40_000;
        let q = buffer_protocol(
            &ReadoutConfig {
                transfer_error: 0.0,
                ..cfg
            },
            1,
            7,
            trials,
            0,
        )
        .unwrap()
        .fidelity;
        let one = buffer_protocol(&cfg, 1, 7, trials, 0).unwrap();
        let expected = 0.25 + 0.5 * q;
        assert!(
            (one.fidelity - expected).abs() < 4.0 * one.stderr,
            "{} vs enumerated {expected}",
            one.fidelity
        );
        for cycles in [2u32, 3, 5] {
            let out = buffer_protocol(&cfg, cycles, 11, trials, 0).unwrap();
            assert!(
                out.fidelity <= 0.75 + 3.0 * out.stderr,
                "cycles {cycles}: {}",
                out.fidelity
            );
        }
    }

    #[test]
    fn buffer_protocol_reaches_calibrated_anchor() {
        // Four 10-gap windows = 40 μs at the default rate; the calibrated
        // transfer error puts the fused fidelity at ~99.9%.
        let cfg = ReadoutConfig::default();
        let out = buffer_protocol(&cfg, 4, 2024, 100_000, 0).unwrap();
        assert!((out.total_duration_s - 40e-6).abs() < 1e-12);
        assert!(out.fidelity >= 0.9985, "fidelity {}", out.fidelity);
        assert!(out.fidelity <= 0.9999, "fidelity {}", out.fidelity);
    }

    #[test]
    fn csv_shape() {
        let points = [FidelityPoint {
            duration_s: 1e-5,
            fidelity: 0.954321,
            stderr: 0.001234,
            trials: 100,
        }];
        let csv = fidelity_csv(&points);
        assert_eq!(
            csv,
            "duration_us,fidelity,stderr,trials\n10.000000,0.954321,0.001234,100\n"
        );
    }

    #[test]
    fn config_validation() {
        let mut cfg = ReadoutConfig::default();
        cfg.detection_rate = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ReadoutConfig::default();
        cfg.prior_bright = 1.0;
        assert!(cfg.validate().is_err());
        assert!(ReadoutConfig::default().shift_regime_ok());
    }
}
