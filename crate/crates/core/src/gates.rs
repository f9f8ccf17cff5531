//! Analytic gate-error budgets and feasibility checks: decoherence during
//! pulses, blockade-CNOT pulse accounting, bandwidth/crosstalk limits, and
//! the interaction-shift → two-qubit-error map.
//!
//! Crosstalk terms are anchored constants or search-derived inputs; pulse
//! shapes themselves are out of scope.

use serde::{Deserialize, Serialize};

use crate::crystal::HostMaterial;
use crate::error::{Error, Result};
use crate::Flagged;

/// Default ratio between the internal level spacing and the largest pulse
/// bandwidth that keeps internal crosstalk subdominant.
pub const DEFAULT_BANDWIDTH_DIVISOR: f64 = 10.0;

/// Default time-bandwidth floor for a realizable pulse.
pub const DEFAULT_TIME_BANDWIDTH_FLOOR: f64 = 0.5;

/// Fidelity error from optical decoherence over `excited_time`:
/// 1 − exp(−t/T₂), ≈ t/T₂ for short pulses.
pub fn decoherence_error(excited_time_s: f64, t2_optical_s: f64) -> Result<f64> {
    if !(t2_optical_s > 0.0) {
        return Err(Error::domain("optical T2 must be positive"));
    }
    if !(excited_time_s >= 0.0) {
        return Err(Error::domain("excited time must be non-negative"));
    }
    Ok(-(-excited_time_s / t2_optical_s).exp_m1())
}

/// Combined blockade-CNOT error from the 4-pulse sequence: the control ion
/// spends three single-gate durations in the excited state and the target
/// one, so the total is 1 − (1−e)⁴ ≈ 4e. Flagged beyond e = 0.25 where the
/// small-error accounting loses meaning.
pub fn cnot_error(single_gate_error: f64) -> Result<Flagged> {
    if !(0.0..=1.0).contains(&single_gate_error) {
        return Err(Error::domain("single-gate error must be in [0, 1]"));
    }
    Ok(Flagged {
        value: 1.0 - (1.0 - single_gate_error).powi(4),
        beyond_validity: single_gate_error > 0.25,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandwidthCheck {
    pub internal_ok: bool,
    /// level_spacing / bandwidth.
    pub margin: f64,
}

/// Checks a pulse bandwidth against the host's internal level spacing with
/// the default safety divisor.
pub fn bandwidth_feasible(bandwidth_mhz: f64, host: &HostMaterial) -> Result<BandwidthCheck> {
    bandwidth_feasible_with(bandwidth_mhz, host, DEFAULT_BANDWIDTH_DIVISOR)
}

pub fn bandwidth_feasible_with(
    bandwidth_mhz: f64,
    host: &HostMaterial,
    divisor: f64,
) -> Result<BandwidthCheck> {
    if !(bandwidth_mhz > 0.0) || !(divisor > 0.0) {
        return Err(Error::domain("bandwidth and divisor must be positive"));
    }
    Ok(BandwidthCheck {
        internal_ok: bandwidth_mhz <= host.level_spacing_mhz / divisor,
        margin: host.level_spacing_mhz / bandwidth_mhz,
    })
}

/// Inverse-proportional map from interaction shift to two-qubit error,
/// error(Δ) = a/Δ, with `a` the least-squares fit to the anchors in log-log
/// space (the geometric mean of error·shift).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShiftErrorModel {
    anchors: Vec<(f64, f64)>,
    coefficient_mhz: f64,
}

impl ShiftErrorModel {
    /// Anchor points as (shift MHz, two-qubit error).
    pub fn fit(anchors: &[(f64, f64)]) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::domain("at least one anchor is required"));
        }
        for &(shift, err) in anchors {
            if !(shift > 0.0) || !(err > 0.0) {
                return Err(Error::domain("anchors must have positive shift and error"));
            }
        }
        let log_mean = anchors
            .iter()
            .map(|(s, e)| (s * e).ln())
            .sum::<f64>()
            / anchors.len() as f64;
        Ok(ShiftErrorModel {
            anchors: anchors.to_vec(),
            coefficient_mhz: log_mean.exp(),
        })
    }

    pub fn coefficient_mhz(&self) -> f64 {
        self.coefficient_mhz
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }
}

impl Default for ShiftErrorModel {
    /// Anchors: 10 MHz → 2e-3 and 2.5 MHz → 1e-2.
    fn default() -> Self {
        ShiftErrorModel::fit(&[(10.0, 2e-3), (2.5, 1e-2)]).expect("valid anchors")
    }
}

/// Two-qubit error expected at the given shift, clamped to [0, 1].
pub fn shift_to_error(model: &ShiftErrorModel, shift_mhz: f64) -> Result<f64> {
    if !(shift_mhz > 0.0) {
        return Err(Error::domain("shift must be positive"));
    }
    Ok((model.coefficient_mhz / shift_mhz).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Single,
    TwoQubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseRegime {
    /// Inhomogeneous ensembles need extra phase-compensation pulses.
    Ensemble,
    SingleIon,
}

/// Number of bichromatic pulses in a dark-state gate.
pub fn dark_state_pulse_count(gate: GateKind, regime: PulseRegime) -> u32 {
    match (gate, regime) {
        (GateKind::Single, PulseRegime::Ensemble) => 4,
        (GateKind::TwoQubit, PulseRegime::Ensemble) => 12,
        (GateKind::Single, PulseRegime::SingleIon) => 2,
        (GateKind::TwoQubit, PulseRegime::SingleIon) => 4,
    }
}

/// Multiplicative-survival composition: 1 − ∏(1−eᵢ). Identical to summation
/// at leading order but stays in [0, 1].
pub fn compose_budget(components: &[f64]) -> Result<f64> {
    let mut survival = 1.0;
    for &e in components {
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::domain("error terms must be in [0, 1]"));
        }
        survival *= 1.0 - e;
    }
    Ok(1.0 - survival)
}

/// Per-gate error decomposition over the four tracked sources.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FidelityBudget {
    pub decoherence: f64,
    pub internal_crosstalk: f64,
    pub external_crosstalk: f64,
    pub blockade_leakage: f64,
}

impl FidelityBudget {
    pub fn new(
        decoherence: f64,
        internal_crosstalk: f64,
        external_crosstalk: f64,
        blockade_leakage: f64,
    ) -> Result<Self> {
        let b = FidelityBudget {
            decoherence,
            internal_crosstalk,
            external_crosstalk,
            blockade_leakage,
        };
        compose_budget(&b.components().map(|(_, e)| e))?;
        Ok(b)
    }

    pub fn components(&self) -> [(&'static str, f64); 4] {
        [
            ("decoherence", self.decoherence),
            ("internal_crosstalk", self.internal_crosstalk),
            ("external_crosstalk", self.external_crosstalk),
            ("blockade_leakage", self.blockade_leakage),
        ]
    }

    pub fn total(&self) -> f64 {
        compose_budget(&self.components().map(|(_, e)| e)).expect("validated at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseRole {
    ExciteControl,
    DeexciteControl,
    QubitRotation1,
    QubitRotation2,
}

/// One gate pulse; construction enforces the time-bandwidth floor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GatePulse {
    pub duration_s: f64,
    pub bandwidth_mhz: f64,
    pub role: PulseRole,
}

impl GatePulse {
    pub fn new(duration_s: f64, bandwidth_mhz: f64, role: PulseRole) -> Result<Self> {
        GatePulse::with_floor(duration_s, bandwidth_mhz, role, DEFAULT_TIME_BANDWIDTH_FLOOR)
    }

    pub fn with_floor(
        duration_s: f64,
        bandwidth_mhz: f64,
        role: PulseRole,
        floor: f64,
    ) -> Result<Self> {
        if !(duration_s > 0.0) || !(bandwidth_mhz > 0.0) {
            return Err(Error::domain("duration and bandwidth must be positive"));
        }
        let product = duration_s * bandwidth_mhz * 1e6;
        if product < floor {
            return Err(Error::domain(format!(
                "time-bandwidth product {product:.3} below floor {floor}"
            )));
        }
        Ok(GatePulse {
            duration_s,
            bandwidth_mhz,
            role,
        })
    }
}

/// The blockade-CNOT pulse train: excite control, two rotation pulses on the
/// target, deexcite control.
pub fn cnot_pulse_sequence(pulse_duration_s: f64, bandwidth_mhz: f64) -> Result<[GatePulse; 4]> {
    Ok([
        GatePulse::new(pulse_duration_s, bandwidth_mhz, PulseRole::ExciteControl)?,
        GatePulse::new(pulse_duration_s, bandwidth_mhz, PulseRole::QubitRotation1)?,
        GatePulse::new(pulse_duration_s, bandwidth_mhz, PulseRole::QubitRotation2)?,
        GatePulse::new(pulse_duration_s, bandwidth_mhz, PulseRole::DeexciteControl)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decoherence_error_cases() {
        assert_eq!(decoherence_error(0.0, 1.5e-3).unwrap(), 0.0);
        // 0.3 μs over the 1.5 ms coherence time gives the 2e-4 anchor.
        let e = decoherence_error(0.3e-6, 1.5e-3).unwrap();
        assert!((e - 2e-4).abs() < 2e-8, "got {e}");
        let e = decoherence_error(1.5e-3, 1.5e-3).unwrap();
        assert!((e - (1.0 - 1.0f64.exp().recip())).abs() < 1e-12);
        assert!(decoherence_error(1.0, 0.0).is_err());
    }

    #[test]
    fn decoherence_small_time_slope() {
        // Central finite difference at t ≪ T2 reproduces the 1/T2 slope within 1%.
        let t2 = 1.5e-3;
        let t = 0.005 * t2;
        let h = 1e-4 * t2;
        let fd = (decoherence_error(t + h, t2).unwrap() - decoherence_error(t - h, t2).unwrap())
            / (2.0 * h);
        assert!((fd * t2 - 1.0).abs() < 0.01, "slope ratio {}", fd * t2);
    }

    #[test]
    fn cnot_error_cases() {
        let e = cnot_error(4e-4).unwrap();
        assert!((1.598e-3..=1.600e-3).contains(&e.value), "got {}", e.value);
        assert!(!e.beyond_validity);
        assert_eq!(cnot_error(0.0).unwrap().value, 0.0);
        let e = cnot_error(1e-2).unwrap();
        assert!((e.value - 3.9404e-2).abs() < 1e-6);
        assert!(cnot_error(0.3).unwrap().beyond_validity);
        assert!(cnot_error(1.1).is_err());
    }

    #[test]
    fn bandwidth_cases() {
        let host = HostMaterial::default();
        let ok = bandwidth_feasible(10.0, &host).unwrap();
        assert!(ok.internal_ok);
        assert!((ok.margin - 10.0).abs() < 1e-12);
        let bad = bandwidth_feasible(50.0, &host).unwrap();
        assert!(!bad.internal_ok);
        let tiny = bandwidth_feasible(1e-9, &host).unwrap();
        assert!(tiny.internal_ok);
        assert!(tiny.margin > 1e10);
    }

    #[test]
    fn shift_error_fit_and_anchors() {
        let model = ShiftErrorModel::default();
        // a = sqrt(0.02 · 0.025) ≈ 0.02236 MHz.
        assert!((model.coefficient_mhz() - 0.0223607).abs() < 1e-6);
        let at10 = shift_to_error(&model, 10.0).unwrap();
        let at2_5 = shift_to_error(&model, 2.5).unwrap();
        assert!((at10 - 2e-3).abs() / 2e-3 < 0.15, "anchor 10 MHz: {at10}");
        assert!((at2_5 - 1e-2).abs() / 1e-2 < 0.15, "anchor 2.5 MHz: {at2_5}");
        let at20 = shift_to_error(&model, 20.0).unwrap();
        assert!((at20 - 1.118e-3).abs() < 1e-6, "got {at20}");
        // Strictly decreasing, clamped at tiny shifts.
        assert!(at20 < at10 && at10 < at2_5);
        assert_eq!(shift_to_error(&model, 1e-9).unwrap(), 1.0);
        assert!(shift_to_error(&model, 0.0).is_err());
    }

    #[test]
    fn pulse_counts() {
        assert_eq!(dark_state_pulse_count(GateKind::Single, PulseRegime::SingleIon), 2);
        assert_eq!(dark_state_pulse_count(GateKind::TwoQubit, PulseRegime::SingleIon), 4);
        assert_eq!(dark_state_pulse_count(GateKind::Single, PulseRegime::Ensemble), 4);
        assert_eq!(dark_state_pulse_count(GateKind::TwoQubit, PulseRegime::Ensemble), 12);
    }

    #[test]
    fn compose_budget_cases() {
        assert_eq!(compose_budget(&[0.0]).unwrap(), 0.0);
        assert_eq!(compose_budget(&[2e-3]).unwrap(), 2e-3);
        let two = compose_budget(&[1e-3, 1e-3]).unwrap();
        assert!((two - 1.999e-3).abs() < 1e-12);
        assert!(compose_budget(&[1.5]).is_err());
    }

    #[test]
    fn budget_totals() {
        let b = FidelityBudget::new(2e-4, 1e-4, 3e-4, 5e-5).unwrap();
        let total = b.total();
        assert!(total >= 2e-4 && total < 7e-4);
        assert!(FidelityBudget::new(2.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn pulse_floor_enforced() {
        // 0.1 μs at 10 MHz gives product 1.0 ≥ 0.5.
        assert!(GatePulse::new(0.1e-6, 10.0, PulseRole::ExciteControl).is_ok());
        assert!(GatePulse::new(0.01e-6, 1.0, PulseRole::ExciteControl).is_err());
        let seq = cnot_pulse_sequence(0.1e-6, 10.0).unwrap();
        assert_eq!(seq.len(), 4);
        assert_eq!(seq[0].role, PulseRole::ExciteControl);
        assert_eq!(seq[3].role, PulseRole::DeexciteControl);
    }

    proptest! {
        #[test]
        fn decoherence_monotone_concave_bounded(t in 0.0f64..10.0, t2 in 0.1f64..10.0) {
            let e = decoherence_error(t, t2).unwrap();
            prop_assert!((0.0..1.0).contains(&e));
            let later = decoherence_error(t + 0.1, t2).unwrap();
            prop_assert!(later > e);
            // concavity: midpoint value above the chord
            let mid = decoherence_error(t + 0.05, t2).unwrap();
            prop_assert!(mid >= (e + later) / 2.0 - 1e-12);
        }

        #[test]
        fn cnot_error_binomial_bounds(e in 0.0f64..0.25) {
            let c = cnot_error(e).unwrap().value;
            prop_assert!(c <= 4.0 * e + 1e-15);
            prop_assert!(c >= 4.0 * e - 6.0 * e * e - 1e-15);
        }

        #[test]
        fn compose_budget_permutation_and_floor(
            a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0
        ) {
            let fwd = compose_budget(&[a, b, c]).unwrap();
            let rev = compose_budget(&[c, a, b]).unwrap();
            prop_assert!((fwd - rev).abs() < 1e-12);
            prop_assert!(fwd >= a.max(b).max(c) - 1e-12);
        }
    }
}
