//! Closed-form cavity QED calculators: Purcell enhancement, emission
//! statistics, and photon-detection budget chains.
//!
//! Everything here is a pure function of its arguments. Times are in
//! seconds and rates in Hz; mode volumes are in `(λ/n)³` units, the
//! convention in which microcavity values are quoted.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Optical cavity description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CavityParams {
    pub quality_factor: f64,
    /// Mode volume in units of (λ/n)³.
    pub mode_volume: f64,
    /// Branching ratio ζ of the cavity-coupled transition, in (0, 1].
    pub branching_ratio: f64,
    /// Outcoupling ratio η = κ_x/κ, in [0, 1].
    pub outcoupling_ratio: f64,
    /// Vacuum wavelength in meters (informational).
    pub wavelength_m: f64,
}

impl CavityParams {
    pub fn new(
        quality_factor: f64,
        mode_volume: f64,
        branching_ratio: f64,
        outcoupling_ratio: f64,
        wavelength_m: f64,
    ) -> Result<Self> {
        let p = CavityParams {
            quality_factor,
            mode_volume,
            branching_ratio,
            outcoupling_ratio,
            wavelength_m,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.quality_factor > 0.0) || !(self.mode_volume > 0.0) {
            return Err(Error::domain(
                "quality factor and mode volume must be positive",
            ));
        }
        if !(self.branching_ratio > 0.0 && self.branching_ratio <= 1.0) {
            return Err(Error::domain("branching ratio must be in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.outcoupling_ratio) {
            return Err(Error::domain("outcoupling ratio must be in [0, 1]"));
        }
        if !(self.wavelength_m > 0.0) {
            return Err(Error::domain("wavelength must be positive"));
        }
        Ok(())
    }

    /// Converts an absolute mode volume in m³ to (λ/n)³ units.
    pub fn mode_volume_from_absolute(
        volume_m3: f64,
        wavelength_m: f64,
        refractive_index: f64,
    ) -> f64 {
        volume_m3 / (wavelength_m / refractive_index).powi(3)
    }
}

/// Emitter lifetime and dephasing. `pure_dephasing_s` may be infinite, which
/// makes the lifetime-limited case exact.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EmitterParams {
    /// Excited-state lifetime T₁ in seconds.
    pub lifetime_s: f64,
    /// Pure dephasing time T₂* in seconds (∞ permitted).
    pub pure_dephasing_s: f64,
}

impl EmitterParams {
    pub fn new(lifetime_s: f64, pure_dephasing_s: f64) -> Result<Self> {
        if !(lifetime_s > 0.0) || !(pure_dephasing_s > 0.0) {
            return Err(Error::domain("T1 and T2* must be positive"));
        }
        Ok(EmitterParams {
            lifetime_s,
            pure_dephasing_s,
        })
    }

    /// Free-space emission rate γ₀ = 1/T₁.
    pub fn free_space_rate(&self) -> f64 {
        1.0 / self.lifetime_s
    }

    /// Homogeneous linewidth Γ_h = 1/(π T₂) in Hz.
    pub fn homogeneous_linewidth_hz(&self) -> Result<f64> {
        Ok(1.0 / (PI * total_dephasing(self)?))
    }
}

/// One labeled efficiency stage of a detection chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    pub efficiency: f64,
}

impl Stage {
    pub fn new(label: impl Into<String>, efficiency: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::domain("stage efficiency must be in [0, 1]"));
        }
        Ok(Stage {
            label: label.into(),
            efficiency,
        })
    }
}

/// A photon source rate followed by an ordered chain of loss stages.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BudgetChain {
    pub source_rate: f64,
    pub stages: Vec<Stage>,
}

impl BudgetChain {
    pub fn new(source_rate: f64, stages: Vec<Stage>) -> Result<Self> {
        if !(source_rate >= 0.0) {
            return Err(Error::domain("source rate must be non-negative"));
        }
        Ok(BudgetChain {
            source_rate,
            stages,
        })
    }
}

/// Emission-rate enhancement excluding the branching ratio: (3/4π²)·Q/V.
pub fn ideal_purcell(cavity: &CavityParams) -> Result<f64> {
    if !(cavity.quality_factor > 0.0) || !(cavity.mode_volume > 0.0) {
        return Err(Error::domain(
            "quality factor and mode volume must be positive",
        ));
    }
    Ok(3.0 / (4.0 * PI * PI) * cavity.quality_factor / cavity.mode_volume)
}

/// Lifetime-reduction factor F_p = ζ · (3/4π²)·Q/V.
pub fn effective_purcell(cavity: &CavityParams) -> Result<f64> {
    if !(cavity.branching_ratio > 0.0 && cavity.branching_ratio <= 1.0) {
        return Err(Error::domain("branching ratio must be in (0, 1]"));
    }
    Ok(cavity.branching_ratio * ideal_purcell(cavity)?)
}

/// Cavity-enhanced emission rate γ = (F_p + 1)·γ₀ in s⁻¹.
pub fn enhanced_rate(f_p: f64, emitter: &EmitterParams) -> Result<f64> {
    if !(f_p >= 0.0) {
        return Err(Error::domain("Purcell factor must be non-negative"));
    }
    Ok((f_p + 1.0) / emitter.lifetime_s)
}

/// Fraction of emission captured by the cavity mode: β = F_p/(F_p + 1).
pub fn beta_factor(f_p: f64) -> Result<f64> {
    if !(f_p >= 0.0) {
        return Err(Error::domain("Purcell factor must be non-negative"));
    }
    Ok(f_p / (f_p + 1.0))
}

/// Total coherence time from 1/T₂ = 1/2T₁ + 1/T₂*; always ≤ 2T₁.
pub fn total_dephasing(emitter: &EmitterParams) -> Result<f64> {
    if !(emitter.lifetime_s > 0.0) || !(emitter.pure_dephasing_s > 0.0) {
        return Err(Error::domain("T1 and T2* must be positive"));
    }
    Ok(1.0 / (0.5 / emitter.lifetime_s + 1.0 / emitter.pure_dephasing_s))
}

/// Indistinguishability ε = T₂ / 2T₁_eff. Pass the free-space T₁ for ε⁰ or
/// T₁/(F_p+1) for the cavity value ε^c.
pub fn indistinguishability(t2_s: f64, t1_effective_s: f64) -> Result<f64> {
    if !(t2_s > 0.0) || !(t1_effective_s > 0.0) {
        return Err(Error::domain("T2 and effective T1 must be positive"));
    }
    Ok(t2_s / (2.0 * t1_effective_s))
}

/// Cooperativity C = ε⁰·F_p/2.
pub fn cooperativity(epsilon0: f64, f_p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon0) {
        return Err(Error::domain("indistinguishability must be in [0, 1]"));
    }
    if !(f_p >= 0.0) {
        return Err(Error::domain("Purcell factor must be non-negative"));
    }
    Ok(epsilon0 * f_p / 2.0)
}

/// Fourier-limited emission requires C > 2π·T₁·γ_h (strict).
pub fn fourier_limit_check(
    cooperativity: f64,
    t1_s: f64,
    homogeneous_linewidth_hz: f64,
) -> Result<bool> {
    if !(cooperativity > 0.0) || !(t1_s > 0.0) || !(homogeneous_linewidth_hz > 0.0) {
        return Err(Error::domain(
            "cooperativity, T1 and linewidth must be positive",
        ));
    }
    Ok(cooperativity > 2.0 * PI * t1_s * homogeneous_linewidth_hz)
}

/// Detected rate after every stage: source × ∏ efficiencies.
pub fn photon_budget(chain: &BudgetChain) -> f64 {
    chain
        .stages
        .iter()
        .fold(chain.source_rate, |rate, s| rate * s.efficiency)
}
