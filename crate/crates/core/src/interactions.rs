//! Pairwise ion-ion interaction models: electric/magnetic dipole-dipole
//! frequency shifts, short-range energy-transfer exclusion, and
//! cavity-mediated gate infidelity scalings.
//!
//! Shifts are reported in MHz and separations in nm, the working units for
//! gate-bandwidth comparisons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Flagged;

/// Default dipole coupling constant in MHz·nm³, calibrated so that a pair at
/// 2 nm separation sees a 75 MHz shift (the top of the expected range).
pub const DEFAULT_COUPLING_MHZ_NM3: f64 = 600.0;

/// Default radius below which resonant energy transfer disqualifies an ion,
/// in nm.
pub const DEFAULT_EXCLUSION_RADIUS_NM: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipoleMode {
    /// |κ|/r³, orientation-independent.
    Isotropic,
    /// κ·(1 − 3cos²θ)/r³ with θ measured from the +z quantization axis.
    Angular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipoleKind {
    Electric,
    Magnetic,
}

/// Parametrized dipole-dipole shift model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DipoleModel {
    pub coupling_mhz_nm3: f64,
    pub mode: DipoleMode,
    pub kind: DipoleKind,
}

impl DipoleModel {
    pub fn new(coupling_mhz_nm3: f64, mode: DipoleMode, kind: DipoleKind) -> Result<Self> {
        if !(coupling_mhz_nm3 > 0.0) {
            return Err(Error::domain("dipole coupling must be positive"));
        }
        Ok(DipoleModel {
            coupling_mhz_nm3,
            mode,
            kind,
        })
    }

    pub fn electric() -> Self {
        DipoleModel {
            coupling_mhz_nm3: DEFAULT_COUPLING_MHZ_NM3,
            mode: DipoleMode::Isotropic,
            kind: DipoleKind::Electric,
        }
    }

    /// Magnetic interactions can be of similar strength to electric ones, so
    /// the default coupling is shared.
    pub fn magnetic() -> Self {
        DipoleModel {
            kind: DipoleKind::Magnetic,
            ..DipoleModel::electric()
        }
    }

    /// Largest separation at which a shift of at least `min_shift_mhz` is
    /// geometrically possible under this model.
    pub fn max_range_nm(&self, min_shift_mhz: f64) -> f64 {
        let amplification = match self.mode {
            DipoleMode::Isotropic => 1.0,
            DipoleMode::Angular => 2.0, // |1 − 3cos²θ| ≤ 2
        };
        (amplification * self.coupling_mhz_nm3 / min_shift_mhz).cbrt()
    }
}

impl Default for DipoleModel {
    fn default() -> Self {
        DipoleModel::electric()
    }
}

/// Frequency shift in MHz for the given displacement (nm). The sign is
/// retained in angular mode; isotropic shifts are always positive.
pub fn dipole_shift(model: &DipoleModel, displacement_nm: [f64; 3]) -> Result<f64> {
    let r2 = displacement_nm.iter().map(|c| c * c).sum::<f64>();
    if !(r2 > 0.0) {
        return Err(Error::domain("displacement must be non-zero"));
    }
    let r = r2.sqrt();
    let r3 = r2 * r;
    match model.mode {
        DipoleMode::Isotropic => Ok(model.coupling_mhz_nm3 / r3),
        DipoleMode::Angular => {
            let cos2 = (displacement_nm[2] / r).powi(2);
            Ok(model.coupling_mhz_nm3 * (1.0 - 3.0 * cos2) / r3)
        }
    }
}

/// True iff the pair is closer than the exclusion radius (strict), where the
/// 1/R⁶ energy-transfer channel would spoil the ion as a qubit.
pub fn energy_transfer_excluded(displacement_nm: [f64; 3], exclusion_radius_nm: f64) -> bool {
    let r2 = displacement_nm.iter().map(|c| c * c).sum::<f64>();
    r2 < exclusion_radius_nm * exclusion_radius_nm
}

/// Energy-transfer rate at separation `r` relative to `r_ref`: (r_ref/r)⁶.
pub fn relative_transfer_rate(r_nm: f64, r_ref_nm: f64) -> Result<f64> {
    if !(r_nm > 0.0) || !(r_ref_nm > 0.0) {
        return Err(Error::domain("radii must be positive"));
    }
    Ok((r_ref_nm / r_nm).powi(6))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateScheme {
    /// Deterministic entanglement via excitation transfer: infidelity ~ √(κγ/g²).
    ExcitationTransfer,
    /// Dispersive photon scattering: infidelity ~ κγ/g².
    Dispersive,
}

/// Rates of a cavity-mediated two-qubit gate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CavityGateParams {
    pub cavity_decay_hz: f64,
    pub atomic_decay_hz: f64,
    pub coupling_hz: f64,
    pub scheme: GateScheme,
}

impl CavityGateParams {
    pub fn new(
        cavity_decay_hz: f64,
        atomic_decay_hz: f64,
        coupling_hz: f64,
        scheme: GateScheme,
    ) -> Result<Self> {
        if !(cavity_decay_hz > 0.0) || !(atomic_decay_hz > 0.0) || !(coupling_hz > 0.0) {
            return Err(Error::domain("all gate rates must be positive"));
        }
        Ok(CavityGateParams {
            cavity_decay_hz,
            atomic_decay_hz,
            coupling_hz,
            scheme,
        })
    }
}

/// Order-of-magnitude infidelity of a cavity-mediated gate. The value is
/// clamped to 1 and flagged once the scaling leaves its validity range.
pub fn cavity_gate_infidelity(p: &CavityGateParams) -> Result<Flagged> {
    if p.coupling_hz == 0.0 {
        return Err(Error::domain("coupling g must be non-zero"));
    }
    let x = p.cavity_decay_hz * p.atomic_decay_hz / (p.coupling_hz * p.coupling_hz);
    let raw = match p.scheme {
        GateScheme::ExcitationTransfer => x.sqrt(),
        GateScheme::Dispersive => x,
    };
    Ok(Flagged {
        value: raw.min(1.0),
        beyond_validity: raw >= 1.0,
    })
}
