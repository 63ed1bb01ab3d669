//! Closed-form transmon relations.
//!
//! Every energy here is an ordinary frequency in MHz (E/h), matching the
//! convention of the Hamiltonian builder. Capacitances are in femtofarads.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Elementary charge, C (exact in SI 2019 / CODATA 2018).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Below this E_J/E_C the transmon frequency formula is flagged as unreliable.
pub const TRANSMON_REGIME_MIN_RATIO: f64 = 20.0;

const FEMTO: f64 = 1e-15;
const MEGA: f64 = 1e6;

/// Charging energy E_C = e²/(2 C h) in MHz for a shunt capacitance in fF.
pub fn charging_energy(capacitance_ff: f64) -> Result<f64> {
    if !(capacitance_ff > 0.0 && capacitance_ff.is_finite()) {
        return Err(domain(format!(
            "shunt capacitance must be positive and finite, got {capacitance_ff} fF"
        )));
    }
    let joules = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * capacitance_ff * FEMTO);
    Ok(joules / PLANCK / MEGA)
}

/// Inverse of [`charging_energy`]: the shunt capacitance in fF giving `ec_mhz`.
pub fn capacitance_from_charging_energy(ec_mhz: f64) -> Result<f64> {
    if !(ec_mhz > 0.0 && ec_mhz.is_finite()) {
        return Err(domain(format!(
            "charging energy must be positive and finite, got {ec_mhz} MHz"
        )));
    }
    let joules = ec_mhz * MEGA * PLANCK;
    Ok(ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * joules) / FEMTO)
}

/// True when E_J/E_C is large enough for the asymptotic transmon formulas.
pub fn in_transmon_regime(ej_mhz: f64, ec_mhz: f64) -> bool {
    ec_mhz > 0.0 && ej_mhz / ec_mhz >= TRANSMON_REGIME_MIN_RATIO
}

/// Qubit frequency f01 ≈ √(8 E_J E_C) − E_C, in MHz.
///
/// Outside the transmon regime the formula value is still returned, with a
/// logged warning.
pub fn transmon_frequency(ej_mhz: f64, ec_mhz: f64) -> Result<f64> {
    if !(ej_mhz >= 0.0 && ej_mhz.is_finite()) {
        return Err(domain(format!("E_J must be non-negative, got {ej_mhz} MHz")));
    }
    if !(ec_mhz >= 0.0 && ec_mhz.is_finite()) {
        return Err(domain(format!("E_C must be non-negative, got {ec_mhz} MHz")));
    }
    if !in_transmon_regime(ej_mhz, ec_mhz) {
        log::warn!(
            "E_J/E_C = {:.3} is below {TRANSMON_REGIME_MIN_RATIO}; \
             the transmon frequency approximation is unreliable",
            ej_mhz / ec_mhz
        );
    }
    Ok((8.0 * ej_mhz * ec_mhz).sqrt() - ec_mhz)
}

/// Transmon anharmonicity estimate α ≈ −E_C, in MHz.
pub fn anharmonicity_estimate(ec_mhz: f64) -> Result<f64> {
    if !(ec_mhz > 0.0 && ec_mhz.is_finite()) {
        return Err(domain(format!("E_C must be positive, got {ec_mhz} MHz")));
    }
    Ok(-ec_mhz)
}

/// A single transmon/gatemon described by its junction and charging energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    /// Shunt capacitance in fF, when E_C was derived from it.
    pub capacitance_ff: Option<f64>,
    pub ej_mhz: f64,
    pub ec_mhz: f64,
}

impl TransmonParams {
    pub fn new(ej_mhz: f64, ec_mhz: f64) -> Result<Self> {
        let params = Self {
            capacitance_ff: None,
            ej_mhz,
            ec_mhz,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn from_capacitance(ej_mhz: f64, capacitance_ff: f64) -> Result<Self> {
        let params = Self {
            capacitance_ff: Some(capacitance_ff),
            ej_mhz,
            ec_mhz: charging_energy(capacitance_ff)?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ej_mhz >= 0.0 && self.ej_mhz.is_finite()) {
            return Err(domain(format!("E_J must be non-negative, got {}", self.ej_mhz)));
        }
        if !(self.ec_mhz >= 0.0 && self.ec_mhz.is_finite()) {
            return Err(domain(format!("E_C must be non-negative, got {}", self.ec_mhz)));
        }
        if let Some(c) = self.capacitance_ff {
            let expected = charging_energy(c)?;
            if ((self.ec_mhz - expected) / expected).abs() > 1e-9 {
                return Err(domain(format!(
                    "E_C = {} MHz is inconsistent with C_sh = {c} fF (expects {expected} MHz)",
                    self.ec_mhz
                )));
            }
        }
        Ok(())
    }

    pub fn frequency(&self) -> Result<f64> {
        transmon_frequency(self.ej_mhz, self.ec_mhz)
    }

    pub fn anharmonicity(&self) -> Result<f64> {
        anharmonicity_estimate(self.ec_mhz)
    }
}
