//! Reference two-qubit/one-coupler systems.
//!
//! The three coupling sets share α = −260 MHz on every mode and differ in the
//! qubit–coupler and direct qubit–qubit strengths. The strengths are quoted as
//! exchange amplitudes, i.e. the coefficient of (a_i† a_j + a_i a_j†). In the
//! (a_i − a_i†)(a_j − a_j†) form used by [`crate::fock::build_hamiltonian`]
//! that exchange coefficient is −g_ij, so each quoted value enters the
//! Hamiltonian with its sign flipped. With that mapping the direct and
//! coupler-mediated exchange cancel for a coupler well below the qubits,
//! which is where the zero-ZZ idle point sits.
//!
//! The bare qubit frequencies (4500 and 4700 MHz) are a choice, not data:
//! both lie in the 4–5 GHz band and their 200 MHz detuning sits inside the
//! straddling regime (|Δ| < |α|).

use serde::{Deserialize, Serialize};

use crate::fock::{CouplingSpec, ModeSpec, SystemSpec, DEFAULT_LEVELS};

pub const QUBIT1_FREQUENCY_MHZ: f64 = 4500.0;
pub const QUBIT2_FREQUENCY_MHZ: f64 = 4700.0;
pub const ANHARMONICITY_MHZ: f64 = -260.0;
/// Starting coupler frequency; sweeps and idle searches override it.
pub const COUPLER_FREQUENCY_MHZ: f64 = 2800.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParameterSet {
    Set1,
    Set2,
    Set3,
}

impl ParameterSet {
    pub const ALL: [ParameterSet; 3] = [Self::Set1, Self::Set2, Self::Set3];

    /// (g_qc, g_12) exchange amplitudes in MHz; g_1c = g_2c = g_qc.
    pub fn exchange_amplitudes(self) -> (f64, f64) {
        match self {
            Self::Set1 => (110.0, -6.0),
            Self::Set2 => (70.0, -2.5),
            Self::Set3 => (150.0, -11.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Set1 => "set1",
            Self::Set2 => "set2",
            Self::Set3 => "set3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn system(self) -> SystemSpec {
        self.system_with_levels(DEFAULT_LEVELS)
    }

    /// Modes ordered (q1, c, q2).
    pub fn system_with_levels(self, levels: usize) -> SystemSpec {
        let (g_qc, g_12) = self.exchange_amplitudes();
        SystemSpec {
            modes: vec![
                ModeSpec::new("q1", QUBIT1_FREQUENCY_MHZ, ANHARMONICITY_MHZ, levels),
                ModeSpec::new("c", COUPLER_FREQUENCY_MHZ, ANHARMONICITY_MHZ, levels),
                ModeSpec::new("q2", QUBIT2_FREQUENCY_MHZ, ANHARMONICITY_MHZ, levels),
            ],
            couplings: vec![
                CouplingSpec::new(0, 1, -g_qc),
                CouplingSpec::new(1, 2, -g_qc),
                CouplingSpec::new(0, 2, -g_12),
            ],
            qubit_indices: [0, 2],
            coupler_index: 1,
        }
    }
}
