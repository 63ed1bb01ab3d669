//! Truncated-Fock Hamiltonian for coupled anharmonic oscillators.
//!
//! Each mode i contributes ω_i n_i + (α_i/2) n_i(n_i − 1), and each coupled
//! pair contributes g_ij (a_i − a_i†)(a_j − a_j†). Everything is H/h in MHz.
//!
//! The tensor-product basis is lexicographic with mode 0 varying slowest, so
//! for levels (L0, L1, L2) the state |n0 n1 n2⟩ sits at
//! `n0·L1·L2 + n1·L2 + n2`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Levels kept per mode unless overridden.
pub const DEFAULT_LEVELS: usize = 5;
/// Largest Hilbert space `build_hamiltonian` will allocate.
pub const DEFAULT_DIMENSION_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub label: String,
    /// ω_i in MHz.
    pub frequency: f64,
    /// α_i in MHz.
    pub anharmonicity: f64,
    pub levels: usize,
}

impl ModeSpec {
    pub fn new(label: impl Into<String>, frequency: f64, anharmonicity: f64, levels: usize) -> Self {
        Self {
            label: label.into(),
            frequency,
            anharmonicity,
            levels,
        }
    }

    /// Bare energy of the Fock state |n⟩ of this mode.
    pub fn bare_energy(&self, n: usize) -> f64 {
        let n = n as f64;
        self.frequency * n + 0.5 * self.anharmonicity * n * (n - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    /// Mode indices, `pair[0] < pair[1]`.
    pub pair: [usize; 2],
    /// g_ij in MHz.
    pub strength: f64,
}

impl CouplingSpec {
    pub fn new(i: usize, j: usize, strength: f64) -> Self {
        Self {
            pair: [i.min(j), i.max(j)],
            strength,
        }
    }
}

/// Modes, couplings, and the roles (qubit 1, coupler, qubit 2) of the modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub modes: Vec<ModeSpec>,
    pub couplings: Vec<CouplingSpec>,
    pub qubit_indices: [usize; 2],
    pub coupler_index: usize,
}

impl SystemSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.modes.len();
        for (i, mode) in self.modes.iter().enumerate() {
            if mode.levels < 2 {
                return Err(domain(format!(
                    "mode {i} ({}) needs at least 2 levels, got {}",
                    mode.label, mode.levels
                )));
            }
            if !mode.frequency.is_finite() || !mode.anharmonicity.is_finite() {
                return Err(domain(format!("mode {i} ({}) has a non-finite parameter", mode.label)));
            }
        }
        let [q1, q2] = self.qubit_indices;
        for idx in [q1, q2, self.coupler_index] {
            if idx >= n {
                return Err(domain(format!("mode index {idx} out of range for {n} modes")));
            }
        }
        if q1 == q2 || q1 == self.coupler_index || q2 == self.coupler_index {
            return Err(domain("qubit and coupler indices must be distinct"));
        }
        let mut seen = Vec::with_capacity(self.couplings.len());
        for c in &self.couplings {
            let [i, j] = c.pair;
            if i >= j {
                return Err(domain(format!("coupling pair ({i}, {j}) must satisfy i < j")));
            }
            if j >= n {
                return Err(domain(format!("coupling pair ({i}, {j}) out of range for {n} modes")));
            }
            if !c.strength.is_finite() {
                return Err(domain(format!("coupling ({i}, {j}) is not finite")));
            }
            if seen.contains(&c.pair) {
                return Err(domain(format!("duplicate coupling for pair ({i}, {j})")));
            }
            seen.push(c.pair);
        }
        Ok(())
    }

    pub fn levels(&self) -> Vec<usize> {
        self.modes.iter().map(|m| m.levels).collect()
    }

    /// Π levels, or `None` on overflow.
    pub fn dimension(&self) -> Option<usize> {
        self.modes
            .iter()
            .try_fold(1usize, |acc, m| acc.checked_mul(m.levels))
    }

    pub fn coupler_frequency(&self) -> f64 {
        self.modes[self.coupler_index].frequency
    }

    pub fn with_coupler_frequency(&self, frequency: f64) -> Self {
        let mut spec = self.clone();
        spec.modes[spec.coupler_index].frequency = frequency;
        spec
    }

    pub fn with_levels(&self, levels: usize) -> Self {
        let mut spec = self.clone();
        for m in &mut spec.modes {
            m.levels = levels;
        }
        spec
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let pair = [i.min(j), i.max(j)];
        self.couplings
            .iter()
            .find(|c| c.pair == pair)
            .map_or(0.0, |c| c.strength)
    }

    /// Lower of the two bare qubit frequencies.
    pub fn lower_qubit_frequency(&self) -> f64 {
        let [q1, q2] = self.qubit_indices;
        self.modes[q1].frequency.min(self.modes[q2].frequency)
    }

    /// Maps a (n_q1, n_c, n_q2) label onto per-mode occupations, other modes empty.
    pub fn occupation_of(&self, label: [usize; 3]) -> Vec<usize> {
        let mut occ = vec![0; self.modes.len()];
        occ[self.qubit_indices[0]] = label[0];
        occ[self.coupler_index] = label[1];
        occ[self.qubit_indices[1]] = label[2];
        occ
    }
}

/// Lexicographic map between occupation tuples and flat basis indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    levels: Vec<usize>,
    strides: Vec<usize>,
    dimension: usize,
}

impl FockBasis {
    pub fn new(levels: &[usize]) -> Self {
        let mut strides = vec![1; levels.len()];
        for k in (0..levels.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * levels[k + 1];
        }
        Self {
            levels: levels.to_vec(),
            strides,
            dimension: levels.iter().product(),
        }
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn index_of(&self, occupation: &[usize]) -> Option<usize> {
        if occupation.len() != self.levels.len() {
            return None;
        }
        occupation
            .iter()
            .zip(&self.levels)
            .zip(&self.strides)
            .try_fold(0, |acc, ((&n, &l), &s)| (n < l).then_some(acc + n * s))
    }

    pub fn occupation_of(&self, index: usize) -> Vec<usize> {
        self.levels
            .iter()
            .zip(&self.strides)
            .map(|(&l, &s)| (index / s) % l)
            .collect()
    }
}

/// Dense H/h in MHz together with its basis map.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub basis: FockBasis,
    pub entries: DMatrix<f64>,
}

impl HamiltonianMatrix {
    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// max |H − Hᵀ| relative to max |H|.
    pub fn relative_asymmetry(&self) -> f64 {
        let scale = self.entries.amax();
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.dimension();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in (r + 1)..n {
                worst = worst.max((self.entries[(r, c)] - self.entries[(c, r)]).abs());
            }
        }
        worst / scale
    }
}

/// Annihilation operator truncated to `levels`: ⟨n−1|a|n⟩ = √n.
pub fn lowering_operator(levels: usize) -> Result<DMatrix<f64>> {
    if levels < 2 {
        return Err(domain(format!("truncation needs at least 2 levels, got {levels}")));
    }
    Ok(DMatrix::from_fn(levels, levels, |r, c| {
        if c == r + 1 {
            (c as f64).sqrt()
        } else {
            0.0
        }
    }))
}

/// a†a truncated to `levels`, built directly as diag(0, 1, …, levels − 1).
pub fn number_operator(levels: usize) -> Result<DMatrix<f64>> {
    lowering_operator(levels)?;
    Ok(DMatrix::from_fn(levels, levels, |r, c| if r == c { r as f64 } else { 0.0 }))
}

pub fn build_hamiltonian(spec: &SystemSpec) -> Result<HamiltonianMatrix> {
    build_hamiltonian_capped(spec, DEFAULT_DIMENSION_CAP)
}

/// Builds H/h element by element, refusing spaces larger than `cap`.
pub fn build_hamiltonian_capped(spec: &SystemSpec, cap: usize) -> Result<HamiltonianMatrix> {
    spec.validate()?;
    let dimension = spec.dimension().unwrap_or(usize::MAX);
    if dimension > cap {
        return Err(Error::DimensionCap { dimension, cap });
    }
    let basis = FockBasis::new(&spec.levels());
    let mut h = DMatrix::<f64>::zeros(dimension, dimension);

    for col in 0..dimension {
        let occ = basis.occupation_of(col);
        h[(col, col)] = spec
            .modes
            .iter()
            .zip(&occ)
            .map(|(m, &n)| m.bare_energy(n))
            .sum();

        // (a_i − a_i†)(a_j − a_j†) = a_i a_j − a_i a_j† − a_i† a_j + a_i† a_j†
        for c in &spec.couplings {
            let [i, j] = c.pair;
            let (ni, nj) = (occ[i], occ[j]);
            for (di, dj, sign) in [(-1i64, -1i64, 1.0), (-1, 1, -1.0), (1, -1, -1.0), (1, 1, 1.0)] {
                let (Some(mi), Some(mj)) = (shifted(ni, di, spec.modes[i].levels), shifted(nj, dj, spec.modes[j].levels))
                else {
                    continue;
                };
                let amp = ladder_amplitude(ni, mi) * ladder_amplitude(nj, mj);
                let mut target = occ.clone();
                target[i] = mi;
                target[j] = mj;
                let row = basis
                    .index_of(&target)
                    .expect("shifted occupation lies inside the truncation");
                h[(row, col)] += sign * c.strength * amp;
            }
        }
    }
    Ok(HamiltonianMatrix { basis, entries: h })
}

fn shifted(n: usize, delta: i64, levels: usize) -> Option<usize> {
    let m = n as i64 + delta;
    (0..levels as i64).contains(&m).then_some(m as usize)
}

/// Matrix element of a or a† connecting |from⟩ and |to⟩ = |from ± 1⟩.
fn ladder_amplitude(from: usize, to: usize) -> f64 {
    (from.max(to) as f64).sqrt()
}
