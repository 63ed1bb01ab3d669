//! Diagonalization, dressed-state labeling, and ZZ extraction.
//!
//! Dressed states are identified with the bare product state they overlap
//! most. Only coupler-ground labels (n_c = 0) are ever requested: the coupler
//! is treated as staying in its ground state.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::fock::{build_hamiltonian, FockBasis, HamiltonianMatrix, SystemSpec};

/// Largest accepted ‖Hv − λv‖ / ‖H‖ for any eigenpair.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// A label is accepted only if its dressed state overlaps it by more than this.
pub const OVERLAP_THRESHOLD: f64 = 0.5;
/// Coupler-frequency step for the central-difference susceptibility, MHz.
pub const DEFAULT_SUSCEPTIBILITY_STEP_MHZ: f64 = 1.0;

/// (n_q1, n_c, n_q2) labels needed for ζ and the dressed qubit frequencies.
pub const REQUIRED_LABELS: [[usize; 3]; 4] = [[0, 0, 0], [1, 0, 0], [0, 0, 1], [1, 0, 1]];

/// Ascending eigenvalues with eigenvectors stored as matching columns.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    /// Worst ‖Hv − λv‖ / ‖H‖ over all pairs.
    pub max_relative_residual: f64,
}

pub fn diagonalize(h: &HamiltonianMatrix) -> Result<Eigenpairs> {
    diagonalize_matrix(&h.entries)
}

pub fn diagonalize_matrix(h: &DMatrix<f64>) -> Result<Eigenpairs> {
    let n = h.nrows();
    if n == 0 || n != h.ncols() {
        return Err(domain(format!("expected a non-empty square matrix, got {}x{}", n, h.ncols())));
    }
    let max_iterations = 1000 * n;
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, max_iterations).ok_or_else(|| {
        Error::Numerical(format!(
            "symmetric QR iteration did not converge within {max_iterations} sweeps (dimension {n})"
        ))
    })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_relative_residual = if norm == 0.0 {
        0.0
    } else {
        let hv = h * &vectors;
        (0..n)
            .map(|c| (hv.column(c) - vectors.column(c) * values[c]).norm())
            .fold(0.0f64, f64::max)
            / norm
    };
    if !(max_relative_residual < RESIDUAL_TOLERANCE) {
        return Err(Error::Numerical(format!(
            "eigenpair residual {max_relative_residual:.3e} exceeds {RESIDUAL_TOLERANCE:e} \
             (dimension {n}, spectral norm {norm:.6e} MHz)"
        )));
    }
    Ok(Eigenpairs {
        values,
        vectors,
        max_relative_residual,
    })
}

/// Eigenvalues plus the dressed state assigned to each required bare label.
#[derive(Debug, Clone)]
pub struct LabeledSpectrum {
    pub eigenvalues: Vec<f64>,
    pub assignment: BTreeMap<[usize; 3], usize>,
    /// Squared overlap between each label and its assigned dressed state.
    pub overlap_quality: BTreeMap<[usize; 3], f64>,
}

impl LabeledSpectrum {
    /// Dressed energy of a labeled state, MHz.
    pub fn energy(&self, label: [usize; 3]) -> Option<f64> {
        self.assignment.get(&label).map(|&k| self.eigenvalues[k])
    }

    pub fn min_overlap(&self) -> f64 {
        self.overlap_quality.values().copied().fold(1.0, f64::min)
    }
}

/// Greedy maximum-overlap assignment of [`REQUIRED_LABELS`] to eigenvectors.
///
/// Candidate (label, eigenvector) pairs are taken in descending squared
/// overlap; each label and each eigenvector is used at most once.
pub fn label_states(eigen: &Eigenpairs, basis: &FockBasis, spec: &SystemSpec) -> Result<LabeledSpectrum> {
    let n = eigen.values.len();
    let mut candidates = Vec::with_capacity(REQUIRED_LABELS.len() * n);
    for label in REQUIRED_LABELS {
        let row = basis
            .index_of(&spec.occupation_of(label))
            .ok_or_else(|| domain(format!("label {label:?} lies outside the truncated basis")))?;
        for k in 0..n {
            let amp = eigen.vectors[(row, k)];
            candidates.push((amp * amp, label, k));
        }
    }
    // Ties broken by eigenvector index so the assignment is deterministic.
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)));

    let mut assignment = BTreeMap::new();
    let mut overlap_quality = BTreeMap::new();
    let mut used = vec![false; n];
    for (overlap, label, k) in candidates {
        if assignment.contains_key(&label) || used[k] {
            continue;
        }
        if overlap <= OVERLAP_THRESHOLD {
            return Err(Error::StrongMixing { label, overlap });
        }
        used[k] = true;
        assignment.insert(label, k);
        overlap_quality.insert(label, overlap);
        if assignment.len() == REQUIRED_LABELS.len() {
            break;
        }
    }
    Ok(LabeledSpectrum {
        eigenvalues: eigen.values.clone(),
        assignment,
        overlap_quality,
    })
}

/// Builds, diagonalizes and labels the spectrum of `spec`.
pub fn labeled_spectrum(spec: &SystemSpec) -> Result<LabeledSpectrum> {
    let h = build_hamiltonian(spec)?;
    let eigen = diagonalize(&h)?;
    label_states(&eigen, &h.basis, spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZZResult {
    /// ζ = ω_11 − ω_10 − ω_01 + ω_00, MHz.
    pub zeta: f64,
    pub dressed_q1: f64,
    pub dressed_q2: f64,
    pub coupler_frequency: f64,
}

impl ZZResult {
    pub fn from_spectrum(spectrum: &LabeledSpectrum, coupler_frequency: f64) -> Self {
        let e = |label| spectrum.energy(label).expect("required label assigned");
        let (e000, e100, e001, e101) = (e([0, 0, 0]), e([1, 0, 0]), e([0, 0, 1]), e([1, 0, 1]));
        Self {
            zeta: e101 - e100 - e001 + e000,
            dressed_q1: e100 - e000,
            dressed_q2: e001 - e000,
            coupler_frequency,
        }
    }
}

pub fn zz_strength(spec: &SystemSpec) -> Result<ZZResult> {
    let spectrum = labeled_spectrum(spec)?;
    Ok(ZZResult::from_spectrum(&spectrum, spec.coupler_frequency()))
}

/// ζ and dressed frequencies with the coupler moved to `coupler_mhz`.
pub fn zz_at(spec: &SystemSpec, coupler_mhz: f64) -> Result<ZZResult> {
    zz_strength(&spec.with_coupler_frequency(coupler_mhz)).map_err(|source| Error::AtCouplerFrequency {
        coupler_mhz,
        source: Box::new(source),
    })
}

/// Central-difference (dω_q1/dω_c, dω_q2/dω_c) at the spec's coupler frequency.
pub fn qubit_susceptibility(spec: &SystemSpec, step: f64) -> Result<(f64, f64)> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(domain(format!("finite-difference step must be positive, got {step}")));
    }
    let wc = spec.coupler_frequency();
    let up = zz_at(spec, wc + step)?;
    let down = zz_at(spec, wc - step)?;
    Ok((
        (up.dressed_q1 - down.dressed_q1) / (2.0 * step),
        (up.dressed_q2 - down.dressed_q2) / (2.0 * step),
    ))
}
