//! Quasi-static coupler noise and the resulting qubit dephasing.
//!
//! The coupler is parked at its idle frequency and displaced by Gaussian
//! offsets ε ~ N(0, σ_ωc²). Each offset is pushed through a full
//! diagonalization, and the spread of the dressed qubit frequencies around
//! their noise-free values is converted to a T2 limit.
//!
//! Offset i is drawn from a ChaCha8 stream selected by i under the run seed,
//! so every sample is a pure function of (seed, i) and the ensemble is
//! identical for any thread count or evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupler::IdlePoint;
use crate::curve::{Column, SweepCurve, Unit};
use crate::error::{domain, Error, Result};
use crate::fock::SystemSpec;
use crate::spectrum::zz_at;

/// Identifies the σ → T2 conversion in every output.
pub const MODEL_TAG: &str = "quasi-static-gaussian-1/e";
pub const DEFAULT_SAMPLES: usize = 1000;
/// Histogram bin width, MHz (0.5 kHz).
pub const DEFAULT_BIN_WIDTH_MHZ: f64 = 5e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// σ_ωc in MHz.
    pub sigma_wc: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub bin_width: f64,
}

impl NoiseConfig {
    pub fn new(sigma_wc: f64, n_samples: usize, seed: u64) -> Self {
        Self {
            sigma_wc,
            n_samples,
            seed,
            bin_width: DEFAULT_BIN_WIDTH_MHZ,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_wc >= 0.0 && self.sigma_wc.is_finite()) {
            return Err(domain(format!("sigma_wc must be non-negative, got {}", self.sigma_wc)));
        }
        if self.n_samples == 0 {
            return Err(domain("n_samples must be at least 1"));
        }
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(domain(format!("bin width must be positive, got {}", self.bin_width)));
        }
        Ok(())
    }
}

/// The i-th standard normal draw of the stream keyed by `seed`.
pub fn standard_normal(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    StandardNormal.sample(&mut rng)
}

/// Coupler offsets ε_i = σ_ωc · z_i, MHz.
pub fn sample_offsets(config: &NoiseConfig) -> Vec<f64> {
    if config.sigma_wc == 0.0 {
        return vec![0.0; config.n_samples];
    }
    (0..config.n_samples)
        .into_par_iter()
        .map(|i| config.sigma_wc * standard_normal(config.seed, i as u64))
        .collect()
}

/// Shift counts per qubit on a grid of bins centred at multiples of the width.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub centers: Vec<f64>,
    pub counts_q1: Vec<usize>,
    pub counts_q2: Vec<usize>,
}

impl Histogram {
    pub fn from_shifts(q1: &[f64], q2: &[f64], bin_width: f64) -> Self {
        let bin = |s: &f64| (s / bin_width).round() as i64;
        let all = q1.iter().chain(q2).map(bin);
        let (lo, hi) = all.fold((i64::MAX, i64::MIN), |(lo, hi), b| (lo.min(b), hi.max(b)));
        if lo > hi {
            return Self {
                bin_width,
                centers: vec![],
                counts_q1: vec![],
                counts_q2: vec![],
            };
        }
        let n = (hi - lo + 1) as usize;
        let mut counts_q1 = vec![0; n];
        let mut counts_q2 = vec![0; n];
        for s in q1 {
            counts_q1[(bin(s) - lo) as usize] += 1;
        }
        for s in q2 {
            counts_q2[(bin(s) - lo) as usize] += 1;
        }
        Self {
            bin_width,
            centers: (lo..=hi).map(|b| b as f64 * bin_width).collect(),
            counts_q1,
            counts_q2,
        }
    }

    pub fn to_curve(&self) -> SweepCurve {
        let as_f64 = |c: &[usize]| c.iter().map(|&v| v as f64).collect();
        SweepCurve::new(
            Column::new("bin_center_MHz", Unit::MHz, self.centers.clone()),
            vec![
                Column::new("count_q1", Unit::Dimensionless, as_f64(&self.counts_q1)),
                Column::new("count_q2", Unit::Dimensionless, as_f64(&self.counts_q2)),
            ],
        )
        .expect("bin centres are strictly increasing")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRunResult {
    pub offsets: Vec<f64>,
    /// Noisy minus noise-free dressed frequency, MHz.
    pub shifts_q1: Vec<f64>,
    pub shifts_q2: Vec<f64>,
    pub sigma_q1: f64,
    pub sigma_q2: f64,
    pub histogram: Histogram,
}

impl NoiseRunResult {
    pub fn t2(&self) -> Result<T2Estimate> {
        Ok(T2Estimate {
            t2_q1: t2_from_sigma(self.sigma_q1)?,
            t2_q2: t2_from_sigma(self.sigma_q2)?,
            model_tag: MODEL_TAG,
        })
    }
}

/// Sample standard deviation (n − 1 denominator; zero for a single sample).
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

pub fn run_noise_ensemble(spec: &SystemSpec, idle: &IdlePoint, config: &NoiseConfig) -> Result<NoiseRunResult> {
    config.validate()?;
    let reference = zz_at(spec, idle.coupler_frequency)?;
    let offsets = sample_offsets(config);

    let outcomes: Vec<Result<(f64, f64)>> = offsets
        .par_iter()
        .map(|&eps| {
            zz_at(spec, idle.coupler_frequency + eps)
                .map(|r| (r.dressed_q1 - reference.dressed_q1, r.dressed_q2 - reference.dressed_q2))
        })
        .collect();

    let total = outcomes.len();
    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    if failed > 0 {
        let first = outcomes.into_iter().find_map(Result::err).expect("failure present");
        return Err(Error::EnsembleFailures {
            failed,
            total,
            first: Box::new(first),
        });
    }
    let (shifts_q1, shifts_q2): (Vec<f64>, Vec<f64>) = outcomes.into_iter().map(|o| o.expect("checked")).unzip();
    Ok(NoiseRunResult {
        sigma_q1: sample_std(&shifts_q1),
        sigma_q2: sample_std(&shifts_q2),
        histogram: Histogram::from_shifts(&shifts_q1, &shifts_q2, config.bin_width),
        offsets,
        shifts_q1,
        shifts_q2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T2Estimate {
    /// Microseconds; `f64::INFINITY` for a noiseless qubit.
    pub t2_q1: f64,
    pub t2_q2: f64,
    pub model_tag: &'static str,
}

/// 1/e time of the Ramsey envelope exp(−½(2π σ_q t)²): T2 = √2 / (2π σ_q).
///
/// `sigma_q` is in MHz, so the result is in microseconds.
pub fn t2_from_sigma(sigma_q: f64) -> Result<f64> {
    if !(sigma_q >= 0.0) {
        return Err(domain(format!("frequency spread must be non-negative, got {sigma_q}")));
    }
    if sigma_q == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(std::f64::consts::SQRT_2 / (2.0 * std::f64::consts::PI * sigma_q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSweepPoint {
    pub sigma_wc: f64,
    pub sigma_q1: f64,
    pub sigma_q2: f64,
    pub t2: T2Estimate,
}

/// One ensemble per σ_ωc, all with the same seed so the underlying normal
/// draws are shared across the sweep.
pub fn sigma_sweep_points(
    spec: &SystemSpec,
    idle: &IdlePoint,
    sigmas: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<SigmaSweepPoint>> {
    if sigmas.iter().any(|s| !(*s >= 0.0)) {
        return Err(domain("sigma_wc values must be non-negative"));
    }
    if sigmas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("sigma_wc values must be strictly increasing"));
    }
    sigmas
        .iter()
        .map(|&sigma_wc| {
            let run = run_noise_ensemble(spec, idle, &NoiseConfig::new(sigma_wc, n_samples, seed))?;
            Ok(SigmaSweepPoint {
                sigma_wc,
                sigma_q1: run.sigma_q1,
                sigma_q2: run.sigma_q2,
                t2: run.t2()?,
            })
        })
        .collect()
}

/// Curve with columns `t2_q1_us`, `t2_q2_us` against `sigma_wc_MHz`.
pub fn sigma_sweep(spec: &SystemSpec, idle: &IdlePoint, sigmas: &[f64], n_samples: usize, seed: u64) -> Result<SweepCurve> {
    let points = sigma_sweep_points(spec, idle, sigmas, n_samples, seed)?;
    SweepCurve::new(
        Column::new("sigma_wc_MHz", Unit::MHz, sigmas.to_vec()),
        vec![
            Column::new("t2_q1_us", Unit::Microseconds, points.iter().map(|p| p.t2.t2_q1).collect()),
            Column::new("t2_q2_us", Unit::Microseconds, points.iter().map(|p| p.t2.t2_q2).collect()),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupler::{find_idle_frequency, IdleSearch};
    use crate::presets::ParameterSet;

    fn set1_idle() -> (SystemSpec, IdlePoint) {
        let spec = ParameterSet::Set1.system();
        let idle = find_idle_frequency(&spec, &IdleSearch::for_system(&spec)).unwrap();
        (spec, idle)
    }

    #[test]
    fn zero_sigma_gives_zero_offsets() {
        let offsets = sample_offsets(&NoiseConfig::new(0.0, 17, 3));
        assert_eq!(offsets, vec![0.0; 17]);
    }

    #[test]
    fn offsets_have_requested_moments() {
        let offsets = sample_offsets(&NoiseConfig::new(1.0, 100_000, 2024));
        let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
        assert!(mean.abs() < 0.02, "{mean}");
        assert!((sample_std(&offsets) - 1.0).abs() < 0.02);
    }

    #[test]
    fn offsets_are_deterministic_and_prefix_stable() {
        let a = sample_offsets(&NoiseConfig::new(0.7, 500, 99));
        let b = sample_offsets(&NoiseConfig::new(0.7, 500, 99));
        assert_eq!(a, b);
        let c = sample_offsets(&NoiseConfig::new(0.7, 100, 99));
        assert_eq!(&a[..100], &c[..]);
        let d = sample_offsets(&NoiseConfig::new(0.7, 100, 100));
        assert_ne!(c, d);
    }

    #[test]
    fn t2_conversion() {
        let t2 = t2_from_sigma(1e-3).unwrap();
        assert!((t2 - 225.079).abs() < 1e-3, "{t2}");
        assert!((t2_from_sigma(2e-3).unwrap() - t2 / 2.0).abs() < 1e-12);
        assert_eq!(t2_from_sigma(0.0).unwrap(), f64::INFINITY);
        assert!(t2_from_sigma(-1.0).is_err());
        assert!(t2_from_sigma(f64::NAN).is_err());
    }

    #[test]
    fn histogram_binning() {
        let h = Histogram::from_shifts(&[0.0, 0.0011, -0.0004], &[0.0002], 0.001);
        assert_eq!(h.centers, vec![0.0, 0.001]);
        assert_eq!(h.counts_q1, vec![2, 1]);
        assert_eq!(h.counts_q2, vec![1, 0]);
        let single = Histogram::from_shifts(&[0.0; 5], &[0.0; 5], 0.001);
        assert_eq!(single.centers, vec![0.0]);
        assert_eq!(single.counts_q1, vec![5]);
    }

    #[test]
    fn noiseless_ensemble_has_zero_shifts() {
        let (spec, idle) = set1_idle();
        let run = run_noise_ensemble(&spec, &idle, &NoiseConfig::new(0.0, 20, 1)).unwrap();
        assert!(run.shifts_q1.iter().chain(&run.shifts_q2).all(|s| *s == 0.0));
        assert_eq!(run.histogram.centers, vec![0.0]);
        assert_eq!(run.t2().unwrap().t2_q1, f64::INFINITY);
    }

    #[test]
    fn small_noise_follows_linear_response() {
        let (spec, idle) = set1_idle();
        let at_idle = spec.with_coupler_frequency(idle.coupler_frequency);
        let (d1, d2) = crate::spectrum::qubit_susceptibility(&at_idle, 1.0).unwrap();
        let sigma = 0.1;
        let run = run_noise_ensemble(&spec, &idle, &NoiseConfig::new(sigma, 1000, 7)).unwrap();
        assert!((run.sigma_q1 / (d1.abs() * sigma) - 1.0).abs() < 0.1);
        assert!((run.sigma_q2 / (d2.abs() * sigma) - 1.0).abs() < 0.1);
    }

    #[test]
    fn ensemble_failures_are_counted() {
        let (spec, idle) = set1_idle();
        // σ_ωc of 1.5 GHz drives some samples through the qubit resonances.
        match run_noise_ensemble(&spec, &idle, &NoiseConfig::new(1500.0, 64, 1)) {
            Err(Error::EnsembleFailures { failed, total, .. }) => {
                assert!(failed > 0 && failed < total);
                assert_eq!(total, 64);
            }
            other => panic!("expected ensemble failures, got {other:?}"),
        }
    }

    #[test]
    fn sweep_validation() {
        let (spec, idle) = set1_idle();
        assert!(sigma_sweep(&spec, &idle, &[0.2, 0.1], 10, 1).is_err());
        assert!(sigma_sweep(&spec, &idle, &[-0.1, 0.1], 10, 1).is_err());
        assert!(run_noise_ensemble(&spec, &idle, &NoiseConfig::new(0.1, 0, 1)).is_err());
    }
}
