//! ζ(ω_c) sweeps and the zero-ZZ idle point of the coupler.

use rayon::prelude::*;

use crate::curve::{Column, SweepCurve, Unit};
use crate::error::{domain, Error, Result};
use crate::fock::SystemSpec;
use crate::root::{refine_bracketed, RootOptions};
use crate::spectrum::{zz_at, ZZResult};

/// Default bracket, as offsets below the lower bare qubit frequency (MHz).
///
/// The window holds the idle point where direct and coupler-mediated exchange
/// cancel, and stops short of the second, shallower zero of ζ closer to the
/// qubits.
pub const DEFAULT_BRACKET_OFFSETS_MHZ: (f64, f64) = (2500.0, 1600.0);
/// Default |ζ| tolerance: 1 kHz.
pub const DEFAULT_TOL_MHZ: f64 = 1e-3;
pub const DEFAULT_PRESCAN_POINTS: usize = 50;

/// Coupler frequency where ζ vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdlePoint {
    pub coupler_frequency: f64,
    pub residual_zeta: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Copy)]
pub struct IdleSearch {
    pub bracket: (f64, f64),
    /// Bound on |ζ| at the returned point, MHz. Also used as the frequency
    /// resolution of the refined root.
    pub tol: f64,
    pub prescan_points: usize,
}

impl IdleSearch {
    pub fn for_system(spec: &SystemSpec) -> Self {
        Self {
            bracket: default_bracket(spec),
            tol: DEFAULT_TOL_MHZ,
            prescan_points: DEFAULT_PRESCAN_POINTS,
        }
    }
}

pub fn default_bracket(spec: &SystemSpec) -> (f64, f64) {
    let lower = spec.lower_qubit_frequency();
    (lower - DEFAULT_BRACKET_OFFSETS_MHZ.0, lower - DEFAULT_BRACKET_OFFSETS_MHZ.1)
}

/// `points` evenly spaced values covering `[lo, hi]` inclusive.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => (0..points)
            .map(|k| {
                if k == points - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// ζ and the dressed qubit frequencies at every coupler frequency in `grid`.
///
/// Points are evaluated in parallel; results keep grid order. The first
/// failing point (in grid order) is reported.
pub fn zz_sweep_points(spec: &SystemSpec, grid: &[f64]) -> Result<Vec<ZZResult>> {
    spec.validate()?;
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("coupler grid must be strictly increasing"));
    }
    let results: Vec<Result<ZZResult>> = grid.par_iter().map(|&wc| zz_at(spec, wc)).collect();
    results.into_iter().collect()
}

/// Curve with columns `zeta_MHz`, `dressed_q1_MHz`, `dressed_q2_MHz` against
/// `coupler_MHz`.
pub fn zeta_sweep(spec: &SystemSpec, grid: &[f64]) -> Result<SweepCurve> {
    let points = zz_sweep_points(spec, grid)?;
    SweepCurve::new(
        Column::new("coupler_MHz", Unit::MHz, grid.to_vec()),
        vec![
            Column::new("zeta_MHz", Unit::MHz, points.iter().map(|p| p.zeta).collect()),
            Column::new("dressed_q1_MHz", Unit::MHz, points.iter().map(|p| p.dressed_q1).collect()),
            Column::new("dressed_q2_MHz", Unit::MHz, points.iter().map(|p| p.dressed_q2).collect()),
        ],
    )
}

/// Number of strict sign changes along a sequence, ignoring exact zeros.
pub fn count_sign_changes(values: &[f64]) -> usize {
    let signs: Vec<f64> = values.iter().filter(|v| **v != 0.0).map(|v| v.signum()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Locates the zero of ζ(ω_c) inside `search.bracket`.
///
/// A coarse pre-scan first checks that ζ changes sign exactly once; the
/// bracketing sub-interval is then refined until |ζ| < tol.
pub fn find_idle_frequency(spec: &SystemSpec, search: &IdleSearch) -> Result<IdlePoint> {
    let (lo, hi) = search.bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(domain(format!("invalid bracket [{lo}, {hi}] MHz")));
    }
    if !(search.tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {}", search.tol)));
    }
    let grid = linear_grid(lo, hi, search.prescan_points.max(2));
    let zetas: Vec<f64> = zz_sweep_points(spec, &grid)?.iter().map(|p| p.zeta).collect();

    let changes = count_sign_changes(&zetas);
    if changes > 1 {
        return Err(Error::MultipleRoots { count: changes, lo, hi });
    }
    if let Some(k) = zetas.iter().position(|z| *z == 0.0) {
        return Ok(IdlePoint {
            coupler_frequency: grid[k],
            residual_zeta: 0.0,
            bracket: (lo, hi),
        });
    }
    if changes == 0 {
        return Err(Error::NoIdlePoint { lo, hi });
    }
    let k = zetas
        .windows(2)
        .position(|w| w[0].signum() != w[1].signum())
        .expect("one sign change present");

    let root = refine_bracketed(
        |wc| zz_at(spec, wc).map(|r| r.zeta),
        grid[k],
        grid[k + 1],
        zetas[k],
        zetas[k + 1],
        RootOptions {
            f_tol: search.tol,
            x_tol: search.tol,
            max_iterations: 200,
        },
    )?;
    Ok(IdlePoint {
        coupler_frequency: root.x,
        residual_zeta: root.fx,
        bracket: (lo, hi),
    })
}
