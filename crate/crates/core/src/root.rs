//! Bracketed scalar root refinement: bisection with secant acceleration.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Stop once |f(x)| is below this…
    pub f_tol: f64,
    /// …and the bracket half-width is below this.
    pub x_tol: f64,
    pub max_iterations: usize,
}

/// Refines a root of `f` inside `[lo, hi]`, given `f(lo)` and `f(hi)` of
/// opposite sign.
///
/// Dekker-style iteration: `b` is the best estimate, `c` keeps the sign
/// change, and a secant step from the previous iterate is accepted only when
/// it lands between `b` and the midpoint and the bracket keeps shrinking fast
/// enough; otherwise the step is a bisection.
pub fn refine_bracketed<F>(mut f: F, lo: f64, hi: f64, f_lo: f64, f_hi: f64, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if f_lo == 0.0 {
        return Ok(Root { x: lo, fx: 0.0, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, fx: 0.0, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoIdlePoint { lo, hi });
    }

    let (mut a, mut fa) = (lo, f_lo);
    let (mut b, mut fb) = (hi, f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut last_step = b - a;

    for iteration in 1..=opts.max_iterations {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            last_step = b - a;
        }
        if fc.abs() < fb.abs() {
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            c = a;
            fc = fa;
        }

        let half = 0.5 * (c - b);
        let floor = 4.0 * f64::EPSILON * b.abs();
        if fb == 0.0 || (fb.abs() < opts.f_tol && half.abs() <= opts.x_tol.max(floor)) {
            return Ok(Root { x: b, fx: fb, iterations: iteration });
        }
        if half.abs() <= floor {
            return Err(Error::Numerical(format!(
                "root bracket collapsed at x = {b} with |f| = {:.3e} above tolerance {:.3e}",
                fb.abs(),
                opts.f_tol
            )));
        }

        let mut step = half;
        if fa != fb && last_step.abs() > floor {
            let secant = -fb * (b - a) / (fb - fa);
            let lands_inside = secant.signum() == half.signum() && secant.abs() < half.abs();
            if lands_inside && secant.abs() < 0.5 * last_step.abs() {
                step = secant;
            }
        }
        // Guarantee progress even when the secant step is tiny.
        if step.abs() < floor {
            step = floor.copysign(half);
        }
        last_step = step;

        a = b;
        fa = fb;
        b += step;
        fb = f(b)?;
    }
    Err(Error::Numerical(format!(
        "root refinement did not converge in {} iterations (x = {b}, f = {fb:.3e})",
        opts.max_iterations
    )))
}
