//! Differentiation kernels for uniformly sampled functions.
//!
//! The primary kernel is the spectral (discrete-Fourier) derivative, which is
//! exact to machine precision for band-limited data and superalgebraically
//! accurate for rapidly decaying smooth states.  It treats the samples as one
//! period of a periodic function, so states that have not decayed at the grid
//! ends produce wrap-around ringing; [`boundary_decay_ok`] detects that case
//! and callers that must handle algebraic tails (minimum-length states,
//! deformed-position eigenstates) fall back to a 7-point finite-difference
//! kernel whose error stays local.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry((n, forward))
            .or_insert_with(|| {
                if forward {
                    planner.plan_fft_forward(n)
                } else {
                    planner.plan_fft_inverse(n)
                }
            })
            .clone()
    })
}

/// Spectral derivative of the given order on samples with uniform `step`.
///
/// The conjugate wavenumbers are k_m = 2π m / (n·step) with m wrapped to
/// (−n/2, n/2]; for odd orders the Nyquist mode is zeroed.
pub fn spectral_derivative(amp: &[C64], step: f64, order: u32) -> Vec<C64> {
    let n = amp.len();
    let mut buf = amp.to_vec();
    plan(n, true).process(&mut buf);

    let length = n as f64 * step;
    let half = n / 2;
    for (j, v) in buf.iter_mut().enumerate() {
        let m = if j <= half { j as f64 } else { j as f64 - n as f64 };
        let k = 2.0 * PI * m / length;
        // ik raised to the derivative order
        let factor = C64::new(0.0, k).powu(order);
        *v *= factor;
    }
    if order % 2 == 1 && n % 2 == 0 {
        buf[half] = C64::new(0.0, 0.0);
    }

    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Fornberg weights for the `m`-th derivative at `z` from nodes `x`.
///
/// Returns one weight per node.  B. Fornberg, "Generation of finite
/// difference formulas on arbitrarily spaced grids", Math. Comp. 51 (1988).
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    assert!(n > m);
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// 7-point finite-difference derivative (6th order in the interior, one-sided
/// closures of the same stencil width at the edges).
pub fn fd6_derivative(amp: &[C64], step: f64, order: u32) -> Vec<C64> {
    let n = amp.len();
    let m = order as usize;
    let width = 7usize.min(n);
    let offsets: Vec<f64> = (0..width).map(|i| i as f64).collect();

    // weights for each position inside the stencil
    let tables: Vec<Vec<f64>> = (0..width)
        .map(|pos| fornberg_weights(pos as f64, &offsets, m))
        .collect();
    let scale = step.powi(-(m as i32));

    let mut out = vec![C64::new(0.0, 0.0); n];
    let center = width / 2;
    for i in 0..n {
        let (start, pos) = if i < center {
            (0, i)
        } else if i + (width - center) > n {
            (n - width, i - (n - width))
        } else {
            (i - center, center)
        };
        let mut acc = C64::new(0.0, 0.0);
        for (j, w) in tables[pos].iter().enumerate() {
            acc += amp[start + j] * *w;
        }
        out[i] = acc * scale;
    }
    out
}

/// True when the endpoint magnitudes are negligible relative to the peak, so
/// periodization for the spectral kernel introduces no visible seam.
pub fn boundary_decay_ok(amp: &[C64], rel_tol: f64) -> bool {
    let peak = amp.iter().map(|z| z.norm_sqr()).fold(0.0f64, f64::max).sqrt();
    if peak == 0.0 {
        return true;
    }
    let first = amp.first().map(|z| z.norm()).unwrap_or(0.0);
    let last = amp.last().map(|z| z.norm()).unwrap_or(0.0);
    first.max(last) <= rel_tol * peak
}
