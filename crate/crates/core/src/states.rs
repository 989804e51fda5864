//! The special states of minimal-length quantum mechanics: squeezed
//! Gaussians, deformed-position eigenstates, minimum-length states, the ξ̂
//! operator whose eigenstates they are, and the closed-form deformed position
//! uncertainty of Gaussian states with its minimizer.

use std::f64::consts::PI;

use crate::deform::{self, DeformationSpec};
use crate::error::{Error, Result};
use crate::grid::{GridWaveFunction, MomentumGrid};
use crate::ops;
use crate::units::PhysicalUnits;
use crate::C64;

/// Largest tolerated norm defect of a freshly constructed minimum-length
/// state; drives the grid-coverage precondition.
const ML_NORM_TOL: f64 = 1e-8;

/// Squeezed Gaussian ψ_s(p) = (a/π)^{1/4} e^{−(a/2)(p−p₀)² − i p x₀/ħ}.
#[derive(Debug, Clone, Copy)]
pub struct SqueezedParams {
    /// Squeezing (momentum-variance scale), a > 0.
    pub a: f64,
    pub x0: f64,
    pub p0: f64,
}

impl SqueezedParams {
    /// Momentum-space standard deviation √(1/2a).
    pub fn sigma_p(&self) -> f64 {
        (0.5 / self.a).sqrt()
    }

    /// Position-space standard deviation √(ħ²a/2).
    pub fn sigma_x(&self, units: &PhysicalUnits) -> f64 {
        units.hbar * (self.a / 2.0).sqrt()
    }

    /// A grid wide and fine enough for this state's moments at spectral
    /// accuracy.
    pub fn adequate_grid(&self, units: &PhysicalUnits) -> Result<MomentumGrid> {
        let halfwidth = 12.0 * self.sigma_p();
        let x_freq = self.x0.abs() + 12.0 * self.sigma_x(units) + 2.0;
        MomentumGrid::adapted(self.p0, halfwidth, x_freq)
    }
}

pub fn squeezed_state(
    params: &SqueezedParams,
    grid: MomentumGrid,
    units: &PhysicalUnits,
) -> Result<GridWaveFunction> {
    let SqueezedParams { a, x0, p0 } = *params;
    if !(a > 0.0) {
        return Err(Error::Invalid("squeezing parameter a must be positive".into()));
    }
    let reach = 8.0 / a.sqrt();
    if grid.p_min() > p0 - reach || grid.p_max() < p0 + reach {
        return Err(Error::GridTooNarrowSqueezed(a));
    }
    let norm = (a / PI).powf(0.25);
    let hbar = units.hbar;
    Ok(GridWaveFunction::from_fn(grid, |p| {
        let gauss = norm * (-(a / 2.0) * (p - p0) * (p - p0)).exp();
        let phase = C64::new(0.0, -p * x0 / hbar).exp();
        phase * gauss
    }))
}

/// Minimum-length state φ^{ML}_ξ for f = 1 + βp².
#[derive(Debug, Clone, Copy)]
pub struct MLParams {
    /// Target mean deformed position ⟨𝒳⟩ = ξ.
    pub xi: f64,
    /// Deformation parameter, β > 0.
    pub beta: f64,
}

impl MLParams {
    /// Minimum grid half-width for the norm to be accurate to [`ML_NORM_TOL`].
    pub fn min_halfwidth(&self) -> f64 {
        (4.0 / (3.0 * PI * ML_NORM_TOL)).powf(1.0 / 3.0) / self.beta.sqrt()
    }

    /// A grid adequate for the state's norm and phase structure.  The tails
    /// fall off only like p⁻², so half-widths scale like `margin/√β`; the
    /// default margin targets the norm tolerance.
    pub fn adequate_grid(&self, units: &PhysicalUnits, halfwidth_factor: f64) -> Result<MomentumGrid> {
        let halfwidth = self.min_halfwidth() * halfwidth_factor.max(1.0);
        // the finite-difference kernel needs ~16 points per phase oscillation
        // for 1e-6 work, hence the boost on the ξ-driven frequency
        let x_freq = 16.0 * self.xi.abs() / units.hbar + 30.0 * self.beta.sqrt() + 4.0;
        MomentumGrid::adapted(0.0, halfwidth, x_freq)
    }
}

/// φ^{ML}_ξ(p) = √(2√β/π) (1+βp²)^{−1} exp{−i (ξ/ħ√β) atan(√β p)}.
///
/// Normalized analytically; the grid must reach `min_halfwidth` so the
/// discrete norm stays within 1e−8 of one.
pub fn ml_state(
    params: &MLParams,
    grid: MomentumGrid,
    units: &PhysicalUnits,
) -> Result<GridWaveFunction> {
    let MLParams { xi, beta } = *params;
    if !(beta > 0.0) {
        return Err(Error::Invalid("deformation parameter beta must be positive".into()));
    }
    let need = params.min_halfwidth();
    if -grid.p_min() < need || grid.p_max() < need {
        return Err(Error::GridTooNarrow(format!(
            "minimum-length state needs half-width {need:.1}, grid reaches {:.1}",
            grid.p_max().min(-grid.p_min())
        )));
    }
    let amp = (2.0 * beta.sqrt() / PI).sqrt();
    let sqrt_beta = beta.sqrt();
    let phase_scale = xi / (units.hbar * sqrt_beta);
    Ok(GridWaveFunction::from_fn(grid, |p| {
        let envelope = amp / (1.0 + beta * p * p);
        let phase = C64::new(0.0, -phase_scale * (sqrt_beta * p).atan()).exp();
        phase * envelope
    }))
}

/// ξ̂ψ = (𝒳 + iħβ𝒫)ψ; minimum-length states are its eigenstates.
pub fn xi_apply(
    params: &MLParams,
    psi: &GridWaveFunction,
    units: &PhysicalUnits,
) -> Result<GridWaveFunction> {
    let spec = DeformationSpec::quadratic(params.beta)?;
    let x_part = ops::apply_deformed_x(&spec, units, psi);
    let p_part = psi
        .scaled_by(|p| p)
        .scaled(C64::new(0.0, units.hbar * params.beta));
    x_part.add(&p_part)
}

/// Deformed-position eigenstate
/// φ_x(p) = (∫dp̃/f)^{−1/2} f(p)^{−1/2} exp{−(i/ħ) x k(p)}.
///
/// Only defined when ∫dp̃/f converges (finite momentum cutoff); otherwise the
/// prefactor vanishes and the state is not normalizable.
pub fn deformed_eigenstate(
    spec: &DeformationSpec,
    x: f64,
    grid: MomentumGrid,
    units: &PhysicalUnits,
) -> Result<GridWaveFunction> {
    let total = match deform::total_inverse_f_integral(spec)? {
        deform::Cutoff::Finite(v) => v,
        deform::Cutoff::Infinite => return Err(Error::NotNormalizable),
    };
    let prefactor = 1.0 / total.sqrt();
    let ks = deform::momentum_map_on_grid(spec, &grid)?;
    let hbar = units.hbar;
    let amplitudes = grid
        .points()
        .enumerate()
        .map(|(j, p)| {
            let envelope = prefactor / spec.f(p).sqrt();
            C64::new(0.0, -x * ks[j] / hbar).exp() * envelope
        })
        .collect();
    GridWaveFunction::from_amplitudes(grid, amplitudes)
}

// ---------------------------------------------------------------------------
// windowed diagnostics
//
// Deformed-position eigenstates decay only like f(p)^{-1/2}; on any finite
// grid their global norms are boundary-dominated, so eigen-residuals and
// uncertainties are measured over a central window.

fn window_bounds(grid: &MomentumGrid, fraction: f64) -> (usize, usize) {
    let n = grid.n_points();
    let trim = ((1.0 - fraction.clamp(0.0, 1.0)) / 2.0 * n as f64).round() as usize;
    let hi = n - 1 - trim;
    (trim, hi.max(trim + 1))
}

/// L² norm of the central `fraction` of the grid span.
pub fn windowed_norm(psi: &GridWaveFunction, fraction: f64) -> f64 {
    let (lo, hi) = window_bounds(psi.grid(), fraction);
    let h = psi.grid().step();
    let amp = psi.amplitudes();
    let mut acc = 0.5 * (amp[lo].norm_sqr() + amp[hi].norm_sqr());
    for v in &amp[lo + 1..hi] {
        acc += v.norm_sqr();
    }
    (acc * h).sqrt()
}

/// ‖𝒳φ − xφ‖/‖φ‖ over the central `fraction` of the grid span.
pub fn eigenstate_residual(
    spec: &DeformationSpec,
    units: &PhysicalUnits,
    x: f64,
    phi: &GridWaveFunction,
    fraction: f64,
) -> Result<f64> {
    let applied = ops::apply_deformed_x(spec, units, phi);
    let shifted = applied.sub(&phi.scaled(C64::new(x, 0.0)))?;
    Ok(windowed_norm(&shifted, fraction) / windowed_norm(phi, fraction))
}

/// Δ𝒳 measured over a central window (for states whose global moments are
/// dominated by non-normalizable tails).
pub fn windowed_deformed_dx(
    spec: &DeformationSpec,
    units: &PhysicalUnits,
    phi: &GridWaveFunction,
    fraction: f64,
) -> Result<f64> {
    let applied = ops::apply_deformed_x(spec, units, phi);
    let (lo, hi) = window_bounds(phi.grid(), fraction);
    let h = phi.grid().step();
    let amp = phi.amplitudes();
    let app = applied.amplitudes();
    let mut mass = 0.0;
    let mut mean = C64::new(0.0, 0.0);
    let mut msq = 0.0;
    for j in lo..=hi {
        let w = if j == lo || j == hi { 0.5 * h } else { h };
        mass += w * amp[j].norm_sqr();
        mean += amp[j].conj() * app[j] * w;
        msq += w * app[j].norm_sqr();
    }
    let mean = mean.re / mass;
    let var = msq / mass - mean * mean;
    Ok(var.max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// closed-form Gaussian Δ𝒳 and its minimizer

/// Deformed position uncertainty of ψ_s for f = 1 + βp², in closed form:
///
/// Δ𝒳² = (ħ²a/2)(1 + β/a + (7/4)β²/a²) + ħ²aβp₀²(1 + βp₀²/2)
///       + (5/2)ħ²β²p₀² + (2β²/a)x₀²p₀² + (β²/2a²)x₀².
pub fn gaussian_deformed_dx(params: &SqueezedParams, beta: f64, units: &PhysicalUnits) -> f64 {
    let SqueezedParams { a, x0, p0 } = *params;
    let h2 = units.hbar * units.hbar;
    let bracket = h2 * a / 2.0 * (1.0 + beta / a + 1.75 * beta * beta / (a * a))
        + h2 * a * beta * p0 * p0 * (1.0 + 0.5 * beta * p0 * p0)
        + 2.5 * h2 * beta * beta * p0 * p0
        + 2.0 * beta * beta / a * x0 * x0 * p0 * p0
        + beta * beta / (2.0 * a * a) * x0 * x0;
    bracket.sqrt()
}

/// Result of minimizing the Gaussian Δ𝒳 over the squeezing parameter.
#[derive(Debug, Clone, Copy)]
pub struct MinDx {
    pub a_star: f64,
    pub dx_min: f64,
}

/// Minimize [`gaussian_deformed_dx`] over a ∈ (0, ∞) by golden section.
///
/// The bracket starts at [β/100, 100β] (the stationary point sits at Θ(β))
/// and expands geometrically if the minimum touches an endpoint.  The result
/// never falls below the global floor ħ√β.
pub fn min_dx_over_gaussians(
    beta: f64,
    x0: f64,
    p0: f64,
    units: &PhysicalUnits,
) -> Result<MinDx> {
    if !(beta > 0.0) {
        return Err(Error::Invalid("beta must be positive".into()));
    }
    let f = |a: f64| gaussian_deformed_dx(&SqueezedParams { a, x0, p0 }, beta, units);
    let mut lo = beta / 100.0;
    let mut hi = beta * 100.0;
    let mut a_star = 0.0;
    for _ in 0..40 {
        a_star = golden_section_min(&f, lo, hi, 1e-10);
        let edge_lo = a_star <= lo * 1.01;
        let edge_hi = a_star >= hi / 1.01;
        if edge_lo {
            lo /= 100.0;
        }
        if edge_hi {
            hi *= 100.0;
        }
        if !(edge_lo || edge_hi) {
            break;
        }
    }
    Ok(MinDx { a_star, dx_min: f(a_star) })
}

/// Golden-section minimum of a unimodal function on [lo, hi] to relative
/// tolerance `rel_tol` in the argument.
fn golden_section_min(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > rel_tol * (a.abs() + b.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
