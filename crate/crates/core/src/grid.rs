//! Discretized momentum-space Hilbert space: uniform grids with trapezoidal
//! quadrature, wavefunctions, spectral differentiation, inner products,
//! expectation values, and the Fourier map to position amplitudes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fourier;
use crate::units::PhysicalUnits;
use crate::C64;

/// Endpoint amplitudes above this (relative to the peak) trigger the
/// boundary-decay warning on spectral derivatives.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Threshold of the Schwartz-membership heuristic.
pub const SCHWARTZ_TOL: f64 = 1e-10;

/// Uniform discretization of momentum space.
///
/// Quadrature is trapezoidal: interior weights equal the step, endpoint
/// weights are half, so the weights sum to `p_max - p_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    p_min: f64,
    p_max: f64,
    n_points: usize,
}

impl MomentumGrid {
    pub fn new(p_min: f64, p_max: f64, n_points: usize) -> Result<Self> {
        if !(p_min.is_finite() && p_max.is_finite()) || p_min >= p_max {
            return Err(Error::Invalid("grid bounds must be finite with p_min < p_max".into()));
        }
        if n_points < 16 {
            return Err(Error::Invalid("grid needs at least 16 points".into()));
        }
        Ok(Self { p_min, p_max, n_points })
    }

    /// Symmetric grid spanning `[-extent, extent]`.
    pub fn symmetric(extent: f64, n_points: usize) -> Result<Self> {
        Self::new(-extent, extent, n_points)
    }

    /// Default grid: p ∈ ±40·√2·K₀ with 2048 points.  Wide enough for every
    /// rapidly decaying state used here at deformations β ≤ 0.1.
    pub fn default_for(units: &PhysicalUnits) -> Self {
        let extent = 40.0 * (2.0f64).sqrt() * units.k0();
        Self::symmetric(extent, 2048).expect("default grid is valid")
    }

    /// Grid centered at `p_center` reaching `p_halfwidth` to each side, with
    /// the step chosen so the conjugate (position) range covers
    /// `max_x_frequency`.  The point count is rounded up to a 5-smooth number
    /// to keep Fourier transforms fast.
    pub fn adapted(p_center: f64, p_halfwidth: f64, max_x_frequency: f64) -> Result<Self> {
        if !(p_halfwidth > 0.0 && max_x_frequency > 0.0) {
            return Err(Error::Invalid("adapted grid needs positive extents".into()));
        }
        let h_max = PI / max_x_frequency;
        let raw = (2.0 * p_halfwidth / h_max).ceil() as usize + 1;
        let n = next_smooth(raw.max(16));
        Self::new(p_center - p_halfwidth, p_center + p_halfwidth, n)
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_points as f64 - 1.0)
    }

    pub fn point(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.step()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }

    /// Trapezoidal quadrature weight of point `j`.
    pub fn weight(&self, j: usize) -> f64 {
        let h = self.step();
        if j == 0 || j + 1 == self.n_points {
            h / 2.0
        } else {
            h
        }
    }

    /// Quadrature of a scalar sampled on the grid.
    pub fn integrate(&self, f: impl Fn(usize, f64) -> f64) -> f64 {
        let h = self.step();
        let n = self.n_points;
        let mut acc = 0.5 * (f(0, self.point(0)) + f(n - 1, self.point(n - 1)));
        for j in 1..n - 1 {
            acc += f(j, self.point(j));
        }
        acc * h
    }
}

/// Next integer ≥ `m` of the form 2^a·3^b·5^c.
fn next_smooth(m: usize) -> usize {
    let mut n = m;
    loop {
        let mut r = n;
        for f in [2, 3, 5] {
            while r % f == 0 {
                r /= f;
            }
        }
        if r == 1 {
            return n;
        }
        n += 1;
    }
}

/// Complex amplitudes on a [`MomentumGrid`], representing ψ(p) ∈ L²(ℝ, dp).
#[derive(Debug, Clone)]
pub struct GridWaveFunction {
    grid: MomentumGrid,
    amplitudes: Vec<C64>,
    /// Set by [`differentiate`](Self::differentiate) when the input violated
    /// the boundary-decay precondition (non-fatal).
    pub decay_warning: bool,
}

impl GridWaveFunction {
    pub fn from_amplitudes(grid: MomentumGrid, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::Invalid(format!(
                "amplitude count {} does not match grid size {}",
                amplitudes.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, amplitudes, decay_warning: false })
    }

    pub fn from_fn(grid: MomentumGrid, f: impl Fn(f64) -> C64) -> Self {
        let amplitudes = grid.points().map(f).collect();
        Self { grid, amplitudes, decay_warning: false }
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.integrate(|j, _| self.amplitudes[j].norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescaled copy with unit L² norm.  Idempotent to round-off.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        let scale = if n > 0.0 { 1.0 / n } else { 0.0 };
        let amplitudes = self.amplitudes.iter().map(|z| z * scale).collect();
        Self { grid: self.grid, amplitudes, decay_warning: self.decay_warning }
    }

    /// Spectral (discrete-Fourier) derivative of order 1 or 2.
    ///
    /// When the state has not decayed below [`BOUNDARY_TOL`] at the grid ends
    /// the result carries `decay_warning = true`; differentiation itself
    /// remains defined.
    pub fn differentiate(&self, order: u32) -> Self {
        assert!(order == 1 || order == 2, "only orders 1 and 2 are supported");
        let warn = !fourier::boundary_decay_ok(&self.amplitudes, BOUNDARY_TOL);
        let amplitudes = fourier::spectral_derivative(&self.amplitudes, self.grid.step(), order);
        Self { grid: self.grid, amplitudes, decay_warning: warn || self.decay_warning }
    }

    /// Derivative with the kernel chosen by boundary decay: spectral when the
    /// state has decayed at the ends, a 7-point finite-difference stencil when
    /// it has not (algebraic tails would otherwise ring through the periodic
    /// seam and be amplified by f(p) at large |p|).
    pub fn derivative_adaptive(&self, order: u32) -> Self {
        if fourier::boundary_decay_ok(&self.amplitudes, BOUNDARY_TOL) {
            self.differentiate(order)
        } else {
            let amplitudes = fourier::fd6_derivative(&self.amplitudes, self.grid.step(), order);
            Self { grid: self.grid, amplitudes, decay_warning: self.decay_warning }
        }
    }

    /// Pointwise multiplication by a real function of p.
    pub fn scaled_by(&self, f: impl Fn(f64) -> f64) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(self.grid.points())
            .map(|(z, p)| z * f(p))
            .collect();
        Self { grid: self.grid, amplitudes, decay_warning: self.decay_warning }
    }

    /// Pointwise complex scale.
    pub fn scaled(&self, c: C64) -> Self {
        let amplitudes = self.amplitudes.iter().map(|z| z * c).collect();
        Self { grid: self.grid, amplitudes, decay_warning: self.decay_warning }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            grid: self.grid,
            amplitudes,
            decay_warning: self.decay_warning || other.decay_warning,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid,
            amplitudes,
            decay_warning: self.decay_warning || other.decay_warning,
        })
    }

    /// Schwartz-membership heuristic: |ψ| and its first two spectral
    /// derivatives stay below [`SCHWARTZ_TOL`] over the outer 5% of the grid.
    pub fn passes_schwartz_heuristic(&self) -> bool {
        let n = self.grid.n_points();
        let edge = ((n as f64 * 0.025).floor() as usize).max(1);
        let d1 = self.differentiate(1);
        let d2 = self.differentiate(2);
        let check = |amp: &[C64]| {
            amp[..edge]
                .iter()
                .chain(amp[n - edge..].iter())
                .all(|z| z.norm() < SCHWARTZ_TOL)
        };
        check(&self.amplitudes) && check(&d1.amplitudes) && check(&d2.amplitudes)
    }

    /// Canonical position-space amplitude (1/√(2πħ)) ∫ e^{ipx/ħ} ψ(p) dp at
    /// each requested x.
    pub fn position_amplitude(&self, x_grid: &[f64], hbar: f64) -> Result<Vec<C64>> {
        if x_grid.is_empty() {
            return Err(Error::EmptyXGrid);
        }
        let norm = 1.0 / (2.0 * PI * hbar).sqrt();
        let out = x_grid
            .iter()
            .map(|&x| {
                let mut acc = C64::new(0.0, 0.0);
                for (j, p) in self.grid.points().enumerate() {
                    let phase = C64::new(0.0, p * x / hbar).exp();
                    acc += phase * self.amplitudes[j] * self.grid.weight(j);
                }
                acc * norm
            })
            .collect();
        Ok(out)
    }
}

/// Quadrature approximation of ∫ φ*(p) ψ(p) dp.
///
/// Conjugate-symmetric exactly: `inner_product(φ, ψ) == conj(inner_product(ψ, φ))`.
pub fn inner_product(phi: &GridWaveFunction, psi: &GridWaveFunction) -> Result<C64> {
    if phi.grid != psi.grid {
        return Err(Error::GridMismatch);
    }
    let h = phi.grid.step();
    let n = phi.grid.n_points();
    let mut acc = C64::new(0.0, 0.0);
    acc += phi.amplitudes[0].conj() * psi.amplitudes[0] * 0.5;
    for j in 1..n - 1 {
        acc += phi.amplitudes[j].conj() * psi.amplitudes[j];
    }
    acc += phi.amplitudes[n - 1].conj() * psi.amplitudes[n - 1] * 0.5;
    Ok(acc * h)
}

/// ⟨ψ|Âψ⟩ for an operator action.
pub fn expectation<F>(psi: &GridWaveFunction, apply: F) -> Result<C64>
where
    F: Fn(&GridWaveFunction) -> Result<GridWaveFunction>,
{
    let applied = apply(psi)?;
    inner_product(psi, &applied)
}

/// √(⟨Â²⟩ − ⟨Â⟩²) for a symmetric operator action on a normalized state.
///
/// ⟨Â²⟩ is evaluated as ‖Âψ‖², which equals ⟨ψ|Â²ψ⟩ for symmetric Â.  The
/// symmetry claim is checked through the imaginary part of ⟨Â⟩.
pub fn uncertainty<F>(psi: &GridWaveFunction, apply: F) -> Result<f64>
where
    F: Fn(&GridWaveFunction) -> Result<GridWaveFunction>,
{
    let applied = apply(psi)?;
    let mean = inner_product(psi, &applied)?;
    if mean.im.abs() > 1e-8 * mean.norm() + 1e-10 {
        return Err(Error::NonSymmetric);
    }
    let mean_sq = inner_product(&applied, &applied)?.re;
    let var = mean_sq - mean.re * mean.re;
    if var < -1e-10 {
        return Err(Error::NonSymmetric);
    }
    Ok(var.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{squeezed_state, SqueezedParams};

    fn units() -> PhysicalUnits {
        PhysicalUnits::default()
    }

    fn gaussian(grid: MomentumGrid, a: f64, p0: f64) -> GridWaveFunction {
        let norm = (a / PI).powf(0.25);
        GridWaveFunction::from_fn(grid, |p| {
            C64::new(norm * (-(a / 2.0) * (p - p0) * (p - p0)).exp(), 0.0)
        })
    }

    #[test]
    fn default_grid_shape() {
        let g = MomentumGrid::default_for(&units());
        assert_eq!(g.n_points(), 2048);
        assert!((g.p_max() - 40.0).abs() < 1e-12);
        let wsum: f64 = (0..g.n_points()).map(|j| g.weight(j)).sum();
        assert!((wsum - (g.p_max() - g.p_min())).abs() < 1e-9);
    }

    #[test]
    fn normalized_gaussian_has_unit_norm() {
        let g = MomentumGrid::default_for(&units());
        let psi = gaussian(g, 1.0, 0.0);
        assert!((psi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn distant_gaussians_are_orthogonal() {
        // Gaussians with centers ~21 widths apart: overlap e^{-d^2/(8 sigma^2)}
        let g = MomentumGrid::default_for(&units());
        let phi = gaussian(g, 1.0, -7.5);
        let psi = gaussian(g, 1.0, 7.5);
        let ip = inner_product(&phi, &psi).unwrap();
        assert!(ip.norm() < 1e-12);
    }

    #[test]
    fn gaussian_overlap_matches_analytic_value() {
        // ⟨ψ(p0=0)|ψ(p0=1)⟩ for unit-variance Gaussians (a = 1/2):
        // magnitude exp(-1/8)
        let g = MomentumGrid::default_for(&units());
        let phi = gaussian(g, 0.5, 0.0);
        let psi = gaussian(g, 0.5, 1.0);
        let ip = inner_product(&phi, &psi).unwrap();
        let expect = (-1.0f64 / 8.0).exp();
        assert!((ip.norm() - expect).abs() < 1e-10);
        assert!((ip.norm() - 0.8825).abs() < 1e-4);
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        let g = MomentumGrid::default_for(&units());
        let phi = GridWaveFunction::from_fn(g, |p| {
            C64::new((-0.5 * p * p).exp(), 0.3 * (-0.4 * p * p).exp())
        });
        let psi = GridWaveFunction::from_fn(g, |p| {
            C64::new((-0.3 * (p - 1.0) * (p - 1.0)).exp(), -0.1 * (-0.2 * p * p).exp())
        });
        let a = inner_product(&phi, &psi).unwrap();
        let b = inner_product(&psi, &phi).unwrap();
        assert_eq!(a, b.conj());
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let g1 = MomentumGrid::symmetric(40.0, 2048).unwrap();
        let g2 = MomentumGrid::symmetric(40.0, 1024).unwrap();
        let phi = gaussian(g1, 1.0, 0.0);
        let psi = gaussian(g2, 1.0, 0.0);
        assert!(matches!(inner_product(&phi, &psi), Err(Error::GridMismatch)));
    }

    #[test]
    fn derivative_of_even_gaussian_vanishes_at_origin() {
        let g = MomentumGrid::symmetric(40.0, 2049).unwrap();
        let psi = GridWaveFunction::from_fn(g, |p| C64::new((-0.5 * p * p).exp(), 0.0));
        let d = psi.differentiate(1);
        // nearest grid point to p = 0
        let j = (0.0 - g.p_min()) / g.step();
        let j = j.round() as usize;
        assert!(g.point(j).abs() < 1e-9);
        assert!(d.amplitudes()[j].norm() < 1e-8);
        assert!(!d.decay_warning);
    }

    #[test]
    fn derivative_matches_analytic_gaussian_derivative() {
        let g = MomentumGrid::default_for(&units());
        let psi = GridWaveFunction::from_fn(g, |p| C64::new((-0.5 * p * p).exp(), 0.0));
        let d = psi.differentiate(1);
        for (j, p) in g.points().enumerate().step_by(17) {
            let expect = -p * (-0.5 * p * p).exp();
            assert!((d.amplitudes()[j].re - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn boundary_violation_sets_warning() {
        let g = MomentumGrid::symmetric(10.0, 256).unwrap();
        let psi = GridWaveFunction::from_fn(g, |p| C64::new(1.0 / (1.0 + p * p), 0.0));
        let d = psi.differentiate(1);
        assert!(d.decay_warning);
    }

    #[test]
    fn expectation_of_identity_and_momentum() {
        let g = MomentumGrid::default_for(&units());
        let psi = squeezed_state(&SqueezedParams { a: 1.0, x0: 0.0, p0: 2.0 }, g, &units()).unwrap();
        let one = expectation(&psi, |w| Ok(w.clone())).unwrap();
        assert!((one.re - 1.0).abs() < 1e-10);
        let p_mean = expectation(&psi, |w| Ok(w.scaled_by(|p| p))).unwrap();
        assert!((p_mean.re - 2.0).abs() < 1e-8);
        assert!(p_mean.im.abs() < 1e-12);
    }

    #[test]
    fn position_expectation_via_canonical_x() {
        let u = units();
        let g = MomentumGrid::default_for(&u);
        let psi = squeezed_state(&SqueezedParams { a: 1.0, x0: -1.5, p0: 0.0 }, g, &u).unwrap();
        let x_mean = expectation(&psi, |w| {
            Ok(w.derivative_adaptive(1).scaled(C64::new(0.0, u.hbar)))
        })
        .unwrap();
        assert!((x_mean.re - (-1.5)).abs() < 1e-8);
    }

    #[test]
    fn squeezed_uncertainties_saturate_heisenberg() {
        let u = units();
        let g = MomentumGrid::default_for(&u);
        let psi = squeezed_state(&SqueezedParams { a: 1.0, x0: 0.0, p0: 0.0 }, g, &u).unwrap();
        let dp = uncertainty(&psi, |w| Ok(w.scaled_by(|p| p))).unwrap();
        let dx = uncertainty(&psi, |w| {
            Ok(w.derivative_adaptive(1).scaled(C64::new(0.0, u.hbar)))
        })
        .unwrap();
        assert!((dp - (0.5f64).sqrt()).abs() < 1e-8);
        assert!((dx - (0.5f64).sqrt()).abs() < 1e-8);
        assert!((dx * dp - 0.5 * u.hbar).abs() < 1e-8);
    }

    #[test]
    fn uncertainty_rejects_nonsymmetric_action() {
        let g = MomentumGrid::default_for(&units());
        let psi = gaussian(g, 1.0, 1.0);
        // multiplication by i·p has imaginary expectation
        let r = uncertainty(&psi, |w| Ok(w.scaled_by(|p| p).scaled(C64::new(0.0, 1.0))));
        assert!(matches!(r, Err(Error::NonSymmetric)));
    }

    #[test]
    fn position_amplitude_peaks_at_x0_and_obeys_parseval() {
        let u = units();
        let g = MomentumGrid::default_for(&u);
        let psi = squeezed_state(&SqueezedParams { a: 1.0, x0: 3.0, p0: 0.0 }, g, &u).unwrap();
        let xs: Vec<f64> = (0..281).map(|i| -4.0 + i as f64 * 0.05).collect();
        let amp = psi.position_amplitude(&xs, u.hbar).unwrap();
        let (jmax, _) = amp
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap();
        assert!((xs[jmax] - 3.0).abs() < 0.05 + 1e-12);
        let dx = xs[1] - xs[0];
        let mass: f64 = amp.iter().map(|z| z.norm_sqr() * dx).sum();
        assert!((mass - 1.0).abs() < 1e-6);

        // width matches Δx = √(ħ²a/2) for the centered case
        let psi0 = squeezed_state(&SqueezedParams { a: 1.0, x0: 0.0, p0: 0.0 }, g, &u).unwrap();
        let amp0 = psi0.position_amplitude(&xs, u.hbar).unwrap();
        let mean: f64 = amp0.iter().zip(&xs).map(|(z, x)| x * z.norm_sqr() * dx).sum();
        let msq: f64 = amp0.iter().zip(&xs).map(|(z, x)| x * x * z.norm_sqr() * dx).sum();
        let width = (msq - mean * mean).sqrt();
        assert!((width - (0.5f64).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn empty_x_grid_is_an_error() {
        let g = MomentumGrid::default_for(&units());
        let psi = gaussian(g, 1.0, 0.0);
        assert!(matches!(psi.position_amplitude(&[], 1.0), Err(Error::EmptyXGrid)));
    }

    #[test]
    fn quadrature_converges_under_refinement() {
        let u = units();
        let coarse = MomentumGrid::symmetric(40.0, 2048).unwrap();
        let fine = MomentumGrid::symmetric(40.0, 4096).unwrap();
        let val = |g: MomentumGrid| {
            let phi = gaussian(g, 1.0, 0.0);
            let psi = gaussian(g, 0.7, 0.5);
            inner_product(&phi, &psi).unwrap()
        };
        let _ = u;
        assert!((val(coarse) - val(fine)).norm() < 1e-8);
    }

    #[test]
    fn integration_by_parts_antisymmetry() {
        let g = MomentumGrid::default_for(&units());
        let phi = GridWaveFunction::from_fn(g, |p| {
            C64::new((-0.4 * p * p).exp(), 0.2 * (-0.5 * (p - 0.3) * (p - 0.3)).exp())
        });
        let psi = GridWaveFunction::from_fn(g, |p| {
            C64::new((-0.6 * (p + 0.4) * (p + 0.4)).exp(), 0.0)
        });
        let lhs = inner_product(&psi, &phi.differentiate(1)).unwrap();
        let rhs = inner_product(&psi.differentiate(1), &phi).unwrap();
        assert!((lhs + rhs).norm() < 1e-8);
    }

    #[test]
    fn normalize_is_idempotent() {
        let g = MomentumGrid::default_for(&units());
        let psi = GridWaveFunction::from_fn(g, |p| C64::new(0.3 * (-0.5 * p * p).exp(), 0.0));
        let once = psi.normalized();
        let twice = once.normalized();
        let diff: f64 = once
            .amplitudes()
            .iter()
            .zip(twice.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn operations_are_deterministic() {
        let g = MomentumGrid::default_for(&units());
        let psi = gaussian(g, 1.3, 0.7);
        let d1 = psi.differentiate(1);
        let d2 = psi.differentiate(1);
        assert_eq!(d1.amplitudes(), d2.amplitudes());
        let a = inner_product(&psi, &d1).unwrap();
        let b = inner_product(&psi, &d2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn schwartz_heuristic_separates_gaussian_from_lorentzian() {
        let g = MomentumGrid::default_for(&units());
        let gaussian = GridWaveFunction::from_fn(g, |p| C64::new((-0.5 * p * p).exp(), 0.0))
            .normalized();
        assert!(gaussian.passes_schwartz_heuristic());
        let lorentzian = GridWaveFunction::from_fn(g, |p| C64::new(1.0 / (1.0 + p * p), 0.0))
            .normalized();
        assert!(!lorentzian.passes_schwartz_heuristic());
    }
}
