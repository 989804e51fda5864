//! Canonical Weyl transform machinery: Wigner functions of grid states by
//! direct quadrature over the chord variable, marginals, phase-space
//! expectation values, and the closed-form Weyl symbols of the deformed
//! position operator.
//!
//! The deformed theory keeps the canonical transform: states live in the
//! ordinary Hilbert space, so W(x,p) = (1/2πħ)∫ e^{ixu/ħ} ψ(p+u/2) ψ*(p−u/2) du
//! (the chord is ⟨p+u/2|ρ̂|p−u/2⟩), with ψ interpolated linearly at
//! half-grid offsets.

use rayon::prelude::*;

use crate::deform::DeformationSpec;
use crate::error::{Error, Result};
use crate::grid::GridWaveFunction;
use crate::units::PhysicalUnits;
use crate::C64;

/// W(x,p) sampled on a rectangular phase-space grid.
#[derive(Debug, Clone)]
pub struct PhaseSpaceField {
    x_grid: Vec<f64>,
    p_grid: Vec<f64>,
    /// Row-major: values[ix][ip].
    values: Vec<Vec<f64>>,
}

impl PhaseSpaceField {
    pub fn x_grid(&self) -> &[f64] {
        &self.x_grid
    }

    pub fn p_grid(&self) -> &[f64] {
        &self.p_grid
    }

    pub fn value(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix][ip]
    }

    pub fn x_step(&self) -> f64 {
        self.x_grid[1] - self.x_grid[0]
    }

    pub fn p_step(&self) -> f64 {
        self.p_grid[1] - self.p_grid[0]
    }

    /// ∬ W dx dp by trapezoidal quadrature.
    pub fn total_mass(&self) -> f64 {
        self.expectation(|_, _| 1.0)
    }

    /// ∬ symbol(x,p) · W(x,p) dx dp.
    pub fn expectation(&self, symbol: impl Fn(f64, f64) -> f64) -> f64 {
        let nx = self.x_grid.len();
        let np = self.p_grid.len();
        let mut acc = 0.0;
        for ix in 0..nx {
            let wx = if ix == 0 || ix == nx - 1 { 0.5 } else { 1.0 };
            for ip in 0..np {
                let wp = if ip == 0 || ip == np - 1 { 0.5 } else { 1.0 };
                acc += wx * wp * symbol(self.x_grid[ix], self.p_grid[ip]) * self.values[ix][ip];
            }
        }
        acc * self.x_step() * self.p_step()
    }

    /// (momentum density ∫W dx, position density ∫W dp).
    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let nx = self.x_grid.len();
        let np = self.p_grid.len();
        let dx = self.x_step();
        let dp = self.p_step();
        let momentum = (0..np)
            .map(|ip| {
                let mut acc = 0.0;
                for ix in 0..nx {
                    let w = if ix == 0 || ix == nx - 1 { 0.5 } else { 1.0 };
                    acc += w * self.values[ix][ip];
                }
                acc * dx
            })
            .collect();
        let position = (0..nx)
            .map(|ix| {
                let mut acc = 0.0;
                for ip in 0..np {
                    let w = if ip == 0 || ip == np - 1 { 0.5 } else { 1.0 };
                    acc += w * self.values[ix][ip];
                }
                acc * dp
            })
            .collect();
        (momentum, position)
    }
}

/// Uniform centered position grid with an odd point count.
pub fn centered_x_grid(center: f64, halfwidth: f64, count: usize) -> Vec<f64> {
    let count = if count % 2 == 0 { count + 1 } else { count };
    let step = 2.0 * halfwidth / (count as f64 - 1.0);
    (0..count).map(|i| center - halfwidth + i as f64 * step).collect()
}

/// Wigner function of a normalized pure state on the full momentum grid.
pub fn wigner_function(
    psi: &GridWaveFunction,
    x_grid: &[f64],
    hbar: f64,
) -> Result<PhaseSpaceField> {
    wigner_function_strided(psi, x_grid, 1, hbar)
}

/// Wigner function with the momentum axis decimated by `stride` (the chord
/// quadrature still runs over the full wavefunction grid).
pub fn wigner_function_strided(
    psi: &GridWaveFunction,
    x_grid: &[f64],
    stride: usize,
    hbar: f64,
) -> Result<PhaseSpaceField> {
    if x_grid.len() < 2 {
        return Err(Error::EmptyXGrid);
    }
    if stride == 0 {
        return Err(Error::Invalid("stride must be positive".into()));
    }
    let dx = x_grid[1] - x_grid[0];
    for w in x_grid.windows(2) {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.abs().max(1.0) {
            return Err(Error::Invalid("x grid must be uniform".into()));
        }
    }
    if (psi.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::Invalid("state must be normalized".into()));
    }

    let grid = psi.grid();
    let n = grid.n_points();
    let h = grid.step();
    let amp = psi.amplitudes();
    let p_indices: Vec<usize> = (0..n).step_by(stride).collect();
    let p_grid: Vec<f64> = p_indices.iter().map(|&k| grid.point(k)).collect();

    // ψ at integer (even j) and midpoint (odd j) offsets, zero off-grid
    let sample = |idx2: i64| -> C64 {
        // idx2 counts half-steps from the grid origin
        if idx2.rem_euclid(2) == 0 {
            let i = idx2 / 2;
            if i < 0 || i >= n as i64 {
                C64::new(0.0, 0.0)
            } else {
                amp[i as usize]
            }
        } else {
            let lo = (idx2 - 1) / 2;
            let hi = lo + 1;
            let a = if lo < 0 || lo >= n as i64 { C64::new(0.0, 0.0) } else { amp[lo as usize] };
            let b = if hi < 0 || hi >= n as i64 { C64::new(0.0, 0.0) } else { amp[hi as usize] };
            0.5 * (a + b)
        }
    };

    let j_max = 2 * (n as i64 - 1);
    let prefactor = h / (2.0 * std::f64::consts::PI * hbar);

    // one row of F per momentum point, then a phase sum per x
    let rows: Vec<(Vec<f64>, f64)> = p_indices
        .par_iter()
        .map(|&k| {
            let k2 = 2 * k as i64;
            let mut chord = Vec::with_capacity((2 * j_max + 1) as usize);
            for j in -j_max..=j_max {
                let plus = sample(k2 + j);
                let minus = sample(k2 - j);
                chord.push(plus * minus.conj());
            }
            let mut row = Vec::with_capacity(x_grid.len());
            let mut max_im: f64 = 0.0;
            for &x in x_grid {
                let step = C64::new(0.0, x * h / hbar).exp();
                let mut phase = C64::new(0.0, -x * (j_max as f64) * h / hbar).exp();
                let mut acc = C64::new(0.0, 0.0);
                for f in &chord {
                    acc += phase * f;
                    phase *= step;
                }
                let w = acc * prefactor;
                max_im = max_im.max(w.im.abs());
                row.push(w.re);
            }
            (row, max_im)
        })
        .collect();

    let max_im = rows.iter().map(|(_, im)| *im).fold(0.0, f64::max);
    if max_im > 1e-6 {
        return Err(Error::AsymmetricKernel(max_im));
    }

    // transpose to values[ix][ip]
    let mut values = vec![vec![0.0; p_grid.len()]; x_grid.len()];
    for (ip, (row, _)) in rows.iter().enumerate() {
        for (ix, v) in row.iter().enumerate() {
            values[ix][ip] = *v;
        }
    }
    Ok(PhaseSpaceField { x_grid: x_grid.to_vec(), p_grid, values })
}

/// Weyl symbol of the deformed position: 𝒳̃(x,p) = x·f(p).
pub fn weyl_symbol_deformed_x(spec: &DeformationSpec, x: f64, p: f64) -> f64 {
    x * spec.f(p)
}

/// Weyl symbol of its square: 𝒳²̃(x,p) = x²f²(p) + ħ²f′²(p)/4.
pub fn weyl_symbol_deformed_x2(
    spec: &DeformationSpec,
    units: &PhysicalUnits,
    x: f64,
    p: f64,
) -> f64 {
    let f = spec.f(p);
    let fp = spec.f_prime(p);
    x * x * f * f + units.hbar * units.hbar * fp * fp / 4.0
}
