//! The deformed harmonic oscillator H = ħω(𝒫²/4K₀² + 𝒳²/4L₀²) with
//! 𝒳 = √f(p̂) x̂ √f(p̂) for f = 1 + βp², its exact diagonalization in the
//! truncated number basis, the perturbative energy corrections, and the
//! momentum-space form of the perturbation potential.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{build_ladder, FockOperator, FockVector};
use crate::grid::{GridWaveFunction, MomentumGrid};
use crate::units::PhysicalUnits;
use crate::C64;

/// Buffer rows appended to the requested truncation before composing
/// operators; the retained block then carries true matrix elements instead of
/// truncated-product artifacts.
const GUARD: usize = 40;

#[derive(Debug, Clone, Copy)]
pub struct OscillatorSpec {
    pub units: PhysicalUnits,
    pub beta: f64,
    /// Fock truncation N; matrices have dimension N+1.
    pub truncation: usize,
}

impl OscillatorSpec {
    pub fn new(units: PhysicalUnits, beta: f64, truncation: usize) -> Result<Self> {
        if beta < 0.0 || !beta.is_finite() {
            return Err(Error::Invalid("beta must be nonnegative and finite".into()));
        }
        if truncation < 2 {
            return Err(Error::Invalid("truncation must be at least 2".into()));
        }
        Ok(Self { units, beta, truncation })
    }

    /// Advisory: the deformation stays perturbative across retained states
    /// when β K₀² (2N+1) < 0.5.
    pub fn perturbative_ok(&self) -> bool {
        let k0 = self.units.k0();
        self.beta * k0 * k0 * (2.0 * self.truncation as f64 + 1.0) < 0.5
    }
}

/// Real symmetric matrix of K₀(b†+b) — the momentum operator rotated by the
/// diagonal phase |n⟩ → iⁿ|n⟩ — at the given dimension.
fn momentum_rotated_real(k0: f64, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..dim - 1 {
        let v = k0 * ((n + 1) as f64).sqrt();
        m[(n, n + 1)] = v;
        m[(n + 1, n)] = v;
    }
    m
}

/// √f(p̂) at dimension `dim` through the spectral calculus of the rotated
/// real tridiagonal matrix; entries carry the phases i^{m−n}.
fn sqrt_f_of_p(beta: f64, units: &PhysicalUnits, dim: usize) -> Result<DMatrix<C64>> {
    let k0 = units.k0();
    let rotated = momentum_rotated_real(k0, dim);
    let eig = nalgebra::linalg::SymmetricEigen::new(rotated);
    let mut sqrt_vals = Vec::with_capacity(dim);
    for &lambda in eig.eigenvalues.iter() {
        let f = 1.0 + beta * lambda * lambda;
        if f <= 0.0 {
            return Err(Error::NotPositiveOnSpectrum);
        }
        sqrt_vals.push(f.sqrt());
    }
    // S = V √f(Λ) Vᵀ
    let mut s = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = 0.0;
            for k in 0..dim {
                acc += eig.eigenvectors[(i, k)] * sqrt_vals[k] * eig.eigenvectors[(j, k)];
            }
            s[(i, j)] = acc;
        }
    }
    // undo the rotation: entry (m, n) picks up i^{m−n}
    let mut out = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for m in 0..dim {
        for n in 0..dim {
            let phase = match (4 + (m as i64 - n as i64) % 4) % 4 {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, 1.0),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, -1.0),
            };
            out[(m, n)] = phase * s[(m, n)];
        }
    }
    Ok(out)
}

/// True matrix elements of p̂² (diagonal K₀²(2n+1), off-diagonal
/// −K₀²√((n+1)(n+2)) at |m−n| = 2).
fn p_squared_true(k0: f64, dim: usize) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    let k2 = k0 * k0;
    for n in 0..dim {
        m[(n, n)] = C64::new(k2 * (2.0 * n as f64 + 1.0), 0.0);
        if n + 2 < dim {
            let v = -k2 * (((n + 1) * (n + 2)) as f64).sqrt();
            m[(n, n + 2)] = C64::new(v, 0.0);
            m[(n + 2, n)] = C64::new(v, 0.0);
        }
    }
    m
}

/// The deformed position operator 𝒳 = √f(p̂) x̂ √f(p̂) at internal dimension
/// `dim` (true elements away from the last rows).
fn deformed_x_matrix(beta: f64, units: &PhysicalUnits, dim: usize) -> Result<DMatrix<C64>> {
    let sqrt_f = sqrt_f_of_p(beta, units, dim)?;
    let l0 = units.l0();
    let (b, bdag) = build_ladder(dim)?;
    let x = bdag.add(&b).scale(C64::new(l0, 0.0));
    Ok(&sqrt_f * x.matrix() * &sqrt_f)
}

/// Ĥ_GUP = ħω(𝒫²/4K₀² + 𝒳²/4L₀²) in the truncated number basis.
pub fn build_h_gup(spec: &OscillatorSpec) -> Result<FockOperator> {
    let n_dim = spec.truncation + 1;
    let big = n_dim + GUARD;
    let u = &spec.units;
    let x_def = deformed_x_matrix(spec.beta, u, big)?;
    let x2 = &x_def * &x_def;
    let p2 = p_squared_true(u.k0(), big);
    let hw = u.hbar * u.omega;
    let kin = hw / (4.0 * u.k0() * u.k0());
    let pot = hw / (4.0 * u.l0() * u.l0());
    let h_big = p2.map(|z| z * kin) + x2.map(|z| z * pot);
    FockOperator::new(h_big.view((0, 0), (n_dim, n_dim)).into_owned())
}

/// The undeformed oscillator ħω(N̂ + ½), diagonal by construction.
pub fn build_h0(units: &PhysicalUnits, dim: usize) -> Result<FockOperator> {
    let hw = units.hbar * units.omega;
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for n in 0..dim {
        m[(n, n)] = C64::new(hw * (n as f64 + 0.5), 0.0);
    }
    FockOperator::new(m)
}

/// Closed-form first-order correction δEₙ = (βmħ²ω²/2)(n² + n + ½).
pub fn delta_e_perturbative(spec: &OscillatorSpec, n: usize) -> f64 {
    let u = &spec.units;
    let nf = n as f64;
    0.5 * spec.beta * u.mass * u.hbar * u.hbar * u.omega * u.omega * (nf * nf + nf + 0.5)
}

/// The perturbation potential in the momentum representation, for g = βp²:
///
/// V̂ψ = −(ħ³ω/4L₀²)[ g(2+g)ψ″ + 2(1+g)g′ψ′ + ½(g g″ + g′²/2 + g″)ψ ].
pub fn apply_v_momentum(spec: &OscillatorSpec, psi: &GridWaveFunction) -> GridWaveFunction {
    let u = &spec.units;
    let beta = spec.beta;
    let l0 = u.l0();
    let scale = -u.hbar.powi(3) * u.omega / (4.0 * l0 * l0);
    let d1 = psi.derivative_adaptive(1);
    let d2 = psi.derivative_adaptive(2);
    let grid = *psi.grid();
    let amplitudes = grid
        .points()
        .enumerate()
        .map(|(j, p)| {
            let g = beta * p * p;
            let gp = 2.0 * beta * p;
            let gpp = 2.0 * beta;
            let term2 = g * (2.0 + g) * d2.amplitudes()[j];
            let term1 = 2.0 * (1.0 + g) * gp * d1.amplitudes()[j];
            let term0 =
                0.5 * (g * gpp + 0.5 * gp * gp + gpp) * psi.amplitudes()[j];
            (term2 + term1 + term0) * scale
        })
        .collect();
    GridWaveFunction::from_amplitudes(grid, amplitudes).expect("same grid")
}

/// Unperturbed oscillator eigenstate ψₙ⁰(p) by the stable three-term
/// recurrence on normalized Hermite functions.
pub fn hermite_eigenstate(
    units: &PhysicalUnits,
    n: usize,
    grid: MomentumGrid,
) -> Result<GridWaveFunction> {
    let k0 = units.k0();
    let scale = (2.0f64).sqrt() * k0;
    let need = ((2.0 * n as f64 + 1.0).sqrt() + 6.0) * scale;
    if grid.p_min() > -need || grid.p_max() < need {
        return Err(Error::GridTooNarrow(format!(
            "oscillator eigenstate n = {n} needs half-width {need:.1}"
        )));
    }
    let norm = 1.0 / scale.sqrt();
    let amplitudes = grid
        .points()
        .map(|p| {
            let z = p / scale;
            C64::new(norm * hermite_function(n, z), 0.0)
        })
        .collect();
    GridWaveFunction::from_amplitudes(grid, amplitudes)
}

/// Normalized Hermite function ψ̃ₙ(z) (unit L²(dz) norm).
pub fn hermite_function(n: usize, z: f64) -> f64 {
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * z * z).exp();
    if n == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = (2.0f64).sqrt() * z * h0;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * z * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Project a grid state onto the oscillator basis: coefficients
/// cₙ = ⟨ψₙ⁰|ψ⟩ for n ≤ n_max and the tail mass 1 − Σ|cₙ|².
///
/// The recurrence runs per grid point, so the work is sliced into a fixed
/// number of chunks and summed in chunk order (deterministic under any thread
/// count).
pub fn project_onto_hermite_basis(
    units: &PhysicalUnits,
    n_max: usize,
    psi: &GridWaveFunction,
) -> (Vec<C64>, f64) {
    use rayon::prelude::*;

    let k0 = units.k0();
    let scale = (2.0f64).sqrt() * k0;
    let norm = 1.0 / scale.sqrt();
    let grid = psi.grid();
    let n_points = grid.n_points();
    const CHUNKS: usize = 32;
    let chunk_len = n_points.div_ceil(CHUNKS);
    let ranges: Vec<(usize, usize)> = (0..CHUNKS)
        .map(|c| (c * chunk_len, ((c + 1) * chunk_len).min(n_points)))
        .filter(|(a, b)| a < b)
        .collect();

    let partials: Vec<Vec<C64>> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let len = hi - lo;
            let mut zs = Vec::with_capacity(len);
            let mut weighted = Vec::with_capacity(len);
            for j in lo..hi {
                let p = grid.point(j);
                zs.push(p / scale);
                weighted.push(psi.amplitudes()[j] * (grid.weight(j) * norm));
            }
            let mut prev = vec![0.0f64; len];
            let mut cur = vec![0.0f64; len];
            for (i, &z) in zs.iter().enumerate() {
                cur[i] = std::f64::consts::PI.powf(-0.25) * (-0.5 * z * z).exp();
            }
            let mut partial = Vec::with_capacity(n_max + 1);
            let mut acc = C64::new(0.0, 0.0);
            for (i, w) in weighted.iter().enumerate() {
                acc += w * cur[i];
            }
            partial.push(acc);
            for n in 0..n_max {
                let nf = n as f64;
                let c1 = (2.0 / (nf + 1.0)).sqrt();
                let c2 = (nf / (nf + 1.0)).sqrt();
                for i in 0..len {
                    let next = c1 * zs[i] * cur[i] - c2 * prev[i];
                    prev[i] = cur[i];
                    cur[i] = next;
                }
                let mut acc = C64::new(0.0, 0.0);
                for (i, w) in weighted.iter().enumerate() {
                    acc += w * cur[i];
                }
                partial.push(acc);
            }
            partial
        })
        .collect();

    let mut coeffs = vec![C64::new(0.0, 0.0); n_max + 1];
    for part in &partials {
        for (c, p) in coeffs.iter_mut().zip(part.iter()) {
            *c += p;
        }
    }
    let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let total = psi.norm_sqr();
    (coeffs, (total - captured).max(0.0))
}

/// First-order state correction δψₙ = Σ_{m≠n} ⟨m|V̂|n⟩/(Eₙ⁰−E_m⁰) |m⟩ in the
/// Fock basis.
pub fn delta_psi(spec: &OscillatorSpec, n: usize) -> Result<FockVector> {
    let dim = spec.truncation + 1;
    if n >= dim {
        return Err(Error::Invalid(format!("level {n} above truncation {}", spec.truncation)));
    }
    let h = build_h_gup(spec)?;
    let h0 = build_h0(&spec.units, dim)?;
    let v = h.sub(&h0);
    let hw = spec.units.hbar * spec.units.omega;
    let mut coeffs = vec![C64::new(0.0, 0.0); dim];
    for m in 0..dim {
        if m == n {
            continue;
        }
        let denom = hw * (n as f64 - m as f64);
        coeffs[m] = v.matrix()[(m, n)] / denom;
    }
    Ok(FockVector::new(coeffs))
}

/// One row of the oscillator spectrum report.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumRow {
    pub n: usize,
    pub e_n: f64,
    pub e0_n: f64,
    pub delta_paper: f64,
    pub delta_numeric: f64,
}

/// Diagonalize the deformed oscillator and tabulate the corrections next to
/// the closed-form ones.
pub fn spectrum_report(spec: &OscillatorSpec, levels: usize) -> Result<Vec<SpectrumRow>> {
    if spec.truncation < 20 {
        return Err(Error::Invalid("spectrum requests need truncation ≥ 20".into()));
    }
    let h = build_h_gup(spec)?;
    let values = crate::fock::spectrum(&h, levels)?;
    let hw = spec.units.hbar * spec.units.omega;
    Ok(values
        .iter()
        .enumerate()
        .map(|(n, &e)| {
            let e0 = hw * (n as f64 + 0.5);
            SpectrumRow {
                n,
                e_n: e,
                e0_n: e0,
                delta_paper: delta_e_perturbative(spec, n),
                delta_numeric: e - e0,
            }
        })
        .collect())
}
