//! Deformation functions f(p) with bound parameters, their symbolic
//! derivatives, the auxiliary g(p) = f(p) − 1, the momentum map
//! k(p) = ∫₀ᵖ dp̃/f(p̃) with its cutoff, and the measure transfer between the
//! deformed and unit-measure Hilbert spaces.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::ParsedExpr;
use crate::grid::{GridWaveFunction, MomentumGrid};
use crate::units::PhysicalUnits;

/// Absolute tolerance of the adaptive Simpson quadrature behind the momentum
/// map; k(p) feeds eigenstate phases, so it is kept tight.
const MAP_TOL: f64 = 1e-12;

/// A parsed deformation function with parameters bound.
#[derive(Debug, Clone)]
pub struct DeformationSpec {
    f: ParsedExpr,
    f_prime: ParsedExpr,
    bound_f: ParsedExpr,
    bound_f_prime: ParsedExpr,
    params: BTreeMap<String, f64>,
    polynomial: bool,
}

/// Parse `text` and bind `params`; f must be positive on the default grid and
/// satisfy the canonical limit f(0) = 1.
pub fn parse_deformation(text: &str, params: &BTreeMap<String, f64>) -> Result<DeformationSpec> {
    parse_deformation_with(text, params, true)
}

/// Like [`parse_deformation`] but with the canonical-limit check optional.
pub fn parse_deformation_with(
    text: &str,
    params: &BTreeMap<String, f64>,
    canonical_limit: bool,
) -> Result<DeformationSpec> {
    let f = ParsedExpr::parse(text)?;
    bind(f, params, canonical_limit)
}

fn bind(
    f: ParsedExpr,
    params: &BTreeMap<String, f64>,
    canonical_limit: bool,
) -> Result<DeformationSpec> {
    let f_prime = f.derivative();
    let bound_f = f.substitute(params)?;
    let bound_f_prime = f_prime.substitute(params)?;

    // positivity probe on the default grid
    let probe = MomentumGrid::default_for(&PhysicalUnits::default());
    for p in probe.points() {
        let v = bound_f.eval_bound(p);
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::NotPositive);
        }
    }
    if canonical_limit {
        let at_zero = bound_f.eval_bound(0.0);
        if (at_zero - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!(
                "deformation violates canonical limit: f(0) = {at_zero}"
            )));
        }
    }
    let polynomial = f.is_polynomial_in_p();
    Ok(DeformationSpec { f, f_prime, bound_f, bound_f_prime, params: params.clone(), polynomial })
}

impl DeformationSpec {
    /// Rebind the same expression with new parameter values (sweeps).
    pub fn rebind(&self, params: &BTreeMap<String, f64>) -> Result<Self> {
        bind(self.f.clone(), params, false)
    }

    pub fn f_expr(&self) -> &ParsedExpr {
        &self.f
    }

    pub fn f_prime_expr(&self) -> &ParsedExpr {
        &self.f_prime
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// True when f is a polynomial in p (the unitary-invariance preference).
    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }

    pub fn f(&self, p: f64) -> f64 {
        self.bound_f.eval_bound(p)
    }

    pub fn f_prime(&self, p: f64) -> f64 {
        self.bound_f_prime.eval_bound(p)
    }

    /// g(p) = f(p) − 1.
    pub fn g(&self, p: f64) -> f64 {
        self.f(p) - 1.0
    }

    /// The canonical (undeformed) spec f ≡ 1.
    pub fn identity() -> Self {
        parse_deformation("1", &BTreeMap::new()).expect("constant deformation parses")
    }

    /// The standard quadratic deformation f = 1 + β p².
    pub fn quadratic(beta: f64) -> Result<Self> {
        let mut params = BTreeMap::new();
        params.insert("beta".to_string(), beta);
        parse_deformation("1 + beta*p^2", &params)
    }
}

// ---------------------------------------------------------------------------
// adaptive Simpson quadrature

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::QuadratureFailure { achieved: f64::INFINITY, wanted: tol });
    }
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a).abs() < 1e-13 * (1.0 + a.abs() + b.abs()) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure { achieved: delta.abs(), wanted: tol });
    }
    let child_tol = (0.5 * tol).max(1e-17);
    let l = adaptive_step(f, a, m, fa, flm, fm, left, child_tol, depth - 1)?;
    let r = adaptive_step(f, m, b, fm, frm, fb, right, child_tol, depth - 1)?;
    Ok(l + r)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !(fa.is_finite() && fm.is_finite() && fb.is_finite()) {
        return Err(Error::QuadratureFailure { achieved: f64::INFINITY, wanted: tol });
    }
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 60)
}

/// k(p) = ∫₀ᵖ dp̃ / f(p̃), odd in p for even f and strictly increasing.
pub fn momentum_map(spec: &DeformationSpec, p: f64) -> Result<f64> {
    adaptive_simpson(|t| 1.0 / spec.f(t), 0.0, p, MAP_TOL)
}

/// k(p) at every grid point, by cumulative 5-point Gauss-Legendre cells
/// anchored at k(p_min) from the adaptive rule.
pub fn momentum_map_on_grid(spec: &DeformationSpec, grid: &MomentumGrid) -> Result<Vec<f64>> {
    const NODES: [f64; 5] = [
        -0.906179845938664,
        -0.5384693101056831,
        0.0,
        0.5384693101056831,
        0.906179845938664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.23692688505618908,
        0.47862867049936647,
        0.5688888888888889,
        0.47862867049936647,
        0.23692688505618908,
    ];
    let n = grid.n_points();
    let h = grid.step();
    let mut out = Vec::with_capacity(n);
    let mut k = momentum_map(spec, grid.p_min())?;
    out.push(k);
    for j in 1..n {
        let a = grid.point(j - 1);
        let mid = a + 0.5 * h;
        let half = 0.5 * h;
        let mut cell = 0.0;
        for (t, w) in NODES.iter().zip(WEIGHTS.iter()) {
            cell += w / spec.f(mid + half * t);
        }
        k += half * cell;
        out.push(k);
    }
    Ok(out)
}

/// Limit of the momentum map, when finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    Finite(f64),
    Infinite,
}

impl Cutoff {
    pub fn finite(self) -> Option<f64> {
        match self {
            Cutoff::Finite(v) => Some(v),
            Cutoff::Infinite => None,
        }
    }
}

/// p_max = k(p → +∞): finite exactly when f grows super-linearly.
///
/// f qualifies as super-linear when f(p)/p² keeps a positive, non-decaying
/// floor over p = 10³…10⁶; strictly linear growth must report `Infinite`.
pub fn momentum_cutoff(spec: &DeformationSpec) -> Result<Cutoff> {
    let ratios: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&p| spec.f(p) / (p * p))
        .collect();
    let positive = ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    let steady = ratios[3] >= 0.9 * ratios[0];
    if !(positive && steady) {
        return Ok(Cutoff::Infinite);
    }

    const SPLIT: f64 = 1e3;
    let head = adaptive_simpson(|t| 1.0 / spec.f(t), 0.0, SPLIT, MAP_TOL)?;
    // tail via u = 1/p: ∫_SPLIT^∞ dp/f(p) = ∫_0^{1/SPLIT} du / (u² f(1/u))
    let lim = {
        let r = spec.f(1e7) / 1e14;
        if r.is_finite() && r > 0.0 {
            1.0 / r
        } else {
            0.0
        }
    };
    let tail = adaptive_simpson(
        |u| {
            if u == 0.0 {
                lim
            } else {
                1.0 / (u * u * spec.f(1.0 / u))
            }
        },
        0.0,
        1.0 / SPLIT,
        MAP_TOL,
    )?;
    Ok(Cutoff::Finite(head + tail))
}

/// ∫_ℝ dp/f(p) when it converges (prefactor of the deformed-position
/// eigenstates).
pub fn total_inverse_f_integral(spec: &DeformationSpec) -> Result<Cutoff> {
    let plus = momentum_cutoff(spec)?;
    let reflected = ReflectedSpec(spec);
    let minus_ratios: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&p| reflected.f(p) / (p * p))
        .collect();
    let ok = minus_ratios.iter().all(|r| r.is_finite() && *r > 0.0)
        && minus_ratios[3] >= 0.9 * minus_ratios[0];
    match (plus, ok) {
        (Cutoff::Finite(a), true) => {
            const SPLIT: f64 = 1e3;
            let head = adaptive_simpson(|t| 1.0 / spec.f(-t), 0.0, SPLIT, MAP_TOL)?;
            let lim = {
                let r = spec.f(-1e7) / 1e14;
                if r.is_finite() && r > 0.0 {
                    1.0 / r
                } else {
                    0.0
                }
            };
            let tail = adaptive_simpson(
                |u| {
                    if u == 0.0 {
                        lim
                    } else {
                        1.0 / (u * u * spec.f(-1.0 / u))
                    }
                },
                0.0,
                1.0 / SPLIT,
                MAP_TOL,
            )?;
            Ok(Cutoff::Finite(a + head + tail))
        }
        _ => Ok(Cutoff::Infinite),
    }
}

struct ReflectedSpec<'a>(&'a DeformationSpec);

impl ReflectedSpec<'_> {
    fn f(&self, p: f64) -> f64 {
        self.0.f(-p)
    }
}

/// Transfer Ψ from the deformed-measure space L²(ℝ, dp/f) to the ordinary
/// space: ψ(p) = Ψ(p)/√f(p).
pub fn to_unit_measure(psi_deformed: &GridWaveFunction, spec: &DeformationSpec) -> GridWaveFunction {
    psi_deformed.scaled_by(|p| 1.0 / spec.f(p).sqrt())
}

/// Norm of Ψ under the deformed measure dp/f(p).
pub fn deformed_measure_norm(psi: &GridWaveFunction, spec: &DeformationSpec) -> f64 {
    psi.grid()
        .integrate(|j, p| psi.amplitudes()[j].norm_sqr() / spec.f(p))
        .sqrt()
}
