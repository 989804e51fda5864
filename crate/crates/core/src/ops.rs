//! Canonical and deformed position/momentum operator actions on grid
//! wavefunctions, numerical commutation checks, and the GUP inequality test.
//!
//! The deformed position operator is realized on the ordinary Hilbert space as
//! 𝒳 = iħ f(p)∂_p + (iħ/2) f′(p), equivalently 𝒳 = x̂ + √g x̂ √g with
//! g = f − 1.  Derivatives use the spectral kernel for boundary-decayed states
//! and the local finite-difference kernel otherwise (see
//! [`GridWaveFunction::derivative_adaptive`]).

use crate::deform::DeformationSpec;
use crate::error::{Error, Result};
use crate::grid::{self, GridWaveFunction};
use crate::units::PhysicalUnits;
use crate::C64;

/// A named operator action ψ ↦ Âψ with a symmetry claim.
pub struct OperatorAction {
    label: String,
    symmetric: bool,
    apply: Box<dyn Fn(&GridWaveFunction) -> Result<GridWaveFunction> + Send + Sync>,
}

impl OperatorAction {
    pub fn new(
        label: impl Into<String>,
        symmetric: bool,
        apply: impl Fn(&GridWaveFunction) -> Result<GridWaveFunction> + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), symmetric, apply: Box::new(apply) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn apply(&self, psi: &GridWaveFunction) -> Result<GridWaveFunction> {
        (self.apply)(psi)
    }
}

/// x̂ψ = iħ ∂_p ψ.
pub fn apply_canonical_x(units: &PhysicalUnits, psi: &GridWaveFunction) -> GridWaveFunction {
    psi.derivative_adaptive(1).scaled(C64::new(0.0, units.hbar))
}

/// p̂ψ = p ψ.
pub fn apply_canonical_p(psi: &GridWaveFunction) -> GridWaveFunction {
    psi.scaled_by(|p| p)
}

/// 𝒳ψ = iħ f(p) ψ′ + (iħ/2) f′(p) ψ.
pub fn apply_deformed_x(
    spec: &DeformationSpec,
    units: &PhysicalUnits,
    psi: &GridWaveFunction,
) -> GridWaveFunction {
    let hbar = units.hbar;
    let deriv = psi.derivative_adaptive(1);
    let mut out = deriv.scaled_by(|p| spec.f(p));
    for (j, p) in psi.grid().points().enumerate() {
        let correction = psi.amplitudes()[j] * (0.5 * spec.f_prime(p));
        out.amplitudes_mut()[j] = (out.amplitudes()[j] + correction) * C64::new(0.0, hbar);
    }
    out
}

/// 𝒳ψ through the g-form: x̂ψ + √g (iħ∂_p)(√g ψ), g = f − 1.
///
/// Requires g ≥ 0 on the grid; agrees with [`apply_deformed_x`] pointwise.
///
/// Any measurable square root of g yields the same operator product; when g
/// is even with a zero at p = 0 (every canonical-limit deformation) the odd
/// branch sgn(p)·√g keeps the intermediate function smooth, which the global
/// differentiation kernels need.  Otherwise the plain root is used.
pub fn apply_deformed_x_via_g(
    spec: &DeformationSpec,
    units: &PhysicalUnits,
    psi: &GridWaveFunction,
) -> Result<GridWaveFunction> {
    let mut min_g = f64::INFINITY;
    for p in psi.grid().points() {
        min_g = min_g.min(spec.g(p));
    }
    if min_g < -1e-12 {
        return Err(Error::GNegative);
    }
    let even = [0.37, 1.3, 2.9, 7.7, 19.1]
        .iter()
        .all(|&p| (spec.g(p) - spec.g(-p)).abs() <= 1e-12 * (1.0 + spec.g(p).abs()));
    let odd_branch = even && spec.g(0.0).abs() <= 1e-12;
    let sqrt_g = move |p: f64| {
        let r = spec.g(p).max(0.0).sqrt();
        if odd_branch && p < 0.0 {
            -r
        } else {
            r
        }
    };
    let inner = psi.scaled_by(&sqrt_g);
    let derived = inner.derivative_adaptive(1).scaled(C64::new(0.0, units.hbar));
    let second = derived.scaled_by(&sqrt_g);
    apply_canonical_x(units, psi).add(&second)
}

/// The non-symmetric form X̂ψ = f(p)·iħ ψ′, kept to demonstrate its defect:
/// expectation values of X̂ acquire imaginary parts.
pub fn apply_nonsymmetric_x(
    spec: &DeformationSpec,
    units: &PhysicalUnits,
    psi: &GridWaveFunction,
) -> GridWaveFunction {
    psi.derivative_adaptive(1)
        .scaled(C64::new(0.0, units.hbar))
        .scaled_by(|p| spec.f(p))
}

/// Operator-action wrappers.
pub fn canonical_x(units: PhysicalUnits) -> OperatorAction {
    OperatorAction::new("x", true, move |psi| Ok(apply_canonical_x(&units, psi)))
}

pub fn canonical_p() -> OperatorAction {
    OperatorAction::new("p", true, |psi| Ok(apply_canonical_p(psi)))
}

pub fn deformed_x(spec: DeformationSpec, units: PhysicalUnits) -> OperatorAction {
    OperatorAction::new("X_deformed", true, move |psi| {
        Ok(apply_deformed_x(&spec, &units, psi))
    })
}

pub fn deformed_x_via_g(spec: DeformationSpec, units: PhysicalUnits) -> OperatorAction {
    OperatorAction::new("X_deformed_g_form", true, move |psi| {
        apply_deformed_x_via_g(&spec, &units, psi)
    })
}

pub fn nonsymmetric_x(spec: DeformationSpec, units: PhysicalUnits) -> OperatorAction {
    OperatorAction::new("X_nonsymmetric", false, move |psi| {
        Ok(apply_nonsymmetric_x(&spec, &units, psi))
    })
}

/// ‖(𝒳𝒫 − 𝒫𝒳)ψ − iħ f(p)ψ‖ / ‖ψ‖.
pub fn commutator_residual(
    spec: &DeformationSpec,
    units: &PhysicalUnits,
    psi: &GridWaveFunction,
) -> Result<f64> {
    let xp = apply_deformed_x(spec, units, &apply_canonical_p(psi));
    let px = apply_canonical_p(&apply_deformed_x(spec, units, psi));
    let expected = psi.scaled_by(|p| spec.f(p)).scaled(C64::new(0.0, units.hbar));
    let residual = xp.sub(&px)?.sub(&expected)?;
    Ok(residual.norm() / psi.norm())
}

/// Outcome of the GUP inequality check on one state.
#[derive(Debug, Clone, Copy)]
pub struct GupCheck {
    pub dx: f64,
    pub dp: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Robertson-form GUP test: Δ𝒳·Δ𝒫 against (ħ/2)|⟨f(p̂)⟩|.
///
/// For f = 1 + βp² the right side dominates (ħ/2)(1 + βΔ𝒫²), so this is the
/// stronger statement the operator algebra implies.  `satisfied` allows
/// 1e−9 of quadrature slack.
pub fn check_gup(
    spec: &DeformationSpec,
    units: &PhysicalUnits,
    psi: &GridWaveFunction,
) -> Result<GupCheck> {
    if !psi.passes_schwartz_heuristic() {
        return Err(Error::OutsideDomain);
    }
    let dx = grid::uncertainty(psi, |w| Ok(apply_deformed_x(spec, units, w)))?;
    let dp = grid::uncertainty(psi, |w| Ok(apply_canonical_p(w)))?;
    let f_mean = grid::expectation(psi, |w| Ok(w.scaled_by(|p| spec.f(p))))?;
    let lhs = dx * dp;
    let rhs = 0.5 * units.hbar * f_mean.norm();
    Ok(GupCheck { dx, dp, lhs, rhs, satisfied: lhs >= rhs - 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{expectation, inner_product, uncertainty, MomentumGrid};
    use crate::states::{squeezed_state, SqueezedParams};

    fn units() -> PhysicalUnits {
        PhysicalUnits::default()
    }

    fn default_grid() -> MomentumGrid {
        MomentumGrid::default_for(&units())
    }

    fn squeezed(a: f64, x0: f64, p0: f64) -> GridWaveFunction {
        squeezed_state(&SqueezedParams { a, x0, p0 }, default_grid(), &units()).unwrap()
    }

    #[test]
    fn canonical_pair_reproduces_heisenberg_commutator() {
        let u = units();
        let psi = squeezed(1.0, 0.5, -0.3);
        let xp = apply_canonical_x(&u, &apply_canonical_p(&psi));
        let px = apply_canonical_p(&apply_canonical_x(&u, &psi));
        let comm = xp.sub(&px).unwrap();
        for (j, (c, s)) in comm.amplitudes().iter().zip(psi.amplitudes()).enumerate() {
            let expect = C64::new(0.0, u.hbar) * s;
            assert!((c - expect).norm() < 1e-8, "point {j}");
        }
    }

    #[test]
    fn canonical_expectations() {
        let u = units();
        let psi = squeezed(1.0, 1.0, 0.0);
        let x_mean = expectation(&psi, |w| Ok(apply_canonical_x(&u, w))).unwrap();
        assert!((x_mean.re - 1.0).abs() < 1e-8);
        let psi0 = squeezed(1.0, 0.0, 0.0);
        let p_mean = expectation(&psi0, |w| Ok(apply_canonical_p(w))).unwrap();
        assert!(p_mean.re.abs() < 1e-10);
    }

    #[test]
    fn deformed_x_reduces_to_canonical_at_beta_zero() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.0).unwrap();
        let psi = squeezed(1.0, 0.7, 0.4);
        let deformed = apply_deformed_x(&spec, &u, &psi);
        let canonical = apply_canonical_x(&u, &psi);
        let diff: f64 = deformed
            .amplitudes()
            .iter()
            .zip(canonical.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn deformed_x_is_symmetric_and_centered() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.1).unwrap();
        for a in [0.5, 1.0, 2.0] {
            let psi = squeezed(a, 0.0, 0.0);
            let mean = expectation(&psi, |w| Ok(apply_deformed_x(&spec, &u, w))).unwrap();
            assert!(mean.im.abs() < 1e-9, "Im〈X〉 = {} at a = {a}", mean.im);
        }
        // 〈X〉 = x0·〈f〉 for the squeezed state; at x0=1, p0=0, a=1:
        // 〈f〉 = 1 + β(p0² + 1/(2a)) = 1.05
        let psi = squeezed(1.0, 1.0, 0.0);
        let mean = expectation(&psi, |w| Ok(apply_deformed_x(&spec, &u, w))).unwrap();
        assert!((mean.re - 1.05).abs() < 1e-7);
    }

    #[test]
    fn g_form_matches_direct_form() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.1).unwrap();
        let psi = squeezed(1.3, 0.4, -0.6);
        let direct = apply_deformed_x(&spec, &u, &psi);
        let via_g = apply_deformed_x_via_g(&spec, &u, &psi).unwrap();
        let num = direct.sub(&via_g).unwrap().norm();
        assert!(num / direct.norm() < 1e-8);
    }

    #[test]
    fn g_form_rejects_negative_g() {
        let u = units();
        // f < 1 in places: g = f − 1 < 0
        let spec = crate::deform::parse_deformation(
            "1 - p^2 / (2 + 2*p^2)",
            &std::collections::BTreeMap::new(),
        )
        .unwrap();
        let psi = squeezed(1.0, 0.0, 0.0);
        assert!(matches!(
            apply_deformed_x_via_g(&spec, &u, &psi),
            Err(Error::GNegative)
        ));
    }

    #[test]
    fn g_form_reduces_to_canonical_x_at_beta_zero() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.0).unwrap();
        let psi = squeezed(1.0, -0.2, 0.3);
        let via_g = apply_deformed_x_via_g(&spec, &u, &psi).unwrap();
        let canonical = apply_canonical_x(&u, &psi);
        assert!(via_g.sub(&canonical).unwrap().norm() < 1e-12);
    }

    #[test]
    fn mean_square_routes_agree() {
        // ⟨X²⟩ by double application vs quadrature of |Xψ|²
        let u = units();
        let spec = DeformationSpec::quadratic(0.1).unwrap();
        let psi = squeezed(1.0, 0.0, 0.0);
        let x_psi = apply_deformed_x(&spec, &u, &psi);
        let via_norm = inner_product(&x_psi, &x_psi).unwrap().re;
        let via_double = inner_product(&psi, &apply_deformed_x(&spec, &u, &x_psi))
            .unwrap()
            .re;
        assert!((via_norm - via_double).abs() < 1e-8);
    }

    #[test]
    fn nonsymmetric_x_has_complex_expectation() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.1).unwrap();
        // Im〈X̂〉 = −ħβ〈p̂〉, so a moving packet exposes the defect
        let psi = squeezed(1.0, 0.0, 1.0);
        let mean = expectation(&psi, |w| Ok(apply_nonsymmetric_x(&spec, &u, w))).unwrap();
        assert!(mean.im.abs() > 1e-3);
        assert!((mean.im - (-u.hbar * 0.1 * 1.0)).abs() < 1e-7);

        // symmetric again at β = 0
        let id = DeformationSpec::quadratic(0.0).unwrap();
        let mean0 = expectation(&psi, |w| Ok(apply_nonsymmetric_x(&id, &u, w))).unwrap();
        assert!(mean0.im.abs() < 1e-10);
    }

    #[test]
    fn new_and_original_operators_differ_by_half_f_prime() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.1).unwrap();
        let psi = squeezed(1.0, 0.3, 0.5);
        let sym = apply_deformed_x(&spec, &u, &psi);
        let old = apply_nonsymmetric_x(&spec, &u, &psi);
        let expect = psi
            .scaled_by(|p| 0.5 * spec.f_prime(p))
            .scaled(C64::new(0.0, u.hbar));
        let resid = sym.sub(&old).unwrap().sub(&expect).unwrap().norm();
        assert!(resid < 1e-10);
    }

    #[test]
    fn commutator_residual_is_small_on_fine_grids() {
        let u = units();
        let psi = squeezed(1.0, 0.0, 0.0);
        let spec = DeformationSpec::quadratic(0.1).unwrap();
        assert!(commutator_residual(&spec, &u, &psi).unwrap() < 1e-8);
        let id = DeformationSpec::identity();
        assert!(commutator_residual(&id, &u, &psi).unwrap() < 1e-10);
    }

    #[test]
    fn commutator_residual_grows_on_coarse_grids() {
        let u = units();
        let coarse = MomentumGrid::symmetric(40.0, 64).unwrap();
        let psi = squeezed_state(&SqueezedParams { a: 1.0, x0: 0.0, p0: 0.0 }, coarse, &u).unwrap();
        let spec = DeformationSpec::quadratic(0.1).unwrap();
        assert!(commutator_residual(&spec, &u, &psi).unwrap() > 1e-4);
    }

    #[test]
    fn gup_holds_for_gaussians_and_saturates_at_beta_zero() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.01).unwrap();
        let psi = squeezed(1.0, 0.0, 0.0);
        let r = check_gup(&spec, &u, &psi).unwrap();
        assert!(r.satisfied);
        assert!(r.lhs >= r.rhs - 1e-9);

        let id = DeformationSpec::quadratic(0.0).unwrap();
        let r0 = check_gup(&id, &u, &psi).unwrap();
        assert!((r0.lhs - 0.5 * u.hbar).abs() < 1e-8);
        assert!((r0.rhs - 0.5 * u.hbar).abs() < 1e-10);
    }

    #[test]
    fn gup_rejects_states_outside_domain_heuristic() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.01).unwrap();
        let g = default_grid();
        let slow = GridWaveFunction::from_fn(g, |p| C64::new(1.0 / (1.0 + p * p), 0.0))
            .normalized();
        assert!(matches!(check_gup(&spec, &u, &slow), Err(Error::OutsideDomain)));
    }

    #[test]
    fn operator_actions_are_linear() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.07).unwrap();
        let action = deformed_x(spec, u);
        let psi = squeezed(1.0, 0.2, -0.1);
        let phi = squeezed(2.0, -0.5, 0.6);
        let alpha = C64::new(0.6, -0.3);
        let lhs = action.apply(&psi.scaled(alpha).add(&phi).unwrap()).unwrap();
        let rhs = action.apply(&psi).unwrap().scaled(alpha).add(&action.apply(&phi).unwrap()).unwrap();
        let diff = lhs.sub(&rhs).unwrap().norm();
        assert!(diff < 1e-10);
    }

    #[test]
    fn symmetry_identity_between_two_states() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.1).unwrap();
        let psi = squeezed(1.0, 0.3, 0.2);
        let phi = squeezed(1.7, -0.4, -0.9);
        let lhs = inner_product(&phi, &apply_deformed_x(&spec, &u, &psi)).unwrap();
        let rhs = inner_product(&apply_deformed_x(&spec, &u, &phi), &psi).unwrap();
        assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn uncertainty_of_deformed_x_exceeds_canonical_floor() {
        let u = units();
        let spec = DeformationSpec::quadratic(0.05).unwrap();
        let psi = squeezed(1.0, 0.0, 0.0);
        let dx_def = uncertainty(&psi, |w| Ok(apply_deformed_x(&spec, &u, w))).unwrap();
        let dx_can = uncertainty(&psi, |w| Ok(apply_canonical_x(&u, w))).unwrap();
        assert!(dx_def > dx_can);
    }
}
