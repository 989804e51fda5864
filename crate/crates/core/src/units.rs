/// Physical scales ħ, m, ω.  Defaults are natural units (all 1).
///
/// The oscillator length and momentum scales
/// L₀ = √(ħ/2mω) and K₀ = √(ħmω/2) follow from these.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalUnits {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
}

impl Default for PhysicalUnits {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, omega: 1.0 }
    }
}

impl PhysicalUnits {
    pub fn new(hbar: f64, mass: f64, omega: f64) -> crate::Result<Self> {
        if !(hbar > 0.0 && mass > 0.0 && omega > 0.0)
            || !(hbar.is_finite() && mass.is_finite() && omega.is_finite())
        {
            return Err(crate::Error::Invalid(
                "units must be strictly positive and finite".into(),
            ));
        }
        Ok(Self { hbar, mass, omega })
    }

    /// Oscillator length scale L₀ = √(ħ/2mω).
    pub fn l0(&self) -> f64 {
        (self.hbar / (2.0 * self.mass * self.omega)).sqrt()
    }

    /// Oscillator momentum scale K₀ = √(ħmω/2).
    pub fn k0(&self) -> f64 {
        (self.hbar * self.mass * self.omega / 2.0).sqrt()
    }
}
