//! Dimensionless model parameters and the axial double-well potential.
//!
//! Energies are in units of the axial trap quantum, lengths in the axial
//! oscillator length `a_l`, and times in `1 / omega_z`. Everything downstream
//! works in these units; conversion happens once, when parameters are built.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;

/// Reduced mass of two identical unit-mass particles.
pub const REDUCED_MASS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Boson,
    Fermion,
}

/// s-wave scattering length in units of `a_l`.
///
/// `Unitarity` is the `|a_s| -> infinity` limit, where `2 r0 / a_s` vanishes
/// exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScatteringLength {
    Finite(f64),
    Unitarity,
}

impl ScatteringLength {
    /// `2 r0 / a_s`, exactly zero at unitarity.
    pub fn range_ratio(self, r0: f64) -> f64 {
        match self {
            ScatteringLength::Finite(a) => 2.0 * r0 / a,
            ScatteringLength::Unitarity => 0.0,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScatteringRepr {
    Value(f64),
    Keyword(String),
}

impl Serialize for ScatteringLength {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            ScatteringLength::Finite(a) => ScatteringRepr::Value(a),
            ScatteringLength::Unitarity => ScatteringRepr::Keyword("unitarity".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScatteringLength {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ScatteringRepr::deserialize(d)? {
            ScatteringRepr::Value(a) if a.is_finite() && a != 0.0 => Ok(ScatteringLength::Finite(a)),
            ScatteringRepr::Value(a) => {
                Err(serde::de::Error::custom(format!("scattering length must be finite and nonzero, got {a}")))
            }
            ScatteringRepr::Keyword(k) if matches!(k.as_str(), "unitarity" | "inf" | "+inf" | "-inf") => {
                Ok(ScatteringLength::Unitarity)
            }
            ScatteringRepr::Keyword(k) => Err(serde::de::Error::custom(format!(
                "unknown scattering length `{k}`, expected a number or \"unitarity\""
            ))),
        }
    }
}

/// One experiment's trap, interaction and particle-number parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub lambda_bar: f64,
    pub eta_bar: f64,
    pub omega_rho_ratio: f64,
    pub r0: f64,
    pub a_s: ScatteringLength,
    pub n_particles: usize,
    pub species: Species,
}

impl Default for ModelParams {
    /// Trap used throughout the reference figures: barrier height 2,
    /// `omega_rho = 10 omega_z`, two bosons at unitarity with `r0 = 0.1`.
    fn default() -> Self {
        ModelParams {
            lambda_bar: 0.5,
            eta_bar: 2.0,
            omega_rho_ratio: 10.0,
            r0: 0.1,
            a_s: ScatteringLength::Unitarity,
            n_particles: 2,
            species: Species::Boson,
        }
    }
}

fn invalid(name: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter { name, reason: reason.into() }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.lambda_bar > 0.0 && self.lambda_bar.is_finite()) {
            return Err(invalid("lambda_bar", format!("must be positive, got {}", self.lambda_bar)));
        }
        if !(self.eta_bar > 0.0 && self.eta_bar.is_finite()) {
            return Err(invalid("eta_bar", format!("must be positive, got {}", self.eta_bar)));
        }
        if !(self.omega_rho_ratio >= 1.0 && self.omega_rho_ratio.is_finite()) {
            return Err(invalid("omega_rho_ratio", format!("must be at least 1, got {}", self.omega_rho_ratio)));
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(invalid("r0", format!("must be positive, got {}", self.r0)));
        }
        if self.n_particles == 0 {
            return Err(invalid("n_particles", "must be at least 1"));
        }
        if self.species == Species::Fermion && !matches!(self.n_particles, 2 | 3) {
            return Err(ModelError::UnsupportedFermionCount(self.n_particles));
        }
        let ratio = self.a_s.range_ratio(self.r0);
        if ratio >= 1.0 {
            return Err(invalid("a_s", format!("2 r0 / a_s = {ratio} must be below 1")));
        }
        Ok(())
    }

    pub fn units(&self) -> UnitSystem {
        UnitSystem::new(self.omega_rho_ratio)
    }
}

/// Derived scales of the dimensionless unit system (`hbar = m = omega_z = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// `omega_z / omega_rho`, the squared transverse oscillator length in `a_l^2`.
    pub a_rho: f64,
}

impl UnitSystem {
    pub fn new(omega_rho_ratio: f64) -> Self {
        UnitSystem { a_rho: 1.0 / omega_rho_ratio }
    }

    /// Harmonic frequency `2 lambda eta / sqrt(m)` of one well, dimensional inputs.
    pub fn harmonic_frequency(lambda: f64, eta: f64, mass: f64) -> f64 {
        2.0 * lambda * eta / mass.sqrt()
    }

    /// Oscillator length `sqrt(hbar / (m omega))`.
    pub fn oscillator_length(hbar: f64, mass: f64, omega: f64) -> f64 {
        (hbar / (mass * omega)).sqrt()
    }
}

/// `V(z) = lambda^2 (z^2 - eta^2)^2 / 2`.
pub fn dw_potential(z: f64, params: &ModelParams) -> f64 {
    quartic(z, params.lambda_bar, params.eta_bar)
}

pub(crate) fn quartic(z: f64, lambda: f64, eta: f64) -> f64 {
    let d = z * z - eta * eta;
    0.5 * lambda * lambda * d * d
}

/// `V(0) = lambda^2 eta^4 / 2`.
pub fn barrier_height(params: &ModelParams) -> f64 {
    0.5 * params.lambda_bar.powi(2) * params.eta_bar.powi(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn with(lambda: f64, eta: f64) -> ModelParams {
        ModelParams { lambda_bar: lambda, eta_bar: eta, ..ModelParams::default() }
    }

    #[test]
    fn potential_vanishes_at_minima() {
        let p = with(0.5, 2.0);
        assert_eq!(dw_potential(2.0, &p), 0.0);
        assert_eq!(dw_potential(-2.0, &p), 0.0);
    }

    #[test]
    fn reference_barrier_is_two() {
        let p = with(0.5, 2.0);
        assert_eq!(dw_potential(0.0, &p), 2.0);
        assert_eq!(barrier_height(&p), 2.0);
        assert_eq!(barrier_height(&with(1.0, 1.0)), 0.5);
        let flat = ModelParams { lambda_bar: 0.0, ..p };
        assert_eq!(barrier_height(&flat), 0.0);
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let p = ModelParams::default();
        assert!(p.validate().is_ok());
        assert!(ModelParams { r0: 0.0, ..p }.validate().is_err());
        assert!(ModelParams { omega_rho_ratio: 0.5, ..p }.validate().is_err());
        assert!(ModelParams { n_particles: 0, ..p }.validate().is_err());
        assert_eq!(
            ModelParams { species: Species::Fermion, n_particles: 4, ..p }.validate(),
            Err(ModelError::UnsupportedFermionCount(4))
        );
        assert!(ModelParams { r0: 1.0, a_s: ScatteringLength::Finite(1.0), ..p }.validate().is_err());
        assert!(ModelParams { r0: 1.0, a_s: ScatteringLength::Finite(-1.0), ..p }.validate().is_ok());
    }

    #[test]
    fn scattering_length_serde() {
        let u: ScatteringLength = serde_json::from_str("\"unitarity\"").unwrap();
        assert_eq!(u, ScatteringLength::Unitarity);
        let f: ScatteringLength = serde_json::from_str("-100.0").unwrap();
        assert_eq!(f, ScatteringLength::Finite(-100.0));
        assert!(serde_json::from_str::<ScatteringLength>("\"huge\"").is_err());
        assert_eq!(serde_json::to_string(&ScatteringLength::Unitarity).unwrap(), "\"unitarity\"");
    }

    #[test]
    fn unit_system() {
        assert!((UnitSystem::new(10.0).a_rho - 0.1).abs() < 1e-15);
        assert_eq!(UnitSystem::harmonic_frequency(0.5, 2.0, 1.0), 2.0);
        assert_eq!(UnitSystem::oscillator_length(1.0, 1.0, 4.0), 0.5);
    }

    proptest! {
        #[test]
        fn potential_even_and_nonnegative(z in -10.0f64..10.0, lambda in 0.01f64..3.0, eta in 0.1f64..4.0) {
            let p = with(lambda, eta);
            let v = dw_potential(z, &p);
            prop_assert!(v >= 0.0);
            prop_assert_eq!(v, dw_potential(-z, &p));
            prop_assert!((barrier_height(&p) - dw_potential(0.0, &p)).abs() <= 1e-14 * barrier_height(&p));
        }
    }
}
