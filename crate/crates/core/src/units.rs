//! Unit system and physical constants.
//!
//! Internally everything runs in Hartree atomic units (energy in Hartree,
//! length in Bohr, mass in electron masses). Inputs are declared in a
//! [`UnitSystem`] and converted on ingestion; spectroscopic output goes to
//! cm⁻¹. The small parameter is defined from a reference nuclear mass,
//! `epsilon = m_ref^(-1/4)`.

use crate::error::{Error, Result};

/// Hartree expressed in cm⁻¹ (CODATA 2018).
pub const HARTREE_TO_INV_CM: f64 = 219_474.631_363_2;

/// Bohr radius in Angstrom (CODATA 2018).
pub const BOHR_RADIUS_ANGSTROM: f64 = 0.529_177_210_903;

/// One Angstrom in Bohr, the reciprocal of [`BOHR_RADIUS_ANGSTROM`].
pub const ANGSTROM_TO_BOHR: f64 = 1.889_726_124_625_77;

/// Unified atomic mass unit in electron masses (CODATA 2018).
pub const ATOMIC_MASS_UNIT_ME: f64 = 1_822.888_486_209;

/// Nuclear mass of C¹² in electron masses: 12 u minus 6 electrons.
pub const C12_NUCLEAR_MASS_ME: f64 = 12.0 * ATOMIC_MASS_UNIT_ME - 6.0;

/// Nuclear mass of H¹ (proton) in electron masses (CODATA 2018).
pub const H1_NUCLEAR_MASS_ME: f64 = 1_836.152_673_43;

/// Nuclear mass of F¹⁹ in electron masses: 18.998403163 u minus 9 electrons.
pub const F19_NUCLEAR_MASS_ME: f64 = 18.998_403_163 * ATOMIC_MASS_UNIT_ME - 9.0;

/// Dimension tags for the quantities this artifact converts. A closed set,
/// not a general dimensional-analysis engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Length,
    Energy,
    Mass,
    EnergyPerLength2,
    EnergyPerLength3,
    EnergyPerLength4,
}

impl Dimension {
    pub const ALL: [Dimension; 6] = [
        Dimension::Length,
        Dimension::Energy,
        Dimension::Mass,
        Dimension::EnergyPerLength2,
        Dimension::EnergyPerLength3,
        Dimension::EnergyPerLength4,
    ];

    /// Exponents (length, energy, mass) of the dimension.
    fn powers(self) -> (i32, i32, i32) {
        match self {
            Dimension::Length => (1, 0, 0),
            Dimension::Energy => (0, 1, 0),
            Dimension::Mass => (0, 0, 1),
            Dimension::EnergyPerLength2 => (-2, 1, 0),
            Dimension::EnergyPerLength3 => (-3, 1, 0),
            Dimension::EnergyPerLength4 => (-4, 1, 0),
        }
    }
}

/// Scale factors taking declared input units to atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// Multiply an input length by this to get Bohr.
    pub length_to_bohr: f64,
    /// Multiply an input energy by this to get Hartree.
    pub energy_to_hartree: f64,
    /// Multiply an input mass by this to get electron masses.
    pub mass_to_electron_mass: f64,
}

impl UnitSystem {
    /// Identity system: inputs already in atomic units.
    pub fn atomic() -> Self {
        UnitSystem {
            length_to_bohr: 1.0,
            energy_to_hartree: 1.0,
            mass_to_electron_mass: 1.0,
        }
    }

    /// Angstrom lengths, Hartree energies, electron-mass masses — the
    /// reporting units of the fitted surface tables.
    pub fn angstrom_hartree() -> Self {
        UnitSystem {
            length_to_bohr: ANGSTROM_TO_BOHR,
            energy_to_hartree: 1.0,
            mass_to_electron_mass: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length_to_bohr", self.length_to_bohr),
            ("energy_to_hartree", self.energy_to_hartree),
            ("mass_to_electron_mass", self.mass_to_electron_mass),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "unit scale {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Combined factor taking a quantity of dimension `dim` to atomic units.
    pub fn factor_to_atomic(&self, dim: Dimension) -> f64 {
        let (l, e, m) = dim.powers();
        self.length_to_bohr.powi(l)
            * self.energy_to_hartree.powi(e)
            * self.mass_to_electron_mass.powi(m)
    }
}

/// Convert `value` of dimension `dim` from the declared units to atomic units.
pub fn to_atomic(value: f64, dim: Dimension, units: &UnitSystem) -> f64 {
    value * units.factor_to_atomic(dim)
}

/// Inverse of [`to_atomic`].
pub fn from_atomic(value: f64, dim: Dimension, units: &UnitSystem) -> f64 {
    value / units.factor_to_atomic(dim)
}

/// Energy in Hartree to wavenumber in cm⁻¹.
pub fn hartree_to_wavenumber(e: f64) -> f64 {
    e * HARTREE_TO_INV_CM
}

/// epsilon from a reference nuclear mass: `m_ref^(-1/4)`.
///
/// With `m_ref` the C¹² nuclear mass this reproduces the canonical
/// epsilon ≈ 0.0821.
pub fn epsilon_from_reference_mass(m_ref: f64) -> Result<f64> {
    if !(m_ref.is_finite() && m_ref > 0.0) {
        return Err(Error::invalid(format!(
            "reference mass must be positive, got {m_ref}"
        )));
    }
    Ok(m_ref.powf(-0.25))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hartree_to_wavenumber_values() {
        assert_eq!(hartree_to_wavenumber(0.0), 0.0);
        assert_relative_eq!(hartree_to_wavenumber(1.0), 219_474.631_363_2);
        // order of the symmetric-stretch scale
        assert_relative_eq!(hartree_to_wavenumber(0.00273), 599.2, max_relative = 1e-3);
    }

    #[test]
    fn hartree_to_wavenumber_is_linear() {
        for &(alpha, e) in &[(2.0, 0.3), (-1.5, 0.11), (1e-7, 3.0)] {
            let lhs = hartree_to_wavenumber(alpha * e);
            let rhs = alpha * hartree_to_wavenumber(e);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-15);
        }
    }

    #[test]
    fn epsilon_from_reference_mass_values() {
        assert_relative_eq!(epsilon_from_reference_mass(16.0).unwrap(), 0.5);
        assert_relative_eq!(epsilon_from_reference_mass(1.0).unwrap(), 1.0);
        // C12 nucleus; the canonical rounded value is 0.0821
        let eps = epsilon_from_reference_mass(C12_NUCLEAR_MASS_ME).unwrap();
        assert_relative_eq!(eps, 0.082_232_680_6, max_relative = 1e-9);
        assert!((eps - 0.0821).abs() < 2e-4);
    }

    #[test]
    fn epsilon_rejects_nonpositive_mass() {
        assert!(epsilon_from_reference_mass(0.0).is_err());
        assert!(epsilon_from_reference_mass(-3.0).is_err());
        assert!(epsilon_from_reference_mass(f64::NAN).is_err());
    }

    #[test]
    fn epsilon_is_strictly_decreasing() {
        let masses = [0.5, 1.0, 2.0, 10.0, 100.0, 21868.66, 1e8];
        for pair in masses.windows(2) {
            let a = epsilon_from_reference_mass(pair[0]).unwrap();
            let b = epsilon_from_reference_mass(pair[1]).unwrap();
            assert!(b < a, "epsilon must decrease: {a} -> {b}");
        }
    }

    #[test]
    fn angstrom_to_bohr_value() {
        let u = UnitSystem::angstrom_hartree();
        let bohr = to_atomic(1.0, Dimension::Length, &u);
        // quoted to the precision of the usual constants tables
        assert_relative_eq!(bohr, 1.889_725_988_6, max_relative = 1e-6);
        assert_relative_eq!(bohr * BOHR_RADIUS_ANGSTROM, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn curvature_conversion_matches_arithmetic() {
        // a1 = 0.26 Hartree/Angstrom^2 in atomic units
        let u = UnitSystem::angstrom_hartree();
        let a1 = to_atomic(0.26, Dimension::EnergyPerLength2, &u);
        assert_relative_eq!(a1, 0.26 / (ANGSTROM_TO_BOHR * ANGSTROM_TO_BOHR));
        assert_relative_eq!(a1, 0.0728, max_relative = 1e-3);
    }

    #[test]
    fn identity_units_are_identity() {
        let u = UnitSystem::atomic();
        for dim in Dimension::ALL {
            assert_eq!(to_atomic(0.7315, dim, &u), 0.7315);
        }
    }

    #[test]
    fn round_trip_all_dimensions() {
        let u = UnitSystem {
            length_to_bohr: 1.889_726_124_625_77,
            energy_to_hartree: 0.036_749_322_175_655, // eV
            mass_to_electron_mass: 1822.888_486_209,
        };
        // deterministic pseudo-random values
        let mut x = 0.734_119_f64;
        for dim in Dimension::ALL {
            for _ in 0..20 {
                x = (x * 9301.0 + 49_297.0) % 233_280.0 / 233_280.0 + 0.01;
                let q = x * 17.3 - 5.0;
                let back = from_atomic(to_atomic(q, dim, &u), dim, &u);
                assert_relative_eq!(back, q, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn mass_constants_are_consistent() {
        assert_relative_eq!(C12_NUCLEAR_MASS_ME, 21_868.661_834_508, max_relative = 1e-12);
        // the H1 nucleus is within half an electron mass of 1.00782503 u - 1
        let from_u = 1.007_825_032_07 * ATOMIC_MASS_UNIT_ME - 1.0;
        assert!((from_u - H1_NUCLEAR_MASS_ME).abs() < 0.5);
    }

    #[test]
    fn unit_system_validation() {
        let mut u = UnitSystem::atomic();
        assert!(u.validate().is_ok());
        u.energy_to_hartree = -1.0;
        assert!(u.validate().is_err());
        u.energy_to_hartree = f64::INFINITY;
        assert!(u.validate().is_err());
    }
}
