//! Physical parameters, the closed-form bound-state spectrum of the
//! point-Coulomb Dirac operator, and the nuclear potential models.
//!
//! Everything is in atomic units (hbar = m_e = 1, lengths in Bohr radii,
//! energies in Hartree). Energies are reported shifted by the rest energy
//! `m c^2`, so bound states lie in `(-2 m c^2, 0)`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Speed of light used when no calibration is requested.
pub const DEFAULT_LIGHT_SPEED: f64 = 137.035_989_5;
/// Bohr radius in metres.
pub const BOHR_RADIUS_METRES: f64 = 5.291_772_109_03e-11;
/// One femtometre in metres.
pub const FERMI_METRES: f64 = 1.0e-15;
/// Largest admissible nuclear charge.
pub const MAX_CHARGE: u32 = 137;

/// Mass, light speed, nuclear charge and spin-orbit quantum number of a
/// hydrogen-like ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    mass: f64,
    light_speed: f64,
    charge: u32,
    kappa: i32,
}

impl PhysicalParams {
    pub fn new(mass: f64, light_speed: f64, charge: u32, kappa: i32) -> Result<Self> {
        if !(1..=MAX_CHARGE).contains(&charge) {
            return Err(Error::Domain(format!(
                "charge number {charge} outside 1..={MAX_CHARGE}"
            )));
        }
        Self::validated(mass, light_speed, charge, kappa)
    }

    /// Electron mass 1 and the default light speed.
    pub fn hydrogen_like(charge: u32, kappa: i32) -> Result<Self> {
        Self::new(1.0, DEFAULT_LIGHT_SPEED, charge, kappa)
    }

    /// The potential-free operator (charge 0). Only useful for checking
    /// reductions of the discrete operators; it has no bound states.
    pub fn free(mass: f64, light_speed: f64, kappa: i32) -> Result<Self> {
        Self::validated(mass, light_speed, 0, kappa)
    }

    fn validated(mass: f64, light_speed: f64, charge: u32, kappa: i32) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        if !(light_speed > 0.0 && light_speed.is_finite()) {
            return Err(Error::Domain(format!(
                "light speed must be positive, got {light_speed}"
            )));
        }
        if kappa == 0 {
            return Err(Error::Domain("kappa must be nonzero".into()));
        }
        let params = PhysicalParams {
            mass,
            light_speed,
            charge,
            kappa,
        };
        let k2 = f64::from(kappa) * f64::from(kappa);
        if k2 - params.coupling() * params.coupling() <= 0.0 {
            return Err(Error::Domain(format!(
                "kappa^2 - (z/c)^2 must be positive (kappa = {kappa}, z = {charge}, c = {light_speed})"
            )));
        }
        Ok(params)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn light_speed(&self) -> f64 {
        self.light_speed
    }

    pub fn charge(&self) -> u32 {
        self.charge
    }

    pub fn kappa(&self) -> i32 {
        self.kappa
    }

    /// `m c^2`.
    pub fn rest_energy(&self) -> f64 {
        self.mass * self.light_speed * self.light_speed
    }

    /// `z * gamma` with the fine-structure constant `gamma = 1/c`.
    pub fn coupling(&self) -> f64 {
        f64::from(self.charge) / self.light_speed
    }

    pub fn with_kappa(&self, kappa: i32) -> Result<Self> {
        Self::validated(self.mass, self.light_speed, self.charge, kappa)
    }

    pub fn with_light_speed(&self, light_speed: f64) -> Result<Self> {
        Self::validated(self.mass, light_speed, self.charge, self.kappa)
    }

    /// Lowest admissible radial level: the `n_r = 1` state exists only for
    /// negative kappa.
    pub fn lowest_radial_level(&self) -> u32 {
        if self.kappa < 0 {
            1
        } else {
            2
        }
    }
}

/// Shifted energy `lambda_{n_r,kappa} - m c^2` of the point-Coulomb bound state.
pub fn exact_eigenvalue(params: &PhysicalParams, radial_level: u32) -> Result<f64> {
    if radial_level == 0 {
        return Err(Error::Domain("radial level starts at 1".into()));
    }
    if radial_level < params.lowest_radial_level() {
        return Err(Error::Domain(format!(
            "no n_r = {radial_level} state for kappa = {}",
            params.kappa()
        )));
    }
    let g = params.coupling();
    let k = f64::from(params.kappa());
    let root = libm::sqrt(k * k - g * g);
    let denom = f64::from(radial_level - 1) + root;
    let x = (g * g) / (denom * denom);
    let s = libm::sqrt(1.0 + x);
    // mc^2 (1/sqrt(1+x) - 1) rearranged to avoid cancellation for small x.
    Ok(-params.rest_energy() * x / (s * (1.0 + s)))
}

/// The `count` lowest shifted bound-state energies, ascending.
pub fn exact_spectrum(params: &PhysicalParams, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    let first = params.lowest_radial_level();
    (0..count)
        .map(|i| exact_eigenvalue(params, first + i as u32))
        .collect()
}

/// Nuclear charge distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialModel {
    /// Coulomb potential `-z/r` of a point charge.
    PointNucleus,
    /// Uniformly charged sphere of the given radius (atomic units).
    ExtendedUniform { radius: f64 },
}

impl PotentialModel {
    pub fn extended(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!(
                "nuclear radius must be positive, got {radius}"
            )));
        }
        Ok(PotentialModel::ExtendedUniform { radius })
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            PotentialModel::PointNucleus => None,
            PotentialModel::ExtendedUniform { radius } => Some(radius),
        }
    }

    /// Potential energy at radius `r` for nuclear charge `charge`.
    pub fn potential(&self, charge: f64, r: f64) -> Result<f64> {
        match *self {
            PotentialModel::PointNucleus => {
                if r > 0.0 {
                    Ok(-charge / r)
                } else {
                    Err(Error::Domain(format!(
                        "point-nucleus potential needs r > 0, got {r}"
                    )))
                }
            }
            PotentialModel::ExtendedUniform { radius } => {
                if r < 0.0 {
                    Err(Error::Domain(format!(
                        "radius must be non-negative, got {r}"
                    )))
                } else {
                    Ok(uniform_sphere(charge, radius, r))
                }
            }
        }
    }
}

/// Potential of a uniformly charged sphere; `r >= 0` is assumed.
pub(crate) fn uniform_sphere(charge: f64, radius: f64, r: f64) -> f64 {
    if r <= radius {
        let u = r / radius;
        -charge * (3.0 - u * u) / (2.0 * radius)
    } else {
        -charge / r
    }
}

/// Free function form of [`PotentialModel::potential`].
pub fn potential(model: &PotentialModel, charge: u32, r: f64) -> Result<f64> {
    model.potential(f64::from(charge), r)
}

/// Nuclear radius `1.2 A^(1/3)` fm converted to Bohr radii.
pub fn nuclear_radius(mass_number: f64) -> f64 {
    1.2 * libm::cbrt(mass_number) * FERMI_METRES / BOHR_RADIUS_METRES
}

/// One reference energy used to calibrate the light speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTarget {
    pub kappa: i32,
    pub radial_level: u32,
    /// Shifted energy.
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub light_speed: f64,
    /// Largest relative mismatch over the targets at `light_speed`.
    pub max_relative_error: f64,
}

/// Largest relative mismatch between the closed-form spectrum at light
/// speed `c` and the targets.
pub fn calibration_mismatch(
    mass: f64,
    charge: u32,
    light_speed: f64,
    targets: &[CalibrationTarget],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in targets {
        let p = PhysicalParams::new(mass, light_speed, charge, t.kappa)?;
        let e = exact_eigenvalue(&p, t.radial_level)?;
        worst = worst.max(libm::fabs((e - t.energy) / t.energy));
    }
    Ok(worst)
}

/// Golden-section search for the light speed minimising the largest relative
/// mismatch against `targets` inside `[lo, hi]`.
///
/// Each mismatch is monotone on either side of its own root, so the maximum
/// is quasiconvex in `c` and golden section converges to the minimiser.
pub fn calibrate_light_speed(
    mass: f64,
    charge: u32,
    targets: &[CalibrationTarget],
    lo: f64,
    hi: f64,
) -> Result<Calibration> {
    if targets.is_empty() {
        return Err(Error::Config(
            "calibration needs at least one target".into(),
        ));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!("invalid bracket [{lo}, {hi}]")));
    }
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let f = |c: f64| calibration_mismatch(mass, charge, c, targets);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON * b {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    let (light_speed, max_relative_error) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(Calibration {
        light_speed,
        max_relative_error,
    })
}
