use dirac_fem_core::physics::nuclear_radius;
use dirac_fem_core::{exact_eigenvalue, exact_spectrum, PhysicalParams, PotentialModel};
use proptest::prelude::*;

const C: f64 = 137.0359895;

fn kappa() -> impl Strategy<Value = i32> {
    prop_oneof![-6i32..=-1, 1i32..=6]
}

/// Sommerfeld formula written out directly, shifted by -mc^2.
fn sommerfeld(z: f64, kappa: i32, n_r: u32, c: f64) -> f64 {
    let a = z / c;
    let k = f64::from(kappa);
    let gamma = (k * k - a * a).sqrt();
    let n = f64::from(n_r) - 1.0 + gamma;
    c * c / (1.0 + (a / n).powi(2)).sqrt() - c * c
}

proptest! {
    #[test]
    fn ladder_increases_inside_gap(z in 1u32..=118, k in kappa(), count in 2usize..30) {
        let p = PhysicalParams::new(1.0, C, z, k).unwrap();
        let s = exact_spectrum(&p, count).unwrap();
        let mc2 = p.rest_energy();
        prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(s.iter().all(|e| *e < 0.0 && *e > -2.0 * mc2));
    }

    #[test]
    fn mirror_kappas_share_levels(z in 1u32..=118, k in 1i32..=6, n_r in 2u32..40) {
        let plus = PhysicalParams::new(1.0, C, z, k).unwrap();
        let minus = PhysicalParams::new(1.0, C, z, -k).unwrap();
        let a = exact_eigenvalue(&plus, n_r).unwrap();
        let b = exact_eigenvalue(&minus, n_r).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.abs());
        prop_assert_eq!(plus.lowest_radial_level(), 2);
        prop_assert_eq!(minus.lowest_radial_level(), 1);
    }

    #[test]
    fn matches_written_out_formula(z in 1u32..=118, k in kappa(), i in 0u32..20) {
        let p = PhysicalParams::new(1.0, C, z, k).unwrap();
        let n_r = p.lowest_radial_level() + i;
        let got = exact_eigenvalue(&p, n_r).unwrap();
        let want = sommerfeld(f64::from(z), k, n_r, C);
        // the written-out difference of squares cancels badly for small z
        prop_assert!((got - want).abs() <= 1e-9 * want.abs() + 1e-9, "{got} vs {want}");
    }

    #[test]
    fn extended_potential_dominates_point(radius in 1e-6..1.0f64, t in 0.001..0.999f64, z in 1.0..137.0f64) {
        let ext = PotentialModel::extended(radius).unwrap();
        let r = t * radius;
        let v_ext = ext.potential(z, r).unwrap();
        let v_pt = PotentialModel::PointNucleus.potential(z, r).unwrap();
        prop_assert!(v_ext >= v_pt);
    }

    #[test]
    fn extended_potential_is_c1_at_radius(radius in 1e-6..1.0f64, z in 1.0..137.0f64) {
        let ext = PotentialModel::extended(radius).unwrap();
        let v = |r| ext.potential(z, r).unwrap();
        let at = v(radius);
        prop_assert!((at + z / radius).abs() <= 1e-13 * z / radius);
        let h = 1e-6 * radius;
        let left = (v(radius) - v(radius - h)) / h;
        let right = (v(radius + h) - v(radius)) / h;
        let slope = z / (radius * radius);
        prop_assert!((left - slope).abs() <= 1e-5 * slope, "{left} vs {slope}");
        prop_assert!((right - slope).abs() <= 1e-5 * slope, "{right} vs {slope}");
    }
}

#[test]
fn rejects_unphysical_parameters() {
    assert!(PhysicalParams::new(1.0, C, 118, 0).is_err());
    assert!(PhysicalParams::new(-1.0, C, 118, -1).is_err());
    assert!(PhysicalParams::new(1.0, C, 138, -1).is_err());
    let p = PhysicalParams::new(1.0, C, 118, 2).unwrap();
    assert!(exact_eigenvalue(&p, 1).is_err());
    assert!(PotentialModel::extended(0.0).is_err());
}

#[test]
fn nuclear_radius_of_mass_294() {
    let r = nuclear_radius(294.0);
    let want = 1.2 * 294f64.cbrt() * 1e-15 / 5.29177210903e-11;
    assert!((r - want).abs() <= 1e-15 * want);
    assert!((r - 1.504e-4).abs() < 1e-6, "{r}");
}
