use fpw_core::plate::{
    bending_term, effective_poisson, effective_young_modulus, mass_per_area, CompositePlate,
    MaterialLayer,
};
use proptest::prelude::*;

fn layer() -> impl Strategy<Value = MaterialLayer> {
    (
        0.1e-6..5e-6f64,
        1e10..5e11f64,
        0.0..0.45f64,
        1000.0..20000.0f64,
    )
        .prop_map(|(h, e, nu, rho)| MaterialLayer::new("l", h, e, nu, rho).unwrap())
}

fn stack() -> impl Strategy<Value = Vec<MaterialLayer>> {
    prop::collection::vec(layer(), 1..6)
}

fn bracketed(value: f64, values: impl Iterator<Item = f64> + Clone) -> bool {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    value >= lo * (1.0 - 1e-12) && value <= hi * (1.0 + 1e-12)
}

proptest! {
    #[test]
    fn effective_moduli_are_bracketed(layers in stack()) {
        let e = effective_young_modulus(&layers).unwrap();
        let nu = effective_poisson(&layers).unwrap();
        prop_assert!(bracketed(e, layers.iter().map(|l| l.young_modulus)));
        prop_assert!(bracketed(nu + 1.0, layers.iter().map(|l| l.poisson_ratio + 1.0)));
    }

    #[test]
    fn mass_is_additive(a in stack(), b in stack()) {
        let joined: Vec<_> = a.iter().chain(b.iter()).cloned().collect();
        let sum = mass_per_area(&a).unwrap() + mass_per_area(&b).unwrap();
        prop_assert!((mass_per_area(&joined).unwrap() - sum).abs() <= 1e-12 * sum);
    }

    #[test]
    fn bending_term_is_homogeneous(
        ep in 1e10..5e11f64,
        h in 0.5e-6..5e-6f64,
        lambda in 10e-6..200e-6f64,
        c in 0.2..5.0f64,
    ) {
        let base = bending_term(ep, h, lambda).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        prop_assert!(rel(bending_term(c * ep, h, lambda).unwrap(), c * base) < 1e-12);
        prop_assert!(rel(bending_term(ep, c * h, lambda).unwrap(), c.powi(3) * base) < 1e-12);
        prop_assert!(rel(bending_term(ep, h, c * lambda).unwrap(), base / (c * c)) < 1e-12);
    }

    #[test]
    fn plate_is_deterministic(layers in stack(), lambda in 10e-6..200e-6f64) {
        let a = CompositePlate::new(layers.clone()).unwrap();
        let b = CompositePlate::new(layers).unwrap();
        prop_assert_eq!(a.bending_term(lambda).unwrap().to_bits(), b.bending_term(lambda).unwrap().to_bits());
        prop_assert_eq!(a.mass_per_area().to_bits(), b.mass_per_area().to_bits());
    }
}

#[test]
fn single_layer_plate_reports_its_own_values() {
    let l = MaterialLayer::new("Si", 2e-6, 1.7e11, 0.28, 2330.0).unwrap();
    let plate = CompositePlate::new(vec![l]).unwrap();
    assert_eq!(plate.young_modulus(), 1.7e11);
    assert_eq!(plate.poisson_ratio(), 0.28);
    assert!((plate.mass_per_area() - 2330.0 * 2e-6).abs() < 1e-15);
}

#[test]
fn empty_stack_is_rejected() {
    assert!(CompositePlate::new(Vec::new()).is_err());
}
