use covertnet::entanglement::{
    concurrence, eof, singlet_fraction, twirl_to_bell_diagonal, werner_step, DensityOperator2Q, C,
};
use nalgebra::{Matrix2, Matrix4};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_density<R: Rng>(rng: &mut R) -> DensityOperator2Q {
    let g = Matrix4::from_fn(|_, _| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let m = g * g.adjoint();
    let t = m.trace();
    DensityOperator2Q::new(m / t).unwrap()
}

fn su2(a: f64, b: f64, c: f64) -> Matrix2<C> {
    let (ca, sa) = ((a / 2.0).cos(), (a / 2.0).sin());
    Matrix2::new(
        C::from_polar(ca, (b + c) / 2.0),
        -C::from_polar(sa, (c - b) / 2.0),
        C::from_polar(sa, (b - c) / 2.0),
        C::from_polar(ca, -(b + c) / 2.0),
    )
}

fn angles() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0f64..std::f64::consts::PI, 0.0f64..6.3, 0.0f64..6.3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn measures_are_local_unitary_invariant(seed in any::<u64>(), u in angles(), v in angles()) {
        let rho = random_density(&mut ChaCha8Rng::seed_from_u64(seed));
        let rotated = rho.local_unitary(&su2(u.0, u.1, u.2), &su2(v.0, v.1, v.2));
        prop_assert!((singlet_fraction(&rho).unwrap() - singlet_fraction(&rotated).unwrap()).abs() < 1e-8);
        prop_assert!((concurrence(&rho) - concurrence(&rotated)).abs() < 1e-10);
        prop_assert!((eof(&rho) - eof(&rotated)).abs() < 1e-10);
    }

    #[test]
    fn recurrence_map_increases(f in 0.5001f64..0.9999) {
        let (next, p) = werner_step(f);
        prop_assert!(next > f);
        prop_assert!(next < 1.0);
        prop_assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn recurrence_map_is_monotone(a in 0.5f64..1.0, b in 0.5f64..1.0) {
        prop_assume!(a < b);
        prop_assert!(werner_step(a).0 < werner_step(b).0);
    }
}

#[test]
fn twirl_never_increases_concurrence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7717);
    for i in 0..1000 {
        let rho = random_density(&mut rng);
        let before = concurrence(&rho);
        let after = twirl_to_bell_diagonal(&rho).concurrence();
        assert!(after <= before + 1e-10, "sample {i}: {after} > {before}");
    }
}

#[test]
fn recurrence_fixed_points() {
    for f in [0.5, 1.0] {
        assert!((werner_step(f).0 - f).abs() < 1e-12);
    }
}
