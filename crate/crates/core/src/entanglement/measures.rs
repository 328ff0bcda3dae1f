use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::optimize::{nelder_mead, NelderMeadOptions};
use super::{BellDiagonalState, DensityOperator2Q, EntanglementError, C};

/// `(Φ⁺, Φ⁻, Ψ⁺, Ψ⁻)` in the computational basis.
pub fn bell_basis() -> [Vector4<C>; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |a: f64, b: f64, c: f64, d: f64| Vector4::new(C::new(a, 0.0), C::new(b, 0.0), C::new(c, 0.0), C::new(d, 0.0));
    [r(h, 0.0, 0.0, h), r(h, 0.0, 0.0, -h), r(0.0, h, h, 0.0), r(0.0, h, -h, 0.0)]
}

#[derive(Debug, Clone, Copy)]
pub struct SingletFractionOptions {
    pub starts: usize,
    pub seed: u64,
    /// Maximum tolerated disagreement between the per-start optima.
    pub spread_tol: f64,
}

impl Default for SingletFractionOptions {
    fn default() -> Self {
        SingletFractionOptions { starts: 8, seed: 0x5eed_f00d, spread_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SingletFraction {
    pub value: f64,
    /// The `U` of the optimal `(1 ⊗ U)|Φ⁺>`.
    pub unitary: Matrix2<C>,
    /// Max minus min of the per-start optima.
    pub spread: f64,
}

/// SU(2) element from three angles.
fn su2(angles: &[f64]) -> Matrix2<C> {
    let (a, b, g) = (angles[0], angles[1], angles[2]);
    let (s, c) = a.sin_cos();
    Matrix2::new(
        C::from_polar(c, b),
        -C::from_polar(s, -g),
        C::from_polar(s, g),
        C::from_polar(c, -b),
    )
}

/// `(1 ⊗ U)|Φ⁺>`: component `2i + j` is `U[j][i]/√2`.
fn rotated_phi_plus(u: &Matrix2<C>) -> Vector4<C> {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Vector4::new(u[(0, 0)] * h, u[(1, 0)] * h, u[(0, 1)] * h, u[(1, 1)] * h)
}

fn overlap(rho: &Matrix4<C>, phi: &Vector4<C>) -> f64 {
    (phi.adjoint() * rho * phi)[(0, 0)].re
}

/// Maximal overlap with a maximally entangled state, searched over `U` by
/// multi-start Nelder–Mead.
pub fn singlet_fraction_with(
    rho: &DensityOperator2Q,
    opts: &SingletFractionOptions,
) -> Result<SingletFraction, EntanglementError> {
    let m = *rho.matrix();
    let objective = |x: &[f64]| -overlap(&m, &rotated_phi_plus(&su2(x)));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let nm = NelderMeadOptions::default();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut worst = f64::INFINITY;
    for _ in 0..opts.starts.max(1) {
        let x0 = [
            rng.gen_range(0.0..std::f64::consts::PI),
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..std::f64::consts::TAU),
        ];
        let found = nelder_mead(objective, &x0, &nm);
        let value = -found.value;
        worst = worst.min(value);
        if best.as_ref().map_or(true, |(v, _)| value > *v) {
            best = Some((value, found.x));
        }
    }
    let (value, x) = best.expect("at least one start");
    let out = SingletFraction { value, unitary: su2(&x), spread: value - worst };
    if out.spread > opts.spread_tol {
        return Err(EntanglementError::OptimizerStall { best: value, spread: out.spread });
    }
    Ok(out)
}

pub fn singlet_fraction(rho: &DensityOperator2Q) -> Result<f64, EntanglementError> {
    singlet_fraction_with(rho, &SingletFractionOptions::default()).map(|s| s.value)
}

/// Best singlet fraction found, ignoring a start-disagreement flag.
pub fn singlet_fraction_best(rho: &DensityOperator2Q) -> f64 {
    match singlet_fraction(rho) {
        Ok(v) => v,
        Err(EntanglementError::OptimizerStall { best, .. }) => best,
        Err(_) => unreachable!("singlet_fraction only reports stalls"),
    }
}

fn sigma_y_sigma_y() -> Matrix4<C> {
    let o = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    Matrix4::new(o, o, o, -one, o, o, one, o, o, one, o, o, -one, o, o, o)
}

fn psd_sqrt(m: &Matrix4<C>) -> Matrix4<C> {
    let eig = SymmetricEigen::new(*m);
    let mut out = Matrix4::zeros();
    for k in 0..4 {
        let v = eig.eigenvectors.column(k);
        out += v * v.adjoint() * C::new(eig.eigenvalues[k].max(0.0).sqrt(), 0.0);
    }
    out
}

/// Wootters concurrence from the square roots of the eigenvalues of
/// `√ρ ρ̃ √ρ`, with `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence(rho: &DensityOperator2Q) -> f64 {
    let m = rho.matrix();
    let yy = sigma_y_sigma_y();
    let tilde = yy * m.conjugate() * yy;
    let s = psd_sqrt(m);
    let r = s * tilde * s;
    let r = (r + r.adjoint()) * C::new(0.5, 0.0);
    let mut mu: Vec<f64> = SymmetricEigen::new(r).eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    (mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0)
}

fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Entanglement of formation `h((1 + √(1 - C²))/2)`.
pub fn eof(rho: &DensityOperator2Q) -> f64 {
    let c = concurrence(rho);
    if c == 0.0 {
        return 0.0;
    }
    binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0)
}

/// Rotate the optimal maximally entangled state onto `Φ⁺` by a local
/// unitary on the second qubit, then keep the Bell-basis diagonal.
pub fn twirl_to_bell_diagonal(rho: &DensityOperator2Q) -> BellDiagonalState {
    let u = match singlet_fraction_with(rho, &SingletFractionOptions { spread_tol: f64::INFINITY, ..Default::default() }) {
        Ok(s) => s.unitary,
        Err(_) => Matrix2::identity(),
    };
    let rotated = rho.local_unitary(&Matrix2::identity(), &u.adjoint());
    let mut p = [0.0; 4];
    for (k, b) in bell_basis().iter().enumerate() {
        p[k] = overlap(rotated.matrix(), b).max(0.0);
    }
    let s: f64 = p.iter().sum();
    for x in &mut p {
        *x /= s;
    }
    BellDiagonalState::new(p).expect("normalised nonnegative weights")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure(v: [C; 4]) -> DensityOperator2Q {
        DensityOperator2Q::from_pure(&Vector4::from(v)).unwrap()
    }

    #[test]
    fn bell_and_mixed_extremes() {
        let bell = DensityOperator2Q::bell(0);
        assert!((singlet_fraction(&bell).unwrap() - 1.0).abs() < 1e-10);
        assert!((concurrence(&bell) - 1.0).abs() < 1e-10);
        assert!((eof(&bell) - 1.0).abs() < 1e-10);

        let mixed = DensityOperator2Q::maximally_mixed();
        assert!((singlet_fraction(&mixed).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(concurrence(&mixed), 0.0);
    }

    #[test]
    fn product_state_has_no_entanglement() {
        let one = C::new(1.0, 0.0);
        let z = C::new(0.0, 0.0);
        let rho = pure([one, z, z, z]);
        assert!(concurrence(&rho) < 1e-12);
        assert_eq!(eof(&rho), 0.0);
        assert!((singlet_fraction(&rho).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn bell_diagonal_concurrence() {
        let q = 0.25 / 3.0;
        let s = BellDiagonalState::new([0.75, q, q, q]).unwrap();
        assert!((concurrence(&s.to_density()) - 0.5).abs() < 1e-10);
        assert!((s.concurrence() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eof_at_half_concurrence() {
        // h((1+√0.75)/2), evaluated independently.
        let p: f64 = (1.0 + 0.75f64.sqrt()) / 2.0;
        let expected = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((expected - 0.354_578_902_665_269_9).abs() < 1e-12);
        let q = 0.25 / 3.0;
        let rho = BellDiagonalState::new([0.75, q, q, q]).unwrap().to_density();
        assert!((eof(&rho) - expected).abs() < 1e-10);
    }

    #[test]
    fn twirl_extremes() {
        let w = twirl_to_bell_diagonal(&DensityOperator2Q::bell(0)).weights();
        assert!((w[0] - 1.0).abs() < 1e-10);
        let w = twirl_to_bell_diagonal(&DensityOperator2Q::maximally_mixed()).weights();
        for x in w {
            assert!((x - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn twirl_aligns_phase_rotated_bell() {
        // (|00> + e^{iφ}|11>)/√2 twirls onto Φ⁺.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = C::new(0.0, 0.0);
        let rho = pure([C::new(h, 0.0), z, z, C::from_polar(h, 1.1)]);
        let w = twirl_to_bell_diagonal(&rho).weights();
        assert!((w[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn su2_is_unitary() {
        let u = su2(&[0.3, 1.2, -2.0]);
        assert!((u * u.adjoint() - Matrix2::identity()).norm() < 1e-14);
        assert!((u.determinant() - C::new(1.0, 0.0)).norm() < 1e-14);
    }
}
