//! Globally adaptive 7/15-point Gauss–Kronrod quadrature for complex-valued
//! integrands on a finite interval split into caller-chosen panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use thiserror::Error;

// Kronrod abscissae (positive half, descending) and weights; Gauss weights
// sit on the odd Kronrod nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("adaptive quadrature did not reach tolerance {tol:e} within {budget} subintervals (estimated error {error:e})")]
    NonConvergence { tol: f64, budget: usize, error: f64 },
    #[error("invalid integration domain: {0}")]
    InvalidDomain(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub subintervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Single 15-point Kronrod rule on `[a, b]` with the QUADPACK error rescaling.
pub fn kronrod15<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = f_center.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrate `f` over the union of the consecutive panels given by `breaks`
/// (strictly increasing, at least two points) until the summed error estimate
/// drops below `tol`. At most `budget` subintervals are kept alive.
pub fn integrate<F>(f: F, breaks: &[f64], tol: f64, budget: usize) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> Complex64,
{
    if breaks.len() < 2 {
        return Err(QuadError::InvalidDomain("need at least two breakpoints".into()));
    }
    if !(tol > 0.0) {
        return Err(QuadError::InvalidDomain(format!("tolerance must be positive, got {tol}")));
    }
    if breaks.windows(2).any(|w| !(w[1] > w[0]) || !w[0].is_finite() || !w[1].is_finite()) {
        return Err(QuadError::InvalidDomain("breakpoints must be finite and strictly increasing".into()));
    }
    if breaks.len() - 1 > budget {
        return Err(QuadError::NonConvergence { tol, budget, error: f64::INFINITY });
    }

    let mut heap = BinaryHeap::with_capacity(breaks.len());
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let (value, error) = kronrod15(&f, w[0], w[1]);
        total_err += error;
        heap.push(Segment { a: w[0], b: w[1], value, error });
    }

    while total_err > tol {
        if heap.len() >= budget {
            return Err(QuadError::NonConvergence { tol, budget, error: total_err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval no longer splittable in floating point.
            return Err(QuadError::NonConvergence { tol, budget, error: total_err });
        }
        let (v1, e1) = kronrod15(&f, worst.a, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.b);
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }

    // Re-sum from scratch to avoid drift in the running error total.
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_error = 0.0;
    let subintervals = heap.len();
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    for s in &segs {
        value += s.value;
        abs_error += s.error;
    }
    Ok(QuadResult { value, abs_error, subintervals })
}
