//! Entanglement extraction from the vacuum by two Gaussian-switched two-level
//! detectors: correlation integrals, the first-order channel iterated `n`
//! times, and distance sweeps of the resulting singlet fraction and EOF.
//!
//! Units: `c = 1`. Times and the detector separation are in seconds (the
//! separation is a light-travel time), the gap is an angular frequency in
//! s⁻¹. The integrals themselves are dimensionless.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entanglement::{self, DensityOperator2Q, EntanglementError};
use crate::quadrature::{self, QuadError};

/// Speed of light in km/s, for converting separations given in kilometers.
pub const SPEED_OF_LIGHT_KM_PER_S: f64 = 299_792.458;

/// Coupling above which the first-order channel is unlikely to be accurate.
pub const COUPLING_WARN_THRESHOLD: f64 = 0.1;

pub const DEFAULT_TOL: f64 = 1e-10;

const DEFAULT_BUDGET: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VacuumError {
    #[error("invalid detector configuration: {0}")]
    InvalidConfig(String),
    #[error("correlation integrals did not converge: {0}")]
    NonConvergence(QuadError),
    #[error("first-order channel invalid: n·λ²·J1 = {0} (must stay below 0.5)")]
    PerturbativeBreakdown(f64),
    #[error(transparent)]
    Measure(#[from] EntanglementError),
}

impl From<QuadError> for VacuumError {
    fn from(e: QuadError) -> Self {
        VacuumError::NonConvergence(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// λ², dimensionless.
    pub coupling_sq: f64,
    /// δ, angular frequency in s⁻¹.
    pub gap: f64,
    /// σ, switching width in seconds.
    pub width: f64,
    /// L, separation as light-travel time in seconds.
    pub separation: f64,
    /// N, number of channel applications.
    pub iterations: u64,
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), VacuumError> {
        if !(self.coupling_sq > 0.0) || !self.coupling_sq.is_finite() {
            return Err(VacuumError::InvalidConfig(format!("coupling_sq must be > 0, got {}", self.coupling_sq)));
        }
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(VacuumError::InvalidConfig(format!("width must be > 0, got {}", self.width)));
        }
        if !(self.separation >= 0.0) || !self.separation.is_finite() {
            return Err(VacuumError::InvalidConfig(format!("separation must be >= 0, got {}", self.separation)));
        }
        if !self.gap.is_finite() {
            return Err(VacuumError::InvalidConfig(format!("gap must be finite, got {}", self.gap)));
        }
        if self.coupling_sq > COUPLING_WARN_THRESHOLD {
            log::warn!(
                "coupling_sq = {} is outside the perturbative regime (> {})",
                self.coupling_sq,
                COUPLING_WARN_THRESHOLD
            );
        }
        Ok(())
    }

    pub fn with_separation(mut self, separation: f64) -> Self {
        self.separation = separation;
        self
    }

    pub fn with_iterations(mut self, iterations: u64) -> Self {
        self.iterations = iterations;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationIntegrals {
    pub j1: f64,
    pub j2: Complex64,
    pub j3: Complex64,
    /// Upper bound on the absolute error of all three integrals combined,
    /// including the truncated Gaussian tail.
    pub quadrature_error: f64,
}

/// Fourier transform of the Gaussian switching function `exp(-t²/σ²)`.
pub fn window_fourier(omega: f64, width: f64) -> f64 {
    width * PI.sqrt() * (-width * width * omega * omega / 4.0).exp()
}

/// `sin(ωL)/L`, continuous at `L = 0`.
fn sin_over_separation(omega: f64, separation: f64) -> f64 {
    if separation == 0.0 {
        omega
    } else {
        (omega * separation).sin() / separation
    }
}

/// Evaluate the three singularity-free frequency integrals by adaptive
/// quadrature on `[0, |δ| + W/σ]`, where `W` puts the Gaussian envelope at
/// `tol/100`. When `L > σ` the domain is pre-split at the half-period `π/L`
/// of the oscillatory factor.
pub fn correlation_integrals(config: &DetectorConfig, tol: f64) -> Result<CorrelationIntegrals, VacuumError> {
    correlation_integrals_with_budget(config, tol, DEFAULT_BUDGET)
}

pub fn correlation_integrals_with_budget(
    config: &DetectorConfig,
    tol: f64,
    budget: usize,
) -> Result<CorrelationIntegrals, VacuumError> {
    config.validate()?;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(VacuumError::InvalidConfig(format!("tolerance must be > 0, got {tol}")));
    }

    let sigma = config.width;
    let delta = config.gap;
    let sep = config.separation;
    let cutoff = (2.0 * (100.0 / tol).ln()).sqrt();
    let omega_max = delta.abs() + cutoff / sigma;

    let breaks = panel_breaks(omega_max, sep, sigma, budget)?;
    let per_integral_tol = 0.3 * tol;
    let norm = 1.0 / (4.0 * PI * PI);

    let j1 = quadrature::integrate(
        |w| {
            let f = window_fourier(w + delta, sigma);
            Complex64::new(norm * w * f * f, 0.0)
        },
        &breaks,
        per_integral_tol,
        budget,
    )?;

    let phase = |w: f64| Complex64::from_polar(1.0, -sep * (w - delta));

    let j2 = quadrature::integrate(
        |w| {
            let f = window_fourier(w - delta, sigma) * window_fourier(w + delta, sigma);
            phase(w) * (norm * f * sin_over_separation(w, sep))
        },
        &breaks,
        per_integral_tol,
        budget,
    )?;

    let j3 = quadrature::integrate(
        |w| {
            let f = window_fourier(w + delta, sigma);
            phase(w) * (norm * f * f * sin_over_separation(w, sep))
        },
        &breaks,
        per_integral_tol,
        budget,
    )?;

    // Tail beyond omega_max: each integrand is bounded by
    // (σ²/4π)·ω·exp(-σ²(ω-|δ|)²/2), whose tail integral is below tol/100.
    let tail = 3.0 * tol / 100.0;

    Ok(CorrelationIntegrals {
        j1: j1.value.re.max(0.0),
        j2: j2.value,
        j3: j3.value,
        quadrature_error: j1.abs_error + j2.abs_error + j3.abs_error + tail,
    })
}

fn panel_breaks(omega_max: f64, sep: f64, sigma: f64, budget: usize) -> Result<Vec<f64>, VacuumError> {
    let panels = if sep > sigma {
        let half_period = PI / sep;
        let count = (omega_max / half_period).ceil();
        if count > budget as f64 / 2.0 {
            return Err(VacuumError::NonConvergence(QuadError::NonConvergence {
                tol: f64::NAN,
                budget,
                error: f64::INFINITY,
            }));
        }
        (count as usize).max(8)
    } else {
        8
    };
    Ok((0..=panels).map(|k| omega_max * k as f64 / panels as f64).collect())
}

/// Two-qubit state with nonzero entries only on the diagonal and
/// anti-diagonal, in the basis `|00>, |01>, |10>, |11>`:
///
/// ```text
/// [ a1  0   0   c1 ]
/// [ 0   a2  c2  0  ]
/// [ 0   c2* b2  0  ]
/// [ c1* 0   0   b1 ]
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitXState {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: Complex64,
    pub c2: Complex64,
    /// Allowed violation of the 2×2 block positivity conditions, `10·(nλ²)²`.
    pub psd_slack: f64,
}

impl TwoQubitXState {
    pub fn product_ground() -> Self {
        TwoQubitXState {
            a1: 1.0,
            a2: 0.0,
            b1: 0.0,
            b2: 0.0,
            c1: Complex64::new(0.0, 0.0),
            c2: Complex64::new(0.0, 0.0),
            psd_slack: 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        self.a1 + self.a2 + self.b2 + self.b1
    }

    pub fn to_matrix(&self) -> Matrix4<Complex64> {
        let r = |x: f64| Complex64::new(x, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Matrix4::new(
            r(self.a1), z, z, self.c1,
            z, r(self.a2), self.c2, z,
            z, self.c2.conj(), r(self.b2), z,
            self.c1.conj(), z, z, r(self.b1),
        )
    }

    /// Check the trace and block-positivity invariants.
    pub fn check(&self) -> Result<(), VacuumError> {
        if (self.trace() - 1.0).abs() > 1e-12 {
            return Err(VacuumError::InvalidConfig(format!("X state trace {} != 1", self.trace())));
        }
        if self.c1.norm_sqr() > self.a1 * self.b1 + self.psd_slack
            || self.c2.norm_sqr() > self.a2 * self.b2 + self.psd_slack
        {
            return Err(VacuumError::InvalidConfig("X state coherences exceed positivity slack".into()));
        }
        Ok(())
    }

    /// Closed-form singlet fraction of an X state:
    /// `max((a1+b1)/2 + |c1|, (a2+b2)/2 + |c2|)`, normalised by the trace.
    pub fn singlet_fraction_closed_form(&self) -> f64 {
        let t = self.trace();
        (((self.a1 + self.b1) / 2.0 + self.c1.norm()).max((self.a2 + self.b2) / 2.0 + self.c2.norm())) / t
    }

    /// Positive completion of a perturbative X state.
    ///
    /// The first-order channel leaves the double-excitation population `b1`
    /// at zero, which makes the outer block indefinite. `b1` is raised to
    /// `(|c1|² + |c2|² + a2·b2)/a1`, the leading-order value fixed by the
    /// Gaussian (Wick) factorisation of the vacuum four-point function, and
    /// the state is renormalised. The result is positive semidefinite and its
    /// concurrence is nonzero exactly when its singlet fraction exceeds 1/2.
    pub fn positive_completion(&self) -> TwoQubitXState {
        let mut out = *self;
        if self.a1 > 0.0 {
            let wick = (self.c1.norm_sqr() + self.c2.norm_sqr() + self.a2 * self.b2) / self.a1;
            out.b1 = self.b1.max(wick);
        }
        let t = out.trace();
        out.a1 /= t;
        out.a2 /= t;
        out.b1 /= t;
        out.b2 /= t;
        out.c1 /= t;
        out.c2 /= t;
        out
    }

    pub fn to_density(&self) -> Result<DensityOperator2Q, EntanglementError> {
        DensityOperator2Q::with_slack(self.to_matrix(), self.psd_slack.max(1e-12))
    }
}

/// The channel applied `n` times at first order: the effective coupling
/// becomes `n·λ²`.
pub fn amplified_state(
    integrals: &CorrelationIntegrals,
    n: u64,
    coupling_sq: f64,
) -> Result<TwoQubitXState, VacuumError> {
    let x = n as f64 * coupling_sq;
    let excitation = x * integrals.j1;
    if !(excitation < 0.5) {
        return Err(VacuumError::PerturbativeBreakdown(excitation));
    }
    Ok(TwoQubitXState {
        a1: 1.0 - 2.0 * excitation,
        a2: excitation,
        b2: excitation,
        b1: 0.0,
        c1: -integrals.j2.conj() * x,
        c2: integrals.j3 * x,
        psd_slack: 10.0 * x * x,
    })
}

/// First-order singlet-fraction estimate `1/2 + nλ²(|J2| - J1)`.
pub fn first_order_singlet_fraction(integrals: &CorrelationIntegrals, n: u64, coupling_sq: f64) -> f64 {
    0.5 + n as f64 * coupling_sq * (integrals.j2.norm() - integrals.j1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub separation: f64,
    pub n: u64,
    pub outcome: Result<SweepPoint, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub singlet_fraction: f64,
    pub eof: f64,
    pub integrals: CorrelationIntegrals,
}

/// Measures of the completed amplified state at one `(J, n)` pair.
pub fn evaluate_point(integrals: &CorrelationIntegrals, n: u64, coupling_sq: f64) -> Result<SweepPoint, VacuumError> {
    let state = amplified_state(integrals, n, coupling_sq)?.positive_completion();
    let rho = state.to_density()?.clamp_positive()?;
    let singlet_fraction = entanglement::singlet_fraction_best(&rho);
    let eof = entanglement::eof(&rho);
    Ok(SweepPoint { singlet_fraction, eof, integrals: *integrals })
}

/// Sweep singlet fraction and EOF over separations and iteration counts.
/// Rows come back in grid order (`L` outer, `n` inner); a failed row carries
/// its error message instead of aborting the sweep.
pub fn sweep_distance(
    template: &DetectorConfig,
    separations: &[f64],
    iterations: &[u64],
    tol: f64,
) -> Result<Vec<SweepRow>, VacuumError> {
    if separations.is_empty() || iterations.is_empty() {
        return Err(VacuumError::InvalidConfig("sweep grids must be nonempty".into()));
    }
    template.validate()?;

    let per_l: Vec<Vec<SweepRow>> = separations
        .par_iter()
        .map(|&sep| {
            let config = template.with_separation(sep);
            let integrals = correlation_integrals(&config, tol);
            iterations
                .iter()
                .map(|&n| {
                    let outcome = integrals
                        .clone()
                        .and_then(|j| evaluate_point(&j, n, template.coupling_sq))
                        .map_err(|e| e.to_string());
                    SweepRow { separation: sep, n, outcome }
                })
                .collect()
        })
        .collect();
    Ok(per_l.into_iter().flatten().collect())
}

pub const SWEEP_CSV_SCHEMA_VERSION: u32 = 1;
pub const SWEEP_CSV_HEADER: &str = "L_seconds,n,F,EOF,j1,j2_re,j2_im,j3_re,j3_im,quad_err";

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render sweep rows as CSV (17 significant digits, locale-independent).
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("# schema_version: {SWEEP_CSV_SCHEMA_VERSION}\n{SWEEP_CSV_HEADER}\n");
    for row in rows {
        let fields = match &row.outcome {
            Ok(p) => [
                fmt17(p.singlet_fraction),
                fmt17(p.eof),
                fmt17(p.integrals.j1),
                fmt17(p.integrals.j2.re),
                fmt17(p.integrals.j2.im),
                fmt17(p.integrals.j3.re),
                fmt17(p.integrals.j3.im),
                fmt17(p.integrals.quadrature_error),
            ]
            .join(","),
            Err(e) => {
                let kind = if e.contains("converge") { "nonconvergence" } else { "invalid" };
                format!("NaN,NaN,NaN,NaN,NaN,NaN,NaN,error:{kind}")
            }
        };
        out.push_str(&format!("{},{},{}\n", fmt17(row.separation), row.n, fields));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_config() -> DetectorConfig {
        DetectorConfig { coupling_sq: 0.01, gap: 1e5, width: 1e-5, separation: 1e-5, iterations: 500 }
    }

    #[test]
    fn window_fourier_values() {
        let s = 1e-5;
        assert!((window_fourier(0.0, s) - s * PI.sqrt()).abs() < 1e-20);
        assert!((window_fourier(0.0, s) - 1.772_453_850_905_516e-5).abs() < 1e-15);
        let w = 2.0 / s;
        assert!((window_fourier(w, s) - s * PI.sqrt() * (-1.0f64).exp()).abs() < 1e-20);
        for w in [0.3, 1e4, 7e5] {
            assert_eq!(window_fourier(w, s), window_fourier(-w, s));
            assert!(window_fourier(w, s) > 0.0);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = fig_config();
        assert!(c.validate().is_ok());
        c.width = 0.0;
        assert!(c.validate().is_err());
        c = fig_config();
        c.coupling_sq = -1.0;
        assert!(c.validate().is_err());
        c = fig_config();
        c.separation = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn large_gap_suppresses_j1() {
        let c = DetectorConfig { gap: 100.0 / 1e-5, ..fig_config() };
        let j = correlation_integrals(&c, 1e-10).unwrap();
        assert!(j.j1 < 1e-12);
    }

    #[test]
    fn zero_iterations_is_ground_state() {
        let j = correlation_integrals(&fig_config(), 1e-10).unwrap();
        let s = amplified_state(&j, 0, 0.01).unwrap();
        assert_eq!(s.a1, 1.0);
        assert_eq!(s.a2 + s.b2 + s.b1, 0.0);
        assert_eq!(s.c1.norm() + s.c2.norm(), 0.0);
        let p = evaluate_point(&j, 0, 0.01).unwrap();
        assert!((p.singlet_fraction - 0.5).abs() < 1e-12);
        assert_eq!(p.eof, 0.0);
    }

    #[test]
    fn amplified_state_layout_follows_channel_matrix() {
        let j = CorrelationIntegrals {
            j1: 0.01,
            j2: Complex64::new(0.02, 0.005),
            j3: Complex64::new(0.004, -0.003),
            quadrature_error: 0.0,
        };
        let s = amplified_state(&j, 10, 0.01).unwrap();
        let m = s.to_matrix();
        assert_eq!(m[(0, 3)], -j.j2.conj() * 0.1);
        assert_eq!(m[(3, 0)], -j.j2 * 0.1);
        assert_eq!(m[(1, 2)], j.j3 * 0.1);
        assert_eq!(m, m.adjoint());
        assert!((s.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn perturbative_guard() {
        let j = CorrelationIntegrals { j1: 0.1, j2: Complex64::new(0.0, 0.0), j3: Complex64::new(0.0, 0.0), quadrature_error: 0.0 };
        assert!(matches!(amplified_state(&j, 500, 0.01), Err(VacuumError::PerturbativeBreakdown(_))));
        assert!(amplified_state(&j, 499, 0.01).is_ok());
    }

    #[test]
    fn completion_is_positive_and_normalised() {
        let j = correlation_integrals(&fig_config(), 1e-10).unwrap();
        let s = amplified_state(&j, 500, 0.01).unwrap().positive_completion();
        assert!((s.trace() - 1.0).abs() < 1e-14);
        assert!(s.c1.norm_sqr() <= s.a1 * s.b1 + 1e-15);
        assert!(s.c2.norm_sqr() <= s.a2 * s.b2 + 1e-15);
    }

    #[test]
    fn sweep_rows_in_grid_order() {
        let rows = sweep_distance(&fig_config(), &[1e-6, 1e-5, 1e-4], &[0, 100], 1e-10).unwrap();
        let order: Vec<(f64, u64)> = rows.iter().map(|r| (r.separation, r.n)).collect();
        assert_eq!(order, vec![(1e-6, 0), (1e-6, 100), (1e-5, 0), (1e-5, 100), (1e-4, 0), (1e-4, 100)]);
        assert!(sweep_distance(&fig_config(), &[], &[1], 1e-10).is_err());
    }

    #[test]
    fn sweep_records_row_errors() {
        // Far separation blows the panel budget; the row reports, the sweep survives.
        let cfg = fig_config();
        let rows = sweep_distance(&cfg, &[1e-5, 1e3], &[100], 1e-10).unwrap();
        assert!(rows[0].outcome.is_ok());
        assert!(rows[1].outcome.is_err());
        let csv = sweep_to_csv(&rows);
        assert!(csv.lines().nth(3).unwrap().ends_with("error:nonconvergence"));
    }
}
