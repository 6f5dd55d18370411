//! Two qubits, each coupled to its own unpolarized bath, no exchange.
//!
//! `H = K_A S_A . I_A + K_B S_B . I_B`. In a bath sector of spin `I` the
//! single-qubit propagator is `p + q S . I` and, after tracing out the bath,
//! each qubit undergoes a depolarizing channel. Vector polarizations shrink by
//! `g1` (qubit A) and `g1~` (qubit B), the tensor polarization by
//! `g2 = g1 g1~`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::{BathDistribution, Moment};
use crate::error::{invalid, Error, Result};
use crate::polarization::TwoQubitState;
use crate::series::TimeSeries;
use crate::spin::Spin;

/// Purity threshold for the closed-form decoherence path.
const PURE_TOL: f64 = 1e-12;
const MOMENT_TOL: f64 = 1e-12;

/// Coefficients `(p, q)` of the sector propagator `U = p + q S . I` for `H = K S . I`.
///
/// With `Lambda = K (2I + 1) / 4`, `p = cos(Lambda t) - i K sin(Lambda t) / (4 Lambda)` and
/// `q = -i K sin(Lambda t) / Lambda`, up to the global phase `exp(i K t / 4)`.
pub fn pq_single(k: f64, spin: Spin, t: f64) -> (Complex64, Complex64) {
    if k == 0.0 || spin == Spin::ZERO {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let lam = k * spin.multiplicity() as f64 / 4.0;
    let (s, c) = (lam * t).sin_cos();
    let p = Complex64::new(c, -k * s / (4.0 * lam));
    let q = Complex64::new(0.0, -k * s / lam);
    (p, q)
}

/// Shrink factor of the qubit polarization in the spin-`I` sector:
/// `1 - I(I+1)|q|^2 / 3 = 1 - 16 I(I+1) sin^2(Lambda t) / (3 (2I+1)^2)`.
pub fn single_decay(k: f64, spin: Spin, t: f64) -> f64 {
    let (_, q) = pq_single(k, spin, t);
    1.0 - spin.casimir() * q.norm_sqr() / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GCoefficients {
    pub g1: f64,
    pub g1_tilde: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparateBathSystem {
    pub k_a: f64,
    pub k_b: f64,
    pub bath_a: BathDistribution,
    pub bath_b: BathDistribution,
}

impl SeparateBathSystem {
    pub fn new(k_a: f64, k_b: f64, bath_a: BathDistribution, bath_b: BathDistribution) -> Result<Self> {
        if !k_a.is_finite() || !k_b.is_finite() {
            return Err(invalid(format!("couplings must be finite (K_A = {k_a}, K_B = {k_b})")));
        }
        Ok(SeparateBathSystem { k_a, k_b, bath_a, bath_b })
    }

    /// Equal couplings and identical baths.
    pub fn symmetric(k: f64, bath: BathDistribution) -> Result<Self> {
        Self::new(k, k, bath.clone(), bath)
    }

    pub fn g_coefficients(&self, t: f64) -> GCoefficients {
        let g1 = self.bath_a.expectation(|s| single_decay(self.k_a, s, t));
        let g1_tilde = self.bath_b.expectation(|s| single_decay(self.k_b, s, t));
        GCoefficients { g1, g1_tilde, g2: g1 * g1_tilde }
    }

    pub fn evolve(&self, s0: &TwoQubitState, t: f64) -> TwoQubitState {
        let g = self.g_coefficients(t);
        TwoQubitState::new(s0.p_a * g.g1, s0.p_b * g.g1_tilde, s0.pi * g.g2)
    }

    /// `D(t)` sampled on `times`. Pure initial states use the closed form
    /// `(3 - g1^2 P_A^2 - g1~^2 P_B^2 - g2^2 (3 - P_A^2 - P_B^2)) / 4`; other
    /// states go through [`evolve`](Self::evolve). The `d_path` metadata entry
    /// records which branch ran.
    pub fn decoherence_series(&self, s0: &TwoQubitState, times: &[f64]) -> Result<TimeSeries> {
        let pure = s0.is_pure(PURE_TOL);
        let (pa2, pb2) = (s0.p_a.norm_squared(), s0.p_b.norm_squared());
        let values: Vec<f64> = times
            .par_iter()
            .map(|&t| {
                if pure {
                    let g = self.g_coefficients(t);
                    0.25 * (3.0
                        - g.g1 * g.g1 * pa2
                        - g.g1_tilde * g.g1_tilde * pb2
                        - g.g2 * g.g2 * (3.0 - pa2 - pb2))
                } else {
                    self.evolve(s0, t).decoherence()
                }
            })
            .collect();
        let mut series = TimeSeries::new(["t", "D"])?;
        for (&t, d) in times.iter().zip(values) {
            series.push(vec![t, d])?;
        }
        series.set_meta("d_path", if pure { "pure-closed-form" } else { "general" });
        Ok(series)
    }

    fn common_rate(&self) -> Result<f64> {
        if self.k_a != self.k_b {
            return Err(invalid(format!(
                "timescale formula assumes K_A = K_B (got {} and {})",
                self.k_a, self.k_b
            )));
        }
        let (ma, mb) = (self.bath_a.moment(Moment::Casimir), self.bath_b.moment(Moment::Casimir));
        if (ma - mb).abs() > MOMENT_TOL * ma.abs().max(1.0) {
            return Err(invalid(format!(
                "timescale formula assumes identical bath moments (got {ma} and {mb})"
            )));
        }
        Ok(self.k_a * self.k_a * ma / 3.0)
    }

    /// `1/tau_D^2 = K^2 <I^2> (3 - P0^2) / 3`.
    pub fn tau_d(&self, p0: f64) -> Result<f64> {
        let rate = self.common_rate()? * (3.0 - p0 * p0);
        if rate <= 0.0 {
            return Err(Error::Divergent("no decoherence at zero coupling".into()));
        }
        Ok(rate.sqrt().recip())
    }

    /// Gaussian decay time of the concurrence of a pure state with `|P_A| = |P_B| = P0`:
    /// `1/tau_C^2 = K^2 <I^2> (2 + 1/sqrt(1 - P0^2)) / 3`.
    pub fn tau_c(&self, p0: f64) -> Result<f64> {
        let base = self.common_rate()?;
        if p0.abs() >= 1.0 {
            return Err(Error::Divergent(format!(
                "|P0| = {} leaves no concurrence to decay",
                p0.abs()
            )));
        }
        let rate = base * (2.0 + 1.0 / (1.0 - p0 * p0).sqrt());
        if rate <= 0.0 {
            return Err(Error::Divergent("no decoherence at zero coupling".into()));
        }
        Ok(rate.sqrt().recip())
    }

    /// First time in `(0, horizon]` at which `g2 = 1/3`, where the concurrence of an
    /// initially maximally entangled state reaches zero. The crossing is bracketed on
    /// `samples` evenly spaced points and refined by bisection on the exact `g2`.
    pub fn sudden_death_time(&self, s0: &TwoQubitState, horizon: f64, samples: usize) -> Result<Option<f64>> {
        let c0 = s0.concurrence();
        if (c0 - 1.0).abs() > 1e-10 {
            return Err(invalid(format!(
                "sudden death time needs a maximally entangled state (C = {c0})"
            )));
        }
        if !(horizon > 0.0) || samples < 2 {
            return Err(invalid("sudden death search needs horizon > 0 and at least 2 samples"));
        }
        let f = |t: f64| self.g_coefficients(t).g2 - 1.0 / 3.0;
        let dt = horizon / (samples - 1) as f64;
        let mut lo = 0.0;
        for k in 1..samples {
            let hi = k as f64 * dt;
            if f(hi) <= 0.0 {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if f(mid) <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                    }
                    if b - a <= f64::EPSILON * b {
                        break;
                    }
                }
                return Ok(Some(b));
            }
            lo = hi;
        }
        Ok(None)
    }
}
