//! Spectrum and propagator coefficients within one bath-spin sector.
//!
//! Inside the sector of total bath spin `I` the Hamiltonian is, up to the
//! constant `-3J/4`,
//!
//! ```text
//! H' = Kbar X + (dK/2) D + J P_t,    X = (S_A + S_B) . I,  D = (S_A - S_B) . I
//! ```
//!
//! with `Kbar = (K_A + K_B)/2`, `dK = K_A - K_B` and `P_t` the projector on the
//! qubit triplet. Total spin `F` is conserved. `F = I + 1` and `F = I - 1`
//! contain only triplet states, with energies `lambda1 = J + I Kbar` and
//! `lambda2 = J - (I + 1) Kbar`. At `F = I` the singlet and the triplet mix
//! through the 2x2 block `[[0, b], [b, J - Kbar]]` with
//! `b = sqrt(I(I+1)) dK / 2`, whose eigenvalues are `zeta_+-`.
//!
//! The propagator `exp(-i H' t)` is
//!
//! ```text
//! U = (a1 + a2 D) P_s + (a3 + a4 X + a5 X^2 + a6 D) P_t
//! ```
//!
//! The cross-product operator `(S_A x S_B) . I` is not needed: on the triplet
//! it equals `(i/2) D`, so its coefficient `a7` is identically zero here.

use num_complex::Complex64;

use crate::spin::Spin;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenvalue data of one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSpectrum {
    pub spin: Spin,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `(zeta_+ + zeta_-)/2`
    pub lam_plus: f64,
    /// `(zeta_+ - zeta_-)/2 >= 0`
    pub lam_minus: f64,
    /// `(J - Kbar) / (2 Lambda_-)`
    pub p: f64,
    /// `b / Lambda_-`, carrying the sign of `K_A - K_B`; `p^2 + q^2 = 1`.
    pub q: f64,
}

pub fn sector_spectrum(k_a: f64, k_b: f64, j: f64, spin: Spin) -> SectorSpectrum {
    let k_bar = 0.5 * (k_a + k_b);
    let i = spin.value();
    let delta0 = j - k_bar;
    let b = spin.casimir().sqrt() * 0.5 * (k_a - k_b);
    let lam_plus = 0.5 * delta0;
    let lam_minus = (0.25 * delta0 * delta0 + b * b).sqrt();
    let (p, q) = if lam_minus == 0.0 { (1.0, 0.0) } else { (delta0 / (2.0 * lam_minus), b / lam_minus) };
    SectorSpectrum {
        spin,
        zeta_plus: lam_plus + lam_minus,
        zeta_minus: lam_plus - lam_minus,
        lambda1: j + i * k_bar,
        lambda2: j - (i + 1.0) * k_bar,
        lam_plus,
        lam_minus,
        p,
        q,
    }
}

/// Time-dependent propagator coefficients of one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorCoefficients {
    pub spin: Spin,
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
    pub a4: Complex64,
    pub a5: Complex64,
    pub a6: Complex64,
    pub a7: Complex64,
}

impl SectorCoefficients {
    pub fn as_array(&self) -> [Complex64; 7] {
        [self.a1, self.a2, self.a3, self.a4, self.a5, self.a6, self.a7]
    }
}

pub fn a_coefficients(spec: &SectorSpectrum, t: f64) -> SectorCoefficients {
    let zero = Complex64::new(0.0, 0.0);
    let spin = spec.spin;
    if spin == Spin::ZERO {
        // only the F = 0 singlet (energy 0) and the F = 1 triplet (energy J = lambda1)
        return SectorCoefficients {
            spin,
            a1: Complex64::new(1.0, 0.0),
            a2: zero,
            a3: (-I * spec.lambda1 * t).exp(),
            a4: zero,
            a5: zero,
            a6: zero,
            a7: zero,
        };
    }
    let i = spin.value();
    let jj = spin.casimir();
    let phase = (-I * spec.lam_plus * t).exp();
    let (s, c) = (spec.lam_minus * t).sin_cos();
    let a1 = phase * Complex64::new(c, spec.p * s);
    // triplet amplitude in the mixed F = I pair
    let w = phase * Complex64::new(c, -spec.p * s);
    let a2 = -I * phase * (spec.q * s / jj.sqrt());
    let e1 = (-I * spec.lambda1 * t).exp();
    let e2 = (-I * spec.lambda2 * t).exp();
    let m = 2.0 * i + 1.0;
    let denom = jj * m;
    let a3 = w + (e1 - e2) / m;
    let a4 = (e1 * (i * (i + 2.0)) - e2 * (i * i - 1.0) - w * m) / denom;
    let a5 = (e1 * i + e2 * (i + 1.0) - w * m) / denom;
    SectorCoefficients { spin, a1, a2, a3, a4, a5, a6: a2, a7: zero }
}
