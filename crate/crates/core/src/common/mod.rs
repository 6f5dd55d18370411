//! Two qubits coupled to one common unpolarized bath, with exchange.
//!
//! `H = K_A S_A . I + K_B S_B . I + J S_A . S_B`. The total bath spin `I` is
//! conserved, so the reduced dynamics is a `lambda_I`-weighted sum over
//! sectors of the space "two qubits (x) spin I". [`sector`] evolves each sector
//! exactly; [`FCoefficients`] and [`BellClassCoefficients`] are the closed
//! forms for symmetric couplings and for singlet/triplet superpositions.

pub mod coefficients;
pub mod sector;

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::{BathDistribution, Moment};
use crate::error::{invalid, Error, Result};
use crate::polarization::{bell_basis, DensityMatrix4, TwoQubitState};
use crate::spin::Spin;
pub use coefficients::{a_coefficients, sector_spectrum, SectorCoefficients, SectorSpectrum};
use sector::SectorSpace;

const PURE_TOL: f64 = 1e-10;

/// Below this ratio of `J` to `(K_A + K_B) sqrt(<I^2>)` the large-exchange
/// approximation is flagged as outside its range.
pub const LARGE_J_MIN_RATIO: f64 = 10.0;

/// Coefficients of the linear polarization map for `K_A = K_B`:
///
/// ```text
/// P_A' = f1 P_A + f2 P_B + f3 v
/// P_B' = f4 P_B + f5 P_A - f6 v
/// Pi'  = f7 Pi + f8 Pi^T + f9 1 Tr Pi + f10 eps . (P_A - P_B)
/// ```
///
/// where `v_n = sum_ij eps_nij Pi^ij` and `(eps . u)^mn = sum_k eps_mnk u_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FCoefficients {
    pub f0: Complex64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub f5: f64,
    pub f6: f64,
    pub f7: f64,
    pub f8: f64,
    pub f9: f64,
    pub f10: f64,
}

impl FCoefficients {
    pub fn apply(&self, s: &TwoQubitState) -> TwoQubitState {
        let v = s.tensor_axial();
        let u = s.p_a - s.p_b;
        let eps_u = epsilon_matrix(&u);
        TwoQubitState::new(
            s.p_a * self.f1 + s.p_b * self.f2 + v * self.f3,
            s.p_b * self.f4 + s.p_a * self.f5 - v * self.f6,
            s.pi * self.f7
                + s.pi.transpose() * self.f8
                + Matrix3::identity() * (self.f9 * s.pi.trace())
                + eps_u * self.f10,
        )
    }
}

/// Reduced state of `[(1 + r)|S0> + (1 - r)|T0>] / sqrt(2(1 + r^2))` in the Bell basis:
///
/// ```text
/// rho = c1 |S0><S0| + c2 |T0><T0| + c4 (|T1><T1| + |T2><T2|)
///     + c3 |T0><S0| + c5 |T1><T2| + h.c.
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellClassCoefficients {
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
    pub c4: Complex64,
    pub c5: Complex64,
}

impl BellClassCoefficients {
    /// Matrix in the Bell basis `{S0, T0, T1, T2}`.
    pub fn bell_matrix(&self) -> Matrix4<Complex64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = self.c1;
        m[(1, 1)] = self.c2;
        m[(2, 2)] = self.c4;
        m[(3, 3)] = self.c4;
        m[(1, 0)] = self.c3;
        m[(0, 1)] = self.c3.conj();
        m[(2, 3)] = self.c5;
        m[(3, 2)] = self.c5.conj();
        m
    }

    pub fn density(&self) -> DensityMatrix4 {
        let b = bell_basis();
        DensityMatrix4::from_matrix_unchecked(b * self.bell_matrix() * b.adjoint())
    }
}

#[derive(Debug, Clone)]
struct Sector {
    weight: f64,
    spectrum: SectorSpectrum,
    space: SectorSpace,
}

/// Common-bath system with precomputed per-sector operators.
#[derive(Debug, Clone)]
pub struct CommonBathSystem {
    k_a: f64,
    k_b: f64,
    j: f64,
    bath: BathDistribution,
    sectors: Vec<Sector>,
}

impl CommonBathSystem {
    pub fn new(k_a: f64, k_b: f64, j: f64, bath: BathDistribution) -> Result<Self> {
        if ![k_a, k_b, j].iter().all(|x| x.is_finite()) {
            return Err(invalid(format!(
                "couplings must be finite (K_A = {k_a}, K_B = {k_b}, J = {j})"
            )));
        }
        let sectors = bath
            .entries()
            .par_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|&(spin, weight)| Sector {
                weight,
                spectrum: sector_spectrum(k_a, k_b, j, spin),
                space: SectorSpace::new(spin, k_a, k_b, j),
            })
            .collect();
        Ok(CommonBathSystem { k_a, k_b, j, bath, sectors })
    }

    pub fn k_a(&self) -> f64 {
        self.k_a
    }

    pub fn k_b(&self) -> f64 {
        self.k_b
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn bath(&self) -> &BathDistribution {
        &self.bath
    }

    pub fn is_symmetric(&self) -> bool {
        self.k_a == self.k_b
    }

    pub fn sector_spectrum(&self, spin: Spin) -> SectorSpectrum {
        sector_spectrum(self.k_a, self.k_b, self.j, spin)
    }

    pub fn a_coefficients(&self, spin: Spin, t: f64) -> SectorCoefficients {
        a_coefficients(&self.sector_spectrum(spin), t)
    }

    /// Sector-exact reduced density matrix at time `t`.
    pub fn evolve_density(&self, rho: &DensityMatrix4, t: f64) -> DensityMatrix4 {
        let mut out = Matrix4::<Complex64>::zeros();
        for s in &self.sectors {
            let u = s.space.propagator_from_coefficients(&a_coefficients(&s.spectrum, t));
            out += s.space.reduce(&u, rho.matrix()) * Complex64::new(s.weight, 0.0);
        }
        DensityMatrix4::from_matrix_unchecked(out)
    }

    /// As [`evolve_density`](Self::evolve_density), with block propagators from the
    /// eigendecomposition of the sector Hamiltonian instead of the coefficient expansion.
    pub fn evolve_density_dense(&self, rho: &DensityMatrix4, t: f64) -> DensityMatrix4 {
        let mut out = Matrix4::<Complex64>::zeros();
        for s in &self.sectors {
            let u = s.space.propagator_dense(t);
            out += s.space.reduce(&u, rho.matrix()) * Complex64::new(s.weight, 0.0);
        }
        DensityMatrix4::from_matrix_unchecked(out)
    }

    /// Sector-exact evolution of the polarizations; valid for any couplings.
    pub fn evolve_asymmetric(&self, s0: &TwoQubitState, t: f64) -> TwoQubitState {
        self.evolve_density(&s0.to_density(), t).polarizations()
    }

    /// Closed-form evolution through [`FCoefficients`]; requires `K_A = K_B`.
    pub fn evolve_symmetric(&self, s0: &TwoQubitState, t: f64) -> Result<TwoQubitState> {
        Ok(self.f_coefficients(t)?.apply(s0))
    }

    /// Closed form when the couplings are equal, sector-exact otherwise.
    pub fn evolve(&self, s0: &TwoQubitState, t: f64) -> TwoQubitState {
        if self.is_symmetric() {
            self.f_coefficients(t).expect("symmetric couplings").apply(s0)
        } else {
            self.evolve_asymmetric(s0, t)
        }
    }

    /// [`evolve`](Self::evolve) on every time, in parallel.
    pub fn trajectory(&self, s0: &TwoQubitState, times: &[f64]) -> Vec<TwoQubitState> {
        times.par_iter().map(|&t| self.evolve(s0, t)).collect()
    }

    pub fn f_coefficients(&self, t: f64) -> Result<FCoefficients> {
        if !self.is_symmetric() {
            return Err(invalid(format!(
                "closed-form polarization map needs K_A = K_B (got {} and {}); use evolve_asymmetric",
                self.k_a, self.k_b
            )));
        }
        let mut f0 = Complex64::new(0.0, 0.0);
        let mut vec_sum = 0.0;
        let mut ten_sum = 0.0;
        for s in &self.sectors {
            let a = a_coefficients(&s.spectrum, t);
            let jj = s.spectrum.spin.casimir();
            let cross = 4.0 * (a.a3 * a.a5.conj()).re;
            f0 += (a.a3 + a.a5 * (2.0 * jj / 3.0)) * s.weight;
            vec_sum += s.weight * (1.0 + a.a3.norm_sqr() + (a.a5.norm_sqr() + cross) * jj / 3.0);
            ten_sum += s.weight
                * (a.a3.norm_sqr() + (a.a5.norm_sqr() * (8.0 * jj - 1.0) / 5.0 + cross) * jj / 3.0);
        }
        let f1 = 0.25 * vec_sum + 0.5 * f0.re;
        let f7 = -0.25 + 0.75 * ten_sum + 0.5 * f0.re;
        let f8 = f7 - f0.re;
        let odd = 0.5 * f0.im;
        Ok(FCoefficients {
            f0,
            f1,
            f2: f1 - f0.re,
            f3: odd,
            f4: f1,
            f5: f1 - f0.re,
            f6: odd,
            f7,
            f8,
            f9: (1.0 - f7 - f8) / 3.0,
            f10: -odd,
        })
    }

    /// Closed-form reduced state for the singlet/triplet superposition with parameter `r`.
    pub fn bell_class_coefficients(&self, r: f64, t: f64) -> BellClassCoefficients {
        let norm = 2.0 * (1.0 + r * r);
        let (alpha2, beta2) = ((1.0 + r).powi(2) / norm, (1.0 - r).powi(2) / norm);
        let ab = (1.0 - r * r) / norm;
        let zero = Complex64::new(0.0, 0.0);
        let (mut c1, mut c2, mut c3, mut c4, mut c5) = (0.0, 0.0, zero, 0.0, 0.0);
        for s in &self.sectors {
            let a = a_coefficients(&s.spectrum, t);
            let jj = s.spectrum.spin.casimir();
            let w = s.weight;
            let a2sq = a.a2.norm_sqr() * jj / 3.0;
            c1 += w * (alpha2 * a.a1.norm_sqr() + beta2 * a.a6.norm_sqr() * jj / 3.0);
            c2 += w
                * (alpha2 * a2sq
                    + beta2
                        * (a.a3.norm_sqr()
                            + jj / 3.0
                                * (4.0 * (a.a3 * a.a5.conj()).re
                                    + a.a5.norm_sqr() * (8.0 * jj - 1.0) / 5.0)));
            c3 += (a.a1.conj() * (a.a3 + a.a5 * (2.0 * jj / 3.0)) + a.a2 * a.a6.conj() * (jj / 3.0)) * w;
            c4 += w
                * (alpha2 * a2sq
                    + beta2
                        * (a.a4.norm_sqr() * jj / 3.0 - jj / 3.0 * (a.a4 * a.a5.conj()).re
                            + a.a5.norm_sqr() * jj * (2.0 * jj + 1.0) / 30.0));
            c5 += w * jj * (a.a2.conj() * (a.a4 * 2.0 - a.a5)).re;
        }
        let c = |x: f64| Complex64::new(x, 0.0);
        BellClassCoefficients {
            c1: c(c1),
            c2: c(c2),
            c3: c3 * ab,
            c4: c(c4),
            c5: c(c5 * (r * r - 1.0) / (6.0 * (1.0 + r * r))),
        }
    }

    /// Singlet survival probability `<S0|rho(t)|S0>` for an initial singlet:
    /// `sum lambda_I [cos^2(Lambda_- t) + p^2 sin^2(Lambda_- t)]`.
    pub fn singlet_survival(&self, t: f64) -> f64 {
        self.sectors
            .iter()
            .map(|s| {
                let sp = &s.spectrum;
                let sn = (sp.lam_minus * t).sin();
                s.weight * (1.0 - (1.0 - sp.p * sp.p) * sn * sn)
            })
            .sum()
    }

    /// `J / ((K_A + K_B) sqrt(<I^2>))`, the figure of merit of [`singlet_survival_large_j`](Self::singlet_survival_large_j).
    pub fn large_j_ratio(&self) -> f64 {
        self.j / ((self.k_a + self.k_b).abs() * self.bath.moment(Moment::Casimir).sqrt())
    }

    /// Large-exchange form of the singlet survival for a Gaussian bath of `N` spins:
    ///
    /// `1 - (3/2) beta^2 [1 - cos(W t + (5/2) atan(u)) / (1 + u^2)^(5/4)]`
    ///
    /// with `W = J - Kbar`, `beta = (K_A - K_B) sqrt(N) / (2W)` and `u = beta^2 W t`.
    pub fn singlet_survival_large_j(&self, t: f64) -> Result<f64> {
        let n = self
            .bath
            .n_spins()
            .ok_or_else(|| invalid("large-J singlet survival needs the bath size N"))?;
        let omega = self.j - 0.5 * (self.k_a + self.k_b);
        if omega == 0.0 {
            return Err(Error::Divergent("J equals the mean hyperfine coupling".into()));
        }
        let beta = (self.k_a - self.k_b) * (n as f64).sqrt() / (2.0 * omega);
        let u = beta * beta * omega * t;
        let envelope = (1.0 + u * u).powf(-1.25);
        Ok(1.0 - 1.5 * beta * beta * (1.0 - (omega * t + 2.5 * u.atan()).cos() * envelope))
    }

    /// Short-time Gaussian rate `1/tau_D^2` of `D(t)` for a pure initial state:
    ///
    /// `<I^2> [(K_A^2 + K_B^2)(3 - P^2) + K_A K_B R] / 6`, `R = Tr(Pi Pi) - (Tr Pi)^2`.
    ///
    /// Independent of `J`.
    pub fn short_time_rate(&self, s0: &TwoQubitState) -> Result<f64> {
        let d = s0.decoherence();
        if d.abs() > PURE_TOL {
            return Err(Error::NotPure(d));
        }
        let p2 = s0.p_a.norm_squared();
        let r = s0.tensor_invariant();
        let (ka, kb) = (self.k_a, self.k_b);
        let m = self.bath.moment(Moment::Casimir);
        Ok(m * ((ka * ka + kb * kb) * (3.0 - p2) + ka * kb * r) / 6.0)
    }

    /// `tau_D = rate^(-1/2)`; infinite when the short-time rate vanishes.
    pub fn short_time_tau(&self, s0: &TwoQubitState) -> Result<f64> {
        let rate = self.short_time_rate(s0)?;
        Ok(if rate <= 0.0 { f64::INFINITY } else { rate.sqrt().recip() })
    }

    /// Quadratic decay coefficients of the transverse (`Pi^xx`) and longitudinal
    /// (`Pi^zz`) tensor polarization of the `S^z = 0` triplet:
    /// `(2/3, 4/3) K^2 <I^2>`.
    pub fn transverse_longitudinal_rates(&self) -> Result<(f64, f64)> {
        if !self.is_symmetric() {
            return Err(invalid("transverse/longitudinal rates assume K_A = K_B"));
        }
        let base = self.k_a * self.k_a * self.bath.moment(Moment::Casimir);
        Ok((2.0 * base / 3.0, 4.0 * base / 3.0))
    }
}

/// Singlet decoherence from its survival probability `c1`, with the remaining
/// weight spread evenly over the triplets: `D = (2/3)(1 - c1)(1 + 2 c1)`.
pub fn singlet_decoherence(c1: f64) -> f64 {
    2.0 / 3.0 * (1.0 - c1) * (1.0 + 2.0 * c1)
}

/// Axial vector helper: `(eps . u)^mn = sum_k eps_mnk u_k`.
pub fn epsilon_matrix(u: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, u[2], -u[1], -u[2], 0.0, u[0], u[1], -u[0], 0.0)
}
