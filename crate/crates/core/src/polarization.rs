//! Two-qubit states as vector and tensor polarizations.
//!
//! A two-qubit density matrix is written as
//!
//! ```text
//! rho = 1/4 + (1/2) P_A . S_A + (1/2) P_B . S_B + sum_mn Pi^mn S_A^m S_B^n
//! ```
//!
//! with `S = sigma / 2`, so that `P = 2 Tr[rho S]` and
//! `Pi^mn = 4 Tr[rho S_A^m S_B^n]`. The computational basis is ordered
//! `{up-up, up-down, down-up, down-down}` with the first label on qubit A.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Eigenvalues of a density matrix down to `-POSITIVITY_TOL` count as zero.
pub const POSITIVITY_TOL: f64 = 1e-12;
/// Hermiticity and unit-trace tolerance for density matrices handed in by callers.
pub const INPUT_TOL: f64 = 1e-10;
/// Off-block magnitude allowed by [`concurrence_sz_block`].
pub const SZ_BLOCK_TOL: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

struct SpinOps {
    a: [Matrix4<Complex64>; 3],
    b: [Matrix4<Complex64>; 3],
    yy: Matrix4<Complex64>,
}

fn single_spin() -> [Matrix2<Complex64>; 3] {
    let h = 0.5;
    [
        Matrix2::new(C0, c(h), c(h), C0),
        Matrix2::new(C0, Complex64::new(0.0, -h), Complex64::new(0.0, h), C0),
        Matrix2::new(c(h), C0, C0, c(-h)),
    ]
}

fn ops() -> &'static SpinOps {
    static OPS: OnceLock<SpinOps> = OnceLock::new();
    OPS.get_or_init(|| {
        let s = single_spin();
        let id = Matrix2::<Complex64>::identity();
        let kron = |x: &Matrix2<Complex64>, y: &Matrix2<Complex64>| -> Matrix4<Complex64> {
            let k = x.kronecker(y);
            Matrix4::from_fn(|i, j| k[(i, j)])
        };
        let a = [kron(&s[0], &id), kron(&s[1], &id), kron(&s[2], &id)];
        let b = [kron(&id, &s[0]), kron(&id, &s[1]), kron(&id, &s[2])];
        let sy2 = s[1] * c(2.0);
        let yy = kron(&sy2, &sy2);
        SpinOps { a, b, yy }
    })
}

/// Spin operators `S_A^m` (as 4x4 matrices in the product basis).
pub fn spin_a(m: usize) -> Matrix4<Complex64> {
    ops().a[m]
}

/// Spin operators `S_B^m`.
pub fn spin_b(m: usize) -> Matrix4<Complex64> {
    ops().b[m]
}

/// Polarization representation of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub p_a: Vector3<f64>,
    pub p_b: Vector3<f64>,
    pub pi: Matrix3<f64>,
}

impl TwoQubitState {
    pub fn new(p_a: Vector3<f64>, p_b: Vector3<f64>, pi: Matrix3<f64>) -> Self {
        TwoQubitState { p_a, p_b, pi }
    }

    /// The maximally mixed state `1/4`.
    pub fn maximally_mixed() -> Self {
        TwoQubitState::new(Vector3::zeros(), Vector3::zeros(), Matrix3::zeros())
    }

    /// Polarizations of the pure state `|ket><ket|`; `ket` is normalized here.
    pub fn from_ket(ket: &Vector4<Complex64>) -> Self {
        let ket = ket / Complex64::from(ket.norm());
        let rho = DensityMatrix4(ket * ket.adjoint());
        rho.polarizations()
    }

    pub fn to_density(&self) -> DensityMatrix4 {
        state_to_density(self)
    }

    /// `1 - Tr rho^2`
    pub fn decoherence(&self) -> f64 {
        decoherence_measure(self)
    }

    pub fn purity(&self) -> f64 {
        1.0 - self.decoherence()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.decoherence().abs() <= tol
    }

    pub fn concurrence(&self) -> f64 {
        concurrence(&self.to_density())
    }

    /// `Tr Pi^2 - (Tr Pi)^2`, with `Tr Pi^2` the trace of the matrix square.
    pub fn tensor_invariant(&self) -> f64 {
        (self.pi * self.pi).trace() - self.pi.trace().powi(2)
    }

    /// The vector `v_n = sum_ij eps_nij Pi^ij` built from the antisymmetric part of `Pi`.
    pub fn tensor_axial(&self) -> Vector3<f64> {
        let p = &self.pi;
        Vector3::new(
            p[(1, 2)] - p[(2, 1)],
            p[(2, 0)] - p[(0, 2)],
            p[(0, 1)] - p[(1, 0)],
        )
    }

    /// Largest absolute difference over all fifteen polarization components.
    pub fn max_abs_diff(&self, other: &TwoQubitState) -> f64 {
        let dp_a = (self.p_a - other.p_a).amax();
        let dp_b = (self.p_b - other.p_b).amax();
        let dpi = (self.pi - other.pi).amax();
        dp_a.max(dp_b).max(dpi)
    }
}

/// Result of a positivity check on a reconstructed density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Physicality {
    Physical,
    NonPhysical { min_eigenvalue: f64 },
}

/// A 4x4 two-qubit density matrix in the basis `{uu, ud, du, dd}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Matrix4<Complex64>);

impl DensityMatrix4 {
    /// Wraps `m` after checking Hermiticity and unit trace to [`INPUT_TOL`].
    pub fn from_matrix(m: Matrix4<Complex64>) -> Result<Self> {
        let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > INPUT_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let tr = m.trace();
        if (tr - C1).norm() > INPUT_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        Ok(DensityMatrix4(m))
    }

    /// Wraps `m` without validation.
    pub fn from_matrix_unchecked(m: Matrix4<Complex64>) -> Self {
        DensityMatrix4(m)
    }

    pub fn pure(ket: &Vector4<Complex64>) -> Self {
        let ket = ket / Complex64::from(ket.norm());
        DensityMatrix4(ket * ket.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let herm = (self.0 + self.0.adjoint()) * c(0.5);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn physicality(&self) -> Physicality {
        let min = self.eigenvalues()[0];
        if min < -POSITIVITY_TOL {
            Physicality::NonPhysical { min_eigenvalue: min }
        } else {
            Physicality::Physical
        }
    }

    pub fn polarizations(&self) -> TwoQubitState {
        let o = ops();
        let tr = |m: &Matrix4<Complex64>| (self.0 * m).trace().re;
        let p_a = Vector3::from_fn(|m, _| 2.0 * tr(&o.a[m]));
        let p_b = Vector3::from_fn(|m, _| 2.0 * tr(&o.b[m]));
        let pi = Matrix3::from_fn(|m, n| 4.0 * tr(&(o.a[m] * o.b[n])));
        TwoQubitState { p_a, p_b, pi }
    }

    /// Matrix elements in the Bell basis `{S0, T0, T1, T2}` (see [`bell_basis`]).
    pub fn in_bell_basis(&self) -> Matrix4<Complex64> {
        let b = bell_basis();
        b.adjoint() * self.0 * b
    }

    pub fn concurrence(&self) -> f64 {
        concurrence(self)
    }
}

/// Columns are `|S0> = (ud - du)/sqrt2`, `|T0> = (ud + du)/sqrt2`,
/// `|T1> = (uu + dd)/sqrt2`, `|T2> = (uu - dd)/sqrt2`.
pub fn bell_basis() -> Matrix4<Complex64> {
    let h = c(FRAC_1_SQRT_2);
    let z = C0;
    #[rustfmt::skip]
    let m = Matrix4::new(
        z,  z,  h,  h,
        h,  h,  z,  z,
        -h, h,  z,  z,
        z,  z,  h,  -h,
    );
    m
}

pub fn state_to_density(s: &TwoQubitState) -> DensityMatrix4 {
    let o = ops();
    let mut rho = Matrix4::<Complex64>::identity() * c(0.25);
    for m in 0..3 {
        rho += o.a[m] * c(0.5 * s.p_a[m]);
        rho += o.b[m] * c(0.5 * s.p_b[m]);
        for n in 0..3 {
            if s.pi[(m, n)] != 0.0 {
                rho += o.a[m] * o.b[n] * c(s.pi[(m, n)]);
            }
        }
    }
    DensityMatrix4(rho)
}

/// Inverse of [`state_to_density`]. Fails on non-Hermitian or non-unit-trace input.
pub fn density_to_state(rho: &DensityMatrix4) -> Result<TwoQubitState> {
    let checked = DensityMatrix4::from_matrix(rho.0)?;
    Ok(checked.polarizations())
}

/// `D = 1 - Tr rho^2 = (3 - P_A^2 - P_B^2 - sum Pi^2) / 4`, in `[0, 3/4]` for physical states.
pub fn decoherence_measure(s: &TwoQubitState) -> f64 {
    0.25 * (3.0 - s.p_a.norm_squared() - s.p_b.norm_squared() - s.pi.norm_squared())
}

fn hermitian_sqrt(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let herm = (m + m.adjoint()) * c(0.5);
    let eig = herm.symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| if l <= POSITIVITY_TOL { 0.0 } else { l.sqrt() });
    let v = eig.eigenvectors;
    let d = Matrix4::from_diagonal(&roots.map(c));
    v * d * v.adjoint()
}

/// Wootters concurrence.
///
/// Computed as `max(0, s1 - s2 - s3 - s4)` from the singular values of
/// `sqrt(rho) sqrt(rho~)`, which equal the square roots of the eigenvalues of
/// `rho (sy x sy) rho* (sy x sy)`. Eigenvalues of `rho` with magnitude below
/// [`POSITIVITY_TOL`] are treated as zero; more negative ones are clamped.
pub fn concurrence(rho: &DensityMatrix4) -> f64 {
    let yy = ops().yy;
    let root = hermitian_sqrt(&rho.0);
    let root_tilde = yy * root.conjugate() * yy;
    let mut sv: Vec<f64> = (root * root_tilde).singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    (sv[0] - sv[1] - sv[2] - sv[3]).max(0.0)
}

const BASIS_LABELS: [&str; 4] = ["up,up", "up,down", "down,up", "down,down"];

/// Closed-form concurrence for states commuting with `S_A^z + S_B^z`.
///
/// `C = max(sqrt((Pxx + Pyy)^2 + (Pxy - Pyx)^2) - sqrt((1 + Pzz)^2 + (PzA + PzB)^2), 0) / 2`
pub fn concurrence_sz_block(s: &TwoQubitState) -> Result<f64> {
    let rho = s.to_density();
    let sz = [1, 0, 0, -1];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if sz[i] != sz[j] {
                let mag = rho.0[(i, j)].norm();
                if mag > SZ_BLOCK_TOL {
                    return Err(Error::NotSzBlock {
                        block: format!("<{}|rho|{}>", BASIS_LABELS[i], BASIS_LABELS[j]),
                        magnitude: mag,
                    });
                }
            }
        }
    }
    let p = &s.pi;
    let coherent = (p[(0, 0)] + p[(1, 1)]).hypot(p[(0, 1)] - p[(1, 0)]);
    let diagonal = (1.0 + p[(2, 2)]).hypot(s.p_a[2] + s.p_b[2]);
    Ok((0.5 * (coherent - diagonal)).max(0.0))
}

/// Named initial states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedState {
    /// `(ud - du)/sqrt2`
    Singlet,
    /// `(ud + du)/sqrt2`
    Triplet0,
    /// `(uu + dd)/sqrt2`
    BellT1,
    /// `(uu - dd)/sqrt2`
    BellT2,
    /// `|ud>`
    UpDown,
    /// `(|ud> + r|du>) / sqrt(1 + r^2)`
    UpDownSuperposition { r: f64 },
    /// `[(1 + r)|S0> + (1 - r)|T0>] / sqrt(2 (1 + r^2))`; `r = 1` is the singlet,
    /// `r = -1` the `S^z = 0` triplet. Equal to `UpDownSuperposition { r: -r }`.
    SingletTripletMix { r: f64 },
    /// `p |S0><S0| + (1 - p)/4`
    Werner { p: f64 },
    /// `(|up, down_n> - gamma |down, up_n>) / sqrt(1 + |gamma|^2)` with `n` at polar
    /// angles `(theta, phi)` and qubit A quantized along z.
    GeneralPure { gamma: Complex64, theta: f64, phi: f64 },
}

impl NamedState {
    /// State vector for the pure members of the family.
    pub fn ket(&self) -> Option<Vector4<Complex64>> {
        let h = FRAC_1_SQRT_2;
        let k = |a: f64, b: f64, cc: f64, d: f64| Some(Vector4::new(c(a), c(b), c(cc), c(d)));
        match *self {
            NamedState::Singlet => k(0.0, h, -h, 0.0),
            NamedState::Triplet0 => k(0.0, h, h, 0.0),
            NamedState::BellT1 => k(h, 0.0, 0.0, h),
            NamedState::BellT2 => k(h, 0.0, 0.0, -h),
            NamedState::UpDown => k(0.0, 1.0, 0.0, 0.0),
            NamedState::UpDownSuperposition { r } => {
                let n = (1.0 + r * r).sqrt();
                k(0.0, 1.0 / n, r / n, 0.0)
            }
            NamedState::SingletTripletMix { r } => {
                let n = (1.0 + r * r).sqrt();
                k(0.0, 1.0 / n, -r / n, 0.0)
            }
            NamedState::Werner { .. } => None,
            NamedState::GeneralPure { gamma, theta, phi } => {
                let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let up_n = [c(ct), Complex64::from_polar(st, phi)];
                let down_n = [-Complex64::from_polar(st, -phi), c(ct)];
                let norm = c((1.0 + gamma.norm_sqr()).sqrt());
                // |up>_A (x) |down_n>_B occupies indices 0,1; |down>_A (x) |up_n>_B indices 2,3.
                Some(
                    Vector4::new(down_n[0], down_n[1], -gamma * up_n[0], -gamma * up_n[1])
                        / norm,
                )
            }
        }
    }

    pub fn state(&self) -> Result<TwoQubitState> {
        match *self {
            NamedState::Werner { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("Werner weight p = {p} outside [0, 1]")));
                }
                Ok(TwoQubitState::new(Vector3::zeros(), Vector3::zeros(), Matrix3::identity() * -p))
            }
            NamedState::Singlet => Ok(TwoQubitState::new(
                Vector3::zeros(),
                Vector3::zeros(),
                -Matrix3::identity(),
            )),
            NamedState::Triplet0 => Ok(bell_diagonal(1.0, 1.0, -1.0)),
            NamedState::BellT1 => Ok(bell_diagonal(1.0, -1.0, 1.0)),
            NamedState::BellT2 => Ok(bell_diagonal(-1.0, 1.0, 1.0)),
            _ => {
                let ket = self.ket().expect("pure family");
                let n = ket.norm();
                if !n.is_finite() || n == 0.0 {
                    return Err(invalid(format!("{self:?} does not define a normalizable state")));
                }
                Ok(TwoQubitState::from_ket(&ket))
            }
        }
    }

    pub fn density(&self) -> Result<DensityMatrix4> {
        Ok(self.state()?.to_density())
    }
}

fn bell_diagonal(xx: f64, yy: f64, zz: f64) -> TwoQubitState {
    TwoQubitState::new(
        Vector3::zeros(),
        Vector3::zeros(),
        Matrix3::from_diagonal(&Vector3::new(xx, yy, zz)),
    )
}
