//! Brute-force evolution in the full qubit + bath Hilbert space.
//!
//! Every nucleus is a spin 1/2. Basis states are bit strings with `1` meaning
//! spin down; qubit A is the highest bit, then qubit B, then bath spins in
//! order, so a full index reads `q * 2^n + bath` with `q` the two-qubit index
//! used everywhere else in the crate. All Hamiltonians here are sums of
//! Heisenberg pair terms, so they are real and conserve total `S^z`; they are
//! stored and diagonalized one magnetization block at a time.

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::polarization::{DensityMatrix4, TwoQubitState};
use crate::spin::Spin;

/// Largest supported bath.
pub const MAX_BATH_SPINS: usize = 12;
/// Largest Hilbert space for which [`FullSystem::dense_hamiltonian`] is built.
pub const DENSE_CAP: usize = 1024;

const SECTOR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleMode {
    /// Qubit A couples to bath spins `0..n_a` with `k_a`, qubit B to the rest with `k_b`.
    Separate { k_a: f64, k_b: f64, n_a: usize },
    /// Both qubits couple to every bath spin, plus exchange `j`.
    Common { k_a: f64, k_b: f64, j: f64 },
    /// Per-nucleus couplings, plus exchange `j`.
    Inhomogeneous { k_a: Vec<f64>, k_b: Vec<f64>, j: f64 },
}

/// Initial state of the bath; the qubits start uncorrelated with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathState {
    /// `1 / 2^n`
    FullyMixed,
    /// Normalized projector onto total bath spin `I`.
    SectorProjected(Spin),
}

#[derive(Debug, Clone)]
struct OracleBlock {
    states: Vec<usize>,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

/// Qubits plus `n_bath` spin-1/2 nuclei with a block-diagonalized Hamiltonian.
#[derive(Debug, Clone)]
pub struct FullSystem {
    mode: OracleMode,
    n_bath: usize,
    pairs: Vec<(usize, usize, f64)>,
    blocks: Vec<OracleBlock>,
    /// `(block, position)` of every full basis index.
    lookup: Vec<(usize, usize)>,
}

fn popcount_blocks(n_bits: usize) -> (Vec<Vec<usize>>, Vec<(usize, usize)>) {
    let dim = 1usize << n_bits;
    let mut blocks = vec![Vec::new(); n_bits + 1];
    let mut lookup = vec![(0, 0); dim];
    for idx in 0..dim {
        let c = idx.count_ones() as usize;
        lookup[idx] = (c, blocks[c].len());
        blocks[c].push(idx);
    }
    (blocks, lookup)
}

/// Matrix of `sum c S_s . S_t` restricted to `states` (all with the same popcount).
fn pair_block(states: &[usize], lookup: &[(usize, usize)], pairs: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let n = states.len();
    let mut h = DMatrix::<f64>::zeros(n, n);
    for (col, &idx) in states.iter().enumerate() {
        for &(ms, mt, c) in pairs {
            let same = (idx & ms == 0) == (idx & mt == 0);
            if same {
                h[(col, col)] += 0.25 * c;
            } else {
                h[(col, col)] -= 0.25 * c;
                let row = lookup[idx ^ ms ^ mt].1;
                h[(row, col)] += 0.5 * c;
            }
        }
    }
    h
}

impl FullSystem {
    pub fn new(mode: OracleMode, n_bath: usize) -> Result<Self> {
        if n_bath == 0 {
            return Err(invalid("oracle needs at least one bath spin"));
        }
        if n_bath > MAX_BATH_SPINS {
            return Err(Error::DimensionCap { dim: 4 << n_bath, cap: 4 << MAX_BATH_SPINS });
        }
        let bit_a = 1usize << (n_bath + 1);
        let bit_b = 1usize << n_bath;
        let bath_bit = |i: usize| 1usize << (n_bath - 1 - i);
        let mut pairs = Vec::new();
        match &mode {
            OracleMode::Separate { k_a, k_b, n_a } => {
                if *n_a > n_bath {
                    return Err(invalid(format!("n_a = {n_a} exceeds the bath size {n_bath}")));
                }
                for i in 0..n_bath {
                    if i < *n_a {
                        pairs.push((bit_a, bath_bit(i), *k_a));
                    } else {
                        pairs.push((bit_b, bath_bit(i), *k_b));
                    }
                }
            }
            OracleMode::Common { k_a, k_b, j } => {
                for i in 0..n_bath {
                    pairs.push((bit_a, bath_bit(i), *k_a));
                    pairs.push((bit_b, bath_bit(i), *k_b));
                }
                pairs.push((bit_a, bit_b, *j));
            }
            OracleMode::Inhomogeneous { k_a, k_b, j } => {
                if k_a.len() != n_bath || k_b.len() != n_bath {
                    return Err(invalid(format!(
                        "need {n_bath} couplings per qubit (got {} and {})",
                        k_a.len(),
                        k_b.len()
                    )));
                }
                for i in 0..n_bath {
                    pairs.push((bit_a, bath_bit(i), k_a[i]));
                    pairs.push((bit_b, bath_bit(i), k_b[i]));
                }
                pairs.push((bit_a, bit_b, *j));
            }
        }
        if pairs.iter().any(|p| !p.2.is_finite()) {
            return Err(invalid("couplings must be finite"));
        }
        let (states, lookup) = popcount_blocks(n_bath + 2);
        let blocks = states
            .into_par_iter()
            .map(|states| {
                let eig = pair_block(&states, &lookup, &pairs).symmetric_eigen();
                OracleBlock { states, energies: eig.eigenvalues, vectors: eig.eigenvectors }
            })
            .collect();
        Ok(FullSystem { mode, n_bath, pairs, blocks, lookup })
    }

    pub fn mode(&self) -> &OracleMode {
        &self.mode
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    pub fn dim(&self) -> usize {
        4 << self.n_bath
    }

    /// Sizes of the magnetization blocks.
    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.states.len()).collect()
    }

    /// Full Hamiltonian built entry by entry from Pauli matrices, for small systems.
    pub fn dense_hamiltonian(&self) -> Result<DMatrix<Complex64>> {
        let dim = self.dim();
        if dim > DENSE_CAP {
            return Err(Error::DimensionCap { dim, cap: DENSE_CAP });
        }
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        // sigma^mu[row bit][col bit], bit 0 = up
        let sigma = [[[z, one], [one, z]], [[z, -i], [i, z]], [[one, z], [z, -one]]];
        let bit = |idx: usize, mask: usize| usize::from(idx & mask != 0);
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        for col in 0..dim {
            for &(ms, mt, c) in &self.pairs {
                for fs in [0, ms] {
                    for ft in [0, mt] {
                        let row = col ^ fs ^ ft;
                        let v: Complex64 = sigma
                            .iter()
                            .map(|s| s[bit(row, ms)][bit(col, ms)] * s[bit(row, mt)][bit(col, mt)])
                            .sum();
                        h[(row, col)] += v * (0.25 * c);
                    }
                }
            }
        }
        Ok(h)
    }

    /// Block propagators `exp(-iHt)`.
    pub fn propagator(&self, t: f64) -> Propagator<'_> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut vc = b.vectors.clone();
                let mut vs = b.vectors.clone();
                for (k, &e) in b.energies.iter().enumerate() {
                    let (s, c) = (e * t).sin_cos();
                    vc.column_mut(k).scale_mut(c);
                    vs.column_mut(k).scale_mut(-s);
                }
                let re = vc * b.vectors.transpose();
                let im = vs * b.vectors.transpose();
                re.zip_map(&im, Complex64::new)
            })
            .collect();
        Propagator { system: self, blocks }
    }

    /// `exp(-iHt) psi`
    pub fn evolve_full_state(&self, psi: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
        if psi.len() != self.dim() {
            return Err(invalid(format!("state has length {}, expected {}", psi.len(), self.dim())));
        }
        let mut out = DVector::<Complex64>::zeros(self.dim());
        for b in &self.blocks {
            let local = DVector::<Complex64>::from_iterator(b.states.len(), b.states.iter().map(|&s| psi[s]));
            let v = b.vectors.map(|x| Complex64::new(x, 0.0));
            let mut coeffs = v.transpose() * local;
            for (c, &e) in coeffs.iter_mut().zip(b.energies.iter()) {
                *c *= Complex64::from_polar(1.0, -e * t);
            }
            let evolved = v * coeffs;
            for (k, &s) in b.states.iter().enumerate() {
                out[s] = evolved[k];
            }
        }
        Ok(out)
    }

    /// Reduced two-qubit state at time `t` for `rho_AB(0) (x) rho_bath`.
    pub fn evolve_reduced(&self, s0: &TwoQubitState, bath: BathState, t: f64) -> Result<TwoQubitState> {
        let vectors = self.bath_vectors(bath)?;
        Ok(self.propagator(t).reduce(s0, &vectors))
    }

    /// [`Self::evolve_reduced`] over many times; parallel over times.
    pub fn trajectory(&self, s0: &TwoQubitState, bath: BathState, times: &[f64]) -> Result<Vec<TwoQubitState>> {
        let vectors = self.bath_vectors(bath)?;
        Ok(times.par_iter().map(|&t| self.propagator(t).reduce(s0, &vectors)).collect())
    }

    /// Orthonormal bath vectors whose equal-weight mixture is the bath state.
    fn bath_vectors(&self, bath: BathState) -> Result<Vec<Vec<(usize, f64)>>> {
        match bath {
            BathState::FullyMixed => Ok((0..1usize << self.n_bath).map(|e| vec![(e, 1.0)]).collect()),
            BathState::SectorProjected(spin) => {
                let n = self.n_bath;
                let tw = spin.twice() as usize;
                if tw > n || (n - tw) % 2 != 0 {
                    return Err(invalid(format!("{n} spin-1/2 nuclei cannot have total spin {spin}")));
                }
                let target = spin.casimir();
                let mut out = Vec::new();
                for (states, eig) in bath_square_blocks(n) {
                    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
                        if (ev - target).abs() < SECTOR_TOL {
                            let col = eig.eigenvectors.column(k);
                            out.push(states.iter().zip(col.iter()).map(|(&s, &a)| (s, a)).collect());
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// `(states, eigen)` of `(sum I_i)^2` per bath magnetization block.
fn bath_square_blocks(n: usize) -> Vec<(Vec<usize>, nalgebra::SymmetricEigen<f64, nalgebra::Dyn>)> {
    let (states, lookup) = popcount_blocks(n);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((1usize << i, 1usize << j, 2.0));
        }
    }
    states
        .into_iter()
        .map(|s| {
            let mut h = pair_block(&s, &lookup, &pairs);
            for k in 0..s.len() {
                h[(k, k)] += 0.75 * n as f64;
            }
            let eig = h.symmetric_eigen();
            (s, eig)
        })
        .collect()
}

/// Eigenvalue histogram of `(sum I_i)^2` for `n` spin-1/2 nuclei, as `(I, count)` in
/// increasing `I`. Each count should be `d_n(I) (2I + 1)`.
pub fn bath_spin_spectrum(n: usize) -> Result<Vec<(Spin, usize)>> {
    if n == 0 || n > MAX_BATH_SPINS {
        return Err(invalid(format!("bath size must be in 1..={MAX_BATH_SPINS} (got {n})")));
    }
    let mut counts = std::collections::BTreeMap::<u32, usize>::new();
    for (_, eig) in bath_square_blocks(n) {
        for &ev in eig.eigenvalues.iter() {
            let spin = (-1.0 + (1.0 + 4.0 * ev).max(0.0).sqrt()) / 2.0;
            let twice = (2.0 * spin).round() as u32;
            if (Spin::from_twice(twice).casimir() - ev).abs() > SECTOR_TOL {
                return Err(invalid(format!("eigenvalue {ev} is not of the form I(I+1)")));
            }
            *counts.entry(twice).or_default() += 1;
        }
    }
    Ok(counts.into_iter().map(|(tw, c)| (Spin::from_twice(tw), c)).collect())
}

/// Block propagators of a [`FullSystem`] at one time.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    system: &'a FullSystem,
    blocks: Vec<DMatrix<Complex64>>,
}

impl Propagator<'_> {
    /// `Tr_bath [U (rho_AB (x) rho_bath) U^dag]` for an equal mixture of `bath_vectors`.
    fn reduce(&self, s0: &TwoQubitState, bath_vectors: &[Vec<(usize, f64)>]) -> TwoQubitState {
        let sys = self.system;
        let nb = 1usize << sys.n_bath;
        let rho = *s0.to_density().matrix();
        let zero = Complex64::new(0.0, 0.0);
        let mut out = Matrix4::<Complex64>::zeros();
        let mut chi = vec![vec![zero; 4 * nb]; 4];
        for v in bath_vectors {
            for (k, chi_k) in chi.iter_mut().enumerate() {
                chi_k.iter_mut().for_each(|c| *c = zero);
                for &(e, a) in v {
                    let (bi, col) = sys.lookup[k * nb + e];
                    let u = &self.blocks[bi];
                    for (row, &s) in sys.blocks[bi].states.iter().enumerate() {
                        chi_k[s] += u[(row, col)] * a;
                    }
                }
            }
            for k in 0..4 {
                for l in 0..4 {
                    let r = rho[(k, l)];
                    if r == zero {
                        continue;
                    }
                    for i in 0..4 {
                        let ck = &chi[k][i * nb..(i + 1) * nb];
                        for j in 0..4 {
                            let cl = &chi[l][j * nb..(j + 1) * nb];
                            let s: Complex64 = ck.iter().zip(cl).map(|(x, y)| x * y.conj()).sum();
                            out[(i, j)] += r * s;
                        }
                    }
                }
            }
        }
        let w = Complex64::new(1.0 / bath_vectors.len() as f64, 0.0);
        DensityMatrix4::from_matrix_unchecked(out * w).polarizations()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{sector_multiplicity, BathDistribution};
    use crate::common::CommonBathSystem;
    use crate::polarization::NamedState;
    use crate::separate::SeparateBathSystem;

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn common(n: usize, ka: f64, kb: f64, j: f64) -> FullSystem {
        FullSystem::new(OracleMode::Common { k_a: ka, k_b: kb, j }, n).unwrap()
    }

    #[test]
    fn dense_hamiltonian_is_hermitian_and_conserves_fz() {
        let sys = FullSystem::new(OracleMode::Inhomogeneous { k_a: vec![1.0, 0.3, -0.5], k_b: vec![0.2, 0.9, 0.4], j: 1.7 }, 3)
            .unwrap();
        let h = sys.dense_hamiltonian().unwrap();
        assert!(max_abs(&(&h - h.adjoint())) < 1e-14);
        let fz = DMatrix::<Complex64>::from_fn(sys.dim(), sys.dim(), |r, c| {
            if r == c {
                Complex64::new(0.5 * (sys.n_bath + 2) as f64 - r.count_ones() as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert!(max_abs(&(&h * &fz - &fz * &h)) < 1e-14);
        // blocks reproduce the dense matrix
        for b in &sys.blocks {
            let rebuilt = &b.vectors * DMatrix::from_diagonal(&b.energies) * b.vectors.transpose();
            for (r, &sr) in b.states.iter().enumerate() {
                for (c, &sc) in b.states.iter().enumerate() {
                    assert!((h[(sr, sc)] - rebuilt[(r, c)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dimension_caps() {
        assert!(matches!(
            FullSystem::new(OracleMode::Common { k_a: 1.0, k_b: 1.0, j: 0.0 }, 13),
            Err(Error::DimensionCap { .. })
        ));
        assert!(matches!(common(9, 1.0, 1.0, 0.0).dense_hamiltonian(), Err(Error::DimensionCap { .. })));
        assert!(FullSystem::new(OracleMode::Separate { k_a: 1.0, k_b: 1.0, n_a: 4 }, 3).is_err());
    }

    #[test]
    fn norm_and_energy_are_conserved() {
        let sys = common(4, 1.0, 0.6, 0.8);
        let h = sys.dense_hamiltonian().unwrap();
        let psi0 = DVector::<Complex64>::from_fn(sys.dim(), |k, _| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()));
        let psi0 = psi0.normalize();
        let e0 = (psi0.adjoint() * &h * &psi0)[(0, 0)].re;
        for &t in &[0.3, 2.0, 17.0] {
            let psi = sys.evolve_full_state(&psi0, t).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let e = (psi.adjoint() * &h * &psi)[(0, 0)].re;
            assert!((e - e0).abs() < 1e-11);
        }
    }

    #[test]
    fn propagator_matches_dense_exponential() {
        let sys = common(3, 1.0, 0.4, 2.0);
        let h = sys.dense_hamiltonian().unwrap();
        let t = 0.7;
        let eig = h.clone().symmetric_eigen();
        let phases = eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t));
        let u = &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
        let prop = sys.propagator(t);
        for (b, ub) in sys.blocks.iter().zip(&prop.blocks) {
            for (r, &sr) in b.states.iter().enumerate() {
                for (c, &sc) in b.states.iter().enumerate() {
                    assert!((u[(sr, sc)] - ub[(r, c)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn bath_spectrum_multiplicities() {
        for n in 1..=8 {
            let spec = bath_spin_spectrum(n).unwrap();
            let total: usize = spec.iter().map(|&(_, c)| c).sum();
            assert_eq!(total, 1 << n);
            for (spin, count) in spec {
                let expected = sector_multiplicity(n as u32, spin) as usize * spin.multiplicity();
                assert_eq!(count, expected, "n = {n}, I = {spin}");
            }
        }
    }

    #[test]
    fn time_zero_is_identity() {
        let sys = common(3, 1.0, 0.5, 1.0);
        let s0 = NamedState::UpDownSuperposition { r: 0.3 }.state().unwrap();
        let out = sys.evolve_reduced(&s0, BathState::FullyMixed, 0.0).unwrap();
        assert!(out.max_abs_diff(&s0) < 1e-13);
    }

    #[test]
    fn agrees_with_sector_model() {
        let n = 5;
        let sys = common(n, 1.0, 0.4, 1.3);
        let bath = BathDistribution::unpolarized_exact(n as u32).unwrap();
        let model = CommonBathSystem::new(1.0, 0.4, 1.3, bath).unwrap();
        let s0 = NamedState::GeneralPure { gamma: Complex64::new(0.4, -0.7), theta: 1.1, phi: 0.3 }.state().unwrap();
        for &t in &[0.5, 3.0] {
            let a = sys.evolve_reduced(&s0, BathState::FullyMixed, t).unwrap();
            let b = model.evolve(&s0, t);
            assert!(a.max_abs_diff(&b) < 1e-10, "t = {t}: {}", a.max_abs_diff(&b));
        }
        let single = CommonBathSystem::new(1.0, 0.4, 1.3, BathDistribution::delta(Spin::from_twice(3))).unwrap();
        let a = sys.evolve_reduced(&s0, BathState::SectorProjected(Spin::from_twice(3)), 2.0).unwrap();
        assert!(a.max_abs_diff(&single.evolve(&s0, 2.0)) < 1e-10);
        assert!(sys.evolve_reduced(&s0, BathState::SectorProjected(Spin::from_twice(2)), 2.0).is_err());
    }

    #[test]
    fn agrees_with_separate_baths() {
        let sys = FullSystem::new(OracleMode::Separate { k_a: 1.0, k_b: 0.7, n_a: 3 }, 6).unwrap();
        let model = SeparateBathSystem::new(
            1.0,
            0.7,
            BathDistribution::unpolarized_exact(3).unwrap(),
            BathDistribution::unpolarized_exact(3).unwrap(),
        )
        .unwrap();
        let s0 = NamedState::UpDownSuperposition { r: -0.6 }.state().unwrap();
        let times = [0.4, 1.9, 6.0];
        let traj = sys.trajectory(&s0, BathState::FullyMixed, &times).unwrap();
        for (t, a) in times.iter().zip(traj) {
            assert!(a.max_abs_diff(&model.evolve(&s0, *t)) < 1e-10);
        }
    }
}
