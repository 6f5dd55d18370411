//! Explicit matrices on the space "two qubits (x) spin I".
//!
//! The space is split into blocks of fixed total `F^z`; every block holds at
//! most four states `(q, m)` with `q` the two-qubit basis index and `m` the
//! bath projection. All sector operators are real in this basis.

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;

use super::coefficients::SectorCoefficients;
use crate::spin::Spin;

/// Twice `S_A^z + S_B^z` of the two-qubit basis state `q` (`up` = bit 0, qubit A is the high bit).
pub(crate) fn twice_sz(q: usize) -> i32 {
    let a = if q & 2 == 0 { 1 } else { -1 };
    let b = if q & 1 == 0 { 1 } else { -1 };
    a + b
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    /// Twice the total `F^z`.
    pub twice_fz: i32,
    /// `(q, twice m)` for each basis state of the block.
    pub states: Vec<(usize, i32)>,
    /// `(S_A + S_B) . I`
    pub x: DMatrix<f64>,
    /// `(S_A - S_B) . I`
    pub d: DMatrix<f64>,
    /// Triplet projector `3/4 + S_A . S_B`.
    pub p_t: DMatrix<f64>,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

/// Block-diagonal representation of one bath-spin sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSpace {
    spin: Spin,
    blocks: Vec<Block>,
    /// `(block, position)` of state `(q, m)`, indexed by `q * (2I+1) + (m + I)`.
    lookup: Vec<(usize, usize)>,
}

fn ladder(casimir: f64, twice_m: i32, up: bool) -> f64 {
    let m = twice_m as f64 / 2.0;
    let v = if up { casimir - m * (m + 1.0) } else { casimir - m * (m - 1.0) };
    v.max(0.0).sqrt()
}

impl SectorSpace {
    /// Builds the operators of the sector and diagonalizes
    /// `H' = Kbar X + (dK/2) D + J P_t` block by block.
    pub fn new(spin: Spin, k_a: f64, k_b: f64, j: f64) -> Self {
        let tw_i = spin.twice() as i32;
        let mult = spin.multiplicity();
        let mut blocks = Vec::new();
        let mut lookup = vec![(usize::MAX, usize::MAX); 4 * mult];
        let mut tw_f = -tw_i - 2;
        while tw_f <= tw_i + 2 {
            let states: Vec<(usize, i32)> = (0..4)
                .map(|q| (q, tw_f - twice_sz(q)))
                .filter(|&(_, m)| m.abs() <= tw_i)
                .collect();
            if !states.is_empty() {
                for (pos, &(q, m)) in states.iter().enumerate() {
                    lookup[q * mult + ((m + tw_i) / 2) as usize] = (blocks.len(), pos);
                }
                blocks.push(Self::build_block(spin, tw_f, states, k_a, k_b, j));
            }
            tw_f += 2;
        }
        SectorSpace { spin, blocks, lookup }
    }

    fn build_block(spin: Spin, twice_fz: i32, states: Vec<(usize, i32)>, k_a: f64, k_b: f64, j: f64) -> Block {
        let n = states.len();
        let cas = spin.casimir();
        let pos = |q: usize, m: i32| states.iter().position(|&s| s == (q, m));
        // S_Q . I for Q = A (bit mask 2) or B (bit mask 1)
        let dot = |mask: usize| {
            let mut out = DMatrix::<f64>::zeros(n, n);
            for (col, &(q, m)) in states.iter().enumerate() {
                let sz = if q & mask == 0 { 0.5 } else { -0.5 };
                out[(col, col)] += sz * m as f64 / 2.0;
                // qubit down -> up with bath m -> m - 1, and the reverse
                let (target, tm, up) = if q & mask != 0 { (q & !mask, m - 2, false) } else { (q | mask, m + 2, true) };
                if let Some(row) = pos(target, tm) {
                    out[(row, col)] += 0.5 * ladder(cas, m, up);
                }
            }
            out
        };
        let sa = dot(2);
        let sb = dot(1);
        let x = &sa + &sb;
        let d = &sa - &sb;
        let mut p_t = DMatrix::<f64>::zeros(n, n);
        for (col, &(q, m)) in states.iter().enumerate() {
            let za = if q & 2 == 0 { 0.5 } else { -0.5 };
            let zb = if q & 1 == 0 { 0.5 } else { -0.5 };
            p_t[(col, col)] += 0.75 + za * zb;
            if q == 1 || q == 2 {
                if let Some(row) = pos(3 - q, m) {
                    p_t[(row, col)] += 0.5;
                }
            }
        }
        let k_bar = 0.5 * (k_a + k_b);
        let h = &x * k_bar + &d * (0.5 * (k_a - k_b)) + &p_t * j;
        let eig = h.symmetric_eigen();
        Block { twice_fz, states, x, d, p_t, energies: eig.eigenvalues, vectors: eig.eigenvectors }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `4 (2I + 1)`
    pub fn dim(&self) -> usize {
        4 * self.spin.multiplicity()
    }

    /// Block propagators `exp(-i H' t)` from the block eigendecompositions.
    pub fn propagator_dense(&self, t: f64) -> Vec<DMatrix<Complex64>> {
        self.blocks
            .iter()
            .map(|b| {
                let phases = b.energies.map(|e| Complex64::from_polar(1.0, -e * t));
                let v = b.vectors.map(|x| Complex64::new(x, 0.0));
                &v * DMatrix::from_diagonal(&phases) * v.transpose()
            })
            .collect()
    }

    /// Block propagators rebuilt from the operator expansion
    /// `(a1 + a2 D) P_s + (a3 + a4 X + a5 X^2 + a6 D) P_t`.
    pub fn propagator_from_coefficients(&self, a: &SectorCoefficients) -> Vec<DMatrix<Complex64>> {
        self.blocks
            .iter()
            .map(|b| {
                let n = b.states.len();
                let c = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
                let id = DMatrix::<Complex64>::identity(n, n);
                let (x, d, p_t) = (c(&b.x), c(&b.d), c(&b.p_t));
                let p_s = &id - &p_t;
                let singlet = (&id * a.a1 + &d * a.a2) * p_s;
                let triplet = (&id * a.a3 + &x * a.a4 + &x * &x * a.a5 + &d * a.a6) * p_t;
                singlet + triplet
            })
            .collect()
    }

    /// Assembles block matrices into the full `4(2I+1)` matrix indexed by `q (2I+1) + (m + I)`.
    pub fn embed(&self, blocks: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
        let mult = self.spin.multiplicity();
        let tw_i = self.spin.twice() as i32;
        let idx = |(q, m): (usize, i32)| q * mult + ((m + tw_i) / 2) as usize;
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for (b, u) in self.blocks.iter().zip(blocks) {
            for (r, &sr) in b.states.iter().enumerate() {
                for (c, &sc) in b.states.iter().enumerate() {
                    out[(idx(sr), idx(sc))] = u[(r, c)];
                }
            }
        }
        out
    }

    /// `(1/(2I+1)) Tr_I [U (rho (x) 1) U^dag]` for block propagators `u`.
    pub fn reduce(&self, u: &[DMatrix<Complex64>], rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
        let mult = self.spin.multiplicity();
        let tw_i = self.spin.twice() as i32;
        let mut out = Matrix4::<Complex64>::zeros();
        // amp[k][i] = (twice m, <i, m| U |k, m0>) for the single m reachable from (k, m0)
        let mut amp = [[None::<(i32, Complex64)>; 4]; 4];
        for m0 in self.spin.twice_projections() {
            for (k, row) in amp.iter_mut().enumerate() {
                let (bi, col) = self.lookup[k * mult + ((m0 + tw_i) / 2) as usize];
                let block = &self.blocks[bi];
                let ub = &u[bi];
                *row = [None; 4];
                for (r, &(i, m)) in block.states.iter().enumerate() {
                    row[i] = Some((m, ub[(r, col)]));
                }
            }
            for k in 0..4 {
                for l in 0..4 {
                    let rkl = rho[(k, l)];
                    if rkl == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for i in 0..4 {
                        let Some((mi, ui)) = amp[k][i] else { continue };
                        for j in 0..4 {
                            if let Some((mj, uj)) = amp[l][j] {
                                if mi == mj {
                                    out[(i, j)] += ui * rkl * uj.conj();
                                }
                            }
                        }
                    }
                }
            }
        }
        out / Complex64::new(mult as f64, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::super::coefficients::{a_coefficients, sector_spectrum};
    use super::*;

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn operator_algebra() {
        for tw in 0..6 {
            let spin = Spin::from_twice(tw);
            let space = SectorSpace::new(spin, 1.0, 0.3, 0.7);
            assert_eq!(space.blocks().iter().map(|b| b.states.len()).sum::<usize>(), space.dim());
            for b in space.blocks() {
                let n = b.states.len();
                let p_s = DMatrix::<f64>::identity(n, n) - &b.p_t;
                assert!((&b.p_t * &b.p_t - &b.p_t).amax() < 1e-14);
                // D connects singlet and triplet only
                assert!((&b.p_t * &b.d * &b.p_t).amax() < 1e-14);
                assert!((&p_s * &b.d * &p_s).amax() < 1e-14);
                // X vanishes on the singlet
                assert!((&b.x * &p_s).amax() < 1e-14);
                // D^2 on the singlet is I(I+1)
                let d2s = &p_s * &b.d * &b.d * &p_s - &p_s * spin.casimir();
                assert!(d2s.amax() < 1e-13);
            }
        }
    }

    #[test]
    fn coefficient_propagator_matches_dense_exponential() {
        for tw in 0..7 {
            let spin = Spin::from_twice(tw);
            for &(ka, kb, j) in &[(1.0, 1.0, 0.0), (1.0, 0.4, 3.0), (-0.7, 1.2, 0.5), (1.0, 0.5, 0.75)] {
                let space = SectorSpace::new(spin, ka, kb, j);
                let spec = sector_spectrum(ka, kb, j, spin);
                for &t in &[0.0, 0.37, 2.9, 11.0] {
                    let dense = space.embed(&space.propagator_dense(t));
                    let fromc = space.embed(&space.propagator_from_coefficients(&a_coefficients(&spec, t)));
                    assert!(max_abs(&(&dense - &fromc)) < 1e-10, "I = {spin}, t = {t}");
                    let id = DMatrix::<Complex64>::identity(space.dim(), space.dim());
                    assert!(max_abs(&(fromc.adjoint() * &fromc - id)) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn reduce_at_time_zero_is_identity_map() {
        let space = SectorSpace::new(Spin::from_twice(3), 1.0, 0.5, 2.0);
        let u = space.propagator_dense(0.0);
        let rho = Matrix4::from_fn(|i, j| Complex64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let out = space.reduce(&u, &rho);
        assert!((out - rho).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-13);
    }
}
