//! Short-time decoherence rate of pure states and its minimization.
//!
//! For a pure two-qubit state and an unpolarized common bath,
//! `D(t) ~ t^2 / tau_D^2` with
//!
//! ```text
//! 1/tau_D^2 = (2/3) <I^2> Var(K_A S_A + K_B S_B)
//! ```
//!
//! Over the family `(|up, down_n> - gamma |down, up_n>) / sqrt(1 + |gamma|^2)`
//! this becomes a function of `gamma`, the polar angle `theta` of `n` and the
//! inhomogeneity `delta = 2 K_A K_B / (K_A^2 + K_B^2)` only.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::Moment;
use crate::common::CommonBathSystem;
use crate::error::{invalid, Error, Result};
use crate::polarization::{spin_a, spin_b, NamedState, TwoQubitState};

const PURE_TOL: f64 = 1e-10;

/// A member of the pure-state family; qubit A is quantized along z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStateParam {
    pub gamma: Complex64,
    pub theta: f64,
    pub phi: f64,
}

impl PureStateParam {
    pub fn new(gamma: Complex64, theta: f64, phi: f64) -> Self {
        PureStateParam { gamma, theta, phi }
    }

    pub fn named(&self) -> NamedState {
        NamedState::GeneralPure { gamma: self.gamma, theta: self.theta, phi: self.phi }
    }
}

/// `(2/3) <I^2> Var(K_A S_A + K_B S_B)` evaluated on the pure state `s0`.
pub fn tau_inv_sq_general(s0: &TwoQubitState, sys: &CommonBathSystem) -> Result<f64> {
    let d = s0.decoherence();
    if d.abs() > PURE_TOL {
        return Err(Error::NotPure(d));
    }
    let rho = s0.to_density();
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut var = 0.0;
    for m in 0..3 {
        let v: Matrix4<Complex64> = spin_a(m) * c(sys.k_a()) + spin_b(m) * c(sys.k_b());
        let mean = (rho.matrix() * v).trace().re;
        let square = (rho.matrix() * v * v).trace().re;
        var += square - mean * mean;
    }
    Ok(2.0 / 3.0 * sys.bath().moment(Moment::Casimir) * var)
}

/// `<I^2> (K_A^2 + K_B^2) / 3`, the rate of a product state.
pub fn rate_scale(k_a: f64, k_b: f64, moment: f64) -> f64 {
    moment * (k_a * k_a + k_b * k_b) / 3.0
}

/// `2 K_A K_B / (K_A^2 + K_B^2)`
pub fn delta_from_couplings(k_a: f64, k_b: f64) -> Result<f64> {
    let norm = k_a * k_a + k_b * k_b;
    if norm == 0.0 {
        return Err(invalid("inhomogeneity is undefined when both couplings vanish"));
    }
    Ok(2.0 * k_a * k_b / norm)
}

/// Bracket of the closed-form rate over the pure-state family, in units of [`rate_scale`]:
///
/// `1 + 2|g|^2 (1 - delta cos theta)/(1 + |g|^2)^2 - 2 delta cos^2(theta/2) Re g/(1 + |g|^2)`.
///
/// Independent of `phi`.
pub fn tau_inv_sq_pure(param: &PureStateParam, delta: f64, scale: f64) -> f64 {
    let g2 = param.gamma.norm_sqr();
    let half = (0.5 * param.theta).cos().powi(2);
    scale
        * (1.0 + 2.0 * g2 * (1.0 - delta * param.theta.cos()) / (1.0 + g2).powi(2)
            - 2.0 * delta * half * param.gamma.re / (1.0 + g2))
}

/// Partial derivative of [`tau_inv_sq_pure`] (unit scale) with respect to `Re gamma`.
fn d_re_gamma(param: &PureStateParam, delta: f64) -> f64 {
    let (a, b) = (param.gamma.re, param.gamma.im);
    let g = a * a + b * b;
    let c = param.theta.cos();
    let h = (0.5 * param.theta).cos().powi(2);
    4.0 * a * (1.0 - delta * c) * (1.0 - g) / (1.0 + g).powi(3)
        - 2.0 * delta * h * (1.0 / (1.0 + g) - 2.0 * a * a / (1.0 + g).powi(2))
}

/// Real `gamma` minimizing the rate at `theta = 0`:
/// `[(1 - delta) - sqrt(1 - 2 delta)] / delta` for `delta <= 1/2`, `1` above.
pub fn gamma_opt(delta: f64) -> f64 {
    if delta >= 0.5 {
        1.0
    } else if delta == 0.0 {
        0.0
    } else {
        // same root written without cancellation for small |delta|
        delta / ((1.0 - delta) + (1.0 - 2.0 * delta).sqrt())
    }
}

/// Grid for [`scan_optimum`]: `points` values per axis over `Re gamma, Im gamma in
/// [-gamma_extent, gamma_extent]` and `theta in [0, pi]`, at `phi = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub points: usize,
    pub gamma_extent: f64,
    pub refine_sweeps: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid { points: 41, gamma_extent: 3.0, refine_sweeps: 6 }
    }
}

impl ScanGrid {
    pub fn gamma_step(&self) -> f64 {
        2.0 * self.gamma_extent / (self.points - 1) as f64
    }

    pub fn theta_step(&self) -> f64 {
        std::f64::consts::PI / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanResult {
    pub param: PureStateParam,
    /// Rate in units of [`rate_scale`].
    pub value: f64,
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-13 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Brute-force minimum of [`tau_inv_sq_pure`] on `grid`, followed by coordinate-wise
/// golden-section refinement within one grid step and a bisection on the `Re gamma`
/// derivative (the objective is quartic-flat at `delta = 1/2`, which golden section
/// alone resolves only to ~1e-4).
pub fn scan_optimum(delta: f64, grid: &ScanGrid) -> ScanResult {
    let n = grid.points.max(2);
    let gs = grid.gamma_step();
    let ts = grid.theta_step();
    let axis = |k: usize| -grid.gamma_extent + k as f64 * gs;
    let eval = |p: &PureStateParam| tau_inv_sq_pure(p, delta, 1.0);

    let (best_idx, _) = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let (ir, ii, it) = (idx / (n * n), (idx / n) % n, idx % n);
            let p = PureStateParam::new(Complex64::new(axis(ir), axis(ii)), it as f64 * ts, 0.0);
            (idx, eval(&p))
        })
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    let (ir, ii, it) = (best_idx / (n * n), (best_idx / n) % n, best_idx % n);
    let mut p = PureStateParam::new(Complex64::new(axis(ir), axis(ii)), it as f64 * ts, 0.0);

    for _ in 0..grid.refine_sweeps {
        let re = golden_section(
            |x| eval(&PureStateParam { gamma: Complex64::new(x, p.gamma.im), ..p }),
            p.gamma.re - gs,
            p.gamma.re + gs,
        );
        p.gamma.re = re;
        let im = golden_section(
            |y| eval(&PureStateParam { gamma: Complex64::new(p.gamma.re, y), ..p }),
            p.gamma.im - gs,
            p.gamma.im + gs,
        );
        p.gamma.im = im;
        let th = golden_section(
            |t| eval(&PureStateParam { theta: t, ..p }),
            (p.theta - ts).max(0.0),
            (p.theta + ts).min(std::f64::consts::PI),
        );
        p.theta = th;
    }

    // polish Re gamma on the sign change of the analytic derivative
    let dr = |x: f64| d_re_gamma(&PureStateParam { gamma: Complex64::new(x, p.gamma.im), ..p }, delta);
    let (mut lo, mut hi) = (p.gamma.re - gs, p.gamma.re + gs);
    if dr(lo) < 0.0 && dr(hi) > 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dr(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let candidate = PureStateParam { gamma: Complex64::new(0.5 * (lo + hi), p.gamma.im), ..p };
        // values agree to round-off near a quartic-flat minimum, so compare loosely
        if eval(&candidate) <= eval(&p) + 1e-14 {
            p = candidate;
        }
    }

    // At theta = 0 the objective is invariant under gamma -> 1/conj(gamma) (qubit
    // exchange); report the |gamma| <= 1 member of the pair.
    if p.gamma.norm_sqr() > 1.0 {
        let mirror = PureStateParam { gamma: p.gamma.inv().conj(), ..p };
        if eval(&mirror) <= eval(&p) + 1e-15 {
            p = mirror;
        }
    }
    ScanResult { param: p, value: eval(&p) }
}

/// Per-nucleus hyperfine couplings of the two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct InhomogeneousCouplings {
    pub k_a: Vec<f64>,
    pub k_b: Vec<f64>,
    pub eta1: f64,
    pub eta2: f64,
}

impl InhomogeneousCouplings {
    /// Couplings with `eta1 = eta2 = 1` (fully unpolarized bath).
    pub fn new(k_a: Vec<f64>, k_b: Vec<f64>) -> Result<Self> {
        Self::with_scale_factors(k_a, k_b, 1.0, 1.0)
    }

    /// Couplings with caller-supplied scale factors for non-uniform bath distributions.
    pub fn with_scale_factors(k_a: Vec<f64>, k_b: Vec<f64>, eta1: f64, eta2: f64) -> Result<Self> {
        if k_a.len() != k_b.len() {
            return Err(invalid(format!(
                "coupling lists differ in length ({} vs {})",
                k_a.len(),
                k_b.len()
            )));
        }
        if k_a.is_empty() {
            return Err(invalid("coupling lists are empty"));
        }
        Ok(InhomogeneousCouplings { k_a, k_b, eta1, eta2 })
    }

    pub fn len(&self) -> usize {
        self.k_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_a.is_empty()
    }

    /// `Delta = eta2 sum 2 K_A^i K_B^i / sum (K_A^i^2 + K_B^i^2)`
    pub fn delta(&self) -> Result<f64> {
        let norm: f64 = self.k_a.iter().zip(&self.k_b).map(|(a, b)| a * a + b * b).sum();
        if norm == 0.0 {
            return Err(invalid("inhomogeneity is undefined when all couplings vanish"));
        }
        let cross: f64 = self.k_a.iter().zip(&self.k_b).map(|(a, b)| 2.0 * a * b).sum();
        Ok(self.eta2 * cross / norm)
    }

    /// `sum (K_A^i^2 + K_B^i^2) / N`
    pub fn mean_square(&self) -> f64 {
        let s: f64 = self.k_a.iter().zip(&self.k_b).map(|(a, b)| a * a + b * b).sum();
        s / self.len() as f64
    }
}

/// Couplings proportional to the squared Gaussian ground-state envelopes
/// `exp(-|r - r_q|^2 / l^2)` of two dots at `(+-d/2, 0)`, sampled on the unit square
/// lattice `|x|, |y| <= half_extent`. The lattice must reach `d/2 + 5 l` from the origin.
pub fn gaussian_couplings(d: f64, l: f64, half_extent: usize) -> Result<InhomogeneousCouplings> {
    if !(d >= 0.0) || !(l > 0.0) {
        return Err(invalid(format!("need d >= 0 and l > 0 (got d = {d}, l = {l})")));
    }
    let need = 0.5 * d + 5.0 * l;
    if (half_extent as f64) < need {
        return Err(Error::Coverage { have: half_extent as f64, need });
    }
    let h = half_extent as i64;
    let mut k_a = Vec::new();
    let mut k_b = Vec::new();
    for ix in -h..=h {
        for iy in -h..=h {
            let (x, y) = (ix as f64, iy as f64);
            let ra = (x + 0.5 * d).powi(2) + y * y;
            let rb = (x - 0.5 * d).powi(2) + y * y;
            k_a.push((-ra / (l * l)).exp());
            k_b.push((-rb / (l * l)).exp());
        }
    }
    InhomogeneousCouplings::new(k_a, k_b)
}

/// Rate for `theta = 0` states with per-nucleus couplings:
///
/// `(eta1/3) <I^2> mean_square [1 + 2|g|^2 (1 - Delta)/(1 + |g|^2)^2 - 2 Delta Re g/(1 + |g|^2)]`
pub fn tau_inv_sq_inhomogeneous(gamma: Complex64, c: &InhomogeneousCouplings, moment: f64) -> Result<f64> {
    let delta = c.delta()?;
    let param = PureStateParam::new(gamma, 0.0, 0.0);
    let scale = c.eta1 / 3.0 * moment * c.mean_square();
    Ok(tau_inv_sq_pure(&param, delta, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathDistribution;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn real(g: f64) -> PureStateParam {
        PureStateParam::new(Complex64::new(g, 0.0), 0.0, 0.0)
    }

    #[test]
    fn closed_form_reference_points() {
        assert_eq!(tau_inv_sq_pure(&real(0.0), 0.3, 2.5), 2.5);
        assert_abs_diff_eq!(tau_inv_sq_pure(&real(1.0), 1.0, 1.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tau_inv_sq_pure(&real(-1.0), 1.0, 1.0), 2.0, epsilon = 1e-15);
        for &d in &[-1.0, -0.3, 0.0, 0.4, 1.0] {
            assert_abs_diff_eq!(tau_inv_sq_pure(&real(1.0), d, 1.0), 1.5 * (1.0 - d), epsilon = 1e-15);
            assert_abs_diff_eq!(tau_inv_sq_pure(&real(-1.0), d, 1.0), 0.5 * (3.0 + d), epsilon = 1e-15);
        }
    }

    #[test]
    fn gamma_opt_reference_points() {
        assert_eq!(gamma_opt(0.5), 1.0);
        assert_eq!(gamma_opt(0.8), 1.0);
        assert_eq!(gamma_opt(0.0), 0.0);
        assert_abs_diff_eq!(gamma_opt(-1.0), 3f64.sqrt() - 2.0, epsilon = 1e-15);
        assert!(gamma_opt(1e-9).abs() < 1e-8);
        assert_abs_diff_eq!(gamma_opt(0.5 - 1e-12), 1.0, epsilon = 1e-5);
        // literal form away from zero
        let d = 0.3;
        assert_abs_diff_eq!(gamma_opt(d), ((1.0 - d) - (1.0 - 2.0 * d).sqrt()) / d, epsilon = 1e-15);
    }

    #[test]
    fn gamma_opt_is_stationary() {
        for k in 0..=100 {
            let d = -1.0 + 1.5 * k as f64 / 100.0;
            let g = gamma_opt(d);
            let h = 1e-5;
            let deriv = (tau_inv_sq_pure(&real(g + h), d, 1.0) - tau_inv_sq_pure(&real(g - h), d, 1.0)) / (2.0 * h);
            assert!(deriv.abs() <= 1e-8, "delta = {d}: derivative {deriv:e}");
            assert_abs_diff_eq!(d_re_gamma(&real(g), d), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn scan_reference_points() {
        let grid = ScanGrid::default();
        let r = scan_optimum(0.3, &grid);
        assert_abs_diff_eq!(r.param.gamma.re, gamma_opt(0.3), epsilon = 1e-4);
        assert!(r.param.theta <= grid.theta_step());
        assert!(r.param.gamma.im.abs() <= grid.gamma_step());
        let r = scan_optimum(0.8, &grid);
        assert_abs_diff_eq!(r.param.gamma.re, 1.0, epsilon = 1e-4);
        let r = scan_optimum(0.0, &grid);
        assert_abs_diff_eq!(r.param.gamma.norm(), 0.0, epsilon = 1e-4);
    }

    #[test]
    fn general_rate_reference_values() {
        let bath = BathDistribution::unpolarized_exact(10).unwrap();
        let m = bath.moment(Moment::Casimir);
        let sym = CommonBathSystem::new(0.9, 0.9, 2.0, bath.clone()).unwrap();
        let singlet = NamedState::Singlet.state().unwrap();
        assert_abs_diff_eq!(tau_inv_sq_general(&singlet, &sym).unwrap(), 0.0, epsilon = 1e-14);
        let sys = CommonBathSystem::new(1.0, 0.4, 2.0, bath).unwrap();
        let ud = NamedState::UpDown.state().unwrap();
        assert_abs_diff_eq!(tau_inv_sq_general(&ud, &sys).unwrap(), m * 1.16 / 3.0, epsilon = 1e-12);
        let w = NamedState::Werner { p: 0.2 }.state().unwrap();
        assert!(tau_inv_sq_general(&w, &sys).is_err());
    }

    #[test]
    fn couplings_and_inhomogeneity() {
        assert_eq!(delta_from_couplings(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(delta_from_couplings(1.0, 0.0).unwrap(), 0.0);
        assert!(delta_from_couplings(0.0, 0.0).is_err());
        let c = InhomogeneousCouplings::new(vec![0.3, 1.0, 2.0], vec![0.3, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(c.delta().unwrap(), 1.0, epsilon = 1e-15);
        assert!(InhomogeneousCouplings::new(vec![1.0], vec![]).is_err());
        assert!(InhomogeneousCouplings::new(vec![0.0], vec![0.0]).unwrap().delta().is_err());
    }

    #[test]
    fn gaussian_envelope_overlap() {
        let c = gaussian_couplings(0.0, 6.0, 40).unwrap();
        assert_abs_diff_eq!(c.delta().unwrap(), 1.0, epsilon = 1e-15);
        let c = gaussian_couplings(60.0, 6.0, 70).unwrap();
        assert!(c.delta().unwrap() < 1e-10);
        // continuum value exp(-d^2 / 2 l^2) = 0.6065 at d = l
        let c = gaussian_couplings(6.0, 6.0, 40).unwrap();
        let delta = c.delta().unwrap();
        assert_abs_diff_eq!(delta, (-0.5f64).exp(), epsilon = 1e-6);
        assert!((delta - 0.6).abs() <= 0.05);
        assert!(matches!(gaussian_couplings(6.0, 6.0, 20), Err(Error::Coverage { .. })));
    }

    #[test]
    fn inhomogeneous_reduces_to_homogeneous() {
        let (ka, kb) = (1.0, 0.6);
        let c = InhomogeneousCouplings::new(vec![ka; 5], vec![kb; 5]).unwrap();
        let delta = delta_from_couplings(ka, kb).unwrap();
        for &g in &[-1.0, 0.0, 0.4, 1.0, 2.0] {
            let gamma = Complex64::new(g, 0.0);
            let expected = tau_inv_sq_pure(&real(g), delta, rate_scale(ka, kb, 7.5));
            assert_abs_diff_eq!(tau_inv_sq_inhomogeneous(gamma, &c, 7.5).unwrap(), expected, epsilon = 1e-13);
        }
        let c = InhomogeneousCouplings::new(vec![1.0; 3], vec![1.0; 3]).unwrap();
        assert_abs_diff_eq!(tau_inv_sq_inhomogeneous(Complex64::new(1.0, 0.0), &c, 2.0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inhomogeneous_optimum_on_real_grid() {
        let c = gaussian_couplings(6.0, 6.0, 40).unwrap();
        let delta = c.delta().unwrap();
        let best = (0..=4000)
            .map(|k| -2.0 + k as f64 * 1e-3)
            .min_by(|a, b| {
                let fa = tau_inv_sq_inhomogeneous(Complex64::new(*a, 0.0), &c, 1.0).unwrap();
                let fb = tau_inv_sq_inhomogeneous(Complex64::new(*b, 0.0), &c, 1.0).unwrap();
                fa.total_cmp(&fb)
            })
            .unwrap();
        assert!((best - gamma_opt(delta)).abs() <= 1e-3);
    }

    proptest! {
        #[test]
        fn phi_independence(re in -3.0f64..3.0, im in -3.0f64..3.0, theta in 0.0f64..PI, delta in -1.0f64..1.0) {
            let gamma = Complex64::new(re, im);
            let values: Vec<f64> = (0..16)
                .map(|k| tau_inv_sq_pure(&PureStateParam::new(gamma, theta, 2.0 * PI * k as f64 / 16.0), delta, 1.0))
                .collect();
            let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
            prop_assert!(spread <= 1e-14);
        }

        #[test]
        fn closed_form_matches_variance(re in -3.0f64..3.0, im in -3.0f64..3.0, theta in 0.0f64..PI,
                                        phi in 0.0f64..6.28, kb in -1.5f64..1.5) {
            let bath = BathDistribution::unpolarized_exact(6).unwrap();
            let m = bath.moment(Moment::Casimir);
            let ka = 1.0;
            let sys = CommonBathSystem::new(ka, kb, 0.0, bath).unwrap();
            let p = PureStateParam::new(Complex64::new(re, im), theta, phi);
            let s0 = p.named().state().unwrap();
            let general = tau_inv_sq_general(&s0, &sys).unwrap();
            let closed = tau_inv_sq_pure(&p, delta_from_couplings(ka, kb).unwrap(), rate_scale(ka, kb, m));
            let via_tensor = sys.short_time_rate(&s0).unwrap();
            prop_assert!((general - closed).abs() <= 1e-12 * m);
            prop_assert!((general - via_tensor).abs() <= 1e-12 * m);
        }
    }
}
