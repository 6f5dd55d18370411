//! Distributions over total bath spin `I`.
//!
//! An unpolarized bath of `N` spin-1/2 nuclei has density matrix `1/2^N`. In
//! the total-spin basis it is block diagonal, and the weight of the spin-`I`
//! sectors is `lambda_I = d_N(I) (2I+1) / 2^N`, where `d_N(I)` counts how many
//! times spin `I` occurs in the decomposition of `N` spins 1/2.

use crate::error::{invalid, Result};
use crate::spin::Spin;

/// Largest bath size accepted by [`BathDistribution::unpolarized_exact`].
pub const MAX_EXACT_SPINS: u32 = 128;

const NORMALIZATION_TOL: f64 = 1e-12;

/// Gaussian approximations `lambda_I ~ I^2 exp(-c I^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaussianVariant {
    /// `c = 1/(2N)`
    Wide,
    /// `c = 2/N`
    Narrow,
}

impl GaussianVariant {
    pub fn exponent(self, n: u32) -> f64 {
        match self {
            GaussianVariant::Wide => 1.0 / (2.0 * n as f64),
            GaussianVariant::Narrow => 2.0 / n as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GaussianVariant::Wide => "gaussian-wide",
            GaussianVariant::Narrow => "gaussian-narrow",
        }
    }
}

/// Which second moment of the bath spin to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Moment {
    /// `sum lambda_I I^2`
    SpinSquared,
    /// `sum lambda_I I(I+1)`, the expectation of the squared bath-spin operator.
    Casimir,
}

/// Normalized weights over distinct, ascending total bath spins.
#[derive(Debug, Clone, PartialEq)]
pub struct BathDistribution {
    entries: Vec<(Spin, f64)>,
    n_spins: Option<u32>,
}

fn pascal_row(n: u32) -> Vec<u128> {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    row
}

fn multiplicity_from_row(row: &[u128], n: u32, spin: Spin) -> u128 {
    let tw = spin.twice();
    if tw > n || (n - tw) % 2 != 0 {
        return 0;
    }
    let k = ((n - tw) / 2) as usize;
    row[k] - if k > 0 { row[k - 1] } else { 0 }
}

/// Number of spin-`I` multiplets in `N` spins 1/2:
/// `C(N, N/2 - I) - C(N, N/2 - I - 1)`. Exact for `N <= 128`.
pub fn sector_multiplicity(n: u32, spin: Spin) -> u128 {
    assert!(n <= MAX_EXACT_SPINS, "N = {n} overflows the exact multiplicity");
    multiplicity_from_row(&pascal_row(n), n, spin)
}

/// The spins `I` reachable with `N` spins 1/2: `N/2, N/2 - 1, ...` down to 0 or 1/2, ascending.
pub fn spin_grid(n: u32) -> impl Iterator<Item = Spin> {
    ((n % 2)..=n).step_by(2).map(Spin::from_twice)
}

impl BathDistribution {
    /// Exact sector weights of the fully unpolarized bath of `n` spins 1/2.
    pub fn unpolarized_exact(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_EXACT_SPINS {
            return Err(invalid(format!(
                "bath size N = {n} outside 1..={MAX_EXACT_SPINS}"
            )));
        }
        let denom = 2f64.powi(n as i32);
        let row = pascal_row(n);
        let entries = spin_grid(n)
            .map(|s| {
                let count = multiplicity_from_row(&row, n, s) as f64;
                (s, count * s.multiplicity() as f64 / denom)
            })
            .collect();
        Ok(BathDistribution { entries, n_spins: Some(n) })
    }

    /// `lambda_I ~ I^2 exp(-c I^2)` on the same spin grid as the exact distribution.
    pub fn gaussian(n: u32, variant: GaussianVariant) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("Gaussian bath needs N >= 2, got {n}")));
        }
        let c = variant.exponent(n);
        let raw: Vec<(Spin, f64)> = spin_grid(n)
            .map(|s| {
                let i = s.value();
                (s, i * i * (-c * i * i).exp())
            })
            .collect();
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        let entries = raw.into_iter().map(|(s, w)| (s, w / total)).collect();
        Ok(BathDistribution { entries, n_spins: Some(n) })
    }

    /// All weight on a single spin `I`.
    pub fn delta(spin: Spin) -> Self {
        BathDistribution { entries: vec![(spin, 1.0)], n_spins: None }
    }

    /// Validates and wraps caller-supplied weights.
    pub fn from_entries(entries: Vec<(Spin, f64)>, n_spins: Option<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("bath distribution has no entries"));
        }
        for pair in entries.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(invalid(format!(
                    "bath spins must be distinct and ascending ({} then {})",
                    pair[0].0, pair[1].0
                )));
            }
        }
        if let Some((s, w)) = entries.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid(format!("weight {w} for I = {s} is not a non-negative number")));
        }
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(invalid(format!("bath weights sum to {total}, not 1")));
        }
        Ok(BathDistribution { entries, n_spins })
    }

    pub fn entries(&self) -> &[(Spin, f64)] {
        &self.entries
    }

    /// Number of bath spins the distribution was built for, if known.
    pub fn n_spins(&self) -> Option<u32> {
        self.n_spins
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    /// `sum lambda_I f(I)`
    pub fn expectation(&self, f: impl Fn(Spin) -> f64) -> f64 {
        self.entries.iter().map(|&(s, w)| w * f(s)).sum()
    }

    pub fn moment(&self, kind: Moment) -> f64 {
        match kind {
            Moment::SpinSquared => self.expectation(|s| s.value() * s.value()),
            Moment::Casimir => self.expectation(Spin::casimir),
        }
    }

    /// Spin with the largest weight (the smallest one on ties).
    pub fn mode(&self) -> Spin {
        let mut best = self.entries[0];
        for &e in &self.entries[1..] {
            if e.1 > best.1 {
                best = e;
            }
        }
        best.0
    }

    /// Largest spin carrying weight.
    pub fn max_spin(&self) -> Spin {
        self.entries.last().map(|e| e.0).unwrap_or(Spin::ZERO)
    }
}
