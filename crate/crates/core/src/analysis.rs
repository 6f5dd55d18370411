//! Fits and measurements on sampled trajectories.

use crate::error::{invalid, Result};

/// Least-squares `(a, b)` of `y = a t^2 + b t^4`.
pub fn fit_even_quartic(times: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    check_lengths(times, y, 2)?;
    let (mut s4, mut s6, mut s8, mut y2, mut y4) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &v) in times.iter().zip(y) {
        let t2 = t * t;
        s4 += t2 * t2;
        s6 += t2 * t2 * t2;
        s8 += t2 * t2 * t2 * t2;
        y2 += v * t2;
        y4 += v * t2 * t2;
    }
    let det = s4 * s8 - s6 * s6;
    if det.abs() <= 1e-14 * s4 * s8 {
        return Err(invalid("sample times do not determine a quartic fit"));
    }
    Ok(((y2 * s8 - y4 * s6) / det, (s4 * y4 - s6 * y2) / det))
}

/// Least-squares `a` of `y = a t^2`.
pub fn fit_quadratic(times: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(times, y, 1)?;
    let s4: f64 = times.iter().map(|t| t.powi(4)).sum();
    if s4 == 0.0 {
        return Err(invalid("all sample times are zero"));
    }
    Ok(times.iter().zip(y).map(|(t, v)| v * t * t).sum::<f64>() / s4)
}

/// `1/tau^2` of a Gaussian decay `1 - D(t) = exp(-t^2/tau^2)`, from the `t^2`
/// coefficient of `-ln(1 - D)` with a `t^4` correction absorbed.
pub fn gaussian_rate(times: &[f64], d: &[f64]) -> Result<f64> {
    if let Some(v) = d.iter().find(|&&v| !(v < 1.0)) {
        return Err(invalid(format!("decoherence value {v} leaves no Gaussian envelope")));
    }
    let y: Vec<f64> = d.iter().map(|&v| -(1.0 - v).ln()).collect();
    Ok(fit_even_quartic(times, &y)?.0)
}

/// Mean spacing between upward crossings of the sample mean, located by linear
/// interpolation. `None` with fewer than two crossings.
pub fn oscillation_period(times: &[f64], values: &[f64]) -> Result<Option<f64>> {
    check_lengths(times, values, 2)?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut crossings = Vec::new();
    for k in 1..values.len() {
        let (a, b) = (values[k - 1] - mean, values[k] - mean);
        if a < 0.0 && b >= 0.0 {
            let frac = -a / (b - a);
            crossings.push(times[k - 1] + frac * (times[k] - times[k - 1]));
        }
    }
    if crossings.len() < 2 {
        return Ok(None);
    }
    Ok(Some((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64))
}

fn check_lengths(times: &[f64], y: &[f64], min: usize) -> Result<()> {
    if times.len() != y.len() {
        return Err(invalid(format!("{} times but {} values", times.len(), y.len())));
    }
    if times.len() < min {
        return Err(invalid(format!("need at least {min} samples, got {}", times.len())));
    }
    if times.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(invalid("samples must be finite"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::linspace;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn quartic_fit_recovers_coefficients() {
        let t = linspace(0.5, 30);
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t * t - 7.0 * t.powi(4)).collect();
        let (a, b) = fit_even_quartic(&t, &y).unwrap();
        assert_abs_diff_eq!(a, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b, -7.0, epsilon = 1e-8);
        assert!(fit_even_quartic(&[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn gaussian_rate_of_exact_gaussian() {
        let t = linspace(0.2, 21);
        let d: Vec<f64> = t.iter().map(|t| 1.0 - (-t * t / 0.01).exp()).collect();
        assert_abs_diff_eq!(gaussian_rate(&t, &d).unwrap(), 100.0, epsilon = 1e-7);
        assert!(gaussian_rate(&[0.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn period_of_cosine() {
        let t = linspace(20.0, 4001);
        let v: Vec<f64> = t.iter().map(|t| (2.0 * std::f64::consts::PI * t / 1.7).cos() / 3.0).collect();
        assert_abs_diff_eq!(oscillation_period(&t, &v).unwrap().unwrap(), 1.7, epsilon = 1e-4);
        assert_eq!(oscillation_period(&t[..10], &v[..10]).unwrap(), None);
    }

    proptest! {
        #[test]
        fn quadratic_fit_is_exact_on_parabolas(a in -50.0f64..50.0, tmax in 0.01f64..10.0) {
            let t = linspace(tmax, 11);
            let y: Vec<f64> = t.iter().map(|t| a * t * t).collect();
            prop_assert!((fit_quadratic(&t, &y).unwrap() - a).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }
}
