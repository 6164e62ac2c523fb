//! Statistical instruments: Kolmogorov–Smirnov distances, summary
//! statistics, a least-squares line fit, and the error function.

use crate::error::{Error, Result};

/// Asymptotic Kolmogorov critical coefficient at alpha = 0.01:
/// the one-sample critical value is `K / sqrt(n)`, the two-sample value
/// `K * sqrt((n + m) / (n * m))`.
pub const KS_COEFF_ALPHA_001: f64 = 1.63;

/// One-sample KS statistic under the midpoint convention:
/// `max_i |F(x_(i)) - (i - 1/2) / n|`.
///
/// A sample compared against its own empirical CDF scores exactly `1/(2n)`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs: Vec<f64> = sample.to_vec();
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let gap = (cdf(x) - (i as f64 + 0.5) / n).abs();
        if gap > d {
            d = gap;
        }
    }
    Ok(d)
}

/// Two-sample KS statistic: sup distance between the two empirical CDFs,
/// evaluated over the pooled sample points.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_unstable_by(|u, v| u.total_cmp(v));
    ys.sort_unstable_by(|u, v| u.total_cmp(v));
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let t = xs[i].min(ys[j]);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        let gap = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        if gap > d {
            d = gap;
        }
    }
    Ok(d)
}

/// Critical value for the two-sample KS test at alpha = 0.01.
pub fn ks_two_sample_critical(n: usize, m: usize) -> f64 {
    KS_COEFF_ALPHA_001 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Sample mean and its standard error.
pub fn mean_se(sample: &[f64]) -> Result<(f64, f64)> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    if sample.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Unbiased sample variance.
pub fn variance(sample: &[f64]) -> Result<f64> {
    if sample.len() < 2 {
        return Err(Error::EmptySample);
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    Ok(sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Ordinary least squares fit `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub resid_rms: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Domain("line fit needs >= 3 points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("degenerate line fit: zero x-variance".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let resid_rms = (ss_res / n).sqrt();
    let slope_se = if xs.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(LineFit { slope, intercept, slope_se, resid_rms })
}

/// Two-sided p-value (normal approximation) that a fitted slope is nonzero.
pub fn slope_p_value(fit: &LineFit) -> f64 {
    if fit.slope_se == 0.0 || !fit.slope_se.is_finite() {
        return if fit.slope == 0.0 { 1.0 } else { 0.0 };
    }
    let z = (fit.slope / fit.slope_se).abs();
    2.0 * (1.0 - normal_cdf(z))
}

/// erf via the non-alternating confluent series for |x| <= 3 and a
/// continued fraction for the complement beyond. Accurate to ~1e-15.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= 2.0 {
        // erf(x) = 2/sqrt(pi) e^{-x^2} sum_k 2^k x^{2k+1} / (1*3*...*(2k+1))
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0u32;
        loop {
            k += 1;
            term *= 2.0 * x2 / (2.0 * k as f64 + 1.0);
            sum += term;
            if term < 1e-18 * sum || k > 200 {
                break;
            }
        }
        2.0 / std::f64::consts::PI.sqrt() * (-x2).exp() * sum
    } else {
        1.0 - erfc_large(x)
    }
}

pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= 2.0 {
        1.0 - erf(x)
    } else {
        erfc_large(x)
    }
}

// erfc for x > 2 via the Laplace continued fraction (modified Lentz).
fn erfc_large(x: f64) -> f64 {
    if x > 27.0 {
        return 0.0; // below f64 underflow of exp(-x^2)
    }
    let tiny = 1e-300;
    let mut f = x.max(tiny);
    let mut c = f;
    let mut d = 0.0f64;
    // CF: erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    for k in 1..200u32 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / std::f64::consts::PI.sqrt() / f
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_reference_values() {
        let cases = [
            (0.1, 0.1124629160182849),
            (0.5, 0.5204998778130465),
            (1.0, 0.8427007929497149),
            (2.0, 0.9953222650189527),
            (3.0, 0.9999779095030014),
        ];
        for (x, want) in cases {
            assert!((erf(x) - want).abs() < 1e-14, "erf({x}) = {}", erf(x));
        }
        assert!((erfc(3.0) - 2.2090496998585441e-5).abs() < 1e-18);
        assert!((erfc(5.0) - 1.5374597944280349e-12).abs() / 1.5e-12 < 1e-12);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-12);
        assert!((erf(-1.0) + erf(1.0)).abs() < 1e-16);
    }

    #[test]
    fn ks_self_comparison_is_half_over_n() {
        let sample: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let xs = sample.clone();
        let ecdf = move |x: f64| xs.iter().filter(|&&v| v <= x).count() as f64 / 100.0;
        let d = ks_statistic(&sample, ecdf).unwrap();
        assert!((d - 0.005).abs() < 1e-12, "{d}");
    }

    #[test]
    fn ks_constant_sample_vs_midpoint_step() {
        // step CDF carrying value 1/2 at the atom
        let sample = vec![2.0; 50];
        let step = |x: f64| {
            if x < 2.0 {
                0.0
            } else if x > 2.0 {
                1.0
            } else {
                0.5
            }
        };
        let d = ks_statistic(&sample, step).unwrap();
        assert!((d - (0.5 - 0.5 / 50.0)).abs() < 1e-12, "{d}");
    }

    #[test]
    fn ks_two_sample_identical() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        let d = ks_two_sample(&a, &a).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn ks_two_sample_disjoint() {
        let a = vec![1.0, 2.0];
        let b = vec![3.0, 4.0];
        assert_eq!(ks_two_sample(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!(fit.resid_rms < 1e-12);
    }
}
