//! Limit laws of the self-normalized ratio and the moment identities that
//! go with them.
//!
//! For a tail regularly varying with index `-β`, β ∈ (0,1), the ratio
//! converges to a law with CDF
//!
//! ```text
//! G(x) = 1/2 + (1/πβ) · arctan[ (s_β(x)/m_β(x)) · tan(πβ/2) ]
//! ```
//!
//! built from the weight law's fractional-moment pair. The β = 0 regime
//! collapses to the weight law itself, β = 1 to the point mass at `EX`.
//! Two independent numerical routes to the same CDF are provided: the
//! closed arctan form and Fourier inversion of the bivariate stable
//! characteristic function (`fourier_cdf`), which must agree.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::levy_measure::LevyMeasure;
use crate::quad;
use crate::weights::{WeightKind, WeightLaw};

/// Limit-regime descriptor: tail index β ∈ [0,1], weight law, and the
/// (ratio-irrelevant) scale constant of the stable limit.
#[derive(Debug, Clone)]
pub struct LimitLaw {
    pub beta: f64,
    pub weights: WeightLaw,
    pub scale_c: f64,
}

impl LimitLaw {
    pub fn new(beta: f64, weights: WeightLaw) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::Domain(format!("beta must lie in [0,1], got {beta}")));
        }
        Ok(LimitLaw { beta, weights, scale_c: 1.0 })
    }

    pub fn with_scale(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("scale_c must be positive, got {c}")));
        }
        self.scale_c = c;
        Ok(self)
    }
}

/// CDF of the limit law at `x`.
pub fn limit_cdf(x: f64, law: &LimitLaw) -> Result<f64> {
    if law.beta == 0.0 {
        return Ok(law.weights.cdf(x));
    }
    if law.beta == 1.0 {
        return Ok(if x >= law.weights.mean() { 1.0 } else { 0.0 });
    }
    let (m, s) = law.weights.frac_moment_pair(x, law.beta)?;
    if m <= 0.0 {
        return Err(Error::Domain(format!(
            "fractional moment m_beta({x}) vanished; weight law must be nondegenerate"
        )));
    }
    let half_angle = (std::f64::consts::PI * law.beta / 2.0).tan();
    let v = 0.5 + (s / m * half_angle).atan() / (std::f64::consts::PI * law.beta);
    // s/m = ±1 at atoms of F lands exactly on 0 or 1 up to fp noise
    Ok(v.clamp(0.0, 1.0))
}

/// Central-difference density of the limit CDF (for report output).
pub fn limit_density_fd(x: f64, law: &LimitLaw) -> Result<f64> {
    let h = 1e-5 * (1.0 + x.abs());
    let hi = limit_cdf(x + h, law)?;
    let lo = limit_cdf(x - h, law)?;
    Ok(((hi - lo) / (2.0 * h)).max(0.0))
}

/// Arcsine density `1/(π sqrt(x(1-x)))` on (0,1).
pub fn arcsine_density(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("arcsine density needs x in (0,1), got {x}")));
    }
    Ok(1.0 / (std::f64::consts::PI * (x * (1.0 - x)).sqrt()))
}

/// Arcsine CDF `(2/π) asin(sqrt(x))`, clamped outside (0,1).
pub fn arcsine_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        2.0 / std::f64::consts::PI * x.sqrt().asin()
    }
}

/// Density of the generalized arcsine family on (0,1) for a zero/one weight
/// with success probability `p` and tail index `beta`.
pub fn lamperti_density(x: f64, beta: f64, p: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("lamperti density needs x in (0,1), got {x}")));
    }
    if !(beta > 0.0 && beta < 1.0) || !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "lamperti density needs beta, p in (0,1), got beta={beta}, p={p}"
        )));
    }
    let pi = std::f64::consts::PI;
    let xb = x.powf(beta);
    let yb = (1.0 - x).powf(beta);
    let num = (pi * beta).sin() / pi * p * (1.0 - p) * x.powf(beta - 1.0) * (1.0 - x).powf(beta - 1.0);
    let den = p * p * yb * yb + (1.0 - p) * (1.0 - p) * xb * xb
        + 2.0 * p * (1.0 - p) * xb * yb * (pi * beta).cos();
    Ok(num / den)
}

/// Characteristic exponent of the bivariate stable limit:
/// `-c ∫ |θ₁u + θ₂|^β (1 - i·sgn(θ₁u + θ₂)·tan(πβ/2)) F(du)`.
///
/// Exact sums over atoms; adaptive quadrature with a kink split for
/// continuous weight laws.
pub fn stable_cexp(theta1: f64, theta2: f64, law: &LimitLaw) -> Result<Complex64> {
    if !(law.beta > 0.0 && law.beta < 1.0) {
        return Err(Error::Domain("stable_cexp needs beta in (0,1)".into()));
    }
    let beta = law.beta;
    let tan_half = (std::f64::consts::PI * beta / 2.0).tan();
    let term = |arg: f64| -> Complex64 {
        let a = arg.abs().powf(beta);
        Complex64::new(a, -a * arg.signum() * tan_half)
    };
    let integral = match law.weights.kind() {
        WeightKind::TwoPoint { .. } | WeightKind::Empirical | WeightKind::Degenerate { .. } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(u, w) in atoms_of(&law.weights) {
                acc += w * term(theta1 * u + theta2);
            }
            acc
        }
        WeightKind::Uniform { a, b } => {
            let re = integrate_with_kink(
                &|u: f64| term(theta1 * u + theta2).re / (b - a),
                *a,
                *b,
                kink(theta1, theta2),
            )?;
            let im = integrate_with_kink(
                &|u: f64| term(theta1 * u + theta2).im / (b - a),
                *a,
                *b,
                kink(theta1, theta2),
            )?;
            Complex64::new(re, im)
        }
        WeightKind::Gaussian { mu, sigma } => {
            let dens = |u: f64| {
                let z = (u - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            };
            let lo = mu - 14.0 * sigma;
            let hi = mu + 14.0 * sigma;
            let re = integrate_with_kink(
                &|u: f64| term(theta1 * u + theta2).re * dens(u),
                lo,
                hi,
                kink(theta1, theta2),
            )?;
            let im = integrate_with_kink(
                &|u: f64| term(theta1 * u + theta2).im * dens(u),
                lo,
                hi,
                kink(theta1, theta2),
            )?;
            Complex64::new(re, im)
        }
    };
    Ok(-law.scale_c * integral)
}

fn atoms_of(w: &WeightLaw) -> &[(f64, f64)] {
    w.atoms().expect("atomic weight law")
}

fn kink(theta1: f64, theta2: f64) -> Option<f64> {
    if theta1 != 0.0 {
        Some(-theta2 / theta1)
    } else {
        None
    }
}

fn integrate_with_kink<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, split: Option<f64>) -> Result<f64> {
    match split {
        Some(c) if c > a && c < b => {
            let l = quad::adaptive(f, a, c, 1e-13, 1e-11, 2000)?;
            let r = quad::adaptive(f, c, b, 1e-13, 1e-11, 2000)?;
            Ok(l.value + r.value)
        }
        _ => Ok(quad::adaptive(f, a, b, 1e-13, 1e-11, 2000)?.value),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FourierConfig {
    /// Truncate the u-integral where |Ψ| drops below this floor.
    pub psi_floor: f64,
    /// Per-panel quadrature tolerance.
    pub tol: f64,
}

impl Default for FourierConfig {
    fn default() -> Self {
        FourierConfig { psi_floor: 1e-12, tol: 1e-11 }
    }
}

/// CDF of the ratio by Fourier inversion:
/// `P{U/V <= x} = 1/2 - (1/π) ∫_0^∞ Im Ψ(u, -ux) / u du`
/// using the hermitian symmetry of `Ψ(u, -ux) = exp(stable_cexp(u, -ux))`.
///
/// Returns the value together with a quadrature error estimate. The result
/// does not depend on `scale_c` (the ratio law is scale-free); panels are
/// laid out relative to the decay scale `(c·m_β(x))^{-1/β}` so the numerics
/// inherit that invariance.
pub fn fourier_cdf(x: f64, law: &LimitLaw, cfg: &FourierConfig) -> Result<(f64, f64)> {
    if !(law.beta > 0.0 && law.beta < 1.0) {
        return Err(Error::Domain("fourier_cdf needs beta in (0,1)".into()));
    }
    let beta = law.beta;
    let (m, _) = law.weights.frac_moment_pair(x, beta)?;
    if m <= 0.0 {
        return Err(Error::Domain("degenerate fractional moment".into()));
    }
    let cm = law.scale_c * m;
    let tan_half = (std::f64::consts::PI * beta / 2.0).tan().max(1e-12);
    // |Ψ| = exp(-c m u^β) < psi_floor
    let u_max = ((-cfg.psi_floor.ln()) / cm).powf(1.0 / beta);
    // ∫_0^{u_min} |Im Ψ|/u du <= c m tan(πβ/2) u_min^β / β  <=  tol
    let u_min = (cfg.tol * beta / (cm * tan_half)).powf(1.0 / beta).min(u_max / 2.0);

    let integrand = |u: f64| -> Result<f64> {
        let eta = stable_cexp(u, -u * x, law)?;
        Ok(eta.re.exp() * eta.im.sin() / u)
    };

    let mut acc = 0.0f64;
    let mut err = 0.0f64;
    let mut lo = u_min;
    while lo < u_max {
        let hi = (lo * 2.0).min(u_max);
        // panels are smooth; resolve them with fixed GK plus one refinement
        let (v1, e1) = gk_result(&integrand, lo, hi)?;
        if e1 > cfg.tol {
            let mid = 0.5 * (lo + hi);
            let (va, ea) = gk_refined(&integrand, lo, mid, cfg.tol)?;
            let (vb, eb) = gk_refined(&integrand, mid, hi, cfg.tol)?;
            acc += va + vb;
            err += ea + eb;
        } else {
            acc += v1;
            err += e1;
        }
        lo = hi;
    }
    // truncation remainders
    err += cfg.tol; // small-u analytic bound
    err += cfg.psi_floor * 2.0;

    let value = 0.5 - acc / std::f64::consts::PI;
    Ok((value.clamp(0.0, 1.0), err))
}

fn gk_result<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let g = |u: f64| f(u).unwrap_or(f64::NAN);
    let (v, e) = quad::gk15(&g, a, b);
    if v.is_nan() || e.is_nan() {
        return Err(Error::Quadrature(
            "characteristic exponent failed inside panel".into(),
        ));
    }
    Ok((v, e))
}

fn gk_refined<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let (v, e) = gk_result(f, a, b)?;
    if e <= tol || b - a < 1e-14 * b.abs() {
        return Ok((v, e));
    }
    let mid = 0.5 * (a + b);
    let (v1, e1) = gk_refined(f, a, mid, tol * 0.5)?;
    let (v2, e2) = gk_refined(f, mid, b, tol * 0.5)?;
    Ok((v1 + v2, e1 + e2))
}

/// Outcome of the expected-R integral.
#[derive(Debug, Clone, Copy)]
pub struct ExpectedRt {
    pub value: f64,
    pub quad_error: f64,
    /// Whether the small-scale relative-stability condition
    /// `liminf x Λ̄(x)/I(x) > 0` looks satisfied on a probe grid; the
    /// integral identity assumes it.
    pub inf_condition_ok: bool,
}

/// `E R_t = ∫_0^∞ -t u Φ''(u) e^{-t Φ(u)} du` via adaptive panels in
/// log-u, with Φ and its derivatives from the tail representation.
pub fn expected_rt(t: f64, measure: &LevyMeasure) -> Result<ExpectedRt> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    // probe the (inf) condition near zero
    let mut inf_ok = true;
    if measure.tail_at_zero_infinite() {
        let mut worst = f64::INFINITY;
        let mut x = 0.03f64;
        while x > 1e-7 {
            let i = measure.small_jump_mean(x)?;
            if i > 0.0 {
                worst = worst.min(x * measure.tail(x) / i);
            }
            x *= 0.2;
        }
        inf_ok = worst > 0.01;
    }

    let f = |u: f64| -> Result<f64> {
        let le = measure.laplace_exponent(u)?;
        Ok((-t * u * le.d2).max(0.0) * (-t * le.value).exp())
    };

    // locate the decay scale: t Φ(u*) ≈ 1 when Φ is unbounded; for a
    // finite-activity measure Φ saturates at the total mass, so aim for the
    // knee where most of it is activated instead
    let total = measure.total_mass();
    let mut u_star = 1.0f64;
    if total.is_finite() {
        for _ in 0..120 {
            if measure.laplace_exponent(u_star)?.value >= 0.63 * total || u_star > 1e60 {
                break;
            }
            u_star *= 4.0;
        }
    } else {
        for _ in 0..120 {
            if t * measure.laplace_exponent(u_star)?.value > 1.0 || u_star > 1e200 {
                break;
            }
            u_star *= 4.0;
        }
        for _ in 0..120 {
            if t * measure.laplace_exponent(u_star)?.value <= 1.0 || u_star < 1e-200 {
                break;
            }
            u_star *= 0.25;
        }
    }

    let mut acc = 0.0f64;
    let mut err = 0.0f64;
    // upward panels: the integrand dies exponentially once t Φ grows, or
    // like 1/u² when Φ saturates — geometric extrapolation covers both
    let mut lo = u_star;
    let mut prev_up: Option<f64> = None;
    for _ in 0..200 {
        let hi = lo * 2.0;
        let part = adaptive_result(&f, lo, hi, 1e-11)?;
        acc += part.0;
        err += part.1;
        if t * measure.laplace_exponent(hi)?.value > 45.0 {
            break;
        }
        if let Some(p) = prev_up {
            if part.0 <= p && part.0 < 1e-11 * acc.max(1e-300) {
                let ratio = if p > 0.0 { (part.0 / p).min(0.95) } else { 0.0 };
                let tail = part.0 * ratio / (1.0 - ratio);
                acc += tail;
                err += tail;
                break;
            }
        }
        prev_up = Some(part.0);
        lo = hi;
        if lo > 1e270 {
            break;
        }
    }
    // downward panels with geometric tail extrapolation (u^{β-1}-type mass
    // spreads over many decades)
    let mut hi = u_star;
    let mut prev: Option<f64> = None;
    for _ in 0..400 {
        let lo = hi * 0.5;
        let part = adaptive_result(&f, lo, hi, 1e-11)?;
        acc += part.0;
        err += part.1;
        if let Some(p) = prev {
            if part.0 <= p && part.0 < 1e-10 * acc.max(1e-300) {
                let ratio = if p > 0.0 { (part.0 / p).min(0.95) } else { 0.0 };
                let tail = part.0 * ratio / (1.0 - ratio);
                acc += tail;
                err += tail;
                break;
            }
        }
        prev = Some(part.0);
        hi = lo;
        if hi < 1e-280 {
            break;
        }
    }

    Ok(ExpectedRt { value: acc.clamp(0.0, 1.0), quad_error: err, inf_condition_ok: inf_ok })
}

fn adaptive_result<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let g = |u: f64| match f(u) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    };
    let r = quad::adaptive(&g, a, b, tol, tol, 600)?;
    if r.value.is_nan() {
        return Err(Error::Quadrature("Laplace exponent failed inside panel".into()));
    }
    Ok((r.value, r.error))
}

/// `E T² = (EX)² + Var(X)(1 - β)`; brackets `(EX)² <= E T² <= E X²`.
pub fn limit_second_moment(law: &LimitLaw) -> f64 {
    let mean = law.weights.mean();
    mean * mean + law.weights.variance() * (1.0 - law.beta)
}
