//! Weight distributions: nondegenerate laws with a finite absolute first
//! moment, used to weight each jump of the subordinator.
//!
//! Besides sampling and moments, a law exposes the fractional-moment pair
//!
//! - `m_β(x) = ∫ |u - x|^β F(du)`
//! - `s_β(x) = ∫ |u - x|^β sgn(x - u) F(du)`  (with sgn(0) := 0)
//!
//! which drive the nondegenerate limit CDF of the self-normalized ratio.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quad;
use crate::stats::normal_cdf;

#[derive(Debug, Clone)]
pub enum WeightKind {
    /// P{X = b} = p, P{X = a} = 1 - p.
    TwoPoint { a: f64, b: f64, p: f64 },
    Uniform { a: f64, b: f64 },
    Gaussian { mu: f64, sigma: f64 },
    /// Uniform over a finite multiset of values.
    Empirical,
    /// Point mass; rejected by the public constructors, available through
    /// [`WeightLaw::constant`] for engine tests where weights must cancel.
    Degenerate { value: f64 },
}

#[derive(Debug, Clone)]
pub struct WeightLaw {
    kind: WeightKind,
    /// sorted atoms (value, probability) for discrete laws
    atoms: Option<Vec<(f64, f64)>>,
    mean: f64,
    abs_mean: f64,
    second_moment: f64,
}

impl WeightLaw {
    pub fn two_point(a: f64, b: f64, p: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a == b {
            return Err(Error::InvalidWeights(format!("two-point values {a}, {b} must differ")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidWeights(format!(
                "two-point probability must lie in (0,1), got {p} (the law must be nondegenerate)"
            )));
        }
        let atoms = if a < b { vec![(a, 1.0 - p), (b, p)] } else { vec![(b, p), (a, 1.0 - p)] };
        Ok(WeightLaw {
            kind: WeightKind::TwoPoint { a, b, p },
            mean: a * (1.0 - p) + b * p,
            abs_mean: a.abs() * (1.0 - p) + b.abs() * p,
            second_moment: a * a * (1.0 - p) + b * b * p,
            atoms: Some(atoms),
        })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidWeights(format!("uniform needs a < b, got [{a}, {b}]")));
        }
        Ok(WeightLaw {
            kind: WeightKind::Uniform { a, b },
            atoms: None,
            mean: 0.5 * (a + b),
            abs_mean: if a >= 0.0 {
                0.5 * (a + b)
            } else if b <= 0.0 {
                -0.5 * (a + b)
            } else {
                0.5 * (a * a + b * b) / (b - a)
            },
            second_moment: (a * a + a * b + b * b) / 3.0,
        })
    }

    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !mu.is_finite() || !sigma.is_finite() {
            return Err(Error::InvalidWeights(format!(
                "gaussian needs sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        let abs_mean = {
            // E|N(mu, sigma)| = sigma sqrt(2/pi) e^{-mu²/2sigma²} + mu (1 - 2Φ(-mu/sigma))
            let r = mu / sigma;
            sigma * (2.0 / std::f64::consts::PI).sqrt() * (-0.5 * r * r).exp()
                + mu * (1.0 - 2.0 * normal_cdf(-r))
        };
        Ok(WeightLaw {
            kind: WeightKind::Gaussian { mu, sigma },
            atoms: None,
            mean: mu,
            abs_mean,
            second_moment: mu * mu + sigma * sigma,
        })
    }

    pub fn empirical(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidWeights("empirical law needs at least two values".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWeights("empirical values must be finite".into()));
        }
        values.sort_unstable_by(|x, y| x.total_cmp(y));
        if values.first() == values.last() {
            return Err(Error::InvalidWeights("empirical law is degenerate".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let abs_mean = values.iter().map(|v| v.abs()).sum::<f64>() / n;
        let second_moment = values.iter().map(|v| v * v).sum::<f64>() / n;
        let p = 1.0 / n;
        let atoms = values.iter().map(|&v| (v, p)).collect();
        Ok(WeightLaw {
            kind: WeightKind::Empirical,
            atoms: Some(atoms),
            mean,
            abs_mean,
            second_moment,
        })
    }

    /// One-column CSV of values, uniform probabilities.
    pub fn from_values_csv(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) if lineno == 0 => continue,
                Err(_) => {
                    return Err(Error::Parse(format!(
                        "{}: line {}: expected a number",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Self::empirical(values)
    }

    /// Degenerate point mass. Bypasses the nondegeneracy validation; only
    /// meaningful for engine tests (weights cancel, so U = V exactly).
    pub fn constant(value: f64) -> Self {
        WeightLaw {
            kind: WeightKind::Degenerate { value },
            atoms: Some(vec![(value, 1.0)]),
            mean: value,
            abs_mean: value.abs(),
            second_moment: value * value,
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Sorted atoms for discrete laws.
    pub fn atoms(&self) -> Option<&[(f64, f64)]> {
        self.atoms.as_deref()
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            WeightKind::TwoPoint { a, b, p } => format!("two_point(a={a}, b={b}, p={p})"),
            WeightKind::Uniform { a, b } => format!("uniform({a}, {b})"),
            WeightKind::Gaussian { mu, sigma } => format!("gaussian(mu={mu}, sigma={sigma})"),
            WeightKind::Empirical => {
                format!("empirical({} atoms)", self.atoms.as_ref().map_or(0, |a| a.len()))
            }
            WeightKind::Degenerate { value } => format!("constant({value})"),
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn abs_mean(&self) -> f64 {
        self.abs_mean
    }

    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    pub fn variance(&self) -> f64 {
        (self.second_moment - self.mean * self.mean).max(0.0)
    }

    /// E|X|^p; exact over atoms, quadrature for continuous laws.
    pub fn p_moment(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("p_moment needs p > 0, got {p}")));
        }
        if let Some(atoms) = &self.atoms {
            return Ok(atoms.iter().map(|&(v, w)| v.abs().powf(p) * w).sum());
        }
        match self.kind {
            WeightKind::Uniform { a, b } => {
                let f = |u: f64| u.abs().powf(p) / (b - a);
                Ok(quad::adaptive(&f, a, b, 1e-12, 1e-10, 2000)?.value)
            }
            WeightKind::Gaussian { mu, sigma } => {
                let f = |u: f64| {
                    let z = (u - mu) / sigma;
                    u.abs().powf(p) * (-0.5 * z * z).exp()
                        / (sigma * (2.0 * std::f64::consts::PI).sqrt())
                };
                let lo = mu - 14.0 * sigma;
                let hi = mu + 14.0 * sigma;
                Ok(quad::adaptive(&f, lo, hi, 1e-12, 1e-10, 2000)?.value)
            }
            _ => unreachable!("atom-backed laws handled above"),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            WeightKind::TwoPoint { a, b, p } => {
                if rng.random::<f64>() < p {
                    b
                } else {
                    a
                }
            }
            WeightKind::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            WeightKind::Gaussian { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
            WeightKind::Empirical => {
                let atoms = self.atoms.as_ref().unwrap();
                let i = rng.random_range(0..atoms.len());
                atoms[i].0
            }
            WeightKind::Degenerate { value } => value,
        }
    }

    /// CDF of the law. Atoms contribute their full mass at the atom (right
    /// continuity).
    pub fn cdf(&self, x: f64) -> f64 {
        if let Some(atoms) = &self.atoms {
            return atoms.iter().take_while(|&&(v, _)| v <= x).map(|&(_, w)| w).sum();
        }
        match self.kind {
            WeightKind::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            WeightKind::Gaussian { mu, sigma } => normal_cdf((x - mu) / sigma),
            _ => unreachable!(),
        }
    }

    /// Fractional-moment pair `(m_β(x), s_β(x))`; always `|s| <= m`.
    pub fn frac_moment_pair(&self, x: f64, beta: f64) -> Result<(f64, f64)> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Domain(format!("frac_moment_pair needs beta in (0,1), got {beta}")));
        }
        if let Some(atoms) = &self.atoms {
            let mut m = 0.0;
            let mut s = 0.0;
            for &(u, w) in atoms {
                let d = x - u;
                if d != 0.0 {
                    let a = d.abs().powf(beta) * w;
                    m += a;
                    s += a * d.signum();
                }
                // d == 0 contributes nothing to either integral (sgn(0) := 0)
            }
            return Ok((m, s));
        }
        match self.kind {
            WeightKind::Uniform { a, b } => {
                // antiderivatives of |x-u|^β and sgn(x-u)|x-u|^β in u give
                //   m = ((x-a)₊ + (b-x)₊ - (a-x)₊ - (x-b)₊)^{β+1} terms,
                //   s = (|x-a|^{β+1} - |x-b|^{β+1}),
                // each scaled by 1/((β+1)(b-a)).
                let w = 1.0 / ((beta + 1.0) * (b - a));
                let left = (x - a).max(0.0).powf(beta + 1.0);
                let right = (b - x).max(0.0).powf(beta + 1.0);
                let over = (a - x).max(0.0).powf(beta + 1.0);
                let under = (x - b).max(0.0).powf(beta + 1.0);
                let m = w * (left + right - over - under);
                let s = w * ((x - a).abs().powf(beta + 1.0) - (x - b).abs().powf(beta + 1.0));
                Ok((m, s))
            }
            WeightKind::Gaussian { mu, sigma } => {
                let dens = |u: f64| {
                    let z = (u - mu) / sigma;
                    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
                };
                let span = 14.0 * sigma;
                // below x: sgn(x-u) = +1
                let below = quad::adaptive(
                    &|v: f64| v.powf(beta) * dens(x - v),
                    0.0,
                    span + (x - mu).abs(),
                    1e-13,
                    1e-11,
                    4000,
                )?
                .value;
                let above = quad::adaptive(
                    &|v: f64| v.powf(beta) * dens(x + v),
                    0.0,
                    span + (x - mu).abs(),
                    1e-13,
                    1e-11,
                    4000,
                )?
                .value;
                Ok((below + above, below - above))
            }
            _ => unreachable!(),
        }
    }
}
