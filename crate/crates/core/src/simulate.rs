//! Monte Carlo engines for the weighted subordinator pair `(U_t, V_t)` and
//! the self-normalized ratio `T_t = U_t / V_t`.
//!
//! Two independent constructions of the same law:
//!
//! - **series**: `V_t = Σ φ(S_i/t)` over the arrival times `S_i` of a unit
//!   Poisson process, each term weighted by an independent draw from `F`.
//!   Terms come out in decreasing size, so the first term is the largest
//!   jump. The ratio is accumulated in units of the leading jump, which
//!   keeps `T_t` and `R_t` meaningful even when the jumps themselves
//!   underflow f64 (rapidly decaying inverse tails at small `t`).
//! - **layered**: jumps arranged in geometric shells `[a_n, a_{n-1})`, a
//!   Poisson number of jumps per shell, each drawn by inverse-tail sampling
//!   restricted to the shell.
//!
//! Truncated mass is accounted through the expected remainder
//! `t ∫_{S_stop/t}^∞ φ(s) ds` (series) and `t ∫_{(0, a_N)} x Λ(dx)`
//! (layered). By default the samplers add this conditional mean back in
//! (`compensate`), which removes the truncation bias at no distributional
//! cost beyond the remainder's own fluctuation — reported bounds stay
//! available either way.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::levy_measure::{InverseWalker, LevyMeasure};
use crate::rng::stream;
use crate::weights::WeightLaw;

/// Replicates per deterministic RNG partition; results do not depend on the
/// worker count.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Series,
    Layered,
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Engine::Series => write!(f, "series"),
            Engine::Layered => write!(f, "layered"),
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Engine::Series),
            "layered" => Ok(Engine::Layered),
            other => Err(Error::Parse(format!("unknown engine `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesConfig {
    /// Absolute floor: terms with `φ(S_i/t) < jump_floor_eps` are dropped.
    pub jump_floor_eps: f64,
    /// Relative floor on `φ(S_i/t) / φ(S_1/t)`; 0 disables it. The leading
    /// term is always kept — it sets the scale of the replicate.
    pub jump_floor_rel: f64,
    pub max_terms: u64,
    /// Cap on expected-discarded over expected-total mass when `max_terms`
    /// is hit without compensation.
    pub relative_mass_budget: f64,
    /// Add the expected truncated remainder back into (U, V).
    pub compensate: bool,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        // with compensation on, the floors govern cost rather than bias:
        // the mean of everything past the stop arrival is added back
        SeriesConfig {
            jump_floor_eps: 1e-12,
            jump_floor_rel: 1e-7,
            max_terms: 200_000,
            relative_mass_budget: 1e-3,
            compensate: true,
        }
    }
}

impl SeriesConfig {
    fn validate(&self) -> Result<()> {
        if !(self.jump_floor_eps > 0.0) {
            return Err(Error::Domain("jump_floor_eps must be positive".into()));
        }
        if self.max_terms < 1 {
            return Err(Error::Domain("max_terms must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellConfig {
    /// Decreasing shell boundaries `a_1 > a_2 > ... > a_N`; `None` uses the
    /// geometric default `a_n = 2^{-n}` down to `small_shell_floor`.
    pub boundaries: Option<Vec<f64>>,
    /// Smallest simulated jump `a_N`.
    pub small_shell_floor: f64,
    pub compensate: bool,
}

impl Default for ShellConfig {
    fn default() -> Self {
        ShellConfig { boundaries: None, small_shell_floor: 1e-8, compensate: true }
    }
}

/// Shell floor per the accuracy rule `t·I(a_N) <= 1e-8 · t·I(1)`, capped so
/// the expected jump count `t·Λ̄(a_N)` stays below `intensity_budget`
/// (unbounded-activity tails would otherwise demand astronomically many
/// draws per replicate).
pub fn default_shell_floor(measure: &LevyMeasure, t: f64, intensity_budget: f64) -> Result<f64> {
    let i1 = measure.small_jump_mean(1.0)?;
    let mut floor = 0.5f64;
    while floor > 1e-300 {
        let accurate = measure.small_jump_mean(floor)? <= 1e-8 * i1;
        if accurate {
            break;
        }
        let next = floor * 0.5;
        if t * measure.tail(next) > intensity_budget {
            break;
        }
        floor = next;
    }
    Ok(floor)
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationConfig {
    pub series: SeriesConfig,
    pub shells: ShellConfig,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig { series: SeriesConfig::default(), shells: ShellConfig::default() }
    }
}

/// One replicate of the bivariate pair from the series construction.
#[derive(Debug, Clone, Copy)]
pub struct SeriesDraw {
    pub u: f64,
    pub v: f64,
    pub terms: u64,
    /// Expected mass beyond the stopping arrival, `t ∫_{S_stop/t}^∞ φ`.
    pub discarded_bound: f64,
}

/// One replicate from the layered construction.
#[derive(Debug, Clone, Copy)]
pub struct LayeredDraw {
    pub u: f64,
    pub v: f64,
    pub jumps: u64,
}

/// Monte Carlo replicates of `(T_t, R_t, V_t)` with truncation metadata.
#[derive(Debug, Clone)]
pub struct RatioBatch {
    pub t: f64,
    pub n: usize,
    pub ratios: Vec<f64>,
    pub rt_values: Vec<f64>,
    pub v_values: Vec<f64>,
    pub engine: Engine,
    pub seed: u64,
    /// Worst per-replicate expected discarded mass (absolute units).
    pub discarded_mass_bound: f64,
    /// mean(bound) / (mean(bound) + mean(V)): expected-discarded over
    /// expected-total mass, estimated on the realized batch.
    pub discarded_mass_rel: f64,
    /// Replicates with V = 0 (finite-activity measures at small t); the
    /// ratio there is 0/0 := 0.
    pub zero_v_replicates: usize,
}

// Internal per-replicate record, scale-free where possible.
#[derive(Debug, Clone, Copy)]
struct Replicate {
    t_ratio: f64,
    r_stat: f64,
    v_abs: f64,
    terms: u64,
    bound_abs: f64,
    sum_r: f64, // realized mass in leading-jump units (incl. compensation)
    zero_v: bool,
}

fn series_replicate<R: Rng + ?Sized>(
    t: f64,
    measure: &LevyMeasure,
    weights: &WeightLaw,
    cfg: &SeriesConfig,
    rng: &mut R,
) -> Result<Replicate> {
    let mut s: f64 = Exp1.sample(rng);
    let mut walker = InverseWalker::new(measure);
    let ln_phi1 = walker.ln_phi(s / t);
    if ln_phi1 == f64::NEG_INFINITY {
        // the first arrival already exceeds the total mass: no jumps at all
        return Ok(Replicate {
            t_ratio: 0.0,
            r_stat: 0.0,
            v_abs: 0.0,
            terms: 0,
            bound_abs: 0.0,
            sum_r: 0.0,
            zero_v: true,
        });
    }

    let x1 = weights.sample(rng);
    let mut sum_r = 1.0f64;
    let mut sum_xr = x1;
    let mut sum_r2 = 1.0f64;
    let mut terms = 1u64;
    let ln_eps_abs = cfg.jump_floor_eps.ln();

    let mut dropped_r = 0.0f64;
    let mut hit_max = false;
    loop {
        if terms >= cfg.max_terms {
            hit_max = true;
            break;
        }
        let e: f64 = Exp1.sample(rng);
        s += e;
        let lnp = walker.ln_phi(s / t);
        if lnp == f64::NEG_INFINITY {
            break;
        }
        let r = (lnp - ln_phi1).exp();
        if lnp < ln_eps_abs || r < cfg.jump_floor_rel {
            dropped_r = r;
            break;
        }
        let x = weights.sample(rng);
        sum_r += r;
        sum_xr += x * r;
        sum_r2 += r * r;
        terms += 1;
    }

    // expected remainder past the stopping arrival, in leading-jump units
    let remainder_r =
        dropped_r + t * measure.tail_integral_of_inverse_scaled(s / t, ln_phi1)?;
    let remainder_r2 = if cfg.compensate {
        dropped_r * dropped_r
            + t * measure.tail_sq_integral_of_inverse_scaled(s / t, 2.0 * ln_phi1)?
    } else {
        0.0
    };

    if cfg.compensate {
        sum_r += remainder_r;
        sum_xr += weights.mean() * remainder_r;
        sum_r2 += remainder_r2;
    } else if hit_max {
        let fraction = remainder_r / (remainder_r + sum_r);
        if fraction > cfg.relative_mass_budget {
            return Err(Error::MassBudget { fraction, budget: cfg.relative_mass_budget });
        }
    }

    let phi1 = if ln_phi1 < -745.0 { 0.0 } else { ln_phi1.exp() };
    Ok(Replicate {
        t_ratio: sum_xr / sum_r,
        r_stat: sum_r2 / (sum_r * sum_r),
        v_abs: phi1 * sum_r,
        terms,
        bound_abs: phi1 * remainder_r,
        sum_r,
        zero_v: false,
    })
}

/// Draw `(U_t, V_t)` once by the inverse-tail series representation.
pub fn series_sample_uv<R: Rng + ?Sized>(
    t: f64,
    measure: &LevyMeasure,
    weights: &WeightLaw,
    cfg: &SeriesConfig,
    rng: &mut R,
) -> Result<SeriesDraw> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    cfg.validate()?;
    let rep = series_replicate(t, measure, weights, cfg, rng)?;
    Ok(SeriesDraw {
        u: rep.t_ratio * rep.v_abs,
        v: rep.v_abs,
        terms: rep.terms,
        discarded_bound: rep.bound_abs,
    })
}

struct Shell {
    tail_hi: f64, // Λ̄ at the upper boundary (left limit)
    mass: f64,
}

struct ShellTable {
    shells: Vec<Shell>,
    floor: f64,
}

fn build_shells(measure: &LevyMeasure, cfg: &ShellConfig) -> Result<ShellTable> {
    let bounds: Vec<f64> = match &cfg.boundaries {
        Some(b) => {
            if b.is_empty() || b.windows(2).any(|w| w[1] >= w[0]) || b.iter().any(|&x| x <= 0.0) {
                return Err(Error::Domain(
                    "shell boundaries must be positive and strictly decreasing".into(),
                ));
            }
            b.clone()
        }
        None => {
            if !(cfg.small_shell_floor > 0.0 && cfg.small_shell_floor < 1.0) {
                return Err(Error::Domain("small_shell_floor must lie in (0,1)".into()));
            }
            let n = (-cfg.small_shell_floor.log2()).ceil() as i32;
            (1..=n).map(|k| 2.0f64.powi(-k)).collect()
        }
    };
    let mut shells = Vec::with_capacity(bounds.len());
    let mut tail_hi = 0.0f64; // Λ̄(∞) = 0: top shell is [a_1, ∞)
    for &a in &bounds {
        let tail_lo = measure.tail_left(a);
        if !tail_lo.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "shell [{a}, ·) has non-finite mass"
            )));
        }
        let mass = (tail_lo - tail_hi).max(0.0);
        shells.push(Shell { tail_hi, mass });
        tail_hi = tail_lo;
    }
    Ok(ShellTable { shells, floor: *bounds.last().unwrap() })
}

fn layered_replicate<R: Rng + ?Sized>(
    t: f64,
    measure: &LevyMeasure,
    weights: &WeightLaw,
    table: &ShellTable,
    compensate: bool,
    rng: &mut R,
) -> Result<Replicate> {
    let mut u = 0.0f64;
    let mut v = 0.0f64;
    let mut q = 0.0f64;
    let mut jumps = 0u64;
    for shell in &table.shells {
        if shell.mass <= 0.0 {
            continue;
        }
        let lambda = t * shell.mass;
        let k = Poisson::new(lambda)
            .map_err(|e| Error::Domain(format!("poisson intensity {lambda}: {e}")))?
            .sample(rng) as u64;
        for _ in 0..k {
            let s = shell.tail_hi + rng.random::<f64>() * shell.mass;
            let j = measure.tail_inverse(s);
            let x = weights.sample(rng);
            v += j;
            u += x * j;
            q += j * j;
        }
        jumps += k;
    }

    let mut bound_abs = t * measure.truncated_mean_below(table.floor)?;
    if compensate {
        let mass_below =
            (measure.total_mass() - measure.tail_left(table.floor)).max(0.0);
        if mass_below.is_finite() {
            // finite activity below the floor: draw the small-jump count so
            // the V = 0 atom stays exact, add the conditional mean per jump
            if mass_below > 0.0 {
                let k = Poisson::new(t * mass_below)
                    .map_err(|e| Error::Domain(format!("poisson: {e}")))?
                    .sample(rng) as u64;
                if k > 0 {
                    let m_below = measure.truncated_mean_below(table.floor)?;
                    let v2_below = measure.second_truncated_moment_below(table.floor)?;
                    let mean_jump = m_below / mass_below;
                    v += k as f64 * mean_jump;
                    u += weights.mean() * k as f64 * mean_jump;
                    q += k as f64 * (v2_below / mass_below);
                }
            }
        } else {
            let m_below = t * measure.truncated_mean_below(table.floor)?;
            v += m_below;
            u += weights.mean() * m_below;
            q += t * measure.second_truncated_moment_below(table.floor)?;
        }
        bound_abs = 0.0;
    }

    let zero_v = v == 0.0;
    Ok(Replicate {
        t_ratio: if zero_v { 0.0 } else { u / v },
        r_stat: if zero_v { 0.0 } else { q / (v * v) },
        v_abs: v,
        terms: jumps,
        bound_abs,
        sum_r: v,
        zero_v,
    })
}

/// Draw `(U_t, V_t)` once by the layered shell construction.
pub fn layered_sample_uv<R: Rng + ?Sized>(
    t: f64,
    measure: &LevyMeasure,
    weights: &WeightLaw,
    cfg: &ShellConfig,
    rng: &mut R,
) -> Result<LayeredDraw> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let table = build_shells(measure, cfg)?;
    let rep = layered_replicate(t, measure, weights, &table, cfg.compensate, rng)?;
    Ok(LayeredDraw { u: rep.t_ratio * rep.v_abs, v: rep.v_abs, jumps: rep.terms })
}

/// Generate `n` independent replicates of `(T_t, R_t, V_t)`.
///
/// Every replicate draws from its own deterministic stream derived from
/// `(seed, replicate index)`: batches are byte-identical for a given seed
/// regardless of thread count, replicate k never depends on how many draws
/// its neighbors consumed, and batches generated at different `t` under one
/// seed are coupled replicate-by-replicate (common random numbers).
pub fn ratio_batch(
    t: f64,
    measure: &LevyMeasure,
    weights: &WeightLaw,
    n: usize,
    engine: Engine,
    cfg: &SimulationConfig,
    seed: u64,
) -> Result<RatioBatch> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    if n < 1 {
        return Err(Error::Domain("batch size must be at least 1".into()));
    }
    cfg.series.validate()?;
    let shell_table = match engine {
        Engine::Layered => Some(build_shells(measure, &cfg.shells)?),
        Engine::Series => None,
    };
    let tag = format!("{engine}");
    let n_chunks = n.div_ceil(CHUNK);
    let chunks: Vec<Vec<Replicate>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            (0..len)
                .map(|i| {
                    let mut rng = stream(seed, (c * CHUNK + i) as u64, &tag);
                    match engine {
                        Engine::Series => {
                            series_replicate(t, measure, weights, &cfg.series, &mut rng)
                        }
                        Engine::Layered => layered_replicate(
                            t,
                            measure,
                            weights,
                            shell_table.as_ref().unwrap(),
                            cfg.shells.compensate,
                            &mut rng,
                        ),
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ratios = Vec::with_capacity(n);
    let mut rt_values = Vec::with_capacity(n);
    let mut v_values = Vec::with_capacity(n);
    let mut bound_max = 0.0f64;
    let mut bound_sum = 0.0f64;
    let mut v_sum = 0.0f64;
    let mut zero_v = 0usize;
    for rep in chunks.iter().flatten() {
        ratios.push(rep.t_ratio);
        rt_values.push(rep.r_stat);
        v_values.push(rep.v_abs);
        bound_max = bound_max.max(rep.bound_abs);
        bound_sum += rep.bound_abs;
        v_sum += rep.v_abs;
        if rep.zero_v {
            zero_v += 1;
        }
    }
    let bound_mean = bound_sum / n as f64;
    let v_mean = v_sum / n as f64;
    let discarded_mass_rel = if bound_mean + v_mean > 0.0 {
        bound_mean / (bound_mean + v_mean)
    } else {
        0.0
    };
    Ok(RatioBatch {
        t,
        n,
        ratios,
        rt_values,
        v_values,
        engine,
        seed,
        discarded_mass_bound: bound_max,
        discarded_mass_rel,
        zero_v_replicates: zero_v,
    })
}

/// Monte Carlo estimate (with a 95% Wilson interval) of the probability that
/// the largest jump carries more than a `1 - eps` share of `V_t`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DominanceEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

pub fn dominance_probability(
    t: f64,
    measure: &LevyMeasure,
    eps: f64,
    n: usize,
    seed: u64,
    cfg: &SeriesConfig,
) -> Result<DominanceEstimate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0,1), got {eps}")));
    }
    if n < 1 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    cfg.validate()?;
    // the weights are irrelevant for the share of V; a constant law keeps
    // the stream layout identical to a plain series batch
    let weights = WeightLaw::constant(1.0);
    let n_chunks = n.div_ceil(CHUNK);
    let hits: Result<Vec<usize>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut h = 0usize;
            for i in 0..len {
                let mut rng = stream(seed, (c * CHUNK + i) as u64, "dominance");
                let rep = series_replicate(t, measure, &weights, cfg, &mut rng)?;
                // leading term share = 1 / sum_r in leading-jump units
                if !rep.zero_v && 1.0 / rep.sum_r > 1.0 - eps {
                    h += 1;
                }
            }
            Ok(h)
        })
        .collect();
    let hits: usize = hits?.into_iter().sum();
    let p = hits as f64 / n as f64;
    let z = 1.959963984540054; // 95%
    let nf = n as f64;
    let denom = 1.0 + z * z / nf;
    let center = (p + z * z / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    Ok(DominanceEstimate {
        estimate: p,
        ci_low: (center - half).max(0.0),
        ci_high: (center + half).min(1.0),
        n,
    })
}

impl RatioBatch {
    /// CSV rows `replicate,T,R,V`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "replicate,T,R,V")?;
        for i in 0..self.n {
            writeln!(w, "{},{},{},{}", i, self.ratios[i], self.rt_values[i], self.v_values[i])?;
        }
        Ok(())
    }

    /// JSON sidecar describing the batch.
    pub fn sidecar(
        &self,
        measure: &LevyMeasure,
        weights: &WeightLaw,
        cfg: &SimulationConfig,
    ) -> serde_json::Value {
        serde_json::json!({
            "t": self.t,
            "n": self.n,
            "engine": self.engine.to_string(),
            "seed": self.seed,
            "measure": measure.describe(),
            "weights": weights.describe(),
            "discarded_mass_bound": self.discarded_mass_bound,
            "discarded_mass_rel": self.discarded_mass_rel,
            "zero_v_replicates": self.zero_v_replicates,
            "config": cfg,
        })
    }
}
