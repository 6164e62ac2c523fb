//! Distribution-level checks on the samplers: the two engines agree, the
//! ratio law is invariant under jump scaling and (for stable tails) under
//! time, and the moment bounds hold.

use levyratio::levy_measure::LevyMeasure;
use levyratio::simulate::{
    dominance_probability, ratio_batch, Engine, SeriesConfig, ShellConfig, SimulationConfig,
};
use levyratio::stats::{ks_two_sample, ks_two_sample_critical, mean_se};
use levyratio::weights::WeightLaw;

fn cfg_with_floor(floor: f64) -> SimulationConfig {
    SimulationConfig {
        series: SeriesConfig { jump_floor_eps: floor, ..SeriesConfig::default() },
        shells: ShellConfig { small_shell_floor: floor, ..ShellConfig::default() },
    }
}

#[test]
fn engines_agree_on_log_slowly_varying() {
    let m = LevyMeasure::log_slowly_varying();
    let w = WeightLaw::uniform(0.0, 1.0).unwrap();
    let cfg = cfg_with_floor(1e-6);
    let n = 10_000;
    let a = ratio_batch(1.0, &m, &w, n, Engine::Series, &cfg, 301).unwrap();
    let b = ratio_batch(1.0, &m, &w, n, Engine::Layered, &cfg, 302).unwrap();
    let d = ks_two_sample(&a.ratios, &b.ratios).unwrap();
    let crit = ks_two_sample_critical(n, n);
    assert!(d < crit, "two-sample KS {d} >= critical {crit}");
}

#[test]
fn ratio_law_invariant_under_jump_scaling() {
    // replacing Λ̄(x) by Λ̄(x/c) multiplies all jumps by c and leaves T alone
    let base = vec![(0.25, 4.0), (0.5, 2.5), (1.0, 1.2), (2.0, 0.5), (4.0, 0.0)];
    let c = 7.0;
    let scaled: Vec<(f64, f64)> = base.iter().map(|&(x, t)| (x * c, t)).collect();
    let m1 = LevyMeasure::from_tail_points(base).unwrap();
    let m2 = LevyMeasure::from_tail_points(scaled).unwrap();
    let w = WeightLaw::gaussian(0.0, 1.0).unwrap();
    let cfg = SimulationConfig::default();
    let n = 20_000;
    let a = ratio_batch(2.0, &m1, &w, n, Engine::Series, &cfg, 303).unwrap();
    let b = ratio_batch(2.0, &m2, &w, n, Engine::Series, &cfg, 304).unwrap();
    let d = ks_two_sample(&a.ratios, &b.ratios).unwrap();
    let crit = ks_two_sample_critical(n, n);
    assert!(d < crit, "KS {d} >= {crit}");
}

#[test]
fn stable_ratio_law_invariant_in_t() {
    // self-similarity: U_t/V_t has the same law at every t
    let m = LevyMeasure::stable_positive(0.5).unwrap();
    let w = WeightLaw::two_point(0.0, 1.0, 0.5).unwrap();
    let cfg = cfg_with_floor(1e-8);
    let n = 20_000;
    let a = ratio_batch(0.25, &m, &w, n, Engine::Series, &cfg, 305).unwrap();
    let b = ratio_batch(4.0, &m, &w, n, Engine::Series, &cfg, 306).unwrap();
    let d = ks_two_sample(&a.ratios, &b.ratios).unwrap();
    let crit = ks_two_sample_critical(n, n);
    assert!(d < crit, "KS {d} >= {crit}");
}

#[test]
fn abs_ratio_mean_bounded_by_weight_abs_mean() {
    // E|U_t|/V_t <= E|X|
    let m = LevyMeasure::stable_positive(0.6).unwrap();
    let w = WeightLaw::gaussian(0.3, 1.0).unwrap();
    let cfg = SimulationConfig {
        series: SeriesConfig { jump_floor_rel: 1e-5, ..SeriesConfig::default() },
        ..SimulationConfig::default()
    };
    let batch = ratio_batch(1.0, &m, &w, 50_000, Engine::Series, &cfg, 307).unwrap();
    let abs_t: Vec<f64> = batch.ratios.iter().map(|t| t.abs()).collect();
    let (mean, se) = mean_se(&abs_t).unwrap();
    assert!(
        mean <= w.abs_mean() + 4.0 * se,
        "E|T| = {mean} (se {se}) vs E|X| = {}",
        w.abs_mean()
    );
}

#[test]
fn ratio_mean_matches_weight_mean() {
    let m = LevyMeasure::index_one_log_corrected();
    let w = WeightLaw::uniform(-1.0, 3.0).unwrap();
    let cfg = SimulationConfig {
        series: SeriesConfig {
            jump_floor_rel: 1e-4,
            max_terms: 20_000,
            ..SeriesConfig::default()
        },
        ..SimulationConfig::default()
    };
    let batch = ratio_batch(1.0, &m, &w, 50_000, Engine::Series, &cfg, 308).unwrap();
    let (mean, se) = mean_se(&batch.ratios).unwrap();
    assert!((mean - w.mean()).abs() < 4.0 * se, "mean T = {mean} (se {se})");
}

#[test]
fn stable_mean_r_matches_one_minus_beta() {
    let m = LevyMeasure::stable_positive(0.5).unwrap();
    let w = WeightLaw::two_point(0.0, 1.0, 0.5).unwrap();
    let batch =
        ratio_batch(1.0, &m, &w, 100_000, Engine::Series, &SimulationConfig::default(), 309)
            .unwrap();
    let (mean_r, _) = mean_se(&batch.rt_values).unwrap();
    assert!((mean_r - 0.5).abs() < 0.01, "mean R = {mean_r}");
}

#[test]
fn dominance_single_jump_regime_at_small_t() {
    // slowly varying tail at small t: one jump dominates V
    let m = LevyMeasure::log_slowly_varying();
    let d = dominance_probability(1e-3, &m, 0.1, 20_000, 310, &SeriesConfig::default()).unwrap();
    assert!(d.estimate >= 0.9, "dominance estimate {}", d.estimate);

    // and the dominance probability grows as t shrinks (coupled seeds)
    let d2 = dominance_probability(1e-2, &m, 0.1, 20_000, 310, &SeriesConfig::default()).unwrap();
    assert!(
        d.estimate >= d2.estimate - 0.01,
        "dominance should not drop as t decreases: {} vs {}",
        d.estimate,
        d2.estimate
    );
}

#[test]
fn stable_ratio_of_independent_subordinators_follows_limit_law() {
    // an independent route to the generalized arcsine family: for two iid
    // stable-β subordinator values V, V' the variable
    // p^{1/β} V / (p^{1/β} V + (1-p)^{1/β} V') has the β-p limit density,
    // which is also what the weighted-ratio limit CDF describes
    let beta = 0.5;
    let p = 0.3;
    let m = LevyMeasure::stable_positive(beta).unwrap();
    let unit = WeightLaw::constant(1.0);
    let cfg = cfg_with_floor(1e-8);
    let n = 20_000;
    let v1 = ratio_batch(1.0, &m, &unit, n, Engine::Series, &cfg, 401).unwrap();
    let v2 = ratio_batch(1.0, &m, &unit, n, Engine::Series, &cfg, 402).unwrap();
    let a = p.powf(1.0 / beta);
    let b = (1.0 - p).powf(1.0 / beta);
    let w: Vec<f64> = v1
        .v_values
        .iter()
        .zip(&v2.v_values)
        .map(|(&x, &y)| a * x / (a * x + b * y))
        .collect();

    let law = levyratio::limits::LimitLaw::new(
        beta,
        WeightLaw::two_point(0.0, 1.0, p).unwrap(),
    )
    .unwrap();
    let d = levyratio::stats::ks_statistic(&w, |x| {
        levyratio::limits::limit_cdf(x, &law).unwrap()
    })
    .unwrap();
    let crit = 1.63 / (n as f64).sqrt();
    assert!(d < 1.3 * crit, "KS {d} vs one-sample critical {crit}");
}

#[test]
fn series_batch_t_is_scale_free_under_underflow() {
    // at t = 1e-4 the slowly varying inverse tail underflows f64, but the
    // ratio remains the weight variable in the limit
    let m = LevyMeasure::log_slowly_varying();
    let w = WeightLaw::two_point(0.0, 1.0, 0.5).unwrap();
    let batch =
        ratio_batch(1e-4, &m, &w, 5_000, Engine::Series, &SimulationConfig::default(), 311)
            .unwrap();
    // most replicates carry an underflowed V but a valid T
    assert!(batch.zero_v_replicates == 0);
    let zeros = batch.ratios.iter().filter(|&&t| t == 0.0).count() as f64;
    let ones = batch.ratios.iter().filter(|&&t| t == 1.0).count() as f64;
    let n = batch.n as f64;
    assert!((zeros / n - 0.5).abs() < 0.05, "P(T=0) = {}", zeros / n);
    assert!((ones / n - 0.5).abs() < 0.05, "P(T=1) = {}", ones / n);
}
