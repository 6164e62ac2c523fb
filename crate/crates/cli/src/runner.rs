//! Subcommand implementations. Each runner reads the shared experiment
//! config, produces its artifacts under the output directory and reports
//! whether every pass criterion held.

use std::fmt::Write as _;

use levyratio::diagnostics::{diagnostics_report, Grid};
use levyratio::limits::{
    expected_rt, fourier_cdf, limit_cdf, limit_density_fd, FourierConfig, LimitLaw,
};
use levyratio::simulate::ratio_batch;
use levyratio::stats::{ks_statistic, mean_se, variance, KS_COEFF_ALPHA_001};
use levyratio::{Error, RatioBatch, Result};

use crate::config::{CompareTarget, ExperimentConfig, LimitMethod};
use crate::output::{pretty, t_label, OutputDir};

/// One row of `verify` output.
#[derive(Debug, Clone)]
pub struct ComparisonResult {
    pub t: f64,
    pub n: usize,
    pub ks_statistic: f64,
    pub ks_critical: f64,
    pub mean_t: f64,
    pub se_t: f64,
    pub mean_r: f64,
    pub se_r: f64,
    pub var_t: f64,
    pub pass: bool,
}

fn batch_for(cfg: &ExperimentConfig, t: f64) -> Result<RatioBatch> {
    ratio_batch(
        t,
        &cfg.measure,
        &cfg.weights,
        cfg.run.n,
        cfg.run.engine,
        &cfg.run.sim,
        cfg.run.seed,
    )
}

pub fn run_simulate(cfg: &ExperimentConfig) -> Result<bool> {
    let mut out = OutputDir::create(&cfg.out_dir)?;
    for &t in &cfg.run.t_values {
        let batch = batch_for(cfg, t)?;
        out.write_batch(&format!("batch_t{}", t_label(t)), &batch, cfg)?;
        eprintln!(
            "t = {t}: n = {}, zero-V = {}, discarded mass bound = {:e} (rel {:e})",
            batch.n, batch.zero_v_replicates, batch.discarded_mass_bound, batch.discarded_mass_rel
        );
    }
    out.write_manifest(cfg, cfg.run.seed)?;
    Ok(true)
}

pub fn run_limit(cfg: &ExperimentConfig) -> Result<bool> {
    let mut out = OutputDir::create(&cfg.out_dir)?;
    let law = LimitLaw::new(cfg.limit.beta, cfg.weights.clone())?.with_scale(cfg.limit.scale_c)?;
    let n = cfg.limit.points;
    let mut csv = String::from("x,cdf,density\n");
    let mut max_err = 0.0f64;
    for i in 0..n {
        let x = cfg.limit.x_min
            + (cfg.limit.x_max - cfg.limit.x_min) * i as f64 / (n - 1) as f64;
        let cdf = match cfg.limit.method {
            LimitMethod::ClosedForm => limit_cdf(x, &law)?,
            LimitMethod::Fourier => {
                let (v, e) = fourier_cdf(x, &law, &FourierConfig::default())?;
                max_err = max_err.max(e);
                v
            }
        };
        let dens = limit_density_fd(x, &law)?;
        writeln!(csv, "{x},{cdf},{dens}").expect("string write");
    }
    out.write("limit.csv", &csv)?;
    let sidecar = serde_json::json!({
        "beta": cfg.limit.beta,
        "scale_c": cfg.limit.scale_c,
        "weights": cfg.weights.describe(),
        "method": match cfg.limit.method {
            LimitMethod::ClosedForm => "closed_form",
            LimitMethod::Fourier => "fourier",
        },
        "quadrature_error_max": max_err,
    });
    out.write("limit.meta.json", &pretty(&sidecar))?;
    out.write_manifest(cfg, cfg.run.seed)?;
    Ok(true)
}

pub fn run_diagnose(cfg: &ExperimentConfig) -> Result<bool> {
    let mut out = OutputDir::create(&cfg.out_dir)?;
    let grid = Grid::geometric(
        cfg.diagnose.end,
        cfg.diagnose.anchor,
        cfg.diagnose.decades,
        cfg.diagnose.per_decade,
    )?;
    let report = diagnostics_report(&cfg.measure, &grid)?;
    for (name, scan) in [
        ("centered_feller", &report.centered_feller),
        ("relative_stability", &report.relative_stability),
        ("stochastic_compactness", &report.stochastic_compactness),
    ] {
        let mut csv = String::from("x,ratio\n");
        for (x, r) in scan.grid.iter().zip(&scan.ratios) {
            writeln!(csv, "{x},{r}").expect("string write");
        }
        out.write(&format!("scan_{name}.csv"), &csv)?;
    }
    let json = serde_json::to_value(&report)
        .map_err(|e| Error::Parse(format!("report serialization: {e}")))?;
    out.write("diagnostics.json", &pretty(&json))?;
    out.write_manifest(cfg, cfg.run.seed)?;
    eprintln!("classification: {:?} ({})", report.classification, report.disclaimer);
    Ok(true)
}

/// Midpoint-convention step CDF for point-mass targets.
fn point_mass_cdf(c: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        if x < c {
            0.0
        } else if x > c {
            1.0
        } else {
            0.5
        }
    }
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<bool> {
    let mut out = OutputDir::create(&cfg.out_dir)?;
    let mut rows = Vec::new();
    for &t in &cfg.run.t_values {
        let batch = batch_for(cfg, t)?;
        let (mean_t, se_t) = mean_se(&batch.ratios)?;
        let (mean_r, se_r) = mean_se(&batch.rt_values)?;
        let var_t = variance(&batch.ratios)?;
        let ks = match cfg.compare.target {
            CompareTarget::LimitCdf => {
                let law = LimitLaw::new(cfg.compare.beta.unwrap(), cfg.weights.clone())?;
                ks_statistic(&batch.ratios, |x| limit_cdf(x, &law).unwrap_or(f64::NAN))?
            }
            CompareTarget::WeightCdf => {
                let w = cfg.weights.clone();
                ks_statistic(&batch.ratios, move |x| w.cdf(x))?
            }
            CompareTarget::PointMass => {
                ks_statistic(&batch.ratios, point_mass_cdf(cfg.weights.mean()))?
            }
            CompareTarget::None => 0.0,
        };
        let pass = match cfg.compare.target {
            CompareTarget::LimitCdf | CompareTarget::WeightCdf => ks <= cfg.compare.ks_pass,
            CompareTarget::PointMass => {
                var_t <= cfg.compare.var_ratio_pass * cfg.weights.variance()
            }
            CompareTarget::None => true,
        };
        rows.push(ComparisonResult {
            t,
            n: batch.n,
            ks_statistic: ks,
            ks_critical: KS_COEFF_ALPHA_001 / (batch.n as f64).sqrt(),
            mean_t,
            se_t,
            mean_r,
            se_r,
            var_t,
            pass,
        });
        out.write_batch(&format!("batch_t{}", t_label(t)), &batch, cfg)?;
    }

    let mut csv =
        String::from("t,n,ks_statistic,ks_critical_alpha001,mean_T,se_T,mean_R,se_R,var_T,pass\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            r.t, r.n, r.ks_statistic, r.ks_critical, r.mean_t, r.se_t, r.mean_r, r.se_r, r.var_t,
            r.pass
        )
        .expect("string write");
    }
    out.write("verify.csv", &csv)?;
    out.write_manifest(cfg, cfg.run.seed)?;

    let all_pass = rows.iter().all(|r| r.pass);
    for r in &rows {
        eprintln!(
            "t = {}: ks = {:.5}, mean T = {:.5} ± {:.5}, mean R = {:.5}, var T = {:.5} -> {}",
            r.t,
            r.ks_statistic,
            r.mean_t,
            r.se_t,
            r.mean_r,
            r.var_t,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(all_pass)
}

pub fn run_er_rt(cfg: &ExperimentConfig) -> Result<bool> {
    let mut out = OutputDir::create(&cfg.out_dir)?;
    let mut csv =
        String::from("t,expected_rt,quad_error,inf_condition_ok,mc_mean_r,mc_se_r\n");
    println!("{:>12} {:>14} {:>14} {:>10}", "t", "expected R_t", "MC mean R_t", "MC se");
    for &t in &cfg.run.t_values {
        let er = expected_rt(t, &cfg.measure)?;
        let batch = batch_for(cfg, t)?;
        let (mean_r, se_r) = mean_se(&batch.rt_values)?;
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            t, er.value, er.quad_error, er.inf_condition_ok, mean_r, se_r
        )
        .expect("string write");
        println!("{t:>12} {:>14.8} {:>14.8} {se_r:>10.2e}", er.value, mean_r);
        if !er.inf_condition_ok {
            eprintln!(
                "warning: t = {t}: the relative-stability condition looks violated near zero; \
                 the expected-R integral identity may not apply"
            );
        }
    }
    out.write("er_rt.csv", &csv)?;
    out.write_manifest(cfg, cfg.run.seed)?;
    Ok(true)
}
