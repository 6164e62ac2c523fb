use levyratio::levy_measure::LevyMeasure;
use levyratio::simulate::{ratio_batch, Engine, SimulationConfig};
use levyratio::stats::ks_statistic;
use levyratio::weights::WeightLaw;
use std::time::Instant;

fn main() {
    let m = LevyMeasure::log_slowly_varying();
    let w = WeightLaw::gaussian(0.0, 1.0).unwrap();
    let cfg = SimulationConfig::default();
    let n = 1_000_000;
    for seed in [801u64, 802, 803, 804, 805] {
        let start = Instant::now();
        let mut line = format!("seed {seed}: ");
        let mut vals = Vec::new();
        for &t in &[1e-2f64, 1e-3, 1e-4] {
            let batch = ratio_batch(t, &m, &w, n, Engine::Series, &cfg, seed).unwrap();
            let wc = w.clone();
            let ks = ks_statistic(&batch.ratios, move |x| wc.cdf(x)).unwrap();
            vals.push(ks);
            line.push_str(&format!("{ks:.6} "));
        }
        let mono = vals[0] > vals[1] && vals[1] > vals[2];
        println!("{line} monotone={mono}  [{:?}]", start.elapsed());
    }
}
