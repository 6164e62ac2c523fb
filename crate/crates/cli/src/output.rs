//! Deterministic artifact writers: CSV data files plus a JSON manifest.
//! Nothing time- or host-dependent goes into the files, so a rerun with the
//! same config and seed is byte-identical.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use levyratio::{RatioBatch, Result};

use crate::config::{ExperimentConfig, OutputFormat};

pub struct OutputDir {
    pub dir: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let mut f = fs::File::create(self.dir.join(name))?;
        f.write_all(contents.as_bytes())?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_batch(
        &mut self,
        name_stem: &str,
        batch: &RatioBatch,
        cfg: &ExperimentConfig,
    ) -> Result<()> {
        match cfg.format {
            OutputFormat::Csv => {
                let mut buf = Vec::new();
                batch.write_csv(&mut buf)?;
                self.write(&format!("{name_stem}.csv"), &String::from_utf8_lossy(&buf))?;
            }
            OutputFormat::Json => {
                let value = serde_json::json!({
                    "T": batch.ratios,
                    "R": batch.rt_values,
                    "V": batch.v_values,
                });
                self.write(&format!("{name_stem}.json"), &pretty(&value))?;
            }
        }
        let sidecar = batch.sidecar(&cfg.measure, &cfg.weights, &cfg.run.sim);
        self.write(&format!("{name_stem}.meta.json"), &pretty(&sidecar))
    }

    /// Config echo, versions and the artifact list. Wall time is stderr-only
    /// by design: the manifest participates in byte-identity checks.
    pub fn write_manifest(&mut self, cfg: &ExperimentConfig, seed: u64) -> Result<()> {
        let manifest = serde_json::json!({
            "tool": "levyratio",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": seed,
            "measure": cfg.measure.describe(),
            "weights": cfg.weights.describe(),
            "artifacts": self.files,
            "config_echo": cfg.raw,
        });
        let text = pretty(&manifest);
        let mut f = fs::File::create(self.dir.join("manifest.json"))?;
        f.write_all(text.as_bytes())?;
        Ok(())
    }
}

pub fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialization");
    s.push('\n');
    s
}

/// Format a t value for file names: `t` is positive and finite.
pub fn t_label(t: f64) -> String {
    format!("{t:e}").replace('-', "m").replace('.', "_")
}
