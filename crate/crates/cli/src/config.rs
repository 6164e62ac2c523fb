//! Line-oriented `key = value` experiment configuration with `[section]`
//! headers and `#` comments. Diff-friendly; no schema tooling.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use levyratio::diagnostics::End;
use levyratio::simulate::{Engine, SeriesConfig, ShellConfig, SimulationConfig};
use levyratio::{Error, LevyMeasure, Result, WeightLaw};

#[derive(Debug, Clone, PartialEq)]
pub enum CompareTarget {
    LimitCdf,
    WeightCdf,
    PointMass,
    None,
}

impl std::str::FromStr for CompareTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "limit_cdf" => Ok(CompareTarget::LimitCdf),
            "weight_cdf" => Ok(CompareTarget::WeightCdf),
            "point_mass" => Ok(CompareTarget::PointMass),
            "none" => Ok(CompareTarget::None),
            other => Err(Error::Parse(format!("unknown comparison target `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareSpec {
    pub target: CompareTarget,
    pub beta: Option<f64>,
    pub ks_pass: f64,
    pub var_ratio_pass: f64,
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub t_values: Vec<f64>,
    pub n: usize,
    pub engine: Engine,
    pub seed: u64,
    pub sim: SimulationConfig,
}

#[derive(Debug, Clone)]
pub struct LimitSpec {
    pub beta: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub method: LimitMethod,
    pub scale_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitMethod {
    ClosedForm,
    Fourier,
}

#[derive(Debug, Clone)]
pub struct DiagnoseSpec {
    pub end: End,
    pub anchor: f64,
    pub decades: u32,
    pub per_decade: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug)]
pub struct ExperimentConfig {
    /// Verbatim config text, echoed into the manifest.
    pub raw: String,
    pub measure: LevyMeasure,
    pub weights: WeightLaw,
    pub run: RunSpec,
    pub compare: CompareSpec,
    pub limit: LimitSpec,
    pub diagnose: DiagnoseSpec,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

struct Section<'a> {
    name: &'a str,
    entries: BTreeMap<&'a str, &'a str>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.entries.get(key).copied()
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|e| {
                Error::Parse(format!("[{}] {key} = {v}: {e}", self.name))
            }),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parse(key)?
            .ok_or_else(|| Error::Parse(format!("[{}] missing required key `{key}`", self.name)))
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<&str, Section<'_>>> {
    let mut sections: BTreeMap<&str, Section> = BTreeMap::new();
    let mut current: Option<&str> = None;
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(Error::Parse(format!("line {}: malformed section header", lineno + 1)));
            }
            let name = line[1..line.len() - 1].trim();
            current = Some(name);
            sections
                .entry(name)
                .or_insert_with(|| Section { name, entries: BTreeMap::new() });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse(format!("line {}: expected `key = value`", lineno + 1)));
        };
        let Some(section) = current else {
            return Err(Error::Parse(format!(
                "line {}: key outside of any [section]",
                lineno + 1
            )));
        };
        sections
            .get_mut(section)
            .unwrap()
            .entries
            .insert(key.trim(), value.trim());
    }
    Ok(sections)
}

fn parse_t_list(s: &str) -> Result<Vec<f64>> {
    let vals: Result<Vec<f64>> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("t value `{p}`: {e}")))
        })
        .collect();
    let vals = vals?;
    if vals.is_empty() || vals.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Parse("t values must be positive".into()));
    }
    Ok(vals)
}

fn parse_measure(sec: &Section<'_>, base: &Path) -> Result<LevyMeasure> {
    let kind: String = sec.require("kind")?;
    match kind.as_str() {
        "stable_positive" => LevyMeasure::stable_positive(sec.require("beta")?),
        "exp_compound_poisson" => Ok(LevyMeasure::exp_compound_poisson()),
        "log_slowly_varying" => Ok(LevyMeasure::log_slowly_varying()),
        "index_one_log_corrected" => Ok(LevyMeasure::index_one_log_corrected()),
        "block_oscillating" => Ok(LevyMeasure::block_oscillating()),
        "user_tail" => {
            let path: String = sec.require("path")?;
            LevyMeasure::from_tail_csv(&base.join(path))
        }
        other => Err(Error::Parse(format!("unknown measure kind `{other}`"))),
    }
}

fn parse_weights(sec: &Section<'_>, base: &Path) -> Result<WeightLaw> {
    let kind: String = sec.require("kind")?;
    match kind.as_str() {
        "two_point" => WeightLaw::two_point(
            sec.require("a")?,
            sec.require("b")?,
            sec.require("p")?,
        ),
        "uniform" => WeightLaw::uniform(sec.require("a")?, sec.require("b")?),
        "gaussian" => WeightLaw::gaussian(sec.require("mu")?, sec.require("sigma")?),
        "empirical" => {
            let path: String = sec.require("path")?;
            WeightLaw::from_values_csv(&base.join(path))
        }
        "constant" => Ok(WeightLaw::constant(sec.require("value")?)),
        other => Err(Error::Parse(format!("unknown weight kind `{other}`"))),
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::from_str_with_base(&raw, &base)
    }

    pub fn from_str_with_base(raw: &str, base: &Path) -> Result<Self> {
        let sections = split_sections(raw)?;
        let empty = Section { name: "", entries: BTreeMap::new() };

        let measure_sec = sections
            .get("measure")
            .ok_or_else(|| Error::Parse("missing [measure] section".into()))?;
        let measure = parse_measure(measure_sec, base)?;
        measure.validate()?;

        let weights_sec = sections
            .get("weights")
            .ok_or_else(|| Error::Parse("missing [weights] section".into()))?;
        let weights = parse_weights(weights_sec, base)?;

        let run_sec = sections.get("run").unwrap_or(&empty);
        let mut series = SeriesConfig::default();
        if let Some(v) = run_sec.parse::<f64>("jump_floor_eps")? {
            series.jump_floor_eps = v;
        }
        if let Some(v) = run_sec.parse::<f64>("jump_floor_rel")? {
            series.jump_floor_rel = v;
        }
        if let Some(v) = run_sec.parse::<u64>("max_terms")? {
            series.max_terms = v;
        }
        if let Some(v) = run_sec.parse::<f64>("mass_budget")? {
            series.relative_mass_budget = v;
        }
        if let Some(v) = run_sec.parse::<bool>("compensate")? {
            series.compensate = v;
        }
        let mut shells = ShellConfig { compensate: series.compensate, ..ShellConfig::default() };
        if let Some(v) = run_sec.parse::<f64>("shell_floor")? {
            shells.small_shell_floor = v;
        }
        let run = RunSpec {
            t_values: match run_sec.get("t") {
                Some(s) => parse_t_list(s)?,
                None => vec![1.0],
            },
            n: run_sec.parse::<usize>("n")?.unwrap_or(10_000),
            engine: run_sec.parse::<Engine>("engine")?.unwrap_or(Engine::Series),
            seed: run_sec.parse::<u64>("seed")?.unwrap_or(1),
            sim: SimulationConfig { series, shells },
        };
        if run.n < 1 {
            return Err(Error::Parse("[run] n must be at least 1".into()));
        }

        let cmp_sec = sections.get("compare").unwrap_or(&empty);
        let compare = CompareSpec {
            target: cmp_sec.parse::<CompareTarget>("target")?.unwrap_or(CompareTarget::None),
            beta: cmp_sec.parse::<f64>("beta")?,
            ks_pass: cmp_sec.parse::<f64>("ks_pass")?.unwrap_or(0.01),
            var_ratio_pass: cmp_sec.parse::<f64>("var_ratio_pass")?.unwrap_or(0.01),
        };
        if compare.target == CompareTarget::LimitCdf && compare.beta.is_none() {
            return Err(Error::Parse(
                "[compare] target = limit_cdf requires `beta`".into(),
            ));
        }

        let lim_sec = sections.get("limit").unwrap_or(&empty);
        let limit = LimitSpec {
            beta: lim_sec.parse::<f64>("beta")?.or(compare.beta).unwrap_or(0.5),
            x_min: lim_sec.parse::<f64>("x_min")?.unwrap_or(0.0),
            x_max: lim_sec.parse::<f64>("x_max")?.unwrap_or(1.0),
            points: lim_sec.parse::<usize>("points")?.unwrap_or(101),
            method: match lim_sec.get("method") {
                None | Some("closed_form") => LimitMethod::ClosedForm,
                Some("fourier") => LimitMethod::Fourier,
                Some(other) => {
                    return Err(Error::Parse(format!("unknown limit method `{other}`")))
                }
            },
            scale_c: lim_sec.parse::<f64>("scale_c")?.unwrap_or(1.0),
        };
        if limit.points < 2 || !(limit.x_min < limit.x_max) {
            return Err(Error::Parse("[limit] needs x_min < x_max and points >= 2".into()));
        }

        let diag_sec = sections.get("diagnose").unwrap_or(&empty);
        let diagnose = DiagnoseSpec {
            end: diag_sec.parse::<End>("end")?.unwrap_or(End::Zero),
            anchor: diag_sec.parse::<f64>("anchor")?.unwrap_or(1.0),
            decades: diag_sec.parse::<u32>("decades")?.unwrap_or(6),
            per_decade: diag_sec.parse::<u32>("per_decade")?.unwrap_or(64),
        };

        let out_sec = sections.get("output").unwrap_or(&empty);
        let out_dir = PathBuf::from(out_sec.get("dir").unwrap_or("out"));
        let format = out_sec.parse::<OutputFormat>("format")?.unwrap_or(OutputFormat::Csv);

        Ok(ExperimentConfig {
            raw: raw.to_string(),
            measure,
            weights,
            run,
            compare,
            limit,
            diagnose,
            out_dir,
            format,
        })
    }
}
