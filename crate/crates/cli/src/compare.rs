use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qbird_core::baselines::{credible_interval, weighted_credible_interval, weighted_mean_std};
use serde::{Deserialize, Serialize};

use crate::config::CliConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

/// Posterior draws (equal weight) or a weighted table, one column per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
}

impl SampleSet {
    /// Reads a qBIRD samples CSV (`iteration,...`), a chain CSV (`step,...`)
    /// or a grid posterior CSV (`idx_*...,<names>...,prob`).
    pub fn read(path: &Path) -> CliResult<Self> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let mut r = csv::Reader::from_reader(std::io::BufReader::new(file));
        let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let weighted = header.last().is_some_and(|h| h == "prob");
        let keep: Vec<usize> = if weighted {
            (0..header.len() - 1)
                .filter(|&i| !header[i].starts_with("idx_"))
                .collect()
        } else {
            (1..header.len()).collect()
        };
        if keep.is_empty() {
            return Err(CliError::Missing(format!(
                "{} has no parameter columns",
                path.display()
            )));
        }
        let mut columns = vec![Vec::new(); keep.len()];
        let mut weights = Vec::new();
        for row in r.records() {
            let row = row?;
            let field = |i: usize| -> CliResult<f64> {
                row[i].trim().parse().map_err(|_| {
                    CliError::Config(format!(
                        "{}: bad number {:?} in column {}",
                        path.display(),
                        &row[i],
                        header[i]
                    ))
                })
            };
            for (c, &i) in keep.iter().enumerate() {
                columns[c].push(field(i)?);
            }
            if weighted {
                weights.push(field(header.len() - 1)?);
            }
        }
        if columns[0].is_empty() {
            return Err(CliError::Missing(format!("{} has no rows", path.display())));
        }
        Ok(Self {
            names: keep.iter().map(|&i| header[i].clone()).collect(),
            columns,
            weights: weighted.then_some(weights),
        })
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    fn weights_or_ones(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![1.0; self.columns[0].len()])
    }

    /// Mean, weighted standard deviation and equal-tailed interval of one column.
    pub fn summary(&self, name: &str, level: f64) -> CliResult<Summary> {
        let values = self
            .column(name)
            .ok_or_else(|| CliError::Mismatch(format!("no column {name}")))?;
        let w = self.weights_or_ones();
        let (mean, std) = weighted_mean_std(values, &w);
        let ci = match &self.weights {
            Some(w) => weighted_credible_interval(values, w, level)?,
            None => credible_interval(values, level)?,
        };
        Ok(Summary { mean, std, ci })
    }

    /// Bin probabilities over `[lower, upper]`; values on the upper edge land in the last bin.
    pub fn histogram(&self, name: &str, lower: f64, upper: f64, bins: usize) -> CliResult<Vec<f64>> {
        let values = self
            .column(name)
            .ok_or_else(|| CliError::Mismatch(format!("no column {name}")))?;
        let w = self.weights_or_ones();
        let mut counts = vec![0.0; bins];
        let width = (upper - lower) / bins as f64;
        for (v, wt) in values.iter().zip(&w) {
            if *v < lower || *v > upper {
                continue;
            }
            let k = (((v - lower) / width) as usize).min(bins - 1);
            counts[k] += wt;
        }
        let total: f64 = w.iter().sum();
        counts.iter_mut().for_each(|c| *c /= total);
        Ok(counts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub ci: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterReport {
    pub name: String,
    pub samples: Summary,
    pub reference: Summary,
    /// Total variation between the binned marginals.
    pub tv: f64,
    pub tv_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_in_samples_ci: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_in_reference_ci: Option<bool>,
    pub histogram: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub samples: PathBuf,
    pub reference: PathBuf,
    pub bins: usize,
    pub level: f64,
    pub tv_threshold: f64,
    pub parameters: Vec<ParameterReport>,
    pub pass: bool,
}

/// Compares two sample sources parameter by parameter over the prior ranges.
pub fn compare_sets(
    cfg: &CliConfig,
    samples: &SampleSet,
    reference: &SampleSet,
    out: &Path,
) -> CliResult<Vec<ParameterReport>> {
    let mut a: Vec<&String> = samples.names.iter().collect();
    let mut b: Vec<&String> = reference.names.iter().collect();
    a.sort();
    b.sort();
    if a != b {
        return Err(CliError::Mismatch(format!(
            "{:?} vs {:?}",
            samples.names, reference.names
        )));
    }
    let truth = cfg.truth()?;
    let bins = cfg.compare.bins;
    let mut reports = Vec::new();
    for name in &samples.names {
        let idx = cfg
            .parameters
            .iter()
            .position(|p| &p.name == name)
            .ok_or_else(|| CliError::Mismatch(format!("parameter {name} is not in the config")))?;
        let spec = &cfg.parameters[idx];
        let ha = samples.histogram(name, spec.lower, spec.upper, bins)?;
        let hb = reference.histogram(name, spec.lower, spec.upper, bins)?;
        let tv = 0.5 * ha.iter().zip(&hb).map(|(x, y)| (x - y).abs()).sum::<f64>();

        let width = spec.width() / bins as f64;
        let hist_path = out.join(format!("hist_{name}.csv"));
        let mut w = csv::Writer::from_writer(File::create(&hist_path).map_err(|e| CliError::io(&hist_path, e))?);
        w.write_record(["bin_center", "samples", "reference"])?;
        for k in 0..bins {
            let center = spec.lower + (k as f64 + 0.5) * width;
            w.write_record([
                center.to_string(),
                (ha[k] / width).to_string(),
                (hb[k] / width).to_string(),
            ])?;
        }
        w.flush().map_err(|e| CliError::io(&hist_path, e))?;

        let sa = samples.summary(name, cfg.compare.level)?;
        let sb = reference.summary(name, cfg.compare.level)?;
        let t = truth.as_ref().map(|t| t[idx]);
        let inside = |s: &Summary| t.map(|t| s.ci.0 <= t && t <= s.ci.1);
        reports.push(ParameterReport {
            name: name.clone(),
            samples: sa,
            reference: sb,
            tv,
            tv_pass: tv < cfg.compare.tv_threshold,
            truth: t,
            truth_in_samples_ci: inside(&sa),
            truth_in_reference_ci: inside(&sb),
            histogram: hist_path,
        });
    }
    Ok(reports)
}

/// Writes `report.json` and one `hist_<param>.csv` per parameter.
pub fn compare(
    cfg: &CliConfig,
    samples: &Path,
    reference: &Path,
    out: &Path,
) -> CliResult<(CompareReport, RunManifest)> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let start = Instant::now();
    let a = SampleSet::read(samples)?;
    let b = SampleSet::read(reference)?;
    let parameters = compare_sets(cfg, &a, &b, out)?;
    let pass = parameters
        .iter()
        .all(|p| p.tv_pass && p.truth_in_samples_ci.unwrap_or(true));
    let report = CompareReport {
        samples: samples.to_path_buf(),
        reference: reference.to_path_buf(),
        bins: cfg.compare.bins,
        level: cfg.compare.level,
        tv_threshold: cfg.compare.tv_threshold,
        parameters,
        pass,
    };
    let report_path = out.join("report.json");
    let mut f = File::create(&report_path).map_err(|e| CliError::io(&report_path, e))?;
    writeln!(f, "{}", serde_json::to_string_pretty(&report)?).map_err(|e| CliError::io(&report_path, e))?;

    let mut manifest = RunManifest::new("compare", cfg);
    manifest.outputs.insert("report".into(), report_path);
    for p in &report.parameters {
        manifest.outputs.insert(format!("hist_{}", p.name), p.histogram.clone());
    }
    manifest
        .timings_ms
        .insert("compare".into(), start.elapsed().as_secs_f64() * 1e3);
    manifest.write(out)?;
    Ok((report, manifest))
}
