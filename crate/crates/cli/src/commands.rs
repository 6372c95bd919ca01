use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use qbird_core::baselines::{brute_force_posterior, classical_mh, ChainOptions, ENUMERATION_CAP};
use qbird_core::gwsignal::{generate_injection, FrequencySeries, LikelihoodOracle, ToyInspiral};
use qbird_core::lattice::LatticeGrid;
use qbird_core::qbird::run_qbird_with;
use qbird_core::qwalk::RegisterLayout;
use serde::Serialize;

use crate::config::CliConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

/// Which sampler `run` drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SamplerKind {
    Qbird,
    Mh,
    Grid,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Qbird => "qbird",
            SamplerKind::Mh => "mh",
            SamplerKind::Grid => "grid",
        }
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?))
}

fn ensure_dir(out: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

fn absolute(path: &Path) -> CliResult<PathBuf> {
    std::path::absolute(path).map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct Truth<'a> {
    source: &'a qbird_core::SourceParams,
    noise: &'a qbird_core::NoiseSpec,
    parameters: Vec<(&'a str, f64)>,
}

/// Writes `data.csv` and `truth.json` for the configured injection.
pub fn inject(cfg: &CliConfig, out: &Path) -> CliResult<RunManifest> {
    let truth = cfg
        .injection
        .ok_or_else(|| CliError::Config("inject needs an [injection] section".into()))?;
    ensure_dir(out)?;
    let start = Instant::now();
    let grid = cfg.waveform.grid()?;
    let data = generate_injection(&ToyInspiral, &truth, &cfg.psd, cfg.noise, &grid)?;
    let data_path = out.join("data.csv");
    let mut w = create(&data_path)?;
    data.write_csv(&mut w)?;
    w.flush().map_err(|e| CliError::io(&data_path, e))?;

    let truth_path = out.join("truth.json");
    let axes = cfg.axes()?;
    let body = Truth {
        source: &truth,
        noise: &cfg.noise,
        parameters: cfg
            .parameters
            .iter()
            .zip(&axes)
            .map(|(p, k)| (p.name.as_str(), truth.get(*k)))
            .collect(),
    };
    std::fs::write(&truth_path, serde_json::to_string_pretty(&body)? + "\n")
        .map_err(|e| CliError::io(&truth_path, e))?;

    let mut snapshot = cfg.clone();
    snapshot.data.path = Some(absolute(&data_path)?);
    let mut manifest = RunManifest::new("inject", &snapshot);
    manifest.outputs.insert("data".into(), data_path);
    manifest.outputs.insert("truth".into(), truth_path);
    manifest.timings_ms.insert("inject".into(), ms(start));
    manifest.write(out)?;
    Ok(manifest)
}

/// Loads the strain data named by the config (default `<out>/data.csv`).
pub fn load_data(cfg: &CliConfig, out: &Path) -> CliResult<(PathBuf, FrequencySeries)> {
    let path = cfg.data_path(out);
    if !path.exists() {
        return Err(CliError::Missing(format!(
            "data file {} not found; run `qbird inject` first or set [data] path",
            path.display()
        )));
    }
    let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
    let data = FrequencySeries::read_csv(std::io::BufReader::new(file))?;
    if !data.grid().matches(&cfg.waveform.grid()?) {
        return Err(CliError::Config(format!(
            "data grid in {} does not match the [waveform] section",
            path.display()
        )));
    }
    Ok((path, data))
}

pub fn oracle(cfg: &CliConfig, data: FrequencySeries) -> CliResult<LikelihoodOracle> {
    Ok(LikelihoodOracle::new(
        data,
        &cfg.psd,
        Box::new(ToyInspiral),
        cfg.axes()?,
        cfg.base_source(),
    )?)
}

fn lattice(cfg: &CliConfig, qubits: usize) -> CliResult<LatticeGrid> {
    Ok(LatticeGrid::uniform(
        &cfg.parameters,
        &vec![qubits; cfg.parameters.len()],
    )?)
}

/// Runs one sampler against the configured data.
pub fn run(cfg: &CliConfig, sampler: SamplerKind, out: &Path) -> CliResult<RunManifest> {
    if sampler == SamplerKind::Qbird {
        // Fail on the qubit budget before touching any data.
        RegisterLayout::uniform(cfg.parameters.len(), cfg.sampler.qubits, cfg.sampler.ancilla)?
            .check_cap(cfg.sampler.qubit_cap)?;
    }
    ensure_dir(out)?;
    let start = Instant::now();
    let (data_path, data) = load_data(cfg, out)?;
    let oracle = oracle(cfg, data)?;
    let mut snapshot = cfg.clone();
    snapshot.data.path = Some(absolute(&data_path)?);
    let mut manifest = RunManifest::new(format!("run-{}", sampler.name()), &snapshot);
    manifest.timings_ms.insert("load".into(), ms(start));

    let start = Instant::now();
    match sampler {
        SamplerKind::Qbird => {
            let log_path = out.join("iterations.jsonl");
            let mut log = create(&log_path)?;
            let mut log_err = None;
            let result = run_qbird_with(&cfg.run_config(), &oracle, |record| {
                if log_err.is_none() {
                    let line = serde_json::to_string(record).expect("iteration record serializes");
                    if let Err(e) = writeln!(log, "{line}") {
                        log_err = Some(e);
                    }
                }
            })?;
            if let Some(e) = log_err {
                return Err(CliError::io(&log_path, e));
            }
            log.flush().map_err(|e| CliError::io(&log_path, e))?;
            manifest.timings_ms.insert("sample".into(), ms(start));
            let samples_path = out.join("samples.csv");
            let mut w = create(&samples_path)?;
            result.samples.write_csv(&mut w)?;
            w.flush().map_err(|e| CliError::io(&samples_path, e))?;
            manifest.outputs.insert("samples".into(), samples_path);
            manifest.outputs.insert("iterations".into(), log_path);
        }
        SamplerKind::Mh => {
            let grid = lattice(cfg, cfg.mh.qubits.unwrap_or(cfg.sampler.qubits))?;
            if cfg.mh.burn_in >= cfg.mh.steps {
                return Err(CliError::Config("mh.burn_in must be smaller than mh.steps".into()));
            }
            let chain = classical_mh(
                &grid,
                &oracle,
                ChainOptions {
                    beta: cfg.target_beta(),
                    steps: cfg.mh.steps,
                    seed: cfg.mh.seed,
                    quantize: cfg.mh.quantize,
                },
            )?;
            manifest.timings_ms.insert("sample".into(), ms(start));
            let path = out.join("chain.csv");
            let mut w = csv::Writer::from_writer(create(&path)?);
            let mut header = vec!["step".to_string()];
            header.extend(cfg.parameters.iter().map(|p| p.name.clone()));
            w.write_record(&header)?;
            for (step, &label) in chain.points.iter().enumerate().skip(cfg.mh.burn_in) {
                let mut row = vec![step.to_string()];
                row.extend(grid.values_at(label).iter().map(|v| v.to_string()));
                w.write_record(&row)?;
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
            manifest.outputs.insert("chain".into(), path);
        }
        SamplerKind::Grid => {
            let q = cfg.grid.qubits.unwrap_or(cfg.sampler.qubits);
            let bits = q * cfg.parameters.len();
            if bits > ENUMERATION_CAP.trailing_zeros() as usize {
                return Err(qbird_core::Error::EnumerationCap {
                    points: 1usize.checked_shl(bits as u32).unwrap_or(usize::MAX),
                    cap: ENUMERATION_CAP,
                }
                .into());
            }
            let grid = lattice(cfg, q)?;
            let post = brute_force_posterior(&grid, &oracle, cfg.target_beta())?;
            manifest.timings_ms.insert("sample".into(), ms(start));
            let path = out.join("posterior.csv");
            let mut w = create(&path)?;
            post.write_csv(&mut w)?;
            w.flush().map_err(|e| CliError::io(&path, e))?;
            manifest.outputs.insert("posterior".into(), path);
        }
    }
    manifest.write(out)?;
    Ok(manifest)
}
