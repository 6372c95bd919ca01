use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when comparing frequency grids.
const GRID_RTOL: f64 = 1e-9;

/// Uniform frequency nodes `f_i = f_start + i * delta_f`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub f_start: f64,
    pub delta_f: f64,
    pub len: usize,
}

impl FrequencyGrid {
    pub fn new(f_start: f64, delta_f: f64, len: usize) -> Result<Self> {
        if !(delta_f > 0.0) || !delta_f.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta_f must be positive, got {delta_f}"
            )));
        }
        if !(f_start > 0.0) || !f_start.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "f_start must be positive, got {f_start}"
            )));
        }
        if len == 0 {
            return Err(Error::InvalidParameter(
                "a frequency grid needs at least one node".into(),
            ));
        }
        Ok(Self { f_start, delta_f, len })
    }

    /// Grid covering `[f_start, f_end]` inclusive.
    pub fn spanning(f_start: f64, f_end: f64, delta_f: f64) -> Result<Self> {
        if f_end < f_start {
            return Err(Error::InvalidParameter(format!(
                "f_end {f_end} is below f_start {f_start}"
            )));
        }
        let steps = ((f_end - f_start) / delta_f).round() as usize;
        Self::new(f_start, delta_f, steps + 1)
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.f_start + i as f64 * self.delta_f
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.frequency(i))
    }

    pub fn matches(&self, other: &FrequencyGrid) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= GRID_RTOL * a.abs().max(b.abs());
        self.len == other.len && close(self.f_start, other.f_start) && close(self.delta_f, other.delta_f)
    }
}

/// Complex strain sampled on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySeries {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl FrequencySeries {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::LengthMismatch {
                what: "series values vs grid nodes",
                left: values.len(),
                right: grid.len,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len],
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_same_grid(&self, other: &FrequencySeries) -> Result<()> {
        if self.grid.matches(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)))
        }
    }

    /// Splits into the nodes below `at` and the rest.
    pub fn split_at(&self, at: usize) -> Result<(FrequencySeries, FrequencySeries)> {
        if at == 0 || at >= self.len() {
            return Err(Error::OutOfRange(format!("split index {at} for {} nodes", self.len())));
        }
        let lo = FrequencyGrid::new(self.grid.f_start, self.grid.delta_f, at)?;
        let hi = FrequencyGrid::new(self.grid.frequency(at), self.grid.delta_f, self.len() - at)?;
        Ok((
            FrequencySeries::new(lo, self.values[..at].to_vec())?,
            FrequencySeries::new(hi, self.values[at..].to_vec())?,
        ))
    }

    /// Writes `f_hz,re,im` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["f_hz", "re", "im"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([
                format!("{}", self.grid.frequency(i)),
                format!("{:e}", v.re),
                format!("{:e}", v.im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `f_hz,re,im` rows. Nodes must be uniformly spaced.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["f_hz", "re", "im"] {
            return Err(Error::Format(format!(
                "expected header f_hz,re,im, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut freqs = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let f = parse_field(&rec, 0)?;
            let re = parse_field(&rec, 1)?;
            let im = parse_field(&rec, 2)?;
            freqs.push(f);
            values.push(Complex64::new(re, im));
        }
        let grid = uniform_grid_from(&freqs)?;
        Self::new(grid, values)
    }
}

pub(crate) fn parse_field(rec: &csv::StringRecord, i: usize) -> Result<f64> {
    let field = rec.get(i).ok_or_else(|| {
        Error::Format(format!(
            "missing column {i} in row {:?}",
            rec.position().map(|p| p.line())
        ))
    })?;
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Format(format!("bad number {field:?}: {e}")))
}

fn uniform_grid_from(freqs: &[f64]) -> Result<FrequencyGrid> {
    if freqs.len() < 2 {
        return Err(Error::Format("a frequency series file needs at least two rows".into()));
    }
    let f_start = freqs[0];
    let delta_f = (freqs[freqs.len() - 1] - f_start) / (freqs.len() - 1) as f64;
    let grid = FrequencyGrid::new(f_start, delta_f, freqs.len())?;
    for (i, &f) in freqs.iter().enumerate() {
        if (f - grid.frequency(i)).abs() > 1e-6 * delta_f {
            return Err(Error::Format(format!(
                "frequency nodes are not uniformly spaced near {f} Hz"
            )));
        }
    }
    Ok(grid)
}
