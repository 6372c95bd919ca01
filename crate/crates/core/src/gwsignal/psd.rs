use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::series::{parse_field, FrequencyGrid};
use crate::error::{Error, Result};

/// One-sided noise power spectral density `S_n(f)` in strain^2 / Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsdModel {
    /// Constant level.
    Flat { level: f64 },
    /// Broadband fit to a second-generation ground-based detector:
    /// `S0 * [x^-4.14 - 5 x^-2 + 111 (1 - x^2 + x^4/2) / (1 + x^2/2)]`, `x = f / f0`.
    Analytic {
        #[serde(default = "default_s0")]
        s0: f64,
        #[serde(default = "default_f0")]
        f0: f64,
    },
    /// Linear interpolation between tabulated `(f, S_n)` pairs.
    Tabulated { freqs: Vec<f64>, values: Vec<f64> },
}

fn default_s0() -> f64 {
    1e-49
}

fn default_f0() -> f64 {
    215.0
}

impl Default for PsdModel {
    fn default() -> Self {
        PsdModel::Analytic {
            s0: default_s0(),
            f0: default_f0(),
        }
    }
}

impl PsdModel {
    pub fn eval(&self, f: f64) -> Result<f64> {
        let value = match self {
            PsdModel::Flat { level } => *level,
            PsdModel::Analytic { s0, f0 } => {
                if !(f > 0.0) {
                    return Err(Error::InvalidParameter(format!("analytic PSD undefined at {f} Hz")));
                }
                let x = f / f0;
                let x2 = x * x;
                s0 * (x.powf(-4.14) - 5.0 / x2 + 111.0 * (1.0 - x2 + 0.5 * x2 * x2) / (1.0 + 0.5 * x2))
            }
            PsdModel::Tabulated { freqs, values } => interpolate(freqs, values, f)?,
        };
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "PSD is not positive at {f} Hz ({value})"
            )));
        }
        Ok(value)
    }

    /// `S_n` at every node of `grid`; fails if any value is not positive.
    pub fn on_grid(&self, grid: &FrequencyGrid) -> Result<Vec<f64>> {
        grid.frequencies().map(|f| self.eval(f)).collect()
    }

    /// Reads a tabulated PSD from `f_hz,psd` rows.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["f_hz", "psd"] {
            return Err(Error::Format("expected header f_hz,psd".into()));
        }
        let mut freqs = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            freqs.push(parse_field(&rec, 0)?);
            values.push(parse_field(&rec, 1)?);
        }
        if freqs.is_empty() || !freqs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Format(
                "PSD table must be non-empty with increasing frequencies".into(),
            ));
        }
        Ok(PsdModel::Tabulated { freqs, values })
    }

    /// Writes `f_hz,psd` rows sampled on `grid`.
    pub fn write_csv<W: Write>(&self, grid: &FrequencyGrid, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["f_hz", "psd"])?;
        for f in grid.frequencies() {
            w.write_record([format!("{f}"), format!("{:e}", self.eval(f)?)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn interpolate(freqs: &[f64], values: &[f64], f: f64) -> Result<f64> {
    if freqs.len() != values.len() || freqs.is_empty() {
        return Err(Error::InvalidParameter("malformed PSD table".into()));
    }
    let last = freqs.len() - 1;
    if f < freqs[0] || f > freqs[last] {
        return Err(Error::InvalidParameter(format!(
            "{f} Hz outside tabulated PSD range [{}, {}]",
            freqs[0], freqs[last]
        )));
    }
    let hi = freqs.partition_point(|&x| x < f);
    if hi == 0 {
        return Ok(values[0]);
    }
    let (f0, f1) = (freqs[hi - 1], freqs[hi]);
    let t = (f - f0) / (f1 - f0);
    Ok(values[hi - 1] + t * (values[hi] - values[hi - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_is_positive_over_the_band() {
        let psd = PsdModel::default();
        let grid = FrequencyGrid::spanning(10.0, 2048.0, 0.5).unwrap();
        let vals = psd.on_grid(&grid).unwrap();
        assert!(vals.iter().all(|&v| v > 0.0));
        // bucket sits near 200 Hz
        assert!(psd.eval(200.0).unwrap() < psd.eval(20.0).unwrap());
    }

    #[test]
    fn tabulated_interpolates_and_rejects_out_of_range() {
        let psd = PsdModel::Tabulated {
            freqs: vec![10.0, 20.0, 30.0],
            values: vec![1.0, 3.0, 2.0],
        };
        assert_eq!(psd.eval(15.0).unwrap(), 2.0);
        assert_eq!(psd.eval(30.0).unwrap(), 2.0);
        assert_eq!(psd.eval(10.0).unwrap(), 1.0);
        assert!(psd.eval(31.0).is_err());
    }

    #[test]
    fn nonpositive_level_is_rejected() {
        assert!(PsdModel::Flat { level: 0.0 }.eval(10.0).is_err());
        let psd = PsdModel::Tabulated {
            freqs: vec![1.0, 2.0],
            values: vec![1.0, -1.0],
        };
        assert!(psd.eval(2.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let grid = FrequencyGrid::new(20.0, 1.0, 5).unwrap();
        let mut buf = Vec::new();
        PsdModel::default().write_csv(&grid, &mut buf).unwrap();
        let back = PsdModel::read_csv(buf.as_slice()).unwrap();
        for f in grid.frequencies() {
            assert_eq!(back.eval(f).unwrap(), PsdModel::default().eval(f).unwrap());
        }
    }
}
