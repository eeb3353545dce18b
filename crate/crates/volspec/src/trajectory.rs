//! Uniformly sampled signal with seed and provenance metadata, plus CSV I/O.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A uniformly sampled time series produced by one of the simulators.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Output sampling interval.
    pub dt_out: f64,
    /// Samples after burn-in removal.
    pub values: Vec<f64>,
    /// Number of leading output samples that were discarded.
    pub burn_in: usize,
    /// Seed of the noise stream that produced this trajectory.
    pub seed: u64,
    /// Human-readable echo of the generating model parameters.
    pub provenance: String,
}

impl Trajectory {
    /// Write as CSV: `#`-prefixed comment header, then `time,value` rows.
    /// Times start at zero (burn-in already removed).
    pub fn write_csv<W: Write>(&self, mut w: W, extra_header: &[String]) -> Result<()> {
        writeln!(w, "# volspec trajectory v{}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# model: {}", self.provenance)?;
        writeln!(w, "# seed: {}", self.seed)?;
        writeln!(w, "# dt_out: {}", self.dt_out)?;
        writeln!(w, "# burn_in: {}", self.burn_in)?;
        for line in extra_header {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "time,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", i as f64 * self.dt_out, v)?;
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path, extra_header: &[String]) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(BufWriter::new(file), extra_header)
    }

    /// Read a trajectory CSV written by [`Trajectory::write_csv`].
    /// Metadata lines it does not recognize are ignored.
    pub fn read_csv_file(path: &Path) -> Result<Trajectory> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut dt_out = None;
        let mut seed = 0u64;
        let mut burn_in = 0usize;
        let mut provenance = String::new();
        let mut times: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("dt_out:") {
                    dt_out = v.trim().parse::<f64>().ok();
                } else if let Some(v) = rest.strip_prefix("seed:") {
                    seed = v.trim().parse().unwrap_or(0);
                } else if let Some(v) = rest.strip_prefix("burn_in:") {
                    burn_in = v.trim().parse().unwrap_or(0);
                } else if let Some(v) = rest.strip_prefix("model:") {
                    provenance = v.trim().to_string();
                }
                continue;
            }
            if line.starts_with("time") {
                continue;
            }
            let mut fields = line.split(',');
            let (t, v) = match (fields.next(), fields.next()) {
                (Some(t), Some(v)) => (t, v),
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: "expected `time,value`".into(),
                    })
                }
            };
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("not a number: {s:?}"),
                })
            };
            times.push(parse(t)?);
            values.push(parse(v)?);
        }
        if values.len() < 2 {
            return Err(Error::TooShort { needed: 2, got: values.len() });
        }
        let dt_out = dt_out.unwrap_or_else(|| times[1] - times[0]);
        Ok(Trajectory { dt_out, values, burn_in, seed, provenance })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let traj = Trajectory {
            dt_out: 0.25,
            values: vec![1.0, 2.5, 1.0 / 3.0, 4e-7, 1234.5678],
            burn_in: 2,
            seed: 17,
            provenance: "test model".into(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        traj.write_csv_file(&path, &[]).unwrap();
        let back = Trajectory::read_csv_file(&path).unwrap();
        assert_eq!(back.values, traj.values);
        assert_eq!(back.dt_out, traj.dt_out);
        assert_eq!(back.seed, 17);
        assert_eq!(back.provenance, "test model");
    }

    #[test]
    fn rejects_garbage_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "time,value\n0,1\n1,not-a-number\n").unwrap();
        assert!(matches!(
            Trajectory::read_csv_file(&path),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
