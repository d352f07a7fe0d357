//! Measured `(V_A, trials, failures)` tables and their CSV form.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 3] = ["va", "trials", "failures"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FerPoint {
    #[serde(rename = "va")]
    pub v_a: f64,
    pub trials: u64,
    pub failures: u64,
}

impl FerPoint {
    pub fn fer(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }
}

/// FER observations on a strictly increasing `V_A` grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FerMeasurementSet {
    pub points: Vec<FerPoint>,
}

impl FerMeasurementSet {
    pub fn new(points: Vec<FerPoint>) -> Result<Self> {
        let set = Self { points };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.points.iter().enumerate() {
            if !(p.v_a > 0.0 && p.v_a.is_finite()) {
                return Err(Error::invalid("va", format!("point {i}: V_A must be positive")));
            }
            if p.trials == 0 {
                return Err(Error::invalid("trials", format!("point {i}: no trials")));
            }
            if p.failures > p.trials {
                return Err(Error::invalid(
                    "failures",
                    format!("point {i}: {} failures out of {} trials", p.failures, p.trials),
                ));
            }
        }
        if let Some(w) = self.points.windows(2).find(|w| w[1].v_a <= w[0].v_a) {
            return Err(Error::invalid(
                "va",
                format!("grid not strictly increasing at {} -> {}", w[0].v_a, w[1].v_a),
            ));
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, source_name: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::parse(source_name, 1, e.to_string()))?
            .clone();
        if headers.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(Error::parse(
                source_name,
                1,
                format!(
                    "expected header `{}`, found `{}`",
                    CSV_HEADER.join(","),
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        let mut points = Vec::new();
        for record in rdr.deserialize::<FerPoint>() {
            let point = record.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                Error::parse(source_name, line, e.to_string())
            })?;
            points.push(point);
        }
        Self::new(points)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for p in &self.points {
            wtr.serialize(p).map_err(csv_io)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, &path.display().to_string())
    }
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv>", io),
        other => Error::Domain(format!("csv serialisation failed: {other:?}")),
    }
}
