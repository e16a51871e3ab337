//! Frequency/pressure lookup table with piecewise-linear interpolation in
//! both directions.
//!
//! Table file format: CSV with header `pressure_pa,length_m,frequency_hz`,
//! one knot per line, `\n` line endings.

use std::path::Path;

use crate::cantilever::{free_length_from_pressure, natural_frequency, CantileverSpec, LengthModel, PivotGeometry};
use crate::error::{Error, Result};
use crate::shell::{vertex_drift, DiaphragmSpec};

pub const TABLE_HEADER: [&str; 3] = ["pressure_pa", "length_m", "frequency_hz"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub pressure: f64,
    pub length: f64,
    pub frequency: f64,
}

impl CalibrationRow {
    pub const fn new(pressure: f64, length: f64, frequency: f64) -> Self {
        Self {
            pressure,
            length,
            frequency,
        }
    }
}

/// Immutable calibration knots.
///
/// Pressure and length strictly increase, frequency strictly decreases.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTable {
    rows: Vec<CalibrationRow>,
    clamp: bool,
}

/// The prototype's calibration: six knots from 100 to 200 Pa.
pub fn default_table() -> CalibrationTable {
    CalibrationTable::new(vec![
        CalibrationRow::new(100.0, 0.0250, 250.0),
        CalibrationRow::new(120.0, 0.0265, 236.0),
        CalibrationRow::new(140.0, 0.0285, 222.0),
        CalibrationRow::new(160.0, 0.0304, 210.0),
        CalibrationRow::new(180.0, 0.0325, 200.0),
        CalibrationRow::new(200.0, 0.0350, 191.0),
    ])
    .expect("built-in table is valid")
}

/// Checks the ordering invariants. Reported line numbers follow the CSV
/// layout: the header is line 1 and row `i` is line `i + 2`.
fn check_rows(rows: &[CalibrationRow]) -> Result<()> {
    if rows.len() < 2 {
        return Err(Error::InvariantViolation {
            column: "rows",
            line: rows.len() as u64 + 1,
        });
    }
    for (i, row) in rows.iter().enumerate() {
        let line = i as u64 + 2;
        for (column, value) in [
            ("pressure_pa", row.pressure),
            ("length_m", row.length),
            ("frequency_hz", row.frequency),
        ] {
            if !value.is_finite() {
                return Err(Error::InvariantViolation { column, line });
            }
        }
        if i == 0 {
            continue;
        }
        let prev = &rows[i - 1];
        if row.pressure <= prev.pressure {
            return Err(Error::InvariantViolation {
                column: "pressure_pa",
                line,
            });
        }
        if row.length <= prev.length {
            return Err(Error::InvariantViolation {
                column: "length_m",
                line,
            });
        }
        if row.frequency >= prev.frequency {
            return Err(Error::InvariantViolation {
                column: "frequency_hz",
                line,
            });
        }
    }
    Ok(())
}

/// Linear interpolation on `xs` (strictly increasing). Exact at knots.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.binary_search_by(|probe| probe.total_cmp(&x)) {
        Ok(i) => ys[i],
        Err(i) => {
            let i = i.clamp(1, xs.len() - 1);
            let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
            y0 + (x - x0) * (y1 - y0) / (x1 - x0)
        }
    }
}

impl CalibrationTable {
    pub fn new(rows: Vec<CalibrationRow>) -> Result<Self> {
        check_rows(&rows)?;
        Ok(Self { rows, clamp: false })
    }

    /// Enables or disables saturation at the table ends.
    pub fn with_clamp(mut self, clamp: bool) -> Self {
        self.clamp = clamp;
        self
    }

    pub fn clamp(&self) -> bool {
        self.clamp
    }

    pub fn rows(&self) -> &[CalibrationRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pressure_range(&self) -> (f64, f64) {
        (self.rows[0].pressure, self.rows[self.rows.len() - 1].pressure)
    }

    /// `(lowest, highest)` frequency.
    pub fn frequency_range(&self) -> (f64, f64) {
        (self.rows[self.rows.len() - 1].frequency, self.rows[0].frequency)
    }

    fn column(&self, pick: fn(&CalibrationRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }

    fn bounded(&self, what: &'static str, value: f64, (lo, hi): (f64, f64)) -> Result<f64> {
        if (lo..=hi).contains(&value) {
            Ok(value)
        } else if self.clamp && !value.is_nan() {
            Ok(value.clamp(lo, hi))
        } else {
            Err(Error::OutOfRange { what, value, lo, hi })
        }
    }

    pub fn frequency_from_pressure(&self, p: f64) -> Result<f64> {
        let p = self.bounded("pressure", p, self.pressure_range())?;
        Ok(interpolate(
            &self.column(|r| r.pressure),
            &self.column(|r| r.frequency),
            p,
        ))
    }

    pub fn length_from_pressure(&self, p: f64) -> Result<f64> {
        let p = self.bounded("pressure", p, self.pressure_range())?;
        Ok(interpolate(&self.column(|r| r.pressure), &self.column(|r| r.length), p))
    }

    /// Inverse lookup. Frequencies decrease with pressure, so both columns
    /// are reversed to search on an increasing axis.
    pub fn pressure_from_frequency(&self, f: f64) -> Result<f64> {
        let f = self.bounded("frequency", f, self.frequency_range())?;
        let mut freqs = self.column(|r| r.frequency);
        let mut pressures = self.column(|r| r.pressure);
        freqs.reverse();
        pressures.reverse();
        Ok(interpolate(&freqs, &pressures, f))
    }
}

/// Builds a table from the mechanics: free length from the vertex drift,
/// then the strip's first-mode frequency.
pub fn generate_table(
    diaphragm: &DiaphragmSpec,
    strip: &CantileverSpec,
    geom: &PivotGeometry,
    pressures: &[f64],
) -> Result<CalibrationTable> {
    diaphragm.validate()?;
    strip.validate()?;
    geom.validate(strip)?;
    if pressures.len() < 2 {
        return Err(Error::invalid("pressures", "need at least two knots"));
    }
    if let Some(i) = pressures.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::MonotonicityViolation {
            column: "pressure_pa",
            row: i + 1,
        });
    }
    let drift = |p: f64| vertex_drift(diaphragm, p);
    let rows = pressures
        .iter()
        .map(|&p| {
            let length = free_length_from_pressure(geom, LengthModel::Physics(&drift), p, false)?;
            let frequency = natural_frequency(strip, length)?;
            Ok(CalibrationRow::new(p, length, frequency))
        })
        .collect::<Result<Vec<_>>>()?;

    check_rows(&rows).map_err(|e| match e {
        Error::InvariantViolation { column, line } => Error::MonotonicityViolation {
            column,
            row: line.saturating_sub(2) as usize,
        },
        other => other,
    })?;
    Ok(CalibrationTable { rows, clamp: false })
}

/// Writes the table in its CSV form. `f64` display is shortest
/// round-trip, so loading the file back yields bit-identical values.
pub fn write_table<W: std::io::Write>(table: &CalibrationTable, out: W) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(TABLE_HEADER)?;
    for row in &table.rows {
        writer.write_record([
            row.pressure.to_string(),
            row.length.to_string(),
            row.frequency.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn save_table(table: &CalibrationTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_table(table, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e.into()))
}

pub fn read_table<R: std::io::Read>(input: R) -> Result<CalibrationTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(input);
    let mut records = reader.records();

    let header = match records.next() {
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty table file".into(),
            })
        }
        Some(rec) => rec.map_err(|e| parse_error(1, e))?,
    };
    if header.iter().map(str::trim).ne(TABLE_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", TABLE_HEADER.join(",")),
        });
    }

    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| parse_error(0, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let mut values = [0.0; 3];
        for (slot, (field, name)) in values.iter_mut().zip(rec.iter().zip(TABLE_HEADER)) {
            *slot = field.trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("{name}: `{field}` is not a number"),
            })?;
        }
        rows.push(CalibrationRow::new(values[0], values[1], values[2]));
    }
    CalibrationTable::new(rows)
}

fn parse_error(fallback_line: u64, e: csv::Error) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn load_table(path: impl AsRef<Path>) -> Result<CalibrationTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_table(std::io::BufReader::new(file))
}
