use std::path::Path;

use crate::cell::{to_current, CellReading, ChannelStatus, TransmitterSpec};
use crate::error::{Error, Result};

pub const READINGS_HEADER: &str =
    "cycle,applied_p1_pa,applied_p2_pa,f1_hz,f2_hz,p1_pa,p2_pa,p_avg_pa,p_diff_pa,i_avg_ma,i_diff_ma,status";

/// One output row: a cell reading plus its transmitter currents. Missing
/// values are written as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadingRecord {
    pub cycle: u64,
    pub applied_p1: Option<f64>,
    pub applied_p2: Option<f64>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub p_avg: Option<f64>,
    pub p_diff: Option<f64>,
    pub i_avg_ma: Option<f64>,
    pub i_diff_ma: Option<f64>,
    pub status: [ChannelStatus; 2],
}

impl ReadingRecord {
    pub fn from_reading(r: &CellReading, tx_avg: &TransmitterSpec, tx_diff: &TransmitterSpec) -> Self {
        Self {
            cycle: r.cycle_index,
            applied_p1: r.channels[0].applied,
            applied_p2: r.channels[1].applied,
            f1: r.f1(),
            f2: r.f2(),
            p1: r.p1(),
            p2: r.p2(),
            p_avg: r.p_avg,
            p_diff: r.p_diff,
            i_avg_ma: r.p_avg.map(|p| to_current(p, tx_avg)),
            i_diff_ma: r.p_diff.map(|p| to_current(p, tx_diff)),
            status: [r.channels[0].status, r.channels[1].status],
        }
    }

    fn fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.cycle.to_string(),
            opt(self.applied_p1),
            opt(self.applied_p2),
            opt(self.f1),
            opt(self.f2),
            opt(self.p1),
            opt(self.p2),
            opt(self.p_avg),
            opt(self.p_diff),
            opt(self.i_avg_ma),
            opt(self.i_diff_ma),
            format!("{}|{}", self.status[0], self.status[1]),
        ]
    }
}

/// Renders records as CSV text with `\n` line endings.
pub fn write_readings_csv<W: std::io::Write>(records: &[ReadingRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{READINGS_HEADER}")?;
    for rec in records {
        writeln!(out, "{}", rec.fields().join(","))?;
    }
    out.flush()
}

/// Writes `records` to `path`. An empty record set is rejected.
pub fn emit_csv(records: &[ReadingRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::invalid("rows", "nothing to write"));
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_readings_csv(records, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Reads back CSV produced by [`write_readings_csv`].
pub fn parse_readings_csv(text: &str) -> Result<Vec<ReadingRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == READINGS_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "unexpected header".into(),
            })
        }
    }
    lines
        .map(|(n, line)| {
            let line_no = n as u64 + 1;
            let err = |message: String| Error::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 12 {
                return Err(err(format!("expected 12 fields, found {}", fields.len())));
            }
            let opt = |i: usize| -> Result<Option<f64>> {
                if fields[i].is_empty() {
                    Ok(None)
                } else {
                    fields[i]
                        .parse()
                        .map(Some)
                        .map_err(|_| err(format!("bad number `{}`", fields[i])))
                }
            };
            let (s1, s2) = fields[11]
                .split_once('|')
                .ok_or_else(|| err("status must be `a|b`".into()))?;
            Ok(ReadingRecord {
                cycle: fields[0].parse().map_err(|_| err("bad cycle".into()))?,
                applied_p1: opt(1)?,
                applied_p2: opt(2)?,
                f1: opt(3)?,
                f2: opt(4)?,
                p1: opt(5)?,
                p2: opt(6)?,
                p_avg: opt(7)?,
                p_diff: opt(8)?,
                i_avg_ma: opt(9)?,
                i_diff_ma: opt(10)?,
                status: [s1.parse().map_err(err)?, s2.parse().map_err(err)?],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{run_cycle, CellConfig};

    fn sample_records() -> Vec<ReadingRecord> {
        let cfg = CellConfig::default();
        [(160.0, 120.0), (50.0, 140.0)]
            .iter()
            .enumerate()
            .map(|(i, &(p1, p2))| {
                let r = run_cycle(&cfg, p1, p2, i as u64).unwrap();
                ReadingRecord::from_reading(&r, &TransmitterSpec::average(), &TransmitterSpec::differential())
            })
            .collect()
    }

    #[test]
    fn header_is_exact() {
        let mut buf = Vec::new();
        write_readings_csv(&sample_records(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "cycle,applied_p1_pa,applied_p2_pa,f1_hz,f2_hz,p1_pa,p2_pa,p_avg_pa,p_diff_pa,i_avg_ma,i_diff_ma,status"
        );
        assert_eq!(text.lines().count(), 3);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn write_then_parse() {
        let records = sample_records();
        let mut buf = Vec::new();
        write_readings_csv(&records, &mut buf).unwrap();
        let back = parse_readings_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, records);
        assert_eq!(back[1].status[0], ChannelStatus::OutOfRange);
    }

    #[test]
    fn empty_rows_rejected() {
        let dir = std::env::temp_dir().join("diacell-empty.csv");
        assert!(emit_csv(&[], &dir).is_err());
    }
}
