//! Result rows and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::ErrorKind;

pub const CSV_HEADER: [&str; 9] = [
    "n",
    "error_kind",
    "round",
    "input_fidelity",
    "output_fidelity",
    "success_probability",
    "shots",
    "seed",
    "wall_time_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub error_kind: ErrorKind,
    pub round: usize,
    pub input_fidelity: f64,
    pub output_fidelity: f64,
    pub success_probability: f64,
    pub shots: u64,
    pub seed: u64,
    pub wall_time_ms: f64,
}

impl ResultRow {
    pub fn validate(&self, max_rounds: usize) -> Result<()> {
        let unit = 0.0..=1.0;
        if !unit.contains(&self.output_fidelity) || !unit.contains(&self.success_probability) {
            return Err(Error::VerificationFailed(format!("row out of range: {self:?}")));
        }
        if self.round < 1 || self.round > max_rounds {
            return Err(Error::VerificationFailed(format!(
                "round {} outside 1..={max_rounds}",
                self.round
            )));
        }
        Ok(())
    }
}

/// `x` with 12 significant digits in plain decimal notation.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in rows {
        out.write_record([
            r.n.to_string(),
            r.error_kind.to_string(),
            r.round.to_string(),
            format_float(r.input_fidelity),
            format_float(r.output_fidelity),
            format_float(r.success_probability),
            r.shots.to_string(),
            r.seed.to_string(),
            format_float(r.wall_time_ms),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidConfig(format!("unexpected CSV header {header:?}")));
    }
    reader
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(16.0 / 17.0), "0.941176470588");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.68), "0.68");
        assert_eq!(format_float(256.0 / 257.0), "0.996108949416");
        assert_eq!(format_float(1234.5), "1234.5");
        assert_eq!(format_float(0.0), "0");
    }

    #[test]
    fn header_and_reparse() {
        let row = ResultRow {
            n: 2,
            error_kind: ErrorKind::LogicPhaseFlip,
            round: 1,
            input_fidelity: 0.8,
            output_fidelity: 16.0 / 17.0,
            success_probability: 0.68,
            shots: 0,
            seed: 7,
            wall_time_ms: 0.0,
        };
        let s = to_csv_string(std::slice::from_ref(&row)).unwrap();
        assert!(s.starts_with("n,error_kind,round,input_fidelity,output_fidelity,success_probability,shots,seed,wall_time_ms\n"));
        let back = read_csv(s.as_bytes()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].error_kind, ErrorKind::LogicPhaseFlip);
        assert!((back[0].output_fidelity - row.output_fidelity).abs() < 1e-12);
        back[0].validate(1).unwrap();
    }

    #[test]
    fn row_validation() {
        let mut row = ResultRow {
            n: 2,
            error_kind: ErrorKind::LogicBitFlip,
            round: 2,
            input_fidelity: 0.8,
            output_fidelity: 0.9,
            success_probability: 0.7,
            shots: 0,
            seed: 0,
            wall_time_ms: 0.0,
        };
        assert!(row.validate(1).is_err());
        row.round = 1;
        row.success_probability = 1.5;
        assert!(row.validate(1).is_err());
    }
}
