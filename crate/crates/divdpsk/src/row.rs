//! One output record per evaluated point, with its CSV and JSON forms.
//!
//! Real-valued columns are written in scientific notation with ten
//! significant digits; empty cells mean "not requested".

use std::io::{Read, Write};

use divdpsk_core::Detector;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const HEADER: [&str; 11] =
    ["gamma_b_db", "eta", "rho", "L", "detector", "exact_bep", "bound", "mc_p_hat", "mc_ci", "trials", "seed"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Total SNR per bit in dB.
    pub gamma_b_db: Option<f64>,
    /// Fraction of the bit energy on branch 1.
    pub eta: Option<f64>,
    /// Common branch correlation; empty when branches differ.
    pub rho: Option<f64>,
    #[serde(rename = "L")]
    pub order: usize,
    #[serde(with = "detector_name")]
    pub detector: Detector,
    pub exact_bep: Option<f64>,
    pub bound: Option<f64>,
    pub mc_p_hat: Option<f64>,
    pub mc_ci: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

mod detector_name {
    use divdpsk_core::Detector;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Detector, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(d.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Detector, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl ResultRow {
    pub fn new(order: usize, detector: Detector) -> Self {
        Self {
            gamma_b_db: None,
            eta: None,
            rho: None,
            order,
            detector,
            exact_bep: None,
            bound: None,
            mc_p_hat: None,
            mc_ci: None,
            trials: None,
            seed: None,
        }
    }

    pub fn to_record(&self) -> [String; 11] {
        [
            real(self.gamma_b_db),
            real(self.eta),
            real(self.rho),
            self.order.to_string(),
            self.detector.name().to_string(),
            real(self.exact_bep),
            real(self.bound),
            real(self.mc_p_hat),
            real(self.mc_ci),
            int(self.trials),
            int(self.seed),
        ]
    }

    pub fn from_record(fields: &[&str]) -> Result<Self, CliError> {
        if fields.len() != HEADER.len() {
            return Err(CliError::Parse(format!("expected {} fields, found {}", HEADER.len(), fields.len())));
        }
        let row = Self {
            gamma_b_db: parse_opt(fields[0], "gamma_b_db")?,
            eta: parse_opt(fields[1], "eta")?,
            rho: parse_opt(fields[2], "rho")?,
            order: parse(fields[3], "L")?,
            detector: fields[4].parse()?,
            exact_bep: parse_opt(fields[5], "exact_bep")?,
            bound: parse_opt(fields[6], "bound")?,
            mc_p_hat: parse_opt(fields[7], "mc_p_hat")?,
            mc_ci: parse_opt(fields[8], "mc_ci")?,
            trials: parse_opt(fields[9], "trials")?,
            seed: parse_opt(fields[10], "seed")?,
        };
        row.check()?;
        Ok(row)
    }

    /// Every probability column present lies in [0, 1].
    pub fn check(&self) -> Result<(), CliError> {
        let probabilities =
            [("exact_bep", self.exact_bep), ("bound", self.bound), ("mc_p_hat", self.mc_p_hat), ("mc_ci", self.mc_ci)];
        for (name, value) in probabilities {
            if let Some(v) = value {
                if !(0.0..=1.0).contains(&v) {
                    return Err(CliError::Parse(format!("{name} = {v} is not a probability")));
                }
            }
        }
        Ok(())
    }
}

/// Scientific notation, ten significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.9e}")
}

fn real(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

fn int(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn parse<T: std::str::FromStr>(s: &str, column: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| CliError::Parse(format!("column {column}: cannot parse {s:?}")))
}

fn parse_opt<T: std::str::FromStr>(s: &str, column: &str) -> Result<Option<T>, CliError> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse(s, column).map(Some)
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| CliError::Parse(e.to_string()))?;
    if header.iter().ne(HEADER) {
        return Err(CliError::Parse(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| CliError::Parse(e.to_string()))?;
            ResultRow::from_record(&rec.iter().collect::<Vec<_>>())
        })
        .collect()
}

/// A single row as one JSON object, several as an array.
pub fn write_json<W: Write>(rows: &[ResultRow], mut out: W) -> Result<(), CliError> {
    match rows {
        [row] => serde_json::to_writer_pretty(&mut out, row)?,
        _ => serde_json::to_writer_pretty(&mut out, rows)?,
    }
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultRow {
        ResultRow {
            gamma_b_db: Some(15.0),
            eta: Some(0.1),
            rho: Some(0.975),
            exact_bep: Some(0.010653031),
            bound: Some(0.0213),
            ..ResultRow::new(2, Detector::Optimum)
        }
    }

    #[test]
    fn record_layout() {
        let rec = sample().to_record();
        assert_eq!(rec[0], "1.500000000e1");
        assert_eq!(rec[3], "2");
        assert_eq!(rec[4], "optimum");
        assert_eq!(rec[5], "1.065303100e-2");
        assert_eq!(rec[7], "");
    }

    #[test]
    fn rejects_bad_probability() {
        let mut rec: Vec<String> = sample().to_record().into();
        rec[6] = "1.5".into();
        let fields: Vec<&str> = rec.iter().map(String::as_str).collect();
        assert!(ResultRow::from_record(&fields).is_err());
    }

    #[test]
    fn json_single_object() {
        let mut buf = Vec::new();
        write_json(&[sample()], &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["detector"], "optimum");
        assert_eq!(v["L"], 2);
        assert!(v["mc_p_hat"].is_null());
        let back: ResultRow = serde_json::from_value(v).unwrap();
        assert_eq!(back, sample());
    }
}
