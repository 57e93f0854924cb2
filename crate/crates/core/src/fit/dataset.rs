use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assumed line uncertainty when a row leaves sigma empty, GHz.
pub const DEFAULT_SIGMA_GHZ: f64 = 2e-3;

/// Which line a spectroscopy point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionLabel {
    /// "ij": f_j - f_i
    Direct { i: usize, j: usize },
    /// "sideband_ij_red": f_ij - f_readout
    RedSideband { i: usize, j: usize },
}

impl TransitionLabel {
    pub fn levels(self) -> (usize, usize) {
        match self {
            TransitionLabel::Direct { i, j } | TransitionLabel::RedSideband { i, j } => (i, j),
        }
    }

    /// Levels the spectrum must retain to evaluate this label.
    pub fn levels_needed(self) -> usize {
        self.levels().1 + 1
    }
}

fn parse_pair(s: &str) -> Option<(usize, usize)> {
    let b = s.as_bytes();
    if b.len() != 2 || !b.iter().all(u8::is_ascii_digit) {
        return None;
    }
    let (i, j) = ((b[0] - b'0') as usize, (b[1] - b'0') as usize);
    (i < j).then_some((i, j))
}

impl FromStr for TransitionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownLabel(s.to_string());
        if let Some(rest) = s.strip_prefix("sideband_") {
            let pair = rest.strip_suffix("_red").ok_or_else(unknown)?;
            let (i, j) = parse_pair(pair).ok_or_else(unknown)?;
            return Ok(TransitionLabel::RedSideband { i, j });
        }
        let (i, j) = parse_pair(s).ok_or_else(unknown)?;
        Ok(TransitionLabel::Direct { i, j })
    }
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TransitionLabel::Direct { i, j } => write!(f, "{i}{j}"),
            TransitionLabel::RedSideband { i, j } => write!(f, "sideband_{i}{j}_red"),
        }
    }
}

impl Serialize for TransitionLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TransitionLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    /// Coil bias in arbitrary units.
    pub bias: f64,
    #[serde(rename = "freq_GHz")]
    pub freq: f64,
    pub label: TransitionLabel,
    #[serde(rename = "sigma_GHz")]
    pub sigma: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectroscopyDataset {
    pub points: Vec<DataPoint>,
}

#[derive(Deserialize)]
struct CsvRow {
    bias: f64,
    #[serde(rename = "freq_GHz")]
    freq: f64,
    label: String,
    #[serde(rename = "sigma_GHz", default)]
    sigma: Option<f64>,
}

impl SpectroscopyDataset {
    /// Checks that a fit is at least posed: six points, positive finite sigmas.
    /// Whether the labels constrain every parameter is left to the Jacobian.
    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 6 {
            return Err(Error::invalid(format!(
                "dataset has {} points; at least 6 are needed",
                self.points.len()
            )));
        }
        for (k, p) in self.points.iter().enumerate() {
            if !(p.sigma > 0.0 && p.sigma.is_finite()) {
                return Err(Error::invalid(format!(
                    "point {k}: sigma must be positive, got {}",
                    p.sigma
                )));
            }
            if !p.bias.is_finite() || !p.freq.is_finite() {
                return Err(Error::invalid(format!("point {k}: non-finite bias or frequency")));
            }
        }
        Ok(())
    }

    pub fn distinct_labels(&self) -> usize {
        let mut labels: Vec<String> = self.points.iter().map(|p| p.label.to_string()).collect();
        labels.sort();
        labels.dedup();
        labels.len()
    }

    /// Reads `bias,freq_GHz,label,sigma_GHz`; an empty or missing sigma
    /// falls back to [`DEFAULT_SIGMA_GHZ`].
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut points = Vec::new();
        for row in rdr.deserialize() {
            let row: CsvRow = row?;
            points.push(DataPoint {
                bias: row.bias,
                freq: row.freq,
                label: row.label.parse()?,
                sigma: row.sigma.unwrap_or(DEFAULT_SIGMA_GHZ),
            });
        }
        Ok(SpectroscopyDataset { points })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bias", "freq_GHz", "label", "sigma_GHz"])?;
        for p in &self.points {
            w.write_record([
                crate::format::sig(p.bias),
                crate::format::sig(p.freq),
                p.label.to_string(),
                crate::format::sig(p.sigma),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for s in ["01", "12", "02", "sideband_04_red", "sideband_13_red"] {
            let l: TransitionLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        assert_eq!("sideband_04_red".parse::<TransitionLabel>().unwrap().levels_needed(), 5);
        for bad in ["10", "1", "ab", "sideband_04", "sideband_04_blue", "011"] {
            assert!(
                matches!(bad.parse::<TransitionLabel>(), Err(Error::UnknownLabel(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn csv_round_trip_with_default_sigma() {
        let text = "bias,freq_GHz,label,sigma_GHz\n0.1,0.8,01,\n0.2,3.1,12,0.001\n";
        let d = SpectroscopyDataset::read_csv(text.as_bytes()).unwrap();
        assert_eq!(d.points[0].sigma, DEFAULT_SIGMA_GHZ);
        assert_eq!(d.points[1].sigma, 0.001);
        let mut out = Vec::new();
        d.write_csv(&mut out).unwrap();
        let again = SpectroscopyDataset::read_csv(out.as_slice()).unwrap();
        assert_eq!(d, again);
        assert_eq!(d.distinct_labels(), 2);
    }

    #[test]
    fn small_or_bad_datasets_rejected() {
        let p = DataPoint {
            bias: 0.0,
            freq: 1.0,
            label: TransitionLabel::Direct { i: 0, j: 1 },
            sigma: 1e-3,
        };
        assert!(SpectroscopyDataset { points: vec![p; 5] }.validate().is_err());
        let mut points = vec![p; 6];
        assert!(SpectroscopyDataset { points: points.clone() }.validate().is_ok());
        points[3].sigma = 0.0;
        assert!(SpectroscopyDataset { points }.validate().is_err());
        let bad = "bias,freq_GHz,label,sigma_GHz\n0.1,0.8,31,\n";
        assert!(SpectroscopyDataset::read_csv(bad.as_bytes()).is_err());
    }
}
