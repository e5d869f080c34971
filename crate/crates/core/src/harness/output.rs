//! Output formats: JSON with 17-significant-digit floats, the result CSV and
//! the binary path-record stream.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::Result;

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no representation for these
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serialises `value` as compact JSON with every float at 17 digits.
pub fn write_json_17<W: Write, T: Serialize>(writer: W, value: &T) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, Digits17);
    value.serialize(&mut ser)?;
    Ok(())
}

pub fn to_json_17<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json_17(&mut buf, value)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub const CSV_HEADER: &str = "t,x,u_spectral,u_subordination,u_mc,mc_se,trunc_bound";

/// One output line of `solve`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub t: f64,
    pub x: Vec<f64>,
    pub u_spectral: f64,
    pub u_subordination: f64,
    pub u_mc: f64,
    pub mc_se: f64,
    pub trunc_bound: f64,
}

impl ResultRow {
    /// CSV line; coordinates of multi-dimensional points are space separated.
    pub fn to_csv(&self) -> String {
        let x: Vec<String> = self.x.iter().map(|v| fmt17(*v)).collect();
        format!(
            "{},{},{},{},{},{},{}",
            fmt17(self.t),
            x.join(" "),
            fmt17(self.u_spectral),
            fmt17(self.u_subordination),
            fmt17(self.u_mc),
            fmt17(self.mc_se),
            fmt17(self.trunc_bound)
        )
    }
}

pub fn write_csv<W: Write>(mut w: W, rows: &[ResultRow]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.to_csv())?;
    }
    Ok(())
}

/// Size of one binary path record.
pub const RECORD_BYTES: usize = 17;

/// Little-endian record: stream id (u64), killed flag (u8), score (f64).
pub fn encode_record(stream_id: u64, killed: bool, score: f64) -> [u8; RECORD_BYTES] {
    let mut out = [0u8; RECORD_BYTES];
    out[..8].copy_from_slice(&stream_id.to_le_bytes());
    out[8] = killed as u8;
    out[9..].copy_from_slice(&score.to_le_bytes());
    out
}

pub fn decode_record(bytes: &[u8; RECORD_BYTES]) -> (u64, bool, f64) {
    let id = u64::from_le_bytes(bytes[..8].try_into().unwrap());
    let score = f64::from_le_bytes(bytes[9..].try_into().unwrap());
    (id, bytes[8] != 0, score)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json_17(&vec![0.1, 1.0 / 3.0, -2.5e-300]).unwrap();
        assert_eq!(
            s,
            "[1.0000000000000001e-1,3.3333333333333331e-1,-2.5000000000000000e-300]"
        );
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, 1.0 / 3.0, -2.5e-300]);
    }

    #[test]
    fn csv_row_layout() {
        let r = ResultRow {
            t: 0.5,
            x: vec![1.0, 2.0],
            u_spectral: 0.25,
            u_subordination: 0.25,
            u_mc: 0.2,
            mc_se: 0.01,
            trunc_bound: 0.0,
        };
        let line = r.to_csv();
        assert_eq!(line.split(',').count(), 7);
        assert!(line.starts_with("5.0000000000000000e-1,1.0000000000000000e0 2.0000000000000000e0,"));
    }

    #[test]
    fn record_round_trip() {
        let b = encode_record(42, true, -0.75);
        assert_eq!(decode_record(&b), (42, true, -0.75));
    }
}
