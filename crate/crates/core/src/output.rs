//! CSV and JSON writers. Floats are printed with 17 significant digits so every
//! value read back is bit-identical to the one written.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{MzkError, Result};

/// `x` with 17 significant digits; non-finite values become `NaN`, `inf`, `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn csv_error(e: csv::Error) -> MzkError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => MzkError::Io(e),
        other => MzkError::Format(format!("{other:?}")),
    }
}

/// Write a header and numeric rows.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(MzkError::Contract(format!(
                "row has {} values for {} columns",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.iter().map(|&x| fmt_f64(x))).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), header, rows)
}

/// A numeric table read back from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Table> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| {
                    MzkError::Format(format!("data row {}: '{f}' is not a number", line + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

pub fn read_csv_file(path: &Path) -> Result<Table> {
    read_csv(File::open(path)?)
}

/// JSON number with 17 significant digits (`null` when not finite).
pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    // Integers stay integers so counts and seeds print naturally.
    let text = fmt_f64(x);
    Value::Number(serde_json::from_str::<Number>(&text).expect("formatted float is valid JSON"))
}

/// Rewrite every non-integer number in `v` with [`json_f64`].
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            if s.contains(['.', 'e', 'E']) {
                json_f64(s.parse().unwrap_or(f64::NAN))
            } else {
                Value::Number(n)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

/// Serialise `x` to canonical pretty JSON.
pub fn to_json_string<T: Serialize + ?Sized>(x: &T) -> Result<String> {
    let v = serde_json::to_value(x).map_err(|e| MzkError::Format(e.to_string()))?;
    serde_json::to_string_pretty(&canonical(v)).map_err(|e| MzkError::Format(e.to_string()))
}

pub fn write_json_file<T: Serialize + ?Sized>(path: &Path, x: &T) -> Result<()> {
    let mut s = to_json_string(x)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv() {
        let rows = vec![vec![0.1, 1.0 / 3.0], vec![-2.5e-300, f64::MAX]];
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], rows.clone()).unwrap();
        let t = read_csv(buf.as_slice()).unwrap();
        assert_eq!(t.header, vec!["a", "b"]);
        assert_eq!(t.rows, rows);
        assert_eq!(t.column("b").unwrap(), vec![1.0 / 3.0, f64::MAX]);
    }

    #[test]
    fn json_numbers_have_seventeen_digits() {
        #[derive(Serialize)]
        struct S {
            x: f64,
            n: usize,
            bad: f64,
        }
        let s = to_json_string(&S { x: 0.1, n: 3, bad: f64::NAN }).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 3"), "{s}");
        assert!(s.contains("\"bad\": null"), "{s}");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn rejects_text_cells() {
        let e = read_csv("a,b\n1,x\n".as_bytes()).unwrap_err();
        assert!(matches!(e, MzkError::Format(_)));
    }
}
