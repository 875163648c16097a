//! Fixed-format CSV emission shared by the CLI and the acceptance tests.

use std::io::{self, Write};

/// Significant digits written for every float.
pub const CSV_DIGITS: usize = 15;

/// `%.15g`-style rendering: fixed notation for decimal exponents in
/// `[-5, 15)`, scientific otherwise, trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", CSV_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..CSV_DIGITS as i32).contains(&exp) {
        let decimals = (CSV_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Writes a header row and one row per record, `\n`-terminated.
pub struct CsvWriter<W: Write> {
    inner: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut inner: W, header: &[&str]) -> io::Result<Self> {
        writeln!(inner, "{}", header.join(","))?;
        Ok(Self { inner, columns: header.len() })
    }

    pub fn row(&mut self, fields: &[Field]) -> io::Result<()> {
        assert_eq!(fields.len(), self.columns, "row width differs from header");
        let line: Vec<String> = fields.iter().map(Field::render).collect();
        writeln!(self.inner, "{}", line.join(","))
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Float(f64),
    Int(i64),
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Float(x) => format_float(*x),
            Field::Int(i) => i.to_string(),
        }
    }
}

/// Evenly spaced grid `start..=end` with `steps` points; one point gives
/// `start`, zero points give an empty grid.
pub fn linear_grid(start: f64, end: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (end - start) / (steps - 1) as f64;
            (0..steps).map(|i| if i + 1 == steps { end } else { start + h * i as f64 }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering() {
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(format_float(1e-7), "1e-07");
        assert_eq!(format_float(-2.5e20), "-2.5e+20");
        assert_eq!(format_float(123456.0), "123456");
        assert_eq!(format_float(1e15), "1e+15");
        assert_eq!(format_float(0.0001), "0.0001");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333333");
    }

    #[test]
    fn round_trip_precision() {
        for &x in &[0.1234567890123456, -7.654321e-3, 42.0, 9.99999999999999e-6] {
            let back: f64 = format_float(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-14);
        }
    }

    #[test]
    fn csv_layout() {
        let mut w = CsvWriter::new(Vec::new(), &["t", "site", "v"]).unwrap();
        w.row(&[Field::Float(0.5), Field::Int(3), Field::Float(1.0)]).unwrap();
        let bytes = w.finish().unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "t,site,v\n0.5,3,1\n");
    }

    #[test]
    fn grids() {
        assert!(linear_grid(0.0, 1.0, 0).is_empty());
        assert_eq!(linear_grid(2.0, 5.0, 1), vec![2.0]);
        let g = linear_grid(0.0, 1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
