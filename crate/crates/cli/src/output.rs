//! Table emission. Numbers are written with 12 significant digits so that
//! output bytes depend only on the computed values.

use serde::Serialize;

use crate::CliError;

/// `%.12g`-style rendering: shortest of fixed and exponent notation, no
/// trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// A CSV table built row by row.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).map_err(csv_error)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(csv_error)
    }

    pub fn finish(self) -> Result<Vec<u8>, CliError> {
        self.writer
            .into_inner()
            .map_err(|e| CliError::Io(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-5.0), "-5");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig(123456.789), "123456.789");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(9.9999999999996), "10");
        assert_eq!(fmt_sig(1e15), "1e15");
        assert_eq!(fmt_sig(0.0001), "0.0001");
    }

    #[test]
    fn csv_table() {
        let mut t = Table::new(&["a", "b"]).unwrap();
        t.row(["1", ""]).unwrap();
        assert_eq!(String::from_utf8(t.finish().unwrap()).unwrap(), "a,b\n1,\n");
    }
}
