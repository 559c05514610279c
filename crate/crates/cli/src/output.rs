//! Number formatting and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Number, Value};

use crate::error::CliError;

/// Significant digits of every printed number.
pub const SIGNIFICANT_DIGITS: i32 = 13;

/// Fixed notation with 13 significant digits for moderate magnitudes,
/// scientific otherwise. Deterministic for a given bit pattern.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..15).contains(&e) {
        let dec = (SIGNIFICANT_DIGITS - 1 - e) as usize;
        format!("{x:.dec$}")
    } else {
        let dec = (SIGNIFICANT_DIGITS - 1) as usize;
        format!("{x:.dec$e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// JSON number carrying exactly the digits of [`fmt_num`]; `null` if not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let s = fmt_num(x);
    Value::Number(
        s.parse::<Number>()
            .expect("formatted float is a JSON number"),
    )
}

pub fn num_opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serialising a JSON value");
    s.push('\n');
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirteen_digits() {
        assert_eq!(fmt_num(-1829.630750908), "-1829.630750908");
        assert_eq!(fmt_num(3.98e-8), "3.980000000000e-8");
        assert_eq!(fmt_num(137.0359895), "137.0359895000");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1e20), "1.000000000000e20");
    }

    #[test]
    fn significant_digit_count() {
        for x in [
            1.0 / 3.0,
            -2.0 / 7.0 * 1e5,
            1.234567e-3,
            9.87654321e12,
            6.02e23,
        ] {
            let s = fmt_num(x);
            let mantissa = s.split('e').next().unwrap();
            let digits = mantissa
                .chars()
                .filter(|c| c.is_ascii_digit())
                .collect::<String>();
            let sig = digits.trim_start_matches('0').len();
            assert!(sig >= 12, "{s}");
            assert!(
                (s.parse::<f64>().unwrap() - x).abs() <= 1e-12 * x.abs(),
                "{s}"
            );
        }
    }

    #[test]
    fn json_number_keeps_digits() {
        let v = serde_json::json!({ "x": num(-27.8081345918) });
        assert_eq!(v.to_string(), r#"{"x":-27.80813459180}"#);
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
