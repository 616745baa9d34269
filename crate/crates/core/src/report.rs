//! Deterministic JSON rendering for reports.
//!
//! Identical inputs must produce byte-identical files, so floats are printed
//! with a fixed 17-significant-digit scientific format instead of the default
//! shortest-roundtrip form. Every report carries `"schema": 1`.

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use std::io;

/// Version tag embedded in every report file.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Default)]
struct FixedFloatFormatter;

impl Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        // 17 significant digits round-trip every finite f64.
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Pretty JSON with pinned float formatting and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::with_capacity(256);
    let mut ser = Serializer::with_formatter(&mut out, FixedFloatFormatter);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Renders characteristic-function samples as `x,chi` CSV.
pub fn char_fn_csv(samples: &[(f64, u8)]) -> String {
    let mut out = String::with_capacity(samples.len() * 28 + 8);
    out.push_str("x,chi\n");
    for (x, chi) in samples {
        out.push_str(&format!("{x:.16e},{chi}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn float_format_is_fixed_width() {
        let s = to_json_string(&json!({"a": 0.5, "b": 1.0 / 3.0})).unwrap();
        assert!(s.contains("5.0000000000000000e-1"));
        assert!(s.contains("3.3333333333333331e-1"));
        assert!(s.ends_with('\n'));
    }

    #[test]
    fn identical_values_render_identically() {
        let v = json!({"xs": [0.1, 0.2, 0.30000000000000004], "n": 3});
        assert_eq!(to_json_string(&v).unwrap(), to_json_string(&v).unwrap());
    }

    #[test]
    fn csv_header_and_rows() {
        let csv = char_fn_csv(&[(-0.5, 0), (0.0, 1)]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,chi"));
        assert_eq!(lines.next(), Some("-5.0000000000000000e-1,0"));
    }
}
