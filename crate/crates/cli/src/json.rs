//! Pretty JSON with a fixed number of significant digits for every float.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

pub const DEFAULT_DIGITS: usize = 17;

struct FixedDigits<'a> {
    pretty: PrettyFormatter<'a>,
    digits: usize,
}

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if !v.is_finite() {
            return w.write_all(b"null");
        }
        let v = if v == 0.0 { 0.0 } else { v };
        write!(w, "{:.*e}", self.digits - 1, v)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

/// Serializes `value` with `digits` significant digits (1 to 17) and a
/// trailing newline. Negative zero is written as zero.
pub fn to_string<T: Serialize>(value: &T, digits: usize) -> String {
    let mut out = Vec::new();
    let fmt = FixedDigits { pretty: PrettyFormatter::new(), digits: digits.clamp(1, 17) };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_fixed_digits() {
        let s = to_string(&json!({ "a": [0.1, -0.0, 1.5e3, 2.5e-12], "n": 3 }), 17);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("0.0000000000000000e0"), "{s}");
        assert!(s.contains("1.5000000000000000e3"), "{s}");
        assert!(s.contains("2.4999999999999998e-12"), "{s}");
        assert!(s.contains("\"n\": 3"), "{s}");
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"][0].as_f64(), Some(0.1));
        assert_eq!(v["a"][3].as_f64(), Some(2.5e-12));
        assert!(to_string(&json!([1.0 / 3.0]), 4).contains("3.333e-1"));
    }
}
