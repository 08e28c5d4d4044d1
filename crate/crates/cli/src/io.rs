//! Matrix files and JSON output.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use spdfix::RealMatrix;

/// `{"n": 3, "data": [[...], ...], "use_j": false, "use_delta": false}`,
/// row-major. Point files carry only `n` and `data`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub data: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_j: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_delta: Option<bool>,
}

/// Anything that makes an input unusable; maps to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<spdfix::Error> for InputError {
    fn from(e: spdfix::Error) -> Self {
        InputError(e.to_string())
    }
}

impl MatrixFile {
    pub fn from_matrix(m: &RealMatrix) -> Self {
        Self { n: m.nrows(), data: rows(m), use_j: None, use_delta: None }
    }

    pub fn parse(text: &str) -> Result<Self, InputError> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| InputError(format!("parse error: {e}")))?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    fn validate(&self) -> Result<(), InputError> {
        if self.n < 2 {
            return Err(InputError(format!("n must be at least 2, got {}", self.n)));
        }
        if self.data.len() != self.n {
            return Err(InputError(format!("expected {} rows, got {}", self.n, self.data.len())));
        }
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.n {
                return Err(InputError(format!("row {i} has {} entries, expected {}", row.len(), self.n)));
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> RealMatrix {
        RealMatrix::from_fn(self.n, self.n, |i, j| self.data[i][j])
    }
}

pub fn rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Pretty JSON with inline arrays and every float written with 17
/// significant digits.
#[derive(Default)]
struct ReportFormatter {
    indent: usize,
    has_value: bool,
}

impl ReportFormatter {
    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// 17 significant digits, e.g. `1.0000000000000000e0`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ReportFormatter::default());
    value.serialize(&mut ser).expect("report types serialize");
    let mut s = String::from_utf8(out).expect("serde_json writes UTF-8");
    s.push('\n');
    s
}
