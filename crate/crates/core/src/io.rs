//! JSON file formats for configurations and certification reports.
//!
//! A configuration file looks like
//!
//! ```json
//! {"d": 3, "points": [{"rank": 1, "frame": [[1, 0, 0]], "weight": 0.5}], "meta": {}}
//! ```
//!
//! where `frame` lists column vectors (orthonormalized on load) and the
//! alternative `matrix` lists the rows of the full projector (validated on
//! load). Writers always emit `matrix`, so that reloading reproduces the
//! points bit for bit. Floats are written with 17 significant digits.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{projector_from_columns, Projector};
use crate::potential::{CertificationReport, Configuration};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointEntry {
    rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    d: usize,
    points: Vec<PointEntry>,
    #[serde(default)]
    meta: Map<String, Value>,
}

/// Configuration together with the free-form `meta` object of its file.
#[derive(Clone, Debug)]
pub struct LoadedConfiguration {
    pub config: Configuration,
    pub meta: Map<String, Value>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// JSON value of a configuration; `meta` defaults to an empty object.
pub fn config_to_json(config: &Configuration, meta: Option<Map<String, Value>>) -> Value {
    let file = ConfigFile {
        d: config.d(),
        points: config
            .points()
            .iter()
            .zip(config.weights())
            .map(|(p, &w)| PointEntry {
                rank: p.rank(),
                frame: None,
                matrix: Some(rows(p.matrix())),
                weight: w,
            })
            .collect(),
        meta: meta.unwrap_or_default(),
    };
    serde_json::to_value(file).expect("configuration serializes")
}

pub fn report_to_json(report: &CertificationReport) -> Value {
    serde_json::to_value(report).expect("report serializes")
}

fn load_point(d: usize, index: usize, entry: PointEntry) -> Result<Projector> {
    let fail = |msg: String| Error::Input(format!("points[{index}]: {msg}"));
    let p = match (entry.frame, entry.matrix) {
        (Some(frame), None) => {
            if frame.len() != entry.rank {
                return Err(fail(format!(
                    "frame has {} columns but rank is {}",
                    frame.len(),
                    entry.rank
                )));
            }
            let columns: Vec<DVector<f64>> = frame.into_iter().map(DVector::from_vec).collect();
            projector_from_columns(d, &columns).map_err(|e| fail(e.to_string()))?
        }
        (None, Some(matrix)) => {
            if matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
                return Err(fail(format!("matrix is not {d}×{d}")));
            }
            let m = DMatrix::from_fn(d, d, |i, j| matrix[i][j]);
            let p = Projector::from_matrix(m).map_err(|e| fail(e.to_string()))?;
            if p.rank() != entry.rank {
                return Err(fail(format!(
                    "matrix has trace rank {} but rank is {}",
                    p.rank(),
                    entry.rank
                )));
            }
            p
        }
        (Some(_), Some(_)) => return Err(fail("give either \"frame\" or \"matrix\", not both".into())),
        (None, None) => return Err(fail("missing \"frame\" or \"matrix\"".into())),
    };
    if !entry.weight.is_finite() {
        return Err(fail(format!("weight {} is not finite", entry.weight)));
    }
    Ok(p)
}

/// Parses and validates a configuration file. Syntax and schema errors
/// carry the line and column reported by the parser.
pub fn parse_configuration(text: &str) -> Result<LoadedConfiguration> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
    if file.d < 2 {
        return Err(Error::Input(format!("d = {} but at least 2 is required", file.d)));
    }
    if file.points.is_empty() {
        return Err(Error::Input("\"points\" is empty".into()));
    }
    let d = file.d;
    let mut points = Vec::with_capacity(file.points.len());
    let mut weights = Vec::with_capacity(file.points.len());
    for (i, entry) in file.points.into_iter().enumerate() {
        weights.push(entry.weight);
        points.push(load_point(d, i, entry)?);
    }
    let config = Configuration::new(points, weights).map_err(|e| Error::Input(e.to_string()))?;
    Ok(LoadedConfiguration {
        config,
        meta: file.meta,
    })
}

/// Pretty printer that writes every float with 17 significant digits.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl FullPrecision<'_> {
    fn write_float<W: ?Sized + Write>(writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return writer.write_all(b"null");
        }
        if value == 0.0 {
            return writer.write_all(if value.is_sign_negative() { b"-0.0" } else { b"0.0" });
        }
        write!(writer, "{value:.16e}")
    }
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        Self::write_float(writer, value)
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        Self::write_float(writer, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17 significant digits per float.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}
