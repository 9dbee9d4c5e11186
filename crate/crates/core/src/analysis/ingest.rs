use std::fs::File;
use std::io::Read;
use std::path::Path;

use csv::{ReaderBuilder, Trim};

use super::TimeSeries;
use crate::error::{Error, Result};

/// Relative spread of sample spacings below which timestamps count as uniform.
const UNIFORM_TOLERANCE: f64 = 1e-6;
const MAX_RESAMPLED_LEN: usize = 50_000_000;

/// Which two columns to read and the factors converting them to SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub x_column: String,
    pub y_column: String,
    pub x_scale: f64,
    pub y_scale: f64,
}

impl CsvSchema {
    pub fn new(x_column: &str, y_column: &str) -> Self {
        CsvSchema {
            x_column: x_column.to_string(),
            y_column: y_column.to_string(),
            x_scale: 1.0,
            y_scale: 1.0,
        }
    }

    pub fn with_scales(mut self, x_scale: f64, y_scale: f64) -> Self {
        self.x_scale = x_scale;
        self.y_scale = y_scale;
        self
    }
}

/// Two numeric columns in file order, already scaled.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedSeries {
    pub series: TimeSeries,
    /// Set when the timestamps were not uniform and the values were
    /// linearly interpolated onto a uniform grid.
    pub resampled: bool,
}

/// Reads `schema`'s columns from a headed CSV file.
pub fn ingest_csv(path: &Path, schema: &CsvSchema) -> Result<Table> {
    let file = File::open(path)
        .map_err(|e| Error::IngestFile(format!("cannot open {}: {e}", path.display())))?;
    parse_csv(file, schema)
}

/// Like [`ingest_csv`] on any reader. Errors name the 1-based line of the
/// file (the header is line 1) and the offending column.
pub fn parse_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<Table> {
    let mut rdr = ReaderBuilder::new()
        .trim(Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::IngestFile(format!("unreadable header: {e}")))?
        .clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(Error::IngestFile("file is empty".into()));
    }
    let index_of = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Ingest {
            row: 1,
            column: name.to_string(),
            message: "column not found in header".into(),
        })
    };
    let xi = index_of(&schema.x_column)?;
    let yi = index_of(&schema.y_column)?;

    let mut table = Table {
        x: Vec::new(),
        y: Vec::new(),
    };
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Ingest {
            row: e.position().map_or(0, |p| p.line()),
            column: String::new(),
            message: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line());
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let cell = |idx: usize, name: &str, scale: f64| -> Result<f64> {
            let raw = record.get(idx).unwrap_or("");
            let v: f64 = raw.parse().map_err(|_| Error::Ingest {
                row,
                column: name.to_string(),
                message: format!("'{raw}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Ingest {
                    row,
                    column: name.to_string(),
                    message: format!("'{raw}' is not finite"),
                });
            }
            Ok(v * scale)
        };
        table.x.push(cell(xi, &schema.x_column, schema.x_scale)?);
        table.y.push(cell(yi, &schema.y_column, schema.y_scale)?);
    }
    if table.x.is_empty() {
        return Err(Error::IngestFile("file has a header but no data rows".into()));
    }
    Ok(table)
}

impl Table {
    /// Treats `x` as timestamps. Uniform stamps keep their samples; otherwise
    /// the values are interpolated onto a grid at the smallest spacing.
    pub fn to_time_series(&self) -> Result<IngestedSeries> {
        let t = &self.x;
        let n = t.len();
        if n < 2 {
            return Err(Error::IngestFile(
                "a time series needs at least two samples".into(),
            ));
        }
        let mut min_dt = f64::INFINITY;
        let mut max_dt = 0.0f64;
        for (i, w) in t.windows(2).enumerate() {
            let d = w[1] - w[0];
            if !(d > 0.0) {
                return Err(Error::Ingest {
                    row: i as u64 + 3,
                    column: "time".into(),
                    message: format!("timestamps must increase strictly ({} then {})", w[0], w[1]),
                });
            }
            min_dt = min_dt.min(d);
            max_dt = max_dt.max(d);
        }
        let span = t[n - 1] - t[0];
        let mean_dt = span / (n - 1) as f64;
        if max_dt - min_dt <= UNIFORM_TOLERANCE * mean_dt {
            return Ok(IngestedSeries {
                series: TimeSeries::new(t[0], mean_dt, self.y.clone())?,
                resampled: false,
            });
        }
        let len = (span / min_dt + 1e-9).floor() as usize + 1;
        if len > MAX_RESAMPLED_LEN {
            return Err(Error::IngestFile(format!(
                "resampling at {min_dt} s would need {len} samples"
            )));
        }
        let mut values = Vec::with_capacity(len);
        let mut j = 0;
        for i in 0..len {
            let ti = t[0] + i as f64 * min_dt;
            while j + 2 < n && t[j + 1] <= ti {
                j += 1;
            }
            let frac = ((ti - t[j]) / (t[j + 1] - t[j])).clamp(0.0, 1.0);
            values.push(self.y[j] + frac * (self.y[j + 1] - self.y[j]));
        }
        Ok(IngestedSeries {
            series: TimeSeries::new(t[0], min_dt, values)?,
            resampled: true,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn schema() -> CsvSchema {
        CsvSchema::new("t", "y")
    }

    #[test]
    fn uniform_file_keeps_dt() {
        let data = "t,y\n0,1\n0.001,2\n0.002,3\n0.003,4\n";
        let s = parse_csv(data.as_bytes(), &schema()).unwrap().to_time_series().unwrap();
        assert!(!s.resampled);
        assert!((s.series.dt - 0.001).abs() < 1e-15);
        assert_eq!(s.series.values, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn non_numeric_cell_names_line() {
        let data = "t,y\n0,0\n1,1\n2,2\n3,3\n4,4\n5,oops\n6,6\n";
        match parse_csv(data.as_bytes(), &schema()) {
            Err(Error::Ingest { row, column, .. }) => {
                assert_eq!(row, 7);
                assert_eq!(column, "y");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_and_empty_file() {
        assert!(matches!(
            parse_csv("t,z\n0,1\n".as_bytes(), &schema()),
            Err(Error::Ingest { row: 1, .. })
        ));
        assert!(matches!(parse_csv("".as_bytes(), &schema()), Err(Error::IngestFile(_))));
        assert!(matches!(parse_csv("t,y\n".as_bytes(), &schema()), Err(Error::IngestFile(_))));
        assert!(matches!(
            parse_csv("t,y\n0,1\n1\n".as_bytes(), &schema()),
            Err(Error::Ingest { row: 3, .. })
        ));
    }

    #[test]
    fn scales_and_column_order() {
        let data = "force,ext\n10,5\n20,10\n";
        let t = parse_csv(data.as_bytes(), &CsvSchema::new("ext", "force").with_scales(1e-3, 1.0)).unwrap();
        assert_eq!(t.x, vec![0.005, 0.01]);
        assert_eq!(t.y, vec![10.0, 20.0]);
    }

    #[test]
    fn non_uniform_stamps_are_resampled() {
        let t = [0.0, 0.01, 0.03, 0.04, 0.07, 0.08];
        let f = |x: f64| 3.0 * x + 1.0;
        let table = Table {
            x: t.to_vec(),
            y: t.iter().map(|&v| f(v)).collect(),
        };
        let s = table.to_time_series().unwrap();
        assert!(s.resampled);
        assert_eq!(s.series.len(), 9);
        for (i, v) in s.series.values.iter().enumerate() {
            assert!((v - f(s.series.time(i))).abs() < 1e-12);
        }
        for &ti in &t {
            let i = (ti / s.series.dt).round() as usize;
            assert!((s.series.values[i] - f(ti)).abs() < 1e-12);
        }
    }

    #[test]
    fn decreasing_time_rejected() {
        let table = Table {
            x: vec![0.0, 0.2, 0.1],
            y: vec![0.0; 3],
        };
        assert!(matches!(table.to_time_series(), Err(Error::Ingest { row: 4, .. })));
    }

    #[test]
    fn reads_from_disk() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "t,y\n0,1\n1,2").unwrap();
        let t = ingest_csv(f.path(), &schema()).unwrap();
        assert_eq!(t.y, vec![1.0, 2.0]);
        assert!(matches!(
            ingest_csv(Path::new("/nonexistent/file.csv"), &schema()),
            Err(Error::IngestFile(_))
        ));
    }
}
