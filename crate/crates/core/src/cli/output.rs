use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Where a subcommand's results go: files under `--out`, or the primary
/// table on stdout when no directory is given.
pub struct Emitter<'a> {
    pub out_dir: Option<PathBuf>,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    pub color: bool,
}

impl Emitter<'_> {
    pub fn file(&mut self, name: &str, contents: &str) -> Result<()> {
        let Some(dir) = &self.out_dir else {
            return Ok(());
        };
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
        let _ = writeln!(self.stderr, "wrote {}", path.display());
        Ok(())
    }

    pub fn json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<String> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::Io(format!("cannot serialise {name}: {e}")))?;
        text.push('\n');
        self.file(name, &text)?;
        Ok(text)
    }

    pub fn primary(&mut self, text: &str) -> Result<()> {
        if self.out_dir.is_none() {
            self.stdout.write_all(text.as_bytes())?;
        }
        Ok(())
    }

    /// Wraps `text` in an ANSI SGR sequence when colour is enabled.
    pub fn paint(&self, text: &str, sgr: &str) -> String {
        paint(self.color, text, sgr)
    }
}

pub fn paint(color: bool, text: &str, sgr: &str) -> String {
    if color {
        format!("\x1b[{sgr}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

/// CSV with a header row and every value in shortest round-trip form.
pub fn csv_table(header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub struct Curve {
    pub file: String,
    pub x: usize,
    pub y: usize,
    pub title: String,
}

/// Gnuplot script drawing `curves` into `<stem>.png`.
pub fn gnuplot(stem: &str, title: &str, xlabel: &str, ylabel: &str, curves: &[Curve]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output '{stem}.png'");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set title '{title}'");
    let _ = writeln!(s, "set xlabel '{xlabel}'");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set key top left");
    let parts: Vec<String> = curves
        .iter()
        .map(|c| {
            format!(
                "'{}' using {}:{} skip 1 with lines title '{}'",
                c.file, c.x, c.y, c.title
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    s
}

/// File-name fragment for a slider displacement, e.g. `20mm`.
pub fn setting_tag(slider_m: f64) -> String {
    format!("{}mm", round_mm(slider_m))
}

/// Millimetres with binary noise from the m conversion removed.
pub fn round_mm(slider_m: f64) -> f64 {
    (slider_m * 1000.0 * 1e9).round() / 1e9
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_round_trip_values() {
        let t = csv_table(&["a".into(), "b".into()], vec![vec![0.1, 1.0 / 3.0]]);
        assert_eq!(t, "a,b\n0.1,0.3333333333333333\n");
        let back: f64 = t.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    #[test]
    fn setting_tags() {
        assert_eq!(setting_tag(0.0), "0mm");
        assert_eq!(setting_tag(0.02), "20mm");
        assert_eq!(setting_tag(0.0125), "12.5mm");
    }

    #[test]
    fn gnuplot_lists_curves() {
        let g = gnuplot(
            "f",
            "t",
            "x",
            "y",
            &[
                Curve { file: "a.csv".into(), x: 1, y: 2, title: "a".into() },
                Curve { file: "b.csv".into(), x: 1, y: 3, title: "b".into() },
            ],
        );
        assert!(g.contains("set output 'f.png'"));
        assert!(g.contains("'a.csv' using 1:2"));
        assert!(g.contains("'b.csv' using 1:3"));
    }
}
