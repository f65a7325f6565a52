//! Gnuplot-compatible plot data: `#` header comments, then whitespace
//! separated columns. A blank line separates scan lines of a surface.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    ScanHeatmap,
    RootLocus,
    GrowthCurves,
}

impl PlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::ScanHeatmap => "scan-heatmap",
            PlotKind::RootLocus => "root-locus",
            PlotKind::GrowthCurves => "growth-curves",
        }
    }
}

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes one curve. `block` inserts a blank line after every `block` rows.
pub fn write_columns(
    path: &Path,
    kind: PlotKind,
    notes: &[String],
    columns: &[&str],
    rows: &[Vec<f64>],
    block: Option<usize>,
) -> Result<(), CliError> {
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut w = BufWriter::new(file);
    let mut go = || -> std::io::Result<()> {
        writeln!(w, "# {}", kind.as_str())?;
        for n in notes {
            writeln!(w, "# {n}")?;
        }
        writeln!(w, "# columns: {}", columns.join(" "))?;
        for (i, r) in rows.iter().enumerate() {
            let line: Vec<String> = r.iter().map(|x| fmt_f64(*x)).collect();
            writeln!(w, "{}", line.join(" "))?;
            if let Some(b) = block {
                if (i + 1) % b == 0 && i + 1 < rows.len() {
                    writeln!(w)?;
                }
            }
        }
        w.flush()
    };
    go().map_err(CliError::io(path))
}

/// Reads back the numeric rows of a plot file.
#[cfg(test)]
pub fn read_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}
