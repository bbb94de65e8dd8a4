//! CSV tables and SVG polyline charts.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Header plus rows; every row has one cell per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<PlotSpec>,
}

/// Columns to draw when plotting is requested.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: usize,
    pub ys: Vec<usize>,
    pub log_log: bool,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn with_plot(mut self, x: usize, ys: &[usize], log_log: bool) -> Self {
        self.plot = Some(PlotSpec {
            x,
            ys: ys.to_vec(),
            log_log,
        });
        self
    }

    /// Plot series `(label, points)` from the numeric cells.
    pub fn series(&self) -> Vec<Series> {
        let Some(spec) = &self.plot else {
            return Vec::new();
        };
        let num = |c: &Cell| match c {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        };
        spec.ys
            .iter()
            .map(|&y| Series {
                label: self.header[y].clone(),
                points: self
                    .rows
                    .iter()
                    .filter_map(|r| Some((num(&r[spec.x])?, num(&r[y])?)))
                    .collect(),
            })
            .collect()
    }
}

/// RFC-4180 CSV with a header row and 17 significant digits per float.
pub fn emit_csv(header: &[String], rows: &[Vec<Cell>], path: &Path) -> Result<()> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != header.len() {
            anyhow::bail!(
                "row {i} has {} cells but the schema has {} columns ({})",
                r.len(),
                header.len(),
                path.display()
            );
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)
        .with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.write_record(r.iter().map(Cell::render))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Polyline chart; non-positive values are dropped on log axes.
pub fn emit_svg(
    series: &[Series],
    x_label: &str,
    y_label: &str,
    log_log: bool,
    path: &Path,
) -> Result<()> {
    let tx = |v: f64| if log_log { v.log10() } else { v };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| !log_log || (*x > 0.0 && *y > 0.0))
                .map(|&(x, y)| (tx(x), tx(y)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect()
        })
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let axis = |v: f64| {
        if log_log {
            format!("1e{v:.1}")
        } else {
            format!("{v:.3e}")
        }
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{l},{t} L{l},{b} L{r},{b}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{l}" y="{}" text-anchor="middle">{}</text>"#,
        b + 16.0,
        axis(x0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{r}" y="{}" text-anchor="middle">{}</text>"#,
        b + 16.0,
        axis(x1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{b}" text-anchor="end">{}</text>"#,
        l - 4.0,
        axis(y0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{t}" text-anchor="end">{}</text>"#,
        l - 4.0,
        axis(y1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (i, (ser, p)) in series.iter().zip(&pts).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = p
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            r - 120.0,
            t + 14.0 * (i as f64 + 1.0),
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(cols: &[&str]) -> Vec<String> {
        cols.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn empty_rows_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        emit_csv(&header(&["a", "b"]), &[], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "a,b\r\n");
    }

    #[test]
    fn single_row_is_bit_stable() {
        let dir = tempfile::tempdir().unwrap();
        let (p, q) = (dir.path().join("1.csv"), dir.path().join("2.csv"));
        let rows = vec![vec![Cell::Num(0.0), Cell::Num(1.5)]];
        emit_csv(&header(&["x", "y"]), &rows, &p).unwrap();
        emit_csv(&header(&["x", "y"]), &rows, &q).unwrap();
        let text = std::fs::read(&p).unwrap();
        assert_eq!(text, std::fs::read(&q).unwrap());
        assert_eq!(
            String::from_utf8(text).unwrap(),
            "x,y\r\n0.0000000000000000e0,1.5000000000000000e0\r\n"
        );
    }

    #[test]
    fn large_table_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("big.csv");
        let vals: Vec<f64> = (0..10_000)
            .map(|i| (i as f64 * 0.7311).sin() * 10f64.powi(i % 40 - 20))
            .collect();
        let rows: Vec<Vec<Cell>> = vals
            .iter()
            .enumerate()
            .map(|(i, v)| vec![Cell::from(i), Cell::Num(*v)])
            .collect();
        emit_csv(&header(&["i", "v"]), &rows, &p).unwrap();
        let mut rdr = csv::Reader::from_path(&p).unwrap();
        let back: Vec<f64> = rdr
            .records()
            .map(|r| r.unwrap()[1].parse().unwrap())
            .collect();
        assert_eq!(back, vals);
    }

    #[test]
    fn schema_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![vec![Cell::Num(1.0)]];
        assert!(emit_csv(&header(&["a", "b"]), &rows, &dir.path().join("x.csv")).is_err());
    }

    #[test]
    fn svg_contains_polylines_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.svg");
        let s = Series {
            label: "norm".into(),
            points: vec![(1.0, 1.0), (2.0, 0.5), (4.0, 0.0)],
        };
        emit_svg(&[s], "delta", "norm", true, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("<svg"));
        assert_eq!(text.matches("<polyline").count(), 1);
        assert!(text.contains(">delta<"));
    }
}
