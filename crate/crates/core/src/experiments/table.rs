//! Result tables and their CSV, JSON and SVG renderings.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // shortest round-trip representation, stable across runs
            Cell::Float(x) => format!("{x:?}"),
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(x.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

/// Values accepted in the metadata block. Floats use the same shortest
/// round-trip form as the table cells.
pub trait MetaValue {
    fn render(&self) -> String;
}

impl MetaValue for f64 {
    fn render(&self) -> String {
        format!("{self:?}")
    }
}

impl MetaValue for usize {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl MetaValue for &str {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl MetaValue for String {
    fn render(&self) -> String {
        self.clone()
    }
}

/// Column names, rows and a metadata block of ordered `key: value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Vec<(String, String)>,
    /// Column used as the x axis of the optional chart, and the plotted series.
    pub plot: Option<(String, Vec<String>)>,
}

impl ResultTable {
    pub fn new(experiment: &str, columns: &[&str]) -> Self {
        Self {
            experiment: experiment.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match the header"
        );
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl MetaValue) {
        self.metadata.push((key.to_string(), value.render()));
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; non-numeric cells are skipped.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else {
            return Vec::new();
        };
        self.rows.iter().filter_map(|r| r[i].as_f64()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Summary object: experiment name, metadata, column names, row count and
    /// per-column minimum and maximum.
    pub fn summary_json(&self) -> Value {
        let meta: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let mut ranges = Map::new();
        for c in &self.columns {
            let v = self.values(c);
            if !v.is_empty() {
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                ranges.insert(
                    c.clone(),
                    json!({ "min": Cell::Float(lo).json(), "max": Cell::Float(hi).json() }),
                );
            }
        }
        json!({
            "experiment": self.experiment,
            "metadata": meta,
            "columns": self.columns,
            "rows": self.rows.len(),
            "ranges": ranges,
        })
    }

    /// Line chart of the plotted series against the x column; `None` when the
    /// table declares no chart.
    pub fn to_svg(&self) -> Option<String> {
        let (xname, series) = self.plot.as_ref()?;
        let xi = self.column(xname)?;
        let (w, h, pad) = (640.0, 400.0, 50.0);
        let mut lines = Vec::new();
        for name in series {
            let Some(yi) = self.column(name) else {
                continue;
            };
            let mut pts: Vec<(f64, f64)> = self
                .rows
                .iter()
                .filter_map(|r| Some((r[xi].as_f64()?, r[yi].as_f64()?)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            lines.push((name.as_str(), pts));
        }
        let all: Vec<(f64, f64)> = lines.iter().flat_map(|(_, p)| p.iter().copied()).collect();
        let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
            (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
        );
        if all.is_empty() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
        let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
        let colors = [
            "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
        ];
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<path d="M{pad} {top} V{bot} H{right}" stroke="black" fill="none"/>"#,
            top = pad,
            bot = h - pad,
            right = w - pad
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            w / 2.0,
            h - 12.0,
            xname
        );
        let _ = writeln!(svg, r#"<text x="{pad}" y="{}">{y1:.4}</text>"#, pad - 6.0);
        let _ = writeln!(
            svg,
            r#"<text x="{pad}" y="{}">{y0:.4}</text>"#,
            h - pad + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{x1:.4}</text>"#,
            w - pad,
            h - pad + 16.0
        );
        for (i, (name, pts)) in lines.iter().enumerate() {
            let color = colors[i % colors.len()];
            let d: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" stroke="{color}" fill="none"/>"#,
                d.join(" ")
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
                w - pad - 150.0,
                pad + 16.0 * i as f64
            );
        }
        svg.push_str("</svg>\n");
        Some(svg)
    }
}
