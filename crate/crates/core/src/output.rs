//! Tables, CSV files and SVG plots.
//!
//! Every artifact is a pure function of its table, so identical inputs give
//! identical bytes.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot plot an empty table")]
    EmptyTable,
    #[error("no column named {0:?}")]
    NoColumn(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
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

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// Shortest round-trip decimal; scientific notation outside [1e-4, 1e15).
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Result<usize, OutputError> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| OutputError::NoColumn(name.to_string()))
    }

    fn numbers(&self, col: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[col].as_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, OutputError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| OutputError::Io(e.into_error()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), OutputError> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlotKind {
    /// One rect per row at (x, y), colored by each value column; several
    /// value columns become side-by-side panels.
    Heatmap { x: String, y: String, values: Vec<String> },
    /// Polylines of y against x, one per distinct `series` value (in order of
    /// first appearance).
    Lines { x: String, y: String, series: Option<String> },
}

impl PlotKind {
    pub fn heatmap(x: &str, y: &str, values: &[&str]) -> Self {
        PlotKind::Heatmap { x: x.into(), y: y.into(), values: values.iter().map(|s| s.to_string()).collect() }
    }

    pub fn lines(x: &str, y: &str, series: Option<&str>) -> Self {
        PlotKind::Lines { x: x.into(), y: y.into(), series: series.map(Into::into) }
    }
}

const W: f64 = 800.0;
const H: f64 = 600.0;
const MARGIN: f64 = 60.0;
const PALETTE: [(f64, f64, f64); 3] = [(68.0, 1.0, 84.0), (33.0, 145.0, 140.0), (253.0, 231.0, 37.0)];

/// Linear three-stop color map over [0, 1].
fn color(t: f64) -> String {
    if !t.is_finite() {
        return "#808080".into();
    }
    let t = t.clamp(0.0, 1.0) * 2.0;
    let (i, f) = if t >= 2.0 { (1, 1.0) } else { (t as usize, t.fract()) };
    let (a, b) = (PALETTE[i], PALETTE[i + 1]);
    let c = |u: f64, v: f64| (u + (v - u) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(a.0, b.0), c(a.1, b.1), c(a.2, b.2))
}

fn finite_range(v: &[f64]) -> (f64, f64) {
    let (lo, hi) = v.iter().filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if lo > hi {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn text(svg: &mut String, x: f64, y: f64, anchor: &str, s: &str) {
    let _ = writeln!(svg, r#"<text x="{x:.1}" y="{y:.1}" font-size="12" text-anchor="{anchor}">{}</text>"#, escape(s));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(svg: &mut String, x0: f64, y0: f64, w: f64, h: f64, xl: &str, yl: &str, xr: (f64, f64), yr: (f64, f64)) {
    let _ = writeln!(svg, r#"<line x1="{x0:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#, y0 + h, x0 + w, y0 + h);
    let _ = writeln!(svg, r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{:.1}" stroke="black"/>"#, y0 + h);
    text(svg, x0, y0 + h + 16.0, "start", &fmt_num(xr.0));
    text(svg, x0 + w, y0 + h + 16.0, "end", &fmt_num(xr.1));
    text(svg, x0 + 0.5 * w, y0 + h + 34.0, "middle", xl);
    text(svg, x0 - 4.0, y0 + h, "end", &fmt_num(yr.0));
    text(svg, x0 - 4.0, y0 + 10.0, "end", &fmt_num(yr.1));
    text(svg, x0, y0 - 8.0, "start", yl);
}

/// Self-contained SVG with a fixed 800×600 viewBox.
pub fn emit_svg(table: &Table, kind: &PlotKind) -> Result<String, OutputError> {
    if table.is_empty() {
        return Err(OutputError::EmptyTable);
    }
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">"#);
    match kind {
        PlotKind::Heatmap { x, y, values } => heatmap(&mut svg, table, x, y, values)?,
        PlotKind::Lines { x, y, series } => lines(&mut svg, table, x, y, series.as_deref())?,
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn heatmap(svg: &mut String, t: &Table, x: &str, y: &str, values: &[String]) -> Result<(), OutputError> {
    let (xs, ys) = (t.numbers(t.column(x)?), t.numbers(t.column(y)?));
    let distinct = |v: &[f64]| {
        let mut u: Vec<f64> = v.iter().copied().filter(|a| a.is_finite()).collect();
        u.sort_by(f64::total_cmp);
        u.dedup();
        u
    };
    let (ux, uy) = (distinct(&xs), distinct(&ys));
    let n = values.len().max(1) as f64;
    let gap = 50.0;
    let pw = (W - 2.0 * MARGIN - (n - 1.0) * gap) / n;
    let ph = H - 2.0 * MARGIN - 30.0;
    let (cw, ch) = (pw / ux.len().max(1) as f64, ph / uy.len().max(1) as f64);
    for (p, name) in values.iter().enumerate() {
        let v = t.numbers(t.column(name)?);
        let (lo, hi) = finite_range(&v);
        let x0 = MARGIN + p as f64 * (pw + gap);
        let y0 = MARGIN;
        let _ = writeln!(svg, "<g>");
        for ((&a, &b), &val) in xs.iter().zip(&ys).zip(&v) {
            let (Ok(i), Ok(j)) = (ux.binary_search_by(|u| u.total_cmp(&a)), uy.binary_search_by(|u| u.total_cmp(&b))) else {
                continue;
            };
            let _ = writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x0 + i as f64 * cw,
                y0 + ph - (j + 1) as f64 * ch,
                cw,
                ch,
                color((val - lo) / (hi - lo))
            );
        }
        let _ = writeln!(svg, "</g>");
        let xr = (ux.first().copied().unwrap_or(0.0), ux.last().copied().unwrap_or(0.0));
        let yr = (uy.first().copied().unwrap_or(0.0), uy.last().copied().unwrap_or(0.0));
        axes(svg, x0, y0, pw, ph, x, y, xr, yr);
        text(svg, x0 + 0.5 * pw, y0 - 24.0, "middle", name);
        text(svg, x0 + 0.5 * pw, H - 12.0, "middle", &format!("{name}: min {} max {}", fmt_num(lo), fmt_num(hi)));
    }
    Ok(())
}

fn lines(svg: &mut String, t: &Table, x: &str, y: &str, series: Option<&str>) -> Result<(), OutputError> {
    let (xs, ys) = (t.numbers(t.column(x)?), t.numbers(t.column(y)?));
    let keys: Vec<String> = match series {
        Some(s) => {
            let c = t.column(s)?;
            t.rows.iter().map(|r| r[c].render()).collect()
        }
        None => vec![String::new(); t.rows.len()],
    };
    let mut order: Vec<&str> = Vec::new();
    for k in &keys {
        if !order.contains(&k.as_str()) {
            order.push(k);
        }
    }
    let (xr, yr) = (finite_range(&xs), finite_range(&ys));
    let (pw, ph) = (W - 2.0 * MARGIN, H - 2.0 * MARGIN - 30.0);
    let px = |v: f64| MARGIN + (v - xr.0) / (xr.1 - xr.0) * pw;
    let py = |v: f64| MARGIN + ph - (v - yr.0) / (yr.1 - yr.0) * ph;
    for (s, key) in order.iter().enumerate() {
        let pts: Vec<String> = (0..xs.len())
            .filter(|&i| keys[i] == *key && xs[i].is_finite() && ys[i].is_finite())
            .map(|i| format!("{:.2},{:.2}", px(xs[i]), py(ys[i])))
            .collect();
        let shade = if order.len() > 1 { s as f64 / (order.len() - 1) as f64 } else { 0.0 };
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#, color(shade), pts.join(" "));
    }
    axes(svg, MARGIN, MARGIN, pw, ph, x, y, xr, yr);
    text(svg, 0.5 * W, H - 12.0, "middle", &format!("{y}: min {} max {}", fmt_num(yr.0), fmt_num(yr.1)));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Table {
        let mut t = Table::new(&["x", "y", "v"]);
        for (x, y, v) in [(0.0, 0.0, 1.0), (1.0, 0.0, 2.0), (0.0, 1.0, 3.0), (1.0, 1.0, 4.0)] {
            t.push(vec![x.into(), y.into(), v.into()]);
        }
        t
    }

    #[test]
    fn heatmap_has_one_rect_per_cell() {
        let svg = emit_svg(&grid(), &PlotKind::heatmap("x", "y", &["v"])).unwrap();
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
        assert!(svg.contains("min 1 max 4"));
        assert!(svg.contains("<line"));
    }

    #[test]
    fn svg_is_deterministic() {
        let k = PlotKind::lines("x", "v", Some("y"));
        assert_eq!(emit_svg(&grid(), &k).unwrap(), emit_svg(&grid(), &k).unwrap());
        assert_eq!(emit_svg(&grid(), &k).unwrap().matches("<polyline").count(), 2);
    }

    #[test]
    fn empty_table_is_an_error() {
        let t = Table::new(&["x", "y"]);
        assert!(matches!(emit_svg(&t, &PlotKind::lines("x", "y", None)), Err(OutputError::EmptyTable)));
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![1.5e-20.into(), Cell::Empty, "x".into()]);
        t.push(vec![0.25.into(), 3usize.into(), Some(2.0).into()]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "a,b,c\n1.5e-20,,x\n0.25,3,2\n");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1e-300, -2.5e22, 8.744, 1.0 / 3.0] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }
}
