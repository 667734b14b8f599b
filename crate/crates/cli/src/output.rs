//! CSV tables and SVG sweep plots.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use thermoform::BetaSweep;

use crate::error::CliError;

/// Significant digits of every number in a CSV.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// Twelve significant digits, trailing zeros kept: `ln 2` prints as
/// `0.693147180560`. Magnitudes outside `[1e-5, 1e12)` use exponent form.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", SIGNIFICANT_DIGITS - 1, 0.0);
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).expect("exponent");
    if !(-5..12).contains(&exp) {
        return sci;
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        if self.rows.is_empty() {
            return Err(CliError::EmptyRows);
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| CliError::Io { path: "<buffer>".into(), source: e.into_error() })
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn write_csv(table: &Table, path: &Path) -> Result<(), CliError> {
    write_file(path, &table.to_csv()?)
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

fn polyline(points: &[(f64, f64)], style: &str) -> String {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    format!("  <polyline fill=\"none\" {style} points=\"{}\"/>\n", pts.join(" "))
}

/// Pressure curve, asymptote `beta Max + h_inf` and the final gap on a
/// fixed 800x500 canvas.
pub fn sweep_svg(sweep: &BetaSweep<f64>) -> Result<String, CliError> {
    if sweep.len() < 2 {
        return Err(CliError::ShortSweep);
    }
    let asymptote = sweep.asymptote();
    let (x0, x1) = (sweep.betas[0], sweep.betas[sweep.len() - 1]);
    let all = sweep.pressures.iter().chain(&asymptote).copied();
    let (mut y0, mut y1) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let curve: Vec<(f64, f64)> = sweep.betas.iter().zip(&sweep.pressures).map(|(&b, &p)| (sx(b), sy(p))).collect();
    let line: Vec<(f64, f64)> = sweep.betas.iter().zip(&asymptote).map(|(&b, &a)| (sx(b), sy(a))).collect();

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        "  <path d=\"M{left},{top} L{left},{bottom} L{right},{bottom}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(s, "  <text x=\"{left}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>", bottom + 20.0, format_number(x0));
    let _ = writeln!(
        s,
        "  <text x=\"{right}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">{}</text>",
        bottom + 20.0,
        format_number(x1)
    );
    let _ = writeln!(s, "  <text x=\"{:.2}\" y=\"{top}\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">{}</text>", left - 6.0, format_number(y1));
    let _ = writeln!(s, "  <text x=\"{:.2}\" y=\"{bottom}\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">{}</text>", left - 6.0, format_number(y0));
    let _ = writeln!(
        s,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">beta</text>",
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    s.push_str(&polyline(&line, "stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\""));
    s.push_str(&polyline(&curve, "stroke=\"#1f77b4\" stroke-width=\"2\""));
    let (gx, gy) = curve[curve.len() - 1];
    let (_, ly) = line[line.len() - 1];
    let gap = sweep.gaps[sweep.len() - 1];
    let _ = writeln!(s, "  <line x1=\"{gx:.2}\" y1=\"{gy:.2}\" x2=\"{gx:.2}\" y2=\"{ly:.2}\" stroke=\"gray\" stroke-width=\"1\"/>");
    let _ = writeln!(
        s,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">gap {}</text>",
        gx - 6.0,
        (gy + ly) / 2.0 - 6.0,
        format_number(gap)
    );
    let _ = writeln!(
        s,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\" fill=\"#1f77b4\">pressure</text>",
        left + 10.0,
        top + 16.0
    );
    let _ = writeln!(
        s,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\" fill=\"#d62728\">beta Max + h_inf</text>",
        left + 10.0,
        top + 32.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_sweep_svg(sweep: &BetaSweep<f64>, path: &Path) -> Result<(), CliError> {
    write_file(path, sweep_svg(sweep)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use thermoform::{beta_sweep, fixtures, Potential};

    #[test]
    fn number_format() {
        assert_eq!(format_number(2f64.ln()), "0.693147180560");
        assert_eq!(format_number(0.0), "0.00000000000");
        assert_eq!(format_number(64.0), "64.0000000000");
        assert_eq!(format_number(-1.5), "-1.50000000000");
        assert_eq!(format_number(9.9999999999999), "10.0000000000");
        assert_eq!(format_number(1.25e-7), "1.25000000000e-7");
        assert_eq!(format_number(3e15), "3.00000000000e15");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["beta", "label"]);
        for i in 0..6 {
            t.push(vec![Cell::Num(i as f64), Cell::Text(format!("a,\"{i}\""))]);
        }
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(!text.contains('\r'));
        assert!(text.starts_with("beta,label\n0.00000000000,\"a,\"\"0\"\"\"\n"));
        assert!(matches!(Table::new(&["x"]).to_csv(), Err(CliError::EmptyRows)));
    }

    fn sweep(phi: &[f64], betas: &[f64]) -> BetaSweep<f64> {
        let full = fixtures::full2();
        let phi = Potential::symbolwise(&full, phi, "phi").unwrap();
        let one = Potential::constant(&full, 1.0, "one");
        beta_sweep(&full, &phi, &one, betas).unwrap()
    }

    fn polylines(svg: &str) -> Vec<&str> {
        svg.lines().filter(|l| l.contains("<polyline")).map(|l| l.split("points=").nth(1).unwrap()).collect()
    }

    #[test]
    fn svg_is_deterministic_and_sized() {
        let s = sweep(&[1.0, 0.0], &[0.0, 1.0, 2.0, 3.0]);
        let a = sweep_svg(&s).unwrap();
        assert_eq!(a, sweep_svg(&s).unwrap());
        assert!(a.contains("viewBox=\"0 0 800 500\""));
        let lines = polylines(&a);
        assert_eq!(lines.len(), 2);
        assert_ne!(lines[0], lines[1]);
    }

    #[test]
    fn constant_sweep_curves_overlap() {
        let s = sweep(&[0.5, 0.5], &[0.0, 1.0, 2.0]);
        let svg = sweep_svg(&s).unwrap();
        let lines = polylines(&svg);
        assert_eq!(lines[0], lines[1]);
    }

    #[test]
    fn single_point_is_rejected() {
        let s = sweep(&[1.0, 0.0], &[1.0]);
        assert!(matches!(sweep_svg(&s), Err(CliError::ShortSweep)));
    }
}
