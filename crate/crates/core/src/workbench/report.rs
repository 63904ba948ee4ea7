//! Plain-text and CSV tables with fixed 10-significant-digit floats.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(usize),
    Missing,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => format_float(*v),
            Cell::Int(n) => n.to_string(),
            Cell::Missing => "NA".to_string(),
        }
    }

    fn is_text(&self) -> bool {
        matches!(self, Cell::Text(_))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

/// Ten significant digits; positional for decimal exponents in `[-5, 9]`,
/// scientific otherwise.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0.000000000".into();
    }
    let sci = format!("{v:.9e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..=9).contains(&exp) {
        format!("{:.*}", (9 - exp) as usize, v)
    } else {
        sci
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Self {
            title: title.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_headers(title: &str, headers: Vec<String>) -> Self {
        Self {
            title: title.to_string(),
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Two-column `quantity,value` row.
    pub fn kv(&mut self, key: &str, value: impl Into<Cell>) {
        self.push(vec![Cell::Text(key.to_string()), value.into()]);
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
}

impl Report {
    pub fn push(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn render(&self, csv: bool) -> String {
        let mut out = String::new();
        for (k, t) in self.tables.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            if csv {
                render_csv(t, &mut out);
            } else {
                render_plain(t, &mut out);
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(t: &Table, out: &mut String) {
    let _ = writeln!(out, "# {}", t.title);
    let header: Vec<String> = t.headers.iter().map(|h| csv_field(h)).collect();
    let _ = writeln!(out, "{}", header.join(","));
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|c| csv_field(&c.render())).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
}

fn render_plain(t: &Table, out: &mut String) {
    let rendered: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.chars().count()).collect();
    for row in &rendered {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let right: Vec<bool> = (0..widths.len())
        .map(|j| t.rows.iter().all(|r| !r[j].is_text()))
        .collect();
    let _ = writeln!(out, "== {} ==", t.title);
    let header: Vec<String> = t
        .headers
        .iter()
        .zip(&widths)
        .zip(&right)
        .map(|((h, w), r)| if *r { format!("{h:>w$}") } else { format!("{h:<w$}") })
        .collect();
    let _ = writeln!(out, "{}", header.join("  ").trim_end());
    for row in &rendered {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .zip(&right)
            .map(|((s, w), r)| if *r { format!("{s:>w$}") } else { format!("{s:<w$}") })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
}
