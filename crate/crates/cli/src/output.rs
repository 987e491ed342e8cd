//! Rendering of command results as CSV, JSON or aligned text.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// A rectangular result: named columns, one JSON scalar per cell.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> =
                        self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.clone())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for r in &self.rows {
            out.write_record(r.iter().map(cell))?;
        }
        out.flush()
    }

    fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| cells.iter().map(|r| r[j].chars().count()).chain([self.columns[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |w: &mut W, items: Vec<&str>| -> io::Result<()> {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(s, n)| format!("{s:>n$}")).collect();
            writeln!(w, "{}", padded.join("  ").trim_end())
        };
        line(&mut w, self.columns.clone())?;
        for r in &cells {
            line(&mut w, r.iter().map(String::as_str).collect())?;
        }
        Ok(())
    }
}

/// What a command produced.
pub enum Output {
    Table(Table),
    /// A single report with its own JSON shape and a key/value text form.
    Record { json: Value, text: Vec<(String, String)>, csv: Table },
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Output {
    fn write_to<W: Write>(&self, format: Format, mut w: W) -> io::Result<()> {
        match (self, format) {
            (Output::Table(t), Format::Csv) | (Output::Record { csv: t, .. }, Format::Csv) => t.write_csv(w),
            (Output::Table(t), Format::Text) => t.write_text(w),
            (Output::Table(t), Format::Json) => {
                serde_json::to_writer_pretty(&mut w, &t.to_json())?;
                writeln!(w)
            }
            (Output::Record { json, .. }, Format::Json) => {
                serde_json::to_writer_pretty(&mut w, json)?;
                writeln!(w)
            }
            (Output::Record { text, .. }, Format::Text) => {
                let width = text.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in text {
                    writeln!(w, "{k:<width$}  {v}")?;
                }
                Ok(())
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        match out {
            Some(path) => {
                let mut f = BufWriter::new(File::create(path)?);
                self.write_to(format, &mut f)?;
                f.flush()
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                self.write_to(format, &mut lock)
            }
        }
    }
}

/// f64 cell; non-finite values become strings so JSON stays valid.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Output {
        let mut t = Table::new(&["x", "name"]);
        t.push(vec![num(1.5), text("a,b")]);
        t.push(vec![num(f64::NAN), Value::Null]);
        Output::Table(t)
    }

    fn render(o: &Output, f: Format) -> String {
        let mut buf = Vec::new();
        o.write_to(f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn csv_quotes_and_blanks() {
        assert_eq!(render(&sample(), Format::Csv), "x,name\n1.5,\"a,b\"\nNaN,\n");
    }

    #[test]
    fn json_rows_are_objects() {
        let v: Value = serde_json::from_str(&render(&sample(), Format::Json)).unwrap();
        assert_eq!(v[0]["x"], 1.5);
        assert_eq!(v[0]["name"], "a,b");
        assert_eq!(v[1]["x"], "NaN");
    }

    #[test]
    fn text_is_aligned() {
        let s = render(&sample(), Format::Text);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "  x  name");
        assert_eq!(lines[1], "1.5   a,b");
    }
}
