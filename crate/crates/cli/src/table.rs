//! Minimal numeric CSV writer.

use std::fs;
use std::path::Path;

use qimetric::format::fmt_f64;

use crate::error::CliResult;

/// A CSV table kept in memory and written in one go.
#[derive(Debug, Clone, Default)]
pub struct Table {
    lines: Vec<String>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            lines: vec![header.join(",")],
        }
    }

    pub fn push(&mut self, cells: &[Cell]) {
        let row: Vec<String> = cells.iter().map(Cell::render).collect();
        self.lines.push(row.join(","));
    }

    /// Data rows, excluding the header.
    pub fn rows(&self) -> usize {
        self.lines.len() - 1
    }

    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // `+ 0.0` folds a negative zero into `0.0`
            Cell::Num(x) => fmt_f64(x + 0.0),
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_rows() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(&[Cell::Num(-0.0), Cell::Int(3), Cell::Empty]);
        t.push(&[Cell::Num(0.1), Cell::Text("x".into()), Cell::Num(1e-30)]);
        assert_eq!(t.rows(), 2);
        assert_eq!(t.render(), "a,b,c\n0.0,3,\n0.1,x,1e-30\n");
    }
}
