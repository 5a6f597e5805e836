//! CSV text with `#` provenance lines. Floats use the shortest
//! representation that round-trips, so identical inputs give identical bytes.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvDocument {
    provenance: Vec<(String, String)>,
    header: &'static str,
    body: String,
    rows: usize,
}

impl CsvDocument {
    pub fn new(header: &'static str) -> Self {
        CsvDocument {
            provenance: Vec::new(),
            header,
            body: String::new(),
            rows: 0,
        }
    }

    pub fn provenance(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.provenance.push((key.into(), value.to_string()));
        self
    }

    /// A `# block <tag>` marker between data rows.
    pub fn block(&mut self, tag: &str) -> &mut Self {
        let _ = writeln!(self.body, "# block {tag}");
        self
    }

    pub fn row(&mut self, fields: &[Field<'_>]) -> &mut Self {
        let line: Vec<String> = fields.iter().map(Field::render).collect();
        let _ = writeln!(self.body, "{}", line.join(","));
        self.rows += 1;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn header(&self) -> &'static str {
        self.header
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.header);
        out.push_str(&self.body);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field<'a> {
    Num(f64),
    Text(&'a str),
}

impl Field<'_> {
    fn render(&self) -> String {
        match self {
            Field::Num(x) => format!("{x}"),
            Field::Text(s) => s.to_string(),
        }
    }
}

/// Data lines of a rendered document: no `#` lines, no header.
pub fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1)
}
