//! Deterministic CSV and text rendering.

use crate::Format;

pub const TOOL: &str = concat!("dirichlet-graph ", env!("CARGO_PKG_VERSION"));

/// `#` metadata, an optional header, rows, and trailing `#` lines.
pub struct Report {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    trailer: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            meta: vec![("tool".into(), TOOL.into()), ("command".into(), command.into())],
            header: Vec::new(),
            rows: Vec::new(),
            trailer: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn header(&mut self, cols: &[&str]) -> &mut Self {
        self.header = cols.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        self.rows.push(cells);
        self
    }

    pub fn trailer(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.trailer.push((key.into(), value.to_string()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={}\n", one_line(v)));
        }
        if !self.header.is_empty() {
            out.push_str(&csv_line(&self.header));
        }
        for r in &self.rows {
            out.push_str(&csv_line(r));
        }
        for (k, v) in &self.trailer {
            out.push_str(&format!("# {k}={}\n", one_line(v)));
        }
        out
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("{k}: {v}\n"));
        }
        let ncols = self
            .rows
            .iter()
            .map(Vec::len)
            .chain([self.header.len()])
            .max()
            .unwrap_or(0);
        let mut width = vec![0; ncols];
        for r in self.rows.iter().chain([&self.header]) {
            for (k, cell) in r.iter().enumerate() {
                width[k] = width[k].max(cell.chars().count());
            }
        }
        if ncols > 0 {
            out.push('\n');
        }
        for r in [&self.header].into_iter().filter(|h| !h.is_empty()).chain(&self.rows) {
            let cells: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(k, c)| format!("{c:<w$}", w = width[k]))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        if !self.trailer.is_empty() {
            out.push('\n');
        }
        for (k, v) in &self.trailer {
            out.push_str(&format!("{k}: {v}\n"));
        }
        out
    }
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut line = cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_vertices_are_quoted() {
        let mut r = Report::new("x");
        r.header(&["vertex", "value"]).row(vec!["(0,1)".into(), "2".into()]);
        let csv = r.render(Format::Csv);
        assert!(csv.ends_with("vertex,value\n\"(0,1)\",2\n"));
    }

    #[test]
    fn metadata_before_rows_and_trailer_after() {
        let mut r = Report::new("classify");
        r.meta("tol", "0.01")
            .header(&["radius", "capacity"])
            .row(vec!["10".into(), "0.2".into()]);
        r.trailer("verdict", "undetermined");
        let want =
            format!("# tool={TOOL}\n# command=classify\n# tol=0.01\nradius,capacity\n10,0.2\n# verdict=undetermined\n");
        assert_eq!(r.render(Format::Csv), want);
    }
}
