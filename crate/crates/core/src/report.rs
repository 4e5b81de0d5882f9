//! Table emission: CSV with a `#` config header, and a JSON mirror.
//!
//! Infinity is serialized as the token `inf` in CSV and as the string
//! `"inf"` in JSON (JSON numbers cannot carry infinity), so extended-real
//! columns round-trip losslessly.

use serde_json::{json, Value};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => {
                if v.is_finite() {
                    json!(v)
                } else if *v > 0.0 {
                    json!("inf")
                } else if *v < 0.0 {
                    json!("-inf")
                } else {
                    json!("nan")
                }
            }
            Cell::Text(s) => json!(s),
        }
    }
}

/// Shortest-roundtrip float formatting with the `inf` token.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v}")
    }
}

/// A named table with config lines, a header row, and data rows.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub name: String,
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            config: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV rendering; config keys appear as `# key=value` comment lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# table={}\n", self.name));
        for (k, v) in &self.config {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON mirror of the CSV: `{name, config, rows: [objects]}`.
    pub fn to_json(&self) -> Value {
        let config: Value = self
            .config
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect::<serde_json::Map<_, _>>()
            .into();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row.iter())
                    .map(|(c, cell)| (c.clone(), cell.to_json()))
                    .collect::<serde_json::Map<_, _>>()
                    .into()
            })
            .collect();
        json!({ "table": self.name, "config": config, "rows": rows })
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(&self.to_json()).expect("table is valid JSON");
            s.push('\n');
            s
        } else {
            self.to_csv()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_carry_inf_token() {
        let mut t = Table::new("demo", &["n", "risk"]).with_config("seed", 42);
        t.push_row(vec![Cell::Int(5), Cell::Float(f64::INFINITY)]);
        t.push_row(vec![Cell::Int(10), Cell::Float(0.5)]);
        let csv = t.to_csv();
        assert!(csv.contains("# table=demo"));
        assert!(csv.contains("# seed=42"));
        assert!(csv.contains("5,inf"));
        assert!(csv.contains("10,0.5"));
        let j = t.to_json();
        assert_eq!(j["rows"][0]["risk"], json!("inf"));
        assert_eq!(j["rows"][1]["risk"], json!(0.5));
    }

    #[test]
    fn float_formatting_roundtrips() {
        for &v in &[0.1, 1.0 / 3.0, 1e-300, 123456.789] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }
}
