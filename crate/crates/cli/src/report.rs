use std::io::{self, Write};

use serde_json::{Map, Value};

use crate::args::Format;

/// Rows for CSV and text output; JSON carries the same rows under `rows`.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self
                        .headers
                        .iter()
                        .cloned()
                        .zip(r.iter().map(|c| Value::String(c.clone())))
                        .collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

/// Outcome of one command.
#[derive(Clone, Debug)]
pub struct Report {
    pub fields: Map<String, Value>,
    pub table: Option<Table>,
    /// `Some(false)` turns into exit code 1.
    pub passed: Option<bool>,
}

impl Report {
    pub fn new(command: &str, digits: Option<u32>) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), command.into());
        if let Some(d) = digits {
            fields.insert("precision".into(), d.into());
        }
        Report {
            fields,
            table: None,
            passed: None,
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), v.into());
        self
    }

    pub fn to_json(&self) -> Value {
        let mut m = self.fields.clone();
        if let Some(t) = &self.table {
            m.insert("rows".into(), t.to_json());
        }
        if let Some(p) = self.passed {
            m.insert("passed".into(), p.into());
        }
        Value::Object(m)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)
            }
            Format::Csv => self.write_csv(out),
            Format::Text => self.write_text(out),
        }
    }

    fn scalar_pairs(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = self.fields.iter().map(|(k, x)| (k.clone(), plain(x))).collect();
        if let Some(p) = self.passed {
            v.push(("passed".into(), p.to_string()));
        }
        v
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match &self.table {
            Some(t) => {
                w.write_record(&t.headers)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
            }
            None => {
                w.write_record(["key", "value"])?;
                for (k, v) in self.scalar_pairs() {
                    w.write_record([k, v])?;
                }
            }
        }
        w.flush()
    }

    fn write_text(&self, out: &mut dyn Write) -> io::Result<()> {
        for (k, v) in self.scalar_pairs() {
            writeln!(out, "{k}: {v}")?;
        }
        if let Some(t) = &self.table {
            let mut width: Vec<usize> = t.headers.iter().map(|h| h.len()).collect();
            for r in &t.rows {
                for (w, c) in width.iter_mut().zip(r) {
                    *w = (*w).max(c.len());
                }
            }
            writeln!(out)?;
            let line = |cells: &[String]| -> String {
                let parts: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
                parts.join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(&t.headers))?;
            for r in &t.rows {
                writeln!(out, "{}", line(r))?;
            }
        }
        Ok(())
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", Some(20));
        r.set("value", "1.5");
        let mut t = Table::new(&["k", "x"]);
        t.push(vec!["1".into(), "a,b".into()]);
        r.table = Some(t);
        r.passed = Some(true);
        r
    }

    #[test]
    fn csv_quotes_and_text_aligns() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,x\n1,\"a,b\"\n");
        let mut buf = Vec::new();
        sample().write(Format::Text, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("command: demo\nprecision: 20\nvalue: 1.5\npassed: true\n"));
        assert!(s.ends_with("k  x\n1  a,b\n"));
    }

    #[test]
    fn json_has_rows_and_sorted_keys() {
        let v = sample().to_json();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"{"command":"demo","passed":true,"precision":20,"rows":[{"k":"1","x":"a,b"}],"value":"1.5"}"#
        );
    }
}
