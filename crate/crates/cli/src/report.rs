use std::io::{self, Write};
use std::path::Path;

use crate::config::Format;

/// Ordered `key: value` report.
#[derive(Clone, Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.push("command", command);
        r
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn extend(&mut self, kv: impl IntoIterator<Item = (String, String)>) {
        self.entries.extend(kv);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self
                .entries
                .iter()
                .map(|(k, v)| format!("{k}: {v}\n"))
                .collect(),
            Format::Json => {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .entries
                    .iter()
                    .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                    .collect();
                let mut s = serde_json::to_string_pretty(&map).expect("string map serializes");
                s.push('\n');
                s
            }
        }
    }

    pub fn write_to(&self, path: &Path, format: Format) -> io::Result<()> {
        let mut f = io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.render(format).as_bytes())?;
        f.flush()
    }
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Text => "txt",
        Format::Json => "json",
    }
}
