//! CSV emission with a versioned schema line and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::Path;

/// First line of every CSV: schema version plus the emitting subcommand.
pub fn schema_line(subcommand: &str) -> String {
    format!("# hcb-csv v1 {subcommand}")
}

pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(subcommand: &str, header: &str) -> Self {
        Self { lines: vec![schema_line(subcommand), header.to_string()] }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn into_text(self) -> String {
        let mut text = self.lines.join("\n");
        text.push('\n');
        text
    }
}

/// Write to `path` atomically (temp file in the same directory, then
/// rename) or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension(format!(
                "{}tmp{}",
                path.extension().map(|e| format!("{}.", e.to_string_lossy())).unwrap_or_default(),
                std::process::id()
            ));
            {
                let mut f = fs::File::create(&tmp)?;
                f.write_all(text.as_bytes())?;
                f.sync_all()?;
            }
            fs::rename(&tmp, path)
        }
    }
}

pub fn fmt_float(v: f64) -> String {
    format!("{v:.12e}")
}
