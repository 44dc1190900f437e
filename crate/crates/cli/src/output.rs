use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// A command result, rendered as text or as one JSON document.
pub struct Output {
    pub json: Value,
    pub text: String,
    /// Written verbatim to stdout in text mode instead of `text`.
    pub raw: Option<Vec<u8>>,
}

impl Output {
    pub fn new(json: Value, text: impl Into<String>) -> Self {
        Output { json, text: text.into(), raw: None }
    }

    pub fn raw(json: Value, bytes: Vec<u8>) -> Self {
        Output { json, text: String::new(), raw: Some(bytes) }
    }

    pub fn print(&self, format: Format) {
        match format {
            Format::Text if self.raw.is_some() => {
                let mut out = std::io::stdout().lock();
                let _ = out.write_all(self.raw.as_deref().unwrap_or_default());
                let _ = out.flush();
            }
            Format::Json => println!("{}", serde_json::to_string_pretty(&self.json).expect("json output")),
            Format::Text => {
                if !self.text.is_empty() {
                    println!("{}", self.text.trim_end());
                }
            }
        }
    }
}
