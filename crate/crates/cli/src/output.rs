//! Report rendering. Every format starts with the resolved configuration.

use std::io::Write;

use serde_json::{json, Value};

use hec_core::policy::NumericPolicy;
use hec_core::{Error, Result};

use crate::{Cli, Format};

pub struct Report {
    pub json: Value,
    pub text: String,
    pub markdown: Option<String>,
    pub csv: Option<String>,
    /// 0 when every assertion held, 1 on a failed assertion or verdict mismatch.
    pub exit: i32,
}

impl Report {
    pub fn new(json: Value, text: String) -> Self {
        Report { json, text, markdown: None, csv: None, exit: 0 }
    }
}

pub fn config_json(cli: &Cli, policy: &NumericPolicy) -> Value {
    json!({
        "command": cli.command,
        "global": cli.global,
        "policy": policy,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

pub fn render(cli: &Cli, policy: &NumericPolicy, report: &Report) -> Result<String> {
    let config = config_json(cli, policy);
    let line = serde_json::to_string(&config)?;
    Ok(match cli.global.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({"config": config, "report": report.json}))?;
            s.push('\n');
            s
        }
        Format::Text => format!("# config: {line}\n{}", report.text),
        Format::Markdown => {
            let body = report.markdown.clone().unwrap_or_else(|| format!("```\n{}```\n", report.text));
            format!("<!-- config: {line} -->\n\n{body}")
        }
        Format::Csv => match &report.csv {
            Some(csv) => format!("# config: {line}\n{csv}"),
            None => return Err(Error::Parse("this command has no CSV output; use text, json or markdown".into())),
        },
    })
}

pub fn emit(cli: &Cli, policy: &NumericPolicy, report: &Report) -> Result<()> {
    let s = render(cli, policy, report)?;
    match &cli.global.out {
        Some(path) => std::fs::write(path, s)?,
        None => match std::io::stdout().lock().write_all(s.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(())
}
