//! `manifest.json`: the settings of a run plus what it derived.
//!
//! The manifest is written as soon as the output directory exists, before
//! any data file, and rewritten when the command finishes. Its `config`
//! member is a complete [`Settings`], so `--config manifest.json` replays
//! the run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

use crate::config::Settings;
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub tool: Tool,
    pub config: Settings,
    /// Field values are stored row-major with `y` varying fastest; CSV rows
    /// follow the same order.
    pub layout: &'static str,
    pub derived: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub status: String,
    pub duration_seconds: f64,
}

/// One command invocation: owns the output directory and the manifest.
pub struct Run {
    dir: PathBuf,
    manifest: Manifest,
    started: Instant,
    echo: bool,
}

impl Run {
    pub fn start(command: &str, config: Settings, dir: &Path, echo: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let run = Self {
            dir: dir.to_path_buf(),
            manifest: Manifest {
                command: command.to_string(),
                tool: Tool {
                    name: env!("CARGO_PKG_NAME"),
                    version: env!("CARGO_PKG_VERSION"),
                },
                config,
                layout: "x-major, y fastest",
                derived: BTreeMap::new(),
                warnings: Vec::new(),
                outputs: Vec::new(),
                status: "running".into(),
                duration_seconds: 0.0,
            },
            started: Instant::now(),
            echo,
        };
        run.write()?;
        Ok(run)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Whether the manifest is echoed to stdout at the end.
    pub fn json(&self) -> bool {
        self.echo
    }

    pub fn settings(&self) -> &Settings {
        &self.manifest.config
    }

    pub fn derive(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.manifest.derived.insert(key.to_string(), v);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        eprintln!("warning: {msg}");
        self.manifest.warnings.push(msg);
    }

    pub fn record_output(&mut self, name: &str) {
        if !self.manifest.outputs.iter().any(|o| o == name) {
            self.manifest.outputs.push(name.to_string());
        }
    }

    fn write(&self) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(&self.manifest).context("serializing manifest")?;
        let path = self.dir.join("manifest.json");
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Rewrites the manifest with its final status; `--json` echoes it.
    pub fn finish(mut self, ok: bool) -> Result<(), CliError> {
        self.manifest.status = if ok { "ok" } else { "failed" }.into();
        self.manifest.duration_seconds = self.started.elapsed().as_secs_f64();
        self.write()?;
        if self.echo {
            let text = serde_json::to_string_pretty(&self.manifest).context("serializing manifest")?;
            println!("{text}");
        }
        Ok(())
    }
}
