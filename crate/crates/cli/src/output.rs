use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] longi_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 1,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
pub struct Override {
    pub key: String,
    pub value: String,
}

/// Reproducibility record written next to every set of outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, R: Serialize> {
    pub subcommand: &'a str,
    pub config_path: Option<String>,
    pub output_dir: String,
    pub overrides: &'a [Override],
    pub tool_version: &'static str,
    pub timestamp: String,
    pub files: Vec<String>,
    pub resolved: R,
}

pub fn timestamp() -> String {
    OffsetDateTime::now_utc().format(&Rfc3339).unwrap_or_default()
}

/// Destination directory plus the names of files written so far.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_with<F>(&mut self, name: &str, body: F) -> CliResult<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
        self.write_with(name, |w| longi_core::figures::write_csv(w, header, rows))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::from)?;
            writeln!(w)
        })
    }

    pub fn finish<R: Serialize>(
        mut self,
        subcommand: &str,
        config_path: Option<&Path>,
        overrides: &[Override],
        resolved: R,
    ) -> CliResult<Vec<String>> {
        let manifest = RunManifest {
            subcommand,
            config_path: config_path.map(|p| p.display().to_string()),
            output_dir: self.root.display().to_string(),
            overrides,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: timestamp(),
            files: self.written.clone(),
            resolved,
        };
        let name = format!("{subcommand}.manifest.json");
        self.write_json(&name, &manifest)?;
        Ok(self.written)
    }
}
