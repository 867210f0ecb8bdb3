//! Artifact sinks: stdout or an output directory, plus figure bundles with
//! a manifest.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, Kind, Result};
use crate::table::{Column, Table};

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::new(Kind::Io, format!("cannot create output directory {}: {e}", dir.display()))
    })
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::new(Kind::Io, format!("cannot write {}: {e}", path.display())))
}

fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Where the artifact of a single-output command goes.
pub struct Sink {
    dir: Option<PathBuf>,
    format: Format,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, format: Format) -> Self {
        Self { dir, format }
    }

    pub fn table(&self, stem: &str, table: &Table) -> Result<()> {
        match &self.dir {
            Some(dir) => {
                create_dir(dir)?;
                let path = dir.join(format!("{stem}.{}", self.format.extension()));
                let mut w = create_file(&path)?;
                table.write(&mut w, self.format)?;
                w.flush()?;
                log::info!("wrote {}", path.display());
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                table.write(&mut w, self.format)?;
                w.flush()?;
            }
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&self, stem: &str, value: &T) -> Result<()> {
        match &self.dir {
            Some(dir) => {
                create_dir(dir)?;
                let path = dir.join(format!("{stem}.json"));
                write_json(create_file(&path)?, value)?;
                log::info!("wrote {}", path.display());
            }
            None => write_json(io::stdout().lock(), value)?,
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct ManifestFile {
    path: String,
    panel: String,
    description: String,
    format: &'static str,
    columns: Vec<Column>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    figure: String,
    description: String,
    files: Vec<ManifestFile>,
}

/// Multi-file figure output; `finish` writes `manifest.json`.
pub struct Bundle {
    dir: PathBuf,
    format: Format,
    manifest: Manifest,
}

impl Bundle {
    pub fn new(dir: PathBuf, format: Format, figure: &str, description: &str) -> Result<Self> {
        create_dir(&dir)?;
        Ok(Self {
            dir,
            format,
            manifest: Manifest {
                figure: figure.to_string(),
                description: description.to_string(),
                files: Vec::new(),
            },
        })
    }

    pub fn table(&mut self, stem: &str, panel: &str, description: &str, table: &Table) -> Result<()> {
        let name = format!("{stem}.{}", self.format.extension());
        let mut w = create_file(&self.dir.join(&name))?;
        table.write(&mut w, self.format)?;
        w.flush()?;
        self.manifest.files.push(ManifestFile {
            path: name,
            panel: panel.to_string(),
            description: description.to_string(),
            format: self.format.extension(),
            columns: table.columns.clone(),
        });
        Ok(())
    }

    /// A JSON report; `fields` documents its top-level keys.
    pub fn json<T: Serialize>(
        &mut self,
        stem: &str,
        panel: &str,
        description: &str,
        fields: Vec<Column>,
        value: &T,
    ) -> Result<()> {
        let name = format!("{stem}.json");
        write_json(create_file(&self.dir.join(&name))?, value)?;
        self.manifest.files.push(ManifestFile {
            path: name,
            panel: panel.to_string(),
            description: description.to_string(),
            format: "json",
            columns: fields,
        });
        Ok(())
    }

    pub fn finish(self) -> Result<PathBuf> {
        let path = self.dir.join("manifest.json");
        write_json(create_file(&path)?, &self.manifest)?;
        Ok(self.dir)
    }
}
