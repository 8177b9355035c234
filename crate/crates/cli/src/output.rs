//! CSV and JSON sinks. Every file name is fixed per verb so that repeated
//! runs overwrite rather than accumulate.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct Sink {
    dir: PathBuf,
    formats: Vec<Format>,
    written: std::cell::RefCell<Vec<PathBuf>>,
}

impl Sink {
    pub fn new(dir: impl Into<PathBuf>, formats: Vec<Format>) -> Self {
        Self {
            dir: dir.into(),
            formats,
            written: Default::default(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn written(&self) -> Vec<PathBuf> {
        self.written.borrow().clone()
    }

    fn prepare(&self, name: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.dir).map_err(|source| CliError::Write {
            path: self.dir.clone(),
            source,
        })?;
        let path = self.dir.join(name);
        self.written.borrow_mut().push(path.clone());
        Ok(path)
    }

    /// Writes `<stem>.json` if JSON output is enabled.
    pub fn json<T: Serialize + ?Sized>(&self, stem: &str, value: &T) -> Result<(), CliError> {
        if !self.wants(Format::Json) {
            return Ok(());
        }
        let path = self.prepare(&format!("{stem}.json"))?;
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).map_err(|source| CliError::Write { path, source })
    }

    /// Writes `<stem>.csv` if CSV output is enabled; `rows` serialize as records.
    pub fn csv<R: Serialize>(
        &self,
        stem: &str,
        rows: impl IntoIterator<Item = R>,
    ) -> Result<(), CliError> {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        let path = self.prepare(&format!("{stem}.csv"))?;
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|source| CliError::Write { path, source })
    }
}
