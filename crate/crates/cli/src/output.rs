use std::io::Write;
use std::path::{Path, PathBuf};

use attnet::Error;

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Output files collected in memory and written only once the whole
/// command has succeeded.
#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Staged {
    pub fn add(&mut self, name: impl Into<PathBuf>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn json<T: serde::Serialize>(&mut self, name: impl Into<PathBuf>, value: &T) {
        let mut text = serde_json::to_string_pretty(value).expect("report serialization is infallible");
        text.push('\n');
        self.add(name, text);
    }

    pub fn names(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    /// Writes every file under `dir`, each through a temporary file in the
    /// same directory renamed into place.
    pub fn commit(self, dir: &Path) -> Result<(), Error> {
        for (name, contents) in &self.files {
            let target = dir.join(name);
            let parent = target.parent().unwrap_or(dir);
            std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
            let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(|e| io_error(parent, e))?;
            tmp.write_all(contents).map_err(|e| io_error(&target, e))?;
            tmp.as_file().sync_all().map_err(|e| io_error(&target, e))?;
            tmp.persist(&target).map_err(|e| io_error(&target, e.error))?;
        }
        Ok(())
    }
}

/// File-name-safe form of a group or cohort label.
pub fn file_label(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "_".into()
    } else {
        s
    }
}
