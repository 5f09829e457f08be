use std::fs;
use std::path::{Path, PathBuf};

use tempfile::TempDir;

use crate::CliError;

/// Collects output files in a hidden directory next to their destination
/// and moves them into place only once every file has been written.
pub struct Staging {
    dir: TempDir,
    out_dir: PathBuf,
    names: Vec<String>,
}

impl Staging {
    pub fn new(out_dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
        let dir = tempfile::Builder::new()
            .prefix(".tweetscope-")
            .tempdir_in(out_dir)
            .map_err(|e| CliError::io(out_dir, e))?;
        Ok(Self {
            dir,
            out_dir: out_dir.to_path_buf(),
            names: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.names.push(name.to_string());
        Ok(())
    }

    /// Renames the staged files into the output directory and returns their
    /// final paths. Dropping a `Staging` without committing discards them.
    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut done = Vec::new();
        for name in &self.names {
            let from = self.dir.path().join(name);
            let to = self.out_dir.join(name);
            fs::rename(&from, &to).map_err(|e| CliError::io(&to, e))?;
            done.push(to);
        }
        Ok(done)
    }
}
