//! Atomic, non-clobbering file output.

use crate::{CliError, Result};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// then renames it into place. Without `force` an existing file is an error.
pub fn write_atomic(path: &Path, bytes: &[u8], force: bool) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Output(e.to_string()))?;
    tmp.write_all(bytes).and_then(|_| tmp.as_file().sync_all()).map_err(|e| CliError::Output(e.to_string()))?;
    let done = if force { tmp.persist(path).map(|_| ()) } else { tmp.persist_noclobber(path).map(|_| ()) };
    done.map_err(|e| {
        if e.error.kind() == std::io::ErrorKind::AlreadyExists {
            CliError::Validation(format!("{} exists; pass --force to overwrite", path.display()))
        } else {
            CliError::Output(format!("{}: {}", path.display(), e.error))
        }
    })
}

#[derive(Debug, Clone)]
pub struct OutputDir {
    pub dir: PathBuf,
    pub force: bool,
}

impl OutputDir {
    pub fn new(dir: impl Into<PathBuf>, force: bool) -> Self {
        Self { dir: dir.into(), force }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Fails before anything is written if one of `names` would be overwritten.
    pub fn claim(&self, names: &[String]) -> Result<()> {
        if self.force {
            return Ok(());
        }
        match names.iter().map(|n| self.path(n)).find(|p| p.exists()) {
            Some(p) => Err(CliError::Validation(format!("{} exists; pass --force to overwrite", p.display()))),
            None => Ok(()),
        }
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let p = self.path(name);
        write_atomic(&p, bytes, self.force)?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_to_clobber_without_force() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("sub/a.csv");
        write_atomic(&p, b"one", false).unwrap();
        let e = write_atomic(&p, b"two", false).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert_eq!(std::fs::read(&p).unwrap(), b"one");
        write_atomic(&p, b"two", true).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        // no temp files left behind
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn claim_checks_every_name() {
        let d = tempfile::tempdir().unwrap();
        let out = OutputDir::new(d.path(), false);
        out.write("b", b"x").unwrap();
        assert!(out.claim(&["a".into()]).is_ok());
        assert!(out.claim(&["a".into(), "b".into()]).is_err());
        assert!(OutputDir::new(d.path(), true).claim(&["b".into()]).is_ok());
    }
}
