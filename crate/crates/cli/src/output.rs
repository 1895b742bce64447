use std::io::Write;
use std::path::{Path, PathBuf};

use dqcd_core::Matrix;
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Output directory whose files are replaced atomically.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&root).map_err(io_err(&root))?;
        Ok(Self { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Write `contents` to a temporary file beside `name`, then rename.
    pub fn write(&self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let target = self.root.join(name);
        let dir = target.parent().unwrap_or(&self.root).to_path_buf();
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let mut tmp = NamedTempFile::new_in(&dir).map_err(io_err(&dir))?;
        tmp.write_all(contents).map_err(io_err(&target))?;
        tmp.as_file().sync_all().map_err(io_err(&target))?;
        tmp.persist(&target).map_err(|e| CliError::Io { path: target.display().to_string(), source: e.error })?;
        Ok(target)
    }
}

/// Matrix as CSV with 15 significant digits.
pub fn weights_csv(m: &Matrix) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:.14e}")).collect();
        s += &line.join(",");
        s.push('\n');
    }
    s
}

pub fn log_text(lines: &[(String, String)]) -> String {
    lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// File-name friendly rendering of a time, e.g. `0.1000`.
pub fn time_tag(t: f64) -> String {
    format!("{t:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutputDir::create(dir.path().join("nested")).unwrap();
        let p = out.write("a/b.txt", b"one").unwrap();
        out.write("a/b.txt", b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn formatting() {
        let m = Matrix::from_rows(&[vec![1.0 / 3.0, -2.0]]);
        assert_eq!(weights_csv(&m), "3.33333333333333e-1,-2.00000000000000e0\n");
        assert_eq!(time_tag(0.1), "0.1000");
        assert_eq!(log_text(&[("N".into(), "5".into())]), "N = 5\n");
    }
}
