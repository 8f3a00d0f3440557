//! Output-path resolution and atomic file writing.

use std::path::{Path, PathBuf};

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "QRS_OUTPUT_DIR";

/// Resolves the destination: an explicit path wins; otherwise the default
/// file name lands in $QRS_OUTPUT_DIR (or the working directory).
pub fn resolve(out: Option<PathBuf>, default_name: &str) -> PathBuf {
    match out {
        Some(path) => path,
        None => match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) => Path::new(&dir).join(default_name),
            None => PathBuf::from(default_name),
        },
    }
}

/// Write-then-rename so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = match path.file_name() {
        Some(name) => {
            let mut n = name.to_os_string();
            n.push(".tmp");
            path.with_file_name(n)
        }
        None => return Err(CliError::Internal(format!("bad path {}", path.display()))),
    };
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::Internal(format!("write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Internal(format!("rename to {}: {e}", path.display())))?;
    Ok(())
}
