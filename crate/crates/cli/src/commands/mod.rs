pub mod fit;
pub mod simulate;
pub mod summarize;
pub mod validate;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use sir_rate::RemovalData;

use crate::error::{CliError, CliResult};

/// Creates the output directory and returns `dir/name`.
pub fn output_path(dir: &Path, name: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.join(name))
}

pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

pub fn read_removals(path: &Path) -> CliResult<RemovalData> {
    RemovalData::from_csv_path(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}
