use std::fs;
use std::path::{Path, PathBuf};

use corefud_core::model::{parse_conllu_bytes, Corpus};

use crate::error::{CliError, Result};

/// Reads and parses a CoNLL-U file; parser warnings go to stderr.
pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let parsed = parse_conllu_bytes(&bytes).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: line {}: {}", path.display(), w.line, w.message);
    }
    Ok(parsed.corpus)
}

pub fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    String::from_utf8(bytes).map_err(|_| CliError::Input { path: path.to_path_buf(), message: "not valid UTF-8".into() })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Fails with a config error unless every input exists as a file.
pub fn check_inputs<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> Result<()> {
    for p in paths {
        if !p.is_file() {
            return Err(CliError::Config(format!("{}: input file not found", p.display())));
        }
    }
    Ok(())
}

/// Creates the output directory up front so a bad path fails before work.
pub fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: cannot create output directory: {e}", dir.display())))
}

/// Writes to `out` when given, otherwise to stdout.
pub fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
