use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;

pub const OUT_DIR_ENV: &str = "REPLIBOUND_OUT_DIR";

/// Comment header written at the top of every output.
pub fn header(command: &str, config: &[String], seed: Option<u64>) -> String {
    let mut h = format!("# replibound {}\n# command: {command}\n", env!("CARGO_PKG_VERSION"));
    for line in config {
        h.push_str("# config: ");
        h.push_str(line);
        h.push('\n');
    }
    if let Some(seed) = seed {
        h.push_str(&format!("# seed: {seed}\n"));
    }
    h
}

/// Relative paths resolve against `$REPLIBOUND_OUT_DIR` when it is set.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Sends `contents` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let p = resolve(p);
            write_atomic(&p, contents)?;
            eprintln!("wrote {}", p.display());
            Ok(())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
