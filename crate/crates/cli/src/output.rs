//! CSV writing. Rows are serde structs; the header comes from field names.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

pub fn write_csv<R: Serialize>(dir: &Path, name: &str, rows: &[R]) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(&path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Indices `0, s, 2s, …` plus the last one, with `s` chosen so that at most
/// about `max_rows` survive.
pub fn decimate(len: usize, max_rows: usize) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    let stride = len.div_ceil(max_rows.max(1)).max(1);
    let mut idx: Vec<usize> = (0..len).step_by(stride).collect();
    if *idx.last().expect("non-empty") != len - 1 {
        idx.push(len - 1);
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimation() {
        assert_eq!(decimate(5, 10), vec![0, 1, 2, 3, 4]);
        assert_eq!(decimate(10, 3), vec![0, 4, 8, 9]);
        assert_eq!(decimate(1, 3), vec![0]);
        assert!(decimate(0, 3).is_empty());
        assert!(decimate(1_000_000, 10_000).len() <= 10_001);
    }

    #[test]
    fn csv_header_and_rows() {
        #[derive(Serialize)]
        struct Row {
            n: usize,
            value: f64,
        }
        let dir = tempfile::tempdir().unwrap();
        let p = write_csv(dir.path(), "t.csv", &[Row { n: 1, value: 0.5 }, Row { n: 2, value: -1.0 }]).unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "n,value\n1,0.5\n2,-1.0\n");
    }
}
