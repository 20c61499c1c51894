//! File and number plumbing shared by the subcommands.
//!
//! JSON goes through `serde_json`'s shortest round-trip float formatting;
//! CSV cells carry 17 significant digits. Both make outputs byte-identical
//! across runs with the same inputs.

use std::fs;
use std::path::Path;

use conjphase::error::{Error, Result};

/// Reads a whole file, wrapping I/O failures as request errors.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

/// Writes a file, creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Error::invalid(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

/// A JSON document plus the trailing newline files carry.
pub fn json_line(json: String) -> String {
    let mut line = json;
    line.push('\n');
    line
}

/// One CSV cell: 17 significant digits, enough to round-trip any double.
pub fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_round_trip() {
        for x in [0.0, 1.0, -0.1, std::f64::consts::PI, 1e-300, 6.02e23] {
            let cell = csv_number(x);
            assert_eq!(cell.parse::<f64>().unwrap(), x, "{cell}");
        }
    }
}
