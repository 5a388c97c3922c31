use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::Calibration;
use crate::{Error, Result};

/// Appends one JSON line to the calibration store.
pub fn append_calibration(path: impl AsRef<Path>, cal: &Calibration) -> Result<()> {
    cal.validate()?;
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{}", serde_json::to_string(cal)?)?;
    Ok(())
}

pub fn read_calibrations(path: impl AsRef<Path>) -> Result<Vec<Calibration>> {
    let f = File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let c: Calibration =
            serde_json::from_str(&line).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        c.validate()?;
        out.push(c);
    }
    Ok(out)
}

/// Most recent record for a register size and depth tag; later lines win
/// ties in timestamp.
pub fn latest_calibration(
    path: impl AsRef<Path>,
    n: usize,
    depth_tag: &str,
) -> Result<Option<Calibration>> {
    Ok(read_calibrations(path)?
        .into_iter()
        .filter(|c| c.n == n && c.depth_tag == depth_tag)
        .fold(None, |best: Option<Calibration>, c| match best {
            Some(b) if b.timestamp > c.timestamp => Some(b),
            _ => Some(c),
        }))
}
