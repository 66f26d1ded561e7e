//! Plain-text table helpers shared by the exporters.
//!
//! Tables are comma separated with a header row; floats use scientific
//! notation with 17 significant digits so values round-trip exactly.

use std::io::{self, Write};

/// `1.234567890123457e-3` style formatting.
pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `header` followed by one line per row.
pub fn write_table<W: Write>(mut out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
