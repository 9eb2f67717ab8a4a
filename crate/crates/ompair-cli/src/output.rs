//! Output files: CSV tables, a TOML run manifest, and a gnuplot helper.
//!
//! Every experiment writes into a single output directory. Numbers are
//! written in scientific notation with enough digits to round-trip f64.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::config::Config;

/// Format a float for CSV; full round-trip precision.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Write one CSV file: a header row then data rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text)
}

/// Write the run manifest: resolved config, tool version, and the
/// subcommand that produced the directory.
pub fn write_manifest(dir: &Path, command: &str, config: &Config) -> io::Result<()> {
    let body = toml::to_string_pretty(config)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    let mut text = String::new();
    let _ = writeln!(text, "command = {command:?}");
    let _ = writeln!(text, "version = {:?}", env!("CARGO_PKG_VERSION"));
    text.push('\n');
    text.push_str(&body);
    fs::write(dir.join("manifest.toml"), text)
}

/// Emit a gnuplot script rendering a sync map CSV as a heat map.
pub fn write_syncmap_plot(dir: &Path, csv_name: &str) -> io::Result<()> {
    let script = format!(
        "set datafile separator ','\n\
         set pm3d map\n\
         set xlabel 'K_c'\n\
         set ylabel 'delta omega_m'\n\
         set cbrange [0:1]\n\
         set title 'max delayed correlation'\n\
         splot '{csv_name}' using 2:1:4 every ::1 with pm3d notitle\n"
    );
    fs::write(dir.join("plot_syncmap.gp"), script)
}

/// Create the output directory if needed; refuse to write into a path that
/// exists but is not a directory.
pub fn ensure_dir(dir: &Path) -> io::Result<()> {
    if dir.exists() {
        if !dir.is_dir() {
            return Err(io::Error::new(
                io::ErrorKind::AlreadyExists,
                format!("{} exists and is not a directory", dir.display()),
            ));
        }
        return Ok(());
    }
    fs::create_dir_all(dir)
}
