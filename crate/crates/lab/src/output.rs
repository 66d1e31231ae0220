//! CSV artifacts. Floats are written with 17 significant digits so files
//! round-trip exactly and compare byte for byte across runs.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use stable_sde_core::{Clock, JumpPath, SolutionPath};

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Empty cell for absent values.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<(), csv::Error>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_driver(path: &Path, driver: &JumpPath) -> Result<(), csv::Error> {
    write_table(path, &["t", "dz"], driver.events().map(|(t, dz)| vec![num(t), num(dz)]))
}

pub fn write_solution(path: &Path, sol: &SolutionPath) -> Result<(), csv::Error> {
    write_table(path, &["t", "x_pre", "x_post"], sol.events().iter().map(|e| vec![num(e.t), num(e.pre), num(e.post)]))
}

/// `(u, B(u))` at every breakpoint.
pub fn write_clock(path: &Path, clock: &Clock) -> Result<(), csv::Error> {
    write_table(path, &["u", "B"], clock.breakpoints().iter().zip(clock.values()).map(|(&u, &b)| vec![num(u), num(b)]))
}

/// Each level's value at `0`, at each of its jumps and at the horizon.
pub fn write_ladder(path: &Path, cutoffs: &[f64], levels: &[SolutionPath]) -> Result<(), csv::Error> {
    let rows = cutoffs.iter().zip(levels).flat_map(|(&eps, sol)| {
        let start = std::iter::once(vec![num(eps), num(0.0), num(sol.x0())]);
        let jumps = sol.events().iter().map(move |e| vec![num(eps), num(e.t), num(e.post)]);
        let end = std::iter::once(vec![num(eps), num(sol.horizon()), num(sol.terminal())]);
        start.chain(jumps).chain(end)
    });
    write_table(path, &["eps", "t", "x"], rows)
}

/// Grid path `(s_i, Z_{s_i})`.
pub fn write_grid(path: &Path, step: f64, values: &[f64]) -> Result<(), csv::Error> {
    write_table(path, &["s", "value"], values.iter().enumerate().map(|(i, &v)| vec![num(i as f64 * step), num(v)]))
}
