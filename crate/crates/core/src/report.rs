//! Deterministic CSV and JSON writers.
//!
//! Every table has a header row and a fixed column order, and numbers are
//! printed with a fixed number of decimals, so identical inputs always
//! produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::measurement::{GuessStrategy, OutcomeDistribution, SweepRow, ORDERS, OUTCOMES};
use crate::sim::C64;
use crate::spectra::SpectralLine;

/// Decimals used for probabilities, observables and amplitudes.
pub const DECIMALS: usize = 12;
/// Decimals used for frequencies in Hz.
pub const FREQUENCY_DECIMALS: usize = 6;

/// Formats `x` with `decimals` places, printing values that round to zero
/// as positive zero.
pub fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        format!("{:.decimals$}", 0.0)
    } else {
        s
    }
}

pub fn num(x: f64) -> String {
    fixed(x, DECIMALS)
}

pub fn hz(x: f64) -> String {
    fixed(x, FREQUENCY_DECIMALS)
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Columns `m, p_r1, ..., p_r4`, one column per order.
pub fn write_distributions<W: Write>(out: W, dists: &[OutcomeDistribution]) -> Result<()> {
    let mut w = csv_writer(out);
    let mut header = vec!["m".to_string()];
    header.extend((1..=dists.len()).map(|r| format!("p_r{r}")));
    w.write_record(&header)?;
    for m in 0..OUTCOMES {
        let mut row = vec![m.to_string()];
        row.extend(dists.iter().map(|d| num(d.prob(m))));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `m, p` for a single distribution.
pub fn write_distribution<W: Write>(out: W, dist: &OutcomeDistribution) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["m", "p"])?;
    for m in 0..OUTCOMES {
        w.write_record([m.to_string(), num(dist.prob(m))])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `m, g_r1, ..., g_r4`.
pub fn write_strategy<W: Write>(out: W, g: &GuessStrategy) -> Result<()> {
    let mut w = csv_writer(out);
    let mut header = vec!["m".to_string()];
    header.extend((1..=ORDERS).map(|r| format!("g_r{r}")));
    w.write_record(&header)?;
    for (m, row) in g.rows().iter().enumerate() {
        let mut rec = vec![m.to_string()];
        rec.extend(row.iter().map(|v| num(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `spin, label, frequency_hz, amp_real, amp_imag`.
pub fn write_lines<W: Write>(out: W, lines: &[SpectralLine]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["spin", "label", "frequency_hz", "amp_real", "amp_imag"])?;
    for l in lines {
        w.write_record([
            l.spin.to_string(),
            l.label.to_string(),
            hz(l.frequency),
            num(l.amplitude.re),
            num(l.amplitude.im),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `frequency_hz, real, imag`.
pub fn write_trace<W: Write>(out: W, trace: &[(f64, C64)]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["frequency_hz", "real", "imag"])?;
    for (f, v) in trace {
        w.write_record([hz(*f), num(v.re), num(v.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per `(pi, y)` instance.
pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv_writer(out);
    let mut header: Vec<String> = ["perm", "y", "r", "inferred_r", "distance"]
        .map(String::from)
        .to_vec();
    header.extend((1..=5).map(|i| format!("O{i}")));
    header.extend((0..OUTCOMES).map(|m| format!("p_m{m}")));
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![
            row.spec.pi.to_string(),
            row.spec.y.to_string(),
            row.order.to_string(),
            row.inferred_order
                .map_or_else(|| "none".into(), |r| r.to_string()),
            format!("{:.3e}", row.deviation),
        ];
        rec.extend(row.observables.values().iter().map(|v| num(*v)));
        rec.extend(row.simulated.probs().iter().map(|v| num(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Creates `path` (and its parent directories) and runs `write` on it.
pub fn to_file<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(fs::File) -> Result<()>,
{
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    write(fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::analytic_distribution;

    #[test]
    fn fixed_point_formatting() {
        assert_eq!(num(-1e-17), "0.000000000000");
        assert_eq!(num(0.25), "0.250000000000");
        assert_eq!(hz(-3100.5), "-3100.500000");
    }

    #[test]
    fn distribution_table_layout() {
        let mut buf = Vec::new();
        write_distribution(&mut buf, &analytic_distribution(2).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "m,p");
        assert_eq!(lines[1], "0,0.500000000000");
        assert_eq!(lines[5], "4,0.500000000000");
        assert_eq!(lines.len(), 9);
    }
}
