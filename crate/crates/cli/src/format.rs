//! Fixed float formatting and CSV/JSON emission.

use std::io::{self, Write};

use paulimem::analysis::{CriticalMemoryResult, EntropyReport};
use serde::Serialize;

pub const REPORT_HEADER: &str = "n,p,mu,encoding,entropy_bits,holevo_bound_bits,per_use_bits";
pub const CRITICAL_HEADER: &str = "n,p,mu_c";
pub const SPECTRUM_HEADER: &str = "n,p,mu,encoding,eigenvalue,multiplicity";

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest round-trip text of `x` rounded to 12 significant digits.
pub fn num(x: f64) -> String {
    format!("{}", round12(x))
}

#[derive(Serialize)]
struct ReportRow {
    n: usize,
    p: f64,
    mu: f64,
    encoding: String,
    entropy_bits: f64,
    holevo_bound_bits: f64,
    per_use_bits: f64,
}

impl From<&EntropyReport> for ReportRow {
    fn from(r: &EntropyReport) -> Self {
        ReportRow {
            n: r.n,
            p: round12(r.p),
            mu: round12(r.mu),
            encoding: r.encoding.to_string(),
            entropy_bits: round12(r.entropy_bits),
            holevo_bound_bits: round12(r.holevo_bound_bits),
            per_use_bits: round12(r.per_use_bits),
        }
    }
}

pub fn write_reports_csv(out: &mut dyn Write, rows: &[EntropyReport]) -> io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            num(r.p),
            num(r.mu),
            r.encoding,
            num(r.entropy_bits),
            num(r.holevo_bound_bits),
            num(r.per_use_bits)
        )?;
    }
    Ok(())
}

pub fn write_reports_json(out: &mut dyn Write, rows: &[EntropyReport]) -> io::Result<()> {
    let rows: Vec<ReportRow> = rows.iter().map(ReportRow::from).collect();
    write_json(out, &rows)
}

#[derive(Serialize)]
struct CriticalRow {
    n: usize,
    p: f64,
    mu_c: Option<f64>,
    bracket: Option<(f64, f64)>,
    tol: f64,
    crossings: Vec<f64>,
    multiple_crossings: bool,
}

pub fn write_critical_csv(out: &mut dyn Write, rows: &[CriticalMemoryResult]) -> io::Result<()> {
    writeln!(out, "{CRITICAL_HEADER}")?;
    for r in rows {
        let mu_c = r.mu_c.map(num).unwrap_or_else(|| "none".to_string());
        writeln!(out, "{},{},{}", r.n, num(r.p), mu_c)?;
    }
    Ok(())
}

pub fn write_critical_json(out: &mut dyn Write, rows: &[CriticalMemoryResult]) -> io::Result<()> {
    let rows: Vec<CriticalRow> = rows
        .iter()
        .map(|r| CriticalRow {
            n: r.n,
            p: round12(r.p),
            mu_c: r.mu_c.map(round12),
            bracket: r.bracket.map(|(a, b)| (round12(a), round12(b))),
            tol: r.tol,
            crossings: r.crossings.iter().copied().map(round12).collect(),
            multiple_crossings: r.multiple_crossings,
        })
        .collect();
    write_json(out, &rows)
}

pub fn write_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.404_707_749_155_459_4), "1.40470774916");
        assert_eq!(num(0.1 + 0.2), "0.3");
        assert_eq!(num(123456.789012345), "123456.789012");
    }
}
