//! CSV result tables.
//!
//! Each table starts with a `# schema_version=N` comment line followed by
//! the header row. Floats carry 9 significant digits.

use std::io::Write;

use nftrack_core::scenario::MapCell;
use nftrack_core::{EtaSweepRow, TrackRecord};

pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const TRACK_HEADER: [&str; 9] =
    ["step", "truth_x", "truth_y", "est_x", "est_y", "error_m", "objective", "blind", "elapsed_s"];
pub const MAP_HEADER: [&str; 4] = ["x", "y", "rmse_m", "trackable"];
pub const SWEEP_HEADER: [&str; 4] = ["eta", "model", "rmse_m", "n_draws"];

/// Shortest decimal rendering of `x` rounded to 9 significant digits,
/// switching to exponent notation outside `[1e-5, 1e9)`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn writer<W: Write>(mut out: W, header: &[&str]) -> csv::Result<csv::Writer<W>> {
    writeln!(out, "# schema_version={CSV_SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

/// Trajectory table. `elapsed_s` stays empty unless `timing` is set, which
/// keeps the default output reproducible byte for byte.
pub fn write_track<W: Write>(out: W, records: &[TrackRecord], timing: bool) -> csv::Result<()> {
    let mut w = writer(out, &TRACK_HEADER)?;
    for r in records {
        w.write_record([
            r.step.to_string(),
            fmt_float(r.truth.x),
            fmt_float(r.truth.y),
            fmt_float(r.estimate.x),
            fmt_float(r.estimate.y),
            fmt_float(r.error),
            fmt_float(r.objective),
            flag(r.blind).to_string(),
            if timing { fmt_float(r.elapsed) } else { String::new() },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// RMSE map; `rmse_m` is empty where no estimate exists.
pub fn write_map<W: Write>(out: W, cells: &[MapCell]) -> csv::Result<()> {
    let mut w = writer(out, &MAP_HEADER)?;
    for c in cells {
        w.write_record([
            fmt_float(c.position.x),
            fmt_float(c.position.y),
            c.rmse.map(fmt_float).unwrap_or_default(),
            flag(c.trackable).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(out: W, rows: &[EtaSweepRow]) -> csv::Result<()> {
    let mut w = writer(out, &SWEEP_HEADER)?;
    for r in rows {
        w.write_record([fmt_float(r.eta), r.model.label().to_string(), fmt_float(r.rmse), r.n_draws.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(10.3), "10.3");
        assert_eq!(fmt_float(-2.5), "-2.5");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_float(123456789.4), "123456789");
        assert_eq!(fmt_float(9.9999999996), "10");
        assert_eq!(fmt_float(2.408e-15), "2.408e-15");
        assert_eq!(fmt_float(1.5e12), "1.5e12");
        assert_eq!(fmt_float(0.000123456789123), "0.000123456789");
    }

    #[test]
    fn formatted_floats_round_trip() {
        for x in [std::f64::consts::PI, 1e-7 / 3.0, 17.2, 0.0125, 6.02214076e23, -0.049999999] {
            let back: f64 = fmt_float(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-8 * x.abs(), "{x} -> {back}");
        }
    }
}
