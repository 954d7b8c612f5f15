//! Two-column drive-cycle files.
//!
//! ```text
//! # optional comment lines, kept as the cycle's source tag
//! time_s,speed_mph
//! 0,0.0
//! 1,2.5
//! ```
//!
//! The header is exactly `time_s,speed_mps` or `time_s,speed_mph`. Timestamps
//! must be uniformly spaced to within 1e-6 s.

use std::fmt::Write as _;
use std::path::Path;

use cyclesmooth_core::DriveCycle;

use crate::error::{io_err, Error, Result};

pub const MPH_TO_M_S: f64 = 0.44704;
const TIME_TOLERANCE_S: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedUnit {
    MetersPerSecond,
    MilesPerHour,
}

impl SpeedUnit {
    fn header(self) -> &'static str {
        match self {
            SpeedUnit::MetersPerSecond => "time_s,speed_mps",
            SpeedUnit::MilesPerHour => "time_s,speed_mph",
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: None,
        line: Some(line),
        message: message.into(),
    }
}

/// Parses a cycle document. `name` becomes the cycle's name.
pub fn parse_cycle(text: &str, name: &str) -> Result<DriveCycle> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut comments = Vec::new();
    let mut header_line = None;
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        let trimmed = line.trim_end_matches(['\n', '\r']);
        if let Some(comment) = trimmed.strip_prefix('#') {
            comments.push(comment.trim().to_string());
            offset += line.len();
            continue;
        }
        header_line = Some((i + 1, trimmed));
        break;
    }
    let (header_no, header) =
        header_line.ok_or_else(|| parse_err(1, "missing header `time_s,speed_mps` or `time_s,speed_mph`"))?;
    let unit = match header {
        "time_s,speed_mps" => SpeedUnit::MetersPerSecond,
        "time_s,speed_mph" => SpeedUnit::MilesPerHour,
        other => {
            return Err(parse_err(
                header_no,
                format!("header must be `time_s,speed_mps` or `time_s,speed_mph`, found `{other}`"),
            ))
        }
    };
    let scale = match unit {
        SpeedUnit::MetersPerSecond => 1.0,
        SpeedUnit::MilesPerHour => MPH_TO_M_S,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(&text.as_bytes()[offset..]);
    let mut times: Vec<(usize, f64)> = Vec::new();
    let mut speeds = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(header_no, |p| header_no - 1 + p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = header_no - 1 + record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let number = |idx: usize, what: &str| -> Result<f64> {
            let field = &record[idx];
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("{what} `{field}` is not a finite number")))
        };
        let t = number(0, "time")?;
        let v = number(1, "speed")?;
        if v < 0.0 {
            return Err(parse_err(line, format!("negative speed {v}")));
        }
        times.push((line, t));
        speeds.push(v * scale);
    }
    if times.len() < 2 {
        return Err(parse_err(header_no, "a cycle needs at least two samples"));
    }
    let t0 = times[0].1;
    if !(times[1].1 > t0) {
        return Err(parse_err(times[1].0, "timestamps must increase"));
    }
    // Spacing from the full span, snapped to a whole nanosecond when it is
    // that close, so `0.1` comes back as exactly 0.1.
    let span_dt = (times[times.len() - 1].1 - t0) / (times.len() - 1) as f64;
    let snapped = (span_dt * 1e9).round() / 1e9;
    let dt = if (snapped - span_dt).abs() <= 1e-12 * span_dt.max(1.0) {
        snapped
    } else {
        span_dt
    };
    if !(dt > 0.0) {
        return Err(parse_err(times[1].0, "timestamps must increase"));
    }
    let first_step = times[1].1 - t0;
    for w in times.windows(2) {
        let step = w[1].1 - w[0].1;
        if (step - first_step).abs() > 2.0 * TIME_TOLERANCE_S {
            return Err(parse_err(
                w[1].0,
                format!("non-uniform sampling: step {step} s after {} s, expected {first_step} s", w[0].1),
            ));
        }
    }
    for (k, &(line, t)) in times.iter().enumerate() {
        let expected = t0 + k as f64 * dt;
        if (t - expected).abs() > TIME_TOLERANCE_S {
            return Err(parse_err(
                line,
                format!("non-uniform sampling: time {t} s, expected {expected} s (dt = {dt} s)"),
            ));
        }
    }
    let cycle = DriveCycle::new(name, dt, speeds)?;
    Ok(cycle.with_source(comments.join("\n")))
}

/// Reads a cycle file; the file stem names the cycle.
pub fn read_cycle(path: &Path) -> Result<DriveCycle> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "cycle".to_string());
    parse_cycle(&text, &name).map_err(|e| e.in_file(path))
}

/// Renders a cycle in m/s. The source tag is written as comment lines.
pub fn format_cycle(cycle: &DriveCycle) -> String {
    let mut out = String::new();
    for line in cycle.source().lines().filter(|l| !l.is_empty()) {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{}", SpeedUnit::MetersPerSecond.header());
    for (k, v) in cycle.speeds().iter().enumerate() {
        let _ = writeln!(out, "{},{}", cycle.time_at(k), v);
    }
    out
}

pub fn write_cycle(path: &Path, cycle: &DriveCycle) -> Result<()> {
    std::fs::write(path, format_cycle(cycle)).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: Error) -> Option<usize> {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn reads_mps() {
        let c = parse_cycle("time_s,speed_mps\n0,0\n1,5\n2,10\n", "x").unwrap();
        assert_eq!(c.dt_s(), 1.0);
        assert_eq!(c.speeds(), &[0.0, 5.0, 10.0]);
    }

    #[test]
    fn converts_mph() {
        let c = parse_cycle("time_s,speed_mph\n0,22.369\n1,0\n", "x").unwrap();
        assert!((c.speeds()[0] - 22.369 * 0.44704).abs() < 1e-12);
        assert!((c.speeds()[0] - 10.0).abs() < 1e-3);
    }

    #[test]
    fn comments_become_source() {
        let c = parse_cycle("# from somewhere\n#second\ntime_s,speed_mps\n0,1\n1,1\n", "x").unwrap();
        assert_eq!(c.source(), "from somewhere\nsecond");
    }

    #[test]
    fn rejects_non_uniform_sampling() {
        let err = parse_cycle("time_s,speed_mps\n0,0\n1,5\n2.5,10\n", "x").unwrap_err();
        assert_eq!(line_of(err), Some(4));
    }

    #[test]
    fn tolerates_tiny_jitter() {
        assert!(parse_cycle("time_s,speed_mps\n0,0\n1.0000005,5\n2,10\n", "x").is_ok());
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = parse_cycle("# c\ntime_s,speed_mps\n0,0\n1,abc\n", "x").unwrap_err();
        assert_eq!(line_of(err), Some(4));
        let err = parse_cycle("time_s,speed_mps\n0,0\n1,2,3\n", "x").unwrap_err();
        assert_eq!(line_of(err), Some(3));
    }

    #[test]
    fn negative_speed_is_rejected() {
        let err = parse_cycle("time_s,speed_mps\n0,0\n1,-2\n", "x").unwrap_err();
        assert_eq!(line_of(err), Some(3));
    }

    #[test]
    fn bad_header() {
        assert_eq!(line_of(parse_cycle("t,v\n0,0\n", "x").unwrap_err()), Some(1));
        assert_eq!(line_of(parse_cycle("# only\n", "x").unwrap_err()), Some(1));
        assert!(parse_cycle("time_s,speed_mps\n0,0\n", "x").is_err());
    }

    #[test]
    fn round_trip() {
        let c = DriveCycle::new("r", 0.1, vec![0.0, 1.0 / 3.0, 2.5, 1e-7, 30.125])
            .unwrap()
            .with_source("a\nb");
        let back = parse_cycle(&format_cycle(&c), "r").unwrap();
        assert_eq!(back, c);
    }
}
