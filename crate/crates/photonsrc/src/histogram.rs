//! Plain-text correlation histograms.
//!
//! ```text
//! # mode: hom
//! # bin_width_ns: 0.05
//! # delay_origin_ns: -42.7
//! # rep_period_ns: 12.195121951219512
//! # pulse_pair_delay_ns: 3
//! # acquisition_time_s: 480
//! # bins: 1708
//! delay_ns,counts
//! -42.675,3
//! ...
//! ```
//!
//! Every float is written in its shortest round-trip form, so reading and
//! rewriting a file reproduces it byte for byte. The delay column holds bin
//! centres and must agree with the header.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use photonsrc_core::tcspc::{CorrelationHistogram, HistogramLayout, HistogramMode};

use crate::error::{CliError, FormatError};

const KEYS: [&str; 7] = [
    "mode",
    "bin_width_ns",
    "delay_origin_ns",
    "rep_period_ns",
    "pulse_pair_delay_ns",
    "acquisition_time_s",
    "bins",
];

pub fn to_string(h: &CorrelationHistogram) -> String {
    let l = &h.layout;
    let mut s = String::with_capacity(24 * l.bins + 256);
    let _ = writeln!(s, "# mode: {}", l.mode.as_str());
    let _ = writeln!(s, "# bin_width_ns: {}", l.bin_width);
    let _ = writeln!(s, "# delay_origin_ns: {}", l.delay_origin);
    let _ = writeln!(s, "# rep_period_ns: {}", l.rep_period);
    let _ = writeln!(s, "# pulse_pair_delay_ns: {}", l.pulse_pair_delay);
    let _ = writeln!(s, "# acquisition_time_s: {}", l.acquisition_time);
    let _ = writeln!(s, "# bins: {}", l.bins);
    s.push_str("delay_ns,counts\n");
    for (i, c) in h.counts.iter().enumerate() {
        let _ = writeln!(s, "{},{}", l.bin_center(i), c);
    }
    s
}

fn number<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, FormatError> {
    v.parse()
        .map_err(|_| FormatError::new(line, format!("{key}: cannot parse {v:?}")))
}

pub fn parse(text: &str) -> Result<CorrelationHistogram, FormatError> {
    let mut header: [Option<(usize, &str)>; 7] = [None; 7];
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut column_line = None;
    for (n, line) in lines.by_ref() {
        let Some(entry) = line.strip_prefix('#') else {
            column_line = Some((n, line));
            break;
        };
        let (key, value) = entry
            .split_once(':')
            .ok_or_else(|| FormatError::new(n, "header line without ':'"))?;
        let key = key.trim();
        let slot = KEYS
            .iter()
            .position(|&k| k == key)
            .ok_or_else(|| FormatError::new(n, format!("unknown header key {key:?}")))?;
        if header[slot].is_some() {
            return Err(FormatError::new(n, format!("duplicate header key {key:?}")));
        }
        header[slot] = Some((n, value.trim()));
    }
    let get =
        |slot: usize| header[slot].ok_or_else(|| FormatError::new(1, format!("missing header key {:?}", KEYS[slot])));
    let (n, mode) = get(0)?;
    let mode = HistogramMode::parse(mode).ok_or_else(|| FormatError::new(n, format!("unknown mode {mode:?}")))?;
    let float = |slot: usize| -> Result<f64, FormatError> {
        let (n, v) = get(slot)?;
        number(n, KEYS[slot], v)
    };
    let (bins_line, bins) = get(6)?;
    let layout = HistogramLayout {
        mode,
        bin_width: float(1)?,
        delay_origin: float(2)?,
        rep_period: float(3)?,
        pulse_pair_delay: float(4)?,
        acquisition_time: float(5)?,
        bins: number(bins_line, "bins", bins)?,
    };
    layout
        .validate()
        .map_err(|e| FormatError::new(bins_line, format!("invalid layout: {e}")))?;

    match column_line {
        Some((_, "delay_ns,counts")) => {}
        Some((n, other)) => return Err(FormatError::new(n, format!("expected column header, found {other:?}"))),
        None => return Err(FormatError::new(text.lines().count() + 1, "missing column header")),
    }
    let mut counts = Vec::with_capacity(layout.bins);
    for (n, line) in lines {
        if counts.len() == layout.bins {
            return Err(FormatError::new(n, format!("more than {} rows", layout.bins)));
        }
        let (delay, count) = line
            .split_once(',')
            .ok_or_else(|| FormatError::new(n, "expected delay_ns,counts"))?;
        let delay: f64 = number(n, "delay_ns", delay)?;
        let expected = layout.bin_center(counts.len());
        if (delay - expected).abs() > 1e-9 * layout.bin_width.max(expected.abs()) {
            return Err(FormatError::new(
                n,
                format!("delay {delay} does not match bin centre {expected}"),
            ));
        }
        counts.push(number(n, "counts", count)?);
    }
    if counts.len() != layout.bins {
        return Err(FormatError::new(
            text.lines().count(),
            format!("{} rows for {} bins", counts.len(), layout.bins),
        ));
    }
    CorrelationHistogram::new(layout, counts).map_err(|e| FormatError::new(bins_line, e.to_string()))
}

pub fn read(path: &Path) -> Result<CorrelationHistogram, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, h: &CorrelationHistogram) -> Result<(), CliError> {
    fs::write(path, to_string(h)).map_err(|e| CliError::io(path, e))
}
