//! Tick CSV ingestion and atomic output writers.
//!
//! Input files carry a `timestamp,price` header (extra columns are ignored,
//! an optional `date` column splits sessions) and may contain `#` comment
//! lines. Recognized comment keys are `T=<seconds>`, `session_start=` and
//! `session_end=`. Timestamps are decimal seconds, ISO-8601 datetimes or
//! `HH:MM:SS[.f]` times of day; all are normalized to seconds since the
//! session start (the explicit one, or else the first row of the session).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::Serialize;

use crate::chains::TickMarks;
use crate::error::{Error, Result};
use crate::hawkes::EventSequence;
use crate::price::PricePath;

/// Offset used to separate events that share a timestamp.
pub const NUDGE: f64 = 1e-6;

/// How price moves of more than one tick are turned into events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpPolicy {
    /// One event with mark `sign(ΔS)·δ`; the extra ticks are dropped and counted.
    #[default]
    Truncate,
    /// `k` events of the same sign, spaced by [`NUDGE`].
    Split,
}

/// One session of `(seconds since session start, mid-price)` rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TickDataset {
    pub label: Option<String>,
    pub rows: Vec<(f64, f64)>,
    /// End of the observation window in seconds since session start.
    pub window_end: f64,
    /// Source line of every row, for error messages.
    #[serde(skip)]
    pub lines: Vec<usize>,
}

/// Events and marks extracted from one session.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub label: Option<String>,
    pub events: EventSequence,
    pub marks: TickMarks,
    pub initial_price: f64,
    pub rows: usize,
    pub truncated_ticks: usize,
    pub nudged: usize,
    pub off_grid: usize,
    pub warnings: Vec<String>,
}

impl Ingested {
    pub fn price_path(&self) -> Result<PricePath> {
        PricePath::new(self.initial_price, self.events.clone(), self.marks.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Stamp {
    Seconds(f64),
    DateTime(NaiveDateTime),
    TimeOfDay(f64),
}

impl Stamp {
    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Ok(v) = s.parse::<f64>() {
            return v.is_finite().then_some(Stamp::Seconds(v));
        }
        if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(s) {
            return Some(Stamp::DateTime(dt.naive_utc()));
        }
        for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
            if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
                return Some(Stamp::DateTime(dt));
            }
        }
        for fmt in ["%H:%M:%S%.f", "%H:%M"] {
            if let Ok(t) = NaiveTime::parse_from_str(s, fmt) {
                return Some(Stamp::TimeOfDay(seconds_of_day(t)));
            }
        }
        None
    }

    fn kind(&self) -> u8 {
        match self {
            Stamp::Seconds(_) => 0,
            Stamp::DateTime(_) => 1,
            Stamp::TimeOfDay(_) => 2,
        }
    }

    /// Seconds within the day (or raw seconds) and the calendar date if known.
    fn split(&self) -> (f64, Option<NaiveDate>) {
        match *self {
            Stamp::Seconds(v) | Stamp::TimeOfDay(v) => (v, None),
            Stamp::DateTime(dt) => (seconds_of_day(dt.time()), Some(dt.date())),
        }
    }
}

fn seconds_of_day(t: NaiveTime) -> f64 {
    f64::from(t.num_seconds_from_midnight()) + f64::from(t.nanosecond()) * 1e-9
}

#[derive(Debug, Default)]
struct Meta {
    window: Option<f64>,
    session_start: Option<f64>,
    session_end: Option<f64>,
}

fn parse_meta(text: &str, errors: &mut Vec<(usize, String)>) -> Meta {
    let mut meta = Meta::default();
    for (i, line) in text.lines().enumerate() {
        let Some(body) = line.trim_start().strip_prefix('#') else { continue };
        let Some((key, value)) = body.split_once('=') else { continue };
        let (key, value) = (key.trim(), value.trim());
        let slot = match key {
            "T" => &mut meta.window,
            "session_start" => &mut meta.session_start,
            "session_end" => &mut meta.session_end,
            _ => continue,
        };
        match Stamp::parse(value) {
            Some(stamp) if key != "T" || stamp.kind() == 0 => *slot = Some(stamp.split().0),
            _ => errors.push((i + 1, format!("cannot parse {key} value {value:?}"))),
        }
    }
    meta
}

/// Parses a tick CSV into one dataset per session, in date order.
pub fn read_datasets(path: &Path) -> Result<Vec<TickDataset>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_datasets(&text, path)
}

pub fn parse_datasets(text: &str, path: &Path) -> Result<Vec<TickDataset>> {
    let mut errors = Vec::new();
    let meta = parse_meta(text, &mut errors);
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?
        .clone();
    let column = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(ts_col), Some(price_col)) = (column("timestamp"), column("price")) else {
        return Err(Error::Data(format!(
            "{}: header must contain `timestamp` and `price`, found {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>()
        )));
    };
    let date_col = column("date");

    // Session key -> (seconds, price, line).
    let mut sessions: BTreeMap<Option<String>, Vec<(f64, f64, usize)>> = BTreeMap::new();
    let mut kind = None;
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                errors.push((line, e.to_string()));
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let Some(stamp) = Stamp::parse(field(ts_col)) else {
            errors.push((line, format!("unparseable timestamp {:?}", field(ts_col))));
            continue;
        };
        if *kind.get_or_insert(stamp.kind()) != stamp.kind() {
            errors.push((line, "timestamp format differs from earlier rows".into()));
            continue;
        }
        let price = match field(price_col).parse::<f64>() {
            Ok(p) if p.is_finite() && p > 0.0 => p,
            _ => {
                errors.push((line, format!("price must be a positive number, got {:?}", field(price_col))));
                continue;
            }
        };
        let (seconds, date) = stamp.split();
        let key = match date_col {
            Some(c) => {
                let d = field(c);
                if d.is_empty() {
                    errors.push((line, "empty date".into()));
                    continue;
                }
                Some(d.to_string())
            }
            None => date.map(|d| d.to_string()),
        };
        let rows = sessions.entry(key).or_default();
        if let Some(&(prev, _, _)) = rows.last() {
            if seconds < prev {
                errors.push((line, format!("timestamp {seconds} decreases from {prev}")));
                continue;
            }
        }
        rows.push((seconds, price, line));
    }
    if !errors.is_empty() {
        errors.sort_by_key(|e| e.0);
        return Err(Error::MalformedRows { path: path.to_path_buf(), errors });
    }
    if sessions.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }
    sessions
        .into_iter()
        .map(|(label, rows)| {
            let start = meta.session_start.unwrap_or(rows[0].0);
            if rows[0].0 < start {
                return Err(Error::Data(format!(
                    "{}: line {}: row precedes the session start",
                    path.display(),
                    rows[0].2
                )));
            }
            let last = rows[rows.len() - 1].0 - start;
            let window_end = match (meta.window, meta.session_end) {
                (Some(t), _) => t,
                (None, Some(end)) => end - start,
                (None, None) => last,
            };
            if window_end < last {
                return Err(Error::Data(format!(
                    "{}: rows run to {last} s but the window ends at {window_end} s",
                    path.display()
                )));
            }
            Ok(TickDataset {
                label,
                lines: rows.iter().map(|r| r.2).collect(),
                rows: rows.iter().map(|r| (r.0 - start, r.1)).collect(),
                window_end,
            })
        })
        .collect()
}

impl TickDataset {
    /// Events are the rows whose price differs from the previous row.
    pub fn extract(&self, delta: f64, policy: JumpPolicy) -> Result<Ingested> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::param(format!("tick size must be > 0, got {delta}")));
        }
        let Some(&(_, initial_price)) = self.rows.first() else {
            return Err(Error::Data("no events: dataset is empty".into()));
        };
        let mut times: Vec<f64> = Vec::new();
        let mut signs: Vec<i8> = Vec::new();
        let (mut truncated, mut nudged, mut off_grid) = (0usize, 0usize, 0usize);
        let mut prev = initial_price;
        for &(t, price) in &self.rows[1..] {
            let change = price - prev;
            prev = price;
            let ticks = change.abs() / delta;
            if ticks < 1e-6 {
                continue;
            }
            let k = ticks.round().max(1.0);
            if (ticks - k).abs() > 1e-6 * k.max(1.0) {
                off_grid += 1;
            }
            let k = k as usize;
            let sign = if change > 0.0 { 1 } else { -1 };
            let copies = match policy {
                JumpPolicy::Truncate => {
                    truncated += k - 1;
                    1
                }
                JumpPolicy::Split => k,
            };
            for _ in 0..copies {
                let mut time = t;
                if let Some(&last) = times.last() {
                    if time <= last {
                        time = last + NUDGE;
                        nudged += 1;
                    }
                }
                times.push(time);
                signs.push(sign);
            }
        }
        if times.is_empty() {
            return Err(Error::Data(format!(
                "no events{}: the price never changes",
                self.label.as_deref().map(|l| format!(" in session {l}")).unwrap_or_default()
            )));
        }
        let last = times[times.len() - 1];
        let window_end = if last > self.window_end {
            if last - self.window_end > NUDGE * (nudged as f64 + 1.0) {
                return Err(Error::Data(format!("event at {last} after window end {}", self.window_end)));
            }
            last
        } else {
            self.window_end
        };
        let mut warnings = Vec::new();
        if truncated > 0 {
            warnings.push(format!("{truncated} tick(s) dropped from multi-tick moves (one event per move)"));
        }
        if nudged > 0 {
            warnings.push(format!("{nudged} event(s) shifted by {NUDGE} s to keep times strictly increasing"));
        }
        if off_grid > 0 {
            warnings.push(format!("{off_grid} price change(s) are not whole multiples of the tick size {delta}"));
        }
        for w in &warnings {
            log::warn!("{}{w}", self.label.as_deref().map(|l| format!("{l}: ")).unwrap_or_default());
        }
        Ok(Ingested {
            label: self.label.clone(),
            events: EventSequence::new(times, window_end)?,
            marks: TickMarks { delta, signs },
            initial_price,
            rows: self.rows.len(),
            truncated_ticks: truncated,
            nudged,
            off_grid,
            warnings,
        })
    }
}

/// Ingests every session of a file.
pub fn ingest_days(path: &Path, delta: f64, policy: JumpPolicy) -> Result<Vec<Ingested>> {
    read_datasets(path)?.iter().map(|d| d.extract(delta, policy)).collect()
}

/// Ingests a single-session file.
pub fn ingest(path: &Path, delta: f64, policy: JumpPolicy) -> Result<Ingested> {
    let mut days = ingest_days(path, delta, policy)?;
    if days.len() != 1 {
        return Err(Error::Data(format!("{}: expected one session, found {}", path.display(), days.len())));
    }
    Ok(days.remove(0))
}

/// Writes `bytes` to a temporary file in the target directory and renames it into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn events_csv(events: &EventSequence) -> String {
    let mut out = format!("# T={}\ntimestamp\n", events.window_end());
    for t in events.times() {
        writeln!(out, "{t}").expect("writing to a String");
    }
    out
}

pub fn marks_csv(marks: &TickMarks) -> String {
    let mut out = format!("# delta={}\nmark\n", marks.delta);
    for s in &marks.signs {
        writeln!(out, "{s}").expect("writing to a String");
    }
    out
}

/// Price path as `timestamp,price,mark` rows, starting with an `S0` row at
/// time 0 so that [`ingest`] recovers the same events and marks.
pub fn price_path_csv(path: &PricePath) -> String {
    let mut out = format!("# T={}\ntimestamp,price,mark\n0,{},0\n", path.events.window_end(), path.s0);
    for ((t, p), s) in path.events.times().iter().zip(path.prices()).zip(&path.marks.signs) {
        writeln!(out, "{t},{p},{s}").expect("writing to a String");
    }
    out
}

pub fn write_events_csv(path: &Path, events: &EventSequence) -> Result<()> {
    atomic_write(path, events_csv(events).as_bytes())
}

pub fn write_marks_csv(path: &Path, marks: &TickMarks) -> Result<()> {
    atomic_write(path, marks_csv(marks).as_bytes())
}

pub fn write_price_path_csv(path: &Path, price_path: &PricePath) -> Result<()> {
    atomic_write(path, price_path_csv(price_path).as_bytes())
}
