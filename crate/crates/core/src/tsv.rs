//! Reader for the tab-separated timetable exchange format.
//!
//! ```text
//! #stops
//! A	0
//! B	60
//! #trips
//! t1	A@60>B@300>B@300>C@480
//! #footpaths
//! C	D	61
//! ```
//!
//! Blank lines and `//` comments are ignored. Footpaths may be listed in one
//! direction only; the reverse is added on load.

use std::collections::HashMap;
use std::io::BufRead;

use crate::timetable::{
    RawConnection, StopId, Time, Timetable, TimetableError, INFINITY,
};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Stops,
    Trips,
    Footpaths,
}

struct Cell<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Cell<'a> {
    fn syntax(&self, message: impl Into<String>) -> TimetableError {
        TimetableError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn sub(&self, text: &'a str, byte_offset: usize) -> Cell<'a> {
        Cell {
            text,
            line: self.line,
            column: self.column + self.text[..byte_offset].chars().count(),
        }
    }

    fn number(&self, what: &str, negative: impl Fn(&Cell) -> TimetableError) -> Result<Time, TimetableError> {
        let s = self.text.trim();
        if s.starts_with('-') && s.len() > 1 && s[1..].bytes().all(|b| b.is_ascii_digit()) {
            return Err(negative(self));
        }
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.syntax(format!("expected {what}, found `{s}`")));
        }
        match s.parse::<u64>() {
            Ok(v) if v < INFINITY as u64 => Ok(v as Time),
            _ => Err(TimetableError::TimeOverflow {
                line: self.line,
                column: self.column,
                value: s.to_string(),
            }),
        }
    }

    fn duration(&self, what: &str) -> Result<Time, TimetableError> {
        self.number(what, |c| TimetableError::NegativeDuration {
            line: c.line,
            column: c.column,
        })
    }

    fn time(&self) -> Result<Time, TimetableError> {
        self.number("time", |c| c.syntax("negative time"))
    }
}

fn cells(line: &str, line_no: usize) -> Vec<Cell<'_>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for text in line.split('\t') {
        out.push(Cell {
            text,
            line: line_no,
            column: line[..offset].chars().count() + 1,
        });
        offset += text.len() + 1;
    }
    out
}

struct PendingTrip<'a> {
    name: String,
    events: Vec<(Cell<'a>, Cell<'a>)>,
}

/// Parses a timetable from its TSV text.
pub fn parse_timetable(input: &str) -> Result<Timetable, TimetableError> {
    let mut section = None;
    let mut stops: Vec<(Cell, Time)> = Vec::new();
    let mut trips: Vec<PendingTrip> = Vec::new();
    let mut footpaths: Vec<(Cell, Cell, Time)> = Vec::new();

    for (i, full) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = match full.find("//") {
            Some(pos) => &full[..pos],
            None => full,
        };
        let line = line.trim_end_matches(['\r', ' ']);
        if line.trim().is_empty() {
            continue;
        }
        if let Some(header) = line.trim().strip_prefix('#') {
            section = Some(match header.trim() {
                "stops" => Section::Stops,
                "trips" => Section::Trips,
                "footpaths" => Section::Footpaths,
                other => {
                    return Err(TimetableError::Syntax {
                        line: line_no,
                        column: 1,
                        message: format!("unknown section `#{other}`"),
                    })
                }
            });
            continue;
        }
        let row = cells(line, line_no);
        match section {
            None => return Err(row[0].syntax("row outside of any section")),
            Some(Section::Stops) => {
                let name = &row[0];
                if name.text.trim().is_empty() {
                    return Err(name.syntax("empty stop id"));
                }
                let mtt = match row.get(1) {
                    Some(c) => c.duration("minimum transfer time")?,
                    None => 0,
                };
                if row.len() > 2 {
                    return Err(row[2].syntax("unexpected column"));
                }
                stops.push((Cell { text: name.text.trim(), ..*name }, mtt));
            }
            Some(Section::Trips) => {
                if row.len() != 2 {
                    return Err(row[row.len().min(2) - 1]
                        .syntax("expected `trip_id<TAB>stop@time>stop@time...`"));
                }
                let spec = &row[1];
                let mut tokens = Vec::new();
                let mut offset = 0;
                for tok in spec.text.split('>') {
                    let cell = spec.sub(tok, offset);
                    offset += tok.len() + 1;
                    let at = tok
                        .rfind('@')
                        .ok_or_else(|| cell.syntax("expected `stop@time`"))?;
                    let stop = cell.sub(tok[..at].trim(), 0);
                    let time = cell.sub(&tok[at + 1..], at + 1);
                    if stop.text.is_empty() {
                        return Err(stop.syntax("empty stop id"));
                    }
                    tokens.push((stop, time));
                }
                if tokens.len() < 2 || tokens.len() % 2 != 0 {
                    return Err(spec.syntax(
                        "a trip lists alternating departure and arrival events, at least one connection",
                    ));
                }
                for k in (1..tokens.len() - 1).step_by(2) {
                    if tokens[k].0.text != tokens[k + 1].0.text {
                        return Err(tokens[k + 1]
                            .0
                            .syntax("trip must depart from the stop it arrived at"));
                    }
                }
                trips.push(PendingTrip {
                    name: row[0].text.trim().to_string(),
                    events: tokens,
                });
            }
            Some(Section::Footpaths) => {
                if row.len() != 3 {
                    return Err(row[0].syntax("expected `from<TAB>to<TAB>duration`"));
                }
                let duration = row[2].duration("walking duration")?;
                let mut it = row.into_iter();
                let from = it.next().unwrap();
                let to = it.next().unwrap();
                footpaths.push((from, to, duration));
            }
        }
    }

    let mut b = Timetable::builder();
    let mut ids: HashMap<&str, StopId> = HashMap::new();
    for (cell, mtt) in &stops {
        let id = b.add_stop(cell.text, *mtt)?;
        ids.insert(cell.text, id);
    }
    let resolve = |c: &Cell| {
        ids.get(c.text.trim())
            .copied()
            .ok_or_else(|| TimetableError::UnknownStop {
                line: c.line,
                column: c.column,
                name: c.text.trim().to_string(),
            })
    };
    for trip in &trips {
        let mut legs = Vec::with_capacity(trip.events.len() / 2);
        for pair in trip.events.chunks(2) {
            legs.push(RawConnection {
                from: resolve(&pair[0].0)?,
                departure: pair[0].1.time()?,
                to: resolve(&pair[1].0)?,
                arrival: pair[1].1.time()?,
            });
        }
        b.add_trip(trip.name.clone(), legs);
    }
    for (from, to, duration) in &footpaths {
        b.add_footpath(resolve(from)?, resolve(to)?, *duration);
    }
    b.build()
}

/// Reads and parses a timetable from any buffered reader.
pub fn read_timetable<R: BufRead>(mut reader: R) -> Result<Timetable, ReadError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    Ok(parse_timetable(&text)?)
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] TimetableError),
}
