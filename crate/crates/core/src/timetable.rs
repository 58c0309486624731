//! Timetable model: stops, trips, events, footpaths and minimum transfer times.
//!
//! A [`Timetable`] is always built through [`TimetableBuilder`] (or the TSV
//! parser on top of it), which validates the input, merges coincident events
//! and assigns dense ids. Finished timetables are immutable.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seconds since the start of the service period.
pub type Time = u32;

/// Reserved "unreachable" value; no event may carry it.
pub const INFINITY: Time = u32::MAX;

macro_rules! dense_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(
            Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn idx(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

dense_id!(
    /// Dense stop index.
    StopId
);
dense_id!(
    /// Dense trip index.
    TripId
);
dense_id!(
    /// Dense index of a merged (unique) event. Events of one stop are contiguous
    /// and sorted by time.
    EventId
);

/// Whether an event can be used to board, to alight, or both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Capability(u8);

impl Capability {
    pub const NONE: Capability = Capability(0);
    pub const DEPARTURE: Capability = Capability(1);
    pub const ARRIVAL: Capability = Capability(2);
    pub const BOTH: Capability = Capability(3);

    #[inline]
    pub fn can_depart(self) -> bool {
        self.0 & 1 != 0
    }

    #[inline]
    pub fn can_arrive(self) -> bool {
        self.0 & 2 != 0
    }

    #[inline]
    pub fn union(self, other: Capability) -> Capability {
        Capability(self.0 | other.0)
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StopRecord {
    pub name: String,
    /// Minimum transfer time at this stop.
    pub mtt: Time,
    /// Stop of the unsplit timetable this stop was derived from, if any.
    pub origin: Option<StopId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawEvent {
    pub stop: StopId,
    pub time: Time,
    pub capability: Capability,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopEvent {
    pub id: EventId,
    pub stop: StopId,
    pub time: Time,
    pub capability: Capability,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Connection {
    pub trip: TripId,
    pub departure: EventId,
    pub arrival: EventId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trip {
    pub id: TripId,
    pub name: String,
    pub connections: Vec<Connection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Footpath {
    pub from: StopId,
    pub to: StopId,
    pub duration: Time,
}

/// One leg of a trip before event merging.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawConnection {
    pub from: StopId,
    pub departure: Time,
    pub to: StopId,
    pub arrival: Time,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTrip {
    pub name: String,
    pub legs: Vec<RawConnection>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TimetableError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: unknown stop `{name}`")]
    UnknownStop {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("line {line}, column {column}: negative duration")]
    NegativeDuration { line: usize, column: usize },
    #[error("line {line}, column {column}: time `{value}` overflows")]
    TimeOverflow {
        line: usize,
        column: usize,
        value: String,
    },
    #[error("duplicate stop `{0}`")]
    DuplicateStop(String),
    #[error("stop index {0} out of range")]
    StopOutOfRange(u32),
    #[error("trip `{0}`: non-monotone trip")]
    NonMonotoneTrip(String),
    #[error("trip `{0}` has no connections")]
    EmptyTrip(String),
    #[error("footpath {from} -> {to}: duration must be positive")]
    ZeroDuration { from: String, to: String },
    #[error("footpath at stop `{0}` loops onto itself")]
    SelfLoopFootpath(String),
    #[error("time {0} is reserved or out of range")]
    ReservedTime(u64),
}

/// Result of [`merge_coincident_events`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergedEvents {
    /// Unique events grouped by stop, sorted by time within each stop.
    pub events: Vec<StopEvent>,
    /// `events[offsets[p]..offsets[p + 1]]` are the events of stop `p`.
    pub offsets: Vec<u32>,
    /// For every raw event, the merged event it was folded into.
    pub remap: Vec<EventId>,
}

/// Groups raw events by stop, sorts them by time and folds events sharing
/// `(stop, time)` into one, uniting their capabilities.
pub fn merge_coincident_events(num_stops: usize, raw: &[RawEvent]) -> MergedEvents {
    let mut order: Vec<u32> = (0..raw.len() as u32).collect();
    order.sort_by_key(|&i| (raw[i as usize].stop, raw[i as usize].time));

    let mut events: Vec<StopEvent> = Vec::with_capacity(raw.len());
    let mut remap = vec![EventId(0); raw.len()];
    for &i in &order {
        let r = raw[i as usize];
        match events.last_mut() {
            Some(last) if last.stop == r.stop && last.time == r.time => {
                last.capability = last.capability.union(r.capability);
            }
            _ => events.push(StopEvent {
                id: EventId(events.len() as u32),
                stop: r.stop,
                time: r.time,
                capability: r.capability,
            }),
        }
        remap[i as usize] = EventId(events.len() as u32 - 1);
    }

    let mut offsets = vec![0u32; num_stops + 1];
    for e in &events {
        offsets[e.stop.idx() + 1] += 1;
    }
    for p in 0..num_stops {
        offsets[p + 1] += offsets[p];
    }
    MergedEvents {
        events,
        offsets,
        remap,
    }
}

/// Per-stop list of events with a given capability, with times stored
/// alongside for binary search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct EventIndex {
    offsets: Vec<u32>,
    ids: Vec<EventId>,
    times: Vec<Time>,
}

impl EventIndex {
    fn build(num_stops: usize, events: &[StopEvent], keep: impl Fn(Capability) -> bool) -> Self {
        let mut index = EventIndex {
            offsets: Vec::with_capacity(num_stops + 1),
            ..Default::default()
        };
        index.offsets.push(0);
        let mut it = events.iter().peekable();
        for p in 0..num_stops {
            while let Some(e) = it.next_if(|e| e.stop.idx() == p) {
                if keep(e.capability) {
                    index.ids.push(e.id);
                    index.times.push(e.time);
                }
            }
            index.offsets.push(index.ids.len() as u32);
        }
        index
    }

    fn at(&self, stop: StopId) -> StopEvents<'_> {
        let r = self.offsets[stop.idx()] as usize..self.offsets[stop.idx() + 1] as usize;
        StopEvents {
            ids: &self.ids[r.clone()],
            times: &self.times[r],
        }
    }
}

/// Time-sorted events of one stop (parallel id/time arrays).
#[derive(Clone, Copy, Debug)]
pub struct StopEvents<'a> {
    pub ids: &'a [EventId],
    pub times: &'a [Time],
}

impl<'a> StopEvents<'a> {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Index of the first event with time `>= t`.
    pub fn first_at_or_after(&self, t: Time) -> usize {
        self.times.partition_point(|&x| x < t)
    }
}

/// A validated, immutable timetable with dense ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Timetable {
    stops: Vec<StopRecord>,
    trips: Vec<Trip>,
    footpaths: Vec<Footpath>,
    events: Vec<StopEvent>,
    event_offsets: Vec<u32>,
    departures: EventIndex,
    arrivals: EventIndex,
    raw_event_count: usize,
    relaxed_trip_order: bool,
}

impl Timetable {
    pub fn builder() -> TimetableBuilder {
        TimetableBuilder::default()
    }

    pub fn num_stops(&self) -> usize {
        self.stops.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    /// Number of events before coincident ones were merged (two per connection).
    pub fn raw_event_count(&self) -> usize {
        self.raw_event_count
    }

    /// True for timetables whose arrivals were shifted by transfer times.
    pub fn has_shifted_arrivals(&self) -> bool {
        self.relaxed_trip_order
    }

    pub fn num_connections(&self) -> usize {
        self.trips.iter().map(|t| t.connections.len()).sum()
    }

    pub fn stops(&self) -> &[StopRecord] {
        &self.stops
    }

    pub fn stop(&self, id: StopId) -> &StopRecord {
        &self.stops[id.idx()]
    }

    pub fn stop_by_name(&self, name: &str) -> Option<StopId> {
        self.stops
            .iter()
            .position(|s| s.name == name)
            .map(|p| StopId(p as u32))
    }

    pub fn trips(&self) -> &[Trip] {
        &self.trips
    }

    pub fn footpaths(&self) -> &[Footpath] {
        &self.footpaths
    }

    pub fn events(&self) -> &[StopEvent] {
        &self.events
    }

    pub fn event(&self, id: EventId) -> &StopEvent {
        &self.events[id.idx()]
    }

    /// All unique events of a stop, sorted by time.
    pub fn events_at(&self, stop: StopId) -> &[StopEvent] {
        &self.events
            [self.event_offsets[stop.idx()] as usize..self.event_offsets[stop.idx() + 1] as usize]
    }

    /// Departure-capable events of a stop.
    pub fn departures_at(&self, stop: StopId) -> StopEvents<'_> {
        self.departures.at(stop)
    }

    /// Arrival-capable events of a stop.
    pub fn arrivals_at(&self, stop: StopId) -> StopEvents<'_> {
        self.arrivals.at(stop)
    }

    pub fn connections(&self) -> impl Iterator<Item = &Connection> + '_ {
        self.trips.iter().flat_map(|t| t.connections.iter())
    }

    /// Latest event time, or 0 for an empty timetable.
    pub fn last_event_time(&self) -> Time {
        self.events.iter().map(|e| e.time).max().unwrap_or(0)
    }

    /// All stops derived from `origin` by stop splitting (or `origin` itself
    /// in an unsplit timetable).
    pub fn stops_derived_from(&self, origin: StopId) -> Vec<StopId> {
        (0..self.stops.len() as u32)
            .map(StopId)
            .filter(|&p| self.stops[p.idx()].origin.unwrap_or(p) == origin)
            .collect()
    }

    /// Reconstructs the builder input this timetable corresponds to.
    pub fn to_builder(&self) -> TimetableBuilder {
        let trips = self
            .trips
            .iter()
            .map(|t| RawTrip {
                name: t.name.clone(),
                legs: t
                    .connections
                    .iter()
                    .map(|c| {
                        let d = self.event(c.departure);
                        let a = self.event(c.arrival);
                        RawConnection {
                            from: d.stop,
                            departure: d.time,
                            to: a.stop,
                            arrival: a.time,
                        }
                    })
                    .collect(),
            })
            .collect();
        TimetableBuilder {
            stops: self.stops.clone(),
            trips,
            footpaths: self.footpaths.clone(),
            relaxed_trip_order: self.relaxed_trip_order,
        }
    }

    /// Writes the timetable in the TSV exchange format.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "#stops")?;
        for s in &self.stops {
            writeln!(w, "{}\t{}", s.name, s.mtt)?;
        }
        writeln!(w, "#trips")?;
        for t in &self.trips {
            write!(w, "{}\t", t.name)?;
            for (i, c) in t.connections.iter().enumerate() {
                let d = self.event(c.departure);
                let a = self.event(c.arrival);
                if i > 0 {
                    write!(w, ">")?;
                }
                write!(
                    w,
                    "{}@{}>{}@{}",
                    self.stops[d.stop.idx()].name,
                    d.time,
                    self.stops[a.stop.idx()].name,
                    a.time
                )?;
            }
            writeln!(w)?;
        }
        writeln!(w, "#footpaths")?;
        for f in self.footpaths.iter().filter(|f| f.from < f.to) {
            writeln!(
                w,
                "{}\t{}\t{}",
                self.stops[f.from.idx()].name,
                self.stops[f.to.idx()].name,
                f.duration
            )?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("stop and trip names are UTF-8")
    }
}

/// Collects stops, trips and footpaths and validates them into a [`Timetable`].
#[derive(Clone, Debug, Default)]
pub struct TimetableBuilder {
    stops: Vec<StopRecord>,
    trips: Vec<RawTrip>,
    footpaths: Vec<Footpath>,
    relaxed_trip_order: bool,
}

impl TimetableBuilder {
    pub fn add_stop(&mut self, name: impl Into<String>, mtt: Time) -> Result<StopId, TimetableError> {
        let name = name.into();
        if self.stops.iter().any(|s| s.name == name) {
            return Err(TimetableError::DuplicateStop(name));
        }
        self.stops.push(StopRecord {
            name,
            mtt,
            origin: None,
        });
        Ok(StopId(self.stops.len() as u32 - 1))
    }

    pub fn add_trip(&mut self, name: impl Into<String>, legs: Vec<RawConnection>) {
        self.trips.push(RawTrip {
            name: name.into(),
            legs,
        });
    }

    /// Adds a footpath; the reverse direction is added at build time.
    pub fn add_footpath(&mut self, from: StopId, to: StopId, duration: Time) {
        self.footpaths.push(Footpath { from, to, duration });
    }

    pub fn stops_mut(&mut self) -> &mut Vec<StopRecord> {
        &mut self.stops
    }

    pub fn trips_mut(&mut self) -> &mut Vec<RawTrip> {
        &mut self.trips
    }

    pub fn footpaths_mut(&mut self) -> &mut Vec<Footpath> {
        &mut self.footpaths
    }

    /// Only require `arrival >= departure` per leg and non-decreasing
    /// departures along a trip. Needed once arrivals have been shifted by
    /// transfer times.
    pub fn relaxed_trip_order(mut self, relaxed: bool) -> Self {
        self.relaxed_trip_order = relaxed;
        self
    }

    pub fn build(self) -> Result<Timetable, TimetableError> {
        let num_stops = self.stops.len();
        let stop_name = |p: StopId| self.stops[p.idx()].name.clone();
        let check_stop = |p: StopId| {
            if p.idx() < num_stops {
                Ok(())
            } else {
                Err(TimetableError::StopOutOfRange(p.0))
            }
        };

        for trip in &self.trips {
            if trip.legs.is_empty() {
                return Err(TimetableError::EmptyTrip(trip.name.clone()));
            }
            for (i, leg) in trip.legs.iter().enumerate() {
                check_stop(leg.from)?;
                check_stop(leg.to)?;
                for t in [leg.departure, leg.arrival] {
                    if t == INFINITY {
                        return Err(TimetableError::ReservedTime(t as u64));
                    }
                }
                if leg.arrival < leg.departure {
                    return Err(TimetableError::NonMonotoneTrip(trip.name.clone()));
                }
                if let Some(prev) = i.checked_sub(1).map(|j| trip.legs[j]) {
                    let ok = if self.relaxed_trip_order {
                        leg.departure >= prev.departure
                    } else {
                        leg.departure >= prev.arrival
                    };
                    if !ok {
                        return Err(TimetableError::NonMonotoneTrip(trip.name.clone()));
                    }
                }
            }
        }

        // Footpaths are stored in both directions; duplicates keep the
        // shortest duration.
        let mut walk: HashMap<(StopId, StopId), Time> = HashMap::new();
        for f in &self.footpaths {
            check_stop(f.from)?;
            check_stop(f.to)?;
            if f.from == f.to {
                return Err(TimetableError::SelfLoopFootpath(stop_name(f.from)));
            }
            if f.duration == 0 {
                return Err(TimetableError::ZeroDuration {
                    from: stop_name(f.from),
                    to: stop_name(f.to),
                });
            }
            if f.duration == INFINITY {
                return Err(TimetableError::ReservedTime(f.duration as u64));
            }
            for key in [(f.from, f.to), (f.to, f.from)] {
                walk.entry(key)
                    .and_modify(|d| *d = (*d).min(f.duration))
                    .or_insert(f.duration);
            }
        }
        let mut footpaths: Vec<Footpath> = walk
            .into_iter()
            .map(|((from, to), duration)| Footpath { from, to, duration })
            .collect();
        footpaths.sort_by_key(|f| (f.from, f.to));

        let mut raw = Vec::with_capacity(2 * self.trips.iter().map(|t| t.legs.len()).sum::<usize>());
        for trip in &self.trips {
            for leg in &trip.legs {
                raw.push(RawEvent {
                    stop: leg.from,
                    time: leg.departure,
                    capability: Capability::DEPARTURE,
                });
                raw.push(RawEvent {
                    stop: leg.to,
                    time: leg.arrival,
                    capability: Capability::ARRIVAL,
                });
            }
        }
        let merged = merge_coincident_events(num_stops, &raw);

        let mut next_raw = 0usize;
        let trips = self
            .trips
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let connections = t
                    .legs
                    .iter()
                    .map(|_| {
                        let c = Connection {
                            trip: TripId(i as u32),
                            departure: merged.remap[next_raw],
                            arrival: merged.remap[next_raw + 1],
                        };
                        next_raw += 2;
                        c
                    })
                    .collect();
                Trip {
                    id: TripId(i as u32),
                    name: t.name.clone(),
                    connections,
                }
            })
            .collect();

        let departures = EventIndex::build(num_stops, &merged.events, Capability::can_depart);
        let arrivals = EventIndex::build(num_stops, &merged.events, Capability::can_arrive);
        Ok(Timetable {
            stops: self.stops,
            trips,
            footpaths,
            events: merged.events,
            event_offsets: merged.offsets,
            departures,
            arrivals,
            raw_event_count: raw.len(),
            relaxed_trip_order: self.relaxed_trip_order,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(stop: u32, time: Time, capability: Capability) -> RawEvent {
        RawEvent {
            stop: StopId(stop),
            time,
            capability,
        }
    }

    #[test]
    fn merge_unites_capabilities() {
        let m = merge_coincident_events(
            1,
            &[
                raw(0, 100, Capability::DEPARTURE),
                raw(0, 100, Capability::ARRIVAL),
                raw(0, 200, Capability::DEPARTURE),
            ],
        );
        let got: Vec<_> = m.events.iter().map(|e| (e.time, e.capability)).collect();
        assert_eq!(
            got,
            vec![(100, Capability::BOTH), (200, Capability::DEPARTURE)]
        );
        assert_eq!(m.remap, vec![EventId(0), EventId(0), EventId(1)]);
    }

    #[test]
    fn merge_single_event_is_identity() {
        let m = merge_coincident_events(1, &[raw(0, 42, Capability::ARRIVAL)]);
        assert_eq!(m.events.len(), 1);
        assert_eq!(m.events[0].time, 42);
        assert_eq!(m.events[0].capability, Capability::ARRIVAL);
    }

    #[test]
    fn merge_groups_by_stop() {
        let m = merge_coincident_events(
            3,
            &[
                raw(2, 5, Capability::ARRIVAL),
                raw(0, 9, Capability::DEPARTURE),
                raw(2, 1, Capability::DEPARTURE),
            ],
        );
        assert_eq!(m.offsets, vec![0, 1, 1, 3]);
        assert_eq!(m.events[1].time, 1);
        assert_eq!(m.remap, vec![EventId(2), EventId(0), EventId(1)]);
    }

    #[test]
    fn builder_rejects_decreasing_trip() {
        let mut b = Timetable::builder();
        let a = b.add_stop("A", 0).unwrap();
        let c = b.add_stop("B", 0).unwrap();
        b.add_trip(
            "bad",
            vec![RawConnection {
                from: a,
                departure: 500,
                to: c,
                arrival: 400,
            }],
        );
        assert_eq!(
            b.build().unwrap_err(),
            TimetableError::NonMonotoneTrip("bad".into())
        );
    }

    #[test]
    fn builder_rejects_bad_footpaths() {
        let mut b = Timetable::builder();
        let a = b.add_stop("A", 0).unwrap();
        b.add_footpath(a, a, 10);
        assert!(matches!(
            b.build(),
            Err(TimetableError::SelfLoopFootpath(_))
        ));

        let mut b = Timetable::builder();
        let a = b.add_stop("A", 0).unwrap();
        let c = b.add_stop("B", 0).unwrap();
        b.add_footpath(a, c, 0);
        assert!(matches!(b.build(), Err(TimetableError::ZeroDuration { .. })));
    }

    #[test]
    fn footpaths_are_mirrored() {
        let mut b = Timetable::builder();
        let a = b.add_stop("A", 0).unwrap();
        let c = b.add_stop("B", 0).unwrap();
        b.add_footpath(a, c, 30);
        let tt = b.build().unwrap();
        assert_eq!(tt.footpaths().len(), 2);
        assert!(tt.footpaths().iter().all(|f| f.duration == 30));
    }

    #[test]
    fn duplicate_stop_names_rejected() {
        let mut b = Timetable::builder();
        b.add_stop("A", 0).unwrap();
        assert_eq!(
            b.add_stop("A", 0).unwrap_err(),
            TimetableError::DuplicateStop("A".into())
        );
    }
}
