//! Minimum-transfer-time preprocessing.
//!
//! The earliest-arrival graph has no notion of transfer time, so stops with
//! `mtt > 0` are split: trips that could not transfer into each other
//! because of the transfer time go to different copies of the stop, and the
//! copies are linked by footpaths of length `mtt`. The multicriteria graph
//! instead shifts every arrival by the transfer time of its stop.

use std::collections::BTreeMap;

use crate::timetable::{
    Footpath, StopId, StopRecord, Time, Timetable, TimetableError, TripId, INFINITY,
};

#[derive(Default)]
struct Visits {
    arrivals: Vec<Time>,
    departures: Vec<Time>,
}

impl Visits {
    fn first_time(&self) -> Time {
        self.arrivals
            .iter()
            .chain(&self.departures)
            .copied()
            .min()
            .unwrap_or(INFINITY)
    }

    /// Transferring from `self` into `other` is possible without a transfer
    /// time but not with `mtt`.
    fn blocks_transfer_into(&self, other: &Visits, mtt: Time) -> bool {
        self.arrivals.iter().any(|&a| {
            other
                .departures
                .iter()
                .any(|&d| d >= a && (d as u64) < a as u64 + mtt as u64)
        })
    }
}

fn conflict(x: &Visits, y: &Visits, mtt: Time) -> bool {
    x.blocks_transfer_into(y, mtt) || y.blocks_transfer_into(x, mtt)
}

/// First-fit coloring of the trips serving one stop, in order of their first
/// event there. Returns the color of every trip.
fn color_trips(visits: &BTreeMap<TripId, Visits>, mtt: Time) -> BTreeMap<TripId, usize> {
    let mut order: Vec<(&TripId, &Visits)> = visits.iter().collect();
    order.sort_by_key(|(id, v)| (v.first_time(), **id));

    let mut colors: BTreeMap<TripId, usize> = BTreeMap::new();
    for (i, (id, v)) in order.iter().enumerate() {
        let mut taken: Vec<usize> = order[..i]
            .iter()
            .filter(|(_, w)| conflict(v, w, mtt))
            .map(|(other, _)| colors[*other])
            .collect();
        taken.sort_unstable();
        taken.dedup();
        let color = taken
            .iter()
            .enumerate()
            .find(|&(k, &c)| k != c)
            .map(|(k, _)| k)
            .unwrap_or(taken.len());
        colors.insert(**id, color);
    }
    colors
}

/// Replaces every stop with a positive minimum transfer time by a set of
/// stops such that no two trips sharing one of them conflict, and links the
/// set with footpaths of length `mtt`. The result has `mtt == 0` everywhere
/// and records the original stop in [`StopRecord::origin`].
pub fn split_stops_for_mtt_ea(tt: &Timetable) -> Timetable {
    let mut visits: BTreeMap<StopId, BTreeMap<TripId, Visits>> = BTreeMap::new();
    for trip in tt.trips() {
        for c in &trip.connections {
            let dep = tt.event(c.departure);
            let arr = tt.event(c.arrival);
            if tt.stop(dep.stop).mtt > 0 {
                visits
                    .entry(dep.stop)
                    .or_default()
                    .entry(trip.id)
                    .or_default()
                    .departures
                    .push(dep.time);
            }
            if tt.stop(arr.stop).mtt > 0 {
                visits
                    .entry(arr.stop)
                    .or_default()
                    .entry(trip.id)
                    .or_default()
                    .arrivals
                    .push(arr.time);
            }
        }
    }

    let mut builder = tt.to_builder();
    let mut stops: Vec<StopRecord> = tt
        .stops()
        .iter()
        .enumerate()
        .map(|(p, s)| StopRecord {
            name: s.name.clone(),
            mtt: 0,
            origin: Some(s.origin.unwrap_or(StopId(p as u32))),
        })
        .collect();

    // members[p] = stops replacing p, indexed by color
    let mut members: Vec<Vec<StopId>> = (0..tt.num_stops() as u32).map(|p| vec![StopId(p)]).collect();
    let mut trip_colors: BTreeMap<StopId, BTreeMap<TripId, usize>> = BTreeMap::new();
    for (&p, trips) in &visits {
        let mtt = tt.stop(p).mtt;
        let colors = color_trips(trips, mtt);
        let k = colors.values().copied().max().map_or(1, |c| c + 1);
        for c in 1..k {
            let origin = stops[p.idx()].origin;
            stops.push(StopRecord {
                name: format!("{}#{}", tt.stop(p).name, c),
                mtt: 0,
                origin,
            });
            members[p.idx()].push(StopId(stops.len() as u32 - 1));
        }
        trip_colors.insert(p, colors);
    }

    let relabel = |p: StopId, trip: TripId| match trip_colors.get(&p) {
        Some(colors) => members[p.idx()][colors[&trip]],
        None => p,
    };
    for (i, trip) in builder.trips_mut().iter_mut().enumerate() {
        let id = TripId(i as u32);
        for leg in &mut trip.legs {
            leg.from = relabel(leg.from, id);
            leg.to = relabel(leg.to, id);
        }
    }

    let mut footpaths = Vec::new();
    for f in tt.footpaths() {
        for &a in &members[f.from.idx()] {
            for &b in &members[f.to.idx()] {
                footpaths.push(Footpath {
                    from: a,
                    to: b,
                    duration: f.duration,
                });
            }
        }
    }
    for &p in visits.keys() {
        let set = &members[p.idx()];
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                footpaths.push(Footpath {
                    from: a,
                    to: b,
                    duration: tt.stop(p).mtt,
                });
            }
        }
    }

    *builder.stops_mut() = stops;
    *builder.footpaths_mut() = footpaths;
    builder
        .build()
        .expect("splitting stops preserves timetable validity")
}

/// Adds the transfer time of its stop to every arrival event. Departures are
/// untouched; coincident events are re-merged. The result has `mtt == 0`.
pub fn shift_arrivals_for_mtt_mc(tt: &Timetable) -> Result<Timetable, TimetableError> {
    let mtt: Vec<Time> = tt.stops().iter().map(|s| s.mtt).collect();
    let mut builder = tt.to_builder();
    for trip in builder.trips_mut() {
        for leg in &mut trip.legs {
            let shifted = leg.arrival as u64 + mtt[leg.to.idx()] as u64;
            if shifted >= INFINITY as u64 {
                return Err(TimetableError::ReservedTime(shifted));
            }
            leg.arrival = shifted as Time;
        }
    }
    for s in builder.stops_mut() {
        s.mtt = 0;
    }
    builder.relaxed_trip_order(true).build()
}
