//! Slow reference algorithms for testing the label-based engines.
//!
//! Nothing here uses labels or the query module. Two families exist: graph
//! searches over the time-expanded graphs, and timetable-level scans that
//! never look at a graph at all, so the graph construction is checked too.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::graph::{TimeExpandedGraph, VertexId};
use crate::query::{EaQuery, McAnswer, McEntry, ProfileEntry};
use crate::timetable::{StopId, Time, Timetable, INFINITY};

/// Largest number of departure events `brute_profile` will enumerate.
pub const MAX_PROFILE_DEPARTURES: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for exhaustive enumeration ({0} departures)")]
    TooLarge(usize),
}

/// Vertices reachable from `u` (including `u`), by breadth-first search.
pub fn reachability_bfs(g: &TimeExpandedGraph, u: VertexId) -> Vec<bool> {
    let mut seen = vec![false; g.num_vertices()];
    let mut queue = VecDeque::new();
    seen[u as usize] = true;
    queue.push_back(u);
    while let Some(v) = queue.pop_front() {
        for a in g.out_arcs(v) {
            if !seen[a.head as usize] {
                seen[a.head as usize] = true;
                queue.push_back(a.head);
            }
        }
    }
    seen
}

/// Shortest-path costs from all `sources` (each at cost 0) by Dijkstra.
pub fn shortest_costs(g: &TimeExpandedGraph, sources: &[VertexId]) -> Vec<Time> {
    let mut dist = vec![INFINITY; g.num_vertices()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s as usize] = 0;
        heap.push(Reverse((0u32, s)));
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for a in g.out_arcs(v) {
            let nd = d + a.cost;
            if nd < dist[a.head as usize] {
                dist[a.head as usize] = nd;
                heap.push(Reverse((nd, a.head)));
            }
        }
    }
    dist
}

/// Departure-capable events at `s` no earlier than `t`.
fn departures_from(tt: &Timetable, s: StopId, t: Time) -> Vec<VertexId> {
    tt.events_at(s)
        .iter()
        .filter(|e| e.time >= t && e.capability.can_depart())
        .map(|e| e.id.0)
        .collect()
}

/// Earliest arrival by Dijkstra on the EA graph, started from every
/// departure event at the source no earlier than the departure time.
pub fn dijkstra_ea(g: &TimeExpandedGraph, tt: &Timetable, q: EaQuery) -> Time {
    if q.source == q.target {
        return q.departure;
    }
    let sources = departures_from(tt, q.source, q.departure);
    let dist = shortest_costs(g, &sources);
    tt.events_at(q.target)
        .iter()
        .filter(|e| e.capability.can_arrive() && dist[e.id.idx()] != INFINITY)
        .map(|e| e.time)
        .min()
        .unwrap_or(INFINITY)
}

/// Per-stop event times, rebuilt from the trips.
struct StopTimes {
    all: Vec<Vec<Time>>,
    arrivals: Vec<Vec<Time>>,
    departures: Vec<Vec<Time>>,
}

impl StopTimes {
    fn new(tt: &Timetable) -> Self {
        let n = tt.num_stops();
        let mut st = StopTimes {
            all: vec![Vec::new(); n],
            arrivals: vec![Vec::new(); n],
            departures: vec![Vec::new(); n],
        };
        for c in tt.connections() {
            let d = tt.event(c.departure);
            let a = tt.event(c.arrival);
            st.departures[d.stop.idx()].push(d.time);
            st.arrivals[a.stop.idx()].push(a.time);
            st.all[d.stop.idx()].push(d.time);
            st.all[a.stop.idx()].push(a.time);
        }
        for v in st.all.iter_mut().chain(&mut st.arrivals).chain(&mut st.departures) {
            v.sort_unstable();
            v.dedup();
        }
        st
    }

    fn first(list: &[Time], t: Time) -> Time {
        let i = list.partition_point(|&x| x < t);
        list.get(i).copied().unwrap_or(INFINITY)
    }

    /// Earliest event time at `p` at or after `t`: where a traveller who is
    /// at `p` from `t` on is placed.
    fn snap(&self, p: StopId, t: Time) -> Time {
        Self::first(&self.all[p.idx()], t)
    }
}

/// Walks from every reached stop until nothing improves; reached times are
/// event times.
fn walk_closure(tt: &Timetable, st: &StopTimes, at: &mut [Time]) {
    loop {
        let mut changed = false;
        for f in tt.footpaths() {
            let t = at[f.from.idx()];
            if t == INFINITY {
                continue;
            }
            let landed = st.snap(f.to, t.saturating_add(f.duration));
            if landed < at[f.to.idx()] {
                at[f.to.idx()] = landed;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn arrival_at_target(st: &StopTimes, t: StopId, reached: Time) -> Time {
    if reached == INFINITY {
        INFINITY
    } else {
        StopTimes::first(&st.arrivals[t.idx()], reached)
    }
}

/// Earliest arrival computed on the timetable alone, by relaxing
/// connections and footpaths to a fixpoint. A traveller starts at the first
/// departure at the source no earlier than the departure time, may board any
/// connection leaving a reached stop no earlier than it was reached, and
/// after walking waits for the next event at the destination stop.
pub fn scan_ea(tt: &Timetable, q: EaQuery) -> Time {
    if q.source == q.target {
        return q.departure;
    }
    let st = StopTimes::new(tt);
    let start = StopTimes::first(&st.departures[q.source.idx()], q.departure);
    if start == INFINITY {
        return INFINITY;
    }
    let mut at = vec![INFINITY; tt.num_stops()];
    at[q.source.idx()] = start;
    loop {
        walk_closure(tt, &st, &mut at);
        let mut changed = false;
        for c in tt.connections() {
            let d = tt.event(c.departure);
            let a = tt.event(c.arrival);
            if at[d.stop.idx()] <= d.time && a.time < at[a.stop.idx()] {
                at[a.stop.idx()] = a.time;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    arrival_at_target(&st, q.target, at[q.target.idx()])
}

/// Earliest arrival honoring minimum transfer times, on the timetable alone.
/// Changing vehicles at `p` needs `mtt(p)` between alighting and boarding;
/// staying on board, walking and starting out need none.
pub fn scan_ea_mtt(tt: &Timetable, q: EaQuery) -> Time {
    if q.source == q.target {
        return q.departure;
    }
    let st = StopTimes::new(tt);
    let start = StopTimes::first(&st.departures[q.source.idx()], q.departure);
    if start == INFINITY {
        return INFINITY;
    }
    // walked[p]: present at p on foot; ridden[p]: alighted at p
    let mut walked = vec![INFINITY; tt.num_stops()];
    let mut ridden = vec![INFINITY; tt.num_stops()];
    walked[q.source.idx()] = start;
    loop {
        let mut changed = false;
        loop {
            let mut walk_changed = false;
            for f in tt.footpaths() {
                let t = walked[f.from.idx()].min(ridden[f.from.idx()]);
                if t == INFINITY {
                    continue;
                }
                let landed = st.snap(f.to, t.saturating_add(f.duration));
                if landed < walked[f.to.idx()] {
                    walked[f.to.idx()] = landed;
                    walk_changed = true;
                }
            }
            if !walk_changed {
                break;
            }
        }
        for trip in tt.trips() {
            let mut on_board = false;
            for c in &trip.connections {
                let d = tt.event(c.departure);
                let a = tt.event(c.arrival);
                let p = d.stop.idx();
                let transfer = ridden[p].saturating_add(tt.stop(d.stop).mtt);
                on_board |= walked[p] <= d.time || transfer <= d.time;
                if on_board && a.time < ridden[a.stop.idx()] {
                    ridden[a.stop.idx()] = a.time;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let t = q.target.idx();
    arrival_at_target(&st, q.target, walked[t].min(ridden[t]))
}

/// Keeps the pairs no other pair dominates, sorted by departure.
pub fn pareto_filter(mut pairs: Vec<ProfileEntry>) -> Vec<ProfileEntry> {
    pairs.sort();
    pairs.dedup();
    let keep: Vec<ProfileEntry> = pairs
        .iter()
        .filter(|p| !pairs.iter().any(|o| o.dominates(p)))
        .copied()
        .collect();
    keep
}

/// Profiles from `s` to every stop: one search per departure event at `s`.
pub fn brute_profiles_from(
    g: &TimeExpandedGraph,
    tt: &Timetable,
    s: StopId,
) -> Result<Vec<Vec<ProfileEntry>>, OracleError> {
    let deps = departures_from(tt, s, 0);
    if deps.len() > MAX_PROFILE_DEPARTURES {
        return Err(OracleError::TooLarge(deps.len()));
    }
    let mut pairs: Vec<Vec<ProfileEntry>> = vec![Vec::new(); tt.num_stops()];
    for &e in &deps {
        let dep = tt.event(crate::timetable::EventId(e)).time;
        let reached = reachability_bfs(g, e);
        for (t, list) in pairs.iter_mut().enumerate() {
            if t == s.idx() {
                continue;
            }
            let arr = tt
                .events_at(StopId(t as u32))
                .iter()
                .filter(|x| x.capability.can_arrive() && reached[x.id.idx()])
                .map(|x| x.time)
                .min();
            if let Some(arr) = arr {
                list.push(ProfileEntry::new(dep, arr));
            }
        }
    }
    Ok(pairs.into_iter().map(pareto_filter).collect())
}

/// All tight (departure, arrival) pairs from `s` to `t` by enumeration.
pub fn brute_profile(
    g: &TimeExpandedGraph,
    tt: &Timetable,
    s: StopId,
    t: StopId,
) -> Result<Vec<ProfileEntry>, OracleError> {
    Ok(brute_profiles_from(g, tt, s)?.swap_remove(t.idx()))
}

fn pareto_mc(mut cands: Vec<McEntry>) -> McAnswer {
    cands.sort();
    let mut entries: Vec<McEntry> = Vec::new();
    for c in cands {
        if entries.last().is_none_or(|l| c.transfers < l.transfers) {
            entries.push(c);
        }
    }
    McAnswer { entries }
}

/// Pareto set of (arrival, transfers) from one Dijkstra run on the
/// multicriteria graph: costs to every arrival event at the target, then a
/// dominance filter.
pub fn mc_dijkstra(g: &TimeExpandedGraph, tt: &Timetable, q: EaQuery) -> McAnswer {
    if q.source == q.target {
        return McAnswer {
            entries: vec![McEntry {
                arrival: q.departure,
                transfers: 0,
            }],
        };
    }
    let sources = departures_from(tt, q.source, q.departure);
    let dist = shortest_costs(g, &sources);
    let cands = tt
        .events_at(q.target)
        .iter()
        .filter(|e| e.capability.can_arrive() && dist[e.id.idx()] != INFINITY)
        .map(|e| McEntry {
            arrival: e.time,
            transfers: dist[e.id.idx()].saturating_sub(1),
        })
        .collect();
    pareto_mc(cands)
}

/// Multicriteria Pareto set computed on the timetable alone, in rounds:
/// round `k` knows the earliest time every stop is reached with at most `k`
/// trips. Once on board a trip the traveller may stay on it.
pub fn mc_rounds(tt: &Timetable, q: EaQuery) -> McAnswer {
    if q.source == q.target {
        return McAnswer {
            entries: vec![McEntry {
                arrival: q.departure,
                transfers: 0,
            }],
        };
    }
    let st = StopTimes::new(tt);
    let start = StopTimes::first(&st.departures[q.source.idx()], q.departure);
    if start == INFINITY {
        return McAnswer::default();
    }
    let mut prev = vec![INFINITY; tt.num_stops()];
    prev[q.source.idx()] = start;
    walk_closure(tt, &st, &mut prev);
    let mut cands = vec![McEntry {
        arrival: arrival_at_target(&st, q.target, prev[q.target.idx()]),
        transfers: 0,
    }];
    for round in 1..=tt.trips().len() {
        let mut next = prev.clone();
        for trip in tt.trips() {
            let mut on_board = false;
            for c in &trip.connections {
                let d = tt.event(c.departure);
                let a = tt.event(c.arrival);
                on_board |= prev[d.stop.idx()] <= d.time;
                if on_board && a.time < next[a.stop.idx()] {
                    next[a.stop.idx()] = a.time;
                }
            }
        }
        walk_closure(tt, &st, &mut next);
        cands.push(McEntry {
            arrival: arrival_at_target(&st, q.target, next[q.target.idx()]),
            transfers: (round - 1) as u32,
        });
        if next == prev {
            break;
        }
        prev = next;
    }
    cands.retain(|c| c.arrival != INFINITY);
    pareto_mc(cands)
}
