//! Time-expanded graphs built from a [`Timetable`].
//!
//! In the earliest-arrival (EA) graph every unique event is a vertex, arcs
//! cost the time difference of their endpoints, and reachability between
//! events is all that matters. The multicriteria (MC) graph additionally
//! subdivides every connection arc by a connection vertex so that the path
//! cost counts the trips used.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{self, Write};

use thiserror::Error;

use crate::timetable::{Capability, StopId, Time, Timetable};

pub type VertexId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphMode {
    EarliestArrival,
    Multicriteria,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Event,
    /// Subdivides a connection arc in the MC graph; never a query endpoint.
    Connection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexInfo {
    pub stop: StopId,
    pub time: Time,
    pub kind: VertexKind,
    pub capability: Capability,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub head: VertexId,
    pub cost: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ArcCounts {
    pub waiting: usize,
    pub connection: usize,
    pub foot: usize,
    /// MC only: zero-cost links between consecutive connection vertices of a trip.
    pub trip: usize,
    /// Arcs added through [`TimeExpandedGraph::from_arcs`].
    pub other: usize,
}

impl ArcCounts {
    pub fn total(&self) -> usize {
        self.waiting + self.connection + self.foot + self.trip + self.other
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("time-expanded graph contains a cycle through vertex {0}")]
    Cycle(VertexId),
}

/// Compressed sparse row adjacency.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<u32>,
    heads: Vec<VertexId>,
    costs: Vec<u32>,
}

impl Adjacency {
    fn new(n: usize, arcs: &[(VertexId, VertexId, u32)], reverse: bool) -> Self {
        let mut offsets = vec![0u32; n + 1];
        for &(u, v, _) in arcs {
            let tail = if reverse { v } else { u };
            offsets[tail as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut heads = vec![0; arcs.len()];
        let mut costs = vec![0; arcs.len()];
        for &(u, v, c) in arcs {
            let (tail, head) = if reverse { (v, u) } else { (u, v) };
            let slot = fill[tail as usize] as usize;
            heads[slot] = head;
            costs[slot] = c;
            fill[tail as usize] += 1;
        }
        Adjacency {
            offsets,
            heads,
            costs,
        }
    }

    #[inline]
    fn arcs(&self, v: VertexId) -> impl Iterator<Item = Arc> + '_ {
        let r = self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize;
        self.heads[r.clone()]
            .iter()
            .zip(&self.costs[r])
            .map(|(&head, &cost)| Arc { head, cost })
    }

    #[inline]
    fn degree(&self, v: VertexId) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeExpandedGraph {
    mode: GraphMode,
    vertices: Vec<VertexInfo>,
    num_events: usize,
    forward: Adjacency,
    backward: Adjacency,
    counts: ArcCounts,
}

impl TimeExpandedGraph {
    /// Assembles a graph from explicit arcs `(tail, head, cost)`. Event
    /// vertices must precede connection vertices.
    pub fn from_arcs(
        mode: GraphMode,
        vertices: Vec<VertexInfo>,
        arcs: Vec<(VertexId, VertexId, u32)>,
    ) -> Self {
        let counts = ArcCounts {
            other: arcs.len(),
            ..Default::default()
        };
        Self::assemble(mode, vertices, &arcs, counts)
    }

    fn assemble(
        mode: GraphMode,
        vertices: Vec<VertexInfo>,
        arcs: &[(VertexId, VertexId, u32)],
        counts: ArcCounts,
    ) -> Self {
        let n = vertices.len();
        let num_events = vertices
            .iter()
            .take_while(|v| v.kind == VertexKind::Event)
            .count();
        TimeExpandedGraph {
            mode,
            num_events,
            forward: Adjacency::new(n, arcs, false),
            backward: Adjacency::new(n, arcs, true),
            vertices,
            counts,
        }
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Event vertices occupy ids `0..num_event_vertices()` and coincide with
    /// the timetable's event ids.
    pub fn num_event_vertices(&self) -> usize {
        self.num_events
    }

    pub fn num_arcs(&self) -> usize {
        self.forward.heads.len()
    }

    pub fn arc_counts(&self) -> ArcCounts {
        self.counts
    }

    pub fn vertex(&self, v: VertexId) -> &VertexInfo {
        &self.vertices[v as usize]
    }

    pub fn vertices(&self) -> &[VertexInfo] {
        &self.vertices
    }

    pub fn out_arcs(&self, v: VertexId) -> impl Iterator<Item = Arc> + '_ {
        self.forward.arcs(v)
    }

    /// Arcs entering `v`; `head` is the tail of the original arc.
    pub fn in_arcs(&self, v: VertexId) -> impl Iterator<Item = Arc> + '_ {
        self.backward.arcs(v)
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.forward.degree(v)
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.backward.degree(v)
    }

    /// Debug dump, one `tail<TAB>head<TAB>cost` line per arc.
    pub fn write_arcs<W: Write>(&self, mut w: W) -> io::Result<()> {
        for u in 0..self.vertices.len() as VertexId {
            for a in self.out_arcs(u) {
                writeln!(w, "{}\t{}\t{}", u, a.head, a.cost)?;
            }
        }
        Ok(())
    }
}

fn event_vertices(tt: &Timetable) -> Vec<VertexInfo> {
    tt.events()
        .iter()
        .map(|e| VertexInfo {
            stop: e.stop,
            time: e.time,
            kind: VertexKind::Event,
            capability: e.capability,
        })
        .collect()
}

/// Waiting arcs along each stop and foot arcs to the first reachable event
/// of the footpath's head stop. `cost` maps (tail time, head time) to the
/// arc cost of the mode.
fn stop_arcs(
    tt: &Timetable,
    arcs: &mut Vec<(VertexId, VertexId, u32)>,
    counts: &mut ArcCounts,
    cost: impl Fn(Time, Time) -> u32,
) {
    for p in 0..tt.num_stops() as u32 {
        for w in tt.events_at(StopId(p)).windows(2) {
            arcs.push((w[0].id.0, w[1].id.0, cost(w[0].time, w[1].time)));
            counts.waiting += 1;
        }
    }
    for f in tt.footpaths() {
        let targets = tt.events_at(f.to);
        let mut j = 0;
        for e in tt.events_at(f.from) {
            let ready = e.time as u64 + f.duration as u64;
            while j < targets.len() && (targets[j].time as u64) < ready {
                j += 1;
            }
            match targets.get(j) {
                Some(t) => {
                    arcs.push((e.id.0, t.id.0, cost(e.time, t.time)));
                    counts.foot += 1;
                }
                None => break,
            }
        }
    }
}

/// Builds the earliest-arrival graph: one vertex per unique event, waiting,
/// connection and foot arcs costing the time difference of their endpoints.
pub fn build_ea_graph(tt: &Timetable) -> TimeExpandedGraph {
    let vertices = event_vertices(tt);
    let mut arcs = Vec::with_capacity(tt.num_events() + tt.num_connections());
    let mut counts = ArcCounts::default();
    let diff = |a: Time, b: Time| b - a;
    stop_arcs(tt, &mut arcs, &mut counts, diff);
    for c in tt.connections() {
        let (d, a) = (tt.event(c.departure), tt.event(c.arrival));
        arcs.push((d.id.0, a.id.0, diff(d.time, a.time)));
        counts.connection += 1;
    }
    TimeExpandedGraph::assemble(GraphMode::EarliestArrival, vertices, &arcs, counts)
}

/// Builds the multicriteria graph: connection arcs are subdivided by a
/// connection vertex (boarding costs 0, alighting 1), consecutive connection
/// vertices of a trip are linked at cost 0, all other arcs cost 0.
pub fn build_mc_graph(tt: &Timetable) -> TimeExpandedGraph {
    let mut vertices = event_vertices(tt);
    let mut arcs = Vec::with_capacity(tt.num_events() + 3 * tt.num_connections());
    let mut counts = ArcCounts::default();
    stop_arcs(tt, &mut arcs, &mut counts, |_, _| 0);
    for trip in tt.trips() {
        let mut previous: Option<VertexId> = None;
        for c in &trip.connections {
            let arr = tt.event(c.arrival);
            let v = vertices.len() as VertexId;
            vertices.push(VertexInfo {
                stop: arr.stop,
                time: arr.time,
                kind: VertexKind::Connection,
                capability: Capability::NONE,
            });
            arcs.push((c.departure.0, v, 0));
            arcs.push((v, c.arrival.0, 1));
            counts.connection += 2;
            if let Some(prev) = previous {
                arcs.push((prev, v, 0));
                counts.trip += 1;
            }
            previous = Some(v);
        }
    }
    TimeExpandedGraph::assemble(GraphMode::Multicriteria, vertices, &arcs, counts)
}

/// Kahn's algorithm; among ready vertices the smallest `(time, stop, kind)`
/// goes first.
pub fn topological_order(g: &TimeExpandedGraph) -> Result<Vec<VertexId>, GraphError> {
    let n = g.num_vertices();
    let mut indegree: Vec<u32> = (0..n as VertexId).map(|v| g.in_degree(v) as u32).collect();
    let key = |v: VertexId| {
        let info = g.vertex(v);
        Reverse((info.time, info.stop, info.kind, v))
    };
    let mut ready: BinaryHeap<_> = (0..n as VertexId)
        .filter(|&v| indegree[v as usize] == 0)
        .map(key)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, _, _, v))) = ready.pop() {
        order.push(v);
        for a in g.out_arcs(v) {
            indegree[a.head as usize] -= 1;
            if indegree[a.head as usize] == 0 {
                ready.push(key(a.head));
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&v| indegree[v] > 0).unwrap_or(0);
        return Err(GraphError::Cycle(stuck as VertexId));
    }
    Ok(order)
}
