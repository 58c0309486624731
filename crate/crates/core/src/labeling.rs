//! Hub labels on time-expanded graphs.
//!
//! Labels are computed with pruned labeling: vertices are processed in a
//! priority order, and each one runs a forward and a backward traversal that
//! stops wherever the pair is already covered by earlier hubs. Reachability
//! labels (EA graph) store hubs only; distance labels (MC graph) also store
//! the path cost to or from the hub.
//!
//! Hub ids are ranks in the processing order until [`reassign_hub_ids`]
//! renumbers the used hubs by event time.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{topological_order, GraphError, TimeExpandedGraph, VertexId, VertexKind};
use crate::timetable::{StopId, Time, Timetable, INFINITY};

pub type HubId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    Reachability,
    Distance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexOrdering {
    /// Descending `in + out` degree, ties by closeness of the event time to
    /// the median event time.
    #[default]
    Degree,
    /// Descending number of descendants/ancestors in `samples` randomly
    /// rooted traversal trees.
    Sampled { samples: usize, seed: u64 },
}

/// Which vertices keep their labels after construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LabelScope {
    /// Forward labels on departure-capable events, backward labels on
    /// arrival-capable events.
    #[default]
    Journeys,
    /// Every vertex keeps both labels.
    AllVertices,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabelOptions {
    pub mode: LabelMode,
    pub ordering: VertexOrdering,
    pub scope: LabelScope,
}

impl LabelOptions {
    pub fn new(mode: LabelMode) -> Self {
        LabelOptions {
            mode,
            ordering: VertexOrdering::Degree,
            scope: LabelScope::Journeys,
        }
    }

    pub fn ordering(mut self, ordering: VertexOrdering) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn scope(mut self, scope: LabelScope) -> Self {
        self.scope = scope;
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("operation requires {expected:?} labels")]
    WrongMode { expected: LabelMode },
    #[error("ordering is not a permutation of the vertices")]
    BadOrdering,
}

/// One forward or backward label: sorted hubs, and in distance mode the
/// parallel path costs.
#[derive(Clone, Copy, Debug)]
pub struct Label<'a> {
    pub hubs: &'a [HubId],
    pub dists: &'a [u32],
}

impl<'a> Label<'a> {
    pub fn len(&self) -> usize {
        self.hubs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hubs.is_empty()
    }
}

/// Labels of all vertices in one direction, flattened.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlatLabels {
    pub(crate) offsets: Vec<u32>,
    pub(crate) hubs: Vec<HubId>,
    pub(crate) dists: Vec<u32>,
}

impl FlatLabels {
    fn from_lists<T>(lists: &[Vec<T>], keep: impl Fn(usize) -> bool, split: impl Fn(&T) -> (HubId, u32), with_dists: bool) -> Self {
        let mut out = FlatLabels {
            offsets: Vec::with_capacity(lists.len() + 1),
            ..Default::default()
        };
        out.offsets.push(0);
        for (v, list) in lists.iter().enumerate() {
            if keep(v) {
                for item in list {
                    let (h, d) = split(item);
                    out.hubs.push(h);
                    if with_dists {
                        out.dists.push(d);
                    }
                }
            }
            let end = u32::try_from(out.hubs.len()).expect("more than 2^32 label entries");
            out.offsets.push(end);
        }
        out
    }

    pub fn num_labels(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn num_entries(&self) -> usize {
        self.hubs.len()
    }

    #[inline]
    pub fn label(&self, v: VertexId) -> Label<'_> {
        let r = self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize;
        Label {
            hubs: &self.hubs[r.clone()],
            dists: if self.dists.is_empty() { &[] } else { &self.dists[r] },
        }
    }

    /// Applies `f` to every label, which must return hubs sorted again.
    fn rebuild(&self, mut f: impl FnMut(usize, Label<'_>, &mut Vec<(HubId, u32)>)) -> FlatLabels {
        let with_dists = !self.dists.is_empty();
        let mut out = FlatLabels {
            offsets: Vec::with_capacity(self.offsets.len()),
            ..Default::default()
        };
        out.offsets.push(0);
        let mut buf = Vec::new();
        for v in 0..self.num_labels() {
            buf.clear();
            f(v, self.label(v as VertexId), &mut buf);
            for &(h, d) in &buf {
                out.hubs.push(h);
                if with_dists {
                    out.dists.push(d);
                }
            }
            out.offsets.push(out.hubs.len() as u32);
        }
        out
    }
}

/// Forward and backward labels of every vertex of one graph, plus per-hub
/// metadata (vertex, event time, stop).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    pub(crate) mode: LabelMode,
    pub(crate) forward: FlatLabels,
    pub(crate) backward: FlatLabels,
    pub(crate) hub_vertex: Vec<VertexId>,
    pub(crate) hub_time: Vec<Time>,
    pub(crate) hub_stop: Vec<StopId>,
    pub(crate) time_ordered: bool,
}

impl LabelSet {
    pub fn mode(&self) -> LabelMode {
        self.mode
    }

    pub fn num_vertices(&self) -> usize {
        self.forward.num_labels()
    }

    pub fn num_hubs(&self) -> usize {
        self.hub_vertex.len()
    }

    #[inline]
    pub fn forward(&self, v: VertexId) -> Label<'_> {
        self.forward.label(v)
    }

    #[inline]
    pub fn backward(&self, v: VertexId) -> Label<'_> {
        self.backward.label(v)
    }

    pub fn forward_labels(&self) -> &FlatLabels {
        &self.forward
    }

    pub fn backward_labels(&self) -> &FlatLabels {
        &self.backward
    }

    pub fn hub_vertex(&self, h: HubId) -> VertexId {
        self.hub_vertex[h as usize]
    }

    pub fn hub_time(&self, h: HubId) -> Time {
        self.hub_time[h as usize]
    }

    pub fn hub_times(&self) -> &[Time] {
        &self.hub_time
    }

    /// True once hub ids have been renumbered by event time.
    pub fn is_time_ordered(&self) -> bool {
        self.time_ordered
    }

    pub fn total_entries(&self) -> usize {
        self.forward.num_entries() + self.backward.num_entries()
    }
}

fn median_time(g: &TimeExpandedGraph) -> Time {
    let mut times: Vec<Time> = g.vertices().iter().map(|v| v.time).collect();
    if times.is_empty() {
        return 0;
    }
    let mid = times.len() / 2;
    *times.select_nth_unstable(mid).1
}

/// Processing order for pruned labeling, most important vertex first.
pub fn vertex_order(g: &TimeExpandedGraph, ordering: VertexOrdering) -> Vec<VertexId> {
    let n = g.num_vertices();
    let median = median_time(g);
    let centrality = |v: VertexId| g.vertex(v).time.abs_diff(median);
    let degree = |v: VertexId| g.in_degree(v) + g.out_degree(v);
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    match ordering {
        VertexOrdering::Degree => {
            order.sort_by_key(|&v| (Reverse(degree(v)), centrality(v), v));
        }
        VertexOrdering::Sampled { samples, seed } => {
            let score = sampled_coverage(g, samples, seed);
            order.sort_by_key(|&v| (Reverse(score[v as usize]), Reverse(degree(v)), centrality(v), v));
        }
    }
    order
}

/// For each vertex, the summed subtree sizes over traversal trees rooted at
/// random vertices (alternating forward and backward trees).
fn sampled_coverage(g: &TimeExpandedGraph, samples: usize, seed: u64) -> Vec<u64> {
    let n = g.num_vertices();
    let mut score = vec![0u64; n];
    if n == 0 {
        return score;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roots: Vec<VertexId> = (0..n as VertexId).collect();
    roots.shuffle(&mut rng);
    let mut parent = vec![u32::MAX; n];
    let mut size = vec![0u64; n];
    let mut queue: Vec<VertexId> = Vec::new();
    for (i, &root) in roots.iter().cycle().take(samples).enumerate() {
        let forward = i % 2 == 0;
        queue.clear();
        queue.push(root);
        parent[root as usize] = root;
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            let mut visit = |w: VertexId| {
                if parent[w as usize] == u32::MAX {
                    parent[w as usize] = v;
                    queue.push(w);
                }
            };
            if forward {
                g.out_arcs(v).for_each(|a| visit(a.head));
            } else {
                g.in_arcs(v).for_each(|a| visit(a.head));
            }
        }
        for &v in queue.iter().rev() {
            size[v as usize] += 1;
            let p = parent[v as usize];
            if p != v {
                size[p as usize] += size[v as usize];
            }
        }
        for &v in &queue {
            score[v as usize] += size[v as usize];
            size[v as usize] = 0;
            parent[v as usize] = u32::MAX;
        }
    }
    score
}

/// Builds labels with the given options. Fails if the graph has a cycle.
pub fn build_labels(g: &TimeExpandedGraph, options: LabelOptions) -> Result<LabelSet, LabelError> {
    let order = vertex_order(g, options.ordering);
    build_labels_with_order(g, options, &order)
}

/// Builds labels processing vertices in the explicit `order`.
pub fn build_labels_with_order(
    g: &TimeExpandedGraph,
    options: LabelOptions,
    order: &[VertexId],
) -> Result<LabelSet, LabelError> {
    topological_order(g)?;
    let n = g.num_vertices();
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(LabelError::BadOrdering);
    }
    for &v in order {
        if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
            return Err(LabelError::BadOrdering);
        }
    }

    let keep_forward = |v: usize| {
        let info = g.vertex(v as VertexId);
        options.scope == LabelScope::AllVertices
            || (info.kind == VertexKind::Event && info.capability.can_depart())
    };
    let keep_backward = |v: usize| {
        let info = g.vertex(v as VertexId);
        options.scope == LabelScope::AllVertices
            || (info.kind == VertexKind::Event && info.capability.can_arrive())
    };

    let (forward, backward) = match options.mode {
        LabelMode::Reachability => {
            let (f, b) = pruned_reachability(g, order);
            (
                FlatLabels::from_lists(&f, keep_forward, |&h| (h, 0), false),
                FlatLabels::from_lists(&b, keep_backward, |&h| (h, 0), false),
            )
        }
        LabelMode::Distance => {
            let (f, b) = pruned_distances(g, order);
            (
                FlatLabels::from_lists(&f, keep_forward, |&(h, d)| (h, d), true),
                FlatLabels::from_lists(&b, keep_backward, |&(h, d)| (h, d), true),
            )
        }
    };

    Ok(LabelSet {
        mode: options.mode,
        forward,
        backward,
        hub_vertex: order.to_vec(),
        hub_time: order.iter().map(|&v| g.vertex(v).time).collect(),
        hub_stop: order.iter().map(|&v| g.vertex(v).stop).collect(),
        time_ordered: false,
    })
}

/// Pruned reachability labeling. Labels hold ranks and come out sorted
/// because ranks are appended in increasing order.
fn pruned_reachability(g: &TimeExpandedGraph, order: &[VertexId]) -> (Vec<Vec<HubId>>, Vec<Vec<HubId>>) {
    let n = g.num_vertices();
    let mut fwd: Vec<Vec<HubId>> = vec![Vec::new(); n];
    let mut bwd: Vec<Vec<HubId>> = vec![Vec::new(); n];
    let mut mark = vec![false; n];
    let mut stamp = vec![u32::MAX; n];
    let mut queue: Vec<VertexId> = Vec::new();

    for (r, &h) in order.iter().enumerate() {
        let r = r as HubId;
        for forward in [true, false] {
            let tag = 2 * r + forward as u32;
            // hubs already known on the h side of the pair
            let own = if forward { &fwd[h as usize] } else { &bwd[h as usize] };
            for &x in own {
                mark[x as usize] = true;
            }
            queue.clear();
            queue.push(h);
            stamp[h as usize] = tag;
            let mut head = 0;
            while head < queue.len() {
                let v = queue[head];
                head += 1;
                let other = if forward { &mut bwd[v as usize] } else { &mut fwd[v as usize] };
                if other.iter().any(|&x| mark[x as usize]) {
                    continue;
                }
                other.push(r);
                let mut push = |w: VertexId| {
                    if stamp[w as usize] != tag {
                        stamp[w as usize] = tag;
                        queue.push(w);
                    }
                };
                if forward {
                    g.out_arcs(v).for_each(|a| push(a.head));
                } else {
                    g.in_arcs(v).for_each(|a| push(a.head));
                }
            }
            let own = if forward { &fwd[h as usize] } else { &bwd[h as usize] };
            for &x in own {
                mark[x as usize] = false;
            }
        }
    }
    (fwd, bwd)
}

type DistLists = Vec<Vec<(HubId, u32)>>;

/// Pruned Dijkstra labeling for shortest-path distances.
fn pruned_distances(g: &TimeExpandedGraph, order: &[VertexId]) -> (DistLists, DistLists) {
    let n = g.num_vertices();
    let mut fwd: DistLists = vec![Vec::new(); n];
    let mut bwd: DistLists = vec![Vec::new(); n];
    let mut via = vec![INFINITY; n];
    let mut best = vec![INFINITY; n];
    let mut settled = vec![false; n];
    let mut touched: Vec<VertexId> = Vec::new();
    let mut heap = BinaryHeap::new();

    for (r, &h) in order.iter().enumerate() {
        let r = r as HubId;
        for forward in [true, false] {
            let own = if forward { &fwd[h as usize] } else { &bwd[h as usize] };
            for &(x, d) in own {
                via[x as usize] = d;
            }
            best[h as usize] = 0;
            touched.push(h);
            heap.push(Reverse((0u32, h)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if settled[v as usize] || d > best[v as usize] {
                    continue;
                }
                settled[v as usize] = true;
                let other = if forward { &mut bwd[v as usize] } else { &mut fwd[v as usize] };
                let covered = other
                    .iter()
                    .map(|&(x, d2)| via[x as usize].saturating_add(d2))
                    .min()
                    .unwrap_or(INFINITY);
                if covered <= d {
                    continue;
                }
                other.push((r, d));
                let mut relax = |w: VertexId, cost: u32| {
                    let nd = d.saturating_add(cost);
                    if nd < best[w as usize] {
                        if best[w as usize] == INFINITY {
                            touched.push(w);
                        }
                        best[w as usize] = nd;
                        heap.push(Reverse((nd, w)));
                    }
                };
                if forward {
                    g.out_arcs(v).for_each(|a| relax(a.head, a.cost));
                } else {
                    g.in_arcs(v).for_each(|a| relax(a.head, a.cost));
                }
            }
            for &v in &touched {
                best[v as usize] = INFINITY;
                settled[v as usize] = false;
            }
            touched.clear();
            let own = if forward { &fwd[h as usize] } else { &bwd[h as usize] };
            for &(x, _) in own {
                via[x as usize] = INFINITY;
            }
        }
    }
    (fwd, bwd)
}

/// Keeps each hub only in the forward label of the latest departure event
/// of a stop containing it, and only in the backward label of the earliest
/// arrival event containing it.
pub fn trim_event_labels(ls: &LabelSet, tt: &Timetable) -> Result<LabelSet, LabelError> {
    if ls.mode != LabelMode::Reachability {
        return Err(LabelError::WrongMode {
            expected: LabelMode::Reachability,
        });
    }
    let mut keep_fwd = vec![true; ls.forward.num_entries()];
    let mut keep_bwd = vec![true; ls.backward.num_entries()];
    let mut seen = vec![u32::MAX; ls.num_hubs()];
    for p in 0..tt.num_stops() as u32 {
        let stop = StopId(p);
        for &e in tt.departures_at(stop).ids.iter().rev() {
            let start = ls.forward.offsets[e.idx()] as usize;
            for (i, &h) in ls.forward(e.0).hubs.iter().enumerate() {
                if seen[h as usize] == 2 * p {
                    keep_fwd[start + i] = false;
                }
                seen[h as usize] = 2 * p;
            }
        }
        for &e in tt.arrivals_at(stop).ids {
            let start = ls.backward.offsets[e.idx()] as usize;
            for (i, &h) in ls.backward(e.0).hubs.iter().enumerate() {
                if seen[h as usize] == 2 * p + 1 {
                    keep_bwd[start + i] = false;
                }
                seen[h as usize] = 2 * p + 1;
            }
        }
    }
    let filter = |labels: &FlatLabels, keep: &[bool]| {
        labels.rebuild(|v, label, out| {
            let start = labels.offsets[v] as usize;
            out.extend(
                label
                    .hubs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| keep[start + i])
                    .map(|(_, &h)| (h, 0)),
            );
        })
    };
    Ok(LabelSet {
        forward: filter(&ls.forward, &keep_fwd),
        backward: filter(&ls.backward, &keep_bwd),
        ..ls.clone()
    })
}

/// Per-stop labels, each a list of `(hub, time)` pairs sorted by hub, stored
/// as parallel arrays.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StopLabels {
    pub(crate) offsets: Vec<u32>,
    pub(crate) hubs: Vec<HubId>,
    pub(crate) times: Vec<Time>,
}

#[derive(Clone, Copy, Debug)]
pub struct StopLabel<'a> {
    pub hubs: &'a [HubId],
    pub times: &'a [Time],
}

impl<'a> StopLabel<'a> {
    pub fn len(&self) -> usize {
        self.hubs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hubs.is_empty()
    }
}

impl StopLabels {
    fn from_lists(lists: Vec<Vec<(HubId, Time)>>) -> Self {
        let mut out = StopLabels {
            offsets: vec![0],
            ..Default::default()
        };
        for list in lists {
            for (h, t) in list {
                out.hubs.push(h);
                out.times.push(t);
            }
            out.offsets.push(out.hubs.len() as u32);
        }
        out
    }

    pub fn num_labels(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn num_entries(&self) -> usize {
        self.hubs.len()
    }

    #[inline]
    pub fn label(&self, stop: StopId) -> StopLabel<'_> {
        let r = self.offsets[stop.idx()] as usize..self.offsets[stop.idx() + 1] as usize;
        StopLabel {
            hubs: &self.hubs[r.clone()],
            times: &self.times[r],
        }
    }
}

/// Forward and backward stop labels. Forward times are the latest departure
/// from the stop that reaches the hub; backward times the earliest arrival
/// at the stop from the hub.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StopLabelSet {
    pub(crate) forward: StopLabels,
    pub(crate) backward: StopLabels,
    pub(crate) hub_time: Vec<Time>,
    pub(crate) time_ordered: bool,
}

impl StopLabelSet {
    pub fn num_stops(&self) -> usize {
        self.forward.num_labels()
    }

    #[inline]
    pub fn forward(&self, stop: StopId) -> StopLabel<'_> {
        self.forward.label(stop)
    }

    #[inline]
    pub fn backward(&self, stop: StopId) -> StopLabel<'_> {
        self.backward.label(stop)
    }

    pub fn forward_labels(&self) -> &StopLabels {
        &self.forward
    }

    pub fn backward_labels(&self) -> &StopLabels {
        &self.backward
    }

    #[inline]
    pub fn hub_time(&self, h: HubId) -> Time {
        self.hub_time[h as usize]
    }

    pub fn hub_times(&self) -> &[Time] {
        &self.hub_time
    }

    pub fn is_time_ordered(&self) -> bool {
        self.time_ordered
    }

    pub fn total_entries(&self) -> usize {
        self.forward.num_entries() + self.backward.num_entries()
    }
}

/// Merges the event labels of every stop into stop labels.
pub fn build_stop_labels(ls: &LabelSet, tt: &Timetable) -> Result<StopLabelSet, LabelError> {
    if ls.mode != LabelMode::Reachability {
        return Err(LabelError::WrongMode {
            expected: LabelMode::Reachability,
        });
    }
    let mut seen = vec![u32::MAX; ls.num_hubs()];
    let mut forward = Vec::with_capacity(tt.num_stops());
    let mut backward = Vec::with_capacity(tt.num_stops());
    for p in 0..tt.num_stops() as u32 {
        let stop = StopId(p);
        let mut list = Vec::new();
        let deps = tt.departures_at(stop);
        for (&e, &t) in deps.ids.iter().zip(deps.times).rev() {
            for &h in ls.forward(e.0).hubs {
                if seen[h as usize] != 2 * p {
                    seen[h as usize] = 2 * p;
                    list.push((h, t));
                }
            }
        }
        list.sort_unstable();
        forward.push(list);

        let mut list = Vec::new();
        let arrs = tt.arrivals_at(stop);
        for (&e, &t) in arrs.ids.iter().zip(arrs.times) {
            for &h in ls.backward(e.0).hubs {
                if seen[h as usize] != 2 * p + 1 {
                    seen[h as usize] = 2 * p + 1;
                    list.push((h, t));
                }
            }
        }
        list.sort_unstable();
        backward.push(list);
    }
    Ok(StopLabelSet {
        forward: StopLabels::from_lists(forward),
        backward: StopLabels::from_lists(backward),
        hub_time: ls.hub_time.clone(),
        time_ordered: ls.time_ordered,
    })
}

/// Old-to-new hub id map produced by [`reassign_hub_ids`]; unused hubs map
/// to `u32::MAX`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HubIdMap {
    pub old_to_new: Vec<HubId>,
}

/// Renumbers all hubs used by `ls` or `sls` in order of increasing event
/// time (ties by stop, then old id) and re-sorts every label.
pub fn reassign_hub_ids(sls: &StopLabelSet, ls: &LabelSet) -> (StopLabelSet, LabelSet, HubIdMap) {
    let mut used = vec![false; ls.num_hubs()];
    for &h in ls
        .forward
        .hubs
        .iter()
        .chain(&ls.backward.hubs)
        .chain(&sls.forward.hubs)
        .chain(&sls.backward.hubs)
    {
        used[h as usize] = true;
    }
    let mut hubs: Vec<HubId> = (0..ls.num_hubs() as HubId).filter(|&h| used[h as usize]).collect();
    hubs.sort_by_key(|&h| (ls.hub_time[h as usize], ls.hub_stop[h as usize], h));
    let mut old_to_new = vec![u32::MAX; ls.num_hubs()];
    for (new, &old) in hubs.iter().enumerate() {
        old_to_new[old as usize] = new as HubId;
    }

    let remap = |labels: &FlatLabels| {
        labels.rebuild(|_, label, out| {
            if label.dists.is_empty() {
                out.extend(label.hubs.iter().map(|&h| (old_to_new[h as usize], 0)));
            } else {
                out.extend(
                    label
                        .hubs
                        .iter()
                        .zip(label.dists)
                        .map(|(&h, &d)| (old_to_new[h as usize], d)),
                );
            }
            out.sort_unstable();
        })
    };
    let remap_stop = |labels: &StopLabels| {
        let lists = (0..labels.num_labels() as u32)
            .map(|p| {
                let label = labels.label(StopId(p));
                let mut list: Vec<(HubId, Time)> = label
                    .hubs
                    .iter()
                    .zip(label.times)
                    .map(|(&h, &t)| (old_to_new[h as usize], t))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        StopLabels::from_lists(lists)
    };

    let hub_time: Vec<Time> = hubs.iter().map(|&h| ls.hub_time[h as usize]).collect();
    let new_ls = LabelSet {
        mode: ls.mode,
        forward: remap(&ls.forward),
        backward: remap(&ls.backward),
        hub_vertex: hubs.iter().map(|&h| ls.hub_vertex[h as usize]).collect(),
        hub_time: hub_time.clone(),
        hub_stop: hubs.iter().map(|&h| ls.hub_stop[h as usize]).collect(),
        time_ordered: true,
    };
    let new_sls = StopLabelSet {
        forward: remap_stop(&sls.forward),
        backward: remap_stop(&sls.backward),
        hub_time,
        time_ordered: true,
    };
    (new_sls, new_ls, HubIdMap { old_to_new })
}

/// Size figures for a label build.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelStats {
    pub vertices: usize,
    pub hubs: usize,
    /// Average forward/backward label size over labels actually stored.
    pub hubs_per_label: f64,
    /// Event-label entries per stop (sum over the stop's events).
    pub hubs_per_stop: f64,
    /// Stop-label entries per stop, when stop labels exist.
    pub stop_hubs_per_stop: Option<f64>,
    /// Average number of departure events of a stop sharing one forward hub.
    pub events_per_stop_hub: Option<f64>,
}

pub fn label_stats(ls: &LabelSet, sls: Option<&StopLabelSet>, tt: &Timetable) -> LabelStats {
    let nonempty = |f: &FlatLabels| (0..f.num_labels()).filter(|&v| f.offsets[v + 1] > f.offsets[v]).count();
    let labels = nonempty(&ls.forward) + nonempty(&ls.backward);
    let stops = tt.num_stops().max(1) as f64;
    LabelStats {
        vertices: ls.num_vertices(),
        hubs: ls.num_hubs(),
        hubs_per_label: if labels == 0 {
            0.0
        } else {
            ls.total_entries() as f64 / labels as f64
        },
        hubs_per_stop: ls.total_entries() as f64 / stops,
        stop_hubs_per_stop: sls.map(|s| s.total_entries() as f64 / stops),
        events_per_stop_hub: sls.and_then(|s| {
            let entries = s.forward.num_entries();
            let event_entries: usize = (0..tt.num_stops() as u32)
                .flat_map(|p| tt.departures_at(StopId(p)).ids.iter().copied())
                .map(|e| ls.forward(e.0).len())
                .sum();
            (entries > 0).then(|| event_entries as f64 / entries as f64)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphMode, VertexInfo};
    use crate::timetable::Capability;

    fn chain(n: usize) -> TimeExpandedGraph {
        let vertices = (0..n)
            .map(|i| VertexInfo {
                stop: StopId(0),
                time: 10 * i as Time,
                kind: VertexKind::Event,
                capability: Capability::BOTH,
            })
            .collect();
        let arcs = (1..n as u32).map(|i| (i - 1, i, 10)).collect();
        TimeExpandedGraph::from_arcs(GraphMode::EarliestArrival, vertices, arcs)
    }

    fn vertices_of(ls: &LabelSet, label: Label<'_>) -> Vec<VertexId> {
        let mut v: Vec<_> = label.hubs.iter().map(|&h| ls.hub_vertex(h)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn arcless_graph_labels_are_self() {
        let g = TimeExpandedGraph::from_arcs(
            GraphMode::EarliestArrival,
            chain(3).vertices().to_vec(),
            vec![],
        );
        let ls = build_labels(&g, LabelOptions::new(LabelMode::Reachability)).unwrap();
        for v in 0..3 {
            assert_eq!(vertices_of(&ls, ls.forward(v)), vec![v]);
            assert_eq!(vertices_of(&ls, ls.backward(v)), vec![v]);
        }
    }

    #[test]
    fn chain_with_middle_first() {
        // u=0 -> v=1 -> w=2, processed as (v, u, w)
        let g = chain(3);
        let ls = build_labels_with_order(&g, LabelOptions::new(LabelMode::Reachability), &[1, 0, 2])
            .unwrap();
        assert_eq!(vertices_of(&ls, ls.forward(0)), vec![0, 1]);
        assert_eq!(vertices_of(&ls, ls.backward(2)), vec![1, 2]);
        // v covers u -> w, so w is not a hub of u
        assert_eq!(ls.forward(0).hubs.iter().filter(|h| ls.backward(2).hubs.contains(h)).count(), 1);
    }

    #[test]
    fn distance_labels_on_chain() {
        let g = chain(4);
        let ls = build_labels(&g, LabelOptions::new(LabelMode::Distance)).unwrap();
        let f = ls.forward(0);
        let b = ls.backward(3);
        let best = f
            .hubs
            .iter()
            .zip(f.dists)
            .filter_map(|(h, d)| {
                b.hubs.iter().position(|x| x == h).map(|i| d + b.dists[i])
            })
            .min();
        assert_eq!(best, Some(30));
    }

    #[test]
    fn bad_ordering_rejected() {
        let g = chain(3);
        assert_eq!(
            build_labels_with_order(&g, LabelOptions::new(LabelMode::Reachability), &[0, 0, 1])
                .unwrap_err(),
            LabelError::BadOrdering
        );
    }

    #[test]
    fn orderings_are_permutations() {
        let g = chain(7);
        for ordering in [
            VertexOrdering::Degree,
            VertexOrdering::Sampled { samples: 16, seed: 3 },
        ] {
            let mut order = vertex_order(&g, ordering);
            order.sort_unstable();
            assert_eq!(order, (0..7).collect::<Vec<_>>());
        }
    }

    #[test]
    fn reassign_sorts_by_time() {
        // hubs with times 300, 100, 200 get ids 2, 0, 1
        let vertices = [300, 100, 200]
            .iter()
            .map(|&t| VertexInfo {
                stop: StopId(0),
                time: t,
                kind: VertexKind::Event,
                capability: Capability::BOTH,
            })
            .collect();
        let g = TimeExpandedGraph::from_arcs(GraphMode::EarliestArrival, vertices, vec![]);
        let ls = build_labels_with_order(&g, LabelOptions::new(LabelMode::Reachability), &[0, 1, 2])
            .unwrap();
        let sls = StopLabelSet {
            forward: StopLabels::from_lists(vec![]),
            backward: StopLabels::from_lists(vec![]),
            hub_time: ls.hub_time.clone(),
            time_ordered: false,
        };
        let (_, ls2, map) = reassign_hub_ids(&sls, &ls);
        assert_eq!(map.old_to_new, vec![2, 0, 1]);
        assert_eq!(ls2.hub_times(), &[100, 200, 300]);
        assert!(ls2.is_time_ordered());
    }

    #[test]
    fn reassign_breaks_time_ties_by_stop_then_id() {
        let vertices = [(1, 50), (0, 50), (0, 50)]
            .iter()
            .map(|&(s, t)| VertexInfo {
                stop: StopId(s),
                time: t,
                kind: VertexKind::Event,
                capability: Capability::BOTH,
            })
            .collect();
        let g = TimeExpandedGraph::from_arcs(GraphMode::EarliestArrival, vertices, vec![]);
        let ls = build_labels_with_order(&g, LabelOptions::new(LabelMode::Reachability), &[0, 1, 2])
            .unwrap();
        let sls = StopLabelSet {
            forward: StopLabels::from_lists(vec![]),
            backward: StopLabels::from_lists(vec![]),
            hub_time: ls.hub_time.clone(),
            time_ordered: false,
        };
        let (_, _, map) = reassign_hub_ids(&sls, &ls);
        assert_eq!(map.old_to_new, vec![2, 0, 1]);
    }
}
