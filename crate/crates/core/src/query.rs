//! Earliest-arrival, profile, and multicriteria queries answered from labels.

use std::collections::BTreeMap;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexId;
use crate::labeling::{HubId, Label, LabelMode, LabelSet, StopLabelSet};
use crate::timetable::{StopEvents, StopId, Time, Timetable, INFINITY};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EaQuery {
    pub source: StopId,
    pub target: StopId,
    pub departure: Time,
}

impl EaQuery {
    pub fn new(source: StopId, target: StopId, departure: Time) -> Self {
        EaQuery {
            source,
            target,
            departure,
        }
    }
}

/// Work counters of one query: labels touched, label entries read, and
/// common hubs found.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub labels_scanned: u64,
    pub hubs_scanned: u64,
    pub hubs_matched: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EaAnswer {
    /// `INFINITY` when the target cannot be reached.
    pub arrival: Time,
    pub matched_hub: Option<HubId>,
    pub stats: QueryStats,
}

impl EaAnswer {
    fn unreachable(stats: QueryStats) -> Self {
        EaAnswer {
            arrival: INFINITY,
            matched_hub: None,
            stats,
        }
    }

    pub fn is_reachable(&self) -> bool {
        self.arrival != INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub departure: Time,
    pub arrival: Time,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transfers: Option<u32>,
}

impl ProfileEntry {
    pub fn new(departure: Time, arrival: Time) -> Self {
        ProfileEntry {
            departure,
            arrival,
            transfers: None,
        }
    }

    /// Departs no earlier and arrives no later than `other`, and differs.
    pub fn dominates(&self, other: &ProfileEntry) -> bool {
        self.departure >= other.departure && self.arrival <= other.arrival && self != other
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct McEntry {
    pub arrival: Time,
    pub transfers: u32,
}

/// Pareto set over arrival time and transfers, arrivals increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct McAnswer {
    pub entries: Vec<McEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    EventLabels,
    StopLabels,
}

/// One way of running an EA query. Answers never depend on the variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EaVariant {
    pub engine: Engine,
    pub pruning: bool,
    pub hashing: bool,
    pub binary_search: bool,
}

impl EaVariant {
    pub const FASTEST: EaVariant = EaVariant {
        engine: Engine::EventLabels,
        pruning: true,
        hashing: true,
        binary_search: true,
    };

    pub fn new(engine: Engine) -> Self {
        EaVariant {
            engine,
            pruning: false,
            hashing: false,
            binary_search: false,
        }
    }

    /// All 16 combinations, event labels first.
    pub fn all() -> Vec<EaVariant> {
        let mut out = Vec::with_capacity(16);
        for engine in [Engine::EventLabels, Engine::StopLabels] {
            for bits in 0..8u8 {
                out.push(EaVariant {
                    engine,
                    pruning: bits & 1 != 0,
                    hashing: bits & 2 != 0,
                    binary_search: bits & 4 != 0,
                });
            }
        }
        out
    }

    pub fn name(&self) -> String {
        let mut s = String::from(match self.engine {
            Engine::EventLabels => "event",
            Engine::StopLabels => "stop",
        });
        for (on, tag) in [
            (self.pruning, "prn"),
            (self.hashing, "hash"),
            (self.binary_search, "bin"),
        ] {
            if on {
                s.push('+');
                s.push_str(tag);
            }
        }
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown stop id {0}")]
    UnknownStop(StopId),
    #[error("query needs {0:?} labels")]
    WrongLabels(LabelMode),
    #[error("stop labels must have time-ordered hub ids")]
    NotTimeOrdered,
    #[error("location query needs at least one access and one egress stop")]
    EmptyAccess,
}

pub(crate) fn check_stop(num_stops: usize, s: StopId) -> Result<(), QueryError> {
    if s.idx() < num_stops {
        Ok(())
    } else {
        Err(QueryError::UnknownStop(s))
    }
}

/// Entries read from a label pair in a merge that ended at positions
/// `i` and `j`.
#[inline]
fn merge_reads(i: usize, j: usize, a: usize, b: usize) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    ((i + 1).min(a) + (j + 1).min(b)) as u64
}

/// First common hub of two sorted arrays.
#[inline]
fn first_common(a: &[HubId], b: &[HubId], scanned: &mut u64) -> Option<HubId> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i], b[j]);
        if x == y {
            *scanned += merge_reads(i, j, a.len(), b.len());
            return Some(x);
        }
        if x < y {
            i += 1;
        } else {
            j += 1;
        }
    }
    *scanned += merge_reads(i, j, a.len(), b.len());
    None
}

/// Reachability test between one fixed forward label and many backward
/// labels, optionally through a hash set built on first use.
struct ReachTester<'a> {
    forward: &'a [HubId],
    hashing: bool,
    set: Option<FxHashSet<HubId>>,
    stats: QueryStats,
}

impl<'a> ReachTester<'a> {
    fn new(forward: &'a [HubId], hashing: bool) -> Self {
        ReachTester {
            forward,
            hashing,
            set: None,
            stats: QueryStats {
                labels_scanned: 1,
                ..Default::default()
            },
        }
    }

    fn test(&mut self, backward: &[HubId]) -> Option<HubId> {
        self.stats.labels_scanned += 1;
        let hub = if self.hashing {
            if self.set.is_none() {
                self.stats.hubs_scanned += self.forward.len() as u64;
                self.set = Some(self.forward.iter().copied().collect());
            }
            let set = self.set.as_ref().unwrap();
            let mut found = None;
            for &h in backward {
                self.stats.hubs_scanned += 1;
                if set.contains(&h) {
                    found = Some(h);
                    break;
                }
            }
            found
        } else {
            first_common(self.forward, backward, &mut self.stats.hubs_scanned)
        };
        if hub.is_some() {
            self.stats.hubs_matched += 1;
        }
        hub
    }
}

/// Earliest arrival from event labels: the earliest arrival event at the
/// target reachable from the first departure event at the source at or
/// after the departure time.
pub fn ea_event_labels(
    q: EaQuery,
    ls: &LabelSet,
    tt: &Timetable,
    flags: EaVariant,
) -> Result<EaAnswer, QueryError> {
    check_stop(tt.num_stops(), q.source)?;
    check_stop(tt.num_stops(), q.target)?;
    if ls.mode() != LabelMode::Reachability {
        return Err(QueryError::WrongLabels(LabelMode::Reachability));
    }
    if q.source == q.target {
        return Ok(EaAnswer {
            arrival: q.departure,
            matched_hub: None,
            stats: QueryStats::default(),
        });
    }
    let deps = tt.departures_at(q.source);
    let i = deps.first_at_or_after(q.departure);
    if i == deps.len() {
        return Ok(EaAnswer::unreachable(QueryStats::default()));
    }
    let source_time = deps.times[i];
    let arrs = tt.arrivals_at(q.target);
    let mut tester = ReachTester::new(ls.forward(deps.ids[i].0).hubs, flags.hashing);
    // arrival events before the source event cannot be reached
    let lo = if flags.pruning {
        arrs.first_at_or_after(source_time)
    } else {
        0
    };
    let backward = |j: usize| ls.backward(arrs.ids[j].0).hubs;

    let mut found: Option<(usize, HubId)> = None;
    if flags.binary_search {
        // smallest j with reach(j); the predicate is monotone in j because
        // waiting arcs chain the target's events
        let (mut a, mut b) = (0, arrs.len());
        while a < b {
            let mid = a + (b - a) / 2;
            let hit = if mid < lo { None } else { tester.test(backward(mid)) };
            match hit {
                Some(h) => {
                    found = Some((mid, h));
                    b = mid;
                }
                None => a = mid + 1,
            }
        }
    } else {
        for j in lo..arrs.len() {
            if let Some(h) = tester.test(backward(j)) {
                found = Some((j, h));
                break;
            }
        }
    }
    Ok(match found {
        Some((j, h)) => EaAnswer {
            arrival: arrs.times[j],
            matched_hub: Some(h),
            stats: tester.stats,
        },
        None => EaAnswer::unreachable(tester.stats),
    })
}

/// Lower bound of `label` for hubs with time at least `t`, hub ids being
/// time-ordered.
fn time_lower_bound(label_hubs: &[HubId], hub_time: &[Time], t: Time) -> usize {
    label_hubs.partition_point(|&h| hub_time[h as usize] < t)
}

/// Earliest arrival from stop labels: the best `time_t(h)` over common hubs
/// whose departure `time_s(h)` is not before the departure time.
pub fn ea_stop_labels(
    q: EaQuery,
    sls: &StopLabelSet,
    flags: EaVariant,
) -> Result<EaAnswer, QueryError> {
    check_stop(sls.num_stops(), q.source)?;
    check_stop(sls.num_stops(), q.target)?;
    if !sls.is_time_ordered() {
        return Err(QueryError::NotTimeOrdered);
    }
    if q.source == q.target {
        return Ok(EaAnswer {
            arrival: q.departure,
            matched_hub: None,
            stats: QueryStats::default(),
        });
    }
    let f = sls.forward(q.source);
    let b = sls.backward(q.target);
    let hub_time = sls.hub_times();
    let tau = q.departure;
    let mut stats = QueryStats {
        labels_scanned: 2,
        ..Default::default()
    };
    let (mut i0, mut j0) = (0, 0);
    if flags.pruning && flags.binary_search {
        i0 = time_lower_bound(f.hubs, hub_time, tau);
        j0 = time_lower_bound(b.hubs, hub_time, tau);
    }
    let mut best = INFINITY;
    let mut best_hub = None;

    if flags.hashing {
        let mut times: FxHashMap<HubId, Time> = FxHashMap::default();
        times.reserve(f.len() - i0);
        for k in i0..f.len() {
            stats.hubs_scanned += 1;
            times.insert(f.hubs[k], f.times[k]);
        }
        for k in j0..b.len() {
            let h = b.hubs[k];
            if flags.pruning && hub_time[h as usize] >= best {
                break;
            }
            stats.hubs_scanned += 1;
            if let Some(&ts) = times.get(&h) {
                stats.hubs_matched += 1;
                if ts >= tau && b.times[k] < best {
                    best = b.times[k];
                    best_hub = Some(h);
                }
            }
        }
    } else {
        let (mut i, mut j) = (i0, j0);
        while i < f.len() && j < b.len() {
            let (x, y) = (f.hubs[i], b.hubs[j]);
            if flags.pruning && hub_time[x.min(y) as usize] >= best {
                break;
            }
            if x < y {
                stats.hubs_scanned += 1;
                i += 1;
            } else if y < x {
                stats.hubs_scanned += 1;
                j += 1;
            } else {
                stats.hubs_scanned += 2;
                stats.hubs_matched += 1;
                if f.times[i] >= tau && b.times[j] < best {
                    best = b.times[j];
                    best_hub = Some(x);
                }
                i += 1;
                j += 1;
            }
        }
    }
    Ok(EaAnswer {
        arrival: best,
        matched_hub: best_hub,
        stats,
    })
}

/// Runs an EA query through the engine and flags of `variant`.
pub fn ea_query(
    q: EaQuery,
    tt: &Timetable,
    ls: &LabelSet,
    sls: &StopLabelSet,
    variant: EaVariant,
) -> Result<EaAnswer, QueryError> {
    match variant.engine {
        Engine::EventLabels => ea_event_labels(q, ls, tt, variant),
        Engine::StopLabels => ea_stop_labels(q, sls, variant),
    }
}

/// All tight (departure, arrival) pairs between two stops, by a coordinated
/// sweep over the departure events at the source and the arrival events at
/// the target.
pub fn profile_event_labels(
    source: StopId,
    target: StopId,
    ls: &LabelSet,
    tt: &Timetable,
) -> Result<Vec<ProfileEntry>, QueryError> {
    check_stop(tt.num_stops(), source)?;
    check_stop(tt.num_stops(), target)?;
    if ls.mode() != LabelMode::Reachability {
        return Err(QueryError::WrongLabels(LabelMode::Reachability));
    }
    let mut out = Vec::new();
    if source == target {
        return Ok(out);
    }
    let deps: StopEvents<'_> = tt.departures_at(source);
    let arrs = tt.arrivals_at(target);
    let reach = |i: usize, j: usize| {
        let mut scanned = 0;
        first_common(
            ls.forward(deps.ids[i].0).hubs,
            ls.backward(arrs.ids[j].0).hubs,
            &mut scanned,
        )
        .is_some()
    };
    let (mut i, mut j) = (0, 0);
    while i < deps.len() {
        // earliest arrival event reachable from departure i
        j = j.max(arrs.first_at_or_after(deps.times[i]));
        while j < arrs.len() && !reach(i, j) {
            j += 1;
        }
        if j == arrs.len() {
            break;
        }
        // latest departure still reaching it
        while i + 1 < deps.len() && reach(i + 1, j) {
            i += 1;
        }
        out.push(ProfileEntry::new(deps.times[i], arrs.times[j]));
        i += 1;
        j += 1;
    }
    Ok(out)
}

/// Inserts into a Pareto set keyed by departure, dropping dominated entries.
pub(crate) fn pareto_insert(set: &mut BTreeMap<Time, Time>, dep: Time, arr: Time) {
    if let Some((_, &a)) = set.range(dep..).next() {
        if a <= arr {
            return;
        }
    }
    let dominated: Vec<Time> = set
        .range(..=dep)
        .rev()
        .take_while(|(_, &a)| a >= arr)
        .map(|(&d, _)| d)
        .collect();
    for d in dominated {
        set.remove(&d);
    }
    set.insert(dep, arr);
}

/// Profile from stop labels: every common hub induces a journey
/// `(time_s(h), time_t(h))`; dominated ones are discarded on the fly.
pub fn profile_stop_labels(
    source: StopId,
    target: StopId,
    sls: &StopLabelSet,
) -> Result<Vec<ProfileEntry>, QueryError> {
    check_stop(sls.num_stops(), source)?;
    check_stop(sls.num_stops(), target)?;
    if source == target {
        return Ok(Vec::new());
    }
    let f = sls.forward(source);
    let b = sls.backward(target);
    let mut set = BTreeMap::new();
    let (mut i, mut j) = (0, 0);
    while i < f.len() && j < b.len() {
        let (x, y) = (f.hubs[i], b.hubs[j]);
        if x < y {
            i += 1;
        } else if y < x {
            j += 1;
        } else {
            pareto_insert(&mut set, f.times[i], b.times[j]);
            i += 1;
            j += 1;
        }
    }
    Ok(set
        .into_iter()
        .map(|(d, a)| ProfileEntry::new(d, a))
        .collect())
}

/// Shortest-path cost between two vertices from distance labels.
pub fn dist_label_query(u: VertexId, v: VertexId, ls: &LabelSet) -> Time {
    if u == v {
        return 0;
    }
    dist_between(ls.forward(u), ls.backward(v))
}

fn dist_between(f: Label<'_>, b: Label<'_>) -> Time {
    let mut best = INFINITY;
    let (mut i, mut j) = (0, 0);
    while i < f.hubs.len() && j < b.hubs.len() {
        let (x, y) = (f.hubs[i], b.hubs[j]);
        if x < y {
            i += 1;
        } else if y < x {
            j += 1;
        } else {
            best = best.min(f.dists[i].saturating_add(b.dists[j]));
            i += 1;
            j += 1;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reach {
    pub reachable: bool,
    /// First common hub found; `None` for `u == v` or unreachable pairs.
    pub hub: Option<HubId>,
}

/// Reachability from labels, stopping at the first common hub.
pub fn reach_label_query(u: VertexId, v: VertexId, ls: &LabelSet, hashing: bool) -> Reach {
    if u == v {
        return Reach {
            reachable: true,
            hub: None,
        };
    }
    let hub = ReachTester::new(ls.forward(u).hubs, hashing).test(ls.backward(v).hubs);
    Reach {
        reachable: hub.is_some(),
        hub,
    }
}

/// Pareto set of (arrival, transfers) for journeys leaving the source at or
/// after the departure time, from distance labels on the multicriteria
/// graph. Transfers are trips used minus one; walking-only journeys count as
/// zero transfers.
pub fn mc_query(q: EaQuery, dls: &LabelSet, tt: &Timetable) -> Result<McAnswer, QueryError> {
    check_stop(tt.num_stops(), q.source)?;
    check_stop(tt.num_stops(), q.target)?;
    if dls.mode() != LabelMode::Distance {
        return Err(QueryError::WrongLabels(LabelMode::Distance));
    }
    if q.source == q.target {
        return Ok(McAnswer {
            entries: vec![McEntry {
                arrival: q.departure,
                transfers: 0,
            }],
        });
    }
    let mut answer = McAnswer::default();
    let deps = tt.departures_at(q.source);
    let i = deps.first_at_or_after(q.departure);
    if i == deps.len() {
        return Ok(answer);
    }
    let from = dls.forward(deps.ids[i].0);
    let arrs = tt.arrivals_at(q.target);
    let dist = |j: usize| dist_between(from, dls.backward(arrs.ids[j].0));
    let Some(&last) = arrs.ids.last() else {
        return Ok(answer);
    };
    let fewest = dist_between(from, dls.backward(last.0));
    if fewest == INFINITY {
        return Ok(answer);
    }
    let fewest = fewest.saturating_sub(1);

    // earliest reachable arrival event
    let (mut a, mut b) = (arrs.first_at_or_after(deps.times[i]), arrs.len() - 1);
    while a < b {
        let mid = a + (b - a) / 2;
        if dist(mid) != INFINITY {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    let mut current = u32::MAX;
    for j in a..arrs.len() {
        let d = dist(j);
        if d == INFINITY {
            continue;
        }
        let transfers = d.saturating_sub(1);
        if transfers < current {
            current = transfers;
            answer.entries.push(McEntry {
                arrival: arrs.times[j],
                transfers,
            });
            if transfers == fewest {
                break;
            }
        }
    }
    Ok(answer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_insert_keeps_frontier() {
        let mut set = BTreeMap::new();
        pareto_insert(&mut set, 100, 500);
        pareto_insert(&mut set, 50, 600); // dominated
        pareto_insert(&mut set, 200, 700);
        pareto_insert(&mut set, 150, 450); // dominates (100, 500)
        pareto_insert(&mut set, 150, 450);
        let v: Vec<_> = set.into_iter().collect();
        assert_eq!(v, vec![(150, 450), (200, 700)]);
    }

    #[test]
    fn first_common_counts_reads() {
        let mut scanned = 0;
        assert_eq!(first_common(&[1, 4, 9], &[2, 4], &mut scanned), Some(4));
        assert_eq!(scanned, 4);
        let mut scanned = 0;
        assert_eq!(first_common(&[], &[2, 4], &mut scanned), None);
        assert_eq!(scanned, 0);
    }

    #[test]
    fn variants_are_distinct() {
        let all = EaVariant::all();
        assert_eq!(all.len(), 16);
        let names: std::collections::HashSet<_> = all.iter().map(|v| v.name()).collect();
        assert_eq!(names.len(), 16);
        assert_eq!(EaVariant::FASTEST.name(), "event+prn+hash+bin");
    }

    #[test]
    fn dominance() {
        let a = ProfileEntry::new(100, 200);
        assert!(a.dominates(&ProfileEntry::new(90, 200)));
        assert!(a.dominates(&ProfileEntry::new(100, 210)));
        assert!(!a.dominates(&a));
        assert!(!a.dominates(&ProfileEntry::new(110, 300)));
    }
}
