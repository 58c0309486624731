//! Location-to-location queries.
//!
//! A location is given by the stops near it and the walking time to each.
//! The stop labels of those stops are merged on the fly into one virtual
//! label ("superlabel") with walk-adjusted times: forward times become
//! `time_p(h) - walk(p)` (latest departure from the location), backward
//! times `time_q(h) + walk(q)` (earliest arrival at the location). The
//! ordinary stop-label sweeps then run on the merged labels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::labeling::{HubId, StopLabel, StopLabelSet};
use crate::query::{check_stop, pareto_insert, EaAnswer, ProfileEntry, QueryError, QueryStats};
use crate::timetable::{StopId, Time, INFINITY};

/// Access or egress stops of a location with their walking times.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationAccess {
    pub entries: Vec<(StopId, Time)>,
}

impl LocationAccess {
    pub fn new(entries: Vec<(StopId, Time)>) -> Self {
        LocationAccess { entries }
    }

    pub fn single(stop: StopId) -> Self {
        LocationAccess {
            entries: vec![(stop, 0)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Lazy k-way merge of member stop labels by hub id.
struct Superlabel<'a> {
    members: Vec<(StopLabel<'a>, Time)>,
    pos: Vec<usize>,
    forward: bool,
}

impl<'a> Superlabel<'a> {
    fn new(access: &LocationAccess, sls: &'a StopLabelSet, forward: bool) -> Self {
        let members: Vec<_> = access
            .entries
            .iter()
            .map(|&(p, w)| {
                let label = if forward { sls.forward(p) } else { sls.backward(p) };
                (label, w)
            })
            .collect();
        let pos = vec![0; members.len()];
        Superlabel {
            members,
            pos,
            forward,
        }
    }

    /// Skips, in every member, the hubs whose time is before `t`.
    fn seek_time(&mut self, hub_time: &[Time], t: Time) {
        for ((label, _), pos) in self.members.iter().zip(&mut self.pos) {
            *pos = label.hubs.partition_point(|&h| hub_time[h as usize] < t);
        }
    }

    fn peek(&self) -> Option<HubId> {
        self.members
            .iter()
            .zip(&self.pos)
            .filter_map(|((label, _), &i)| label.hubs.get(i).copied())
            .min()
    }

    /// Pops the smallest hub with its combined adjusted time; `None` for the
    /// time when no member yields a usable one (a departure before time 0).
    fn pop(&mut self, hub: HubId, stats: &mut QueryStats) -> Option<Time> {
        let mut best: Option<Time> = None;
        for ((label, walk), pos) in self.members.iter().zip(&mut self.pos) {
            if label.hubs.get(*pos) != Some(&hub) {
                continue;
            }
            stats.hubs_scanned += 1;
            let t = label.times[*pos];
            *pos += 1;
            if self.forward {
                if let Some(d) = t.checked_sub(*walk) {
                    best = Some(best.map_or(d, |b| b.max(d)));
                }
            } else if let Some(a) = t.checked_add(*walk).filter(|&a| a != INFINITY) {
                best = Some(best.map_or(a, |b| b.min(a)));
            }
        }
        best
    }
}

fn validate(src: &LocationAccess, dst: &LocationAccess, sls: &StopLabelSet) -> Result<(), QueryError> {
    if src.is_empty() || dst.is_empty() {
        return Err(QueryError::EmptyAccess);
    }
    for &(p, _) in src.entries.iter().chain(&dst.entries) {
        check_stop(sls.num_stops(), p)?;
    }
    if !sls.is_time_ordered() {
        return Err(QueryError::NotTimeOrdered);
    }
    Ok(())
}

/// Materializes the merged label of a location as `(hub, adjusted time)`
/// pairs sorted by hub.
pub fn superlabel_entries(
    access: &LocationAccess,
    sls: &StopLabelSet,
    forward: bool,
) -> Vec<(HubId, Time)> {
    let mut s = Superlabel::new(access, sls, forward);
    let mut stats = QueryStats::default();
    let mut out = Vec::new();
    while let Some(h) = s.peek() {
        if let Some(t) = s.pop(h, &mut stats) {
            out.push((h, t));
        }
    }
    out
}

/// Earliest arrival at the destination location when leaving the source
/// location no earlier than `departure`.
pub fn loc_ea_query(
    src: &LocationAccess,
    dst: &LocationAccess,
    departure: Time,
    sls: &StopLabelSet,
) -> Result<EaAnswer, QueryError> {
    validate(src, dst, sls)?;
    let hub_time = sls.hub_times();
    let mut stats = QueryStats {
        labels_scanned: (src.entries.len() + dst.entries.len()) as u64,
        ..Default::default()
    };
    let mut best = INFINITY;
    let mut best_hub = None;

    // walking straight from a shared stop
    for &(p, ws) in &src.entries {
        for &(q, wt) in &dst.entries {
            if p == q {
                let walk = departure as u64 + ws as u64 + wt as u64;
                if walk < best as u64 {
                    best = walk as Time;
                }
            }
        }
    }

    let mut f = Superlabel::new(src, sls, true);
    let mut b = Superlabel::new(dst, sls, false);
    f.seek_time(hub_time, departure);
    b.seek_time(hub_time, departure);
    while let (Some(x), Some(y)) = (f.peek(), b.peek()) {
        // any later hub is reached no earlier than its own time
        if hub_time[x.min(y) as usize] >= best {
            break;
        }
        if x < y {
            f.pop(x, &mut stats);
        } else if y < x {
            b.pop(y, &mut stats);
        } else {
            stats.hubs_matched += 1;
            let dep = f.pop(x, &mut stats);
            let arr = b.pop(y, &mut stats);
            if let (Some(d), Some(a)) = (dep, arr) {
                if d >= departure && a < best {
                    best = a;
                    best_hub = Some(x);
                }
            }
        }
    }
    Ok(EaAnswer {
        arrival: best,
        matched_hub: best_hub,
        stats,
    })
}

/// All non-dominated (departure from source, arrival at destination) pairs.
///
/// A stop in both access sets would pair with itself through the merged
/// labels; such pairs are not journeys, so the query is split into sweeps
/// that leave them out.
pub fn loc_profile_query(
    src: &LocationAccess,
    dst: &LocationAccess,
    sls: &StopLabelSet,
) -> Result<Vec<ProfileEntry>, QueryError> {
    validate(src, dst, sls)?;
    let mut set = BTreeMap::new();
    let shared = |p: StopId| dst.entries.iter().any(|&(q, _)| q == p);
    let (common, rest): (Vec<_>, Vec<_>) = src.entries.iter().copied().partition(|&(p, _)| shared(p));
    if !rest.is_empty() {
        profile_sweep(&LocationAccess::new(rest), dst, sls, &mut set);
    }
    for (p, w) in common {
        let others: Vec<_> = dst.entries.iter().copied().filter(|&(q, _)| q != p).collect();
        if !others.is_empty() {
            profile_sweep(&LocationAccess::new(vec![(p, w)]), &LocationAccess::new(others), sls, &mut set);
        }
    }
    Ok(set
        .into_iter()
        .map(|(d, a)| ProfileEntry::new(d, a))
        .collect())
}

fn profile_sweep(src: &LocationAccess, dst: &LocationAccess, sls: &StopLabelSet, set: &mut BTreeMap<Time, Time>) {
    let mut stats = QueryStats::default();
    let mut f = Superlabel::new(src, sls, true);
    let mut b = Superlabel::new(dst, sls, false);
    while let (Some(x), Some(y)) = (f.peek(), b.peek()) {
        if x < y {
            f.pop(x, &mut stats);
        } else if y < x {
            b.pop(y, &mut stats);
        } else if let (Some(d), Some(a)) = (f.pop(x, &mut stats), b.pop(y, &mut stats)) {
            pareto_insert(set, d, a);
        }
    }
}
