#![allow(dead_code)]

use std::path::PathBuf;

use transit_labels::generator::{generate, GenConfig, Shape};
use transit_labels::index::EaIndex;
use transit_labels::labeling::{HubId, StopLabelSet, VertexOrdering};
use transit_labels::query::ProfileEntry;
use transit_labels::timetable::{StopId, Time, Timetable};
use transit_labels::tsv::parse_timetable;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn fixture(name: &str) -> Timetable {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    parse_timetable(&text).unwrap()
}

pub fn stop(tt: &Timetable, name: &str) -> StopId {
    tt.stop_by_name(name).unwrap_or_else(|| panic!("no stop {name}"))
}

/// Small seeded instance: at most 60 stops, 150 trips and 10 footpaths.
pub fn small_instance(seed: u64) -> Timetable {
    let shape = [Shape::Grid, Shape::Line, Shape::HubAndSpoke][(seed % 3) as usize];
    let stops = 8 + (seed as usize * 7) % 53;
    let trips = 20 + (seed as usize * 13) % 131;
    let cfg = GenConfig::new(stops, trips, seed, shape).footpaths((seed % 11) as usize);
    generate(&cfg).unwrap()
}

/// Small instance with transfer times.
pub fn small_mtt_instance(seed: u64) -> Timetable {
    let shape = [Shape::Grid, Shape::Line, Shape::HubAndSpoke][(seed % 3) as usize];
    let cfg = GenConfig::new(10 + (seed as usize % 20), 30 + (seed as usize * 11) % 60, seed, shape)
        .footpaths(5)
        .max_mtt(120);
    generate(&cfg).unwrap()
}

pub fn ea_index(tt: &Timetable) -> EaIndex {
    EaIndex::build(tt.clone(), VertexOrdering::Degree).unwrap()
}

/// Every `(hub, departure, arrival)` a hub common to `SL_f(s)` and `SL_b(t)`
/// induces.
pub fn induced_pairs(sls: &StopLabelSet, s: StopId, t: StopId) -> Vec<(HubId, Time, Time)> {
    let (f, b) = (sls.forward(s), sls.backward(t));
    let mut out = Vec::new();
    for (i, h) in f.hubs.iter().enumerate() {
        if let Some(j) = b.hubs.iter().position(|x| x == h) {
            out.push((*h, f.times[i], b.times[j]));
        }
    }
    out
}

/// No entry dominates another and departures strictly increase.
pub fn is_pareto(profile: &[ProfileEntry]) -> bool {
    profile.windows(2).all(|w| w[0].departure < w[1].departure && w[0].arrival < w[1].arrival)
        && profile
            .iter()
            .all(|a| profile.iter().all(|b| a == b || !a.dominates(b)))
}
