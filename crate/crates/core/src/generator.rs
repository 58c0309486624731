//! Deterministic synthetic timetables.
//!
//! Stops are laid out on a line, a grid, or as spokes around a central hub.
//! Routes follow the layout; every trip runs one route with a fixed hop
//! time, a random start time within the first day, and short random dwells.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::timetable::{RawConnection, StopId, Time, Timetable};

pub const DAY: Time = 86_400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Line,
    Grid,
    HubAndSpoke,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub stops: usize,
    pub trips: usize,
    pub seed: u64,
    pub shape: Shape,
    /// Upper bound on generated footpaths (one per stop pair).
    pub footpaths: usize,
    /// Minimum transfer times are drawn uniformly from `0..=max_mtt`.
    pub max_mtt: Time,
}

impl GenConfig {
    pub fn new(stops: usize, trips: usize, seed: u64, shape: Shape) -> Self {
        GenConfig {
            stops,
            trips,
            seed,
            shape,
            footpaths: 0,
            max_mtt: 0,
        }
    }

    pub fn footpaths(mut self, footpaths: usize) -> Self {
        self.footpaths = footpaths;
        self
    }

    pub fn max_mtt(mut self, max_mtt: Time) -> Self {
        self.max_mtt = max_mtt;
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("need at least 2 stops, got {0}")]
    TooFewStops(usize),
    #[error("need at least 1 trip")]
    NoTrips,
    #[error("at most 1000000 stops supported, got {0}")]
    TooManyStops(usize),
}

struct Layout {
    coords: Vec<(f64, f64)>,
    routes: Vec<Vec<usize>>,
}

fn with_reverses(routes: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(routes.len() * 2);
    for r in routes {
        let mut rev = r.clone();
        rev.reverse();
        out.push(r);
        out.push(rev);
    }
    out
}

fn line_layout(n: usize, rng: &mut ChaCha8Rng) -> Layout {
    let coords = (0..n).map(|i| (i as f64, 0.0)).collect();
    let mut routes = vec![(0..n).collect::<Vec<_>>()];
    // a few shorter segments so that not every trip runs end to end
    for _ in 0..(n / 4) {
        let a = rng.gen_range(0..n - 1);
        let b = rng.gen_range(a + 1..n);
        routes.push((a..=b).collect());
    }
    Layout {
        coords,
        routes: with_reverses(routes),
    }
}

fn grid_layout(n: usize) -> Layout {
    let width = (n as f64).sqrt().ceil() as usize;
    let coords = (0..n)
        .map(|i| ((i % width) as f64, (i / width) as f64))
        .collect();
    let mut routes = Vec::new();
    for row in 0..n.div_ceil(width) {
        let r: Vec<usize> = (row * width..((row + 1) * width).min(n)).collect();
        if r.len() >= 2 {
            routes.push(r);
        }
    }
    for col in 0..width {
        let r: Vec<usize> = (col..n).step_by(width).collect();
        if r.len() >= 2 {
            routes.push(r);
        }
    }
    Layout {
        coords,
        routes: with_reverses(routes),
    }
}

fn hub_and_spoke_layout(n: usize) -> Layout {
    let spokes = ((n - 1) as f64).sqrt().round().max(2.0) as usize;
    let mut coords = vec![(0.0, 0.0)];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); spokes];
    for i in 1..n {
        let spoke = (i - 1) % spokes;
        let depth = members[spoke].len() + 1;
        let angle = std::f64::consts::TAU * spoke as f64 / spokes as f64;
        coords.push((depth as f64 * angle.cos(), depth as f64 * angle.sin()));
        members[spoke].push(i);
    }
    let members: Vec<Vec<usize>> = members.into_iter().filter(|m| !m.is_empty()).collect();
    let mut routes = Vec::new();
    for (a, ma) in members.iter().enumerate() {
        // outer end of spoke a, through the hub, to the outer end of the next spoke
        let mut r: Vec<usize> = ma.iter().rev().copied().collect();
        r.push(0);
        if members.len() > 1 {
            r.extend(members[(a + 1) % members.len()].iter().copied());
        }
        routes.push(r);
    }
    Layout {
        coords,
        routes: with_reverses(routes),
    }
}

/// Generates a timetable. The same configuration always yields the same
/// timetable.
pub fn generate(cfg: &GenConfig) -> Result<Timetable, GenError> {
    if cfg.stops < 2 {
        return Err(GenError::TooFewStops(cfg.stops));
    }
    if cfg.stops > 1_000_000 {
        return Err(GenError::TooManyStops(cfg.stops));
    }
    if cfg.trips == 0 {
        return Err(GenError::NoTrips);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let layout = match cfg.shape {
        Shape::Line => line_layout(cfg.stops, &mut rng),
        Shape::Grid => grid_layout(cfg.stops),
        Shape::HubAndSpoke => hub_and_spoke_layout(cfg.stops),
    };

    let mut b = Timetable::builder();
    for i in 0..cfg.stops {
        let mtt = if cfg.max_mtt > 0 {
            rng.gen_range(0..=cfg.max_mtt)
        } else {
            0
        };
        b.add_stop(format!("S{i}"), mtt)
            .expect("generated stop names are unique");
    }

    let hop: Vec<Time> = layout
        .routes
        .iter()
        .map(|_| rng.gen_range(60..=300))
        .collect();
    for k in 0..cfg.trips {
        // the first trips cover every route once, the rest pick at random
        let r = if k < layout.routes.len() {
            k
        } else {
            rng.gen_range(0..layout.routes.len())
        };
        let route = &layout.routes[r];
        let mut t: Time = rng.gen_range(0..DAY);
        let mut legs = Vec::with_capacity(route.len() - 1);
        for w in route.windows(2) {
            let arrival = t + hop[r];
            legs.push(RawConnection {
                from: StopId(w[0] as u32),
                departure: t,
                to: StopId(w[1] as u32),
                arrival,
            });
            t = arrival + rng.gen_range(0..=60);
        }
        b.add_trip(format!("t{k}"), legs);
    }

    if cfg.footpaths > 0 {
        let mut pairs = Vec::new();
        for i in 0..cfg.stops {
            for j in i + 1..cfg.stops {
                let (xi, yi) = layout.coords[i];
                let (xj, yj) = layout.coords[j];
                let d = ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt();
                if d <= 1.5 {
                    pairs.push((i, j, d));
                }
            }
        }
        pairs.shuffle(&mut rng);
        pairs.truncate(cfg.footpaths);
        pairs.sort_by_key(|&(i, j, _)| (i, j));
        for (i, j, d) in pairs {
            let duration = (d * 240.0).round() as Time + rng.gen_range(1..=60);
            b.add_footpath(StopId(i as u32), StopId(j as u32), duration);
        }
    }

    Ok(b.build().expect("generated timetables are valid"))
}

/// A configuration for roughly `connections` connections over `stops` grid
/// stops.
pub fn grid_config_for_connections(stops: usize, connections: usize, seed: u64) -> GenConfig {
    let layout = grid_layout(stops.max(2));
    let hops: usize = layout.routes.iter().map(|r| r.len() - 1).sum();
    let mean = hops as f64 / layout.routes.len() as f64;
    let trips = (connections as f64 / mean).round().max(1.0) as usize;
    GenConfig::new(stops, trips, seed, Shape::Grid).footpaths(stops / 10)
}
