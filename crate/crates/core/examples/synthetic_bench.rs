// Generates a grid network, builds labels and compares every query variant
// on random queries.
//
// ```text
// cargo run --release --example synthetic_bench -- 400 1500
// ```

use std::time::Instant;

use transit_labels::bench::{random_queries, run_bench};
use transit_labels::generator::{generate, GenConfig, Shape};
use transit_labels::index::EaIndex;
use transit_labels::labeling::VertexOrdering;

pub fn run_example() -> anyhow::Result<()> {
    run(100, 300)
}

fn run(stops: usize, trips: usize) -> anyhow::Result<()> {
    let tt = generate(&GenConfig::new(stops, trips, 42, Shape::Grid).footpaths(stops / 10))?;
    println!(
        "{} stops, {} trips, {} connections, {} events",
        tt.num_stops(),
        tt.trips().len(),
        tt.num_connections(),
        tt.num_events()
    );
    let start = Instant::now();
    let index = EaIndex::build(tt, VertexOrdering::Degree)?;
    let stats = index.stats();
    println!(
        "labels built in {:.2} s: {:.1} hubs per label, {:.1} stop-label hubs per stop",
        start.elapsed().as_secs_f64(),
        stats.labels.hubs_per_label,
        stats.labels.stop_hubs_per_stop.unwrap_or(0.0)
    );
    let report = run_bench(&index, &random_queries(&index.timetable, 1000, 7))?;
    println!("{report}");
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    match args[..] {
        [] => run_example(),
        [stops, trips] => run(stops, trips),
        _ => anyhow::bail!("usage: synthetic_bench [STOPS TRIPS]"),
    }
}
