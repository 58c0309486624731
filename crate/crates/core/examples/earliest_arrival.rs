// Earliest-arrival queries on a four-stop timetable.
//
// ```text
// cargo run --example earliest_arrival
// ```

use transit_labels::index::EaIndex;
use transit_labels::labeling::VertexOrdering;
use transit_labels::query::{EaQuery, EaVariant, Engine};
use transit_labels::tsv::parse_timetable;

const TIMETABLE: &str = include_str!("../data/fixture_a.tsv");

pub fn run_example() -> anyhow::Result<()> {
    let tt = parse_timetable(TIMETABLE)?;
    let index = EaIndex::build(tt, VertexOrdering::Degree)?;
    let stop = |name: &str| index.timetable.stop_by_name(name).expect("stop exists");
    let (a, d) = (stop("A"), stop("D"));

    for departure in [0, 60, 61, 240, 241] {
        let q = EaQuery::new(a, d, departure);
        let fast = index.ea(q, EaVariant::FASTEST)?;
        let by_stop = index.ea(q, EaVariant::new(Engine::StopLabels))?;
        assert_eq!(fast.arrival, by_stop.arrival);
        if fast.is_reachable() {
            println!(
                "A -> D leaving at {departure:>3}: arrive {} ({} labels, {} hubs read)",
                fast.arrival, fast.stats.labels_scanned, fast.stats.hubs_scanned
            );
        } else {
            println!("A -> D leaving at {departure:>3}: unreachable");
        }
    }
    assert_eq!(index.ea(EaQuery::new(a, d, 0), EaVariant::FASTEST)?.arrival, 540);
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
