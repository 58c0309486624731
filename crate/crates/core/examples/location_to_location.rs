// Journeys between places rather than stops: each place lists nearby stops
// with walking times.
//
// ```text
// cargo run --example location_to_location
// ```

use transit_labels::index::EaIndex;
use transit_labels::labeling::VertexOrdering;
use transit_labels::superlabel::LocationAccess;
use transit_labels::tsv::parse_timetable;

pub fn run_example() -> anyhow::Result<()> {
    let tt = parse_timetable(include_str!("../data/fixture_d.tsv"))?;
    let index = EaIndex::build(tt, VertexOrdering::Degree)?;
    let stop = |name: &str| index.timetable.stop_by_name(name).expect("stop exists");

    // home is 5 s from P1 and 15 s from P2; the office is at T
    let home = LocationAccess::new(vec![(stop("P1"), 5), (stop("P2"), 15)]);
    let office = LocationAccess::single(stop("T"));

    let ea = index.loc_ea(&home, &office, 0)?;
    println!("home -> office leaving at 0: arrive {}", ea.arrival);
    assert_eq!(ea.arrival, 80);

    println!("home -> office, all day:");
    for e in index.loc_profile(&home, &office)? {
        println!("  leave home {:>4}  arrive {:>4}", e.departure, e.arrival);
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
