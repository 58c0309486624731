// Arrival time against number of transfers.
//
// ```text
// cargo run --example multicriteria
// ```

use transit_labels::index::McIndex;
use transit_labels::labeling::VertexOrdering;
use transit_labels::query::EaQuery;
use transit_labels::tsv::parse_timetable;

pub fn run_example() -> anyhow::Result<()> {
    let tt = parse_timetable(include_str!("../data/fixture_a.tsv"))?;
    let index = McIndex::build(tt, VertexOrdering::Degree)?;
    let stop = |name: &str| index.timetable.stop_by_name(name).expect("stop exists");

    let answer = index.query(EaQuery::new(stop("A"), stop("D"), 0))?;
    println!("A -> D from 0:");
    for e in &answer.entries {
        println!("  arrive {:>4} with {} transfer(s)", e.arrival, e.transfers);
    }
    let pairs: Vec<_> = answer.entries.iter().map(|e| (e.arrival, e.transfers)).collect();
    assert_eq!(pairs, [(540, 1), (660, 0)]);

    let stats = index.stats();
    println!("{} vertices, {:.2} hubs per label", stats.vertices, stats.hubs_per_label);
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
