// Profile queries: every journey not beaten by a later departure that
// arrives no later.
//
// ```text
// cargo run --example profile
// ```

use transit_labels::index::EaIndex;
use transit_labels::labeling::VertexOrdering;
use transit_labels::query::Engine;
use transit_labels::tsv::parse_timetable;

pub fn run_example() -> anyhow::Result<()> {
    for (title, text) in [
        ("four stops", include_str!("../data/fixture_a.tsv")),
        ("slow change vs direct trip", include_str!("../data/fixture_c.tsv")),
    ] {
        let index = EaIndex::build(parse_timetable(text)?, VertexOrdering::Degree)?;
        let tt = &index.timetable;
        let first = tt.stops().first().expect("stops").name.clone();
        let last = tt.stops().last().expect("stops").name.clone();
        let (s, t) = (tt.stop_by_name(&first).unwrap(), tt.stop_by_name(&last).unwrap());

        let by_events = index.profile(s, t, Engine::EventLabels)?;
        let by_stops = index.profile(s, t, Engine::StopLabels)?;
        assert_eq!(by_events, by_stops);
        println!("{title}: {first} -> {last}");
        for e in &by_stops {
            println!("  depart {:>4}  arrive {:>4}", e.departure, e.arrival);
        }
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
