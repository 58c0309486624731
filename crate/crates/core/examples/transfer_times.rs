// Minimum transfer times: split stops for earliest-arrival labels, shifted
// arrivals for multicriteria labels.
//
// ```text
// cargo run --example transfer_times
// ```

use transit_labels::index::{EaIndex, McIndex, MttStrategy};
use transit_labels::labeling::VertexOrdering;
use transit_labels::query::EaQuery;
use transit_labels::superlabel::LocationAccess;
use transit_labels::timetable::{StopId, Timetable};
use transit_labels::tsv::parse_timetable;

fn timetable(mtt: u32) -> anyhow::Result<Timetable> {
    Ok(parse_timetable(&format!(
        "#stops\nX\t0\nB\t{mtt}\nY\t0\n#trips\nin\tX@0>B@300\nfast\tB@330>Y@400\nslow\tB@390>Y@460\n"
    ))?)
}

pub fn run_example() -> anyhow::Result<()> {
    for mtt in [0, 60] {
        let tt = timetable(mtt)?;
        let (x, y) = (tt.stop_by_name("X").unwrap(), tt.stop_by_name("Y").unwrap());

        let ea = EaIndex::build_with_mtt(&tt, VertexOrdering::Degree, MttStrategy::Split)?;
        // an original stop may now be several stops
        let members = |p: StopId| {
            LocationAccess::new(ea.timetable.stops_derived_from(p).into_iter().map(|q| (q, 0)).collect())
        };
        let arrival = ea.loc_ea(&members(x), &members(y), 0)?.arrival;

        let mc = McIndex::build_with_mtt(&tt, VertexOrdering::Degree, MttStrategy::Shift)?;
        let pareto = mc.query(EaQuery::new(x, y, 0))?;

        println!(
            "transfer time {mtt:>2} at B: {} stops after splitting, arrival {arrival}, multicriteria {:?}",
            ea.timetable.num_stops(),
            pareto.entries.iter().map(|e| (e.arrival, e.transfers)).collect::<Vec<_>>()
        );
        assert_eq!(arrival, if mtt == 0 { 400 } else { 460 });
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
