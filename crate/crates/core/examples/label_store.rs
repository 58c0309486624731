// Writing labels to disk and reading them back.
//
// ```text
// cargo run --example label_store
// ```

use transit_labels::generator::{generate, GenConfig, Shape};
use transit_labels::index::EaIndex;
use transit_labels::labeling::VertexOrdering;
use transit_labels::query::{EaQuery, EaVariant};
use transit_labels::timetable::StopId;
use transit_labels::store::{
    deserialize_labels, deserialize_stop_labels, peek_kind, serialize_labels, serialize_stop_labels,
};

pub fn run_example() -> anyhow::Result<()> {
    let tt = generate(&GenConfig::new(30, 60, 3, Shape::Line))?;
    let index = EaIndex::build(tt.clone(), VertexOrdering::Degree)?;

    let dir = std::env::temp_dir().join(format!("transit-labels-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let labels_path = dir.join("ea_labels.ptlb");
    let stops_path = dir.join("stop_labels.ptlb");
    std::fs::write(&labels_path, serialize_labels(&index.labels))?;
    std::fs::write(&stops_path, serialize_stop_labels(&index.stop_labels))?;

    let bytes = std::fs::read(&labels_path)?;
    println!("{}: {} bytes, {:?}", labels_path.display(), bytes.len(), peek_kind(&bytes)?);
    let loaded = EaIndex::from_parts(
        tt,
        deserialize_labels(&bytes)?,
        deserialize_stop_labels(&std::fs::read(&stops_path)?)?,
    );
    let (first, last) = (StopId(0), StopId(loaded.timetable.num_stops() as u32 - 1));
    let q = EaQuery::new(first, last, 0);
    assert_eq!(loaded.ea(q, EaVariant::FASTEST)?, index.ea(q, EaVariant::FASTEST)?);

    let mut damaged = bytes.clone();
    let mid = damaged.len() / 2;
    damaged[mid] ^= 1;
    match deserialize_labels(&damaged) {
        Err(e) => println!("damaged store rejected: {e}"),
        Ok(_) => anyhow::bail!("damaged store accepted"),
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
