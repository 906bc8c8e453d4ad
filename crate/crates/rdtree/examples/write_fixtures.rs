//! Regenerates the bundled fixture files: `cargo run --example write_fixtures`.

use rdtree::fixtures::{drummond_ev, drummond_rd};
use rdtree_core::dsl::serialize_model;

fn main() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let rd = drummond_rd().expect("fixture construction");
    std::fs::write(dir.join("drummond_rd.rdt"), serialize_model(&rd)).unwrap();
    std::fs::write(dir.join("drummond_ev.rdt"), serialize_model(&drummond_ev())).unwrap();
}
