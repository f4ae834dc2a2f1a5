//! Checks the root-set geometry of every component tableau: excluded,
//! starred and labelled sets, covering, and the exact tangent rank.
//!
//! `cargo run --example verify_geometry -- 2,1,1,2,2`

use nilfibre::component::enumerate_component_tableaux;
use nilfibre::diagram::{Composition, Diagram};
use nilfibre::geometry::component_geometry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Diagram::new(std::env::args().nth(1).unwrap_or_else(|| "2,1,1,2,2".into()).parse::<Composition>()?);
    for ct in enumerate_component_tableaux(&d)? {
        let g = component_geometry(&ct)?;
        println!(
            "Red Set {}: {} excluded, {} starred, {} label-1 lines, uncovered {:?}, rank {}/{} -> {}",
            ct.red_set(),
            ct.excluded_roots()?.len(),
            ct.star_line_roots().len(),
            ct.one_line_roots().len(),
            g.covering.uncovered,
            g.rank_strict.rank,
            g.rank_strict.dim_m,
            if g.ok() { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
