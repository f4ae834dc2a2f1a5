//! Lists the component tableaux of a composition.
//!
//! `cargo run --example enumerate_components -- 1,2,3,1,1,3,2`

use nilfibre::component::enumerate_component_tableaux;
use nilfibre::diagram::{Composition, Diagram};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "1,2,3,1,1,3,2".into());
    let d = Diagram::new(arg.parse::<Composition>()?);
    let components = enumerate_component_tableaux(&d)?;
    println!("{} neighbouring pairs, {} component tableaux", d.pair_count(), components.len());
    for ct in &components {
        let seq: Vec<String> = ct.induced_sequence().iter().map(|p| p.to_string()).collect();
        println!("\nRed Set {}  (sequence {})", ct.red_set(), seq.join(" "));
        print!("{}", ct.collapsed.render_text());
    }
    Ok(())
}
