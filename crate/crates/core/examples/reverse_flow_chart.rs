//! Implements a sequence of neighbouring pairs along every branch and prints
//! the completed reverse tableaux and the rejected choices.
//!
//! `cargo run --example reverse_flow_chart -- 1,2,3,1,1,3,2 "C1,C4;C4,C5;C2,C7;C3,C6"`

use nilfibre::diagram::{Composition, Diagram};
use nilfibre::reverse::{enumerate_reverse, parse_sequence, ShiftMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let comp = args.next().unwrap_or_else(|| "1,2,3,1,1,3,2".into());
    let seq = args.next().unwrap_or_else(|| "C1,C4;C4,C5;C2,C7;C3,C6".into());
    let d = Diagram::new(comp.parse::<Composition>()?);
    let chart = enumerate_reverse(&d, &parse_sequence(&d, &seq)?, ShiftMode::Standard)?;
    for leaf in chart.leaf_states() {
        println!("Red Set {}", leaf.red_set());
        print!("{}", leaf.tableau().render_text());
        println!();
    }
    for r in &chart.rejections {
        println!("rejected at {}: value {} from C{} ({:?}), would give {}", r.pair, r.value, r.column, r.reason, r.would_be);
    }
    Ok(())
}
