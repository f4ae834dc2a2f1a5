//! Renders a component tableau and its reverse tableau as text, LaTeX and JSON.
//!
//! `cargo run --example render_tableau -- 2,1,1,2,2 4,6,8`

use nilfibre::component::enumerate_component_tableaux;
use nilfibre::diagram::{Composition, Diagram};
use nilfibre::reverse::{HeightOrder, ShiftMode};
use nilfibre::tableau::{RedSet, RenderFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let d = Diagram::new(args.next().unwrap_or_else(|| "2,1,1,2,2".into()).parse::<Composition>()?);
    let red: RedSet = args.next().unwrap_or_else(|| "4,6,8".into()).parse()?;
    let ct = enumerate_component_tableaux(&d)?.into_iter().find(|c| c.red_set() == red).ok_or("no such Red Set")?;
    println!("component tableau (strings drawn out):\n{}", ct.infinity.render(RenderFormat::Text));
    println!("collapsed:\n{}", ct.collapsed.render(RenderFormat::Text));
    let rs = ct.to_reverse(HeightOrder::IncreaseThenDecrease, ShiftMode::Standard)?;
    println!("reverse tableau:\n{}", rs.tableau().render(RenderFormat::Text));
    println!("{}", rs.tableau().render(RenderFormat::Latex));
    println!("{}", rs.tableau().render(RenderFormat::Json));
    Ok(())
}
