//! Expands the invariants of a composition, substitutes values and factors
//! the result into irreducible multilinear pieces.
//!
//! `cargo run --example invariants_and_factors -- 1,2,1,2 "x1,2=1;x1,3=0;x2,4=0"`

use nilfibre::diagram::{Composition, Diagram};
use nilfibre::invariant::{PairInvariant, DEFAULT_SYMBOLIC_LIMIT};
use nilfibre::poly::{multilinear_factor, Substitution};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let d = Diagram::new(args.next().unwrap_or_else(|| "1,2,1,2".into()).parse::<Composition>()?);
    let sub: Substitution = args.next().unwrap_or_else(|| "x1,2=1;x1,3=0;x2,4=0".into()).parse()?;
    for inv in PairInvariant::all(&d)? {
        let full = inv.symbolic(&Substitution::identity(), DEFAULT_SYMBOLIC_LIMIT)?;
        let restricted = inv.symbolic(&sub, DEFAULT_SYMBOLIC_LIMIT)?;
        println!("{} degree {}: {full}", inv.pair(), inv.degree());
        if restricted.is_zero() {
            println!("  substituted: 0");
            continue;
        }
        let f = multilinear_factor(&restricted)?;
        let factors: Vec<String> = f.factors.iter().map(|q| format!("({q})")).collect();
        println!("  substituted: {restricted}");
        println!("  factors: {} x {}", f.unit, factors.join(" "));
    }
    Ok(())
}
