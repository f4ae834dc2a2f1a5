//! Runs the full property suite over every composition up to a bound.
//!
//! `cargo run --release --example property_suite -- 7`

use nilfibre::diagram::{Composition, Diagram};
use nilfibre::verify::{verify_composition, Check, SuiteOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max_n: usize = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(6);
    let opts = SuiteOptions::default();
    for n in 1..=max_n {
        let (mut components, mut failures, mut gaps) = (0, 0, 0);
        for c in Composition::all_of(n) {
            let r = verify_composition(&Diagram::new(c), &opts)?;
            components += r.components;
            gaps += r.failures_of(Check::HorizontalCertificate).count();
            failures += r.failures.len();
            for f in r.failures.iter().filter(|f| f.check != Check::HorizontalCertificate) {
                println!("  {}: {:?} {}", f.composition, f.check, f.detail);
            }
        }
        println!("n={n}: {components} components, {} failures, {gaps} missing certificates", failures - gaps);
    }
    Ok(())
}
