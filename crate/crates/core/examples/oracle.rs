//! Compare symbolic steps with the bounded concrete oracle for one term.
//!
//! ```text
//! cargo run -p cna-core --example oracle -- "new c in (a\\c . 0 | c\\b . 0)"
//! ```

use std::collections::BTreeSet;
use std::env;

use cna_core::process::{format_process, parse_process, Definitions};
use cna_core::semantics::{concrete_step_oracle, symbolic_step, Bounds};

const LEN: usize = 5;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let src = env::args().nth(1).unwrap_or_else(|| "tau\\a . 0 | a\\b . 0".into());
    let defs = Definitions::new();
    let p = parse_process(&src, &defs)?;
    let bounds = Bounds::default();

    let symbolic = symbolic_step(&p, &defs, &bounds)?;
    println!("symbolic steps of {}", format_process(&p));
    for t in &symbolic {
        println!("  {:<28} -> {}", t.label.blocks_string(), format_process(&t.target));
    }

    let concrete = concrete_step_oracle(&p, &defs, LEN, &bounds)?;
    let classes: BTreeSet<_> = concrete.iter().map(|(s, t)| (s.normalize(), format_process(t))).collect();
    println!("{} concrete labels up to length {LEN}, {} classes", concrete.len(), classes.len());
    for (s, t) in concrete.iter().take(8) {
        println!("  {:<28} -> {}", s.to_string(), format_process(t));
    }
    Ok(())
}
