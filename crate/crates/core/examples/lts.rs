//! Explore the reachable states of a program and list its transitions.
//!
//! ```text
//! cargo run -p cna-core --example lts -- crates/core/examples/three_party.cna
//! ```

use std::{env, fs};

use cna_core::process::parse_program;
use cna_core::semantics::{build_lts, Bounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/blind.cna").into());
    let entry = env::args().nth(2).unwrap_or_else(|| "main".into());
    let prog = parse_program(&fs::read_to_string(&path)?)?;
    let p = prog.resolve(&entry)?;
    let lts = build_lts(&p, &prog.defs, &Bounds::default().with_max_states(500))?;

    for (id, s) in lts.states.iter().enumerate() {
        let mark = if id == lts.initial { "*" } else { " " };
        println!("{mark}{id:>3}  {}", s.key);
    }
    for t in &lts.transitions {
        println!("{:>4} -> {:<4} {:<24} {}", t.src, t.dst, t.essential().to_string(), t.label.blocks_string());
    }
    if !lts.complete {
        println!("truncated at {} states", lts.bounds.max_states);
    }
    Ok(())
}
