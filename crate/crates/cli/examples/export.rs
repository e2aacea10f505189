//! Export an LTS as JSON and DOT, then import the JSON back.
//!
//! ```text
//! cargo run -p cna-cli --example export -- crates/core/examples/relay.cna Q
//! ```

use std::{env, fs};

use cna_cli::export::{export_lts, import_lts, Format};
use cna_core::process::parse_program;
use cna_core::semantics::{build_lts, Bounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../core/examples/three_party.cna").into());
    let entry = args.next().unwrap_or_else(|| "main".into());
    let prog = parse_program(&fs::read_to_string(&path)?)?;
    let bounds = Bounds::default();
    let lts = build_lts(&prog.resolve(&entry)?, &prog.defs, &bounds)?;

    let json = export_lts(&lts, Format::Structured);
    print!("{json}");
    print!("{}", export_lts(&lts, Format::Dot));

    let back = import_lts(&json, &prog.defs, bounds)?;
    println!("round trip {}", if back == lts { "exact" } else { "differs" });
    Ok(())
}
