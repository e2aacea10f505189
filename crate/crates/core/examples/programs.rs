//! Parse a `.cna` program and print it in canonical form.
//!
//! ```text
//! cargo run -p cna-core --example programs -- crates/core/examples/blind.cna
//! ```

use std::{env, fs, process};

use cna_core::process::{format_process, parse_program};

fn main() {
    let path = env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rt.cna").into());
    let src = fs::read_to_string(&path).unwrap_or_else(|e| {
        eprintln!("{path}: {e}");
        process::exit(2)
    });
    let prog = match parse_program(&src) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{path}:{e}");
            process::exit(2)
        }
    };
    print!("{}", prog.defs);
    if let Some(main) = &prog.main {
        println!("main := {}", format_process(main));
        println!("free names: {:?}", main.free_names().iter().map(|c| c.as_str()).collect::<Vec<_>>());
    }
}
