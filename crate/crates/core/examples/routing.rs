//! A composite routing infrastructure: graph, paths, basic equivalent and
//! the path/transition check.
//!
//! ```text
//! cargo run -p cna-core --example routing -- crates/core/examples/composite.infra
//! ```

use std::{env, fs};

use cna_core::routing::{basic_equivalent, infra_graph, parse_infra, verify_paths};
use cna_core::semantics::Bounds;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/composite.infra").into());
    let file = parse_infra(&fs::read_to_string(&path)?)?;
    let root = file.root().ok_or("empty infrastructure file")?;

    let graph = infra_graph(root)?;
    for (s, t) in &graph.arcs {
        println!("arc  {s} -> {t}");
    }
    for p in graph.boundary_paths() {
        let hops: Vec<&str> = p.iter().map(|c| c.as_str()).collect();
        println!("path {}", hops.join(" -> "));
    }
    print!("{}", basic_equivalent(root, &format!("{}_paths", root.name()))?);
    print!("{}", verify_paths(root, &Bounds::default())?);
    Ok(())
}
