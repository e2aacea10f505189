//! Add and remove links of a switch at run time by stepping its process.
//!
//! ```text
//! cargo run -p cna-core --example dynamic_routing
//! ```

use cna_core::process::{format_process, Process};
use cna_core::routing::build_dynamic_infra;
use cna_core::semantics::{sorted_steps, Bounds};

fn offers(p: &Process, defs: &cna_core::process::Definitions) -> Vec<String> {
    sorted_steps(p, defs, &Bounds::default()).expect("guarded").iter().map(|(l, _, _)| l.reduce().to_string()).collect()
}

fn main() {
    let (mut p, defs) = build_dynamic_infra(2, 1);
    for wanted in ["add_1_1\\tau", "a1\\b1", "add_2_1\\tau", "rem_1_1\\tau"] {
        println!("{}\n  offers {:?}", format_process(&p), offers(&p, &defs));
        let steps = sorted_steps(&p, &defs, &Bounds::default()).expect("guarded");
        let (_, next, _) = steps.into_iter().find(|(l, _, _)| l.reduce().to_string() == wanted).expect("step offered");
        println!("  take {wanted}");
        p = next;
    }
    println!("{}\n  offers {:?}", format_process(&p), offers(&p, &defs));
}
