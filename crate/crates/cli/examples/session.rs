//! Drive a stepping session the way the explorer does: list, step, undo.
//!
//! ```text
//! cargo run -p cna-cli --example session
//! ```

use cna_cli::service::Session;
use cna_core::process::parse_program;
use cna_core::semantics::Bounds;

const PROGRAM: &str = r"
S(a) := a\tau . S(a)
main := new c in (tau\c . 0 | c\b . 0) | S(b)
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prog = parse_program(PROGRAM)?;
    let initial = prog.resolve("main")?;
    let mut session = Session::start(prog.defs, &initial, Bounds::default())?;

    println!("{}", serde_json::to_string_pretty(&session.view())?);
    session.step(1)?;
    println!("after step 1: state {} {}", session.current(), session.term());
    for t in session.transitions() {
        println!("  [{}] {} -> {}", t.index, t.essential, t.target_preview);
    }
    session.undo()?;
    println!("after undo: state {} {}", session.current(), session.term());
    let lts = session.lts(None)?;
    println!("{} states, {} transitions", lts.states.len(), lts.transitions.len());
    Ok(())
}
