//! Network and strong bisimilarity, with a distinguishing trace.
//!
//! ```text
//! cargo run -p cna-core --example bisimulation
//! ```

use cna_core::equivalence::{compare, Mode, Verdict};
use cna_core::process::{parse_process, parse_program};
use cna_core::semantics::Bounds;

const PROGRAM: &str = r"
R(a, b) := a\b . R(a, b)
R1(a, c) := a\c . R1(a, c)
R2(c, b) := c\b . R2(c, b)
T(a, b) := new c in (R1(a, c) | R2(c, b))
P := tau\a . 0 | b\tau . 0
Q := tau\a . b\tau . 0 + b\tau . tau\a . 0
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prog = parse_program(PROGRAM)?;
    let cases = [("R(a, b)", "T(a, b)", Mode::Network), ("R(a, b)", "T(a, b)", Mode::Strong), ("P", "Q", Mode::Network)];
    for (l, r, mode) in cases {
        let (p, q) = (parse_process(l, &prog.defs)?, parse_process(r, &prog.defs)?);
        let cmp = compare(&p, &q, &prog.defs, mode, &Bounds::default())?;
        println!("{l} vs {r} [{}]: {}", mode.as_str(), cmp.verdict.name());
        if let Verdict::Distinguished(w) = &cmp.verdict {
            print!("{}", w.render(&cmp.left, &cmp.right));
        }
    }
    Ok(())
}
