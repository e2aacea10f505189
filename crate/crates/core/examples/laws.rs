//! Run the algebraic-law and congruence harness.
//!
//! ```text
//! cargo run --release -p cna-core --example laws -- 42 100
//! ```

use std::env;

use cna_core::equivalence::{law_harness, HarnessConfig};
use cna_core::process::Definitions;

fn main() {
    let mut args = env::args().skip(1).map(|a| a.parse::<u64>().expect("numeric argument"));
    let cfg = HarnessConfig {
        seed: args.next().unwrap_or(42),
        samples: args.next().unwrap_or(20) as usize,
        ..HarnessConfig::default()
    };
    let report = law_harness(&Definitions::new(), &cfg);
    print!("{report}");
    if report.failures() > 0 {
        std::process::exit(1);
    }
}
