//! Link chains: merging, restriction, normal forms and renaming.
//!
//! ```text
//! cargo run -p cna-core --example chains
//! ```

use cna_core::{ch, parse_chain, Renaming};

fn main() -> Result<(), cna_core::ChainError> {
    let requester = parse_chain("tau\\a ; _\\_ ; _\\_")?;
    let router = parse_chain("_\\_ ; a\\b ; _\\_")?;
    let server = parse_chain("_\\_ ; _\\_ ; b\\tau")?;

    let two = requester.merge(&router).expect("disjoint solids");
    let all = two.merge(&server).expect("disjoint solids");
    println!("merge      {all}");
    println!("restrict a {}", two.restrict(&ch("a")).expect("a is matched"));
    println!("blocks     {}", all.normalize().blocks_string());
    println!("essential  {}", all.reduce());

    let relay = parse_chain("a\\tau ; tau\\b ; b\\c")?;
    println!("reduce     {relay}  =>  {}", relay.reduce());

    let phi: Renaming = "[a<->b]".parse()?;
    println!("rename     {}", relay.rename(&phi));
    println!("subst c/a  {}", relay.subst(&ch("c"), &ch("a")));

    let clash = parse_chain("tau\\a ; _\\_")?.merge(&parse_chain("tau\\b ; _\\_")?);
    println!("overlap    {}", if clash.is_none() { "undefined" } else { "defined" });
    Ok(())
}
