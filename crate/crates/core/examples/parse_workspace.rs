//! Load a workspace file and list what it declares.
//!
//!     cargo run --example parse_workspace -- data/groups.bf

use backforth::workspace::Workspace;

fn main() -> backforth::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/graphs.bf").to_string());
    let ws = Workspace::from_file(&path)?;

    for (name, sig) in &ws.signatures {
        let rels: Vec<String> = sig.relations().iter().map(|s| format!("{}/{}", s.name, s.arity)).collect();
        let funs: Vec<String> = sig.functions().iter().map(|s| format!("{}/{}", s.name, s.arity)).collect();
        println!("signature {name}: rel [{}] fun [{}]", rels.join(", "), funs.join(", "));
    }
    for (name, s) in &ws.structures {
        println!("structure {name}: {} elements, {} tuples", s.size(), s.tuple_count());
    }
    for (name, f) in &ws.morphisms {
        println!("morphism {name}: {:?}", f.map());
    }
    for (name, t) in &ws.theories {
        println!("theory {name}: {} sentences", t.sentences.len());
    }
    for (name, c) in &ws.chains {
        println!("chain {name}: {} stages", c.len());
    }

    // parse errors carry a position
    match Workspace::parse("structure X: 2; E={(0,2)}") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
