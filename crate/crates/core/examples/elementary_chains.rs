//! Colimits of finite chains and the ladder check: a natural map between
//! chains of finitary embeddings induces one between the colimits.

use backforth::chain::{verify_ladder, verify_smooth_composition};
use backforth::engine::Engine;
use backforth::structure::Mode;
use backforth::workspace::Workspace;
use backforth::Caps;

fn main() -> backforth::Result<()> {
    let engine = Engine::new(Caps::default());
    let ws = Workspace::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/graphs.bf"))?;
    let sets = Workspace::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sets.bf"))?;

    let spin = ws.chain("spin")?;
    let colimit = spin.colimit(Mode::Emb)?;
    println!("spin: colimit has {} elements, cocone legs {:?}", colimit.object.size(),
        colimit.cocone.iter().map(|m| m.map().to_vec()).collect::<Vec<_>>());
    println!("spin composite: {:?}", verify_smooth_composition(spin, Mode::Emb, &engine)?);
    println!("turn: {:?}", verify_ladder(ws.ladder("turn")?, Mode::Emb, &engine)?);

    // proper inclusions of sets are not embeddings, so nothing is claimed
    println!("grow: {:?}", verify_smooth_composition(sets.chain("grow")?, Mode::Emb, &engine)?);
    Ok(())
}
