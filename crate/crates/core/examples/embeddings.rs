//! Decide whether monos are finitary embeddings, list the witnesses, and
//! look for impure squares.

use backforth::embeddings::{check_purity, decide_lambda_embedding, explain_lambda_embedding};
use backforth::structure::Mode;
use backforth::workspace::Workspace;
use backforth::Caps;

fn main() -> backforth::Result<()> {
    let caps = Caps::default();
    let ws = Workspace::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/graphs.bf"))?;
    let sets = Workspace::from_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sets.bf"))?;

    for (ws, name) in [(&ws, "rot"), (&ws, "flip"), (&ws, "start"), (&sets, "swap"), (&sets, "inc")] {
        let f = ws.morphism(name)?;
        for mode in [Mode::Emb, Mode::Str] {
            if !f.is_mono_in(mode) {
                println!("{name} ({mode}): not a mono");
                continue;
            }
            let holds = decide_lambda_embedding(f, mode, &caps)?;
            let pure = check_purity(f, mode, &caps)?;
            print!("{name} ({mode}): embedding {holds}, pure {pure}");
            if let Some(v) = explain_lambda_embedding(f, mode, &caps)? {
                print!(", {} witnesses", v.witnesses.len());
                if let Some(t) = v.failure {
                    print!(", no witness for {:?}", t.carrier);
                }
            }
            println!();
        }
    }
    Ok(())
}
