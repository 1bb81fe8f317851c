//! Sort every map between two small digraphs into hom / mono / embedding /
//! iso classes, and show what each class means in the two modes.

use std::collections::BTreeMap;
use std::sync::Arc;

use backforth::corpus::all_maps;
use backforth::structure::{Mode, Structure};

fn main() -> backforth::Result<()> {
    let edge = Arc::new(Structure::digraph(2, &[(0, 1)])?);
    let path = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2)])?);
    let cycle = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2), (2, 0)])?);

    for (name, x, y) in [("edge -> path3", &edge, &path), ("path3 -> cycle3", &path, &cycle), ("cycle3 -> path3", &cycle, &path)] {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut monos = [0, 0];
        for f in all_maps(x, y) {
            *counts.entry(f.classify().as_str()).or_default() += 1;
            monos[0] += usize::from(f.is_mono_in(Mode::Emb));
            monos[1] += usize::from(f.is_mono_in(Mode::Str));
        }
        println!("{name}: {counts:?}");
        println!("  monos: {} as embeddings, {} as injective homs", monos[0], monos[1]);
    }
    Ok(())
}
