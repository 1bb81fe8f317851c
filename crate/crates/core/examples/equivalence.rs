//! Decide finitary equivalence by computing the greatest dense family of
//! spans, and print a counterexample when a family is not dense.

use std::sync::Arc;

use backforth::span::{check_density, greatest_dense_family, SpanFamily};
use backforth::structure::{Mode, Structure};
use backforth::Caps;

fn main() -> backforth::Result<()> {
    let caps = Caps::default();
    let c3 = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2), (2, 0)])?);
    let d3 = Arc::new(Structure::digraph(3, &[(1, 0), (0, 2), (2, 1)])?);
    let p3 = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2)])?);

    for mode in [Mode::Emb, Mode::Str] {
        for (name, y) in [("D3", &d3), ("P3", &p3)] {
            let g = greatest_dense_family(&c3, y, mode, &caps)?;
            let verdict = if g.is_empty() { "not equivalent" } else { "equivalent" };
            println!("C3 vs {name} ({mode}): {verdict}, {} spans", g.len());
        }
    }

    // one matched point on its own cannot answer larger tests
    let g = greatest_dense_family(&c3, &d3, Mode::Emb, &caps)?;
    let point = g.iter().find(|s| s.domain.len() == 1).cloned();
    let lonely = SpanFamily::new(c3.clone(), d3.clone(), Mode::Emb, point)?;
    println!("{}", check_density(&lonely, &caps)?.to_json(&lonely));
    Ok(())
}
