//! Compose span families along a shared middle structure and check the
//! unit and associativity laws on a small example.

use std::sync::Arc;

use backforth::span::{greatest_dense_family, star_compose};
use backforth::structure::{Mode, Structure};
use backforth::Caps;

fn main() -> backforth::Result<()> {
    let caps = Caps::default();
    let x = Arc::new(Structure::digraph(3, &[(0, 1), (1, 2), (2, 0)])?);
    let y = Arc::new(Structure::digraph(3, &[(2, 1), (1, 0), (0, 2)])?);
    let z = Arc::new(Structure::digraph(3, &[(1, 2), (2, 0), (0, 1)])?);

    let gxx = greatest_dense_family(&x, &x, Mode::Emb, &caps)?;
    let gxy = greatest_dense_family(&x, &y, Mode::Emb, &caps)?;
    let gyz = greatest_dense_family(&y, &z, Mode::Emb, &caps)?;
    let gzx = greatest_dense_family(&z, &x, Mode::Emb, &caps)?;

    let unit = star_compose(&gxx, &gxy, &caps)?;
    println!("G(X,X) * G(X,Y) = G(X,Y): {}", unit == gxy);

    let xz = star_compose(&gxy, &gyz, &caps)?;
    println!("G(X,Y) * G(Y,Z): {} spans, G(X,Z): {}", xz.len(), greatest_dense_family(&x, &z, Mode::Emb, &caps)?.len());

    let left = star_compose(&xz, &gzx, &caps)?;
    let right = star_compose(&gxy, &star_compose(&gyz, &gzx, &caps)?, &caps)?;
    println!("associative: {}", left == right);
    Ok(())
}
