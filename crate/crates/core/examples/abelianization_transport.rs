//! Move span families along functors: directly for mono-preserving
//! functors, and through image factorizations for abelianization.

use std::sync::Arc;

use backforth::functor::{transport_direct, transport_image, Abelianization, Functor, UnderlyingSet};
use backforth::groups;
use backforth::span::{check_density, greatest_dense_family};
use backforth::structure::Mode;
use backforth::Caps;

fn main() -> backforth::Result<()> {
    let caps = Caps::default();
    let s3 = Arc::new(groups::symmetric3());
    let copy = Arc::new(groups::permutation_group(&[vec![1, 0, 2], vec![0, 2, 1]]));

    let g = greatest_dense_family(&s3, &copy, Mode::Emb, &caps)?;
    println!("G(S3, S3'): {} spans", g.len());

    let sets = transport_direct(&UnderlyingSet, &g)?;
    println!("uset: {} spans, dense {}", sets.len(), check_density(&sets, &caps)?.is_dense());

    println!("abelianization classes of S3: {:?}", Abelianization::classes(&s3)?);
    println!("direct route allowed: {}", Abelianization.preserves_monos());
    let moved = transport_image(&Abelianization, &g, None)?;
    let passed = moved.certificates.iter().filter(|c| c.passed()).count();
    println!(
        "image route: {} spans, {passed}/{} certificates pass, dense {}",
        moved.family.len(),
        moved.certificates.len(),
        check_density(&moved.family, &caps)?.is_dense()
    );
    Ok(())
}
