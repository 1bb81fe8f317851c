//! Equivalence, density and chains for sets given only by cardinality,
//! finite or countably infinite.

use backforth::symbolic::{
    sym_chain_colimit, sym_density_check, sym_embedding, sym_equivalent, sym_verify_ladder, CardToken, SymChain, SymLadder,
};

fn main() -> backforth::Result<()> {
    let inf = CardToken::Inf;
    let pairs = [(CardToken::Fin(3), CardToken::Fin(3)), (CardToken::Fin(2), CardToken::Fin(3)), (inf, inf), (CardToken::Fin(5), inf)];
    for (a, b) in pairs {
        println!("{a} ~ {b}: {}", sym_equivalent(a, b));
        println!("  density: {}", serde_json::to_string(&sym_density_check(a, b)).expect("serializable"));
    }

    println!("3 -> INF embedding: {}", sym_embedding(CardToken::Fin(3), inf, false)?);
    println!("INF -> INF proper inclusion embedding: {}", sym_embedding(inf, inf, false)?);

    let growing: SymChain = "1,2,3,+".parse()?;
    let steady: SymChain = "4,4,=".parse()?;
    println!("colimits: {} and {}", sym_chain_colimit(&growing), sym_chain_colimit(&steady));

    let ladder = SymLadder::new(steady.clone(), steady, &[true, true])?;
    println!("ladder: {:?}", sym_verify_ladder(&ladder)?);
    Ok(())
}
