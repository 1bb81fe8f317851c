//! Seeded structure collections for the acceptance suite and the tests.
//!
//! Everything here is deterministic: random structures come from a
//! ChaCha generator with a fixed seed.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::groups;
use crate::structure::{Morphism, Signature, Structure};

pub const SEED: u64 = 0x5eed_0b4c_f047;

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

/// Two structures to compare, with a label for reports.
#[derive(Clone, Debug)]
pub struct StructurePair {
    pub label: String,
    pub left: Arc<Structure>,
    pub right: Arc<Structure>,
}

impl StructurePair {
    fn new(label: impl Into<String>, left: Structure, right: Structure) -> Self {
        StructurePair {
            label: label.into(),
            left: Arc::new(left),
            right: Arc::new(right),
        }
    }

    pub fn is_relational(&self) -> bool {
        self.left.signature().is_relational()
    }
}

/// The digraph on `n` nodes whose adjacency matrix, read row by row, is
/// the binary expansion of `code`.
pub fn digraph_from_code(n: usize, code: u64) -> Structure {
    let edges: Vec<(usize, usize)> = (0..n * n)
        .filter(|k| code >> k & 1 == 1)
        .map(|k| (k / n, k % n))
        .collect();
    Structure::digraph(n, &edges).expect("edges inside the carrier")
}

/// Every digraph on `n` nodes (loops allowed), in code order.
pub fn all_digraphs(n: usize) -> Vec<Structure> {
    (0..1u64 << (n * n)).map(|c| digraph_from_code(n, c)).collect()
}

pub fn random_digraph(rng: &mut impl Rng, n: usize, density: f64) -> Structure {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|_| rng.gen_bool(density))
        .collect();
    Structure::digraph(n, &edges).expect("edges inside the carrier")
}

/// A structure over `E/2, P/1`.
pub fn random_two_relational(rng: &mut impl Rng, n: usize, density: f64) -> Structure {
    let sig = Arc::new(Signature::from_symbols(&[("E", 2), ("P", 1)], &[]).expect("signature"));
    let edges: Vec<Vec<usize>> = (0..n)
        .flat_map(|a| (0..n).map(move |b| vec![a, b]))
        .filter(|_| rng.gen_bool(density))
        .collect();
    let marked: Vec<Vec<usize>> = (0..n).filter(|_| rng.gen_bool(0.5)).map(|a| vec![a]).collect();
    Structure::builder(sig, n)
        .relation("E", edges)
        .and_then(|b| b.relation("P", marked))
        .and_then(|b| b.build())
        .expect("two-relational structure")
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// A relabelled copy, isomorphic by construction.
pub fn shuffled(rng: &mut impl Rng, s: &Structure) -> Structure {
    s.permuted(&random_permutation(rng, s.size())).expect("a permutation")
}

/// Every permutation of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Isomorphism by trying every bijection; independent of the backtracking
/// search used by the engine.
pub fn brute_force_isomorphic(x: &Structure, y: &Structure) -> bool {
    x.signature() == y.signature()
        && x.size() == y.size()
        && x.tuple_count() == y.tuple_count()
        && permutations(x.size()).iter().any(|p| is_isomorphism(x, y, p))
}

/// Whether the bijection `p` carries `x` onto `y`.
pub fn is_isomorphism(x: &Structure, y: &Structure, p: &[usize]) -> bool {
    x.permuted(p).is_ok_and(|moved| moved == *y)
}

/// One digraph per isomorphism class on `n` nodes, smallest code first.
pub fn digraph_classes(n: usize) -> Vec<Structure> {
    let perms = permutations(n);
    let mut reps: Vec<Structure> = Vec::new();
    for g in all_digraphs(n) {
        let known = reps.iter().any(|r| {
            r.tuple_count() == g.tuple_count() && perms.iter().any(|p| is_isomorphism(r, &g, p))
        });
        if !known {
            reps.push(g);
        }
    }
    reps
}

/// Pairs for the equivalence criteria:
/// - all same-size digraph pairs on at most 2 nodes, and all pairs of
///   isomorphism-class representatives on 3 nodes;
/// - every digraph on 3 nodes against a shuffled copy and against its
///   successor in code order;
/// - bare sets and a few digraphs of different sizes;
/// - seeded random digraphs and `E/2, P/1` structures on up to 5 nodes,
///   each against a shuffled copy and against a one-tuple perturbation;
/// - all pairs of groups of order at most 8, and each group against a
///   shuffled copy.
pub fn equivalence_corpus() -> Vec<StructurePair> {
    let mut out = Vec::new();
    let mut rng = rng(1);
    for n in 0..=2 {
        let all = all_digraphs(n);
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                out.push(StructurePair::new(format!("digraph{n}#{i} vs #{j}"), a.clone(), b.clone()));
            }
        }
    }
    let classes = digraph_classes(3);
    for (i, a) in classes.iter().enumerate() {
        for (j, b) in classes.iter().enumerate() {
            out.push(StructurePair::new(format!("class3#{i} vs #{j}"), a.clone(), b.clone()));
        }
    }
    let all3 = all_digraphs(3);
    for (i, g) in all3.iter().enumerate() {
        out.push(StructurePair::new(format!("digraph3#{i} shuffled"), g.clone(), shuffled(&mut rng, g)));
        let next = &all3[(i + 1) % all3.len()];
        out.push(StructurePair::new(format!("digraph3#{i} vs next"), g.clone(), next.clone()));
    }
    for a in 0..=4 {
        for b in 0..=4 {
            if a != b {
                out.push(StructurePair::new(format!("bare{a} vs bare{b}"), Structure::bare(a), Structure::bare(b)));
            }
        }
    }
    for (i, g) in all_digraphs(2).iter().enumerate().step_by(3) {
        out.push(StructurePair::new(format!("digraph2#{i} vs empty3"), g.clone(), digraph_from_code(3, 0)));
    }
    for k in 0..60 {
        let n = 1 + k % 5;
        let density = [0.2, 0.35, 0.5][k % 3];
        let x = if k % 2 == 0 {
            random_digraph(&mut rng, n, density)
        } else {
            random_two_relational(&mut rng, n, density)
        };
        out.push(StructurePair::new(format!("random#{k} shuffled"), x.clone(), shuffled(&mut rng, &x)));
        let y = perturbed(&mut rng, &x);
        out.push(StructurePair::new(format!("random#{k} perturbed"), x, y));
    }
    let gs = groups::small_groups();
    for (a, g) in &gs {
        for (b, h) in &gs {
            out.push(StructurePair::new(format!("{a} vs {b}"), g.clone(), h.clone()));
        }
        out.push(StructurePair::new(format!("{a} shuffled"), g.clone(), shuffled(&mut rng, g)));
    }
    out
}

/// Toggle one random tuple of one relation, then relabel.
fn perturbed(rng: &mut impl Rng, x: &Structure) -> Structure {
    let n = x.size();
    let sig = x.signature().clone();
    let r = rng.gen_range(0..sig.relations().len());
    let arity = sig.relations()[r].arity;
    let t: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..n)).collect();
    let mut b = Structure::builder(sig.clone(), n);
    for (i, sym) in sig.relations().iter().enumerate() {
        let mut rel = x.relation(i).clone();
        if i == r && !rel.remove(&t) {
            rel.insert(t.clone());
        }
        b = b.relation(&sym.name, rel).expect("same signature");
    }
    shuffled(rng, &b.build().expect("perturbed structure"))
}

/// Small structures for exhaustive morphism enumeration, at most 4
/// elements each.
pub fn small_structures() -> Vec<(String, Arc<Structure>)> {
    let mut out: Vec<(String, Structure)> = (1..=4).map(|n| (format!("bare{n}"), Structure::bare(n))).collect();
    type Named = (&'static str, usize, &'static [(usize, usize)]);
    let digraphs: [Named; 7] = [
        ("point", 1, &[]),
        ("loop", 1, &[(0, 0)]),
        ("edge", 2, &[(0, 1)]),
        ("two-cycle", 2, &[(0, 1), (1, 0)]),
        ("path3", 3, &[(0, 1), (1, 2)]),
        ("cycle3", 3, &[(0, 1), (1, 2), (2, 0)]),
        ("cycle4", 4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
    ];
    for (name, n, edges) in digraphs {
        out.push((name.to_string(), Structure::digraph(n, edges).expect("digraph")));
    }
    for (i, g) in digraph_classes(2).into_iter().enumerate() {
        out.push((format!("class2#{i}"), g));
    }
    for (name, g) in groups::small_groups() {
        if g.size() <= 4 {
            out.push((name.to_string(), g));
        }
    }
    out.into_iter().map(|(n, s)| (n, Arc::new(s))).collect()
}

/// Every map `x → y` as a morphism, in lexicographic order of tables.
pub fn all_maps(x: &Arc<Structure>, y: &Arc<Structure>) -> Vec<Morphism> {
    let (m, n) = (x.size(), y.size());
    if n == 0 && m > 0 {
        return Vec::new();
    }
    let count = n.pow(m as u32);
    (0..count)
        .map(|mut code| {
            let mut table = vec![0; m];
            for slot in table.iter_mut().rev() {
                *slot = code % n.max(1);
                code /= n.max(1);
            }
            Morphism::new(x.clone(), y.clone(), table).expect("table within bounds")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digraph_class_counts() {
        // 1, 2, 10 and 104 isomorphism classes of digraphs with loops.
        let counts: Vec<usize> = (0..=3).map(|n| digraph_classes(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 10, 104]);
    }

    #[test]
    fn corpus_is_deterministic_and_large() {
        let a = equivalence_corpus();
        let b = equivalence_corpus();
        assert!(a.len() >= 200);
        assert!(a.iter().zip(&b).all(|(p, q)| p.left == q.left && p.right == q.right));
    }

    #[test]
    fn all_maps_counts() {
        let x = Arc::new(Structure::bare(2));
        let y = Arc::new(Structure::bare(3));
        assert_eq!(all_maps(&x, &y).len(), 9);
        assert_eq!(permutations(4).len(), 24);
    }
}
