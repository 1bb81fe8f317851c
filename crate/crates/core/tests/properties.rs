use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use backforth::acceptance::restricted_isomorphisms;
use backforth::corpus::{self, brute_force_isomorphic};
use backforth::embeddings::decide_lambda_embedding;
use backforth::functor::{apply_morphism, Functor, Reduct, UnderlyingSet};
use backforth::groups;
use backforth::span::{
    check_density, decide_equivalent, greatest_dense_family, greatest_dense_family_explicit, sieve_closure,
    star_compose, PruneStrategy, SpanFamily,
};
use backforth::structure::{enumerate_test_objects, iso_oracle, Mode, Morphism, Structure};
use backforth::symbolic::{sym_embedding, sym_equivalent, CardToken};
use backforth::theory::Theory;
use backforth::Caps;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        ..ProptestConfig::default()
    }
}

fn digraph(max: usize) -> impl Strategy<Value = Arc<Structure>> {
    (1..=max).prop_flat_map(|n| (Just(n), 0..1u64 << (n * n))).prop_map(|(n, code)| Arc::new(corpus::digraph_from_code(n, code)))
}

/// Digraphs and `E/2, P/1` structures on up to `max` elements.
fn relational(max: usize) -> impl Strategy<Value = Arc<Structure>> {
    let two = (1..=max, any::<u64>()).prop_map(|(n, seed)| {
        Arc::new(corpus::random_two_relational(&mut ChaCha8Rng::seed_from_u64(seed), n, 0.35))
    });
    prop_oneof![digraph(max), two]
}

fn group() -> impl Strategy<Value = Arc<Structure>> {
    let gs: Vec<Arc<Structure>> = groups::small_groups().into_iter().map(|(_, g)| Arc::new(g)).collect();
    proptest::sample::select(gs)
}

fn shuffled(x: &Structure, seed: u64) -> Arc<Structure> {
    Arc::new(corpus::shuffled(&mut ChaCha8Rng::seed_from_u64(seed), x))
}

/// A random map between the carriers, possibly not a morphism.
fn any_map(x: &Arc<Structure>, y: &Arc<Structure>, seed: u64) -> Morphism {
    let n = y.size().max(1) as u64;
    let table = (0..x.size()).map(|i| ((seed >> (3 * i)) % n) as usize).collect();
    Morphism::new(x.clone(), y.clone(), table).unwrap()
}

fn caps() -> Caps {
    Caps::default()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn closure_is_a_closure_operator(g in group(), seed in any::<u64>(), other in any::<u64>()) {
        let full = g.full_mask();
        let (a, b) = (seed & full, other & full);
        let ca = g.closure(a);
        prop_assert_eq!(ca & a, a);
        prop_assert_eq!(g.closure(ca), ca);
        prop_assert!(g.is_closed(ca));
        prop_assert_eq!(g.closure(a | b) & ca, ca);
    }

    #[test]
    fn emb_test_objects_are_the_closed_subsets(g in prop_oneof![group(), relational(4)]) {
        let objects = enumerate_test_objects(&g, Mode::Emb, &caps()).unwrap();
        let masks: BTreeSet<u64> = objects.iter().map(|t| t.mask()).collect();
        let closed: BTreeSet<u64> = g.closed_masks().into_iter().collect();
        prop_assert_eq!(masks.len(), objects.len());
        prop_assert_eq!(masks, closed);
    }

    #[test]
    fn str_test_objects_count_relation_choices(x in relational(3)) {
        let objects = enumerate_test_objects(&x, Mode::Str, &caps()).unwrap();
        let expected: usize = (0..1u64 << x.size())
            .map(|m| 1usize << x.induced_relations(m).iter().map(BTreeSet::len).sum::<usize>())
            .sum();
        prop_assert_eq!(objects.len(), expected);
    }

    #[test]
    fn classes_compose(x in relational(3), s1 in any::<u64>(), s2 in any::<u64>()) {
        let y = shuffled(&x, s1);
        let f = any_map(&x, &y, s1);
        let g = any_map(&y, &x, s2);
        let gf = f.then(&g).unwrap();
        let (cf, cg, cgf) = (f.classify(), g.classify(), gf.classify());
        if cf.is_hom() && cg.is_hom() { prop_assert!(cgf.is_hom()); }
        if cf.is_mono() && cg.is_mono() { prop_assert!(cgf.is_mono()); }
        if cf.is_embedding() && cg.is_embedding() { prop_assert!(cgf.is_embedding()); }
        prop_assert!(Morphism::identity(x.clone()).classify().is_embedding());
    }

    #[test]
    fn isomorphism_is_symmetric(x in digraph(3), y in digraph(3)) {
        let xy = iso_oracle(&x, &y);
        prop_assert_eq!(xy.is_some(), iso_oracle(&y, &x).is_some());
        prop_assert_eq!(xy.is_some(), brute_force_isomorphic(&x, &y));
        if let Some(f) = xy {
            prop_assert!(f.classify().is_embedding() && f.is_surjective());
        }
    }

    #[test]
    fn greatest_family_is_a_dense_sieve(x in relational(3), y in relational(3), str_mode in any::<bool>()) {
        prop_assume!(x.signature() == y.signature());
        let mode = if str_mode { Mode::Str } else { Mode::Emb };
        let g = greatest_dense_family(&x, &y, mode, &caps()).unwrap();
        prop_assert!(g.is_sieve());
        // dense families are nonempty by definition
        prop_assert_eq!(check_density(&g, &caps()).unwrap().is_dense(), !g.is_empty());
        let back = greatest_dense_family(&y, &x, mode, &caps()).unwrap();
        let reversed = g.reversed();
        prop_assert_eq!(reversed.spans(), back.spans());
    }

    #[test]
    fn modes_agree_on_equivalence(x in relational(4), y in relational(4), seed in any::<u64>(), copy in any::<bool>()) {
        prop_assume!(x.signature() == y.signature());
        let y = if copy { shuffled(&x, seed) } else { y };
        let emb = decide_equivalent(&x, &y, Mode::Emb, &caps()).unwrap();
        let str_ = decide_equivalent(&x, &y, Mode::Str, &caps()).unwrap();
        prop_assert_eq!(emb, str_);
        prop_assert_eq!(emb, iso_oracle(&x, &y).is_some());
    }

    #[test]
    fn union_of_dense_families_is_dense(x in relational(3), seed in any::<u64>(), str_mode in any::<bool>()) {
        let mode = if str_mode { Mode::Str } else { Mode::Emb };
        let y = shuffled(&x, seed);
        let isos = SpanFamily::new(x.clone(), y.clone(), mode, restricted_isomorphisms(&x, &y, mode)).unwrap();
        prop_assert!(check_density(&isos, &caps()).unwrap().is_dense());
        let identity = SpanFamily::new(
            x.clone(), x.clone(), mode, restricted_isomorphisms(&x, &x, mode),
        ).unwrap();
        let composed = star_compose(&identity, &isos, &caps()).unwrap();
        let union = isos.union(&composed).unwrap();
        prop_assert!(check_density(&union, &caps()).unwrap().is_dense());
        let closed = sieve_closure(&union, &caps()).unwrap();
        prop_assert!(closed.is_sieve());
        prop_assert!(check_density(&closed, &caps()).unwrap().is_dense());
    }

    #[test]
    fn fast_path_matches_both_reference_prunings(x in digraph(3), y in digraph(3), str_mode in any::<bool>()) {
        let mode = if str_mode { Mode::Str } else { Mode::Emb };
        prop_assume!(mode == Mode::Emb || x.tuple_count() + y.tuple_count() <= 6);
        let fast = greatest_dense_family(&x, &y, mode, &caps()).unwrap();
        for strategy in [PruneStrategy::Rounds, PruneStrategy::OneAtATime] {
            let slow = greatest_dense_family_explicit(&x, &y, mode, &caps(), strategy).unwrap();
            prop_assert_eq!(fast.spans(), slow.spans(), "{:?}", strategy);
        }
    }

    #[test]
    fn identity_family_is_a_unit(x in relational(3), y in relational(3), seed in any::<u64>(), copy in any::<bool>()) {
        prop_assume!(x.signature() == y.signature());
        let y = if copy { shuffled(&x, seed) } else { y };
        let gxx = greatest_dense_family(&x, &x, Mode::Emb, &caps()).unwrap();
        let gxy = greatest_dense_family(&x, &y, Mode::Emb, &caps()).unwrap();
        let composed = star_compose(&gxx, &gxy, &caps()).unwrap();
        prop_assert_eq!(composed.spans(), gxy.spans());
    }

    #[test]
    fn equivalence_is_transitive(x in digraph(3), s1 in any::<u64>(), s2 in any::<u64>()) {
        let y = shuffled(&x, s1);
        let z = shuffled(&y, s2);
        let gxy = greatest_dense_family(&x, &y, Mode::Emb, &caps()).unwrap();
        let gyz = greatest_dense_family(&y, &z, Mode::Emb, &caps()).unwrap();
        let gxz = greatest_dense_family(&x, &z, Mode::Emb, &caps()).unwrap();
        let composed = star_compose(&gxy, &gyz, &caps()).unwrap();
        prop_assert!(check_density(&composed, &caps()).unwrap().is_dense());
        prop_assert!(composed.is_subfamily_of(&gxz));
        prop_assert!(!composed.is_empty());
    }

    #[test]
    fn isomorphisms_are_embeddings(x in relational(3), seed in any::<u64>(), str_mode in any::<bool>()) {
        let mode = if str_mode { Mode::Str } else { Mode::Emb };
        let y = shuffled(&x, seed);
        let f = iso_oracle(&x, &y).unwrap();
        prop_assert!(decide_lambda_embedding(&f, mode, &caps()).unwrap());
    }

    #[test]
    fn functors_respect_composition(x in relational(3), s1 in any::<u64>(), s2 in any::<u64>(), use_reduct in any::<bool>()) {
        let functor: Box<dyn Functor> = if use_reduct { Box::new(Reduct::new(["E"])) } else { Box::new(UnderlyingSet) };
        let y = shuffled(&x, s1);
        let f = any_map(&x, &y, s1);
        let g = any_map(&y, &x, s2);
        let composite = apply_morphism(functor.as_ref(), &f.then(&g).unwrap()).unwrap();
        let stepwise = apply_morphism(functor.as_ref(), &f)
            .unwrap()
            .then(&apply_morphism(functor.as_ref(), &g).unwrap())
            .unwrap();
        prop_assert_eq!(composite.map(), stepwise.map());
        let id = apply_morphism(functor.as_ref(), &Morphism::identity(x.clone())).unwrap();
        prop_assert!(id.map().iter().enumerate().all(|(i, &v)| i == v));
        if f.is_mono_in(Mode::Str) {
            prop_assert!(apply_morphism(functor.as_ref(), &f).unwrap().is_mono_in(Mode::Str));
        }
    }

    #[test]
    fn universal_theories_pass_to_substructures(x in digraph(4), mask in any::<u64>()) {
        let sig = x.signature().clone();
        let theories = [
            Theory::parse("loopless", sig.clone(), "forall x. E(x,x) -> false").unwrap(),
            Theory::parse("symmetric", sig.clone(), "forall x y. E(x,y) -> E(y,x)").unwrap(),
            Theory::parse("transitive", sig, "forall x y z. E(x,y) & E(y,z) -> E(x,z)").unwrap(),
        ];
        let (sub, _) = x.induced(mask & x.full_mask()).unwrap();
        for t in &theories {
            if t.is_model(&x).unwrap() {
                prop_assert!(t.is_model(&sub).unwrap(), "{}", t.name);
            }
        }
    }

    #[test]
    fn symbolic_embedding_implies_equivalence(a in token(), b in token(), bijective in any::<bool>()) {
        if let Ok(true) = sym_embedding(a, b, bijective) {
            prop_assert!(sym_equivalent(a, b));
        }
    }

    #[test]
    fn symbolic_equivalence_matches_finite_sets(a in 0usize..=5, b in 0usize..=5) {
        let decided = decide_equivalent(&Arc::new(Structure::bare(a)), &Arc::new(Structure::bare(b)), Mode::Emb, &caps()).unwrap();
        prop_assert_eq!(sym_equivalent(CardToken::Fin(a as u64), CardToken::Fin(b as u64)), decided);
    }
}

fn token() -> impl Strategy<Value = CardToken> {
    prop_oneof![(0u64..6).prop_map(CardToken::Fin), Just(CardToken::Inf)]
}
