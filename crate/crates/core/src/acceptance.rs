//! The acceptance suite: nine checks of the engine against independent
//! oracles over the seeded corpus. Used by `backforth selftest` and by the
//! `acceptance` test target.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::caps::Caps;
use crate::chain::{verify_ladder, verify_smooth_composition, ChainDiagram, LadderInstance};
use crate::corpus::{self, brute_force_isomorphic, is_isomorphism, permutations, shuffled, StructurePair};
use crate::embeddings::{check_purity, EmbeddingWitness};
use crate::engine::Engine;
use crate::functor::{transport_image, Abelianization, Functor};
use crate::groups;
use crate::span::{check_density, decide_equivalent, greatest_dense_family, star_compose, Span, SpanFamily};
use crate::structure::{elements_of, iso_oracle, Mode, Morphism, MorphismClass, Structure};
use crate::symbolic::{
    sym_density_check, sym_embedding, sym_embedding_witnesses, sym_equivalent, sym_verify_ladder, CardToken, SymChain,
    SymLadder, SymMap, Tail,
};

pub const CRITERIA: [(u8, &str); 9] = [
    (1, "cardinality sets: equivalence rule and symbolic density agree"),
    (2, "equivalence decision matches the isomorphism oracle"),
    (3, "greatest dense family equals restricted isomorphisms"),
    (4, "composites of dense families are dense and associative"),
    (5, "embedding and homomorphism modes agree on equivalence"),
    (6, "abelianization transports dense families with certified images"),
    (7, "embedding laws on exhaustive small morphisms"),
    (8, "ladders of embeddings induce embeddings of colimits"),
    (9, "CLI witnesses re-validate"),
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} {}: {} ({}; {:.2}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.seconds
        )
    }
}

type Check = std::result::Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err_str(e: crate::Error) -> String {
    e.to_string()
}

pub fn run_criterion(id: u8) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        _ => fail(format!("no criterion {id}")),
    };
    let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult {
        id,
        title,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs the listed criteria, or all of them when `ids` is empty.
pub fn run_selected(ids: &[u8]) -> Vec<CriterionResult> {
    if ids.is_empty() {
        CRITERIA.iter().map(|c| run_criterion(c.0)).collect()
    } else {
        ids.iter().map(|&i| run_criterion(i)).collect()
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    run_selected(&[])
}

fn token_grid() -> Vec<CardToken> {
    (0..=6).map(CardToken::Fin).chain([CardToken::Inf]).collect()
}

/// Equal finite sizes, or both infinite.
fn cardinality_rule(a: CardToken, b: CardToken) -> bool {
    match (a, b) {
        (CardToken::Fin(m), CardToken::Fin(n)) => m == n,
        (CardToken::Inf, CardToken::Inf) => true,
        _ => false,
    }
}

fn criterion_1() -> Check {
    let grid = token_grid();
    let mut pairs = 0;
    for &a in &grid {
        for &b in &grid {
            pairs += 1;
            let rule = cardinality_rule(a, b);
            ensure(sym_equivalent(a, b) == rule, || format!("sym_equivalent({a}, {b}) disagrees with the rule"))?;
            ensure(sym_density_check(a, b).is_dense() == rule, || {
                format!("symbolic density for ({a}, {b}) disagrees with the rule")
            })?;
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn modes_for(p: &StructurePair) -> Vec<Mode> {
    if p.is_relational() {
        vec![Mode::Emb, Mode::Str]
    } else {
        vec![Mode::Emb]
    }
}

fn criterion_2() -> Check {
    let corpus = corpus::equivalence_corpus();
    let caps = Caps::default();
    let checks: Vec<std::result::Result<(usize, bool), String>> = corpus
        .par_iter()
        .map(|p| {
            let oracle = iso_oracle(&p.left, &p.right).is_some();
            let brute = brute_force_isomorphic(&p.left, &p.right);
            if oracle != brute {
                return fail(format!("{}: iso oracles disagree", p.label));
            }
            let modes = modes_for(p);
            for &mode in &modes {
                let decided = decide_equivalent(&p.left, &p.right, mode, &caps).map_err(err_str)?;
                if decided != oracle {
                    return fail(format!("{} ({mode}): decided {decided}, isomorphic {oracle}", p.label));
                }
            }
            Ok((modes.len(), oracle))
        })
        .collect();
    let mut decisions = 0;
    let mut equivalent = 0;
    for c in checks {
        let (n, iso) = c?;
        decisions += n;
        equivalent += usize::from(iso);
    }
    ensure(corpus.len() >= 200, || "corpus too small".into())?;
    Ok(format!(
        "{} pairs, {decisions} decisions, {equivalent} isomorphic pairs",
        corpus.len()
    ))
}

/// Every restriction of every isomorphism `x → y`, with every relation
/// choice in homomorphism mode. Found by trying all bijections.
pub fn restricted_isomorphisms(x: &Structure, y: &Structure, mode: Mode) -> BTreeSet<Span> {
    let mut out = BTreeSet::new();
    if x.size() != y.size() || x.signature() != y.signature() {
        return out;
    }
    let n = x.size();
    for p in permutations(n).iter().filter(|p| is_isomorphism(x, y, p)) {
        for mask in 0..1u64 << n {
            if !x.is_closed(mask) {
                continue;
            }
            let domain = elements_of(mask);
            let map: Vec<usize> = domain.iter().map(|&a| p[a]).collect();
            match mode {
                Mode::Emb => {
                    out.insert(Span {
                        domain,
                        map,
                        relations: None,
                    });
                }
                Mode::Str => {
                    let induced = x.induced_relations(mask);
                    let flat: Vec<(usize, Vec<usize>)> = induced
                        .iter()
                        .enumerate()
                        .flat_map(|(r, rel)| rel.iter().map(move |t| (r, t.clone())))
                        .collect();
                    for choice in 0..1u64 << flat.len() {
                        let mut rels = vec![BTreeSet::new(); induced.len()];
                        for (k, (r, t)) in flat.iter().enumerate() {
                            if choice >> k & 1 == 1 {
                                rels[*r].insert(t.clone());
                            }
                        }
                        out.insert(Span {
                            domain: domain.clone(),
                            map: map.clone(),
                            relations: Some(rels),
                        });
                    }
                }
            }
        }
    }
    out
}

fn criterion_3() -> Check {
    let mut pairs: Vec<(String, Structure, Structure)> = Vec::new();
    for a in 0..=4 {
        for b in 0..=4 {
            pairs.push((format!("bare{a} vs bare{b}"), Structure::bare(a), Structure::bare(b)));
        }
    }
    for n in 0..=2 {
        let all = corpus::all_digraphs(n);
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                pairs.push((format!("digraph{n}#{i} vs #{j}"), a.clone(), b.clone()));
            }
        }
    }
    let mut rng = corpus::rng(3);
    let all3 = corpus::all_digraphs(3);
    for (i, g) in all3.iter().enumerate() {
        pairs.push((format!("digraph3#{i} shuffled"), g.clone(), shuffled(&mut rng, g)));
    }
    let classes = corpus::digraph_classes(3);
    for (i, g) in classes.iter().enumerate() {
        let next = &classes[(i + 1) % classes.len()];
        pairs.push((format!("class3#{i} vs next"), g.clone(), next.clone()));
    }
    let caps = Caps::default();
    let results: Vec<std::result::Result<usize, String>> = pairs
        .par_iter()
        .map(|(label, x, y)| {
            let (x, y) = (Arc::new(x.clone()), Arc::new(y.clone()));
            let mut spans = 0;
            for mode in [Mode::Emb, Mode::Str] {
                let family = greatest_dense_family(&x, &y, mode, &caps).map_err(err_str)?;
                let oracle = restricted_isomorphisms(&x, &y, mode);
                if *family.spans() != oracle {
                    return fail(format!(
                        "{label} ({mode}): greatest family has {} spans, oracle {}",
                        family.len(),
                        oracle.len()
                    ));
                }
                spans += oracle.len();
            }
            Ok(spans)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r?;
    }
    Ok(format!("{} pairs in both modes, {total} spans compared", pairs.len()))
}

fn criterion_4() -> Check {
    let mut rng = corpus::rng(4);
    let mut bases: Vec<(String, Structure, Vec<Mode>)> = Vec::new();
    for n in 0..=3 {
        for (i, g) in corpus::digraph_classes(n).into_iter().enumerate() {
            // homomorphism-mode families grow with every relation choice
            let modes = if g.tuple_count() <= 3 { vec![Mode::Emb, Mode::Str] } else { vec![Mode::Emb] };
            bases.push((format!("class{n}#{i}"), g, modes));
        }
    }
    for n in 1..=4 {
        bases.push((format!("bare{n}"), Structure::bare(n), vec![Mode::Emb, Mode::Str]));
    }
    for (name, g) in groups::small_groups() {
        if g.size() <= 6 {
            bases.push((name.to_string(), g, vec![Mode::Emb]));
        }
    }
    let triples: Vec<(String, [Arc<Structure>; 3], Mode)> = bases
        .into_iter()
        .flat_map(|(label, x, modes)| {
            let y = shuffled(&mut rng, &x);
            let z = shuffled(&mut rng, &x);
            let objs = [Arc::new(x), Arc::new(y), Arc::new(z)];
            modes.into_iter().map(move |m| (label.clone(), objs.clone(), m))
        })
        .collect();
    let caps = Caps::default();
    let results: Vec<std::result::Result<(), String>> = triples
        .par_iter()
        .map(|(label, [x, y, z], mode)| {
            let g = |a: &Arc<Structure>, b: &Arc<Structure>| greatest_dense_family(a, b, *mode, &caps).map_err(err_str);
            let (s1, s2, s3) = (g(x, y)?, g(y, z)?, g(z, x)?);
            let c12 = star_compose(&s1, &s2, &caps).map_err(err_str)?;
            if !check_density(&c12, &caps).map_err(err_str)?.is_dense() {
                return fail(format!("{label} ({mode}): composite is not dense"));
            }
            let left = star_compose(&c12, &s3, &caps).map_err(err_str)?;
            let right = star_compose(&s1, &star_compose(&s2, &s3, &caps).map_err(err_str)?, &caps).map_err(err_str)?;
            if left.spans() != right.spans() {
                return fail(format!("{label} ({mode}): composition is not associative"));
            }
            Ok(())
        })
        .collect();
    for r in results {
        r?;
    }
    ensure(triples.len() >= 100, || format!("only {} triples", triples.len()))?;
    Ok(format!("{} triples dense and associative", triples.len()))
}

fn criterion_5() -> Check {
    let corpus = corpus::equivalence_corpus();
    let caps = Caps::default();
    let relational: Vec<&StructurePair> = corpus.iter().filter(|p| p.is_relational()).collect();
    let results: Vec<std::result::Result<(), String>> = relational
        .par_iter()
        .map(|p| {
            let emb = decide_equivalent(&p.left, &p.right, Mode::Emb, &caps).map_err(err_str)?;
            let hom = decide_equivalent(&p.left, &p.right, Mode::Str, &caps).map_err(err_str)?;
            ensure(emb == hom, || format!("{}: emb {emb}, str {hom}", p.label))
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(format!("{} relational pairs", relational.len()))
}

fn criterion_6() -> Check {
    let mut rng = corpus::rng(6);
    let caps = Caps::default();
    let mut instances = Vec::new();
    for (name, g) in groups::small_groups() {
        let g = Arc::new(g);
        instances.push((format!("{name} vs itself"), g.clone(), g.clone()));
        instances.push((format!("{name} vs shuffled"), g.clone(), Arc::new(shuffled(&mut rng, &g))));
    }
    let results: Vec<std::result::Result<usize, String>> = instances
        .par_iter()
        .map(|(label, x, y)| {
            let family = greatest_dense_family(x, y, Mode::Emb, &caps).map_err(err_str)?;
            let moved = transport_image(&Abelianization, &family, None).map_err(err_str)?;
            if let Some(c) = moved.certificates.iter().find(|c| !c.passed()) {
                return fail(format!("{label}: certificate failed for span on {:?}", c.domain));
            }
            if !check_density(&moved.family, &caps).map_err(err_str)?.is_dense() {
                return fail(format!("{label}: transported family is not dense"));
            }
            Ok(moved.certificates.len())
        })
        .collect();
    let mut certificates = 0;
    for r in results {
        certificates += r?;
    }
    Ok(format!(
        "{} group pairs, {certificates} certificates all passing",
        instances.len()
    ))
}

fn in_category(f: &Morphism, mode: Mode) -> bool {
    match mode {
        Mode::Emb => f.classify().is_embedding(),
        Mode::Str => f.classify().is_hom(),
    }
}

fn criterion_7() -> Check {
    let structures = corpus::small_structures();
    let engine = Engine::default();
    let mut checked = 0usize;
    let mut composites = 0usize;
    let mut embeddings = 0usize;
    for mode in [Mode::Emb, Mode::Str] {
        let objs: Vec<&(String, Arc<Structure>)> = structures
            .iter()
            .filter(|(_, s)| mode == Mode::Emb || s.signature().is_relational())
            .collect();
        let homs = |x: &Arc<Structure>, y: &Arc<Structure>| -> Vec<Morphism> {
            if x.signature() != y.signature() {
                return Vec::new();
            }
            corpus::all_maps(x, y).into_iter().filter(|f| in_category(f, mode)).collect()
        };
        for (xn, x) in &objs {
            for (yn, y) in &objs {
                for f in homs(x, y) {
                    checked += 1;
                    let e = engine.decide_lambda_embedding(&f, mode).map_err(err_str)?;
                    let label = || format!("{xn} -> {yn} {:?} ({mode})", f.map());
                    ensure(!e || f.is_mono_in(mode), || format!("{}: embedding but not mono", label()))?;
                    ensure(e == (f.classify() == MorphismClass::Iso), || {
                        format!("{}: embedding {e} but class {}", label(), f.classify().as_str())
                    })?;
                    if e {
                        embeddings += 1;
                        ensure(check_purity(&f, mode, engine.caps()).map_err(err_str)?, || {
                            format!("{}: embedding but not pure", label())
                        })?;
                        ensure(engine.decide_equivalent(x, y, mode).map_err(err_str)?, || {
                            format!("{}: embedding between inequivalent ends", label())
                        })?;
                    }
                    for (zn, z) in &objs {
                        for g in homs(y, z) {
                            composites += 1;
                            let gf = f.then(&g).map_err(err_str)?;
                            let eg = engine.decide_lambda_embedding(&g, mode).map_err(err_str)?;
                            let egf = engine.decide_lambda_embedding(&gf, mode).map_err(err_str)?;
                            let label = || format!("{xn} -> {yn} -> {zn} {:?} {:?} ({mode})", f.map(), g.map());
                            ensure(!(e && eg) || egf, || format!("{}: composite of embeddings is not one", label()))?;
                            ensure(!(eg && egf) || e, || format!("{}: two-out-of-three fails", label()))?;
                        }
                    }
                }
            }
        }
    }
    let mut sym = 0;
    for &a in &token_grid() {
        for &b in &token_grid() {
            for bij in [false, true] {
                let Ok(f) = SymMap::new(a, b, bij) else { continue };
                sym += 1;
                let expected = bij || (a == CardToken::Inf && b == CardToken::Inf);
                let found = sym_embedding(a, b, bij).map_err(err_str)?;
                ensure(found == expected, || format!("sym_embedding({a}, {b}, {bij}) = {found}"))?;
                if let Some(ws) = sym_embedding_witnesses(f) {
                    ensure(ws.iter().all(|w| w.span.center == w.test), || format!("bad witness for {a} -> {b}"))?;
                }
            }
        }
    }
    Ok(format!(
        "{checked} morphisms ({embeddings} embeddings), {composites} composable pairs, {sym} symbolic maps"
    ))
}

fn isos(x: &Arc<Structure>, y: &Arc<Structure>) -> Vec<Morphism> {
    crate::structure::all_isomorphisms(x, y)
}

/// All chains of `stages` objects drawn from `pool` whose maps are isomorphisms.
fn iso_chains(pool: &[Arc<Structure>], stages: usize) -> Vec<ChainDiagram> {
    let mut partial: Vec<(Vec<Arc<Structure>>, Vec<Morphism>)> = pool.iter().map(|x| (vec![x.clone()], vec![])).collect();
    for _ in 1..stages {
        let mut next = Vec::new();
        for (objs, maps) in &partial {
            let last = objs.last().expect("non-empty");
            for y in pool {
                for m in isos(last, y) {
                    let mut o = objs.clone();
                    o.push(y.clone());
                    let mut ms = maps.clone();
                    ms.push(m);
                    next.push((o, ms));
                }
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|(o, m)| ChainDiagram::new(o, m).expect("consecutive maps"))
        .collect()
}

/// Components after the first are forced by naturality when the chain
/// maps are isomorphisms: `c[i+1] = upper[i] ∘ c[i] ∘ lower[i]⁻¹`.
fn forced_ladder(lower: &ChainDiagram, upper: &ChainDiagram, c0: Morphism) -> Option<LadderInstance> {
    let mut comps = vec![c0];
    for i in 0..lower.maps().len() {
        let l = &lower.maps()[i];
        let mut inverse = vec![0; l.map().len()];
        for (a, &b) in l.map().iter().enumerate() {
            inverse[b] = a;
        }
        let l_inv = Morphism::new(l.target().clone(), l.source().clone(), inverse).ok()?;
        let c = l_inv.then(comps.last()?).ok()?.then(&upper.maps()[i]).ok()?;
        comps.push(c);
    }
    LadderInstance::new(lower.clone(), upper.clone(), comps).ok()
}

fn criterion_8() -> Check {
    let engine = Engine::default();
    let mut rng = corpus::rng(8);
    let mut ladders = 0usize;
    let mut hypothesis = 0usize;
    let mut chains = 0usize;
    for mode in [Mode::Emb, Mode::Str] {
        for (name, x) in corpus::small_structures() {
            if mode == Mode::Str && !x.signature().is_relational() {
                continue;
            }
            let x2 = Arc::new(shuffled(&mut rng, &x));
            // larger automorphism groups: one object per stage keeps the count modest
            let automorphisms = isos(&x, &x).len();
            let pool = if automorphisms <= 2 { vec![x.clone(), x2] } else { vec![x.clone()] };
            // three-stage ladders number |Aut|^5; beyond |Aut| = 6 stop at two stages
            let max_stages = if automorphisms <= 6 { 3 } else { 2 };
            for stages in 1..=max_stages {
                let cs = iso_chains(&pool, stages);
                for c in &cs {
                    chains += 1;
                    let r = verify_smooth_composition(c, mode, &engine).map_err(err_str)?;
                    ensure(r.conclusion_ok != Some(false), || format!("{name}: chain conclusion fails ({mode})"))?;
                }
                for lower in &cs {
                    for upper in &cs {
                        for c0 in isos(&lower.objects()[0], &upper.objects()[0]) {
                            let Some(l) = forced_ladder(lower, upper, c0) else { continue };
                            ladders += 1;
                            let r = verify_ladder(&l, mode, &engine).map_err(err_str)?;
                            hypothesis += usize::from(r.hypothesis_ok);
                            ensure(!(r.hypothesis_ok && r.conclusion_ok == Some(false)), || {
                                format!("{name}: ladder hypothesis holds, conclusion fails ({mode})")
                            })?;
                        }
                    }
                }
            }
        }
    }
    // proper inclusions: the hypothesis fails and nothing is concluded
    let bare: Vec<Arc<Structure>> = (1..=3).map(|n| Arc::new(Structure::bare(n))).collect();
    let inc = |a: usize, b: usize| Morphism::new(bare[a].clone(), bare[b].clone(), (0..=a).collect()).expect("inclusion");
    let growing = ChainDiagram::from_maps(vec![inc(0, 1), inc(1, 2)]).map_err(err_str)?;
    let l = LadderInstance::new(growing.clone(), growing.clone(), bare.iter().map(|b| Morphism::identity(b.clone())).collect())
        .map_err(err_str)?;
    let r = verify_ladder(&l, Mode::Emb, &engine).map_err(err_str)?;
    ensure(!r.hypothesis_ok && r.conclusion_ok.is_none(), || "growing chain accepted".into())?;

    let (sym_ladders, sym_hypothesis) = symbolic_ladder_grid()?;
    Ok(format!(
        "{chains} chains, {ladders} ladders ({hypothesis} satisfy the hypothesis); symbolic: {sym_ladders} ladders ({sym_hypothesis} satisfy the hypothesis)"
    ))
}

/// Every symbolic chain with a prefix of at most three sizes from
/// `0, 1, 2, 3, INF`, with either tail.
pub fn symbolic_chain_grid() -> Vec<SymChain> {
    let tokens = [
        CardToken::Fin(0),
        CardToken::Fin(1),
        CardToken::Fin(2),
        CardToken::Fin(3),
        CardToken::Inf,
    ];
    let mut prefixes: Vec<Vec<CardToken>> = tokens.iter().map(|&t| vec![t]).collect();
    let mut all = prefixes.clone();
    for _ in 1..3 {
        prefixes = prefixes
            .iter()
            .flat_map(|p| {
                let last = *p.last().expect("non-empty");
                tokens.iter().filter(move |&&t| t >= last).map(move |&t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
        all.extend(prefixes.clone());
    }
    all.into_iter()
        .flat_map(|p| {
            [Tail::Constant, Tail::StrictlyIncreasing]
                .into_iter()
                .map(move |t| SymChain::new(p.clone(), t).expect("monotone prefix"))
        })
        .collect()
}

fn symbolic_ladder_grid() -> std::result::Result<(usize, usize), String> {
    let chains = symbolic_chain_grid();
    let mut ladders = 0;
    let mut hypothesis = 0;
    for lower in &chains {
        for upper in chains.iter().filter(|u| u.prefix.len() == lower.prefix.len()) {
            let n = lower.prefix.len();
            for flags in 0..1u32 << n {
                let bij: Vec<bool> = (0..n).map(|i| flags >> i & 1 == 1).collect();
                let Ok(ladder) = SymLadder::new(lower.clone(), upper.clone(), &bij) else { continue };
                ladders += 1;
                let r = sym_verify_ladder(&ladder).map_err(err_str)?;
                hypothesis += usize::from(r.hypothesis_ok);
                ensure(!(r.hypothesis_ok && r.conclusion_ok == Some(false)), || {
                    format!("symbolic ladder {lower:?} => {upper:?} {bij:?}: conclusion fails")
                })?;
            }
        }
    }
    Ok((ladders, hypothesis))
}

/// A workspace exercising every CLI command.
pub const ROUND_TRIP_WORKSPACE: &str = "\
signature Graph: rel E/2
structure C3 : Graph ; size 3 ; E = {(0,1),(1,2),(2,0)}
structure D3 : Graph ; size 3 ; E = {(1,0),(2,1),(0,2)}
structure P3 : Graph ; size 3 ; E = {(0,1),(1,2)}
morphism flip : C3 -> D3 ; map [0, 2, 1]
morphism rot : C3 -> C3 ; map [1, 2, 0]
theory loopless : Graph ; forall x. E(x,x) -> false
theory symmetric : Graph ; forall x y. E(x,y) -> E(y,x)
chain spin : C3 -rot-> C3 -rot-> C3
ladder L : spin => spin ; components [rot, rot, rot]
structure A2 : 2
structure A3 : 3
morphism inc : A2 -> A3 ; map [0, 1]
signature Grp: fun m/2, inv/1, e/0
structure Z4 : Grp ; size 4
  m = [[0,1,2,3],[1,2,3,0],[2,3,0,1],[3,0,1,2]]
  inv = [0,3,2,1]
  e = [0]
";

/// Runs the CLI in-process, returning the exit code and parsed JSON report.
fn cli_json(args: &[&str]) -> std::result::Result<(i32, Value), String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("backforth").chain(args.iter().copied()).collect();
    let code = crate::cli::run(argv, &mut out, &mut err);
    let v = serde_json::from_slice(&out)
        .map_err(|e| format!("{args:?}: unparsable report ({e}); stderr: {}", String::from_utf8_lossy(&err)))?;
    Ok((code, v))
}

struct TempDir(std::path::PathBuf);

impl TempDir {
    fn new() -> std::result::Result<TempDir, String> {
        use std::sync::atomic::{AtomicUsize, Ordering};
        static COUNTER: AtomicUsize = AtomicUsize::new(0);
        let dir = std::env::temp_dir().join(format!(
            "backforth-selftest-{}-{}",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        Ok(TempDir(dir))
    }

    fn write(&self, name: &str, text: &str) -> std::result::Result<String, String> {
        let p = self.0.join(name);
        std::fs::write(&p, text).map_err(|e| e.to_string())?;
        Ok(p.to_string_lossy().into_owned())
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn criterion_9() -> Check {
    let dir = TempDir::new()?;
    let ws_path = dir.write("ws.bf", ROUND_TRIP_WORKSPACE)?;
    let ws = crate::workspace::Workspace::parse(ROUND_TRIP_WORKSPACE).map_err(err_str)?;
    let ws_arg = ws_path.as_str();
    let mut validated = 0;

    // equivalence families fed back through `dense`
    for (l, r, mode, expect) in [
        ("C3", "D3", "emb", 0),
        ("C3", "D3", "str", 0),
        ("Z4", "Z4", "emb", 0),
        ("A2", "A3", "emb", 1),
        ("C3", "P3", "str", 1),
    ] {
        let (code, report) = cli_json(&["equiv", "--json", "--mode", mode, "--left", l, "--right", r, ws_arg])?;
        ensure(code == expect, || format!("equiv {l} {r} {mode}: exit {code}"))?;
        if code == 0 {
            let fam = dir.write(&format!("{l}-{r}-{mode}.json"), &report.to_string())?;
            let (code, again) = cli_json(&["dense", "--json", "--family", &fam, ws_arg])?;
            ensure(code == 0 && again["payload"]["dense"] == Value::Bool(true), || {
                format!("family {l}->{r} ({mode}) did not re-validate")
            })?;
            validated += 1;
        }
    }

    // a non-dense family: the reported counterexample must belong to it
    // and match an independent re-check
    let x = ws.structure("C3").map_err(err_str)?.clone();
    let y = ws.structure("D3").map_err(err_str)?.clone();
    let partial = SpanFamily::new(x.clone(), y.clone(), Mode::Emb, vec![Span::empty(&x, Mode::Emb)]).map_err(err_str)?;
    let fam = dir.write("partial.json", &partial.to_json().to_string())?;
    let (code, report) = cli_json(&["dense", "--json", "--family", &fam, "--left", "C3", "--right", "D3", ws_arg])?;
    ensure(code == 1, || format!("partial family: exit {code}"))?;
    let cex = &report["payload"]["counterexample"];
    let span = Span::from_json(&cex["span"], x.signature(), Mode::Emb).map_err(err_str)?;
    ensure(partial.contains(&span), || "counterexample span not in the family".into())?;
    let expected = check_density(&partial, &Caps::default()).map_err(err_str)?.to_json(&partial);
    ensure(expected["counterexample"] == *cex, || "counterexample differs from a direct check".into())?;
    validated += 1;

    // embedding witnesses satisfy ut = g and vt = fg
    for (name, mode, expect) in [("flip", "emb", 0), ("flip", "str", 0), ("rot", "emb", 0), ("inc", "emb", 1)] {
        let (code, report) = cli_json(&["embed", "--json", "--purity", "--mode", mode, "--morphism", name, ws_arg])?;
        ensure(code == expect, || format!("embed {name} {mode}: exit {code}"))?;
        let f = ws.morphism(name).map_err(err_str)?;
        let mode: Mode = mode.parse().map_err(err_str)?;
        for w in report["payload"]["witnesses"].as_array().into_iter().flatten() {
            let w = EmbeddingWitness::from_json(w, f.source(), mode).map_err(err_str)?;
            ensure(w.verify(f), || format!("embed {name}: witness on {:?} fails", w.test.carrier))?;
            validated += 1;
        }
    }

    // composites re-validate
    let (code, report) = cli_json(&["compose", "--json", "--left", "C3", "--middle", "D3", "--right", "C3", ws_arg])?;
    ensure(code == 0, || format!("compose: exit {code}"))?;
    let fam = dir.write("composite.json", &report.to_string())?;
    let (code, _) = cli_json(&["dense", "--json", "--family", &fam, ws_arg])?;
    ensure(code == 0, || "composite family did not re-validate".into())?;
    validated += 1;

    // transported families re-validate against the transported ends
    let (code, report) = cli_json(&[
        "transport", "--json", "--functor", "abelianization", "--left", "Z4", "--right", "Z4", ws_arg,
    ])?;
    ensure(code == 0, || format!("transport: exit {code}"))?;
    let payload = &report["payload"];
    ensure(
        payload["certificates"].as_array().is_some_and(|c| c.iter().all(certificate_passed)),
        || "transport certificate failed".into(),
    )?;
    let z4 = ws.structure("Z4").map_err(err_str)?;
    let fz = Arc::new(Abelianization.apply_structure(z4).map_err(err_str)?);
    let moved = SpanFamily::from_json(&payload["family"], fz.clone(), fz, Mode::Emb).map_err(err_str)?;
    ensure(check_density(&moved, &Caps::default()).map_err(err_str)?.is_dense(), || {
        "transported family did not re-validate".into()
    })?;
    validated += 1;

    // theory counterexamples falsify their sentence
    let (code, report) = cli_json(&["check", "--json", "--structure", "C3", "--theory", "symmetric", ws_arg])?;
    ensure(code == 1, || format!("check symmetric: exit {code}"))?;
    let cex = &report["payload"]["structures"][0]["counterexample"];
    let theory = ws.theory("symmetric").map_err(err_str)?;
    let env: Vec<usize> = cex["assignment"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|p| p[1].as_u64().map(|v| v as usize))
        .collect();
    let s = &theory.sentences[cex["sentence"].as_u64().unwrap_or(0) as usize];
    ensure(!s.holds_at(ws.structure("C3").map_err(err_str)?, &env), || {
        "theory counterexample does not falsify its sentence".into()
    })?;
    validated += 1;

    // chains, ladders and symbolic counterexamples
    for args in [
        vec!["chain", "--json", "--chain", "spin", ws_arg],
        vec!["ladder", "--json", "--ladder", "L", ws_arg],
    ] {
        let (code, report) = cli_json(&args)?;
        ensure(code == 0 && report["payload"]["report"]["hypothesis_ok"] == Value::Bool(true), || {
            format!("{}: exit {code}", args[0])
        })?;
        validated += 1;
    }
    let (code, report) = cli_json(&["setcalc", "--json", "dense", "2", "3"])?;
    ensure(code == 1, || format!("setcalc dense 2 3: exit {code}"))?;
    let d = &report["payload"]["density"];
    let (u, g) = (d["span"]["center"].as_u64(), d["test"].as_u64());
    let (Some(u), Some(g)) = (u, g) else { return fail("symbolic counterexample incomplete") };
    let (left_rest, right_rest) = (2 - u, 3 - u);
    let fails = match d["direction"].as_str() {
        Some("back") => g.min(left_rest) > right_rest,
        Some("forth") => g.min(right_rest) > left_rest,
        _ => false,
    };
    ensure(fails, || "symbolic counterexample does not fail".into())?;
    validated += 1;
    let (code, report) = cli_json(&["setcalc", "--json", "embed", "INF", "INF"])?;
    ensure(code == 0 && report["payload"]["witnesses"].is_array(), || "setcalc embed INF INF".into())?;
    validated += 1;

    Ok(format!("{validated} emitted witnesses re-validated"))
}

fn certificate_passed(c: &Value) -> bool {
    [
        "well_defined",
        "bijective",
        "preserves_functions",
        "preserves_relations",
        "reflects_relations",
    ]
    .iter()
    .all(|k| c[k] == Value::Bool(true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restricted_isomorphisms_of_bare_sets() {
        // 3! isomorphisms restricted to subsets: sum_k C(3,k)^2 k! = 34
        let b = Structure::bare(3);
        assert_eq!(restricted_isomorphisms(&b, &b, Mode::Emb).len(), 34);
        assert!(restricted_isomorphisms(&b, &Structure::bare(2), Mode::Emb).is_empty());
    }

    #[test]
    fn symbolic_grid_size() {
        // non-decreasing words of length 1..=3 over 5 tokens: 5 + 15 + 35, two tails each
        assert_eq!(symbolic_chain_grid().len(), 110);
    }

    #[test]
    fn quick_criteria_pass() {
        for id in [1, 9] {
            let r = run_criterion(id);
            assert!(r.passed, "{r}");
        }
    }
}
