//! Functors between categories of finite structures, and the two ways of
//! moving span families along them.
//!
//! Every built-in functor acts on carriers by a surjection `X → F(X)`
//! (the identity for reducts and the forgetful functor, the quotient map
//! for abelianization), which also determines its action on morphisms.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::span::{Span, SpanFamily};
use crate::structure::{Mode, Morphism, Signature, Structure};
use crate::theory::{image_factorization, Theory};

pub trait Functor: Send + Sync {
    fn name(&self) -> &str;

    /// Whether monos of the source category go to monos.
    fn preserves_monos(&self) -> bool;

    /// The object action.
    fn apply_structure(&self, x: &Structure) -> Result<Structure>;

    /// The carrier map `X → F(X)` through which morphisms act.
    fn projection(&self, x: &Structure) -> Result<Vec<usize>>;

    /// The theory whose models contain the image of the functor, when known.
    fn target_theory(&self, source: &Arc<Signature>) -> Option<Theory>;
}

/// `F(f)` for a morphism `f`.
pub fn apply_morphism(functor: &dyn Functor, f: &Morphism) -> Result<Morphism> {
    let fs = Arc::new(functor.apply_structure(f.source())?);
    let ft = Arc::new(functor.apply_structure(f.target())?);
    apply_morphism_between(functor, f, fs, ft)
}

/// `F(f)` with `F(source)` and `F(target)` already computed.
pub fn apply_morphism_between(
    functor: &dyn Functor,
    f: &Morphism,
    fs: Arc<Structure>,
    ft: Arc<Structure>,
) -> Result<Morphism> {
    let ps = functor.projection(f.source())?;
    let pt = functor.projection(f.target())?;
    let mut table = vec![usize::MAX; fs.size()];
    for (a, &qa) in ps.iter().enumerate() {
        let value = pt[f.apply(a)];
        if table[qa] != usize::MAX && table[qa] != value {
            return Err(Error::precondition(format!(
                "map does not pass to {}: it separates identified elements",
                functor.name()
            )));
        }
        table[qa] = value;
    }
    Morphism::new(fs, ft, table)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl Functor for Identity {
    fn name(&self) -> &str {
        "identity"
    }
    fn preserves_monos(&self) -> bool {
        true
    }
    fn apply_structure(&self, x: &Structure) -> Result<Structure> {
        Ok(x.clone())
    }
    fn projection(&self, x: &Structure) -> Result<Vec<usize>> {
        Ok((0..x.size()).collect())
    }
    fn target_theory(&self, source: &Arc<Signature>) -> Option<Theory> {
        Some(Theory::empty(source.clone()))
    }
}

/// Forgets every symbol not listed in `keep`.
#[derive(Clone, Debug)]
pub struct Reduct {
    pub keep: Vec<String>,
}

impl Reduct {
    pub fn new(keep: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Reduct {
            keep: keep.into_iter().map(Into::into).collect(),
        }
    }
}

impl Functor for Reduct {
    fn name(&self) -> &str {
        "reduct"
    }
    fn preserves_monos(&self) -> bool {
        true
    }
    fn apply_structure(&self, x: &Structure) -> Result<Structure> {
        let sig = x.signature();
        if let Some(name) = self
            .keep
            .iter()
            .find(|n| sig.relation_index(n).is_none() && sig.function_index(n).is_none())
        {
            return Err(Error::unknown("symbol", name.clone()));
        }
        let target = Arc::new(sig.restrict(&self.keep));
        let mut b = Structure::builder(target.clone(), x.size());
        for sym in target.relations() {
            let r = sig.relation_index(&sym.name).expect("kept relation");
            b = b.relation(&sym.name, x.relation(r).iter().cloned())?;
        }
        for sym in target.functions() {
            let f = sig.function_index(&sym.name).expect("kept function");
            b = b.function(&sym.name, x.function_table(f).to_vec())?;
        }
        b.build()
    }
    fn projection(&self, x: &Structure) -> Result<Vec<usize>> {
        Ok((0..x.size()).collect())
    }
    fn target_theory(&self, source: &Arc<Signature>) -> Option<Theory> {
        Some(Theory::empty(Arc::new(source.restrict(&self.keep))))
    }
}

/// Forgets all structure.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnderlyingSet;

impl Functor for UnderlyingSet {
    fn name(&self) -> &str {
        "uset"
    }
    fn preserves_monos(&self) -> bool {
        true
    }
    fn apply_structure(&self, x: &Structure) -> Result<Structure> {
        Ok(Structure::bare(x.size()))
    }
    fn projection(&self, x: &Structure) -> Result<Vec<usize>> {
        Ok((0..x.size()).collect())
    }
    fn target_theory(&self, _: &Arc<Signature>) -> Option<Theory> {
        Some(Theory::empty(Arc::new(Signature::new())))
    }
}

/// `G ↦ G/[G,G]` on finite groups over `m/2, inv/1, e/0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Abelianization;

impl Abelianization {
    /// Class of each element under the least congruence identifying every
    /// `xy` with `yx`; classes numbered by their least element.
    pub fn classes(g: &Structure) -> Result<Vec<usize>> {
        if **g.signature() != Signature::group() {
            return Err(Error::precondition("abelianization needs a structure over m/2, inv/1, e/0"));
        }
        if let Some(c) = Theory::groups().satisfies(g)? {
            return Err(Error::precondition(format!("not a group: {c}")));
        }
        let n = g.size();
        let m = |a: usize, b: usize| g.apply(0, &[a, b]);
        let inv = |a: usize| g.apply(1, &[a]);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        fn union(p: &mut [usize], a: usize, b: usize) -> bool {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra == rb {
                return false;
            }
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            p[hi] = lo;
            true
        }
        for a in 0..n {
            for b in 0..n {
                union(&mut parent, m(a, b), m(b, a));
            }
        }
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if a == b || find(&mut parent, a) != find(&mut parent, b) {
                        continue;
                    }
                    changed |= union(&mut parent, inv(a), inv(b));
                    for c in 0..n {
                        changed |= union(&mut parent, m(a, c), m(b, c));
                        changed |= union(&mut parent, m(c, a), m(c, b));
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let roots: Vec<usize> = (0..n).map(|a| find(&mut parent, a)).collect();
        let mut reps: Vec<usize> = roots.clone();
        reps.sort_unstable();
        reps.dedup();
        Ok(roots.iter().map(|r| reps.binary_search(r).expect("root listed")).collect())
    }
}

impl Functor for Abelianization {
    fn name(&self) -> &str {
        "abelianization"
    }
    fn preserves_monos(&self) -> bool {
        false
    }
    fn apply_structure(&self, g: &Structure) -> Result<Structure> {
        let class = Abelianization::classes(g)?;
        let k = class.iter().max().map_or(0, |&c| c + 1);
        let mut rep = vec![usize::MAX; k];
        for (a, &c) in class.iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = a;
            }
        }
        let table: Vec<usize> = (0..k * k).map(|i| class[g.apply(0, &[rep[i / k], rep[i % k]])]).collect();
        let inverse: Vec<usize> = (0..k).map(|c| class[g.apply(1, &[rep[c]])]).collect();
        let unit = class[g.apply(2, &[])];
        Structure::builder(Arc::new(Signature::group()), k)
            .function("m", table)?
            .function("inv", inverse)?
            .function("e", vec![unit])?
            .build()
    }
    fn projection(&self, g: &Structure) -> Result<Vec<usize>> {
        Abelianization::classes(g)
    }
    fn target_theory(&self, _: &Arc<Signature>) -> Option<Theory> {
        Some(Theory::abelian_groups())
    }
}

/// A built-in functor by CLI name: `identity`, `reduct` (keeping `keep`),
/// `uset`, `abelianization`.
pub fn builtin(name: &str, keep: &[String]) -> Result<Box<dyn Functor>> {
    Ok(match name {
        "identity" => Box::new(Identity),
        "reduct" => Box::new(Reduct::new(keep.iter().cloned())),
        "uset" => Box::new(UnderlyingSet),
        "abelianization" => Box::new(Abelianization),
        other => return Err(Error::unknown("functor", other)),
    })
}

/// Moves each span `X ↢ U ↣ Y` to `F(X) ↢ F(U) ↣ F(Y)`. Needs a functor
/// that preserves monos; the result stays in the family's mode.
pub fn transport_direct(functor: &dyn Functor, family: &SpanFamily) -> Result<SpanFamily> {
    if !functor.preserves_monos() {
        return Err(Error::precondition(format!(
            "{} does not preserve monos; use the image route",
            functor.name()
        )));
    }
    let (x, y) = (family.left(), family.right());
    let fx = Arc::new(functor.apply_structure(x)?);
    let fy = Arc::new(functor.apply_structure(y)?);
    let mode = family.mode();
    let spans = family
        .spans()
        .par_iter()
        .map(|s| {
            let (center, left, right) = s.legs(x, y)?;
            let fu = Arc::new(functor.apply_structure(&center)?);
            let fl = apply_morphism_between(functor, &left, fu.clone(), fx.clone())?;
            let fr = apply_morphism_between(functor, &right, fu.clone(), fy.clone())?;
            canonical_span(&fu, &fl, &fr, mode)
        })
        .collect::<Result<Vec<_>>>()?;
    SpanFamily::new(fx, fy, mode, spans)
}

/// The canonical span of two monos out of a common center.
fn canonical_span(center: &Structure, left: &Morphism, right: &Morphism, mode: Mode) -> Result<Span> {
    if !(left.is_injective() && right.is_injective()) {
        return Err(Error::TheoremViolation("a mono-preserving functor produced a non-injective leg".into()));
    }
    let mut pairs: Vec<(usize, usize)> = (0..center.size()).map(|z| (left.apply(z), right.apply(z))).collect();
    pairs.sort_unstable();
    let relations = (mode == Mode::Str).then(|| {
        center
            .relations()
            .iter()
            .map(|rel| rel.iter().map(|t| t.iter().map(|&z| left.apply(z)).collect()).collect())
            .collect()
    });
    Ok(Span {
        domain: pairs.iter().map(|p| p.0).collect(),
        map: pairs.iter().map(|p| p.1).collect(),
        relations,
    })
}

/// Record of the comparison map between the two image factorizations of
/// one transported span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImageCertificate {
    /// The span's domain in the input family.
    pub domain: Vec<usize>,
    /// Image of `F(u)` in `F(X)`.
    pub left_image: Vec<usize>,
    /// Image of `F(v)` in `F(Y)`.
    pub right_image: Vec<usize>,
    /// `w` as a map `left_image → right_image`, by position.
    pub comparison: Vec<usize>,
    pub well_defined: bool,
    pub bijective: bool,
    pub preserves_functions: bool,
    pub preserves_relations: bool,
    pub reflects_relations: bool,
}

impl ImageCertificate {
    pub fn passed(&self) -> bool {
        self.well_defined
            && self.bijective
            && self.preserves_functions
            && self.preserves_relations
            && self.reflects_relations
    }
}

/// Output of [`transport_image`].
#[derive(Clone, Debug)]
pub struct ImageTransport {
    pub family: SpanFamily,
    pub certificates: Vec<ImageCertificate>,
}

/// Image-factorizes both legs of one span after applying the functor and
/// certifies the comparison map `w(F(u)(z)) = F(v)(z)`.
pub fn certify_span(
    functor: &dyn Functor,
    theory: &Theory,
    x: &Arc<Structure>,
    y: &Arc<Structure>,
    fx: &Arc<Structure>,
    fy: &Arc<Structure>,
    span: &Span,
) -> Result<(ImageCertificate, Option<Span>)> {
    let (center, left, right) = span.legs(x, y)?;
    let fu = Arc::new(functor.apply_structure(&center)?);
    let fl = apply_morphism_between(functor, &left, fu.clone(), fx.clone())?;
    let fr = apply_morphism_between(functor, &right, fu.clone(), fy.clone())?;
    let u0 = image_factorization(&fl, theory)?;
    let u1 = image_factorization(&fr, theory)?;
    let mut w = vec![usize::MAX; u0.image.size()];
    let mut well_defined = true;
    for z in 0..fu.size() {
        let (i, j) = (u0.surjection.apply(z), u1.surjection.apply(z));
        if w[i] != usize::MAX && w[i] != j {
            well_defined = false;
        }
        w[i] = j;
    }
    let mut cert = ImageCertificate {
        domain: span.domain.clone(),
        left_image: u0.carrier.clone(),
        right_image: u1.carrier.clone(),
        comparison: w.clone(),
        well_defined,
        bijective: false,
        preserves_functions: false,
        preserves_relations: false,
        reflects_relations: false,
    };
    if !well_defined {
        return Ok((cert, None));
    }
    let w = Morphism::new(u0.image.clone(), u1.image.clone(), w)?;
    cert.bijective = w.is_injective() && w.is_surjective();
    cert.preserves_functions = w.preserves_functions();
    cert.preserves_relations = w.preserves_relations();
    cert.reflects_relations = w.reflects_relations();
    let out = cert.passed().then(|| Span {
        domain: u0.carrier.clone(),
        map: (0..u0.carrier.len()).map(|i| u1.carrier[w.apply(i)]).collect(),
        relations: None,
    });
    Ok((cert, out))
}

/// Moves a family along any functor landing in models of a universal
/// theory: each span becomes `F(X) ↢ W ↣ F(Y)` where `W` is the image of
/// `F(U)` on either side, the two images identified by the certified
/// comparison map. The result is an `Emb`-mode family.
///
/// `theory` defaults to the functor's target theory.
pub fn transport_image(functor: &dyn Functor, family: &SpanFamily, theory: Option<&Theory>) -> Result<ImageTransport> {
    let (x, y) = (family.left(), family.right());
    let default_theory;
    let theory = match theory {
        Some(t) => t,
        None => {
            default_theory = functor.target_theory(x.signature()).ok_or_else(|| {
                Error::precondition(format!("{} carries no target theory", functor.name()))
            })?;
            &default_theory
        }
    };
    let fx = Arc::new(functor.apply_structure(x)?);
    let fy = Arc::new(functor.apply_structure(y)?);
    if theory.signature != *fx.signature() {
        return Err(Error::SignatureMismatch(format!(
            "theory `{}` is not over the functor's target signature",
            theory.name
        )));
    }
    let results = family
        .spans()
        .par_iter()
        .map(|s| certify_span(functor, theory, x, y, &fx, &fy, s))
        .collect::<Result<Vec<_>>>()?;
    let mut certificates = Vec::with_capacity(results.len());
    let mut spans = Vec::with_capacity(results.len());
    for (cert, span) in results {
        match span {
            Some(s) => spans.push(s),
            None => {
                return Err(Error::TheoremViolation(format!(
                    "comparison map for the span on {:?} is not an isomorphism of images: {cert:?}",
                    cert.domain
                )))
            }
        }
        certificates.push(cert);
    }
    let family = SpanFamily::new(fx, fy, Mode::Emb, spans)?;
    Ok(ImageTransport { family, certificates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::groups;
    use crate::span::{check_density, greatest_dense_family};
    use crate::structure::iso_oracle;

    fn arc(s: Structure) -> Arc<Structure> {
        Arc::new(s)
    }

    #[test]
    fn abelianization_examples() {
        let z4 = arc(groups::cyclic(4));
        let a = arc(Abelianization.apply_structure(&z4).unwrap());
        assert!(iso_oracle(&z4, &a).is_some());
        let s3 = groups::symmetric3();
        let a = arc(Abelianization.apply_structure(&s3).unwrap());
        assert!(iso_oracle(&a, &arc(groups::cyclic(2))).is_some());
        // commutator subgroup of S3 is A3: the even permutations
        let classes = Abelianization::classes(&s3).unwrap();
        assert_eq!(classes.iter().filter(|&&c| c == classes[0]).count(), 3);
        let q8 = groups::quaternion();
        assert_eq!(Abelianization.apply_structure(&q8).unwrap().size(), 4);
    }

    #[test]
    fn reduct_drops_symbols() {
        let sig = Arc::new(Signature::from_symbols(&[("E", 2), ("Red", 1)], &[]).unwrap());
        let x = Structure::builder(sig, 3)
            .relation("E", [vec![0, 1]])
            .unwrap()
            .relation("Red", [vec![2]])
            .unwrap()
            .build()
            .unwrap();
        let r = Reduct::new(["E"]).apply_structure(&x).unwrap();
        assert_eq!(r, Structure::digraph(3, &[(0, 1)]).unwrap());
        assert!(Reduct::new(["Blue"]).apply_structure(&x).is_err());
    }

    #[test]
    fn morphism_action_is_functorial() {
        let s3 = arc(groups::symmetric3());
        let id = Morphism::identity(s3.clone());
        let fid = apply_morphism(&Abelianization, &id).unwrap();
        assert_eq!(fid.map(), &[0, 1]);
        // conjugation by an element is an automorphism
        let g = 1;
        let conj: Vec<usize> = (0..6)
            .map(|x| s3.apply(0, &[s3.apply(0, &[g, x]), s3.apply(1, &[g])]))
            .collect();
        let c = Morphism::new(s3.clone(), s3.clone(), conj).unwrap();
        let cc = c.then(&c).unwrap();
        let lhs = apply_morphism(&Abelianization, &cc).unwrap();
        let rhs = apply_morphism(&Abelianization, &c).unwrap().then(&apply_morphism(&Abelianization, &c).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn direct_transport_of_identity_is_unchanged() {
        let caps = Caps::default();
        let x = arc(Structure::digraph(3, &[(0, 1), (1, 2)]).unwrap());
        let fam = greatest_dense_family(&x, &x, Mode::Str, &caps).unwrap();
        assert_eq!(transport_direct(&Identity, &fam).unwrap(), fam);
        assert!(transport_direct(&Abelianization, &fam).is_err());
    }

    #[test]
    fn underlying_sets_of_isomorphic_groups() {
        let caps = Caps::default();
        let v = arc(groups::klein());
        let w = arc(v.permuted(&[0, 2, 3, 1]).unwrap());
        let fam = greatest_dense_family(&v, &w, Mode::Emb, &caps).unwrap();
        let moved = transport_direct(&UnderlyingSet, &fam).unwrap();
        assert!(check_density(&moved, &caps).unwrap().is_dense());
    }

    #[test]
    fn image_route_through_abelianization() {
        let caps = Caps::default();
        let s3 = arc(groups::symmetric3());
        let fam = greatest_dense_family(&s3, &s3, Mode::Emb, &caps).unwrap();
        let out = transport_image(&Abelianization, &fam, None).unwrap();
        assert!(out.certificates.iter().all(ImageCertificate::passed));
        assert_eq!(out.family.left().size(), 2);
        assert!(check_density(&out.family, &caps).unwrap().is_dense());
    }

    #[test]
    fn image_route_with_identity_gives_partial_isomorphisms() {
        let caps = Caps::default();
        let x = arc(Structure::digraph(3, &[(0, 1), (1, 2)]).unwrap());
        let fam = greatest_dense_family(&x, &x, Mode::Str, &caps).unwrap();
        let out = transport_image(&Identity, &fam, None).unwrap();
        let emb = greatest_dense_family(&x, &x, Mode::Emb, &caps).unwrap();
        assert_eq!(out.family, emb);
        let single = SpanFamily::new(x.clone(), x.clone(), Mode::Emb, [Span::identity(&x, Mode::Emb)]).unwrap();
        let out = transport_image(&Identity, &single, None).unwrap();
        assert_eq!(out.family, single);
    }
}
