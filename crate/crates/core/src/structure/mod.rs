//! Signatures, finite structures and morphisms between them.
//!
//! Structures have the canonical carrier `0..n`. Relations are stored as
//! sets of tuples; functions as total row-major tables (`f(a0,..,ak-1)`
//! lives at index `a0*n^(k-1) + .. + ak-1`). Arity-0 functions are
//! constants with a single-entry table.

mod iso;
mod morphism;
pub(crate) mod subobject;

pub use iso::{all_isomorphisms, iso_oracle};
pub(crate) use iso::{search_maps, MapKind};
pub use morphism::{Morphism, MorphismClass};
pub use subobject::{enumerate_test_objects, generated_substructure, Substructure, TestObject};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::caps::MAX_ELEMENTS;
use crate::error::{Error, Result};

/// Element subsets of a carrier, one bit per element.
pub type ElementMask = u64;

pub(crate) fn mask_of(elements: impl IntoIterator<Item = usize>) -> ElementMask {
    elements.into_iter().fold(0, |m, e| m | (1u64 << e))
}

pub(crate) fn elements_of(mask: ElementMask) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let e = m.trailing_zeros() as usize;
        out.push(e);
        m &= m - 1;
    }
    out
}

pub(crate) fn full_mask(n: usize) -> ElementMask {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Which category the engine works in.
///
/// `Emb`: morphisms are embeddings. `Str`: morphisms are homomorphisms and
/// the monos are the injective homomorphisms; only relational signatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Emb,
    Str,
}

impl Mode {
    pub fn check_signature(self, sig: &Signature) -> Result<()> {
        if self == Mode::Str && !sig.is_relational() {
            return Err(Error::UnsupportedMode(
                "str mode requires a purely relational signature".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Emb => f.write_str("emb"),
            Mode::Str => f.write_str("str"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "emb" | "EMB" => Ok(Mode::Emb),
            "str" | "STR" => Ok(Mode::Str),
            other => Err(Error::invalid(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// A single-sorted signature of relation and function symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    relations: Vec<Symbol>,
    functions: Vec<Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_symbols(relations: &[(&str, usize)], functions: &[(&str, usize)]) -> Result<Self> {
        let mut sig = Signature::new();
        for &(name, arity) in relations {
            sig.add_relation(name, arity)?;
        }
        for &(name, arity) in functions {
            sig.add_function(name, arity)?;
        }
        Ok(sig)
    }

    /// `m/2, inv/1, e/0`.
    pub fn group() -> Self {
        Signature::from_symbols(&[], &[("m", 2), ("inv", 1), ("e", 0)]).expect("static signature")
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if self.relations.iter().chain(&self.functions).any(|s| s.name == name) {
            return Err(Error::invalid(format!("duplicate symbol `{name}`")));
        }
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<()> {
        self.check_fresh(name)?;
        if arity == 0 {
            return Err(Error::invalid(format!("relation `{name}` must have arity >= 1")));
        }
        self.relations.push(Symbol {
            name: name.to_string(),
            arity,
        });
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<()> {
        self.check_fresh(name)?;
        self.functions.push(Symbol {
            name: name.to_string(),
            arity,
        });
        Ok(())
    }

    pub fn relations(&self) -> &[Symbol] {
        &self.relations
    }

    pub fn functions(&self) -> &[Symbol] {
        &self.functions
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|s| s.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|s| s.name == name)
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.relations
            .iter()
            .chain(&self.functions)
            .map(|s| s.arity)
            .max()
            .unwrap_or(0)
    }

    /// The signature keeping only the named symbols.
    pub fn restrict(&self, keep: &[String]) -> Signature {
        Signature {
            relations: self.relations.iter().filter(|s| keep.contains(&s.name)).cloned().collect(),
            functions: self.functions.iter().filter(|s| keep.contains(&s.name)).cloned().collect(),
        }
    }
}

/// A finite structure over a signature with carrier `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Structure {
    signature: Arc<Signature>,
    size: usize,
    relations: Vec<BTreeSet<Vec<usize>>>,
    functions: Vec<Vec<usize>>,
}

impl Structure {
    pub fn builder(signature: Arc<Signature>, size: usize) -> StructureBuilder {
        StructureBuilder::new(signature, size)
    }

    /// A set with no structure.
    pub fn bare(size: usize) -> Structure {
        Structure::builder(Arc::new(Signature::new()), size)
            .build()
            .expect("bare set")
    }

    /// A digraph over the signature `E/2`.
    pub fn digraph(size: usize, edges: &[(usize, usize)]) -> Result<Structure> {
        let sig = Arc::new(Signature::from_symbols(&[("E", 2)], &[])?);
        Structure::builder(sig, size)
            .relation("E", edges.iter().map(|&(a, b)| vec![a, b]))?
            .build()
    }

    /// A group from its multiplication table over [`Signature::group`].
    pub fn group(size: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Structure> {
        let table: Vec<usize> = (0..size * size).map(|i| mul(i / size, i % size)).collect();
        let identity = (0..size)
            .find(|&e| (0..size).all(|x| table[e * size + x] == x && table[x * size + e] == x))
            .ok_or_else(|| Error::invalid("multiplication table has no identity"))?;
        let inverse: Vec<usize> = (0..size)
            .map(|x| {
                (0..size)
                    .find(|&y| table[x * size + y] == identity)
                    .ok_or_else(|| Error::invalid(format!("element {x} has no inverse")))
            })
            .collect::<Result<_>>()?;
        Structure::builder(Arc::new(Signature::group()), size)
            .function("m", table)?
            .function("inv", inverse)?
            .function("e", vec![identity])?
            .build()
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn full_mask(&self) -> ElementMask {
        full_mask(self.size)
    }

    pub fn relation(&self, index: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[index]
    }

    pub fn relations(&self) -> &[BTreeSet<Vec<usize>>] {
        &self.relations
    }

    pub fn function_table(&self, index: usize) -> &[usize] {
        &self.functions[index]
    }

    pub fn holds(&self, relation: usize, tuple: &[usize]) -> bool {
        self.relations[relation].contains(tuple)
    }

    pub fn apply(&self, function: usize, args: &[usize]) -> usize {
        self.functions[function][table_index(self.size, args)]
    }

    /// Smallest superset of `seed` closed under every function symbol
    /// (constants included).
    pub fn closure(&self, seed: ElementMask) -> ElementMask {
        let mut current = seed;
        loop {
            let mut next = current;
            for (f, sym) in self.signature.functions.iter().enumerate() {
                let elems = elements_of(current);
                for args in tuples(&elems, sym.arity) {
                    next |= 1u64 << self.apply(f, &args);
                }
            }
            if next == current {
                return current;
            }
            current = next;
        }
    }

    pub fn is_closed(&self, mask: ElementMask) -> bool {
        self.closure(mask) == mask
    }

    /// Every subset closed under the function symbols, in ascending mask order.
    pub fn closed_masks(&self) -> Vec<ElementMask> {
        if self.signature.is_relational() {
            return (0..=full_mask(self.size)).collect();
        }
        (0..=full_mask(self.size)).filter(|&m| self.is_closed(m)).collect()
    }

    /// Relation tuples lying entirely inside `mask`, per relation symbol.
    pub fn induced_relations(&self, mask: ElementMask) -> Vec<BTreeSet<Vec<usize>>> {
        self.relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter(|t| t.iter().all(|&e| mask & (1u64 << e) != 0))
                    .cloned()
                    .collect()
            })
            .collect()
    }

    /// The substructure on a closed subset, relabelled `0..k` in ascending
    /// element order. Returns the structure and the carrier list.
    pub fn induced(&self, mask: ElementMask) -> Result<(Structure, Vec<usize>)> {
        if !self.is_closed(mask) {
            return Err(Error::precondition("subset is not closed under the function symbols"));
        }
        let relations = self.induced_relations(mask);
        Ok(self.relabel_subset(mask, relations))
    }

    /// Substructure on `mask` with explicitly chosen relation tuples (given in
    /// this structure's element names). Functions are restricted; `mask` must be
    /// closed.
    pub(crate) fn relabel_subset(
        &self,
        mask: ElementMask,
        relations: Vec<BTreeSet<Vec<usize>>>,
    ) -> (Structure, Vec<usize>) {
        let carrier = elements_of(mask);
        let mut position = vec![usize::MAX; self.size];
        for (i, &e) in carrier.iter().enumerate() {
            position[e] = i;
        }
        let k = carrier.len();
        let relations = relations
            .into_iter()
            .map(|rel| {
                rel.into_iter()
                    .map(|t| t.iter().map(|&e| position[e]).collect())
                    .collect()
            })
            .collect();
        let functions = self
            .signature
            .functions
            .iter()
            .enumerate()
            .map(|(f, sym)| {
                tuples(&carrier, sym.arity)
                    .map(|args| position[self.apply(f, &args)])
                    .collect()
            })
            .collect();
        (
            Structure {
                signature: self.signature.clone(),
                size: k,
                relations,
                functions,
            },
            carrier,
        )
    }

    /// Carrier permuted by `perm` (element `i` becomes `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Structure> {
        if perm.len() != self.size || mask_of(perm.iter().copied()) != self.full_mask() {
            return Err(Error::invalid("not a permutation of the carrier"));
        }
        let relations = self
            .relations
            .iter()
            .map(|rel| rel.iter().map(|t| t.iter().map(|&e| perm[e]).collect()).collect())
            .collect();
        let mut inverse = vec![0; self.size];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let functions = self
            .signature
            .functions
            .iter()
            .enumerate()
            .map(|(f, sym)| {
                let all: Vec<usize> = (0..self.size).collect();
                tuples(&all, sym.arity)
                    .map(|args| {
                        let pre: Vec<usize> = args.iter().map(|&a| inverse[a]).collect();
                        perm[self.apply(f, &pre)]
                    })
                    .collect()
            })
            .collect();
        Ok(Structure {
            signature: self.signature.clone(),
            size: self.size,
            relations,
            functions,
        })
    }

    /// Total number of relation tuples.
    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }
}

pub(crate) fn table_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

/// All `arity`-tuples over `elems` in lexicographic order.
pub(crate) fn tuples(elems: &[usize], arity: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let k = elems.len();
    let total = if arity == 0 {
        1
    } else if k == 0 {
        0
    } else {
        k.pow(arity as u32)
    };
    (0..total).map(move |mut idx| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = elems[idx % k];
            idx /= k;
        }
        t
    })
}

/// Incremental construction with validation of carrier bounds and totality.
pub struct StructureBuilder {
    signature: Arc<Signature>,
    size: usize,
    relations: Vec<BTreeSet<Vec<usize>>>,
    functions: Vec<Option<Vec<usize>>>,
}

impl StructureBuilder {
    pub fn new(signature: Arc<Signature>, size: usize) -> Self {
        let relations = vec![BTreeSet::new(); signature.relations.len()];
        let functions = vec![None; signature.functions.len()];
        StructureBuilder {
            signature,
            size,
            relations,
            functions,
        }
    }

    pub fn relation(
        mut self,
        name: &str,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self> {
        let idx = self
            .signature
            .relation_index(name)
            .ok_or_else(|| Error::unknown("relation", name))?;
        let arity = self.signature.relations[idx].arity;
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::invalid(format!(
                    "relation `{name}` has arity {arity}, got tuple of length {}",
                    t.len()
                )));
            }
            if let Some(&bad) = t.iter().find(|&&e| e >= self.size) {
                return Err(Error::invalid(format!(
                    "tuple element {bad} outside carrier 0..{}",
                    self.size
                )));
            }
            set.insert(t);
        }
        self.relations[idx] = set;
        Ok(self)
    }

    pub fn function(mut self, name: &str, table: Vec<usize>) -> Result<Self> {
        let idx = self
            .signature
            .function_index(name)
            .ok_or_else(|| Error::unknown("function", name))?;
        let arity = self.signature.functions[idx].arity;
        let expected = self.size.pow(arity as u32);
        if table.len() != expected {
            return Err(Error::invalid(format!(
                "function `{name}` table has {} entries, expected {expected} (not total)",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&e| e >= self.size) {
            return Err(Error::invalid(format!(
                "function `{name}` value {bad} outside carrier 0..{}",
                self.size
            )));
        }
        self.functions[idx] = Some(table);
        Ok(self)
    }

    pub fn function_fn(self, name: &str, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let idx = self
            .signature
            .function_index(name)
            .ok_or_else(|| Error::unknown("function", name))?;
        let arity = self.signature.functions[idx].arity;
        let all: Vec<usize> = (0..self.size).collect();
        let table = tuples(&all, arity).map(|args| f(&args)).collect();
        self.function(name, table)
    }

    pub fn build(self) -> Result<Structure> {
        if self.size > MAX_ELEMENTS {
            return Err(Error::CapExceeded {
                what: "carrier size",
                limit: MAX_ELEMENTS,
                actual: self.size,
            });
        }
        let functions = self
            .functions
            .into_iter()
            .zip(&self.signature.functions)
            .map(|(t, sym)| {
                t.ok_or_else(|| {
                    Error::invalid(format!("function `{}` has no table (not total)", sym.name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if self.size == 0 && self.signature.functions.iter().any(|s| s.arity == 0) {
            return Err(Error::invalid("a structure with constants cannot be empty"));
        }
        Ok(Structure {
            signature: self.signature,
            size: self.size,
            relations: self.relations,
            functions,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn z4_additive() -> Structure {
        let sig = Arc::new(Signature::from_symbols(&[], &[("add", 2), ("zero", 0), ("neg", 1)]).unwrap());
        Structure::builder(sig, 4)
            .function_fn("add", |a| (a[0] + a[1]) % 4)
            .unwrap()
            .function("zero", vec![0])
            .unwrap()
            .function_fn("neg", |a| (4 - a[0]) % 4)
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn closure_in_z4() {
        let z4 = z4_additive();
        assert_eq!(elements_of(z4.closure(mask_of([1]))), vec![0, 1, 2, 3]);
        assert_eq!(elements_of(z4.closure(mask_of([2]))), vec![0, 2]);
        assert_eq!(elements_of(z4.closure(0)), vec![0]);
    }

    #[test]
    fn relational_closure_is_identity() {
        let g = Structure::digraph(3, &[(0, 1)]).unwrap();
        assert_eq!(g.closure(mask_of([2])), mask_of([2]));
        assert_eq!(g.closed_masks().len(), 8);
    }

    #[test]
    fn builder_rejects_out_of_carrier_tuple() {
        let err = Structure::digraph(2, &[(0, 2)]).unwrap_err();
        assert!(err.to_string().contains("outside carrier"), "{err}");
    }

    #[test]
    fn builder_rejects_partial_table() {
        let sig = Arc::new(Signature::from_symbols(&[], &[("f", 1)]).unwrap());
        assert!(Structure::builder(sig.clone(), 2).build().is_err());
        assert!(Structure::builder(sig, 2).function("f", vec![0]).is_err());
    }

    #[test]
    fn group_constructor_finds_identity_and_inverses() {
        let z3 = Structure::group(3, |a, b| (a + b) % 3).unwrap();
        assert_eq!(z3.function_table(2), &[0]);
        assert_eq!(z3.function_table(1), &[0, 2, 1]);
    }

    #[test]
    fn tuple_enumeration_order() {
        let t: Vec<_> = tuples(&[3, 5], 2).collect();
        assert_eq!(t, vec![vec![3, 3], vec![3, 5], vec![5, 3], vec![5, 5]]);
        assert_eq!(tuples(&[], 0).count(), 1);
        assert_eq!(tuples(&[], 2).count(), 0);
    }

    #[test]
    fn permutation_preserves_tables() {
        let z4 = z4_additive();
        let p = z4.permuted(&[2, 3, 0, 1]).unwrap();
        // zero moved to 2
        assert_eq!(p.function_table(1), &[2]);
        assert_eq!(p.apply(0, &[3, 3]), 0); // 1 + 1 = 2 -> labelled 0
    }
}
