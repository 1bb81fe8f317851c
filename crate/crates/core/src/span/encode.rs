//! Bit-level encodings of spans and test objects for the density checks.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::Span;
use crate::structure::{elements_of, mask_of, table_index, ElementMask, Structure, TestObject};

const UNASSIGNED: usize = usize::MAX;

/// Numbers every potential relation tuple of a structure.
pub(crate) struct TupleIndex {
    n: usize,
    offsets: Vec<usize>,
    total: usize,
}

impl TupleIndex {
    pub(crate) fn new(s: &Structure) -> Self {
        let n = s.size();
        let mut offsets = Vec::new();
        let mut total = 0;
        for sym in s.signature().relations() {
            offsets.push(total);
            total += n.pow(sym.arity as u32);
        }
        TupleIndex { n, offsets, total }
    }

    pub(crate) fn encode(&self, rels: &[BTreeSet<Vec<usize>>]) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.total);
        for (r, rel) in rels.iter().enumerate() {
            for t in rel {
                bits.insert(self.offsets[r] + table_index(self.n, t));
            }
        }
        bits
    }
}

/// A span as masks, a full-length table and relation bitsets on both sides.
pub(crate) struct EncodedSpan {
    pub dom: ElementMask,
    pub img: ElementMask,
    pub table: Vec<usize>,
    pub rx: FixedBitSet,
    pub ry: FixedBitSet,
}

impl EncodedSpan {
    pub(crate) fn new(s: &Span, x_size: usize, ix: &TupleIndex, iy: &TupleIndex) -> Self {
        let mut table = vec![UNASSIGNED; x_size];
        for (&a, &b) in s.domain.iter().zip(&s.map) {
            table[a] = b;
        }
        let (rx, ry) = match &s.relations {
            Some(rels) => {
                let image: Vec<BTreeSet<Vec<usize>>> = rels
                    .iter()
                    .map(|rel| rel.iter().map(|t| t.iter().map(|&a| table[a]).collect()).collect())
                    .collect();
                (ix.encode(rels), iy.encode(&image))
            }
            None => (FixedBitSet::new(), FixedBitSet::new()),
        };
        EncodedSpan {
            dom: s.domain_mask(),
            img: s.image_mask(),
            table,
            rx,
            ry,
        }
    }

    /// `self ⊇ smaller` as spans.
    pub(crate) fn extends(&self, smaller: &EncodedSpan) -> bool {
        smaller.dom & !self.dom == 0
            && elements_of(smaller.dom).into_iter().all(|a| self.table[a] == smaller.table[a])
            && smaller.rx.is_subset(&self.rx)
    }
}

/// A test object as a carrier mask and a relation bitset.
pub(crate) struct EncodedTest {
    pub mask: ElementMask,
    pub rels: FixedBitSet,
}

impl EncodedTest {
    pub(crate) fn new(t: &TestObject, index: &TupleIndex) -> Self {
        EncodedTest {
            mask: mask_of(t.carrier.iter().copied()),
            rels: t.relations.as_ref().map_or_else(FixedBitSet::new, |r| index.encode(r)),
        }
    }
}
