//! Small finite groups as structures over `m/2, inv/1, e/0`.

use std::collections::BTreeSet;

use crate::structure::Structure;

pub fn cyclic(n: usize) -> Structure {
    Structure::group(n, |a, b| (a + b) % n).expect("cyclic group")
}

/// Direct product; element `(a, b)` is `a * |h| + b`.
pub fn product(g: &Structure, h: &Structure) -> Structure {
    let (ng, nh) = (g.size(), h.size());
    Structure::group(ng * nh, |x, y| {
        g.apply(0, &[x / nh, y / nh]) * nh + h.apply(0, &[x % nh, y % nh])
    })
    .expect("product of groups")
}

/// The group generated by the given permutations under composition,
/// elements sorted lexicographically (so the identity is element 0).
pub fn permutation_group(generators: &[Vec<usize>]) -> Structure {
    let degree = generators.first().map_or(0, Vec::len);
    let identity: Vec<usize> = (0..degree).collect();
    let mut elements: BTreeSet<Vec<usize>> = BTreeSet::from([identity]);
    loop {
        let mut grown = elements.clone();
        for p in &elements {
            for g in generators {
                grown.insert(compose(p, g));
            }
        }
        if grown.len() == elements.len() {
            break;
        }
        elements = grown;
    }
    let list: Vec<Vec<usize>> = elements.into_iter().collect();
    let index = |p: &Vec<usize>| list.iter().position(|q| q == p).expect("closed under composition");
    Structure::group(list.len(), |a, b| index(&compose(&list[a], &list[b]))).expect("permutation group")
}

/// `(p ∘ q)(i) = p(q(i))`.
fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

pub fn symmetric3() -> Structure {
    permutation_group(&[vec![1, 0, 2], vec![1, 2, 0]])
}

pub fn dihedral4() -> Structure {
    permutation_group(&[vec![1, 2, 3, 0], vec![0, 3, 2, 1]])
}

pub fn klein() -> Structure {
    product(&cyclic(2), &cyclic(2))
}

/// Quaternion group; element `4*s + u` is `(-1)^s` times unit `u` of `1, i, j, k`.
pub fn quaternion() -> Structure {
    // unit products as (sign, unit)
    const TABLE: [[(usize, usize); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    Structure::group(8, |a, b| {
        let (s, u) = TABLE[a % 4][b % 4];
        ((s + a / 4 + b / 4) % 2) * 4 + u
    })
    .expect("quaternion group")
}

/// One representative of every isomorphism class of groups of order ≤ 8.
pub fn small_groups() -> Vec<(&'static str, Structure)> {
    vec![
        ("Z1", cyclic(1)),
        ("Z2", cyclic(2)),
        ("Z3", cyclic(3)),
        ("Z4", cyclic(4)),
        ("Z2xZ2", klein()),
        ("Z5", cyclic(5)),
        ("Z6", cyclic(6)),
        ("S3", symmetric3()),
        ("Z7", cyclic(7)),
        ("Z8", cyclic(8)),
        ("Z4xZ2", product(&cyclic(4), &cyclic(2))),
        ("Z2xZ2xZ2", product(&klein(), &cyclic(2))),
        ("D4", dihedral4()),
        ("Q8", quaternion()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::Theory;
    use std::sync::Arc;

    #[test]
    fn all_small_groups_satisfy_group_axioms() {
        let t = Theory::groups();
        for (name, g) in small_groups() {
            assert!(t.is_model(&g).unwrap(), "{name}");
        }
    }

    #[test]
    fn orders_and_commutativity() {
        let ab = Theory::abelian_groups();
        let expected = [
            ("S3", 6, false),
            ("D4", 8, false),
            ("Q8", 8, false),
            ("Z4xZ2", 8, true),
        ];
        let groups = small_groups();
        for (name, order, abelian) in expected {
            let g = &groups.iter().find(|(n, _)| *n == name).unwrap().1;
            assert_eq!(g.size(), order, "{name}");
            assert_eq!(ab.is_model(g).unwrap(), abelian, "{name}");
        }
    }

    #[test]
    fn small_groups_pairwise_non_isomorphic() {
        let groups: Vec<_> = small_groups().into_iter().map(|(_, g)| Arc::new(g)).collect();
        for i in 0..groups.len() {
            for j in 0..groups.len() {
                let iso = crate::structure::iso_oracle(&groups[i], &groups[j]).is_some();
                assert_eq!(iso, i == j);
            }
        }
    }
}
