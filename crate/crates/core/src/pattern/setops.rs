//! Merge-based operations on strictly ascending id lists.
//!
//! The `_into` variants append to a caller-owned buffer and return the number
//! of input elements consumed, which the simulator charges as compute work.

use crate::graph::VertexId;

#[inline]
fn below(x: VertexId, bound: Option<VertexId>) -> bool {
    bound.is_none_or(|b| x < b)
}

/// `{x in a and b : x < bound}` in ascending order.
pub fn bounded_intersect(a: &[VertexId], b: &[VertexId], bound: Option<VertexId>) -> Vec<VertexId> {
    let mut out = Vec::new();
    intersect_into(a, b, bound, &mut out);
    out
}

/// `{x in a, not in b : x < bound}` in ascending order.
pub fn bounded_subtract(a: &[VertexId], b: &[VertexId], bound: Option<VertexId>) -> Vec<VertexId> {
    let mut out = Vec::new();
    subtract_into(a, b, bound, &mut out);
    out
}

pub fn intersect_into(
    a: &[VertexId],
    b: &[VertexId],
    bound: Option<VertexId>,
    out: &mut Vec<VertexId>,
) -> u64 {
    let (mut i, mut j) = (0, 0);
    let mut steps = 0;
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i], b[j]);
        if !below(x, bound) || !below(y, bound) {
            break;
        }
        steps += 1;
        match x.cmp(&y) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(x);
                i += 1;
                j += 1;
            }
        }
    }
    steps
}

pub fn subtract_into(
    a: &[VertexId],
    b: &[VertexId],
    bound: Option<VertexId>,
    out: &mut Vec<VertexId>,
) -> u64 {
    let (mut i, mut j) = (0, 0);
    let mut steps = 0;
    while i < a.len() && below(a[i], bound) {
        steps += 1;
        let x = a[i];
        while j < b.len() && b[j] < x {
            j += 1;
            steps += 1;
        }
        if j >= b.len() || b[j] != x {
            out.push(x);
        }
        i += 1;
    }
    steps
}

/// Copies the prefix of `a` below `bound`.
pub fn bounded_prefix_into(a: &[VertexId], bound: Option<VertexId>, out: &mut Vec<VertexId>) -> u64 {
    let end = match bound {
        Some(b) => a.partition_point(|&x| x < b),
        None => a.len(),
    };
    out.extend_from_slice(&a[..end]);
    end as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn examples() {
        assert_eq!(bounded_intersect(&[1, 3, 5], &[3, 4, 5], Some(5)), vec![3]);
        assert_eq!(bounded_intersect(&[1, 3, 5], &[3, 4, 5], None), vec![3, 5]);
        assert_eq!(bounded_intersect(&[1, 3, 5], &[1, 3, 5], None), vec![1, 3, 5]);
        assert_eq!(bounded_subtract(&[1, 3, 5], &[3], Some(5)), vec![1]);
        assert_eq!(bounded_subtract(&[1, 3, 5], &[1, 3, 5], None), Vec::<u32>::new());
        assert_eq!(bounded_subtract(&[1, 3, 5], &[], None), vec![1, 3, 5]);
        let mut out = Vec::new();
        assert_eq!(bounded_prefix_into(&[1, 3, 5], Some(4), &mut out), 2);
        assert_eq!(out, vec![1, 3]);
    }

    fn sorted_set() -> impl Strategy<Value = Vec<VertexId>> {
        proptest::collection::btree_set(0u32..60, 0..25).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn matches_set_builder(a in sorted_set(), b in sorted_set(), bound in proptest::option::of(0u32..64)) {
            let sb: BTreeSet<_> = b.iter().copied().collect();
            let ok = |x: &u32| bound.is_none_or(|t| *x < t);
            let inter: Vec<_> = a.iter().copied().filter(|x| sb.contains(x) && ok(x)).collect();
            let sub: Vec<_> = a.iter().copied().filter(|x| !sb.contains(x) && ok(x)).collect();
            prop_assert_eq!(bounded_intersect(&a, &b, bound), inter);
            prop_assert_eq!(bounded_subtract(&a, &b, bound), sub);
            let mut out = Vec::new();
            let steps = intersect_into(&a, &b, bound, &mut out);
            prop_assert!(steps <= (a.len() + b.len()) as u64);
        }
    }
}
