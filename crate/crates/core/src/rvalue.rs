//! r-values: counts of pairs `(a, b) ∈ A × B` with `a + b ∈ C`.

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::subset::{translate_word, SubsetMask};

/// One element `(a, b, c)` of the R-set, with `a + b = c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RTriple {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
}

/// A block `{a, b, a + b}` of nonzero elements; stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SteinerBlock {
    pub elements: [FieldElement; 3],
}

impl SteinerBlock {
    pub fn new(a: FieldElement, b: FieldElement) -> Option<Self> {
        let c = a + b;
        if a.0 == 0 || b.0 == 0 || a == b {
            return None;
        }
        let mut elements = [a, b, c];
        elements.sort();
        Some(SteinerBlock { elements })
    }

    pub fn shared(&self, other: &SteinerBlock) -> usize {
        self.elements.iter().filter(|e| other.elements.contains(e)).count()
    }
}

/// `r(A, B, C)` by row sweep: `Σ_{a ∈ A} |B ∩ (C + a)|`.
pub fn r_abc(a: &SubsetMask, b: &SubsetMask, c: &SubsetMask) -> Result<u32> {
    a.same_field(b)?;
    a.same_field(c)?;
    Ok(r_abc_unchecked(a, b, c))
}

pub(crate) fn r_abc_unchecked(a: &SubsetMask, b: &SubsetMask, c: &SubsetMask) -> u32 {
    match (a.as_word(), b.as_word(), c.as_word()) {
        (Some(wa), Some(wb), Some(wc)) => r_abc_word(wa, wb, wc),
        _ => a.iter().map(|x| b.and_count(&c.translate(x))).sum(),
    }
}

/// Single-word row sweep for n <= 6.
#[inline]
pub fn r_abc_word(a: u64, b: u64, c: u64) -> u32 {
    let mut rest = a;
    let mut total = 0;
    while rest != 0 {
        let x = rest.trailing_zeros();
        rest &= rest - 1;
        total += (b & translate_word(c, x)).count_ones();
    }
    total
}

#[inline]
pub fn r_word(a: u64) -> u32 {
    r_abc_word(a, a, a)
}

/// `r(A) = r(A, A, A)`.
pub fn r(a: &SubsetMask) -> u32 {
    r_abc_unchecked(a, a, a)
}

/// Every `(a, b, c) ∈ A × B × C` with `a + b = c`, ordered by `(a, b)`.
pub fn r_set(a: &SubsetMask, b: &SubsetMask, c: &SubsetMask) -> Result<Vec<RTriple>> {
    a.same_field(b)?;
    a.same_field(c)?;
    let mut out = Vec::new();
    for x in a.iter() {
        for y in b.iter() {
            let z = x + y;
            if c.contains(z) {
                out.push(RTriple { a: x, b: y, c: z });
            }
        }
    }
    Ok(out)
}

/// `r(A ∪ {x}) - r(A)` for `x ∉ A`.
///
/// For `x ≠ 0` the new pairs are the `(a, b)` with `a + b = x` plus the pairs
/// `(x, a)` and `(a, x)` landing back in `A`, each counted by `|A ∩ (A + x)|`,
/// and `(x, 0), (0, x), (x, x)` when `0 ∈ A`. For `x = 0` every element
/// contributes `(a, 0), (0, a), (a, a)`, plus `(0, 0)`.
pub fn delta_add(a: &SubsetMask, x: FieldElement) -> Result<i64> {
    if a.contains(x) {
        return Err(Error::AlreadyMember(x.0));
    }
    Ok(delta_unchecked(a, x))
}

/// `r(A \ {x}) - r(A)` for `x ∈ A`; the inverse of [`delta_add`].
pub fn delta_remove(a: &SubsetMask, x: FieldElement) -> Result<i64> {
    if !a.contains(x) {
        return Err(Error::Parse {
            input: a.to_string(),
            reason: format!("{x} is not a member"),
        });
    }
    Ok(-delta_unchecked(&a.without(x), x))
}

fn delta_unchecked(a: &SubsetMask, x: FieldElement) -> i64 {
    if x.0 == 0 {
        return 3 * a.len() as i64 + 1;
    }
    let shared = a.and_count(&a.translate(x)) as i64;
    3 * shared + if a.contains_zero() { 3 } else { 0 }
}

/// Zero-free single-word delta; the enumerator's inner step.
#[inline]
pub fn delta_word_zero_free(a_without_x: u64, x: u32) -> u32 {
    3 * (a_without_x & translate_word(a_without_x, x)).count_ones()
}

/// The blocks `{a, b, a + b} ⊆ A`; there are `r(A) / 6` of them.
pub fn steiner_blocks(a: &SubsetMask) -> Result<Vec<SteinerBlock>> {
    if a.contains_zero() {
        return Err(Error::ContainsZero);
    }
    let elems: Vec<FieldElement> = a.iter().collect();
    let mut out = Vec::new();
    for (i, &x) in elems.iter().enumerate() {
        for &y in &elems[i + 1..] {
            let z = x + y;
            // count each block once, from its two smallest elements
            if z > y && a.contains(z) {
                out.push(SteinerBlock { elements: [x, y, z] });
            }
        }
    }
    Ok(out)
}

/// `A` is closed under addition (together with `0 ∈ A` this makes it a subgroup).
pub fn is_add_closed(a: &SubsetMask) -> bool {
    let elems: Vec<FieldElement> = a.iter().collect();
    elems.iter().all(|&x| elems.iter().all(|&y| a.contains(x + y)))
}

pub fn is_subgroup(a: &SubsetMask) -> bool {
    a.contains_zero() && is_add_closed(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: u32, e: &[u32]) -> SubsetMask {
        SubsetMask::from_elements(n, e.iter().copied()).unwrap()
    }

    fn brute_r(a: &SubsetMask, b: &SubsetMask, c: &SubsetMask) -> u32 {
        let mut count = 0;
        for x in 0..a.order() {
            for y in 0..a.order() {
                let (x, y) = (FieldElement(x), FieldElement(y));
                if a.contains(x) && b.contains(y) && c.contains(x + y) {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn r_abc_examples() {
        let e = SubsetMask::empty(3).unwrap();
        assert_eq!(r_abc(&e, &e, &e).unwrap(), 0);
        let a = set(3, &[1, 2, 3]);
        assert_eq!(r_abc(&a, &a, &a).unwrap(), 6);
        assert_eq!(r_abc(&set(3, &[1]), &set(3, &[2, 3]), &set(3, &[2, 3])).unwrap(), 2);
        assert!(matches!(r_abc(&a, &set(4, &[1]), &a), Err(Error::FieldMismatch(3, 4))));
    }

    #[test]
    fn r_examples() {
        assert_eq!(r(&set(3, &[0])), 1);
        for n in 1..=8 {
            let full = SubsetMask::full(n).unwrap();
            assert_eq!(r(&full) as u64, 1u64 << (2 * n));
        }
        assert_eq!(r(&set(3, &[1, 2, 3, 4, 5, 6, 7])), 42);
        for x in 1..8 {
            for y in (x + 1)..8 {
                assert_eq!(r(&set(3, &[x, y])), 0);
            }
            assert_eq!(r(&set(3, &[0, x])), 4);
        }
    }

    #[test]
    fn multiword_matches_brute() {
        let a = set(7, &[1, 2, 3, 64, 65, 100, 127]);
        let b = set(7, &[0, 3, 66, 99, 101]);
        let c = set(7, &[2, 64, 67, 7, 126]);
        assert_eq!(r_abc(&a, &b, &c).unwrap(), brute_r(&a, &b, &c));
        assert_eq!(r(&a), brute_r(&a, &a, &a));
    }

    #[test]
    fn r_set_examples() {
        let a = set(3, &[1, 2, 3]);
        let triples = r_set(&a, &a, &a).unwrap();
        assert_eq!(triples.len(), 6);
        for t in &triples {
            assert_eq!(t.a + t.b, t.c);
            let mut v = [t.a.0, t.b.0, t.c.0];
            v.sort();
            assert_eq!(v, [1, 2, 3]);
        }
        let e = SubsetMask::empty(3).unwrap();
        assert!(r_set(&e, &a, &a).unwrap().is_empty());
        let z = set(3, &[0]);
        assert_eq!(
            r_set(&z, &z, &z).unwrap(),
            vec![RTriple { a: FieldElement(0), b: FieldElement(0), c: FieldElement(0) }]
        );
    }

    #[test]
    fn delta_examples() {
        let a = set(3, &[1, 2, 3]);
        assert_eq!(delta_add(&a, FieldElement(4)).unwrap(), 0);
        assert_eq!(r(&set(3, &[1, 2, 3, 4])), 6);
        assert_eq!(delta_add(&a, FieldElement(0)).unwrap(), 10);
        assert_eq!(r(&set(3, &[0, 1, 2, 3])), 16);
        assert_eq!(delta_add(&SubsetMask::empty(3).unwrap(), FieldElement(0)).unwrap(), 1);
        assert!(matches!(delta_add(&a, FieldElement(1)), Err(Error::AlreadyMember(1))));
        assert_eq!(delta_remove(&a, FieldElement(3)).unwrap(), -6);
        assert!(delta_remove(&a, FieldElement(4)).is_err());
    }

    /// Closed form checked against recomputation on every (A, x) at n = 3.
    #[test]
    fn delta_exhaustive_n3() {
        for mask in 0u64..256 {
            let a = SubsetMask::from_word(3, mask).unwrap();
            for x in 0..8 {
                let x = FieldElement(x);
                if a.contains(x) {
                    assert_eq!(
                        delta_remove(&a, x).unwrap(),
                        brute_r(&a.without(x), &a.without(x), &a.without(x)) as i64
                            - brute_r(&a, &a, &a) as i64
                    );
                } else {
                    let grown = a.with(x);
                    assert_eq!(
                        delta_add(&a, x).unwrap(),
                        brute_r(&grown, &grown, &grown) as i64 - brute_r(&a, &a, &a) as i64,
                        "A = {a}, x = {x}"
                    );
                }
            }
        }
    }

    #[test]
    fn steiner_examples() {
        let fano = set(3, &[1, 2, 3, 4, 5, 6, 7]);
        let blocks = steiner_blocks(&fano).unwrap();
        assert_eq!(blocks.len(), 7);
        for (i, x) in blocks.iter().enumerate() {
            for y in &blocks[i + 1..] {
                assert_eq!(x.shared(y), 1);
            }
        }
        assert_eq!(steiner_blocks(&set(3, &[1, 2, 3])).unwrap().len(), 1);
        assert_eq!(steiner_blocks(&set(4, &[1, 2, 4, 8])).unwrap().len(), 0);
        assert!(steiner_blocks(&set(3, &[0, 1])).is_err());
        assert!(SteinerBlock::new(FieldElement(1), FieldElement(1)).is_none());
        assert!(SteinerBlock::new(FieldElement(0), FieldElement(1)).is_none());
    }

    #[test]
    fn singletons() {
        for n in 1..=6 {
            for x in 0..(1u32 << n) {
                assert_eq!(r(&set(n, &[x])), u32::from(x == 0));
            }
        }
    }

    #[test]
    fn subgroup_criterion_exhaustive_n3() {
        for mask in 0u64..256 {
            let a = SubsetMask::from_word(3, mask).unwrap();
            let k = a.len() as u32;
            assert_eq!(r(&a) == k * k && k > 0, is_subgroup(&a), "{a}");
        }
    }
}
