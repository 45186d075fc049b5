//! Subsets of GF(2^n) as packed bitsets: element `e` is present iff bit `e` is set.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{check_dimension, FieldElement};

/// Positions whose bit `j` is clear, for the in-word swap stages.
const SWAP_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Maps bit `i` to bit `i ^ x` within one 64-bit word (`x < 64`).
#[inline]
pub fn translate_word(mut w: u64, x: u32) -> u64 {
    for (j, &m) in SWAP_MASKS.iter().enumerate() {
        if (x >> j) & 1 == 1 {
            let s = 1u32 << j;
            w = ((w & m) << s) | ((w >> s) & m);
        }
    }
    w
}

/// Mask of the valid bit positions of a single-word field (n <= 6).
#[inline]
pub fn word_universe(n: u32) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    n: u32,
    words: Vec<u64>,
}

/// Numeric order of the masks (highest word most significant) within a field.
impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn word_count(n: u32) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

impl SubsetMask {
    pub fn empty(n: u32) -> Result<Self> {
        check_dimension(n)?;
        Ok(SubsetMask { n, words: vec![0; word_count(n)] })
    }

    pub fn full(n: u32) -> Result<Self> {
        let mut s = SubsetMask::empty(n)?;
        for w in s.words.iter_mut() {
            *w = word_universe(n);
        }
        Ok(s)
    }

    pub fn from_elements<I: IntoIterator<Item = u32>>(n: u32, elements: I) -> Result<Self> {
        let mut s = SubsetMask::empty(n)?;
        for e in elements {
            if e >= 1 << n {
                return Err(Error::ElementOutOfRange { element: e as u64, n });
            }
            s.insert(FieldElement(e));
        }
        Ok(s)
    }

    /// Single-word constructor for n <= 6.
    pub fn from_word(n: u32, word: u64) -> Result<Self> {
        check_dimension(n)?;
        if n > 6 {
            return Err(Error::Parse {
                input: format!("{word:#x}"),
                reason: "single-word masks need n <= 6".into(),
            });
        }
        if word & !word_universe(n) != 0 {
            let top = 63 - word.leading_zeros();
            return Err(Error::ElementOutOfRange { element: top as u64, n });
        }
        Ok(SubsetMask { n, words: vec![word] })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        1 << self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The mask as one word, when the field fits in one (n <= 6).
    pub fn as_word(&self) -> Option<u64> {
        (self.words.len() == 1).then(|| self.words[0])
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        let v = x.0 as usize;
        v < self.order() as usize && (self.words[v >> 6] >> (v & 63)) & 1 == 1
    }

    pub fn insert(&mut self, x: FieldElement) {
        let v = x.0 as usize;
        self.words[v >> 6] |= 1 << (v & 63);
    }

    pub fn remove(&mut self, x: FieldElement) {
        let v = x.0 as usize;
        self.words[v >> 6] &= !(1 << (v & 63));
    }

    pub fn with(&self, x: FieldElement) -> SubsetMask {
        let mut s = self.clone();
        s.insert(x);
        s
    }

    pub fn without(&self, x: FieldElement) -> SubsetMask {
        let mut s = self.clone();
        s.remove(x);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains_zero(&self) -> bool {
        self.words[0] & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(FieldElement((i as u32) * 64 + b))
            })
        })
    }

    pub fn elements(&self) -> Vec<u32> {
        self.iter().map(|e| e.0).collect()
    }

    pub fn same_field(&self, other: &SubsetMask) -> Result<()> {
        if self.n != other.n {
            return Err(Error::FieldMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Complement in the whole field.
    pub fn complement(&self) -> SubsetMask {
        let u = word_universe(self.n);
        SubsetMask { n: self.n, words: self.words.iter().map(|&w| !w & u).collect() }
    }

    /// Complement inside GF(2^n) \ {0}; rejects sets containing 0.
    pub fn complement_nonzero(&self) -> Result<SubsetMask> {
        if self.contains_zero() {
            return Err(Error::ContainsZero);
        }
        let mut c = self.complement();
        c.remove(FieldElement::ZERO);
        Ok(c)
    }

    /// `{a + x : a ∈ self}`.
    pub fn translate(&self, x: FieldElement) -> SubsetMask {
        let lo = x.0 & 63;
        let hi = (x.0 >> 6) as usize;
        let mut words = vec![0; self.words.len()];
        for (i, &w) in self.words.iter().enumerate() {
            words[i ^ hi] = translate_word(w, lo);
        }
        SubsetMask { n: self.n, words }
    }

    pub fn union(&self, other: &SubsetMask) -> SubsetMask {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &SubsetMask) -> SubsetMask {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &SubsetMask) -> SubsetMask {
        self.zip(other, |a, b| a & !b)
    }

    pub fn is_disjoint(&self, other: &SubsetMask) -> bool {
        self.and_count(other) == 0
    }

    pub fn is_subset(&self, other: &SubsetMask) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// `|self ∩ other|` without materialising the intersection.
    pub fn and_count(&self, other: &SubsetMask) -> u32 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn zip(&self, other: &SubsetMask, f: impl Fn(u64, u64) -> u64) -> SubsetMask {
        debug_assert_eq!(self.n, other.n);
        SubsetMask {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Hex mask, most significant word first, e.g. `0x3A`.
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for &w in self.words.iter().rev() {
            if out.is_empty() {
                if w != 0 {
                    out = format!("{w:X}");
                }
            } else {
                out.push_str(&format!("{w:016X}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("0x{out}")
    }

    pub fn from_hex(n: u32, text: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse { input: text.to_string(), reason: reason.to_string() };
        let digits = text
            .trim()
            .strip_prefix("0x")
            .or_else(|| text.trim().strip_prefix("0X"))
            .ok_or_else(|| err("hex masks start with 0x"))?;
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(err("not a hex number"));
        }
        let digits = digits.trim_start_matches('0');
        let mut s = SubsetMask::empty(n)?;
        let nwords = s.words.len();
        let chunks: Vec<&str> = {
            let mut v = Vec::new();
            let mut end = digits.len();
            while end > 0 {
                let start = end.saturating_sub(16);
                v.push(&digits[start..end]);
                end = start;
            }
            v
        };
        if chunks.len() > nwords {
            return Err(err("mask has bits outside the field"));
        }
        for (i, chunk) in chunks.iter().enumerate() {
            s.words[i] = u64::from_str_radix(chunk, 16).map_err(|e| err(&e.to_string()))?;
        }
        if s.words.iter().any(|&w| w & !word_universe(n) != 0) {
            return Err(err("mask has bits outside the field"));
        }
        Ok(s)
    }

    /// Accepts a decimal element list (`1,2,3`) or a hex mask (`0x0E`).
    pub fn parse(n: u32, text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with("0x") || t.starts_with("0X") {
            return SubsetMask::from_hex(n, t);
        }
        let t = t.trim_start_matches('{').trim_end_matches('}');
        let mut elements = Vec::new();
        for part in t.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let v: u64 = part.parse().map_err(|_| Error::Parse {
                input: text.to_string(),
                reason: format!("{part:?} is not a non-negative integer"),
            })?;
            if v >= 1u64 << n {
                return Err(Error::ElementOutOfRange { element: v, n });
            }
            elements.push(v as u32);
        }
        SubsetMask::from_elements(n, elements)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsetMask(n={}, {})", self.n, self)
    }
}

pub fn complement(a: &SubsetMask) -> SubsetMask {
    a.complement()
}

pub fn complement_nonzero(a: &SubsetMask) -> Result<SubsetMask> {
    a.complement_nonzero()
}

pub fn translate(a: &SubsetMask, x: FieldElement) -> SubsetMask {
    a.translate(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: u32, e: &[u32]) -> SubsetMask {
        SubsetMask::from_elements(n, e.iter().copied()).unwrap()
    }

    #[test]
    fn translate_examples() {
        let a = set(3, &[1, 2, 3]);
        assert_eq!(a.translate(FieldElement(4)), set(3, &[5, 6, 7]));
        assert_eq!(a.translate(FieldElement(0)), a);
    }

    #[test]
    fn complement_examples() {
        assert_eq!(set(2, &[0, 1]).complement(), set(2, &[2, 3]));
        assert_eq!(set(3, &[1, 2, 3]).complement_nonzero().unwrap(), set(3, &[4, 5, 6, 7]));
        assert!(matches!(set(3, &[0, 1]).complement_nonzero(), Err(Error::ContainsZero)));
    }

    #[test]
    fn parse_and_format() {
        let a = SubsetMask::parse(3, "1,2,3").unwrap();
        assert_eq!(a, SubsetMask::parse(3, "0x0E").unwrap());
        assert_eq!(a.to_hex(), "0xE");
        assert_eq!(a.to_string(), "{1,2,3}");
        assert_eq!(SubsetMask::parse(4, "").unwrap().len(), 0);
        assert_eq!(SubsetMask::empty(4).unwrap().to_hex(), "0x0");
        assert!(matches!(SubsetMask::parse(3, "1,8"), Err(Error::ElementOutOfRange { .. })));
        assert!(SubsetMask::parse(3, "0x100").is_err());
        assert!(SubsetMask::parse(3, "1,x").is_err());
        assert!(SubsetMask::parse(3, "-1").is_err());
        let big = set(8, &[0, 70, 255]);
        assert_eq!(SubsetMask::from_hex(8, &big.to_hex()).unwrap(), big);
        assert_eq!(
            big.to_hex(),
            format!("0x8{}{}{}{}", "0".repeat(15), "0".repeat(16), "0000000000000040", "0000000000000001")
        );
    }

    #[test]
    fn single_word_bounds() {
        assert!(SubsetMask::from_word(3, 0x100).is_err());
        assert_eq!(SubsetMask::from_word(6, u64::MAX).unwrap().len(), 64);
        assert_eq!(SubsetMask::full(2).unwrap().as_word(), Some(0xF));
    }

    fn arb_mask(n: u32) -> impl Strategy<Value = SubsetMask> {
        let order = 1usize << n;
        proptest::collection::vec(any::<bool>(), order).prop_map(move |bits| {
            SubsetMask::from_elements(
                n,
                bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn translate_is_elementwise_xor(n in 1u32..=8, seed in any::<u64>(), x in any::<u32>()) {
            let mut rng = seed;
            let order = 1u32 << n;
            let mut elems = Vec::new();
            for e in 0..order {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if rng >> 63 == 1 { elems.push(e); }
            }
            let a = SubsetMask::from_elements(n, elems.iter().copied()).unwrap();
            let x = FieldElement(x % order);
            let t = a.translate(x);
            let expected = SubsetMask::from_elements(n, elems.iter().map(|e| e ^ x.0)).unwrap();
            prop_assert_eq!(&t, &expected);
            prop_assert_eq!(t.len(), a.len());
            prop_assert_eq!(t.translate(x), a);
        }

        #[test]
        fn complement_involution(a in arb_mask(5)) {
            prop_assert_eq!(a.complement().complement(), a.clone());
            prop_assert_eq!(a.complement().len(), 32 - a.len());
            let z = a.without(FieldElement::ZERO);
            prop_assert_eq!(z.complement_nonzero().unwrap().len(), 31 - z.len());
        }

        #[test]
        fn hex_round_trip(a in arb_mask(7)) {
            prop_assert_eq!(SubsetMask::from_hex(7, &a.to_hex()).unwrap(), a);
        }

        #[test]
        fn subfield_translation_stays_in_subfield(x in 0u32..16, a in arb_mask(5)) {
            let low = SubsetMask::from_elements(5, 0..16).unwrap();
            let sub = a.intersection(&low);
            prop_assert!(sub.translate(FieldElement(x)).is_subset(&low));
        }
    }
}
