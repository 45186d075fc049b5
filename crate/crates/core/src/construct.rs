//! Constructive spectra: lift a witnessed zero-free spectrum of `GF(2^(n-1))`
//! to one of `GF(2^n)` with rewrite rules.
//!
//! Each rule takes a stored witness `A` of the smaller field (embedded
//! unchanged, so `A` lies in the subfield below `e = 2^(n-1)`), adds elements
//! of the upper coset `e + GF(2^(n-1))`, and claims the r-value of the result.
//! Every claim is checked by direct computation; a mismatch aborts the lift.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_zero_free, revolving_door, SweepOptions};
use crate::error::{Error, Result};
use crate::field::{check_dimension, FieldElement};
use crate::rvalue::{r, r_abc};
use crate::spectrum::{SpectrumTable, ZeroClass};
use crate::subset::SubsetMask;

pub const R_BRUTE: &str = "R_BRUTE";
pub const R_SUMFREE: &str = "R_SUMFREE";
pub const R_K1: &str = "R_K1";
pub const R_L0: &str = "R_L0";
pub const R_L1: &str = "R_L1";
pub const R_L2_PLUS6: &str = "R_L2_PLUS6";
pub const R_L2_PLUS0: &str = "R_L2_PLUS0";
pub const R_L3_18: &str = "R_L3_18";
pub const R_L3_12: &str = "R_L3_12";
pub const R_L3_6: &str = "R_L3_6";
pub const R_L3_0: &str = "R_L3_0";
pub const R_L4_36: &str = "R_L4_36";
pub const R_L4_24: &str = "R_L4_24";
pub const R_L4_12: &str = "R_L4_12";
pub const R_L4_0: &str = "R_L4_0";
pub const R_2_5: &str = "R_2_5";
pub const R_2K: &str = "R_2K";
pub const R_2K1: &str = "R_2K1";
/// Complement in the nonzero elements of an emitted witness.
pub const R_COMP: &str = "R_COMP";

pub const RULES: [&str; 19] = [
    R_BRUTE, R_SUMFREE, R_K1, R_L0, R_L1, R_L2_PLUS6, R_L2_PLUS0, R_L3_18, R_L3_12, R_L3_6, R_L3_0,
    R_L4_36, R_L4_24, R_L4_12, R_L4_0, R_2_5, R_2K, R_2K1, R_COMP,
];

fn rule_id(name: &str) -> Option<&'static str> {
    RULES.iter().copied().find(|r| *r == name)
}

/// A zero-free subset with its verified r-value and provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessEntry {
    pub n: u32,
    pub size: usize,
    pub r: u32,
    pub subset: SubsetMask,
    pub rule: &'static str,
    /// 1-based line of the source witness in the level-(n-1) pool file.
    pub parent_line: Option<usize>,
    /// The source was the complement of that line's witness rather than the witness itself.
    pub parent_complemented: bool,
}

impl WitnessEntry {
    pub fn verify(&self) -> Result<()> {
        if self.subset.n() != self.n {
            return Err(Error::FieldMismatch(self.n, self.subset.n()));
        }
        if self.subset.contains_zero() {
            return Err(Error::ContainsZero);
        }
        if self.subset.len() != self.size {
            return Err(Error::Pool(format!(
                "witness {} has {} elements, entry says {}",
                self.subset.to_hex(),
                self.subset.len(),
                self.size
            )));
        }
        let computed = r(&self.subset);
        if computed != self.r {
            return Err(Error::BadWitness { size: self.size, claimed: self.r, computed });
        }
        Ok(())
    }

    /// `r` of the complement in the nonzero elements.
    pub fn r_comp(&self) -> u32 {
        r(&self.subset.complement_nonzero().expect("pool witnesses are zero-free"))
    }
}

#[derive(Serialize, Deserialize)]
struct EntryWire {
    n: u32,
    size: usize,
    r: u32,
    subset: String,
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent_line: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    parent_complemented: bool,
}

pub type BucketKey = (usize, u32, u32);

/// One witness per (size, r, r of the nonzero complement).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPool {
    pub n: u32,
    pub buckets: BTreeMap<BucketKey, WitnessEntry>,
}

impl WitnessPool {
    pub fn new(n: u32) -> Self {
        WitnessPool { n, buckets: BTreeMap::new() }
    }

    /// Verifies and stores `entry` unless its bucket is already taken.
    /// Returns whether it was stored.
    pub fn insert(&mut self, entry: WitnessEntry) -> Result<bool> {
        if entry.n != self.n {
            return Err(Error::FieldMismatch(self.n, entry.n));
        }
        entry.verify()?;
        let key = (entry.size, entry.r, entry.r_comp());
        if self.buckets.contains_key(&key) {
            return Ok(false);
        }
        self.buckets.insert(key, entry);
        Ok(true)
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &WitnessEntry> {
        self.buckets.values()
    }

    pub fn max_size(&self) -> Option<usize> {
        self.buckets.keys().map(|k| k.0).max()
    }

    pub fn values(&self, size: usize) -> BTreeSet<u32> {
        self.buckets.keys().filter(|k| k.0 == size).map(|k| k.1).collect()
    }

    /// Zero-free spectrum table carrying the pool's witnesses.
    pub fn to_table(&self) -> SpectrumTable {
        let mut t = SpectrumTable::new(self.n, None);
        for e in self.entries() {
            t.record(e.size, ZeroClass::ZeroFree, e.r, Some(e.subset.clone()), None);
        }
        t
    }

    /// One JSON object per line, in bucket order.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for e in self.entries() {
            let wire = EntryWire {
                n: e.n,
                size: e.size,
                r: e.r,
                subset: e.subset.to_hex(),
                rule: e.rule.to_string(),
                parent_line: e.parent_line,
                parent_complemented: e.parent_complemented,
            };
            serde_json::to_writer(&mut w, &wire)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads a pool file, re-verifying every witness.
    pub fn read_jsonl<R: BufRead>(rd: R) -> Result<WitnessPool> {
        let mut pool: Option<WitnessPool> = None;
        for (i, line) in rd.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| Error::Pool(format!("line {}: {reason}", i + 1));
            let wire: EntryWire = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
            let rule = rule_id(&wire.rule).ok_or_else(|| bad(format!("unknown rule {:?}", wire.rule)))?;
            let subset = SubsetMask::from_hex(wire.n, &wire.subset).map_err(|e| bad(e.to_string()))?;
            let entry = WitnessEntry {
                n: wire.n,
                size: wire.size,
                r: wire.r,
                subset,
                rule,
                parent_line: wire.parent_line,
                parent_complemented: wire.parent_complemented,
            };
            let pool = pool.get_or_insert_with(|| WitnessPool::new(wire.n));
            if !pool.insert(entry).map_err(|e| bad(e.to_string()))? {
                return Err(bad("duplicate bucket".into()));
            }
        }
        pool.ok_or_else(|| Error::Pool("empty pool file".into()))
    }
}

/// The pool for a small field from the exhaustive sweep (sizes `0..=2^(n-1)`).
pub fn base_pool(n: u32) -> Result<WitnessPool> {
    let table = enumerate_zero_free(SweepOptions::half(n), None)?;
    let mut pool = WitnessPool::new(n);
    for (&(size, _), entry) in &table.entries {
        for (&rv, w) in &entry.witnesses {
            pool.insert(WitnessEntry {
                n,
                size,
                r: rv,
                subset: w.clone(),
                rule: R_BRUTE,
                parent_line: None,
                parent_complemented: false,
            })?;
        }
    }
    Ok(pool)
}

/// The pair `A = {x : top bit 0, low bit 1}`, `B = {x : top bit 1, low bit 0}`
/// of size `2^(n-2)` each with `r(A, B, B) = 0`.
pub fn abb_pair(n: u32) -> Result<(SubsetMask, SubsetMask)> {
    check_dimension(n)?;
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let e = 1u32 << (n - 1);
    let a = SubsetMask::from_elements(n, (0..e).filter(|x| x & 1 == 1))?;
    let b = SubsetMask::from_elements(n, (e..2 * e).filter(|x| x & 1 == 0))?;
    debug_assert_eq!(r_abc(&a, &b, &b)?, 0);
    Ok((a, b))
}

#[derive(Debug, Clone)]
struct Emission {
    rule: &'static str,
    subset: SubsetMask,
    r: u32,
    parent: Option<(usize, bool)>,
}

fn emit(rule: &'static str, subset: SubsetMask, claim: u32, parent: Option<(usize, bool)>) -> Result<Emission> {
    let computed = r(&subset);
    if computed != claim {
        return Err(Error::RuleFailure { rule, claimed: claim, computed, subset: subset.to_hex() });
    }
    let k = subset.len() as u64;
    if claim % 6 != 0 || claim as u64 > k * k.saturating_sub(1) / 6 * 6 {
        return Err(Error::RuleSearch {
            rule,
            reason: format!("value {claim} at size {k} violates the r-value bounds"),
        });
    }
    Ok(Emission { rule, subset, r: claim, parent })
}

/// Lexicographically smallest `(x, y)`, `x < y`, from `xs` with `x + y` accepted by `sum_ok`.
fn first_pair(xs: &[u32], sum_ok: impl Fn(u32) -> bool) -> Option<(u32, u32)> {
    for (i, &x) in xs.iter().enumerate() {
        for &y in &xs[i + 1..] {
            if sum_ok(x ^ y) {
                return Some((x, y));
            }
        }
    }
    None
}

fn upper_first(n: u32, m: usize) -> Result<SubsetMask> {
    let e = 1u32 << (n - 1);
    SubsetMask::from_elements(n, (e..2 * e).take(m))
}

/// Sum-free witnesses: any `m` elements of the upper coset, `m ≤ 2^(n-1)`.
fn rule_sumfree(n: u32) -> Result<Vec<Emission>> {
    let half = 1usize << (n - 1);
    (0..=half).map(|m| emit(R_SUMFREE, upper_first(n, m)?, 0, None)).collect()
}

/// One subfield element `1` with upper-coset elements: `i` pairs `{b, b + 1}`
/// give r = 6i, singles from the even half of the coset add nothing.
fn rule_k1(n: u32) -> Result<Vec<Emission>> {
    let half = 1usize << (n - 1);
    let quarter = half / 2;
    let e = 1u32 << (n - 1);
    let evens: Vec<u32> = (e..2 * e).filter(|x| x & 1 == 0).collect();
    let mut out = Vec::new();
    for m in 1..=half + 1 {
        let rest = m - 1;
        let lo = rest.saturating_sub(quarter);
        for i in lo..=rest / 2 {
            let singles = rest - 2 * i;
            let mut s = SubsetMask::from_elements(n, [1])?;
            for &b in &evens[..i] {
                s.insert(FieldElement(b));
                s.insert(FieldElement(b ^ 1));
            }
            for &b in &evens[i..i + singles] {
                s.insert(FieldElement(b));
            }
            out.push(emit(R_K1, s, 6 * i as u32, None)?);
        }
    }
    Ok(out)
}

/// A source witness of the smaller field, embedded in the larger one.
#[derive(Debug, Clone)]
struct Source {
    elems: Vec<u32>,
    set: SubsetMask,
    r: u32,
    r_comp: u32,
    parent: (usize, bool),
}

/// All per-witness rules, in fixed order.
fn rules_for(n: u32, src: &Source) -> Result<Vec<Emission>> {
    let e = 1u32 << (n - 1);
    let k = src.elems.len();
    let rv = src.r;
    let a = &src.set;
    let comp: Vec<u32> = (1..e).filter(|x| !a.contains(FieldElement(*x))).collect();
    let p = Some(src.parent);
    let with = |extra: &[u32]| -> SubsetMask {
        let mut s = a.clone();
        for &x in extra {
            s.insert(FieldElement(x));
        }
        s
    };
    let in_a = |x: u32| a.contains(FieldElement(x));
    let in_comp = |x: u32| x != 0 && !a.contains(FieldElement(x));
    let mut out = Vec::with_capacity(16);

    out.push(emit(R_L0, a.clone(), rv, p)?);
    out.push(emit(R_L1, with(&[e]), rv, p)?);
    if k >= 2 {
        let ai = src.elems[0];
        out.push(emit(R_L2_PLUS6, with(&[e, e ^ ai]), rv + 6, p)?);
    }
    if let Some(&x) = comp.first() {
        out.push(emit(R_L2_PLUS0, with(&[e, e ^ x]), rv, p)?);
    }

    // triples (x, y, x + y) shifted into the coset; the four variants differ
    // in where x, y and x + y sit relative to A
    let closed = if rv > 0 { first_pair(&src.elems, in_a) } else { None };
    let open = first_pair(&src.elems, |s| !in_a(s));
    let mixed = first_pair(&comp, in_a);
    let comp_closed = if src.r_comp > 0 { first_pair(&comp, in_comp) } else { None };
    let families = [
        (closed, R_L3_18, 18, R_L4_36, 36),
        (open, R_L3_12, 12, R_L4_24, 24),
        (mixed, R_L3_6, 6, R_L4_12, 12),
        (comp_closed, R_L3_0, 0, R_L4_0, 0),
    ];
    for &(pair, r3, d3, _, _) in &families {
        if let Some((x, y)) = pair {
            out.push(emit(r3, with(&[x ^ e, y ^ e, x ^ y ^ e]), rv + d3, p)?);
        }
    }
    for &(pair, _, _, r4, d4) in &families {
        if let Some((x, y)) = pair {
            out.push(emit(r4, with(&[e, x ^ e, y ^ e, x ^ y ^ e]), rv + d4, p)?);
        }
    }

    let shifted: Vec<u32> = src.elems.iter().map(|x| x ^ e).collect();
    if k >= 3 {
        out.push(emit(R_2K, with(&shifted), 4 * rv, p)?);
    }
    let mut s = with(&shifted);
    s.insert(FieldElement(e));
    out.push(emit(R_2K1, s, 4 * rv + 6 * k as u32, p)?);
    Ok(out)
}

/// Size-7 values from two subfield elements and five coset elements.
pub fn r25_claim(n: u32) -> &'static [u32] {
    match n {
        0..=3 => &[],
        4 => &[0, 12, 18, 24],
        _ => &[0, 6, 12, 18, 24],
    }
}

const R25_SEARCH_LIMIT: u64 = 1 << 24;

/// Outcome of the two-plus-five witness search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct R25Search {
    pub found: BTreeMap<u32, SubsetMask>,
    /// Claimed values with no witness in the searched space.
    pub missing: Vec<u32>,
    /// The whole space was searched, so `missing` values are unattainable in this configuration.
    pub exhaustive: bool,
}

/// Bounded search for witnesses of the claimed size-7 values: subfield pairs
/// in lexicographic order, five-element coset subsets in revolving-door order.
pub fn r25_search(n: u32) -> Result<R25Search> {
    check_dimension(n)?;
    let claim = r25_claim(n);
    let mut found: BTreeMap<u32, SubsetMask> = BTreeMap::new();
    let mut budget = R25_SEARCH_LIMIT;
    let mut exhaustive = true;
    if !claim.is_empty() {
        let e = 1u32 << (n - 1);
        'pairs: for a1 in 1..e {
            for a2 in a1 + 1..e {
                let base = SubsetMask::from_elements(n, [a1, a2])?;
                let mut stop = false;
                revolving_door(e as usize, 5, |combo| {
                    if stop {
                        return;
                    }
                    let mut s = base.clone();
                    let mut bits = combo;
                    while bits != 0 {
                        s.insert(FieldElement(e + bits.trailing_zeros()));
                        bits &= bits - 1;
                    }
                    let v = r(&s);
                    if claim.contains(&v) {
                        found.entry(v).or_insert(s);
                    }
                    budget -= 1;
                    stop = budget == 0 || found.len() == claim.len();
                });
                if found.len() == claim.len() || budget == 0 {
                    exhaustive = false;
                    break 'pairs;
                }
            }
        }
    }
    let missing = claim.iter().copied().filter(|v| !found.contains_key(v)).collect();
    Ok(R25Search { found, missing, exhaustive })
}

/// Emits the claimed size-7 values that the search could witness.
fn rule_2_5(n: u32) -> Result<Vec<Emission>> {
    r25_search(n)?.found.into_iter().map(|(v, s)| emit(R_2_5, s, v, None)).collect()
}

/// The level-(n-1) sources: stored witnesses plus the nonzero complements of
/// those that reach sizes above the stored range.
fn sources(pool: &WitnessPool, n: u32) -> Result<Vec<Source>> {
    let small = pool.n;
    let top = (1usize << small) - 1;
    let mut by_key: BTreeMap<BucketKey, Source> = BTreeMap::new();
    let mut comps = Vec::new();
    for (line, entry) in pool.entries().enumerate() {
        let embedded = SubsetMask::from_elements(n, entry.subset.elements())?;
        let rc = entry.r_comp();
        by_key.insert(
            (entry.size, entry.r, rc),
            Source { elems: embedded.elements(), set: embedded, r: entry.r, r_comp: rc, parent: (line + 1, false) },
        );
        let c = entry.subset.complement_nonzero()?;
        let embedded = SubsetMask::from_elements(n, c.elements())?;
        comps.push((
            (top - entry.size, rc, entry.r),
            Source { elems: embedded.elements(), set: embedded, r: rc, r_comp: entry.r, parent: (line + 1, true) },
        ));
    }
    for (key, src) in comps {
        by_key.entry(key).or_insert(src);
    }
    Ok(by_key.into_values().collect())
}

/// Lifts a pool for `GF(2^(n-1))` to one for `GF(2^n)` covering sizes `0..=2^(n-1)`.
///
/// Rules run in a fixed order (sum-free, single subfield element, per-witness
/// rules, two-plus-five search) and the first witness per bucket is kept.
/// The emitted set is then closed under the nonzero complement, and sizes
/// above `2^(n-1)` are dropped.
pub fn lift(pool: &WitnessPool, n: u32) -> Result<WitnessPool> {
    check_dimension(n)?;
    if pool.n + 1 != n {
        return Err(Error::Pool(format!("cannot lift a pool for n = {} to n = {n}", pool.n)));
    }
    let small_half = 1usize << (pool.n - 1).min(pool.n);
    for s in 0..=small_half.min((1usize << pool.n) - 1) {
        if pool.values(s).is_empty() {
            return Err(Error::Pool(format!("source pool has no witness of size {s}")));
        }
    }
    let srcs = sources(pool, n)?;
    let mut emitted = rule_sumfree(n)?;
    emitted.extend(rule_k1(n)?);
    let per_source: Vec<Vec<Emission>> = srcs.par_iter().map(|s| rules_for(n, s)).collect::<Result<_>>()?;
    emitted.extend(per_source.into_iter().flatten());
    emitted.extend(rule_2_5(n)?);

    let mut all = WitnessPool::new(n);
    for em in emitted {
        all.insert(WitnessEntry {
            n,
            size: em.subset.len(),
            r: em.r,
            subset: em.subset,
            rule: em.rule,
            parent_line: em.parent.map(|p| p.0),
            parent_complemented: em.parent.is_some_and(|p| p.1),
        })?;
    }
    let comps: Vec<WitnessEntry> = all
        .entries()
        .map(|e| {
            let c = e.subset.complement_nonzero()?;
            Ok(WitnessEntry {
                n,
                size: c.len(),
                r: r(&c),
                subset: c,
                rule: R_COMP,
                parent_line: None,
                parent_complemented: false,
            })
        })
        .collect::<Result<_>>()?;
    for c in comps {
        all.insert(c)?;
    }
    let half = 1usize << (n - 1);
    all.buckets.retain(|k, _| k.0 <= half);
    Ok(all)
}

/// Pools for every level from the exhaustive base at `base_n` up to `n`.
pub fn bootstrap(base_n: u32, n: u32) -> Result<Vec<WitnessPool>> {
    if base_n > n {
        return Err(Error::Pool(format!("base level {base_n} is above target {n}")));
    }
    let mut pools = vec![base_pool(base_n)?];
    for level in base_n + 1..=n {
        let next = lift(pools.last().expect("non-empty"), level)?;
        pools.push(next);
    }
    Ok(pools)
}

/// Pool for `GF(2^n)` lifted from the exhaustive `n = 3` base.
pub fn construct_pool(n: u32) -> Result<WitnessPool> {
    if n <= 3 {
        return base_pool(n);
    }
    Ok(bootstrap(3, n)?.pop().expect("non-empty"))
}

/// Full spectrum from a pool covering zero-free sizes `0..=2^(n-1)`.
pub fn assemble_full(pool: &WitnessPool) -> Result<SpectrumTable> {
    pool.to_table().extend_full()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: u32, e: &[u32]) -> SubsetMask {
        SubsetMask::from_elements(n, e.iter().copied()).unwrap()
    }

    fn source(n: u32, e: &[u32]) -> Source {
        let s = set(n, e);
        let small = set(n - 1, e);
        Source {
            elems: s.elements(),
            r: r(&s),
            r_comp: r(&small.complement_nonzero().unwrap()),
            set: s,
            parent: (1, false),
        }
    }

    #[test]
    fn l3_18_example() {
        let out = rules_for(4, &source(4, &[1, 2, 3])).unwrap();
        let l3 = out.iter().find(|e| e.rule == R_L3_18).unwrap();
        assert_eq!(l3.subset, set(4, &[1, 2, 3, 9, 10, 11]));
        assert_eq!(l3.r, 24);
        let k2 = out.iter().find(|e| e.rule == R_2K).unwrap();
        assert_eq!(k2.subset, set(4, &[1, 2, 3, 9, 10, 11]));
        assert_eq!(k2.r, 24);
    }

    #[test]
    fn bad_claim_aborts() {
        let err = emit(R_L3_12, set(3, &[1, 2, 3]), 12, None).unwrap_err();
        assert!(matches!(err, Error::RuleFailure { rule: R_L3_12, claimed: 12, computed: 6, .. }));
    }

    #[test]
    fn n4_size5_from_n3() {
        let p4 = lift(&base_pool(3).unwrap(), 4).unwrap();
        assert_eq!(p4.values(5), [0, 6, 12].into());
    }

    #[test]
    fn k1_matches_brute_n4() {
        // all subsets of the form {1} ∪ (coset elements)
        let n = 4;
        let mut brute: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
        for w in 0u64..256 {
            let mut s = set(n, &[1]);
            for i in 0..8 {
                if (w >> i) & 1 == 1 {
                    s.insert(FieldElement(8 + i));
                }
            }
            brute.entry(s.len()).or_default().insert(r(&s));
        }
        let mut got: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
        for e in rule_k1(n).unwrap() {
            got.entry(e.subset.len()).or_default().insert(e.r);
        }
        for m in 1..=9 {
            assert_eq!(got[&m], brute[&m], "m = {m}");
        }
    }

    #[test]
    fn r25_search_outcomes() {
        // at n = 4 the whole configuration space gives only 12, 18, 24
        let s4 = r25_search(4).unwrap();
        assert!(s4.exhaustive);
        assert_eq!(s4.missing, vec![0]);
        assert_eq!(s4.found.keys().copied().collect::<Vec<_>>(), vec![12, 18, 24]);
        for n in 5..=6 {
            let s = r25_search(n).unwrap();
            assert!(s.missing.is_empty(), "n = {n}");
            let vals: Vec<u32> = rule_2_5(n).unwrap().iter().map(|e| e.r).collect();
            assert_eq!(vals, r25_claim(n));
        }
        assert!(r25_search(3).unwrap().found.is_empty());
    }

    #[test]
    fn abb_pair_is_sum_free() {
        for n in 2..=8 {
            let (a, b) = abb_pair(n).unwrap();
            assert_eq!(a.len(), 1 << (n - 2));
            assert_eq!(b.len(), 1 << (n - 2));
            assert_eq!(r_abc(&a, &b, &b).unwrap(), 0);
        }
    }

    #[test]
    fn pool_round_trip() {
        let pool = construct_pool(4).unwrap();
        let mut buf = Vec::new();
        pool.write_jsonl(&mut buf).unwrap();
        let back = WitnessPool::read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, pool);
        let first = String::from_utf8(buf.clone()).unwrap().lines().next().unwrap().to_string();
        assert!(first.starts_with(r#"{"n":4,"size":0,"r":0,"subset":"0x0","rule":"#), "{first}");
    }

    #[test]
    fn pool_file_rejects_tampering() {
        let pool = base_pool(3).unwrap();
        let mut buf = Vec::new();
        pool.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let tampered = text.replacen(r#""r":6"#, r#""r":12"#, 1);
        assert!(WitnessPool::read_jsonl(tampered.as_bytes()).is_err());
        let doubled = format!("{text}{}", text.lines().next().unwrap());
        assert!(WitnessPool::read_jsonl(doubled.as_bytes()).is_err());
        let unknown = text.replacen("R_BRUTE", "R_MADE_UP", 1);
        assert!(WitnessPool::read_jsonl(unknown.as_bytes()).is_err());
        assert!(WitnessPool::read_jsonl(&b""[..]).is_err());
    }

    #[test]
    fn lift_checks_levels() {
        let p3 = base_pool(3).unwrap();
        assert!(lift(&p3, 5).is_err());
        let mut gap = p3.clone();
        gap.buckets.retain(|k, _| k.0 != 2);
        assert!(lift(&gap, 4).is_err());
    }

    #[test]
    fn assemble_n4() {
        let full = assemble_full(&construct_pool(4).unwrap()).unwrap();
        assert_eq!(full.full_values(5), [0, 6, 12, 13, 19].into());
        assert_eq!(full.full_values(16), [256].into());
        assert_eq!(full.full_values(0), [0].into());
    }
}
