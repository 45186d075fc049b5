//! Closed-form r-value identities as checkable predicates.
//!
//! Each evaluator computes the closed-form side from cheap quantities
//! (cardinalities, one r-value) and the other side by direct evaluation,
//! returning an [`IdentityReport`] instead of asserting. Inputs that break an
//! identity's hypotheses are errors, not failures.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::rvalue::{is_add_closed, is_subgroup, r, r_abc};
use crate::subset::SubsetMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityId {
    /// `r(A) + r(Ā) = g² − 3gk + 3k²`
    Complement,
    /// `r(A,B,C) + r(A,B,C̄) = |A||B|`
    ThreeSetC,
    /// `r(A,B,C) + r(Ā,B,C) = |B||C|`
    ThreeSetA,
    /// `r(A,B,C) + r(A,B̄,C) = |A||C|`
    Cor1,
    /// `r(A,B,C) − r(Ā,B,C̄) = (|A| − |C̄|)|B|`
    Cor2,
    /// `r(A,B,C) − r(Ā,B̄,C) = (|B| − |Ā|)|C|`
    Cor3,
    /// `r(A,B,C) + r(Ā,B̄,C̄) = |B||C| − |Ā||C| + |Ā||B̄|`
    Cor4,
    /// `r(A,B,C) + r(Ā,B̄,C̄) = g² − (|A|+|B|+|C|)g + |A||B| + |A||C| + |B||C|`
    Cor4Reduced,
    /// `r(A∪B)` expanded over disjoint `A`, `B`.
    DisjointUnion,
    /// `r(A∪B) = r(A) + 3r(A,B,B)` for `A` in the zero-free subfield, `B` in its coset.
    Char2Union,
    /// `r(A,B,B) = r(B,A,B) = r(B,B,A)` under the same hypotheses.
    Char2Sym,
    /// `r(A∪{0}) = r(A) + 3|A| + 1` for zero-free `A`.
    ZeroAdded,
    /// `r(S̄*) = 2^{2n} − 3(2^n − k − 1)(k + 1) − (3k + 1) − r(S)`.
    CompNonzero,
    /// `r(A,B,C) ≤ |A|·min(|B|,|C|)` when `|A| ≤ |B|`.
    PairBound,
    /// `r(A) ≥ 3|A| − 2` when `0 ∈ A`.
    ZeroLowerBound,
    /// `r(A) ≡ 0 (mod 6)` for zero-free `A`.
    Mod6,
    /// `r(A) ≤ ⌊k(k−1)/6⌋·6` for zero-free `A`.
    UpperBound,
    /// `r(A) = k(k−1)` iff `A ∪ {0}` is a subgroup, for zero-free `A`.
    SubgroupEquality,
    /// `r(A) = |A|²` iff `A` is a subgroup.
    Subgroup,
}

impl IdentityId {
    pub const ALL: [IdentityId; 19] = [
        IdentityId::Complement,
        IdentityId::ThreeSetC,
        IdentityId::ThreeSetA,
        IdentityId::Cor1,
        IdentityId::Cor2,
        IdentityId::Cor3,
        IdentityId::Cor4,
        IdentityId::Cor4Reduced,
        IdentityId::DisjointUnion,
        IdentityId::Char2Union,
        IdentityId::Char2Sym,
        IdentityId::ZeroAdded,
        IdentityId::CompNonzero,
        IdentityId::PairBound,
        IdentityId::ZeroLowerBound,
        IdentityId::Mod6,
        IdentityId::UpperBound,
        IdentityId::SubgroupEquality,
        IdentityId::Subgroup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Complement => "COMPLEMENT",
            IdentityId::ThreeSetC => "THREE_SET_C",
            IdentityId::ThreeSetA => "THREE_SET_A",
            IdentityId::Cor1 => "COR_1",
            IdentityId::Cor2 => "COR_2",
            IdentityId::Cor3 => "COR_3",
            IdentityId::Cor4 => "COR_4",
            IdentityId::Cor4Reduced => "COR_4_REDUCED",
            IdentityId::DisjointUnion => "DISJOINT_UNION",
            IdentityId::Char2Union => "CHAR2_UNION",
            IdentityId::Char2Sym => "CHAR2_SYM",
            IdentityId::ZeroAdded => "ZERO_ADDED",
            IdentityId::CompNonzero => "COMP_NONZERO",
            IdentityId::PairBound => "PAIR_BOUND",
            IdentityId::ZeroLowerBound => "ZERO_LOWER_BOUND",
            IdentityId::Mod6 => "MOD6",
            IdentityId::UpperBound => "UPPER_BOUND",
            IdentityId::SubgroupEquality => "SUBGROUP_EQUALITY",
            IdentityId::Subgroup => "SUBGROUP",
        }
    }

    /// Number of subsets the identity takes.
    pub fn arity(self) -> usize {
        match self {
            IdentityId::ThreeSetC
            | IdentityId::ThreeSetA
            | IdentityId::Cor1
            | IdentityId::Cor2
            | IdentityId::Cor3
            | IdentityId::Cor4
            | IdentityId::Cor4Reduced
            | IdentityId::PairBound => 3,
            IdentityId::DisjointUnion | IdentityId::Char2Union | IdentityId::Char2Sym => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How `computed` must relate to `expected` for the check to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtMost,
    AtLeast,
}

impl Relation {
    fn holds(self, computed: i64, expected: i64) -> bool {
        match self {
            Relation::Equal => computed == expected,
            Relation::AtMost => computed <= expected,
            Relation::AtLeast => computed >= expected,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: IdentityId,
    #[serde(serialize_with = "ser_masks")]
    pub inputs: Vec<SubsetMask>,
    pub relation: Relation,
    pub expected: i64,
    pub computed: i64,
    pub pass: bool,
}

fn ser_masks<S: serde::Serializer>(v: &[SubsetMask], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|m| m.to_hex()))
}

impl IdentityReport {
    fn new(
        identity: IdentityId,
        inputs: &[SubsetMask],
        relation: Relation,
        expected: i64,
        computed: i64,
    ) -> Self {
        IdentityReport {
            identity,
            inputs: inputs.to_vec(),
            relation,
            expected,
            computed,
            pass: relation.holds(computed, expected),
        }
    }
}

fn hyp(identity: IdentityId, reason: impl Into<String>) -> Error {
    Error::Hypothesis { identity: identity.name(), reason: reason.into() }
}

fn rr(a: &SubsetMask, b: &SubsetMask, c: &SubsetMask) -> i64 {
    r_abc(a, b, c).expect("fields checked by caller") as i64
}

/// Lower subfield `GF(2^(n-1))` as a mask.
pub fn subfield(n: u32) -> SubsetMask {
    SubsetMask::from_elements(n, 0..(1u32 << (n - 1))).expect("valid n")
}

/// `GF(2^n) \ GF(2^(n-1))`.
pub fn upper_coset(n: u32) -> SubsetMask {
    subfield(n).complement()
}

pub fn check_identity(id: IdentityId, inputs: &[SubsetMask]) -> Result<IdentityReport> {
    if inputs.len() != id.arity() {
        return Err(hyp(id, format!("expects {} subsets, got {}", id.arity(), inputs.len())));
    }
    for w in inputs.windows(2) {
        w[0].same_field(&w[1])?;
    }
    let n = inputs[0].n();
    let g = 1i64 << n;
    let a = &inputs[0];
    let ka = a.len() as i64;
    let report = |rel, expected, computed| Ok(IdentityReport::new(id, inputs, rel, expected, computed));
    match id {
        IdentityId::Complement => {
            let expected = g * g - 3 * g * ka + 3 * ka * ka - r(a) as i64;
            report(Relation::Equal, expected, r(&a.complement()) as i64)
        }
        IdentityId::ThreeSetC
        | IdentityId::ThreeSetA
        | IdentityId::Cor1
        | IdentityId::Cor2
        | IdentityId::Cor3
        | IdentityId::Cor4
        | IdentityId::Cor4Reduced
        | IdentityId::PairBound => {
            let (b, c) = (&inputs[1], &inputs[2]);
            let (na, nb, nc) = (a.complement(), b.complement(), c.complement());
            let (kb, kc) = (b.len() as i64, c.len() as i64);
            let (kna, knb, knc) = (g - ka, g - kb, g - kc);
            let base = rr(a, b, c);
            match id {
                IdentityId::ThreeSetC => report(Relation::Equal, ka * kb - base, rr(a, b, &nc)),
                IdentityId::ThreeSetA => report(Relation::Equal, kb * kc - base, rr(&na, b, c)),
                IdentityId::Cor1 => report(Relation::Equal, ka * kc - base, rr(a, &nb, c)),
                IdentityId::Cor2 => report(Relation::Equal, base - (ka - knc) * kb, rr(&na, b, &nc)),
                IdentityId::Cor3 => report(Relation::Equal, base - (kb - kna) * kc, rr(&na, &nb, c)),
                IdentityId::Cor4 => {
                    let rhs = kb * kc - kna * kc + kna * knb;
                    report(Relation::Equal, rhs - base, rr(&na, &nb, &nc))
                }
                IdentityId::Cor4Reduced => {
                    let rhs = g * g - (ka + kb + kc) * g + ka * kb + ka * kc + kb * kc;
                    report(Relation::Equal, rhs - base, rr(&na, &nb, &nc))
                }
                IdentityId::PairBound => {
                    if ka > kb {
                        return Err(hyp(id, "requires |A| <= |B|"));
                    }
                    report(Relation::AtMost, ka * kb.min(kc), base)
                }
                _ => unreachable!(),
            }
        }
        IdentityId::DisjointUnion => {
            let b = &inputs[1];
            if !a.is_disjoint(b) {
                return Err(hyp(id, "A and B must be disjoint"));
            }
            let expected = r(a) as i64
                + rr(a, a, b)
                + 2 * rr(a, b, a)
                + 2 * rr(a, b, b)
                + rr(b, b, a)
                + r(b) as i64;
            report(Relation::Equal, expected, r(&a.union(b)) as i64)
        }
        IdentityId::Char2Union | IdentityId::Char2Sym => {
            let b = &inputs[1];
            let low = subfield(n);
            if a.contains_zero() || !a.is_subset(&low) {
                return Err(hyp(id, "A must lie in the zero-free subfield"));
            }
            if !b.is_disjoint(&low) {
                return Err(hyp(id, "B must lie outside the subfield"));
            }
            let abb = rr(a, b, b);
            if id == IdentityId::Char2Union {
                report(Relation::Equal, r(a) as i64 + 3 * abb, r(&a.union(b)) as i64)
            } else {
                let bab = rr(b, a, b);
                let bba = rr(b, b, a);
                report(Relation::Equal, abb, if bab != abb { bab } else { bba })
            }
        }
        IdentityId::ZeroAdded => {
            if a.contains_zero() {
                return Err(hyp(id, "A must not contain 0"));
            }
            report(Relation::Equal, r(a) as i64 + 3 * ka + 1, r(&a.with(FieldElement::ZERO)) as i64)
        }
        IdentityId::CompNonzero => {
            let comp = a.complement_nonzero().map_err(|_| hyp(id, "S must not contain 0"))?;
            let expected = g * g - 3 * (g - ka - 1) * (ka + 1) - (3 * ka + 1) - r(a) as i64;
            report(Relation::Equal, expected, r(&comp) as i64)
        }
        IdentityId::ZeroLowerBound => {
            if !a.contains_zero() {
                return Err(hyp(id, "A must contain 0"));
            }
            report(Relation::AtLeast, 3 * ka - 2, r(a) as i64)
        }
        IdentityId::Mod6 | IdentityId::UpperBound | IdentityId::SubgroupEquality => {
            if a.contains_zero() {
                return Err(hyp(id, "A must not contain 0"));
            }
            let value = r(a) as i64;
            match id {
                IdentityId::Mod6 => report(Relation::Equal, 0, value % 6),
                IdentityId::UpperBound => report(Relation::AtMost, ka * (ka - 1) / 6 * 6, value),
                _ => {
                    let closed = is_subgroup(&a.with(FieldElement::ZERO));
                    report(Relation::Equal, i64::from(closed), i64::from(value == ka * (ka - 1)))
                }
            }
        }
        IdentityId::Subgroup => {
            if a.is_empty() {
                return Err(hyp(id, "A must be nonempty"));
            }
            let group = a.contains_zero() && is_add_closed(a);
            report(Relation::Equal, i64::from(group), i64::from(r(a) as i64 == ka * ka))
        }
    }
}

/// Random subset with a random density, so both sparse and dense sets occur.
pub fn random_subset<R: Rng>(n: u32, rng: &mut R) -> SubsetMask {
    let p: f64 = rng.gen();
    let elems: Vec<u32> = (0..(1u32 << n)).filter(|_| rng.gen_bool(p)).collect();
    SubsetMask::from_elements(n, elems).expect("in range")
}

/// Span of a few random elements: a random subgroup.
pub fn random_subgroup<R: Rng>(n: u32, rng: &mut R) -> SubsetMask {
    let mut span = SubsetMask::from_elements(n, [0]).expect("valid n");
    let gens = rng.gen_range(0..=n);
    for _ in 0..gens {
        let g = FieldElement(rng.gen_range(0..(1u32 << n)));
        if !span.contains(g) {
            span = span.union(&span.translate(g));
        }
    }
    span
}

/// A random input tuple satisfying the identity's hypotheses.
pub fn sample_inputs<R: Rng>(id: IdentityId, n: u32, rng: &mut R) -> Vec<SubsetMask> {
    let zero = FieldElement::ZERO;
    match id {
        IdentityId::DisjointUnion => {
            let a = random_subset(n, rng);
            let b = random_subset(n, rng).difference(&a);
            vec![a, b]
        }
        IdentityId::Char2Union | IdentityId::Char2Sym => {
            let low = subfield(n);
            let a = random_subset(n, rng).intersection(&low).without(zero);
            let b = random_subset(n, rng).difference(&low);
            vec![a, b]
        }
        IdentityId::PairBound => {
            let mut v: Vec<SubsetMask> = (0..3).map(|_| random_subset(n, rng)).collect();
            if v[0].len() > v[1].len() {
                v.swap(0, 1);
            }
            v
        }
        IdentityId::ZeroAdded
        | IdentityId::CompNonzero
        | IdentityId::Mod6
        | IdentityId::UpperBound
        | IdentityId::SubgroupEquality => {
            let base = if rng.gen_bool(0.2) { random_subgroup(n, rng) } else { random_subset(n, rng) };
            vec![base.without(zero)]
        }
        IdentityId::ZeroLowerBound => vec![random_subset(n, rng).with(zero)],
        IdentityId::Subgroup => {
            let s = if rng.gen_bool(0.3) { random_subgroup(n, rng) } else { random_subset(n, rng) };
            if s.is_empty() {
                vec![s.with(zero)]
            } else {
                vec![s]
            }
        }
        _ => (0..id.arity()).map(|_| random_subset(n, rng)).collect(),
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IdentityTally {
    pub checked: u64,
    pub passed: u64,
    pub skipped: u64,
    pub failures: Vec<IdentityReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub n: u32,
    pub exhaustive: bool,
    pub tallies: Vec<(IdentityId, IdentityTally)>,
}

impl SweepReport {
    pub fn all_passed(&self) -> bool {
        self.tallies.iter().all(|(_, t)| t.checked == t.passed)
    }
}

const MAX_KEPT_FAILURES: usize = 5;

fn record(tally: &mut IdentityTally, result: Result<IdentityReport>) {
    match result {
        Ok(rep) => {
            tally.checked += 1;
            if rep.pass {
                tally.passed += 1;
            } else if tally.failures.len() < MAX_KEPT_FAILURES {
                tally.failures.push(rep);
            }
        }
        Err(_) => tally.skipped += 1,
    }
}

/// Seeded random sweep: `trials` hypothesis-respecting instances per identity.
pub fn random_sweep(n: u32, trials: u64, seed: u64) -> SweepReport {
    use rand::SeedableRng;
    let tallies = IdentityId::ALL
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ ((i as u64 + 1) << 32));
            let mut tally = IdentityTally::default();
            for _ in 0..trials {
                let inputs = sample_inputs(id, n, &mut rng);
                record(&mut tally, check_identity(id, &inputs));
            }
            (id, tally)
        })
        .collect();
    SweepReport { n, exhaustive: false, tallies }
}

/// Every tuple of subsets (of the identity's arity) at small n; tuples
/// breaking a hypothesis are counted as skipped.
pub fn exhaustive_sweep(n: u32) -> Result<SweepReport> {
    if n > 2 {
        return Err(Error::TooLarge(n));
    }
    let all: Vec<SubsetMask> =
        (0..(1u64 << (1 << n))).map(|w| SubsetMask::from_word(n, w).expect("in range")).collect();
    let tallies = IdentityId::ALL
        .iter()
        .map(|&id| {
            let mut tally = IdentityTally::default();
            let arity = id.arity() as u32;
            let total = (all.len() as u64).pow(arity);
            for code in 0..total {
                let mut c = code;
                let inputs: Vec<SubsetMask> = (0..arity)
                    .map(|_| {
                        let s = all[(c % all.len() as u64) as usize].clone();
                        c /= all.len() as u64;
                        s
                    })
                    .collect();
                record(&mut tally, check_identity(id, &inputs));
            }
            (id, tally)
        })
        .collect();
    Ok(SweepReport { n, exhaustive: true, tallies })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: u32, e: &[u32]) -> SubsetMask {
        SubsetMask::from_elements(n, e.iter().copied()).unwrap()
    }

    #[test]
    fn complement_example() {
        let rep = check_identity(IdentityId::Complement, &[set(3, &[1, 2, 3])]).unwrap();
        assert_eq!((rep.expected, rep.computed), (13, 13));
        assert!(rep.pass);
    }

    #[test]
    fn comp_nonzero_example() {
        let rep = check_identity(IdentityId::CompNonzero, &[set(3, &[1, 2, 3])]).unwrap();
        assert_eq!((rep.expected, rep.computed), (0, 0));
        assert!(check_identity(IdentityId::CompNonzero, &[set(3, &[0, 1])]).is_err());
    }

    #[test]
    fn three_set_with_whole_field() {
        let g = SubsetMask::full(3).unwrap();
        let e = SubsetMask::empty(3).unwrap();
        let a = set(3, &[1, 5]);
        let b = set(3, &[0, 2, 6]);
        assert_eq!(r_abc(&a, &b, &g).unwrap(), 6);
        assert_eq!(r_abc(&a, &b, &e).unwrap(), 0);
        assert!(check_identity(IdentityId::ThreeSetC, &[a, b, g]).unwrap().pass);
    }

    #[test]
    fn hypothesis_violations_are_errors() {
        let a = set(3, &[1, 2]);
        assert!(check_identity(IdentityId::DisjointUnion, &[a.clone(), set(3, &[2])]).is_err());
        assert!(check_identity(IdentityId::Char2Union, &[set(3, &[5]), set(3, &[6])]).is_err());
        assert!(check_identity(IdentityId::Char2Union, &[set(3, &[0]), set(3, &[6])]).is_err());
        assert!(check_identity(IdentityId::ZeroLowerBound, &[a.clone()]).is_err());
        assert!(check_identity(IdentityId::Mod6, &[set(3, &[0])]).is_err());
        assert!(check_identity(IdentityId::Complement, &[a.clone(), a.clone()]).is_err());
        assert!(check_identity(IdentityId::PairBound, &[set(3, &[1, 2]), set(3, &[1]), a]).is_err());
    }

    #[test]
    fn exhaustive_n2_passes() {
        let rep = exhaustive_sweep(2).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        let (_, cor4) = rep.tallies.iter().find(|(id, _)| *id == IdentityId::Cor4).unwrap();
        assert_eq!(cor4.checked, 4096);
    }

    #[test]
    fn random_sweep_is_deterministic() {
        let a = random_sweep(4, 200, 7);
        let b = random_sweep(4, 200, 7);
        assert!(a.all_passed());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for (_, t) in &a.tallies {
            assert_eq!(t.skipped, 0, "sampler broke a hypothesis");
        }
    }

    #[test]
    fn samplers_hit_subgroups() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let hits = (0..500)
            .filter(|_| {
                let v = sample_inputs(IdentityId::Subgroup, 4, &mut rng);
                is_subgroup(&v[0])
            })
            .count();
        assert!(hits > 50);
    }
}
