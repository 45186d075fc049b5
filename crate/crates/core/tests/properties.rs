use std::collections::BTreeSet;

use gf2_rvalues::compare::compare;
use gf2_rvalues::construct::{assemble_full, construct_pool, WitnessPool};
use gf2_rvalues::enumerate::{enumerate_combinations, enumerate_sharded, SweepOptions};
use gf2_rvalues::{delta_add, delta_remove, r, r_abc, FieldSpec, SpectrumTable, SubsetMask, ZeroClass};
use proptest::prelude::*;

fn naive(a: &[u32], b: &[u32], c: &[u32]) -> u32 {
    let c: BTreeSet<u32> = c.iter().copied().collect();
    let mut count = 0;
    for &x in a {
        for &y in b {
            if c.contains(&(x ^ y)) {
                count += 1;
            }
        }
    }
    count
}

fn subset(n: u32) -> impl Strategy<Value = SubsetMask> {
    proptest::collection::btree_set(0..(1u32 << n), 0..=(1usize << n))
        .prop_map(move |s| SubsetMask::from_elements(n, s).unwrap())
}

fn field_and_sets() -> impl Strategy<Value = (u32, SubsetMask, SubsetMask, SubsetMask)> {
    (2u32..=8).prop_flat_map(|n| (Just(n), subset(n), subset(n), subset(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn r_abc_matches_pair_loop((_, a, b, c) in field_and_sets()) {
        prop_assert_eq!(r_abc(&a, &b, &c).unwrap(), naive(&a.elements(), &b.elements(), &c.elements()));
    }

    #[test]
    fn r_is_symmetric_in_roles((_, a, b, c) in field_and_sets()) {
        let abc = r_abc(&a, &b, &c).unwrap();
        prop_assert_eq!(abc, r_abc(&b, &a, &c).unwrap());
        prop_assert_eq!(abc, r_abc(&a, &c, &b).unwrap());
        prop_assert_eq!(abc, r_abc(&c, &b, &a).unwrap());
    }

    #[test]
    fn deltas_match_recomputation((n, a, _, _) in field_and_sets(), x in any::<u32>()) {
        let f = FieldSpec::with_default_poly(n).unwrap();
        let x = f.element(x % f.order()).unwrap();
        let base = r(&a) as i64;
        if a.contains(x) {
            prop_assert_eq!(base + delta_remove(&a, x).unwrap(), r(&a.without(x)) as i64);
        } else {
            prop_assert_eq!(base + delta_add(&a, x).unwrap(), r(&a.with(x)) as i64);
        }
    }

    #[test]
    fn translation_preserves_sizes_and_shifts_sums((n, a, b, _) in field_and_sets(), x in any::<u32>()) {
        let f = FieldSpec::with_default_poly(n).unwrap();
        let x = f.element(x % f.order()).unwrap();
        let ta = a.translate(x);
        prop_assert_eq!(ta.len(), a.len());
        prop_assert_eq!(ta.translate(x), a.clone());
        // (a + x) + (b + x) = a + b, so translating both A and B leaves r(A, B, C) unchanged
        prop_assert_eq!(r_abc(&ta, &b.translate(x), &b).unwrap(), r_abc(&a, &b, &b).unwrap());
    }

    #[test]
    fn zero_free_r_is_multiple_of_six((_, a, _, _) in field_and_sets()) {
        let zero = FieldSpec::with_default_poly(a.n()).unwrap().element(0).unwrap();
        let z = a.without(zero);
        prop_assert_eq!(r(&z) % 6, 0);
        prop_assert_eq!(r(&z.with(zero)), r(&z) + 3 * z.len() as u32 + 1);
    }

    #[test]
    fn hex_round_trip((n, a, _, _) in field_and_sets()) {
        prop_assert_eq!(SubsetMask::from_hex(n, &a.to_hex()).unwrap(), a);
    }

    #[test]
    fn combinations_agree_with_sweep(n in 3u32..=4, lo in 0usize..=4, span in 0usize..=3) {
        let hi = (lo + span).min(1 << (n - 1));
        let lo = lo.min(hi);
        let comb = enumerate_combinations(n, lo..=hi, true).unwrap();
        let sweep = enumerate_sharded(SweepOptions::half(n).with_counts(true), 1).unwrap();
        for m in lo..=hi {
            prop_assert_eq!(comb.values(m, ZeroClass::ZeroFree), sweep.values(m, ZeroClass::ZeroFree));
            prop_assert_eq!(
                comb.entry(m, ZeroClass::ZeroFree).map(|e| e.counts.clone()),
                sweep.entry(m, ZeroClass::ZeroFree).map(|e| e.counts.clone())
            );
        }
    }
}

#[test]
fn sweep_matches_naive_spectrum_n3() {
    let sweep = enumerate_sharded(SweepOptions::half(3), 1).unwrap().extend_full().unwrap();
    let mut want: Vec<[BTreeSet<u32>; 2]> = vec![Default::default(); 9];
    for w in 0u32..256 {
        let el: Vec<u32> = (0..8).filter(|i| w >> i & 1 == 1).collect();
        let class = usize::from(w & 1 == 1);
        want[el.len()][class].insert(naive(&el, &el, &el));
    }
    for (m, [zf, cz]) in want.iter().enumerate() {
        assert_eq!(&sweep.values(m, ZeroClass::ZeroFree), zf, "size {m}");
        assert_eq!(&sweep.values(m, ZeroClass::ContainsZero), cz, "size {m}");
    }
}

#[test]
fn construction_equals_sweep_n4() {
    let built = assemble_full(&construct_pool(4).unwrap()).unwrap();
    let swept = enumerate_sharded(SweepOptions::half(4), 4).unwrap().extend_full().unwrap();
    let report = compare(&built, &swept).unwrap();
    assert!(report.is_empty(), "{}", report.render("built", "swept"));
}

#[test]
fn pool_and_table_files_round_trip() {
    let pool = construct_pool(4).unwrap();
    let mut buf = Vec::new();
    pool.write_jsonl(&mut buf).unwrap();
    let back = WitnessPool::read_jsonl(&buf[..]).unwrap();
    assert_eq!(back.len(), pool.len());
    let table = assemble_full(&pool).unwrap();
    let again = SpectrumTable::from_json(&table.to_json().unwrap()).unwrap();
    assert!(compare(&table, &again).unwrap().is_empty());
    again.verify_witnesses().unwrap();
}
