//! Published reference data: the `GF(2^4)` breakdown for sizes 5..7 by how
//! many elements lie in the subfield, and a partial `GF(2^6)` table.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rvalue::r_word;
use crate::spectrum::{SpectrumTable, ZeroClass};

/// One row: `k` elements in the subfield `GF(2^3)`, `l` in the upper coset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRow {
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub values: &'static [u32],
}

/// Per-size group of rows with the published whole-size spectrum string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitGroup {
    pub m: usize,
    pub rows: Vec<SplitRow>,
    pub spectrum: &'static [u32],
}

impl SplitGroup {
    /// Union of the row values: the zero-free values at size `m`.
    pub fn row_union(&self) -> BTreeSet<u32> {
        self.rows.iter().flat_map(|r| r.values.iter().copied()).collect()
    }
}

const N4_ROWS: [(usize, &[&[u32]], &[u32]); 3] = [
    (5, &[&[0], &[0, 6, 12], &[0, 6, 12], &[0, 6, 12], &[0, 6], &[12]], &[0, 6, 12, 13, 19]),
    (
        6,
        &[&[0], &[6, 12], &[0, 12, 24], &[6, 12, 24], &[0, 6, 12], &[12], &[24]],
        &[0, 12, 18, 24, 42, 19, 25, 31, 43],
    ),
    (
        7,
        &[&[0], &[12, 18], &[0, 12, 18, 24], &[18, 24, 42], &[12, 18, 24], &[12, 18], &[24], &[42]],
        &[0, 18, 24, 30, 42, 22, 34, 40, 46, 64],
    ),
];

/// The `GF(2^4)` split table for sizes 5, 6, 7.
pub fn n4_split_table() -> Vec<SplitGroup> {
    N4_ROWS
        .iter()
        .map(|&(m, rows, spectrum)| SplitGroup {
            m,
            rows: rows
                .iter()
                .enumerate()
                .map(|(k, v)| SplitRow { m, k, l: m - k, values: v })
                .collect(),
            spectrum,
        })
        .collect()
}

/// Findings from checking the split table against computed spectra.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitReport {
    pub lines: Vec<String>,
    /// `(m, value, bound)` for published spectrum values above the zero-free
    /// bound `⌊m(m-1)/6⌋·6` that are also not zero-containing values at `m`.
    pub over_bound: Vec<(usize, u32, u32)>,
    /// Sizes whose row union differs from the computed zero-free values.
    pub row_mismatches: Vec<usize>,
    /// Sizes whose spectrum string differs from the computed full spectrum.
    pub spectrum_mismatches: Vec<usize>,
    /// `(m, s)`: the published spectrum string for `m` equals the computed full spectrum at `s ≠ m`.
    pub shifted_matches: Vec<(usize, usize)>,
    /// `(m, k, published, computed)` for individual rows that differ from exhaustive computation.
    pub split_mismatches: Vec<(usize, usize, BTreeSet<u32>, BTreeSet<u32>)>,
}

impl SplitReport {
    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

fn fmt_set(v: &BTreeSet<u32>) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

/// Exhaustive zero-free values at sizes 5..=7 of `GF(2^4)`, keyed by
/// `(m, k)` with `k` the number of elements below 8.
pub fn n4_split_values() -> BTreeMap<(usize, usize), BTreeSet<u32>> {
    let mut out: BTreeMap<(usize, usize), BTreeSet<u32>> = BTreeMap::new();
    for w in (0u64..1 << 16).filter(|w| w & 1 == 0) {
        let m = w.count_ones() as usize;
        if (5..=7).contains(&m) {
            let k = (w & 0xFF).count_ones() as usize;
            out.entry((m, k)).or_default().insert(r_word(w));
        }
    }
    out
}

/// Compares the split table with a computed full `GF(2^4)` spectrum.
pub fn split_report(full: &SpectrumTable) -> Result<SplitReport> {
    if full.n != 4 {
        return Err(Error::FieldMismatch(4, full.n));
    }
    let mut rep = SplitReport::default();
    let split = n4_split_values();
    for g in n4_split_table() {
        for row in &g.rows {
            let published: BTreeSet<u32> = row.values.iter().copied().collect();
            let computed = split.get(&(row.m, row.k)).cloned().unwrap_or_default();
            if published != computed {
                rep.lines.push(format!(
                    "m={} k={} l={}: row lists {} but the configuration attains {}",
                    row.m,
                    row.k,
                    row.l,
                    fmt_set(&published),
                    fmt_set(&computed)
                ));
                rep.split_mismatches.push((row.m, row.k, published, computed));
            }
        }
        let zf = full.values(g.m, ZeroClass::ZeroFree);
        let cz = full.values(g.m, ZeroClass::ContainsZero);
        let rows = g.row_union();
        let published: BTreeSet<u32> = g.spectrum.iter().copied().collect();
        let whole = full.full_values(g.m);
        if rows == zf {
            rep.lines.push(format!("m={}: row values {} match the zero-free spectrum", g.m, fmt_set(&rows)));
        } else {
            rep.row_mismatches.push(g.m);
            rep.lines.push(format!(
                "m={}: row values {} differ from the zero-free spectrum {}",
                g.m,
                fmt_set(&rows),
                fmt_set(&zf)
            ));
        }
        if published == whole {
            rep.lines.push(format!("m={}: spectrum {} matches", g.m, fmt_set(&published)));
            continue;
        }
        rep.spectrum_mismatches.push(g.m);
        rep.lines.push(format!(
            "m={}: spectrum {} differs from computed {} (zero-free {} | contains 0 {})",
            g.m,
            fmt_set(&published),
            fmt_set(&whole),
            fmt_set(&zf),
            fmt_set(&cz)
        ));
        let bound = (g.m * (g.m - 1) / 6 * 6) as u32;
        for &v in &published {
            if v % 6 == 0 && v > bound && !cz.contains(&v) {
                rep.over_bound.push((g.m, v, bound));
                rep.lines.push(format!(
                    "m={}: value {v} exceeds the zero-free bound {bound} for size {} and is not a zero-containing value",
                    g.m, g.m
                ));
            }
        }
        for s in 0..=16 {
            if s != g.m && full.full_values(s) == published {
                rep.shifted_matches.push((g.m, s));
                rep.lines.push(format!("m={}: spectrum string equals the computed full spectrum of size {s}", g.m));
            }
        }
    }
    Ok(rep)
}

/// The partial `GF(2^6)` zero-free table as `size,r` CSV.
pub const TABLE_N6_CSV: &str = include_str!("../data/n6_partial.csv");

#[derive(Deserialize)]
struct Pair {
    size: usize,
    r: u32,
}

/// Reads `size,r` pairs into a values-only zero-free table.
pub fn import_pairs<R: Read>(n: u32, rd: R) -> Result<SpectrumTable> {
    let mut table = SpectrumTable::new(n, None);
    let top = (1usize << n) - 1;
    for rec in csv::Reader::from_reader(rd).deserialize() {
        let p: Pair = rec?;
        if p.size > top {
            return Err(Error::Table(format!("size {} exceeds {top}", p.size)));
        }
        table.record(p.size, ZeroClass::ZeroFree, p.r, None, None);
    }
    table.check_bounds()?;
    Ok(table)
}

pub fn table_n6() -> SpectrumTable {
    import_pairs(6, TABLE_N6_CSV.as_bytes()).expect("bundled table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_rows_are_consistent() {
        for g in n4_split_table() {
            assert_eq!(g.rows.len(), g.m + 1);
            for r in &g.rows {
                assert_eq!(r.k + r.l, g.m);
            }
        }
    }

    #[test]
    fn split_values_cover_all_rows() {
        let v = n4_split_values();
        assert_eq!(v.len(), 6 + 7 + 8);
        assert_eq!(v[&(7, 2)], [12, 18, 24].into());
        assert_eq!(v[&(5, 1)], [0, 6, 12].into());
    }

    #[test]
    fn n6_table_shape() {
        let t = table_n6();
        for s in 0..=32 {
            assert!(!t.values(s, ZeroClass::ZeroFree).is_empty(), "size {s}");
        }
        assert_eq!(t.values(7, ZeroClass::ZeroFree), [0, 6, 12, 18, 24, 42].into());
        let s32 = t.values(32, ZeroClass::ZeroFree);
        assert_eq!((s32.first(), s32.last(), s32.len()), (Some(&0), Some(&930), 38));
    }

    #[test]
    fn import_rejects_bad_rows() {
        assert!(import_pairs(3, "size,r\n9,0\n".as_bytes()).is_err());
        assert!(import_pairs(3, "size,r\n3,5\n".as_bytes()).is_err());
        assert!(import_pairs(3, "size,value\n3,0\n".as_bytes()).is_err());
    }
}
