//! Value-set differences between two spectrum tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::spectrum::{SpectrumTable, ZeroClass};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellDiff {
    pub only_a: BTreeSet<u32>,
    pub only_b: BTreeSet<u32>,
    pub shared: BTreeSet<u32>,
}

impl CellDiff {
    pub fn is_empty(&self) -> bool {
        self.only_a.is_empty() && self.only_b.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompareReport {
    pub n: u32,
    pub cells: BTreeMap<(usize, ZeroClass), CellDiff>,
}

impl CompareReport {
    pub fn is_empty(&self) -> bool {
        self.cells.values().all(CellDiff::is_empty)
    }

    pub fn only_a_count(&self) -> usize {
        self.cells.values().map(|c| c.only_a.len()).sum()
    }

    pub fn only_b_count(&self) -> usize {
        self.cells.values().map(|c| c.only_b.len()).sum()
    }

    /// One line per differing cell, then a summary line.
    pub fn render(&self, label_a: &str, label_b: &str) -> String {
        let join = |v: &BTreeSet<u32>| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        for (&(size, class), c) in &self.cells {
            if c.is_empty() {
                continue;
            }
            let _ = write!(s, "size {size} {}:", class.as_str());
            if !c.only_a.is_empty() {
                let _ = write!(s, " only in {label_a}: {};", join(&c.only_a));
            }
            if !c.only_b.is_empty() {
                let _ = write!(s, " only in {label_b}: {};", join(&c.only_b));
            }
            s.pop();
            s.push('\n');
        }
        let shared: usize = self.cells.values().map(|c| c.shared.len()).sum();
        let _ = writeln!(
            s,
            "{shared} shared, {} only in {label_a}, {} only in {label_b}",
            self.only_a_count(),
            self.only_b_count()
        );
        s
    }
}

/// Per (size, class): values only in `a`, only in `b`, and in both.
pub fn compare(a: &SpectrumTable, b: &SpectrumTable) -> Result<CompareReport> {
    if a.n != b.n {
        return Err(Error::FieldMismatch(a.n, b.n));
    }
    let keys: BTreeSet<(usize, ZeroClass)> = a.entries.keys().chain(b.entries.keys()).copied().collect();
    let cells = keys
        .into_iter()
        .map(|(size, class)| {
            let va = a.values(size, class);
            let vb = b.values(size, class);
            let cell = CellDiff {
                only_a: va.difference(&vb).copied().collect(),
                only_b: vb.difference(&va).copied().collect(),
                shared: va.intersection(&vb).copied().collect(),
            };
            ((size, class), cell)
        })
        .collect();
    Ok(CompareReport { n: a.n, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diff_and_self() {
        let mut a = SpectrumTable::new(3, None);
        a.record(3, ZeroClass::ZeroFree, 0, None, None);
        a.record(3, ZeroClass::ZeroFree, 6, None, None);
        let mut b = SpectrumTable::new(3, None);
        b.record(3, ZeroClass::ZeroFree, 6, None, None);
        b.record(4, ZeroClass::ZeroFree, 0, None, None);
        assert!(compare(&a, &a).unwrap().is_empty());
        let rep = compare(&a, &b).unwrap();
        assert!(!rep.is_empty());
        assert_eq!(rep.only_a_count(), 1);
        assert_eq!(rep.only_b_count(), 1);
        assert_eq!(
            rep.render("a", "b"),
            "size 3 zero_free: only in a: 0\nsize 4 zero_free: only in b: 0\n1 shared, 1 only in a, 1 only in b\n"
        );
        assert!(compare(&a, &SpectrumTable::new(4, None)).is_err());
    }
}
