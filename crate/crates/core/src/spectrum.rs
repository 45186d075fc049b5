//! Spectrum tables: achievable r-values per (subset size, zero class), with
//! optional counts and one witness per value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::rvalue::r;
use crate::subset::SubsetMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroClass {
    ZeroFree,
    ContainsZero,
}

impl ZeroClass {
    pub fn of(mask: &SubsetMask) -> ZeroClass {
        if mask.contains_zero() {
            ZeroClass::ContainsZero
        } else {
            ZeroClass::ZeroFree
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ZeroClass::ZeroFree => "zero_free",
            ZeroClass::ContainsZero => "contains_zero",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpectrumEntry {
    pub r_values: BTreeSet<u32>,
    pub counts: Option<BTreeMap<u32, u64>>,
    pub witnesses: BTreeMap<u32, SubsetMask>,
}

impl SpectrumEntry {
    /// Records one achievement of `r`; the smallest witness mask wins so the
    /// result does not depend on visiting order.
    pub fn record(&mut self, r: u32, witness: Option<SubsetMask>, count: Option<u64>) {
        self.r_values.insert(r);
        if let Some(c) = count {
            *self.counts.get_or_insert_with(BTreeMap::new).entry(r).or_insert(0) += c;
        }
        if let Some(w) = witness {
            match self.witnesses.get(&r) {
                Some(old) if *old <= w => {}
                _ => {
                    self.witnesses.insert(r, w);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub n: u32,
    pub poly: Option<u32>,
    pub entries: BTreeMap<(usize, ZeroClass), SpectrumEntry>,
}

impl SpectrumTable {
    pub fn new(n: u32, poly: Option<u32>) -> Self {
        SpectrumTable { n, poly, entries: BTreeMap::new() }
    }

    pub fn entry(&self, size: usize, class: ZeroClass) -> Option<&SpectrumEntry> {
        self.entries.get(&(size, class))
    }

    pub fn entry_mut(&mut self, size: usize, class: ZeroClass) -> &mut SpectrumEntry {
        self.entries.entry((size, class)).or_default()
    }

    pub fn values(&self, size: usize, class: ZeroClass) -> BTreeSet<u32> {
        self.entry(size, class).map(|e| e.r_values.clone()).unwrap_or_default()
    }

    /// Both classes together: the full spectrum at `size`.
    pub fn full_values(&self, size: usize) -> BTreeSet<u32> {
        let mut v = self.values(size, ZeroClass::ZeroFree);
        v.extend(self.values(size, ZeroClass::ContainsZero));
        v
    }

    pub fn record(&mut self, size: usize, class: ZeroClass, r: u32, witness: Option<SubsetMask>, count: Option<u64>) {
        self.entry_mut(size, class).record(r, witness, count);
    }

    pub fn max_size(&self, class: ZeroClass) -> Option<usize> {
        self.entries.keys().filter(|(_, c)| *c == class).map(|(s, _)| *s).max()
    }

    /// Sum of all counts, when every entry carries counts.
    pub fn total_count(&self) -> Option<u64> {
        self.entries.values().map(|e| e.counts.as_ref().map(|c| c.values().sum::<u64>())).sum()
    }

    /// Re-derives every witness's size, class and r-value.
    pub fn verify_witnesses(&self) -> Result<()> {
        for (&(size, class), entry) in &self.entries {
            for (&rv, w) in &entry.witnesses {
                if w.n() != self.n {
                    return Err(Error::FieldMismatch(self.n, w.n()));
                }
                if w.len() != size || ZeroClass::of(w) != class || !entry.r_values.contains(&rv) {
                    return Err(Error::Table(format!(
                        "witness {} does not belong to size {size} {} value {rv}",
                        w.to_hex(),
                        class.as_str()
                    )));
                }
                let computed = r(w);
                if computed != rv {
                    return Err(Error::BadWitness { size, claimed: rv, computed });
                }
            }
        }
        Ok(())
    }

    /// Structural checks that hold for any correct table: zero-free values are
    /// multiples of 6 under the `⌊k(k-1)/6⌋·6` bound, and zero-containing values
    /// respect `r ≥ 3k − 2`.
    pub fn check_bounds(&self) -> Result<()> {
        for (&(size, class), entry) in &self.entries {
            for &v in &entry.r_values {
                let k = size as u64;
                let ok = match class {
                    ZeroClass::ZeroFree => v % 6 == 0 && (v as u64) <= k * k.saturating_sub(1) / 6 * 6,
                    ZeroClass::ContainsZero => v as u64 + 2 >= 3 * k,
                };
                if !ok {
                    return Err(Error::Table(format!(
                        "value {v} at size {size} {} violates the r-value bounds",
                        class.as_str()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Completes a table holding zero-free sizes `0..=2^(n-1)`: zero-containing
    /// sizes by adding `3s + 1`, large zero-free sizes through the complement in
    /// the nonzero elements, large zero-containing sizes through the whole-field
    /// complement. Every derived witness is re-verified.
    pub fn extend_full(&self) -> Result<SpectrumTable> {
        let n = self.n;
        let g = 1i64 << n;
        let half = 1usize << (n - 1);
        let top = (1usize << n) - 1;
        let mut out = SpectrumTable::new(n, self.poly);
        for s in 0..=half {
            let e = self
                .entry(s, ZeroClass::ZeroFree)
                .ok_or_else(|| Error::Table(format!("missing zero-free size {s}")))?;
            if e.r_values.is_empty() {
                return Err(Error::Table(format!("empty zero-free size {s}")));
            }
            out.entries.insert((s, ZeroClass::ZeroFree), e.clone());
        }
        let derive = |out: &mut SpectrumTable,
                      src: &SpectrumEntry,
                      size: usize,
                      class: ZeroClass,
                      map_r: &dyn Fn(i64) -> i64,
                      map_w: &dyn Fn(&SubsetMask) -> Result<SubsetMask>|
         -> Result<()> {
            let dst = out.entry_mut(size, class);
            for &rv in &src.r_values {
                let mapped = map_r(rv as i64);
                let mapped = u32::try_from(mapped)
                    .map_err(|_| Error::Table(format!("derived value {mapped} out of range")))?;
                let count = src.counts.as_ref().map(|c| c.get(&rv).copied().unwrap_or(0));
                let witness = src.witnesses.get(&rv).map(map_w).transpose()?;
                dst.record(mapped, witness, count);
            }
            Ok(())
        };
        for k in 0..half - 1 {
            let src = self.entry(k, ZeroClass::ZeroFree).expect("checked above").clone();
            let kk = k as i64;
            derive(
                &mut out,
                &src,
                top - k,
                ZeroClass::ZeroFree,
                &|rv| g * g - 3 * (g - kk - 1) * (kk + 1) - (3 * kk + 1) - rv,
                &|w| w.complement_nonzero(),
            )?;
        }
        for s in 0..=half {
            let src = out.entry(s, ZeroClass::ZeroFree).expect("present").clone();
            let ss = s as i64;
            derive(&mut out, &src, s + 1, ZeroClass::ContainsZero, &|rv| rv + 3 * ss + 1, &|w| {
                Ok(w.with(FieldElement::ZERO))
            })?;
        }
        for k in 0..half.saturating_sub(1) {
            let src = out.entry(k, ZeroClass::ZeroFree).expect("present").clone();
            let kk = k as i64;
            derive(
                &mut out,
                &src,
                (1usize << n) - k,
                ZeroClass::ContainsZero,
                &|rv| g * g - 3 * g * kk + 3 * kk * kk - rv,
                &|w| Ok(w.complement()),
            )?;
        }
        out.verify_witnesses()?;
        Ok(out)
    }

    /// Union of value sets, summed counts, smallest witness kept.
    pub fn merge(&mut self, other: &SpectrumTable) -> Result<()> {
        if self.n != other.n {
            return Err(Error::FieldMismatch(self.n, other.n));
        }
        for (key, entry) in &other.entries {
            let dst = self.entries.entry(*key).or_default();
            for &rv in &entry.r_values {
                let count = entry.counts.as_ref().map(|c| c.get(&rv).copied().unwrap_or(0));
                dst.record(rv, entry.witnesses.get(&rv).cloned(), count);
            }
        }
        Ok(())
    }

    /// Keeps only the given class (and sizes `<= max_size`).
    pub fn restricted(&self, class: ZeroClass, max_size: usize) -> SpectrumTable {
        SpectrumTable {
            n: self.n,
            poly: self.poly,
            entries: self
                .entries
                .iter()
                .filter(|((s, c), _)| *c == class && *s <= max_size)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TableWire::from(self))?)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_json()?.as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    }

    /// Parses and re-verifies every witness.
    pub fn from_json(text: &str) -> Result<SpectrumTable> {
        let wire: TableWire = serde_json::from_str(text)?;
        let table = wire.into_table()?;
        table.verify_witnesses()?;
        Ok(table)
    }

    pub fn read_json<R: Read>(mut rd: R) -> Result<SpectrumTable> {
        let mut s = String::new();
        rd.read_to_string(&mut s)?;
        SpectrumTable::from_json(&s)
    }

    /// One row per (size, class, r): `size,class,r,count,witness`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["size", "class", "r", "count", "witness"])?;
        for (&(size, class), entry) in &self.entries {
            for &rv in &entry.r_values {
                let count = entry
                    .counts
                    .as_ref()
                    .and_then(|c| c.get(&rv))
                    .map(|c| c.to_string())
                    .unwrap_or_default();
                let witness = entry.witnesses.get(&rv).map(|m| m.to_hex()).unwrap_or_default();
                wr.write_record([size.to_string(), class.as_str().to_string(), rv.to_string(), count, witness])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// Text grid, one row per size: zero-free values, a `|` divider, then the
    /// zero-containing values.
    pub fn render_grid(&self) -> String {
        let mut sizes: BTreeSet<usize> = self.entries.keys().map(|(s, _)| *s).collect();
        if sizes.is_empty() {
            sizes.insert(0);
        }
        let join = |v: BTreeSet<u32>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        let _ = writeln!(out, "F_2^{} spectrum (size : zero-free | contains 0)", self.n);
        for s in sizes {
            let zf = join(self.values(s, ZeroClass::ZeroFree));
            let cz = join(self.values(s, ZeroClass::ContainsZero));
            let line = format!("{s:>4} : {zf} | {cz}");
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct EntryWire {
    size: usize,
    class: ZeroClass,
    r_values: Vec<u32>,
    counts: Option<BTreeMap<u32, u64>>,
    witnesses: BTreeMap<u32, String>,
}

#[derive(Serialize, Deserialize)]
struct TableWire {
    n: u32,
    poly: Option<String>,
    entries: Vec<EntryWire>,
}

impl From<&SpectrumTable> for TableWire {
    fn from(t: &SpectrumTable) -> Self {
        let entries = t
            .entries
            .iter()
            .map(|(&(size, class), e)| EntryWire {
                size,
                class,
                r_values: e.r_values.iter().copied().collect(),
                counts: e.counts.clone(),
                witnesses: e.witnesses.iter().map(|(k, w)| (*k, w.to_hex())).collect(),
            })
            .collect();
        TableWire { n: t.n, poly: t.poly.map(|p| format!("{p:#X}")), entries }
    }
}

impl TableWire {
    fn into_table(self) -> Result<SpectrumTable> {
        crate::field::check_dimension(self.n)?;
        let poly = match self.poly {
            None => None,
            Some(p) => Some(
                u32::from_str_radix(p.trim_start_matches("0x").trim_start_matches("0X"), 16)
                    .map_err(|e| Error::Table(format!("bad poly {p:?}: {e}")))?,
            ),
        };
        let mut table = SpectrumTable::new(self.n, poly);
        for e in self.entries {
            let mut entry = SpectrumEntry {
                r_values: e.r_values.into_iter().collect(),
                counts: e.counts,
                ..Default::default()
            };
            for (k, v) in e.witnesses {
                entry.witnesses.insert(k, SubsetMask::from_hex(self.n, &v)?);
            }
            if table.entries.insert((e.size, e.class), entry).is_some() {
                return Err(Error::Table(format!("duplicate entry for size {} {}", e.size, e.class.as_str())));
            }
        }
        Ok(table)
    }
}
