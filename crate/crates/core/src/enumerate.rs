//! Exhaustive zero-free spectra by Gray-code sweep.
//!
//! The sweep walks every subset of `GF(2^n) \ {0}` in reflected Gray-code
//! order, so consecutive subsets differ by one element and the r-value is
//! maintained with one translate/AND/popcount per step. Sharding fixes the
//! membership of the top elements; each shard walks the remaining ones.
//!
//! Witnesses are the numerically smallest mask per (size, r), which makes the
//! output independent of shard layout and visiting order.

use std::ops::RangeInclusive;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::check_dimension;
use crate::rvalue::{delta_word_zero_free, r_word};
use crate::spectrum::{SpectrumTable, ZeroClass};
use crate::subset::SubsetMask;

/// Largest n the Gray sweep accepts (2^31 subsets).
pub const MAX_SWEEP_N: u32 = 5;
/// Largest n the fixed-size combinations mode accepts (one 64-bit word).
pub const MAX_COMBINATIONS_N: u32 = 6;

const NONE: u64 = u64::MAX;

/// Membership of the top `fixed` nonzero elements is pinned to the bits of `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShardSpec {
    pub fixed: u32,
    pub index: u64,
}

impl ShardSpec {
    pub const WHOLE: ShardSpec = ShardSpec { fixed: 0, index: 0 };

    /// Shard `index` of `count`; `count` must be a power of two.
    pub fn new(index: u64, count: u64) -> Result<Self> {
        if count == 0 || !count.is_power_of_two() {
            return Err(Error::Shard(format!("shard count {count} is not a power of two")));
        }
        if index >= count {
            return Err(Error::Shard(format!("shard index {index} out of range 0..{count}")));
        }
        Ok(ShardSpec { fixed: count.trailing_zeros(), index })
    }

    pub fn count(&self) -> u64 {
        1 << self.fixed
    }

    pub fn all(count: u64) -> Result<Vec<ShardSpec>> {
        (0..count.max(1)).map(|i| ShardSpec::new(i, count)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub n: u32,
    pub max_size: usize,
    pub counts: bool,
}

impl SweepOptions {
    /// Sizes `0..=2^(n-1)`, which is all that extend_full needs.
    pub fn half(n: u32) -> Self {
        SweepOptions { n, max_size: 1 << (n - 1), counts: false }
    }

    pub fn with_counts(mut self, counts: bool) -> Self {
        self.counts = counts;
        self
    }

    fn validate(&self) -> Result<()> {
        check_dimension(self.n)?;
        if self.n > MAX_SWEEP_N {
            return Err(Error::TooLarge(self.n));
        }
        let top = (1usize << self.n) - 1;
        if self.max_size > top {
            return Err(Error::Shard(format!("max_size {} exceeds {top}", self.max_size)));
        }
        Ok(())
    }
}

/// Per-(size, r) witness and count arrays, indexed `size * width + r / 6`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Tally {
    width: usize,
    witness: Vec<u64>,
    counts: Option<Vec<u64>>,
}

impl Tally {
    fn new(n: u32, counts: bool) -> Self {
        let sizes = 1usize << n;
        let top = sizes - 1;
        let width = top * top.saturating_sub(1) / 6 + 1;
        Tally {
            width,
            witness: vec![NONE; sizes * width],
            counts: counts.then(|| vec![0; sizes * width]),
        }
    }

    #[inline(always)]
    fn visit(&mut self, size: u32, r6: u32, mask: u64) {
        let idx = size as usize * self.width + r6 as usize;
        let w = &mut self.witness[idx];
        if mask < *w {
            *w = mask;
        }
        if let Some(c) = &mut self.counts {
            c[idx] += 1;
        }
    }

    fn to_table(&self, n: u32, max_size: usize) -> SpectrumTable {
        let mut table = SpectrumTable::new(n, None);
        for size in 0..=max_size {
            for r6 in 0..self.width {
                let idx = size * self.width + r6;
                let w = self.witness[idx];
                if w == NONE {
                    continue;
                }
                let witness = SubsetMask::from_word(n, w).expect("mask inside field");
                let count = self.counts.as_ref().map(|c| c[idx]);
                table.record(size, ZeroClass::ZeroFree, 6 * r6 as u32, Some(witness), count);
            }
        }
        table
    }
}

/// Resumable Gray-code walk over one shard.
#[derive(Debug, Clone)]
pub struct GrayWalk {
    opts: SweepOptions,
    shard: ShardSpec,
    free: u32,
    step: u64,
    mask: u64,
    r6: u32,
    size: u32,
    tally: Tally,
}

impl GrayWalk {
    pub fn new(opts: SweepOptions, shard: ShardSpec) -> Result<Self> {
        opts.validate()?;
        let nonzero = (1u32 << opts.n) - 1;
        if shard.fixed > nonzero {
            return Err(Error::Shard(format!("cannot fix {} of {nonzero} elements", shard.fixed)));
        }
        let free = nonzero - shard.fixed;
        let mut mask = 0u64;
        for bit in 0..shard.fixed {
            if (shard.index >> bit) & 1 == 1 {
                mask |= 1u64 << (free + 1 + bit);
            }
        }
        let r = r_word(mask);
        Ok(GrayWalk {
            opts,
            shard,
            free,
            step: 0,
            mask,
            r6: r / 6,
            size: mask.count_ones(),
            tally: Tally::new(opts.n, opts.counts),
        })
    }

    pub fn total_steps(&self) -> u64 {
        1u64 << self.free
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.total_steps()
    }

    pub fn shard(&self) -> ShardSpec {
        self.shard
    }

    /// Visits up to `budget` further subsets; returns true once the shard is exhausted.
    pub fn run(&mut self, budget: u64) -> bool {
        let total = self.total_steps();
        let end = self.step.saturating_add(budget).min(total);
        let max_size = self.opts.max_size as u32;
        let (mut mask, mut r6, mut size) = (self.mask, self.r6, self.size);
        let mut step = self.step;
        if step == 0 && end > 0 {
            if size <= max_size {
                self.tally.visit(size, r6, mask);
            }
            step = 1;
        }
        while step < end {
            let x = step.trailing_zeros() + 1;
            let bit = 1u64 << x;
            if mask & bit != 0 {
                mask ^= bit;
                r6 -= delta_word_zero_free(mask, x) / 3 / 2;
                size -= 1;
            } else {
                r6 += delta_word_zero_free(mask, x) / 3 / 2;
                mask |= bit;
                size += 1;
            }
            if size <= max_size {
                self.tally.visit(size, r6, mask);
            }
            step += 1;
        }
        self.mask = mask;
        self.r6 = r6;
        self.size = size;
        self.step = step;
        self.is_done()
    }

    pub fn table(&self) -> SpectrumTable {
        self.tally.to_table(self.opts.n, self.opts.max_size)
    }

    pub fn into_result(self) -> ShardResult {
        ShardResult { shard: self.shard, visited: self.step, table: self.table() }
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            opts: self.opts,
            shard: self.shard,
            step: self.step,
            mask: self.mask,
            r: self.r6 * 6,
            tally: self.tally.clone(),
        }
    }

    pub fn resume(cp: Checkpoint) -> Result<Self> {
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", cp.version)));
        }
        let fresh = GrayWalk::new(cp.opts, cp.shard)?;
        if cp.step > fresh.total_steps() {
            return Err(Error::Checkpoint("step beyond end of walk".into()));
        }
        if cp.tally.width != fresh.tally.width
            || cp.tally.witness.len() != fresh.tally.witness.len()
            || cp.tally.counts.as_ref().map(Vec::len) != fresh.tally.counts.as_ref().map(Vec::len)
        {
            return Err(Error::Checkpoint("tally dimensions do not match the options".into()));
        }
        // the fixed bits and the Gray position pin down the current subset
        let expected_mask = (fresh.mask & !((1u64 << (fresh.free + 1)) - 1))
            | (gray_prefix(cp.step) << 1);
        if cp.mask != expected_mask {
            return Err(Error::Checkpoint("subset does not match the Gray position".into()));
        }
        if r_word(cp.mask) != cp.r {
            return Err(Error::Checkpoint("stored r-value does not match the subset".into()));
        }
        Ok(GrayWalk {
            opts: cp.opts,
            shard: cp.shard,
            free: fresh.free,
            step: cp.step,
            mask: cp.mask,
            r6: cp.r / 6,
            size: cp.mask.count_ones(),
            tally: cp.tally,
        })
    }
}

/// Free-element membership after visiting steps `0..step` (Gray code of `step - 1`).
fn gray_prefix(step: u64) -> u64 {
    if step == 0 {
        0
    } else {
        let i = step - 1;
        i ^ (i >> 1)
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// Persisted walk state: options, shard, Gray position, current subset and
/// r-value, and the partial tally. Stored as JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub opts: SweepOptions,
    pub shard: ShardSpec,
    pub step: u64,
    pub mask: u64,
    pub r: u32,
    tally: Tally,
}

impl Checkpoint {
    /// Writes through a temporary file so an interrupted write never leaves a torn checkpoint.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec(self)?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let bytes = std::fs::read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| Error::Checkpoint(format!("corrupt checkpoint: {e}")))
    }
}

#[derive(Debug, Clone)]
pub struct ShardResult {
    pub shard: ShardSpec,
    pub visited: u64,
    pub table: SpectrumTable,
}

/// A set of shard walks advanced together in parallel rounds, so a sharded
/// sweep can be checkpointed to one file between rounds.
#[derive(Debug, Clone)]
pub struct SweepRun {
    walks: Vec<GrayWalk>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCheckpoint {
    pub version: u32,
    pub shards: Vec<Checkpoint>,
}

impl SweepRun {
    pub fn new(opts: SweepOptions, shard_count: u64) -> Result<Self> {
        let walks = ShardSpec::all(shard_count)?
            .into_iter()
            .map(|s| GrayWalk::new(opts, s))
            .collect::<Result<_>>()?;
        Ok(SweepRun { walks })
    }

    pub fn resume(cp: RunCheckpoint) -> Result<Self> {
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", cp.version)));
        }
        let first = cp.shards.first().ok_or_else(|| Error::Checkpoint("no shards".into()))?;
        let (opts, count) = (first.opts, first.shard.count());
        if cp.shards.len() as u64 != count {
            return Err(Error::Checkpoint(format!("{} shards stored, layout needs {count}", cp.shards.len())));
        }
        let mut walks = Vec::with_capacity(cp.shards.len());
        for (i, sc) in cp.shards.into_iter().enumerate() {
            if sc.opts != opts || sc.shard != ShardSpec::new(i as u64, count)? {
                return Err(Error::Checkpoint(format!("shard {i} does not belong to this run")));
            }
            walks.push(GrayWalk::resume(sc)?);
        }
        Ok(SweepRun { walks })
    }

    /// Checks that the stored run has the requested options.
    pub fn matches(&self, opts: SweepOptions) -> bool {
        self.walks.first().is_some_and(|w| w.opts == opts)
    }

    pub fn checkpoint(&self) -> RunCheckpoint {
        RunCheckpoint { version: CHECKPOINT_VERSION, shards: self.walks.iter().map(GrayWalk::checkpoint).collect() }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec(&self.checkpoint())?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<SweepRun> {
        let bytes = std::fs::read(path)?;
        let cp: RunCheckpoint =
            serde_json::from_slice(&bytes).map_err(|e| Error::Checkpoint(format!("corrupt checkpoint: {e}")))?;
        SweepRun::resume(cp)
    }

    pub fn done(&self) -> u64 {
        self.walks.iter().map(GrayWalk::step).sum()
    }

    pub fn total(&self) -> u64 {
        self.walks.iter().map(GrayWalk::total_steps).sum()
    }

    pub fn is_done(&self) -> bool {
        self.walks.iter().all(GrayWalk::is_done)
    }

    /// Advances every shard by up to `steps` subsets in total, split evenly.
    pub fn run_round(&mut self, steps: u64) {
        let per = (steps / self.walks.len() as u64).max(1);
        self.walks.par_iter_mut().for_each(|w| {
            w.run(per);
        });
    }

    pub fn finish(self) -> Result<SpectrumTable> {
        if !self.is_done() {
            return Err(Error::Shard("run is not finished".into()));
        }
        let results: Vec<ShardResult> = self.walks.into_iter().map(GrayWalk::into_result).collect();
        merge_shards(&results)
    }
}

/// Merges tables: union of values, summed counts, smallest witness.
pub fn merge_tables(tables: &[SpectrumTable]) -> Result<SpectrumTable> {
    let first = tables.first().ok_or_else(|| Error::Table("nothing to merge".into()))?;
    let mut out = SpectrumTable::new(first.n, first.poly);
    for t in tables {
        out.merge(t)?;
    }
    Ok(out)
}

/// Merges shard results, rejecting overlapping or inconsistent shards.
pub fn merge_shards(results: &[ShardResult]) -> Result<SpectrumTable> {
    let first = results.first().ok_or_else(|| Error::Shard("no shards".into()))?;
    let mut seen = std::collections::BTreeSet::new();
    for res in results {
        if res.shard.fixed != first.shard.fixed {
            return Err(Error::Shard("shards come from different layouts".into()));
        }
        if !seen.insert(res.shard.index) {
            return Err(Error::Shard(format!("shard {} appears twice", res.shard.index)));
        }
        if let Some(total) = res.table.total_count() {
            if total > res.visited {
                return Err(Error::Shard(format!(
                    "shard {} counts {total} subsets but visited {}",
                    res.shard.index, res.visited
                )));
            }
        }
    }
    let tables: Vec<SpectrumTable> = results.iter().map(|r| r.table.clone()).collect();
    merge_tables(&tables)
}

/// Zero-free spectrum over sizes `0..=max_size` for one shard (or the whole space).
pub fn enumerate_zero_free(opts: SweepOptions, shard: Option<ShardSpec>) -> Result<SpectrumTable> {
    let mut walk = GrayWalk::new(opts, shard.unwrap_or(ShardSpec::WHOLE))?;
    walk.run(u64::MAX);
    Ok(walk.table())
}

/// Runs `shard_count` shards on the rayon pool and merges them.
pub fn enumerate_sharded(opts: SweepOptions, shard_count: u64) -> Result<SpectrumTable> {
    let shards = ShardSpec::all(shard_count)?;
    let results: Vec<ShardResult> = shards
        .into_par_iter()
        .map(|s| {
            let mut walk = GrayWalk::new(opts, s)?;
            walk.run(u64::MAX);
            Ok(walk.into_result())
        })
        .collect::<Result<_>>()?;
    merge_shards(&results)
}

/// Shard count for a thread count: the next power of two of `threads * 64`,
/// capped so each shard keeps some free elements.
pub fn default_shard_count(n: u32, threads: usize) -> u64 {
    let nonzero = (1u64 << n) - 1;
    let want = (threads.max(1) as u64 * 64).next_power_of_two();
    let cap = 1u64 << (nonzero / 2);
    want.min(cap).max(1)
}

/// Revolving-door order over the `t`-subsets of `0..n`: consecutive
/// combinations differ by exchanging one element. Calls `visit` with each
/// combination as a bitmask.
pub fn revolving_door(n: usize, t: usize, mut visit: impl FnMut(u64)) {
    assert!(n <= 64 && t <= n);
    if t == 0 {
        visit(0);
        return;
    }
    if t == n {
        visit(if n == 64 { u64::MAX } else { (1u64 << n) - 1 });
        return;
    }
    if t == 1 {
        for i in 0..n {
            visit(1u64 << i);
        }
        return;
    }
    // c[1..=t] ascending, c[t + 1] = n
    let mut c: Vec<usize> = (0..=t + 1).map(|j| if j == 0 { 0 } else { j - 1 }).collect();
    c[t + 1] = n;
    let as_mask = |c: &[usize]| c[1..=t].iter().fold(0u64, |m, &x| m | (1u64 << x));
    loop {
        visit(as_mask(&c));
        let mut j;
        let mut increase;
        if t % 2 == 1 {
            if c[1] + 1 < c[2] {
                c[1] += 1;
                continue;
            }
            j = 2;
            increase = false;
        } else {
            if c[1] > 0 {
                c[1] -= 1;
                continue;
            }
            j = 2;
            increase = true;
        }
        loop {
            if !increase {
                if c[j] >= j {
                    c[j] = c[j - 1];
                    c[j - 1] = j - 2;
                    break;
                }
                j += 1;
                increase = true;
            } else {
                if c[j] + 1 < c[j + 1] {
                    c[j - 1] = c[j];
                    c[j] += 1;
                    break;
                }
                j += 1;
                if j > t {
                    return;
                }
                increase = false;
            }
        }
    }
}

/// Zero-free spectra of fixed sizes by revolving-door enumeration, with the
/// r-value carried across each one-element exchange. Works up to n = 6.
pub fn enumerate_combinations(n: u32, sizes: RangeInclusive<usize>, counts: bool) -> Result<SpectrumTable> {
    check_dimension(n)?;
    if n > MAX_COMBINATIONS_N {
        return Err(Error::TooLarge(n));
    }
    let nonzero = (1usize << n) - 1;
    let mut tally = Tally::new(n, counts);
    let mut max_seen = 0;
    for t in sizes {
        if t > nonzero {
            return Err(Error::Shard(format!("size {t} exceeds {nonzero}")));
        }
        max_seen = max_seen.max(t);
        let mut prev: Option<(u64, u32)> = None;
        revolving_door(nonzero, t, |combo| {
            let mask = combo << 1;
            let r6 = match prev {
                None => r_word(mask) / 6,
                Some((pm, pr6)) => {
                    let out = pm & !mask;
                    let inn = mask & !pm;
                    debug_assert!(out.count_ones() == 1 && inn.count_ones() == 1);
                    let xo = out.trailing_zeros();
                    let xi = inn.trailing_zeros();
                    let mid = pm ^ out;
                    pr6 - delta_word_zero_free(mid, xo) / 6 + delta_word_zero_free(mid, xi) / 6
                }
            };
            tally.visit(t as u32, r6, mask);
            prev = Some((mask, r6));
        });
    }
    Ok(tally.to_table(n, max_seen))
}
