//! Floor labelings: for a set of paths and an analysis level, the floors of each tower whose
//! paths lie in the set, as packed bit vectors.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::measures::LevelMeasure;
use crate::ordering::OrderedDiagram;
use crate::vershik::PathPrefix;

pub const DEFAULT_CAP: usize = 1 << 24;

/// Packed bit vector, least significant bit first within each word.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn with_capacity(bits: usize) -> Self {
        Bits { len: 0, words: Vec::with_capacity(bits.div_ceil(64)) }
    }

    pub fn zeros(len: usize) -> Self {
        Bits { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_bools(b: &[bool]) -> Self {
        let mut out = Bits::zeros(b.len());
        for (i, &x) in b.iter().enumerate() {
            if x {
                out.set(i);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit index out of range");
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn push_zeros(&mut self, n: usize) {
        self.len += n;
        self.words.resize(self.len.div_ceil(64), 0);
    }

    pub fn push_bits(&mut self, other: &Bits) {
        let off = self.len % 64;
        if off == 0 {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            self.words.truncate(self.len.div_ceil(64));
            return;
        }
        for &w in &other.words {
            let last = self.words.len() - 1;
            self.words[last] |= w << off;
            self.words.push(w >> (64 - off));
        }
        self.len += other.len;
        self.words.truncate(self.len.div_ceil(64));
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Ones in `[a, b)`.
    pub fn count_range(&self, a: usize, b: usize) -> u64 {
        let b = b.min(self.len);
        if a >= b {
            return 0;
        }
        let (wa, wb) = (a / 64, (b - 1) / 64);
        let mut total = 0u64;
        for i in wa..=wb {
            let mut w = self.words[i];
            if i == wa {
                w &= u64::MAX << (a % 64);
            }
            if i == wb && !b.is_multiple_of(64) {
                w &= u64::MAX >> (64 - b % 64);
            }
            total += u64::from(w.count_ones());
        }
        total
    }

    pub fn or_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// The 64 bits starting at bit `pos`, zero past the end.
    fn word_at(&self, pos: usize) -> u64 {
        let (q, r) = (pos / 64, pos % 64);
        let lo = self.words.get(q).copied().unwrap_or(0);
        if r == 0 {
            return lo;
        }
        let hi = self.words.get(q + 1).copied().unwrap_or(0);
        (lo >> r) | (hi << (64 - r))
    }

    /// `#{j : self[j] and other[j + s]}` over `j + s < other.len()`.
    pub fn shifted_and_count(&self, other: &Bits, s: usize) -> u64 {
        if s >= other.len {
            return 0;
        }
        let span = (other.len - s).min(self.len);
        let nw = span.div_ceil(64);
        let mut total = 0u64;
        for i in 0..nw {
            let mut w = self.words[i] & other.word_at(i * 64 + s);
            if i == nw - 1 && !span.is_multiple_of(64) {
                w &= u64::MAX >> (64 - span % 64);
            }
            total += u64::from(w.count_ones());
        }
        total
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

/// Paths whose edge at each level `l <= depth` (given as its index in the target's order word)
/// is allowed by a per-level table; deeper levels are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSet {
    /// `allowed[l - 1][v][e]`
    allowed: Vec<Vec<Vec<bool>>>,
}

impl ProductSet {
    pub fn full(od: &OrderedDiagram, depth: usize) -> Result<Self> {
        if depth > od.levels() {
            return Err(Error::LevelOutOfRange { level: depth, max: od.levels() });
        }
        let allowed = (1..=depth)
            .map(|l| (0..od.base().vertex_count(l)).map(|v| vec![true; od.word(l, v).len()]).collect())
            .collect();
        Ok(ProductSet { allowed })
    }

    pub fn cylinder(od: &OrderedDiagram, p: &PathPrefix) -> Result<Self> {
        let targets = p.targets(od)?;
        let mut allowed: Vec<Vec<Vec<bool>>> = (1..=p.depth())
            .map(|l| (0..od.base().vertex_count(l)).map(|v| vec![false; od.word(l, v).len()]).collect())
            .collect();
        for l in 1..=p.depth() {
            allowed[l - 1][targets[l - 1]][p.edges[l - 1]] = true;
        }
        Ok(ProductSet { allowed })
    }

    pub fn depth(&self) -> usize {
        self.allowed.len()
    }

    pub fn allows(&self, level: usize, v: usize, e: usize) -> bool {
        level > self.depth() || self.allowed[level - 1][v][e]
    }

    /// Intersects with the constraint `keep(v, e)` at `level <= depth()`.
    pub fn restrict(&mut self, level: usize, keep: impl Fn(usize, usize) -> bool) -> Result<()> {
        if level == 0 || level > self.depth() {
            return Err(Error::LevelOutOfRange { level, max: self.depth() });
        }
        for (v, row) in self.allowed[level - 1].iter_mut().enumerate() {
            for (e, a) in row.iter_mut().enumerate() {
                *a = *a && keep(v, e);
            }
        }
        Ok(())
    }

    pub fn contains(&self, od: &OrderedDiagram, p: &PathPrefix) -> Result<bool> {
        if p.depth() < self.depth() {
            return Err(Error::InvalidPrefix(format!("prefix depth {} below set depth {}", p.depth(), self.depth())));
        }
        let targets = p.targets(od)?;
        Ok((1..=self.depth()).all(|l| self.allowed[l - 1][targets[l - 1]][p.edges[l - 1]]))
    }
}

/// Finite union of product sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    parts: Vec<ProductSet>,
}

impl PathSet {
    pub fn new(parts: Vec<ProductSet>) -> Self {
        PathSet { parts }
    }

    pub fn cylinder(od: &OrderedDiagram, p: &PathPrefix) -> Result<Self> {
        Ok(PathSet { parts: vec![ProductSet::cylinder(od, p)?] })
    }

    pub fn parts(&self) -> &[ProductSet] {
        &self.parts
    }

    pub fn depth(&self) -> usize {
        self.parts.iter().map(ProductSet::depth).max().unwrap_or(0)
    }

    pub fn contains(&self, od: &OrderedDiagram, p: &PathPrefix) -> Result<bool> {
        for part in &self.parts {
            if part.contains(od, p)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `mu(X) = sum_w p_D(w) |X-floors of tower w|` at the set's own depth.
    pub fn measure(&self, od: &OrderedDiagram, m: &LevelMeasure) -> Result<Interval> {
        let d = self.depth().max(1);
        let lab = floor_sets(od, self, d, DEFAULT_CAP)?;
        if lab.counts_exact.iter().any(|e| !e) {
            return Err(Error::CapExceeded { height: od.base().height_slice(d).iter().max().map(|h| h.to_string()).unwrap_or_default(), cap: DEFAULT_CAP });
        }
        let p = m.level(d)?;
        Ok(lab.counts.iter().zip(p).fold(Interval::zero(), |acc, (c, pw)| acc.add(&pw.scale(&crate::measures::biguint_rat(c)))))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloorLabeling {
    pub level: usize,
    pub cap: usize,
    towers: Vec<Option<Bits>>,
    counts: Vec<BigUint>,
    counts_exact: Vec<bool>,
    heights: Vec<BigUint>,
}

impl FloorLabeling {
    pub fn tower(&self, w: usize) -> Option<&Bits> {
        self.towers[w].as_ref()
    }

    pub fn towers(&self) -> usize {
        self.towers.len()
    }

    pub fn is_materialized(&self, w: usize) -> bool {
        self.towers[w].is_some()
    }

    /// Number of floors of tower `w` in the set; an upper bound when `count_is_exact(w)` fails.
    pub fn count(&self, w: usize) -> &BigUint {
        &self.counts[w]
    }

    pub fn count_is_exact(&self, w: usize) -> bool {
        self.counts_exact[w]
    }

    pub fn height(&self, w: usize) -> &BigUint {
        &self.heights[w]
    }
}

fn product_level(
    od: &OrderedDiagram,
    set: &ProductSet,
    level: usize,
    prev: &[Option<Bits>],
    prev_counts: &[BigUint],
    cap: usize,
) -> (Vec<Option<Bits>>, Vec<BigUint>) {
    let d = od.base();
    let prev_h = d.height_slice(level - 1);
    let n = d.vertex_count(level);
    let mut towers = Vec::with_capacity(n);
    let mut counts = Vec::with_capacity(n);
    for v in 0..n {
        let word = od.word(level, v);
        let mut c = BigUint::zero();
        for (e, &src) in word.iter().enumerate() {
            if set.allows(level, v, e) {
                c += &prev_counts[src];
            }
        }
        counts.push(c);
        let h = d.height(level, v);
        let fits = h.to_usize().is_some_and(|h| h <= cap) && word.iter().all(|&s| prev[s].is_some());
        if !fits {
            towers.push(None);
            continue;
        }
        let mut bits = Bits::with_capacity(h.to_usize().expect("fits"));
        for (e, &src) in word.iter().enumerate() {
            let hs = prev_h[src].to_usize().expect("fits");
            if set.allows(level, v, e) {
                bits.push_bits(prev[src].as_ref().expect("materialized"));
            } else {
                bits.push_zeros(hs);
            }
        }
        towers.push(Some(bits));
    }
    (towers, counts)
}

fn product_floor_sets(od: &OrderedDiagram, set: &ProductSet, level: usize, cap: usize) -> (Vec<Option<Bits>>, Vec<BigUint>) {
    let mut root = Bits::zeros(1);
    root.set(0);
    let mut towers = vec![Some(root)];
    let mut counts = vec![BigUint::from(1u8)];
    for l in 1..=level {
        let (t, c) = product_level(od, set, l, &towers, &counts, cap);
        towers = t;
        counts = c;
    }
    (towers, counts)
}

/// Floor labeling of `set` at `level`; towers taller than `cap` bits are not materialized and
/// carry only a count (exact for a single product set, an upper bound for unions).
pub fn floor_sets(od: &OrderedDiagram, set: &PathSet, level: usize, cap: usize) -> Result<FloorLabeling> {
    if level == 0 || level > od.levels() {
        return Err(Error::LevelOutOfRange { level, max: od.levels() });
    }
    if level < set.depth() {
        return Err(Error::LevelOutOfRange { level, max: set.depth() });
    }
    let d = od.base();
    let n = d.vertex_count(level);
    let heights = d.height_slice(level).to_vec();
    let mut towers: Vec<Option<Bits>> = vec![None; n];
    let mut counts = vec![BigUint::zero(); n];
    let mut first = true;
    for part in set.parts() {
        let (t, c) = product_floor_sets(od, part, level, cap);
        for w in 0..n {
            counts[w] += &c[w];
            if first {
                towers[w] = t[w].clone();
            } else if let (Some(acc), Some(b)) = (towers[w].as_mut(), t[w].as_ref()) {
                acc.or_assign(b);
            }
        }
        first = false;
    }
    if set.parts().is_empty() {
        for (w, t) in towers.iter_mut().enumerate() {
            if heights[w].to_usize().is_some_and(|h| h <= cap) {
                *t = Some(Bits::zeros(heights[w].to_usize().expect("fits")));
            }
        }
    }
    let single = set.parts().len() <= 1;
    let mut counts_exact = vec![true; n];
    for w in 0..n {
        if let Some(b) = &towers[w] {
            counts[w] = BigUint::from(b.count_ones());
        } else if !single {
            if counts[w] > heights[w] {
                counts[w] = heights[w].clone();
            }
            counts_exact[w] = false;
        }
    }
    Ok(FloorLabeling { level, cap, towers, counts, counts_exact, heights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{BratteliDiagram, Dyadic};

    #[test]
    fn shifted_counts_match_naive() {
        let pattern: Vec<bool> = (0..300).map(|i| (i * 7 + i / 3) % 5 < 2).collect();
        let b = Bits::from_bools(&pattern);
        for s in [0usize, 1, 5, 63, 64, 65, 130, 299, 300, 500] {
            let naive = (0..300).filter(|&j| j + s < 300 && pattern[j] && pattern[j + s]).count() as u64;
            assert_eq!(b.shifted_and_count(&b, s), naive, "s = {s}");
        }
        assert_eq!(b.count_range(10, 200), pattern[10..200].iter().filter(|&&x| x).count() as u64);
    }

    #[test]
    fn concatenation_is_exact() {
        let a = Bits::from_bools(&[true, false, true]);
        let mut c = Bits::with_capacity(0);
        for _ in 0..50 {
            c.push_bits(&a);
            c.push_zeros(2);
        }
        assert_eq!(c.len(), 250);
        assert_eq!(c.count_ones(), 100);
        assert!(c.get(245) && !c.get(246) && c.get(247));
    }

    #[test]
    fn dyadic_parity_floors() {
        let od = OrderedDiagram::left_to_right(BratteliDiagram::from_generator(&Dyadic, 4).unwrap());
        let set = PathSet::cylinder(&od, &PathPrefix::new(0, vec![0, 0])).unwrap();
        let lab = floor_sets(&od, &set, 4, DEFAULT_CAP).unwrap();
        let t = lab.tower(0).unwrap();
        assert_eq!(t.ones().collect::<Vec<_>>(), vec![0, 2, 4, 6]);
    }
}
