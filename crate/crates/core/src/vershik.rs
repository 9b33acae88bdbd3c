//! The Vershik map on finite path prefixes and ordinal coordinates in towers.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordering::OrderedDiagram;

/// A finite path from the root: `edges[i]` indexes the order word of the target of the edge
/// at level `i + 1`; `end` is the vertex reached at level `edges.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathPrefix {
    pub end: usize,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Successor {
    Next(PathPrefix),
    MaximalOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Iterated {
    Prefix(PathPrefix),
    /// The target ordinal lies outside `[0, h_n(v))`.
    Overflow(BigInt),
}

impl PathPrefix {
    pub fn new(end: usize, edges: Vec<usize>) -> Self {
        PathPrefix { end, edges }
    }

    pub fn depth(&self) -> usize {
        self.edges.len()
    }

    /// `targets[i]` is the target of the edge at level `i + 1`.
    pub fn targets(&self, od: &OrderedDiagram) -> Result<Vec<usize>> {
        let n = self.depth();
        if n == 0 || n > od.levels() {
            return Err(Error::InvalidPrefix(format!("depth {n} outside 1..={}", od.levels())));
        }
        if self.end >= od.base().vertex_count(n) {
            return Err(Error::InvalidPrefix(format!("vertex {} not in level {n}", self.end)));
        }
        let mut t = vec![0; n];
        let mut v = self.end;
        for level in (1..=n).rev() {
            t[level - 1] = v;
            let w = od.word(level, v);
            let x = self.edges[level - 1];
            if x >= w.len() {
                return Err(Error::InvalidPrefix(format!("edge index {x} at level {level} exceeds {}", w.len())));
            }
            v = w[x];
        }
        Ok(t)
    }

    pub fn validate(&self, od: &OrderedDiagram) -> Result<()> {
        self.targets(od).map(|_| ())
    }
}

pub fn minimal_prefix(od: &OrderedDiagram, level: usize, v: usize) -> PathPrefix {
    PathPrefix { end: v, edges: vec![0; level] }.with_minimal_below(od, level, v)
}

pub fn maximal_prefix(od: &OrderedDiagram, level: usize, v: usize) -> PathPrefix {
    let mut edges = vec![0; level];
    let mut cur = v;
    for n in (1..=level).rev() {
        let w = od.word(n, cur);
        edges[n - 1] = w.len() - 1;
        cur = w[w.len() - 1];
    }
    PathPrefix { end: v, edges }
}

impl PathPrefix {
    /// Resets edges at levels `1..=top` to the minimal path into `v` in `V_top`.
    fn with_minimal_below(mut self, od: &OrderedDiagram, top: usize, v: usize) -> PathPrefix {
        let mut cur = v;
        for n in (1..=top).rev() {
            self.edges[n - 1] = 0;
            cur = od.word(n, cur)[0];
        }
        self
    }
}

pub fn successor(od: &OrderedDiagram, p: &PathPrefix) -> Result<Successor> {
    let t = p.targets(od)?;
    for m in 1..=p.depth() {
        let w = od.word(m, t[m - 1]);
        let x = p.edges[m - 1];
        if x + 1 < w.len() {
            let mut q = p.clone();
            q.edges[m - 1] = x + 1;
            let src = w[x + 1];
            if m > 1 {
                q = q.with_minimal_below(od, m - 1, src);
            }
            return Ok(Successor::Next(q));
        }
    }
    Ok(Successor::MaximalOverflow)
}

/// Rank of the prefix among all prefixes ending at the same vertex, in successor order.
pub fn ordinal(od: &OrderedDiagram, p: &PathPrefix) -> Result<BigUint> {
    let t = p.targets(od)?;
    let base = od.base();
    let mut acc = BigUint::zero();
    for level in 1..=p.depth() {
        let w = od.word(level, t[level - 1]);
        for &src in &w[..p.edges[level - 1]] {
            acc += base.height(level - 1, src);
        }
    }
    Ok(acc)
}

pub fn from_ordinal(od: &OrderedDiagram, level: usize, v: usize, j: &BigUint) -> Result<PathPrefix> {
    let base = od.base();
    base.check_level(level)?;
    if v >= base.vertex_count(level) || j >= base.height(level, v) {
        return Err(Error::OrdinalOutOfRange);
    }
    let mut rem = j.clone();
    let mut edges = vec![0; level];
    let mut cur = v;
    for n in (1..=level).rev() {
        let w = od.word(n, cur);
        let mut chosen = None;
        for (x, &src) in w.iter().enumerate() {
            let h = base.height(n - 1, src);
            if rem < *h {
                chosen = Some((x, src));
                break;
            }
            rem -= h;
        }
        let (x, src) = chosen.ok_or(Error::OrdinalOutOfRange)?;
        edges[n - 1] = x;
        cur = src;
    }
    Ok(PathPrefix { end: v, edges })
}

/// `T^steps` on the prefix, staying inside the tower of its end vertex.
pub fn iterate(od: &OrderedDiagram, p: &PathPrefix, steps: &BigInt) -> Result<Iterated> {
    let o = BigInt::from(ordinal(od, p)?);
    let target = o + steps;
    let h = BigInt::from(od.base().height(p.depth(), p.end).clone());
    if target.is_negative() || target >= h {
        return Ok(Iterated::Overflow(target));
    }
    let j = target.to_biguint().expect("nonnegative");
    Ok(Iterated::Prefix(from_ordinal(od, p.depth(), p.end, &j)?))
}

/// All prefixes of the given depth ending at `v`, in successor order.
pub fn tower_prefixes(od: &OrderedDiagram, level: usize, v: usize) -> Vec<PathPrefix> {
    let mut out = Vec::new();
    let mut cur = minimal_prefix(od, level, v);
    loop {
        out.push(cur.clone());
        match successor(od, &cur).expect("valid prefix") {
            Successor::Next(q) => cur = q,
            Successor::MaximalOverflow => return out,
        }
    }
}
