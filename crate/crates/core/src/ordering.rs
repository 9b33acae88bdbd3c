//! Orders on incoming edges, substitution reads and properness.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::diagram::{validate_cuts, BratteliDiagram};
use crate::error::{Error, Result};

/// A diagram together with, for every level `n` and vertex `v` in `V_n`, the sources of the
/// incoming edges of `v` listed in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedDiagram {
    base: BratteliDiagram,
    /// `words[n-1][v]`; level-1 words consist of the root index 0.
    words: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Properness {
    Proper,
    LeftProper,
    RightProper,
    None,
}

impl Properness {
    pub fn is_left_proper(self) -> bool {
        matches!(self, Properness::Proper | Properness::LeftProper)
    }
    pub fn is_right_proper(self) -> bool {
        matches!(self, Properness::Proper | Properness::RightProper)
    }
}

/// `θ_n`: vertex of `V_n` to a word over `V_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubstitutionRead {
    pub level: usize,
    pub words: Vec<Vec<usize>>,
}

impl SubstitutionRead {
    pub fn properness(&self) -> Properness {
        classify(&self.words)
    }

    /// Rewrites each `l u(a)` as `u(a) l`.
    pub fn conjugate(&self) -> Result<SubstitutionRead> {
        if !self.properness().is_left_proper() {
            return Err(Error::NotLeftProper);
        }
        let words = self
            .words
            .iter()
            .map(|w| {
                let mut r = w[1..].to_vec();
                r.push(w[0]);
                r
            })
            .collect();
        Ok(SubstitutionRead { level: self.level, words })
    }
}

pub fn classify(words: &[Vec<usize>]) -> Properness {
    let first = words.iter().map(|w| w.first()).collect::<Vec<_>>();
    let last = words.iter().map(|w| w.last()).collect::<Vec<_>>();
    let left = first.windows(2).all(|p| p[0] == p[1]) && first.iter().all(Option::is_some);
    let right = last.windows(2).all(|p| p[0] == p[1]) && last.iter().all(Option::is_some);
    match (left, right) {
        (true, true) => Properness::Proper,
        (true, false) => Properness::LeftProper,
        (false, true) => Properness::RightProper,
        (false, false) => Properness::None,
    }
}

fn row_word(base: &BratteliDiagram, level: usize, v: usize) -> Vec<usize> {
    let f = base.incidence(level).expect("level in range");
    let mut w = Vec::new();
    for (src, count) in f.row(v).iter().enumerate() {
        let c = count.to_usize().expect("edge multiplicity fits in memory");
        w.extend(std::iter::repeat_n(src, c));
    }
    w
}

fn letter_counts(word: &[usize], alphabet: usize) -> Vec<usize> {
    let mut c = vec![0usize; alphabet];
    for &l in word {
        if l < alphabet {
            c[l] += 1;
        }
    }
    c
}

impl OrderedDiagram {
    /// Incoming edges ordered by source index, parallel edges adjacent.
    pub fn left_to_right(base: BratteliDiagram) -> Self {
        let words = (1..=base.levels())
            .map(|n| (0..base.vertex_count(n)).map(|v| row_word(&base, n, v)).collect())
            .collect();
        OrderedDiagram { base, words }
    }

    /// `table[n-1]`, when present, gives the words at level `n`; absent levels default to
    /// left-to-right.
    pub fn with_explicit_order(base: BratteliDiagram, table: &[Option<Vec<Vec<usize>>>]) -> Result<Self> {
        let mut out = Self::left_to_right(base);
        for (i, entry) in table.iter().enumerate() {
            let level = i + 1;
            let Some(words) = entry else { continue };
            if level > out.base.levels() {
                return Err(Error::LevelOutOfRange { level, max: out.base.levels() });
            }
            let f = out.base.incidence(level)?;
            if words.len() != f.rows() {
                return Err(Error::OrderMismatch { level, vertex: words.len().min(f.rows()) });
            }
            for (v, w) in words.iter().enumerate() {
                let counts = letter_counts(w, f.cols());
                let ok = w.iter().all(|&l| l < f.cols())
                    && counts.iter().zip(f.row(v)).all(|(c, e)| e.to_usize() == Some(*c));
                if !ok {
                    return Err(Error::OrderMismatch { level, vertex: v });
                }
            }
            out.words[i] = words.clone();
        }
        Ok(out)
    }

    pub fn base(&self) -> &BratteliDiagram {
        &self.base
    }

    pub fn levels(&self) -> usize {
        self.base.levels()
    }

    /// Order word of `v` in `V_n`.
    pub fn word(&self, level: usize, v: usize) -> &[usize] {
        &self.words[level - 1][v]
    }

    pub fn words_at(&self, level: usize) -> &[Vec<usize>] {
        &self.words[level - 1]
    }

    pub fn substitution_read(&self, level: usize) -> Result<SubstitutionRead> {
        if level < 2 || level > self.levels() {
            return Err(Error::LevelOutOfRange { level, max: self.levels() });
        }
        Ok(SubstitutionRead { level, words: self.words[level - 1].clone() })
    }

    /// No order word has two equal letters separated by a different one. With a subdiagram
    /// (`restrict[n]` is `W_n`, `restrict[0]` ignored), only vertices of `W_n` and letters in
    /// `W_{n-1}` are constrained.
    pub fn is_consecutive(&self, restrict: Option<&[Vec<usize>]>) -> Result<bool> {
        if let Some(r) = restrict {
            for (n, w) in r.iter().enumerate().skip(1) {
                if w.is_empty() {
                    return Err(Error::BadSubdiagram { level: n });
                }
            }
        }
        let top = match restrict {
            Some(r) => (r.len().saturating_sub(1)).min(self.levels()),
            None => self.levels(),
        };
        for n in 2..=top {
            let (targets, letters): (Vec<usize>, Option<&Vec<usize>>) = match restrict {
                Some(r) => (r[n].clone(), Some(&r[n - 1])),
                None => ((0..self.base.vertex_count(n)).collect(), None),
            };
            for v in targets {
                if v >= self.base.vertex_count(n) {
                    return Err(Error::BadSubdiagram { level: n });
                }
                if !word_consecutive(self.word(n, v), letters.map(|l| l.as_slice())) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Number of distinct level-1 vertices reached by the all-maximal (resp. all-minimal)
    /// paths of length `depth`; estimates the number of infinite extremal paths.
    pub fn extremal_prefix_count(&self, depth: usize) -> Result<ExtremalCounts> {
        self.base.check_level(depth)?;
        let trace = |pick_last: bool| {
            let mut set: Vec<usize> = (0..self.base.vertex_count(depth)).collect();
            for n in (2..=depth).rev() {
                let mut next: Vec<usize> = set
                    .iter()
                    .map(|&v| {
                        let w = self.word(n, v);
                        if pick_last {
                            *w.last().expect("nonempty word")
                        } else {
                            w[0]
                        }
                    })
                    .collect();
                next.sort_unstable();
                next.dedup();
                set = next;
            }
            set.len()
        };
        Ok(ExtremalCounts { max_count: trace(true), min_count: trace(false) })
    }

    /// Telescoping with the induced order: composite paths rank by their deepest edge first.
    pub fn telescope(&self, cuts: &[usize]) -> Result<OrderedDiagram> {
        validate_cuts(cuts, self.levels())?;
        let base = self.base.telescope(cuts)?;
        let mut table = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut cur: Vec<Vec<usize>> = (0..self.base.vertex_count(lo)).map(|u| vec![u]).collect();
            for n in lo + 1..=hi {
                cur = (0..self.base.vertex_count(n))
                    .map(|v| self.word(n, v).iter().flat_map(|&u| cur[u].iter().copied()).collect())
                    .collect();
            }
            table.push(Some(cur));
        }
        OrderedDiagram::with_explicit_order(base, &table)
    }

    pub fn truncate(&self, depth: usize) -> Result<OrderedDiagram> {
        let base = self.base.truncate(depth)?;
        Ok(OrderedDiagram { base, words: self.words[..depth].to_vec() })
    }
}

fn word_consecutive(word: &[usize], letters: Option<&[usize]>) -> bool {
    let mut closed: Vec<usize> = Vec::new();
    let mut prev: Option<usize> = None;
    for &l in word {
        if prev == Some(l) {
            continue;
        }
        if let Some(p) = prev {
            closed.push(p);
        }
        let tracked = letters.is_none_or(|ls| ls.contains(&l));
        if tracked && closed.contains(&l) {
            return false;
        }
        prev = Some(l);
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtremalCounts {
    pub max_count: usize,
    pub min_count: usize,
}

/// Renders a word with 1-based letters, e.g. `[0, 1, 1]` as `"122"`.
pub fn word_string(word: &[usize]) -> String {
    if word.iter().all(|&l| l < 9) {
        word.iter().map(|&l| char::from(b'1' + l as u8)).collect()
    } else {
        word.iter().map(|l| (l + 1).to_string()).collect::<Vec<_>>().join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMatrix;

    fn fig2() -> BratteliDiagram {
        BratteliDiagram::stationary(&IntMatrix::from_u64(&[vec![2, 0], vec![2, 4]]).unwrap(), 5, true).unwrap()
    }

    #[test]
    fn left_to_right_words() {
        let od = OrderedDiagram::left_to_right(fig2());
        assert_eq!(word_string(od.word(2, 0)), "11");
        assert_eq!(word_string(od.word(2, 1)), "112222");
        assert!(od.is_consecutive(None).unwrap());
    }

    #[test]
    fn explicit_order_checks_multisets() {
        let bad = vec![None, Some(vec![vec![0, 0], vec![0, 1, 1, 1, 0]])];
        assert!(matches!(
            OrderedDiagram::with_explicit_order(fig2(), &bad),
            Err(Error::OrderMismatch { level: 2, vertex: 1 })
        ));
    }

    #[test]
    fn conjugate_rotates() {
        let s = SubstitutionRead { level: 2, words: vec![vec![0, 1, 2], vec![0, 2, 1]] };
        let c = s.conjugate().unwrap();
        assert_eq!(c.words, vec![vec![1, 2, 0], vec![2, 1, 0]]);
        assert_eq!(c.properness(), Properness::RightProper);
        let n = SubstitutionRead { level: 2, words: vec![vec![1, 0], vec![0, 1]] };
        assert_eq!(n.conjugate(), Err(Error::NotLeftProper));
    }

    #[test]
    fn consecutive_detection() {
        assert!(word_consecutive(&[0, 0, 1, 1, 2], None));
        assert!(!word_consecutive(&[0, 1, 0], None));
        assert!(word_consecutive(&[0, 1, 0], Some(&[1])));
    }
}
