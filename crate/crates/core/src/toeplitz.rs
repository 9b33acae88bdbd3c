//! Toeplitz words from sequences of constant-length substitutions, their periodic skeletons and
//! hole densities.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::diagram::BratteliDiagram;
use crate::matrix::IntMatrix;
use crate::ordering::{classify, OrderedDiagram, Properness};

/// Window budget for density profiles, in letters.
pub const DEFAULT_WINDOW: usize = 1 << 22;

/// One stage `theta_n : A_n -> A_{n-1}^+`, letters 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    words: Vec<Vec<usize>>,
}

impl Stage {
    pub fn new(words: Vec<Vec<usize>>) -> Result<Self> {
        let r = words.first().map_or(0, Vec::len);
        if r == 0 {
            return Err(Error::EmptyScheme);
        }
        if words.iter().any(|w| w.len() != r) {
            return Err(Error::ShapeMismatch("stage words differ in length".into()));
        }
        Ok(Stage { words })
    }

    /// Letters written as characters, `symbols[i]` standing for letter `i`.
    pub fn parse(words: &[&str], symbols: &str) -> Result<Self> {
        let sym: Vec<char> = symbols.chars().collect();
        let parsed = words
            .iter()
            .map(|w| {
                w.chars()
                    .map(|c| sym.iter().position(|&s| s == c).ok_or_else(|| Error::Parse(format!("unknown letter {c}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Stage::new(parsed)
    }

    pub fn length(&self) -> usize {
        self.words[0].len()
    }

    pub fn letters(&self) -> usize {
        self.words.len()
    }

    pub fn word(&self, a: usize) -> &[usize] {
        &self.words[a]
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn properness(&self) -> Properness {
        classify(&self.words)
    }

    /// Moves the last letter of every word to the front.
    pub fn rotate_right(&self) -> Stage {
        Stage {
            words: self
                .words
                .iter()
                .map(|w| {
                    let mut v = Vec::with_capacity(w.len());
                    v.push(w[w.len() - 1]);
                    v.extend_from_slice(&w[..w.len() - 1]);
                    v
                })
                .collect(),
        }
    }

    /// `self ∘ next` as a map `A_{n+1} -> A_{n-1}^+`.
    pub fn compose(&self, next: &Stage) -> Stage {
        Stage {
            words: next.words.iter().map(|w| w.iter().flat_map(|&b| self.words[b].iter().copied()).collect()).collect(),
        }
    }
}

/// `stages[0]` is `theta_1 : A_1 -> A_0^+`, producing the output alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionScheme {
    stages: Vec<Stage>,
    symbols: Vec<char>,
}

impl SubstitutionScheme {
    pub fn new(stages: Vec<Stage>, symbols: &str) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::EmptyScheme);
        }
        for n in 1..stages.len() {
            let k = stages[n - 1].letters();
            if stages[n].words.iter().flatten().any(|&b| b >= k) {
                return Err(Error::ShapeMismatch(format!("stage {} uses letters beyond stage {n}'s alphabet", n + 1)));
            }
        }
        let out = stages[0].words.iter().flatten().max().map_or(0, |m| m + 1);
        let mut symbols: Vec<char> = symbols.chars().collect();
        if symbols.len() < out {
            symbols = (0..out).map(|i| char::from_digit((i + 1) as u32 % 36, 36).unwrap_or('?')).collect();
        }
        Ok(SubstitutionScheme { stages, symbols })
    }

    pub fn stages(&self) -> usize {
        self.stages.len()
    }

    pub fn stage(&self, n: usize) -> &Stage {
        &self.stages[n - 1]
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.stages.iter().map(Stage::length).collect()
    }

    /// `p_k = r_1 ... r_k`.
    pub fn period(&self, k: usize) -> BigUint {
        self.stages[..k].iter().map(|s| BigUint::from(s.length())).product()
    }

    pub fn render(&self, word: &[usize]) -> String {
        word.iter().map(|&a| self.symbols.get(a).copied().unwrap_or('?')).collect()
    }

    /// Smallest `w` such that every run of `w` consecutive stages has a strictly positive
    /// composed incidence matrix.
    pub fn primitive_window(&self) -> Option<usize> {
        let n = self.stages.len();
        (1..=n).find(|&w| {
            (0..=n - w).all(|start| {
                let mut composed = self.stages[start].clone();
                for s in &self.stages[start + 1..start + w] {
                    composed = composed.compose(s);
                }
                let k = self.stages[start].words.iter().flatten().max().map_or(0, |m| m + 1);
                composed.words.iter().all(|w| (0..k).all(|a| w.contains(&a)))
            })
        })
    }

    /// Replaces right-proper-only stages by their rotations, which are left proper.
    pub fn normalized(&self) -> Result<SubstitutionScheme> {
        let mut stages = Vec::with_capacity(self.stages.len());
        for (i, s) in self.stages.iter().enumerate() {
            let p = s.properness();
            if p.is_left_proper() || s.letters() == 1 {
                stages.push(s.clone());
            } else if p.is_right_proper() {
                stages.push(s.rotate_right());
            } else {
                return Err(Error::NotProper { stage: i + 1 });
            }
        }
        Ok(SubstitutionScheme { stages, symbols: self.symbols.clone() })
    }

    /// Composes the stages between consecutive cut points `0 = c_0 < c_1 < ...`.
    pub fn telescope(&self, cuts: &[usize]) -> Result<SubstitutionScheme> {
        if cuts.first() != Some(&0) || cuts.windows(2).any(|w| w[0] >= w[1]) || cuts.last().is_some_and(|&c| c > self.stages.len()) {
            return Err(Error::BadCutSequence(format!("{cuts:?}")));
        }
        let stages = cuts
            .windows(2)
            .map(|w| {
                let mut s = self.stages[w[0]].clone();
                for t in &self.stages[w[0] + 1..w[1]] {
                    s = s.compose(t);
                }
                s
            })
            .collect();
        Ok(SubstitutionScheme { stages, symbols: self.symbols.clone() })
    }

    /// Seed letter of stage `k`: the common first letter of stage `k + 1`, or 0 at the top.
    fn seed(&self, k: usize) -> Result<usize> {
        if k == self.stages.len() {
            return Ok(0);
        }
        let next = &self.stages[k];
        if next.letters() > 1 && !next.properness().is_left_proper() {
            return Err(Error::NotProper { stage: k + 1 });
        }
        Ok(next.words[0][0])
    }

    fn expand(&self, stage: usize, letter: usize, len: usize, out: &mut Vec<usize>) {
        if stage == 0 {
            out.push(letter);
            return;
        }
        let block = self.block_len(stage - 1);
        let mut left = len;
        for &b in &self.stages[stage - 1].words[letter] {
            if left == 0 {
                break;
            }
            let take = left.min(block);
            self.expand(stage - 1, b, take, out);
            left -= take;
        }
    }

    fn block_len(&self, k: usize) -> usize {
        self.period(k).to_usize().unwrap_or(usize::MAX)
    }
}

/// `omega[0, p_k) = theta_1 ∘ ... ∘ theta_k(a_k)`, successive stages prefix-compatible.
pub fn generate(scheme: &SubstitutionScheme, k: usize) -> Result<Vec<usize>> {
    if k > scheme.stages() {
        return Err(Error::LevelOutOfRange { level: k, max: scheme.stages() });
    }
    let s = scheme.normalized()?;
    let p = s.period(k).to_usize().ok_or_else(|| Error::TooLarge(format!("p_{k} = {}", s.period(k))))?;
    let mut out = Vec::with_capacity(p);
    s.expand(k, s.seed(k)?, p, &mut out);
    Ok(out)
}

/// The first `blocks * p_k` letters of `generate(k + 1)`.
pub fn window(scheme: &SubstitutionScheme, k: usize, blocks: usize) -> Result<Vec<usize>> {
    if k >= scheme.stages() {
        return Err(Error::LevelOutOfRange { level: k + 1, max: scheme.stages() });
    }
    let s = scheme.normalized()?;
    let blocks = blocks.min(s.stages[k].length());
    let p = s.period(k).to_usize().ok_or_else(|| Error::TooLarge(format!("p_{k}")))?;
    let len = p.checked_mul(blocks).ok_or_else(|| Error::TooLarge("window".into()))?;
    let mut out = Vec::with_capacity(len);
    s.expand(k + 1, s.seed(k + 1)?, len, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton<T> {
    /// One period; `None` marks a hole.
    pub pattern: Vec<Option<T>>,
    pub holes: usize,
}

/// Position `i` of a period is a hole iff the letters at `i, i + p, i + 2p, ...` disagree.
pub fn skeleton<T: Eq + Clone>(word: &[T], p: usize) -> Result<Skeleton<T>> {
    if p == 0 || word.is_empty() || !word.len().is_multiple_of(p) {
        return Err(Error::BadPeriod { period: p, len: word.len() });
    }
    let pattern: Vec<Option<T>> = (0..p)
        .map(|i| {
            let first = &word[i];
            word[i..].iter().step_by(p).all(|x| x == first).then(|| first.clone())
        })
        .collect();
    let holes = pattern.iter().filter(|x| x.is_none()).count();
    Ok(Skeleton { pattern, holes })
}

/// The skeleton of a string with `*` at the holes.
pub fn skeleton_string(word: &str, p: usize) -> Result<(String, usize)> {
    let chars: Vec<char> = word.chars().collect();
    let sk = skeleton(&chars, p)?;
    let full = chars.iter().enumerate().map(|(i, _)| sk.pattern[i % p].unwrap_or('*')).collect();
    Ok((full, sk.holes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRow {
    pub stage: usize,
    pub period: BigUint,
    pub holes: usize,
    pub measured: BigRational,
    /// `prod_{j <= i} (1 - 2 / r_j)`.
    pub predicted: BigRational,
    /// `sum_{j <= i} 1 / r_j`.
    pub partial_sum: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonProfile {
    pub window_len: usize,
    pub rows: Vec<ProfileRow>,
}

/// Hole densities at periods `p_1..p_k`, measured on a prefix of `generate(k + 1)` holding at
/// most `budget` letters (and at least two blocks of `p_k`).
pub fn density_profile(scheme: &SubstitutionScheme, k: usize, budget: usize) -> Result<SkeletonProfile> {
    let pk = scheme.period(k).to_usize().ok_or_else(|| Error::TooLarge(format!("p_{k}")))?;
    let blocks = (budget / pk.max(1)).max(2);
    let w = window(scheme, k, blocks)?;
    let mut rows = Vec::with_capacity(k);
    let mut predicted = BigRational::one();
    let mut partial = BigRational::zero();
    for i in 1..=k {
        let r = BigInt::from(scheme.stage(i).length());
        predicted *= BigRational::new(&r - 2, r.clone());
        partial += BigRational::new(BigInt::one(), r);
        let p = scheme.period(i);
        let sk = skeleton(&w, p.to_usize().expect("fits"))?;
        rows.push(ProfileRow {
            stage: i,
            measured: BigRational::new(BigInt::from(sk.holes), BigInt::from(p.clone())),
            period: p,
            holes: sk.holes,
            predicted: predicted.clone(),
            partial_sum: partial.clone(),
        });
    }
    Ok(SkeletonProfile { window_len: w.len(), rows })
}

/// `s(n) = (25^n - 1) / 3`.
pub fn arbulu_s(n: u32) -> usize {
    (25usize.pow(n) - 1) / 3
}

fn repeat121(s: usize) -> Vec<usize> {
    [0, 1, 0].iter().copied().cycle().take(3 * s).collect()
}

/// The raw substitutions `1 -> (121)^s 2`, `2 -> 1 (121)^s` with `s = s(n)`, letters `0, 1`.
pub fn arbulu_theta(n: u32) -> Stage {
    let s = arbulu_s(n);
    let mut w1 = repeat121(s);
    w1.push(1);
    let mut w2 = vec![0];
    w2.extend(repeat121(s));
    Stage { words: vec![w1, w2] }
}

/// The proper conjugate `1 -> 12(121)^{s-1}21`, `2 -> (121)^s 1`.
pub fn arbulu_theta_conjugate(n: u32) -> Stage {
    let s = arbulu_s(n);
    let mut w1 = vec![0, 1];
    w1.extend(repeat121(s - 1));
    w1.extend([1, 0]);
    let mut w2 = repeat121(s);
    w2.push(0);
    Stage { words: vec![w1, w2] }
}

/// Stages `1..=stages` of the Arbulu family; with `conjugate_odd`, odd stages use the proper
/// conjugate.
pub fn arbulu_scheme(stages: u32, conjugate_odd: bool) -> Result<SubstitutionScheme> {
    if stages > 5 {
        return Err(Error::TooLarge(format!("{stages} stages")));
    }
    let st = (1..=stages)
        .map(|n| if conjugate_odd && n % 2 == 1 { arbulu_theta_conjugate(n) } else { arbulu_theta(n) })
        .collect();
    SubstitutionScheme::new(st, "12")
}

/// Ordered diagram whose level `n + 1` reads stage `n`; `F_1` is a column of ones.
pub fn scheme_diagram(scheme: &SubstitutionScheme) -> Result<OrderedDiagram> {
    let letters = scheme.stages[0].letters();
    let mut mats = vec![IntMatrix::ones_column(letters)];
    let mut orders = vec![None];
    for st in &scheme.stages {
        let mut m = IntMatrix::zeros(st.letters(), letters);
        for (v, w) in st.words().iter().enumerate() {
            for &c in w {
                let x = m.get(v, c) + 1u8;
                m.set(v, c, x);
            }
        }
        mats.push(m);
        orders.push(Some(st.words().to_vec()));
    }
    OrderedDiagram::with_explicit_order(BratteliDiagram::new(mats, true)?, &orders)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skeleton_examples() {
        assert_eq!(skeleton_string("abab", 2).unwrap(), ("abab".into(), 0));
        assert_eq!(skeleton_string("abaa", 2).unwrap(), ("a*a*".into(), 1));
        assert!(matches!(skeleton_string("abc", 2), Err(Error::BadPeriod { .. })));
    }

    #[test]
    fn constant_scheme() {
        let st = Stage::parse(&["aaa"], "a").unwrap();
        let s = SubstitutionScheme::new(vec![st.clone(), st.clone(), st], "a").unwrap();
        assert_eq!(generate(&s, 3).unwrap(), vec![0; 27]);
    }

    #[test]
    fn arbulu_first_stage() {
        let s = arbulu_scheme(2, false).unwrap();
        assert_eq!(s.render(&generate(&s, 1).unwrap()), format!("{}2", "121".repeat(8)));
        assert_eq!(s.stage(2).length(), 625);
        assert_eq!(arbulu_theta(1).properness(), Properness::LeftProper);
        assert_eq!(arbulu_theta_conjugate(1).properness(), Properness::Proper);
    }

    #[test]
    fn ternary_densities() {
        let st = Stage::parse(&["aab", "abb"], "ab").unwrap();
        let s = SubstitutionScheme::new(vec![st; 4], "ab").unwrap();
        let prof = density_profile(&s, 3, DEFAULT_WINDOW).unwrap();
        let measured: Vec<String> = prof.rows.iter().map(|r| r.measured.to_string()).collect();
        assert_eq!(measured, vec!["1/3", "1/9", "1/27"]);
        assert!(prof.rows.iter().all(|r| r.measured == r.predicted));
    }
}
