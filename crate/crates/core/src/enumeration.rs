//! Enumeration scales from kneading maps, greedy expansions, the spine Bratteli diagram and the
//! non-rigidity witness for the gap-5 scale.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bits::{PathSet, ProductSet, DEFAULT_CAP};
use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::interval::{Interval, DEFAULT_PRECISION};
use crate::matrix::IntMatrix;
use crate::measures::{biguint_rat, stationary_measures, LevelMeasure, StationaryMeasure};
use crate::ordering::OrderedDiagram;
use crate::rigidity::{correlation_prepared, prepare, Boundary, Correlation, CorrelationOptions};
use crate::vershik::{from_ordinal, PathPrefix};

/// Kneading map `Q` tabulated on `1..=k_max` with cutting times `S_0..S_{k_max}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationScale {
    q: Vec<usize>,
    s: Vec<BigUint>,
}

impl EnumerationScale {
    pub fn q(&self, k: usize) -> usize {
        self.q[k]
    }

    pub fn s(&self, k: usize) -> &BigUint {
        &self.s[k]
    }

    pub fn k_max(&self) -> usize {
        self.s.len() - 1
    }

    pub fn table(&self) -> &[BigUint] {
        &self.s
    }

    /// `k = max{j : S_j <= n}`.
    pub fn floor_index(&self, n: &BigUint) -> Result<usize> {
        if n >= &self.s[self.k_max()] {
            return Err(Error::ScaleTooShort(format!("{n} beyond S_{}", self.k_max())));
        }
        Ok(self.s.partition_point(|x| x <= n).saturating_sub(1))
    }
}

/// `S_0 = 1`, `S_k = S_{k-1} + S_{Q(k)}`.
pub fn cutting_times(q: impl Fn(usize) -> usize, k_max: usize) -> Result<EnumerationScale> {
    let mut qs = vec![0];
    let mut s = vec![BigUint::one()];
    for k in 1..=k_max {
        let qk = q(k);
        if qk >= k {
            return Err(Error::BadKneadingMap(format!("Q({k}) = {qk} is not below {k}")));
        }
        let next = &s[k - 1] + &s[qk];
        qs.push(qk);
        s.push(next);
    }
    Ok(EnumerationScale { q: qs, s })
}

/// `Q(k) = max(0, k - d)`.
pub fn linear_scale(d: usize, k_max: usize) -> Result<EnumerationScale> {
    if d == 0 {
        return Err(Error::BadKneadingMap("gap d must be positive".into()));
    }
    cutting_times(|k| k.saturating_sub(d), k_max)
}

/// `Q(k) = max(0, expr(k))` for an expression in `n`.
pub fn expr_scale(expr: &Expr, k_max: usize) -> Result<EnumerationScale> {
    let vals: Vec<usize> = (0..=k_max as u64)
        .map(|k| Ok(expr.eval(k)?.max(num_bigint::BigInt::zero()).to_usize().unwrap_or(usize::MAX)))
        .collect::<Result<_>>()?;
    cutting_times(|k| vals[k], k_max)
}

/// Greedy digits, stored as the sorted positions of the ones.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GreedyDigits {
    pub ones: Vec<usize>,
}

impl GreedyDigits {
    pub fn digit(&self, i: usize) -> u8 {
        u8::from(self.ones.binary_search(&i).is_ok())
    }

    /// `x_0 .. x_{len-1}`.
    pub fn digits(&self, len: usize) -> Vec<u8> {
        (0..len).map(|i| self.digit(i)).collect()
    }
}

pub fn greedy_expand(scale: &EnumerationScale, n: &BigUint) -> Result<GreedyDigits> {
    if n >= scale.s(scale.k_max()) {
        return Err(Error::ScaleTooShort(format!("{n} not below S_{}", scale.k_max())));
    }
    let mut rem = n.clone();
    let mut ones = Vec::new();
    for j in (0..scale.k_max()).rev() {
        if scale.s(j) <= &rem {
            rem -= scale.s(j);
            ones.push(j);
        }
    }
    ones.reverse();
    Ok(GreedyDigits { ones })
}

pub fn value(scale: &EnumerationScale, digits: &GreedyDigits) -> Result<BigUint> {
    digits
        .ones
        .iter()
        .map(|&i| {
            if i > scale.k_max() {
                Err(Error::ScaleTooShort(format!("digit {i} beyond the table")))
            } else {
                Ok(scale.s(i).clone())
            }
        })
        .sum()
}

/// `<N + 1>` from `<N>`: clears the digits below the largest `j` whose lower part is `S_j - 1`
/// and sets `x_j`.
pub fn add_one(scale: &EnumerationScale, digits: &GreedyDigits) -> Result<GreedyDigits> {
    let mut low = BigUint::zero();
    let mut carry = None;
    let mut next = 0;
    for j in 0..=scale.k_max() {
        if &low + 1u8 == *scale.s(j) {
            carry = Some(j);
        }
        while next < digits.ones.len() && digits.ones[next] == j {
            low += scale.s(j);
            next += 1;
        }
    }
    if next < digits.ones.len() {
        return Err(Error::ScaleTooShort("digits beyond the table".into()));
    }
    let j = carry.expect("S_0 = 1 always carries");
    if j == scale.k_max() {
        return Err(Error::ScaleTooShort(format!("successor reaches S_{}", scale.k_max())));
    }
    let mut ones: Vec<usize> = digits.ones.iter().copied().filter(|&i| i > j).collect();
    ones.insert(0, j);
    Ok(GreedyDigits { ones })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkViolation {
    pub k: usize,
    pub lhs: BigUint,
    pub rhs: BigUint,
}

/// Checks `S_{k+3} = S_{k+2} + S_{k-2} = S_{k+1} + S_k + e(k)` with `e = +1` for `k = 0, 5`,
/// `-1` for `k = 2, 3` and `0` for `k = 1, 4 (mod 6)`.
pub fn sk_identity_check(scale: &EnumerationScale, from: usize, to: usize) -> Result<Vec<SkViolation>> {
    if from < 2 || to + 3 > scale.k_max() {
        return Err(Error::ScaleTooShort(format!("need 2 <= k and k + 3 <= {}", scale.k_max())));
    }
    let mut out = Vec::new();
    for k in from..=to {
        let lhs = scale.s(k + 3).clone();
        let base = scale.s(k + 1) + scale.s(k);
        let rhs = match k % 6 {
            0 | 5 => base + 1u8,
            2 | 3 => base - 1u8,
            _ => base,
        };
        let rec = scale.s(k + 2) + scale.s(k - 2);
        if lhs != rhs || lhs != rec {
            out.push(SkViolation { k, lhs, rhs });
        }
    }
    Ok(out)
}

/// Vertex order at level `i >= 1`: `v_i` first, then `K_i = {k : Q(k) < i < k}` ascending.
fn spine_levels(scale: &EnumerationScale, depth: usize) -> Result<Vec<Vec<usize>>> {
    if scale.k_max() <= depth || scale.q(scale.k_max()) < depth {
        return Err(Error::ScaleTooShort(format!("Q must exceed {depth} at the end of the table")));
    }
    Ok((1..=depth)
        .map(|i| {
            let mut v = vec![i];
            v.extend((i + 1..=scale.k_max()).filter(|&k| scale.q(k) < i));
            v
        })
        .collect())
}

/// The spine diagram of the scale, ordered by edge labels (label 0 before label 1).
pub fn spine_diagram(scale: &EnumerationScale, depth: usize) -> Result<OrderedDiagram> {
    let levels = spine_levels(scale, depth)?;
    let mut mats = vec![IntMatrix::ones_column(levels[0].len())];
    let mut orders: Vec<Option<Vec<Vec<usize>>>> = vec![None];
    for i in 1..depth {
        let (src, dst) = (&levels[i - 1], &levels[i]);
        let pos = |k: usize| src.iter().position(|&x| x == k).ok_or(Error::SpineBroken { level: i + 1 });
        let mut words = Vec::with_capacity(dst.len());
        let next = i + 1;
        let second = if scale.q(next) == i { 0 } else { pos(next)? };
        words.push(vec![0, second]);
        for &k in &dst[1..] {
            words.push(vec![if scale.q(k) == i { 0 } else { pos(k)? }]);
        }
        let mut m = IntMatrix::zeros(dst.len(), src.len());
        for (r, w) in words.iter().enumerate() {
            for &c in w {
                let v = m.get(r, c) + 1u8;
                m.set(r, c, v);
            }
        }
        mats.push(m);
        orders.push(Some(words));
    }
    OrderedDiagram::with_explicit_order(BratteliDiagram::new(mats, true)?, &orders)
}

/// Labels `x_0, x_1, ...` of a prefix: `x_i` is the edge index at level `i + 2`.
pub fn prefix_digits(p: &PathPrefix) -> Vec<u8> {
    p.edges.iter().skip(1).map(|&e| e as u8).collect()
}

/// Paths with the given digits `(i, x_i)`; the digit at position `i` lives at level `i + 2`.
pub fn digit_set(od: &OrderedDiagram, digits: &[(usize, u8)]) -> Result<ProductSet> {
    let depth = digits.iter().map(|&(i, _)| i + 2).max().unwrap_or(1);
    let mut set = ProductSet::full(od, depth)?;
    for &(i, x) in digits {
        set.restrict(i + 2, |_, e| e == x as usize)?;
    }
    Ok(set)
}

/// Digits `word` placed at positions `start, start + 1, ...`.
pub fn digit_block(start: usize, word: &str) -> Vec<(usize, u8)> {
    word.bytes().enumerate().map(|(j, b)| (start + j, b - b'0')).collect()
}

/// Ordinals `N < S_{n-1}` in the spine tower at level `n` whose prefix labels differ from `<N>`.
pub fn digit_path_mismatches(scale: &EnumerationScale, od: &OrderedDiagram, n: usize) -> Result<Vec<BigUint>> {
    let top = scale.s(n - 1).to_u64().ok_or_else(|| Error::TooLarge("spine tower".into()))?;
    let mut bad = Vec::new();
    for big_n in 0..top {
        let nn = BigUint::from(big_n);
        let p = from_ordinal(od, n, 0, &nn)?;
        let g = greedy_expand(scale, &nn)?;
        if prefix_digits(&p) != g.digits(n - 1) {
            bad.push(nn);
        }
    }
    Ok(bad)
}

/// A spine diagram with a stationary gap-`d` scale and its unique invariant measure.
#[derive(Debug, Clone)]
pub struct SpineSystem {
    pub d: usize,
    pub scale: EnumerationScale,
    pub od: OrderedDiagram,
    pub stationary: StationaryMeasure,
}

impl SpineSystem {
    pub fn linear(d: usize, depth: usize, prec: u32) -> Result<Self> {
        let scale = linear_scale(d, depth + d + 1)?;
        let od = spine_diagram(&scale, depth)?;
        let f = if depth >= 2 { od.base().incidence(2)?.clone() } else { IntMatrix::from_u64(&[vec![2]])? };
        let mut ms = stationary_measures(&f, depth, prec)?;
        let stationary = ms.remove(0);
        Ok(SpineSystem { d, scale, od, stationary })
    }

    pub fn measure(&self) -> &LevelMeasure {
        &self.stationary.measure
    }

    /// `xi_i = mu(C_1(i))`.
    pub fn xi(&self) -> &[Interval] {
        &self.stationary.x
    }
}

pub fn default_spine(depth: usize) -> Result<SpineSystem> {
    SpineSystem::linear(5, depth, DEFAULT_PRECISION)
}

/// Levels past the deepest constrained digit used for witness correlations.
pub const WITNESS_MARGIN: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub n: BigUint,
    pub k: usize,
    pub n_prime: BigUint,
    pub level: usize,
    pub measure_a: Interval,
    /// `mu(B ∩ T^{-n} A)` for `B_k^0, B_k^1, B_k^{-1}`.
    pub correlations: Vec<Correlation>,
    /// Index into `correlations` of the first set with upper bound below `mu(B) / 2`.
    pub verdict: Option<usize>,
    /// The set the mod-6 case split points to when `n = S_k`.
    pub expected: Option<usize>,
}

pub const WITNESS_LABELS: [&str; 3] = ["B0", "B+1", "B-1"];

/// `A = [100000]_{0,5}` and `B_k^0, B_k^1, B_k^{-1}`.
pub fn witness_sets(od: &OrderedDiagram, k: usize) -> Result<(PathSet, Vec<PathSet>)> {
    let a = digit_block(0, "100000");
    let set_a = PathSet::new(vec![digit_set(od, &a)?]);
    let bs = ["00000000000", "00000010000", "00001000000"]
        .iter()
        .map(|w| {
            let mut digits = a.clone();
            digits.extend(digit_block(k - 5, w));
            Ok(PathSet::new(vec![digit_set(od, &digits)?]))
        })
        .collect::<Result<_>>()?;
    Ok((set_a, bs))
}

/// Correlations of the three `B` sets against `A` at time `n >= S_12`, with the tight boundary
/// at level `k + 7 + WITNESS_MARGIN` (or the deepest level built).
pub fn nonrigidity_witness(sys: &SpineSystem, n: &BigUint, cap: usize) -> Result<WitnessReport> {
    if n < sys.scale.s(12) {
        return Err(Error::ScaleTooShort(format!("n = {n} below S_12 = {}", sys.scale.s(12))));
    }
    let k = sys.scale.floor_index(n)?;
    let n_prime = n - sys.scale.s(k);
    if k + 7 > sys.od.levels() {
        return Err(Error::ScaleTooShort(format!("witness needs depth {} but only {} levels", k + 7, sys.od.levels())));
    }
    let level = (k + 7 + WITNESS_MARGIN).min(sys.od.levels());
    let opts = CorrelationOptions { level, cap, boundary: Boundary::Tight };
    let m = sys.measure();
    let (a, bs) = witness_sets(&sys.od, k)?;
    let pa = prepare(&sys.od, m, &a, &opts)?;
    let correlations = bs
        .iter()
        .map(|b| correlation_prepared(m, &prepare(&sys.od, m, b, &opts)?, &pa, n, Boundary::Tight))
        .collect::<Result<Vec<_>>>()?;
    let two = BigRational::from_integer(2.into());
    let verdict = correlations.iter().position(|c| c.bound_only.is_empty() && c.upper < c.measure_x.lo() / &two);
    let expected = n_prime.is_zero().then_some(match k % 6 {
        0 | 5 | 2 | 3 => 1,
        _ => 2,
    });
    Ok(WitnessReport { n: n.clone(), k, n_prime, level, measure_a: pa.measure, correlations, verdict, expected })
}

pub fn default_witness(sys: &SpineSystem, n: &BigUint) -> Result<WitnessReport> {
    nonrigidity_witness(sys, n, DEFAULT_CAP)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TelescopeBlock {
    pub from: usize,
    pub to: usize,
    pub positive: bool,
    pub min_max_ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialRigidityReport {
    pub d: usize,
    pub blocks: Vec<TelescopeBlock>,
}

/// Products of `2d` consecutive spine incidence matrices with `d = sup (k - Q(k))` on the table.
pub fn partial_rigidity_check(scale: &EnumerationScale, depth: usize) -> Result<PartialRigidityReport> {
    let gap = |upto: usize| (1..=upto).map(|k| k - scale.q(k)).max().unwrap_or(0);
    let d = gap(scale.k_max());
    if d > gap(scale.k_max() / 2) {
        return Err(Error::UnboundedGapOnRange);
    }
    let od = spine_diagram(scale, depth)?;
    let step = 2 * d;
    let mut blocks = Vec::new();
    let mut from = 1;
    while from + step <= depth {
        let p = od.base().incidence_product(from, from + step)?;
        let (lo, hi) = (p.min_entry(), p.max_entry());
        blocks.push(TelescopeBlock {
            from,
            to: from + step,
            positive: p.is_positive(),
            min_max_ratio: biguint_rat(&lo) / biguint_rat(&hi),
        });
        from += 1;
    }
    Ok(PartialRigidityReport { d, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_five_table() {
        let s = linear_scale(5, 13).unwrap();
        let got: Vec<String> = s.table().iter().map(ToString::to_string).collect();
        assert_eq!(got.join(","), "1,2,3,4,5,6,8,11,15,20,26,34,45,60");
    }

    #[test]
    fn greedy_examples() {
        let s = linear_scale(5, 20).unwrap();
        assert_eq!(greedy_expand(&s, &BigUint::from(7u8)).unwrap().ones, vec![0, 5]);
        assert_eq!(greedy_expand(&s, &BigUint::from(13u8)).unwrap().ones, vec![1, 7]);
        let seven = GreedyDigits { ones: vec![0, 5] };
        assert_eq!(add_one(&s, &seven).unwrap().ones, vec![6]);
        assert_eq!(add_one(&s, &GreedyDigits { ones: vec![4] }).unwrap().ones, vec![5]);
    }

    #[test]
    fn spine_heights_follow_scale() {
        let s = linear_scale(5, 40).unwrap();
        let od = spine_diagram(&s, 20).unwrap();
        for i in 1..=20 {
            assert_eq!(od.base().height(i, 0), s.s(i - 1), "level {i}");
        }
        assert_eq!(od.base().incidence(3).unwrap().to_string(), "[[1,1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[0,0,0,0,1],[1,0,0,0,0]]");
        assert!(digit_path_mismatches(&s, &od, 10).unwrap().is_empty());
    }

    #[test]
    fn unbounded_gap_rejected() {
        let s = cutting_times(|k| k / 2, 40).unwrap();
        assert_eq!(partial_rigidity_check(&s, 10), Err(Error::UnboundedGapOnRange));
    }
}
