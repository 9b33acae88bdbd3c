//! Return correlations `mu(X ∩ T^{-s} Y)` with certified two-sided bounds, rigidity scans and
//! hypothesis profiles for odometer-type rigidity.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::bits::{floor_sets, Bits, FloorLabeling, PathSet, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::interval::{round_dyadic, Interval};
use crate::measures::{biguint_rat, LevelMeasure};
use crate::ordering::OrderedDiagram;
use crate::vershik::{iterate, tower_prefixes, Iterated, PathPrefix};

/// How points of `X` near a tower top are counted in the upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Every floor within `s` of the top counts in full.
    #[default]
    Wholesale,
    /// Only floors within `s` of the top that belong to `X` count.
    Tight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationOptions {
    pub level: usize,
    pub cap: usize,
    pub boundary: Boundary,
}

impl CorrelationOptions {
    pub fn at_level(level: usize) -> Self {
        CorrelationOptions { level, cap: DEFAULT_CAP, boundary: Boundary::Wholesale }
    }

    pub fn tight(mut self) -> Self {
        self.boundary = Boundary::Tight;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

/// Certified bounds `lower <= mu(X ∩ T^{-s} Y) <= upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correlation {
    pub time: BigUint,
    pub lower: BigRational,
    pub upper: BigRational,
    /// `upper` before clamping to `min(mu X, mu Y)`.
    pub upper_raw: BigRational,
    pub measure_x: Interval,
    pub measure_y: Interval,
    /// Towers that were too tall to materialize.
    pub bound_only: Vec<usize>,
}

impl Correlation {
    pub fn bounds(&self) -> Interval {
        Interval::new(self.lower.clone(), self.upper.clone())
    }

    pub fn lower_ratio(&self) -> BigRational {
        &self.lower / self.measure_x.hi()
    }

    pub fn upper_ratio(&self) -> BigRational {
        &self.upper / self.measure_x.lo()
    }
}

struct TowerTerm {
    hits: BigUint,
    boundary: BigUint,
}

fn tower_terms(lx: &FloorLabeling, ly: &FloorLabeling, s: &BigUint, boundary: Boundary) -> Vec<Option<TowerTerm>> {
    (0..lx.towers())
        .map(|w| {
            let (tx, ty) = (lx.tower(w)?, ly.tower(w)?);
            let h = tx.len();
            let (hits, top) = match s.to_usize() {
                Some(s) if s < h => (tx.shifted_and_count(ty, s), s),
                _ => (0, h),
            };
            let bd = match boundary {
                Boundary::Wholesale => top as u64,
                Boundary::Tight => tx.count_range(h - top, h),
            };
            Some(TowerTerm { hits: BigUint::from(hits), boundary: BigUint::from(bd) })
        })
        .collect()
}

fn assemble(
    p: &[Interval],
    lx: &FloorLabeling,
    ly: &FloorLabeling,
    terms: &[Option<TowerTerm>],
    s: &BigUint,
    mx: &Interval,
    my: &Interval,
    prec: Option<u32>,
) -> Correlation {
    let mut lower = BigRational::zero();
    let mut upper = BigRational::zero();
    let mut bound_only = Vec::new();
    for (w, t) in terms.iter().enumerate() {
        match t {
            Some(t) => {
                lower += p[w].lo() * biguint_rat(&t.hits);
                upper += p[w].hi() * biguint_rat(&(&t.hits + &t.boundary));
            }
            None => {
                bound_only.push(w);
                upper += p[w].hi() * biguint_rat(lx.count(w).min(ly.count(w)));
            }
        }
    }
    if s.is_zero() {
        lower = lower.max(BigRational::zero());
    }
    let mut upper_raw = upper.clone();
    let cap = mx.hi().clone().min(my.hi().clone());
    if upper > cap {
        upper = cap;
    }
    if let Some(prec) = prec {
        lower = round_dyadic(&lower, prec, false);
        upper = round_dyadic(&upper, prec, true);
        upper_raw = round_dyadic(&upper_raw, prec, true);
    }
    if lower > upper {
        lower = upper.clone();
    }
    Correlation { time: s.clone(), lower, upper, upper_raw, measure_x: mx.clone(), measure_y: my.clone(), bound_only }
}

/// Labeling and measure of a test set, reusable across times.
#[derive(Debug, Clone)]
pub struct PreparedSet {
    pub labeling: FloorLabeling,
    pub measure: Interval,
}

pub fn prepare(od: &OrderedDiagram, m: &LevelMeasure, set: &PathSet, opts: &CorrelationOptions) -> Result<PreparedSet> {
    Ok(PreparedSet { labeling: floor_sets(od, set, opts.level, opts.cap)?, measure: set.measure(od, m)? })
}

pub fn correlation_prepared(
    m: &LevelMeasure,
    x: &PreparedSet,
    y: &PreparedSet,
    s: &BigUint,
    boundary: Boundary,
) -> Result<Correlation> {
    let level = x.labeling.level;
    let p = m.level(level)?;
    let terms = tower_terms(&x.labeling, &y.labeling, s, boundary);
    Ok(assemble(p, &x.labeling, &y.labeling, &terms, s, &x.measure, &y.measure, m.precision()))
}

/// Bounds for `mu(X ∩ T^{-s} Y)` from the floor labelings at `opts.level`.
pub fn set_correlation(
    od: &OrderedDiagram,
    m: &LevelMeasure,
    x: &PathSet,
    y: &PathSet,
    s: &BigUint,
    opts: &CorrelationOptions,
) -> Result<Correlation> {
    let px = prepare(od, m, x, opts)?;
    let py = if x == y { px.clone() } else { prepare(od, m, y, opts)? };
    correlation_prepared(m, &px, &py, s, opts.boundary)
}

/// `[L, U]` for `mu(T^{-s} C ∩ C)` with the wholesale boundary.
pub fn correlation_bounds(
    od: &OrderedDiagram,
    m: &LevelMeasure,
    c: &PathPrefix,
    s: &BigUint,
    level: usize,
) -> Result<Correlation> {
    let set = PathSet::cylinder(od, c)?;
    set_correlation(od, m, &set, &set, s, &CorrelationOptions::at_level(level))
}

/// `#{j : x[j] and y[j+s]}` for every `s` in `0..=smax`, exact.
pub fn correlate_all(x: &Bits, y: &Bits, smax: usize) -> Result<Vec<u64>> {
    let h = x.len().max(y.len());
    let direct_cost = (smax as u128 + 1) * (h as u128 / 64 + 1);
    if direct_cost <= 1 << 22 {
        return Ok((0..=smax).map(|s| x.shifted_and_count(y, s)).collect());
    }
    let n = (h + smax + 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let load = |b: &Bits| {
        let mut v = vec![Complex::new(0.0, 0.0); n];
        for i in b.ones() {
            v[i].re = 1.0;
        }
        v
    };
    let mut a = load(x);
    fwd.process(&mut a);
    let same = std::ptr::eq(x, y);
    let mut c = if same {
        a.iter().map(|z| Complex::new(z.norm_sqr(), 0.0)).collect::<Vec<_>>()
    } else {
        let mut b = load(y);
        fwd.process(&mut b);
        a.iter().zip(&b).map(|(p, q)| p.conj() * q).collect()
    };
    inv.process(&mut c);
    let scale = n as f64;
    let mut out = Vec::with_capacity(smax + 1);
    for z in c.iter().take(smax + 1) {
        let v = z.re / scale;
        let r = v.round();
        if (v - r).abs() > 0.25 || r < 0.0 {
            return Err(Error::Inconclusive("FFT correlation rounding error too large".into()));
        }
        out.push(r as u64);
    }
    Ok(out)
}

/// Bounds for `mu(X ∩ T^{-s} X)` at every `s` in `0..=smax`, computed for all shifts at once.
pub fn sweep_correlations(
    od: &OrderedDiagram,
    m: &LevelMeasure,
    x: &PathSet,
    smax: usize,
    opts: &CorrelationOptions,
) -> Result<Vec<Correlation>> {
    let px = prepare(od, m, x, opts)?;
    let lab = &px.labeling;
    let p = m.level(opts.level)?;
    let mut per_tower: Vec<Option<(Vec<u64>, Vec<u64>)>> = Vec::with_capacity(lab.towers());
    for w in 0..lab.towers() {
        per_tower.push(match lab.tower(w) {
            None => None,
            Some(t) => {
                let hits = correlate_all(t, t, smax)?;
                let h = t.len();
                let mut bd = Vec::with_capacity(smax + 1);
                let mut acc = 0u64;
                for s in 0..=smax {
                    if s > 0 && s <= h && t.get(h - s) {
                        acc += 1;
                    }
                    bd.push(match opts.boundary {
                        Boundary::Wholesale => s.min(h) as u64,
                        Boundary::Tight => acc,
                    });
                }
                Some((hits, bd))
            }
        });
    }
    Ok((0..=smax)
        .map(|s| {
            let terms: Vec<Option<TowerTerm>> = per_tower
                .iter()
                .map(|t| {
                    t.as_ref().map(|(hits, bd)| TowerTerm { hits: BigUint::from(hits[s]), boundary: BigUint::from(bd[s]) })
                })
                .collect();
            assemble(p, lab, lab, &terms, &BigUint::from(s), &px.measure, &px.measure, m.precision())
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    /// Per time `s = 0..=smax`, the smallest upper ratio over the family.
    pub min_upper_ratio: Vec<BigRational>,
    /// Index of the set attaining it.
    pub argmin: Vec<usize>,
}

impl SweepReport {
    /// Times in `from..` whose best upper ratio exceeds `threshold`.
    pub fn failures(&self, from: usize, threshold: &BigRational) -> Vec<usize> {
        (from..self.min_upper_ratio.len()).filter(|&s| &self.min_upper_ratio[s] > threshold).collect()
    }
}

/// Dense self-correlation sweep over a family; sets run in parallel.
pub fn dense_sweep(
    od: &OrderedDiagram,
    m: &LevelMeasure,
    sets: &[PathSet],
    smax: usize,
    opts: &CorrelationOptions,
) -> Result<SweepReport> {
    let ratios: Vec<Vec<BigRational>> = sets
        .par_iter()
        .map(|x| Ok(sweep_correlations(od, m, x, smax, opts)?.iter().map(Correlation::upper_ratio).collect()))
        .collect::<Result<_>>()?;
    let mut min_upper_ratio = Vec::with_capacity(smax + 1);
    let mut argmin = Vec::with_capacity(smax + 1);
    for s in 0..=smax {
        let (i, r) = ratios
            .iter()
            .enumerate()
            .map(|(i, r)| (i, &r[s]))
            .min_by(|a, b| a.1.cmp(b.1))
            .ok_or(Error::EmptyTable)?;
        min_upper_ratio.push(r.clone());
        argmin.push(i);
    }
    Ok(SweepReport { min_upper_ratio, argmin })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanCell {
    pub set: usize,
    pub time: usize,
    pub lower_ratio: BigRational,
    pub upper_ratio: BigRational,
    pub bound_only: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanTable {
    pub labels: Vec<String>,
    pub times: Vec<BigUint>,
    /// Row-major by set, then time.
    pub cells: Vec<ScanCell>,
}

impl ScanTable {
    pub fn cell(&self, set: usize, time: usize) -> &ScanCell {
        &self.cells[set * self.times.len() + time]
    }

    /// Per time, the minimum lower ratio over all sets.
    pub fn min_lower_per_time(&self) -> Vec<BigRational> {
        (0..self.times.len())
            .map(|t| {
                (0..self.labels.len()).map(|s| self.cell(s, t).lower_ratio.clone()).min().unwrap_or_else(BigRational::zero)
            })
            .collect()
    }
}

/// Ratio intervals `[L, U] / mu(C)` for every (set, time) pair; cells run in parallel.
pub fn rigidity_scan(
    od: &OrderedDiagram,
    m: &LevelMeasure,
    sets: &[(String, PathSet)],
    times: &[BigUint],
    opts: &CorrelationOptions,
) -> Result<ScanTable> {
    let prepared: Vec<PreparedSet> = sets.par_iter().map(|(_, s)| prepare(od, m, s, opts)).collect::<Result<_>>()?;
    let cells: Vec<ScanCell> = (0..sets.len() * times.len())
        .into_par_iter()
        .map(|k| {
            let (i, t) = (k / times.len(), k % times.len());
            let c = correlation_prepared(m, &prepared[i], &prepared[i], &times[t], opts.boundary)?;
            Ok(ScanCell {
                set: i,
                time: t,
                lower_ratio: c.lower_ratio(),
                upper_ratio: c.upper_ratio(),
                bound_only: !c.bound_only.is_empty(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScanTable { labels: sets.iter().map(|(l, _)| l.clone()).collect(), times: times.to_vec(), cells })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidityFloor {
    /// Certified on the tested family only.
    pub alpha: BigRational,
    pub time_index: usize,
    /// The best time is 0, so the bound says nothing.
    pub degenerate: bool,
}

pub fn partial_rigidity_floor(table: &ScanTable) -> Result<RigidityFloor> {
    if table.times.is_empty() || table.labels.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mins = table.min_lower_per_time();
    let (time_index, alpha) = mins
        .into_iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .ok_or(Error::EmptyTable)?;
    Ok(RigidityFloor { alpha, time_index, degenerate: table.times[time_index].is_zero() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdometerCertificate {
    /// `sum_{w != spine_n} f^(n+1)_{spine_{n+1}, w} / f^(n+1)_{spine_{n+1}, spine_n}` for `n >= 1`.
    pub qf_ratios: Vec<BigRational>,
    /// Whether the vertical edges sit consecutively in each spine order word.
    pub consecutive: Option<bool>,
    /// Running maximum of `f^(n)_{spine_n, spine_{n-1}}`.
    pub limsup_edges: Vec<BigUint>,
    /// `h_n(spine_n)`.
    pub predicted_sequence: Vec<BigUint>,
}

pub fn odometer_rigidity_certificate(
    d: &crate::diagram::BratteliDiagram,
    spine: &[usize],
    order: Option<&OrderedDiagram>,
) -> Result<OdometerCertificate> {
    let depth = d.levels();
    if spine.len() < depth {
        return Err(Error::SpineBroken { level: spine.len() + 1 });
    }
    let vertical = |n: usize| -> Result<BigUint> {
        let f = d.incidence(n)?;
        let prev = if n == 1 { 0 } else { spine[n - 2] };
        if spine[n - 1] >= f.rows() || prev >= f.cols() || f.get(spine[n - 1], prev).is_zero() {
            return Err(Error::SpineBroken { level: n });
        }
        Ok(f.get(spine[n - 1], prev).clone())
    };
    let mut limsup_edges = Vec::with_capacity(depth);
    let mut run = BigUint::zero();
    for n in 1..=depth {
        let a = vertical(n)?;
        if a > run {
            run = a;
        }
        limsup_edges.push(run.clone());
    }
    let mut qf_ratios = Vec::new();
    for n in 1..depth {
        let f = d.incidence(n + 1)?;
        let a = vertical(n + 1)?;
        let off: BigUint = (0..f.cols()).filter(|&w| w != spine[n - 1]).map(|w| f.get(spine[n], w)).sum();
        qf_ratios.push(biguint_rat(&off) / biguint_rat(&a));
    }
    let consecutive = match order {
        None => None,
        Some(od) => {
            let mut restrict = vec![vec![0]];
            restrict.extend(spine.iter().take(od.levels()).map(|&v| vec![v]));
            Some(od.is_consecutive(Some(&restrict))?)
        }
    };
    let predicted_sequence = (1..=depth).map(|n| d.height(n, spine[n - 1]).clone()).collect();
    Ok(OdometerCertificate { qf_ratios, consecutive, limsup_edges, predicted_sequence })
}

/// `rho[w][v]`: positions `i` with `word(w)_i = word(w)_{i+gap} = v`.
pub fn repeated_block_counts(od: &OrderedDiagram, level: usize, gap: usize) -> Result<Vec<Vec<u64>>> {
    let f = od.base().incidence(level)?;
    let sums = f.row_sums();
    if sums.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::NotErs { level });
    }
    Ok((0..f.rows())
        .map(|w| {
            let word = od.word(level, w);
            let mut row = vec![0u64; f.cols()];
            for i in 0..word.len().saturating_sub(gap) {
                if word[i] == word[i + gap] {
                    row[word[i]] += 1;
                }
            }
            row
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    /// Mass of prefixes in `X` whose `s`-th image stays in the diagram and lands in `Y`.
    pub value: Interval,
    /// Mass of prefixes in `X` whose orbit leaves the truncated diagram.
    pub unresolved: Interval,
}

/// Oracle: enumerate every prefix of length `depth`, iterate the Vershik map and test membership.
pub fn brute_force_correlation(
    od: &OrderedDiagram,
    m: &LevelMeasure,
    x: &PathSet,
    y: &PathSet,
    s: &BigUint,
    depth: usize,
) -> Result<BruteForce> {
    let d = od.base();
    d.check_level(depth)?;
    let total: BigUint = d.height_slice(depth).iter().sum();
    if total > BigUint::from(1u32 << 20) {
        return Err(Error::TooLarge(format!("{total} prefixes at depth {depth}")));
    }
    let p = m.level(depth)?;
    let steps = BigInt::from(s.clone());
    let mut value = Interval::zero();
    let mut unresolved = Interval::zero();
    for v in 0..d.vertex_count(depth) {
        for q in tower_prefixes(od, depth, v) {
            if !x.contains(od, &q)? {
                continue;
            }
            match iterate(od, &q, &steps)? {
                Iterated::Prefix(r) => {
                    if y.contains(od, &r)? {
                        value = value.add(&p[v]);
                    }
                }
                Iterated::Overflow(_) => unresolved = unresolved.add(&p[v]),
            }
        }
    }
    Ok(BruteForce { value, unresolved })
}

/// Exact `mu(X ∩ T^{-s} Y)` on a one-vertex-per-level diagram: the Vershik map adds one to
/// the ordinal with carries moving only upward, so digits up to `level` of `T^s x` depend only on
/// digits up to `level` of `x` and the shift wraps modulo the tower height.
pub fn odometer_correlation(
    od: &OrderedDiagram,
    m: &LevelMeasure,
    x: &PathSet,
    y: &PathSet,
    s: &BigUint,
    opts: &CorrelationOptions,
) -> Result<Interval> {
    let d = od.base();
    if let Some(n) = (1..=d.levels()).find(|&n| d.vertex_count(n) != 1) {
        return Err(Error::ShapeMismatch(format!("level {n} has more than one vertex")));
    }
    let lx = floor_sets(od, x, opts.level, opts.cap)?;
    let ly = floor_sets(od, y, opts.level, opts.cap)?;
    let (tx, ty) = match (lx.tower(0), ly.tower(0)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::CapExceeded { height: d.height(opts.level, 0).to_string(), cap: opts.cap }),
    };
    let h = tx.len();
    let r = (s % BigUint::from(h)).to_usize().expect("below height");
    let hits = tx.shifted_and_count(ty, r) + if r == 0 { 0 } else { ty.shifted_and_count(tx, h - r) };
    Ok(m.level(opts.level)?[0].scale(&BigRational::from_integer(hits.into())))
}

/// Every prefix of length `depth`, grouped by end vertex in ordinal order.
pub fn cylinders(od: &OrderedDiagram, depth: usize) -> Vec<PathPrefix> {
    (0..od.base().vertex_count(depth)).flat_map(|v| tower_prefixes(od, depth, v)).collect()
}

/// `e1.e2...eN@v` with 1-based edge indices and end vertex.
pub fn prefix_label(p: &PathPrefix) -> String {
    let edges: Vec<String> = p.edges.iter().map(|e| (e + 1).to_string()).collect();
    format!("{}@{}", edges.join("."), p.end + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{BratteliDiagram, Dyadic};
    use crate::interval::rat;
    use crate::measures::ecs_measure;

    fn dyadic(depth: usize) -> (OrderedDiagram, LevelMeasure) {
        let d = BratteliDiagram::from_generator(&Dyadic, depth).unwrap();
        let m = ecs_measure(&d).unwrap();
        (OrderedDiagram::left_to_right(d), m)
    }

    #[test]
    fn parity_cylinder_at_shift_two() {
        let (od, m) = dyadic(8);
        let c = PathPrefix::new(0, vec![0, 0]);
        let r = correlation_bounds(&od, &m, &c, &BigUint::from(2u8), 4).unwrap();
        assert_eq!((r.lower.clone(), r.upper_raw.clone(), r.upper.clone()), (rat(3, 8), rat(5, 8), rat(1, 2)));
        let x = PathSet::cylinder(&od, &c).unwrap();
        let bf = brute_force_correlation(&od, &m, &x, &x, &BigUint::from(2u8), 8).unwrap();
        assert!(r.bounds().contains(bf.value.lo()));
    }

    #[test]
    fn odometer_wraps_exactly() {
        let (od, m) = dyadic(8);
        let x = PathSet::cylinder(&od, &PathPrefix::new(0, vec![0, 1])).unwrap();
        let opts = CorrelationOptions::at_level(8);
        for s in 0u32..300 {
            let v = odometer_correlation(&od, &m, &x, &x, &BigUint::from(s), &opts).unwrap();
            let expect = if s % 2 == 0 { rat(1, 2) } else { rat(0, 1) };
            assert_eq!(v.exact_value(), Some(&expect), "s = {s}");
        }
    }

    #[test]
    fn fft_matches_direct() {
        let pattern: Vec<bool> = (0..70_000).map(|i| (i * 31 + i / 7) % 11 < 4).collect();
        let b = Bits::from_bools(&pattern);
        let fast = correlate_all(&b, &b, 200).unwrap();
        for s in [0usize, 1, 63, 64, 199, 200] {
            assert_eq!(fast[s], b.shifted_and_count(&b, s));
        }
    }

    #[test]
    fn constant_word_repeats() {
        let d = BratteliDiagram::from_generator(&Dyadic, 3).unwrap();
        let od = OrderedDiagram::left_to_right(d);
        assert_eq!(repeated_block_counts(&od, 2, 1).unwrap(), vec![vec![1]]);
        assert_eq!(repeated_block_counts(&od, 2, 2).unwrap(), vec![vec![0]]);
    }
}
