//! Invariant measures on diagrams: closed forms, stationary eigen-measures, odometer
//! extensions, series criteria and invariant brackets.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};
use crate::interval::{Interval, DEFAULT_PRECISION};
use crate::matrix::IntMatrix;
use crate::poly::{charpoly_with_adjugate, largest_root_in, Poly, RatMatrix};
use crate::vershik::PathPrefix;

pub fn biguint_rat(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// `p_n(v)`: the measure of any cylinder of length `n` ending at `v`, for `1 <= n <= depth()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMeasure {
    values: Vec<Vec<Interval>>,
    precision: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationCertificate {
    /// `sum_v h_n(v) p_n(v)` per level.
    pub totals: Vec<Interval>,
    /// Largest distance from 1 over all levels and both endpoints.
    pub deviation: BigRational,
}

impl LevelMeasure {
    pub fn exact(values: Vec<Vec<BigRational>>) -> Self {
        LevelMeasure {
            values: values.into_iter().map(|l| l.into_iter().map(Interval::exact).collect()).collect(),
            precision: None,
        }
    }

    pub fn from_intervals(values: Vec<Vec<Interval>>, precision: u32) -> Self {
        let exact = values.iter().flatten().all(Interval::is_exact);
        LevelMeasure { values, precision: (!exact).then_some(precision) }
    }

    pub fn depth(&self) -> usize {
        self.values.len()
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    pub fn p(&self, n: usize, v: usize) -> &Interval {
        &self.values[n - 1][v]
    }

    pub fn level(&self, n: usize) -> Result<&[Interval]> {
        if n == 0 || n > self.depth() {
            return Err(Error::LevelOutOfRange { level: n, max: self.depth() });
        }
        Ok(&self.values[n - 1])
    }

    pub fn cylinder(&self, p: &PathPrefix) -> Result<&Interval> {
        Ok(&self.level(p.depth())?[p.end])
    }

    pub fn certificate(&self, d: &BratteliDiagram) -> NormalizationCertificate {
        let one = BigRational::one();
        let mut dev = BigRational::zero();
        let totals: Vec<Interval> = (1..=self.depth().min(d.levels()))
            .map(|n| {
                let t = self.values[n - 1]
                    .iter()
                    .zip(d.height_slice(n))
                    .fold(Interval::zero(), |acc, (p, h)| acc.add(&p.scale(&biguint_rat(h))));
                for e in [t.lo(), t.hi()] {
                    let gap = (e - &one).abs();
                    if gap > dev {
                        dev = gap;
                    }
                }
                t
            })
            .collect();
        NormalizationCertificate { totals, deviation: dev }
    }

    /// Checks `p_n = F_{n+1}^T p_{n+1}`: exact equality for exact measures, interval overlap
    /// otherwise. Returns the first failing level.
    pub fn compatibility_failure(&self, d: &BratteliDiagram) -> Option<usize> {
        for n in 1..self.depth().min(d.levels()) {
            let f = d.incidence(n + 1).expect("level in range");
            for w in 0..f.cols() {
                let pushed = (0..f.rows()).fold(Interval::zero(), |acc, v| {
                    acc.add(&self.values[n][v].scale(&biguint_rat(f.get(v, w))))
                });
                let ok = if self.is_exact() { pushed == self.values[n - 1][w] } else { pushed.overlaps(&self.values[n - 1][w]) };
                if !ok {
                    return Some(n);
                }
            }
        }
        None
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().flatten().all(|x| !x.hi().is_negative())
    }
}

/// `p_n(v) = 1/(c_1...c_n)` for a diagram with equal column sums at every level.
pub fn ecs_measure(d: &BratteliDiagram) -> Result<LevelMeasure> {
    let mut prod = BigUint::one();
    let mut values = Vec::new();
    for n in 1..=d.levels() {
        let cs = d.incidence(n)?.col_sums();
        if cs.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::NotEcs { level: n });
        }
        prod *= &cs[0];
        let p = BigRational::new(BigInt::one(), BigInt::from(prod.clone()));
        values.push(vec![p; d.vertex_count(n)]);
    }
    Ok(LevelMeasure::exact(values))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryMeasure {
    pub lambda: Interval,
    /// Normalized so that `sum_v h_1(v) x_v = 1` with a simple hat.
    pub x: Vec<Interval>,
    pub measure: LevelMeasure,
    pub support: Vec<usize>,
    /// The strongly connected class whose Perron value is `lambda`.
    pub class: Vec<usize>,
    /// `A x` and `lambda x` overlap componentwise.
    pub eigen_residual_ok: bool,
}

fn reach_matrix(a: &IntMatrix) -> Vec<Vec<bool>> {
    let n = a.rows();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        let mut stack = vec![i];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !a.get(u, v).is_zero() && !row[v] {
                    row[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    r
}

/// Strongly connected classes of the digraph with an arc `i -> j` when `a_ij > 0`.
pub fn strong_classes(a: &IntMatrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let r = reach_matrix(a);
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&j| j == i || (r[i][j] && r[j][i])).collect();
        for &j in &class {
            seen[j] = true;
        }
        out.push(class);
    }
    out
}

fn sub_rat(a: &IntMatrix, rows: &[usize], cols: &[usize]) -> RatMatrix {
    rows.iter().map(|&i| cols.iter().map(|&j| biguint_rat(a.get(i, j))).collect()).collect()
}

fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = x.rem(&y);
        x = y;
        y = r;
    }
    x
}

/// Perron value of a class: the largest real root of its characteristic polynomial.
fn class_perron(a: &IntMatrix, class: &[usize], prec: u32) -> (Poly, Interval, Vec<RatMatrix>) {
    let m = sub_rat(a, class, class);
    let (p, adj) = charpoly_with_adjugate(&m);
    let bound = m.iter().map(|row| row.iter().sum::<BigRational>()).max().unwrap_or_else(BigRational::zero)
        + BigRational::one();
    let lower = -BigRational::one();
    let rho = largest_root_in(&p, &lower, &bound, prec).unwrap_or_else(|| Interval::exact(BigRational::zero()));
    (p, rho, adj)
}

/// Greater-than on Perron values, resolving overlapping enclosures through a common root.
fn perron_greater(pa: &Poly, ra: &Interval, pb: &Poly, rb: &Interval) -> Result<bool> {
    if ra.lo() > rb.hi() {
        return Ok(true);
    }
    if ra.hi() < rb.lo() {
        return Ok(false);
    }
    if ra.is_exact() && rb.is_exact() {
        return Ok(ra.lo() > rb.lo());
    }
    let g = poly_gcd(pa, pb);
    if g.degree() > 0 {
        let lo = ra.lo().clone().max(rb.lo().clone());
        let hi = ra.hi().clone().min(rb.hi().clone());
        let seq = g.sturm_sequence();
        let eps = BigRational::new(BigInt::one(), BigInt::one() << 1024usize);
        if crate::poly::count_roots(&seq, &(lo - eps), &hi) > 0 {
            return Ok(false);
        }
    }
    Err(Error::Inconclusive("Perron values of two classes are not separated".into()))
}

/// Solves `M y = b` by interval Gaussian elimination without pivoting.
fn interval_solve(mut m: Vec<Vec<Interval>>, mut b: Vec<Interval>, prec: u32) -> Result<Vec<Interval>> {
    let n = b.len();
    for k in 0..n {
        if m[k][k].contains(&BigRational::zero()) {
            return Err(Error::Inconclusive("zero pivot in interval elimination".into()));
        }
        for i in k + 1..n {
            if m[i][k].is_exact() && m[i][k].lo().is_zero() {
                continue;
            }
            let factor = m[i][k].div(&m[k][k])?.round_out(prec);
            for j in k..n {
                let t = m[i][j].sub(&factor.mul(&m[k][j])).round_out(prec);
                m[i][j] = t;
            }
            b[i] = b[i].sub(&factor.mul(&b[k])).round_out(prec);
        }
    }
    let mut y = vec![Interval::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i].clone();
        for j in i + 1..n {
            acc = acc.sub(&m[i][j].mul(&y[j]));
        }
        y[i] = acc.div(&m[i][i])?.round_out(prec);
    }
    Ok(y)
}

/// Ergodic measures of the stationary diagram with incidence `matrix` and a simple hat, one per
/// distinguished eigenvalue `lambda > 1` of `A = matrix^T`; `depth` levels are tabulated.
pub fn stationary_measures(matrix: &IntMatrix, depth: usize, prec: u32) -> Result<Vec<StationaryMeasure>> {
    if !matrix.is_square() {
        return Err(Error::NonSquare { rows: matrix.rows(), cols: matrix.cols() });
    }
    let a = matrix.transpose();
    let n = a.rows();
    let work = prec + 32;
    let reach = reach_matrix(&a);
    let classes = strong_classes(&a);
    let perron: Vec<(Poly, Interval, Vec<RatMatrix>)> =
        classes.iter().map(|c| class_perron(&a, c, work)).collect();
    let one = BigRational::one();
    let mut out = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        let (pa, rho, adj) = &perron[ci];
        if rho.hi() <= &one || (rho.is_exact() && rho.lo() <= &one) {
            continue;
        }
        if rho.lo() <= &one {
            return Err(Error::Inconclusive("Perron value too close to 1".into()));
        }
        let rep = class[0];
        let upstream: Vec<usize> = (0..n).filter(|&i| !class.contains(&i) && reach[i][rep]).collect();
        let mut distinguished = true;
        for (cj, other) in classes.iter().enumerate() {
            if cj != ci && upstream.contains(&other[0]) {
                let (pb, rb, _) = &perron[cj];
                if !perron_greater(pa, rho, pb, rb)? {
                    distinguished = false;
                    break;
                }
            }
        }
        if !distinguished {
            continue;
        }
        // class block: a positive column of adj(rho I - A_cc)
        let m = class.len();
        let mut adj_eval: Vec<Vec<Interval>> = vec![vec![Interval::zero(); m]; m];
        for (k, mk) in adj.iter().enumerate() {
            let pw = rho.pow((m - 1 - k) as u32).round_out(work);
            for i in 0..m {
                for j in 0..m {
                    if !mk[i][j].is_zero() {
                        adj_eval[i][j] = adj_eval[i][j].add(&pw.scale(&mk[i][j])).round_out(work);
                    }
                }
            }
        }
        let col = (0..m)
            .find(|&j| (0..m).all(|i| adj_eval[i][j].is_positive()))
            .ok_or_else(|| Error::Inconclusive("no certified positive adjugate column".into()))?;
        let mut x = vec![Interval::zero(); n];
        for (i, &v) in class.iter().enumerate() {
            x[v] = adj_eval[i][col].clone();
        }
        if !upstream.is_empty() {
            let mmat: Vec<Vec<Interval>> = upstream
                .iter()
                .map(|&i| {
                    upstream
                        .iter()
                        .map(|&j| {
                            let aij = Interval::from_biguint(a.get(i, j));
                            if i == j {
                                rho.sub(&aij)
                            } else {
                                aij.neg()
                            }
                        })
                        .collect()
                })
                .collect();
            let rhs: Vec<Interval> = upstream
                .iter()
                .map(|&i| {
                    class.iter().fold(Interval::zero(), |acc, &j| {
                        acc.add(&x[j].scale(&biguint_rat(a.get(i, j))))
                    })
                })
                .collect();
            let y = interval_solve(mmat, rhs, work)?;
            for (k, &i) in upstream.iter().enumerate() {
                x[i] = y[k].clone();
            }
        }
        let total = x.iter().fold(Interval::zero(), |acc, xi| acc.add(xi));
        let x: Vec<Interval> = x.iter().map(|xi| xi.div(&total).map(|q| q.round_out(work))).collect::<Result<_>>()?;
        let residual_ok = (0..n).all(|i| {
            let ax = (0..n).fold(Interval::zero(), |acc, j| acc.add(&x[j].scale(&biguint_rat(a.get(i, j)))));
            ax.overlaps(&rho.mul(&x[i]))
        });
        let mut values = Vec::with_capacity(depth);
        let mut pw = Interval::exact(BigRational::one());
        for _ in 0..depth {
            values.push(x.iter().map(|xi| xi.div(&pw).map(|q| q.round_out(work))).collect::<Result<Vec<_>>>()?);
            pw = pw.mul(rho).round_out(work);
        }
        let support: Vec<usize> = class.iter().chain(upstream.iter()).copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        out.push(StationaryMeasure {
            lambda: rho.round_out(prec.max(8)),
            x,
            measure: LevelMeasure::from_intervals(values, prec),
            support,
            class: class.clone(),
            eigen_residual_ok: residual_ok,
        });
    }
    if out.is_empty() {
        return Err(Error::NoDistinguishedEigenvalue);
    }
    out.sort_by(|p, q| q.lambda.hi().cmp(p.lambda.hi()));
    Ok(out)
}

pub fn stationary_measures_default(matrix: &IntMatrix, depth: usize) -> Result<Vec<StationaryMeasure>> {
    stationary_measures(matrix, depth, DEFAULT_PRECISION)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionMeasure {
    /// Normalized truncation: `p_N(w) = (F_n...F_{N+1})_{spine_n, w} / h_n(spine_n)` at the
    /// deepest level `n`, for `N <= depth - lookahead`.
    pub measure: LevelMeasure,
    /// Unnormalized quotients `(F_n...F_{N+1})_{spine_n, w} / (a_1...a_n)`:
    /// `quotients[N-1][k][w]` uses `n = N + 1 + k`.
    pub quotients: Vec<Vec<Vec<BigRational>>>,
    /// Total mass `h_n(spine_n) / (a_1...a_n)` of the unnormalized extension, per `n`.
    pub mass: Vec<BigRational>,
    /// `a_n = f^(n)_{spine_n, spine_{n-1}}`.
    pub vertical: Vec<BigUint>,
}

fn spine_entries(d: &BratteliDiagram, spine: &[usize]) -> Result<Vec<BigUint>> {
    if spine.len() < d.levels() {
        return Err(Error::SpineBroken { level: spine.len() + 1 });
    }
    (1..=d.levels())
        .map(|n| {
            let f = d.incidence(n)?;
            let prev = if n == 1 { 0 } else { spine[n - 2] };
            let v = spine[n - 1];
            if v >= f.rows() || prev >= f.cols() || f.get(v, prev).is_zero() {
                return Err(Error::SpineBroken { level: n });
            }
            Ok(f.get(v, prev).clone())
        })
        .collect()
}

/// Extension of the odometer measure carried by the vertex sequence `spine` (one vertex per
/// level, 0-based), estimated from the deepest built level.
pub fn odometer_extension(d: &BratteliDiagram, spine: &[usize], lookahead: usize) -> Result<ExtensionMeasure> {
    let depth = d.levels();
    let a = spine_entries(d, spine)?;
    if lookahead >= depth {
        return Err(Error::LevelOutOfRange { level: lookahead, max: depth.saturating_sub(1) });
    }
    let top = depth - lookahead;
    let mut a_prod = vec![BigUint::one()];
    for an in &a {
        let next = a_prod.last().expect("nonempty") * an;
        a_prod.push(next);
    }
    let mass: Vec<BigRational> = (1..=depth)
        .map(|n| BigRational::new(BigInt::from(d.height(n, spine[n - 1]).clone()), BigInt::from(a_prod[n].clone())))
        .collect();
    let mut values = Vec::with_capacity(top);
    let mut quotients = Vec::with_capacity(top);
    for big_n in 1..=top {
        let mut rows = Vec::new();
        let mut last_row = None;
        for n in big_n + 1..=depth {
            let p = d.incidence_product(big_n, n)?;
            let row: Vec<BigUint> = p.row(spine[n - 1]).to_vec();
            rows.push(
                row.iter()
                    .map(|x| BigRational::new(BigInt::from(x.clone()), BigInt::from(a_prod[n].clone())))
                    .collect(),
            );
            last_row = Some(row);
        }
        let level_vals = match last_row {
            Some(row) => {
                let h = BigInt::from(d.height(depth, spine[depth - 1]).clone());
                row.into_iter().map(|x| BigRational::new(BigInt::from(x), h.clone())).collect()
            }
            None => {
                let h = BigInt::from(d.height(depth, spine[depth - 1]).clone());
                (0..d.vertex_count(big_n))
                    .map(|w| if w == spine[big_n - 1] { BigRational::new(BigInt::one(), h.clone()) } else { BigRational::zero() })
                    .collect()
            }
        };
        values.push(level_vals);
        quotients.push(rows);
    }
    Ok(ExtensionMeasure { measure: LevelMeasure::exact(values), quotients, mass, vertical: a })
}

/// Partial sums of `sum_n sum_{w != spine} f^(n+1)_{spine,w} h_n(spine) / prod_{i<=n+1} f^(i)_{spine,spine}`.
pub fn extension_finiteness(d: &BratteliDiagram, spine: &[usize]) -> Result<Vec<BigRational>> {
    let a = spine_entries(d, spine)?;
    let mut prod = a[0].clone();
    let mut acc = BigRational::zero();
    let mut out = Vec::new();
    for n in 1..d.levels() {
        prod *= &a[n];
        let f = d.incidence(n + 1)?;
        let off: BigUint = (0..f.cols()).filter(|&w| w != spine[n - 1]).map(|w| f.get(spine[n], w)).sum();
        let h = d.height(n, spine[n - 1]);
        acc += BigRational::new(BigInt::from(off * h), BigInt::from(prod.clone()));
        out.push(acc.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoByTwoReport {
    /// Partial sums of `min(b_k, d_k) / r_k`, `k >= 2`.
    pub series_bd: Vec<BigRational>,
    /// Partial sums of `min(a_k, c_k) / r_k`.
    pub series_ac: Vec<BigRational>,
    /// Partial sums of `min(a_k, b_k, c_k, d_k) / r_k`.
    pub series_min: Vec<BigRational>,
}

pub fn two_by_two_classify(d: &BratteliDiagram) -> Result<TwoByTwoReport> {
    let f1 = d.incidence(1)?;
    if f1.rows() != 2 || f1.entries().iter().any(|x| !x.is_one()) {
        return Err(Error::NotTwoByTwoErs("F_1 must be the column (1,1)".into()));
    }
    let mut rep = TwoByTwoReport { series_bd: vec![], series_ac: vec![], series_min: vec![] };
    let (mut s1, mut s2, mut s3) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
    for n in 2..=d.levels() {
        let f = d.incidence(n)?;
        if f.rows() != 2 || f.cols() != 2 {
            return Err(Error::NotTwoByTwoErs(format!("level {n} is not 2x2")));
        }
        let (a, b, c, dd) = (f.get(0, 0), f.get(0, 1), f.get(1, 0), f.get(1, 1));
        let r = a + b;
        if r != c + dd {
            return Err(Error::NotTwoByTwoErs(format!("row sums differ at level {n}")));
        }
        let q = |x: &BigUint| BigRational::new(BigInt::from(x.clone()), BigInt::from(r.clone()));
        s1 += q(b.min(dd));
        s2 += q(a.min(c));
        s3 += q(a.min(b).min(c).min(dd));
        rep.series_bd.push(s1.clone());
        rep.series_ac.push(s2.clone());
        rep.series_min.push(s3.clone());
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerMass {
    /// `h_n(v) p_n(v)` per vertex.
    pub per_vertex: Vec<Interval>,
    pub total: Interval,
    /// Sum over the designated vertex subset.
    pub subset: Interval,
}

pub fn tower_mass(m: &LevelMeasure, d: &BratteliDiagram, level: usize, subset: &[usize]) -> Result<TowerMass> {
    d.check_level(level)?;
    let p = m.level(level)?;
    let per_vertex: Vec<Interval> = p.iter().zip(d.height_slice(level)).map(|(x, h)| x.scale(&biguint_rat(h))).collect();
    let total = per_vertex.iter().fold(Interval::zero(), |acc, x| acc.add(x));
    let subset = subset.iter().fold(Interval::zero(), |acc, &v| acc.add(&per_vertex[v]));
    Ok(TowerMass { per_vertex, total, subset })
}

/// Coordinatewise enclosure of every invariant probability measure: `p_N` lies in the convex
/// hull of the rows `u` of `F_M...F_{N+1}` divided by `h_M(u)`, with `M = levels()`.
/// Levels `1..=levels()-lookahead` are tabulated.
pub fn invariant_bracket(d: &BratteliDiagram, lookahead: usize, prec: u32) -> Result<LevelMeasure> {
    let depth = d.levels();
    if lookahead == 0 || lookahead >= depth {
        return Err(Error::LevelOutOfRange { level: lookahead, max: depth.saturating_sub(1) });
    }
    let mut values = Vec::new();
    for big_n in 1..=depth - lookahead {
        let p = d.incidence_product(big_n, depth)?;
        let mut level = Vec::new();
        for w in 0..p.cols() {
            let ratios: Vec<BigRational> = (0..p.rows())
                .map(|u| BigRational::new(BigInt::from(p.get(u, w).clone()), BigInt::from(d.height(depth, u).clone())))
                .collect();
            let lo = ratios.iter().min().expect("rows").clone();
            let hi = ratios.iter().max().expect("rows").clone();
            level.push(Interval::new(lo, hi).round_out(prec));
        }
        values.push(level);
    }
    Ok(LevelMeasure::from_intervals(values, prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    fn m(rows: &[Vec<u64>]) -> IntMatrix {
        IntMatrix::from_u64(rows).unwrap()
    }

    #[test]
    fn two_measures_for_reducible_family() {
        let ms = stationary_measures(&m(&[vec![2, 0], vec![2, 4]]), 5, 128).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].lambda.exact_value(), Some(&rat(4, 1)));
        assert_eq!(ms[0].x[0].exact_value(), Some(&rat(1, 2)));
        assert_eq!(ms[0].x[1].exact_value(), Some(&rat(1, 2)));
        assert_eq!(ms[0].support, vec![0, 1]);
        assert_eq!(ms[1].lambda.exact_value(), Some(&rat(2, 1)));
        assert_eq!(ms[1].x[1].exact_value(), Some(&rat(0, 1)));
        assert_eq!(ms[1].support, vec![0]);
        assert!(ms.iter().all(|s| s.eigen_residual_ok && s.measure.is_exact()));
    }

    #[test]
    fn trivial_chain_has_no_measure() {
        assert_eq!(stationary_measures(&m(&[vec![1]]), 3, 64), Err(Error::NoDistinguishedEigenvalue));
    }

    #[test]
    fn ecs_closed_form() {
        let d = BratteliDiagram::stationary(&m(&[vec![1, 1], vec![1, 1]]), 4, true).unwrap();
        let mu = ecs_measure(&d).unwrap();
        assert_eq!(mu.p(3, 0).exact_value(), Some(&rat(1, 8)));
        let bad = BratteliDiagram::stationary(&m(&[vec![2, 1], vec![1, 1]]), 3, true).unwrap();
        assert!(matches!(ecs_measure(&bad), Err(Error::NotEcs { .. })));
    }
}
