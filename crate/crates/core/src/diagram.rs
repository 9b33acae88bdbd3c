//! Bratteli diagrams as finite prefixes: incidence matrices, heights, telescoping.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// A Bratteli diagram truncated at `levels()`.
///
/// `incidence[n-1]` is `F_n`, of shape `|V_n| x |V_{n-1}|`; entry `(v, w)` counts edges
/// from `w` in `V_{n-1}` to `v` in `V_n`. The root `V_0` is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BratteliDiagram {
    incidence: Vec<IntMatrix>,
    simple_hat: bool,
    heights: Vec<Vec<BigUint>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightVector {
    pub level: usize,
    pub values: Vec<BigUint>,
}

/// Supplies `F_n` for a possibly infinite diagram.
pub trait LevelGenerator {
    fn matrix(&self, level: usize) -> Result<IntMatrix>;
    fn simple_hat(&self) -> bool {
        true
    }
}

impl BratteliDiagram {
    pub fn new(incidence: Vec<IntMatrix>, simple_hat: bool) -> Result<Self> {
        if incidence.is_empty() {
            return Err(Error::ShapeMismatch("diagram needs at least one level".into()));
        }
        if incidence[0].cols() != 1 {
            return Err(Error::ShapeMismatch("F_1 must have a single column".into()));
        }
        if simple_hat && incidence[0].entries().iter().any(|x| !x.is_one()) {
            return Err(Error::ShapeMismatch("simple hat requires F_1 to be a column of ones".into()));
        }
        for (i, f) in incidence.iter().enumerate() {
            if i > 0 && f.cols() != incidence[i - 1].rows() {
                return Err(Error::ShapeMismatch(format!(
                    "F_{} has {} columns but |V_{}| = {}",
                    i + 1,
                    f.cols(),
                    i,
                    incidence[i - 1].rows()
                )));
            }
            if f.has_zero_row_or_col() {
                return Err(Error::ZeroRowOrColumn { level: i + 1 });
            }
        }
        let mut heights = vec![vec![BigUint::one()]];
        for f in &incidence {
            let next = f.mul_vec(heights.last().expect("root"));
            heights.push(next);
        }
        Ok(BratteliDiagram { incidence, simple_hat, heights })
    }

    /// `F_1` is a column of ones when `simple_hat`, else the row sums of `matrix`;
    /// `F_n = matrix` for `2 <= n <= depth`.
    pub fn stationary(matrix: &IntMatrix, depth: usize, simple_hat: bool) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        if matrix.has_zero_row_or_col() {
            return Err(Error::ZeroRowOrColumn { level: 2 });
        }
        if depth == 0 {
            return Err(Error::LevelOutOfRange { level: 0, max: 0 });
        }
        let n = matrix.rows();
        let hat = if simple_hat {
            IntMatrix::ones_column(n)
        } else {
            IntMatrix::from_rows(&matrix.row_sums().into_iter().map(|x| vec![x]).collect::<Vec<_>>())?
        };
        let mut inc = vec![hat];
        inc.extend(std::iter::repeat_n(matrix.clone(), depth - 1));
        Self::new(inc, simple_hat)
    }

    pub fn from_generator(gen: &dyn LevelGenerator, depth: usize) -> Result<Self> {
        let inc = (1..=depth).map(|n| gen.matrix(n)).collect::<Result<Vec<_>>>()?;
        Self::new(inc, gen.simple_hat())
    }

    pub fn levels(&self) -> usize {
        self.incidence.len()
    }

    pub fn simple_hat(&self) -> bool {
        self.simple_hat
    }

    /// `|V_n|`; `n = 0` is the root.
    pub fn vertex_count(&self, n: usize) -> usize {
        if n == 0 {
            1
        } else {
            self.incidence[n - 1].rows()
        }
    }

    pub fn vertex_counts(&self) -> Vec<usize> {
        self.incidence.iter().map(IntMatrix::rows).collect()
    }

    /// `F_n` for `1 <= n <= levels()`.
    pub fn incidence(&self, n: usize) -> Result<&IntMatrix> {
        self.check_level(n)?;
        Ok(&self.incidence[n - 1])
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.incidence
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.levels() {
            Err(Error::LevelOutOfRange { level: n, max: self.levels() })
        } else {
            Ok(())
        }
    }

    pub fn heights(&self, n: usize) -> Result<HeightVector> {
        self.check_level(n)?;
        Ok(HeightVector { level: n, values: self.heights[n].clone() })
    }

    /// Heights at level `n` including `n = 0` (the root, height 1).
    pub fn height_slice(&self, n: usize) -> &[BigUint] {
        &self.heights[n]
    }

    pub fn height(&self, n: usize, v: usize) -> &BigUint {
        &self.heights[n][v]
    }

    /// `F_n F_{n-1} ... F_{N+1}`; entry `(w, v)` counts paths from `v` in `V_N` to `w` in `V_n`.
    pub fn incidence_product(&self, from: usize, to: usize) -> Result<IntMatrix> {
        if from >= to || to > self.levels() {
            return Err(Error::LevelOutOfRange { level: to, max: self.levels() });
        }
        let mut acc = self.incidence[from].clone();
        for n in from + 2..=to {
            acc = self.incidence[n - 1].mul(&acc)?;
        }
        Ok(acc)
    }

    /// Contracts the levels between consecutive cut levels; `cuts` starts at 0.
    pub fn telescope(&self, cuts: &[usize]) -> Result<BratteliDiagram> {
        validate_cuts(cuts, self.levels())?;
        let inc = cuts
            .windows(2)
            .map(|w| self.incidence_product(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        let simple_hat = inc[0].entries().iter().all(One::is_one);
        Self::new(inc, simple_hat)
    }

    pub fn truncate(&self, depth: usize) -> Result<BratteliDiagram> {
        self.check_level(depth)?;
        Self::new(self.incidence[..depth].to_vec(), self.simple_hat)
    }

    pub fn structure_report(&self) -> StructureReport {
        let mut ers = Some(Vec::new());
        let mut ecs = Some(Vec::new());
        let mut ratios = Vec::new();
        for f in &self.incidence {
            let rs = f.row_sums();
            let cs = f.col_sums();
            ers = ers.and_then(|mut v: Vec<BigUint>| {
                rs.windows(2).all(|w| w[0] == w[1]).then(|| {
                    v.push(rs[0].clone());
                    v
                })
            });
            ecs = ecs.and_then(|mut v: Vec<BigUint>| {
                cs.windows(2).all(|w| w[0] == w[1]).then(|| {
                    v.push(cs[0].clone());
                    v
                })
            });
            let m = f.min_entry();
            let mx = f.max_entry();
            ratios.push(if m.is_zero() {
                BigRational::zero()
            } else {
                BigRational::new(m.into(), mx.into())
            });
        }
        StructureReport {
            ers,
            ecs,
            min_max_entry_ratio: ratios,
            rank: self.vertex_counts().into_iter().max().unwrap_or(0),
        }
    }
}

pub(crate) fn validate_cuts(cuts: &[usize], levels: usize) -> Result<()> {
    if cuts.len() < 2 || cuts[0] != 0 {
        return Err(Error::BadCutSequence("cut levels must start at 0 and contain a positive level".into()));
    }
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadCutSequence("cut levels must be strictly increasing".into()));
    }
    if *cuts.last().expect("nonempty") > levels {
        return Err(Error::BadCutSequence(format!("cut beyond built depth {levels}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    /// Row sums `r_n` when every level has equal row sums.
    pub ers: Option<Vec<BigUint>>,
    /// Column sums `c_n` when every level has equal column sums.
    pub ecs: Option<Vec<BigUint>>,
    pub min_max_entry_ratio: Vec<BigRational>,
    pub rank: usize,
}

/// Dyadic odometer: one vertex, `F_n = [2]` for `n >= 2`.
pub struct Dyadic;

impl LevelGenerator for Dyadic {
    fn matrix(&self, level: usize) -> Result<IntMatrix> {
        IntMatrix::from_u64(&[vec![if level == 1 { 1 } else { 2 }]])
    }
}

/// Stationary generator.
pub struct Stationary {
    pub matrix: IntMatrix,
    pub simple_hat: bool,
}

impl LevelGenerator for Stationary {
    fn matrix(&self, level: usize) -> Result<IntMatrix> {
        if level == 1 {
            Ok(if self.simple_hat {
                IntMatrix::ones_column(self.matrix.rows())
            } else {
                IntMatrix::from_rows(&self.matrix.row_sums().into_iter().map(|x| vec![x]).collect::<Vec<_>>())?
            })
        } else {
            Ok(self.matrix.clone())
        }
    }
    fn simple_hat(&self) -> bool {
        self.simple_hat
    }
}

/// `F_n = [[a_n, b_n], [c_n, d_n]]` for `n >= 2` with equal row sums; simple hat.
pub struct TwoByTwoErs {
    pub a: crate::expr::Expr,
    pub b: crate::expr::Expr,
    pub c: crate::expr::Expr,
    pub d: crate::expr::Expr,
}

impl LevelGenerator for TwoByTwoErs {
    fn matrix(&self, level: usize) -> Result<IntMatrix> {
        if level == 1 {
            return Ok(IntMatrix::ones_column(2));
        }
        let n = level as u64;
        let (a, b, c, d) =
            (self.a.eval_nonneg(n)?, self.b.eval_nonneg(n)?, self.c.eval_nonneg(n)?, self.d.eval_nonneg(n)?);
        if &a + &b != &c + &d {
            return Err(Error::NotTwoByTwoErs(format!("row sums differ at level {level}")));
        }
        IntMatrix::from_rows(&[vec![a, b], vec![c, d]])
    }
}

/// Infinite-rank-style family with `V_n = {0..n}` and row sums `a_n + n`.
///
/// Row `w <= n` of `F_{n+1}` has `a_n` at column `w` and 1 elsewhere; the last row has ones,
/// then 2 at column `n-1` and `a_n - 1` at column `n`. `F_1` sends one edge to each of
/// the two vertices of `V_1`.
pub struct InfRank {
    pub a: crate::expr::Expr,
}

impl LevelGenerator for InfRank {
    fn matrix(&self, level: usize) -> Result<IntMatrix> {
        if level == 1 {
            return Ok(IntMatrix::ones_column(2));
        }
        let n = level - 1;
        let a = self.a.eval_nonneg(n as u64)?;
        if a.is_zero() {
            return Err(Error::Parse(format!("a_n must be positive (n={n})")));
        }
        let mut m = IntMatrix::zeros(n + 2, n + 1);
        for w in 0..=n {
            for c in 0..=n {
                m.set(w, c, if w == c { a.clone() } else { BigUint::one() });
            }
        }
        for c in 0..=n {
            let v = if c + 1 == n {
                BigUint::from(2u32)
            } else if c == n {
                &a - 1u32
            } else {
                BigUint::one()
            };
            m.set(n + 1, c, v);
        }
        Ok(m)
    }
    fn simple_hat(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<u64>]) -> IntMatrix {
        IntMatrix::from_u64(rows).unwrap()
    }

    #[test]
    fn stationary_heights() {
        let d = BratteliDiagram::stationary(&m(&[vec![2, 0], vec![2, 4]]), 6, true).unwrap();
        assert_eq!(d.heights(2).unwrap().values, vec![BigUint::from(2u32), BigUint::from(6u32)]);
        let p = d.incidence_product(1, 4).unwrap();
        assert_eq!(p, m(&[vec![8, 0], vec![56, 64]]));
    }

    #[test]
    fn rejects_zero_rows() {
        assert_eq!(
            BratteliDiagram::stationary(&m(&[vec![1, 0], vec![0, 0]]), 3, true),
            Err(Error::ZeroRowOrColumn { level: 2 })
        );
        assert!(matches!(
            BratteliDiagram::stationary(&m(&[vec![1, 0]]), 3, true),
            Err(Error::NonSquare { .. })
        ));
    }

    #[test]
    fn infrank_row_sums() {
        let g = InfRank { a: crate::expr::Expr::parse("n^3").unwrap() };
        let d = BratteliDiagram::from_generator(&g, 6).unwrap();
        for n in 2..=6 {
            let f = d.incidence(n).unwrap();
            let expect = BigUint::from((n - 1).pow(3) + n - 1);
            assert!(f.row_sums().iter().all(|r| *r == expect), "level {n}");
        }
        assert!(d.structure_report().ers.is_some());
    }
}
