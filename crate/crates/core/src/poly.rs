//! Exact rational polynomials, characteristic polynomials and real-root isolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::interval::{round_dyadic, Interval};

/// Coefficients from the constant term upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<BigRational>);

pub type RatMatrix = Vec<Vec<BigRational>>;

impl Poly {
    pub fn from_ints(c: &[i64]) -> Poly {
        Poly(c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).trimmed()
    }

    fn trimmed(mut self) -> Poly {
        while self.0.len() > 1 && self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_interval(&self, x: &Interval) -> Interval {
        self.0
            .iter()
            .rev()
            .fold(Interval::zero(), |acc, c| acc.mul(x).add(&Interval::exact(c.clone())))
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![BigRational::zero()]);
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
        .trimmed()
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.0.clone();
        let dd = d.degree();
        let lead = d.0[dd].clone();
        while r.len() > dd && !(r.len() == 1 && r[0].is_zero()) {
            let k = r.len() - 1;
            let coef = &r[k] / &lead;
            if !coef.is_zero() {
                for i in 0..=dd {
                    r[k - dd + i] = &r[k - dd + i] - &coef * &d.0[i];
                }
            }
            r.pop();
            if r.is_empty() {
                r.push(BigRational::zero());
                break;
            }
        }
        Poly(r).trimmed()
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        Poly(out).trimmed()
    }

    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            if seq[n - 1].degree() == 0 {
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }
}

fn sign_changes(seq: &[Poly], x: &BigRational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in `(a, b]`.
pub fn count_roots(seq: &[Poly], a: &BigRational, b: &BigRational) -> usize {
    sign_changes(seq, a).saturating_sub(sign_changes(seq, b))
}

/// Characteristic polynomial `det(xI - M)` and the matrices `M_1..M_n` with
/// `adj(xI - M) = sum_k M_k x^(n-k)` (Faddeev-LeVerrier).
pub fn charpoly_with_adjugate(m: &RatMatrix) -> (Poly, Vec<RatMatrix>) {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk: RatMatrix = vec![vec![BigRational::zero(); n]; n];
    let mut adj = Vec::with_capacity(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = &row[i] + &coeffs[n - k + 1];
        }
        let am = matmul(m, &next);
        let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
        adj.push(next.clone());
        mk = next;
    }
    (Poly(coeffs), adj)
}

pub fn matmul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let p = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![BigRational::zero(); p]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..p {
                out[i][j] = &out[i][j] + &a[i][k] * &bk[j];
            }
        }
    }
    out
}

/// The largest real root of `p` in `(lower, upper]`, isolated to width below `2^-prec`;
/// integer roots are detected and returned exactly.
pub fn largest_root_in(p: &Poly, lower: &BigRational, upper: &BigRational, prec: u32) -> Option<Interval> {
    let seq = p.sturm_sequence();
    if count_roots(&seq, lower, upper) == 0 {
        return None;
    }
    let mut lo = lower.clone();
    let mut hi = upper.clone();
    let tol = BigRational::new(BigInt::one(), BigInt::one() << prec as usize);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut checked_integer = false;
    while &hi - &lo > tol {
        if !checked_integer && &hi - &lo < half {
            checked_integer = true;
            for k in [lo.ceil(), hi.floor()] {
                if k > lo && k <= hi && p.eval(&k).is_zero() {
                    return Some(Interval::exact(k));
                }
            }
        }
        let mid = round_dyadic(&((&lo + &hi) * &half), prec + 8, false);
        let mid = if mid <= lo || mid >= hi { (&lo + &hi) * &half } else { mid };
        if count_roots(&seq, &mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if p.eval(&hi).is_zero() {
        return Some(Interval::exact(hi));
    }
    Some(Interval::new(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    #[test]
    fn charpoly_2x2() {
        let m = vec![vec![rat(2, 1), rat(2, 1)], vec![rat(0, 1), rat(4, 1)]];
        let (p, adj) = charpoly_with_adjugate(&m);
        assert_eq!(p, Poly::from_ints(&[8, -6, 1]));
        assert_eq!(adj.len(), 2);
        let r = largest_root_in(&p, &rat(1, 1), &rat(10, 1), 64).unwrap();
        assert_eq!(r.exact_value(), Some(&rat(4, 1)));
    }

    #[test]
    fn plastic_number() {
        let p = Poly::from_ints(&[-1, -1, 0, 1]);
        let r = largest_root_in(&p, &rat(1, 1), &rat(2, 1), 128).unwrap();
        assert!((r.to_f64() - 1.324717957244746).abs() < 1e-12);
        assert!(r.width() < rat(1, 1_000_000_000_000));
        assert!(p.eval_interval(&r).contains(&BigRational::zero()));
    }

    #[test]
    fn sturm_counts() {
        // (x-1)(x-2)(x-3)
        let p = Poly::from_ints(&[-6, 11, -6, 1]);
        let seq = p.sturm_sequence();
        assert_eq!(count_roots(&seq, &rat(0, 1), &rat(10, 1)), 3);
        assert_eq!(count_roots(&seq, &rat(3, 2), &rat(5, 2)), 1);
    }
}
