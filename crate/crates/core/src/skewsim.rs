//! Monte-Carlo return correlations for the skew product `T(j, y) = (j + 1, sigma^{[j in D]} y)`
//! over an odometer with a Bernoulli fiber.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::rat_to_f64;

/// Samples per RNG stream.
pub const CHUNK: usize = 4096;
/// Largest residue table `s_K` the base may need.
pub const MAX_RESIDUES: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewConfig {
    /// Odometer radices `r_1, r_2, ...`; digit `i` (0-based) has radix `radices[i]`.
    pub radices: Vec<u64>,
    /// Union of digit cylinders; each cylinder fixes `(position, digit)` pairs.
    pub d: Vec<Vec<(usize, u64)>>,
    /// Fiber symbol weights; symbol `a` has probability `weights[a] / sum`.
    pub weights: Vec<u64>,
    pub a: Vec<usize>,
    pub m: u64,
    pub samples: usize,
    pub seed: u64,
}

impl SkewConfig {
    pub fn dyadic_example(m: u64, samples: usize, seed: u64) -> Self {
        SkewConfig { radices: vec![2; 64], d: vec![vec![(0, 0)]], weights: vec![1, 1], a: vec![0, 0], m, samples, seed }
    }
}

/// Precomputed exact base data: residues mod `s_K` lying in `D`.
#[derive(Debug, Clone)]
struct Base {
    modulus: u64,
    in_d: Vec<bool>,
    /// `prefix[i] = #{r < i : r in D}`.
    prefix: Vec<u64>,
    members: Vec<u64>,
}

impl Base {
    fn new(cfg: &SkewConfig) -> Result<Self> {
        let depth = cfg.d.iter().flatten().map(|&(p, _)| p + 1).max().unwrap_or(0);
        if depth > cfg.radices.len() {
            return Err(Error::DegenerateConfig(format!("D uses digit {} beyond the radices", depth - 1)));
        }
        let mut modulus = 1u64;
        for &r in &cfg.radices[..depth] {
            if r < 2 {
                return Err(Error::DegenerateConfig("radix below 2".into()));
            }
            modulus = modulus.checked_mul(r).filter(|&m| m <= MAX_RESIDUES).ok_or_else(|| Error::TooLarge("residue table".into()))?;
        }
        for cyl in &cfg.d {
            if cyl.iter().any(|&(p, x)| x >= cfg.radices[p]) {
                return Err(Error::DegenerateConfig("digit exceeds its radix".into()));
            }
        }
        let mut in_d = vec![false; modulus as usize];
        let mut digits = vec![0u64; depth];
        for (res, slot) in in_d.iter_mut().enumerate() {
            let mut x = res as u64;
            for (i, dg) in digits.iter_mut().enumerate() {
                *dg = x % cfg.radices[i];
                x /= cfg.radices[i];
            }
            *slot = cfg.d.iter().any(|cyl| cyl.iter().all(|&(p, v)| digits[p] == v));
        }
        let mut prefix = Vec::with_capacity(in_d.len() + 1);
        prefix.push(0);
        for &b in &in_d {
            prefix.push(prefix.last().expect("nonempty") + u64::from(b));
        }
        let members = (0..modulus).filter(|&r| in_d[r as usize]).collect();
        Ok(Base { modulus, in_d, prefix, members })
    }

    fn mass(&self) -> BigRational {
        BigRational::new(BigInt::from(self.members.len()), BigInt::from(self.modulus))
    }

    /// `#{i in [0, len) : (j + i) mod s_K in D}`.
    fn visits(&self, j: u64, len: u64) -> u64 {
        let full = len / self.modulus;
        let rem = len % self.modulus;
        let per = self.members.len() as u64;
        let end = j + rem;
        let partial = if end <= self.modulus {
            self.prefix[end as usize] - self.prefix[j as usize]
        } else {
            (per - self.prefix[j as usize]) + self.prefix[(end - self.modulus) as usize]
        };
        full * per + partial
    }

    fn contains(&self, j: u64) -> bool {
        self.in_d[(j % self.modulus) as usize]
    }
}

struct Fiber {
    weights: Vec<u64>,
    total: u64,
}

impl Fiber {
    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let mut x = rng.gen_range(0..self.total);
        for (a, &w) in self.weights.iter().enumerate() {
            if x < w {
                return a;
            }
            x -= w;
        }
        unreachable!("weights sum to total")
    }

    fn word_mass(&self, a: &[usize]) -> BigRational {
        a.iter().fold(BigRational::one(), |acc, &s| acc * BigRational::new(BigInt::from(self.weights[s]), BigInt::from(self.total)))
    }
}

fn validate(cfg: &SkewConfig) -> Result<(Base, Fiber)> {
    if cfg.a.is_empty() {
        return Err(Error::DegenerateConfig("empty fiber word".into()));
    }
    if cfg.samples < 1000 {
        return Err(Error::DegenerateConfig("at least 1000 samples required".into()));
    }
    if cfg.weights.len() < 2 || cfg.a.iter().any(|&s| s >= cfg.weights.len() || cfg.weights[s] == 0) {
        return Err(Error::DegenerateConfig("fiber word uses a null symbol".into()));
    }
    let base = Base::new(cfg)?;
    if base.members.is_empty() {
        return Err(Error::DegenerateConfig("D has zero mass".into()));
    }
    let total = cfg.weights.iter().sum();
    Ok((base, Fiber { weights: cfg.weights.clone(), total }))
}

fn chunk_rng(seed: u64, m: u64, chunk: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&m.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(chunk);
    rng
}

/// Runs `f` on each sampled base point in `D`, chunk by chunk, summing the results in order.
fn run_chunks<T: Send, F>(cfg: &SkewConfig, base: &Base, f: F) -> Vec<T>
where
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = cfg.samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = chunk_rng(cfg.seed, cfg.m, c as u64);
            let n = CHUNK.min(cfg.samples - c * CHUNK);
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let j = base.members[rng.gen_range(0..base.members.len())];
                out.push(f(&mut rng, j));
            }
            out
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub m: u64,
    pub samples: usize,
    pub hits: u64,
    /// `(lambda x nu)(T^m(D x A) ∩ (D x A))` estimate.
    pub estimate: f64,
    pub stderr: f64,
    /// `lambda(D) nu(A)^2`.
    pub target: BigRational,
    /// `lambda(D) nu(A)`.
    pub mass: BigRational,
    pub ratio_to_mass: f64,
}

pub fn simulate_correlation(cfg: &SkewConfig) -> Result<SimResult> {
    let (base, fiber) = validate(cfg)?;
    let nu = fiber.word_mass(&cfg.a);
    let mass = base.mass() * &nu;
    let target = &mass * &nu;
    let len = cfg.a.len();
    let hits: u64 = run_chunks(cfg, &base, |rng, j| {
        if !base.contains(j + cfg.m) {
            return 0u64;
        }
        let r = base.visits(j, cfg.m) as usize;
        let ok = (0..len).all(|i| {
            let pos = r + i;
            let sym = if pos < len { cfg.a[pos] } else { fiber.sample(rng) };
            sym == cfg.a[i]
        });
        u64::from(ok)
    })
    .into_iter()
    .sum();
    let n = cfg.samples as f64;
    let p = hits as f64 / n;
    let mf = rat_to_f64(&mass);
    Ok(SimResult {
        m: cfg.m,
        samples: cfg.samples,
        hits,
        estimate: p * mf,
        stderr: (p * (1.0 - p) / n).sqrt() * mf,
        target,
        mass,
        ratio_to_mass: p,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisitHistogram {
    /// `r_m = #{0 <= i <= m : tau^i(j) in D}` and its sample count.
    pub counts: BTreeMap<u64, u64>,
    pub mean: f64,
    /// Fraction of samples with `r_m < n_eps`.
    pub below: f64,
}

pub fn visit_distribution(cfg: &SkewConfig, n_eps: u64) -> Result<VisitHistogram> {
    let (base, _) = validate(cfg)?;
    let rs = run_chunks(cfg, &base, |_, j| base.visits(j, cfg.m + 1));
    let mut counts = BTreeMap::new();
    let mut sum = 0u128;
    let mut below = 0u64;
    for &r in &rs {
        *counts.entry(r).or_insert(0) += 1;
        sum += u128::from(r);
        below += u64::from(r < n_eps);
    }
    let n = rs.len() as f64;
    Ok(VisitHistogram { counts, mean: sum as f64 / n, below: below as f64 / n })
}

/// Exact `lambda(D)`.
pub fn base_mass(cfg: &SkewConfig) -> Result<BigRational> {
    Ok(Base::new(cfg)?.mass())
}

pub fn is_zero_mass(cfg: &SkewConfig) -> bool {
    Base::new(cfg).map(|b| b.mass().is_zero()).unwrap_or(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_zero_returns_everything() {
        let r = simulate_correlation(&SkewConfig::dyadic_example(0, 2000, 3)).unwrap();
        assert_eq!(r.hits, 2000);
        assert_eq!(r.mass, BigRational::new(1.into(), 8.into()));
    }

    #[test]
    fn exact_visit_counts() {
        let cfg = SkewConfig { d: vec![vec![(0, 0)], vec![(0, 1), (1, 1)]], ..SkewConfig::dyadic_example(10, 1000, 1) };
        let base = Base::new(&cfg).unwrap();
        for j in 0..base.modulus {
            for len in 0..20 {
                let naive = (0..len).filter(|&i| base.contains(j + i)).count() as u64;
                assert_eq!(base.visits(j, len), naive);
            }
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = SkewConfig::dyadic_example(1024, 5000, 42);
        assert_eq!(simulate_correlation(&cfg).unwrap(), simulate_correlation(&cfg).unwrap());
    }
}
