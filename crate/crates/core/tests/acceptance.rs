//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and exits nonzero if any
//! criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bratteli::bits::{floor_sets, PathSet, ProductSet};
use bratteli::diagram::{BratteliDiagram, Dyadic, TwoByTwoErs};
use bratteli::diagram_file::nonsimple_family;
use bratteli::enumeration::{
    add_one, default_witness, digit_path_mismatches, greedy_expand, linear_scale, sk_identity_check, spine_diagram,
    value, SpineSystem,
};
use bratteli::expr::Expr;
use bratteli::interval::rat;
use bratteli::matrix::IntMatrix;
use bratteli::measures::{ecs_measure, invariant_bracket, stationary_measures, stationary_measures_default, LevelMeasure};
use bratteli::ordering::OrderedDiagram;
use bratteli::poly::Poly;
use bratteli::rigidity::{
    brute_force_correlation, cylinders, dense_sweep, odometer_correlation, prefix_label, rigidity_scan,
    set_correlation, CorrelationOptions,
};
use bratteli::skewsim::{simulate_correlation, SkewConfig};
use bratteli::toeplitz::{arbulu_scheme, density_profile, scheme_diagram, Stage, SubstitutionScheme, DEFAULT_WINDOW};
use bratteli::vershik::{from_ordinal, minimal_prefix, ordinal, successor, PathPrefix, Successor};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: &str, limit: Duration, f: impl FnOnce() -> Result<Outcome, String>) -> bool {
    let t = Instant::now();
    let out = f();
    let el = t.elapsed();
    let (pass, detail) = match out {
        Ok(o) => (o.pass && el <= limit, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id}: {tag} ({detail}; {:.2}s, limit {}s)", el.as_secs_f64(), limit.as_secs());
    pass
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn dec(x: &BigRational) -> String {
    format!("{:.6}", x.to_f64().unwrap_or(f64::NAN))
}

fn pow2(n: usize) -> BigUint {
    BigUint::one() << n
}

fn dyadic(depth: usize) -> Result<(OrderedDiagram, LevelMeasure), String> {
    let d = BratteliDiagram::from_generator(&Dyadic, depth).map_err(e)?;
    let m = ecs_measure(&d).map_err(e)?;
    Ok((OrderedDiagram::left_to_right(d), m))
}

fn labeled(od: &OrderedDiagram, ps: &[PathPrefix]) -> Result<Vec<(String, PathSet)>, String> {
    ps.iter().map(|p| Ok((prefix_label(p), PathSet::cylinder(od, p).map_err(e)?))).collect()
}

/// Dyadic odometer: scan exactness and the flipped-digit sets.
fn criterion1() -> Result<Outcome, String> {
    let level = 20;
    let (od, m) = dyadic(level)?;
    let prefixes: Vec<PathPrefix> = (1..=7).flat_map(|d| cylinders(&od, d)).collect();
    let sets = labeled(&od, &prefixes)?;
    let times: Vec<BigUint> = (0..7).map(pow2).collect();
    let table = rigidity_scan(&od, &m, &sets, &times, &CorrelationOptions::at_level(level)).map_err(e)?;
    let floor = BigRational::one() - rat(1, 1 << 13);
    let mut worst = BigRational::one();
    for (i, p) in prefixes.iter().enumerate() {
        let digits = p.depth() - 1;
        for t in digits..7 {
            worst = worst.min(table.cell(i, t).lower_ratio.clone());
        }
    }
    let opts = CorrelationOptions::at_level(level);
    let mut nonzero = Vec::new();
    for n in 0..level - 1 {
        let mut a = ProductSet::full(&od, n + 2).map_err(e)?;
        a.restrict(n + 2, |_, edge| edge == 1).map_err(e)?;
        let a = PathSet::new(vec![a]);
        let c = odometer_correlation(&od, &m, &a, &a, &pow2(n), &opts).map_err(e)?;
        if c.exact_value() != Some(&BigRational::zero()) {
            nonzero.push(n);
        }
    }
    Ok(Outcome {
        pass: worst >= floor && nonzero.is_empty(),
        detail: format!(
            "{} cylinders of up to 6 digits at level {level}: min lower ratio over return times {} >= 1-2^-13; \
             A_n at 2^n exactly 0 for n < {}: {}",
            sets.len(),
            dec(&worst),
            level - 1,
            if nonzero.is_empty() { "yes".to_string() } else { format!("no at {nonzero:?}") }
        ),
    })
}

struct Golden {
    name: &'static str,
    od: OrderedDiagram,
    m: LevelMeasure,
    cyl_depth: usize,
    level: usize,
    brute_depth: usize,
}

fn golden_suite() -> Result<Vec<Golden>, String> {
    let mut out = Vec::new();
    let (od, m) = dyadic(14)?;
    out.push(Golden { name: "dyadic", od, m, cyl_depth: 3, level: 6, brute_depth: 14 });

    let od = nonsimple_family(2, 4, 8).build().map_err(e)?;
    let f = od.base().incidence(2).map_err(e)?.clone();
    let m = stationary_measures_default(&f, 8).map_err(e)?.remove(0).measure;
    out.push(Golden { name: "nonsimple-2-4", od, m, cyl_depth: 3, level: 5, brute_depth: 7 });

    let d = BratteliDiagram::stationary(&IntMatrix::from_u64(&[vec![1, 1], vec![1, 1]]).map_err(e)?, 12, true).map_err(e)?;
    let m = ecs_measure(&d).map_err(e)?;
    out.push(Golden { name: "full-2x2", od: OrderedDiagram::left_to_right(d), m, cyl_depth: 3, level: 5, brute_depth: 12 });

    let st = Stage::parse(&["aab", "abb"], "ab").map_err(e)?;
    let od = scheme_diagram(&SubstitutionScheme::new(vec![st; 7], "ab").map_err(e)?).map_err(e)?;
    let m = ecs_measure(od.base()).map_err(e)?;
    out.push(Golden { name: "ternary-toeplitz", od, m, cyl_depth: 3, level: 4, brute_depth: 8 });

    let g = TwoByTwoErs {
        a: Expr::parse("n^2").map_err(e)?,
        b: Expr::parse("n").map_err(e)?,
        c: Expr::parse("n").map_err(e)?,
        d: Expr::parse("n^2").map_err(e)?,
    };
    let d = BratteliDiagram::from_generator(&g, 5).map_err(e)?;
    let m = ecs_measure(&d).map_err(e)?;
    out.push(Golden { name: "symmetric-2x2", od: OrderedDiagram::left_to_right(d), m, cyl_depth: 2, level: 3, brute_depth: 5 });

    let sys = SpineSystem::linear(2, 16, 128).map_err(e)?;
    out.push(Golden { name: "spine-d2", od: sys.od.clone(), m: sys.measure().clone(), cyl_depth: 4, level: 7, brute_depth: 16 });
    Ok(out)
}

/// Brute-force oracle inside the certified bounds.
fn criterion2() -> Result<Outcome, String> {
    let mut total = 0;
    let mut bad = Vec::new();
    for g in golden_suite()? {
        let cyls = cylinders(&g.od, g.cyl_depth);
        let picks = [0, cyls.len() / 3, cyls.len() / 2, cyls.len() - 1];
        let h = g.od.base().height(g.level, 0).to_u64().unwrap_or(u64::MAX);
        let times = [1u64, 2, 3, h / 2 + 1];
        for &i in &picks {
            let x = PathSet::cylinder(&g.od, &cyls[i]).map_err(e)?;
            for &s in &times {
                let s = BigUint::from(s);
                total += 1;
                let c = set_correlation(&g.od, &g.m, &x, &x, &s, &CorrelationOptions::at_level(g.level)).map_err(e)?;
                let bf = brute_force_correlation(&g.od, &g.m, &x, &x, &s, g.brute_depth).map_err(e)?;
                let reach = bf.value.add(&bf.unresolved);
                let ok = &c.lower <= bf.value.hi() && bf.value.lo() <= &c.upper && reach.lo() <= &c.upper_raw;
                if !ok {
                    bad.push(format!("{}:{}@{}", g.name, prefix_label(&cyls[i]), s));
                }
            }
        }
    }
    Ok(Outcome {
        pass: total >= 50 && bad.is_empty(),
        detail: format!("{} of {total} instances inside [L,U]{}", total - bad.len(), if bad.is_empty() { String::new() } else { format!("; outside: {bad:?}") }),
    })
}

/// Thm 5.1 family with p = 2, q = 4 under the lambda = 4 measure.
fn criterion3() -> Result<Outcome, String> {
    let level = 11;
    let od = nonsimple_family(2, 4, level).build().map_err(e)?;
    let f = od.base().incidence(2).map_err(e)?.clone();
    let ms = stationary_measures(&f, level, 256).map_err(e)?;
    let m = &ms.iter().find(|s| s.lambda.contains(&rat(4, 1))).ok_or("no lambda = 4 measure")?.measure;
    let prefixes: Vec<PathPrefix> =
        (1..=5).flat_map(|d| cylinders(&od, d)).filter(|p| p.end == 1).collect();
    let sets = labeled(&od, &prefixes)?;
    let times: Vec<BigUint> = (1..=10).map(|n| od.base().height(n, 1).clone()).collect();
    let opts = CorrelationOptions::at_level(level);
    let table = rigidity_scan(&od, m, &sets, &times, &opts).map_err(e)?;
    let floor = rat(3, 4) - rat(1, 1000);
    let mut worst = BigRational::one();
    for (i, p) in prefixes.iter().enumerate() {
        for n in p.depth()..=10 {
            worst = worst.min(table.cell(i, n - 1).lower_ratio.clone());
        }
    }

    let smax = od.base().height(8, 1).to_usize().ok_or("h_8(2) too large")?;
    let family: Vec<PathSet> = (1..=4)
        .flat_map(|d| cylinders(&od, d))
        .map(|p| PathSet::cylinder(&od, &p))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let report = dense_sweep(&od, m, &family, smax, &opts.clone().tight()).map_err(e)?;
    let threshold = rat(49, 50);
    let failures = report.failures(1, &threshold);
    let worst_sweep = report.min_upper_ratio[1..].iter().max().cloned().unwrap_or_else(BigRational::zero);
    Ok(Outcome {
        pass: worst >= floor && failures.is_empty(),
        detail: format!(
            "{} vertex-2 cylinders, times h_n(2) for depth <= n <= 10: min lower ratio {} (need >= 3/4 - 1e-3); \
             dense sweep 1..={smax} over {} cylinders: worst best-upper-ratio {} (need <= 49/50), {} failing times",
            sets.len(),
            dec(&worst),
            family.len(),
            dec(&worst_sweep),
            failures.len()
        ),
    })
}

/// Ex 4.21 rigidity sequence `3 h_m`.
fn criterion4() -> Result<Outcome, String> {
    let od = scheme_diagram(&arbulu_scheme(4, true).map_err(e)?).map_err(e)?;
    let mu = invariant_bracket(od.base(), 1, 256).map_err(e)?;
    let mut lines = Vec::new();
    let mut pass = true;
    for m in [1usize, 2] {
        let level = m + 2;
        let h = od.base().height(m + 1, 0).clone();
        let time = &h * 3u32;
        let p_next = mu.level(m + 2).map_err(e)?.iter().map(|x| x.lo().clone()).max().ok_or("empty level")?;
        let ten_h_p = BigRational::from_integer((&h * 10u32).into()) * &p_next;
        let opts = CorrelationOptions::at_level(level).with_cap(1 << 28);
        let depth = m + 1;
        let mut prefixes: Vec<PathPrefix> = (1..=depth.min(2)).flat_map(|d| cylinders(&od, d)).collect();
        if depth > 2 {
            let deep = cylinders(&od, depth);
            let stride = deep.len().div_ceil(50);
            prefixes.extend(deep.into_iter().step_by(stride));
        }
        let mut worst_margin: Option<BigRational> = None;
        let mut failed = 0;
        for chunk in prefixes.chunks(4) {
            let rs: Vec<Result<(BigRational, BigRational), String>> = std::thread::scope(|sc| {
                let hs: Vec<_> = chunk
                    .iter()
                    .map(|p| {
                        let (od, mu, opts, time, ten_h_p) = (&od, &mu, &opts, &time, &ten_h_p);
                        sc.spawn(move || {
                            let x = PathSet::cylinder(od, p).map_err(e)?;
                            let c = set_correlation(od, mu, &x, &x, time, opts).map_err(e)?;
                            if !c.bound_only.is_empty() {
                                return Err(format!("tower above cap at level {}", opts.level));
                            }
                            let need = BigRational::one() - ten_h_p / c.measure_x.hi();
                            Ok((c.lower_ratio(), need))
                        })
                    })
                    .collect();
                hs.into_iter().map(|h| h.join().expect("worker")).collect()
            });
            for r in rs {
                let (got, need) = r?;
                if got < need {
                    failed += 1;
                }
                let margin = got - need;
                worst_margin = Some(worst_margin.map_or(margin.clone(), |w| w.min(margin)));
            }
        }
        pass &= failed == 0;
        lines.push(format!(
            "m={m}: time {time}, {} cylinders of depth <= {depth} (depth 3 strided) at level {level}, 10 h_m p_(m+1) = {}, \
             min(lower ratio - bound) = {}, {failed} below",
            prefixes.len(),
            dec(&ten_h_p),
            worst_margin.map(|w| dec(&w)).unwrap_or_default()
        ));
    }
    Ok(Outcome { pass, detail: format!("{}; measure bracket at 256 bits", lines.join("; ")) })
}

/// Gap-five enumeration system.
fn criterion5() -> Result<Outcome, String> {
    let mut parts = Vec::new();
    let mut pass = true;

    let published = [1u32, 2, 3, 4, 5, 6, 8, 11, 15, 20, 26, 34, 42, 53];
    let scale = linear_scale(5, 13).map_err(e)?;
    let got: Vec<String> = scale.table().iter().map(ToString::to_string).collect();
    let want: Vec<String> = published.iter().map(ToString::to_string).collect();
    let a = got == want;
    pass &= a;
    parts.push(format!("(a) {} table {} vs {}", ok(a), got.join(","), want.join(",")));

    let big = linear_scale(5, 10_003).map_err(e)?;
    let v = sk_identity_check(&big, 10, 10_000).map_err(e)?;
    pass &= v.is_empty();
    parts.push(format!("(b) {} S_k identity 10..=10^4 with {} violations", ok(v.is_empty()), v.len()));

    let scale = linear_scale(5, 60).map_err(e)?;
    let mut round_bad = 0u32;
    let mut prev = greedy_expand(&scale, &BigUint::zero()).map_err(e)?;
    for n in 0u32..100_000 {
        let nn = BigUint::from(n);
        let g = if n == 0 { prev.clone() } else { greedy_expand(&scale, &nn).map_err(e)? };
        if value(&scale, &g).map_err(e)? != nn || (n > 0 && add_one(&scale, &prev).map_err(e)? != g) {
            round_bad += 1;
        }
        prev = g;
    }
    pass &= round_bad == 0;
    parts.push(format!("(c) {} greedy round trip and add-one for N < 10^5, {round_bad} bad", ok(round_bad == 0)));

    let od = spine_diagram(&scale, 14).map_err(e)?;
    let mism = digit_path_mismatches(&scale, &od, 14).map_err(e)?;
    pass &= mism.is_empty();
    parts.push(format!("(d) {} digits vs paths for N < S_13 = {}, {} mismatches", ok(mism.is_empty()), scale.s(13), mism.len()));

    let sys = SpineSystem::linear(5, 20, 256).map_err(e)?;
    let lam = &sys.stationary.lambda;
    let cubic = Poly::from_ints(&[-1, -1, 0, 1]);
    let quintic = Poly::from_ints(&[-1, 0, 0, 0, -1, 1]);
    let brackets = |p: &Poly| p.eval(lam.lo()).is_negative() && p.eval(lam.hi()).is_positive();
    let width_ok = lam.width() < BigRational::new(1.into(), BigUint::from(10u32).pow(30).into());
    let xi = sys.xi();
    let ratio_ok = (1..xi.len()).all(|i| xi[i].mul(lam).overlaps(&xi[i - 1]));
    let ee = brackets(&cubic) && brackets(&quintic) && width_ok && ratio_ok;
    pass &= ee;
    parts.push(format!(
        "(e) {} lambda = {} width {:.1e}, root of x^3-x-1 and x^5-x^4-1: {}, xi_i = xi_(i-1)/lambda: {ratio_ok}",
        ok(ee),
        lam.fmt_decimal(12),
        lam.width().to_f64().unwrap_or(f64::NAN),
        brackets(&cubic) && brackets(&quintic)
    ));

    let depth = 64;
    let sys = SpineSystem::linear(5, depth, 256).map_err(e)?;
    let (mut tried, mut decided, mut last_k) = (0u32, 0u32, 0usize);
    let mut k = 12;
    while k + 7 <= depth {
        let rep = match default_witness(&sys, sys.scale.s(k)) {
            Ok(r) => r,
            Err(_) => break,
        };
        if rep.correlations.iter().any(|c| !c.bound_only.is_empty()) {
            break;
        }
        tried += 1;
        last_k = k;
        decided += u32::from(rep.verdict.is_some());
        k += 1;
    }
    let f = tried > 0 && decided * 5 >= tried * 4;
    pass &= f;
    parts.push(format!("(f) {} witness verdicts for n = S_k, 12 <= k <= {last_k}: {decided} of {tried}", ok(f)));
    Ok(Outcome { pass, detail: parts.join("; ") })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

/// Skew product over the dyadic odometer with a fair Bernoulli fiber.
fn criterion6() -> Result<Outcome, String> {
    let sweep = |seed| -> Result<Vec<_>, String> {
        (6..=16).map(|k| simulate_correlation(&SkewConfig::dyadic_example(1 << k, 100_000, seed)).map_err(e)).collect()
    };
    let first = sweep(1)?;
    let again = sweep(1)?;
    let target = 1.0 / 32.0;
    let mut within = true;
    let mut below = true;
    let mut worst_z: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    for r in &first {
        if r.m >= 1 << 10 {
            let z = (r.estimate - target).abs() / r.stderr;
            worst_z = worst_z.max(z);
            within &= z <= 3.0;
        }
        max_ratio = max_ratio.max(r.ratio_to_mass);
        below &= r.ratio_to_mass < 0.5;
    }
    let repro = first == again;
    Ok(Outcome {
        pass: within && below && repro,
        detail: format!(
            "m = 2^6..2^16, 10^5 samples: max |est - 1/32| / SE for m >= 2^10 = {worst_z:.2} (need <= 3), \
             max ratio to mass {max_ratio:.4} (need < 1/2), reproducible {repro}"
        ),
    })
}

/// Toeplitz skeleton densities.
fn criterion7() -> Result<Outcome, String> {
    let st = Stage::parse(&["aab", "abb"], "ab").map_err(e)?;
    let tern = SubstitutionScheme::new(vec![st; 4], "ab").map_err(e)?;
    let prof = density_profile(&tern, 3, DEFAULT_WINDOW).map_err(e)?;
    let measured: Vec<BigRational> = prof.rows.iter().map(|r| r.measured.clone()).collect();
    let a = measured == vec![rat(1, 3), rat(1, 9), rat(1, 27)];

    let arb = arbulu_scheme(3, true).map_err(e)?;
    let prof = density_profile(&arb, 2, DEFAULT_WINDOW).map_err(e)?;
    let sums_ok = prof.rows.iter().all(|r| r.partial_sum < rat(1, 20));
    let dens_ok = prof.rows.iter().all(|r| r.measured > rat(9, 10));
    let shown: Vec<String> = prof
        .rows
        .iter()
        .map(|r| format!("stage {}: measured {} predicted {} partial sum {}", r.stage, r.measured, dec(&r.predicted), r.partial_sum))
        .collect();
    Ok(Outcome {
        pass: a && sums_ok && dens_ok,
        detail: format!(
            "r = 3 scheme densities {} ({}); arbulu partial sums < 1/20: {sums_ok}, measured density > 0.9: {dens_ok} [{}]",
            measured.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
            ok(a),
            shown.join("; ")
        ),
    })
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<u64>> {
    loop {
        let m: Vec<Vec<u64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..=5)).collect()).collect();
        let rows_ok = m.iter().all(|r| r.iter().any(|&x| x > 0));
        let cols_ok = (0..cols).all(|c| m.iter().any(|r| r[c] > 0));
        if rows_ok && cols_ok {
            return m;
        }
    }
}

fn random_diagram(rng: &mut ChaCha8Rng) -> Result<OrderedDiagram, String> {
    let levels = rng.gen_range(1..=6);
    let mut sizes = vec![1usize];
    sizes.extend((0..levels).map(|_| rng.gen_range(1..=4)));
    let mats = (1..=levels)
        .map(|n| {
            let m = if n == 1 { vec![vec![1]; sizes[1]] } else { random_matrix(rng, sizes[n], sizes[n - 1]) };
            IntMatrix::from_u64(&m).map_err(e)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let base = BratteliDiagram::new(mats, true).map_err(e)?;
    let lr = OrderedDiagram::left_to_right(base.clone());
    let table: Vec<Option<Vec<Vec<usize>>>> = (1..=levels)
        .map(|n| {
            Some(
                lr.words_at(n)
                    .iter()
                    .map(|w| {
                        let mut w = w.clone();
                        for i in (1..w.len()).rev() {
                            w.swap(i, rng.gen_range(0..=i));
                        }
                        w
                    })
                    .collect(),
            )
        })
        .collect();
    OrderedDiagram::with_explicit_order(base, &table).map_err(e)
}

/// Randomized invariants on small diagrams.
fn criterion8() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cases = 1000;
    let mut fails: Vec<String> = Vec::new();
    for case in 0..cases {
        let od = random_diagram(&mut rng)?;
        let d = od.base();
        let depth = d.levels();

        for n in 1..depth {
            let next = d.incidence(n + 1).map_err(e)?.mul_vec(d.height_slice(n));
            if next != d.height_slice(n + 1) {
                fails.push(format!("case {case}: heights at level {}", n + 1));
            }
        }

        let c = rng.gen_range(1..=depth);
        let v = rng.gen_range(0..d.vertex_count(c));
        let ord = BigUint::from(rng.gen_range(0..d.height(c, v).to_u64().unwrap_or(1)));
        let p = from_ordinal(&od, c, v, &ord).map_err(e)?;
        let lab = floor_sets(&od, &PathSet::cylinder(&od, &p).map_err(e)?, depth, 1 << 20).map_err(e)?;
        let prod = if c == depth { None } else { Some(d.incidence_product(c, depth).map_err(e)?) };
        for w in 0..d.vertex_count(depth) {
            let want = match &prod {
                Some(f) => f.get(w, v).clone(),
                None => BigUint::from(u8::from(w == v)),
            };
            if lab.tower(w).map(|t| BigUint::from(t.count_ones())) != Some(want) {
                fails.push(format!("case {case}: popcount at tower {w}"));
            }
        }

        let mut cuts = vec![0];
        cuts.extend((1..depth).filter(|_| rng.gen_bool(0.5)));
        cuts.push(depth);
        let t = d.telescope(&cuts).map_err(e)?;
        for (i, &l) in cuts.iter().enumerate().skip(1) {
            if t.height_slice(i) != d.height_slice(l) {
                fails.push(format!("case {case}: telescoped heights at cut {l}"));
            }
        }

        for w in 0..d.vertex_count(depth) {
            let h = d.height(depth, w).to_u64().unwrap_or(0);
            let mut cur = minimal_prefix(&od, depth, w);
            let mut seen = 0u64;
            loop {
                if ordinal(&od, &cur).map_err(e)? != BigUint::from(seen) {
                    fails.push(format!("case {case}: ordinal order at vertex {w}"));
                    break;
                }
                seen += 1;
                match successor(&od, &cur).map_err(e)? {
                    Successor::Next(n) if n.end == w => cur = n,
                    Successor::Next(_) => {
                        fails.push(format!("case {case}: successor left tower {w}"));
                        break;
                    }
                    Successor::MaximalOverflow => break,
                }
            }
            if seen != h {
                fails.push(format!("case {case}: enumerated {seen} of {h} prefixes at vertex {w}"));
            }
        }

        if d.vertex_counts().iter().skip(1).all(|&k| k == d.vertex_count(1)) && depth >= 3 {
            let f = d.incidence(2).map_err(e)?.clone();
            let sq = BratteliDiagram::stationary(&f, depth, true).map_err(e)?;
            if let Ok(ms) = stationary_measures(&f, depth, 96) {
                for s in ms {
                    if s.measure.compatibility_failure(&sq).is_some() {
                        fails.push(format!("case {case}: stationary measure compatibility"));
                    }
                }
            }
            if let Ok(b) = invariant_bracket(d, 1, 96) {
                if !b.is_nonnegative() {
                    fails.push(format!("case {case}: negative bracket"));
                }
            }
        }
    }
    fails.truncate(5);
    Ok(Outcome {
        pass: fails.is_empty(),
        detail: format!(
            "{cases} random diagrams (<= 4 vertices, <= 6 levels, entries <= 5): height recursion, popcounts, \
             telescoping, successor enumeration, measure compatibility{}",
            if fails.is_empty() { String::new() } else { format!("; failures {fails:?}") }
        ),
    })
}

fn main() {
    let only: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let want = |id: &str| only.as_deref().is_none_or(|o| o == id);
    let mut all = true;
    let criteria: [(&str, u64, fn() -> Result<Outcome, String>); 8] = [
        ("1", 1, criterion1),
        ("2", 60, criterion2),
        ("3", 300, criterion3),
        ("4", 120, criterion4),
        ("5", 600, criterion5),
        ("6", 120, criterion6),
        ("7", 30, criterion7),
        ("8", 120, criterion8),
    ];
    for (id, secs, f) in criteria {
        if want(id) {
            all &= run(id, Duration::from_secs(secs), f);
        }
    }
    if !all {
        std::process::exit(1);
    }
}
