//! Parsing of diagram, measure, time, cylinder, scheme and skew-product arguments.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigUint;

use bratteli::diagram_file::{gallery, DiagramFile};
use bratteli::enumeration::SpineSystem;
use bratteli::expr::Expr;
use bratteli::measures::{ecs_measure, invariant_bracket, stationary_measures, LevelMeasure};
use bratteli::ordering::OrderedDiagram;
use bratteli::rigidity::{cylinders, prefix_label};
use bratteli::skewsim::SkewConfig;
use bratteli::toeplitz::{arbulu_scheme, Stage, SubstitutionScheme};
use bratteli::vershik::PathPrefix;

/// `gallery:<name>` or a path to a diagram JSON file; `depth` overrides the stored depth.
pub fn load_diagram(src: &str, depth: Option<usize>) -> Result<DiagramFile> {
    let mut f = match src.strip_prefix("gallery:") {
        Some(name) => gallery()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| anyhow!("no gallery diagram named {name:?}"))?,
        None => {
            let text = std::fs::read_to_string(src).with_context(|| format!("reading {src}"))?;
            DiagramFile::parse(&text)?
        }
    };
    if depth.is_some() {
        f.depth = depth;
    }
    Ok(f)
}

pub fn is_file(src: &str) -> bool {
    Path::new(src).is_file()
}

/// `ecs`, `stationary[:i]` (1-based, from the level-2 matrix), `bracket[:lookahead]` or
/// `spine:<d>` (the invariant measure of the gap-`d` enumeration spine).
pub fn measure(which: &str, od: &OrderedDiagram, prec: u32) -> Result<LevelMeasure> {
    let d = od.base();
    let (name, arg) = match which.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (which, None),
    };
    let num = |default: usize| -> Result<usize> {
        arg.map_or(Ok(default), |a| a.parse().with_context(|| format!("bad measure argument {a:?}")))
    };
    Ok(match name {
        "ecs" => ecs_measure(d)?,
        "stationary" => {
            let i = num(1)?;
            let f = d.incidence(2).context("stationary measures need at least two levels")?;
            let mut ms = stationary_measures(f, d.levels(), prec)?;
            if i == 0 || i > ms.len() {
                bail!("stationary measure {i} requested, {} available", ms.len());
            }
            ms.swap_remove(i - 1).measure
        }
        "bracket" => invariant_bracket(d, num(1)?, prec)?,
        "spine" => SpineSystem::linear(num(5)?, d.levels(), prec)?.stationary.measure,
        other => bail!("unknown measure {other:?}"),
    })
}

/// A file of integers (one per line), a comma list, or an expression in `n` over `range`.
pub fn times(arg: &str, range: (u64, u64)) -> Result<Vec<BigUint>> {
    if is_file(arg) {
        let text = std::fs::read_to_string(arg)?;
        return text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.parse::<BigUint>().with_context(|| format!("bad time {l:?}")))
            .collect();
    }
    if arg.contains(',') {
        return arg.split(',').map(|t| t.trim().parse::<BigUint>().with_context(|| format!("bad time {t:?}"))).collect();
    }
    let e = Expr::parse(arg)?;
    (range.0..=range.1).map(|n| Ok(e.eval_nonneg(n)?)).collect()
}

/// `a..b` (inclusive).
pub fn range(arg: &str) -> Result<(u64, u64)> {
    let (a, b) = arg.split_once("..").ok_or_else(|| anyhow!("expected a..b, got {arg:?}"))?;
    let (a, b) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        bail!("empty range {arg}");
    }
    Ok((a, b))
}

/// Inverse of `prefix_label`: `e1.e2...eN@v`, 1-based.
pub fn prefix(label: &str) -> Result<PathPrefix> {
    let (edges, end) = label.split_once('@').ok_or_else(|| anyhow!("prefix {label:?} lacks @vertex"))?;
    let end: usize = end.trim().parse()?;
    let edges = edges
        .split('.')
        .map(|e| e.trim().parse::<usize>().ok().filter(|&e| e >= 1).map(|e| e - 1))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| anyhow!("bad edge list in {label:?}"))?;
    if end == 0 {
        bail!("vertices are 1-based");
    }
    Ok(PathPrefix::new(end - 1, edges))
}

/// A depth (every cylinder of that depth) or a file of prefix labels.
pub fn cylinder_list(arg: &str, od: &OrderedDiagram) -> Result<Vec<PathPrefix>> {
    if let Ok(depth) = arg.parse::<usize>() {
        if depth == 0 || depth > od.levels() {
            bail!("cylinder depth {depth} outside 1..={}", od.levels());
        }
        return Ok(cylinders(od, depth));
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
    let ps: Vec<PathPrefix> =
        text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(prefix).collect::<Result<_>>()?;
    for p in &ps {
        p.validate(od).with_context(|| prefix_label(p))?;
    }
    Ok(ps)
}

#[derive(serde::Deserialize)]
struct SchemeFile {
    symbols: String,
    stages: Vec<Vec<String>>,
}

/// `arbulu:<stages>[:raw]`, `uniform:<w1>/<w2>/...:<count>` or a JSON file
/// `{"symbols": "ab", "stages": [["aab", "abb"], ...]}`.
pub fn scheme(arg: &str) -> Result<SubstitutionScheme> {
    if let Some(rest) = arg.strip_prefix("arbulu:") {
        let (n, raw) = match rest.split_once(':') {
            Some((n, "raw")) => (n, true),
            Some((_, other)) => bail!("unknown arbulu option {other:?}"),
            None => (rest, false),
        };
        return Ok(arbulu_scheme(n.parse()?, !raw)?);
    }
    if let Some(rest) = arg.strip_prefix("uniform:") {
        let (words, count) = rest.rsplit_once(':').ok_or_else(|| anyhow!("uniform:<words>:<count>"))?;
        let words: Vec<&str> = words.split('/').collect();
        let mut symbols: Vec<char> = words.iter().flat_map(|w| w.chars()).collect();
        symbols.sort_unstable();
        symbols.dedup();
        let symbols: String = symbols.into_iter().collect();
        let st = Stage::parse(&words, &symbols)?;
        return Ok(SubstitutionScheme::new(vec![st; count.parse()?], &symbols)?);
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
    let f: SchemeFile = serde_json::from_str(&text)?;
    let stages = f
        .stages
        .iter()
        .map(|ws| Stage::parse(&ws.iter().map(String::as_str).collect::<Vec<_>>(), &f.symbols))
        .collect::<bratteli::Result<Vec<_>>>()?;
    Ok(SubstitutionScheme::new(stages, &f.symbols)?)
}

/// `dyadic`, `const:<r>` or a comma list of radices (the last one repeats).
pub fn radices(arg: &str) -> Result<Vec<u64>> {
    const DIGITS: usize = 64;
    if arg == "dyadic" {
        return Ok(vec![2; DIGITS]);
    }
    if let Some(r) = arg.strip_prefix("const:") {
        return Ok(vec![r.parse()?; DIGITS]);
    }
    let mut rs: Vec<u64> = arg.split(',').map(|r| r.trim().parse()).collect::<std::result::Result<_, _>>()?;
    let last = *rs.last().ok_or_else(|| anyhow!("no radices"))?;
    rs.resize(DIGITS.max(rs.len()), last);
    Ok(rs)
}

/// `digit0=0,digit3=1|digit1=1`: cylinders joined by `|`, conditions by `,`.
pub fn base_set(arg: &str) -> Result<Vec<Vec<(usize, u64)>>> {
    arg.split('|')
        .map(|cyl| {
            cyl.split(',')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(|c| {
                    let (pos, val) = c
                        .strip_prefix("digit")
                        .and_then(|r| r.split_once('='))
                        .ok_or_else(|| anyhow!("expected digit<i>=<x>, got {c:?}"))?;
                    Ok((pos.trim().parse()?, val.trim().parse()?))
                })
                .collect()
        })
        .collect()
}

/// `bernoulli:<k>` (uniform on k symbols) or `weights:<w0>,<w1>,...`.
pub fn fiber(arg: &str) -> Result<Vec<u64>> {
    if let Some(k) = arg.strip_prefix("bernoulli:") {
        return Ok(vec![1; k.parse()?]);
    }
    if let Some(ws) = arg.strip_prefix("weights:") {
        return Ok(ws.split(',').map(|w| w.trim().parse()).collect::<std::result::Result<_, _>>()?);
    }
    bail!("unknown fiber {arg:?}")
}

/// Symbols as decimal digits, e.g. `00` or `0110`.
pub fn word(arg: &str) -> Result<Vec<usize>> {
    arg.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| anyhow!("bad symbol {c:?}"))).collect()
}

/// `a..b` doubles from `a` up to `b`; `a..b:step` is arithmetic.
pub fn m_values(arg: &str) -> Result<Vec<u64>> {
    let (r, step) = match arg.split_once(':') {
        Some((r, s)) => (r, Some(s.parse::<u64>()?)),
        None => (arg, None),
    };
    let (a, b) = range(r)?;
    let mut out = Vec::new();
    let mut m = a;
    while m <= b {
        out.push(m);
        m = match step {
            Some(0) => bail!("zero step"),
            Some(s) => m + s,
            None if m == 0 => 1,
            None => m * 2,
        };
    }
    Ok(out)
}

pub fn skew_config(base: &str, d: &str, fib: &str, a: &str, samples: usize, seed: u64) -> Result<SkewConfig> {
    Ok(SkewConfig { radices: radices(base)?, d: base_set(d)?, weights: fiber(fib)?, a: word(a)?, m: 0, samples, seed })
}

/// `S<k>` values for `S<a>..S<b>`, or plain integers for `a..b`.
pub fn witness_times(arg: &str, s: impl Fn(usize) -> Option<BigUint>) -> Result<Vec<BigUint>> {
    let (a, b) = arg.split_once("..").ok_or_else(|| anyhow!("expected a..b or S<a>..S<b>"))?;
    match (a.trim().strip_prefix('S'), b.trim().strip_prefix('S')) {
        (Some(x), Some(y)) => {
            let (x, y): (usize, usize) = (x.parse()?, y.parse()?);
            (x..=y).map(|k| s(k).ok_or_else(|| anyhow!("S_{k} beyond the scale"))).collect()
        }
        (None, None) => {
            let (x, y) = range(arg)?;
            Ok((x..=y).map(BigUint::from).collect())
        }
        _ => bail!("mixed range {arg:?}"),
    }
}

pub fn params_of<T: serde::Serialize>(args: &T) -> BTreeMap<String, serde_json::Value> {
    match serde_json::to_value(args) {
        Ok(serde_json::Value::Object(m)) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

