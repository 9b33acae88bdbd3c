//! `bratteli`: command-line front end for the bratteli library.

mod inputs;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;

use bratteli::bits::PathSet;
use bratteli::diagram_file::gallery;
use bratteli::enumeration::{
    add_one, greedy_expand, linear_scale, nonrigidity_witness, sk_identity_check, value, SpineSystem, WITNESS_LABELS,
    WITNESS_MARGIN,
};
use bratteli::interval::{fmt_rational, fmt_sci, Interval};
use bratteli::ordering::word_string;
use bratteli::rigidity::{prefix_label, rigidity_scan, Boundary, CorrelationOptions};
use bratteli::skewsim::simulate_correlation;
use bratteli::toeplitz::density_profile;
use bratteli::vershik::{iterate, ordinal, Iterated};

#[derive(Parser)]
#[command(name = "bratteli", version, about = "Ordered Bratteli diagrams, invariant measures and return correlations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Interval precision in bits.
    #[arg(long, global = true, env = "BRATTELI_PRECISION", default_value_t = bratteli::interval::DEFAULT_PRECISION)]
    precision: u32,
    /// Significant digits for decimal intervals.
    #[arg(long, global = true, default_value_t = 20)]
    digits: usize,
    /// Output file; CSV goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json`, or stderr without `--out`.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Per-level vertex counts, heights, row and column sums and order words.
    Diagram(DiagramArgs),
    /// Per-level measure tables `p_n(v)`.
    Measures(MeasuresArgs),
    #[command(subcommand)]
    Rigidity(RigidityCmd),
    #[command(subcommand)]
    Toeplitz(ToeplitzCmd),
    #[command(subcommand)]
    Enum(EnumCmd),
    #[command(subcommand)]
    Skew(SkewCmd),
    /// Writes every example diagram as a JSON file plus a structure report.
    Gallery(GalleryArgs),
    #[command(subcommand)]
    Vershik(VershikCmd),
}

#[derive(Args, Serialize)]
struct DiagramSource {
    /// Diagram JSON file or `gallery:<name>`.
    #[arg(long)]
    diagram: String,
    /// Overrides the stored depth.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Serialize)]
struct DiagramArgs {
    #[command(flatten)]
    src: DiagramSource,
}

#[derive(Args, Serialize)]
struct MeasuresArgs {
    #[command(flatten)]
    src: DiagramSource,
    /// `ecs`, `stationary[:i]`, `bracket[:lookahead]` or `spine:<d>`.
    #[arg(long, default_value = "stationary")]
    measure: String,
    /// Print exact values as decimal intervals too.
    #[arg(long)]
    decimal: bool,
}

#[derive(Subcommand)]
enum RigidityCmd {
    /// Certified return-correlation ratios for cylinders and times.
    Scan(ScanArgs),
}

#[derive(Args, Serialize)]
struct ScanArgs {
    #[command(flatten)]
    src: DiagramSource,
    #[arg(long, default_value = "stationary")]
    measure: String,
    /// File of integers, comma list, or an expression in `n`.
    #[arg(long)]
    times: String,
    /// Values of `n` for an expression in `--times`.
    #[arg(long, default_value = "1..8")]
    n_range: String,
    /// Cylinder depth, or a file of `e1.e2...@v` labels.
    #[arg(long)]
    cylinders: String,
    /// Level at which floors are labelled.
    #[arg(long)]
    level: usize,
    /// Resolve tower-top boundary floors exactly instead of bounding them.
    #[arg(long)]
    tight: bool,
}

#[derive(Subcommand)]
enum ToeplitzCmd {
    /// Hole densities of the periodic skeletons per stage.
    Density(DensityArgs),
}

#[derive(Args, Serialize)]
struct DensityArgs {
    /// `arbulu:<n>[:raw]`, `uniform:<w1>/<w2>/...:<count>` or a scheme JSON file.
    #[arg(long)]
    scheme: String,
    #[arg(long)]
    stages: usize,
    /// Largest window, in letters.
    #[arg(long, default_value_t = bratteli::toeplitz::DEFAULT_WINDOW)]
    budget: usize,
}

#[derive(Subcommand)]
enum EnumCmd {
    /// Greedy digits of `n` in the scale `S_k = S_{k-1} + S_{k-d}`.
    Expand(ExpandArgs),
    /// Non-rigidity witness correlations at the given times.
    Witness(WitnessArgs),
    /// Checks the mod-6 recursion identity for `S_k`.
    CheckSk(CheckSkArgs),
}

#[derive(Args, Serialize)]
struct ExpandArgs {
    #[arg(long, default_value_t = 5)]
    d: usize,
    /// A single integer or `a..b`.
    #[arg(long)]
    n: String,
}

#[derive(Args, Serialize)]
struct WitnessArgs {
    #[arg(long, default_value_t = 5)]
    d: usize,
    /// `S<a>..S<b>` or `a..b`.
    #[arg(long)]
    n_range: String,
    /// Spine depth; defaults to the deepest level any witness needs.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Serialize)]
struct CheckSkArgs {
    #[arg(long, default_value_t = 5)]
    d: usize,
    #[arg(long)]
    kmax: usize,
}

#[derive(Subcommand)]
enum SkewCmd {
    /// Monte-Carlo return correlations of `D x [A]` under the skew product.
    Sim(SimArgs),
}

#[derive(Args, Serialize)]
struct SimArgs {
    /// `dyadic`, `const:<r>` or a comma list of radices.
    #[arg(long, default_value = "dyadic")]
    base: String,
    /// Base set, e.g. `digit0=0` or `digit0=0,digit1=1|digit2=0`.
    #[arg(long = "D")]
    d: String,
    /// `bernoulli:<k>` or `weights:<w0>,<w1>,...`.
    #[arg(long, default_value = "bernoulli:2")]
    fiber: String,
    /// Fiber cylinder word, e.g. `00`.
    #[arg(long = "A")]
    a: String,
    /// A single time.
    #[arg(long, conflicts_with = "m_sweep")]
    m: Option<u64>,
    /// `a..b` doubling, or `a..b:step`.
    #[arg(long)]
    m_sweep: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct GalleryArgs {
    #[arg(long, default_value = "gallery")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum VershikCmd {
    /// Applies the Vershik map `steps` times to a prefix.
    Step(StepArgs),
}

#[derive(Args, Serialize)]
struct StepArgs {
    #[command(flatten)]
    src: DiagramSource,
    /// `e1.e2...eN@v`, 1-based.
    #[arg(long)]
    prefix: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    steps: String,
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: String,
    inputs: Vec<String>,
    params: BTreeMap<String, serde_json::Value>,
    output: Option<String>,
    seed: Option<u64>,
    version: String,
}

/// One run's CSV rows and manifest fields.
struct Run {
    name: &'static str,
    inputs: Vec<String>,
    params: BTreeMap<String, serde_json::Value>,
    seed: Option<u64>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Run {
    fn new<T: Serialize>(name: &'static str, args: &T, header: &[&'static str]) -> Self {
        Run { name, inputs: Vec::new(), params: inputs::params_of(args), seed: None, header: header.to_vec(), rows: Vec::new() }
    }

    fn input(mut self, src: &str) -> Self {
        if inputs::is_file(src) || src.starts_with("gallery:") {
            self.inputs.push(src.to_string());
        }
        self
    }
}

fn exact_or_interval(iv: &Interval, digits: usize, decimal: bool) -> String {
    match iv.exact_value() {
        Some(x) if !decimal => fmt_rational(x),
        _ => iv.fmt_decimal(digits),
    }
}

/// Exact `p/q` for exact measures; otherwise a decimal rounded away from the bound's interior.
fn bound(x: &BigRational, exact: bool, up: bool, digits: usize) -> String {
    if exact {
        fmt_rational(x)
    } else {
        fmt_sci(x, digits, up)
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn diagram(a: &DiagramArgs) -> Result<Run> {
    let od = inputs::load_diagram(&a.src.diagram, a.src.depth)?.build()?;
    let d = od.base();
    let mut run = Run::new("diagram", a, &["level", "vertices", "heights", "row_sums", "col_sums", "min_max_entry_ratio", "words"])
        .input(&a.src.diagram);
    let report = d.structure_report();
    for n in 1..=d.levels() {
        let f = d.incidence(n)?;
        let words: Vec<String> = od.words_at(n).iter().map(|w| word_string(w)).collect();
        run.rows.push(vec![
            n.to_string(),
            d.vertex_count(n).to_string(),
            join(d.height_slice(n)),
            join(&f.row_sums()),
            join(&f.col_sums()),
            fmt_rational(&report.min_max_entry_ratio[n - 1]),
            words.join(" | "),
        ]);
    }
    Ok(run)
}

fn measures(a: &MeasuresArgs, prec: u32, digits: usize) -> Result<Run> {
    let od = inputs::load_diagram(&a.src.diagram, a.src.depth)?.build()?;
    let m = inputs::measure(&a.measure, &od, prec)?;
    let mut run = Run::new("measures", a, &["level", "vertex", "height", "p"]).input(&a.src.diagram);
    for n in 1..=m.depth() {
        for (v, p) in m.level(n)?.iter().enumerate() {
            run.rows.push(vec![
                n.to_string(),
                (v + 1).to_string(),
                od.base().height(n, v).to_string(),
                exact_or_interval(p, digits, a.decimal),
            ]);
        }
    }
    Ok(run)
}

fn scan(a: &ScanArgs, prec: u32, digits: usize) -> Result<Run> {
    let od = inputs::load_diagram(&a.src.diagram, a.src.depth)?.build()?;
    let m = inputs::measure(&a.measure, &od, prec)?;
    let times = inputs::times(&a.times, inputs::range(&a.n_range)?)?;
    let cyls = inputs::cylinder_list(&a.cylinders, &od)?;
    let sets = cyls
        .iter()
        .map(|p| Ok((prefix_label(p), PathSet::cylinder(&od, p)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut opts = CorrelationOptions::at_level(a.level);
    if a.tight {
        opts.boundary = Boundary::Tight;
    }
    let table = rigidity_scan(&od, &m, &sets, &times, &opts)?;
    let exact = m.is_exact();
    let mut run = Run::new("rigidity scan", a, &["cylinder", "time", "L_ratio", "U_ratio"]).input(&a.src.diagram);
    if inputs::is_file(&a.times) {
        run.inputs.push(a.times.clone());
    }
    if inputs::is_file(&a.cylinders) {
        run.inputs.push(a.cylinders.clone());
    }
    let bound_only = table.cells.iter().filter(|c| c.bound_only).count();
    if bound_only > 0 {
        eprintln!("note: {bound_only} cells fell back to tower-mass bounds");
    }
    for c in &table.cells {
        run.rows.push(vec![
            table.labels[c.set].clone(),
            table.times[c.time].to_string(),
            bound(&c.lower_ratio, exact, false, digits),
            bound(&c.upper_ratio, exact, true, digits),
        ]);
    }
    Ok(run)
}

fn density(a: &DensityArgs) -> Result<Run> {
    let scheme = inputs::scheme(&a.scheme)?;
    let prof = density_profile(&scheme, a.stages, a.budget)?;
    let mut run = Run::new("toeplitz density", a, &["stage", "p", "q", "measured", "predicted", "partial_sum_1_over_r"])
        .input(&a.scheme);
    for r in &prof.rows {
        run.rows.push(vec![
            r.stage.to_string(),
            r.period.to_string(),
            r.holes.to_string(),
            fmt_rational(&r.measured),
            fmt_rational(&r.predicted),
            fmt_rational(&r.partial_sum),
        ]);
    }
    Ok(run)
}

fn scale_covering(d: usize, n: &BigUint) -> Result<bratteli::enumeration::EnumerationScale> {
    let mut k = 64;
    loop {
        let s = linear_scale(d, k)?;
        if s.s(s.k_max()) > n {
            return Ok(s);
        }
        k *= 2;
    }
}

fn expand(a: &ExpandArgs) -> Result<Run> {
    let (lo, hi): (BigUint, BigUint) = match a.n.split_once("..") {
        Some(_) => {
            let (x, y) = inputs::range(&a.n)?;
            (x.into(), y.into())
        }
        None => {
            let x: BigUint = a.n.trim().parse().with_context(|| format!("bad n {:?}", a.n))?;
            (x.clone(), x)
        }
    };
    let scale = scale_covering(a.d, &(&hi + 1u8))?;
    let mut run = Run::new("enum expand", a, &["n", "k", "digits", "value"]);
    let mut g = greedy_expand(&scale, &lo)?;
    let mut n = lo;
    loop {
        let len = g.ones.last().map_or(1, |&i| i + 1);
        let ds: String = g.digits(len).iter().map(|d| char::from(b'0' + d)).collect();
        run.rows.push(vec![n.to_string(), scale.floor_index(&n)?.to_string(), ds, value(&scale, &g)?.to_string()]);
        if n >= hi {
            break;
        }
        g = add_one(&scale, &g)?;
        n += 1u8;
    }
    Ok(run)
}

fn witness(a: &WitnessArgs, prec: u32, digits: usize) -> Result<Run> {
    let probe = linear_scale(a.d, 512)?;
    let times = inputs::witness_times(&a.n_range, |k| (k <= probe.k_max()).then(|| probe.s(k).clone()))?;
    let top = times.iter().map(|n| probe.floor_index(n)).collect::<bratteli::Result<Vec<_>>>()?;
    let depth = a.depth.unwrap_or_else(|| top.iter().max().copied().unwrap_or(12) + 7 + WITNESS_MARGIN);
    let sys = SpineSystem::linear(a.d, depth, prec)?;
    let exact = sys.measure().is_exact();
    let mut run = Run::new(
        "enum witness",
        a,
        &["n", "k", "n_prime", "level", "set", "lower", "upper", "measure_b", "verdict", "expected"],
    );
    for n in &times {
        let rep = nonrigidity_witness(&sys, n, bratteli::bits::DEFAULT_CAP)?;
        for (i, c) in rep.correlations.iter().enumerate() {
            run.rows.push(vec![
                rep.n.to_string(),
                rep.k.to_string(),
                rep.n_prime.to_string(),
                rep.level.to_string(),
                WITNESS_LABELS[i].to_string(),
                bound(&c.lower, exact, false, digits),
                bound(&c.upper, exact, true, digits),
                exact_or_interval(&c.measure_x, digits, false),
                (rep.verdict == Some(i)).to_string(),
                (rep.expected == Some(i)).to_string(),
            ]);
        }
    }
    Ok(run)
}

fn check_sk(a: &CheckSkArgs) -> Result<Run> {
    let scale = linear_scale(a.d, a.kmax)?;
    if a.kmax < 5 {
        bail!("kmax must be at least 5");
    }
    let bad = sk_identity_check(&scale, 2, a.kmax - 3)?;
    eprintln!("checked k = 2..={}: {} violations", a.kmax - 3, bad.len());
    let mut run = Run::new("enum check-sk", a, &["k", "lhs", "rhs"]);
    for v in bad {
        run.rows.push(vec![v.k.to_string(), v.lhs.to_string(), v.rhs.to_string()]);
    }
    Ok(run)
}

fn skew(a: &SimArgs) -> Result<Run> {
    let ms = match (&a.m, &a.m_sweep) {
        (Some(m), None) => vec![*m],
        (None, Some(s)) => inputs::m_values(s)?,
        _ => bail!("give --m or --m-sweep"),
    };
    let base = inputs::skew_config(&a.base, &a.d, &a.fiber, &a.a, a.samples, a.seed)?;
    let mut run = Run::new("skew sim", a, &["m", "estimate", "stderr", "target", "ratio_to_mass"]);
    run.seed = Some(a.seed);
    for m in ms {
        let r = simulate_correlation(&bratteli::skewsim::SkewConfig { m, ..base.clone() })?;
        run.rows.push(vec![
            m.to_string(),
            r.estimate.to_string(),
            r.stderr.to_string(),
            fmt_rational(&r.target),
            r.ratio_to_mass.to_string(),
        ]);
    }
    Ok(run)
}

fn gallery_cmd(a: &GalleryArgs) -> Result<Run> {
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let mut run = Run::new("gallery", a, &["name", "kind", "levels", "rank", "ers", "ecs", "min_max_entry_ratio"]);
    for (name, f) in gallery() {
        fs::write(a.out_dir.join(format!("{name}.json")), f.to_json() + "\n")?;
        let od = f.build().with_context(|| name.clone())?;
        let rep = od.base().structure_report();
        let sums = |s: &Option<Vec<BigUint>>| s.as_ref().map_or("no".to_string(), |v| join(v));
        run.rows.push(vec![
            name,
            f.kind.clone(),
            od.levels().to_string(),
            rep.rank.to_string(),
            sums(&rep.ers),
            sums(&rep.ecs),
            rep.min_max_entry_ratio.iter().map(fmt_rational).collect::<Vec<_>>().join(" "),
        ]);
    }
    Ok(run)
}

fn step(a: &StepArgs) -> Result<Run> {
    let od = inputs::load_diagram(&a.src.diagram, a.src.depth)?.build()?;
    let p = inputs::prefix(&a.prefix)?;
    p.validate(&od)?;
    let steps: BigInt = a.steps.parse().with_context(|| format!("bad step count {:?}", a.steps))?;
    let mut run = Run::new("vershik step", a, &["prefix", "ordinal"]).input(&a.src.diagram);
    match iterate(&od, &p, &steps)? {
        Iterated::Prefix(q) => run.rows.push(vec![prefix_label(&q), ordinal(&od, &q)?.to_string()]),
        Iterated::Overflow(t) => run.rows.push(vec!["overflow".into(), t.to_string()]),
    }
    Ok(run)
}

fn write_csv(run: &Run, w: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(&run.header)?;
    for r in &run.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn emit(cli: &Cli, run: Run) -> Result<()> {
    let (out, default_manifest): (Option<PathBuf>, Option<PathBuf>) = match &cli.cmd {
        Cmd::Gallery(g) => {
            let csv = g.out_dir.join("structure_report.csv");
            (Some(csv), Some(g.out_dir.join("manifest.json")))
        }
        _ => (cli.out.clone(), cli.out.as_ref().map(|o| manifest_beside(o))),
    };
    match &out {
        Some(p) => write_csv(&run, fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)?,
        None => write_csv(&run, io::stdout().lock())?,
    }
    let mut params = run.params;
    params.insert("precision".into(), cli.precision.into());
    params.insert("digits".into(), cli.digits.into());
    let manifest = RunManifest {
        subcommand: run.name.to_string(),
        inputs: run.inputs,
        params,
        output: out.map(|p| p.display().to_string()),
        seed: run.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    match cli.manifest.clone().or(default_manifest) {
        Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => eprint!("{text}"),
    }
    Ok(())
}

fn manifest_beside(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    let (prec, digits) = (cli.precision, cli.digits);
    let run = match &cli.cmd {
        Cmd::Diagram(a) => diagram(a)?,
        Cmd::Measures(a) => measures(a, prec, digits)?,
        Cmd::Rigidity(RigidityCmd::Scan(a)) => scan(a, prec, digits)?,
        Cmd::Toeplitz(ToeplitzCmd::Density(a)) => density(a)?,
        Cmd::Enum(EnumCmd::Expand(a)) => expand(a)?,
        Cmd::Enum(EnumCmd::Witness(a)) => witness(a, prec, digits)?,
        Cmd::Enum(EnumCmd::CheckSk(a)) => check_sk(a)?,
        Cmd::Skew(SkewCmd::Sim(a)) => skew(a)?,
        Cmd::Gallery(a) => gallery_cmd(a)?,
        Cmd::Vershik(VershikCmd::Step(a)) => step(a)?,
    };
    emit(cli, run)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
