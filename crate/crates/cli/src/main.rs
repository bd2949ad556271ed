mod manifest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use boxdist_core::bounds::{compute_j, j_limit_d3, main_theorem_bound, BoundParams, BoundRegistry, BoundValue, JParams, DEFAULT_TOL};
use boxdist_core::constructions::{characteristic_vector_set, full_box_report};
use boxdist_core::geometry::{distance_palette, CoordBox, PointSet, Scalar, SquaredDistancePalette};
use boxdist_core::poly::MultiPoly;
use boxdist_core::search::{conjecture_probe, search_max, SearchConfig, SearchMode};
use boxdist_core::witness::{build_distance_polynomial, verify_witness};

use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "boxdist", version, about = "Bounds, witness polynomials and extremal search for few-distance sets in boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of every bound over a parameter grid.
    Bounds(BoundsArgs),
    /// Largest s-distance subset of a box.
    Search(SearchArgs),
    /// Search maximum against the monomial count and the proven bound.
    Probe(ProbeArgs),
    /// Build or check distance polynomials.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Explicit few-distance sets.
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// The constant J(t, d), or its limit for d = 3.
    Jconst(JconstArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// Dimensions: comma-separated values or inclusive ranges, e.g. `1-4,8`.
    #[arg(long)]
    n: String,
    #[arg(long)]
    q: String,
    #[arg(long)]
    s: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Anytime,
}

#[derive(Args)]
struct SearchOpts {
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    node_budget: Option<u64>,
    /// Seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    /// `dynamic` or `enumerate-palettes`.
    #[arg(long, default_value = "dynamic")]
    palette_mode: String,
    #[arg(long)]
    no_symmetry: bool,
}

impl SearchOpts {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            mode: match self.mode {
                Mode::Exact => SearchMode::Exact,
                Mode::Anytime => SearchMode::Anytime,
            },
            node_budget: self.node_budget.unwrap_or(u64::MAX),
            time_budget: self.time_budget,
            symmetry_reduction: !self.no_symmetry,
            palette_mode: self.palette_mode.clone(),
            worker_count: self.workers,
        }
    }

    fn record(&self, m: RunManifest) -> RunManifest {
        m.param("mode", self.config().mode)
            .param("workers", self.workers)
            .param("node_budget", self.node_budget)
            .param("time_budget", self.time_budget)
            .param("palette_mode", &self.palette_mode)
            .param("symmetry_reduction", !self.no_symmetry)
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Box JSON, or a point-set JSON whose box is searched.
    #[arg(long = "box")]
    box_path: PathBuf,
    #[arg(long)]
    s: usize,
    #[command(flatten)]
    opts: SearchOpts,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: usize,
    #[arg(long)]
    s: usize,
    /// Defaults to the integer grid {0,…,q−1}^n.
    #[arg(long = "box")]
    box_path: Option<PathBuf>,
    #[command(flatten)]
    opts: SearchOpts,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Distance polynomial for the palette of a point set.
    Build {
        #[arg(long)]
        points: PathBuf,
        /// Comma-separated squared distances used instead of the set's own.
        #[arg(long)]
        palette: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks the witness conditions of a polynomial on a point set.
    Check {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        points: PathBuf,
        /// Per-coordinate size; defaults to the box's.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConstructCommand {
    /// Characteristic vectors of the s-subsets of [n].
    Charvec {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The whole box.
    FullBox {
        #[arg(long = "box")]
        box_path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct JconstArgs {
    #[arg(long, required_unless_present = "limit")]
    t: Option<u32>,
    #[arg(long, required_unless_present = "limit")]
    d: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// The limit of J(q, 3) as q grows.
    #[arg(long, conflicts_with_all = ["t", "d"])]
    limit: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure kinds, mapped to exit codes 1 and 2.
enum Failure {
    Usage(String),
    Inconsistent(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Search(a) => cmd_search(a),
        Command::Probe(a) => cmd_probe(a),
        Command::Witness(w) => cmd_witness(w),
        Command::Construct(c) => cmd_construct(c),
        Command::Jconst(a) => cmd_jconst(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Inconsistent(msg)) => {
            eprintln!("inconsistent: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: Option<&PathBuf>, value: &Value) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// A box file, or the box of a point-set file.
fn read_box(path: &Path) -> Result<CoordBox, Failure> {
    let value: Value = read_json(path)?;
    let parsed = if value.get("points").is_some() {
        serde_json::from_value::<PointSet>(value).map(|p| p.bounding_box().clone())
    } else {
        serde_json::from_value::<CoordBox>(value)
    };
    parsed.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Parses `1,3-5` into `[1, 3, 4, 5]`; the empty string gives no values.
fn parse_list(text: &str) -> Result<Vec<u64>, Failure> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let bad = || Failure::Usage(format!("bad value or range: {item:?}"));
        match item.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn cmd_bounds(a: BoundsArgs) -> CmdResult {
    let (ns, qs, ss) = (parse_list(&a.n)?, parse_list(&a.q)?, parse_list(&a.s)?);
    let manifest = RunManifest::new("bounds")
        .param("n", &a.n)
        .param("q", &a.q)
        .param("s", &a.s)
        .param("tol", a.tol)
        .output(a.out.as_ref());
    let registry = BoundRegistry::default();
    let names = registry.names();
    let mut rows = Vec::new();
    for &n in &ns {
        for &q in &qs {
            for &s in &ss {
                let cells = registry.evaluate_all(&BoundParams::new(n, q, s).with_tol(a.tol));
                rows.push(((n, q, s), cells));
            }
        }
    }
    match a.format {
        Format::Csv => {
            let mut text = format!("# manifest: {}\n", serde_json::to_string(&manifest)?);
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["n".to_string(), "q".into(), "s".into()];
            header.extend(names.iter().map(|s| s.to_string()));
            w.write_record(&header)?;
            for ((n, q, s), cells) in &rows {
                let mut rec = vec![n.to_string(), q.to_string(), s.to_string()];
                rec.extend(cells.iter().map(|(_, v)| match v {
                    Ok(v) => v.to_cell(),
                    Err(e) => format!("error: {e}"),
                }));
                w.write_record(&rec)?;
            }
            text.push_str(&String::from_utf8(w.into_inner().map_err(|e| e.to_string())?)?);
            emit(a.out.as_ref(), &text)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|((n, q, s), cells)| {
                    let mut bounds = Map::new();
                    for (name, v) in cells {
                        let cell = match v {
                            Ok(BoundValue::Integer(x)) => json!({ "value": x.to_string() }),
                            Ok(BoundValue::Interval(iv)) => json!({ "value_lo": iv.lo, "value_hi": iv.hi }),
                            Err(e) => json!({ "error": e.to_string() }),
                        };
                        bounds.insert(name.to_string(), cell);
                    }
                    json!({ "n": n, "q": q, "s": s, "bounds": bounds })
                })
                .collect();
            emit_json(a.out.as_ref(), &manifest.wrap(json!({ "rows": rows })))
        }
    }
}

fn cmd_search(a: SearchArgs) -> CmdResult {
    let bx = read_box(&a.box_path)?;
    let manifest = a
        .opts
        .record(RunManifest::new("search"))
        .param("s", a.s)
        .input(&a.box_path)
        .output(a.out.as_ref());
    let r = search_max(&bx, a.s, &a.opts.config())?;
    emit_json(a.out.as_ref(), &manifest.wrap(&r))?;
    let cap = main_theorem_bound(bx.dim() as u64, bx.q() as u64, a.s as u64)?;
    if cap < r.best_size.into() {
        return Err(Failure::Inconsistent(format!("found {} points, above the proven bound {cap}", r.best_size)));
    }
    Ok(())
}

fn cmd_probe(a: ProbeArgs) -> CmdResult {
    let bx = match &a.box_path {
        Some(p) => read_box(p)?,
        None => CoordBox::grid(a.n, a.q)?,
    };
    let mut manifest = a
        .opts
        .record(RunManifest::new("probe"))
        .param("n", a.n)
        .param("q", a.q)
        .param("s", a.s)
        .output(a.out.as_ref());
    if let Some(p) = &a.box_path {
        manifest = manifest.input(p);
    }
    let report = conjecture_probe(a.n, a.q, a.s, &bx, &a.opts.config())?;
    emit_json(a.out.as_ref(), &manifest.wrap(&report))?;
    if !report.theorem_consistent {
        return Err(Failure::Inconsistent(format!(
            "best {} exceeds the proven bound {}",
            report.best_size, report.main_theorem_bound
        )));
    }
    Ok(())
}

fn parse_palette(text: &str) -> Result<SquaredDistancePalette, Failure> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Scalar>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SquaredDistancePalette::from_values(values)?)
}

fn cmd_witness(w: WitnessCommand) -> CmdResult {
    match w {
        WitnessCommand::Build { points, palette, out } => {
            let set: PointSet = read_json(&points)?;
            let pal = match &palette {
                Some(text) => parse_palette(text)?,
                None => distance_palette(&set)?,
            };
            let p = build_distance_polynomial(set.dim(), &pal)?;
            let manifest = RunManifest::new("witness build")
                .param("palette", &pal)
                .input(&points)
                .output(out.as_ref());
            emit_json(out.as_ref(), &manifest.wrap(&p))
        }
        WitnessCommand::Check { poly, points, t, out } => {
            let p: MultiPoly = read_json(&poly)?;
            let set: PointSet = read_json(&points)?;
            let t = t.unwrap_or_else(|| set.bounding_box().q());
            let r = verify_witness(&p, &set, t)?;
            let manifest = RunManifest::new("witness check")
                .param("t", t)
                .input(&poly)
                .input(&points)
                .output(out.as_ref());
            emit_json(out.as_ref(), &manifest.wrap(&r))
        }
    }
}

fn cmd_construct(c: ConstructCommand) -> CmdResult {
    let (report, manifest, out) = match c {
        ConstructCommand::Charvec { n, s, out } => {
            let m = RunManifest::new("construct charvec").param("n", n).param("s", s).output(out.as_ref());
            (characteristic_vector_set(n, s)?, m, out)
        }
        ConstructCommand::FullBox { box_path, out } => {
            let bx = read_box(&box_path)?;
            let m = RunManifest::new("construct full-box").input(&box_path).output(out.as_ref());
            (full_box_report(&bx)?, m, out)
        }
    };
    // the point set's own fields sit at top level so the file reads as a point set
    let mut value = serde_json::to_value(&report.points)?;
    let obj = value.as_object_mut().expect("point set is an object");
    obj.insert("claimed_size".into(), Value::String(report.claimed_size.to_string()));
    obj.insert("palette".into(), serde_json::to_value(&report.palette)?);
    obj.insert("s_achieved".into(), json!(report.s_achieved));
    emit_json(out.as_ref(), &manifest.wrap(value))
}

fn cmd_jconst(a: JconstArgs) -> CmdResult {
    let manifest = RunManifest::new("jconst").output(a.out.as_ref());
    if a.limit {
        let iv = j_limit_d3()?;
        return emit_json(a.out.as_ref(), &manifest.param("limit", true).wrap(iv));
    }
    let (t, d) = (a.t.expect("required"), a.d.expect("required"));
    let v = compute_j(JParams::new(t, d)?, a.tol)?;
    let manifest = manifest.param("t", t).param("d", d).param("tol", a.tol);
    emit_json(a.out.as_ref(), &manifest.wrap(v))
}
