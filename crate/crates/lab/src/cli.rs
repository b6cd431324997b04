//! The `trapmode` command line.
//!
//! Exit codes: 0 success, 1 usage or invalid input, 2 numerical or I/O
//! failure. `--config FILE` reads a JSON object whose keys are long flag names
//! of the chosen subcommand (arrays repeat a flag, `true` sets a switch);
//! flags given on the command line take precedence.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};
use trapmode_core::ellipse::{ellipse_mode_frequency, EllipseMode};
use trapmode_core::geometry::{CavitySpec, DomainSpec};
use trapmode_core::lab::{
    box_count, multiplicity_in_window, quasimode_quality, theorem1_check, BoxSpec, CutoffSpec, Discretization,
    MeshPolicy, SpectrumOptions, Truncation,
};
use trapmode_core::linalg::DEFAULT_SEED;
use trapmode_core::specfun::Parity;
use trapmode_core::Error;

use crate::formats::{
    to_json, trajectory_rows, write_field_csv, write_matrix_coo, write_spectra_csv, BoxCountDoc, GeometryDoc, ModeEntry,
    ModesDoc, QuasimodeDoc, QuasimodeEntry, SpectrumRow, TheoremDoc, FORMAT_VERSION,
};
use crate::meshio::write_mesh;
use crate::runner::{sample_field, spectrum, sweep_parallel};
use crate::solver::SparseLuFactorizer;

#[derive(Debug, Parser)]
#[command(name = "trapmode", version, about = "Near-zero eigenvalues of truncated exterior Helmholtz problems around trapping cavities")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// JSON file with default flag values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Eigensolver start-vector seed (hexadecimal).
    #[arg(long, global = true, value_parser = parse_hex)]
    pub seed: Option<u64>,
    /// Progress messages on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dirichlet ellipse mode frequencies → modes.json.
    Modes(ModesArgs),
    /// Near-origin eigenvalues at one frequency → spectra.csv.
    Spectrum(SpectrumArgs),
    /// Frequency sweep with trajectories and box count → spectra.csv, boxcount.json.
    Sweep(SweepArgs),
    /// Sampled |u| of one eigenfunction → field.csv.
    Eigenfunction(EigenfunctionArgs),
    /// Quasimode quality and window multiplicity → quasimode.json.
    Quasimode(QuasimodeArgs),
    /// Single-frequency check of |μ_min| ≤ k^α ε(k) → theorem.json.
    #[command(name = "check-theorem1")]
    CheckTheorem1(TheoremArgs),
    /// Writes the mesh (HTMESH) and geometry.json.
    #[command(name = "mesh-export")]
    MeshExport(MeshExportArgs),
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    #[arg(long)]
    pub a1: f64,
    #[arg(long)]
    pub a2: f64,
    /// `parity:m:n`, e.g. `e:1:0`; repeatable. Defaults to the four cavity modes.
    #[arg(long = "mode")]
    pub modes: Vec<String>,
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    /// `small` or `large`.
    #[arg(long)]
    pub cavity: String,
    /// Truncation radius.
    #[arg(long = "R", alias = "radius")]
    pub radius: Option<f64>,
    /// Cavity element size; defaults to the desk rule for the frequency.
    #[arg(long)]
    pub h: Option<f64>,
    /// `bem`, `fourier` or `dirichlet` (control).
    #[arg(long, default_value = "bem")]
    pub backend: String,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long)]
    pub k: f64,
    #[arg(long, default_value_t = 10)]
    pub nev: usize,
    /// Also dump the pencil matrix Ã as `row col re im`.
    #[arg(long)]
    pub export_matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value_t = 2.5)]
    pub kmin: f64,
    #[arg(long, default_value_t = 12.5)]
    pub kmax: f64,
    #[arg(long, default_value_t = 0.025)]
    pub step: f64,
    #[arg(long, default_value_t = 6)]
    pub nev: usize,
    /// `eps1,eps0`.
    #[arg(long = "box", default_value = "0.2,0.05")]
    pub box_spec: String,
}

#[derive(Debug, Args)]
pub struct EigenfunctionArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long)]
    pub k: f64,
    /// Position in the |μ|-sorted spectrum.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long, default_value_t = 201)]
    pub nx: usize,
    #[arg(long, default_value_t = 201)]
    pub ny: usize,
}

#[derive(Debug, Args)]
pub struct QuasimodeArgs {
    #[arg(long)]
    pub cavity: String,
    /// Repeatable; defaults to `e:1:0`, `e:2:0`, `e:3:0`.
    #[arg(long = "mode")]
    pub modes: Vec<String>,
    /// `default`, `adapted`, or `core,edge` in the elliptic angle.
    #[arg(long, default_value = "default")]
    pub cutoff: String,
    /// `k_minus,k_plus` for the multiplicity count.
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Debug, Args)]
pub struct TheoremArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value = "e:1:0")]
    pub mode: String,
    #[arg(long, default_value_t = 4.6)]
    pub alpha: f64,
    /// Frequency of the check; defaults to the mode frequency.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value = "default")]
    pub cutoff: String,
    #[arg(long, default_value_t = 4)]
    pub nev: usize,
}

#[derive(Debug, Args)]
pub struct MeshExportArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Frequency for the desk size rule (ignored with --h).
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value = "mesh.htmesh")]
    pub file: String,
}

fn parse_hex(s: &str) -> Result<u64, String> {
    let t = s.trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(t, 16).map_err(|e| format!("{s:?} is not hexadecimal: {e}"))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        usage(format!("--{name} must be positive, got {x}"))
    }
}

/// `parity:m:n`.
pub fn parse_mode(s: &str) -> CliResult<(Parity, u32, u32)> {
    let parts: Vec<&str> = s.split(':').collect();
    let parsed = (|| {
        let [p, m, n] = parts.as_slice() else { return None };
        let mut pc = p.chars();
        let parity = Parity::from_char(pc.next()?)?;
        if pc.next().is_some() {
            return None;
        }
        Some((parity, m.parse().ok()?, n.parse().ok()?))
    })();
    parsed.map_or_else(|| usage(format!("mode {s:?} is not of the form e:m:n or o:m:n")), Ok)
}

fn parse_pair(name: &str, s: &str) -> CliResult<(f64, f64)> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| CliError::Usage(format!("--{name} {s:?}: expected two numbers a,b")))?;
    match v.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => usage(format!("--{name} {s:?}: expected two numbers a,b")),
    }
}

fn cavity_spec(name: &str) -> CliResult<CavitySpec> {
    CavitySpec::by_name(name).map_or_else(|| usage(format!("unknown cavity {name:?} (expected small or large)")), Ok)
}

fn truncation(name: &str) -> CliResult<Truncation> {
    Truncation::by_name(name).map_or_else(|| usage(format!("unknown backend {name:?} (expected bem, fourier or dirichlet)")), Ok)
}

struct Ctx {
    out: PathBuf,
    jobs: usize,
    seed: u64,
    verbose: u8,
}

impl Ctx {
    fn log(&self, level: u8, msg: impl FnOnce() -> String) {
        if self.verbose >= level {
            eprintln!("{}", msg());
        }
    }

    fn write(&self, name: impl AsRef<Path>, contents: &[u8]) -> CliResult<PathBuf> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::Io(format!("{}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.log(1, || format!("wrote {}", path.display()));
        Ok(path)
    }

    fn spectrum_opts(&self, nev: usize) -> CliResult<SpectrumOptions> {
        if nev == 0 {
            return usage("--nev must be at least 1");
        }
        let mut o = SpectrumOptions::new(nev);
        o.seed = self.seed;
        Ok(o)
    }
}

struct Setup {
    cavity: CavitySpec,
    domain: DomainSpec,
    policy: MeshPolicy,
    truncation: Truncation,
}

fn setup(d: &DomainArgs, k_for_rule: f64, default_radius: f64) -> CliResult<Setup> {
    let cavity = cavity_spec(&d.cavity)?;
    let truncation = truncation(&d.backend)?;
    let radius = positive("R", d.radius.unwrap_or(default_radius))?;
    let domain = DomainSpec::cavity(cavity, radius).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut policy = MeshPolicy::desk(positive("k", k_for_rule)?)?;
    if let Some(h) = d.h {
        let h = positive("h", h)?;
        if let MeshPolicy::Graded { cavity, outer, .. } = &mut policy {
            *cavity = h;
            *outer = outer.max(h);
        }
    }
    Ok(Setup { cavity, domain, policy, truncation })
}

fn discretize(ctx: &Ctx, s: &Setup) -> CliResult<Discretization> {
    let t = std::time::Instant::now();
    let disc = Discretization::build(&s.domain, s.policy)?;
    ctx.log(1, || {
        format!(
            "mesh: {} nodes, {} FEM dofs, {} boundary dofs, h_cavity {:.5} ({:.2?})",
            disc.mesh.nodes.len(),
            disc.n_fem(),
            disc.space.len(),
            s.policy.h_min(),
            t.elapsed()
        )
    });
    Ok(disc)
}

fn mode_of(spec: &str, a1: f64, a2: f64) -> CliResult<EllipseMode> {
    let (p, m, n) = parse_mode(spec)?;
    if p == Parity::Odd && n == 0 {
        return usage(format!("mode {spec:?}: odd modes start at n = 1"));
    }
    Ok(ellipse_mode_frequency(m, n, p, a1, a2)?)
}

fn cutoff_for(spec: &str, cavity: &CavitySpec, mode: &EllipseMode) -> CliResult<(CutoffSpec, String)> {
    Ok(match spec {
        "default" => (CutoffSpec::for_cavity(cavity)?, "default".into()),
        "adapted" => (CutoffSpec::adapted(mode)?, "adapted".into()),
        other => {
            let (core, edge) = parse_pair("cutoff", other)?;
            (CutoffSpec::new(core, edge).map_err(|e| CliError::Usage(e.to_string()))?, "explicit".into())
        }
    })
}

const CAVITY_MODES: [&str; 4] = ["o:0:3", "e:1:0", "e:3:0", "o:2:4"];

fn cmd_modes(ctx: &Ctx, a: &ModesArgs) -> CliResult<()> {
    let (a1, a2) = (positive("a1", a.a1)?, positive("a2", a.a2)?);
    if a2 >= a1 {
        return usage("--a1 must exceed --a2");
    }
    let list: Vec<String> = if a.modes.is_empty() { CAVITY_MODES.iter().map(|s| s.to_string()).collect() } else { a.modes.clone() };
    let parsed: Vec<_> = list.iter().map(|s| parse_mode(s)).collect::<CliResult<_>>()?;
    let mut modes = Vec::new();
    for (s, _) in list.iter().zip(&parsed) {
        let mode = mode_of(s, a1, a2)?;
        ctx.log(1, || format!("{} k = {:.15}", mode.label(), mode.k));
        modes.push(ModeEntry::from(&mode));
    }
    let doc = ModesDoc { format: FORMAT_VERSION, a1, a2, modes };
    ctx.write("modes.json", to_json(&doc).as_bytes())?;
    Ok(())
}

fn cmd_spectrum(ctx: &Ctx, a: &SpectrumArgs) -> CliResult<()> {
    let k = positive("k", a.k)?;
    let opts = ctx.spectrum_opts(a.nev)?;
    let s = setup(&a.domain, k, 2.0)?;
    let disc = discretize(ctx, &s)?;
    if let Some(path) = &a.export_matrix {
        let sys = disc.coupled(k, s.truncation)?;
        let mut buf = Vec::new();
        write_matrix_coo(&mut buf, &sys.a).map_err(|e| CliError::Io(e.to_string()))?;
        fs::write(path, buf).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let recs = spectrum(&disc, k, s.truncation, &opts)?;
    let rows: Vec<SpectrumRow> =
        recs.iter().enumerate().map(|(i, r)| SpectrumRow { k, mu: r.mu, residual: r.residual, track_id: i }).collect();
    for r in &rows {
        ctx.log(1, || format!("μ = {:+.6e} {:+.6e}i  residual {:.1e}", r.mu.re, r.mu.im, r.residual));
    }
    let mut buf = Vec::new();
    write_spectra_csv(&mut buf, &rows).map_err(|e| CliError::Io(e.to_string()))?;
    ctx.write("spectra.csv", &buf)?;
    Ok(())
}

fn cmd_sweep(ctx: &Ctx, a: &SweepArgs) -> CliResult<()> {
    let kmin = positive("kmin", a.kmin)?;
    let kmax = positive("kmax", a.kmax)?;
    let step = positive("step", a.step)?;
    if kmax < kmin {
        return usage("--kmax must not be below --kmin");
    }
    let (eps1, eps0) = parse_pair("box", &a.box_spec)?;
    let bx = BoxSpec::new(positive("box eps1", eps1)?, positive("box eps0", eps0)?, kmin, kmax)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let opts = ctx.spectrum_opts(a.nev)?;
    let s = setup(&a.domain, kmax, 1.5)?;
    let disc = discretize(ctx, &s)?;
    let progress = |k: f64, r: &trapmode_core::Result<Vec<trapmode_core::lab::EigenRecord>>| match r {
        Ok(v) => ctx.log(2, || format!("k = {k:.4}: {} eigenvalues", v.len())),
        Err(e) => ctx.log(1, || format!("k = {k:.4}: solve failed ({e}); marked missing")),
    };
    let traj = sweep_parallel(&disc, kmin, kmax, step, s.truncation, &opts, ctx.jobs, &progress)?;
    let members = trapmode_core::lab::box_members(&traj, &bx);
    let count = box_count(&traj, &bx);
    ctx.log(1, || format!("{} solves, {} tracks, box count {count}", traj.k_grid.len(), traj.tracks.len()));
    let mut buf = Vec::new();
    write_spectra_csv(&mut buf, &trajectory_rows(&traj)).map_err(|e| CliError::Io(e.to_string()))?;
    ctx.write("spectra.csv", &buf)?;
    let doc = BoxCountDoc {
        format: FORMAT_VERSION,
        cavity: s.cavity.kind.name().into(),
        radius: s.domain.truncation_radius,
        backend: s.truncation.name().into(),
        eps1,
        eps0,
        k_minus: kmin,
        k_plus: kmax,
        step,
        solves: traj.k_grid.len(),
        h_cavity: s.policy.h_min(),
        count,
        members,
        missing: traj.missing.clone(),
        bridged_tracks: traj.tracks.iter().filter(|t| t.bridged).map(|t| t.id).collect(),
    };
    ctx.write("boxcount.json", to_json(&doc).as_bytes())?;
    Ok(())
}

fn cmd_eigenfunction(ctx: &Ctx, a: &EigenfunctionArgs) -> CliResult<()> {
    let k = positive("k", a.k)?;
    let opts = ctx.spectrum_opts(a.index + 1)?;
    let s = setup(&a.domain, k, 2.0)?;
    let disc = discretize(ctx, &s)?;
    if a.index + 1 >= disc.n_fem() {
        return usage(format!("--index {} out of range for {} unknowns", a.index, disc.n_fem()));
    }
    let recs = spectrum(&disc, k, s.truncation, &opts)?;
    let Some(rec) = recs.get(a.index) else {
        return usage(format!("--index {} out of range: {} eigenvalues computed", a.index, recs.len()));
    };
    ctx.log(1, || format!("μ = {:+.6e} {:+.6e}i", rec.mu.re, rec.mu.im));
    let field = sample_field(&disc, &rec.u, a.nx, a.ny)?;
    let mut buf = Vec::new();
    write_field_csv(&mut buf, &field).map_err(|e| CliError::Io(e.to_string()))?;
    ctx.write("field.csv", &buf)?;
    Ok(())
}

fn cmd_quasimode(ctx: &Ctx, a: &QuasimodeArgs) -> CliResult<()> {
    let cavity = cavity_spec(&a.cavity)?;
    let list: Vec<String> =
        if a.modes.is_empty() { ["e:1:0", "e:2:0", "e:3:0"].iter().map(|s| s.to_string()).collect() } else { a.modes.clone() };
    let window = a.window.as_deref().map(|w| parse_pair("window", w)).transpose()?;
    let (a1, a2) = cavity.inner_axes;
    let mut reports = Vec::new();
    let mut entries = Vec::new();
    for s in &list {
        let mode = mode_of(s, a1, a2)?;
        let (cut, kind) = cutoff_for(&a.cutoff, &cavity, &mode)?;
        let r = quasimode_quality(&mode, &cavity, &cut)?;
        ctx.log(1, || format!("{} k = {:.6}: eps = {:.4e}, support_ok = {}", r.label(), r.k(), r.eps, r.support_ok));
        entries.push(QuasimodeEntry::new(&r, &kind));
        reports.push(r);
    }
    let multiplicity = match window {
        Some(w) => {
            if a.cutoff == "adapted" {
                return usage("--window needs a cut-off shared by all modes (default or core,edge)");
            }
            Some((&multiplicity_in_window(&reports, w).map_err(|e| CliError::Usage(e.to_string()))?).into())
        }
        None => None,
    };
    let doc = QuasimodeDoc { format: FORMAT_VERSION, cavity: cavity.kind.name().into(), reports: entries, multiplicity };
    ctx.write("quasimode.json", to_json(&doc).as_bytes())?;
    Ok(())
}

fn cmd_theorem(ctx: &Ctx, a: &TheoremArgs) -> CliResult<()> {
    if !(a.alpha > trapmode_core::lab::ALPHA_MIN) {
        return usage(format!("--alpha must exceed {}", trapmode_core::lab::ALPHA_MIN));
    }
    let cavity = cavity_spec(&a.domain.cavity)?;
    let mode = mode_of(&a.mode, cavity.inner_axes.0, cavity.inner_axes.1)?;
    let k = positive("k", a.k.unwrap_or(mode.k))?;
    let opts = ctx.spectrum_opts(a.nev)?;
    let s = setup(&a.domain, k, 2.0)?;
    let (cut, _) = cutoff_for(&a.cutoff, &cavity, &mode)?;
    let disc = discretize(ctx, &s)?;
    let check =
        theorem1_check(&disc, &cavity, &mode, k, a.alpha, &cut, s.truncation, &opts, s.policy.h_min(), &SparseLuFactorizer)?;
    let doc = TheoremDoc::new(cavity.kind.name(), &mode.label(), &check);
    ctx.log(1, || format!("outcome {}: |μ_min| = {:?}, k^α ε = {:?}, budget = {:?}", doc.outcome, doc.mu_min, doc.bound, doc.budget));
    ctx.write("theorem.json", to_json(&doc).as_bytes())?;
    Ok(())
}

fn cmd_mesh_export(ctx: &Ctx, a: &MeshExportArgs) -> CliResult<()> {
    let k = match (a.k, a.domain.h) {
        (Some(k), _) => k,
        (None, Some(_)) => 1.0,
        (None, None) => return usage("mesh-export needs --k or --h"),
    };
    let s = setup(&a.domain, k, 2.0)?;
    let mesh = trapmode_core::lab::lab_mesh(&s.domain, s.policy)?;
    ctx.write(&a.file, write_mesh(&mesh).as_bytes())?;
    if let Some(g) = GeometryDoc::from_domain(&s.domain) {
        ctx.write("geometry.json", to_json(&g).as_bytes())?;
    }
    Ok(())
}

/// Splices `--config` values into the argument list right after the
/// subcommand name, so explicit flags (which come later) override them.
fn apply_config(args: Vec<String>) -> CliResult<Vec<String>> {
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(args) };
    let path = if let Some(v) = args[pos].strip_prefix("--config=") {
        v.to_string()
    } else {
        args.get(pos + 1).cloned().ok_or_else(|| CliError::Usage("--config needs a file".into()))?
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let json: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let obj = json.as_object().ok_or_else(|| CliError::Usage(format!("config {path}: expected a JSON object")))?;
    let cmd = Cli::command();
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    let Some(sub) = args.iter().skip(1).position(|a| names.contains(a)).map(|i| i + 1) else {
        return Ok(args);
    };
    let mut extra = Vec::new();
    for (key, v) in obj {
        if key == "config" {
            continue;
        }
        let flag = format!("--{key}");
        let scalar = |v: &serde_json::Value| -> CliResult<String> {
            match v {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(n) => Ok(n.to_string()),
                _ => usage(format!("config key {key:?}: unsupported value {v}")),
            }
        };
        match v {
            serde_json::Value::Bool(true) => extra.push(flag),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::Array(items) => {
                // a repeated flag given explicitly replaces the config list
                if args.iter().any(|a| a == &flag) {
                    continue;
                }
                for it in items {
                    extra.push(flag.clone());
                    extra.push(scalar(it)?);
                }
            }
            other => {
                extra.push(flag);
                extra.push(scalar(other)?);
            }
        }
    }
    let mut out = args[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

/// Runs the command line and returns the process exit code.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let args: Vec<String> = args.into_iter().collect();
    let args = match apply_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    if cli.jobs == 0 {
        return usage("--jobs must be at least 1");
    }
    let ctx = Ctx { out: cli.out.clone(), jobs: cli.jobs, seed: cli.seed.unwrap_or(DEFAULT_SEED), verbose: cli.verbose };
    match &cli.command {
        Command::Modes(a) => cmd_modes(&ctx, a),
        Command::Spectrum(a) => cmd_spectrum(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Eigenfunction(a) => cmd_eigenfunction(&ctx, a),
        Command::Quasimode(a) => cmd_quasimode(&ctx, a),
        Command::CheckTheorem1(a) => cmd_theorem(&ctx, a),
        Command::MeshExport(a) => cmd_mesh_export(&ctx, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_strings() {
        assert_eq!(parse_mode("e:1:0").unwrap(), (Parity::Even, 1, 0));
        assert_eq!(parse_mode("o:2:4").unwrap(), (Parity::Odd, 2, 4));
        assert!(parse_mode("x:1:0").is_err());
        assert!(parse_mode("e:1").is_err());
        assert!(parse_mode("ee:1:0").is_err());
    }

    #[test]
    fn hex_seed() {
        assert_eq!(parse_hex("5EED").unwrap(), 0x5EED);
        assert_eq!(parse_hex("0x1f").unwrap(), 0x1f);
        assert!(parse_hex("zz").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
