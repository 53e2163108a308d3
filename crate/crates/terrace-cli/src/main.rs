//! Command-line driver: validate reaction specs, compute trajectories,
//! critical speeds, terraces and profiles, run the finite-difference
//! simulator, and cross-check the two against each other.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use terrace_core::io;
use terrace_core::pde::{self, Boundary, InitialCondition, PdeConfig};
use terrace_core::phase_plane;
use terrace_core::profile::TerraceFunction;
use terrace_core::speed;
use terrace_core::terrace::{build_terrace, Terrace};
use terrace_core::{Reaction64, Tolerances64};

mod config;

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "terrace",
    version,
    about = "Propagating terraces for reaction-diffusion equations with discontinuous multistable reactions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Reaction spec document (JSON)
    #[arg(long)]
    reaction: Option<PathBuf>,

    /// JSON config bundle (reaction + pde + tolerance blocks); flags override
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for JSON descriptors and CSV dumps
    #[arg(long)]
    out: Option<PathBuf>,

    /// Trajectory integrator tolerance
    #[arg(long)]
    tol_ode: Option<f64>,

    /// Speed bisection tolerance
    #[arg(long)]
    tol_c: Option<f64>,

    /// Platform snap tolerance
    #[arg(long)]
    tol_snap: Option<f64>,

    /// Profile residual tolerance
    #[arg(long)]
    tol_profile: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct PdeArgs {
    /// Grid spacing
    #[arg(long)]
    dx: Option<f64>,

    /// Time step (defaults to the CFL-limited value)
    #[arg(long)]
    dt: Option<f64>,

    /// Final time
    #[arg(long)]
    t_final: Option<f64>,

    /// Domain bounds
    #[arg(long, num_args = 2, value_names = ["XMIN", "XMAX"])]
    domain: Option<Vec<f64>>,

    /// Explicit-stability safety factor in (0, 1]
    #[arg(long)]
    cfl_safety: Option<f64>,

    /// Initial condition: step | step:LOCATION | terrace | table:PATH
    #[arg(long)]
    ic: Option<String>,

    /// Gap between consecutive profile supports
    #[arg(long)]
    gap: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a reaction spec and print its certified summary
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Integrate one phase-plane trajectory
    Trajectory {
        #[command(flatten)]
        common: Common,
        /// Starting platform (a stable steady state)
        #[arg(long)]
        p_u: f64,
        /// Wave speed
        #[arg(long)]
        c: f64,
    },
    /// Bracket and bisect the critical speed from a platform
    Speed {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p_u: f64,
    },
    /// Assemble the full terrace from 1 to 0
    Terrace {
        #[command(flatten)]
        common: Common,
    },
    /// Terrace plus reconstructed profiles and a terrace-function snapshot
    Profile {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pde: PdeArgs,
    },
    /// Run the finite-difference simulator
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pde: PdeArgs,
        /// Levels whose crossing positions are tracked over time
        #[arg(long)]
        track: Vec<f64>,
    },
    /// Full cross-check: terrace, profiles, simulation from the terrace
    /// snapshot, residual and per-front speed deltas
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pde: PdeArgs,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TERRACE_LOG", "error"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Domain(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

enum RunError {
    /// bad invocation or unreadable input: exit 2
    Usage(String),
    /// the solvers rejected the problem: exit 1, module error verbatim
    Domain(String),
}

impl From<io::IoError> for RunError {
    fn from(e: io::IoError) -> Self {
        RunError::Domain(e.to_string())
    }
}

macro_rules! domain {
    ($e:expr) => {
        $e.map_err(|err| RunError::Domain(err.to_string()))
    };
}

struct Setup {
    spec: Reaction64,
    tols: Tolerances64,
    out: Option<PathBuf>,
    file: FileConfig,
}

fn load_setup(common: &Common) -> Result<Setup, RunError> {
    let file = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))?;
            config::parse(&text).map_err(|e| RunError::Domain(format!("config: {e}")))?
        }
        None => FileConfig::default(),
    };
    let reaction_path = common
        .reaction
        .clone()
        .or_else(|| file.reaction.as_ref().map(PathBuf::from))
        .ok_or_else(|| RunError::Usage("--reaction (or a config with one) is required".into()))?;
    let text = fs::read_to_string(&reaction_path).map_err(|e| {
        RunError::Usage(format!("cannot read {}: {e}", reaction_path.display()))
    })?;
    let spec = io::parse_reaction(&text)?;
    let mut tols = Tolerances64::default();
    if let Some(t) = &file.tolerances {
        tols.ode = t.tol_ode.unwrap_or(tols.ode);
        tols.speed = t.tol_c.unwrap_or(tols.speed);
        tols.snap = t.tol_snap.unwrap_or(tols.snap);
        tols.profile = t.tol_profile.unwrap_or(tols.profile);
    }
    tols.ode = common.tol_ode.unwrap_or(tols.ode);
    tols.speed = common.tol_c.unwrap_or(tols.speed);
    tols.snap = common.tol_snap.unwrap_or(tols.snap);
    tols.profile = common.tol_profile.unwrap_or(tols.profile);
    if !(tols.ode > 0.0 && tols.speed > 0.0 && tols.snap > 0.0 && tols.profile > 0.0) {
        return Err(RunError::Usage("tolerances must be positive".into()));
    }
    Ok(Setup {
        spec,
        tols,
        out: common.out.clone(),
        file,
    })
}

fn write_out(out: &Option<PathBuf>, name: &str, contents: &str) -> Result<(), RunError> {
    if let Some(dir) = out {
        fs::create_dir_all(dir)
            .map_err(|e| RunError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| RunError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn g17(x: f64) -> String {
    io::fmt_g17(x)
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Validate { common } => {
            let setup = load_setup(&common)?;
            let (stable, unstable) = setup.spec.classify_states();
            println!(
                "valid reaction: I = {}, sup_norm = {}, stable {:?}, unstable {:?}",
                setup.spec.index_count(),
                g17(setup.spec.sup_norm()),
                stable,
                unstable
            );
            write_out(&setup.out, "reaction.canonical.json", &io::write_reaction(&setup.spec))
        }
        Command::Trajectory { common, p_u, c } => {
            let setup = load_setup(&common)?;
            let t = domain!(phase_plane::solve_trajectory(&setup.spec, p_u, c, setup.tols.ode))?;
            println!(
                "trajectory from {p_u} at c = {c}: {:?}, p_l = {}, q(p_l) = {}",
                t.termination,
                g17(t.lower),
                g17(t.q_at_lower)
            );
            write_out(&setup.out, "trajectory.csv", &io::trajectory_csv(&t))
        }
        Command::Speed { common, p_u } => {
            let setup = load_setup(&common)?;
            let cs = domain!(speed::find_critical_speed(&setup.spec, p_u, &setup.tols))?;
            println!(
                "c* = {} +- {}, platform {}",
                g17(cs.c_star),
                g17(cs.half_width.max(setup.tols.speed)),
                g17(cs.platform)
            );
            let json = format!(
                "{{\n  \"p_u\": {},\n  \"c_star\": {},\n  \"half_width\": {},\n  \"platform\": {}\n}}\n",
                g17(p_u),
                g17(cs.c_star),
                g17(cs.half_width),
                g17(cs.platform)
            );
            write_out(&setup.out, "speed.json", &json)?;
            write_out(
                &setup.out,
                "trajectory_cstar.csv",
                &io::trajectory_csv(&cs.trajectory),
            )
        }
        Command::Terrace { common } => {
            let setup = load_setup(&common)?;
            let terrace = domain!(build_terrace(&setup.spec, &setup.tols))?;
            emit_terrace(&setup, &terrace, 1001, 1.0)?;
            Ok(())
        }
        Command::Profile { common, pde } => {
            let setup = load_setup(&common)?;
            let terrace = domain!(build_terrace(&setup.spec, &setup.tols))?;
            let gap = pde_f64(&pde.gap, &setup.file.pde_gap(), 1.0);
            let tf = emit_terrace(&setup, &terrace, 2001, gap)?;
            // terrace-function snapshot on a uniform grid over the supports
            let dx = pde_f64(&pde.dx, &setup.file.pde_dx(), 1e-2);
            let (lo, hi) = tf.support_bounds(0.0, 2.0);
            let n = ((hi - lo) / dx).ceil() as usize + 1;
            let xs: Vec<f64> = (0..n).map(|i| lo + dx * i as f64).collect();
            let us: Vec<f64> = xs.iter().map(|&x| tf.eval(0.0, x)).collect();
            write_out(&setup.out, "terrace_function.csv", &io::snapshot_csv(&xs, &us))?;
            Ok(())
        }
        Command::Simulate { common, pde, track } => {
            let setup = load_setup(&common)?;
            let config = build_pde_config(&setup, &pde, &track)?;
            let result = domain!(pde::simulate(&setup.spec, &config))?;
            println!(
                "simulated to t = {} in {} snapshots (dx = {}, dt = {})",
                g17(*result.times.last().unwrap()),
                result.times.len(),
                g17(result.dx),
                g17(result.dt)
            );
            write_out(
                &setup.out,
                "u_initial.csv",
                &io::snapshot_csv(&result.x, &result.snapshots[0]),
            )?;
            write_out(
                &setup.out,
                "u_final.csv",
                &io::snapshot_csv(&result.x, result.snapshots.last().unwrap()),
            )?;
            for (level, series) in &result.front_tracks {
                write_out(
                    &setup.out,
                    &format!("front_track_{level}.csv"),
                    &io::track_csv(series),
                )?;
            }
            Ok(())
        }
        Command::Verify { common, pde } => verify(&common, &pde),
    }
}

/// Shared output for `terrace` and `profile`: descriptor JSON plus per-front
/// trajectory and profile CSVs.
fn emit_terrace(
    setup: &Setup,
    terrace: &Terrace<f64>,
    n_samples: usize,
    gap: f64,
) -> Result<TerraceFunction<f64>, RunError> {
    let tf = domain!(TerraceFunction::from_terrace(
        &setup.spec,
        terrace,
        gap,
        n_samples
    ))?;
    let widths: Vec<f64> = tf.profiles.iter().map(|p| p.width).collect();
    let files: Vec<String> = (0..terrace.fronts.len())
        .map(|k| format!("profile_{k}.csv"))
        .collect();
    println!(
        "terrace with {} fronts: platforms {:?}, speeds {:?}",
        terrace.fronts.len(),
        terrace.platforms(),
        terrace.speeds()
    );
    write_out(
        &setup.out,
        "terrace.json",
        &io::terrace_json(terrace, &widths, &files),
    )?;
    for (k, f) in terrace.fronts.iter().enumerate() {
        write_out(
            &setup.out,
            &format!("trajectory_{k}.csv"),
            &io::trajectory_csv(&f.trajectory),
        )?;
        write_out(
            &setup.out,
            &files[k],
            &io::profile_csv(&tf.profiles[k]),
        )?;
    }
    Ok(tf)
}

fn pde_f64(flag: &Option<f64>, file: &Option<f64>, default: f64) -> f64 {
    flag.or(*file).unwrap_or(default)
}

fn build_pde_config(
    setup: &Setup,
    pde: &PdeArgs,
    track: &[f64],
) -> Result<PdeConfig<f64>, RunError> {
    let dx = pde_f64(&pde.dx, &setup.file.pde_dx(), 2e-3);
    let t_final = pde_f64(&pde.t_final, &setup.file.pde_t_final(), 2.0);
    let cfl = pde_f64(&pde.cfl_safety, &setup.file.pde_cfl(), 0.4);
    let gap = pde_f64(&pde.gap, &setup.file.pde_gap(), 1.0);
    let ic_text = pde
        .ic
        .clone()
        .or_else(|| setup.file.pde_ic())
        .unwrap_or_else(|| "step".to_string());
    let ic = parse_ic(setup, &ic_text, gap)?;
    let (x_min, x_max) = match (&pde.domain, setup.file.pde_domain()) {
        (Some(v), _) if v.len() == 2 => (v[0], v[1]),
        (_, Some((a, b))) => (a, b),
        _ => default_domain(&ic, t_final),
    };
    if x_max <= x_min {
        return Err(RunError::Usage("domain must satisfy XMIN < XMAX".into()));
    }
    let mut config = PdeConfig::new(x_min, x_max, dx, t_final, ic);
    config.cfl_safety = cfl;
    config.dt = pde.dt.or(setup.file.pde_dt());
    config.snapshot_dt = (t_final / 80.0).max(config.dt.unwrap_or(cfl * dx * dx / 2.0));
    config.track_levels = track.to_vec();
    config.boundary = Boundary::FromInitialCondition;
    Ok(config)
}

fn default_domain(ic: &InitialCondition<f64>, t_final: f64) -> (f64, f64) {
    match ic {
        InitialCondition::TerraceSnapshot(tf) => {
            let (lo, hi) = tf.support_bounds(t_final, 0.0);
            let pad = (0.15 * (hi - lo)).max(2.0);
            (lo - pad, hi + pad)
        }
        InitialCondition::Step { location, .. } => (location - 8.0, location + 8.0),
        InitialCondition::Table(rows) => {
            let lo = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        }
    }
}

fn parse_ic(setup: &Setup, text: &str, gap: f64) -> Result<InitialCondition<f64>, RunError> {
    if text == "step" {
        return Ok(InitialCondition::Step {
            location: 0.0,
            upper: 1.0,
            lower: 0.0,
        });
    }
    if let Some(loc) = text.strip_prefix("step:") {
        let location: f64 = loc
            .parse()
            .map_err(|e| RunError::Usage(format!("bad step location: {e}")))?;
        return Ok(InitialCondition::Step {
            location,
            upper: 1.0,
            lower: 0.0,
        });
    }
    if text == "terrace" {
        let terrace = domain!(build_terrace(&setup.spec, &setup.tols))?;
        let tf = domain!(TerraceFunction::from_terrace(&setup.spec, &terrace, gap, 2001))?;
        return Ok(InitialCondition::TerraceSnapshot(tf));
    }
    if let Some(path) = text.strip_prefix("table:") {
        let text = fs::read_to_string(Path::new(path))
            .map_err(|e| RunError::Usage(format!("cannot read {path}: {e}")))?;
        let rows = io::parse_xy_table(&text)?;
        return Ok(InitialCondition::Table(rows));
    }
    Err(RunError::Usage(format!(
        "unknown --ic {text:?}; expected step | step:LOC | terrace | table:PATH"
    )))
}

fn verify(common: &Common, pde_args: &PdeArgs) -> Result<(), RunError> {
    let setup = load_setup(common)?;
    let tols = setup.tols;
    let terrace = domain!(build_terrace(&setup.spec, &tols))?;
    let gap = pde_f64(&pde_args.gap, &setup.file.pde_gap(), 1.0);
    let tf = emit_terrace(&setup, &terrace, 2001, gap)?;

    let t_final = pde_f64(&pde_args.t_final, &setup.file.pde_t_final(), 2.0);
    let dx = pde_f64(&pde_args.dx, &setup.file.pde_dx(), 2e-3);
    let cfl = pde_f64(&pde_args.cfl_safety, &setup.file.pde_cfl(), 0.4);

    let (lo, hi) = tf.support_bounds(t_final, 0.0);
    let pad = (0.15 * (hi - lo)).max(2.0);
    let mut config = PdeConfig::new(lo - pad, hi + pad, dx, t_final, InitialCondition::TerraceSnapshot(tf.clone()));
    config.cfl_safety = cfl;
    config.snapshot_dt = t_final / 20.0;
    let result = domain!(pde::simulate(&setup.spec, &config))?;
    let residual = domain!(pde::residual_vs_terrace(&result, &tf))?;
    println!("residual_vs_terrace = {} (t_final = {t_final}, dx = {dx})", g17(residual));

    let mut lines = format!(
        "{{\n  \"residual\": {},\n  \"t_final\": {},\n  \"dx\": {},\n  \"fronts\": [\n",
        g17(residual),
        g17(t_final),
        g17(dx)
    );
    let n_fronts = terrace.fronts.len();
    for (k, f) in terrace.fronts.iter().enumerate() {
        let level = 0.5 * (f.upper + f.lower);
        let window = (0.5 * t_final, t_final);
        let (speed_pde, r2) = domain!(pde::measure_front_speed(&result, level, window))?;
        let delta = speed_pde - f.speed;
        println!(
            "front {} -> {}: c = {}, measured {} (r2 = {:.6}), delta = {:e}",
            f.upper,
            f.lower,
            g17(f.speed),
            g17(speed_pde),
            r2,
            delta
        );
        lines.push_str(&format!(
            "    {{\"upper\": {}, \"lower\": {}, \"speed\": {}, \"speed_measured\": {}, \"delta\": {}}}{}\n",
            g17(f.upper),
            g17(f.lower),
            g17(f.speed),
            g17(speed_pde),
            g17(delta),
            if k + 1 < n_fronts { "," } else { "" }
        ));
    }
    lines.push_str("  ]\n}\n");
    write_out(&setup.out, "verify.json", &lines)?;
    Ok(())
}
