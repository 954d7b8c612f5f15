//! `cyclesmooth simulate | smooth | sweep`.
//!
//! Exit status: 0 success, 2 usage error, 3 input or parse error,
//! 4 simulation divergence.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use cyclesmooth_core::{
    resample_cycle, smooth_cycle, sweep_tradeoff, DriveCycle, Model, Serial, SmoothingMode,
    SmoothingSpec, TradeoffFront,
};

use crate::config::{default_model, load_config, Override};
use crate::cycle_file::{read_cycle, write_cycle};
use crate::error::{io_err, Error, Result};
use crate::export::{front_csv, front_json, gnuplot_script, trajectory_csv, write_file, RunSummary};
use crate::parallel::Rayon;

/// Prefix selecting a cycle compiled into the binary, e.g. `bundled:la92`.
pub const BUNDLED_PREFIX: &str = "bundled:";

#[derive(Debug, Parser)]
#[command(name = "cyclesmooth", version, about = "Truck fuel use under drive-cycle smoothing")]
pub struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the truck on a cycle; writes a trajectory table and a summary.
    Simulate(Common),
    /// Smooth a cycle with a moving average; writes a cycle file.
    Smooth {
        #[command(flatten)]
        common: Common,
        /// Half-width of the moving-average window.
        #[arg(long)]
        m: usize,
        /// everywhere | preserve-stops
        #[arg(long, default_value = "everywhere", value_parser = parse_mode)]
        mode: SmoothingMode,
    },
    /// Sweep the smoothing half-width; writes the savings/spacing front.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Half-widths: a range `A..B` (inclusive), or a comma list.
        #[arg(long, default_value = "0..30", value_parser = parse_m_values)]
        m: MValues,
        /// Comma list of smoothing modes.
        #[arg(long, default_value = "everywhere,preserve-stops", value_parser = parse_modes)]
        modes: Modes,
        /// Worker threads; 0 uses every core, 1 runs serially.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Also write a gnuplot script for the front.
        #[arg(long)]
        gnuplot: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Truck configuration (TOML). Defaults to the bundled medium-duty truck.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cycle file, or `bundled:hwfet` / `bundled:la92`.
    #[arg(long)]
    pub cycle: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Override a configuration value, e.g. `--set driver.kp=2000`.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    pub overrides: Vec<Override>,
    /// Simulation step in seconds (for `smooth`: resample the cycle to this step).
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MValues(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct Modes(pub Vec<SmoothingMode>);

fn parse_mode(s: &str) -> std::result::Result<SmoothingMode, String> {
    s.parse().map_err(|e: cyclesmooth_core::Error| e.to_string())
}

fn parse_modes(s: &str) -> std::result::Result<Modes, String> {
    let modes = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_mode)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if modes.is_empty() {
        return Err("at least one mode is required".into());
    }
    Ok(Modes(modes))
}

/// `A..B` and `A..=B` are inclusive; otherwise a comma list.
pub fn parse_m_values(s: &str) -> std::result::Result<MValues, String> {
    let s = s.trim();
    let int = |p: &str| {
        p.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{p}` is not a non-negative integer"))
    };
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (int(a)?, int(b.strip_prefix('=').unwrap_or(b))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        return Ok(MValues((a..=b).collect()));
    }
    let values = s
        .split(',')
        .map(int)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(MValues(values))
}

fn parse_override(s: &str) -> std::result::Result<Override, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    init_logging(cli.verbose);
    let mut stdout = std::io::stdout().lock();
    match execute(&cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Simulate(common) => simulate(common, out),
        Command::Smooth { common, m, mode } => smooth(common, *m, *mode, out),
        Command::Sweep {
            common,
            m,
            modes,
            threads,
            gnuplot,
        } => sweep(common, &m.0, &modes.0, *threads, *gnuplot, out),
    }
}

fn load_cycle(spec: &str) -> Result<DriveCycle> {
    if let Some(name) = spec.strip_prefix(BUNDLED_PREFIX) {
        return crate::bundled::by_name(name)
            .ok_or_else(|| Error::Usage(format!("no bundled cycle named `{name}` (try hwfet or la92)")));
    }
    read_cycle(Path::new(spec))
}

fn load_model(common: &Common) -> Result<Model> {
    let mut overrides = common.overrides.clone();
    if let Some(dt) = common.dt {
        overrides.push(Override {
            key: "sim.step_dt_s".into(),
            value: dt.to_string(),
        });
    }
    match &common.config {
        Some(path) => load_config(path, &overrides),
        None => default_model(&overrides),
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

fn echo(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

fn simulate(common: &Common, out: &mut dyn Write) -> Result<()> {
    let model = load_model(common)?;
    let cycle = load_cycle(&common.cycle)?;
    let log = model.simulate(&cycle)?;
    prepare_out(&common.out)?;
    let base = common.out.join(cycle.name());
    let trajectory = path_with_suffix(&base, "_trajectory.csv");
    write_file(&trajectory, &trajectory_csv(&log.rows)?)?;
    let summary = RunSummary::from_log(
        cycle.name(),
        &log,
        model.params.fuel_lower_heating_value_j_per_g,
    )
    .render();
    write_file(&path_with_suffix(&base, "_summary.txt"), &summary)?;
    echo(out, &summary)?;
    echo(out, &format!("trajectory: {}\n", trajectory.display()))
}

fn smooth(common: &Common, m: usize, mode: SmoothingMode, out: &mut dyn Write) -> Result<()> {
    // Validate the configuration and overrides even though smoothing does
    // not use the truck, so a bad invocation fails the same way everywhere.
    if common.config.is_some() || !common.overrides.is_empty() {
        load_model(&Common { dt: None, ..clone_common(common) })?;
    }
    let mut cycle = load_cycle(&common.cycle)?;
    if let Some(dt) = common.dt {
        cycle = resample_cycle(&cycle, dt)?;
    }
    let smoothed = smooth_cycle(&cycle, &SmoothingSpec::new(m, mode));
    prepare_out(&common.out)?;
    let path = path_with_suffix(
        &common.out.join(cycle.name()),
        &format!("_m{m}_{}.csv", mode.as_str()),
    );
    write_cycle(&path, &smoothed)?;
    echo(out, &format!("smoothed cycle: {}\n", path.display()))
}

fn clone_common(c: &Common) -> Common {
    Common {
        config: c.config.clone(),
        cycle: c.cycle.clone(),
        out: c.out.clone(),
        overrides: c.overrides.clone(),
        dt: c.dt,
    }
}

/// Runs a sweep with `threads` workers (1 = serial).
pub fn run_sweep(
    cycle: &DriveCycle,
    m_values: &[usize],
    modes: &[SmoothingMode],
    model: &Model,
    threads: usize,
) -> Result<TradeoffFront> {
    let front = if threads == 1 {
        sweep_tradeoff(cycle, m_values, modes, model, &Serial)?
    } else {
        sweep_tradeoff(cycle, m_values, modes, model, &Rayon { threads })?
    };
    Ok(front)
}

fn sweep(
    common: &Common,
    m_values: &[usize],
    modes: &[SmoothingMode],
    threads: usize,
    gnuplot: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let model = load_model(common)?;
    let cycle = load_cycle(&common.cycle)?;
    let front = run_sweep(&cycle, m_values, modes, &model, threads)?;
    prepare_out(&common.out)?;
    let base = common.out.join(cycle.name());
    let csv_path = path_with_suffix(&base, "_front.csv");
    write_file(&csv_path, &front_csv(&front)?)?;
    write_file(&path_with_suffix(&base, "_front.json"), &front_json(&front)?)?;
    if gnuplot {
        let csv_name = csv_path.file_name().unwrap().to_string_lossy().into_owned();
        let png = format!("{}_front.png", cycle.name());
        write_file(
            &path_with_suffix(&base, "_front.gp"),
            &gnuplot_script(&front, &csv_name, &png),
        )?;
    }
    let mut report = format!(
        "cycle: {}\nbaseline_fuel_g_per_100km: {:.3}\n",
        front.cycle, front.baseline_fuel_per_100km
    );
    if let Some(p) = front.best_savings() {
        report += &format!(
            "max_savings: {:.3} % at m = {} ({}), spacing {:.3} m\n",
            p.fuel_savings_pct, p.half_width, p.mode, p.spacing_m
        );
    }
    if let Some(p) = front.largest_spacing() {
        report += &format!(
            "max_spacing: {:.3} m at m = {} ({}), savings {:.3} %\n",
            p.spacing_m, p.half_width, p.mode, p.fuel_savings_pct
        );
    }
    for (mode, m, drop) in front.spacing_decreases(0.1) {
        report += &format!("warning: spacing fell by {drop:.3} m at m = {m} ({mode})\n");
    }
    report += &format!("front: {}\n", csv_path.display());
    echo(out, &report)
}

fn path_with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_value_syntax() {
        assert_eq!(parse_m_values("0..3").unwrap().0, vec![0, 1, 2, 3]);
        assert_eq!(parse_m_values("0..=2").unwrap().0, vec![0, 1, 2]);
        assert_eq!(parse_m_values("0..30").unwrap().0.len(), 31);
        assert_eq!(parse_m_values("4, 1,2").unwrap().0, vec![4, 1, 2]);
        assert_eq!(parse_m_values("7").unwrap().0, vec![7]);
        assert!(parse_m_values("3..1").is_err());
        assert!(parse_m_values("-1").is_err());
        assert!(parse_m_values("a,b").is_err());
    }

    #[test]
    fn mode_list_syntax() {
        assert_eq!(
            parse_modes("everywhere,preserve-stops").unwrap().0,
            SmoothingMode::ALL.to_vec()
        );
        assert!(parse_modes("sideways").is_err());
        assert!(parse_modes(",").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["cyclesmooth"]), 2);
        assert_eq!(run(["cyclesmooth", "sweep", "--cycle", "x", "--m", "z"]), 2);
        assert_eq!(run(["cyclesmooth", "simulate"]), 2);
    }
}
