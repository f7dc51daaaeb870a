//! Command-line interface: subcommands for level tables, dark-state
//! censuses, detuning scans, magnetic-field scan families, and scheme
//! comparisons.
//!
//! Every option can come from a flat `key = value` configuration file
//! (`--config path`), from the command line (`--key value` with the same
//! kebab-case names), or both; command-line values win. Outputs are CSV on
//! stdout (or `--out file`) with values printed to 12 significant digits, so
//! identical inputs produce byte-identical output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::angmom::HalfInt;
use crate::coupling::{stationary_dark_states, DarkStateQuery};
use crate::error::{Error, Result};
use crate::field::{Polarization, Scheme};
use crate::spectroscopy::{bfield_family, compare_schemes, scan, ScanConfig};
use crate::structure::{AtomSpec, TAU};

#[derive(Parser)]
#[command(
    name = "cpt-sim",
    version,
    about = "Steady-state simulator of coherent-population-trapping resonances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the hyperfine-Zeeman level table at the working field
    #[command(allow_negative_numbers = true)]
    Levels(CommonArgs),
    /// Census of dark and trap states for the configured drive
    #[command(allow_negative_numbers = true)]
    Darkstates(CommonArgs),
    /// Absorption lineshape versus two-photon detuning
    #[command(allow_negative_numbers = true)]
    Scan(CommonArgs),
    /// Family of detuning scans, one per magnetic field value
    #[command(allow_negative_numbers = true)]
    Bscan(CommonArgs),
    /// Lineshape metrics for several schemes and drive strengths
    #[command(allow_negative_numbers = true)]
    Compare(CommonArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Flat `key = value` configuration file; `#` starts a comment
    #[arg(long)]
    config: Option<PathBuf>,

    /// Atom preset: rb87 or cs133
    #[arg(long)]
    atom: Option<String>,
    /// Excited hyperfine manifold F
    #[arg(long)]
    excited_f: Option<String>,
    /// Polarization scheme: lin_par_lin, sigma_sigma, or lin_perp_lin
    #[arg(long)]
    scheme: Option<String>,
    /// Polarization axis angle of the upper component, rad
    #[arg(long)]
    theta_upper_rad: Option<f64>,
    /// Ellipticity angle of the upper component, rad
    #[arg(long)]
    eps_upper_rad: Option<f64>,
    /// Polarization axis angle of the lower component, rad
    #[arg(long)]
    theta_lower_rad: Option<f64>,
    /// Ellipticity angle of the lower component, rad
    #[arg(long)]
    eps_lower_rad: Option<f64>,
    /// Rabi frequency of the upper component, Hz
    #[arg(long)]
    rabi_upper_hz: Option<f64>,
    /// Rabi frequency of the lower component, Hz
    #[arg(long)]
    rabi_lower_hz: Option<f64>,
    /// Common one-photon detuning, Hz
    #[arg(long)]
    detuning_hz: Option<f64>,
    /// Static magnetic field, gauss
    #[arg(long)]
    b_gauss: Option<f64>,
    /// First two-photon detuning of the scan grid, Hz
    #[arg(long)]
    delta_start_hz: Option<f64>,
    /// Last two-photon detuning of the scan grid, Hz
    #[arg(long)]
    delta_stop_hz: Option<f64>,
    /// Scan grid step, Hz
    #[arg(long)]
    delta_step_hz: Option<f64>,
    /// Average over the thermal velocity distribution: on or off
    #[arg(long)]
    doppler: Option<String>,
    /// Doppler FWHM override, Hz
    #[arg(long)]
    doppler_fwhm_hz: Option<f64>,
    /// Number of velocity quadrature nodes
    #[arg(long)]
    doppler_points: Option<usize>,
    /// Natural linewidth of the excited state, Hz
    #[arg(long)]
    gamma_natural_hz: Option<f64>,
    /// Extra optical-coherence dephasing (laser linewidth), Hz
    #[arg(long)]
    gamma_star_hz: Option<f64>,
    /// Ground-state transit relaxation, Hz
    #[arg(long)]
    gamma_ground_hz: Option<f64>,
    /// Nonradiative excited-state quench rate, Hz
    #[arg(long)]
    quench_hz: Option<f64>,
    /// Nuclear g-factor override
    #[arg(long)]
    g_i: Option<f64>,
    /// Ground-state electronic g-factor override
    #[arg(long)]
    g_j_ground: Option<f64>,
    /// Excited-state electronic g-factor override
    #[arg(long)]
    g_j_excited: Option<f64>,
    /// Ground hyperfine splitting override, Hz
    #[arg(long)]
    ground_hfs_hz: Option<f64>,
    /// Excited hyperfine splitting override, Hz
    #[arg(long)]
    excited_hfs_hz: Option<f64>,
    /// Nuclear spin override
    #[arg(long)]
    nuclear_spin: Option<String>,
    /// Dark-state query: `auto` or `m_lower,m_upper`
    #[arg(long, allow_hyphen_values = true)]
    pair: Option<String>,
    /// Magnetic fields for `bscan`, comma separated, gauss
    #[arg(long)]
    b_list_gauss: Option<String>,
    /// Cases for `compare`: comma-separated `scheme:F` items
    #[arg(long)]
    schemes: Option<String>,
    /// Rabi frequencies for `compare`, comma separated, Hz
    #[arg(long)]
    rabi_list_hz: Option<String>,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the resolved configuration to stderr: on or off
    #[arg(long)]
    echo_config: Option<String>,
}

/// One optional value per configuration key, merged file-then-CLI.
#[derive(Default)]
struct Overlay {
    atom: Option<String>,
    excited_f: Option<String>,
    scheme: Option<String>,
    theta_upper_rad: Option<f64>,
    eps_upper_rad: Option<f64>,
    theta_lower_rad: Option<f64>,
    eps_lower_rad: Option<f64>,
    rabi_upper_hz: Option<f64>,
    rabi_lower_hz: Option<f64>,
    detuning_hz: Option<f64>,
    b_gauss: Option<f64>,
    delta_start_hz: Option<f64>,
    delta_stop_hz: Option<f64>,
    delta_step_hz: Option<f64>,
    doppler: Option<bool>,
    doppler_fwhm_hz: Option<f64>,
    doppler_points: Option<usize>,
    gamma_natural_hz: Option<f64>,
    gamma_star_hz: Option<f64>,
    gamma_ground_hz: Option<f64>,
    quench_hz: Option<f64>,
    g_i: Option<f64>,
    g_j_ground: Option<f64>,
    g_j_excited: Option<f64>,
    ground_hfs_hz: Option<f64>,
    excited_hfs_hz: Option<f64>,
    nuclear_spin: Option<String>,
    pair: Option<String>,
    b_list_gauss: Option<String>,
    schemes: Option<String>,
    rabi_list_hz: Option<String>,
    out: Option<PathBuf>,
    echo_config: Option<bool>,
    /// Unparseable boolean given on the command line; reported at resolution.
    bad_doppler: Option<String>,
    bad_echo: Option<String>,
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Error::config(format!("key `{key}`: `{raw}` is not a number")))
}

fn parse_usize(key: &str, raw: &str) -> Result<usize> {
    raw.trim()
        .parse::<usize>()
        .map_err(|_| Error::config(format!("key `{key}`: `{raw}` is not a non-negative integer")))
}

fn parse_bool(key: &str, raw: &str) -> Result<bool> {
    match raw.trim() {
        "true" | "on" | "1" | "yes" => Ok(true),
        "false" | "off" | "0" | "no" => Ok(false),
        other => Err(Error::config(format!(
            "key `{key}`: `{other}` is not a boolean (use on/off)"
        ))),
    }
}

/// Parses an angular momentum value: `2`, `1.5`, or `3/2`.
fn parse_half(key: &str, raw: &str) -> Result<HalfInt> {
    let s = raw.trim();
    let value = if let Some((num, den)) = s.split_once('/') {
        let n = parse_f64(key, num)?;
        let d = parse_f64(key, den)?;
        if d == 0.0 {
            return Err(Error::config(format!("key `{key}`: division by zero")));
        }
        n / d
    } else {
        parse_f64(key, s)?
    };
    HalfInt::from_f64(value)
        .map_err(|_| Error::config(format!("key `{key}`: `{raw}` is not a half-integer")))
}

impl Overlay {
    /// Applies one `key = value` assignment from a configuration file.
    fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        match key {
            "atom" => self.atom = Some(raw.trim().to_owned()),
            "excited-f" => self.excited_f = Some(raw.trim().to_owned()),
            "scheme" => self.scheme = Some(raw.trim().to_owned()),
            "theta-upper-rad" => self.theta_upper_rad = Some(parse_f64(key, raw)?),
            "eps-upper-rad" => self.eps_upper_rad = Some(parse_f64(key, raw)?),
            "theta-lower-rad" => self.theta_lower_rad = Some(parse_f64(key, raw)?),
            "eps-lower-rad" => self.eps_lower_rad = Some(parse_f64(key, raw)?),
            "rabi-upper-hz" => self.rabi_upper_hz = Some(parse_f64(key, raw)?),
            "rabi-lower-hz" => self.rabi_lower_hz = Some(parse_f64(key, raw)?),
            "detuning-hz" => self.detuning_hz = Some(parse_f64(key, raw)?),
            "b-gauss" => self.b_gauss = Some(parse_f64(key, raw)?),
            "delta-start-hz" => self.delta_start_hz = Some(parse_f64(key, raw)?),
            "delta-stop-hz" => self.delta_stop_hz = Some(parse_f64(key, raw)?),
            "delta-step-hz" => self.delta_step_hz = Some(parse_f64(key, raw)?),
            "doppler" => self.doppler = Some(parse_bool(key, raw)?),
            "doppler-fwhm-hz" => self.doppler_fwhm_hz = Some(parse_f64(key, raw)?),
            "doppler-points" => self.doppler_points = Some(parse_usize(key, raw)?),
            "gamma-natural-hz" => self.gamma_natural_hz = Some(parse_f64(key, raw)?),
            "gamma-star-hz" => self.gamma_star_hz = Some(parse_f64(key, raw)?),
            "gamma-ground-hz" => self.gamma_ground_hz = Some(parse_f64(key, raw)?),
            "quench-hz" => self.quench_hz = Some(parse_f64(key, raw)?),
            "g-i" => self.g_i = Some(parse_f64(key, raw)?),
            "g-j-ground" => self.g_j_ground = Some(parse_f64(key, raw)?),
            "g-j-excited" => self.g_j_excited = Some(parse_f64(key, raw)?),
            "ground-hfs-hz" => self.ground_hfs_hz = Some(parse_f64(key, raw)?),
            "excited-hfs-hz" => self.excited_hfs_hz = Some(parse_f64(key, raw)?),
            "nuclear-spin" => self.nuclear_spin = Some(raw.trim().to_owned()),
            "pair" => self.pair = Some(raw.trim().to_owned()),
            "b-list-gauss" => self.b_list_gauss = Some(raw.trim().to_owned()),
            "schemes" => self.schemes = Some(raw.trim().to_owned()),
            "rabi-list-hz" => self.rabi_list_hz = Some(raw.trim().to_owned()),
            "out" => self.out = Some(PathBuf::from(raw.trim())),
            "echo-config" => self.echo_config = Some(parse_bool(key, raw)?),
            other => {
                return Err(Error::config(format!(
                    "unknown configuration key `{other}`"
                )))
            }
        }
        Ok(())
    }

    fn load_file(&mut self, path: &PathBuf) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    lineno + 1
                )));
            };
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Command-line values override file values.
    fn merge_cli(&mut self, a: CommonArgs) {
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if a.$field.is_some() { self.$field = a.$field; })*
            };
        }
        take!(
            atom,
            excited_f,
            scheme,
            theta_upper_rad,
            eps_upper_rad,
            theta_lower_rad,
            eps_lower_rad,
            rabi_upper_hz,
            rabi_lower_hz,
            detuning_hz,
            b_gauss,
            delta_start_hz,
            delta_stop_hz,
            delta_step_hz,
            doppler_fwhm_hz,
            doppler_points,
            gamma_natural_hz,
            gamma_star_hz,
            gamma_ground_hz,
            quench_hz,
            g_i,
            g_j_ground,
            g_j_excited,
            ground_hfs_hz,
            excited_hfs_hz,
            nuclear_spin,
            pair,
            b_list_gauss,
            schemes,
            rabi_list_hz,
            out,
        );
        if let Some(raw) = a.doppler {
            if let Ok(v) = parse_bool("doppler", &raw) {
                self.doppler = Some(v);
            } else {
                // keep the raw string so resolution reports the bad value
                self.doppler = None;
                self.bad_doppler = Some(raw);
            }
        }
        if let Some(raw) = a.echo_config {
            match parse_bool("echo-config", &raw) {
                Ok(v) => self.echo_config = Some(v),
                Err(_) => self.bad_echo = Some(raw),
            }
        }
    }
}

/// Query for the darkstates subcommand.
enum PairSpec {
    Auto,
    Pair(HalfInt, HalfInt),
}

/// Fully resolved run parameters.
struct Resolved {
    config: ScanConfig,
    delta_start_hz: Option<f64>,
    delta_stop_hz: Option<f64>,
    delta_step_hz: Option<f64>,
    pair: PairSpec,
    b_list: Option<Vec<f64>>,
    compare_cases: Option<Vec<(Scheme, HalfInt)>>,
    rabi_list_hz: Option<Vec<f64>>,
    out: Option<PathBuf>,
    echo: bool,
}

fn parse_f64_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    let items: Vec<f64> = raw
        .split(',')
        .map(|s| parse_f64(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::config(format!("key `{key}`: empty list")));
    }
    Ok(items)
}

fn parse_scheme_list(raw: &str) -> Result<Vec<(Scheme, HalfInt)>> {
    let mut out = Vec::new();
    for item in raw.split(',') {
        let item = item.trim();
        let Some((name, f)) = item.split_once(':') else {
            return Err(Error::config(format!(
                "key `schemes`: `{item}` is not of the form scheme:F"
            )));
        };
        let scheme: Scheme = name.trim().parse()?;
        let f = parse_half("schemes", f)?;
        out.push((scheme, f));
    }
    if out.is_empty() {
        return Err(Error::config("key `schemes`: empty list"));
    }
    Ok(out)
}

fn resolve(overlay: Overlay) -> Result<Resolved> {
    if let Some(raw) = &overlay.bad_doppler {
        return Err(Error::config(format!(
            "key `doppler`: `{raw}` is not a boolean (use on/off)"
        )));
    }
    if let Some(raw) = &overlay.bad_echo {
        return Err(Error::config(format!(
            "key `echo-config`: `{raw}` is not a boolean (use on/off)"
        )));
    }

    let mut atom = AtomSpec::preset(overlay.atom.as_deref().unwrap_or("rb87"))?;
    if let Some(v) = overlay.g_i {
        atom.g_i = v;
    }
    if let Some(v) = overlay.g_j_ground {
        atom.g_j_ground = v;
    }
    if let Some(v) = overlay.g_j_excited {
        atom.g_j_excited = v;
    }
    if let Some(v) = overlay.ground_hfs_hz {
        atom.ground_hfs_hz = v;
    }
    if let Some(v) = overlay.excited_hfs_hz {
        atom.excited_hfs_hz = v;
    }
    if let Some(raw) = &overlay.nuclear_spin {
        atom.nuclear_spin = parse_half("nuclear-spin", raw)?;
    }
    if let Some(v) = overlay.gamma_natural_hz {
        atom.natural_linewidth = TAU * v;
    }
    if let Some(v) = overlay.doppler_fwhm_hz {
        atom.doppler_fwhm_hz = v;
    }

    let mut config = ScanConfig::new(atom);
    if let Some(raw) = &overlay.excited_f {
        config.excited_f = parse_half("excited-f", raw)?;
    }
    if let Some(raw) = &overlay.scheme {
        config.scheme = raw.parse()?;
    }
    if overlay.theta_upper_rad.is_some() || overlay.eps_upper_rad.is_some() {
        config.pol_upper = Some(Polarization::from_ellipse(
            overlay.theta_upper_rad.unwrap_or(0.0),
            overlay.eps_upper_rad.unwrap_or(0.0),
        ));
    }
    if overlay.theta_lower_rad.is_some() || overlay.eps_lower_rad.is_some() {
        config.pol_lower = Some(Polarization::from_ellipse(
            overlay.theta_lower_rad.unwrap_or(0.0),
            overlay.eps_lower_rad.unwrap_or(0.0),
        ));
    }
    if let Some(v) = overlay.rabi_upper_hz {
        config.rabi_upper = TAU * v;
    }
    if let Some(v) = overlay.rabi_lower_hz {
        config.rabi_lower = TAU * v;
    }
    if let Some(v) = overlay.detuning_hz {
        config.detuning_hz = v;
    }
    if let Some(v) = overlay.b_gauss {
        config.b_gauss = v;
    }
    if let Some(v) = overlay.doppler {
        config.doppler = v;
    }
    if let Some(v) = overlay.doppler_fwhm_hz {
        config.doppler_fwhm_hz = Some(v);
    }
    if let Some(v) = overlay.doppler_points {
        config.doppler_points = v;
    }
    config.rates.gamma_natural = config.atom.natural_linewidth;
    if let Some(v) = overlay.gamma_star_hz {
        config.rates.optical_dephasing = TAU * v;
    }
    if let Some(v) = overlay.gamma_ground_hz {
        config.rates.ground_relaxation = TAU * v;
    }
    if let Some(v) = overlay.quench_hz {
        config.rates.excited_quench = TAU * v;
    }

    let pair = match overlay.pair.as_deref() {
        None | Some("auto") => PairSpec::Auto,
        Some(raw) => {
            let Some((lo, up)) = raw.split_once(',') else {
                return Err(Error::config(format!(
                    "key `pair`: `{raw}` is not `auto` or `m_lower,m_upper`"
                )));
            };
            PairSpec::Pair(parse_half("pair", lo)?, parse_half("pair", up)?)
        }
    };

    let b_list = overlay
        .b_list_gauss
        .as_deref()
        .map(|raw| parse_f64_list("b-list-gauss", raw))
        .transpose()?;
    let compare_cases = overlay
        .schemes
        .as_deref()
        .map(parse_scheme_list)
        .transpose()?;
    let rabi_list_hz = overlay
        .rabi_list_hz
        .as_deref()
        .map(|raw| parse_f64_list("rabi-list-hz", raw))
        .transpose()?;

    Ok(Resolved {
        config,
        delta_start_hz: overlay.delta_start_hz,
        delta_stop_hz: overlay.delta_stop_hz,
        delta_step_hz: overlay.delta_step_hz,
        pair,
        b_list,
        compare_cases,
        rabi_list_hz,
        out: overlay.out,
        echo: overlay.echo_config.unwrap_or(false),
    })
}

/// 12 significant digits, locale independent; NaN prints as `NaN`.
fn fmt_g12(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_owned()
    } else {
        format!("{x:.11e}")
    }
}

fn writer_for(out: &Option<PathBuf>) -> Result<Box<dyn std::io::Write>> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout())),
    })
}

fn echo_config(r: &Resolved) {
    let c = &r.config;
    let mut s = String::new();
    let _ = writeln!(s, "atom = {}", c.atom.name);
    let _ = writeln!(s, "nuclear-spin = {}", c.atom.nuclear_spin);
    let _ = writeln!(s, "excited-f = {}", c.excited_f);
    let _ = writeln!(s, "scheme = {}", c.scheme);
    let _ = writeln!(s, "rabi-upper-hz = {}", fmt_g12(c.rabi_upper / TAU));
    let _ = writeln!(s, "rabi-lower-hz = {}", fmt_g12(c.rabi_lower / TAU));
    let _ = writeln!(s, "detuning-hz = {}", fmt_g12(c.detuning_hz));
    let _ = writeln!(s, "b-gauss = {}", fmt_g12(c.b_gauss));
    let _ = writeln!(s, "doppler = {}", if c.doppler { "on" } else { "off" });
    let _ = writeln!(s, "doppler-points = {}", c.doppler_points);
    let _ = writeln!(
        s,
        "gamma-natural-hz = {}",
        fmt_g12(c.rates.gamma_natural / TAU)
    );
    let _ = writeln!(
        s,
        "gamma-star-hz = {}",
        fmt_g12(c.rates.optical_dephasing / TAU)
    );
    let _ = writeln!(
        s,
        "gamma-ground-hz = {}",
        fmt_g12(c.rates.ground_relaxation / TAU)
    );
    let _ = writeln!(s, "quench-hz = {}", fmt_g12(c.rates.excited_quench / TAU));
    if let (Some(a), Some(b), Some(st)) =
        (r.delta_start_hz, r.delta_stop_hz, r.delta_step_hz)
    {
        let _ = writeln!(s, "delta-start-hz = {}", fmt_g12(a));
        let _ = writeln!(s, "delta-stop-hz = {}", fmt_g12(b));
        let _ = writeln!(s, "delta-step-hz = {}", fmt_g12(st));
    }
    eprint!("{s}");
}

fn require_delta(r: &Resolved, command: &str) -> Result<(f64, f64, f64)> {
    match (r.delta_start_hz, r.delta_stop_hz, r.delta_step_hz) {
        (Some(a), Some(b), Some(s)) => Ok((a, b, s)),
        _ => Err(Error::config(format!(
            "`{command}` needs an explicit grid: delta-start-hz, delta-stop-hz, delta-step-hz"
        ))),
    }
}

fn print_rate_warnings(config: &ScanConfig) {
    for w in config.rates.sanity_warnings() {
        eprintln!("warning: {w}");
    }
}

fn cmd_levels(r: &Resolved) -> Result<()> {
    let levels = r.config.level_set()?;
    let mut w = writer_for(&r.out)?;
    writeln!(w, "manifold,F,m,energy_hz")?;
    for lvl in levels.ground.iter().chain(levels.excited.iter()) {
        writeln!(
            w,
            "{},{},{},{}",
            lvl.manifold,
            lvl.f,
            lvl.m,
            fmt_g12(lvl.energy_hz)
        )?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_darkstates(r: &Resolved) -> Result<()> {
    let levels = r.config.level_set()?;
    let field = r.config.base_field()?;
    let query = match r.pair {
        PairSpec::Auto => DarkStateQuery::Auto,
        PairSpec::Pair(m_lower, m_upper) => DarkStateQuery::Pair { m_lower, m_upper },
    };
    let report = stationary_dark_states(&levels, &field, query)?;
    let mut w = writer_for(&r.out)?;
    writeln!(
        w,
        "atom={} scheme={} excited_F={} B_gauss={}",
        r.config.atom.name,
        r.config.scheme,
        r.config.excited_f,
        fmt_g12(r.config.b_gauss)
    )?;
    write!(w, "{report}")?;
    w.flush()?;
    Ok(())
}

fn cmd_scan(r: &Resolved) -> Result<()> {
    let (start, stop, step) = require_delta(r, "scan")?;
    let mut config = r.config.clone();
    config.delta_start_hz = start;
    config.delta_stop_hz = stop;
    config.delta_step_hz = step;
    print_rate_warnings(&config);
    let shape = scan(&config)?;
    let mut w = writer_for(&r.out)?;
    writeln!(w, "delta_R_hz,absorption")?;
    for (d, a) in shape.delta_hz.iter().zip(&shape.absorption) {
        writeln!(w, "{},{}", fmt_g12(*d), fmt_g12(*a))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_bscan(r: &Resolved) -> Result<()> {
    let (start, stop, step) = require_delta(r, "bscan")?;
    let Some(b_list) = &r.b_list else {
        return Err(Error::config("`bscan` needs b-list-gauss"));
    };
    let mut config = r.config.clone();
    config.delta_start_hz = start;
    config.delta_stop_hz = stop;
    config.delta_step_hz = step;
    print_rate_warnings(&config);
    let family = bfield_family(&config, b_list)?;
    let mut w = writer_for(&r.out)?;
    writeln!(w, "B_gauss,delta_R_hz,absorption")?;
    for (b, shape) in &family {
        for (d, a) in shape.delta_hz.iter().zip(&shape.absorption) {
            writeln!(w, "{},{},{}", fmt_g12(*b), fmt_g12(*d), fmt_g12(*a))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_compare(r: &Resolved) -> Result<()> {
    let (start, stop, step) = require_delta(r, "compare")?;
    let mut config = r.config.clone();
    config.delta_start_hz = start;
    config.delta_stop_hz = stop;
    config.delta_step_hz = step;
    print_rate_warnings(&config);

    let cases = match &r.compare_cases {
        Some(c) => c.clone(),
        None => vec![
            (Scheme::LinParLin, config.excited_f),
            (Scheme::SigmaSigma, config.excited_f),
            (Scheme::LinPerpLin, config.excited_f),
        ],
    };
    let rabi_list = match &r.rabi_list_hz {
        Some(l) => l.clone(),
        None => vec![config.rabi_upper / TAU],
    };

    let rows = compare_schemes(&config, &cases, &rabi_list)?;
    let mut w = writer_for(&r.out)?;
    writeln!(
        w,
        "scheme,excited_F,rabi_hz,background,amplitude,fwhm_hz,contrast,amp_to_width,center_hz,n_peaks"
    )?;
    for row in &rows {
        let m = &row.metrics;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            row.scheme,
            row.excited_f,
            fmt_g12(row.rabi_hz),
            fmt_g12(m.background),
            fmt_g12(m.amplitude),
            fmt_g12(m.fwhm_hz),
            fmt_g12(m.contrast),
            fmt_g12(m.amp_to_width),
            fmt_g12(m.center_hz),
            m.n_peaks
        )?;
    }
    w.flush()?;
    Ok(())
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) | Error::Io(_) => 2,
        Error::DegenerateInput(_)
        | Error::SingularDetuning(_)
        | Error::NonUniqueSteadyState(_)
        | Error::Numerical(_)
        | Error::ScanFailed { .. } => 3,
    }
}

fn run_command(command: Command) -> Result<()> {
    let (args, run): (CommonArgs, fn(&Resolved) -> Result<()>) = match command {
        Command::Levels(a) => (a, cmd_levels),
        Command::Darkstates(a) => (a, cmd_darkstates),
        Command::Scan(a) => (a, cmd_scan),
        Command::Bscan(a) => (a, cmd_bscan),
        Command::Compare(a) => (a, cmd_compare),
    };
    let mut overlay = Overlay::default();
    if let Some(path) = &args.config {
        overlay.load_file(path)?;
    }
    overlay.merge_cli(args);
    let resolved = resolve(overlay)?;
    if resolved.echo {
        echo_config(&resolved);
    }
    run(&resolved)
}

/// Entry point used by the binary: parses `argv`, runs the command, and
/// returns the process exit code (0 success, 2 configuration error,
/// 3 numerical failure).
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
