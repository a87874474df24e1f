//! Command-line front end: argument parsing, dispatch, and CSV/JSON
//! emission.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration (bad flags, schema
//! violations, unreadable files), 3 numerical (domain errors, table
//! extrapolation, non-convergence). Failures print a one-line JSON error
//! object to stderr. dB at this surface, linear units inside.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::antenna::{fit_multi_lobe, hpbw, AntennaPattern, Lobe};
use crate::atmosphere::{foliage_loss, rain_attenuation, transmittance, TableSet};
use crate::blockage::{p_los, HumanFieldForm, LosModel};
use crate::channel::{link_budget, BandKind, LinkState};
use crate::config::{resolve_data_path, ScenarioConfig};
use crate::error::{Error, Result};
use crate::netsim::{coverage_curve, default_thresholds_db, simulate};
use crate::quantity::{db_to_linear, dbm_to_watt, watt_to_dbm, Frequency, PowerRatio};
use crate::registry::Registry;
use crate::surface::{
    classify, critical_height, ds_normalization, power_split, received_scattered_power,
    rough_loss_factor, DsConfig, LobeDomain, ScatterGeometry, SurfaceSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "mmthz",
    version,
    about = "Propagation modeling and coverage simulation for the mmWave and THz bands"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the primary output to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where tabular (csv) and structured (json) both apply.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Look up the spectrum bands containing a frequency.
    Bands {
        /// Frequency in GHz.
        #[arg(long)]
        freq: f64,
        /// Alternative band-registry TOML file.
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// Environmental losses over a path: absorption, rain, foliage.
    Attenuate {
        /// Frequency in GHz.
        #[arg(long)]
        freq: f64,
        /// Path length in meters.
        #[arg(long)]
        dist: f64,
        /// Rain rate in mm/hr.
        #[arg(long)]
        rain: Option<f64>,
        /// Include the single-tree foliage loss.
        #[arg(long)]
        foliage: bool,
        /// Propagation-tables TOML file (defaults to the built-in tables).
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// LOS probability curve of a blockage model.
    Losprob {
        #[arg(long, value_enum)]
        model: LosModelArg,
        /// Near fit parameter d1 (m), UMa/NYU models.
        #[arg(long)]
        d1: Option<f64>,
        /// Decay fit parameter d2 (m), UMa/NYU models.
        #[arg(long)]
        d2: Option<f64>,
        /// Blockage density per m^2 (boolean/human models).
        #[arg(long)]
        density: Option<f64>,
        /// Mean rectangle length E[L] in meters (boolean model).
        #[arg(long)]
        mean_length: Option<f64>,
        /// Mean rectangle width E[W] in meters (boolean model).
        #[arg(long)]
        mean_width: Option<f64>,
        /// LOS-ball radius in meters.
        #[arg(long)]
        radius: Option<f64>,
        /// Body radius in meters (human model).
        #[arg(long)]
        body_radius: Option<f64>,
        /// Human-field expression choice.
        #[arg(long, value_enum, default_value = "as-written")]
        human_form: HumanFormArg,
        /// Self-blockage cone angle in radians.
        #[arg(long)]
        cone_angle: Option<f64>,
        /// Largest distance in meters.
        #[arg(long)]
        dmax: f64,
        /// Distance step in meters (default dmax / 100).
        #[arg(long)]
        step: Option<f64>,
    },
    /// Rough-surface scattering report for one bounce geometry.
    Scatter {
        /// Smooth-surface reflection coefficient in [0, 1].
        #[arg(long)]
        gamma_s: f64,
        /// RMS surface height in meters.
        #[arg(long)]
        hrms: f64,
        /// Min-to-max surface protuberance h0 in meters.
        #[arg(long, default_value_t = 0.0)]
        h0: f64,
        /// Scattering-lobe width exponent.
        #[arg(long)]
        alpha_r: f64,
        /// Incidence angle in radians.
        #[arg(long)]
        theta_i: f64,
        /// Observation angle in radians.
        #[arg(long)]
        theta_s: f64,
        /// Transmitter-to-surface distance in meters.
        #[arg(long)]
        ri: f64,
        /// Surface-to-receiver distance in meters.
        #[arg(long)]
        rs: f64,
        /// Frequency in GHz.
        #[arg(long)]
        freq: f64,
        /// Effective scattering aperture in m^2.
        #[arg(long, default_value_t = 1.0)]
        area: f64,
        #[arg(long, default_value_t = 0.0)]
        pt_dbm: f64,
        #[arg(long, default_value_t = 0.0)]
        gt_db: f64,
        #[arg(long, default_value_t = 0.0)]
        gr_db: f64,
        /// Normalization domain for the scattering lobe.
        #[arg(long, value_enum, default_value = "planar")]
        domain: DomainArg,
    },
    /// Sweep an antenna pattern and emit (angle, gain_dB) samples.
    Pattern {
        #[arg(long, value_enum)]
        model: PatternModelArg,
        /// Element count (ula/sinc/cosine).
        #[arg(long)]
        elements: Option<u32>,
        /// Element spacing over wavelength (ula).
        #[arg(long)]
        spacing: Option<f64>,
        /// Main-lobe gain in dB (flattop/gaussian).
        #[arg(long)]
        gm_db: Option<f64>,
        /// Side-lobe gain in dB (flattop/gaussian).
        #[arg(long)]
        gs_db: Option<f64>,
        /// Half-power beamwidth in radians (flattop).
        #[arg(long)]
        theta3db: Option<f64>,
        /// Beamwidth control (gaussian).
        #[arg(long)]
        eta: Option<f64>,
        /// Multi-lobe spec "width_rad:gain_db,width_rad:gain_db,...".
        #[arg(long)]
        lobes: Option<String>,
        /// Sweep half-range (cosine direction for ula/sinc, radians
        /// otherwise; defaults 0.5 / pi).
        #[arg(long)]
        sweep: Option<f64>,
        /// Sweep step (default: half-range / 200).
        #[arg(long)]
        step: Option<f64>,
        /// Also report the numerical half-power beamwidth.
        #[arg(long)]
        report_hpbw: bool,
        /// Fit a K-lobe piecewise-constant approximation to the sweep.
        #[arg(long)]
        fit_lobes: Option<usize>,
    },
    /// Point-to-point link budget with per-factor dB breakdown.
    Linkbudget {
        #[arg(long, value_enum)]
        band: BandArg,
        /// Carrier frequency in GHz.
        #[arg(long)]
        freq: f64,
        /// Link distance in meters.
        #[arg(long)]
        dist: f64,
        #[arg(long)]
        pt_dbm: f64,
        /// Transmit antenna pattern "model:key=value,..." (boresight gain).
        #[arg(long)]
        pattern_tx: Option<String>,
        /// Receive antenna pattern "model:key=value,...".
        #[arg(long)]
        pattern_rx: Option<String>,
        /// Transmit gain in dB (alternative to --pattern-tx).
        #[arg(long)]
        gt_db: Option<f64>,
        /// Receive gain in dB (alternative to --pattern-rx).
        #[arg(long)]
        gr_db: Option<f64>,
        #[arg(long, value_enum, default_value = "los")]
        state: StateArg,
        #[arg(long, default_value_t = 3.0)]
        mu_los: f64,
        #[arg(long, default_value_t = 2.0)]
        mu_nlos: f64,
        /// LOS near-field gain in dB (default: free space at 1 m).
        #[arg(long)]
        c_los_db: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        alpha_los: f64,
        /// NLOS near-field gain in dB (default: the LOS value).
        #[arg(long)]
        c_nlos_db: Option<f64>,
        #[arg(long, default_value_t = 4.0)]
        alpha_nlos: f64,
        /// Propagation-tables TOML file.
        #[arg(long)]
        tables: Option<PathBuf>,
        /// Take the link definition from a scenario config instead.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Monte-Carlo coverage simulation from a scenario config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Random seed; fully determines all stochastic outputs.
        /// Required when the CI environment variable is set.
        #[arg(long)]
        seed: Option<u64>,
        /// Trial count (overrides the config).
        #[arg(long)]
        trials: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LosModelArg {
    Uma,
    Nyu,
    Boolean,
    Ball,
    Human,
    Selfcone,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HumanFormArg {
    AsWritten,
    VoidProbability,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BandArg {
    Mmwave,
    Thz,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StateArg {
    Los,
    Nlos,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PatternModelArg {
    Ula,
    Sinc,
    Flattop,
    Multilobe,
    Gaussian,
    Cosine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Planar,
    Hemisphere,
}

/// Parse and execute. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
            );
            match e {
                Error::Config(_) | Error::Io(_) => 2,
                _ => 3,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let out = cli.out.clone();
    let format = cli.format;
    match cli.command {
        Command::Bands { freq, registry } => cmd_bands(freq, registry, &out, format),
        Command::Attenuate {
            freq,
            dist,
            rain,
            foliage,
            tables,
        } => cmd_attenuate(freq, dist, rain, foliage, tables, &out, format),
        Command::Losprob {
            model,
            d1,
            d2,
            density,
            mean_length,
            mean_width,
            radius,
            body_radius,
            human_form,
            cone_angle,
            dmax,
            step,
        } => {
            let model = build_los_model(
                model,
                d1,
                d2,
                density,
                mean_length,
                mean_width,
                radius,
                body_radius,
                human_form,
                cone_angle,
            )?;
            cmd_losprob(&model, dmax, step, &out, format)
        }
        Command::Scatter {
            gamma_s,
            hrms,
            h0,
            alpha_r,
            theta_i,
            theta_s,
            ri,
            rs,
            freq,
            area,
            pt_dbm,
            gt_db,
            gr_db,
            domain,
        } => cmd_scatter(
            ScatterArgs {
                gamma_s,
                hrms,
                h0,
                alpha_r,
                theta_i,
                theta_s,
                ri,
                rs,
                freq,
                area,
                pt_dbm,
                gt_db,
                gr_db,
                domain,
            },
            &out,
            format,
        ),
        Command::Pattern {
            model,
            elements,
            spacing,
            gm_db,
            gs_db,
            theta3db,
            eta,
            lobes,
            sweep,
            step,
            report_hpbw,
            fit_lobes,
        } => {
            let pattern =
                build_pattern(model, elements, spacing, gm_db, gs_db, theta3db, eta, lobes)?;
            cmd_pattern(
                &pattern, model, sweep, step, report_hpbw, fit_lobes, &out, format,
            )
        }
        Command::Linkbudget {
            band,
            freq,
            dist,
            pt_dbm,
            pattern_tx,
            pattern_rx,
            gt_db,
            gr_db,
            state,
            mu_los,
            mu_nlos,
            c_los_db,
            alpha_los,
            c_nlos_db,
            alpha_nlos,
            tables,
            config,
        } => cmd_linkbudget(
            LinkbudgetArgs {
                band,
                freq,
                dist,
                pt_dbm,
                pattern_tx,
                pattern_rx,
                gt_db,
                gr_db,
                state,
                mu_los,
                mu_nlos,
                c_los_db,
                alpha_los,
                c_nlos_db,
                alpha_nlos,
                tables,
                config,
            },
            &out,
            format,
        ),
        Command::Simulate {
            config,
            seed,
            trials,
        } => cmd_simulate(&config, seed, trials, &out, format),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

fn json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn load_tables(path: &Option<PathBuf>) -> Result<TableSet> {
    match path {
        Some(p) => TableSet::load(&resolve_data_path(p)),
        None => Ok(TableSet::builtin()),
    }
}

fn cmd_bands(
    freq_ghz: f64,
    registry: Option<PathBuf>,
    out: &Option<PathBuf>,
    format: Option<OutputFormat>,
) -> Result<()> {
    let registry = match registry {
        Some(p) => Registry::load(&resolve_data_path(&p))?,
        None => Registry::builtin(),
    };
    let f = Frequency::from_ghz(freq_ghz)?;
    let matches = registry.lookup(f);
    match format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => emit(out, &json_line(&matches)?),
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = matches
                .iter()
                .map(|b| {
                    let segments = b
                        .segments_ghz
                        .iter()
                        .map(|(lo, hi)| format!("{lo}-{hi}"))
                        .collect::<Vec<_>>()
                        .join(";");
                    vec![
                        b.name.clone(),
                        format!("{:?}", b.category).to_lowercase(),
                        segments,
                    ]
                })
                .collect();
            emit(out, &csv_table(&["name", "category", "segments_ghz"], &rows))
        }
    }
}

#[derive(Serialize)]
struct AttenuateReport {
    freq_ghz: f64,
    dist_m: f64,
    specific_attenuation_db_per_km: f64,
    absorption_db: f64,
    transmittance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rain_rate_mm_hr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rain_db_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rain_total_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    foliage_db: Option<f64>,
    total_db: f64,
}

fn cmd_attenuate(
    freq_ghz: f64,
    dist_m: f64,
    rain: Option<f64>,
    foliage: bool,
    tables: Option<PathBuf>,
    out: &Option<PathBuf>,
    format: Option<OutputFormat>,
) -> Result<()> {
    let tables = load_tables(&tables)?;
    let f = Frequency::from_ghz(freq_ghz)?;
    let spectrum = tables
        .absorption
        .ok_or_else(|| Error::Config("table file lacks an [absorption] section".into()))?;
    let tau = transmittance(dist_m, f, &spectrum)?;
    let specific = spectrum.specific_attenuation_db_per_km(f)?;
    let absorption_db = -tau.db();
    let (rain_db_per_km, rain_total_db) = match rain {
        Some(rate) => {
            let table = tables
                .rain
                .ok_or_else(|| Error::Config("table file lacks a [rain] section".into()))?;
            let per_km = rain_attenuation(f, rate, &table)?;
            (Some(per_km), Some(per_km * dist_m / 1e3))
        }
        None => (None, None),
    };
    let foliage_db = if foliage {
        let table = tables
            .foliage
            .ok_or_else(|| Error::Config("table file lacks a [foliage] section".into()))?;
        Some(foliage_loss(f, &table)?)
    } else {
        None
    };
    let report = AttenuateReport {
        freq_ghz,
        dist_m,
        specific_attenuation_db_per_km: specific,
        absorption_db,
        transmittance: tau.linear(),
        rain_rate_mm_hr: rain,
        rain_db_per_km,
        rain_total_db,
        foliage_db,
        total_db: absorption_db + rain_total_db.unwrap_or(0.0) + foliage_db.unwrap_or(0.0),
    };
    match format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => emit(out, &json_line(&report)?),
        OutputFormat::Csv => {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let row = vec![
                report.freq_ghz.to_string(),
                report.dist_m.to_string(),
                report.specific_attenuation_db_per_km.to_string(),
                report.absorption_db.to_string(),
                report.transmittance.to_string(),
                opt(report.rain_rate_mm_hr),
                opt(report.rain_db_per_km),
                opt(report.rain_total_db),
                opt(report.foliage_db),
                report.total_db.to_string(),
            ];
            emit(
                out,
                &csv_table(
                    &[
                        "freq_ghz",
                        "dist_m",
                        "specific_attenuation_db_per_km",
                        "absorption_db",
                        "transmittance",
                        "rain_rate_mm_hr",
                        "rain_db_per_km",
                        "rain_total_db",
                        "foliage_db",
                        "total_db",
                    ],
                    &[row],
                ),
            )
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_los_model(
    model: LosModelArg,
    d1: Option<f64>,
    d2: Option<f64>,
    density: Option<f64>,
    mean_length: Option<f64>,
    mean_width: Option<f64>,
    radius: Option<f64>,
    body_radius: Option<f64>,
    human_form: HumanFormArg,
    cone_angle: Option<f64>,
) -> Result<LosModel> {
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| Error::Config(format!("--{name} is required for this model")))
    };
    let model = match model {
        LosModelArg::Uma => LosModel::UmaUmi {
            d1_m: need("d1", d1)?,
            d2_m: need("d2", d2)?,
        },
        LosModelArg::Nyu => LosModel::NyuSquared {
            d1_m: need("d1", d1)?,
            d2_m: need("d2", d2)?,
        },
        LosModelArg::Boolean => LosModel::BooleanRect {
            density_per_m2: need("density", density)?,
            mean_length_m: need("mean-length", mean_length)?,
            mean_width_m: need("mean-width", mean_width)?,
        },
        LosModelArg::Ball => LosModel::LosBall {
            radius_m: need("radius", radius)?,
        },
        LosModelArg::Human => LosModel::HumanField {
            density_per_m2: need("density", density)?,
            body_radius_m: need("body-radius", body_radius)?,
            form: match human_form {
                HumanFormArg::AsWritten => HumanFieldForm::AsWritten,
                HumanFormArg::VoidProbability => HumanFieldForm::VoidProbability,
            },
        },
        LosModelArg::Selfcone => LosModel::SelfBlockCone {
            cone_angle_rad: need("cone-angle", cone_angle)?,
        },
    };
    model.validate()?;
    Ok(model)
}

fn cmd_losprob(
    model: &LosModel,
    dmax: f64,
    step: Option<f64>,
    out: &Option<PathBuf>,
    format: Option<OutputFormat>,
) -> Result<()> {
    if !(dmax > 0.0) {
        return Err(Error::Config("--dmax must be positive".into()));
    }
    let step = step.unwrap_or(dmax / 100.0);
    if !(step > 0.0) {
        return Err(Error::Config("--step must be positive".into()));
    }
    let mut rows = Vec::new();
    let mut d = 0.0;
    while d <= dmax + step * 1e-9 {
        let p = p_los(model, d.min(dmax))?.value();
        rows.push((d.min(dmax), p));
        d += step;
    }
    match format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|(d, p)| vec![d.to_string(), p.to_string()])
                .collect();
            emit(out, &csv_table(&["d_m", "p_los"], &table))
        }
        OutputFormat::Json => emit(out, &json_line(&rows)?),
    }
}

struct ScatterArgs {
    gamma_s: f64,
    hrms: f64,
    h0: f64,
    alpha_r: f64,
    theta_i: f64,
    theta_s: f64,
    ri: f64,
    rs: f64,
    freq: f64,
    area: f64,
    pt_dbm: f64,
    gt_db: f64,
    gr_db: f64,
    domain: DomainArg,
}

#[derive(Serialize)]
struct ScatterReport {
    rho: f64,
    s2: f64,
    reflected_db: f64,
    scattered_db: f64,
    p_r_dbm: f64,
    smoothness: String,
    critical_height_m: f64,
    f_alpha: f64,
}

fn cmd_scatter(
    args: ScatterArgs,
    out: &Option<PathBuf>,
    format: Option<OutputFormat>,
) -> Result<()> {
    let f = Frequency::from_ghz(args.freq)?;
    let surface = SurfaceSpec {
        gamma_s: args.gamma_s,
        protuberance_m: args.h0,
        rms_height_m: args.hrms,
        lobe_exponent: args.alpha_r,
        area_m2: args.area,
    };
    let geom = ScatterGeometry {
        theta_i_rad: args.theta_i,
        theta_s_rad: args.theta_s,
        r_i_m: args.ri,
        r_s_m: args.rs,
    };
    let ds = DsConfig {
        domain: match args.domain {
            DomainArg::Planar => LobeDomain::PlanarAngles,
            DomainArg::Hemisphere => LobeDomain::HemisphereSolidAngle,
        },
        backscatter: None,
    };
    let rho = rough_loss_factor(&surface, f, args.theta_i)?;
    let split = power_split(
        &surface,
        f,
        args.theta_i,
        PowerRatio::from_linear(1.0).unwrap(),
    )?;
    let p_t = PowerRatio::from_linear(dbm_to_watt(args.pt_dbm)?)?;
    let p_r = received_scattered_power(
        &surface,
        &geom,
        f,
        p_t,
        db_to_linear(args.gt_db)?.linear(),
        db_to_linear(args.gr_db)?.linear(),
        &ds,
    )?;
    let report = ScatterReport {
        rho,
        s2: split.s2,
        reflected_db: split.reflected.db(),
        scattered_db: split.scattered.db(),
        p_r_dbm: watt_to_dbm(p_r.linear()),
        smoothness: format!("{:?}", classify(&surface, f, args.theta_i)?).to_lowercase(),
        critical_height_m: critical_height(f, args.theta_i)?,
        f_alpha: ds_normalization(args.alpha_r, &ds)?,
    };
    match format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => emit(out, &json_line(&report)?),
        OutputFormat::Csv => {
            let row = vec![
                report.rho.to_string(),
                report.s2.to_string(),
                report.reflected_db.to_string(),
                report.scattered_db.to_string(),
                report.p_r_dbm.to_string(),
                report.smoothness.clone(),
                report.critical_height_m.to_string(),
                report.f_alpha.to_string(),
            ];
            emit(
                out,
                &csv_table(
                    &[
                        "rho",
                        "s2",
                        "reflected_db",
                        "scattered_db",
                        "p_r_dbm",
                        "smoothness",
                        "critical_height_m",
                        "f_alpha",
                    ],
                    &[row],
                ),
            )
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_pattern(
    model: PatternModelArg,
    elements: Option<u32>,
    spacing: Option<f64>,
    gm_db: Option<f64>,
    gs_db: Option<f64>,
    theta3db: Option<f64>,
    eta: Option<f64>,
    lobes: Option<String>,
) -> Result<AntennaPattern> {
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| Error::Config(format!("--{name} is required for this model")))
    };
    let need_elements = || {
        elements.ok_or_else(|| Error::Config("--elements is required for this model".into()))
    };
    let pattern = match model {
        PatternModelArg::Ula => AntennaPattern::UlaExact {
            elements: need_elements()?,
            spacing_over_lambda: spacing.unwrap_or(crate::antenna::DEFAULT_SPACING_OVER_LAMBDA),
        },
        PatternModelArg::Sinc => AntennaPattern::SincApprox {
            elements: need_elements()?,
        },
        PatternModelArg::Cosine => AntennaPattern::Cosine {
            elements: need_elements()?,
        },
        PatternModelArg::Flattop => AntennaPattern::FlatTop {
            main_gain: db_to_linear(need("gm-db", gm_db)?)?.linear(),
            side_gain: db_to_linear(need("gs-db", gs_db)?)?.linear(),
            theta_3db_rad: need("theta3db", theta3db)?,
        },
        PatternModelArg::Gaussian => AntennaPattern::Gaussian {
            main_gain: db_to_linear(need("gm-db", gm_db)?)?.linear(),
            side_gain: db_to_linear(need("gs-db", gs_db)?)?.linear(),
            eta: need("eta", eta)?,
        },
        PatternModelArg::Multilobe => {
            let spec = lobes
                .ok_or_else(|| Error::Config("--lobes is required for this model".into()))?;
            let mut parsed = Vec::new();
            for chunk in spec.split(',') {
                let (w, g) = chunk.split_once(':').ok_or_else(|| {
                    Error::Config(format!(
                        "bad lobe {chunk:?}; expected width_rad:gain_db"
                    ))
                })?;
                let width_rad: f64 = w
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad lobe width {w:?}")))?;
                let gain_db: f64 = g
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad lobe gain {g:?}")))?;
                parsed.push(Lobe {
                    width_rad,
                    gain: db_to_linear(gain_db)?.linear(),
                });
            }
            AntennaPattern::MultiLobe { lobes: parsed }
        }
    };
    pattern.validate()?;
    Ok(pattern)
}

#[allow(clippy::too_many_arguments)]
fn cmd_pattern(
    pattern: &AntennaPattern,
    model: PatternModelArg,
    sweep: Option<f64>,
    step: Option<f64>,
    report_hpbw: bool,
    fit_lobes: Option<usize>,
    out: &Option<PathBuf>,
    format: Option<OutputFormat>,
) -> Result<()> {
    let half_range = sweep.unwrap_or(match model {
        PatternModelArg::Ula | PatternModelArg::Sinc => 0.5,
        _ => PI,
    });
    if !(half_range > 0.0) {
        return Err(Error::Config("--sweep must be positive".into()));
    }
    let step = step.unwrap_or(half_range / 200.0);
    if !(step > 0.0) {
        return Err(Error::Config("--step must be positive".into()));
    }
    let mut samples = Vec::new();
    let mut x = -half_range;
    while x <= half_range + step * 1e-9 {
        let angle = x.min(half_range);
        samples.push((angle, pattern.gain(angle)));
        x += step;
    }
    if report_hpbw {
        eprintln!("hpbw: {}", hpbw(pattern)?);
    }
    if let Some(k) = fit_lobes {
        let fit = fit_multi_lobe(&samples, k)?;
        eprintln!(
            "fitted {k}-lobe pattern (mse {:.3e}): {:?}",
            fit.mse, fit.pattern
        );
    }
    match format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = samples
                .iter()
                .map(|(a, g)| vec![a.to_string(), (10.0 * g.log10()).to_string()])
                .collect();
            emit(out, &csv_table(&["angle", "gain_db"], &rows))
        }
        OutputFormat::Json => {
            let rows: Vec<(f64, f64)> = samples
                .iter()
                .map(|&(a, g)| (a, 10.0 * g.log10()))
                .collect();
            emit(out, &json_line(&rows)?)
        }
    }
}

struct LinkbudgetArgs {
    band: BandArg,
    freq: f64,
    dist: f64,
    pt_dbm: f64,
    pattern_tx: Option<String>,
    pattern_rx: Option<String>,
    gt_db: Option<f64>,
    gr_db: Option<f64>,
    state: StateArg,
    mu_los: f64,
    mu_nlos: f64,
    c_los_db: Option<f64>,
    alpha_los: f64,
    c_nlos_db: Option<f64>,
    alpha_nlos: f64,
    tables: Option<PathBuf>,
    config: Option<PathBuf>,
}

/// Parse "model:key=value,key=value" pattern descriptors, e.g.
/// "flattop:gm_db=20,gs_db=-10,theta3db=0.2" or "sinc:elements=16".
fn parse_pattern_spec(spec: &str) -> Result<AntennaPattern> {
    let (model, rest) = match spec.split_once(':') {
        Some((m, r)) => (m.trim(), r),
        None => (spec.trim(), ""),
    };
    let mut kv = std::collections::BTreeMap::new();
    for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("bad pattern parameter {part:?}")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad pattern value {v:?}")))?;
        kv.insert(k.trim().to_string(), value);
    }
    let get = |key: &str| {
        kv.get(key)
            .copied()
            .ok_or_else(|| Error::Config(format!("pattern {model:?} needs {key}=")))
    };
    let pattern = match model {
        "ula" => AntennaPattern::UlaExact {
            elements: get("elements")? as u32,
            spacing_over_lambda: kv
                .get("spacing")
                .copied()
                .unwrap_or(crate::antenna::DEFAULT_SPACING_OVER_LAMBDA),
        },
        "sinc" => AntennaPattern::SincApprox {
            elements: get("elements")? as u32,
        },
        "cosine" => AntennaPattern::Cosine {
            elements: get("elements")? as u32,
        },
        "flattop" => AntennaPattern::FlatTop {
            main_gain: db_to_linear(get("gm_db")?)?.linear(),
            side_gain: db_to_linear(get("gs_db")?)?.linear(),
            theta_3db_rad: get("theta3db")?,
        },
        "gaussian" => AntennaPattern::Gaussian {
            main_gain: db_to_linear(get("gm_db")?)?.linear(),
            side_gain: db_to_linear(get("gs_db")?)?.linear(),
            eta: get("eta")?,
        },
        other => {
            return Err(Error::Config(format!(
                "unknown pattern model {other:?} (ula, sinc, cosine, flattop, gaussian)"
            )))
        }
    };
    pattern.validate()?;
    Ok(pattern)
}

fn cmd_linkbudget(
    args: LinkbudgetArgs,
    out: &Option<PathBuf>,
    format: Option<OutputFormat>,
) -> Result<()> {
    let scenario = if let Some(config_path) = &args.config {
        let config = ScenarioConfig::load(&resolve_data_path(config_path))?;
        let tables = config.load_tables(config_path.parent())?;
        let link = config
            .link
            .as_ref()
            .ok_or_else(|| Error::Config("config has no [link] section".into()))?;
        link.build(tables.as_ref())?
    } else {
        let f = Frequency::from_ghz(args.freq)?;
        let friis = crate::channel::PathLossLaw::friis(f);
        let c_los = match args.c_los_db {
            Some(db) => db_to_linear(db)?.linear(),
            None => friis.near_field_gain,
        };
        let c_nlos = match args.c_nlos_db {
            Some(db) => db_to_linear(db)?.linear(),
            None => c_los,
        };
        let gain = |pattern: &Option<String>, db: Option<f64>, which: &str| -> Result<f64> {
            match (pattern, db) {
                (Some(_), Some(_)) => Err(Error::Config(format!(
                    "give either --pattern-{which} or --g{}-db, not both",
                    &which[..1]
                ))),
                (Some(spec), None) => Ok(parse_pattern_spec(spec)?.gain(0.0)),
                (None, Some(db)) => Ok(db_to_linear(db)?.linear()),
                (None, None) => Ok(1.0),
            }
        };
        let tables = load_tables(&args.tables)?;
        crate::channel::LinkScenario {
            band: match args.band {
                BandArg::Mmwave => BandKind::Mmwave,
                BandArg::Thz => BandKind::Thz,
            },
            frequency: f,
            distance_m: args.dist,
            state: match args.state {
                StateArg::Los => LinkState::Los,
                StateArg::Nlos => LinkState::Nlos,
            },
            tx_power_w: dbm_to_watt(args.pt_dbm)?,
            tx_gain: gain(&args.pattern_tx, args.gt_db, "tx")?,
            rx_gain: gain(&args.pattern_rx, args.gr_db, "rx")?,
            pathloss: crate::channel::StatePathLoss {
                los: crate::channel::PathLossLaw {
                    near_field_gain: c_los,
                    exponent: args.alpha_los,
                },
                nlos: crate::channel::PathLossLaw {
                    near_field_gain: c_nlos,
                    exponent: args.alpha_nlos,
                },
            },
            fading: crate::channel::FadingSpec {
                mu_los: args.mu_los,
                mu_nlos: args.mu_nlos,
            },
            spectrum: tables.absorption,
        }
    };
    let budget = link_budget(&scenario)?;
    for warning in &budget.warnings {
        eprintln!("warning: {warning}");
    }
    match format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => emit(out, &json_line(&budget)?),
        OutputFormat::Csv => {
            let row = vec![
                budget.freq_ghz.to_string(),
                budget.distance_m.to_string(),
                budget.tx_power_dbm.to_string(),
                budget.tx_gain_db.to_string(),
                budget.rx_gain_db.to_string(),
                budget.spreading_loss_db.to_string(),
                budget.absorption_loss_db.to_string(),
                budget.rx_power_dbm.to_string(),
            ];
            emit(
                out,
                &csv_table(
                    &[
                        "freq_ghz",
                        "distance_m",
                        "tx_power_dbm",
                        "tx_gain_db",
                        "rx_gain_db",
                        "spreading_loss_db",
                        "absorption_loss_db",
                        "rx_power_dbm",
                    ],
                    &[row],
                ),
            )
        }
    }
}

#[derive(Serialize)]
struct SimulateSummary {
    trials: u64,
    seed: u64,
    outage_probability: f64,
    mean_rate_bps: f64,
    coverage: Vec<(f64, f64)>,
}

fn cmd_simulate(
    config_path: &Path,
    seed: Option<u64>,
    trials: Option<u64>,
    out: &Option<PathBuf>,
    format: Option<OutputFormat>,
) -> Result<()> {
    if seed.is_none() && std::env::var_os("CI").is_some() {
        return Err(Error::Config(
            "--seed is required when running in CI mode".into(),
        ));
    }
    let seed = seed.unwrap_or(0);
    let config = ScenarioConfig::load(&resolve_data_path(config_path))?;
    let tables = config.load_tables(config_path.parent())?;
    let network = config
        .network
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [network] section".into()))?;
    let scenario = network.build(tables.as_ref())?;
    let trials = trials.or(network.trials).unwrap_or(10_000);
    let result = simulate(&scenario, trials, seed)?;
    let thresholds = network
        .sinr_thresholds_db
        .clone()
        .unwrap_or_else(default_thresholds_db);
    let coverage = coverage_curve(&result.sinr_samples, &thresholds);
    let summary = SimulateSummary {
        trials: result.trials,
        seed: result.seed,
        outage_probability: result.outages as f64 / result.trials as f64,
        mean_rate_bps: result.mean_rate_bps,
        coverage: coverage.clone(),
    };
    match format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => emit(out, &json_line(&summary)?),
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = coverage
                .iter()
                .map(|(t, p)| vec![t.to_string(), p.to_string()])
                .collect();
            emit(out, &csv_table(&["threshold_db", "coverage"], &rows))?;
            // When the curve goes to a file, the summary still lands on
            // stdout so scripted runs get both artifacts.
            if out.is_some() {
                print!("{}", json_line(&summary)?);
            }
            Ok(())
        }
    }
}
