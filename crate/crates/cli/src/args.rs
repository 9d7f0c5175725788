use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotMode {
    None,
    Svg,
}

#[derive(Debug, Parser)]
#[command(
    name = "spindle",
    version,
    about = "Fabric pneumatic actuator models, dynamics, design search and study statistics"
)]
pub struct Cli {
    /// TOML file with a [global] table and one table per subcommand; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write outputs here instead of stdout.
    #[arg(long, global = true, env = "SPINDLE_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub plot: Option<PlotMode>,
    /// Seed for Monte-Carlo checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Actuator planform volume.
    #[command(subcommand)]
    Geometry(GeometryCmd),
    /// Pouch-motor contact area and force.
    #[command(subcommand)]
    Pouch(PouchCmd),
    /// Adduction actuator torque.
    #[command(subcommand)]
    Haa(HaaCmd),
    /// Filling dynamics.
    #[command(subcommand)]
    Pneumo(PneumoCmd),
    /// Spindle design search.
    #[command(subcommand)]
    Design(DesignCmd),
    /// Shoulder assistance simulation.
    #[command(subcommand)]
    Sim(SimCmd),
    /// sEMG processing and statistics.
    #[command(subcommand)]
    Emg(EmgCmd),
}

#[derive(Debug, Subcommand)]
pub enum GeometryCmd {
    /// Inflated volume of a preset or custom profile.
    Volume(GeometryVolumeArgs),
}

#[derive(Debug, Subcommand)]
pub enum PouchCmd {
    /// Force-height curve.
    Curve(PouchCurveArgs),
}

#[derive(Debug, Subcommand)]
pub enum HaaCmd {
    /// Torque-angle curve.
    Torque(HaaTorqueArgs),
}

#[derive(Debug, Subcommand)]
pub enum PneumoCmd {
    /// Pressure step up and release.
    Step(PneumoStepArgs),
    /// Magnitude response and -3 dB cutoff.
    Bode(PneumoBodeArgs),
}

#[derive(Debug, Subcommand)]
pub enum DesignCmd {
    /// Minimum-volume spindle meeting a moment target.
    Optimize(DesignOptimizeArgs),
}

#[derive(Debug, Subcommand)]
pub enum SimCmd {
    /// Gravity and actuator moment over one raise/hold/lower repetition.
    Assist(SimAssistArgs),
}

#[derive(Debug, Subcommand)]
pub enum EmgCmd {
    /// Envelopes, repetition means and condition comparisons.
    Run(EmgRunArgs),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalConfig {
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: Option<PlotMode>,
    pub seed: Option<u64>,
}

macro_rules! mergeable {
    ($t:ty { $($f:ident),* $(,)? }) => {
        impl $t {
            /// Fill unset fields from `other`.
            pub fn merge(self, other: Self) -> Self {
                Self { $($f: self.$f.or(other.$f)),* }
            }
        }
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryVolumeArgs {
    /// Preset name: UCAA or SSAA.
    #[arg(long)]
    pub profile: Option<String>,
    /// TOML profile (lu_mm, lp_mm, w1_mm, …) instead of a preset.
    #[arg(long)]
    pub profile_file: Option<PathBuf>,
    /// Fixed fill factor; calibrated on the uniform actuator when absent.
    #[arg(long)]
    pub fill_factor: Option<f64>,
    #[arg(long)]
    pub step_mm: Option<f64>,
}
mergeable!(GeometryVolumeArgs {
    profile,
    profile_file,
    fill_factor,
    step_mm
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PouchCurveArgs {
    #[arg(long)]
    pub l4_mm: Option<f64>,
    #[arg(long)]
    pub l5_mm: Option<f64>,
    #[arg(long)]
    pub ld_mm: Option<f64>,
    #[arg(long)]
    pub w_seal_mm: Option<f64>,
    #[arg(long)]
    pub pressure_kpa: Option<f64>,
    #[arg(long)]
    pub h_min_mm: Option<f64>,
    #[arg(long)]
    pub h_max_mm: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Add a sampled area column using an N x N jittered grid.
    #[arg(long)]
    pub oracle_grid: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaaTorqueArgs {
    #[arg(long)]
    pub l4_mm: Option<f64>,
    #[arg(long)]
    pub l5_mm: Option<f64>,
    #[arg(long)]
    pub ld_mm: Option<f64>,
    #[arg(long)]
    pub w_seal_mm: Option<f64>,
    #[arg(long)]
    pub pressure_kpa: Option<f64>,
    #[arg(long)]
    pub beta_min_deg: Option<f64>,
    #[arg(long)]
    pub beta_max_deg: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub sewing_offset_mm: Option<f64>,
    #[arg(long)]
    pub max_pressure_kpa: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PneumoStepArgs {
    #[arg(long)]
    pub volume_ml: Option<f64>,
    #[arg(long)]
    pub supply_kpa: Option<f64>,
    /// Fill-valve sonic conductance, NL/(s·bar).
    #[arg(long)]
    pub c_fill: Option<f64>,
    #[arg(long)]
    pub vent_ratio: Option<f64>,
    #[arg(long)]
    pub band_kpa: Option<f64>,
    #[arg(long)]
    pub pressure_kpa: Option<f64>,
    #[arg(long)]
    pub duration_s: Option<f64>,
    #[arg(long)]
    pub dt_s: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PneumoBodeArgs {
    #[arg(long)]
    pub volume_ml: Option<f64>,
    #[arg(long)]
    pub supply_kpa: Option<f64>,
    /// Fill-valve sonic conductance, NL/(s·bar).
    #[arg(long)]
    pub c_fill: Option<f64>,
    #[arg(long)]
    pub vent_ratio: Option<f64>,
    #[arg(long)]
    pub band_kpa: Option<f64>,
    /// Comma-separated mean pressures.
    #[arg(long, value_delimiter = ',')]
    pub mean_kpa: Option<Vec<f64>>,
    /// Half peak-to-peak swing; half the mean when absent.
    #[arg(long)]
    pub amplitude_kpa: Option<f64>,
    #[arg(long)]
    pub f_min_hz: Option<f64>,
    #[arg(long)]
    pub f_max_hz: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Scale conductances so the first mean pressure has this cutoff.
    #[arg(long)]
    pub calibrate_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignOptimizeArgs {
    #[arg(long)]
    pub m_target_nm: Option<f64>,
    #[arg(long)]
    pub w_min_end_mm: Option<f64>,
    /// TOML constraint set; replaces the default search box.
    #[arg(long)]
    pub constraints_file: Option<PathBuf>,
}
mergeable!(DesignOptimizeArgs {
    m_target_nm,
    w_min_end_mm,
    constraints_file
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimAssistArgs {
    #[arg(long)]
    pub body_mass_kg: Option<f64>,
    #[arg(long)]
    pub height_cm: Option<f64>,
    #[arg(long)]
    pub load_kg: Option<f64>,
    /// Held from elevation onset until lowering onset.
    #[arg(long)]
    pub pressure_kpa: Option<f64>,
    /// `t_s,pressure_kpa` schedule instead of the held pressure.
    #[arg(long)]
    pub schedule_file: Option<PathBuf>,
    /// `angle_deg,pressure_kpa,moment_nm` surface; synthetic demo when absent.
    #[arg(long)]
    pub surface_file: Option<PathBuf>,
    /// TOML arm coefficients.
    #[arg(long)]
    pub coefficients_file: Option<PathBuf>,
    #[arg(long)]
    pub dt_s: Option<f64>,
    /// Clamp surface queries to the grid instead of failing.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub clamp: Option<bool>,
}
mergeable!(SimAssistArgs {
    body_mass_kg,
    height_cm,
    load_kg,
    pressure_kpa,
    schedule_file,
    surface_file,
    coefficients_file,
    dt_s,
    clamp,
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmgRunArgs {
    /// Directory holding the recordings named in the conditions map.
    #[arg(long)]
    pub recordings: Option<PathBuf>,
    #[arg(long)]
    pub mvc: Option<PathBuf>,
    /// `file,subject,condition` map; the first condition listed is the baseline.
    #[arg(long)]
    pub conditions: Option<PathBuf>,
    /// Report path; defaults to emg_report.json in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub low_hz: Option<f64>,
    #[arg(long)]
    pub high_hz: Option<f64>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub window_s: Option<f64>,
}
mergeable!(EmgRunArgs {
    recordings,
    mvc,
    conditions,
    out,
    low_hz,
    high_hz,
    order,
    window_s
});

mergeable!(PouchCurveArgs {
    l4_mm,
    l5_mm,
    ld_mm,
    w_seal_mm,
    pressure_kpa,
    h_min_mm,
    h_max_mm,
    points,
    oracle_grid
});
mergeable!(HaaTorqueArgs {
    l4_mm,
    l5_mm,
    ld_mm,
    w_seal_mm,
    pressure_kpa,
    beta_min_deg,
    beta_max_deg,
    points,
    sewing_offset_mm,
    max_pressure_kpa,
});
mergeable!(PneumoStepArgs {
    volume_ml,
    supply_kpa,
    c_fill,
    vent_ratio,
    band_kpa,
    pressure_kpa,
    duration_s,
    dt_s
});
mergeable!(PneumoBodeArgs {
    volume_ml,
    supply_kpa,
    c_fill,
    vent_ratio,
    band_kpa,
    mean_kpa,
    amplitude_kpa,
    f_min_hz,
    f_max_hz,
    points,
    calibrate_hz,
});

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub global: GlobalConfig,
    #[serde(default)]
    pub geometry_volume: GeometryVolumeArgs,
    #[serde(default)]
    pub pouch_curve: PouchCurveArgs,
    #[serde(default)]
    pub haa_torque: HaaTorqueArgs,
    #[serde(default)]
    pub pneumo_step: PneumoStepArgs,
    #[serde(default)]
    pub pneumo_bode: PneumoBodeArgs,
    #[serde(default)]
    pub design_optimize: DesignOptimizeArgs,
    #[serde(default)]
    pub sim_assist: SimAssistArgs,
    #[serde(default)]
    pub emg_run: EmgRunArgs,
}
