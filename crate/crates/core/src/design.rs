//! Width-demand synthesis and minimum-volume spindle search.
//!
//! A bending actuator needs less force far from the fold to produce the same
//! moment. With distance `x` from the fold, the force demand is
//! `m_target / max(x, x_floor)` and the cross-section that delivers it at the
//! design pressure has free width `F / (k_eff · 0.001 · p_design)`. Adding the
//! seals and clamping to `[w_min_end, w2]` gives the width demand. Within
//! `x_floor` of the fold the load is carried by the fold width itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{self, SpindleProfile, VolumeModelConfig};
use crate::pneumatics::{self, PneumaticCircuit};

pub const DEFAULT_X_FLOOR_MM: f64 = 5.0;
pub const DEFAULT_WIDTH_STEP_MM: f64 = 2.0;
pub const DEFAULT_LENGTH_STEP_MM: f64 = 10.0;
/// Peak abduction moment measured at 90 kPa, used to anchor `k_eff`.
pub const ANCHOR_MOMENT_NM: f64 = 9.7;
pub const ANCHOR_PRESSURE_KPA: f64 = 90.0;

const REFINE_ROUNDS: usize = 4;
const REFINE_SHRINK: f64 = 0.5;
/// Feasibility slack for floating-point round-off (mm and N·m).
const SLACK: f64 = 1e-9;
const RISE_DURATION_S: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn fixed(v: f64) -> Self {
        Self { min: v, max: v }
    }

    fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.min <= self.max
    }

    /// `min, min + step, …` up to and including `max`.
    fn grid(&self, step: f64) -> Vec<f64> {
        if self.min == self.max {
            return vec![self.min];
        }
        let n = ((self.max - self.min) / step + 1e-9).floor() as usize;
        let mut v: Vec<f64> = (0..=n).map(|i| self.min + i as f64 * step).collect();
        if self.max - v[v.len() - 1] > 1e-9 {
            v.push(self.max);
        }
        v
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignConstraints {
    /// Required moment at the fold (N·m).
    pub m_target: f64,
    /// Design pressure (kPa).
    pub p_design: f64,
    /// Minimum end width (mm).
    pub w_min_end: f64,
    /// Fold width; `None` lets the search vary it within `w2_bounds`.
    pub w2_fixed: Option<f64>,
    pub w2_bounds: Bounds,
    pub lu: Bounds,
    pub lp: Bounds,
    pub w1: Bounds,
    pub w3: Bounds,
    /// Force-effectiveness coefficient.
    pub k_eff: f64,
    pub w_seal1: f64,
    pub w_seal2: f64,
    pub x_floor: f64,
    pub width_step: f64,
    pub length_step: f64,
}

impl DesignConstraints {
    /// Search box around the reference-scale actuator: fold width 90 mm, segment
    /// lengths 162/192 mm, both end widths free in `[w_min_end, 90]`, and
    /// `k_eff` anchored on the uniform actuator.
    pub fn reference_box(m_target: f64, w_min_end: f64) -> Self {
        let u = SpindleProfile::ucaa();
        Self {
            m_target,
            p_design: ANCHOR_PRESSURE_KPA,
            w_min_end,
            w2_fixed: Some(u.w2),
            w2_bounds: Bounds::fixed(u.w2),
            lu: Bounds::fixed(u.lu),
            lp: Bounds::fixed(u.lp),
            w1: Bounds::new(w_min_end, u.w2),
            w3: Bounds::new(w_min_end, u.w2),
            k_eff: calibrate_k_eff(
                &u,
                ANCHOR_MOMENT_NM,
                ANCHOR_PRESSURE_KPA,
                DEFAULT_X_FLOOR_MM,
            ),
            w_seal1: u.w_seal1,
            w_seal2: u.w_seal2,
            x_floor: DEFAULT_X_FLOOR_MM,
            width_step: DEFAULT_WIDTH_STEP_MM,
            length_step: DEFAULT_LENGTH_STEP_MM,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m_target > 0.0) {
            return Err(domain(format!(
                "m_target must be positive, got {}",
                self.m_target
            )));
        }
        if !(self.p_design > 0.0) {
            return Err(domain(format!(
                "p_design must be positive, got {}",
                self.p_design
            )));
        }
        if !(self.w_min_end > 2.0 * self.w_seal1) {
            return Err(domain(format!(
                "w_min_end = {} must exceed both seals (2 x {})",
                self.w_min_end, self.w_seal1
            )));
        }
        for (name, b) in [
            ("lu", self.lu),
            ("lp", self.lp),
            ("w1", self.w1),
            ("w3", self.w3),
            ("w2", self.w2_bounds),
        ] {
            if !b.is_valid() || b.min <= 0.0 {
                return Err(domain(format!(
                    "{name} bounds [{}, {}] are empty",
                    b.min, b.max
                )));
            }
        }
        if !(self.k_eff > 0.0) || !(self.x_floor > 0.0) {
            return Err(domain("k_eff and x_floor must be positive"));
        }
        if !(self.width_step > 0.0 && self.length_step > 0.0) {
            return Err(domain("grid steps must be positive"));
        }
        Ok(())
    }

    fn w2_range(&self) -> Bounds {
        self.w2_fixed.map_or(self.w2_bounds, Bounds::fixed)
    }

    /// Varying the fold width leaves the regime the surrogate was anchored in.
    pub fn is_extrapolative(&self) -> bool {
        let b = self.w2_range();
        b.min != b.max
    }

    /// Force a unit free width delivers at the design pressure (N/mm).
    fn force_per_width(&self) -> f64 {
        self.k_eff * 0.001 * self.p_design
    }

    /// Parse a constraint file; missing `k_eff` means "anchor on the uniform
    /// actuator". Unknown keys are rejected.
    pub fn from_toml(text: &str) -> Result<Self> {
        let f: ConstraintFile =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        let u = SpindleProfile::ucaa();
        let w_seal1 = f.w_seal1_mm.unwrap_or(u.w_seal1);
        let x_floor = f.x_floor_mm.unwrap_or(DEFAULT_X_FLOOR_MM);
        let k_eff = f
            .k_eff
            .unwrap_or_else(|| calibrate_k_eff(&u, ANCHOR_MOMENT_NM, ANCHOR_PRESSURE_KPA, x_floor));
        let bounds = |lo: f64, hi: Option<f64>| Bounds::new(lo, hi.unwrap_or(lo));
        let c = Self {
            m_target: f.m_target_nm,
            p_design: f.p_design_kpa,
            w_min_end: f.w_min_end_mm,
            w2_fixed: f.w2_fixed_mm,
            w2_bounds: Bounds::new(
                f.w2_min_mm.or(f.w2_fixed_mm).unwrap_or(u.w2),
                f.w2_max_mm.or(f.w2_fixed_mm).unwrap_or(u.w2),
            ),
            lu: bounds(f.lu_min_mm, f.lu_max_mm),
            lp: bounds(f.lp_min_mm, f.lp_max_mm),
            w1: bounds(f.w1_min_mm, f.w1_max_mm),
            w3: bounds(f.w3_min_mm, f.w3_max_mm),
            k_eff,
            w_seal1,
            w_seal2: f.w_seal2_mm.unwrap_or(u.w_seal2),
            x_floor,
            width_step: f.width_step_mm.unwrap_or(DEFAULT_WIDTH_STEP_MM),
            length_step: f.length_step_mm.unwrap_or(DEFAULT_LENGTH_STEP_MM),
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    m_target_nm: f64,
    p_design_kpa: f64,
    w_min_end_mm: f64,
    w2_fixed_mm: Option<f64>,
    w2_min_mm: Option<f64>,
    w2_max_mm: Option<f64>,
    lu_min_mm: f64,
    lu_max_mm: Option<f64>,
    lp_min_mm: f64,
    lp_max_mm: Option<f64>,
    w1_min_mm: f64,
    w1_max_mm: Option<f64>,
    w3_min_mm: f64,
    w3_max_mm: Option<f64>,
    k_eff: Option<f64>,
    w_seal1_mm: Option<f64>,
    w_seal2_mm: Option<f64>,
    x_floor_mm: Option<f64>,
    width_step_mm: Option<f64>,
    length_step_mm: Option<f64>,
}

/// `k_eff` at which `profile` at `p_kpa` delivers exactly `m_target` at the
/// edge of the fold region.
pub fn calibrate_k_eff(profile: &SpindleProfile, m_target: f64, p_kpa: f64, x_floor: f64) -> f64 {
    let free = profile.w2 - 2.0 * profile.w_seal1;
    m_target * 1000.0 / (free * 0.001 * p_kpa * x_floor)
}

/// Width demand for one fold width and pair of segment lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthDemand {
    pub lu: f64,
    pub lp: f64,
    pub w2: f64,
    pub w_min_end: f64,
    w_seals: f64,
    m_target: f64,
    force_per_width: f64,
    x_floor: f64,
}

impl WidthDemand {
    /// Demand before clamping at distance `x` from the fold (mm).
    pub fn raw(&self, x: f64) -> f64 {
        let force = self.m_target * 1000.0 / x.max(self.x_floor);
        force / self.force_per_width + self.w_seals
    }

    /// Clamped demand at distance `x` from the fold (mm).
    pub fn width(&self, x: f64) -> f64 {
        if x < self.x_floor {
            return self.w2;
        }
        self.raw(x).clamp(self.w_min_end, self.w2)
    }
}

/// Width demand for segment lengths `span = (lu, lp)` with the fold width
/// taken from the constraints (lower bound when it is free).
pub fn required_width_profile(c: &DesignConstraints, span: (f64, f64)) -> Result<WidthDemand> {
    c.validate()?;
    demand_for(c, span.0, span.1, c.w2_range().min)
}

fn demand_for(c: &DesignConstraints, lu: f64, lp: f64, w2: f64) -> Result<WidthDemand> {
    if !(lu > 0.0 && lp > 0.0) {
        return Err(domain(format!(
            "segment lengths must be positive: ({lu}, {lp})"
        )));
    }
    let d = WidthDemand {
        lu,
        lp,
        w2,
        w_min_end: c.w_min_end,
        w_seals: 2.0 * c.w_seal1,
        m_target: c.m_target,
        force_per_width: c.force_per_width(),
        x_floor: c.x_floor,
    };
    // raw demand is smallest at the farthest point
    let far = lu.max(lp).max(c.x_floor);
    if d.raw(far) > w2 {
        return Err(Error::Infeasible(format!(
            "width demand {:.3} mm at {far} mm from the fold exceeds the fold width {w2} mm",
            d.raw(far)
        )));
    }
    if c.w_min_end > w2 {
        return Err(Error::Infeasible(format!(
            "w_min_end = {} exceeds the fold width {w2}",
            c.w_min_end
        )));
    }
    Ok(d)
}

/// Sample positions from `x_floor` to `len`, spaced at most 1 mm, endpoints
/// included. The gap between a linear planform and the convex demand is
/// concave, so checking the endpoints of each interval is exact.
fn sample_points(len: f64, x_floor: f64) -> impl Iterator<Item = f64> {
    let span = (len - x_floor).max(0.0);
    let n = span.ceil().max(1.0) as usize;
    let active = len > x_floor;
    (0..=n).filter(move |_| active).map(move |i| {
        if i == n {
            len
        } else {
            x_floor + span * i as f64 / n as f64
        }
    })
}

/// Width at distance `x` from the fold along the upper (`upper = true`) or
/// lower segment.
fn profile_width_from_fold(p: &SpindleProfile, x: f64, upper: bool) -> f64 {
    if upper {
        p.w2 + (p.w1 - p.w2) * (x / p.lu)
    } else {
        p.w2 + (p.w3 - p.w2) * (x / p.lp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Margins {
    width: f64,
    torque: f64,
}

fn margins(p: &SpindleProfile, c: &DesignConstraints, d: &WidthDemand) -> Margins {
    let fpw = c.force_per_width();
    let free_fold = p.w2 - 2.0 * p.w_seal1;
    // the fold region delivers its moment at x_floor through the fold width
    let mut capacity = free_fold * fpw * c.x_floor / 1000.0;
    let mut width = f64::INFINITY;
    for (upper, len) in [(true, p.lu), (false, p.lp)] {
        for x in sample_points(len, c.x_floor) {
            let w = profile_width_from_fold(p, x, upper);
            width = width.min(w - d.width(x));
            capacity = capacity.min((w - 2.0 * p.w_seal1) * fpw * x / 1000.0);
        }
    }
    let ends = p.w1.min(p.w3) - c.w_min_end;
    Margins {
        width: width.min(ends),
        torque: capacity - c.m_target,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub profile: SpindleProfile,
    pub volume_ml: f64,
    /// Moment capacity minus `m_target` (N·m).
    pub torque_margin: f64,
    /// Smallest clearance between planform and width demand (mm).
    pub width_margin: f64,
    /// 10–90 % rise time of the reference circuit at the design pressure (s).
    pub rise_time_index: Option<f64>,
    pub feasible: bool,
    /// The fold width was varied, outside the anchored regime.
    pub extrapolative: bool,
}

/// One evaluated grid point of the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub lu: f64,
    pub lp: f64,
    pub volume_ml: f64,
    pub torque_margin: f64,
    pub width_margin: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeOutcome {
    pub report: DesignReport,
    /// Every grid point, in grid order.
    pub frontier: Vec<FrontierPoint>,
}

fn build_profile(
    c: &DesignConstraints,
    lu: f64,
    lp: f64,
    w1: f64,
    w2: f64,
    w3: f64,
) -> SpindleProfile {
    let base = SpindleProfile::ssaa();
    SpindleProfile {
        lu,
        lp,
        w1,
        w2,
        w3,
        w_seal1: c.w_seal1,
        w_seal2: c.w_seal2,
        ..base
    }
}

fn evaluate_point(
    c: &DesignConstraints,
    cfg: &VolumeModelConfig,
    [lu, lp, w1, w2, w3]: [f64; 5],
) -> FrontierPoint {
    let profile = build_profile(c, lu, lp, w1, w2, w3);
    let volume = geometry::inflated_volume(&profile, cfg).unwrap_or(f64::INFINITY);
    let (m, feasible) = match demand_for(c, lu, lp, w2) {
        Ok(d) if profile.validate().is_ok() => {
            let m = margins(&profile, c, &d);
            (
                m,
                m.width >= -SLACK && m.torque >= -SLACK && volume.is_finite(),
            )
        }
        _ => (
            Margins {
                width: f64::NEG_INFINITY,
                torque: f64::NEG_INFINITY,
            },
            false,
        ),
    };
    FrontierPoint {
        w1,
        w2,
        w3,
        lu,
        lp,
        volume_ml: volume,
        torque_margin: m.torque,
        width_margin: m.width,
        feasible,
    }
}

/// Strict preference: smaller volume, then larger torque margin, then
/// lexicographically smaller `(w1, w3)`.
fn better(a: &FrontierPoint, b: &FrontierPoint) -> bool {
    if a.volume_ml != b.volume_ml {
        return a.volume_ml < b.volume_ml;
    }
    if a.torque_margin != b.torque_margin {
        return a.torque_margin > b.torque_margin;
    }
    (a.w1, a.w3) < (b.w1, b.w3)
}

fn coords(p: &FrontierPoint) -> [f64; 5] {
    [p.lu, p.lp, p.w1, p.w2, p.w3]
}

/// Deterministic grid search over `(w1, w3)` (and lengths/fold width when
/// their bounds are open), refined by coordinate descent with step shrink
/// 0.5 over several rounds. Returns the minimum-volume feasible design; an
/// empty feasible set yields a report flagged infeasible.
pub fn optimize_spindle(
    c: &DesignConstraints,
    volume_cfg: &VolumeModelConfig,
) -> Result<OptimizeOutcome> {
    c.validate()?;
    volume_cfg.validate()?;
    let w2_range = c.w2_range();
    let axes = [
        c.lu.grid(c.length_step),
        c.lp.grid(c.length_step),
        c.w1.grid(c.width_step),
        w2_range.grid(c.width_step),
        c.w3.grid(c.width_step),
    ];
    let mut points = Vec::new();
    for &lu in &axes[0] {
        for &lp in &axes[1] {
            for &w1 in &axes[2] {
                for &w2 in &axes[3] {
                    for &w3 in &axes[4] {
                        points.push([lu, lp, w1, w2, w3]);
                    }
                }
            }
        }
    }
    let frontier: Vec<FrontierPoint> = points
        .par_iter()
        .map(|&x| evaluate_point(c, volume_cfg, x))
        .collect();

    let best = frontier
        .iter()
        .filter(|p| p.feasible)
        .fold(None::<&FrontierPoint>, |acc, p| match acc {
            Some(a) if !better(p, a) => Some(a),
            _ => Some(p),
        })
        .copied();

    let Some(mut best) = best else {
        // report the point closest to feasibility
        let least_bad = frontier
            .iter()
            .max_by(|a, b| {
                a.width_margin
                    .min(a.torque_margin)
                    .total_cmp(&b.width_margin.min(b.torque_margin))
            })
            .copied()
            .ok_or_else(|| Error::Infeasible("empty search grid".into()))?;
        let profile = build_profile(
            c,
            least_bad.lu,
            least_bad.lp,
            least_bad.w1,
            least_bad.w2,
            least_bad.w3,
        );
        let report = DesignReport {
            profile,
            volume_ml: least_bad.volume_ml,
            torque_margin: least_bad.torque_margin,
            width_margin: least_bad.width_margin,
            rise_time_index: None,
            feasible: false,
            extrapolative: c.is_extrapolative(),
        };
        return Ok(OptimizeOutcome { report, frontier });
    };

    let bounds = [c.lu, c.lp, c.w1, w2_range, c.w3];
    let mut steps = [
        c.length_step * REFINE_SHRINK,
        c.length_step * REFINE_SHRINK,
        c.width_step * REFINE_SHRINK,
        c.width_step * REFINE_SHRINK,
        c.width_step * REFINE_SHRINK,
    ];
    for _ in 0..REFINE_ROUNDS {
        for axis in 0..5 {
            if bounds[axis].min == bounds[axis].max {
                continue;
            }
            for dir in [-1.0, 1.0] {
                let mut x = coords(&best);
                x[axis] = bounds[axis].clamp(x[axis] + dir * steps[axis]);
                let cand = evaluate_point(c, volume_cfg, x);
                if cand.feasible && better(&cand, &best) {
                    best = cand;
                }
            }
        }
        for s in &mut steps {
            *s *= REFINE_SHRINK;
        }
    }

    let profile = build_profile(c, best.lu, best.lp, best.w1, best.w2, best.w3);
    let rise = rise_time_index(&PneumaticCircuit::default(), best.volume_ml, c.p_design)?;
    let report = DesignReport {
        profile,
        volume_ml: best.volume_ml,
        torque_margin: best.torque_margin,
        width_margin: best.width_margin,
        rise_time_index: rise,
        feasible: true,
        extrapolative: c.is_extrapolative(),
    };
    Ok(OptimizeOutcome { report, frontier })
}

fn rise_time_index(
    circuit: &PneumaticCircuit,
    volume_ml: f64,
    p_design: f64,
) -> Result<Option<f64>> {
    let r = pneumatics::step_response(
        &circuit.with_volume(volume_ml),
        p_design,
        RISE_DURATION_S,
        pneumatics::DEFAULT_DT,
    )?;
    Ok(r.rise_time)
}

/// Volume, constraint margins and rise-time index of a given profile.
pub fn evaluate_design(
    profile: &SpindleProfile,
    c: &DesignConstraints,
    circuit: &PneumaticCircuit,
) -> Result<DesignReport> {
    c.validate()?;
    profile.validate()?;
    let cfg = VolumeModelConfig::default();
    let volume = geometry::inflated_volume(profile, &cfg)?;
    let (m, demand_ok) = match demand_for(c, profile.lu, profile.lp, profile.w2) {
        Ok(d) => (margins(profile, c, &d), true),
        Err(Error::Infeasible(_)) => (
            Margins {
                width: f64::NEG_INFINITY,
                torque: f64::NEG_INFINITY,
            },
            false,
        ),
        Err(e) => return Err(e),
    };
    Ok(DesignReport {
        profile: *profile,
        volume_ml: volume,
        torque_margin: m.torque,
        width_margin: m.width,
        rise_time_index: rise_time_index(circuit, volume, c.p_design)?,
        feasible: demand_ok && m.width >= -SLACK && m.torque >= -SLACK,
        extrapolative: profile.w2 != c.w2_range().min || c.is_extrapolative(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demand(m: f64) -> WidthDemand {
        let c = DesignConstraints::reference_box(m, 50.0);
        required_width_profile(&c, (162.0, 192.0)).unwrap()
    }

    #[test]
    fn anchor_calibration() {
        let k = calibrate_k_eff(&SpindleProfile::ucaa(), 9.7, 90.0, 5.0);
        // (90 − 15) · k · 0.09 · 5 / 1000 = 9.7
        assert!((75.0 * k * 0.09 * 5.0 / 1000.0 - 9.7).abs() < 1e-12);
        let c = DesignConstraints::reference_box(9.7, 50.0);
        let d = required_width_profile(&c, (162.0, 192.0)).unwrap();
        let m = margins(&SpindleProfile::ucaa(), &c, &d);
        assert!(m.torque.abs() < 1e-9, "{m:?}");
    }

    #[test]
    fn vanishing_moment_hits_the_floor() {
        let d = demand(1e-12);
        for x in [5.0, 10.0, 80.0, 162.0] {
            assert_eq!(d.width(x), 50.0);
        }
    }

    #[test]
    fn pressure_scales_raw_demand() {
        let mut c = DesignConstraints::reference_box(9.7, 50.0);
        let a = required_width_profile(&c, (162.0, 192.0)).unwrap();
        c.p_design *= 2.0;
        let b = required_width_profile(&c, (162.0, 192.0)).unwrap();
        for x in [5.0, 7.0, 20.0, 100.0] {
            let (ra, rb) = (a.raw(x) - 15.0, b.raw(x) - 15.0);
            assert!((rb - ra / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plateau_then_floor() {
        let d = demand(9.7);
        // raw(x) = 375/x + 15 for the anchored surrogate
        assert!((d.raw(10.0) - 52.5).abs() < 1e-9);
        assert_eq!(d.width(2.0), 90.0);
        assert!((d.width(5.0) - 90.0).abs() < 1e-9);
        let x_floor_hit = 375.0 / (50.0 - 15.0);
        assert!(d.width(x_floor_hit - 0.1) > 50.0);
        assert_eq!(d.width(x_floor_hit + 0.1), 50.0);
        let mut last = f64::INFINITY;
        for i in 0..=192 {
            let w = d.width(i as f64);
            assert!(w <= last);
            last = w;
        }
    }

    #[test]
    fn demand_beyond_upper_bound_is_infeasible() {
        let c = DesignConstraints::reference_box(2000.0, 50.0);
        assert!(matches!(
            required_width_profile(&c, (162.0, 192.0)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn degenerate_box_returns_uniform() {
        let c = DesignConstraints::reference_box(9.7, 90.0);
        let out = optimize_spindle(&c, &VolumeModelConfig::default()).unwrap();
        let p = out.report.profile;
        assert!(out.report.feasible);
        assert_eq!((p.w1, p.w2, p.w3), (90.0, 90.0, 90.0));
    }

    #[test]
    fn relaxing_the_floor_never_hurts() {
        let cfg = VolumeModelConfig::default();
        let mut last = f64::INFINITY;
        for w_min in [90.0, 80.0, 70.0, 60.0, 50.0] {
            let out = optimize_spindle(&DesignConstraints::reference_box(9.0, w_min), &cfg).unwrap();
            assert!(out.report.feasible);
            assert!(out.report.volume_ml <= last);
            last = out.report.volume_ml;
        }
    }

    #[test]
    fn infeasible_box_is_reported_not_raised() {
        let mut c = DesignConstraints::reference_box(9.7, 50.0);
        c.m_target = 50.0;
        let out = optimize_spindle(&c, &VolumeModelConfig::default()).unwrap();
        assert!(!out.report.feasible);
        assert!(out.frontier.iter().all(|p| !p.feasible));
    }

    #[test]
    fn evaluation_flags_end_width_violation() {
        let c = DesignConstraints::reference_box(9.0, 55.0);
        let r = evaluate_design(&SpindleProfile::ssaa(), &c, &PneumaticCircuit::default()).unwrap();
        assert!(!r.feasible);
        assert!(r.width_margin < 0.0);
        let c = DesignConstraints::reference_box(9.0, 50.0);
        let a = evaluate_design(&SpindleProfile::ssaa(), &c, &PneumaticCircuit::default()).unwrap();
        let b = evaluate_design(&SpindleProfile::ssaa(), &c, &PneumaticCircuit::default()).unwrap();
        assert!(a.feasible);
        assert_eq!(a, b);
    }

    #[test]
    fn constraint_file() {
        let text = "m_target_nm = 9.0\np_design_kpa = 90\nw_min_end_mm = 50\nw2_fixed_mm = 90\n\
                    lu_min_mm = 162\nlp_min_mm = 192\nw1_min_mm = 50\nw1_max_mm = 90\n\
                    w3_min_mm = 50\nw3_max_mm = 90\n";
        let c = DesignConstraints::from_toml(text).unwrap();
        assert_eq!(c, DesignConstraints::reference_box(9.0, 50.0));
        assert!(DesignConstraints::from_toml(&format!("{text}bogus = 1\n")).is_err());
    }

    #[test]
    fn bounds_grid() {
        assert_eq!(
            Bounds::new(50.0, 55.0).grid(2.0),
            vec![50.0, 52.0, 54.0, 55.0]
        );
        assert_eq!(Bounds::fixed(3.0).grid(2.0), vec![3.0]);
    }
}
