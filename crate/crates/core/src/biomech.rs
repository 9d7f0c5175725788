//! Shoulder gravity torque, the study's raise/hold/lower trajectory, measured
//! actuator moment surfaces and the resulting assistance time series.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::io;

pub const GRAVITY: f64 = 9.81;

/// Hand load used in the loaded study conditions (kg).
pub const STUDY_LOAD_KG: f64 = 1.56;
/// Abduction actuator pressure during the study (kPa).
pub const STUDY_CAA_PRESSURE_KPA: f64 = 80.0;
/// Adduction actuator pressure when both actuators run (kPa).
pub const STUDY_HAA_PRESSURE_KPA: f64 = 50.0;

pub const REST_END_S: f64 = 5.0;
pub const RAISE_END_S: f64 = 9.0;
pub const HOLD_END_S: f64 = 14.0;
pub const LOWER_END_S: f64 = 18.0;
pub const RAISED_ANGLE_DEG: f64 = 90.0;

/// Segment coefficients for the whole arm (upper arm + forearm + hand).
///
/// These are user-editable inputs taken from common segment tables, not
/// measured values; see `config/anthropometry.toml`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmCoefficients {
    /// Arm mass as a fraction of body mass.
    pub mass_fraction: f64,
    /// Center of mass along the arm, as a fraction of arm length.
    pub com_fraction: f64,
    /// Shoulder-to-hand-center length as a fraction of body height.
    pub length_fraction: f64,
    /// Hand load position as a fraction of arm length.
    pub load_lever_fraction: f64,
}

impl Default for ArmCoefficients {
    fn default() -> Self {
        Self {
            mass_fraction: 0.050,
            com_fraction: 0.456,
            length_fraction: 0.386,
            load_lever_fraction: 1.0,
        }
    }
}

impl ArmCoefficients {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        for (name, v) in [
            ("mass_fraction", c.mass_fraction),
            ("com_fraction", c.com_fraction),
            ("length_fraction", c.length_fraction),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if !(c.load_lever_fraction > 0.0) {
            return Err(Error::Config("load_lever_fraction must be positive".into()));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArmModel {
    pub body_mass: f64,
    /// Body height (cm).
    pub height: f64,
    pub arm_mass_fraction: f64,
    pub com_fraction: f64,
    /// Shoulder-to-hand-center length (m).
    pub arm_length: f64,
    pub load_mass: f64,
    /// Distance from shoulder to the hand load (m).
    pub load_lever: f64,
}

impl ArmModel {
    pub fn arm_mass(&self) -> f64 {
        self.arm_mass_fraction * self.body_mass
    }

    /// Static moment about the shoulder per unit `g·sin(theta)` (kg·m).
    pub fn static_moment(&self) -> f64 {
        self.arm_mass() * self.com_fraction * self.arm_length + self.load_mass * self.load_lever
    }
}

pub fn anthropometric_arm(
    body_mass: f64,
    height_cm: f64,
    load: f64,
    coeffs: &ArmCoefficients,
) -> Result<ArmModel> {
    if !(body_mass > 0.0) || !(height_cm > 0.0) {
        return Err(domain(format!(
            "body mass and height must be positive, got {body_mass} kg, {height_cm} cm"
        )));
    }
    if !(load >= 0.0) {
        return Err(domain(format!("load must be >= 0, got {load}")));
    }
    let arm_length = coeffs.length_fraction * height_cm / 100.0;
    Ok(ArmModel {
        body_mass,
        height: height_cm,
        arm_mass_fraction: coeffs.mass_fraction,
        com_fraction: coeffs.com_fraction,
        arm_length,
        load_mass: load,
        load_lever: coeffs.load_lever_fraction * arm_length,
    })
}

/// Gravity moment about the shoulder (N·m) at elevation `theta` (deg).
pub fn gravity_torque(a: &ArmModel, theta: f64) -> Result<f64> {
    if !(0.0..=180.0).contains(&theta) {
        return Err(domain(format!(
            "elevation must lie in [0, 180] deg, got {theta}"
        )));
    }
    Ok(GRAVITY * theta.to_radians().sin() * a.static_moment())
}

/// Arm elevation (deg) at time `t` (s) of one protocol repetition: rest,
/// 4 s raise to 90°, hold, 4 s lower.
pub fn protocol_trajectory(t: f64) -> Result<f64> {
    if !(0.0..=LOWER_END_S).contains(&t) {
        return Err(domain(format!(
            "t must lie in [0, {LOWER_END_S}] s, got {t}"
        )));
    }
    let ramp = RAISED_ANGLE_DEG / (RAISE_END_S - REST_END_S);
    Ok(if t <= REST_END_S {
        0.0
    } else if t <= RAISE_END_S {
        ramp * (t - REST_END_S)
    } else if t <= HOLD_END_S {
        RAISED_ANGLE_DEG
    } else {
        RAISED_ANGLE_DEG - ramp * (t - HOLD_END_S)
    })
}

/// Actuator moment over a rectangular (angle, pressure) grid with bilinear
/// interpolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSurface {
    pub angles: Vec<f64>,
    pub pressures: Vec<f64>,
    /// `moments[i][j]` at `(angles[i], pressures[j])` (N·m).
    pub moments: Vec<Vec<f64>>,
    pub provenance: String,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1])
}

fn bracket(axis: &[f64], x: f64) -> (usize, f64) {
    let i = match axis.partition_point(|&a| a <= x) {
        0 => 0,
        k if k >= axis.len() => axis.len() - 2,
        k => k - 1,
    };
    let t = (x - axis[i]) / (axis[i + 1] - axis[i]);
    (i, t)
}

impl MomentSurface {
    pub fn new(
        angles: Vec<f64>,
        pressures: Vec<f64>,
        moments: Vec<Vec<f64>>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if !strictly_increasing(&angles) || !strictly_increasing(&pressures) {
            return Err(domain(
                "surface axes must have >= 2 strictly increasing values",
            ));
        }
        if moments.len() != angles.len() || moments.iter().any(|row| row.len() != pressures.len()) {
            return Err(domain("surface grid is not rectangular"));
        }
        Ok(Self {
            angles,
            pressures,
            moments,
            provenance: provenance.into(),
        })
    }

    /// Demonstration surface: linear in pressure, peaking at 9.7 N·m at
    /// (90°, 90 kPa). Only that node is a measured value.
    pub fn synthetic_demo() -> Self {
        let angles = vec![0.0, 30.0, 60.0, 90.0, 120.0, 150.0, 180.0];
        let shape = [0.30, 0.60, 0.88, 1.0, 0.86, 0.62, 0.35];
        let pressures: Vec<f64> = (0..=9).map(|i| 10.0 * i as f64).collect();
        let moments = shape
            .iter()
            .map(|s| pressures.iter().map(|p| 9.7 * s * p / 90.0).collect())
            .collect();
        Self::new(
            angles,
            pressures,
            moments,
            "synthetic demonstration surface; only (90 deg, 90 kPa, 9.7 Nm) is a measured anchor",
        )
        .expect("demo surface is rectangular")
    }

    pub fn angle_range(&self) -> (f64, f64) {
        (self.angles[0], self.angles[self.angles.len() - 1])
    }

    pub fn pressure_range(&self) -> (f64, f64) {
        (self.pressures[0], self.pressures[self.pressures.len() - 1])
    }

    /// Bilinear value at `(angle, pressure)`. Out-of-range queries are clamped
    /// to the grid edge when `clamp` is set (second element reports it) and
    /// rejected otherwise.
    pub fn eval(&self, angle: f64, pressure: f64, clamp: bool) -> Result<(f64, bool)> {
        let (a0, a1) = self.angle_range();
        let (p0, p1) = self.pressure_range();
        let outside = !(a0..=a1).contains(&angle) || !(p0..=p1).contains(&pressure);
        if outside && !clamp {
            return Err(domain(format!(
                "query ({angle} deg, {pressure} kPa) outside surface [{a0}, {a1}] x [{p0}, {p1}]"
            )));
        }
        let (a, p) = (angle.clamp(a0, a1), pressure.clamp(p0, p1));
        let (i, ta) = bracket(&self.angles, a);
        let (j, tp) = bracket(&self.pressures, p);
        let m = &self.moments;
        let v = (1.0 - ta) * ((1.0 - tp) * m[i][j] + tp * m[i][j + 1])
            + ta * ((1.0 - tp) * m[i + 1][j] + tp * m[i + 1][j + 1]);
        Ok((v, outside))
    }

    pub fn scaled(&self, c: f64) -> Self {
        let moments = self
            .moments
            .iter()
            .map(|r| r.iter().map(|v| v * c).collect())
            .collect();
        Self {
            moments,
            ..self.clone()
        }
    }

    /// Parse `angle_deg,pressure_kpa,moment_nm` rows. Lines starting with `#`
    /// are comments; `# provenance: …` sets the provenance tag.
    pub fn from_csv(text: &str) -> Result<Self> {
        let table = io::read_table(text)?;
        table.expect_header(&["angle_deg", "pressure_kpa", "moment_nm"])?;
        let provenance = table
            .comments
            .iter()
            .find_map(|c| c.strip_prefix("provenance:").map(|s| s.trim().to_string()))
            .unwrap_or_else(|| "unspecified".to_string());

        let mut angles: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
        let mut pressures: Vec<f64> = table.rows.iter().map(|r| r[1]).collect();
        for v in [&mut angles, &mut pressures] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        if angles.len() * pressures.len() != table.rows.len() {
            return Err(Error::Parse(format!(
                "surface has {} rows but {} angles x {} pressures",
                table.rows.len(),
                angles.len(),
                pressures.len()
            )));
        }
        let mut moments = vec![vec![f64::NAN; pressures.len()]; angles.len()];
        for r in &table.rows {
            let i = angles
                .iter()
                .position(|&a| a == r[0])
                .expect("angle present");
            let j = pressures
                .iter()
                .position(|&p| p == r[1])
                .expect("pressure present");
            if !moments[i][j].is_nan() {
                return Err(Error::Parse(format!("duplicate node ({}, {})", r[0], r[1])));
            }
            moments[i][j] = r[2];
        }
        Self::new(angles, pressures, moments, provenance)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# provenance: {}\nangle_deg,pressure_kpa,moment_nm\n",
            self.provenance
        );
        for (i, a) in self.angles.iter().enumerate() {
            for (j, p) in self.pressures.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    io::fmt_num(*a),
                    io::fmt_num(*p),
                    io::fmt_num(self.moments[i][j])
                ));
            }
        }
        out
    }
}

/// Piecewise-constant pressure command: each `(t, p)` holds until the next.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureSchedule {
    pub points: Vec<(f64, f64)>,
}

impl PressureSchedule {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("schedule needs at least one point"));
        }
        if points[0].0 > 0.0 {
            return Err(domain("schedule must start at t <= 0"));
        }
        if !points.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(domain("schedule times must be strictly increasing"));
        }
        if points.iter().any(|&(_, p)| !(p >= 0.0)) {
            return Err(domain("schedule pressures must be >= 0"));
        }
        Ok(Self { points })
    }

    /// Pressure applied at the onset of elevation and released to zero at
    /// the onset of lowering.
    pub fn study(pressure: f64) -> Self {
        Self::new(vec![(0.0, 0.0), (REST_END_S, pressure), (HOLD_END_S, 0.0)]).expect("valid")
    }

    pub fn zero() -> Self {
        Self::new(vec![(0.0, 0.0)]).expect("valid")
    }

    pub fn at(&self, t: f64) -> f64 {
        let k = self.points.partition_point(|&(ti, _)| ti <= t);
        self.points[k.saturating_sub(1)].1
    }

    /// Parse `t_s,pressure_kpa` rows.
    pub fn from_csv(text: &str) -> Result<Self> {
        let table = io::read_table(text)?;
        table.expect_header(&["t_s", "pressure_kpa"])?;
        Self::new(table.rows.iter().map(|r| (r[0], r[1])).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssistSample {
    pub t: f64,
    pub angle: f64,
    pub pressure: f64,
    /// Gravity moment (N·m).
    pub m_g: f64,
    /// Actuator moment, taken as the joint moment (N·m).
    pub m_act: f64,
    /// `max(m_g − m_act, 0)`.
    pub residual: f64,
    /// `m_act / m_g`; `None` where the arm hangs (`m_g == 0`).
    pub assist_fraction: Option<f64>,
    /// The surface query was clamped to its grid.
    pub clamped: bool,
}

/// Assistance over one protocol repetition sampled every `dt` seconds.
pub fn assistance_profile(
    arm: &ArmModel,
    surface: &MomentSurface,
    schedule: &PressureSchedule,
    dt: f64,
    clamp: bool,
) -> Result<Vec<AssistSample>> {
    if !(dt > 0.0) {
        return Err(domain(format!("dt must be positive, got {dt}")));
    }
    let n = (LOWER_END_S / dt).round() as usize;
    (0..=n)
        .map(|i| {
            let t = (i as f64 * dt).min(LOWER_END_S);
            let angle = protocol_trajectory(t)?;
            let pressure = schedule.at(t);
            let m_g = gravity_torque(arm, angle)?;
            let (m_act, clamped) = if pressure == 0.0 {
                (0.0, false)
            } else {
                surface.eval(angle, pressure, clamp)?
            };
            Ok(AssistSample {
                t,
                angle,
                pressure,
                m_g,
                m_act,
                residual: (m_g - m_act).max(0.0),
                assist_fraction: (m_g > 0.0).then(|| m_act / m_g),
                clamped,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cohort() -> ArmModel {
        anthropometric_arm(65.4, 166.9, 0.0, &ArmCoefficients::default()).unwrap()
    }

    #[test]
    fn cohort_mean_arm() {
        let a = cohort();
        // hand arithmetic with the default table
        assert!((a.arm_mass() - 3.27).abs() < 1e-12);
        assert!((a.arm_length - 0.644234).abs() < 1e-6);
        let m90 = gravity_torque(&a, 90.0).unwrap();
        assert!((m90 - 9.81 * 3.27 * 0.456 * 0.644234).abs() < 1e-5);
    }

    #[test]
    fn load_and_mass_scaling() {
        let c = ArmCoefficients::default();
        let a = anthropometric_arm(60.0, 170.0, 0.0, &c).unwrap();
        let b = anthropometric_arm(120.0, 170.0, 0.0, &c).unwrap();
        assert_eq!(b.arm_mass(), 2.0 * a.arm_mass());
        let loaded = anthropometric_arm(60.0, 170.0, STUDY_LOAD_KG, &c).unwrap();
        let extra = gravity_torque(&loaded, 90.0).unwrap() - gravity_torque(&a, 90.0).unwrap();
        assert!((extra - 9.81 * 1.56 * loaded.load_lever).abs() < 1e-12);
        assert!(anthropometric_arm(0.0, 170.0, 0.0, &c).is_err());
    }

    #[test]
    fn gravity_torque_shape() {
        let a = cohort();
        assert_eq!(gravity_torque(&a, 0.0).unwrap(), 0.0);
        let m90 = gravity_torque(&a, 90.0).unwrap();
        assert_eq!(m90, 9.81 * a.static_moment());
        assert!((gravity_torque(&a, 30.0).unwrap() - 0.5 * m90).abs() < 1e-12);
        assert!(gravity_torque(&a, 181.0).is_err());
    }

    #[test]
    fn trajectory_phases() {
        assert_eq!(protocol_trajectory(2.0).unwrap(), 0.0);
        assert_eq!(protocol_trajectory(9.0).unwrap(), 90.0);
        assert_eq!(protocol_trajectory(7.0).unwrap(), 45.0);
        assert_eq!(protocol_trajectory(16.0).unwrap(), 45.0);
        assert_eq!(protocol_trajectory(18.0).unwrap(), 0.0);
        assert!(protocol_trajectory(18.5).is_err());
    }

    #[test]
    fn trajectory_rate_bound() {
        let dt = 0.01;
        for i in 0..1800 {
            let (t0, t1) = (i as f64 * dt, ((i + 1) as f64 * dt).min(18.0));
            let d = (protocol_trajectory(t1).unwrap() - protocol_trajectory(t0).unwrap()).abs();
            assert!(d <= 90.0 / 4.0 * dt + 1e-9);
        }
    }

    #[test]
    fn bilinear_nodes_and_midpoints() {
        let s = MomentSurface::synthetic_demo();
        assert_eq!(s.eval(90.0, 90.0, false).unwrap(), (9.7, false));
        for (i, a) in s.angles.iter().enumerate() {
            for (j, p) in s.pressures.iter().enumerate() {
                assert_eq!(s.eval(*a, *p, false).unwrap().0, s.moments[i][j]);
            }
        }
        // linear in pressure: 80 kPa gives 80/90 of the node at 90 kPa
        let (v, _) = s.eval(90.0, 80.0, false).unwrap();
        assert!((v - 9.7 * 80.0 / 90.0).abs() < 1e-12);
        let (v, _) = s.eval(75.0, 85.0, false).unwrap();
        let expect =
            0.5 * (s.eval(60.0, 85.0, false).unwrap().0 + s.eval(90.0, 85.0, false).unwrap().0);
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_queries() {
        let s = MomentSurface::synthetic_demo();
        assert!(s.eval(90.0, 100.0, false).is_err());
        let (v, clamped) = s.eval(90.0, 100.0, true).unwrap();
        assert!(clamped);
        assert_eq!(v, 9.7);
    }

    #[test]
    fn surface_csv_round_trip() {
        let s = MomentSurface::synthetic_demo();
        let back = MomentSurface::from_csv(&s.to_csv()).unwrap();
        assert_eq!(back.angles, s.angles);
        assert_eq!(back.pressures, s.pressures);
        for (r0, r1) in s.moments.iter().zip(&back.moments) {
            for (a, b) in r0.iter().zip(r1) {
                assert!((a - b).abs() <= 1e-11 * a.abs().max(1e-300));
            }
        }
        assert_eq!(back.provenance, s.provenance);
        let ragged = "angle_deg,pressure_kpa,moment_nm\n0,0,0\n0,10,1\n30,0,0\n";
        assert!(MomentSurface::from_csv(ragged).is_err());
    }

    #[test]
    fn zero_schedule_leaves_gravity() {
        let a = cohort();
        let s = MomentSurface::synthetic_demo();
        let out = assistance_profile(&a, &s, &PressureSchedule::zero(), 0.1, false).unwrap();
        for x in &out {
            assert_eq!(x.m_act, 0.0);
            assert_eq!(x.residual, x.m_g);
        }
        assert!(out[0].assist_fraction.is_none());
    }

    #[test]
    fn study_schedule_and_scaling() {
        let a = cohort();
        let s = MomentSurface::synthetic_demo();
        let sched = PressureSchedule::study(STUDY_CAA_PRESSURE_KPA);
        assert_eq!(sched.at(4.99), 0.0);
        assert_eq!(sched.at(5.0), 80.0);
        assert_eq!(sched.at(14.0), 0.0);
        let base = assistance_profile(&a, &s, &sched, 0.05, false).unwrap();
        let hold = base.iter().find(|x| (x.t - 12.0).abs() < 1e-9).unwrap();
        assert!((hold.m_act - 9.7 * 80.0 / 90.0).abs() < 1e-12);
        let doubled = assistance_profile(&a, &s.scaled(2.0), &sched, 0.05, false).unwrap();
        for (x, y) in base.iter().zip(&doubled) {
            assert!((y.m_act - 2.0 * x.m_act).abs() < 1e-12);
            assert_eq!(y.residual, (y.m_g - y.m_act).max(0.0));
        }
    }

    #[test]
    fn coefficient_file() {
        let text = "mass_fraction = 0.05\ncom_fraction = 0.456\nlength_fraction = 0.386\nload_lever_fraction = 1.0\n";
        assert_eq!(
            ArmCoefficients::from_toml(text).unwrap(),
            ArmCoefficients::default()
        );
        assert!(ArmCoefficients::from_toml("mass_fraction = 1.5\ncom_fraction = 0.4\nlength_fraction = 0.3\nload_lever_fraction = 1\n").is_err());
    }
}
