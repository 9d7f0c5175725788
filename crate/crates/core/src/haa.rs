//! Torque–angle model of the horizontal adduction actuator: two pouch motors
//! sewn together along one side, bending about the sewing line.
//!
//! Bending the assembly by `beta` compresses the pouch to
//! `h = 2·l·sin(beta/4)` and sets the moment arm to `l·cos(beta/4)`, where
//! `l = R5 + d` is the distance from the pouch center to the sewing center.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::geometry::PouchGeometry;
use crate::pouch::{self, ContactRegime};

/// Default inter-center offset introduced by sewing (mm).
pub const DEFAULT_SEWING_OFFSET_MM: f64 = 7.5;

/// Supply limit; pressures above this are almost certainly unit mistakes.
pub const DEFAULT_MAX_PRESSURE_KPA: f64 = 130.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HaaAssembly {
    pub pouch: PouchGeometry,
    /// Inter-center sewing offset (mm).
    pub d: f64,
    /// Upper pressure bound accepted by the torque functions (kPa).
    pub max_pressure: f64,
}

impl HaaAssembly {
    pub fn new(pouch: PouchGeometry, d: f64) -> Result<Self> {
        if !(d >= 0.0) {
            return Err(domain(format!("sewing offset must be >= 0, got {d}")));
        }
        let a = Self {
            pouch,
            d,
            max_pressure: DEFAULT_MAX_PRESSURE_KPA,
        };
        if !(a.l_o1o2() > 0.0) {
            return Err(domain("pivot distance must be positive"));
        }
        Ok(a)
    }

    /// Assembly built from the two reference-scale pouches.
    pub fn reference() -> Self {
        Self::new(PouchGeometry::haa_pouch(), DEFAULT_SEWING_OFFSET_MM).expect("preset is valid")
    }

    pub fn with_max_pressure(mut self, max_pressure: f64) -> Self {
        self.max_pressure = max_pressure;
        self
    }

    /// Distance from pouch center to sewing center (mm).
    pub fn l_o1o2(&self) -> f64 {
        self.pouch.r5() + self.d
    }

    /// Bending angle (deg) at which the distal contact vanishes (`h = 2·R5`),
    /// if the assembly reaches it.
    pub fn regime_boundary_beta(&self) -> Option<f64> {
        let s = self.pouch.r5() / self.l_o1o2();
        (s <= 1.0).then(|| 4.0 * s.asin().to_degrees())
    }

    fn check_pressure(&self, p: f64) -> Result<()> {
        pouch::check_pressure(p)?;
        if p > self.max_pressure {
            return Err(domain(format!(
                "pressure {p} kPa exceeds the configured limit of {} kPa",
                self.max_pressure
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BendState {
    pub beta: f64,
    pub h: f64,
    pub l_arm: f64,
}

pub fn bend_kinematics(a: &HaaAssembly, beta: f64) -> Result<BendState> {
    if !(0.0..360.0).contains(&beta) {
        return Err(domain(format!(
            "bending angle must lie in [0, 360) deg, got {beta}"
        )));
    }
    let (s, c) = (beta.to_radians() / 4.0).sin_cos();
    let l = a.l_o1o2();
    Ok(BendState {
        beta,
        h: 2.0 * l * s,
        l_arm: l * c,
    })
}

/// Output torque in N·m at bending angle `beta` (deg) and pressure `p` (kPa).
pub fn haa_torque(a: &HaaAssembly, beta: f64, p: f64) -> Result<f64> {
    Ok(torque_sample(a, beta, p)?.torque)
}

/// One fully resolved point of the torque–angle map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorqueSample {
    pub bend: BendState,
    pub regime: ContactRegime,
    pub force: f64,
    pub torque: f64,
}

pub fn torque_sample(a: &HaaAssembly, beta: f64, p: f64) -> Result<TorqueSample> {
    a.check_pressure(p)?;
    let bend = bend_kinematics(a, beta)?;
    let contact = pouch::contact_area(&a.pouch, bend.h)?;
    let force = 0.001 * p * contact.area;
    Ok(TorqueSample {
        bend,
        regime: contact.regime,
        force,
        torque: force * bend.l_arm * 1e-3,
    })
}

/// `n` uniformly spaced samples over `[beta_min, beta_max]`.
pub fn torque_angle_curve(
    a: &HaaAssembly,
    p: f64,
    beta_min: f64,
    beta_max: f64,
    n: usize,
) -> Result<Vec<TorqueSample>> {
    if n < 2 {
        return Err(domain(format!("need at least 2 samples, got {n}")));
    }
    if !(beta_min >= 0.0 && beta_min < beta_max && beta_max < 360.0) {
        return Err(domain(format!(
            "invalid angle range [{beta_min}, {beta_max}]"
        )));
    }
    (0..n)
        .map(|i| {
            let beta = if i + 1 == n {
                beta_max
            } else {
                beta_min + (beta_max - beta_min) * i as f64 / (n - 1) as f64
            };
            torque_sample(a, beta, p)
        })
        .collect()
}
