//! Actuator and pouch planform geometry, and inflated-volume estimation.
//!
//! A spindle profile is two linear width ramps joined at the fold: the upper
//! segment runs from `w1` (top) to `w2` (fold) over `lu`, the lower segment
//! from `w2` to `w3` (bottom) over `lp`. The uniform cylindrical actuator is the
//! special case `w1 == w2 == w3`.
//!
//! Inflated volume treats each cross-section as a circle whose circumference
//! equals the two sealed fabric layers' free width, `2·(w − 2·w_seal1)`, so the
//! radius is `(w − 2·w_seal1)/π`. A single fill factor scales the solid of
//! revolution down to the real (flattened, creased) shape.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Volume of the uniform reference actuator used to calibrate the fill factor.
pub const UCAA_REFERENCE_VOLUME_ML: f64 = 555.0;

const MM3_PER_ML: f64 = 1000.0;

/// Trapezoidal pouch motor planform. All lengths in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PouchGeometry {
    l4: f64,
    l5: f64,
    ld: f64,
    w_seal1: f64,
}

impl PouchGeometry {
    pub fn new(l4: f64, l5: f64, ld: f64, w_seal1: f64) -> Result<Self> {
        if !(l4 > 0.0 && l5 > 0.0 && ld > 0.0) || !l4.is_finite() || !l5.is_finite() {
            return Err(domain(format!(
                "pouch lengths must be positive: l4={l4}, l5={l5}, ld={ld}"
            )));
        }
        if !(w_seal1 >= 0.0) {
            return Err(domain(format!("seal width must be >= 0, got {w_seal1}")));
        }
        let g = Self {
            l4,
            l5,
            ld,
            w_seal1,
        };
        if !(g.la() > 0.0) {
            return Err(Error::DegenerateGeometry(format!(
                "contact span la = {} mm is not positive",
                g.la()
            )));
        }
        Ok(g)
    }

    /// The pouch used in the horizontal adduction actuator.
    pub fn haa_pouch() -> Self {
        Self::new(118.0, 88.0, 180.0, 7.5).expect("preset is valid")
    }

    pub fn l4(&self) -> f64 {
        self.l4
    }
    pub fn l5(&self) -> f64 {
        self.l5
    }
    pub fn ld(&self) -> f64 {
        self.ld
    }
    pub fn w_seal1(&self) -> f64 {
        self.w_seal1
    }

    /// Proximal (upper) radius.
    pub fn r4(&self) -> f64 {
        self.l4 / PI
    }

    /// Distal (lower) radius.
    pub fn r5(&self) -> f64 {
        self.l5 / PI
    }

    /// Distance between the two contact ends.
    pub fn la(&self) -> f64 {
        self.ld - 2.0 * self.w_seal1 - self.r4() - self.r5()
    }

    /// Taper angle in radians; zero for an untapered pouch.
    pub fn alpha(&self) -> f64 {
        ((self.r4() - self.r5()).abs() / self.la()).atan()
    }

    pub fn is_tapered(&self) -> bool {
        self.l4 != self.l5
    }
}

/// Width/length parameters of an angled bending actuator. Lengths in mm,
/// angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpindleProfile {
    pub lu: f64,
    pub lp: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w_seal1: f64,
    pub w_seal2: f64,
    /// Designed external angle. Metadata only.
    pub theta_d: f64,
    /// Actual internal angle. Metadata only.
    pub theta_r: f64,
    /// Inflated external angle. Metadata only.
    pub theta_f: f64,
}

impl SpindleProfile {
    /// Uniform cylindrical angled actuator.
    pub fn ucaa() -> Self {
        Self {
            lu: 162.0,
            lp: 192.0,
            w1: 90.0,
            w2: 90.0,
            w3: 90.0,
            w_seal1: 7.5,
            w_seal2: 10.0,
            theta_d: 155.0,
            theta_r: 155.0,
            theta_f: 151.0,
        }
    }

    /// Spindle-shaped angled actuator.
    pub fn ssaa() -> Self {
        Self {
            w1: 52.0,
            w3: 56.5,
            theta_d: 150.0,
            theta_r: 177.0,
            theta_f: 148.0,
            ..Self::ucaa()
        }
    }

    /// Look up a built-in preset by name (case-insensitive).
    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "UCAA" => Some(Self::ucaa()),
            "SSAA" => Some(Self::ssaa()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("lu", self.lu),
            ("lp", self.lp),
            ("w1", self.w1),
            ("w2", self.w2),
            ("w3", self.w3),
            ("w_seal1", self.w_seal1),
            ("w_seal2", self.w_seal2),
        ];
        for (name, v) in lengths {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.w1 > self.w2 || self.w3 > self.w2 {
            return Err(domain(format!(
                "end widths must not exceed the fold width: w1={}, w2={}, w3={}",
                self.w1, self.w2, self.w3
            )));
        }
        for (name, v) in [
            ("theta_d", self.theta_d),
            ("theta_r", self.theta_r),
            ("theta_f", self.theta_f),
        ] {
            if !(v > 0.0 && v < 360.0) {
                return Err(domain(format!("{name} must lie in (0, 360) deg, got {v}")));
            }
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.lu + self.lp
    }

    pub fn max_width(&self) -> f64 {
        self.w1.max(self.w2).max(self.w3)
    }

    /// Parse a profile file. Keys carry units; unknown keys are rejected.
    ///
    /// ```toml
    /// lu_mm = 162
    /// lp_mm = 192
    /// w1_mm = 52
    /// w2_mm = 90
    /// w3_mm = 56.5
    /// w_seal1_mm = 7.5
    /// w_seal2_mm = 10
    /// theta_d_deg = 150
    /// theta_r_deg = 177
    /// theta_f_deg = 148
    /// ```
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ProfileFile =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        let p = Self {
            lu: file.lu_mm,
            lp: file.lp_mm,
            w1: file.w1_mm,
            w2: file.w2_mm,
            w3: file.w3_mm,
            w_seal1: file.w_seal1_mm,
            w_seal2: file.w_seal2_mm,
            theta_d: file.theta_d_deg,
            theta_r: file.theta_r_deg,
            theta_f: file.theta_f_deg,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    lu_mm: f64,
    lp_mm: f64,
    w1_mm: f64,
    w2_mm: f64,
    w3_mm: f64,
    w_seal1_mm: f64,
    w_seal2_mm: f64,
    theta_d_deg: f64,
    theta_r_deg: f64,
    theta_f_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeModelConfig {
    /// Dimensionless cross-section fill coefficient, `0 < k <= 1`.
    pub fill_factor: f64,
    /// Arc-length step for numerical integration (mm).
    pub integration_step: f64,
}

impl VolumeModelConfig {
    pub fn new(fill_factor: f64, integration_step: f64) -> Result<Self> {
        let cfg = Self {
            fill_factor,
            integration_step,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fill_factor > 0.0 && self.fill_factor <= 1.0) {
            return Err(domain(format!(
                "fill factor must lie in (0, 1], got {}",
                self.fill_factor
            )));
        }
        if !(self.integration_step > 0.0) {
            return Err(domain(format!(
                "integration step must be positive, got {}",
                self.integration_step
            )));
        }
        Ok(())
    }

    /// Fill factor chosen so that `reference` inflates to `target_ml`.
    pub fn calibrated(
        reference: &SpindleProfile,
        target_ml: f64,
        integration_step: f64,
    ) -> Result<Self> {
        let unit = Self {
            fill_factor: 1.0,
            integration_step,
        };
        let v = inflated_volume(reference, &unit)?;
        Self::new(target_ml / v, integration_step)
    }
}

impl Default for VolumeModelConfig {
    /// Calibrated so the UCAA preset inflates to 555 mL.
    fn default() -> Self {
        Self::calibrated(&SpindleProfile::ucaa(), UCAA_REFERENCE_VOLUME_ML, 0.5)
            .expect("UCAA preset calibrates")
    }
}

/// Planform width at arc length `x` measured from the top edge.
pub fn width_at(profile: &SpindleProfile, x: f64) -> Result<f64> {
    let total = profile.total_length();
    if !(0.0..=total).contains(&x) {
        return Err(domain(format!("x = {x} mm outside [0, {total}]")));
    }
    Ok(if x <= profile.lu {
        let t = if profile.lu > 0.0 {
            x / profile.lu
        } else {
            1.0
        };
        profile.w1 * (1.0 - t) + profile.w2 * t
    } else {
        let t = (x - profile.lu) / profile.lp;
        profile.w2 * (1.0 - t) + profile.w3 * t
    })
}

fn check_seal_clearance(profile: &SpindleProfile) -> Result<()> {
    // widths are piecewise linear, so the minimum sits at a node
    let min_w = profile.w1.min(profile.w2).min(profile.w3);
    if min_w <= 2.0 * profile.w_seal1 {
        return Err(Error::DegenerateGeometry(format!(
            "width {min_w} mm leaves no free fabric inside 2 x {} mm seals",
            profile.w_seal1
        )));
    }
    Ok(())
}

/// Volume of a linear-radius segment (frustum) in mm³ given its two free
/// widths and length.
fn frustum_mm3(free_a: f64, free_b: f64, length: f64) -> f64 {
    // r = free/π, V = π·L/3·(ra² + ra·rb + rb²)
    length / (3.0 * PI) * (free_a * free_a + free_a * free_b + free_b * free_b)
}

/// Inflated volume in mL, by closed-form frustum summation.
pub fn inflated_volume(profile: &SpindleProfile, cfg: &VolumeModelConfig) -> Result<f64> {
    profile.validate()?;
    cfg.validate()?;
    check_seal_clearance(profile)?;
    let s = 2.0 * profile.w_seal1;
    let (f1, f2, f3) = (profile.w1 - s, profile.w2 - s, profile.w3 - s);
    let mm3 = frustum_mm3(f1, f2, profile.lu) + frustum_mm3(f2, f3, profile.lp);
    Ok(cfg.fill_factor * mm3 / MM3_PER_ML)
}

/// Inflated volume in mL by composite Simpson integration of `π·r(x)²` at
/// `cfg.integration_step`. Agrees with [`inflated_volume`] to well under 0.1%.
pub fn inflated_volume_numeric(profile: &SpindleProfile, cfg: &VolumeModelConfig) -> Result<f64> {
    profile.validate()?;
    cfg.validate()?;
    check_seal_clearance(profile)?;
    let s = 2.0 * profile.w_seal1;
    let area = |x: f64| -> Result<f64> {
        let r = (width_at(profile, x)? - s) / PI;
        Ok(PI * r * r)
    };
    // integrate each linear segment separately so the kink at the fold is a node
    let mut mm3 = 0.0;
    for (a, b) in [(0.0, profile.lu), (profile.lu, profile.total_length())] {
        let len = b - a;
        let mut n = (len / cfg.integration_step).ceil().max(2.0) as usize;
        if n % 2 == 1 {
            n += 1;
        }
        let h = len / n as f64;
        let mut acc = area(a)? + area(b)?;
        for i in 1..n {
            let x = (a + i as f64 * h).min(b);
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * area(x)?;
        }
        mm3 += acc * h / 3.0;
    }
    Ok(cfg.fill_factor * mm3 / MM3_PER_ML)
}

/// Percentage volume reduction of `v_new` relative to `v_ref`.
pub fn volume_reduction(v_ref: f64, v_new: f64) -> Result<f64> {
    if !(v_ref > 0.0) {
        return Err(domain(format!(
            "reference volume must be positive, got {v_ref}"
        )));
    }
    Ok(100.0 * (v_ref - v_new) / v_ref)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cfg() -> VolumeModelConfig {
        VolumeModelConfig::new(1.0, 0.5).unwrap()
    }

    #[test]
    fn widths_of_presets() {
        let u = SpindleProfile::ucaa();
        for x in [0.0, 10.0, 162.0, 200.0, 354.0] {
            assert_eq!(width_at(&u, x).unwrap(), 90.0);
        }
        let s = SpindleProfile::ssaa();
        assert_eq!(width_at(&s, 0.0).unwrap(), 52.0);
        assert_eq!(width_at(&s, s.lu).unwrap(), 90.0);
        assert_eq!(width_at(&s, s.lu + s.lp).unwrap(), 56.5);
        // independent interpolation: 52 + (90 - 52) * 0.5
        let mid = 52.0 + (90.0 - 52.0) * 0.5;
        assert!((width_at(&s, s.lu / 2.0).unwrap() - mid).abs() < 1e-12);
        assert!((mid - 71.0).abs() < 1e-12);
    }

    #[test]
    fn width_out_of_range() {
        let s = SpindleProfile::ssaa();
        assert!(matches!(width_at(&s, -0.1), Err(Error::Domain(_))));
        assert!(matches!(width_at(&s, 354.01), Err(Error::Domain(_))));
    }

    #[test]
    fn uniform_volume_closed_form() {
        // cylinder of radius 75/π over 354 mm
        let v = inflated_volume(&SpindleProfile::ucaa(), &unit_cfg()).unwrap();
        let r = 75.0 / PI;
        let expect = PI * r * r * 354.0 / 1000.0;
        assert!((v - expect).abs() < 1e-9);
    }

    #[test]
    fn default_config_hits_reference_volume() {
        let cfg = VolumeModelConfig::default();
        let v = inflated_volume(&SpindleProfile::ucaa(), &cfg).unwrap();
        assert!((v - 555.0).abs() < 1e-9);
        assert!(cfg.fill_factor > 0.0 && cfg.fill_factor <= 1.0);
    }

    #[test]
    fn numeric_integration_agrees_with_frustum_sum() {
        for p in [SpindleProfile::ucaa(), SpindleProfile::ssaa()] {
            for step in [0.25, 1.0, 5.0] {
                let cfg = VolumeModelConfig::new(0.8, step).unwrap();
                let a = inflated_volume(&p, &cfg).unwrap();
                let b = inflated_volume_numeric(&p, &cfg).unwrap();
                assert!((a - b).abs() / a < 1e-3, "step {step}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn vanishing_length_gives_vanishing_volume() {
        let p = SpindleProfile {
            lu: 1e-9,
            lp: 1e-9,
            ..SpindleProfile::ssaa()
        };
        let v = inflated_volume(&p, &unit_cfg()).unwrap();
        assert!((0.0..1e-8).contains(&v));
    }

    #[test]
    fn seal_clearance_is_enforced() {
        let p = SpindleProfile {
            w1: 15.0,
            ..SpindleProfile::ssaa()
        };
        assert!(matches!(
            inflated_volume(&p, &unit_cfg()),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn profile_validation() {
        let bad = SpindleProfile {
            w1: 95.0,
            ..SpindleProfile::ucaa()
        };
        assert!(bad.validate().is_err());
        let bad = SpindleProfile {
            theta_r: 360.0,
            ..SpindleProfile::ucaa()
        };
        assert!(bad.validate().is_err());
        assert!(SpindleProfile::ssaa().validate().is_ok());
    }

    #[test]
    fn reduction_arithmetic() {
        assert!((volume_reduction(555.0, 357.0).unwrap() - 35.675675675675).abs() < 1e-9);
        assert_eq!(volume_reduction(42.0, 42.0).unwrap(), 0.0);
        assert!((volume_reduction(100.0, 64.3).unwrap() - 35.7).abs() < 1e-9);
        assert!(volume_reduction(0.0, 1.0).is_err());
    }

    #[test]
    fn pouch_derived_quantities() {
        let g = PouchGeometry::haa_pouch();
        assert!((g.r4() - 118.0 / PI).abs() < 1e-12);
        assert!((g.la() - (180.0 - 15.0 - 206.0 / PI)).abs() < 1e-12);
        assert!(g.alpha() > 0.0 && g.alpha() < PI / 2.0);
        let flat = PouchGeometry::new(100.0, 100.0, 180.0, 7.5).unwrap();
        assert_eq!(flat.alpha(), 0.0);
        assert!(PouchGeometry::new(118.0, 88.0, 60.0, 7.5).is_err());
    }

    #[test]
    fn profile_file_parsing() {
        let text = "lu_mm = 162\nlp_mm = 192\nw1_mm = 52\nw2_mm = 90\nw3_mm = 56.5\n\
                    w_seal1_mm = 7.5\nw_seal2_mm = 10\ntheta_d_deg = 150\n\
                    theta_r_deg = 177\ntheta_f_deg = 148\n";
        assert_eq!(
            SpindleProfile::from_toml(text).unwrap(),
            SpindleProfile::ssaa()
        );
        let extra = format!("{text}colour = 3\n");
        assert!(matches!(
            SpindleProfile::from_toml(&extra),
            Err(Error::Config(_))
        ));
    }
}
