//! Pouch-motor contact mechanics: contact widths, piecewise contact area and
//! force as a function of compression height and pressure.
//!
//! Compressing the pouch to height `h` leaves a circular cap of diameter `w4`
//! at the proximal end. While the intermediate contact length `lc` exceeds
//! the span `la` (small `h`), a distal cap of diameter `w5` and a trapezoid
//! joining both ends also touch; once `lc <= la` the contact shrinks to the
//! proximal cap plus a triangle of length `lc`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::PouchGeometry;

/// Heights this far above `2·R4` are clamped instead of rejected.
pub const HEIGHT_CLAMP_MM: f64 = 1e-9;

/// kPa·mm² to N.
const KPA_MM2_TO_N: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContactRegime {
    Short,
    Extended,
}

impl ContactRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContactRegime::Short => "short",
            ContactRegime::Extended => "extended",
        }
    }
}

/// Contact geometry at one compression height. Lengths in mm, areas in mm².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContactState {
    pub h: f64,
    pub w4: f64,
    pub w5: f64,
    /// Intermediate contact length; `None` for untapered pouches.
    pub lc: Option<f64>,
    pub regime: ContactRegime,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    /// Effective contact area.
    pub area: f64,
}

fn check_height(g: &PouchGeometry, h: f64) -> Result<f64> {
    let h_max = 2.0 * g.r4();
    if !h.is_finite() {
        return Err(domain(format!(
            "compression height must be finite, got {h}"
        )));
    }
    if h < -HEIGHT_CLAMP_MM {
        return Err(domain(format!("compression height must be >= 0, got {h}")));
    }
    if h > h_max + HEIGHT_CLAMP_MM {
        return Err(domain(format!(
            "h = {h} mm exceeds 2·R4 = {h_max} mm (pouch faces separated)"
        )));
    }
    Ok(h.clamp(0.0, h_max))
}

fn chord(radius: f64, h: f64) -> f64 {
    2.0 * (radius * radius - h * h / 4.0).max(0.0).sqrt()
}

/// Contact widths `(w4, w5, lc)` at compression height `h`.
pub fn contact_widths(g: &PouchGeometry, h: f64) -> Result<(f64, f64, f64)> {
    if !g.is_tapered() {
        return Err(Error::Untapered);
    }
    let h = check_height(g, h)?;
    let (w4, w5) = end_widths(g, h);
    let lc = (g.r4() - h / 2.0).abs() / g.alpha().tan();
    Ok((w4, w5, lc))
}

fn end_widths(g: &PouchGeometry, h: f64) -> (f64, f64) {
    let w4 = chord(g.r4(), h);
    let w5 = if h <= 2.0 * g.r5() {
        chord(g.r5(), h)
    } else {
        0.0
    };
    (w4, w5)
}

/// Full contact state at height `h`.
///
/// Untapered pouches (`l4 == l5`) have no finite `lc`; they are treated as
/// a rectangular contact band in the extended regime at every height.
pub fn contact_area(g: &PouchGeometry, h: f64) -> Result<ContactState> {
    let h = check_height(g, h)?;
    let (w4, w5) = end_widths(g, h);
    let la = g.la();
    let lc = if g.is_tapered() {
        Some((g.r4() - h / 2.0).abs() / g.alpha().tan())
    } else {
        None
    };

    let a1 = std::f64::consts::PI * w4 * w4 / 4.0;
    let a2 = lc.map_or(0.0, |lc| lc * w4 / 2.0);
    let a3 = std::f64::consts::PI * w5 * w5 / 4.0;
    let a4 = (w4 + w5) * la / 2.0;

    let regime = match lc {
        Some(lc) if lc <= la => ContactRegime::Short,
        _ => ContactRegime::Extended,
    };
    let area = match regime {
        ContactRegime::Short => a1 + a2,
        ContactRegime::Extended => a1 + a3 + a4,
    };
    Ok(ContactState {
        h,
        w4,
        w5,
        lc,
        regime,
        a1,
        a2,
        a3,
        a4,
        area,
    })
}

/// Contact force in N at height `h` (mm) and gauge pressure `p` (kPa).
pub fn pouch_force(g: &PouchGeometry, h: f64, p: f64) -> Result<f64> {
    check_pressure(p)?;
    Ok(KPA_MM2_TO_N * p * contact_area(g, h)?.area)
}

pub(crate) fn check_pressure(p: f64) -> Result<()> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(domain(format!(
            "pressure must be a finite value >= 0 kPa, got {p}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub state: ContactState,
    pub force: f64,
}

/// `n` uniformly spaced samples of force over `[h_min, h_max]`.
pub fn force_height_curve(
    g: &PouchGeometry,
    p: f64,
    h_min: f64,
    h_max: f64,
    n: usize,
) -> Result<Vec<CurvePoint>> {
    check_pressure(p)?;
    if n < 2 {
        return Err(domain(format!("need at least 2 samples, got {n}")));
    }
    if !(h_min >= 0.0 && h_min < h_max) {
        return Err(domain(format!("invalid height range [{h_min}, {h_max}]")));
    }
    (0..n)
        .map(|i| {
            let h = if i + 1 == n {
                h_max
            } else {
                h_min + (h_max - h_min) * i as f64 / (n - 1) as f64
            };
            let state = contact_area(g, h)?;
            Ok(CurvePoint {
                state,
                force: KPA_MM2_TO_N * p * state.area,
            })
        })
        .collect()
}

/// Area of the contact shape at `h` by jittered grid sampling with
/// `grid × grid` points. The component shapes are laid out tangent to one
/// another along the pouch axis so their union area is the sum of parts.
pub fn monte_carlo_area(g: &PouchGeometry, h: f64, grid: usize, seed: u64) -> Result<f64> {
    if grid == 0 {
        return Err(domain("grid must be positive"));
    }
    let s = contact_area(g, h)?;
    let la = g.la();
    let short = s.regime == ContactRegime::Short;
    let lc = s.lc.unwrap_or(f64::INFINITY);
    let (r4, r5) = (s.w4 / 2.0, s.w5 / 2.0);
    let inside = |x: f64, y: f64| {
        if (x + r4).powi(2) + y * y <= r4 * r4 {
            true
        } else if short {
            x >= 0.0 && x <= lc && y.abs() <= r4 * (1.0 - x / lc)
        } else if x >= 0.0 && x <= la {
            y.abs() <= r4 + (r5 - r4) * x / la
        } else {
            (x - la - r5).powi(2) + y * y <= r5 * r5
        }
    };
    let (x0, x1) = (-s.w4, if short { lc } else { la + s.w5 });
    let (y0, y1) = (-r4, r4);
    let (dx, dy) = ((x1 - x0) / grid as f64, (y1 - y0) / grid as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for i in 0..grid {
        for j in 0..grid {
            let x = x0 + (i as f64 + rng.random::<f64>()) * dx;
            let y = y0 + (j as f64 + rng.random::<f64>()) * dy;
            hits += u64::from(inside(x, y));
        }
    }
    Ok(hits as f64 * dx * dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn reference() -> PouchGeometry {
        PouchGeometry::haa_pouch()
    }

    #[test]
    fn zero_compression_limit() {
        let g = reference();
        let (w4, w5, lc) = contact_widths(&g, 0.0).unwrap();
        assert!((w4 - 2.0 * g.r4()).abs() < 1e-12);
        assert!((w5 - 2.0 * g.r5()).abs() < 1e-12);
        assert!((lc - g.r4() / g.alpha().tan()).abs() < 1e-9);
    }

    #[test]
    fn widths_at_twelve_mm() {
        // hand evaluation: R4 = 118/π, R5 = 88/π
        let (r4, r5) = (118.0 / PI, 88.0 / PI);
        let la = 180.0 - 15.0 - r4 - r5;
        let tan_alpha = (r4 - r5) / la;
        let w4_ref = 2.0 * (r4 * r4 - 36.0f64).sqrt();
        let w5_ref = 2.0 * (r5 * r5 - 36.0f64).sqrt();
        let lc_ref = (r4 - 6.0) / tan_alpha;

        let (w4, w5, lc) = contact_widths(&reference(), 12.0).unwrap();
        assert!((w4 - w4_ref).abs() < 1e-9);
        assert!((w5 - w5_ref).abs() < 1e-9);
        assert!((lc - lc_ref).abs() < 1e-9);
        assert!((w4 - 74.16).abs() < 0.01);
        assert!((w5 - 54.73).abs() < 0.01);
        assert!((lc - 328.6).abs() < 0.1);
    }

    #[test]
    fn boundary_contact_length_equals_span() {
        let g = reference();
        let (_, w5, lc) = contact_widths(&g, 2.0 * g.r5()).unwrap();
        assert!(w5.abs() < 1e-6);
        assert!((lc - g.la()).abs() < 1e-9);
    }

    #[test]
    fn regime_boundary_formulas_coincide() {
        let g = reference();
        let s = contact_area(&g, 2.0 * g.r5()).unwrap();
        let short = s.a1 + s.a2;
        let extended = s.a1 + s.a3 + s.a4;
        assert!((short - extended).abs() / short < 1e-6);
        assert!((s.area - (s.a1 + g.la() * s.w4 / 2.0)).abs() / s.area < 1e-6);
    }

    #[test]
    fn area_and_force_at_twelve_mm() {
        let g = reference();
        let s = contact_area(&g, 12.0).unwrap();
        assert_eq!(s.regime, ContactRegime::Extended);
        assert!((s.area - 13_080.0).abs() < 5.0, "A = {}", s.area);
        let f = pouch_force(&g, 12.0, 90.0).unwrap();
        assert!((f - 1177.0).abs() < 1.0, "F = {f}");
    }

    #[test]
    fn vanishing_contact_at_full_separation() {
        let g = reference();
        let s = contact_area(&g, 2.0 * g.r4()).unwrap();
        assert_eq!(s.regime, ContactRegime::Short);
        assert!(s.w4.abs() < 1e-6 && s.area.abs() < 1e-6);
    }

    #[test]
    fn clamp_just_above_full_height() {
        let g = reference();
        let h_max = 2.0 * g.r4();
        assert!(contact_area(&g, h_max + 0.5e-9).is_ok());
        assert!(matches!(
            contact_area(&g, h_max + 1e-6),
            Err(Error::Domain(_))
        ));
        assert!(matches!(contact_area(&g, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn untapered_pouch_is_a_band() {
        let g = PouchGeometry::new(100.0, 100.0, 180.0, 7.5).unwrap();
        assert!(matches!(contact_widths(&g, 5.0), Err(Error::Untapered)));
        let s = contact_area(&g, 5.0).unwrap();
        assert_eq!(s.regime, ContactRegime::Extended);
        assert!(s.lc.is_none());
        assert!((s.area - (s.a1 + s.a3 + s.a4)).abs() < 1e-12);
    }

    #[test]
    fn zero_pressure_and_negative_pressure() {
        let g = reference();
        assert_eq!(pouch_force(&g, 20.0, 0.0).unwrap(), 0.0);
        assert!(pouch_force(&g, 20.0, -1.0).is_err());
        let curve = force_height_curve(&g, 0.0, 0.0, 70.0, 11).unwrap();
        assert!(curve.iter().all(|c| c.force == 0.0));
    }

    #[test]
    fn short_regime_beyond_distal_diameter() {
        let g = reference();
        let curve = force_height_curve(&g, 90.0, 2.0 * g.r5(), 2.0 * g.r4(), 200).unwrap();
        assert!(curve.iter().all(|c| c.state.regime == ContactRegime::Short));
        assert_eq!(curve.len(), 200);
    }

    #[test]
    fn curves_scale_with_pressure() {
        let g = reference();
        let a = force_height_curve(&g, 50.0, 0.0, 70.0, 50).unwrap();
        let b = force_height_curve(&g, 90.0, 0.0, 70.0, 50).unwrap();
        for (x, y) in a.iter().zip(&b) {
            if y.force > 0.0 {
                assert!((x.force / y.force - 50.0 / 90.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn curve_argument_checks() {
        let g = reference();
        assert!(force_height_curve(&g, 90.0, 0.0, 10.0, 1).is_err());
        assert!(force_height_curve(&g, 90.0, 10.0, 10.0, 5).is_err());
        assert!(force_height_curve(&g, 90.0, 0.0, 80.0, 5).is_err());
    }

    #[test]
    fn sampled_area_matches_formula() {
        let g = reference();
        for h in [2.0, 12.0, 40.0, 60.0, 70.0] {
            let exact = contact_area(&g, h).unwrap().area;
            let mc = monte_carlo_area(&g, h, 400, 7).unwrap();
            assert!((mc - exact).abs() / exact < 0.01, "h {h}: {mc} vs {exact}");
        }
        assert_eq!(
            monte_carlo_area(&g, 12.0, 50, 3).unwrap(),
            monte_carlo_area(&g, 12.0, 50, 3).unwrap()
        );
    }
}
