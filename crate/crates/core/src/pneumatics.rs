//! Lumped filling and venting dynamics of a fabric actuator behind a
//! proportional pressure regulator.
//!
//! The actuator is a rigid volume at ambient temperature (isothermal). The
//! regulator is two orifices: a fill path from the supply and a vent path to
//! atmosphere. Each opens in proportion to the tracking error over a
//! proportional band and saturates fully open beyond it. Flows follow the
//! two-regime sonic-conductance law (choked below the critical pressure
//! ratio, elliptic above it), expressed as standard volume flow.

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Standard reference pressure for volume flow (kPa abs).
pub const STD_PRESSURE_KPA: f64 = 100.0;
/// Standard reference temperature for volume flow (K).
pub const STD_TEMPERATURE_K: f64 = 293.15;

/// mL/s of standard flow per (NL/(s·bar)) of conductance and kPa of upstream
/// absolute pressure.
const ML_PER_S_PER_UNIT: f64 = 1000.0 / 100.0;

/// Default integration step (s).
pub const DEFAULT_DT: f64 = 1e-3;

/// Relative disagreement between the `dt` and `dt/2` runs that is accepted.
const CONVERGENCE_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PneumaticCircuit {
    /// Gauge supply pressure (kPa).
    pub p_supply: f64,
    /// Absolute ambient pressure (kPa).
    pub p_atm: f64,
    /// Buffer tank volume (L).
    pub v_tank: f64,
    /// Actuator volume (mL).
    pub v_act: f64,
    /// Fill-path sonic conductance (NL/(s·bar)).
    pub c_fill: f64,
    /// Vent-path sonic conductance (NL/(s·bar)).
    pub c_vent: f64,
    /// Critical pressure ratio.
    pub b_crit: f64,
    /// Gas temperature (K).
    pub temperature: f64,
    /// Regulator proportional band (kPa): error at which a path is fully open.
    pub band: f64,
}

impl Default for PneumaticCircuit {
    /// Regulator calibrated so a two-chamber abduction actuator (2 × 357 mL)
    /// has a 1.06 Hz cutoff at 20 ± 10 kPa.
    fn default() -> Self {
        Self {
            p_supply: 130.0,
            p_atm: 101.325,
            v_tank: 0.75,
            v_act: 714.0,
            c_fill: DEFAULT_C_FILL,
            c_vent: DEFAULT_C_FILL * DEFAULT_VENT_RATIO,
            b_crit: 0.5,
            temperature: 293.0,
            band: 5.0,
        }
    }
}

/// Output of [`calibrate_cutoff`] for the default circuit, rounded.
pub const DEFAULT_C_FILL: f64 = 0.4530;
/// Vent/fill conductance ratio of the default regulator.
pub const DEFAULT_VENT_RATIO: f64 = 0.5;

impl PneumaticCircuit {
    pub fn with_volume(mut self, v_act: f64) -> Self {
        self.v_act = v_act;
        self
    }

    /// Multiply both conductances by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.c_fill *= factor;
        self.c_vent *= factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p_supply", self.p_supply),
            ("p_atm", self.p_atm),
            ("v_tank", self.v_tank),
            ("v_act", self.v_act),
            ("c_fill", self.c_fill),
            ("c_vent", self.c_vent),
            ("temperature", self.temperature),
            ("band", self.band),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.b_crit > 0.0 && self.b_crit < 1.0) {
            return Err(domain(format!(
                "b_crit must lie in (0, 1), got {}",
                self.b_crit
            )));
        }
        Ok(())
    }

    /// kPa/s of pressure change per mL/s of standard inflow.
    fn dpdt_per_flow(&self, volume_ml: f64) -> f64 {
        STD_PRESSURE_KPA * (self.temperature / STD_TEMPERATURE_K) / volume_ml
    }

    fn flow(&self, p_up_abs: f64, p_down_abs: f64, c: f64) -> f64 {
        let c = c * (STD_TEMPERATURE_K / self.temperature).sqrt();
        orifice_flow(p_up_abs, p_down_abs, c, self.b_crit).unwrap_or(0.0)
    }

    /// Net standard inflow (mL/s) to the actuator at gauge pressure `p`
    /// while tracking reference `r`.
    fn regulator_flow(&self, p: f64, r: f64) -> f64 {
        let e = r - p;
        let open_fill = (e / self.band).clamp(0.0, 1.0);
        let open_vent = (-e / self.band).clamp(0.0, 1.0);
        let p_abs = p + self.p_atm;
        let mut q = 0.0;
        if open_fill > 0.0 {
            q += open_fill * self.flow(self.p_supply + self.p_atm, p_abs, self.c_fill);
        }
        if open_vent > 0.0 {
            q -= open_vent * self.flow(p_abs, self.p_atm, self.c_vent);
        }
        q
    }

    fn derivative(&self, p: f64, r: f64) -> f64 {
        self.dpdt_per_flow(self.v_act) * self.regulator_flow(p, r)
    }

    /// Largest linearized rate constant (1/s) the explicit scheme must resolve.
    fn stiffness(&self) -> f64 {
        let c_max = self.c_fill.max(self.c_vent) * (STD_TEMPERATURE_K / self.temperature).sqrt();
        let q_max = ML_PER_S_PER_UNIT * c_max * (self.p_supply + self.p_atm);
        self.dpdt_per_flow(self.v_act) * q_max / self.band
    }

    fn check_step(&self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(domain(format!("time step must be positive, got {dt}")));
        }
        let k = self.stiffness();
        if dt * k > 1.0 {
            return Err(Error::Integration(format!(
                "dt = {dt} s exceeds the stability bound {:.3e} s for this circuit",
                1.0 / k
            )));
        }
        Ok(())
    }
}

/// Standard volume flow (mL/s) through an orifice of conductance `c`
/// (NL/(s·bar)) between absolute pressures `p_up >= p_down` (kPa).
pub fn orifice_flow(p_up: f64, p_down: f64, c: f64, b_crit: f64) -> Result<f64> {
    if !(p_down >= 0.0) || !(p_up >= p_down) {
        return Err(domain(format!(
            "orifice requires p_up >= p_down >= 0, got p_up={p_up}, p_down={p_down}"
        )));
    }
    if p_up == p_down {
        return Ok(0.0);
    }
    let choked = ML_PER_S_PER_UNIT * c * p_up;
    let ratio = p_down / p_up;
    if ratio <= b_crit {
        return Ok(choked);
    }
    let s = (ratio - b_crit) / (1.0 - b_crit);
    Ok(choked * (1.0 - s * s).max(0.0).sqrt())
}

fn rk4(c: &PneumaticCircuit, p: f64, r_now: f64, r_mid: f64, r_next: f64, dt: f64) -> f64 {
    let k1 = c.derivative(p, r_now);
    let k2 = c.derivative(p + 0.5 * dt * k1, r_mid);
    let k3 = c.derivative(p + 0.5 * dt * k2, r_mid);
    let k4 = c.derivative(p + dt * k3, r_next);
    (p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).clamp(0.0, c.p_supply)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepResult {
    pub p_ref: f64,
    /// Time at which the reference drops back to zero (s).
    pub t_release: f64,
    /// `(t [s], p [kPa gauge])`.
    pub trace: Vec<(f64, f64)>,
    /// 10 % → 90 % of `p_ref` after the upward step.
    pub rise_time: Option<f64>,
    /// 90 % → 10 % of `p_ref` after the release.
    pub fall_time: Option<f64>,
    /// Within 2 % of the reference at the end of both phases.
    pub settled: bool,
    /// True when `p_ref == 0`; no rise or fall exists.
    pub degenerate: bool,
}

/// First time after `from` at which the trace crosses `level` in the given
/// direction, linearly interpolated between samples.
pub fn crossing_time(trace: &[(f64, f64)], from: f64, level: f64, rising: bool) -> Option<f64> {
    let hit = |p: f64| if rising { p >= level } else { p <= level };
    let start = trace.iter().position(|&(t, _)| t >= from)?;
    if hit(trace[start].1) {
        return Some(trace[start].0);
    }
    trace[start..].windows(2).find_map(|w| {
        let ((t0, p0), (t1, p1)) = (w[0], w[1]);
        hit(p1).then(|| t0 + (t1 - t0) * (level - p0) / (p1 - p0))
    })
}

fn simulate_step(c: &PneumaticCircuit, p_ref: f64, duration: f64, dt: f64) -> StepResult {
    let t_release = duration / 2.0;
    let n = (duration / dt).round() as usize;
    let reference = |t: f64| if t < t_release { p_ref } else { 0.0 };
    let mut trace = Vec::with_capacity(n + 1);
    let mut p = 0.0;
    trace.push((0.0, p));
    for i in 0..n {
        let t = i as f64 * dt;
        // hold the reference over each step so the release lands on a node
        let r = reference(t);
        p = rk4(c, p, r, r, r, dt);
        trace.push(((i + 1) as f64 * dt, p));
    }

    if p_ref == 0.0 {
        return StepResult {
            p_ref,
            t_release,
            trace,
            rise_time: None,
            fall_time: None,
            settled: true,
            degenerate: true,
        };
    }

    let (lo, hi) = (0.1 * p_ref, 0.9 * p_ref);
    let rise_time = match (
        crossing_time(&trace, 0.0, lo, true),
        crossing_time(&trace, 0.0, hi, true),
    ) {
        (Some(a), Some(b)) if b <= t_release => Some(b - a),
        _ => None,
    };
    let fall_time = match (
        crossing_time(&trace, t_release, hi, false),
        crossing_time(&trace, t_release, lo, false),
    ) {
        (Some(a), Some(b)) => Some(b - a),
        _ => None,
    };
    let at_release = trace
        .iter()
        .rev()
        .find(|(t, _)| *t <= t_release)
        .map_or(0.0, |s| s.1);
    let at_end = trace.last().map_or(0.0, |s| s.1);
    let settled = (at_release - p_ref).abs() <= 0.02 * p_ref && at_end <= 0.02 * p_ref;
    StepResult {
        p_ref,
        t_release,
        trace,
        rise_time,
        fall_time,
        settled,
        degenerate: false,
    }
}

/// Step the reference to `p_ref` at `t = 0` and back to zero at
/// `duration / 2`, integrating at `dt`.
///
/// The run is repeated at `dt / 2`; rise and fall times must agree within
/// 1 % or the step is rejected as non-convergent.
pub fn step_response(
    c: &PneumaticCircuit,
    p_ref: f64,
    duration: f64,
    dt: f64,
) -> Result<StepResult> {
    c.validate()?;
    if !(p_ref >= 0.0 && p_ref <= c.p_supply) {
        return Err(domain(format!(
            "reference must lie in [0, {}] kPa, got {p_ref}",
            c.p_supply
        )));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(domain(format!("duration must be positive, got {duration}")));
    }
    c.check_step(dt)?;
    if duration / dt > 5e7 {
        return Err(domain("duration / dt exceeds 5e7 steps"));
    }

    let coarse = simulate_step(c, p_ref, duration, dt);
    if coarse.degenerate {
        return Ok(coarse);
    }
    let fine = simulate_step(c, p_ref, duration, dt / 2.0);
    for (a, b, what) in [
        (coarse.rise_time, fine.rise_time, "rise"),
        (coarse.fall_time, fine.fall_time, "fall"),
    ] {
        match (a, b) {
            (Some(a), Some(b)) if (a - b).abs() > CONVERGENCE_TOL * b.max(dt) => {
                return Err(Error::Integration(format!(
                    "{what} time not converged: {a} s at dt, {b} s at dt/2"
                )));
            }
            (Some(_), None) | (None, Some(_)) => {
                return Err(Error::Integration(format!(
                    "{what} time exists at only one of dt, dt/2"
                )));
            }
            _ => {}
        }
    }
    Ok(coarse)
}

/// Sample of a closed tank-to-actuator blow-down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TankSample {
    pub t: f64,
    pub p_tank: f64,
    pub p_act: f64,
    /// Air inventory of tank plus actuator, in standard mL.
    pub std_volume_ml: f64,
}

/// Open the fill path fully from a charged, isolated tank into an empty
/// actuator. No air enters or leaves the pair.
pub fn closed_tank_fill(c: &PneumaticCircuit, duration: f64, dt: f64) -> Result<Vec<TankSample>> {
    c.validate()?;
    c.check_step(dt)?;
    let v_tank_ml = c.v_tank * 1000.0;
    let inventory = |pt: f64, pa: f64| {
        ((pt + c.p_atm) * v_tank_ml + (pa + c.p_atm) * c.v_act) * STD_TEMPERATURE_K
            / (c.temperature * STD_PRESSURE_KPA)
    };
    let flow = |pt: f64, pa: f64| {
        if pt > pa {
            c.flow(pt + c.p_atm, pa + c.p_atm, c.c_fill)
        } else {
            0.0
        }
    };
    let (mut pt, mut pa) = (c.p_supply, 0.0);
    let n = (duration / dt).round() as usize;
    let mut out = Vec::with_capacity(n + 1);
    out.push(TankSample {
        t: 0.0,
        p_tank: pt,
        p_act: pa,
        std_volume_ml: inventory(pt, pa),
    });
    let (gt, ga) = (c.dpdt_per_flow(v_tank_ml), c.dpdt_per_flow(c.v_act));
    for i in 0..n {
        // Heun step; the same flow leaves the tank and enters the actuator
        let q1 = flow(pt, pa);
        let q2 = flow(pt - dt * gt * q1, pa + dt * ga * q1);
        let q = 0.5 * (q1 + q2);
        pt -= dt * gt * q;
        pa += dt * ga * q;
        out.push(TankSample {
            t: (i + 1) as f64 * dt,
            p_tank: pt,
            p_act: pa,
            std_volume_ml: inventory(pt, pa),
        });
    }
    Ok(out)
}

/// Minimum number of discarded cycles before measuring amplitude.
const MIN_TRANSIENT_CYCLES: usize = 5;
const MAX_CYCLES: usize = 200;
const SAMPLES_PER_CYCLE: f64 = 400.0;

/// Steady-state amplitude ratio (dB) of the actuator pressure to a sinusoidal
/// reference `p_mean + amplitude·sin(2πft)` at each frequency.
pub fn frequency_response(
    c: &PneumaticCircuit,
    p_mean: f64,
    amplitude: f64,
    freqs: &[f64],
) -> Result<Vec<(f64, f64)>> {
    c.validate()?;
    if !(amplitude > 0.0) || !(p_mean - amplitude > 0.0) || !(p_mean + amplitude < c.p_supply) {
        return Err(domain(format!(
            "p_mean ± amplitude = {p_mean} ± {amplitude} must lie inside (0, {}) kPa",
            c.p_supply
        )));
    }
    freqs
        .iter()
        .map(|&f| {
            if !(f > 0.0 && f.is_finite()) {
                return Err(domain(format!("frequency must be positive, got {f}")));
            }
            Ok((f, magnitude_db(c, p_mean, amplitude, f)?))
        })
        .collect()
}

fn magnitude_db(c: &PneumaticCircuit, p_mean: f64, amplitude: f64, f: f64) -> Result<f64> {
    let period = 1.0 / f;
    let steps = ((period / DEFAULT_DT).ceil()).max(SAMPLES_PER_CYCLE) as usize;
    let dt = period / steps as f64;
    c.check_step(dt)?;
    let w = 2.0 * std::f64::consts::PI * f;
    let reference = |t: f64| p_mean + amplitude * (w * t).sin();

    let mut p = p_mean;
    let mut t = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for cycle in 0..MAX_CYCLES {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..steps {
            let t0 = (cycle * steps + i) as f64 * dt;
            p = rk4(
                c,
                p,
                reference(t0),
                reference(t0 + 0.5 * dt),
                reference(t0 + dt),
                dt,
            );
            lo = lo.min(p);
            hi = hi.max(p);
            t = t0 + dt;
        }
        let amp = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        if cycle + 1 >= MIN_TRANSIENT_CYCLES {
            if let Some((pa, pm)) = prev {
                let tol = 1e-4 * amplitude;
                if (amp - pa).abs() <= tol && (mid - pm).abs() <= tol {
                    return Ok(20.0 * (amp / amplitude).log10());
                }
            }
        }
        prev = Some((amp, mid));
    }
    Err(Error::Integration(format!(
        "no periodic steady state at {f} Hz after {MAX_CYCLES} cycles ({t:.1} s)"
    )))
}

/// −3 dB crossing of a magnitude response, interpolated linearly in
/// `log10(f)`. The first crossing from above is returned.
pub fn cutoff_minus3db(response: &[(f64, f64)]) -> Result<f64> {
    const LEVEL: f64 = -3.0;
    let first = response.first().ok_or(Error::NoCrossing)?;
    if first.1 == LEVEL {
        return Ok(first.0);
    }
    if first.1 < LEVEL {
        return Err(Error::NoCrossing);
    }
    for w in response.windows(2) {
        let ((f0, m0), (f1, m1)) = (w[0], w[1]);
        if m1 == LEVEL {
            return Ok(f1);
        }
        if m1 < LEVEL {
            let (l0, l1) = (f0.log10(), f1.log10());
            let l = l0 + (l1 - l0) * (LEVEL - m0) / (m1 - m0);
            return Ok(10f64.powf(l));
        }
    }
    Err(Error::NoCrossing)
}

/// Sweep frequency geometrically upward from `f_start` by `ratio` until the
/// magnitude falls below −3 dB, then interpolate the crossing.
pub fn find_cutoff(
    c: &PneumaticCircuit,
    p_mean: f64,
    amplitude: f64,
    f_start: f64,
    ratio: f64,
) -> Result<f64> {
    if !(ratio > 1.0) || !(f_start > 0.0) {
        return Err(domain("sweep needs f_start > 0 and ratio > 1"));
    }
    let mut response = Vec::new();
    let mut f = f_start;
    for _ in 0..400 {
        let m = magnitude_db(c, p_mean, amplitude, f)?;
        response.push((f, m));
        if m <= -3.0 {
            return cutoff_minus3db(&response);
        }
        f *= ratio;
    }
    Err(Error::NoCrossing)
}

/// Amplitude convention for the pressure-dependent Bode sweeps: the
/// reference swings between half and one and a half times the mean.
pub fn bode_amplitude(p_mean: f64) -> f64 {
    0.5 * p_mean
}

/// Scale both conductances so the cutoff at `p_mean` equals `target_hz`.
///
/// The dynamics depend on conductance and volume only through their ratio,
/// so the cutoff is proportional to the scale factor; a few fixed-point
/// iterations absorb the discretization error.
pub fn calibrate_cutoff(
    c: &PneumaticCircuit,
    p_mean: f64,
    amplitude: f64,
    target_hz: f64,
) -> Result<PneumaticCircuit> {
    let mut circuit = *c;
    for _ in 0..8 {
        let f = find_cutoff(&circuit, p_mean, amplitude, target_hz / 20.0, 1.03)?;
        if (f - target_hz).abs() <= 1e-4 * target_hz {
            return Ok(circuit);
        }
        circuit = circuit.scaled(target_hz / f);
    }
    Ok(circuit)
}
