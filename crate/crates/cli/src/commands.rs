use std::path::Path;

use serde_json::{json, Value};

use spindle_core::biomech::{self, ArmCoefficients, MomentSurface, PressureSchedule};
use spindle_core::design::{self, DesignConstraints};
use spindle_core::emg::{self, EmgRecording, PreprocessParams, TaggedRecording};
use spindle_core::geometry::{self, PouchGeometry, SpindleProfile, VolumeModelConfig};
use spindle_core::haa::{self, HaaAssembly};
use spindle_core::io::{fmt_num, write_table};
use spindle_core::pneumatics::{self, PneumaticCircuit};
use spindle_core::pouch::{self, ContactRegime};
use spindle_core::stats;

use crate::args::*;
use crate::plot::{emit_plot, PlotStyle, Series};
use crate::{read_file, CliError, CliResult, Global, Output};

pub fn execute(cmd: Command, file: FileConfig, g: &Global) -> CliResult<Output> {
    match cmd {
        Command::Geometry(GeometryCmd::Volume(a)) => geometry_volume(a.merge(file.geometry_volume)),
        Command::Pouch(PouchCmd::Curve(a)) => pouch_curve(a.merge(file.pouch_curve), g),
        Command::Haa(HaaCmd::Torque(a)) => haa_torque(a.merge(file.haa_torque)),
        Command::Pneumo(PneumoCmd::Step(a)) => pneumo_step(a.merge(file.pneumo_step)),
        Command::Pneumo(PneumoCmd::Bode(a)) => pneumo_bode(a.merge(file.pneumo_bode)),
        Command::Design(DesignCmd::Optimize(a)) => design_optimize(a.merge(file.design_optimize)),
        Command::Sim(SimCmd::Assist(a)) => sim_assist(a.merge(file.sim_assist)),
        Command::Emg(EmgCmd::Run(a)) => emg_run(a.merge(file.emg_run), g),
    }
}

fn svg(series: &[Series], title: &str, x: &str, y: &str) -> CliResult<Option<String>> {
    let style = PlotStyle {
        title: title.into(),
        x_label: x.into(),
        y_label: y.into(),
        step_reference: None,
    };
    emit_plot(series, &style).map(Some).map_err(CliError::Usage)
}

fn profile_series(name: &str, p: &SpindleProfile) -> CliResult<Series> {
    let len = p.total_length();
    let pts = (0..=200)
        .map(|i| {
            let x = len * i as f64 / 200.0;
            Ok((x, geometry::width_at(p, x)?))
        })
        .collect::<spindle_core::Result<Vec<_>>>()?;
    Ok(Series::new(name, pts))
}

fn geometry_volume(a: GeometryVolumeArgs) -> CliResult<Output> {
    let (name, profile) = match (&a.profile_file, &a.profile) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --profile or --profile-file".into(),
            ))
        }
        (Some(path), None) => (
            path.display().to_string(),
            SpindleProfile::from_toml(&read_file(path)?)?,
        ),
        (None, p) => {
            let n = p.clone().unwrap_or_else(|| "SSAA".into());
            let profile = SpindleProfile::preset(&n).ok_or_else(|| {
                CliError::Usage(format!("unknown profile {n:?}; expected UCAA or SSAA"))
            })?;
            (n.to_uppercase(), profile)
        }
    };
    let step = a.step_mm.unwrap_or(0.5);
    let cfg = match a.fill_factor {
        Some(k) => VolumeModelConfig::new(k, step)?,
        None => VolumeModelConfig::calibrated(
            &SpindleProfile::ucaa(),
            geometry::UCAA_REFERENCE_VOLUME_ML,
            step,
        )?,
    };
    let v = geometry::inflated_volume(&profile, &cfg)?;
    let v_num = geometry::inflated_volume_numeric(&profile, &cfg)?;
    let v_ucaa = geometry::inflated_volume(&SpindleProfile::ucaa(), &cfg)?;
    let red = geometry::volume_reduction(v_ucaa, v)?;
    let csv = write_table(
        &[
            "volume_ml",
            "volume_numeric_ml",
            "fill_factor",
            "ucaa_volume_ml",
            "reduction_percent",
        ],
        &[vec![v, v_num, cfg.fill_factor, v_ucaa, red]],
    );
    let json = json!({
        "profile": name,
        "dimensions": profile,
        "fill_factor": cfg.fill_factor,
        "fill_factor_calibrated": a.fill_factor.is_none(),
        "volume_ml": v,
        "volume_numeric_ml": v_num,
        "ucaa_volume_ml": v_ucaa,
        "reduction_vs_ucaa_percent": red,
    });
    let svg = svg(
        &[
            profile_series(&name, &profile)?,
            profile_series("UCAA", &SpindleProfile::ucaa())?,
        ],
        "Planform width",
        "arc length (mm)",
        "width (mm)",
    )?;
    Ok(Output {
        name: "geometry_volume",
        csv,
        json,
        svg,
    })
}

fn pouch_geometry(
    l4: Option<f64>,
    l5: Option<f64>,
    ld: Option<f64>,
    seal: Option<f64>,
) -> CliResult<PouchGeometry> {
    let d = PouchGeometry::haa_pouch();
    Ok(PouchGeometry::new(
        l4.unwrap_or(d.l4()),
        l5.unwrap_or(d.l5()),
        ld.unwrap_or(d.ld()),
        seal.unwrap_or(d.w_seal1()),
    )?)
}

fn short_flag(r: ContactRegime) -> f64 {
    f64::from(u8::from(r == ContactRegime::Short))
}

fn pouch_curve(a: PouchCurveArgs, gl: &Global) -> CliResult<Output> {
    let g = pouch_geometry(a.l4_mm, a.l5_mm, a.ld_mm, a.w_seal_mm)?;
    let p = a.pressure_kpa.unwrap_or(90.0);
    let curve = pouch::force_height_curve(
        &g,
        p,
        a.h_min_mm.unwrap_or(0.0),
        a.h_max_mm.unwrap_or(2.0 * g.r4()),
        a.points.unwrap_or(101),
    )?;
    let mc = match a.oracle_grid {
        Some(grid) => Some(
            curve
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    pouch::monte_carlo_area(&g, c.state.h, grid, gl.seed.wrapping_add(i as u64))
                })
                .collect::<spindle_core::Result<Vec<f64>>>()?,
        ),
        None => None,
    };
    let mut header = vec![
        "h_mm",
        "w4_mm",
        "w5_mm",
        "area_mm2",
        "force_n",
        "short_regime",
    ];
    if mc.is_some() {
        header.push("mc_area_mm2");
    }
    let rows: Vec<Vec<f64>> = curve
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let s = c.state;
            let mut r = vec![s.h, s.w4, s.w5, s.area, c.force, short_flag(s.regime)];
            if let Some(m) = &mc {
                r.push(m[i]);
            }
            r
        })
        .collect();
    let points: Vec<Value> = curve
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut v = json!({
                "h_mm": c.state.h,
                "regime": c.state.regime.as_str(),
                "w4_mm": c.state.w4,
                "w5_mm": c.state.w5,
                "lc_mm": c.state.lc,
                "area_mm2": c.state.area,
                "force_n": c.force,
            });
            if let Some(m) = &mc {
                v["mc_area_mm2"] = json!(m[i]);
            }
            v
        })
        .collect();
    let json = json!({
        "geometry": {
            "l4_mm": g.l4(), "l5_mm": g.l5(), "ld_mm": g.ld(), "w_seal_mm": g.w_seal1(),
            "r4_mm": g.r4(), "r5_mm": g.r5(), "la_mm": g.la(), "alpha_deg": g.alpha().to_degrees(),
        },
        "pressure_kpa": p,
        "seed": mc.as_ref().map(|_| gl.seed),
        "points": points,
    });
    let series = Series::new(
        format!("{} kPa", fmt_num(p)),
        curve.iter().map(|c| (c.state.h, c.force)).collect(),
    );
    let svg = svg(
        &[series],
        "Pouch force",
        "compression height (mm)",
        "force (N)",
    )?;
    Ok(Output {
        name: "pouch_curve",
        csv: write_table(&header, &rows),
        json,
        svg,
    })
}

fn haa_torque(a: HaaTorqueArgs) -> CliResult<Output> {
    let g = pouch_geometry(a.l4_mm, a.l5_mm, a.ld_mm, a.w_seal_mm)?;
    let mut asm = HaaAssembly::new(
        g,
        a.sewing_offset_mm.unwrap_or(haa::DEFAULT_SEWING_OFFSET_MM),
    )?;
    if let Some(m) = a.max_pressure_kpa {
        asm = asm.with_max_pressure(m);
    }
    let p = a.pressure_kpa.unwrap_or(90.0);
    let curve = haa::torque_angle_curve(
        &asm,
        p,
        a.beta_min_deg.unwrap_or(0.0),
        a.beta_max_deg.unwrap_or(210.0),
        a.points.unwrap_or(211),
    )?;
    let rows: Vec<Vec<f64>> = curve
        .iter()
        .map(|s| {
            vec![
                s.bend.beta,
                s.bend.h,
                s.bend.l_arm,
                s.force,
                s.torque,
                short_flag(s.regime),
            ]
        })
        .collect();
    let csv = write_table(
        &[
            "beta_deg",
            "h_mm",
            "l_arm_mm",
            "force_n",
            "torque_nm",
            "short_regime",
        ],
        &rows,
    );
    let json = json!({
        "assembly": asm,
        "l_o1o2_mm": asm.l_o1o2(),
        "regime_boundary_beta_deg": asm.regime_boundary_beta(),
        "pressure_kpa": p,
        "points": curve.iter().map(|s| json!({
            "beta_deg": s.bend.beta, "h_mm": s.bend.h, "l_arm_mm": s.bend.l_arm,
            "regime": s.regime.as_str(), "force_n": s.force, "torque_nm": s.torque,
        })).collect::<Vec<_>>(),
    });
    let series = Series::new(
        format!("{} kPa", fmt_num(p)),
        curve.iter().map(|s| (s.bend.beta, s.torque)).collect(),
    );
    let svg = svg(
        &[series],
        "Adduction torque",
        "bending angle (deg)",
        "torque (N m)",
    )?;
    Ok(Output {
        name: "haa_torque",
        csv,
        json,
        svg,
    })
}

fn circuit(
    volume: Option<f64>,
    supply: Option<f64>,
    c_fill: Option<f64>,
    ratio: Option<f64>,
    band: Option<f64>,
) -> PneumaticCircuit {
    let mut c = PneumaticCircuit::default();
    if let Some(v) = volume {
        c.v_act = v;
    }
    if let Some(p) = supply {
        c.p_supply = p;
    }
    c.c_fill = c_fill.unwrap_or(c.c_fill);
    c.c_vent = c.c_fill * ratio.unwrap_or(pneumatics::DEFAULT_VENT_RATIO);
    if let Some(b) = band {
        c.band = b;
    }
    c
}

fn pneumo_step(a: PneumoStepArgs) -> CliResult<Output> {
    let c = circuit(
        a.volume_ml,
        a.supply_kpa,
        a.c_fill,
        a.vent_ratio,
        a.band_kpa,
    );
    let p = a.pressure_kpa.unwrap_or(90.0);
    let r = pneumatics::step_response(
        &c,
        p,
        a.duration_s.unwrap_or(6.0),
        a.dt_s.unwrap_or(pneumatics::DEFAULT_DT),
    )?;
    let rows: Vec<Vec<f64>> = r.trace.iter().map(|&(t, v)| vec![t, v]).collect();
    let csv = write_table(&["t_s", "p_kpa"], &rows);
    let json = json!({
        "circuit": c,
        "p_ref_kpa": r.p_ref,
        "t_release_s": r.t_release,
        "rise_time_s": r.rise_time,
        "fall_time_s": r.fall_time,
        "settled": r.settled,
        "degenerate": r.degenerate,
        "trace": r.trace,
    });
    let style = PlotStyle {
        title: format!("Step to {} kPa, {} mL", fmt_num(p), fmt_num(c.v_act)),
        x_label: "time (s)".into(),
        y_label: "pressure (kPa)".into(),
        step_reference: (p > 0.0).then_some(p),
    };
    let svg =
        emit_plot(&[Series::new("actuator", r.trace.clone())], &style).map_err(CliError::Usage)?;
    Ok(Output {
        name: "pneumo_step",
        csv,
        json,
        svg: Some(svg),
    })
}

fn pneumo_bode(a: PneumoBodeArgs) -> CliResult<Output> {
    let mut c = circuit(
        a.volume_ml,
        a.supply_kpa,
        a.c_fill,
        a.vent_ratio,
        a.band_kpa,
    );
    let means = a.mean_kpa.unwrap_or_else(|| vec![20.0, 50.0, 80.0]);
    if means.is_empty() {
        return Err(CliError::Usage(
            "--mean-kpa needs at least one value".into(),
        ));
    }
    let amp = |m: f64| {
        a.amplitude_kpa
            .unwrap_or_else(|| pneumatics::bode_amplitude(m))
    };
    if let Some(target) = a.calibrate_hz {
        c = pneumatics::calibrate_cutoff(&c, means[0], amp(means[0]), target)?;
    }
    let (f0, f1, n) = (
        a.f_min_hz.unwrap_or(0.05),
        a.f_max_hz.unwrap_or(5.0),
        a.points.unwrap_or(40),
    );
    if !(f0 > 0.0 && f1 > f0) || n < 2 {
        return Err(CliError::Usage(
            "need 0 < f_min < f_max and at least 2 points".into(),
        ));
    }
    let freqs: Vec<f64> = (0..n)
        .map(|i| f0 * (f1 / f0).powf(i as f64 / (n - 1) as f64))
        .collect();
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    let mut series = Vec::new();
    for &m in &means {
        let resp = pneumatics::frequency_response(&c, m, amp(m), &freqs)?;
        let cutoff = match pneumatics::find_cutoff(&c, m, amp(m), f0, 1.02) {
            Ok(f) => Some(f),
            Err(spindle_core::Error::NoCrossing) => None,
            Err(e) => return Err(e.into()),
        };
        rows.extend(resp.iter().map(|&(f, db)| vec![m, f, db]));
        curves.push(
            json!({"mean_kpa": m, "amplitude_kpa": amp(m), "cutoff_hz": cutoff, "response": resp}),
        );
        series.push(Series::new(
            format!("{} kPa", fmt_num(m)),
            resp.iter().map(|&(f, db)| (f.log10(), db)).collect(),
        ));
    }
    let json = json!({ "circuit": c, "calibrated": a.calibrate_hz.is_some(), "series": curves });
    let svg = svg(
        &series,
        "Magnitude response",
        "log10 frequency (Hz)",
        "magnitude (dB)",
    )?;
    Ok(Output {
        name: "pneumo_bode",
        csv: write_table(&["mean_kpa", "freq_hz", "magnitude_db"], &rows),
        json,
        svg,
    })
}

fn design_optimize(a: DesignOptimizeArgs) -> CliResult<Output> {
    let c = match &a.constraints_file {
        Some(path) => {
            if a.m_target_nm.is_some() || a.w_min_end_mm.is_some() {
                return Err(CliError::Usage(
                    "--constraints-file already sets the target and end width".into(),
                ));
            }
            DesignConstraints::from_toml(&read_file(path)?)?
        }
        None => DesignConstraints::reference_box(
            a.m_target_nm.unwrap_or(design::ANCHOR_MOMENT_NM),
            a.w_min_end_mm.unwrap_or(50.0),
        ),
    };
    let cfg = VolumeModelConfig::default();
    let out = design::optimize_spindle(&c, &cfg)?;
    let rows: Vec<Vec<f64>> = out
        .frontier
        .iter()
        .map(|p| {
            vec![
                p.lu,
                p.lp,
                p.w1,
                p.w2,
                p.w3,
                p.volume_ml,
                p.torque_margin,
                p.width_margin,
                f64::from(u8::from(p.feasible)),
            ]
        })
        .collect();
    let csv = write_table(
        &[
            "lu_mm",
            "lp_mm",
            "w1_mm",
            "w2_mm",
            "w3_mm",
            "volume_ml",
            "torque_margin_nm",
            "width_margin_mm",
            "feasible",
        ],
        &rows,
    );
    let ssaa = design::evaluate_design(&SpindleProfile::ssaa(), &c, &PneumaticCircuit::default())?;
    let json = json!({
        "constraints": c,
        "report": out.report,
        "evaluated": out.frontier.len(),
        "feasible_points": out.frontier.iter().filter(|p| p.feasible).count(),
        "ssaa_reference": ssaa,
    });
    let svg = svg(
        &[
            profile_series("optimum", &out.report.profile)?,
            profile_series("SSAA", &SpindleProfile::ssaa())?,
            profile_series("UCAA", &SpindleProfile::ucaa())?,
        ],
        "Designed planform",
        "arc length (mm)",
        "width (mm)",
    )?;
    if !out.report.feasible {
        return Err(CliError::Core(spindle_core::Error::Infeasible(format!(
            "no grid point meets {} N m; closest has torque margin {} N m",
            fmt_num(c.m_target),
            fmt_num(out.report.torque_margin)
        ))));
    }
    Ok(Output {
        name: "design_optimize",
        csv,
        json,
        svg,
    })
}

fn sim_assist(a: SimAssistArgs) -> CliResult<Output> {
    let coeffs = match &a.coefficients_file {
        Some(p) => ArmCoefficients::from_toml(&read_file(p)?)?,
        None => ArmCoefficients::default(),
    };
    let arm = biomech::anthropometric_arm(
        a.body_mass_kg.unwrap_or(65.4),
        a.height_cm.unwrap_or(166.9),
        a.load_kg.unwrap_or(0.0),
        &coeffs,
    )?;
    let surface = match &a.surface_file {
        Some(p) => MomentSurface::from_csv(&read_file(p)?)?,
        None => MomentSurface::synthetic_demo(),
    };
    let schedule = match (&a.schedule_file, a.pressure_kpa) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --pressure-kpa or --schedule-file".into(),
            ))
        }
        (Some(p), None) => PressureSchedule::from_csv(&read_file(p)?)?,
        (None, p) => PressureSchedule::study(p.unwrap_or(biomech::STUDY_CAA_PRESSURE_KPA)),
    };
    let samples = biomech::assistance_profile(
        &arm,
        &surface,
        &schedule,
        a.dt_s.unwrap_or(0.01),
        a.clamp.unwrap_or(false),
    )?;
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            vec![
                s.t,
                s.angle,
                s.pressure,
                s.m_g,
                s.m_act,
                s.residual,
                f64::from(u8::from(s.clamped)),
            ]
        })
        .collect();
    let csv = write_table(
        &[
            "t_s",
            "angle_deg",
            "pressure_kpa",
            "m_g_nm",
            "m_act_nm",
            "residual_nm",
            "clamped",
        ],
        &rows,
    );
    let hold: Vec<&biomech::AssistSample> = samples
        .iter()
        .filter(|s| s.t >= biomech::RAISE_END_S && s.t < biomech::HOLD_END_S)
        .collect();
    let mean = |f: &dyn Fn(&biomech::AssistSample) -> f64| {
        (!hold.is_empty()).then(|| hold.iter().map(|s| f(s)).sum::<f64>() / hold.len() as f64)
    };
    let json = json!({
        "arm": arm,
        "arm_mass_kg": arm.arm_mass(),
        "surface_provenance": surface.provenance,
        "peak_gravity_moment_nm": samples.iter().map(|s| s.m_g).fold(0.0, f64::max),
        "hold_mean_gravity_moment_nm": mean(&|s| s.m_g),
        "hold_mean_actuator_moment_nm": mean(&|s| s.m_act),
        "hold_mean_residual_nm": mean(&|s| s.residual),
        "any_clamped": samples.iter().any(|s| s.clamped),
        "samples": samples,
    });
    let svg = svg(
        &[
            Series::new("gravity", samples.iter().map(|s| (s.t, s.m_g)).collect()),
            Series::new("actuator", samples.iter().map(|s| (s.t, s.m_act)).collect()),
            Series::new(
                "residual",
                samples.iter().map(|s| (s.t, s.residual)).collect(),
            ),
        ],
        "Shoulder moments",
        "time (s)",
        "moment (N m)",
    )?;
    Ok(Output {
        name: "sim_assist",
        csv,
        json,
        svg,
    })
}

fn markers_path(recording: &Path) -> std::path::PathBuf {
    let stem = recording
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    recording.with_file_name(format!("{stem}.markers.csv"))
}

fn emg_run(a: EmgRunArgs, g: &Global) -> CliResult<Output> {
    let need = |v: &Option<std::path::PathBuf>, flag: &str| {
        v.clone()
            .ok_or_else(|| CliError::Usage(format!("emg run needs --{flag}")))
    };
    let dir = need(&a.recordings, "recordings")?;
    let mvc = emg::mvc_from_csv(&read_file(&need(&a.mvc, "mvc")?)?)?;
    let (header, rows) =
        spindle_core::io::read_records(&read_file(&need(&a.conditions, "conditions")?)?)?;
    if header != ["file", "subject", "condition"] {
        return Err(CliError::Core(spindle_core::Error::Parse(
            "conditions map needs columns file,subject,condition".into(),
        )));
    }
    let mut conditions: Vec<String> = Vec::new();
    let mut inputs = Vec::new();
    for r in &rows {
        let path = dir.join(&r[0]);
        let markers = emg::markers_from_csv(&read_file(&markers_path(&path))?)?;
        let recording = EmgRecording::from_csv(&read_file(&path)?, markers)
            .map_err(|e| CliError::Core(tag_file(e, &r[0])))?;
        if !conditions.contains(&r[2]) {
            conditions.push(r[2].clone());
        }
        inputs.push(TaggedRecording {
            file: r[0].clone(),
            subject: r[1].clone(),
            condition: r[2].clone(),
            recording,
        });
    }
    let d = PreprocessParams::default();
    let params = PreprocessParams {
        low_hz: a.low_hz.unwrap_or(d.low_hz),
        high_hz: a.high_hz.unwrap_or(d.high_hz),
        order: a.order.unwrap_or(d.order),
        window_s: a.window_s.unwrap_or(d.window_s),
    };
    let features = emg::extract_features(&inputs, &mvc, &params)?;
    let muscles = emg::compare_conditions(&features, &conditions)?;
    let subjects: std::collections::BTreeSet<&String> = inputs.iter().map(|t| &t.subject).collect();
    let m = conditions.len() * (conditions.len() - 1) / 2;

    let mut csv_rows = Vec::new();
    for mr in &muscles {
        for (k, c) in mr.pairwise.iter().enumerate() {
            let r = &c.result;
            csv_rows.push(format!(
                "{},{},{},{},{},{},{},{},{}",
                mr.muscle,
                c.condition_a,
                c.condition_b,
                k,
                fmt_num(r.p_value),
                fmt_num(r.test_statistic),
                r.effect_size_d.map(fmt_num).unwrap_or_default(),
                r.reduction_percent.map(fmt_num).unwrap_or_default(),
                r.significance().as_str()
            ));
        }
    }
    let csv = format!(
        "muscle,condition_a,condition_b,pair,p_value,statistic,effect_size_d,reduction_percent,significance\n{}",
        csv_rows.iter().map(|r| format!("{r}\n")).collect::<String>()
    );
    let json = json!({
        "params": params,
        "alpha": stats::ALPHA,
        "alpha_corrected": stats::ALPHA / m.max(1) as f64,
        "comparisons_per_muscle": m,
        "threshold_rule": "significant if p < alpha / comparisons; trend if alpha / comparisons <= p < alpha",
        "conditions": conditions,
        "baseline": conditions[0],
        "subjects": subjects,
        "recordings": inputs.len(),
        "muscles": muscles,
        "repetition_means": features
            .iter()
            .map(|((s, c, m), v)| json!({"subject": s, "condition": c, "muscle": m, "means_pct_mvc": v}))
            .collect::<Vec<_>>(),
    });
    let bars: Vec<Series> = muscles
        .iter()
        .flat_map(|mr| {
            mr.pairwise
                .iter()
                .filter_map(|c| c.result.reduction_percent)
                .map(move |r| (mr.muscle.clone(), r))
        })
        .enumerate()
        .map(|(i, (m, r))| Series::new(m, vec![(i as f64, r)]))
        .collect();
    let svg = if bars.is_empty() {
        None
    } else {
        svg(&bars, "Median reduction", "comparison", "reduction (%)")?
    };
    let report = match (&a.out, &g.out_dir, g.format) {
        (Some(p), _, _) => Some(p.clone()),
        (None, Some(dir), crate::args::Format::Csv) => Some(dir.join("emg_report.json")),
        _ => None,
    };
    if let Some(out) = &report {
        let text = serde_json::to_string_pretty(&crate::round_json(json.clone()))
            .expect("JSON values serialize");
        if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
        }
        std::fs::write(out, text + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    }
    Ok(Output {
        name: "emg_report",
        csv,
        json,
        svg,
    })
}

fn tag_file(e: spindle_core::Error, file: &str) -> spindle_core::Error {
    use spindle_core::Error;
    match e {
        Error::Parse(m) => Error::Parse(format!("{file}: {m}")),
        Error::Domain(m) => Error::Domain(format!("{file}: {m}")),
        other => other,
    }
}
