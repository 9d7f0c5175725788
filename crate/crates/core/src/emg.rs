//! sEMG envelopes (band-pass, rectify, smooth, %MVC), repetition segments
//! and per-muscle condition comparisons.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::io;
use crate::stats::{self, StatResult};

pub const MUSCLES: [&str; 7] = ["BIC", "SS", "UT", "PM", "AD", "PD", "MD"];

#[derive(Debug, Clone, PartialEq)]
pub struct EmgRecording {
    pub sample_rate: f64,
    pub start_time: f64,
    pub channels: Vec<String>,
    /// One signal per channel, all the same length.
    pub samples: Vec<Vec<f64>>,
    /// Flat `[onset, offset, onset, offset, …]` times (s).
    pub markers: Vec<f64>,
}

impl EmgRecording {
    pub fn new(
        sample_rate: f64,
        channels: Vec<String>,
        samples: Vec<Vec<f64>>,
        markers: Vec<f64>,
    ) -> Result<Self> {
        let r = Self {
            sample_rate,
            start_time: 0.0,
            channels,
            samples,
            markers,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn len(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration(&self) -> f64 {
        self.len().saturating_sub(1) as f64 / self.sample_rate
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(domain(format!(
                "sample rate must be positive, got {}",
                self.sample_rate
            )));
        }
        if self.channels.is_empty() || self.channels.len() != self.samples.len() {
            return Err(domain("channel names and signals do not match"));
        }
        let mut seen = BTreeSet::new();
        for c in &self.channels {
            if !MUSCLES.contains(&c.as_str()) {
                return Err(domain(format!(
                    "unknown muscle {c:?}; expected one of {}",
                    MUSCLES.join(", ")
                )));
            }
            if !seen.insert(c) {
                return Err(domain(format!("duplicate channel {c}")));
            }
        }
        let n = self.len();
        if n == 0 || self.samples.iter().any(|s| s.len() != n) {
            return Err(domain("channels must be nonempty and of equal length"));
        }
        if self.samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(domain("signal contains non-finite samples"));
        }
        if !self.markers.windows(2).all(|w| w[0] < w[1]) {
            return Err(domain("markers must be strictly increasing"));
        }
        let end = self.start_time + self.duration();
        if self.markers.iter().any(|&m| m < self.start_time || m > end) {
            return Err(domain(format!(
                "markers must lie within [{}, {end}] s",
                self.start_time
            )));
        }
        Ok(())
    }

    /// Parse a `time_s,<muscle>,…` CSV. The sample rate comes from the time
    /// column, which must be uniformly spaced.
    pub fn from_csv(text: &str, markers: Vec<f64>) -> Result<Self> {
        let t = io::read_table(text)?;
        if t.header.first().map(String::as_str) != Some("time_s") || t.header.len() < 2 {
            return Err(Error::Parse(
                "recording needs a time_s column followed by channels".into(),
            ));
        }
        if t.rows.len() < 2 {
            return Err(Error::Parse("recording needs at least two samples".into()));
        }
        let time: Vec<f64> = t.rows.iter().map(|r| r[0]).collect();
        let n = time.len();
        let dt = (time[n - 1] - time[0]) / (n - 1) as f64;
        if !(dt > 0.0)
            || time
                .windows(2)
                .any(|w| ((w[1] - w[0]) - dt).abs() > 0.01 * dt)
        {
            return Err(Error::Parse("time_s must be uniformly increasing".into()));
        }
        let samples = (1..t.header.len())
            .map(|j| t.rows.iter().map(|r| r[j]).collect())
            .collect();
        let r = Self {
            sample_rate: 1.0 / dt,
            start_time: time[0],
            channels: t.header[1..].to_vec(),
            samples,
            markers,
        };
        r.validate()?;
        Ok(r)
    }
}

/// Parse an `onset_s,offset_s` marker file into the flat marker list.
pub fn markers_from_csv(text: &str) -> Result<Vec<f64>> {
    let t = io::read_table(text)?;
    t.expect_header(&["onset_s", "offset_s"])?;
    Ok(t.rows.iter().flat_map(|r| [r[0], r[1]]).collect())
}

/// Per-muscle MVC peak, in the recordings' amplitude units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MvcRecord {
    pub values: BTreeMap<String, f64>,
}

impl MvcRecord {
    pub fn new(values: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((k, v)) = values.iter().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(domain(format!("MVC for {k} must be positive, got {v}")));
        }
        Ok(Self { values })
    }

    pub fn get(&self, muscle: &str) -> Result<f64> {
        self.values
            .get(muscle)
            .copied()
            .ok_or_else(|| domain(format!("no MVC value for {muscle}")))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self
                .values
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }
}

/// Parse MVC values: a header of muscle names and one row, or a leading
/// `subject` column with one row per subject. Single-row files are keyed by
/// the empty subject `""`.
pub fn mvc_from_csv(text: &str) -> Result<BTreeMap<String, MvcRecord>> {
    let (header, rows) = io::read_records(text)?;
    let keyed = header.first().map(String::as_str) == Some("subject");
    let muscles = if keyed { &header[1..] } else { &header[..] };
    if rows.is_empty() || (!keyed && rows.len() != 1) {
        return Err(Error::Parse(
            "MVC file needs one row, or one row per subject with a subject column".into(),
        ));
    }
    let mut out = BTreeMap::new();
    for row in &rows {
        let (subject, cells) = if keyed {
            (row[0].clone(), &row[1..])
        } else {
            (String::new(), &row[..])
        };
        let mut values = BTreeMap::new();
        for (m, c) in muscles.iter().zip(cells) {
            let v: f64 = c
                .parse()
                .map_err(|_| Error::Parse(format!("MVC {m}: not a number: {c:?}")))?;
            values.insert(m.clone(), v);
        }
        if out
            .insert(subject.clone(), MvcRecord::new(values)?)
            .is_some()
        {
            return Err(Error::Parse(format!(
                "duplicate MVC row for subject {subject:?}"
            )));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreprocessParams {
    pub low_hz: f64,
    pub high_hz: f64,
    /// Butterworth order of each band edge.
    pub order: usize,
    pub window_s: f64,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        Self {
            low_hz: 20.0,
            high_hz: 450.0,
            order: 4,
            window_s: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Biquad {
    b: [f64; 3],
    a: [f64; 2],
}

impl Biquad {
    fn new(kind: Edge, f: f64, fs: f64, q: f64) -> Self {
        let w0 = 2.0 * std::f64::consts::PI * f / fs;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * q);
        let a0 = 1.0 + alpha;
        let b = match kind {
            Edge::Low => [(1.0 - cos) / 2.0, 1.0 - cos, (1.0 - cos) / 2.0],
            Edge::High => [(1.0 + cos) / 2.0, -(1.0 + cos), (1.0 + cos) / 2.0],
        };
        Self {
            b: b.map(|v| v / a0),
            a: [-2.0 * cos / a0, (1.0 - alpha) / a0],
        }
    }

    fn run(&self, x: &mut [f64]) {
        let (mut z1, mut z2) = (0.0, 0.0);
        for v in x.iter_mut() {
            let y = self.b[0] * *v + z1;
            z1 = self.b[1] * *v - self.a[0] * y + z2;
            z2 = self.b[2] * *v - self.a[1] * y;
            *v = y;
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Edge {
    Low,
    High,
}

fn butterworth(kind: Edge, order: usize, f: f64, fs: f64) -> Vec<Biquad> {
    let n = order as f64;
    (0..order / 2)
        .map(|k| {
            let q = 1.0 / (2.0 * (std::f64::consts::PI * (2.0 * k as f64 + 1.0) / (2.0 * n)).cos());
            Biquad::new(kind, f, fs, q)
        })
        .collect()
}

/// Zero-phase band-pass with odd-reflection padding at both ends.
pub fn bandpass(x: &[f64], fs: f64, p: &PreprocessParams) -> Result<Vec<f64>> {
    if p.order == 0 || !p.order.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "filter order must be even and positive, got {}",
            p.order
        )));
    }
    let nyquist = fs / 2.0;
    let high = p.high_hz.min(0.95 * nyquist);
    if !(p.low_hz > 0.0) || p.low_hz >= high {
        return Err(Error::Config(format!(
            "sample rate {fs} Hz too low for a {} Hz high-pass edge",
            p.low_hz
        )));
    }
    let mut sections = butterworth(Edge::High, p.order, p.low_hz, fs);
    sections.extend(butterworth(Edge::Low, p.order, high, fs));

    let n = x.len();
    if n < 2 {
        return Ok(vec![0.0; n]);
    }
    let pad = ((3.0 * fs / p.low_hz).ceil() as usize).min(n - 1);
    let mut buf = Vec::with_capacity(n + 2 * pad);
    buf.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    buf.extend_from_slice(x);
    buf.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

    for s in &sections {
        s.run(&mut buf);
    }
    buf.reverse();
    for s in &sections {
        s.run(&mut buf);
    }
    buf.reverse();
    Ok(buf[pad..pad + n].to_vec())
}

/// Centered moving average over `w` samples; the window shrinks at the ends.
pub fn moving_average(x: &[f64], w: usize) -> Vec<f64> {
    let n = x.len();
    let w = w.max(1);
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in x {
        prefix.push(prefix.last().unwrap() + v);
    }
    let before = (w - 1) / 2;
    let after = w - 1 - before;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// %MVC envelope of every channel.
pub fn preprocess(
    r: &EmgRecording,
    mvc: &MvcRecord,
    p: &PreprocessParams,
) -> Result<Vec<Vec<f64>>> {
    r.validate()?;
    if !(p.window_s > 0.0) {
        return Err(Error::Config(format!(
            "smoothing window must be positive, got {}",
            p.window_s
        )));
    }
    let w = (p.window_s * r.sample_rate).round() as usize;
    r.channels
        .iter()
        .zip(&r.samples)
        .map(|(name, x)| {
            let peak = mvc.get(name)?;
            let mut y = bandpass(x, r.sample_rate, p)?;
            y.iter_mut().for_each(|v| *v = v.abs());
            Ok(moving_average(&y, w)
                .into_iter()
                .map(|v| 100.0 * v / peak)
                .collect())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub onset: f64,
    pub offset: f64,
    /// Mean envelope per channel over `[onset, offset]`.
    pub means: Vec<f64>,
}

/// Split per-channel envelopes at the marker pairs.
pub fn segment_repetitions(
    envelope: &[Vec<f64>],
    sample_rate: f64,
    start_time: f64,
    markers: &[f64],
) -> Result<Vec<Segment>> {
    if !markers.len().is_multiple_of(2) {
        return Err(domain(format!(
            "{} markers do not pair into onset/offset",
            markers.len()
        )));
    }
    if !markers.windows(2).all(|w| w[0] < w[1]) {
        return Err(domain("marker pairs overlap or are out of order"));
    }
    let n = envelope.first().map_or(0, Vec::len);
    markers
        .chunks_exact(2)
        .map(|pair| {
            let (on, off) = (pair[0], pair[1]);
            let i0 = ((on - start_time) * sample_rate - 1e-9).ceil().max(0.0) as usize;
            let i1 = (((off - start_time) * sample_rate + 1e-9).floor() as usize)
                .min(n.saturating_sub(1));
            if n == 0 || i0 > i1 {
                return Err(domain(format!("segment [{on}, {off}] s holds no samples")));
            }
            let means = envelope
                .iter()
                .map(|ch| ch[i0..=i1].iter().sum::<f64>() / (i1 - i0 + 1) as f64)
                .collect();
            Ok(Segment {
                onset: on,
                offset: off,
                means,
            })
        })
        .collect()
}

pub fn condition_mean(segment_means: &[f64]) -> Result<f64> {
    stats::mean(segment_means)
}

/// One recording tagged with its subject and condition.
#[derive(Debug, Clone)]
pub struct TaggedRecording {
    pub file: String,
    pub subject: String,
    pub condition: String,
    pub recording: EmgRecording,
}

/// Per-subject, per-condition, per-muscle repetition means.
pub type FeatureTable = BTreeMap<(String, String, String), Vec<f64>>;

/// Preprocess and segment every recording in parallel. MVC lookup uses the
/// subject's row, falling back to the `""` row.
pub fn extract_features(
    inputs: &[TaggedRecording],
    mvc: &BTreeMap<String, MvcRecord>,
    p: &PreprocessParams,
) -> Result<FeatureTable> {
    let per_file: Vec<FeatureTable> = inputs
        .par_iter()
        .map(|t| {
            let rec_mvc = mvc
                .get(&t.subject)
                .or_else(|| mvc.get(""))
                .ok_or_else(|| domain(format!("no MVC row for subject {}", t.subject)))?;
            let r = &t.recording;
            let env = preprocess(r, rec_mvc, p).map_err(|e| tag(e, &t.file))?;
            let segs = segment_repetitions(&env, r.sample_rate, r.start_time, &r.markers)
                .map_err(|e| tag(e, &t.file))?;
            Ok(r.channels
                .iter()
                .enumerate()
                .map(|(c, m)| {
                    let key = (t.subject.clone(), t.condition.clone(), m.clone());
                    (key, segs.iter().map(|s| s.means[c]).collect())
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut table = FeatureTable::new();
    for (k, v) in per_file.into_iter().flatten() {
        table.entry(k).or_default().extend(v);
    }
    Ok(table)
}

fn tag(e: Error, file: &str) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("{file}: {m}")),
        Error::Config(m) => Error::Config(format!("{file}: {m}")),
        other => other,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairwiseComparison {
    pub condition_a: String,
    pub condition_b: String,
    pub median_a: f64,
    pub median_b: f64,
    pub result: StatResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct MuscleReport {
    pub muscle: String,
    pub subjects: usize,
    pub friedman: Option<StatResult>,
    pub pairwise: Vec<PairwiseComparison>,
}

/// Compare conditions per muscle. Two conditions get one Wilcoxon test;
/// three or more get Friedman plus Bonferroni-corrected pairwise Wilcoxon
/// tests. Only subjects with every condition enter a muscle's tests.
pub fn compare_conditions(
    features: &FeatureTable,
    conditions: &[String],
) -> Result<Vec<MuscleReport>> {
    if conditions.len() < 2 {
        return Err(domain("need at least two conditions to compare"));
    }
    let mut values: BTreeMap<&str, BTreeMap<&str, BTreeMap<&str, f64>>> = BTreeMap::new();
    for ((subject, condition, muscle), reps) in features {
        values
            .entry(muscle)
            .or_default()
            .entry(subject)
            .or_default()
            .insert(condition, condition_mean(reps)?);
    }

    let pairs: Vec<(usize, usize)> = (0..conditions.len())
        .flat_map(|i| (i + 1..conditions.len()).map(move |j| (i, j)))
        .collect();
    let m = pairs.len();

    let mut out = Vec::new();
    for (muscle, by_subject) in values {
        let rows: Vec<Vec<f64>> = by_subject
            .values()
            .filter_map(|c| {
                conditions
                    .iter()
                    .map(|k| c.get(k.as_str()).copied())
                    .collect()
            })
            .collect();
        if rows.is_empty() {
            continue;
        }
        let friedman = if conditions.len() >= 3 && rows.len() >= 2 {
            Some(stats::friedman(&rows)?)
        } else {
            None
        };
        let mut pairwise = Vec::new();
        for &(i, j) in &pairs {
            let paired: Vec<(f64, f64)> = rows.iter().map(|r| (r[i], r[j])).collect();
            let a: Vec<f64> = paired.iter().map(|p| p.0).collect();
            let b: Vec<f64> = paired.iter().map(|p| p.1).collect();
            let (median_a, median_b) = (stats::median(&a)?, stats::median(&b)?);
            let mut result = stats::wilcoxon_signed_rank(&paired)?.with_comparisons(m);
            result.effect_size_d = if paired.len() >= 2 {
                stats::effect_size_d(&paired)?
            } else {
                None
            };
            result.reduction_percent = stats::reduction(median_a, median_b).ok();
            pairwise.push(PairwiseComparison {
                condition_a: conditions[i].clone(),
                condition_b: conditions[j].clone(),
                median_a,
                median_b,
                result,
            });
        }
        out.push(MuscleReport {
            muscle: muscle.to_string(),
            subjects: rows.len(),
            friedman,
            pairwise,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(freq: f64, fs: f64, secs: f64, amp: f64) -> Vec<f64> {
        let n = (fs * secs) as usize;
        (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / fs).sin())
            .collect()
    }

    fn mvc(v: f64) -> MvcRecord {
        MvcRecord::new(BTreeMap::from([
            ("AD".to_string(), v),
            ("MD".to_string(), v),
        ]))
        .unwrap()
    }

    #[test]
    fn zero_signal_zero_envelope() {
        let r =
            EmgRecording::new(2048.0, vec!["AD".into()], vec![vec![0.0; 4096]], vec![]).unwrap();
        let env = preprocess(&r, &mvc(1.0), &PreprocessParams::default()).unwrap();
        assert!(env[0].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn sine_envelope_is_full_mvc() {
        let fs = 2048.0;
        let x = sine(97.0, fs, 4.0, 1.0);
        let r = EmgRecording::new(fs, vec!["AD".into()], vec![x], vec![]).unwrap();
        let env = preprocess(&r, &mvc(2.0 / PI), &PreprocessParams::default()).unwrap();
        let trim = fs as usize / 2;
        for v in &env[0][trim..env[0].len() - trim] {
            assert!((v - 100.0).abs() < 2.0, "{v}");
        }
    }

    #[test]
    fn stopband_is_attenuated() {
        let fs = 2048.0;
        let p = PreprocessParams::default();
        for f in [2.0, 900.0] {
            let y = bandpass(&sine(f, fs, 4.0, 1.0), fs, &p).unwrap();
            let mid = &y[1024..y.len() - 1024];
            let peak = mid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(peak < 0.01, "{f} Hz leaks {peak}");
        }
    }

    #[test]
    fn scale_invariance() {
        let fs = 1926.0;
        let x: Vec<f64> = (0..3000)
            .map(|i| ((i * 7919) % 113) as f64 - 56.0)
            .collect();
        let r = EmgRecording::new(fs, vec!["MD".into()], vec![x.clone()], vec![]).unwrap();
        let rs = EmgRecording::new(
            fs,
            vec!["MD".into()],
            vec![x.iter().map(|v| v * 37.5).collect()],
            vec![],
        )
        .unwrap();
        let p = PreprocessParams::default();
        let a = preprocess(&r, &mvc(3.0), &p).unwrap();
        let b = preprocess(&rs, &mvc(3.0).scaled(37.5), &p).unwrap();
        for (u, v) in a[0].iter().zip(&b[0]) {
            assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
        }
    }

    #[test]
    fn low_rate_is_a_config_error() {
        let r = EmgRecording::new(30.0, vec!["AD".into()], vec![vec![1.0; 100]], vec![]).unwrap();
        assert!(matches!(
            preprocess(&r, &mvc(1.0), &PreprocessParams::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn moving_average_window() {
        let x = [0.0, 0.0, 3.0, 0.0, 0.0];
        assert_eq!(moving_average(&x, 3), vec![0.0, 1.0, 1.0, 1.0, 0.0]);
        assert_eq!(moving_average(&[2.0; 10], 4), vec![2.0; 10]);
    }

    #[test]
    fn five_segments() {
        let env = vec![vec![4.0; 1000], vec![1.5; 1000]];
        let markers: Vec<f64> = (0..5)
            .flat_map(|k| [k as f64 * 1.5 + 0.1, k as f64 * 1.5 + 1.2])
            .collect();
        let segs = segment_repetitions(&env, 100.0, 0.0, &markers).unwrap();
        assert_eq!(segs.len(), 5);
        assert!(segs.iter().all(|s| s.means == vec![4.0, 1.5]));
    }

    #[test]
    fn bad_markers() {
        let env = vec![vec![0.0; 100]];
        assert!(segment_repetitions(&env, 10.0, 0.0, &[1.0, 2.0, 3.0]).is_err());
        assert!(segment_repetitions(&env, 10.0, 0.0, &[1.0, 3.0, 2.5, 4.0]).is_err());
        assert!(
            EmgRecording::new(10.0, vec!["AD".into()], vec![vec![0.0; 10]], vec![0.5, 2.0])
                .is_err()
        );
    }

    #[test]
    fn recording_validation() {
        assert!(EmgRecording::new(10.0, vec!["XX".into()], vec![vec![0.0; 5]], vec![]).is_err());
        assert!(EmgRecording::new(
            10.0,
            vec!["AD".into(), "MD".into()],
            vec![vec![0.0; 5], vec![0.0; 4]],
            vec![]
        )
        .is_err());
        assert!(EmgRecording::new(0.0, vec!["AD".into()], vec![vec![0.0; 5]], vec![]).is_err());
        assert!(MvcRecord::new(BTreeMap::from([("AD".to_string(), 0.0)])).is_err());
    }

    #[test]
    fn condition_means() {
        assert_eq!(condition_mean(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(condition_mean(&[4.25]).unwrap(), 4.25);
        assert!(condition_mean(&[]).is_err());
    }

    #[test]
    fn csv_readers() {
        let rec = "time_s,AD,MD\n0,1,2\n0.001,3,4\n0.002,5,6\n";
        let r = EmgRecording::from_csv(rec, vec![0.0, 0.002]).unwrap();
        assert!((r.sample_rate - 1000.0).abs() < 1e-9);
        assert_eq!(r.samples[1], vec![2.0, 4.0, 6.0]);
        assert!(EmgRecording::from_csv("time_s,AD\n0,1\n0.001,1\n0.005,1\n", vec![]).is_err());
        assert_eq!(
            markers_from_csv("onset_s,offset_s\n1,2\n3,4\n").unwrap(),
            vec![1.0, 2.0, 3.0, 4.0]
        );
        let single = mvc_from_csv("AD,MD\n1.5,2\n").unwrap();
        assert_eq!(single[""].get("MD").unwrap(), 2.0);
        let keyed = mvc_from_csv("subject,AD\ns1,1\ns2,2\n").unwrap();
        assert_eq!(keyed["s2"].get("AD").unwrap(), 2.0);
        assert!(mvc_from_csv("AD\n-1\n").is_err());
    }

    #[test]
    fn two_condition_comparison() {
        let mut f = FeatureTable::new();
        for s in 0..10 {
            let subj = format!("s{s:02}");
            f.insert(
                (subj.clone(), "no_exo".into(), "AD".into()),
                vec![50.0 + s as f64; 5],
            );
            f.insert(
                (subj, "exo".into(), "AD".into()),
                vec![20.0 + 0.5 * s as f64; 5],
            );
        }
        let rep = compare_conditions(&f, &["no_exo".into(), "exo".into()]).unwrap();
        assert_eq!(rep.len(), 1);
        assert!(rep[0].friedman.is_none());
        let c = &rep[0].pairwise[0];
        assert_eq!(c.result.p_value, 2.0 / 1024.0);
        assert!(c.result.significant_corrected());
        let red = c.result.reduction_percent.unwrap();
        assert!((red - 100.0 * (54.5 - 22.25) / 54.5).abs() < 1e-12);
    }

    #[test]
    fn three_condition_comparison() {
        let mut f = FeatureTable::new();
        for s in 0..10 {
            let subj = format!("s{s}");
            for (c, v) in [("a", 30.0), ("b", 20.0), ("c", 10.0)] {
                f.insert((subj.clone(), c.into(), "PM".into()), vec![v + s as f64]);
            }
        }
        let conds: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let rep = compare_conditions(&f, &conds).unwrap();
        let fr = rep[0].friedman.as_ref().unwrap();
        assert!((fr.test_statistic - 20.0).abs() < 1e-12);
        assert_eq!(rep[0].pairwise.len(), 3);
        assert!(rep[0].pairwise.iter().all(|c| c.result.comparisons == 3));
    }
}
