//! Paired nonparametric statistics for repeated-measures muscle-activity
//! comparisons: exact Wilcoxon signed-rank, Friedman, Bonferroni flags,
//! paired effect size and the percentage reduction metric.

use serde::ser::{Serialize, SerializeStruct, Serializer};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{domain, Result};

/// Uncorrected significance level.
pub const ALPHA: f64 = 0.05;

/// Largest reduced sample size evaluated with the exact null distribution.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Significance {
    /// `p < 0.05 / m`.
    Significant,
    /// `0.05 / m <= p < 0.05`: a trend that does not survive correction.
    Trend,
    NotSignificant,
}

impl Significance {
    pub fn classify(p: f64, m: usize) -> Self {
        if p < ALPHA / m.max(1) as f64 {
            Significance::Significant
        } else if p < ALPHA {
            Significance::Trend
        } else {
            Significance::NotSignificant
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Significance::Significant => "significant",
            Significance::Trend => "trend",
            Significance::NotSignificant => "not_significant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatResult {
    pub method: &'static str,
    /// Pairs (or subjects) entering the test after zero-difference removal.
    pub n: usize,
    pub p_value: f64,
    /// Wilcoxon: signed rank sum `W+ − W−`; Friedman: chi-square.
    pub test_statistic: f64,
    pub exact: bool,
    /// The test statistic has no distribution (e.g. all differences zero).
    pub undefined: bool,
    pub effect_size_d: Option<f64>,
    pub reduction_percent: Option<f64>,
    /// Number of comparisons the corrected flag accounts for.
    pub comparisons: usize,
}

impl StatResult {
    pub fn significant_raw(&self) -> bool {
        !self.undefined && self.p_value < ALPHA
    }

    pub fn significant_corrected(&self) -> bool {
        !self.undefined && self.significance() == Significance::Significant
    }

    pub fn significance(&self) -> Significance {
        if self.undefined {
            return Significance::NotSignificant;
        }
        Significance::classify(self.p_value, self.comparisons)
    }

    pub fn corrected_alpha(&self) -> f64 {
        ALPHA / self.comparisons.max(1) as f64
    }

    pub fn with_comparisons(mut self, m: usize) -> Self {
        self.comparisons = m.max(1);
        self
    }
}

impl Serialize for StatResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("StatResult", 13)?;
        st.serialize_field("method", self.method)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("p_value", &self.p_value)?;
        st.serialize_field("p_display", &format_p(self.p_value))?;
        st.serialize_field("test_statistic", &self.test_statistic)?;
        st.serialize_field("exact", &self.exact)?;
        st.serialize_field("undefined", &self.undefined)?;
        st.serialize_field("effect_size_d", &self.effect_size_d)?;
        st.serialize_field("reduction_percent", &self.reduction_percent)?;
        st.serialize_field("alpha", &ALPHA)?;
        st.serialize_field("alpha_corrected", &self.corrected_alpha())?;
        st.serialize_field("significant_raw", &self.significant_raw())?;
        st.serialize_field("significant_corrected", &self.significant_corrected())?;
        st.end()
    }
}

/// p-value as printed in reports: three decimals, `<0.001` below that.
pub fn format_p(p: f64) -> String {
    if p < 0.0005 {
        "<0.001".to_string()
    } else {
        format!("{p:.3}")
    }
}

/// Ranks of `values` (1-based), ties receiving the mean of their positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn tie_sizes(values: &[f64]) -> Vec<usize> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        out.push(j - i + 1);
        i = j + 1;
    }
    out
}

/// Null distribution of the doubled positive-rank sum: `counts[s]` is the
/// number of the `2^n` sign assignments whose positive ranks sum to `s / 2`.
fn signed_rank_counts(doubled_ranks: &[u32]) -> Vec<u64> {
    let total: u32 = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            let c = counts[s];
            if c != 0 {
                counts[s + r] += c;
            }
        }
        reach += r;
    }
    counts
}

/// Two-tailed Wilcoxon signed-rank test on paired observations `(a, b)`.
///
/// Zero differences are dropped and tied absolute differences receive
/// midranks. Up to [`EXACT_MAX_N`] remaining pairs the p-value is exact over
/// all `2^n` sign assignments of the observed ranks; above that a normal
/// approximation with tie and continuity correction is used.
pub fn wilcoxon_signed_rank(paired: &[(f64, f64)]) -> Result<StatResult> {
    if paired.is_empty() {
        return Err(domain("wilcoxon needs at least one pair"));
    }
    if paired.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(domain("wilcoxon input contains non-finite values"));
    }
    let diffs: Vec<f64> = paired
        .iter()
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    let mut result = StatResult {
        method: "wilcoxon_signed_rank",
        n,
        p_value: 1.0,
        test_statistic: 0.0,
        exact: n <= EXACT_MAX_N,
        undefined: n == 0,
        effect_size_d: None,
        reduction_percent: None,
        comparisons: 1,
    };
    if n == 0 {
        return Ok(result);
    }

    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    result.test_statistic = 2.0 * w_plus - total;

    result.p_value = if n <= EXACT_MAX_N {
        let doubled: Vec<u32> = ranks.iter().map(|r| (2.0 * r).round() as u32).collect();
        let observed = (2.0 * w_plus).round() as usize;
        let counts = signed_rank_counts(&doubled);
        let le: u64 = counts[..=observed].iter().sum();
        let ge: u64 = counts[observed..].iter().sum();
        exact_two_sided(le, ge, n)
    } else {
        let mean = total / 2.0;
        let ties: f64 = tie_sizes(&abs)
            .into_iter()
            .map(|t| (t * t * t - t) as f64)
            .sum();
        let nf = n as f64;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
        if var <= 0.0 {
            1.0
        } else {
            let dev = ((w_plus - mean).abs() - 0.5).max(0.0);
            let z = dev / var.sqrt();
            let normal = Normal::standard();
            (2.0 * normal.sf(z)).min(1.0)
        }
    };
    Ok(result)
}

/// `min(1, 2·min(le, ge) / 2^n)`, shared by the exact test and its oracle.
pub fn exact_two_sided(le: u64, ge: u64, n: usize) -> f64 {
    let tail = 2 * u128::from(le.min(ge));
    (tail as f64 / 2f64.powi(n as i32)).min(1.0)
}

/// Friedman rank test over an `n subjects × k conditions` matrix.
pub fn friedman(matrix: &[Vec<f64>]) -> Result<StatResult> {
    let n = matrix.len();
    if n < 2 {
        return Err(domain(format!(
            "friedman needs at least 2 subjects, got {n}"
        )));
    }
    let k = matrix[0].len();
    if k < 3 {
        return Err(domain(format!(
            "friedman needs at least 3 conditions, got {k}"
        )));
    }
    if matrix.iter().any(|row| row.len() != k) {
        return Err(domain("friedman matrix rows differ in length"));
    }
    if matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(domain("friedman input contains non-finite values"));
    }

    let mut rank_sums = vec![0.0; k];
    let mut tie_term = 0.0;
    for row in matrix {
        for (j, r) in midranks(row).into_iter().enumerate() {
            rank_sums[j] += r;
        }
        tie_term += tie_sizes(row)
            .into_iter()
            .map(|t| (t * t * t - t) as f64)
            .sum::<f64>();
    }
    let (nf, kf) = (n as f64, k as f64);
    let ss: f64 = rank_sums.iter().map(|r| r * r).sum();
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * ss - 3.0 * nf * (kf + 1.0);
    let correction = 1.0 - tie_term / (nf * kf * (kf * kf - 1.0));

    let mut result = StatResult {
        method: "friedman",
        n,
        p_value: 1.0,
        test_statistic: 0.0,
        exact: false,
        undefined: false,
        effect_size_d: None,
        reduction_percent: None,
        comparisons: 1,
    };
    if correction <= 1e-12 {
        return Ok(result);
    }
    let stat = (raw / correction).max(0.0);
    result.test_statistic = stat;
    let chi2 = ChiSquared::new(kf - 1.0).map_err(|e| domain(e.to_string()))?;
    result.p_value = chi2.sf(stat).clamp(0.0, 1.0);
    Ok(result)
}

/// Significance class of each p-value with `m` comparisons.
pub fn bonferroni(p_values: &[f64], m: usize) -> Result<Vec<Significance>> {
    if m == 0 {
        return Err(domain("bonferroni needs m >= 1"));
    }
    Ok(p_values
        .iter()
        .map(|&p| Significance::classify(p, m))
        .collect())
}

/// Paired effect size `mean(a − b) / sd(a − b)` with the `n − 1` sample
/// standard deviation. `None` when the differences have zero spread.
pub fn effect_size_d(paired: &[(f64, f64)]) -> Result<Option<f64>> {
    if paired.len() < 2 {
        return Err(domain("effect size needs at least 2 pairs"));
    }
    let diffs: Vec<f64> = paired.iter().map(|(a, b)| a - b).collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return Ok(None);
    }
    Ok(Some(mean / var.sqrt()))
}

/// Percentage reduction of activity relative to the no-exosuit baseline.
pub fn reduction(no_exo: f64, exo: f64) -> Result<f64> {
    if !(no_exo > 0.0) {
        return Err(domain(format!("baseline must be positive, got {no_exo}")));
    }
    Ok(100.0 * (no_exo - exo) / no_exo)
}

pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(domain("mean of an empty list"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(domain("median of an empty list"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Ok(if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    })
}
