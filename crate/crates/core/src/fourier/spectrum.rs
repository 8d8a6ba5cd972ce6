//! Spectrum extraction by dyadic pigeonholing: arc masses of the balanced
//! transform on a fine frequency grid, small-arc discarding, and selection of
//! the dominant (denominator range, mass level) class.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::config::ConstantsConfig;
use crate::error::{Error, Result};
use crate::rational::ReducedRational;
use crate::sdf::IntegerSet;

/// Which way the trichotomy resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Sparse,
    Increment,
    ManyRationals,
}

/// One arc in the selected class.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumFrequency {
    /// The arc center a/q, serialized as "a/q".
    #[serde(serialize_with = "crate::fourier::spectrum::serialize_center")]
    pub center: ReducedRational,
    /// Grid argmax of |1_A-hat| on the arc.
    pub gamma: f64,
    /// |1_A-hat(gamma)| at the peak.
    pub coefficient: f64,
    /// Arc mass: integral of |g-hat|^2 over the arc (grid Riemann sum).
    pub mass: f64,
}

pub(crate) fn serialize_center<S: serde::Serializer>(
    r: &ReducedRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// The dominant dyadic class of large-mass arcs.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub n: u64,
    pub alpha: f64,
    pub k: f64,
    /// Dyadic denominator level Q: every listed q lies in [Q, 2Q].
    pub q_level: u64,
    /// Dyadic mass level B: every listed arc mass lies in
    /// [alpha^2 N / B^2, 4 alpha^2 N / B^2].
    pub b_level: f64,
    /// Arcs of the selected class, sorted by center, truncated to the
    /// configured report cap (`class_size` is the untruncated count).
    pub frequencies: Vec<SpectrumFrequency>,
    pub class_size: usize,
    /// Per-denominator arc counts of the selected class (untruncated).
    pub den_counts: BTreeMap<u64, u64>,
    /// The class score: sum of q^(-1/2) * mass^(1/2) * peak coefficient.
    pub class_score: f64,
    /// The comparison scale alpha * |A| * sqrt(N) from the extraction lemma.
    pub target: f64,
    /// Number of arcs discarded by the small-mass threshold N/K^6.
    pub discarded: usize,
    pub branch: Branch,
}

/// Cap on the number of major arcs (roughly 0.3 K^2) the extractor will touch.
const ARC_BUDGET: u64 = 2_000_000;

/// Magnitudes |f-hat(j/M)| for j = 0..M of a real signal on [1, N], via FFT.
/// The forward FFT of a real signal has magnitudes symmetric in j -> M - j,
/// so its output magnitudes equal those of the e(+x gamma) convention.
fn grid_magnitudes(n: u64, m: usize, signal: impl Fn(u64) -> f64) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for x in 1..=n {
        buf[x as usize % m].re += signal(x);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    buf.into_iter().map(|z| z.norm()).collect()
}

/// Sparse table for range-maximum queries, storing argmax indices.
struct RangeMax<'a> {
    values: &'a [f64],
    table: Vec<Vec<u32>>,
}

impl<'a> RangeMax<'a> {
    fn new(values: &'a [f64]) -> Self {
        let n = values.len();
        let levels = usize::BITS as usize - n.leading_zeros() as usize;
        let mut table: Vec<Vec<u32>> = Vec::with_capacity(levels);
        table.push((0..n as u32).collect());
        let mut span = 1usize;
        while 2 * span <= n {
            let prev = table.last().expect("non-empty");
            let mut row = Vec::with_capacity(n - 2 * span + 1);
            for i in 0..=(n - 2 * span) {
                let a = prev[i];
                let b = prev[i + span];
                row.push(if values[a as usize] >= values[b as usize] { a } else { b });
            }
            table.push(row);
            span *= 2;
        }
        RangeMax { values, table }
    }

    /// Argmax over the inclusive index range [lo, hi].
    fn argmax(&self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi && hi < self.values.len());
        let len = hi - lo + 1;
        let level = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        let span = 1usize << level;
        let a = self.table[level][lo];
        let b = self.table[level][hi + 1 - span];
        if self.values[a as usize] >= self.values[b as usize] {
            a as usize
        } else {
            b as usize
        }
    }
}

/// Grid data shared by all arcs: magnitudes of g-hat and 1_A-hat at j/M,
/// prefix sums of |g-hat|^2 / M, and a range-max structure over |1_A-hat|.
struct FrequencyGrid {
    m: usize,
    mass_prefix: Vec<f64>,
    coefficient: Vec<f64>,
}

impl FrequencyGrid {
    fn build(set: &IntegerSet, oversample: u32) -> Self {
        let n = set.n();
        let alpha = set.density();
        let m = ((oversample.max(2) as u64 * n).next_power_of_two() as usize).max(16);
        let g_mag = grid_magnitudes(n, m, |x| {
            if set.contains(x) { 1.0 - alpha } else { -alpha }
        });
        let coefficient = grid_magnitudes(n, m, |x| if set.contains(x) { 1.0 } else { 0.0 });
        let mut mass_prefix = Vec::with_capacity(m + 1);
        let mut acc = 0.0f64;
        mass_prefix.push(0.0);
        for v in &g_mag {
            acc += v * v / m as f64;
            mass_prefix.push(acc);
        }
        FrequencyGrid {
            m,
            mass_prefix,
            coefficient,
        }
    }

    /// Sum of |g-hat|^2 / M over grid indices in [lo, hi] mod M (inclusive,
    /// given as raw integers that may wrap).
    fn mass(&self, lo: i64, hi: i64) -> f64 {
        debug_assert!(hi >= lo && (hi - lo) < self.m as i64);
        let m = self.m as i64;
        let lo_m = lo.rem_euclid(m) as usize;
        let hi_m = hi.rem_euclid(m) as usize;
        if lo_m <= hi_m {
            self.mass_prefix[hi_m + 1] - self.mass_prefix[lo_m]
        } else {
            (self.mass_prefix[self.m] - self.mass_prefix[lo_m])
                + (self.mass_prefix[hi_m + 1] - self.mass_prefix[0])
        }
    }
}

/// Index range of grid points inside the arc around a/q with half-width w,
/// as raw (possibly wrapping) inclusive bounds.
fn arc_index_range(center: f64, half_width: f64, m: usize) -> Option<(i64, i64)> {
    let lo = ((center - half_width) * m as f64).ceil() as i64;
    let hi = ((center + half_width) * m as f64).floor() as i64;
    (hi >= lo).then_some((lo, hi))
}

/// Runs the extraction: computes K, evaluates every arc with denominator up
/// to K on the grid, discards arcs with mass at most N/K^6, dyadically
/// classifies the rest by denominator range and mass level, and returns the
/// class maximizing the weighted score.
pub fn extract_spectrum(set: &IntegerSet, config: &ConstantsConfig) -> Result<SpectrumReport> {
    let n = set.n();
    let alpha = set.density();
    if set.is_empty() || alpha < (n as f64).powf(-1.0 / 3.0) {
        return Err(Error::SparseBranch);
    }
    let k = (config.c_kdef * alpha.powi(-2) * (n as f64).ln()).ceil();
    let k_int = k as u64;
    // |Q_{<=K}| is about (3/pi^2) K^2.
    if k_int * k_int / 3 > ARC_BUDGET {
        return Err(Error::Resource(format!(
            "K = {k_int} implies about {} arcs, over the budget {ARC_BUDGET}",
            k_int * k_int * 3 / 10
        )));
    }

    let grid = FrequencyGrid::build(set, config.grid_oversample);
    let range_max = RangeMax::new(&grid.coefficient);
    let discard_threshold = n as f64 / k.powi(config.discard_exponent as i32);

    struct ArcRecord {
        center: ReducedRational,
        mass: f64,
        peak_idx: usize,
    }

    let mut discarded = 0usize;
    // (q dyadic level, mass dyadic level) -> records
    let mut classes: BTreeMap<(u32, i32), Vec<ArcRecord>> = BTreeMap::new();
    for q in 1..=k_int {
        for a in 1..=q {
            if num_integer::gcd(a, q) != 1 {
                continue;
            }
            let center = ReducedRational::reduce(a, q).expect("valid");
            let half_width = k / (q as f64 * n as f64);
            let Some((lo, hi)) = arc_index_range(center.as_f64(), half_width, grid.m) else {
                discarded += 1;
                continue;
            };
            let mass = grid.mass(lo, hi);
            if mass <= discard_threshold {
                discarded += 1;
                continue;
            }
            let m64 = grid.m as i64;
            let peak_idx = if hi - lo + 1 >= m64 {
                range_max.argmax(0, grid.m - 1)
            } else {
                let lo_m = lo.rem_euclid(m64) as usize;
                let hi_m = hi.rem_euclid(m64) as usize;
                if lo_m <= hi_m {
                    range_max.argmax(lo_m, hi_m)
                } else {
                    let left = range_max.argmax(lo_m, grid.m - 1);
                    let right = range_max.argmax(0, hi_m);
                    if grid.coefficient[left] >= grid.coefficient[right] {
                        left
                    } else {
                        right
                    }
                }
            };
            let q_class = 63 - q.leading_zeros(); // floor(log2 q)
            // B such that mass^(1/2) lies in [alpha sqrt(N)/B, 2 alpha sqrt(N)/B]:
            // B = 2^(floor(log2(alpha sqrt(N)/mass^(1/2))) + 1).
            let b_real = alpha * (n as f64).sqrt() / mass.sqrt();
            let b_class = b_real.log2().floor() as i32 + 1;
            classes
                .entry((q_class, b_class))
                .or_default()
                .push(ArcRecord {
                    center,
                    mass,
                    peak_idx,
                });
        }
    }

    if classes.is_empty() {
        return Err(Error::Scale(
            "no arc mass above the discard threshold".into(),
        ));
    }

    let score_of = |records: &[ArcRecord]| -> f64 {
        records
            .iter()
            .map(|r| {
                (r.center.den() as f64).powf(-0.5)
                    * r.mass.sqrt()
                    * grid.coefficient[r.peak_idx]
            })
            .sum()
    };

    // Strictly-greater update keeps the smallest (Q, B) key on score ties,
    // since BTreeMap iterates keys in ascending order.
    let mut best: Option<((u32, i32), f64)> = None;
    for (key, records) in &classes {
        let score = score_of(records);
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((*key, score));
        }
    }
    let ((q_class, b_class), _) = best.expect("non-empty");
    let records = classes.remove(&(q_class, b_class)).expect("selected");

    let class_score = score_of(&records);
    let class_size = records.len();
    let mut den_counts: BTreeMap<u64, u64> = BTreeMap::new();
    for r in &records {
        *den_counts.entry(r.center.den()).or_insert(0) += 1;
    }

    let mut frequencies: Vec<SpectrumFrequency> = records
        .into_iter()
        .map(|r| SpectrumFrequency {
            center: r.center,
            gamma: if r.peak_idx == 0 {
                1.0
            } else {
                r.peak_idx as f64 / grid.m as f64
            },
            coefficient: grid.coefficient[r.peak_idx],
            mass: r.mass,
        })
        .collect();
    // Keep the strongest contributors when truncating, then present sorted
    // by center for deterministic output.
    frequencies.sort_by(|a, b| {
        let sa = (a.center.den() as f64).powf(-0.5) * a.mass.sqrt() * a.coefficient;
        let sb = (b.center.den() as f64).powf(-0.5) * b.mass.sqrt() * b.coefficient;
        sb.partial_cmp(&sa)
            .expect("finite")
            .then(a.center.cmp(&b.center))
    });
    frequencies.truncate(config.max_report_frequencies);
    frequencies.sort_by(|a, b| a.center.cmp(&b.center));

    Ok(SpectrumReport {
        n,
        alpha,
        k,
        q_level: 1u64 << q_class,
        b_level: 2f64.powi(b_class),
        frequencies,
        class_size,
        den_counts,
        class_score,
        target: alpha * set.len() as f64 * (n as f64).sqrt(),
        discarded,
        branch: Branch::ManyRationals,
    })
}
