//! 2m-fold additive energy of rational sets: exact counting by several
//! backends, convolution powers, the approximate energy over real
//! frequencies, and bound evaluators.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::rational::{Frac, RationalSet, ReducedRational};

/// Default cap on |B|^(2m) for the brute backend.
pub const DEFAULT_TUPLE_BUDGET: u128 = 100_000_000;
/// Default cap on the meet-in-the-middle sum table, in bytes.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyBackend {
    Brute,
    Mitm,
    Convolution,
}

/// Result of an energy computation together with the comparison quantities.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub m: u32,
    pub set_size: usize,
    pub energy: u128,
    pub diagonal_lower: u128,
    pub theorem_rhs: Option<f64>,
    pub backend: EnergyBackend,
}

/// Exact count of ordered 2m-tuples (b_1..b_2m) from `values` with
/// b_1 + ... + b_m = b_{m+1} + ... + b_{2m}, by direct enumeration of all
/// |values|^(2m) tuples (partial sums shared along a DFS).
pub fn energy_brute_values(values: &[Frac], m: u32) -> Result<u128> {
    energy_brute_values_with_budget(values, m, DEFAULT_TUPLE_BUDGET)
}

pub fn energy_brute_values_with_budget(values: &[Frac], m: u32, budget: u128) -> Result<u128> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let size = values.len() as u128;
    if size.checked_pow(2 * m).map_or(true, |t| t > budget) && !values.is_empty() {
        return Err(Error::Resource(format!(
            "|B|^(2m) = {}^{} exceeds tuple budget {budget}; use the mitm backend",
            values.len(),
            2 * m
        )));
    }
    if values.is_empty() {
        return Ok(0);
    }

    // DFS over 2m positions: the first m contribute +b, the last m -b.
    fn descend(values: &[Frac], acc: Frac, depth: u32, total: u32, m: u32) -> Result<u128> {
        if depth == total {
            return Ok(u128::from(acc.is_zero()));
        }
        let mut count = 0u128;
        for v in values {
            let next = if depth < m {
                acc.checked_add(v)?
            } else {
                acc.checked_sub(v)?
            };
            count += descend(values, next, depth + 1, total, m)?;
        }
        Ok(count)
    }

    // Parallelize over the first tuple position.
    let totals = par::map_indices(values.len(), |i| {
        descend(values, values[i], 1, 2 * m, m)
    });
    let mut count = 0u128;
    for t in totals {
        count += t?;
    }
    Ok(count)
}

pub fn energy_brute(set: &RationalSet, m: u32) -> Result<u128> {
    let values: Vec<Frac> = set.elements().iter().map(|r| r.to_frac()).collect();
    energy_brute_values(&values, m)
}

pub fn energy_brute_with_budget(set: &RationalSet, m: u32, budget: u128) -> Result<u128> {
    let values: Vec<Frac> = set.elements().iter().map(|r| r.to_frac()).collect();
    energy_brute_values_with_budget(&values, m, budget)
}

/// Multiset of all ordered j-fold sums of `values`, as value -> multiplicity.
fn sum_table(values: &[Frac], j: u32, memory_budget: u64) -> Result<HashMap<Frac, u128>> {
    let mut table: HashMap<Frac, u128> = HashMap::new();
    table.insert(Frac::ZERO, 1);
    const ENTRY_BYTES: u64 = 64; // rough per-entry cost of the hash table
    for _ in 0..j {
        let mut next: HashMap<Frac, u128> = HashMap::with_capacity(table.len() * values.len());
        for (s, &count) in &table {
            for v in values {
                let key = s.checked_add(v)?;
                *next.entry(key).or_insert(0) += count;
            }
            if next.len() as u64 * ENTRY_BYTES > memory_budget {
                return Err(Error::Resource(format!(
                    "sum table exceeds memory budget of {memory_budget} bytes"
                )));
            }
        }
        table = next;
    }
    Ok(table)
}

/// Energy via the m-fold sum multiset: E_2m = sum over sums s of c(s)^2.
pub fn energy_mitm(set: &RationalSet, m: u32) -> Result<u128> {
    energy_mitm_with_budget(set, m, DEFAULT_MEMORY_BUDGET)
}

pub fn energy_mitm_with_budget(set: &RationalSet, m: u32, memory_budget: u64) -> Result<u128> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let values: Vec<Frac> = set.elements().iter().map(|r| r.to_frac()).collect();
    energy_mitm_values(&values, m, memory_budget)
}

pub fn energy_mitm_values(values: &[Frac], m: u32, memory_budget: u64) -> Result<u128> {
    if values.is_empty() {
        return Ok(0);
    }
    let table = sum_table(values, m, memory_budget)?;
    Ok(table.values().map(|&c| c * c).sum())
}

/// The j-fold convolution power of the indicator of B: support point -> value.
/// Total mass is |B|^j; energy at j = m is the sum of squared values.
pub fn convolution_power(set: &RationalSet, j: u32) -> Result<BTreeMap<Frac, u128>> {
    if j < 1 {
        return Err(Error::InvalidArgument("j must be at least 1".into()));
    }
    let values: Vec<Frac> = set.elements().iter().map(|r| r.to_frac()).collect();
    let table = sum_table(&values, j, DEFAULT_MEMORY_BUDGET)?;
    Ok(table.into_iter().collect())
}

/// Energy through the convolution route: sum of squared convolution values.
pub fn energy_convolution(set: &RationalSet, m: u32) -> Result<u128> {
    Ok(convolution_power(set, m)?.values().map(|&c| c * c).sum())
}

/// How the approximate energy measures closeness to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApproxMetric {
    /// Literal absolute value on the real line (the default).
    Absolute,
    /// Distance to the nearest integer.
    ModOne,
}

/// Approximate 2m-fold additive energy over real frequencies: the number of
/// ordered 2m-tuples whose alternating sum has magnitude at most delta.
/// Floating evaluation with an absolute tolerance of 1e-12 on the comparison.
pub fn energy_approx(freqs: &[f64], m: u32, delta: f64, metric: ApproxMetric) -> Result<u128> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if delta < 0.0 {
        return Err(Error::InvalidArgument("delta must be nonnegative".into()));
    }
    if freqs.is_empty() {
        return Ok(0);
    }

    fn descend(
        freqs: &[f64],
        acc: f64,
        depth: u32,
        total: u32,
        m: u32,
        delta: f64,
        metric: ApproxMetric,
    ) -> u128 {
        if depth == total {
            let mag = match metric {
                ApproxMetric::Absolute => acc.abs(),
                ApproxMetric::ModOne => {
                    let frac = acc.rem_euclid(1.0);
                    frac.min(1.0 - frac)
                }
            };
            return u128::from(mag <= delta + 1e-12);
        }
        let mut count = 0u128;
        for &v in freqs {
            let next = if depth < m { acc + v } else { acc - v };
            count += descend(freqs, next, depth + 1, total, m, delta, metric);
        }
        count
    }

    let totals = par::map_indices(freqs.len(), |i| {
        descend(freqs, freqs[i], 1, 2 * m, m, delta, metric)
    });
    Ok(totals.into_iter().sum())
}

/// Exact-arithmetic variant for rational frequencies and rational delta.
pub fn energy_approx_exact(
    freqs: &[Frac],
    m: u32,
    delta: Frac,
    metric: ApproxMetric,
) -> Result<u128> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if delta < Frac::ZERO {
        return Err(Error::InvalidArgument("delta must be nonnegative".into()));
    }
    if freqs.is_empty() {
        return Ok(0);
    }

    fn descend(
        freqs: &[Frac],
        acc: Frac,
        depth: u32,
        total: u32,
        m: u32,
        delta: &Frac,
        metric: ApproxMetric,
    ) -> Result<u128> {
        if depth == total {
            let mag = match metric {
                ApproxMetric::Absolute => acc.abs(),
                ApproxMetric::ModOne => {
                    // Distance to the nearest integer, exactly.
                    let f = acc.mod_one(); // in (0, 1]
                    let complement = Frac::new(1, 1).expect("1/1").checked_sub(&f)?;
                    if f <= complement {
                        f
                    } else {
                        complement
                    }
                }
            };
            return Ok(u128::from(mag <= *delta));
        }
        let mut count = 0u128;
        for v in freqs {
            let next = if depth < m {
                acc.checked_add(v)?
            } else {
                acc.checked_sub(v)?
            };
            count += descend(freqs, next, depth + 1, total, m, delta, metric)?;
        }
        Ok(count)
    }

    let totals = par::map_indices(freqs.len(), |i| {
        descend(freqs, freqs[i], 1, 2 * m, m, &delta, metric)
    });
    let mut count = 0u128;
    for t in totals {
        count += t?;
    }
    Ok(count)
}

/// The right-hand side of the headline energy bound: (log(mQ))^(C^m) * (Qn)^m.
pub fn theorem_bound_rhs(q: u64, n: u64, m: u32, c: f64) -> Result<f64> {
    if q < 2 || m < 2 {
        return Err(Error::InvalidArgument("need Q >= 2 and m >= 2".into()));
    }
    if n < 1 || c <= 0.0 {
        return Err(Error::InvalidArgument("need n >= 1 and C > 0".into()));
    }
    let log_mq = ((m as f64) * (q as f64)).ln();
    Ok(log_mq.powf(c.powi(m as i32)) * ((q as f64) * (n as f64)).powi(m as i32))
}

/// Trivial diagonal lower bound m! * (|B| - m)^m, valid for |B| > m (0 otherwise).
pub fn diagonal_lower(set_size: usize, m: u32) -> u128 {
    let size = set_size as u128;
    let m128 = m as u128;
    if size <= m128 {
        return 0;
    }
    let factorial: u128 = (1..=m128).product();
    factorial * (size - m128).pow(m)
}

/// Splits B into 2m classes B_i = B ∩ [(i-1)/2m, i/2m); the value 1 lands in
/// the last class so the classes partition B.
pub fn split_intervals(set: &RationalSet, m: u32) -> Result<Vec<RationalSet>> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let classes = 2 * m as u64;
    let mut buckets: Vec<Vec<ReducedRational>> = vec![Vec::new(); classes as usize];
    for &r in set.elements() {
        // 0-based class floor(r * 2m); the value 1 would land past the end,
        // so it goes into the last class.
        let scaled = r.num() as u128 * classes as u128;
        let idx = (scaled / r.den() as u128) as u64;
        let class = if idx >= classes { classes - 1 } else { idx };
        buckets[class as usize].push(r);
    }
    Ok(buckets.into_iter().map(RationalSet::from_elements).collect())
}

/// Full report for one backend run.
pub fn energy_report(set: &RationalSet, m: u32, backend: EnergyBackend, c: Option<f64>) -> Result<EnergyReport> {
    let energy = match backend {
        EnergyBackend::Brute => energy_brute(set, m)?,
        EnergyBackend::Mitm => energy_mitm(set, m)?,
        EnergyBackend::Convolution => energy_convolution(set, m)?,
    };
    let theorem_rhs = match c {
        Some(c) if set.denominator_cap() >= 2 && m >= 2 => Some(theorem_bound_rhs(
            set.denominator_cap(),
            set.max_per_denominator().max(1),
            m,
            c,
        )?),
        _ => None,
    };
    Ok(EnergyReport {
        m,
        set_size: set.len(),
        energy,
        diagonal_lower: diagonal_lower(set.len(), m),
        theorem_rhs,
        backend,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::enumerate_rationals;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rr(a: u64, q: u64) -> ReducedRational {
        ReducedRational::reduce(a, q).unwrap()
    }

    fn set(elems: &[(u64, u64)]) -> RationalSet {
        RationalSet::from_elements(elems.iter().map(|&(a, q)| rr(a, q)).collect())
    }

    #[test]
    fn brute_examples() {
        assert_eq!(energy_brute(&set(&[(1, 2)]), 2).unwrap(), 1);
        let b = set(&[(1, 2), (1, 3), (2, 3), (1, 5)]);
        assert_eq!(energy_brute(&b, 1).unwrap(), b.len() as u128);
        // Sum-multiset of pairs from {1/2, 1/3, 2/3}: multiplicities 3,2,2,1,1.
        assert_eq!(energy_brute(&set(&[(1, 2), (1, 3), (2, 3)]), 2).unwrap(), 19);
    }

    #[test]
    fn mitm_trivia() {
        let empty = RationalSet::from_elements(vec![]);
        assert_eq!(energy_mitm(&empty, 3).unwrap(), 0);
        let q5 = crate::rational::rationals_with_denominator(5).unwrap();
        let q5 = RationalSet::from_elements(q5);
        assert_eq!(energy_mitm(&q5, 2).unwrap(), energy_brute(&q5, 2).unwrap());
    }

    #[test]
    fn backends_agree_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(314);
        for _ in 0..40 {
            let size = rng.gen_range(0..=8);
            let elems: Vec<ReducedRational> = (0..size)
                .map(|_| {
                    let q = rng.gen_range(1..=20);
                    rr(rng.gen_range(1..=q), q)
                })
                .collect();
            let b = RationalSet::from_elements(elems);
            for m in [2u32, 3] {
                let brute = energy_brute(&b, m).unwrap();
                assert_eq!(brute, energy_mitm(&b, m).unwrap());
                assert_eq!(brute, energy_convolution(&b, m).unwrap());
            }
        }
    }

    #[test]
    fn convolution_examples() {
        let b = set(&[(1, 2), (1, 3), (2, 3)]);
        let conv1 = convolution_power(&b, 1).unwrap();
        assert_eq!(conv1.len(), 3);
        assert!(conv1.values().all(|&v| v == 1));

        let conv2 = convolution_power(&b, 2).unwrap();
        let total: u128 = conv2.values().sum();
        assert_eq!(total, (b.len() as u128).pow(2));
        // Pairs summing to 1: (1/2,1/2), (1/3,2/3), (2/3,1/3).
        assert_eq!(conv2[&Frac::new(1, 1).unwrap()], 3);
    }

    #[test]
    fn sumset_inequality() {
        // |mB| * E_2m(B) >= |B|^(2m), the unnormalized Cauchy-Schwarz form.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let size = rng.gen_range(1..=7);
            let elems: Vec<ReducedRational> = (0..size)
                .map(|_| {
                    let q = rng.gen_range(1..=15);
                    rr(rng.gen_range(1..=q), q)
                })
                .collect();
            let b = RationalSet::from_elements(elems);
            for m in [2u32, 3] {
                let sumset = convolution_power(&b, m).unwrap().len() as u128;
                let energy = energy_brute(&b, m).unwrap();
                assert!(sumset * energy >= (b.len() as u128).pow(2 * m));
            }
        }
    }

    #[test]
    fn translation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let size = rng.gen_range(1..=6);
            let values: Vec<Frac> = (0..size)
                .map(|_| {
                    let q = rng.gen_range(1i128..=12);
                    Frac::new(rng.gen_range(1..=q), q).unwrap()
                })
                .collect();
            let shift = Frac::new(3, 7).unwrap();
            let shifted: Vec<Frac> = values.iter().map(|v| v.checked_add(&shift).unwrap()).collect();
            for m in [2u32, 3] {
                assert_eq!(
                    energy_brute_values(&values, m).unwrap(),
                    energy_brute_values(&shifted, m).unwrap()
                );
            }
        }
    }

    #[test]
    fn diagonal_bound_holds() {
        assert_eq!(diagonal_lower(10, 2), 128); // 2! * 8^2
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let size = rng.gen_range(3..=8);
            let elems: Vec<ReducedRational> = (0..size)
                .map(|_| {
                    let q = rng.gen_range(1..=20);
                    rr(rng.gen_range(1..=q), q)
                })
                .collect();
            let b = RationalSet::from_elements(elems);
            for m in [2u32, 3] {
                if b.len() as u32 > m {
                    assert!(energy_brute(&b, m).unwrap() >= diagonal_lower(b.len(), m));
                }
            }
        }
    }

    #[test]
    fn subset_monotonicity_of_energy() {
        let b = enumerate_rationals(8).unwrap();
        let whole = energy_mitm(&b, 2).unwrap();
        for class in split_intervals(&b, 2).unwrap() {
            assert!(energy_mitm(&class, 2).unwrap() <= whole);
        }
    }

    #[test]
    fn split_intervals_partitions() {
        let b = set(&[(1, 4), (3, 4)]);
        let classes = split_intervals(&b, 1).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].len(), 1);
        assert_eq!(classes[1].len(), 1);

        let b = enumerate_rationals(5).unwrap();
        let classes = split_intervals(&b, 2).unwrap();
        let total: usize = classes.iter().map(|c| c.len()).sum();
        assert_eq!(total, 10); // |Q_{<=5}| by totient sum
        let mut union: Vec<ReducedRational> = classes.iter().flat_map(|c| c.elements().to_vec()).collect();
        union.sort();
        assert_eq!(union, b.elements());
    }

    #[test]
    fn approx_energy_matches_exact_at_zero_delta() {
        let b = set(&[(1, 2), (1, 3), (2, 3), (1, 4)]);
        let freqs: Vec<Frac> = b.elements().iter().map(|r| r.to_frac()).collect();
        for m in [1u32, 2] {
            assert_eq!(
                energy_approx_exact(&freqs, m, Frac::ZERO, ApproxMetric::Absolute).unwrap(),
                energy_brute(&b, m).unwrap()
            );
        }
        assert_eq!(energy_approx(&[0.37], 2, 0.0, ApproxMetric::Absolute).unwrap(), 1);
    }

    #[test]
    fn approx_energy_separation() {
        // Perturbing each rational by less than delta * Q^(-2m) / 4m with
        // delta = Q^(-2m)/2 leaves the approximate energy equal to the exact
        // energy of the unperturbed set.
        let b = set(&[(1, 3), (2, 3), (1, 2), (1, 4)]);
        let q: f64 = 4.0;
        let m = 2u32;
        let delta = q.powi(-(2 * m as i32)) / 2.0;
        let eps = delta * q.powi(-(2 * m as i32)) / (4.0 * m as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let freqs: Vec<f64> = b
            .elements()
            .iter()
            .map(|r| r.as_f64() + rng.gen_range(-0.9..0.9) * eps)
            .collect();
        assert_eq!(
            energy_approx(&freqs, m, delta, ApproxMetric::Absolute).unwrap(),
            energy_brute(&b, m).unwrap()
        );
    }

    #[test]
    fn theorem_rhs_example() {
        let v = theorem_bound_rhs(2, 1, 2, 1.0).unwrap();
        assert!((v - 4.0 * 4f64.ln()).abs() < 1e-12);
        assert!(theorem_bound_rhs(1, 1, 2, 1.0).is_err());
    }

    #[test]
    fn brute_budget_error_suggests_mitm() {
        let b = enumerate_rationals(10).unwrap();
        let err = energy_brute_with_budget(&b, 3, 1000).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        assert!(err.to_string().contains("mitm"));
    }
}
