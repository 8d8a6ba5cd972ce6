//! The density-increment step on a square progression, the trichotomy
//! dispatcher, the iteration driver, and the final bound evaluator.

use serde::Serialize;

use crate::config::ConstantsConfig;
use crate::error::{Error, Result};
use crate::fourier::{
    arc_integral, extract_spectrum, major_arcs_for_denominator, Branch, Integrand, SpectrumReport,
};
use crate::par;
use crate::sdf::IntegerSet;

/// nu = exp(-c * log(1/alpha) / loglog(1/alpha)); requires alpha < 1/e so the
/// double logarithm is positive. c = 0 gives nu = 1.
pub fn nu_of_alpha(alpha: f64, c: f64) -> Result<f64> {
    if c < 0.0 {
        return Err(Error::InvalidArgument("c must be nonnegative".into()));
    }
    if !(alpha > 0.0) || alpha >= std::f64::consts::E.recip() {
        return Err(Error::InvalidArgument(format!(
            "nu is defined for 0 < alpha < 1/e, got {alpha}"
        )));
    }
    let log_inv = (1.0 / alpha).ln();
    Ok((-c * log_inv / log_inv.ln()).exp())
}

/// Outcome of one increment attempt.
#[derive(Clone, Debug, Serialize)]
pub struct IncrementResult {
    /// Whether alpha' >= (1 + nu/20) alpha was achieved.
    pub found: bool,
    /// The maximizing shift (smallest on ties).
    pub x: i64,
    pub q: u64,
    pub n_prime: u64,
    #[serde(skip)]
    pub a_prime: IntegerSet,
    pub alpha_prime: f64,
    pub nu: f64,
    /// Verified arc mass over the denominator-q arcs.
    pub hypothesis_mass: f64,
    /// Whether the mass reaches nu * alpha * |A| (Lemma hypothesis).
    pub hypothesis_ok: bool,
}

/// Best (count, shift) over one residue class of shifts, scanning the sorted
/// class elements with a sliding window. Smallest shift wins ties.
fn scan_residue_class(
    class: &[u64],
    first_x: i64,
    x_max: i64,
    q_sq: u64,
    n_prime: u64,
) -> (u64, i64) {
    let mut best = (0u64, i64::MAX);
    // Window of a-values counted at shift x: q^2 - x <= a <= q^2 N' - x.
    // Both bounds decrease as x increases, so two leftward pointers suffice.
    let mut lo = class.len(); // first index with a >= q^2 - x
    let mut hi = class.len(); // one past last index with a <= q^2 N' - x
    let mut x = first_x;
    while x <= x_max {
        let lower = q_sq as i64 - x;
        let upper = (q_sq * n_prime) as i64 - x;
        while lo > 0 && class[lo - 1] as i64 >= lower {
            lo -= 1;
        }
        while hi > lo && class[hi - 1] as i64 > upper {
            hi -= 1;
        }
        // hi only moves left; re-extend if the window regained elements.
        while hi < class.len() && (class[hi] as i64) <= upper {
            hi += 1;
        }
        let count = (hi.max(lo) - lo) as u64;
        if count > best.0 {
            best = (count, x);
        }
        x += q_sq as i64;
    }
    best
}

/// One density-increment attempt at modulus q: builds the progression
/// P = q^2 * [N'] with N' = floor(c0 * nu * alpha * N / (K q^2)), verifies
/// the arc-mass hypothesis at denominator q, scans every shift x for the
/// maximum of |P intersect (A + x)|, and rescales.
pub fn find_increment(
    set: &IntegerSet,
    q: u64,
    k: f64,
    nu: f64,
    config: &ConstantsConfig,
) -> Result<IncrementResult> {
    if q < 1 {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    if !(k >= 1.0) {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidArgument("nu must lie in (0, 1]".into()));
    }
    let n = set.n();
    let alpha = set.density();
    let n_prime = (config.c0_nprime * nu * alpha * n as f64 / (k * (q * q) as f64)).floor();
    if n_prime < 1.0 {
        return Err(Error::Scale(format!(
            "N' = floor({n_prime:.6}) < 1: the input is too small for these parameters"
        )));
    }
    let n_prime = n_prime as u64;
    let q_sq = q * q;

    // Hypothesis: the arcs at denominator q carry mass >= nu * alpha * |A|.
    let mut hypothesis_mass = 0.0f64;
    for arc in major_arcs_for_denominator(q, n, k, false)? {
        hypothesis_mass += arc_integral(set, &arc, Integrand::BalancedSquared)?.value;
    }
    let hypothesis_ok = hypothesis_mass >= nu * alpha * set.len() as f64;

    // Exhaustive shift scan over x in [1 - q^2 N', N], one residue class of
    // shifts mod q^2 at a time.
    let x_min = 1i64 - (q_sq * n_prime) as i64;
    let x_max = n as i64;
    let mut classes: Vec<Vec<u64>> = vec![Vec::new(); q_sq as usize];
    for &a in set.elements() {
        classes[(a % q_sq) as usize].push(a);
    }
    let per_class: Vec<(u64, i64)> = par::map_indices(q_sq as usize, |r| {
        // Shifts x with (a + x) divisible by q^2 for a = r mod q^2.
        let residue = ((q_sq as i64 - r as i64) % q_sq as i64 + q_sq as i64) % q_sq as i64;
        let offset = (residue - x_min).rem_euclid(q_sq as i64);
        scan_residue_class(&classes[r], x_min + offset, x_max, q_sq, n_prime)
    });
    let (count, x) = per_class
        .into_iter()
        .fold((0u64, i64::MAX), |best, cand| {
            if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                cand
            } else {
                best
            }
        });
    if x == i64::MAX {
        return Err(Error::Scale("empty set has no increment".into()));
    }

    let elements: Vec<u64> = set
        .elements()
        .iter()
        .filter_map(|&a| {
            let shifted = a as i64 + x;
            (shifted > 0 && shifted % q_sq as i64 == 0).then(|| shifted as u64 / q_sq)
        })
        .filter(|&j| j >= 1 && j <= n_prime)
        .collect();
    debug_assert_eq!(elements.len() as u64, count);
    let a_prime = IntegerSet::new(n_prime, elements)?;
    let alpha_prime = a_prime.density();

    Ok(IncrementResult {
        found: alpha_prime >= (1.0 + nu / 20.0) * alpha,
        x,
        q,
        n_prime,
        a_prime,
        alpha_prime,
        nu,
        hypothesis_mass,
        hypothesis_ok,
    })
}

/// Report-only evaluation of both sides of the contradiction bound
/// m^m (log mQ)^(C^m) (nu B^2 Q)^m versus alpha (B Q^(1/2) / log(1/alpha))^(2m),
/// with every implied constant set to 1.
#[derive(Clone, Debug, Serialize)]
pub struct ContradictionDiagnostic {
    pub m: u32,
    pub q_level: u64,
    pub b_level: f64,
    pub nu: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub note: Option<String>,
}

/// Which way the trichotomy resolved, with its evidence.
#[derive(Debug)]
pub enum Trichotomy {
    Sparse {
        alpha: f64,
    },
    Increment {
        result: IncrementResult,
        report: SpectrumReport,
    },
    ManyRationals {
        report: SpectrumReport,
        diagnostic: ContradictionDiagnostic,
    },
}

impl Trichotomy {
    pub fn branch(&self) -> Branch {
        match self {
            Trichotomy::Sparse { .. } => Branch::Sparse,
            Trichotomy::Increment { .. } => Branch::Increment,
            Trichotomy::ManyRationals { .. } => Branch::ManyRationals,
        }
    }
}

fn chang_m(alpha: f64, config: &ConstantsConfig) -> u32 {
    let loglog = (1.0 / alpha).ln().ln();
    if loglog <= 0.0 {
        return 2;
    }
    ((config.c_prime_m * loglog).ceil() as u32).max(2)
}

/// Lemma 6.3 dispatcher: sparse when the density is tiny relative to N,
/// otherwise extract the spectrum; a denominator class over the nu B^2 cap
/// dispatches an increment there, and a spectrum respecting every cap is the
/// many-rationals outcome with the contradiction diagnostic.
pub fn trichotomy(set: &IntegerSet, nu: f64, config: &ConstantsConfig) -> Result<Trichotomy> {
    let n = set.n();
    let alpha = set.density();
    if set.is_empty()
        || alpha < (n as f64).powf(-1.0 / 3.0)
        || (1.0 / alpha).ln() >= config.c_sparse * (n as f64).ln()
    {
        return Ok(Trichotomy::Sparse { alpha });
    }
    let report = match extract_spectrum(set, config) {
        Ok(r) => r,
        Err(Error::SparseBranch) => return Ok(Trichotomy::Sparse { alpha }),
        Err(e) => return Err(e),
    };

    let cap = nu * report.b_level * report.b_level;
    let violator = report
        .den_counts
        .iter()
        .filter(|&(_, &count)| count as f64 > cap)
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&q, _)| q);
    let mut note = None;
    if let Some(q) = violator {
        match find_increment(set, q, report.k, nu, config) {
            Ok(result) => {
                return Ok(Trichotomy::Increment { result, report });
            }
            Err(Error::Scale(msg)) => {
                note = Some(format!(
                    "denominator {q} violates the cap but the increment scale failed: {msg}"
                ));
            }
            Err(e) => return Err(e),
        }
    }

    let m = chang_m(alpha, config);
    let q_f = report.q_level as f64;
    let b = report.b_level;
    let log_term = ((m as f64) * q_f).ln().max(1.0);
    let diagnostic = ContradictionDiagnostic {
        m,
        q_level: report.q_level,
        b_level: b,
        nu,
        lhs: (m as f64).powi(m as i32)
            * log_term.powf(std::f64::consts::E.powi(m as i32).min(64.0))
            * (nu * b * b * q_f).powi(m as i32),
        rhs: alpha * (b * q_f.sqrt() / (1.0 / alpha).ln()).powi(2 * m as i32),
        note,
    };
    Ok(Trichotomy::ManyRationals { report, diagnostic })
}

/// One recorded step of the iteration.
#[derive(Clone, Debug, Serialize)]
pub struct IterationStep {
    pub n: u64,
    pub set_size: usize,
    pub alpha: f64,
    pub branch: Branch,
    pub nu: f64,
    pub q: Option<u64>,
}

/// Full trace of the density-increment iteration.
#[derive(Clone, Debug, Serialize)]
pub struct IterationLog {
    pub steps: Vec<IterationStep>,
    pub termination: String,
    /// The a-priori step bound 20 log(1/alpha_0)/nu_0 + 1.
    pub step_bound: f64,
    pub initial_alpha: f64,
}

/// Repeatedly applies the trichotomy, replacing (A, N) on each increment,
/// until a terminal branch, the N floor, or the step bound.
pub fn iterate(set: &IntegerSet, config: &ConstantsConfig) -> Result<IterationLog> {
    let initial_alpha = set.density();
    let floor = config
        .n_floor
        .max((set.n() as f64).sqrt().floor() as u64);
    let mut current = set.clone();
    let mut steps = Vec::new();
    let mut step_bound = f64::INFINITY;

    loop {
        let alpha = current.density();
        let nu = match nu_of_alpha(alpha, config.c_nu) {
            Ok(nu) => nu,
            Err(_) => {
                steps.push(IterationStep {
                    n: current.n(),
                    set_size: current.len(),
                    alpha,
                    branch: Branch::Sparse,
                    nu: f64::NAN,
                    q: None,
                });
                return Ok(IterationLog {
                    steps,
                    termination: "nu-domain".into(),
                    step_bound,
                    initial_alpha,
                });
            }
        };
        if steps.is_empty() {
            step_bound = 20.0 * (1.0 / alpha).ln() / nu + 1.0;
        }
        let outcome = trichotomy(&current, nu, config)?;
        let branch = outcome.branch();
        let q = match &outcome {
            Trichotomy::Increment { result, .. } => Some(result.q),
            _ => None,
        };
        steps.push(IterationStep {
            n: current.n(),
            set_size: current.len(),
            alpha,
            branch,
            nu,
            q,
        });

        match outcome {
            Trichotomy::Sparse { .. } => {
                return Ok(IterationLog {
                    steps,
                    termination: "sparse".into(),
                    step_bound,
                    initial_alpha,
                });
            }
            Trichotomy::ManyRationals { .. } => {
                return Ok(IterationLog {
                    steps,
                    termination: "many-rationals".into(),
                    step_bound,
                    initial_alpha,
                });
            }
            Trichotomy::Increment { result, .. } => {
                if !result.found {
                    return Ok(IterationLog {
                        steps,
                        termination: "increment-stalled".into(),
                        step_bound,
                        initial_alpha,
                    });
                }
                if result.n_prime < floor {
                    return Ok(IterationLog {
                        steps,
                        termination: "below-floor".into(),
                        step_bound,
                        initial_alpha,
                    });
                }
                current = result.a_prime;
            }
        }
        if steps.len() as f64 > step_bound {
            return Err(Error::Precondition(format!(
                "iteration exceeded the step bound {step_bound}"
            )));
        }
    }
}

/// The headline bound N / (log N)^(c logloglog N); needs logloglog N > 0,
/// i.e. N >= 16.
pub fn theorem_bound(n: u64, c: f64) -> Result<f64> {
    let nf = n as f64;
    let logloglog = nf.ln().ln().ln();
    if !(logloglog > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "logloglog N must be positive (N = {n} is too small)"
        )));
    }
    Ok(nf / nf.ln().powf(c * logloglog))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdf::{greedy_sdf, is_sdf, planted_sdf, random_sdf};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nu_examples() {
        // alpha = e^(-e^2): log(1/alpha) = e^2, loglog = 2.
        let alpha = (-std::f64::consts::E.powi(2)).exp();
        let nu = nu_of_alpha(alpha, 1.0).unwrap();
        assert!((nu - (-std::f64::consts::E.powi(2) / 2.0).exp()).abs() < 1e-12);
        assert!((nu - 0.02486).abs() < 1e-4);

        assert_eq!(nu_of_alpha(0.01, 0.0).unwrap(), 1.0);
        assert!(nu_of_alpha(0.5, 1.0).is_err()); // alpha >= 1/e

        // Monotone: nu decreases as alpha decreases (fixed c), in the regime
        // loglog(1/alpha) > 1 where the exponent is monotone.
        let mut prev = f64::INFINITY;
        for k in 2..7 {
            let alpha = (-(std::f64::consts::E.powi(k))).exp();
            let nu = nu_of_alpha(alpha, 1.0).unwrap();
            assert!(nu < prev);
            prev = nu;
        }
    }

    /// Direct per-shift recount oracle.
    fn best_shift_naive(set: &IntegerSet, q: u64, n_prime: u64) -> (u64, i64) {
        let q_sq = q * q;
        let mut best = (0u64, i64::MAX);
        for x in (1 - (q_sq * n_prime) as i64)..=(set.n() as i64) {
            let count = set
                .elements()
                .iter()
                .filter(|&&a| {
                    let s = a as i64 + x;
                    s > 0 && s % q_sq as i64 == 0 && (s / q_sq as i64) as u64 <= n_prime
                })
                .count() as u64;
            if count > best.0 {
                best = (count, x);
            }
        }
        best
    }

    #[test]
    fn shift_scan_matches_naive_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let mut config = ConstantsConfig::default();
        config.c0_nprime = 1.0;
        for _ in 0..20 {
            let n = rng.gen_range(100..=1000u64);
            let elems: Vec<u64> = (1..=n).filter(|_| rng.gen_bool(0.3)).collect();
            if elems.is_empty() {
                continue;
            }
            let set = IntegerSet::new(n, elems).unwrap();
            let q = rng.gen_range(1..=3u64);
            let result = match find_increment(&set, q, 1.0, 0.9, &config) {
                Ok(r) => r,
                Err(Error::Scale(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let (naive_count, naive_x) = best_shift_naive(&set, q, result.n_prime);
            assert_eq!(result.a_prime.len() as u64, naive_count);
            assert_eq!(result.x, naive_x, "tie-break: smallest x wins");
        }
    }

    #[test]
    fn increment_on_planted_structure() {
        let set = planted_sdf(4000, 2, 1, None).unwrap();
        let mut config = ConstantsConfig::default();
        config.c0_nprime = 1.0;
        let alpha = set.density();
        let nu = nu_of_alpha(alpha, 1.0).unwrap();
        let result = find_increment(&set, 2, 1.0, nu, &config).unwrap();
        assert!(result.hypothesis_ok, "mass {}", result.hypothesis_mass);
        assert!(result.found, "alpha' = {} vs alpha = {alpha}", result.alpha_prime);
        assert!(result.alpha_prime >= (1.0 + nu / 20.0) * alpha);
        assert!(is_sdf(&result.a_prime).is_none());
    }

    #[test]
    fn increment_preserves_sdf() {
        let mut config = ConstantsConfig::default();
        config.c0_nprime = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut tested = 0;
        for seed in 0..50u64 {
            let n = rng.gen_range(500..=2000u64);
            let set = random_sdf(n, 0.5, seed).unwrap();
            let q = rng.gen_range(1..=3u64);
            match find_increment(&set, q, 1.0, 0.5, &config) {
                Ok(result) => {
                    assert!(
                        is_sdf(&result.a_prime).is_none(),
                        "seed {seed}: increment broke the SDF property"
                    );
                    tested += 1;
                }
                Err(Error::Scale(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(tested >= 10, "only {tested} instances produced increments");
    }

    #[test]
    fn full_interval_cannot_increment() {
        let n = 500u64;
        let set = IntegerSet::new(n, (1..=n).collect()).unwrap();
        let mut config = ConstantsConfig::default();
        config.c0_nprime = 1.0;
        let result = find_increment(&set, 1, 1.0, 0.5, &config).unwrap();
        assert_eq!(result.alpha_prime, 1.0);
        assert!(!result.found); // (1 + nu/20) * 1 > 1 is unreachable
    }

    #[test]
    fn scale_error_for_tiny_input() {
        let set = IntegerSet::new(50, vec![1, 3, 6]).unwrap();
        assert!(matches!(
            find_increment(&set, 5, 10.0, 0.1, &ConstantsConfig::default()),
            Err(Error::Scale(_))
        ));
    }

    #[test]
    fn trichotomy_sparse_cases() {
        // Density below N^(-1/3).
        let set = IntegerSet::new(10_000, vec![1, 3, 8]).unwrap();
        let t = trichotomy(&set, 0.5, &ConstantsConfig::default()).unwrap();
        assert_eq!(t.branch(), Branch::Sparse);

        // Greedy sets are log-sparse at scale.
        let set = greedy_sdf(20_000).unwrap();
        let t = trichotomy(&set, 0.5, &ConstantsConfig::default()).unwrap();
        assert_eq!(t.branch(), Branch::Sparse);
    }

    #[test]
    fn iterate_terminates_within_bound() {
        let set = greedy_sdf(20_000).unwrap();
        let log = iterate(&set, &ConstantsConfig::default()).unwrap();
        assert!(!log.steps.is_empty());
        assert!((log.steps.len() as f64) <= log.step_bound);
        // Monotone density across increment steps.
        for pair in log.steps.windows(2) {
            if pair[0].branch == Branch::Increment {
                assert!(pair[1].alpha > pair[0].alpha);
            }
        }
    }

    #[test]
    fn theorem_bound_examples() {
        // Smallest admissible N.
        assert!(theorem_bound(15, 1.0).is_err());
        let v = theorem_bound(16, 1.0).unwrap();
        assert!(v.is_finite() && v > 0.0);

        // N close to e^(e^e): logloglog N close to 1, bound close to N/log N.
        let n = std::f64::consts::E.powf(std::f64::consts::E.powf(std::f64::consts::E));
        let n = n.round() as u64;
        let v = theorem_bound(n, 1.0).unwrap();
        let reference = n as f64 / (n as f64).ln();
        assert!((v / reference - 1.0).abs() < 0.01, "{v} vs {reference}");

        // Monotone decreasing in c.
        assert!(theorem_bound(100_000, 2.0).unwrap() < theorem_bound(100_000, 1.0).unwrap());
    }
}
