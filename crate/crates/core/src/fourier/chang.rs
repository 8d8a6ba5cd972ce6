//! The Chang-style moment chain: Hölder with constant 1, the Fejér kernel
//! lower bound with constant 3, and the Poisson closed form with the factor
//! 2N, each asserted with its explicit constant.

use num_complex::Complex64;
use serde::Serialize;

use super::e;
use super::exp::exp_sum;
use crate::energy::{energy_approx, ApproxMetric};
use crate::error::{Error, Result};
use crate::sdf::IntegerSet;

/// The Fejér kernel psi(t) = sin^2(pi t) / (pi t)^2, with psi(0) = 1.
pub fn fejer_kernel(t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let x = std::f64::consts::PI * t;
    (x.sin() / x).powi(2)
}

/// Closed form of D(theta, s) = sum_{n >= 1} cos(n theta)(1 - cos(n s))/n^2,
/// the symmetric second difference of the Clausen-type series
/// C(theta) = pi^2/6 - pi*theta/2 + theta^2/4 on [0, 2pi]. The quadratic
/// pieces cancel to -s^2/4 away from the kink at 0 mod 2pi, and the kink
/// contributes a linear correction within distance s of it. Exact up to
/// rounding, with no cancellation of large terms.
fn clausen_second_difference(theta: f64, s: f64) -> f64 {
    let pi = std::f64::consts::PI;
    debug_assert!(s > 0.0 && s <= pi);
    let mut theta = theta.rem_euclid(2.0 * pi);
    // C is even around 0 mod 2pi; fold onto [0, pi].
    if theta > pi {
        theta = 2.0 * pi - theta;
    }
    if theta >= s {
        -s * s / 4.0
    } else {
        pi * (s - theta) / 2.0 - s * s / 4.0
    }
}

/// Partial sum of the same series: sum_{n <= m} cos(n theta)(1 - cos(n s))/n^2,
/// with 1 - cos(x) evaluated as 2 sin^2(x/2) for stability.
fn clausen_second_difference_partial(theta: f64, s: f64, m: u64) -> f64 {
    let mut partial = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=m {
        let nf = n as f64;
        let term = (nf * theta).cos() * 2.0 * (nf * s / 2.0).sin().powi(2) / (nf * nf);
        let y = term - comp;
        let t = partial + y;
        comp = (t - partial) - y;
        partial = t;
    }
    partial
}

/// Number of directly summed terms in the Fejér-Poisson series; the rest of
/// the series is added exactly through the Clausen closed form.
const SERIES_HEAD: u64 = 2048;

/// Both sides of the Fejér-Poisson identity
/// sum_{n in Z} psi(n/2N) e(n beta) = 2N * max(0, 1 - 2N ||beta||):
/// the series (head summed directly, tail in closed form) and the triangle.
pub fn fejer_poisson_identity(beta: f64, n: u64) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let pi = std::f64::consts::PI;
    let two_n = 2.0 * n as f64;

    // Head: 1 + 2 sum_{j=1}^{H} psi(j/2N) cos(2 pi j beta), Kahan-compensated.
    let mut head = 0.0f64;
    let mut comp = 0.0f64;
    for j in 1..=SERIES_HEAD {
        let term = fejer_kernel(j as f64 / two_n) * (2.0 * pi * j as f64 * beta).cos();
        let y = term - comp;
        let t = head + y;
        comp = (t - head) - y;
        head = t;
    }

    // Tail: psi(j/2N) cos(2 pi j beta) = (2N^2/pi^2) cos(j theta)(1 - cos(j s))/j^2
    // with theta = 2 pi beta and s = pi/N, so the tail past the head is the
    // closed-form second difference minus its partial sum.
    let theta0 = (2.0 * pi * beta).rem_euclid(2.0 * pi);
    let shift = pi / n as f64;
    let scale = 2.0 * (n as f64).powi(2) / (pi * pi);
    let tail = scale
        * (clausen_second_difference(theta0, shift)
            - clausen_second_difference_partial(theta0, shift, SERIES_HEAD));

    let series = 1.0 + 2.0 * head + 2.0 * tail;
    let dist = {
        let f = beta.rem_euclid(1.0);
        f.min(1.0 - f)
    };
    let closed = two_n * (1.0 - two_n * dist).max(0.0);
    Ok((series, closed))
}

/// All quantities of the moment chain on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct ChangReport {
    pub m: u32,
    pub n: u64,
    pub set_size: usize,
    pub gamma_count: usize,
    /// sum over b of |1_A-hat(b)|.
    pub lhs: f64,
    /// |A|^(1 - 1/2m) * (sum_a |S_a|^2m)^(1/2m), the Hölder step.
    pub holder_rhs: f64,
    /// sum over a in A of |S_a|^2m.
    pub power_sum: f64,
    /// Truncated sum over |n| <= 64N of psi(n/2N) |S_n|^2m.
    pub fejer_truncated: f64,
    /// The full kernel sum in Poisson closed form:
    /// sum over 2m-tuples of cos(phase) * 2N * max(0, 1 - 2N ||sigma||).
    pub poisson_value: f64,
    /// Upper bound on the truncation tail, from psi(t) <= 1/(pi t)^2.
    pub tail_allowance: f64,
    /// Approximate additive energy E_2m(Gamma; 1/2N) with mod-1 distance.
    pub energy_count: u128,
    /// The end of the chain: |A|^(1 - 1/2m) * (6N * energy)^(1/2m).
    pub final_rhs: f64,
    pub ratio: f64,
    pub holder_ok: bool,
    pub fejer_ok: bool,
    pub poisson_ok: bool,
    pub energy_ok: bool,
}

impl ChangReport {
    pub fn passed(&self) -> bool {
        self.holder_ok && self.fejer_ok && self.poisson_ok && self.energy_ok
    }
}

/// Phase-twisted frequency sum S_x = sum over b of e(theta_b + b x).
fn twisted_sum(gammas: &[f64], phases: &[f64], x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, theta) in gammas.iter().zip(phases) {
        acc += e(theta + b * x);
    }
    acc
}

const REL_TOL: f64 = 1e-12;
const ABS_TOL: f64 = 1e-9;

/// Verifies the moment chain on A with the frequency set Gamma:
/// Hölder (constant 1), the Fejér kernel bound (constant 3), the Poisson
/// closed form (factor 2N), and the reduction to approximate additive energy.
pub fn chang_check(set: &IntegerSet, gammas: &[f64], m: u32) -> Result<ChangReport> {
    if gammas.is_empty() {
        return Err(Error::InvalidArgument("Gamma must be nonempty".into()));
    }
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let tuples = (gammas.len() as u128)
        .checked_pow(2 * m)
        .ok_or(Error::Overflow)?;
    if tuples > 20_000_000 {
        return Err(Error::Resource(format!(
            "|Gamma|^(2m) = {tuples} tuples exceed the Poisson enumeration budget"
        )));
    }

    let n = set.n();
    let size = set.len() as f64;
    let exponent = 1.0 / (2 * m) as f64;

    // Phases aligning each coefficient with the positive real axis.
    let mut lhs = 0.0f64;
    let mut phases = Vec::with_capacity(gammas.len());
    for &b in gammas {
        let z = exp_sum(set, b);
        lhs += z.norm();
        // e(theta) * z real positive: theta = -arg(z) / 2pi.
        phases.push(-z.arg() / (2.0 * std::f64::consts::PI));
    }

    let power_sum: f64 = crate::par::sum_f64(set.len(), |i| {
        twisted_sum(gammas, &phases, set.elements()[i] as f64)
            .norm()
            .powi(2 * m as i32)
    });
    let holder_rhs = size.powf(1.0 - exponent) * power_sum.powf(exponent);

    // Truncated Fejér-weighted sum over integers |x| <= 64N.
    let cutoff = 64 * n as i64;
    let two_n = 2.0 * n as f64;
    let fejer_truncated: f64 = crate::par::sum_f64((2 * cutoff + 1) as usize, |i| {
        let x = i as i64 - cutoff;
        fejer_kernel(x as f64 / two_n)
            * twisted_sum(gammas, &phases, x as f64)
                .norm()
                .powi(2 * m as i32)
    });
    // psi(t) <= 1/(pi t)^2 bounds the discarded |x| > 64N terms.
    let tail_allowance = (gammas.len() as f64).powi(2 * m as i32)
        * (2.0 * two_n * two_n / (std::f64::consts::PI.powi(2) * cutoff as f64));

    // Poisson closed form over all 2m-tuples.
    let mut poisson_value = 0.0f64;
    let total = 2 * m as usize;
    let len = gammas.len();
    let mut idx = vec![0usize; total];
    loop {
        let mut sigma = 0.0f64;
        let mut phase = 0.0f64;
        for (pos, &i) in idx.iter().enumerate() {
            let sign = if pos < m as usize { 1.0 } else { -1.0 };
            sigma += sign * gammas[i];
            phase += sign * phases[i];
        }
        let dist = {
            let f = sigma.rem_euclid(1.0);
            f.min(1.0 - f)
        };
        let triangle = (1.0 - two_n * dist).max(0.0);
        if triangle > 0.0 {
            poisson_value +=
                (2.0 * std::f64::consts::PI * phase).cos() * two_n * triangle;
        }
        // Odometer increment over Gamma^(2m).
        let mut pos = 0;
        loop {
            if pos == total {
                break;
            }
            idx[pos] += 1;
            if idx[pos] < len {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == total {
            break;
        }
    }

    let energy_count = energy_approx(gammas, m, 1.0 / (2.0 * n as f64), ApproxMetric::ModOne)?;
    let final_rhs = size.powf(1.0 - exponent)
        * (6.0 * n as f64 * energy_count as f64).powf(exponent);

    let holder_ok = lhs <= holder_rhs * (1.0 + REL_TOL) + ABS_TOL;
    let fejer_ok = power_sum <= 3.0 * fejer_truncated * (1.0 + REL_TOL) + ABS_TOL;
    let poisson_ok = fejer_truncated <= poisson_value * (1.0 + REL_TOL) + ABS_TOL
        && poisson_value <= fejer_truncated + tail_allowance + ABS_TOL;
    // power_sum <= 3 * poisson <= 3 * 2N * energy_count ties the chain off.
    let energy_ok = poisson_value <= two_n * energy_count as f64 * (1.0 + REL_TOL) + ABS_TOL;

    Ok(ChangReport {
        m,
        n,
        set_size: set.len(),
        gamma_count: gammas.len(),
        lhs,
        holder_rhs,
        power_sum,
        fejer_truncated,
        poisson_value,
        tail_allowance,
        energy_count,
        final_rhs,
        ratio: if final_rhs > 0.0 { lhs / final_rhs } else { f64::INFINITY },
        holder_ok,
        fejer_ok,
        poisson_ok,
        energy_ok,
    })
}
