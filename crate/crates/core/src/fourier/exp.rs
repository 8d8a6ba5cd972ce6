//! Exponential sums: set transforms, the balanced function, the weighted
//! square transform, Gauss sums, and the correlation identity.

use num_complex::Complex64;
use num_integer::Integer;

use super::e;
use crate::error::{Error, Result};
use crate::sdf::IntegerSet;

/// Kahan-compensated complex accumulator with a fixed summation order.
#[derive(Default)]
struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, term: Complex64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// The exponential sum of the set: sum over a in A of e(a*gamma),
/// accumulated in ascending element order with compensated summation.
pub fn exp_sum(set: &IntegerSet, gamma: f64) -> Complex64 {
    let gamma = gamma.rem_euclid(1.0);
    let mut acc = CompensatedSum::default();
    for &a in set.elements() {
        acc.add(e(a as f64 * gamma));
    }
    acc.sum
}

/// The exponential sum of the full interval [1, N], via the closed
/// geometric form away from integers and exact count at them.
pub fn interval_exp_sum(n: u64, gamma: f64) -> Complex64 {
    let gamma = gamma.rem_euclid(1.0);
    let dist = gamma.min(1.0 - gamma);
    if dist < 1e-12 {
        return Complex64::new(n as f64, 0.0);
    }
    // sum_{x=1}^{N} e(x*gamma) = e((N+1)*gamma/2) * sin(pi*N*gamma) / sin(pi*gamma)
    let pi = std::f64::consts::PI;
    let ratio = (pi * n as f64 * gamma).sin() / (pi * gamma).sin();
    e((n as f64 + 1.0) * gamma / 2.0) * ratio
}

/// The transform of the balanced function g = 1_A - alpha*1_{[N]}.
pub fn balanced_exp_sum(set: &IntegerSet, gamma: f64) -> Complex64 {
    exp_sum(set, gamma) - set.density() * interval_exp_sum(set.n(), gamma)
}

/// The weighted square transform: sum over m <= sqrt(N) of (2m/sqrt(N)) * e(m^2*gamma).
pub fn w_hat(gamma: f64, n: u64) -> Result<Complex64> {
    if n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let gamma = gamma.rem_euclid(1.0);
    let root = n.isqrt();
    let scale = 1.0 / (n as f64).sqrt();
    let mut acc = CompensatedSum::default();
    for m in 1..=root {
        let weight = 2.0 * m as f64 * scale;
        acc.add(weight * e((m * m) as f64 * gamma));
    }
    Ok(acc.sum)
}

/// The complete quadratic Gauss sum S(a; q) = sum_{n=1}^{q} e(a*n^2/q),
/// by direct summation with exact reduction of a*n^2 mod q.
pub fn gauss_sum(a: u64, q: u64) -> Result<Complex64> {
    if q < 1 {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    if a.gcd(&q) != 1 {
        return Err(Error::Precondition(format!("gcd({a}, {q}) must be 1")));
    }
    let mut acc = CompensatedSum::default();
    for n in 1..=q {
        let residue = ((a as u128 * (n as u128 * n as u128)) % q as u128) as f64;
        acc.add(e(residue / q as f64));
    }
    Ok(acc.sum)
}

/// |W_hat(a/q + beta)| divided by N^(1/2)/q^(1/2) + (q log q)^(1/2)(1 + |beta|N).
/// Report-only: the paper's implied constant is unknown. q = 1 is allowed;
/// its log q term vanishes and the bracket is just sqrt(N).
pub fn lemma61_part1_ratio(a: u64, q: u64, beta: f64, n: u64) -> Result<f64> {
    if q < 1 || a.gcd(&q) != 1 {
        return Err(Error::Precondition("need q >= 1 and gcd(a, q) = 1".into()));
    }
    let value = w_hat(a as f64 / q as f64 + beta, n)?.norm();
    let bracket = (n as f64 / q as f64).sqrt()
        + (q as f64 * (q as f64).ln()).sqrt() * (1.0 + beta.abs() * n as f64);
    Ok(value / bracket)
}

/// |W_hat(a/q + beta) - (S(a;q)/q) W_hat(beta)| divided by
/// (q log q)^(1/2)(1 + |beta|N); the defect of the major-arc decomposition.
/// Report-only. Requires q >= 2 so the normalizer is nonzero.
pub fn lemma61_decomposition_defect(a: u64, q: u64, beta: f64, n: u64) -> Result<f64> {
    if q < 2 || a.gcd(&q) != 1 {
        return Err(Error::Precondition("need q >= 2 and gcd(a, q) = 1".into()));
    }
    let lhs = w_hat(a as f64 / q as f64 + beta, n)?;
    let main = gauss_sum(a, q)? / q as f64 * w_hat(beta, n)?;
    let scale = (q as f64 * (q as f64).ln()).sqrt() * (1.0 + beta.abs() * n as f64);
    Ok((lhs - main).norm() / scale)
}

/// The exact weighted count of square differences in A:
/// sum over a, b in A and n >= 1 with b - a = n^2 <= N of 2n/sqrt(N).
/// Zero exactly when A is square-difference-free. Computed combinatorially;
/// equals the orthogonality integral of 1_A-hat * conj(1_A-hat) * W-hat.
pub fn correlation_count(set: &IntegerSet) -> f64 {
    let bits = set.bitmap();
    let scale = 1.0 / (set.n() as f64).sqrt();
    let mut total = 0.0f64;
    for &b in set.elements() {
        let mut step = 1u64;
        while step * step < b {
            if bits[(b - step * step) as usize] {
                total += 2.0 * step as f64 * scale;
            }
            step += 1;
        }
    }
    total
}
