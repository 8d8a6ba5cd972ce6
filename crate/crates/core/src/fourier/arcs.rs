//! Major arcs around rationals and adaptive quadrature over them.

use serde::Serialize;

use super::exp::{balanced_exp_sum, exp_sum, w_hat};
use crate::error::{Error, Result};
use crate::rational::{rationals_with_denominator, ReducedRational};
use crate::sdf::IntegerSet;

/// The major arc around a/q: frequencies gamma in (0, 1] with
/// ||gamma - a/q|| <= K/(qN), where ||.|| is distance to the nearest integer.
#[derive(Clone, Copy, Debug)]
pub struct MajorArc {
    center: ReducedRational,
    k: f64,
    n: u64,
}

impl MajorArc {
    pub fn new(center: ReducedRational, k: f64, n: u64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidArgument("K must be positive".into()));
        }
        if n < 1 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        Ok(MajorArc { center, k, n })
    }

    pub fn center(&self) -> ReducedRational {
        self.center
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Half-width K/(qN).
    pub fn half_width(&self) -> f64 {
        self.k / (self.center.den() as f64 * self.n as f64)
    }

    /// Endpoints on the real line, centered at a/q (the arc lives on the
    /// circle; integrands are 1-periodic so integration uses this interval).
    pub fn interval(&self) -> (f64, f64) {
        let c = self.center.as_f64();
        (c - self.half_width(), c + self.half_width())
    }

    /// Membership as distance to the nearest integer translate.
    pub fn contains(&self, gamma: f64) -> bool {
        let d = (gamma - self.center.as_f64()).rem_euclid(1.0);
        d.min(1.0 - d) <= self.half_width()
    }
}

/// Pairwise disjointness of arcs by interval arithmetic on the circle.
pub fn arcs_disjoint(arcs: &[MajorArc]) -> bool {
    for (i, a) in arcs.iter().enumerate() {
        for b in &arcs[i + 1..] {
            if a.center == b.center {
                continue;
            }
            let gap = {
                let d = (a.center.as_f64() - b.center.as_f64()).rem_euclid(1.0);
                d.min(1.0 - d)
            };
            if gap <= a.half_width() + b.half_width() {
                return false;
            }
        }
    }
    true
}

/// All arcs with denominator exactly q. Checks the disjointness regime
/// 2K^2 < N when `require_disjoint` is set.
pub fn major_arcs_for_denominator(
    q: u64,
    n: u64,
    k: f64,
    require_disjoint: bool,
) -> Result<Vec<MajorArc>> {
    if require_disjoint && 2.0 * k * k >= n as f64 {
        return Err(Error::Precondition(format!(
            "arc disjointness needs 2K^2 < N (K = {k}, N = {n})"
        )));
    }
    let arcs: Vec<MajorArc> = rationals_with_denominator(q)?
        .into_iter()
        .map(|c| MajorArc::new(c, k, n))
        .collect::<Result<_>>()?;
    if require_disjoint && !arcs_disjoint(&arcs) {
        return Err(Error::Precondition("arcs overlap".into()));
    }
    Ok(arcs)
}

/// Which magnitude is integrated over an arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Integrand {
    /// |g-hat|^2 of the balanced function.
    BalancedSquared,
    /// |W-hat|^2 of the weighted square transform.
    SquaresSquared,
    /// |g-hat * 1_A-hat * W-hat|.
    TripleProduct,
}

/// Quadrature result with a convergence flag.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ArcIntegral {
    pub value: f64,
    pub converged: bool,
    pub nodes: usize,
}

const INITIAL_NODES: usize = 129;
const MAX_NODES: usize = 1 << 21;
const RELATIVE_TARGET: f64 = 1e-6;

fn evaluate(set: &IntegerSet, integrand: Integrand, gamma: f64) -> f64 {
    match integrand {
        Integrand::BalancedSquared => balanced_exp_sum(set, gamma).norm_sqr(),
        Integrand::SquaresSquared => w_hat(gamma, set.n()).expect("N >= 1").norm_sqr(),
        Integrand::TripleProduct => {
            let g = balanced_exp_sum(set, gamma);
            let a = exp_sum(set, gamma);
            let w = w_hat(gamma, set.n()).expect("N >= 1");
            (g * a * w).norm()
        }
    }
}

/// Composite Simpson over [lo, hi] with the given odd node count.
fn simpson<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, nodes: usize) -> f64 {
    debug_assert!(nodes >= 3 && nodes % 2 == 1);
    let h = (hi - lo) / (nodes - 1) as f64;
    let mut total = f(lo) + f(hi);
    for i in 1..nodes - 1 {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        total += weight * f(lo + i as f64 * h);
    }
    total * h / 3.0
}

/// Adaptive composite Simpson with node doubling until two successive
/// estimates agree to the relative target (1e-6). If the refinement limit is
/// reached first, the value is returned with `converged = false`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> ArcIntegral {
    let mut nodes = INITIAL_NODES;
    let mut previous = simpson(f, lo, hi, nodes);
    loop {
        let next_nodes = 2 * nodes - 1;
        let current = simpson(f, lo, hi, next_nodes);
        let scale = current.abs().max(1e-300);
        if (current - previous).abs() <= RELATIVE_TARGET * scale {
            return ArcIntegral {
                value: current,
                converged: true,
                nodes: next_nodes,
            };
        }
        if next_nodes >= MAX_NODES {
            return ArcIntegral {
                value: current,
                converged: false,
                nodes: next_nodes,
            };
        }
        previous = current;
        nodes = next_nodes;
    }
}

/// Integral of the chosen magnitude over the arc.
pub fn arc_integral(set: &IntegerSet, arc: &MajorArc, integrand: Integrand) -> Result<ArcIntegral> {
    if arc.n() != set.n() {
        return Err(Error::Precondition(format!(
            "arc built for N = {} but the set lives in [1, {}]",
            arc.n(),
            set.n()
        )));
    }
    let (lo, hi) = arc.interval();
    Ok(adaptive_simpson(&|g| evaluate(set, integrand, g), lo, hi))
}

/// Full-circle integral of the chosen magnitude (the arc of width 1).
pub fn circle_integral(set: &IntegerSet, integrand: Integrand) -> ArcIntegral {
    adaptive_simpson(&|g| evaluate(set, integrand, g), 0.0, 1.0)
}
