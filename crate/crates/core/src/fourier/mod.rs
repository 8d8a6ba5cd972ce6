//! The circle-method engine: exponential sums over sets and squares, Gauss
//! sums, major arcs with adaptive quadrature, the correlation identity for
//! square differences, spectrum extraction by dyadic pigeonholing, and the
//! Chang-style moment chain with the Fejér kernel.

mod arcs;
mod chang;
mod exp;
mod spectrum;

pub use arcs::{
    adaptive_simpson, arc_integral, arcs_disjoint, circle_integral, major_arcs_for_denominator,
    ArcIntegral, Integrand, MajorArc,
};
pub use chang::{chang_check, fejer_kernel, fejer_poisson_identity, ChangReport};
pub use exp::{
    balanced_exp_sum, correlation_count, exp_sum, gauss_sum, interval_exp_sum,
    lemma61_decomposition_defect, lemma61_part1_ratio, w_hat,
};
pub use spectrum::{extract_spectrum, Branch, SpectrumFrequency, SpectrumReport};

/// e(x) = exp(2 pi i x).
pub(crate) fn e(x: f64) -> num_complex::Complex64 {
    let t = 2.0 * std::f64::consts::PI * x;
    num_complex::Complex64::new(t.cos(), t.sin())
}
