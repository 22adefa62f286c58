//! Analytical error probabilities and throughput, evaluated by numerical quadrature.

mod conditional;
mod fading;
pub mod quadrature;
mod system;
mod throughput;

pub use conditional::{
    case_kernel, expected_error_bits, folded_stats, p_df_conditional, p_ed_conditional,
    p_ed_conditional_with, FoldedNormalStats, WalshKernel,
};
pub use fading::{average, snr_pdf, LinkStats};
pub use system::{
    baseline_point, case_ber, evaluate, link_set, link_stats, p_df_average, p_df_average_with,
    p_ed_average, p_ed_average_with, p_mod, p_mod_breakdown, p_sys, proposed_point, theory_curve,
    ModBreakdown, TheoryCurve, TheoryPoint,
};
pub use throughput::{normalized_throughput, period_duration, DurationConvention};

use quadrature::QuadratureOptions;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryOptions {
    pub kernel: WalshKernel,
    /// Tolerances for integrals over a single conditional density.
    pub conditional: QuadratureOptions,
    /// Tolerances for averages over fading statistics.
    pub average: QuadratureOptions,
}

impl Default for TheoryOptions {
    fn default() -> Self {
        Self {
            kernel: WalshKernel::Exact,
            conditional: QuadratureOptions { abs_tol: 1e-15, rel_tol: 1e-9, max_intervals: 2000 },
            average: QuadratureOptions { abs_tol: 1e-15, rel_tol: 1e-7, max_intervals: 2000 },
        }
    }
}
