//! Distributions built from `g` and the Eisenstein distributions, and the
//! checks that glue them into a measure.

pub mod certify;
pub mod context;
pub mod diffop;
pub mod dirac;
pub mod fourier;
pub mod fused;
pub mod phi;
pub mod umodel;

pub use certify::{
    check_admissibility, check_budget, check_divisibility, check_level, check_refinement, divisibility_cost,
    divisibility_sweep, exact_ring, mellin_data, padic_ring, scale_g, two_path_fourier, two_path_phi,
    AdmissibilityReport, AdmissibilityRow, DivisibilityRow, LevelRow, MellinReport, RefinementRow, TwoPathRow,
    ARCHIMEDEAN_NOTE, O_CLAIM_NOTE,
};
pub use context::{OpenKind, OpenSet, RankinContext, Ratio};
pub use dirac::{mu_b, mu_b_moment, DiracMeasure};
pub use fourier::{b_polynomial, b_via_measure, FourierData};
pub use fused::{estimate_cost, required_input, u_combination, u_phi_all, DivisorTable, UPhiTable};
pub use phi::{phi_char, phi_char_closed, phi_char_definitional, phi_table, twist_g, PhiTable};
pub use umodel::{alpha_primary, model_series, projector_convergence, Mat2, ProjectorReport, TwoDimUModel};
