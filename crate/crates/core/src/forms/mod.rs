//! Scalar and vector-valued differential forms on a chart, the derivations
//! `i_K`, `d`, `L_K`, and the Frölicher–Nijenhuis bracket with its corollaries.
//!
//! Conventions: a `p`-form is stored on increasing multi-indices and
//! `dx^{j₁}∧…∧dx^{j_p}(e_{j₁}, …, e_{j_p}) = 1`. The Lie derivative is
//! `L_K = d i_K − (−1)^{k−1} i_K d`.

pub mod index;
mod ops;
pub(crate) mod related;
mod sform;
mod vform;

pub use ops::{
    check_projection, cocurvature, conjugated_projection, curvature, exterior_d, fn_bracket,
    insert, insert_by_permutations, lie_commutator, lie_derivative, nijenhuis, product_form,
    projection_residual, pullback, restricted_product, vform_len, PROJECTION_TOL,
};
pub use related::{check_f_related, max_over_samples, DerivationReport, Worst};
pub use sform::SForm;
pub use vform::VForm;
