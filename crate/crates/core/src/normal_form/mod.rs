//! Differentiation-by-parts calculus for `v_k = u_k e^{−iψ(k)t}`, where
//! `u = q − φ` and `ψ(k) = k³ − ak`.
//!
//! Closed-form operators ([`apply_k`], [`apply_b`], [`apply_l0`], [`apply_r`],
//! [`apply_d`], [`apply_e`]) are evaluated by nested summation over the
//! truncated index set `I = {1 ≤ |k| ≤ N}`. Every cubic phase factorizes,
//! `e^{−iΩt} = e^{−ik³t} Π e^{ik_j³t}`, so inputs are twisted once and the
//! output is untwisted; quartic and quintic sums are grouped by their inner
//! pair or parent index. Coefficients and phase signs come from a
//! [`Convention`]; [`oracle_dbp`] re-derives every term mechanically and
//! decides which convention closes the identity.

mod bounds;
mod context;
mod fredholm;
mod identity;
mod operators;
mod oracle;
mod sums;

pub use bounds::{bound_report, random_unit_field, BoundReport, BoundRow, SupportLaw};
pub use context::{Convention, NFContext, R13Condition};
pub use fredholm::{fredholm_report, ktilde_matrix, FredholmReport};
pub use identity::{
    fit_order, verify_d_identity, verify_d_identity_at, verify_dbp_identity,
    verify_dbp_identity_at, IdentityReport, PROBE_SUBSTEP,
};
pub use operators::{
    apply_b, apply_d, apply_e, apply_k, apply_l0, apply_r, BTerms, ETerms, RTerms,
};
pub use oracle::{
    direct, oracle_dbp, resolve_convention, v_rhs, ConventionChoice, NormalFormReport,
    TermComparison,
};

#[cfg(test)]
mod tests;
