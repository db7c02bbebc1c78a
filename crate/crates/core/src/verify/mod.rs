//! Brute-force oracles for the combinatorial identities behind the closed
//! forms of `p`, and for the invariance of the probe state under the
//! effective NV-NV couplings.

mod closed_form;
mod counting;
mod qutrit;

pub use closed_form::{closed_form_terms, exact_p_small_l_by_terms, ClosedFormReport};
pub use counting::{
    binomial_square_sum, count_balanced_pairs, count_mixed_pairs, DuplicationCount, COUNT_MAX_L,
};
pub use qutrit::{
    nv_invariance_check, InvarianceReport, PairCouplings, Qutrit, QutritChainState, QUTRIT_MAX_L,
};
