//! Growth conditions on resolvents and pseudo-resolvents along real λ-grids, sufficient
//! dissipativity criteria and the tractability chain.

mod certificate;
mod dissipativity;
mod grid;
mod index;
mod report;
mod tractability;

pub use certificate::{CertificateKind, Evidence, GrowthCertificate, Verdict};
pub use dissipativity::{certify_d1, certify_d2, check_left_dissipativity, search_omega};
pub use grid::LambdaGrid;
pub use index::{check_dk, estimate_g_index, estimate_r_index};
pub use report::{auto_mu, index_comparison_report, IndexReport, IndexRow};
pub use tractability::{tractability_chain, TractabilityChain, TractabilityStage};
