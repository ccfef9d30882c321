//! Core, kernel and bargaining-set membership, and core non-emptiness with
//! emptiness certificates.

mod bargaining;
mod core_set;
mod kernel;

pub use bargaining::{
    bargaining_set_check, bargaining_set_check_with, justified_objection_exists, verify_objection, BsOptions, BsVerdict,
    CounteredObjection, Objection, ObjectionConstraint, ObjectionOutcome,
};
pub use core_set::{core_check, core_check_with, core_nonempty, CoreMode, CoreNonEmptiness, CoreVerdict, EmptinessCertificate};
pub use kernel::{kernel_check, kernel_check_with, KernelVerdict};
