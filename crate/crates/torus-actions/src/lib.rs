//! Exact classification of commuting integer-matrix actions on the rank-3
//! lattice, and symbolic construction of the free real-analytic torus
//! actions they induce.
//!
//! The crate has three layers, all exact unless a function says otherwise:
//!
//! * **Lattice algebra** ([`matrix`], [`snf`]) — arbitrary-precision integer
//!   matrices, Smith normal form with recorded unimodular transforms, kernel
//!   and basis-completion utilities.
//! * **Classification** ([`action`], [`normal_form`]) — validated
//!   generator families `ℤᵖ → GL_q(ℤ)`, the two-tier spectral check that
//!   every element has eigenvalue 1, and the reduction of rank-3 families
//!   with trivial joint fixed lattice to the Klein-four normal form
//!   `N(a, b)`, `M(c, d)` with `a·d + 2(b + c) = 0`, including the
//!   unimodular conjugator and generator change that witness the reduction.
//! * **Torus maps** ([`sym`], [`analytic`], [`freeness`]) — trigonometric
//!   affine lifts of the normal form with formal amplitudes, exact
//!   composition and commutator bookkeeping, closed forms on a finite-index
//!   subgroup, and the fixed-point elimination that certifies the induced
//!   `ℤᵖ`-action on the three-torus is free.  Floating point appears only in
//!   the explicitly numeric cross-checks (grid scans, orbit traces).
//!
//! [`samples`] ships small ready-made actions used by the demo and tests.
//!
//! ```
//! use torus_actions::{klein_pair, normalize_action, FreeActionFamily};
//!
//! let action = klein_pair(2, 1, -3, 2)?;
//! let nf = normalize_action(&action, 1000, 4)?;
//! let family = FreeActionFamily::build_generators(&nf)?;
//! assert!(family.action_law_report().all_hold());
//! # Ok::<(), torus_actions::Error>(())
//! ```

pub mod action;
pub mod analytic;
pub mod error;
pub mod freeness;
pub mod matrix;
pub mod normal_form;
pub mod samples;
pub mod snf;
pub mod sym;

pub use action::{klein_membership, ActionSpec, KleinElement, SpectralVerdict};
pub use analytic::{
    commutator_defect, ActionLawReport, CommutatorDefect, FreeActionFamily, IdentityCheck,
    PairDefect, TrigAffineMap, TrigPair,
};
pub use error::Error;
pub use freeness::{
    default_amplitudes, fixed_point_for_exponents, fixed_point_on_subgroup, lift_freeness,
    numeric_fixed_point_scan, orbit_iterate, reduce_unit, trajectory_csv, FixedPointReport,
    FixedPointVerdict, FreenessCertificate, Obstruction, QuadTerm, ScanConfig, ScanEntry,
    ScanReport, SubgroupSpec,
};
pub use matrix::IntMatrix;
pub use normal_form::{
    klein_m, klein_n, normalize_action, normalize_pair, relation_defect, verify_normal_form,
    NormalFormResult, PairNormalForm, VerificationReport,
};
pub use samples::{
    conjugated_klein_pair, demo_disguised_pair, demo_infinite_image, demo_pair, demo_parameters,
    infinite_image_rank_four, klein_pair,
};
pub use snf::{
    complete_to_basis, integer_kernel, primitive_generator, smith_normal_form, solve_integer,
    LatticeBasis, SnfDecomposition,
};
pub use sym::SymScalar;
