//! Gaussian matrix-product states on translationally invariant harmonic rings.
//!
//! A ring of `N` harmonic modes is produced by projecting `N` squeezed-state
//! bonds onto the input ports of `N` copies of a pure, bisymmetric three-mode
//! building block. The crate builds the resulting covariance matrices, exposes
//! their circulant structure and parent Hamiltonian, and measures how
//! bipartite entanglement is spread over the ring.
//!
//! All covariance matrices use the global quadrature ordering
//! `(q_1, …, q_N, p_1, …, p_N)`, and mode indices are zero-based.
//!
//! ```
//! use gmps::{BondSpec, BuildingBlockParams, RingSpec, build_mps, distribution};
//!
//! let block = BuildingBlockParams::new(1.5, 2.0).unwrap();
//! let spec = RingSpec::new(6, block, BondSpec::Infinite).unwrap();
//! let ring = build_mps(&spec).unwrap();
//! let records = distribution(&ring).unwrap();
//! // at s = s_min only nearest neighbours are entangled
//! assert!(records.iter().all(|r| r.entangled == (r.separation == 1)));
//! ```

pub mod cli;
pub mod entanglement;
pub mod error;
pub mod mps;
pub mod states;
pub mod symplectic;

pub use entanglement::{
    block_entropy, distribution, eof, local_purity, ppt_eta, ppt_eta_eigen, squeezing_db,
    threshold, threshold_with, EntanglementRecord, SqueezingDb, ThresholdOptions,
    ThresholdResult, DECISION_TOL,
};
pub use error::{Error, Result};
pub use mps::{
    assemble_bonds, assemble_chain, build_mps, build_mps_dense, extract_circulant,
    ground_state_cm, long_range_cm, potential_matrix, BondState, Chain, CirculantPair,
    LimitForm, Pairing, RingSpec,
};
pub use states::{
    building_block, partial_transpose, reduce, tmss, BondSpec, BuildingBlockParams,
    GaussianState, R_CAP,
};
pub use symplectic::{
    direct_sum, is_valid_cm, limit_schur_complement, schur_complement, schur_complement_with,
    symplectic_eigenvalues, SymMatrix, SymplecticForm, COND_CAP, PINV_CUTOFF,
};
