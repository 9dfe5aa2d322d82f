//! Explicit polygonal surfaces for the word families with constructive
//! proofs, and the follower obstruction for positive words.
//!
//! Every constructor hands its disks and pairing to [`certify`] and only
//! returns certificates whose verdict is affirmative.

mod height_one;
mod isolated;
mod obstruction;
mod rotation;

pub use height_one::{
    construct_height_one, construct_height_one_with, height_one_parameters, HeightOneOptions, HeightOneParameters,
    HeightOnePlan,
};
pub use isolated::{construct_isolated_b, BoundaryKind};
pub use obstruction::{nonpolygonality_follower_obstruction, FollowerEvidence, NeighborSide};
pub use rotation::{
    construct_f2_no_isolated, construct_from_tn, sourcesink_classify, two_disk_rotation, Junction, SourceSinkCounts,
    TwoDiskRotation,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{certify, ComplexError, DiskSpec, PolygonalityCertificate, SidePairing};
use crate::invariants::{InvariantError, TnCycle};
use crate::words::CyclicWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("certificate does not match ρ(w)")]
    CertificateMismatch,
    #[error("construction needs {slots} boundary slots, above the cap of {cap}")]
    TooLarge { slots: u64, cap: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("constructed surface failed certification: {0}")]
    NotCertified(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// How a certificate's surface was put together.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum ConstructionPlan {
    TwoDiskRotation,
    TnCycles {
        cycles: Vec<TnCycle>,
        /// Junction indices assigned to the pairs of each cycle.
        junctions: Vec<Vec<usize>>,
    },
    F2NoIsolated {
        sources: usize,
        filters: usize,
    },
    IsolatedB {
        /// Matched `(b-syllable, b-syllable)` boundary pairs.
        matches: Vec<(usize, usize)>,
        kinds: Vec<BoundaryKind>,
    },
    HeightOne(Box<HeightOnePlan>),
}

/// Certifies and rejects anything the certifier does not accept.
pub(crate) fn certified(
    word: &CyclicWord,
    disks: &[DiskSpec],
    pairing: &SidePairing,
    plan: ConstructionPlan,
) -> Result<PolygonalityCertificate, ConstructError> {
    let cert = certify(word, disks, pairing).with_plan(plan);
    if cert.is_polygonal() {
        Ok(cert)
    } else {
        Err(ConstructError::NotCertified(format!("{:?}", cert.verdict())))
    }
}
