use thiserror::Error;

use crate::asm::{ModestyReport, TrackerReport};
use crate::term::Term;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element `{0}` has no realizer")]
    EmptyRealizerSet(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("term `{0}` is not closed")]
    OpenTerm(Term),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("mapping is not total: `{0}` has no image")]
    PartialMapping(String),
    #[error("term does not track the map: {0}")]
    NotTracked(Box<TrackerReport>),
    #[error("could not decide: {0}")]
    Undecided(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("blocks {i} and {j} overlap: `{left}` ~ `{right}`")]
    OverlappingBlocks { i: usize, j: usize, left: Term, right: Term },
    #[error("image of `{0}` lies in no block of the target")]
    TargetBlockNotFound(String),
    #[error("assembly is not modest: {0}")]
    NotModest(Box<ModestyReport>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
