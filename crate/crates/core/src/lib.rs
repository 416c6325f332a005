//! Topic-model sampling stability.
//!
//! Trains seeded LDA models on a full corpus ("spanning" models) and on
//! random document samples ("sample" models), aligns model pairs by
//! Jensen-Shannon distance between topic-word distributions and reports
//! alignment distance, topic overlap and the smallest sample size whose
//! models are as close to the spanning set as spanning models are to each
//! other.
//!
//! Probability matrices and distances are generic over [`Scalar`] (`f32`
//! or `f64`); the aliases below fix the common double-precision case.
pub mod align;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod lda;
pub mod num;
pub mod report;
pub mod seed;

pub use error::{Error, Result};
pub use num::Scalar;

pub type TopicModel = lda::TopicModel<f64>;
pub type TopicModel32 = lda::TopicModel<f32>;
pub type TopicMatrix = lda::TopicMatrix<f64>;
pub type AlignmentResult = align::AlignmentResult<f64>;
pub type AlignmentResult32 = align::AlignmentResult<f32>;
pub type AlignedPair = align::AlignedPair<f64>;
