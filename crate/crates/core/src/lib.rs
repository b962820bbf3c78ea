//! Graph summarization with MDL structure vocabularies and graph similarity
//! through common-model description lengths.

pub mod aligner;
pub mod codec;
pub mod error;
pub mod generators;
pub mod graph;
pub mod maxent;
pub mod model;
pub mod similarity;
pub mod summarizer;

pub use error::{Error, Result};
pub use graph::{Graph, NodeAlignment, NodeId};
pub use model::{Model, Structure, StructureKind};
